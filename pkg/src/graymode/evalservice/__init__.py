"""Two-stage mosaic evaluation service: sessions, votes and tallies."""

from .store import (
    BLANK_KEY,
    EvalStore,
    ImageSet,
    NotFoundError,
    StageConflictError,
    Tally,
    ValidationFailure,
    VoteRecord,
)

__all__ = [
    "BLANK_KEY",
    "EvalStore",
    "ImageSet",
    "NotFoundError",
    "StageConflictError",
    "Tally",
    "ValidationFailure",
    "VoteRecord",
]
