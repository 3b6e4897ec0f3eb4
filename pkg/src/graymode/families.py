"""Operator families: the K parametrization of linear projection weights.

K = lambda_g^2 / (lambda_r * lambda_b) names the family; fixing one weight
picks the member. Solving the sum constraint together with K gives a
quadratic in the remaining weights, whose positive radical is the unique
feasible root when red or blue is the fixed channel. Fixing green leaves a
genuine two-root quadratic in lambda_b; the plus root is the default and the
minus root (which swaps lambda_r and lambda_b) is available explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .color import LinearOperator

# Family values used in the 17-configuration case-study grid: 0.5 to 12.5,
# step 2.
CASE_STUDY_KS = (0.5, 2.5, 4.5, 6.5, 8.5, 10.5, 12.5)
CASE_STUDY_BLUE = 0.114
CASE_STUDY_RED = 0.299
CASE_STUDY_GREEN = 0.587


class InfeasibleMemberError(ValueError):
    """The requested (K, fixed weight) pair yields no valid weight triple."""


class FamilyIncompatibleError(InfeasibleMemberError):
    """Fixed-green solve has a negative discriminant: K is too small for
    this lambda_g (requires K >= (2*lambda_g / (1 - lambda_g))^2)."""


@dataclass(frozen=True)
class MemberSpec:
    """Identifies one family member: which weight was fixed, at what value,
    in which family. root_sign is meaningful only for fixed green."""

    fixed_channel: str          # "red" | "green" | "blue"
    fixed_value: float
    k: float
    root_sign: str | None = None

    def __post_init__(self) -> None:
        if self.fixed_channel not in ("red", "green", "blue"):
            raise ValueError(f"unknown channel {self.fixed_channel!r}")
        if not (0.0 < self.fixed_value < 1.0):
            raise ValueError("fixed_value must be strictly inside (0, 1)")
        if self.k <= 0.0:
            raise ValueError("family parameter K must be positive")
        if self.root_sign not in (None, "plus", "minus"):
            raise ValueError(f"unknown root_sign {self.root_sign!r}")

    @property
    def name(self) -> str:
        """Filename-friendly identifier, e.g. 'K0.5_b0.114'."""
        letter = self.fixed_channel[0]
        return f"K{self.k:g}_{letter}{self.fixed_value:g}"


def family_of(op: LinearOperator) -> float:
    """Family parameter K of an operator."""
    # lambda_g * lambda_g (not ** 2) so equal weights cancel exactly: the
    # uniform operator lands on K = 1.0 with no rounding.
    return (op.lambda_g * op.lambda_g) / (op.lambda_r * op.lambda_b)


def _validate_k(k: float) -> None:
    if not (k > 0.0) or not math.isfinite(k):
        raise ValueError(f"family parameter K must be a positive real, got {k!r}")


def _validate_fixed(name: str, value: float) -> None:
    if not (0.0 < value < 1.0):
        raise InfeasibleMemberError(
            f"fixed {name}={value!r} must be strictly inside (0, 1)")


def _quadratic_green(k: float, fixed: float) -> float:
    # Positive radical of lambda_g^2 + K*w*lambda_g + K*w*(w - 1) = 0,
    # with w the fixed red or blue weight.
    half = k * fixed / 2.0
    return math.sqrt(half * half + k * fixed * (1.0 - fixed)) - half


def _as_member(lr: float, lg: float, lb: float, context: str) -> LinearOperator:
    try:
        return LinearOperator(lr, lg, lb)
    except ValueError as exc:
        raise InfeasibleMemberError(f"{context}: {exc}") from exc


def member_from_blue(k: float, lambda_b: float) -> LinearOperator:
    """Member of family K with the given blue weight."""
    _validate_k(k)
    _validate_fixed("lambda_b", lambda_b)
    lg = _quadratic_green(k, lambda_b)
    lr = 1.0 - lg - lambda_b
    return _as_member(lr, lg, lambda_b, f"member_from_blue(K={k}, lambda_b={lambda_b})")


def member_from_red(k: float, lambda_r: float) -> LinearOperator:
    """Member of family K with the given red weight."""
    _validate_k(k)
    _validate_fixed("lambda_r", lambda_r)
    lg = _quadratic_green(k, lambda_r)
    lb = 1.0 - lg - lambda_r
    return _as_member(lambda_r, lg, lb, f"member_from_red(K={k}, lambda_r={lambda_r})")


def member_from_green(k: float, lambda_g: float,
                      root_sign: str = "plus") -> LinearOperator:
    """Member of family K with the given green weight.

    Feasible only for K >= (2*lambda_g / (1 - lambda_g))^2; below that the
    discriminant is negative and FamilyIncompatibleError is raised. The two
    real roots mirror each other in lambda_r/lambda_b.
    """
    _validate_k(k)
    _validate_fixed("lambda_g", lambda_g)
    if root_sign not in ("plus", "minus"):
        raise ValueError(f"root_sign must be 'plus' or 'minus', got {root_sign!r}")
    mid = (1.0 - lambda_g) / 2.0
    disc = mid * mid - lambda_g * lambda_g / k
    if disc < 0.0:
        # disc is ((lambda_r - lambda_b)/2)^2 analytically; absorb rounding
        # at the lambda_r == lambda_b boundary instead of rejecting it
        if disc >= -1e-12 * mid * mid:
            disc = 0.0
        else:
            raise FamilyIncompatibleError(
                f"K={k} is below the feasibility threshold "
                f"{(2.0 * lambda_g / (1.0 - lambda_g)) ** 2:.6g} "
                f"for lambda_g={lambda_g}")
    root = math.sqrt(disc)
    lb = mid + root if root_sign == "plus" else mid - root
    lr = 1.0 - lambda_g - lb
    return _as_member(lr, lambda_g, lb,
                      f"member_from_green(K={k}, lambda_g={lambda_g}, {root_sign})")


@dataclass(frozen=True)
class GridCandidate:
    """One weight triple from a discrete candidate grid.

    Degenerate triples contain a 0 or 1 weight (they map fewer than three
    channels) and cannot be expressed as a LinearOperator.
    """

    lambda_r: float
    lambda_g: float
    lambda_b: float

    @property
    def degenerate(self) -> bool:
        return any(not (0.0 < w < 1.0)
                   for w in (self.lambda_r, self.lambda_g, self.lambda_b))

    def operator(self) -> LinearOperator:
        return LinearOperator(self.lambda_r, self.lambda_g, self.lambda_b)


def enumerate_grid(values, interior_only: bool = False) -> list[GridCandidate]:
    """All ordered weight triples drawn from sorted distinct values in [0, 1]
    that sum to 1 within tolerance.

    For values {0, s, 2s, ..., 1} the count is V(V+1)/2. With interior_only,
    degenerate triples (those containing 0 or 1) are dropped.
    """
    values = list(values)
    if not values:
        raise ValueError("value set is empty")
    if any(not (0.0 <= v <= 1.0) for v in values):
        raise ValueError("values must lie within [0, 1]")
    if sorted(values) != values or len(set(values)) != len(values):
        raise ValueError("values must be sorted and distinct")
    out = []
    for lr in values:
        for lg in values:
            for lb in values:
                if abs((lr + lg + lb) - 1.0) <= 1e-9:
                    cand = GridCandidate(lr, lg, lb)
                    if interior_only and cand.degenerate:
                        continue
                    out.append(cand)
    return out


def case_study_grid() -> list[tuple[MemberSpec, LinearOperator]]:
    """The 17-configuration grid: 7 fixed-blue members, 7 fixed-red, and the
    3 fixed-green members whose family is feasible at lambda_g = 0.587."""
    grid: list[tuple[MemberSpec, LinearOperator]] = []
    for k in CASE_STUDY_KS:
        grid.append((MemberSpec("blue", CASE_STUDY_BLUE, k),
                     member_from_blue(k, CASE_STUDY_BLUE)))
    for k in CASE_STUDY_KS:
        grid.append((MemberSpec("red", CASE_STUDY_RED, k),
                     member_from_red(k, CASE_STUDY_RED)))
    for k in CASE_STUDY_KS:
        try:
            op = member_from_green(k, CASE_STUDY_GREEN, "plus")
        except FamilyIncompatibleError:
            continue
        grid.append((MemberSpec("green", CASE_STUDY_GREEN, k, "plus"), op))
    return grid
