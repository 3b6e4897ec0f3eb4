"""Session state, vote log and tallies for the two-stage mosaic protocol.

Observers never see which operator produced a mosaic tile: every tile is
addressed by an opaque token derived from the session seed, and operator
weights stay server-side. Per image the protocol is a strict state machine
stage1 -> stage2 -> done; one image is active at a time and finishing it
activates the next.

Persistence is deliberately database-free: votes go to an append-only JSON
lines log and each session keeps a snapshot file. Replaying the vote log
against the static image-set definitions reconstructs every tally exactly;
revised stage-1 submissions (allowed until stage 2 is first served) stay in
the log and are superseded by revision number, never rewritten.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..families import case_study_grid

MOSAIC_ROWS = 3
MOSAIC_COLS = 6
MOSAIC_SLOTS = MOSAIC_ROWS * MOSAIC_COLS  # 18 slots for 17 variants + 1 blank
STAGE1_PICKS = 4

BLANK_KEY = "__blank__"
ORIGINAL_KEY = "__original__"

EXPECTED_VARIANT_KEYS = frozenset(spec.name for spec, _ in case_study_grid())

# 32x32 neutral-gray PNG for the blank slot, generated once at import.
def _blank_png() -> bytes:
    import io

    from PIL import Image

    img = Image.new("RGB", (32, 32), (128, 128, 128))
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()


BLANK_PNG = _blank_png()


class NotFoundError(KeyError):
    """Unknown session, image set, image or token."""


class StageConflictError(RuntimeError):
    """Request that does not match the image's current stage."""


class ValidationFailure(ValueError):
    """Malformed picks: wrong count, duplicates or foreign tokens."""


@dataclass(frozen=True)
class VoteRecord:
    timestamp: float
    observer_id: str
    session_id: str
    image_set_id: str
    image_id: str
    variant_key: str
    stage: str        # "stage1" | "final"
    revision: int

    def to_dict(self) -> dict:
        return self.__dict__.copy()

    @staticmethod
    def from_dict(data: dict) -> "VoteRecord":
        return VoteRecord(**data)


@dataclass
class Tally:
    image_set_id: str
    cohort: str | None
    final_counts: dict[str, int]
    stage1_counts: dict[str, int]
    total_final: int
    total_stage1: int
    completed_pairs: int

    def to_dict(self) -> dict:
        return self.__dict__.copy()


@dataclass(frozen=True)
class ImageEntry:
    image_id: str
    cohort: str | None
    directory: Path
    original: Path
    variants: dict[str, Path]


class ImageSet:
    """One study image set: per-image directories holding the original plus
    the 17 case-study variants (the `graymode variants` output layout)."""

    def __init__(self, set_id: str, images: list[ImageEntry]):
        self.set_id = set_id
        self.images = images
        self.by_id = {img.image_id: img for img in images}

    @staticmethod
    def load(root: Path, set_id: str) -> "ImageSet":
        set_dir = root / set_id
        if not set_dir.is_dir():
            raise NotFoundError(f"image set {set_id!r} not found under {root}")
        index_file = set_dir / "set.json"
        if index_file.exists():
            index = json.loads(index_file.read_text(encoding="utf-8"))
            entries = [(item["id"], item.get("cohort")) for item in index["images"]]
        else:
            entries = [(p.name, None) for p in sorted(set_dir.iterdir())
                       if p.is_dir()]
        if not entries:
            raise NotFoundError(f"image set {set_id!r} contains no images")
        images = []
        for image_id, cohort in entries:
            img_dir = set_dir / image_id
            manifest_file = img_dir / "manifest.json"
            if not manifest_file.exists():
                raise NotFoundError(f"{img_dir} has no manifest.json")
            manifest = json.loads(manifest_file.read_text(encoding="utf-8"))
            variants = {key: img_dir / meta["file"]
                        for key, meta in manifest["variants"].items()}
            keys = frozenset(variants)
            if keys != EXPECTED_VARIANT_KEYS:
                missing = EXPECTED_VARIANT_KEYS - keys
                extra = keys - EXPECTED_VARIANT_KEYS
                raise ValidationFailure(
                    f"{img_dir}: variants do not match the case-study grid "
                    f"(missing {sorted(missing)}, extra {sorted(extra)})")
            images.append(ImageEntry(image_id, cohort, img_dir,
                                     img_dir / manifest["original"], variants))
        return ImageSet(set_id, images)


@dataclass
class _ImageState:
    image_id: str
    placement: list[str]              # slot -> variant key or BLANK_KEY
    token_to_key: dict[str, str]
    key_to_token: dict[str, str]
    original_token: str
    stage: str = "pending"            # pending | stage1 | stage2 | done
    stage2_served: bool = False
    stage1_picks: list[str] = field(default_factory=list)  # variant keys
    final_pick: str | None = None
    stage1_revision: int = 0

    def to_dict(self) -> dict:
        return {
            "image_id": self.image_id,
            "placement": self.placement,
            "token_to_key": self.token_to_key,
            "original_token": self.original_token,
            "stage": self.stage,
            "stage2_served": self.stage2_served,
            "stage1_picks": self.stage1_picks,
            "final_pick": self.final_pick,
            "stage1_revision": self.stage1_revision,
        }

    @staticmethod
    def from_dict(data: dict) -> "_ImageState":
        state = _ImageState(
            image_id=data["image_id"],
            placement=data["placement"],
            token_to_key=data["token_to_key"],
            key_to_token={key: tok for tok, key in data["token_to_key"].items()},
            original_token=data["original_token"],
            stage=data["stage"],
            stage2_served=data["stage2_served"],
            stage1_picks=data["stage1_picks"],
            final_pick=data["final_pick"],
        )
        state.stage1_revision = data["stage1_revision"]
        return state


@dataclass
class _Session:
    session_id: str
    observer_id: str
    image_set_id: str
    seed: str
    queue: list[str]
    images: dict[str, _ImageState]

    def current_image(self) -> str | None:
        for image_id in self.queue:
            if self.images[image_id].stage != "done":
                return image_id
        return None

    def view(self) -> dict:
        current = self.current_image()
        return {
            "session_id": self.session_id,
            "observer_id": self.observer_id,
            "image_set_id": self.image_set_id,
            "images": list(self.queue),
            "current_image": current,
            "stage": self.images[current].stage if current else "done",
            "done": current is None,
        }

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "observer_id": self.observer_id,
            "image_set_id": self.image_set_id,
            "seed": self.seed,
            "queue": self.queue,
            "images": {k: v.to_dict() for k, v in self.images.items()},
        }

    @staticmethod
    def from_dict(data: dict) -> "_Session":
        return _Session(
            session_id=data["session_id"],
            observer_id=data["observer_id"],
            image_set_id=data["image_set_id"],
            seed=data["seed"],
            queue=data["queue"],
            images={k: _ImageState.from_dict(v)
                    for k, v in data["images"].items()},
        )


def _derive_token(set_id: str, seed: str, image_id: str, key: str) -> str:
    material = f"{set_id}|{seed}|{image_id}|{key}".encode()
    return hashlib.sha256(material).hexdigest()[:20]


def derive_placement(seed: str, image_id: str,
                     variant_keys) -> list[str]:
    """Deterministic permutation of the 17 variants plus one blank over the
    18 mosaic slots."""
    entries = sorted(variant_keys) + [BLANK_KEY]
    if len(entries) != MOSAIC_SLOTS:
        raise ValidationFailure(
            f"expected {MOSAIC_SLOTS - 1} variants, got {len(entries) - 1}")
    rng = random.Random(f"{seed}:{image_id}")
    rng.shuffle(entries)
    return entries


class EvalStore:
    """Sessions, assets, votes and tallies behind the HTTP endpoints."""

    def __init__(self, sets_root, data_dir, base_seed: str = "graymode"):
        self.sets_root = Path(sets_root)
        self.data_dir = Path(data_dir)
        self.base_seed = base_seed
        self.sessions_dir = self.data_dir / "sessions"
        self.votes_path = self.data_dir / "votes.jsonl"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)

        self._lock = threading.Lock()
        self._sets: dict[str, ImageSet] = {}
        self._sessions: dict[str, _Session] = {}
        self._votes: list[VoteRecord] = []
        self._assets: dict[str, Path | None] = {}  # token -> file (None = blank)
        self._counter = 0
        self._load_state()

    # -- persistence ------------------------------------------------------

    def _load_state(self) -> None:
        if self.votes_path.exists():
            with self.votes_path.open(encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        self._votes.append(VoteRecord.from_dict(json.loads(line)))
        for snap in sorted(self.sessions_dir.glob("*.json")):
            session = _Session.from_dict(
                json.loads(snap.read_text(encoding="utf-8")))
            self._sessions[session.session_id] = session
            self._register_assets(session)
        self._counter = len(self._sessions)

    def _append_votes(self, records: list[VoteRecord]) -> None:
        with self.votes_path.open("a", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec.to_dict()) + "\n")
        self._votes.extend(records)

    def _snapshot(self, session: _Session) -> None:
        path = self.sessions_dir / f"{session.session_id}.json"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(session.to_dict()), encoding="utf-8")
        os.replace(tmp, path)

    # -- sets and assets --------------------------------------------------

    def image_set(self, set_id: str) -> ImageSet:
        if set_id not in self._sets:
            self._sets[set_id] = ImageSet.load(self.sets_root, set_id)
        return self._sets[set_id]

    def _register_assets(self, session: _Session) -> None:
        image_set = self.image_set(session.image_set_id)
        for image_id, state in session.images.items():
            entry = image_set.by_id[image_id]
            for token, key in state.token_to_key.items():
                self._assets[token] = (None if key == BLANK_KEY
                                       else entry.variants[key])
            self._assets[state.original_token] = entry.original

    def asset(self, token: str) -> Path | None:
        """File behind a token; None means the generated blank tile."""
        try:
            return self._assets[token]
        except KeyError:
            raise NotFoundError(f"unknown asset token {token!r}") from None

    # -- protocol ---------------------------------------------------------

    def create_session(self, observer_id: str, image_set_id: str,
                       seed: str | None = None) -> dict:
        with self._lock:
            image_set = self.image_set(image_set_id)
            self._counter += 1
            session_id = f"s{self._counter:05d}"
            eff_seed = seed if seed is not None else f"{self.base_seed}:{session_id}"
            images: dict[str, _ImageState] = {}
            for entry in image_set.images:
                placement = derive_placement(eff_seed, entry.image_id,
                                             entry.variants.keys())
                token_to_key = {}
                for key in list(entry.variants) + [BLANK_KEY]:
                    token = _derive_token(image_set_id, eff_seed,
                                          entry.image_id, key)
                    token_to_key[token] = key
                original_token = _derive_token(image_set_id, eff_seed,
                                               entry.image_id, ORIGINAL_KEY)
                images[entry.image_id] = _ImageState(
                    image_id=entry.image_id,
                    placement=placement,
                    token_to_key=token_to_key,
                    key_to_token={k: t for t, k in token_to_key.items()},
                    original_token=original_token,
                )
            session = _Session(session_id, observer_id, image_set_id,
                               eff_seed, [e.image_id for e in image_set.images],
                               images)
            session.images[session.queue[0]].stage = "stage1"
            self._sessions[session_id] = session
            self._register_assets(session)
            self._snapshot(session)
            return session.view()

    def _session(self, session_id: str) -> _Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise NotFoundError(f"unknown session {session_id!r}") from None

    def _image_state(self, session: _Session, image_id: str) -> _ImageState:
        try:
            return session.images[image_id]
        except KeyError:
            raise NotFoundError(
                f"image {image_id!r} not in session {session.session_id}") from None

    def session_view(self, session_id: str) -> dict:
        with self._lock:
            return self._session(session_id).view()

    def stage1_manifest(self, session_id: str, image_id: str) -> dict:
        with self._lock:
            session = self._session(session_id)
            state = self._image_state(session, image_id)
            if state.stage != "stage1":
                raise StageConflictError(
                    f"image {image_id!r} is in stage {state.stage!r}, not stage1")
            slots = []
            for slot, key in enumerate(state.placement):
                token = state.key_to_token[key]
                slots.append({
                    "slot": slot,
                    "token": token,
                    "url": f"/assets/{token}",
                    "blank": key == BLANK_KEY,
                })
            return {
                "session_id": session_id,
                "image_id": image_id,
                "rows": MOSAIC_ROWS,
                "cols": MOSAIC_COLS,
                "reference_url": f"/assets/{state.original_token}",
                "slots": slots,
            }

    def submit_stage1(self, session_id: str, image_id: str,
                      picks: list[str]) -> dict:
        with self._lock:
            session = self._session(session_id)
            state = self._image_state(session, image_id)
            resubmission = state.stage == "stage2" and not state.stage2_served
            if state.stage != "stage1" and not resubmission:
                raise StageConflictError(
                    f"image {image_id!r} is in stage {state.stage!r}, "
                    "stage-1 picks are closed")
            if len(picks) != STAGE1_PICKS:
                raise ValidationFailure(
                    f"need exactly {STAGE1_PICKS} picks, got {len(picks)}")
            if len(set(picks)) != STAGE1_PICKS:
                raise ValidationFailure("picks contain duplicates")
            keys = []
            for token in picks:
                key = state.token_to_key.get(token)
                if key is None:
                    raise ValidationFailure(
                        f"token {token!r} does not belong to this mosaic")
                if key == BLANK_KEY:
                    raise ValidationFailure("the blank tile cannot be picked")
                keys.append(key)
            state.stage1_revision += 1
            state.stage1_picks = keys
            state.stage = "stage2"
            now = time.time()
            self._append_votes([
                VoteRecord(now, session.observer_id, session_id,
                           session.image_set_id, image_id, key, "stage1",
                           state.stage1_revision)
                for key in keys])
            self._snapshot(session)
            return {"ok": True, "image_id": image_id, "stage": state.stage}

    def stage2_manifest(self, session_id: str, image_id: str) -> dict:
        with self._lock:
            session = self._session(session_id)
            state = self._image_state(session, image_id)
            if state.stage != "stage2":
                raise StageConflictError(
                    f"image {image_id!r} is in stage {state.stage!r}, not stage2")
            state.stage2_served = True
            self._snapshot(session)
            candidates = [{"token": state.key_to_token[key],
                           "url": f"/assets/{state.key_to_token[key]}"}
                          for key in state.stage1_picks]
            return {
                "session_id": session_id,
                "image_id": image_id,
                "candidates": candidates,
            }

    def submit_final(self, session_id: str, image_id: str, pick: str) -> dict:
        with self._lock:
            session = self._session(session_id)
            state = self._image_state(session, image_id)
            if state.stage != "stage2":
                raise StageConflictError(
                    f"image {image_id!r} is in stage {state.stage!r}, not stage2")
            key = state.token_to_key.get(pick)
            if key is None or key not in state.stage1_picks:
                raise ValidationFailure(
                    "final pick must be one of the stage-1 picks")
            state.stage2_served = True  # window closes even without a GET
            state.final_pick = key
            state.stage = "done"
            next_image = session.current_image()
            if next_image is not None:
                session.images[next_image].stage = "stage1"
            self._append_votes([
                VoteRecord(time.time(), session.observer_id, session_id,
                           session.image_set_id, image_id, key, "final",
                           state.stage1_revision)])
            self._snapshot(session)
            return {"ok": True, "image_id": image_id, "done": next_image is None,
                    "next_image": next_image}

    # -- tallies ----------------------------------------------------------

    def tally(self, image_set_id: str, cohort: str | None = None) -> Tally:
        with self._lock:
            records = list(self._votes)
        image_set = self.image_set(image_set_id)
        wanted_images = {img.image_id for img in image_set.images
                         if cohort is None or img.cohort == cohort}
        return tally_records(records, image_set_id, wanted_images, cohort)


def tally_records(records: list[VoteRecord], image_set_id: str,
                  wanted_images: set[str], cohort: str | None = None) -> Tally:
    """Aggregate a vote log: only the highest revision per (session, image,
    stage) is effective, so revised stage-1 picks never double count."""
    latest_rev: dict[tuple[str, str, str], int] = {}
    for rec in records:
        if rec.image_set_id != image_set_id or rec.image_id not in wanted_images:
            continue
        group = (rec.session_id, rec.image_id, rec.stage)
        latest_rev[group] = max(latest_rev.get(group, 0), rec.revision)

    final_counts: dict[str, int] = {}
    stage1_counts: dict[str, int] = {}
    completed = 0
    for rec in records:
        if rec.image_set_id != image_set_id or rec.image_id not in wanted_images:
            continue
        if rec.revision != latest_rev[(rec.session_id, rec.image_id, rec.stage)]:
            continue
        if rec.stage == "final":
            final_counts[rec.variant_key] = final_counts.get(rec.variant_key, 0) + 1
            completed += 1
        else:
            stage1_counts[rec.variant_key] = stage1_counts.get(rec.variant_key, 0) + 1
    return Tally(
        image_set_id=image_set_id,
        cohort=cohort,
        final_counts=final_counts,
        stage1_counts=stage1_counts,
        total_final=sum(final_counts.values()),
        total_stage1=sum(stage1_counts.values()),
        completed_pairs=completed,
    )
