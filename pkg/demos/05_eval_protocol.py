"""The two-stage mosaic evaluation protocol, end to end in one process.

An image set is generated with the variants command (17 grayscale versions
of each source image plus the color original), then a scripted observer
works a session: view the 3 x 6 mosaic, pick 4, view the 2 x 2 stage, pick
1. Tokens are opaque, so the observer never learns which operator made
which tile. The tally at the end aggregates the append-only vote log.
"""

import json
import random
import tempfile
from pathlib import Path

import numpy as np

from graymode.cli import main as cli_main
from graymode.evalservice.store import EvalStore
from graymode.imagefiles import write_image

workdir = Path(tempfile.mkdtemp(prefix="graymode-demo-"))
sets_root = workdir / "sets"
print(f"working under {workdir}")

# two small synthetic "faces"
rng = np.random.default_rng(1)
entries = [("portrait-a", "black"), ("portrait-b", "white")]
for image_id, _ in entries:
    src = workdir / f"{image_id}.png"
    write_image(src, rng.integers(0, 256, size=(32, 24, 3), dtype=np.uint8))
    cli_main(["variants", str(src), "--out-dir",
              str(sets_root / "demo" / image_id)])
(sets_root / "demo" / "set.json").write_text(json.dumps({
    "images": [{"id": i, "cohort": c} for i, c in entries]}))
print("image set ready: 2 images x 17 variants + originals")

store = EvalStore(sets_root, workdir / "data", base_seed="demo")
observer = random.Random(7)
view = store.create_session("demo-observer", "demo", seed="demo-session")
print(f"\nsession {view['session_id']} created; queue: {view['images']}")

for image_id in view["images"]:
    manifest = store.stage1_manifest(view["session_id"], image_id)
    tokens = [slot["token"] for slot in manifest["slots"] if not slot["blank"]]
    print(f"\n{image_id}: mosaic of {len(manifest['slots'])} slots "
          f"({len(tokens)} variants + 1 blank), reference at "
          f"{manifest['reference_url']}")
    picks = observer.sample(tokens, 4)
    store.submit_stage1(view["session_id"], image_id, picks)
    stage2 = store.stage2_manifest(view["session_id"], image_id)
    final = observer.choice([c["token"] for c in stage2["candidates"]])
    result = store.submit_final(view["session_id"], image_id, final)
    print(f"  picked 4, then confirmed one; next: {result['next_image']}")

tally = store.tally("demo")
print(f"\ntally: {tally.total_final} final votes over "
      f"{tally.completed_pairs} completed image/observer pairs")
for key, count in sorted(tally.final_counts.items()):
    print(f"  {key:15s} {count}")
print(f"\nvote log: {store.votes_path}")
