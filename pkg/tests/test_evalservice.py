import json
import random

import numpy as np
import pytest
from fastapi.testclient import TestClient

from graymode.evalservice.app import ServiceConfig, create_app
from graymode.evalservice.store import (
    BLANK_KEY,
    EXPECTED_VARIANT_KEYS,
    EvalStore,
    NotFoundError,
    StageConflictError,
    ValidationFailure,
    derive_placement,
    tally_records,
)
from .conftest import build_image_set

WEIGHT_FRAGMENTS = ("lambda", "0.587", "0.299", "0.688", "0.114", "K0.5", "K10.5")


@pytest.fixture(scope="module")
def sets_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("sets")
    build_image_set(root, "faces", [("img-a", "black"), ("img-b", "white")])
    return root


@pytest.fixture
def store(sets_root, tmp_path):
    return EvalStore(sets_root, tmp_path / "data", base_seed="test-seed")


def variant_picks(store, session_id, image_id, count=4):
    manifest = store.stage1_manifest(session_id, image_id)
    return [slot["token"] for slot in manifest["slots"]
            if not slot["blank"]][:count]


def complete_image(store, session_id, image_id):
    picks = variant_picks(store, session_id, image_id)
    store.submit_stage1(session_id, image_id, picks)
    store.stage2_manifest(session_id, image_id)
    return store.submit_final(session_id, image_id, picks[0])


class TestSessionCreation:
    def test_mosaic_has_17_variants_and_one_blank(self, store):
        view = store.create_session("obs1", "faces")
        manifest = store.stage1_manifest(view["session_id"], "img-a")
        assert len(manifest["slots"]) == 18
        blanks = [s for s in manifest["slots"] if s["blank"]]
        assert len(blanks) == 1
        assert manifest["rows"] == 3 and manifest["cols"] == 6
        assert manifest["reference_url"].startswith("/assets/")

    def test_same_seed_identical_placements(self, store):
        a = store.create_session("obs1", "faces", seed="alpha")
        b = store.create_session("obs2", "faces", seed="alpha")
        ma = store.stage1_manifest(a["session_id"], "img-a")
        mb = store.stage1_manifest(b["session_id"], "img-a")
        assert ma["slots"] == mb["slots"]

    def test_different_seeds_differ(self, store):
        a = store.create_session("obs1", "faces", seed="alpha")
        b = store.create_session("obs2", "faces", seed="beta")
        ma = store.stage1_manifest(a["session_id"], "img-a")
        mb = store.stage1_manifest(b["session_id"], "img-a")
        assert ma["slots"] != mb["slots"]

    def test_unknown_set(self, store):
        with pytest.raises(NotFoundError):
            store.create_session("obs1", "no-such-set")

    def test_first_image_active_rest_pending(self, store):
        view = store.create_session("obs1", "faces")
        assert view["current_image"] == "img-a"
        assert view["stage"] == "stage1"
        with pytest.raises(StageConflictError):
            store.stage1_manifest(view["session_id"], "img-b")


class TestBlinding:
    def test_no_weight_leakage_in_any_payload(self, store):
        view = store.create_session("obs1", "faces", seed="blind")
        sid = view["session_id"]
        payloads = [view, store.stage1_manifest(sid, "img-a")]
        picks = [s["token"] for s in payloads[1]["slots"] if not s["blank"]][:4]
        payloads.append(store.submit_stage1(sid, "img-a", picks))
        payloads.append(store.stage2_manifest(sid, "img-a"))
        payloads.append(store.submit_final(sid, "img-a", picks[2]))
        blob = json.dumps(payloads)
        for fragment in WEIGHT_FRAGMENTS:
            assert fragment not in blob
        for key in EXPECTED_VARIANT_KEYS:
            assert key not in blob

    def test_tokens_are_opaque_hashes(self, store):
        view = store.create_session("obs1", "faces")
        manifest = store.stage1_manifest(view["session_id"], "img-a")
        for slot in manifest["slots"]:
            assert len(slot["token"]) == 20
            int(slot["token"], 16)  # hex digest prefix


class TestProtocol:
    def test_happy_path_advances_queue(self, store):
        view = store.create_session("obs1", "faces")
        sid = view["session_id"]
        result = complete_image(store, sid, "img-a")
        assert result["done"] is False
        assert result["next_image"] == "img-b"
        result = complete_image(store, sid, "img-b")
        assert result["done"] is True
        assert store.session_view(sid)["done"] is True

    def test_stage1_pick_count_enforced(self, store):
        sid = store.create_session("o", "faces")["session_id"]
        picks = variant_picks(store, sid, "img-a")
        with pytest.raises(ValidationFailure):
            store.submit_stage1(sid, "img-a", picks[:3])
        with pytest.raises(ValidationFailure):
            store.submit_stage1(sid, "img-a", picks + ["deadbeef"])

    def test_duplicate_picks_rejected(self, store):
        sid = store.create_session("o", "faces")["session_id"]
        picks = variant_picks(store, sid, "img-a")
        with pytest.raises(ValidationFailure):
            store.submit_stage1(sid, "img-a", [picks[0]] * 4)

    def test_blank_not_selectable(self, store):
        sid = store.create_session("o", "faces")["session_id"]
        manifest = store.stage1_manifest(sid, "img-a")
        blank = next(s["token"] for s in manifest["slots"] if s["blank"])
        real = [s["token"] for s in manifest["slots"] if not s["blank"]][:3]
        with pytest.raises(ValidationFailure):
            store.submit_stage1(sid, "img-a", real + [blank])

    def test_foreign_token_rejected(self, store):
        sid = store.create_session("o", "faces")["session_id"]
        picks_a = variant_picks(store, sid, "img-a", count=3)
        other = store.create_session("o2", "faces", seed="x")["session_id"]
        foreign = variant_picks(store, other, "img-a", count=1)
        with pytest.raises(ValidationFailure):
            store.submit_stage1(sid, "img-a", picks_a + foreign)

    def test_stage2_candidates_are_the_picks(self, store):
        sid = store.create_session("o", "faces")["session_id"]
        picks = variant_picks(store, sid, "img-a")
        store.submit_stage1(sid, "img-a", picks)
        manifest = store.stage2_manifest(sid, "img-a")
        assert [c["token"] for c in manifest["candidates"]] == picks

    def test_final_must_be_stage1_pick(self, store):
        sid = store.create_session("o", "faces")["session_id"]
        manifest = store.stage1_manifest(sid, "img-a")
        tokens = [s["token"] for s in manifest["slots"] if not s["blank"]]
        store.submit_stage1(sid, "img-a", tokens[:4])
        with pytest.raises(ValidationFailure):
            store.submit_final(sid, "img-a", tokens[10])

    def test_stage_conflicts(self, store):
        sid = store.create_session("o", "faces")["session_id"]
        picks = variant_picks(store, sid, "img-a")
        with pytest.raises(StageConflictError):
            store.stage2_manifest(sid, "img-a")       # still stage1
        with pytest.raises(StageConflictError):
            store.submit_final(sid, "img-a", picks[0])
        store.submit_stage1(sid, "img-a", picks)
        with pytest.raises(StageConflictError):
            store.stage1_manifest(sid, "img-a")       # now stage2
        store.stage2_manifest(sid, "img-a")
        store.submit_final(sid, "img-a", picks[1])
        with pytest.raises(StageConflictError):
            store.submit_final(sid, "img-a", picks[1])  # done

    def test_resubmission_window(self, store):
        sid = store.create_session("o", "faces")["session_id"]
        manifest = store.stage1_manifest(sid, "img-a")
        tokens = [s["token"] for s in manifest["slots"] if not s["blank"]]
        store.submit_stage1(sid, "img-a", tokens[:4])
        # may revise until stage 2 is first served
        store.submit_stage1(sid, "img-a", tokens[4:8])
        store.stage2_manifest(sid, "img-a")
        with pytest.raises(StageConflictError):
            store.submit_stage1(sid, "img-a", tokens[8:12])
        # only the effective (revised) picks count in the stage-1 tally
        store.submit_final(sid, "img-a", tokens[5])
        tally = store.tally("faces")
        assert tally.total_stage1 == 4
        assert tally.total_final == 1

    def test_unknown_session_and_image(self, store):
        with pytest.raises(NotFoundError):
            store.stage1_manifest("nope", "img-a")
        sid = store.create_session("o", "faces")["session_id"]
        with pytest.raises(NotFoundError):
            store.stage1_manifest(sid, "img-zzz")


class TestTally:
    def test_empty_log_is_zero(self, store):
        tally = store.tally("faces")
        assert tally.total_final == 0
        assert tally.total_stage1 == 0
        assert tally.final_counts == {}

    def test_counts_by_variant_and_cohort(self, store):
        sid = store.create_session("o", "faces")["session_id"]
        complete_image(store, sid, "img-a")
        complete_image(store, sid, "img-b")
        whole = store.tally("faces")
        assert whole.total_final == 2
        assert whole.completed_pairs == 2
        assert sum(whole.final_counts.values()) == whole.total_final
        black = store.tally("faces", cohort="black")
        white = store.tally("faces", cohort="white")
        assert black.total_final == 1 and white.total_final == 1
        assert black.total_stage1 == 4

    def test_replay_reconstructs_tally(self, store, sets_root, tmp_path):
        sid = store.create_session("o", "faces")["session_id"]
        complete_image(store, sid, "img-a")
        want = store.tally("faces").to_dict()
        # replay 1: a fresh store over the same data directory
        reloaded = EvalStore(sets_root, store.data_dir, base_seed="test-seed")
        assert reloaded.tally("faces").to_dict() == want
        # replay 2: pure function of the on-disk vote log
        records = reloaded._votes
        wanted_images = {"img-a", "img-b"}
        assert tally_records(records, "faces", wanted_images).to_dict() == want


class TestPlacementUniformity:
    def test_slot_distribution_within_3_sigma(self):
        keys = sorted(EXPECTED_VARIANT_KEYS)
        n = 10_000
        positions = {key: np.zeros(18, dtype=int) for key in keys}
        blank_positions = np.zeros(18, dtype=int)
        for i in range(n):
            placement = derive_placement(f"seed-{i}", "img", keys)
            for slot, key in enumerate(placement):
                if key == BLANK_KEY:
                    blank_positions[slot] += 1
                else:
                    positions[key][slot] += 1
        p = 1 / 18
        sigma = (n * p * (1 - p)) ** 0.5
        for key in keys:
            assert np.abs(positions[key] - n * p).max() <= 3 * sigma, key
        assert np.abs(blank_positions - n * p).max() <= 3 * sigma


class StateMachineModel:
    """Shadow model driven alongside the store by random request traffic."""

    def __init__(self, store, session_id, image_ids):
        self.store = store
        self.sid = session_id
        self.images = image_ids
        self.stage = {img: "pending" for img in image_ids}
        self.stage[image_ids[0]] = "stage1"
        self.served2 = {img: False for img in image_ids}
        self.picks = {img: [] for img in image_ids}

    def legal(self, action, img):
        if action == "get1":
            return self.stage[img] == "stage1"
        if action == "post1":
            return (self.stage[img] == "stage1"
                    or (self.stage[img] == "stage2" and not self.served2[img]))
        if action == "get2":
            return self.stage[img] == "stage2"
        if action == "final":
            return self.stage[img] == "stage2"
        raise AssertionError(action)

    def fire(self, rng, action, img):
        was_legal = self.legal(action, img)
        try:
            if action == "get1":
                self.store.stage1_manifest(self.sid, img)
            elif action == "post1":
                tokens = sorted(
                    self.store._sessions[self.sid].images[img].key_to_token[k]
                    for k in rng.sample(sorted(EXPECTED_VARIANT_KEYS), 4))
                self.store.submit_stage1(self.sid, img, tokens)
            elif action == "get2":
                self.store.stage2_manifest(self.sid, img)
            elif action == "final":
                state = self.store._sessions[self.sid].images[img]
                if state.stage1_picks:
                    pick = state.key_to_token[rng.choice(state.stage1_picks)]
                else:
                    pick = "0" * 20
                self.store.submit_final(self.sid, img, pick)
        except (StageConflictError, NotFoundError, ValidationFailure):
            assert not was_legal or action == "final", \
                f"legal {action} on {img} rejected"
            return
        # request was accepted: it must have been legal
        assert was_legal, f"illegal {action} accepted on {img} in {self.stage[img]}"
        if action == "post1":
            self.stage[img] = "stage2"
            self.served2[img] = False
        elif action == "get2":
            self.served2[img] = True
        elif action == "final":
            self.stage[img] = "done"
            for nxt in self.images:
                if self.stage[nxt] != "done":
                    if self.stage[nxt] == "pending":
                        self.stage[nxt] = "stage1"
                    break


def run_random_protocol_suite(store, sequences, requests_per_sequence, seed=0):
    rng = random.Random(seed)
    actions = ["get1", "post1", "get2", "final"]
    for s in range(sequences):
        view = store.create_session(f"fuzz-{s}", "faces", seed=f"fz{s}")
        model = StateMachineModel(store, view["session_id"],
                                  view["images"])
        for _ in range(requests_per_sequence):
            model.fire(rng, rng.choice(actions), rng.choice(model.images))
        # stages in the store match the shadow model at the end
        session = store._sessions[view["session_id"]]
        for img in model.images:
            assert session.images[img].stage == model.stage[img]


class TestStateMachineSafety:
    def test_random_traffic_small(self, store):
        run_random_protocol_suite(store, sequences=10,
                                  requests_per_sequence=50, seed=3)


class TestHttpApi:
    @pytest.fixture
    def client(self, sets_root, tmp_path):
        config = ServiceConfig(sets_root=str(sets_root),
                               data_dir=str(tmp_path / "data"),
                               seed="http-seed")
        app = create_app(config)
        return TestClient(app)

    def test_full_flow(self, client):
        resp = client.post("/sessions", json={"observer_id": "web",
                                              "image_set_id": "faces"})
        assert resp.status_code == 200
        view = resp.json()
        sid = view["session_id"]
        assert view["stage"] == "stage1"

        resp = client.get(f"/sessions/{sid}/images/img-a/stage1")
        assert resp.status_code == 200
        manifest = resp.json()
        tokens = [s["token"] for s in manifest["slots"] if not s["blank"]]
        assert len(tokens) == 17

        # assets stream as PNG, including the blank and the reference image
        asset = client.get(manifest["slots"][0]["url"])
        assert asset.status_code == 200
        assert asset.headers["content-type"] == "image/png"
        assert client.get(manifest["reference_url"]).status_code == 200

        resp = client.post(f"/sessions/{sid}/images/img-a/stage1",
                           json={"picks": tokens[:4]})
        assert resp.status_code == 200

        resp = client.get(f"/sessions/{sid}/images/img-a/stage2")
        assert resp.status_code == 200
        assert len(resp.json()["candidates"]) == 4

        resp = client.post(f"/sessions/{sid}/images/img-a/final",
                           json={"pick": tokens[0]})
        assert resp.status_code == 200
        assert resp.json()["next_image"] == "img-b"

        resp = client.get("/tally", params={"set": "faces"})
        assert resp.status_code == 200
        assert resp.json()["total_final"] == 1

        # session view supports resuming
        resp = client.get(f"/sessions/{sid}")
        assert resp.json()["current_image"] == "img-b"

    def test_error_mapping(self, client):
        assert client.post("/sessions", json={
            "observer_id": "w", "image_set_id": "missing"}).status_code == 404
        resp = client.post("/sessions", json={"observer_id": "w",
                                              "image_set_id": "faces"})
        sid = resp.json()["session_id"]
        assert client.get(
            f"/sessions/{sid}/images/img-b/stage1").status_code == 409
        manifest = client.get(f"/sessions/{sid}/images/img-a/stage1").json()
        tokens = [s["token"] for s in manifest["slots"] if not s["blank"]]
        assert client.post(f"/sessions/{sid}/images/img-a/stage1",
                           json={"picks": tokens[:2]}).status_code == 422
        assert client.get("/assets/feedfacefeedfacefeed").status_code == 404

    def test_no_weights_in_http_payloads(self, client):
        resp = client.post("/sessions", json={"observer_id": "w",
                                              "image_set_id": "faces"})
        sid = resp.json()["session_id"]
        manifest = client.get(f"/sessions/{sid}/images/img-a/stage1")
        blob = resp.text + manifest.text
        for fragment in WEIGHT_FRAGMENTS:
            assert fragment not in blob
