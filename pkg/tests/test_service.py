"""Rating-service behavior through the HTTP API (in-process client)."""

import io

import pytest
from fastapi.testclient import TestClient
from PIL import Image as PILImage

from chiprank.elo import Outcome
from chiprank.judgment_log import replay_log
from chiprank.service import RatingService, create_app
from chiprank.service.config import load_service_config
from chiprank.synth import ChipKind, synthesize_chip


def make_chips(n, size=32):
    kinds = list(ChipKind)
    return [
        synthesize_chip(kinds[k % len(kinds)], size_px=size, seed=k, chip_id=f"chip-{k:03d}")
        for k in range(n)
    ]


@pytest.fixture
def service(tmp_path):
    svc = RatingService(make_chips(6), log_path=tmp_path / "log.jsonl", p_repeat=0.0, seed=7)
    yield svc
    svc.close()


@pytest.fixture
def client(service):
    return TestClient(create_app(service), raise_server_exceptions=False)


class TestPairEndpoint:
    def test_happy_path(self, client, service):
        response = client.get("/api/pair", params={"operator": "sme1"})
        assert response.status_code == 200
        body = response.json()
        assert set(body) == {"comparison_id", "left_url", "right_url"}
        assert body["left_url"].startswith("/api/images/")
        assert body["left_url"] != body["right_url"]

        judged = client.post(
            "/api/judgment", json={"comparison_id": body["comparison_id"], "outcome": "LEFT"}
        )
        assert judged.status_code == 200
        assert replay_log(service.log_path).records[-1].comparison_id == body["comparison_id"]

    def test_never_pairs_image_with_itself(self, client):
        for _ in range(60):
            body = client.get("/api/pair", params={"operator": "sme1"}).json()
            assert body["left_url"] != body["right_url"]

    def test_missing_operator_is_validation_error(self, client):
        response = client.get("/api/pair")
        assert response.status_code == 422
        body = response.json()
        assert set(body) == {"error", "detail"}

    def test_two_image_dataset_always_the_single_pair(self, tmp_path):
        svc = RatingService(make_chips(2), log_path=tmp_path / "l.jsonl", p_repeat=0.0, seed=1)
        client = TestClient(create_app(svc))
        seen = set()
        for _ in range(10):
            body = client.get("/api/pair", params={"operator": "x"}).json()
            seen.add(frozenset((body["left_url"], body["right_url"])))
        assert len(seen) == 1
        svc.close()

    def test_single_image_dataset_unavailable(self, tmp_path):
        svc = RatingService(make_chips(1), log_path=tmp_path / "l.jsonl")
        client = TestClient(create_app(svc), raise_server_exceptions=False)
        response = client.get("/api/pair", params={"operator": "x"})
        assert response.status_code == 503
        assert response.json()["error"] == "service_unavailable"
        svc.close()

    def test_reproducible_sequence_for_fixed_seed(self, tmp_path):
        def sequence(path):
            svc = RatingService(make_chips(6), log_path=path, p_repeat=0.0, seed=99)
            out = [svc.next_pair("sme1") for _ in range(15)]
            svc.close()
            return [(p.left, p.right) for p in out]

        assert sequence(tmp_path / "a.jsonl") == sequence(tmp_path / "b.jsonl")


class TestJudgmentEndpoint:
    def test_neutral_recorded(self, client, service):
        body = client.get("/api/pair", params={"operator": "sme1"}).json()
        response = client.post(
            "/api/judgment", json={"comparison_id": body["comparison_id"], "outcome": "NEUTRAL"}
        )
        assert response.status_code == 200
        assert replay_log(service.log_path).records[-1].outcome is Outcome.NEUTRAL

    def test_duplicate_submission_conflicts(self, client, service):
        body = client.get("/api/pair", params={"operator": "sme1"}).json()
        first = client.post(
            "/api/judgment", json={"comparison_id": body["comparison_id"], "outcome": "LEFT"}
        )
        second = client.post(
            "/api/judgment", json={"comparison_id": body["comparison_id"], "outcome": "RIGHT"}
        )
        assert first.status_code == 200
        assert second.status_code == 409
        assert second.json()["error"] == "conflict"
        assert len(replay_log(service.log_path).records) == 1

    def test_unknown_id_conflicts(self, client):
        response = client.post("/api/judgment", json={"comparison_id": "nope", "outcome": "LEFT"})
        assert response.status_code == 409

    def test_malformed_outcome_rejected(self, client, service):
        body = client.get("/api/pair", params={"operator": "sme1"}).json()
        response = client.post(
            "/api/judgment", json={"comparison_id": body["comparison_id"], "outcome": "BOTH"}
        )
        assert response.status_code == 422
        assert replay_log(service.log_path).records == []

    def test_superseded_pair_goes_stale(self, client, service):
        first = client.get("/api/pair", params={"operator": "sme1"}).json()
        client.get("/api/pair", params={"operator": "sme1"})
        response = client.post(
            "/api/judgment", json={"comparison_id": first["comparison_id"], "outcome": "LEFT"}
        )
        assert response.status_code == 409


class TestRepeats:
    def test_forced_repeat_after_first_judgment(self, tmp_path):
        svc = RatingService(make_chips(6), log_path=tmp_path / "l.jsonl", p_repeat=1.0, seed=3)
        first = svc.next_pair("sme1")
        svc.record_judgment(first.comparison_id, Outcome.LEFT_MORE_COMPLEX)
        second = svc.next_pair("sme1")
        assert second.repeat_of == first.comparison_id
        assert {second.left, second.right} == {first.left, first.right}
        record = svc.record_judgment(second.comparison_id, Outcome.NEUTRAL)
        assert record.repeat_of == first.comparison_id
        svc.close()

    def test_no_repeat_before_history(self, tmp_path):
        svc = RatingService(make_chips(6), log_path=tmp_path / "l.jsonl", p_repeat=1.0, seed=3)
        assert svc.next_pair("sme1").repeat_of is None
        svc.close()


class TestImagesEndpoint:
    def test_served_as_png(self, client):
        response = client.get("/api/images/chip-000")
        assert response.status_code == 200
        assert response.headers["content-type"] == "image/png"
        decoded = PILImage.open(io.BytesIO(response.content))
        assert decoded.size == (32, 32)
        assert decoded.mode == "L"

    def test_unknown_image_404(self, client):
        response = client.get("/api/images/ghost")
        assert response.status_code == 404
        assert response.json()["error"] == "not_found"


class TestStatsEndpoint:
    def test_zero_state(self, client):
        body = client.get("/api/stats").json()
        assert body["total_judgments"] == 0
        assert body["per_operator"] == {}
        assert body["image_counts"] == {"mean": 0.0, "min": 0, "max": 0}

    def test_counts_two_images_per_judgment(self, client, service):
        body = client.get("/api/pair", params={"operator": "sme1"}).json()
        client.post("/api/judgment", json={"comparison_id": body["comparison_id"], "outcome": "LEFT"})
        stats = client.get("/api/stats").json()
        assert stats["total_judgments"] == 1
        assert stats["per_operator"] == {"sme1": 1}
        assert sorted(stats["per_image"].values(), reverse=True)[:2] == [1, 1]
        assert sum(stats["per_image"].values()) == 2

    def test_resume_from_existing_log(self, tmp_path):
        chips = make_chips(4)
        svc = RatingService(chips, log_path=tmp_path / "l.jsonl", seed=5)
        for _ in range(7):
            pair = svc.next_pair("sme1")
            svc.record_judgment(pair.comparison_id, Outcome.NEUTRAL)
        svc.close()

        resumed = RatingService(chips, log_path=tmp_path / "l.jsonl", seed=5)
        stats = resumed.progress_stats()
        assert stats.total_judgments == 7
        pair = resumed.next_pair("sme2")
        resumed.record_judgment(pair.comparison_id, Outcome.LEFT_MORE_COMPLEX)
        records = replay_log(tmp_path / "l.jsonl").records
        assert len(records) == 8
        assert len({r.comparison_id for r in records}) == 8
        resumed.close()


class TestServiceConfig:
    def test_precedence_flags_over_env_over_file(self, tmp_path):
        cfg_file = tmp_path / "cfg.json"
        cfg_file.write_text('{"service": {"port": 1111, "p_repeat": 0.3, "host": "0.0.0.0"}}')
        cfg = load_service_config(
            config_file=cfg_file,
            env={"CHIPRANK_PORT": "2222", "CHIPRANK_SEED": "9"},
            overrides={"port": 3333},
        )
        assert cfg.port == 3333
        assert cfg.seed == 9
        assert cfg.p_repeat == 0.3
        assert cfg.host == "0.0.0.0"

    def test_rejects_bad_p_repeat(self):
        with pytest.raises(ValueError):
            load_service_config(env={}, overrides={"p_repeat": 1.5})
