import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor

import pytest
from fastapi.testclient import TestClient

from lectern.api import Settings, create_app
from lectern.data import read_bytes
from lectern.store import Store
from lectern.summarize import Engine

ERROR_KEYS = {"status", "code", "message"}


@pytest.fixture
def app(tmp_path):
    app = create_app(Settings(storage_path=str(tmp_path / "api.db"), workers=2))
    yield app
    app.state.store.close()


@pytest.fixture
def client(app):
    with TestClient(app) as c:
        yield c


def assert_error(response, status, code):
    assert response.status_code == status
    body = response.json()
    assert set(body) == ERROR_KEYS
    assert body["status"] == status and body["code"] == code
    assert "Traceback" not in body["message"]


def add_lecture(client, text, name="L"):
    r = client.post("/lectures", json={"name": name, "content": text})
    assert r.status_code == 201
    return r.json()


def test_healthz(client):
    r = client.get("/healthz")
    assert r.status_code == 200 and r.json() == {"status": "ok"}


def test_lecture_crud(client, ihie_text):
    created = add_lecture(client, ihie_text, "IHIE")
    assert set(created) == {"id", "name", "content", "created_at"}
    assert created["created_at"].endswith("Z")
    assert client.get(f"/lectures/{created['id']}").json() == created
    assert client.get("/lectures").json() == [created]
    r = client.put(f"/lectures/{created['id']}", json={"name": "renamed", "content": "new text"})
    assert r.status_code == 200 and r.json()["name"] == "renamed"
    r = client.delete(f"/lectures/{created['id']}")
    assert r.status_code == 200 and r.json() == {"id": created["id"], "deleted": True}
    assert_error(client.get(f"/lectures/{created['id']}"), 404, "not_found")
    assert client.get("/lectures").json() == []


def test_convert_srt(client):
    r = client.post(
        "/lectures/convert-srt",
        content=b"1\n00:00:01,000 --> 00:00:02,000\nHello\n\n2\n00:00:02,000 --> 00:00:03,000\nworld.\n",
    )
    assert r.status_code == 200 and r.json() == {"paragraph": "Hello world."}
    r = client.post("/lectures/convert-srt", content=b"1\n00:00:01.000 -> 00:00:02\nHi\n")
    assert_error(r, 422, "malformed_srt")
    assert "block 0" in r.json()["message"]
    assert_error(client.post("/lectures/convert-srt", content=b""), 400, "empty_body")


def test_summary_caching(app, client, ihie_text):
    lec = add_lecture(client, ihie_text)
    engine = app.state.engine
    first = client.post(f"/lectures/{lec['id']}/summaries", json={"name": "five", "count": 5})
    assert first.status_code == 201
    doc = first.json()
    assert doc["cached"] is False and len(doc["sentence_indices"]) == 5
    assert doc["params"]["embedder"]["backend"] == "hashed"
    calls = engine.embed_calls
    second = client.post(f"/lectures/{lec['id']}/summaries", json={"name": "again", "count": 5})
    assert second.status_code == 200
    assert second.json()["cached"] is True
    assert second.json()["text"] == doc["text"] and second.json()["id"] == doc["id"]
    assert engine.embed_calls == calls
    got = client.get(f"/summaries/{doc['id']}").json()
    assert got == {k: v for k, v in doc.items() if k != "cached"}
    assert client.get(f"/lectures/{lec['id']}/summaries").json() == [got]


def test_edit_invalidates_cache(client, ihie_text, td0_text):
    lec = add_lecture(client, ihie_text)
    url = f"/lectures/{lec['id']}/summaries"
    assert client.post(url, json={"count": 5}).status_code == 201
    client.put(f"/lectures/{lec['id']}", json={"name": "L", "content": td0_text})
    r = client.post(url, json={"count": 5})
    assert r.status_code == 201 and r.json()["cached"] is False


def test_summary_errors(client, ihie_text):
    lec = add_lecture(client, ihie_text)
    url = f"/lectures/{lec['id']}/summaries"
    assert_error(client.post(url, json={"ratio": 1.5}), 400, "invalid_params")
    assert_error(client.post(url, json={}), 400, "invalid_params")
    assert_error(client.post(url, json={"count": 5, "bogus": 1}), 400, "invalid_params")
    assert_error(client.post(url, json=[1, 2]), 400, "invalid_params")
    assert_error(client.post("/lectures/999/summaries", json={"count": 5}), 404, "not_found")
    assert_error(client.post(url, json={"count": 5, "embedder": {"backend": "transformer"}}), 503, "model_unavailable")
    short = add_lecture(client, "Tiny. Also tiny.")
    assert_error(client.post(f"/lectures/{short['id']}/summaries", json={"count": 1}), 422, "no_sentences_retained")
    assert_error(client.get("/summaries/12345"), 404, "not_found")
    assert_error(client.delete("/summaries/12345"), 404, "not_found")


def test_request_errors(client):
    assert_error(client.post("/lectures", json={"name": "x", "content": ""}), 400, "empty_content")
    assert_error(client.post("/lectures", json={"name": "x"}), 400, "invalid_request")
    r = client.post("/lectures", content=b"{not json", headers={"content-type": "application/json"})
    assert_error(r, 400, "invalid_request")
    assert_error(client.get("/lectures/abc"), 404, "not_found")
    assert_error(client.get("/nowhere"), 404, "not_found")
    assert_error(client.patch("/lectures/1"), 404, "not_found")
    assert_error(client.put("/lectures/77", json={"name": "x", "content": "y"}), 404, "not_found")


def test_delete_cascades(client, ihie_text):
    lec = add_lecture(client, ihie_text)
    s = client.post(f"/lectures/{lec['id']}/summaries", json={"count": 3}).json()
    client.delete(f"/lectures/{lec['id']}")
    assert_error(client.get(f"/summaries/{s['id']}"), 404, "not_found")


def test_delete_summary(client, ihie_text):
    lec = add_lecture(client, ihie_text)
    s = client.post(f"/lectures/{lec['id']}/summaries", json={"count": 3}).json()
    assert client.delete(f"/summaries/{s['id']}").json() == {"id": s["id"], "deleted": True}
    assert client.get(f"/lectures/{lec['id']}/summaries").json() == []


def test_concurrent_identical_requests_store_one_record(client, td0_text):
    lec = add_lecture(client, td0_text)
    url = f"/lectures/{lec['id']}/summaries"
    with ThreadPoolExecutor(8) as pool:
        responses = list(pool.map(lambda _: client.post(url, json={"count": 4}), range(8)))
    assert sorted(r.status_code for r in responses) == [200] * 7 + [201]
    assert len({r.json()["id"] for r in responses}) == 1
    assert len(client.get(url).json()) == 1


class SlowEngine(Engine):
    def summarize(self, *args, **kwargs):
        time.sleep(0.5)
        return super().summarize(*args, **kwargs)


def test_inference_timeout(tmp_path, ihie_text):
    settings = Settings(storage_path=str(tmp_path / "t.db"), workers=1, inference_timeout=0.05)
    app = create_app(settings, engine=SlowEngine())
    with TestClient(app) as client:
        lec = add_lecture(client, ihie_text)
        assert_error(client.post(f"/lectures/{lec['id']}/summaries", json={"count": 2}), 503, "inference_timeout")
    app.state.store.close()


def test_worker_pool_bounds_parallel_inference(tmp_path, ihie_text, td0_text):
    active, peak, lock = [0], [0], threading.Lock()

    class CountingEngine(Engine):
        def summarize(self, *args, **kwargs):
            with lock:
                active[0] += 1
                peak[0] = max(peak[0], active[0])
            time.sleep(0.05)
            try:
                return super().summarize(*args, **kwargs)
            finally:
                with lock:
                    active[0] -= 1

    app = create_app(Settings(storage_path=str(tmp_path / "p.db"), workers=1), engine=CountingEngine())
    with TestClient(app) as client:
        lec = add_lecture(client, ihie_text)
        bodies = [{"count": c} for c in range(1, 6)]
        with ThreadPoolExecutor(5) as pool:
            codes = list(pool.map(lambda b: client.post(f"/lectures/{lec['id']}/summaries", json=b).status_code, bodies))
    assert codes == [201] * 5
    assert peak[0] == 1
    app.state.store.close()


def store_state(store):
    lectures = [(x.id, x.name, x.content) for x in store.list_lectures()]
    summaries = [(s.id, s.lecture_id, s.text, tuple(s.sentence_indices)) for s in store.list_summaries()]
    return lectures, summaries


@pytest.mark.parametrize("seed", range(3))
def test_api_matches_direct_store_calls(tmp_path, seed, ihie_text, td0_text):
    rng = random.Random(seed)
    texts = [ihie_text, td0_text]
    app = create_app(Settings(storage_path=str(tmp_path / "a.db"), workers=1))
    direct = Store(tmp_path / "d.db")
    engine = Engine()
    client = TestClient(app)
    ids = []
    for step in range(15):
        op = rng.choice(["add", "add", "update", "delete", "summarize"]) if ids else "add"
        if op == "add":
            text = rng.choice(texts)
            r = client.post("/lectures", json={"name": f"n{step}", "content": text})
            d = direct.put_lecture(f"n{step}", text)
            assert r.json()["id"] == d.id
            ids.append(d.id)
        elif op == "update":
            target, text = rng.choice(ids), rng.choice(texts)
            client.put(f"/lectures/{target}", json={"name": f"u{step}", "content": text})
            direct.update_lecture(target, f"u{step}", text)
        elif op == "delete":
            target = ids.pop(rng.randrange(len(ids)))
            client.delete(f"/lectures/{target}")
            direct.delete_lecture(target)
        else:
            target, count = rng.choice(ids), rng.randint(1, 4)
            r = client.post(f"/lectures/{target}/summaries", json={"count": count})
            params = app.state.service.parse_params({"count": count})[1]
            if direct.find_cached_summary(target, params) is None:
                lec = direct.get_lecture(target)
                direct.put_summary(engine.summarize(lec.content, params, lecture_id=target))
            assert r.status_code in (200, 201)
    assert store_state(app.state.store) == store_state(direct)
    client.close()
    app.state.store.close()
    direct.close()


def test_bundled_srt_through_api(client):
    r = client.post("/lectures/convert-srt", content=read_bytes("ihie.srt"))
    lec = add_lecture(client, r.json()["paragraph"])
    s = client.post(f"/lectures/{lec['id']}/summaries", json={"count": 5})
    assert s.status_code == 201 and len(s.json()["sentence_indices"]) == 5
