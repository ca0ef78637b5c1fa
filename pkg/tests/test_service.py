import pytest
from fastapi.testclient import TestClient

from edtlc.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


TABLE1 = {"trigger": "H and D", "release": False, "final": True,
          "delay": True, "invariant": True, "reaction": "D"}


def test_health(client):
    data = client.get("/health").json()
    assert data["status"] == "ok"
    assert data["classes"] >= 1
    assert data["corpus_templates"] == 7


def test_semantics_endpoint(client):
    resp = client.post("/semantics", json={"requirement": TABLE1})
    assert resp.status_code == 200
    assert resp.json() == {"formula": "G ((H & D) -> D)"}


def test_semantics_unsimplified(client):
    resp = client.post("/semantics",
                       json={"requirement": TABLE1, "simplify": False})
    assert "W" in resp.json()["formula"]


def test_semantics_rejects_bad_expression(client):
    bad = dict(TABLE1, trigger="H and )")
    resp = client.post("/semantics", json={"requirement": bad})
    assert resp.status_code == 400
    assert "error" in resp.json()


def test_render_endpoint(client):
    resp = client.post("/render", json={"requirement": TABLE1})
    assert resp.status_code == 200
    data = resp.json()
    assert data["phrase"] == "After 'H and D', 'D' occurs now."
    assert data["class_id"] == 19


def test_render_unrenderable_is_422(client):
    req = dict(TABLE1, reaction=True, invariant="I", final="F", trigger="T")
    resp = client.post("/render", json={"requirement": req})
    assert resp.status_code == 422


def test_parse_endpoint_round_trip(client):
    resp = client.post("/parse",
                       json={"phrase": "After 'H and D', 'D' occurs now."})
    assert resp.status_code == 200
    data = resp.json()
    assert data["requirement"] == TABLE1
    assert data["warnings"] == []


def test_parse_endpoint_warning(client):
    resp = client.post("/parse",
                       json={"phrase": "After 'T', 'I' is valid forever."})
    assert resp.status_code == 200
    assert any("broader semantics" in w for w in resp.json()["warnings"])


def test_parse_endpoint_syntax_error(client):
    resp = client.post("/parse", json={"phrase": "After banana."})
    assert resp.status_code == 400


def test_prompts_endpoint(client):
    resp = client.post("/prompts", json={
        "combination": "vtttvf", "with_semantics": True, "hints": True,
        "explain": False})
    assert resp.status_code == 200
    data = resp.json()
    assert data["basic"].endswith(
        "if always release = false, delay = true, final = true, "
        "invariant = true.")
    assert 'formula "G (trig -> rea)"' in data["with_semantics"]
    assert data["hints"].startswith("Remember that if invariant is true")


def test_prompts_all_var_is_400(client):
    resp = client.post("/prompts", json={"combination": "vvvvvv"})
    assert resp.status_code == 400


def test_ingest_endpoint_validates_without_persisting(client):
    resp = client.post("/ingest", json={
        "combination": "vtttvf",
        "text": "After 'trigger', 'reaction' occurs now."})
    assert resp.status_code == 200
    data = resp.json()
    assert data["persisted"] is False
    assert data["template"]["provenance"] == "assistant"


def test_ingest_endpoint_diagnostics(client):
    resp = client.post("/ingest", json={
        "combination": "vtttvf",
        "text": "After 'trigger', something else entirely happened."})
    assert resp.status_code == 422
    assert resp.json()["diagnostics"]


def test_equiv_endpoint(client):
    resp = client.post("/equiv", json={
        "left": "G (trig -> rea)", "right": "G (trig -> rea)"})
    assert resp.json()["equivalent"] is True
    resp = client.post("/equiv", json={
        "left": "G a", "right": "a", "random_samples": 50})
    data = resp.json()
    assert data["equivalent"] is False
    assert data["counterexample"]["loop"]


def test_sup_run_endpoint_csv(client):
    csv_text = "inp_1\n" + "\n".join(
        "1" if t > 0 and t % 35 == 0 else "0" for t in range(141)) + "\n"
    resp = client.post("/sup/run", json={
        "params": {"ac": "not inp_1", "aee": "inp_1", "amin": 35, "amax": 35},
        "trace_csv": csv_text})
    assert resp.status_code == 200
    data = resp.json()
    assert data["passed"] is True
    assert data["cycles"][0]["outcome"] == "success"


def test_sup_run_endpoint_rows(client):
    resp = client.post("/sup/run", json={
        "params": {}, "trace_rows": [{"x": 0}, {"x": 1}]})
    data = resp.json()
    assert data["passed"] is True
    assert len(data["cycles"]) == 2


def test_sup_run_requires_exactly_one_trace_form(client):
    resp = client.post("/sup/run", json={"params": {}})
    assert resp.status_code == 400


def test_grammar_endpoint(client):
    resp = client.get("/grammar")
    assert resp.status_code == 200
    assert resp.headers["content-type"].startswith("text/plain")
    assert "Req := After <trigger>, <body_trig>" in resp.text


def test_classify_endpoint_small_bounds(client):
    resp = client.post("/classify", json={
        "prefix_max": 1, "loop_max": 1, "random_samples": 20})
    assert resp.status_code == 200
    data = resp.json()
    assert sum(len(c["members"]) for c in data["classes"]) == 729
