import json

import pytest

from conftest import P
from inlcorr import fo, verify
from inlcorr.correspondence import NotSahlqvistError
from inlcorr.verify import (
    CheckReport,
    check_correspondence,
    check_lemma_monotonicity,
    check_st_correctness,
    check_tau_correctness,
    frames,
)


def test_instance_counts():
    r = check_st_correctness([P("p")], max_worlds=1)
    assert r.passed and r.instances == 8
    r = check_tau_correctness([P("p")], max_worlds=2, samples=0)
    assert r.instances == 4 * 2 * 1 + 256 * 4 * 2  # frames x valuations x worlds
    r = check_st_correctness([P("Box(; bot)")], max_worlds=3, samples=5)
    assert r.instances == 4 + 256 * 2 + 5 * 3


def test_frame_stream():
    assert len(list(frames(1, 10, 0))) == 4
    assert len(list(frames(3, 7, 0))) == 4 + 256 + 7
    assert list(frames(3, 7, 5)) == list(frames(3, 7, 5))
    assert list(frames(3, 7, 5)) != list(frames(3, 7, 6))
    with pytest.raises(ValueError):
        list(frames(0, 1, 0))


def test_correspondence_examples():
    assert check_correspondence(P("Box(p; top) -> p"), max_worlds=2).passed
    r = check_correspondence(P("p -> p"), route="both", max_worlds=3, samples=10)
    assert r.passed and r.instances == 4 + 256 * 2 + 30
    with pytest.raises(NotSahlqvistError):
        check_correspondence(P("p -> ~p"))
    with pytest.raises(ValueError):
        check_correspondence(P("p -> p"), route="sideways")


def test_wrong_correspondent_is_caught(monkeypatch):
    monkeypatch.setattr(verify, "correspondent_direct", lambda phi, x: fo.TRUE)
    r = check_correspondence(P("Box(; p) -> Box(p; top)"), max_worlds=1)
    assert not r.passed
    # on one world it fails exactly when the empty set is a neighbourhood
    assert sorted(json.dumps(c["frame"]["N"]) for c in r.counterexamples) == [
        '{"w0": [[], ["w0"]]}', '{"w0": [[]]}'
    ]
    for c in r.counterexamples:
        assert c["expected"] is False and c["actual"] is True and c["route"] == "direct"


def test_wrong_route_shows_disagreement(monkeypatch):
    monkeypatch.setattr(verify.bimodal, "correspondent_via_bimodal", lambda phi, x: fo.FALSE)
    r = check_correspondence(P("p -> p"), route="both", max_worlds=1)
    assert len(r.disagreements) == 4 and len(r.counterexamples) == 4


def test_lemma_small():
    r = check_lemma_monotonicity(max_worlds=1)
    assert r.passed and r.instances > 0
    r = check_lemma_monotonicity(max_worlds=3, samples=3, arities=(0, 2))
    assert r.passed


def test_reports_are_reproducible_and_serialisable():
    corpus = verify.random_corpus(size=5, seed=3)
    a = check_st_correctness(corpus, max_worlds=3, samples=4, seed=9)
    b = check_st_correctness(corpus, max_worlds=3, samples=4, seed=9)
    assert a.instances == b.instances and a.counterexamples == b.counterexamples
    data = json.loads(json.dumps(a.to_json()))
    assert data["passed"] is True and data["seed"] == 9 and data["property"] == "st-correctness"


def test_parallel_matches_serial():
    corpus = verify.random_corpus(size=4, seed=1)
    serial = check_tau_correctness(corpus, max_worlds=3, samples=6, seed=2)
    parallel = check_tau_correctness(corpus, max_worlds=3, samples=6, seed=2, workers=2)
    assert serial.instances == parallel.instances
    assert serial.counterexamples == parallel.counterexamples


def test_report_pass_flag():
    assert CheckReport("x", 3).passed
    assert not CheckReport("x", 3, ({"frame": {}, "world": "w0"},)).passed


def test_corpora_shapes():
    assert len(verify.default_corpus()) == 120
    assert len(verify.edge_corpus()) == 20
    assert len(verify.correspondence_corpus()) >= 20
