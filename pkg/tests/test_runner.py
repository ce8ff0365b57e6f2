import json

import pytest

from cofinitary.coding import decode, get_stream
from cofinitary.groups import get_permutation
from cofinitary.runner import (
    QUEUE_ORDER,
    RunConfig,
    RunError,
    Transcript,
    TranscriptError,
    replay,
    run,
    verify_transcript,
)
from cofinitary.poset import Condition


def test_budget_zero_gives_empty_chain():
    t = run(RunConfig(budget=0))
    assert t.steps == []
    assert list(replay(t)) == [Condition(t.context)]
    assert t.data["window"] == 0
    assert verify_transcript(t).ok


def test_coding_example():
    t = run(RunConfig(words=["X"], code_length=32, budget=200))
    (cert,) = t.data["certificates"]["coding"]
    assert cert["word"] == "X" and cert["parameter"] == 0 and cert["length"] >= 32
    final = t.final()
    w = final.context.word("X")
    assert decode(w, final.s, 0, 32) == get_stream("thue-morse").prefix(32)


def test_hit_example():
    t = run(RunConfig(group="swap", words=["X"], targets=["zeta"], hit_stride=5, hit_count=None, budget=120))
    hits = t.data["certificates"]["hits"]
    assert len(hits) >= 5
    s = t.final().s
    zeta = get_permutation("zeta")
    for h in hits:
        assert h["n"] >= h["k"] and s.get(h["n"]) == zeta(h["n"]) == h["value"]


def test_deterministic_output():
    config = dict(group="swap", depth=2, code_length=8, targets=["zeta"], budget=150)
    assert run(RunConfig(**config)).dumps() == run(RunConfig(**config)).dumps()


def test_queue_order_is_fixed():
    t = run(RunConfig(words=["X"], code_length=4, budget=len(QUEUE_ORDER) * 2))
    kinds = [step["task"]["kind"] for step in t.steps]
    assert kinds[:2] == ["add-word", "code"]
    assert set(kinds) <= set(QUEUE_ORDER)


def test_verify_passes_on_fresh_runs():
    for config in [RunConfig(group="swap", depth=2, code_length=8, targets=["zeta"], budget=200),
                   RunConfig(group="swap-tail", words=["X^-1 gamma X", "X"], code_length=8, budget=120),
                   RunConfig(group="shift", z=None, depth=2, targets=["tau"], budget=120)]:
        report = verify_transcript(run(config))
        assert report.ok, report.render()


def _middle_step_with_pair(t):
    idx = [i for i, st in enumerate(t.steps) if st["delta"]["s"]]
    return idx[len(idx) // 2]


def test_tamper_deleted_pair_is_reported_at_its_step():
    t = run(RunConfig(words=["X"], code_length=16, budget=80))
    data = json.loads(t.dumps())
    i = _middle_step_with_pair(t)
    data["steps"][i]["delta"]["s"].pop()
    report = verify_transcript(Transcript(data))
    assert not report.ok
    assert report.failures()[0].name.startswith(f"step {i} ")


def test_tamper_certificate_parameter_is_reported():
    t = run(RunConfig(words=["X"], code_length=16, budget=80))
    data = json.loads(t.dumps())
    data["certificates"]["coding"][0]["parameter"] += 2
    report = verify_transcript(Transcript(data))
    names = [c.name for c in report.failures()]
    assert "coding certificate X" in names


def test_tamper_window_and_witness():
    t = run(RunConfig(group="swap", words=["X"], targets=["zeta"], budget=60))
    data = json.loads(t.dumps())
    data["window"] += 1
    data["certificates"]["hits"][0]["value"] += 1
    names = [c.name for c in verify_transcript(Transcript(data)).failures()]
    assert "window bijectivity" in names
    assert any(n.startswith("hit zeta") for n in names)


def test_malformed_transcripts():
    with pytest.raises(TranscriptError, match="JSON"):
        Transcript.loads("{not json")
    with pytest.raises(TranscriptError, match="steps"):
        Transcript.loads('{"context": {}, "config": {}}')
    t = run(RunConfig(words=["X"], budget=10))
    data = json.loads(t.dumps())
    data["config"]["bogus"] = 1
    report = verify_transcript(Transcript(data))
    assert [c.name for c in report.checks] == ["header"] and not report.ok


@pytest.mark.parametrize("bad", [dict(budget=-1), dict(code_length=-3), dict(hit_stride=-1),
                                 dict(depth=-1)])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        run(RunConfig(**bad))


def test_config_name_errors():
    with pytest.raises(KeyError):
        run(RunConfig(group="nope", budget=1))
    with pytest.raises(ValueError, match="group word"):
        run(RunConfig(group="swap", words=["tau"], budget=1))


def test_op_errors_name_the_task():
    # gamma is in the swap-tail group, so hitting it is impossible
    with pytest.raises(RunError) as info:
        run(RunConfig(group="swap-tail", words=["gamma X"], targets=["gamma"], budget=200,
                      probe_bound=200))
    assert info.value.task.kind == "hit"
    assert "hit(target=gamma" in str(info.value)


def test_window_monotone_in_budget():
    windows = [run(RunConfig(group="swap", depth=2, code_length=8, budget=b)).data["window"]
               for b in (0, 20, 60, 120, 240)]
    assert windows == sorted(windows)
    assert windows[-1] > 0
