"""Deterministic scheduler building a finite approximation of the generic permutation.

A run interleaves task queues round-robin and records every step, so the
resulting transcript can be replayed and re-checked without re-running the
scheduler.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from itertools import count
from typing import Iterator, Optional

from . import extension as ext
from .coding import decode, exact_code_length
from .groups import get_permutation
from .partial import apply_word, fixed_points
from .poset import Condition, Context, check_condition, fixed_point_bound, order_violations, word_key
from .words import enumerate_words

__all__ = [
    "RunConfig",
    "Task",
    "Transcript",
    "RunError",
    "TranscriptError",
    "Check",
    "Report",
    "run",
    "replay",
    "verify_transcript",
    "QUEUE_ORDER",
]

QUEUE_ORDER = ("add-word", "code", "domain", "range", "hit", "distinguish")
FORMAT_VERSION = 1


class RunError(RuntimeError):
    def __init__(self, step: int, task: "Task", cause: Exception):
        super().__init__(f"step {step} ({task}): {cause}")
        self.step = step
        self.task = task
        self.cause = cause


class TranscriptError(ValueError):
    pass


@dataclass
class RunConfig:
    group: str = "trivial"
    z: Optional[str] = "thue-morse"
    words: Optional[list] = None
    depth: Optional[int] = None
    code_length: int = 32
    targets: list = field(default_factory=list)
    hit_stride: int = 5
    hit_count: Optional[int] = 10
    distinguish_tokens: int = 1
    budget: int = 200
    probe_bound: int = ext.HIT_PROBE_BOUND

    def validate(self) -> None:
        if self.budget < 0:
            raise ValueError("budget must be >= 0")
        if self.code_length < 0:
            raise ValueError("code length must be >= 0")
        if self.hit_stride < 0 or (self.hit_count is not None and self.hit_count < 0):
            raise ValueError("hit schedule must be non-negative")
        if self.depth is not None and self.depth < 0:
            raise ValueError("depth must be >= 0")

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class Task:
    kind: str
    n: Optional[int] = None
    word: Optional[str] = None
    length: Optional[int] = None
    target: Optional[str] = None
    k: Optional[int] = None
    element: Optional[str] = None

    def to_dict(self) -> dict:
        return {key: v for key, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, d: dict) -> "Task":
        return cls(**d)

    def __str__(self):
        args = ", ".join(f"{k}={v}" for k, v in self.to_dict().items() if k != "kind")
        return f"{self.kind}({args})"


def _words(context: Context, config: RunConfig) -> list:
    out = []
    if config.depth is not None:
        out.extend(enumerate_words(context.group, config.depth))
    for text in config.words or ():
        w = context.word(text)
        if w.is_group_word():
            raise ValueError(f"{text!r} is a group word")
        if w not in out:
            out.append(w)
    return out


def _queues(context: Context, config: RunConfig, words: list) -> dict:
    def naturals(kind):
        for n in count():
            yield Task(kind, n=n)

    def hits():
        ks = count(0, config.hit_stride) if config.hit_count is None else \
            (i * config.hit_stride for i in range(config.hit_count))
        for k in ks:
            for t in config.targets:
                yield Task("hit", target=t, k=k)

    group = context.group
    elements = group.elements(config.distinguish_tokens)
    return {
        "add-word": iter([Task("add-word", word=str(w)) for w in words]),
        "code": iter([Task("code", word=str(w), length=config.code_length)
                      for w in words if w.is_codable()] if context.coding else []),
        "domain": naturals("domain"),
        "range": naturals("range"),
        "hit": hits(),
        "distinguish": iter([Task("distinguish", word=str(w), element=str(g))
                             for w in words for g in elements]),
    }


def _skip(task: Task, p: Condition) -> bool:
    if task.kind == "domain":
        return task.n in p.s.fwd
    if task.kind == "range":
        return task.n in p.s.inv
    return False


def apply_task(p: Condition, task: Task, targets: dict, probe: int) -> tuple:
    """Run one task; returns (q, witness or None)."""
    ctx = p.context
    if task.kind == "domain":
        return ext.domain_extend(p, task.n), None
    if task.kind == "range":
        return ext.range_extend(p, task.n), None
    if task.kind == "add-word":
        return ext.add_word(p, ctx.word(task.word)), None
    if task.kind == "code":
        return ext.extend_coding(p, ctx.word(task.word), task.length), None
    if task.kind == "hit":
        return ext.hit(p, targets[task.target], task.k, probe)
    if task.kind == "distinguish":
        return ext.distinguish(p, ctx.word(task.word), ctx.group.parse_element(task.element))
    raise ValueError(f"unknown task kind {task.kind!r}")


def _delta(p: Condition, q: Condition) -> dict:
    new_words = sorted(q.words - p.words, key=word_key)
    new_params = sorted((w for w in q.params if w not in p.params), key=word_key)
    return {
        "s": [list(pair) for pair in q.s.difference(p.s)],
        "F": [str(w) for w in new_words],
        "m": {str(w): q.params[w] for w in new_params},
    }


def _apply_delta(p: Condition, delta: dict) -> Condition:
    ctx = p.context
    return p.derive(
        pairs=[tuple(pair) for pair in delta.get("s", [])],
        words=[ctx.word(t) for t in delta.get("F", [])],
        params={ctx.word(t): int(m) for t, m in delta.get("m", {}).items()},
    )


class Transcript:
    """A replayable record of a run."""

    def __init__(self, data: dict):
        self.data = data

    @property
    def steps(self) -> list:
        return self.data["steps"]

    @property
    def context(self) -> Context:
        c = self.data["context"]
        return Context.from_names(c["group"], c["z"], check=False)

    def final(self) -> Condition:
        return Condition.from_dict(self.data["final"], self.context)

    def dumps(self) -> str:
        return json.dumps(self.data, indent=1) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Transcript":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TranscriptError(f"not valid JSON: {exc}") from None
        for key in ("context", "config", "steps", "final", "certificates", "window"):
            if not isinstance(data, dict) or key not in data:
                raise TranscriptError(f"missing field {key!r}")
        return cls(data)

    def conditions(self) -> Iterator[Condition]:
        return replay(self)


def replay(t: Transcript) -> Iterator[Condition]:
    """The chain of conditions, starting with the empty one."""
    p = Condition(t.context)
    yield p
    for step in t.steps:
        p = _apply_delta(p, step["delta"])
        yield p


def run(config: RunConfig) -> Transcript:
    config.validate()
    context = Context.from_names(config.group, config.z)
    words = _words(context, config)
    targets = {name: get_permutation(name) for name in config.targets}
    queues = _queues(context, config, words)
    p = Condition(context)
    steps = []
    hits = []
    dist = []
    active = list(QUEUE_ORDER)
    while len(steps) < config.budget and active:
        for name in list(active):
            if len(steps) >= config.budget:
                break
            task = next((t for t in queues[name] if not _skip(t, p)), None)
            if task is None:
                active.remove(name)
                continue
            try:
                q, witness = apply_task(p, task, targets, config.probe_bound)
            except (ext.ExtensionError, IndexError) as exc:
                raise RunError(len(steps), task, exc) from exc
            step = {"task": task.to_dict(), "delta": _delta(p, q)}
            if witness is not None:
                step["witness"] = witness
                if task.kind == "hit":
                    hits.append({"target": task.target, "k": task.k, "n": witness,
                                 "value": q.s.get(witness)})
                else:
                    dist.append({"word": task.word, "element": task.element, "n": witness,
                                 "value": apply_word(context.word(task.word), q.s, witness)})
            steps.append(step)
            p = q
    coding = [{"word": str(w), "parameter": p.params[w], "length": p.code_length(w), "exact": True}
              for w in sorted(p.params, key=word_key)]
    data = {
        "version": FORMAT_VERSION,
        "context": {"group": config.group, "z": config.z, "config_hash": config.digest()},
        "config": config.to_dict(),
        "steps": steps,
        "final": p.to_dict(),
        "certificates": {"coding": coding, "hits": hits, "distinguish": dist},
        "window": p.s.window(),
    }
    return Transcript(data)


# -- verification ------------------------------------------------------------

@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def __str__(self):
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass
class Report:
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append(Check(name, ok, detail))

    def failures(self) -> list:
        return [c for c in self.checks if not c.ok]

    def __str__(self):
        return "\n".join(str(c) for c in self.checks)

    def render(self, verbose: bool = False) -> str:
        shown = self.checks if verbose else self.failures()
        lines = [str(c) for c in shown]
        bad = len(self.failures())
        lines.append(f"{len(self.checks) - bad}/{len(self.checks)} checks passed" + ("" if bad else ": OK"))
        return "\n".join(lines)


def _task_done(task: Task, q: Condition, step: dict, targets: dict) -> Optional[str]:
    ctx = q.context
    if task.kind == "domain" and task.n not in q.s.fwd:
        return f"{task.n} not in the domain"
    if task.kind == "range" and task.n not in q.s.inv:
        return f"{task.n} not in the range"
    if task.kind == "add-word" and ctx.word(task.word) not in q.words:
        return f"{task.word} not in F"
    if task.kind == "code":
        w = ctx.word(task.word)
        if w not in q.params:
            return f"{task.word} has no coding parameter"
        d = q.code_length(w)
        if d is None or d < task.length:
            return f"{task.word} codes exactly {d} bits, wanted {task.length}"
    if task.kind == "hit":
        n = step.get("witness")
        if n is None or n < task.k or q.s.get(n) != targets[task.target](n):
            return f"no hitting witness for {task.target} at k={task.k}"
    if task.kind == "distinguish":
        n = step.get("witness")
        w = ctx.word(task.word)
        g = ctx.group.parse_element(task.element)
        v = None if n is None else apply_word(w, q.s, n)
        if v is None or v == g(n):
            return f"no witness separating {task.word} from {task.element}"
    return None


def verify_transcript(t: Transcript) -> Report:
    """Re-check every step, certificate, witness and bound recorded in t."""
    report = Report()
    try:
        config = RunConfig(**t.data["config"])
        ctx = t.context
        targets = {name: get_permutation(name) for name in config.targets}
    except Exception as exc:  # noqa: BLE001 - any malformed header is a report entry
        report.add("header", False, str(exc))
        return report
    report.add("config hash", config.digest() == t.data["context"].get("config_hash"))
    if ctx.z is not None:
        try:
            ctx.z.check_nonperiodic()
            report.add("stream non-periodicity heuristic", True)
        except ValueError as exc:
            report.add("stream non-periodicity heuristic", False, str(exc))

    p = Condition(ctx)
    entries: dict = {}
    bad_steps = 0
    for i, step in enumerate(t.steps):
        label = f"step {i}"
        try:
            task = Task.from_dict(step["task"])
            label = f"step {i} ({task})"
            q = _apply_delta(p, step["delta"])
        except Exception as exc:  # noqa: BLE001
            report.add(label, False, f"cannot apply: {exc}")
            return report
        problems = [str(v) for v in check_condition(q)]
        problems += [f"order: {v}" for v in order_violations(q, p)]
        missing = _task_done(task, q, step, targets)
        if missing:
            problems.append(missing)
        if problems:
            bad_steps += 1
            report.add(label, False, "; ".join(problems))
        for w in q.words - p.words:
            entries[w] = (i, fixed_points(w, q.s), fixed_point_bound(q, w))
        p = q
    report.add(f"steps ({len(t.steps)}) valid and decreasing", bad_steps == 0,
               f"{bad_steps} failing" if bad_steps else "")

    try:
        final = t.final()
    except Exception as exc:  # noqa: BLE001
        report.add("final condition", False, str(exc))
        return report
    report.add("final condition matches replay", final == p)

    certs = t.data["certificates"]
    coded = set()
    for c in certs.get("coding", []):
        w = ctx.word(c["word"])
        coded.add(w)
        name = f"coding certificate {c['word']}"
        if p.params.get(w) != c["parameter"]:
            report.add(name, False, f"parameter {c['parameter']} but condition has {p.params.get(w)}")
            continue
        length = exact_code_length(w, p.s, c["parameter"], ctx.z)
        if length != c["length"]:
            report.add(name, False, f"exact code length is {length}, certificate says {c['length']}")
            continue
        bits = decode(w, p.s, c["parameter"], c["length"])
        report.add(name, bits == ctx.z.prefix(c["length"]), f"{c['length']} bits")
    report.add("every coded word certified", coded == set(p.params))

    for h in certs.get("hits", []):
        tau = targets.get(h["target"])
        ok = tau is not None and h["n"] >= h["k"] and p.s.get(h["n"]) == tau(h["n"]) == h["value"]
        report.add(f"hit {h['target']} k={h['k']} n={h['n']}", ok)
    for d in certs.get("distinguish", []):
        w = ctx.word(d["word"])
        g = ctx.group.parse_element(d["element"])
        v = apply_word(w, p.s, d["n"])
        report.add(f"distinguish {d['word']} from {d['element']} at {d['n']}",
                   v is not None and v == d["value"] and v != g(d["n"]))

    fp_bad = []
    for w, (i, before, bound) in sorted(entries.items(), key=lambda kv: word_key(kv[0])):
        grown = len(fixed_points(w, p.s) - before)
        if grown > bound:
            fp_bad.append(f"{w}: {grown} new fixed points, bound {bound} at step {i}")
    report.add(f"fixed-point bounds ({len(entries)} words)", not fp_bad, "; ".join(fp_bad))

    b = p.s.window()
    report.add("window bijectivity", b == t.data["window"], f"B = {b}")
    return report
