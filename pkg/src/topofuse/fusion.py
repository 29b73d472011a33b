"""Topological fusion of two DAGs by incremental union with ordered reversals.

The fused graph ``D*`` starts as the first DAG plus every node of the second.
Arcs of the second DAG are then sorted into three working sets by comparing
the topological values ``tau*`` of their endpoints in ``D*``:

* ``dir``: ``tau*(x) < tau*(y)``, can be added as is;
* ``rev``: ``tau*(x) > tau*(y)``, must be reversed (in the second DAG too);
* ``eq``:  ``tau*(x) == tau*(y)``, deferred until the others are settled.

``rev`` is drained first, smallest arc first under the reversal priority;
each reversal may spawn parent-inheritance arcs that are classified the same
way.  Then ``dir`` is flushed and ``eq`` arcs are added one at a time, each
bump of a head's value moving the remaining ``eq`` arcs into that head over
to ``dir``.

Ties in both priorities are broken by node names so runs are deterministic.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .dag import Arc, Dag, find_cycle, levels, project, tau_values
from .errors import AlgorithmInvariantError, PreconditionError, TraceMismatchError, UnknownNodeError
from .reversal import generated_arcs, has_alternative_path, reverse_arc_structural

EVENT_KINDS = (
    "classify",
    "select-min-rev",
    "add-arc",
    "generate-c-sets",
    "reverse",
    "select-min-eq",
    "transfer-eq-to-dir",
)


@dataclass(frozen=True)
class ArcPartition:
    dir: frozenset[Arc] = frozenset()
    rev: frozenset[Arc] = frozenset()
    eq: frozenset[Arc] = frozenset()
    present: frozenset[Arc] = frozenset()  # already in E*, nothing to do


@dataclass(frozen=True)
class FusionEvent:
    kind: str
    arc: Arc | None = None
    detail: dict = field(default_factory=dict, compare=True, hash=False)
    tau: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "arc": list(self.arc) if self.arc else None,
            "detail": self.detail,
            "tau": self.tau,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FusionEvent":
        arc = Arc(*d["arc"]) if d.get("arc") else None
        return cls(d["kind"], arc, d.get("detail", {}), d.get("tau", ""))


@dataclass
class FusionTrace:
    events: list[FusionEvent] = field(default_factory=list)
    k_rev: int = 0
    k_eq: int = 0

    def reversals(self) -> list[Arc]:
        """Arcs of the second DAG that were reversed, in order, original orientation."""
        return [e.arc for e in self.events if e.kind == "reverse"]

    def additions(self) -> list[tuple[Arc, str]]:
        return [(e.arc, e.detail["source"]) for e in self.events if e.kind == "add-arc"]

    def to_lines(self, pass_index: int | None = None) -> list[str]:
        lines = []
        for seq, ev in enumerate(self.events):
            d = ev.to_dict()
            d["seq"] = seq
            if pass_index is not None:
                d["pass"] = pass_index
            lines.append(json.dumps(d, sort_keys=True))
        end = {"kind": "counters", "k_rev": self.k_rev, "k_eq": self.k_eq}
        if pass_index is not None:
            end["pass"] = pass_index
        lines.append(json.dumps(end, sort_keys=True))
        return lines

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "FusionTrace":
        trace = cls()
        for line in lines:
            if not line.strip():
                continue
            d = json.loads(line)
            if d["kind"] == "counters":
                trace.k_rev, trace.k_eq = d["k_rev"], d["k_eq"]
            else:
                trace.events.append(FusionEvent.from_dict(d))
        return trace


@dataclass(frozen=True)
class FusionResult:
    fused: Dag
    transformed_second: Dag
    trace: FusionTrace
    first: Dag

    @property
    def s1(self) -> frozenset[Arc]:
        return self.first.arcs - self.transformed_second.arcs

    @property
    def s2(self) -> frozenset[Arc]:
        return self.transformed_second.arcs - self.first.arcs

    @property
    def s3(self) -> frozenset[Arc]:
        return self.first.arcs & self.transformed_second.arcs

    def embedded_first(self) -> Dag:
        return project(self.fused, self.first.nodes, self.s1 | self.s3)

    def embedded_second(self) -> Dag:
        return project(self.fused, self.transformed_second.nodes, self.s2 | self.s3)


def _tau(tau: dict[str, int], node: str) -> int:
    try:
        return tau[node]
    except KeyError:
        raise UnknownNodeError(node) from None


def _bucket(arc: Arc, tau_star: dict[str, int]) -> str:
    a, b = _tau(tau_star, arc.tail), _tau(tau_star, arc.head)
    return "dir" if a < b else "rev" if a > b else "eq"


def classify_arcs(e2: Iterable, tau_star: dict[str, int], e_star: Iterable) -> ArcPartition:
    e_star = set(e_star)
    sets: dict[str, set[Arc]] = {"dir": set(), "rev": set(), "eq": set(), "present": set()}
    for arc in map(lambda a: Arc(*a), e2):
        sets["present" if arc in e_star else _bucket(arc, tau_star)].add(arc)
    return ArcPartition(**{k: frozenset(v) for k, v in sets.items()})


def rev_key(tau_d2: dict[str, int]):
    """Sort key realizing the reversal priority: lowest head first, then highest tail."""
    return lambda a: (_tau(tau_d2, a.head), -_tau(tau_d2, a.tail), a.head, a.tail)


def eq_key(tau_star: dict[str, int], tau_d2: dict[str, int]):
    """Sort key for deferred arcs: highest tail in D* first, then highest head in D2."""
    return lambda a: (-_tau(tau_star, a.tail), -_tau(tau_d2, a.head), a.tail, a.head)


def min_rev(partition: ArcPartition, tau_d2: dict[str, int]) -> Arc:
    if not partition.rev:
        raise PreconditionError("REV is empty")
    return min(partition.rev, key=rev_key(tau_d2))


def min_eq(partition: ArcPartition, tau_star: dict[str, int], tau_d2: dict[str, int]) -> Arc:
    if not partition.eq:
        raise PreconditionError("EQ is empty")
    return min(partition.eq, key=eq_key(tau_star, tau_d2))


def _arcs(xs) -> list[list[str]]:
    return [list(a) for a in sorted(xs)]


class _Fusion:
    """Mutable run state; one instance per call to :func:`fuse_dags`."""

    def __init__(self, d1: Dag, d2: Dag, checked: bool, full_tau: bool):
        self.checked = checked
        self.full_tau = full_tau
        self.e1 = d1.arcs
        self.v_star = d1.nodes | d2.nodes
        self.e_star: set[Arc] = set(d1.arcs)
        self.v2 = d2.nodes
        self.e2: set[Arc] = set(d2.arcs)
        self.preds2 = {n: set(d2.predecessors(n)) for n in d2.nodes}
        self.succs2 = {n: set(d2.successors(n)) for n in d2.nodes}
        self.tau_star = tau_values(d1, d2.nodes)
        self.tau2 = tau_values(d2)
        self.dir: set[Arc] = set()
        self.rev: set[Arc] = set()
        self.eq: set[Arc] = set()
        self.added: set[Arc] = set()
        self.trace = FusionTrace()

    # -- bookkeeping -------------------------------------------------------

    def _snapshot(self) -> str:
        blob = json.dumps([sorted(self.tau_star.items()), sorted(self.tau2.items())])
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def emit(self, kind: str, arc: Arc | None = None, **detail) -> None:
        self.trace.events.append(FusionEvent(kind, arc, detail, self._snapshot()))

    def fail(self, message: str):
        raise AlgorithmInvariantError(message, trace=self.trace)

    def enter(self, target: set[Arc], arc: Arc) -> None:
        if self.checked and (arc in self.added or arc.reversed() in self.added):
            self.fail(f"{arc} re-entered the working sets after being added to D*")
        target.add(arc)

    def add_star(self, arc: Arc, source: str) -> None:
        new = arc not in self.e_star
        self.e_star.add(arc)
        self.added.add(arc)
        self.emit("add-arc", arc, source=source, new=new)
        if self.checked:
            cycle = find_cycle(self.v_star, self.e_star)
            if cycle:
                self.fail(f"D* became cyclic after adding {arc}: {cycle}")

    # -- checked-mode invariants -------------------------------------------

    def check_loop_top(self) -> None:
        if not self.checked:
            return
        sets = {"dir": self.dir, "rev": self.rev, "eq": self.eq}
        seen: dict[frozenset, str] = {}
        for name, arcs in sets.items():
            for a in arcs:
                pair = frozenset(a)
                if pair in seen:
                    self.fail(f"working sets not disjoint: {a} in {name} and {seen[pair]}")
                seen[pair] = name
                want = _bucket(a, self.tau_star)
                if want != name:
                    self.fail(f"{a} sits in {name} but tau* says {want}")
        unplaced = self.e2 - self.e_star - self.dir - self.rev - self.eq
        if unplaced:
            self.fail(f"arcs of D2 outside D* and all working sets: {sorted(map(str, unplaced))}")

    def check_tau_agrees(self, head: str) -> None:
        full = levels(self.v_star, self.e_star)
        watched = {head}
        for a in self.dir | self.eq:
            watched.update(a)
        for n in sorted(watched):
            if full[n] != self.tau_star[n]:
                self.fail(f"incremental tau*({n})={self.tau_star[n]} but full recompute gives {full[n]}")

    # -- the algorithm -----------------------------------------------------

    def classify(self) -> None:
        part = classify_arcs(self.e2, self.tau_star, self.e_star)
        for name in ("dir", "rev", "eq"):
            for a in getattr(part, name):
                self.enter(getattr(self, name), a)
        self.emit("classify", None, dir=_arcs(part.dir), rev=_arcs(part.rev),
                  eq=_arcs(part.eq), present=_arcs(part.present))

    def reverse_step(self) -> None:
        x, y = arc = min(self.rev, key=rev_key(self.tau2))
        self.emit("select-min-rev", arc)
        self.rev.discard(arc)
        self.add_star(arc.reversed(), "rev")

        c_x, c_y = generated_arcs(self.preds2, x, y)
        placed: dict[str, list] = {"dir": [], "rev": [], "eq": [], "present": []}
        for a in sorted(c_x | c_y):
            if a in self.e_star:
                placed["present"].append(list(a))
                continue
            name = _bucket(a, self.tau_star)
            self.enter(getattr(self, name), a)
            placed[name].append(list(a))
        self.emit("generate-c-sets", arc, c_x=_arcs(c_x), c_y=_arcs(c_y), **placed)

        if has_alternative_path(self.succs2, x, y):
            self.fail(f"invalid reversal of {arc}: another path {x} ~> {y} exists in D2")
        self.e2.discard(arc)
        self.succs2[x].discard(y)
        self.preds2[y].discard(x)
        for t, h in [arc.reversed(), *c_x, *c_y]:
            self.e2.add(Arc(t, h))
            self.succs2[t].add(h)
            self.preds2[h].add(t)
        self.tau2 = levels(self.v2, self.e2)
        self.emit("reverse", arc, to=[y, x])
        if self.checked:
            cycle = find_cycle(self.v2, self.e2)
            if cycle:
                self.fail(f"D2 became cyclic after reversing {arc}: {cycle}")

    def eq_step(self) -> None:
        for a in sorted(self.dir):
            self.add_star(a, "dir")
        self.dir.clear()
        if not self.eq:
            return
        x, y = arc = min(self.eq, key=eq_key(self.tau_star, self.tau2))
        self.emit("select-min-eq", arc)
        self.eq.discard(arc)
        self.add_star(arc, "eq")
        if self.full_tau:
            self.tau_star = levels(self.v_star, self.e_star)
        else:
            # only the head moves; nodes above it never meet the working sets again
            self.tau_star[y] = max(self.tau_star[y], self.tau_star[x] + 1)

        moved = {a for a in self.eq if a.head == y}
        if moved:
            if self.checked:
                for z, _ in moved:
                    if self.tau_star[z] != self.tau_star[y] - 1:
                        self.fail(f"transfer of ({z},{y}): tau*({z}) != tau*({y}) - 1")
            self.eq -= moved
            self.dir = moved
            self.emit("transfer-eq-to-dir", arc, arcs=_arcs(moved))
        if self.checked and not self.full_tau:
            self.check_tau_agrees(y)

    def run(self) -> tuple[Dag, Dag]:
        self.classify()
        while self.rev:
            self.trace.k_rev += 1
            self.check_loop_top()
            self.reverse_step()
        while self.dir or self.eq:
            self.trace.k_eq += 1
            self.check_loop_top()
            self.eq_step()

        if self.e_star != set(self.e1) | self.e2:
            self.fail("D* is not the union of the first DAG and the transformed second DAG")
        n2 = len(self.v2)
        if self.checked:
            if self.trace.k_rev + self.trace.k_eq > n2 * (n2 - 1) // 2 or self.trace.k_eq > n2:
                self.fail(f"iteration bounds exceeded: k_rev={self.trace.k_rev}, k_eq={self.trace.k_eq}")
        try:
            fused = Dag(self.v_star, self.e_star)
            second = Dag(self.v2, self.e2)
        except Exception as exc:  # a cycle here is a bug in the algorithm, not in the input
            raise AlgorithmInvariantError(str(exc), trace=self.trace) from exc
        return fused, second


def fuse_dags(d1: Dag, d2: Dag, checked: bool = False, full_tau: bool = False) -> FusionResult:
    """Fuse ``d2`` into ``d1``.

    ``checked`` re-verifies acyclicity after every mutation plus the
    working-set invariants at the top of every loop iteration; a breach
    raises :class:`AlgorithmInvariantError`.  ``full_tau`` recomputes
    ``tau*`` from scratch after each deferred-arc addition instead of only
    bumping the head.
    """
    if not isinstance(d1, Dag) or not isinstance(d2, Dag):
        raise TypeError("fuse_dags expects Dag inputs")
    state = _Fusion(d1, d2, checked, full_tau)
    fused, second = state.run()
    return FusionResult(fused, second, state.trace, d1)


def replay_trace(d1: Dag, d2: Dag, trace: FusionTrace) -> tuple[Dag, Dag]:
    """Rebuild ``(D*, D2')`` from the inputs and a recorded trace alone.

    Reversals are recomputed structurally and their generated arcs compared
    with the recorded ones.
    """
    e_star = set(d1.arcs)
    current = d2
    for ev in trace.events:
        if ev.kind == "add-arc":
            e_star.add(ev.arc)
        elif ev.kind == "generate-c-sets":
            _, effect = reverse_arc_structural(current, ev.arc)
            if _arcs(effect.c_x) != ev.detail["c_x"] or _arcs(effect.c_y) != ev.detail["c_y"]:
                raise TraceMismatchError(f"generated arcs for reversing {ev.arc} differ from the trace")
        elif ev.kind == "reverse":
            try:
                current, _ = reverse_arc_structural(current, ev.arc)
            except Exception as exc:
                raise TraceMismatchError(f"cannot replay reversal of {ev.arc}: {exc}") from exc
        elif ev.kind not in EVENT_KINDS:
            raise TraceMismatchError(f"unknown event kind {ev.kind!r}")
    return Dag(d1.nodes | d2.nodes, e_star), current


@dataclass(frozen=True)
class FoldResult:
    fused: Dag
    transformed: list[Dag]
    traces: list[FusionTrace]


def fuse_many_traced(dags: Sequence[Dag], checked: bool = False) -> FoldResult:
    """Left fold of :func:`fuse_dags`; ``traces[0]`` is empty (nothing merged)."""
    if not dags:
        raise PreconditionError("need at least one DAG")
    fused = dags[0]
    transformed = [dags[0]]
    traces = [FusionTrace()]
    for d in dags[1:]:
        res = fuse_dags(fused, d, checked=checked)
        fused = res.fused
        transformed.append(res.transformed_second)
        traces.append(res.trace)
    return FoldResult(fused, transformed, traces)


def fuse_many(dags: Sequence[Dag], checked: bool = False) -> tuple[Dag, list[Dag]]:
    res = fuse_many_traced(dags, checked=checked)
    return res.fused, res.transformed
