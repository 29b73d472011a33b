"""Directed acyclic graphs over named nodes.

Nodes are plain strings; two nets share a variable exactly when they use the
same name.  Every iteration that can leak into output goes through
``sorted`` so results and traces are reproducible.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, NamedTuple

from . import kernels
from .errors import (
    CycleError,
    ProjectionError,
    StructuralError,
    UnknownNodeError,
)


class Arc(NamedTuple):
    tail: str
    head: str

    def reversed(self) -> "Arc":
        return Arc(self.head, self.tail)

    def __str__(self) -> str:
        return f"{self.tail}->{self.head}"


def _check_name(name) -> str:
    if not isinstance(name, str) or not name:
        raise StructuralError(f"node names must be non-empty strings, got {name!r}")
    return name


def _as_arcs(arcs: Iterable) -> frozenset[Arc]:
    out = set()
    for a in arcs:
        tail, head = a
        out.add(Arc(_check_name(tail), _check_name(head)))
    return frozenset(out)


class Dag:
    """Immutable DAG ``(nodes, arcs)``.

    Construction rejects dangling endpoints, self-loops and cycles, so any
    ``Dag`` value in hand is known to be acyclic.
    """

    __slots__ = ("nodes", "arcs", "_preds", "_succs")

    def __init__(self, nodes: Iterable[str] = (), arcs: Iterable = ()):
        self.nodes: frozenset[str] = frozenset(_check_name(n) for n in nodes)
        self.arcs: frozenset[Arc] = _as_arcs(arcs)
        for a in self.arcs:
            if a.tail == a.head:
                raise StructuralError(f"self-loop on {a.tail!r}")
            for end in a:
                if end not in self.nodes:
                    raise StructuralError(f"arc {a} references undeclared node {end!r}")
        cycle = find_cycle(self.nodes, self.arcs)
        if cycle is not None:
            raise CycleError(cycle)
        self._preds = None
        self._succs = None

    def _index(self):
        preds = {n: set() for n in self.nodes}
        succs = {n: set() for n in self.nodes}
        for t, h in self.arcs:
            succs[t].add(h)
            preds[h].add(t)
        self._preds = {n: frozenset(v) for n, v in preds.items()}
        self._succs = {n: frozenset(v) for n, v in succs.items()}

    def predecessors(self, x: str) -> frozenset[str]:
        if self._preds is None:
            self._index()
        try:
            return self._preds[x]
        except KeyError:
            raise UnknownNodeError(x) from None

    def successors(self, x: str) -> frozenset[str]:
        if self._succs is None:
            self._index()
        try:
            return self._succs[x]
        except KeyError:
            raise UnknownNodeError(x) from None

    def sorted_nodes(self) -> list[str]:
        return sorted(self.nodes)

    def sorted_arcs(self) -> list[Arc]:
        return sorted(self.arcs)

    def with_arcs(self, arcs: Iterable) -> "Dag":
        return Dag(self.nodes, arcs)

    def __contains__(self, node) -> bool:
        return node in self.nodes

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dag):
            return NotImplemented
        return self.nodes == other.nodes and self.arcs == other.arcs

    def __hash__(self) -> int:
        return hash((self.nodes, self.arcs))

    def __repr__(self) -> str:
        arcs = ", ".join(str(a) for a in self.sorted_arcs())
        return f"Dag(nodes={self.sorted_nodes()}, arcs=[{arcs}])"


def find_cycle(nodes: Iterable[str], arcs: Iterable) -> list[str] | None:
    """Return one directed cycle as ``[v0, v1, ..., v0]``, or None if acyclic."""
    nodes = set(nodes)
    succ: dict[str, list[str]] = {n: [] for n in nodes}
    for t, h in arcs:
        for end in (t, h):
            if end not in nodes:
                raise StructuralError(f"arc {t}->{h} references undeclared node {end!r}")
        succ[t].append(h)
    for n in succ:
        succ[n].sort()

    WHITE, GRAY, BLACK = 0, 1, 2
    color = dict.fromkeys(nodes, WHITE)
    for root in sorted(nodes):
        if color[root] != WHITE:
            continue
        path = [root]
        color[root] = GRAY
        stack = [iter(succ[root])]
        while stack:
            for v in stack[-1]:
                if color[v] == GRAY:
                    return path[path.index(v):] + [v]
                if color[v] == WHITE:
                    color[v] = GRAY
                    path.append(v)
                    stack.append(iter(succ[v]))
                    break
            else:
                color[path.pop()] = BLACK
                stack.pop()
    return None


def is_acyclic(nodes: Iterable[str], arcs: Iterable) -> bool:
    return find_cycle(nodes, arcs) is None


def levels(nodes: Iterable[str], arcs: Iterable) -> dict[str, int]:
    """Longest-path level of each node for a raw ``(nodes, arcs)`` pair."""
    order = sorted(set(nodes))
    index = {n: i for i, n in enumerate(order)}
    n = len(order)
    buckets: list[list[int]] = [[] for _ in range(n)]
    try:
        for t, h in arcs:
            buckets[index[t]].append(index[h])
    except KeyError as exc:
        raise StructuralError(f"arc references undeclared node {exc.args[0]!r}") from None
    ptr = [0]
    idx: list[int] = []
    for b in buckets:
        idx.extend(b)
        ptr.append(len(idx))
    lv, ok = kernels.longest_path_levels(n, ptr, idx)
    if not ok:
        raise CycleError(find_cycle(order, arcs) or [])
    return {name: int(lv[i]) for i, name in enumerate(order)}


def tau_values(dag: Dag, extra_nodes: Iterable[str] = ()) -> dict[str, int]:
    """Topological value of each node: 0 for roots, else 1 + max over parents.

    Nodes in ``extra_nodes`` that the graph does not contain are rootless and
    get 0.
    """
    tau = levels(dag.nodes, dag.arcs)
    for x in extra_nodes:
        tau.setdefault(_check_name(x), 0)
    return tau


def direct_neighbors(dag: Dag, x: str) -> tuple[frozenset[str], frozenset[str]]:
    return dag.predecessors(x), dag.successors(x)


def transitive_successors(dag: Dag, x: str) -> set[str]:
    seen: set[str] = set()
    queue = deque(dag.successors(x))
    while queue:
        v = queue.popleft()
        if v not in seen:
            seen.add(v)
            queue.extend(dag.successors(v))
    return seen


def has_directed_path(dag: Dag, x: str, y: str) -> bool:
    """True iff a path of length >= 1 leads from ``x`` to ``y``."""
    dag.successors(y)  # existence check
    return y in transitive_successors(dag, x)


def project(dag: Dag, keep_nodes: Iterable[str], keep_arcs: Iterable) -> Dag:
    keep_nodes = frozenset(keep_nodes)
    keep_arcs = _as_arcs(keep_arcs)
    stray = keep_nodes - dag.nodes
    if stray:
        raise ProjectionError(f"nodes not in graph: {sorted(stray)}")
    for a in sorted(keep_arcs):
        if a not in dag.arcs:
            raise ProjectionError(f"arc {a} not in graph")
        if a.tail not in keep_nodes or a.head not in keep_nodes:
            raise ProjectionError(f"arc {a} has an endpoint outside the kept nodes")
    return Dag(keep_nodes, keep_arcs)
