"""Arc reversal, structural and quantitative.

Reversing ``x -> y`` makes each endpoint inherit the other's parents, so the
represented joint distribution survives the flip.  The new arcs are

    C_x = {(z, x) | z in P(y) minus P(x), z != x}
    C_y = {(z, y) | z in P(x) minus P(y)}

taken against the graph *before* the reversal.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .bayes import CPT, DiscreteBayesNet, conform
from .dag import Arc, Dag
from .errors import AlgorithmInvariantError, ArcNotFoundError, InvalidReversalError

DRIFT_TOL = 1e-12


@dataclass(frozen=True)
class ReversalEffect:
    reversed: Arc
    c_x: frozenset[Arc]
    c_y: frozenset[Arc]

    @property
    def added(self) -> frozenset[Arc]:
        return self.c_x | self.c_y


def generated_arcs(preds: Mapping[str, set], x: str, y: str) -> tuple[frozenset[Arc], frozenset[Arc]]:
    """``(C_x, C_y)`` for reversing ``x -> y`` given a predecessor map."""
    px, py = preds[x], preds[y]
    c_x = frozenset(Arc(z, x) for z in py - px if z != x)
    c_y = frozenset(Arc(z, y) for z in px - py if z != y)
    return c_x, c_y


def has_alternative_path(succs: Mapping[str, set], x: str, y: str) -> bool:
    """Is there a path ``x ~> y`` that does not use the arc ``x -> y`` itself?"""
    seen = set()
    queue = deque(v for v in succs[x] if v != y)
    while queue:
        v = queue.popleft()
        if v == y:
            return True
        if v not in seen:
            seen.add(v)
            queue.extend(succs[v])
    return False


def reverse_arc_structural(dag: Dag, arc) -> tuple[Dag, ReversalEffect]:
    arc = Arc(*arc)
    if arc not in dag.arcs:
        raise ArcNotFoundError(arc)
    x, y = arc
    succs = {n: dag.successors(n) for n in dag.nodes}
    if has_alternative_path(succs, x, y):
        raise InvalidReversalError(f"reversing {arc} would close a cycle: another path {x} ~> {y} exists")
    preds = {x: dag.predecessors(x), y: dag.predecessors(y)}
    c_x, c_y = generated_arcs(preds, x, y)
    arcs = (dag.arcs - {arc}) | {arc.reversed()} | c_x | c_y
    return Dag(dag.nodes, arcs), ReversalEffect(arc.reversed(), c_x, c_y)


def reverse_arc_cpt(net: DiscreteBayesNet, arc) -> DiscreteBayesNet:
    """Reverse ``i -> j`` and recompute both CPTs by Bayes' rule.

    With ``C`` the union of the old parent sets minus ``{i, j}``::

        P'(j | C)    = sum_i P(j | old parents of j) * P(i | old parents of i)
        P'(i | j, C) = P(j | .) * P(i | .) / P'(j | C)

    Contexts where ``P'(j | C) == 0`` are unreachable; ``i`` gets a uniform
    column there.
    """
    arc = Arc(*arc)
    structure, _effect = reverse_arc_structural(net.structure, arc)
    i, j = arc
    cards = net.cards()
    cpt_i, cpt_j = net.cpts[i], net.cpts[j]
    context = tuple(sorted((set(cpt_i.parents) | set(cpt_j.parents)) - {i, j}))

    p_i = conform(cpt_i.values, cpt_i.parents, context, cards)                   # (*C, i)
    p_j = conform(cpt_j.values, cpt_j.parents, context + (i,), cards)            # (*C, i, j)
    joint = p_i[..., :, None] * p_j                                              # (*C, i, j)
    p_j_new = joint.sum(axis=-2)                                                 # (*C, j)

    zero = p_j_new == 0.0
    denom = np.where(zero, 1.0, p_j_new)
    p_i_new = joint / denom[..., None, :]
    p_i_new = np.where(zero[..., None, :], 1.0 / cards[i], p_i_new)
    p_i_new = np.moveaxis(p_i_new, -1, -2)                                       # (*C, j, i)

    for name, arr in ((j, p_j_new), (i, p_i_new)):
        drift = float(np.max(np.abs(arr.sum(axis=-1) - 1.0), initial=0.0))
        if drift > DRIFT_TOL:
            raise AlgorithmInvariantError(f"column drift {drift:.3g} on {name!r} after reversing {arc}")
        arr /= arr.sum(axis=-1, keepdims=True)

    i_parents = tuple(sorted(context + (j,)))
    p_i_new = conform(p_i_new, context + (j,), i_parents, cards)
    return net.replace(structure=structure, cpts={i: CPT(i_parents, p_i_new), j: CPT(context, p_j_new)})
