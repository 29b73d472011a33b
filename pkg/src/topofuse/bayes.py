"""Discrete Bayes nets with exact inference by full joint enumeration.

Meant for desk-scale models: the joint table is materialized, so the state
space is capped (``DEFAULT_CAP`` entries unless overridden).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .dag import Arc, Dag
from .errors import (
    InconsistentEvidenceError,
    InvalidReversalError,
    ArcNotFoundError,
    PreconditionError,
    ResourceError,
    TraceMismatchError,
    UnknownNodeError,
    ValidationError,
)

DEFAULT_CAP = 2**20
COLUMN_TOL = 1e-9
# columns closer to 1 than this are left alone, which keeps renormalization idempotent
_RENORM_EPS = 1e-13


@dataclass(frozen=True, eq=False)
class CPT:
    """Conditional table ``P(node | parents)``.

    ``values`` has one axis per parent (in ``parents`` order) followed by the
    node's own state axis, so ``values[i, j, :]`` is one column.
    """

    parents: tuple[str, ...]
    values: np.ndarray

    def __eq__(self, other) -> bool:
        if not isinstance(other, CPT):
            return NotImplemented
        return self.parents == other.parents and np.array_equal(self.values, other.values)

    __hash__ = None

    def columns(self) -> Iterable[tuple[tuple[int, ...], np.ndarray]]:
        for idx in np.ndindex(*self.values.shape[:-1]):
            yield idx, self.values[idx]


def conform(values: np.ndarray, old_parents: Sequence[str], new_parents: Sequence[str],
            cards: Mapping[str, int]) -> np.ndarray:
    """Re-express a CPT array over a superset (and/or reordering) of its parents.

    Added parents get replicated columns: the node is independent of them.
    """
    old_parents = list(old_parents)
    missing = [p for p in new_parents if p not in old_parents]
    if len(old_parents) + len(missing) != len(new_parents):
        raise PreconditionError(f"parents {old_parents} are not a subset of {list(new_parents)}")
    arr = values.reshape(values.shape[:-1] + (1,) * len(missing) + values.shape[-1:])
    labels = old_parents + missing
    perm = [labels.index(p) for p in new_parents] + [len(labels)]
    arr = arr.transpose(perm)
    shape = tuple(cards[p] for p in new_parents) + values.shape[-1:]
    return np.array(np.broadcast_to(arr, shape), dtype=np.float64)


class DiscreteBayesNet:
    """A DAG with a finite domain and a CPT per node."""

    __slots__ = ("structure", "domains", "cpts")

    def __init__(self, structure: Dag, domains: Mapping[str, Sequence[str]],
                 cpts: Mapping[str, CPT]):
        self.structure = structure
        self.domains: dict[str, tuple[str, ...]] = {}
        for node in structure.sorted_nodes():
            if node not in domains:
                raise ValidationError("no state labels", where=node)
            states = tuple(domains[node])
            if len(states) < 2:
                raise ValidationError("a variable needs at least two states", where=node)
            if len(set(states)) != len(states) or not all(isinstance(s, str) and s for s in states):
                raise ValidationError("state labels must be distinct non-empty strings", where=node)
            self.domains[node] = states
        extra = set(domains) - structure.nodes
        if extra:
            raise ValidationError(f"domains given for unknown nodes {sorted(extra)}")

        self.cpts: dict[str, CPT] = {}
        for node in structure.sorted_nodes():
            if node not in cpts:
                raise ValidationError("missing CPT", where=node)
            self.cpts[node] = self._checked_cpt(node, cpts[node])
        extra = set(cpts) - structure.nodes
        if extra:
            raise ValidationError(f"CPTs given for unknown nodes {sorted(extra)}")

    def _checked_cpt(self, node: str, cpt: CPT) -> CPT:
        parents = tuple(cpt.parents)
        if len(set(parents)) != len(parents) or set(parents) != self.structure.predecessors(node):
            raise ValidationError(
                f"CPT parents {list(parents)} do not match graph parents "
                f"{sorted(self.structure.predecessors(node))}",
                where=node,
            )
        values = np.array(cpt.values, dtype=np.float64)
        shape = tuple(len(self.domains[p]) for p in parents) + (len(self.domains[node]),)
        if values.shape != shape:
            raise ValidationError(f"CPT shape {values.shape} != expected {shape}", where=node)
        if (not np.all(np.isfinite(values)) or values.min(initial=0.0) < -COLUMN_TOL
                or values.max(initial=0.0) > 1.0 + COLUMN_TOL):
            raise ValidationError("probabilities must lie in [0, 1]", where=node)
        np.clip(values, 0.0, 1.0, out=values)
        sums = values.sum(axis=-1)
        worst = float(np.max(np.abs(sums - 1.0)))
        if worst > COLUMN_TOL:
            bad = np.unravel_index(int(np.argmax(np.abs(sums - 1.0))), sums.shape)
            labels = [self.domains[p][k] for p, k in zip(parents, bad)]
            raise ValidationError(
                f"column {dict(zip(parents, labels))} sums to {float(sums[bad]):.12g}", where=node
            )
        drift = np.abs(sums - 1.0) > _RENORM_EPS
        if drift.any():
            values[drift] /= sums[drift][..., None]
        values.setflags(write=False)
        return CPT(parents, values)

    @property
    def variables(self) -> list[str]:
        return self.structure.sorted_nodes()

    def card(self, node: str) -> int:
        try:
            return len(self.domains[node])
        except KeyError:
            raise UnknownNodeError(node) from None

    def cards(self) -> dict[str, int]:
        return {v: len(s) for v, s in self.domains.items()}

    def state_index(self, node: str, state: str) -> int:
        try:
            return self.domains[node].index(state)
        except KeyError:
            raise UnknownNodeError(node) from None
        except ValueError:
            raise ValidationError(f"unknown state {state!r}; expected one of {list(self.domains[node])}",
                                  where=node) from None

    def cpt_table(self, node: str) -> dict[tuple[str, ...], tuple[float, ...]]:
        """Mapping view: parent labels -> probability vector over the node's states."""
        cpt = self.cpts[node]
        out = {}
        for idx, col in cpt.columns():
            key = tuple(self.domains[p][k] for p, k in zip(cpt.parents, idx))
            out[key] = tuple(float(x) for x in col)
        return out

    @classmethod
    def from_tables(cls, arcs: Iterable, domains: Mapping[str, Sequence[str]],
                    tables: Mapping[str, tuple[Sequence[str], Mapping]]) -> "DiscreteBayesNet":
        """Build from ``{node: (parents, {parent_labels: probs})}`` tables.

        Root nodes use the empty tuple as their only key.
        """
        structure = Dag(domains, arcs)
        cpts = {}
        for node, (parents, rows) in tables.items():
            parents = tuple(parents)
            shape = tuple(len(domains[p]) for p in parents) + (len(domains[node]),)
            values = np.full(shape, np.nan)
            for key, probs in rows.items():
                key = (key,) if isinstance(key, str) else tuple(key)
                if len(key) != len(parents):
                    raise ValidationError(f"row key {key} does not match parents {list(parents)}", where=node)
                try:
                    idx = tuple(list(domains[p]).index(s) for p, s in zip(parents, key))
                except ValueError:
                    raise ValidationError(f"unknown parent state in {key}", where=node) from None
                values[idx] = probs
            if np.isnan(values).any():
                raise ValidationError("CPT has missing columns", where=node)
            cpts[node] = CPT(parents, values)
        return cls(structure, domains, cpts)

    def replace(self, structure: Dag | None = None, cpts: Mapping[str, CPT] | None = None) -> "DiscreteBayesNet":
        new_cpts = dict(self.cpts)
        if cpts:
            new_cpts.update(cpts)
        return DiscreteBayesNet(structure or self.structure, self.domains, new_cpts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteBayesNet):
            return NotImplemented
        return (self.structure == other.structure and self.domains == other.domains
                and self.cpts == other.cpts)

    __hash__ = None

    def __repr__(self) -> str:
        return f"DiscreteBayesNet({self.structure!r})"


@dataclass(frozen=True, eq=False)
class JointTable:
    """Full joint distribution; axis ``k`` of ``probabilities`` is ``variables[k]``."""

    variables: tuple[str, ...]
    domains: Mapping[str, tuple[str, ...]]
    probabilities: np.ndarray

    def prob(self, assignment: Mapping[str, str]) -> float:
        idx = tuple(self.domains[v].index(assignment[v]) for v in self.variables)
        return float(self.probabilities[idx])

    def items(self):
        for idx in np.ndindex(*self.probabilities.shape):
            labels = tuple(self.domains[v][k] for v, k in zip(self.variables, idx))
            yield labels, float(self.probabilities[idx])

    def marginal(self, keep: Iterable[str]) -> "JointTable":
        keep = set(keep)
        unknown = keep - set(self.variables)
        if unknown:
            raise UnknownNodeError(sorted(unknown)[0])
        axes = tuple(i for i, v in enumerate(self.variables) if v not in keep)
        kept = tuple(v for v in self.variables if v in keep)
        return JointTable(kept, {v: self.domains[v] for v in kept}, self.probabilities.sum(axis=axes))


def state_space_size(net: DiscreteBayesNet) -> int:
    return math.prod(net.card(v) for v in net.variables)


def enumerate_joint(net: DiscreteBayesNet, cap: int = DEFAULT_CAP, backend: str | None = None) -> JointTable:
    """Joint table as the product of CPT entries, one cell per configuration."""
    variables = net.variables
    size = state_space_size(net)
    if size > cap:
        raise ResourceError(f"joint state space has {size} entries, cap is {cap}")
    index = {v: i for i, v in enumerate(variables)}
    cards = [net.card(v) for v in variables]
    par_ptr, par_idx, cpt_ptr = [0], [], []
    blocks = []
    offset = 0
    for v in variables:
        cpt = net.cpts[v]
        par_idx.extend(index[p] for p in cpt.parents)
        par_ptr.append(len(par_idx))
        cpt_ptr.append(offset)
        flat = cpt.values.ravel()
        blocks.append(flat)
        offset += flat.size
    vals = np.concatenate(blocks) if blocks else np.zeros(0)
    flat = kernels.joint_product(cards, par_ptr, par_idx, cpt_ptr, vals, backend=backend)
    probs = flat.reshape(cards) if cards else flat.reshape(())
    return JointTable(tuple(variables), dict(net.domains), probs)


def query(net: DiscreteBayesNet, target: str, evidence: Mapping[str, str] | None = None,
          cap: int = DEFAULT_CAP) -> dict[str, float]:
    """Posterior over ``target`` given ``evidence``, by enumeration."""
    evidence = dict(evidence or {})
    if target not in net.structure:
        raise UnknownNodeError(target)
    if target in evidence:
        raise PreconditionError(f"target {target!r} is also observed")
    for var, state in evidence.items():
        if var not in net.structure:
            raise UnknownNodeError(var)
        net.state_index(var, state)
    joint = enumerate_joint(net, cap=cap)
    sel = []
    for v in joint.variables:
        sel.append(net.state_index(v, evidence[v]) if v in evidence else slice(None))
    sub = joint.probabilities[tuple(sel)]
    free = [v for v in joint.variables if v not in evidence]
    t_axis = free.index(target)
    other = tuple(i for i in range(len(free)) if i != t_axis)
    unnorm = sub.sum(axis=other) if other else sub
    z = float(unnorm.sum())
    if z <= 0.0:
        raise InconsistentEvidenceError(f"evidence {evidence} has probability zero")
    return {s: float(p) / z for s, p in zip(net.domains[target], unnorm)}


def extend_cpt(net: DiscreteBayesNet, node: str, new_parents: Iterable[str]) -> DiscreteBayesNet:
    """Give ``node`` extra parents on which its CPT does not depend."""
    if node not in net.structure:
        raise UnknownNodeError(node)
    new_parents = set(new_parents)
    for p in new_parents:
        if p not in net.structure:
            raise UnknownNodeError(p)
    current = net.structure.predecessors(node)
    if not current <= new_parents:
        raise PreconditionError(f"cannot drop parents {sorted(current - new_parents)} of {node!r}")
    if new_parents == current:
        return net
    structure = net.structure.with_arcs(net.structure.arcs | {Arc(p, node) for p in new_parents})
    order = tuple(sorted(new_parents))
    cpt = net.cpts[node]
    values = conform(cpt.values, cpt.parents, order, net.cards())
    return net.replace(structure=structure, cpts={node: CPT(order, values)})


def align_to_consensus(net: DiscreteBayesNet, consensus: Dag,
                       reversal_events: Sequence[tuple[str, str]] = ()) -> DiscreteBayesNet:
    """Re-express ``net`` over the consensus structure.

    Replays the arc reversals the fusion applied to this net's graph, then
    widens every CPT to the consensus parents among the net's own variables.
    The joint over the net's variables is unchanged.
    """
    from .reversal import reverse_arc_cpt

    for arc in reversal_events:
        try:
            net = reverse_arc_cpt(net, Arc(*arc))
        except (ArcNotFoundError, InvalidReversalError) as exc:
            raise TraceMismatchError(f"reversal {arc[0]}->{arc[1]} not applicable: {exc}") from exc

    own = net.structure.nodes
    missing = own - consensus.nodes
    if missing:
        raise TraceMismatchError(f"consensus lacks variables {sorted(missing)}")
    target_arcs = {a for a in consensus.arcs if a.tail in own and a.head in own}
    if not net.structure.arcs <= target_arcs:
        extra = sorted(net.structure.arcs - target_arcs)
        raise TraceMismatchError(f"consensus does not contain transformed arcs {[str(a) for a in extra]}")
    if target_arcs == net.structure.arcs:
        return net

    structure = Dag(own, target_arcs)
    cards = net.cards()
    cpts = {}
    for v in structure.sorted_nodes():
        cpt = net.cpts[v]
        wanted = structure.predecessors(v)
        if wanted == set(cpt.parents):
            cpts[v] = cpt
        else:
            order = tuple(sorted(wanted))
            cpts[v] = CPT(order, conform(cpt.values, cpt.parents, order, cards))
    return DiscreteBayesNet(structure, net.domains, cpts)


def configurations(domains: Mapping[str, Sequence[str]], variables: Sequence[str]):
    """All joint label tuples over ``variables`` in C order."""
    return itertools.product(*(domains[v] for v in variables))
