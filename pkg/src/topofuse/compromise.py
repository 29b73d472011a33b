"""Prior and posterior compromise across several authors' nets.

*Prior* compromise averages the authors' CPT entries on the fused structure
and then runs inference once.  *Posterior* compromise runs inference in each
author's own net and averages the answers.  Both use a linear pool
(weighted average).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .bayes import CPT, DEFAULT_CAP, DiscreteBayesNet, align_to_consensus, conform, query
from .errors import InconsistentEvidenceError, PreconditionError, SchemaError, UnknownNodeError
from .fusion import fuse_many_traced


@dataclass(frozen=True)
class CompromiseWeights:
    weights: tuple[float, ...]

    def __post_init__(self):
        ws = tuple(float(w) for w in self.weights)
        if not ws:
            raise PreconditionError("no weights given")
        if any(not math.isfinite(w) or w < 0 for w in ws):
            raise PreconditionError(f"weights must be finite and non-negative: {list(ws)}")
        if not any(w > 0 for w in ws):
            raise PreconditionError("at least one weight must be positive")
        object.__setattr__(self, "weights", ws)

    @classmethod
    def equal(cls, n: int) -> "CompromiseWeights":
        return cls((1.0,) * n)

    @classmethod
    def coerce(cls, weights, n: int) -> "CompromiseWeights":
        if weights is None:
            weights = cls.equal(n)
        elif not isinstance(weights, CompromiseWeights):
            weights = cls(tuple(weights))
        if len(weights.weights) != n:
            raise PreconditionError(f"{len(weights.weights)} weights for {n} nets")
        return weights

    def normalized(self) -> tuple[float, ...]:
        total = math.fsum(self.weights)
        return tuple(w / total for w in self.weights)

    def over(self, members: Sequence[int]) -> list[float]:
        """Weights restricted to ``members`` and renormalized.

        If every member has weight zero they share equally: a variable known
        only to zero-weight authors still needs some distribution.
        """
        ws = [self.weights[i] for i in members]
        total = math.fsum(ws)
        if total == 0.0:
            return [1.0 / len(ws)] * len(ws)
        return [w / total for w in ws]


def weighted_average(values: Sequence, weights: Sequence[float]):
    """Linear pool of scalars or equally shaped arrays.

    Computed as ``ref + sum(w * (v - ref))`` around the heaviest input and
    clipped to the inputs' range, so unanimous inputs and one-hot weights come
    back bit-exact and the result never leaves the convex hull.
    """
    arrs = [np.asarray(v, dtype=np.float64) for v in values]
    ref_i = max(range(len(arrs)), key=lambda i: (weights[i], -i))
    ref = arrs[ref_i]
    out = ref.copy()
    for w, a in zip(weights, arrs):
        out = out + w * (a - ref)
    lo = np.minimum.reduce(arrs)
    hi = np.maximum.reduce(arrs)
    out = np.clip(out, lo, hi)
    return float(out) if out.ndim == 0 else out


def check_domains(nets: Sequence[DiscreteBayesNet]) -> dict[str, tuple[str, ...]]:
    domains: dict[str, tuple[str, ...]] = {}
    owner: dict[str, int] = {}
    for i, net in enumerate(nets):
        for v, states in net.domains.items():
            if v in domains and domains[v] != states:
                raise SchemaError(
                    f"variable {v!r} has states {list(domains[v])} in net {owner[v] + 1} "
                    f"but {list(states)} in net {i + 1}"
                )
            domains.setdefault(v, states)
            owner.setdefault(v, i)
    return domains


def prior_compromise(nets: Sequence[DiscreteBayesNet], weights=None,
                     checked: bool = False) -> DiscreteBayesNet:
    """Consensus net over the fused structure with averaged CPT entries."""
    if not nets:
        raise PreconditionError("need at least one net")
    weights = CompromiseWeights.coerce(weights, len(nets))
    domains = check_domains(nets)
    fold = fuse_many_traced([n.structure for n in nets], checked=checked)
    consensus = fold.fused
    aligned = [align_to_consensus(net, consensus, trace.reversals())
               for net, trace in zip(nets, fold.traces)]
    cards = {v: len(s) for v, s in domains.items()}

    cpts = {}
    for v in consensus.sorted_nodes():
        parents = tuple(sorted(consensus.predecessors(v)))
        owners = [i for i, a in enumerate(aligned) if v in a.structure]
        tables = [conform(aligned[i].cpts[v].values, aligned[i].cpts[v].parents, parents, cards)
                  for i in owners]
        cpts[v] = CPT(parents, weighted_average(tables, weights.over(owners)))
    return DiscreteBayesNet(consensus, domains, cpts)


@dataclass(frozen=True)
class PosteriorCompromise:
    probs: dict[str, float]
    individual: list[dict[str, float] | None]
    dropped: list[int]


def posterior_compromise(nets: Sequence[DiscreteBayesNet], weights, target: str,
                         evidence: Mapping[str, str] | None = None,
                         cap: int = DEFAULT_CAP) -> PosteriorCompromise:
    """Average of the individual posteriors.

    An author under whose net the evidence is impossible has no posterior;
    it is dropped (and listed in ``dropped``) and the rest are reweighted.
    """
    if not nets:
        raise PreconditionError("need at least one net")
    weights = CompromiseWeights.coerce(weights, len(nets))
    check_domains(nets)
    evidence = dict(evidence or {})

    individual: list[dict[str, float] | None] = []
    dropped: list[int] = []
    for i, net in enumerate(nets):
        needed = [target, *evidence]
        if any(v not in net.structure for v in needed):
            if weights.weights[i] > 0:
                missing = next(v for v in needed if v not in net.structure)
                raise UnknownNodeError(missing)
            individual.append(None)
            continue
        try:
            individual.append(query(net, target, evidence, cap=cap))
        except InconsistentEvidenceError:
            individual.append(None)
            dropped.append(i)

    live = [i for i, post in enumerate(individual) if post is not None and weights.weights[i] > 0]
    if not live:
        raise InconsistentEvidenceError(f"evidence {evidence} is impossible under every weighted net")
    states = nets[live[0]].domains[target]
    ws = weights.over(live)
    vec = weighted_average([[individual[i][s] for s in states] for i in live], ws)
    return PosteriorCompromise(dict(zip(states, map(float, vec))), individual, dropped)


@dataclass(frozen=True)
class CompromiseReport:
    target: str
    evidence: dict[str, str]
    states: tuple[str, ...]
    weights: tuple[float, ...]
    prior: dict[str, float]
    posterior: dict[str, float]
    individual: list[dict[str, float] | None]
    dropped: list[int]

    def gap(self, state: str) -> float:
        return abs(self.prior[state] - self.posterior[state])


def compare_compromises(nets: Sequence[DiscreteBayesNet], weights, target: str,
                        evidence: Mapping[str, str] | None = None,
                        cap: int = DEFAULT_CAP) -> CompromiseReport:
    weights = CompromiseWeights.coerce(weights, len(nets))
    evidence = dict(evidence or {})
    consensus = prior_compromise(nets, weights)
    prior = query(consensus, target, evidence, cap=cap)
    post = posterior_compromise(nets, weights, target, evidence, cap=cap)
    return CompromiseReport(
        target=target,
        evidence=evidence,
        states=consensus.domains[target],
        weights=weights.normalized(),
        prior=prior,
        posterior=post.probs,
        individual=post.individual,
        dropped=post.dropped,
    )
