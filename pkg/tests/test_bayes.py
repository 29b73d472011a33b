import itertools
import random

import numpy as np
import pytest

from oracles import joint_by_products, marginal, posterior_by_sums
from topofuse.bayes import (
    CPT,
    DiscreteBayesNet,
    align_to_consensus,
    enumerate_joint,
    extend_cpt,
    query,
)
from topofuse.dag import Dag, transitive_successors
from topofuse.errors import (
    InconsistentEvidenceError,
    PreconditionError,
    ResourceError,
    TraceMismatchError,
    UnknownNodeError,
    ValidationError,
)
from topofuse.fusion import fuse_dags
from topofuse.generate import node_names, random_cpts, random_dag

F, T = "false", "true"
B2 = (F, T)


def uniform_net(dag):
    cpts = {}
    for v in dag.sorted_nodes():
        parents = tuple(sorted(dag.predecessors(v)))
        cpts[v] = CPT(parents, np.full((2,) * (len(parents) + 1), 0.5))
    return DiscreteBayesNet(dag, {v: B2 for v in dag.nodes}, cpts)


def test_author_joint_by_hand(authors):
    first, _ = authors
    j = enumerate_joint(first)
    assert j.prob({"A": T, "B": T}) == pytest.approx(0.60, abs=1e-15)
    assert j.prob({"A": T, "B": F}) == pytest.approx(0.20, abs=1e-15)
    assert j.prob({"A": F, "B": T}) == pytest.approx(0.02, abs=1e-15)
    assert j.prob({"A": F, "B": F}) == pytest.approx(0.18, abs=1e-15)


def test_trivial_joints():
    coin = DiscreteBayesNet(Dag("x"), {"x": B2}, {"x": CPT((), np.array([0.5, 0.5]))})
    assert enumerate_joint(coin).probabilities.tolist() == [0.5, 0.5]
    two = uniform_net(Dag("xy"))
    assert enumerate_joint(two).probabilities.ravel().tolist() == [0.25] * 4


def test_query_by_hand(authors):
    first, second = authors
    assert query(first, "A", {"B": T})[T] == pytest.approx(0.60 / 0.62, abs=1e-15)
    assert query(second, "A", {"B": T})[T] == pytest.approx(0.09 / 0.63, abs=1e-15)
    assert query(first, "A") == pytest.approx({F: 0.2, T: 0.8}, abs=1e-15)


def test_query_errors(authors):
    first, _ = authors
    with pytest.raises(UnknownNodeError):
        query(first, "Z")
    with pytest.raises(UnknownNodeError):
        query(first, "A", {"Z": T})
    with pytest.raises(ValidationError):
        query(first, "A", {"B": "maybe"})
    with pytest.raises(PreconditionError):
        query(first, "A", {"A": T})


def test_impossible_evidence():
    net = DiscreteBayesNet.from_tables(
        [("A", "B")], {"A": B2, "B": B2},
        {"A": ((), {(): [1.0, 0.0]}), "B": (("A",), {(F,): [1.0, 0.0], (T,): [0.5, 0.5]})},
    )
    with pytest.raises(InconsistentEvidenceError):
        query(net, "A", {"B": T})


def test_enumeration_cap():
    net = uniform_net(Dag(node_names(6)))
    assert enumerate_joint(net, cap=64).probabilities.size == 64
    with pytest.raises(ResourceError):
        enumerate_joint(net, cap=63)


def test_query_matches_brute_force_on_small_nets():
    rng = random.Random(17)
    for _ in range(60):
        dag = random_dag(node_names(rng.randint(1, 6)), rng.random(), rng)
        net = random_cpts(dag, rng, states=("s0", "s1", "s2")[: rng.randint(2, 3)], extreme=0.2)
        names = net.variables
        target = rng.choice(names)
        others = [v for v in names if v != target]
        # every evidence subset over one or two observed variables
        for k in range(min(2, len(others)) + 1):
            for obs in itertools.combinations(others, k):
                for labels in itertools.product(*(net.domains[v] for v in obs)):
                    ev = dict(zip(obs, labels))
                    try:
                        got = query(net, target, ev)
                    except InconsistentEvidenceError:
                        continue
                    ref = posterior_by_sums(net, target, ev)
                    for s in ref:
                        assert got[s] == pytest.approx(ref[s], abs=1e-12)


def test_constructor_validation():
    dag = Dag("xy", [("x", "y")])
    with pytest.raises(ValidationError):
        DiscreteBayesNet(dag, {"x": B2, "y": B2}, {"x": CPT((), np.array([0.5, 0.4])),
                                                   "y": CPT(("x",), np.full((2, 2), 0.5))})
    with pytest.raises(ValidationError):
        DiscreteBayesNet(dag, {"x": B2, "y": B2}, {"x": CPT((), np.array([0.5, 0.5])),
                                                   "y": CPT((), np.array([0.5, 0.5]))})
    with pytest.raises(ValidationError):
        DiscreteBayesNet(dag, {"x": (F, F), "y": B2}, {})


def test_extend_root_replicates_column(authors):
    first, _ = authors
    net = DiscreteBayesNet.from_tables(
        [], {"A": B2, "C": B2},
        {"A": ((), {(): [0.2, 0.8]}), "C": ((), {(): [0.3, 0.7]})},
    )
    ext = extend_cpt(net, "A", {"C"})
    assert ext.structure.arcs == {("C", "A")}
    assert ext.cpt_table("A") == {(F,): (0.2, 0.8), (T,): (0.2, 0.8)}
    assert extend_cpt(net, "A", set()) is net


def test_extend_keeps_marginal():
    rng = random.Random(3)
    for _ in range(40):
        dag = random_dag(node_names(5), 0.4, rng)
        net = random_cpts(dag, rng)
        v = rng.choice(net.variables)
        blocked = {v} | {w for w in dag.nodes if v in dag.predecessors(w)}
        blocked |= transitive_successors(dag, v)
        extra = {w for w in dag.nodes if w not in blocked and rng.random() < 0.5}
        ext = extend_cpt(net, v, dag.predecessors(v) | extra)
        a = enumerate_joint(net).probabilities
        b = enumerate_joint(ext).probabilities
        assert np.max(np.abs(a - b)) < 1e-12


def test_extend_errors(authors):
    first, _ = authors
    with pytest.raises(PreconditionError):
        extend_cpt(first, "B", set())
    with pytest.raises(UnknownNodeError):
        extend_cpt(first, "B", {"A", "Z"})


def test_align_demo_second_graph(demo_pair):
    d1, d2 = demo_pair
    res = fuse_dags(d1, d2)
    for net in (uniform_net(d2), random_cpts(d2, random.Random(1))):
        aligned = align_to_consensus(net, res.fused, res.trace.reversals())
        own = d2.nodes
        induced = {a for a in res.fused.arcs if a.tail in own and a.head in own}
        assert aligned.structure.arcs == induced
        assert aligned.structure.arcs >= res.transformed_second.arcs
        assert np.max(np.abs(enumerate_joint(aligned).probabilities
                             - enumerate_joint(net).probabilities)) < 1e-9


def test_align_first_graph_is_pure_extension(demo_pair):
    d1, d2 = demo_pair
    res = fuse_dags(d1, d2)
    net = random_cpts(d1, random.Random(2))
    aligned = align_to_consensus(net, res.fused, [])
    assert aligned.structure.arcs == d1.arcs | {("a", "b"), ("a", "d"), ("b", "e")}
    # no reversal: every column is a replica of the original one
    for v in d1.nodes:
        for key, col in aligned.cpt_table(v).items():
            own = tuple(x for p, x in zip(aligned.cpts[v].parents, key) if p in net.cpts[v].parents)
            assert col == net.cpt_table(v)[own]


def test_align_identical_nets(authors):
    first, _ = authors
    res = fuse_dags(first.structure, first.structure)
    assert align_to_consensus(first, res.fused, res.trace.reversals()) == first


def test_align_mismatch(authors):
    first, _ = authors
    with pytest.raises(TraceMismatchError):
        align_to_consensus(first, Dag("AB", [("A", "B")]), [("B", "A")])
    with pytest.raises(TraceMismatchError):
        align_to_consensus(first, Dag("A"), [])
    with pytest.raises(TraceMismatchError):
        align_to_consensus(first, Dag("AB", [("B", "A")]), [])


def test_align_keeps_own_marginals_after_fusion():
    rng = random.Random(40)
    for _ in range(60):
        names = node_names(6)
        d1 = random_dag(rng.sample(names, rng.randint(2, 6)), rng.random(), rng)
        d2 = random_dag(rng.sample(names, rng.randint(2, 6)), rng.random(), rng)
        res = fuse_dags(d1, d2)
        net = random_cpts(d2, rng)
        aligned = align_to_consensus(net, res.fused, res.trace.reversals())
        vs, before = joint_by_products(net)
        _, after = joint_by_products(aligned)
        for v in vs:
            mb, ma = marginal(vs, before, [v]), marginal(vs, after, [v])
            assert max(abs(mb[k] - ma[k]) for k in mb) < 1e-9
