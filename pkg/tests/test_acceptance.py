"""Acceptance suite: one PASS/FAIL line per criterion.

Runs under pytest (lines are printed past output capture) or directly with
``python tests/test_acceptance.py``.
"""

import random
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import corpus  # noqa: E402
from oracles import averaged_posterior, joint_by_products, marginal  # noqa: E402
from topofuse.bayes import align_to_consensus, conform, enumerate_joint, query  # noqa: E402
from topofuse.compromise import compare_compromises, posterior_compromise, prior_compromise  # noqa: E402
from topofuse.dag import Dag, project  # noqa: E402
from topofuse.fixtures import disagreeing_authors, reversal_demo_pair  # noqa: E402
from topofuse.fusion import fuse_dags, fuse_many_traced  # noqa: E402
from topofuse.generate import complete_dag, node_names, random_cpts, random_dag  # noqa: E402
from topofuse.reversal import has_alternative_path, reverse_arc_cpt, reverse_arc_structural  # noqa: E402

CORPUS_SIZE = 1000
T = "true"
_PRINT = print


def report(n, ok, detail, request=None):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    if request is not None:
        capman = request.config.pluginmanager.getplugin("capturemanager")
        with capman.global_and_fixture_disabled():
            _PRINT("\n" + line)
    else:
        _PRINT(line)
    assert ok, line


@pytest.fixture
def say(request):
    return lambda n, ok, detail: report(n, ok, detail, request)


# 1 -------------------------------------------------------------------------


def check_1():
    t0 = time.perf_counter()
    rep = compare_compromises(list(disagreeing_authors()), None, "A", {"B": T})
    secs = time.perf_counter() - t0
    got = [rep.individual[0][T], rep.individual[1][T], rep.posterior[T], rep.prior[T]]
    want = [0.9677, 0.1429, 0.5553, 0.6586]
    ok = all(abs(g - w) <= 0.0005 for g, w in zip(got, want)) and secs < 1.0
    return ok, "P1=%.4f P2=%.4f posterior=%.4f prior=%.4f in %.3f s" % (*got, secs)


# 2 -------------------------------------------------------------------------


def check_2():
    d1, d2 = reversal_demo_pair()
    res = fuse_dags(d1, d2, checked=True)
    ev = res.trace.events
    cls = ev[0].detail
    gen = [e for e in ev if e.kind == "generate-c-sets"]
    eq_adds = [tuple(e.arc) for e in ev if e.kind == "add-arc" and e.detail["source"] == "eq"]
    ok = (
        ev[0].kind == "classify"
        and cls["dir"] == [] and cls["rev"] == [["d", "b"]] and cls["eq"] == [["a", "b"], ["b", "e"]]
        and res.trace.reversals() == [("d", "b")]
        and len(gen) == 1 and gen[0].detail["dir"] == [["a", "d"]]
        and eq_adds == [("b", "e"), ("a", "b")]
        and res.fused.arcs == {("a", "c"), ("b", "d"), ("e", "c"), ("c", "f"), ("d", "f"),
                               ("a", "d"), ("b", "e"), ("a", "b")}
        and res.transformed_second.arcs == {("a", "b"), ("a", "c"), ("b", "d"), ("b", "e"), ("a", "d")}
    )
    return ok, f"{len(ev)} events, k_rev={res.trace.k_rev}, k_eq={res.trace.k_eq}"


# 3 to 5 run over the same seeded corpus --------------------------------------


def check_3():
    t0 = time.perf_counter()
    violations = 0
    reversals = 0
    for _seed, (d1, d2) in corpus(CORPUS_SIZE):
        # checked mode re-verifies acyclicity of D* and D2 after every mutation
        res = fuse_dags(d1, d2, checked=True)
        cur = d2
        for x, y in res.trace.reversals():
            succs = {v: cur.successors(v) for v in cur.nodes}
            if has_alternative_path(succs, x, y):
                violations += 1
            cur, _ = reverse_arc_structural(cur, (x, y))
            reversals += 1
        if cur != res.transformed_second:
            violations += 1
    secs = time.perf_counter() - t0
    return violations == 0 and secs < 60, f"{CORPUS_SIZE} pairs, {reversals} reversals, {violations} violations, {secs:.1f} s"


def check_4():
    bad = 0
    for _seed, (d1, d2) in corpus(CORPUS_SIZE):
        t = fuse_dags(d1, d2).trace
        n2 = len(d2.nodes)
        if t.k_rev + t.k_eq > n2 * (n2 - 1) // 2 or t.k_eq > n2:
            bad += 1
    names = node_names(50)
    full = complete_dag(names)
    backwards = Dag(names, [(h, t) for t, h in full.arcs])
    t0 = time.perf_counter()
    res = fuse_dags(full, backwards)
    secs = time.perf_counter() - t0
    n = 50
    wc_ok = res.trace.k_rev + res.trace.k_eq <= n * (n - 1) // 2 and res.trace.k_eq <= n
    ok = bad == 0 and wc_ok and secs < 10
    return ok, f"{bad} bound violations; worst case n=50 k_rev={res.trace.k_rev} k_eq={res.trace.k_eq} in {secs:.2f} s"


def check_5():
    bad = 0
    for _seed, (d1, d2) in corpus(CORPUS_SIZE):
        res = fuse_dags(d1, d2)
        d2p = res.transformed_second
        if (project(res.fused, d1.nodes, res.s1 | res.s3) != d1
                or project(res.fused, d2.nodes, res.s2 | res.s3) != d2p
                or res.fused.arcs != d1.arcs | d2p.arcs):
            bad += 1
    return bad == 0, f"{CORPUS_SIZE} pairs, {bad} embedding failures"


# 6 -------------------------------------------------------------------------


def check_6():
    rng = random.Random(606)
    worst_rev = worst_align = 0.0
    nets = 0
    while nets < 200:
        dag = random_dag(node_names(rng.randint(2, 8)), rng.choice([0.2, 0.4, 0.6, 0.8]), rng)
        net = random_cpts(dag, rng, extreme=0.1)
        ref = enumerate_joint(net).probabilities
        cur = net
        for _ in range(rng.randint(1, 8)):
            succs = {v: cur.structure.successors(v) for v in cur.structure.nodes}
            ok = [a for a in cur.structure.sorted_arcs() if not has_alternative_path(succs, *a)]
            if not ok:
                break
            cur = reverse_arc_cpt(cur, rng.choice(ok))
        worst_rev = max(worst_rev, float(np.max(np.abs(enumerate_joint(cur).probabilities - ref))))

        other = random_dag(rng.sample(sorted(dag.nodes), rng.randint(1, len(dag.nodes))), rng.random(), rng)
        for first, second in ((dag, other), (other, dag)):
            res = fuse_dags(first, second)
            events = res.trace.reversals() if second is dag else []
            aligned = align_to_consensus(net, res.fused, events)
            vs, before = joint_by_products(net)
            _, after = joint_by_products(aligned)
            for v in vs:
                mb, ma = marginal(vs, before, [v]), marginal(vs, after, [v])
                worst_align = max(worst_align, max(abs(mb[k] - ma[k]) for k in mb))
        nets += 1
    ok = worst_rev < 1e-9 and worst_align < 1e-9
    return ok, f"{nets} nets, max joint error {worst_rev:.2e}, max marginal error {worst_align:.2e}"


# 7 -------------------------------------------------------------------------


def _small_fixtures():
    """Binary nets on at most five nodes: hand-picked plus seeded random."""
    rng = random.Random(707)
    out = [list(disagreeing_authors())]
    for _ in range(60):
        names = node_names(5)
        k = rng.randint(2, 3)
        nets = []
        for _ in range(k):
            nodes = rng.sample(names, rng.randint(2, 5))
            nets.append(random_cpts(random_dag(nodes, rng.random(), rng), rng, extreme=0.2))
        out.append(nets)
    return out


def _weight_vectors(k):
    yield (1.0,) * k
    for i in range(k):
        yield tuple(1.0 if j == i else 0.0 for j in range(k))
    yield tuple(float(j + 1) for j in range(k))


def check_7():
    unanimity = convexity = degenerate = oracle = 0
    worst_oracle = 0.0
    for nets in _small_fixtures():
        fold = fuse_many_traced([n.structure for n in nets])
        aligned = [align_to_consensus(n, fold.fused, t.reversals()) for n, t in zip(nets, fold.traces)]
        cards = {v: 2 for a in aligned for v in a.domains}
        shared = sorted(set.intersection(*(set(n.domains) for n in nets)))

        # unanimity: every author equal to the first one
        twin = [nets[0]] * len(nets)
        cons = prior_compromise(twin)
        if cons != nets[0]:
            unanimity += 1
        for target in nets[0].variables:
            q0 = query(nets[0], target)
            if query(cons, target) != q0 or posterior_compromise(twin, None, target).probs != q0:
                unanimity += 1

        for weights in _weight_vectors(len(nets)):
            cons = prior_compromise(nets, weights)
            # convexity of every prior-compromise CPT entry over the owners
            for v in cons.variables:
                parents = cons.cpts[v].parents
                tables = [conform(a.cpts[v].values, a.cpts[v].parents, parents, cards)
                          for a in aligned if v in a.domains]
                lo, hi = np.minimum.reduce(tables), np.maximum.reduce(tables)
                if np.any(cons.cpts[v].values < lo) or np.any(cons.cpts[v].values > hi):
                    convexity += 1
            for target in shared:
                post = posterior_compromise(nets, weights, target)
                vals = [p for p in post.individual if p is not None]
                for s in post.probs:
                    lo = min(p[s] for p in vals)
                    hi = max(p[s] for p in vals)
                    if not lo <= post.probs[s] <= hi:
                        convexity += 1
                # degenerate weights: one author reproduces that author's answers
                if sorted(weights) == [0.0] * (len(nets) - 1) + [1.0]:
                    i = weights.index(1.0)
                    if post.probs != query(nets[i], target):
                        degenerate += 1
            if sorted(weights) == [0.0] * (len(nets) - 1) + [1.0]:
                i = weights.index(1.0)
                for v in aligned[i].variables:
                    if not np.array_equal(cons.cpts[v].values, conform(
                            aligned[i].cpts[v].values, aligned[i].cpts[v].parents, cons.cpts[v].parents, cards)):
                        degenerate += 1
            # independent oracle for prior-compromise inference
            for target in cons.variables:
                ref, _ = averaged_posterior(aligned, weights, fold.fused, target, {})
                got = query(cons, target)
                err = max(abs(got[s] - ref[s]) for s in ref)
                worst_oracle = max(worst_oracle, err)
                if err > 1e-9:
                    oracle += 1
    ok = unanimity == convexity == degenerate == oracle == 0
    return ok, (f"unanimity {unanimity}, convexity {convexity}, degenerate {degenerate}, "
                f"oracle {oracle} failures; max oracle error {worst_oracle:.2e}")


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7]


@pytest.mark.parametrize("n", range(1, 8))
def test_criterion(n, say):
    ok, detail = CHECKS[n - 1]()
    say(n, ok, detail)


if __name__ == "__main__":
    failed = 0
    for n, check in enumerate(CHECKS, start=1):
        ok, detail = check()
        _PRINT(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        failed += not ok
    sys.exit(1 if failed else 0)
