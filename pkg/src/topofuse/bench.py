"""Timing harnesses behind ``topofuse bench``."""

from __future__ import annotations

import random
import statistics
import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .bayes import enumerate_joint
from .dag import Dag
from .fusion import fuse_dags
from .generate import complete_dag, node_names, random_cpts, random_dag


@dataclass
class FusionRow:
    size: int
    trials: int
    mean_ms: float
    k_rev_mean: float
    k_rev_max: int
    k_eq_mean: float
    k_eq_max: int
    bound: int
    ok: bool


def _bounds_ok(n2: int, k_rev: int, k_eq: int) -> bool:
    return k_rev + k_eq <= n2 * (n2 - 1) // 2 and k_eq <= n2


def fusion_scaling(sizes, trials: int, density: float, seed: int) -> list[FusionRow]:
    rng = random.Random(seed)
    rows = []
    for n in sizes:
        names = node_names(n)
        times, krev, keq, ok = [], [], [], True
        for _ in range(trials):
            d1 = random_dag(names, density, rng)
            d2 = random_dag(names, density, rng)
            t0 = time.perf_counter()
            res = fuse_dags(d1, d2)
            times.append(time.perf_counter() - t0)
            krev.append(res.trace.k_rev)
            keq.append(res.trace.k_eq)
            ok &= _bounds_ok(len(d2.nodes), res.trace.k_rev, res.trace.k_eq)
        rows.append(FusionRow(n, trials, 1e3 * statistics.fmean(times), statistics.fmean(krev), max(krev),
                              statistics.fmean(keq), max(keq), n * (n - 1) // 2, ok))
    return rows


def worst_case(n: int) -> tuple[float, int, int, bool]:
    """Fuse a complete DAG with its own reverse: every arc has to be flipped."""
    names = node_names(n)
    d1, d2 = complete_dag(names), complete_dag(names[::-1])
    t0 = time.perf_counter()
    res = fuse_dags(d1, d2)
    elapsed = time.perf_counter() - t0
    return elapsed, res.trace.k_rev, res.trace.k_eq, _bounds_ok(n, res.trace.k_rev, res.trace.k_eq)


@dataclass
class KernelRow:
    kernel: str
    workload: str
    backend: str
    mean_ms: float
    identical: bool


def _csr(dag: Dag):
    order = dag.sorted_nodes()
    index = {v: i for i, v in enumerate(order)}
    ptr, idx = [0], []
    for v in order:
        idx.extend(sorted(index[s] for s in dag.successors(v)))
        ptr.append(len(idx))
    return len(order), ptr, idx


def _time(fn, repeat: int) -> tuple[float, object]:
    out = fn()
    best = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best.append(time.perf_counter() - t0)
    return 1e3 * statistics.fmean(best), out


def kernel_comparison(graph_nodes: int = 200, net_nodes: int = 14, repeat: int = 3,
                      seed: int = 0) -> list[KernelRow]:
    rng = random.Random(seed)
    dag = complete_dag(node_names(graph_nodes))
    n, ptr, idx = _csr(dag)
    net = random_cpts(random_dag(node_names(net_nodes), 0.3, rng), rng)

    rows = []
    ref_levels = ref_joint = None
    for backend in kernels.available_backends():
        ms, (lv, _) = _time(lambda: kernels.longest_path_levels(n, ptr, idx, backend=backend), repeat)
        ref_levels = lv if ref_levels is None else ref_levels
        rows.append(KernelRow("longest_path_levels", f"complete DAG, {graph_nodes} nodes", backend, ms,
                              list(lv) == list(ref_levels)))
        ms, joint = _time(lambda: enumerate_joint(net, backend=backend).probabilities, repeat)
        ref_joint = joint if ref_joint is None else ref_joint
        rows.append(KernelRow("joint_product", f"binary net, {net_nodes} nodes", backend, ms,
                              bool(np.array_equal(joint, ref_joint))))
    return rows
