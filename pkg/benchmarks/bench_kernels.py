"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--graph-nodes N] [--net-nodes N] [--repeat K]
"""

import argparse
import sys

from topofuse.bench import kernel_comparison
from topofuse.kernels import available_backends


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--graph-nodes", type=int, default=200)
    p.add_argument("--net-nodes", type=int, default=14)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    print("backends available:", ", ".join(available_backends()))
    rows = kernel_comparison(args.graph_nodes, args.net_nodes, args.repeat, args.seed)
    base = {r.kernel: r.mean_ms for r in rows if r.backend == "python"}
    print(f"{'kernel':20s} {'workload':26s} {'backend':8s} {'mean ms':>10s} {'speedup':>8s} identical")
    for r in rows:
        speed = base[r.kernel] / r.mean_ms if r.mean_ms else float("inf")
        print(f"{r.kernel:20s} {r.workload:26s} {r.backend:8s} {r.mean_ms:10.2f} {speed:7.1f}x {r.identical}")
    return 0 if all(r.identical for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
