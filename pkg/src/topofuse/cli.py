"""Command-line interface.

Exit codes: 0 success, 2 bad input (parse/validation/cyclic/arity), 3 an
internal invariant of the fusion procedure was breached.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import bench as benchmod
from .bayes import DiscreteBayesNet, query
from .compromise import CompromiseWeights, compare_compromises, posterior_compromise, prior_compromise
from .dag import Dag
from .errors import AlgorithmInvariantError, CycleError, TopofuseError, ValidationError
from .fusion import fuse_dags, fuse_many_traced, replay_trace
from .generate import node_names, random_cpts, random_dag
from .kernels import BACKEND
from .netio import (
    NetDocument,
    fusion_document_dot,
    fusion_dot,
    fusion_to_obj,
    parse_document,
    read_trace,
    to_dot,
    write_net,
    write_trace,
)

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 2, 3


class UsageError(TopofuseError):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load(path: str) -> NetDocument:
    return parse_document(_read(path), source=path)


def _structure(net) -> Dag:
    return net.structure if isinstance(net, DiscreteBayesNet) else net


def _write(path: str | None, text: str, out) -> None:
    if path is None or path == "-":
        out.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _evidence(spec: str | None) -> dict[str, str]:
    if not spec:
        return {}
    out = {}
    for item in spec.split(","):
        var, sep, state = item.partition("=")
        if not sep or not var.strip() or not state.strip():
            raise UsageError(f"evidence must look like VAR=STATE[,VAR=STATE...], got {item!r}")
        out[var.strip()] = state.strip()
    return out


def _weights(spec: str | None, n: int) -> CompromiseWeights:
    if not spec:
        return CompromiseWeights.equal(n)
    try:
        ws = [float(x) for x in spec.split(",")]
    except ValueError:
        raise UsageError(f"weights must be comma-separated numbers, got {spec!r}") from None
    return CompromiseWeights.coerce(ws, n)


def _bayes_nets(docs: list[NetDocument]) -> list[DiscreteBayesNet]:
    for d in docs:
        if not isinstance(d.net, DiscreteBayesNet):
            raise ValidationError(f"net {d.name!r} has no CPTs")
    return [d.net for d in docs]


def _fmt(p: float) -> str:
    return f"{p:.6f}"


# -- commands -----------------------------------------------------------------


def cmd_fuse(args, out) -> int:
    if len(args.inputs) < 2:
        raise UsageError("fuse needs at least two input nets")
    docs = [_load(p) for p in args.inputs]
    names = [d.name for d in docs]
    fold = fuse_many_traced([_structure(d.net) for d in docs], checked=args.checked)
    doc = fusion_to_obj(names, fold)
    _write(args.out, json.dumps(doc, indent=2) + "\n", out)
    if args.trace:
        _write(args.trace, write_trace(names, fold), out)
    if args.dot:
        _write(args.dot, fusion_dot(names, fold.fused, fold.transformed), out)
    if args.out:
        f = fold.fused
        print(f"fused {len(names)} nets: {len(f.nodes)} nodes, {len(f.arcs)} arcs", file=out)
        for i, t in enumerate(fold.traces[1:], start=2):
            print(f"pass {i - 1} ({names[i - 1]}): k_rev={t.k_rev} k_eq={t.k_eq}", file=out)
    return EXIT_OK


def _report_lines(rep, names, mode: str) -> list[str]:
    ev = ",".join(f"{k}={v}" for k, v in sorted(rep.evidence.items())) or "(none)"
    lines = [f"query: {rep.target}", f"evidence: {ev}",
             "weights: " + ", ".join(_fmt(w) for w in rep.weights)]
    cols = []
    if mode in ("prior", "both"):
        cols.append(("prior", rep.prior))
    if mode in ("posterior", "both"):
        cols.append(("posterior", rep.posterior))
        for name, post in zip(names, rep.individual):
            cols.append((name, post))
    width = max([len("state")] + [len(s) for s in rep.states])
    cw = max([10] + [len(c[0]) for c in cols])
    lines.append("  ".join(["state".ljust(width)] + [c[0].ljust(cw) for c in cols]).rstrip())
    for s in rep.states:
        cells = [(_fmt(c[1][s]) if c[1] is not None else "n/a").ljust(cw) for c in cols]
        lines.append("  ".join([s.ljust(width)] + cells).rstrip())
    if mode in ("posterior", "both"):
        dropped = ", ".join(names[i] for i in rep.dropped) or "none"
        lines.append(f"dropped (impossible evidence): {dropped}")
    return lines


def cmd_compromise(args, out) -> int:
    docs = [_load(p) for p in args.inputs]
    nets = _bayes_nets(docs)
    names = [d.name for d in docs]
    weights = _weights(args.weights, len(nets))
    evidence = _evidence(args.evidence)
    if args.mode == "both":
        rep = compare_compromises(nets, weights, args.query, evidence)
    else:
        from .compromise import CompromiseReport

        prior = post = None
        if args.mode == "prior":
            consensus = prior_compromise(nets, weights)
            prior = query(consensus, args.query, evidence)
            states, individual, dropped = consensus.domains[args.query], [], []
        else:
            pc = posterior_compromise(nets, weights, args.query, evidence)
            post, individual, dropped = pc.probs, pc.individual, pc.dropped
            states = tuple(pc.probs)
        rep = CompromiseReport(args.query, evidence, tuple(states), weights.normalized(),
                               prior, post, individual, dropped)
    out.write("\n".join(_report_lines(rep, names, args.mode)) + "\n")
    return EXIT_OK


def cmd_infer(args, out) -> int:
    doc = _load(args.input)
    (net,) = _bayes_nets([doc])
    post = query(net, args.query, _evidence(args.evidence))
    for s, p in post.items():
        print(f"{s}\t{_fmt(p)}", file=out)
    return EXIT_OK


def cmd_gen_random(args, out) -> int:
    if args.nodes < 1:
        raise UsageError("--nodes must be at least 1")
    if not 0.0 <= args.density <= 1.0:
        raise UsageError("--density must lie in [0, 1]")
    rng = random.Random(args.seed)
    names = node_names(args.nodes)
    count = 2 if args.pair else 1
    texts = []
    for k in range(count):
        dag = random_dag(names, args.density, rng)
        net = random_cpts(dag, rng) if args.cpts else dag
        label = f"random_s{args.seed}" + (f"_{k + 1}" if args.pair else "")
        texts.append((label, write_net(net, label)))
    if args.out_dir:
        d = Path(args.out_dir)
        d.mkdir(parents=True, exist_ok=True)
        for label, text in texts:
            (d / f"{label}.json").write_text(text, encoding="utf-8")
            print(d / f"{label}.json", file=out)
    else:
        if args.pair:
            raise UsageError("--pair needs --out-dir")
        out.write(texts[0][1])
    return EXIT_OK


def cmd_bench(args, out) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",")]
    except ValueError:
        raise UsageError(f"--sizes must be comma-separated integers, got {args.sizes!r}") from None
    if any(s < 1 for s in sizes) or args.trials < 1:
        raise UsageError("sizes and trials must be positive")
    ok = True
    print(f"fusion scaling (density={args.density}, seed={args.seed})", file=out)
    print("size  trials  mean_ms  k_rev_mean  k_rev_max  k_eq_mean  k_eq_max  bound  ok", file=out)
    for r in benchmod.fusion_scaling(sizes, args.trials, args.density, args.seed):
        ok &= r.ok
        print(f"{r.size:4d}  {r.trials:6d}  {r.mean_ms:7.2f}  {r.k_rev_mean:10.1f}  {r.k_rev_max:9d}  "
              f"{r.k_eq_mean:9.1f}  {r.k_eq_max:8d}  {r.bound:5d}  {'yes' if r.ok else 'NO'}", file=out)
    if args.worst_case:
        secs, krev, keq, wok = benchmod.worst_case(args.worst_case)
        ok &= wok
        print(f"worst case (complete vs reversed complete, n={args.worst_case}): "
              f"{secs:.3f} s, k_rev={krev}, k_eq={keq}, bounds {'hold' if wok else 'VIOLATED'}", file=out)
    if args.kernels:
        print(f"kernel backends (default: {BACKEND})", file=out)
        rows = benchmod.kernel_comparison()
        base = {r.kernel: r.mean_ms for r in rows if r.backend == "python"}
        for r in rows:
            speed = base[r.kernel] / r.mean_ms if r.mean_ms else float("inf")
            print(f"{r.kernel:20s} {r.workload:26s} {r.backend:7s} {r.mean_ms:10.2f} ms  "
                  f"x{speed:6.1f}  identical={r.identical}", file=out)
            ok &= r.identical
    if not ok:
        print("error: iteration bounds violated or kernel outputs differ", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_export_dot(args, out) -> int:
    text = _read(args.input)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        obj = None
    if isinstance(obj, dict) and obj.get("kind") == "fusion":
        dot = fusion_document_dot(obj)
    else:
        doc = parse_document(text, source=args.input)
        dot = to_dot(_structure(doc.net), doc.name)
    _write(args.out, dot, out)
    return EXIT_OK


def cmd_validate(args, out) -> int:
    docs = [_load(p) for p in args.inputs]
    for p, d in zip(args.inputs, docs):
        kind = "bayes net" if isinstance(d.net, DiscreteBayesNet) else "structure"
        s = _structure(d.net)
        print(f"{p}: ok ({kind} {d.name!r}, {len(s.nodes)} nodes, {len(s.arcs)} arcs)", file=out)
    if args.trace:
        if len(docs) < 2:
            raise UsageError("trace replay needs the fused input nets, in order")
        _names, traces = read_trace(_read(args.trace))
        if len(traces) != len(docs) - 1:
            raise ValidationError(f"trace has {len(traces)} passes, expected {len(docs) - 1}")
        fused = _structure(docs[0].net)
        for i, (doc, trace) in enumerate(zip(docs[1:], traces), start=1):
            second = _structure(doc.net)
            replayed, transformed = replay_trace(fused, second, trace)
            fresh = fuse_dags(fused, second)
            if replayed != fresh.fused or transformed != fresh.transformed_second:
                raise ValidationError(f"pass {i}: replayed trace does not reproduce the fusion")
            fused = replayed
        print(f"{args.trace}: replay ok ({len(traces)} passes)", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="topofuse", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("fuse", help="fuse net structures in the given order")
    s.add_argument("inputs", nargs="+")
    s.add_argument("--out", help="fusion document (JSON); stdout if omitted")
    s.add_argument("--trace", help="write the event log (JSON lines)")
    s.add_argument("--dot", help="write the fused graph as DOT")
    s.add_argument("--checked", action="store_true", help="re-verify invariants after every step")
    s.set_defaults(func=cmd_fuse)

    s = sub.add_parser("compromise", help="prior and/or posterior compromise")
    s.add_argument("inputs", nargs="+")
    s.add_argument("--mode", choices=["prior", "posterior", "both"], default="both")
    s.add_argument("--query", required=True)
    s.add_argument("--evidence")
    s.add_argument("--weights")
    s.set_defaults(func=cmd_compromise)

    s = sub.add_parser("infer", help="posterior in a single net")
    s.add_argument("input")
    s.add_argument("--query", required=True)
    s.add_argument("--evidence")
    s.set_defaults(func=cmd_infer)

    s = sub.add_parser("gen-random", help="seeded random DAG (or binary net) documents")
    s.add_argument("--nodes", type=int, required=True)
    s.add_argument("--density", type=float, default=0.3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--pair", action="store_true", help="emit two nets over the same nodes")
    s.add_argument("--cpts", action="store_true", help="attach random binary CPTs")
    s.add_argument("--out-dir")
    s.set_defaults(func=cmd_gen_random)

    s = sub.add_parser("bench", help="fusion scaling, iteration bounds and kernel timings")
    s.add_argument("--sizes", default="10,20,40")
    s.add_argument("--trials", type=int, default=5)
    s.add_argument("--density", type=float, default=0.5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--worst-case", type=int, default=0, metavar="N",
                   help="also fuse a complete DAG on N nodes with its reverse")
    s.add_argument("--kernels", action="store_true", help="compare compiled and pure-Python kernels")
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("export-dot", help="DOT for a net or fusion document")
    s.add_argument("input")
    s.add_argument("--out")
    s.set_defaults(func=cmd_export_dot)

    s = sub.add_parser("validate", help="check documents; optionally replay a trace")
    s.add_argument("inputs", nargs="+")
    s.add_argument("--trace")
    s.set_defaults(func=cmd_validate)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except AlgorithmInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except CycleError as exc:
        print(f"error: input is not acyclic: {' -> '.join(exc.cycle)}", file=sys.stderr)
        return EXIT_INPUT
    except TopofuseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
