"""JSON net documents, fusion documents, trace files and DOT export.

A net document looks like::

    {
      "name": "author1",
      "nodes": [
        {"name": "A", "states": ["false", "true"],
         "cpt": {"parents": [], "table": [{"given": [], "p": [0.2, 0.8]}]}},
        {"name": "B", "states": ["false", "true"],
         "cpt": {"parents": ["A"],
                 "table": [{"given": ["false"], "p": [0.9, 0.1]},
                           {"given": ["true"], "p": [0.25, 0.75]}]}}
      ],
      "arcs": [["A", "B"]]
    }

``states`` and ``cpt`` are optional; a document without CPTs is a bare
structure and parses to a :class:`~topofuse.dag.Dag`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .bayes import CPT, DiscreteBayesNet
from .dag import Dag
from .errors import ParseError, ValidationError
from .fusion import FoldResult, FusionTrace

Net = Union[Dag, DiscreteBayesNet]
SIG_DIGITS = 12


def _num(x: float) -> float:
    return float(f"{x:.{SIG_DIGITS}g}")


@dataclass
class NetDocument:
    name: str
    net: Net


def _expect(cond: bool, message: str, where: str) -> None:
    if not cond:
        raise ParseError(message, where=where)


def _load_json(text: str, source: str | None):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        where = f"{source + ':' if source else ''}line {exc.lineno} col {exc.colno}"
        raise ParseError(exc.msg, where=where) from None


def document_from_obj(doc, source: str | None = None) -> NetDocument:
    pre = f"{source}:" if source else ""
    _expect(isinstance(doc, dict), "document must be a JSON object", pre + "$")
    name = doc.get("name", "net")
    _expect(isinstance(name, str), "name must be a string", pre + "name")
    nodes = doc.get("nodes")
    _expect(isinstance(nodes, list), "nodes must be a list", pre + "nodes")
    arcs = doc.get("arcs", [])
    _expect(isinstance(arcs, list), "arcs must be a list", pre + "arcs")

    names: list[str] = []
    states: dict[str, list[str]] = {}
    raw_cpts: dict[str, tuple[int, dict]] = {}
    for i, node in enumerate(nodes):
        where = f"{pre}nodes[{i}]"
        _expect(isinstance(node, dict), "node must be an object", where)
        nm = node.get("name")
        _expect(isinstance(nm, str) and nm != "", "node name must be a non-empty string", where + ".name")
        if nm in states or nm in names:
            raise ValidationError(f"duplicate node {nm!r}", where=where)
        names.append(nm)
        if "states" in node:
            st = node["states"]
            _expect(isinstance(st, list) and all(isinstance(s, str) for s in st),
                    "states must be a list of strings", where + ".states")
            states[nm] = st
        if node.get("cpt") is not None:
            _expect(isinstance(node["cpt"], dict), "cpt must be an object", where + ".cpt")
            raw_cpts[nm] = (i, node["cpt"])

    pairs = []
    for k, arc in enumerate(arcs):
        where = f"{pre}arcs[{k}]"
        _expect(isinstance(arc, list) and len(arc) == 2 and all(isinstance(x, str) for x in arc),
                "arc must be a [from, to] pair of node names", where)
        for end in arc:
            if end not in names:
                raise ValidationError(f"arc references undeclared node {end!r}", where=where)
        pairs.append(tuple(arc))
    if len(set(pairs)) != len(pairs):
        raise ValidationError("duplicate arcs", where=pre + "arcs")

    structure = Dag(names, pairs)  # CycleError carries the witness
    if not raw_cpts:
        return NetDocument(name, structure)
    missing = [n for n in names if n not in raw_cpts]
    if missing:
        raise ValidationError(f"some nodes have CPTs but {missing} do not", where=pre + "nodes")

    domains = {n: tuple(states.get(n, ("false", "true"))) for n in names}
    cpts = {}
    for nm, (i, raw) in raw_cpts.items():
        where = f"{pre}nodes[{i}].cpt"
        parents = raw.get("parents", [])
        _expect(isinstance(parents, list) and all(isinstance(p, str) for p in parents),
                "parents must be a list of node names", where + ".parents")
        if set(parents) != structure.predecessors(nm) or len(set(parents)) != len(parents):
            raise ValidationError(
                f"CPT parents {parents} do not match arcs into {nm!r}: {sorted(structure.predecessors(nm))}",
                where=where + ".parents",
            )
        table = raw.get("table")
        _expect(isinstance(table, list), "table must be a list of rows", where + ".table")
        shape = tuple(len(domains[p]) for p in parents) + (len(domains[nm]),)
        values = np.full(shape, np.nan)
        for r, row in enumerate(table):
            rw = f"{where}.table[{r}]"
            _expect(isinstance(row, dict), "row must be an object", rw)
            given, probs = row.get("given", []), row.get("p")
            _expect(isinstance(given, list) and len(given) == len(parents),
                    f"given must list one state per parent ({len(parents)})", rw + ".given")
            _expect(isinstance(probs, list) and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                                                    for x in probs),
                    "p must be a list of numbers", rw + ".p")
            if len(probs) != len(domains[nm]):
                raise ValidationError(f"p has {len(probs)} entries, {nm!r} has {len(domains[nm])} states",
                                      where=rw + ".p")
            try:
                idx = tuple(domains[p].index(s) for p, s in zip(parents, given))
            except ValueError:
                raise ValidationError(f"unknown parent state in {given}", where=rw + ".given") from None
            if not np.isnan(values[idx]).all():
                raise ValidationError(f"duplicate row for {given}", where=rw)
            values[idx] = probs
        if np.isnan(values).any():
            raise ValidationError("table does not cover every parent configuration", where=where + ".table")
        cpts[nm] = CPT(tuple(parents), values)
    return NetDocument(name, DiscreteBayesNet(structure, domains, cpts))


def parse_document(text: str, source: str | None = None) -> NetDocument:
    return document_from_obj(_load_json(text, source), source)


def parse_net(text: str, source: str | None = None) -> Net:
    return parse_document(text, source).net


def net_to_obj(net: Net, name: str = "net") -> dict:
    structure = net.structure if isinstance(net, DiscreteBayesNet) else net
    nodes = []
    for v in structure.sorted_nodes():
        entry: dict = {"name": v}
        if isinstance(net, DiscreteBayesNet):
            entry["states"] = list(net.domains[v])
            cpt = net.cpts[v]
            rows = []
            for idx, col in cpt.columns():
                given = [net.domains[p][k] for p, k in zip(cpt.parents, idx)]
                rows.append({"given": given, "p": [_num(x) for x in col]})
            entry["cpt"] = {"parents": list(cpt.parents), "table": rows}
        nodes.append(entry)
    return {"name": name, "nodes": nodes, "arcs": [list(a) for a in structure.sorted_arcs()]}


def write_net(net: Net, name: str = "net") -> str:
    """Serialize with one node per line; output is byte-stable for equal nets."""
    obj = net_to_obj(net, name)
    nodes = ",\n".join("    " + json.dumps(n) for n in obj["nodes"])
    return (
        "{\n"
        f'  "name": {json.dumps(obj["name"])},\n'
        f'  "nodes": [\n{nodes}\n  ],\n' if nodes else
        "{\n"
        f'  "name": {json.dumps(obj["name"])},\n'
        '  "nodes": [],\n'
    ) + f'  "arcs": {json.dumps(obj["arcs"])}\n}}\n'


def fusion_to_obj(names: Sequence[str], fold: FoldResult) -> dict:
    doc = {
        "kind": "fusion",
        "inputs": list(names),
        "fused": net_to_obj(fold.fused, "fused"),
        "transformed": [net_to_obj(d, f"{n}'") for n, d in zip(names, fold.transformed)],
        "k_rev": [t.k_rev for t in fold.traces[1:]],
        "k_eq": [t.k_eq for t in fold.traces[1:]],
    }
    return doc


def write_trace(names: Sequence[str], fold: FoldResult) -> str:
    lines = [json.dumps({"kind": "inputs", "names": list(names)}, sort_keys=True)]
    for i, trace in enumerate(fold.traces[1:], start=1):
        lines.extend(trace.to_lines(pass_index=i))
    return "\n".join(lines) + "\n"


def read_trace(text: str) -> tuple[list[str], list[FusionTrace]]:
    names: list[str] = []
    by_pass: dict[int, list[str]] = {}
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            d = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, where=f"trace line {n}") from None
        if not isinstance(d, dict) or "kind" not in d:
            raise ParseError("event must be an object with a kind", where=f"trace line {n}")
        if d["kind"] == "inputs":
            names = d["names"]
            continue
        by_pass.setdefault(d.get("pass", 1), []).append(line)
    traces = [FusionTrace.from_lines(by_pass[k]) for k in sorted(by_pass)]
    return names, traces


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(structure: Dag, name: str = "net", arc_attrs: dict | None = None) -> str:
    """Graphviz digraph: one line per node, exactly one edge line per arc."""
    arc_attrs = arc_attrs or {}
    out = [f"digraph {_q(name)} {{"]
    for v in structure.sorted_nodes():
        out.append(f"  {_q(v)};")
    for a in structure.sorted_arcs():
        attrs = arc_attrs.get(a)
        suffix = ""
        if attrs:
            suffix = " [" + ", ".join(f"{k}={_q(str(v))}" for k, v in sorted(attrs.items())) + "]"
        out.append(f"  {_q(a.tail)} -> {_q(a.head)}{suffix};")
    out.append("}")
    return "\n".join(out) + "\n"


def fusion_dot(names: Sequence[str], fused: Dag, transformed: Sequence[Dag]) -> str:
    """DOT for a fused structure, tagging each arc with the inputs that contain it.

    For a two-way fusion each arc also gets ``set`` = S1 (first only),
    S2 (transformed second only) or S3 (both).
    """
    attrs = {}
    for a in fused.arcs:
        owners = [i + 1 for i, d in enumerate(transformed) if a in d.arcs]
        entry = {"sources": ",".join(map(str, owners))}
        if len(transformed) == 2:
            entry["set"] = {(1,): "S1", (2,): "S2", (1, 2): "S3"}[tuple(owners)]
        attrs[a] = entry
    return to_dot(fused, "fused", attrs)


def fusion_document_dot(doc: dict) -> str:
    try:
        fused = document_from_obj(doc["fused"]).net
        transformed = [document_from_obj(d).net for d in doc["transformed"]]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed fusion document: {exc}") from None
    structs = [t.structure if isinstance(t, DiscreteBayesNet) else t for t in transformed]
    fs = fused.structure if isinstance(fused, DiscreteBayesNet) else fused
    return fusion_dot(doc.get("inputs", []), fs, structs)

