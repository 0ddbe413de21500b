"""JSON file formats for nets, markings and processes.

Serialization is canonical (fixed key order, two-space indent, trailing
newline), so parsing a file written here and writing it again gives the
same bytes.
"""
from __future__ import annotations

import json
import os
from typing import Any

from .canon import Shape
from .errors import ParseError, StructuralError
from .net import Marking, SitosNet
from .process import Process


def _load(data) -> Any:
    if isinstance(data, (dict, list)):
        return data
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8: {exc}") from None
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def dumps(obj: Any) -> bytes:
    return (json.dumps(obj, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _field(obj: dict, key: str, where: str, kind=None):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    if key not in obj:
        raise ParseError(f"{where}: missing field {key!r}")
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(f"{where}.{key}: expected {kind.__name__}")
    return value


def _names(values: list, where: str) -> list[str]:
    out = []
    for k, v in enumerate(values):
        if not isinstance(v, str):
            raise ParseError(f"{where}[{k}]: expected a string")
        out.append(v)
    dup = {v for v in out if out.count(v) > 1}
    if dup:
        raise ParseError(f"{where}: duplicate id {sorted(dup)[0]!r}")
    return out


def _lookup(table: dict, name, where: str, what: str) -> int:
    if name not in table:
        raise ParseError(f"{where}: unknown {what} {name!r}")
    return table[name]


# nets

def net_to_obj(net: SitosNet) -> dict:
    return {
        "places": [net.S.label(s) for s in range(net.S.size)],
        "transitions": [net.T.label(t) for t in range(net.T.size)],
        "in_arcs": [{"id": net.I.label(i), "place": net.S.label(net.src_in(i)),
                     "transition": net.T.label(net.tgt_in(i))} for i in range(net.I.size)],
        "out_arcs": [{"id": net.O.label(o), "transition": net.T.label(net.src_out(o)),
                      "place": net.S.label(net.tgt_out(o))} for o in range(net.O.size)],
    }


def net_from_obj(obj) -> SitosNet:
    if not isinstance(obj, dict):
        raise ParseError("net: expected an object")
    places = _names(obj.get("places", []), "places")
    trans = _names(obj.get("transitions", []), "transitions")
    p_idx = {p: k for k, p in enumerate(places)}
    t_idx = {t: k for k, t in enumerate(trans)}
    ins, outs = [], []
    for k, arc in enumerate(obj.get("in_arcs", [])):
        where = f"in_arcs[{k}]"
        aid = _field(arc, "id", where, str)
        where = f"in_arcs[{k}] (id {aid!r})"
        ins.append((aid, _lookup(p_idx, _field(arc, "place", where), where, "place"),
                    _lookup(t_idx, _field(arc, "transition", where), where, "transition")))
    for k, arc in enumerate(obj.get("out_arcs", [])):
        where = f"out_arcs[{k}]"
        aid = _field(arc, "id", where, str)
        where = f"out_arcs[{k}] (id {aid!r})"
        outs.append((aid, _lookup(t_idx, _field(arc, "transition", where), where, "transition"),
                     _lookup(p_idx, _field(arc, "place", where), where, "place")))
    _names([a[0] for a in ins], "in_arcs ids")
    _names([a[0] for a in outs], "out_arcs ids")
    return SitosNet.build(places, trans, [(a, places[p], trans[t]) for a, p, t in ins],
                          [(a, trans[t], places[p]) for a, t, p in outs])


def parse_net_file(data) -> SitosNet:
    return net_from_obj(_load(data))


def serialize_net(net: SitosNet) -> bytes:
    return dumps(net_to_obj(net))


# markings

def marking_to_obj(m: Marking, net_ref: Any = None) -> dict:
    obj: dict = {}
    if net_ref is not None:
        obj["net"] = net_ref
    obj["tokens"] = [{"id": m.token_name(k), "place": m.net.S.label(m.place(k))} for k in range(m.size)]
    return obj


def marking_from_obj(obj, net: SitosNet | None = None, base_dir: str = ".") -> Marking:
    if not isinstance(obj, dict):
        raise ParseError("marking: expected an object")
    if net is None:
        ref = _field(obj, "net", "marking")
        net = load_net(os.path.join(base_dir, ref)) if isinstance(ref, str) else net_from_obj(ref)
    tokens = obj.get("tokens", [])
    if not isinstance(tokens, list):
        raise ParseError("marking.tokens: expected a list")
    p_idx = {net.S.label(s): s for s in range(net.S.size)}
    ids, places = [], []
    for k, tok in enumerate(tokens):
        where = f"tokens[{k}]"
        ids.append(_field(tok, "id", where, str))
        places.append(_lookup(p_idx, _field(tok, "place", where), f"{where} (id {ids[-1]!r})", "place"))
    _names(ids, "tokens ids")
    return Marking.of(net, places, ids)


def parse_marking_file(data, net: SitosNet | None = None, base_dir: str = ".") -> Marking:
    return marking_from_obj(_load(data), net, base_dir)


def serialize_marking(m: Marking, net_ref: Any = None) -> bytes:
    return dumps(marking_to_obj(m, net_ref))


# processes

def process_to_obj(p: Process, net_ref: Any = None) -> dict:
    net, sh = p.net, p.shape
    obj: dict = {}
    if net_ref is not None:
        obj["net"] = net_ref
    obj["edges"] = [{"id": p.edge_name(e), "place": net.S.label(sh.edge_place[e])} for e in range(sh.n_edges)]
    obj["nodes"] = [{"id": p.node_name(x), "transition": net.T.label(sh.node_trans[x])} for x in range(sh.n_nodes)]
    obj["in_arcs"] = [{"id": f"{p.node_name(x)}.{net.I.label(i)}", "edge": p.edge_name(e), "node": p.node_name(x),
                       "net_arc": net.I.label(i)}
                      for x in range(sh.n_nodes) for e, i in zip(sh.node_in[x], net.preset(sh.node_trans[x]))]
    obj["out_arcs"] = [{"id": f"{p.node_name(x)}.{net.O.label(o)}", "node": p.node_name(x), "edge": p.edge_name(e),
                        "net_arc": net.O.label(o)}
                       for x in range(sh.n_nodes) for e, o in zip(sh.node_out[x], net.postset(sh.node_trans[x]))]
    return obj


def process_from_obj(obj, net: SitosNet | None = None, base_dir: str = ".") -> Process:
    if not isinstance(obj, dict):
        raise ParseError("process: expected an object")
    if net is None:
        ref = _field(obj, "net", "process")
        net = load_net(os.path.join(base_dir, ref)) if isinstance(ref, str) else net_from_obj(ref)
    p_idx = {net.S.label(s): s for s in range(net.S.size)}
    t_idx = {net.T.label(t): t for t in range(net.T.size)}
    i_idx = {net.I.label(i): i for i in range(net.I.size)}
    o_idx = {net.O.label(o): o for o in range(net.O.size)}
    edges = obj.get("edges", [])
    nodes = obj.get("nodes", [])
    e_names = _names([_field(e, "id", f"edges[{k}]", str) for k, e in enumerate(edges)], "edges")
    n_names = _names([_field(x, "id", f"nodes[{k}]", str) for k, x in enumerate(nodes)], "nodes")
    e_idx = {n: k for k, n in enumerate(e_names)}
    n_idx = {n: k for k, n in enumerate(n_names)}
    places = tuple(_lookup(p_idx, _field(e, "place", f"edges[{k}]"), f"edges[{k}]", "place") for k, e in enumerate(edges))
    trans = tuple(_lookup(t_idx, _field(x, "transition", f"nodes[{k}]"), f"nodes[{k}]", "transition")
                  for k, x in enumerate(nodes))
    node_in: list[dict] = [{} for _ in nodes]
    node_out: list[dict] = [{} for _ in nodes]
    for side, key, arcs_idx, table in (("in_arcs", "in_arcs", i_idx, node_in), ("out_arcs", "out_arcs", o_idx, node_out)):
        arcs = obj.get(key, [])
        _names([_field(a, "id", f"{side}[{k}]", str) for k, a in enumerate(arcs)], f"{side} ids")
        for k, a in enumerate(arcs):
            where = f"{side}[{k}] (id {a['id']!r})"
            x = _lookup(n_idx, _field(a, "node", where), where, "node")
            e = _lookup(e_idx, _field(a, "edge", where), where, "edge")
            arc = _lookup(arcs_idx, _field(a, "net_arc", where), where, "net arc")
            if arc in table[x]:
                raise ParseError(f"{where}: net arc used twice at node {n_names[x]!r}")
            table[x][arc] = e
    try:
        shape = Shape(places, trans,
                      tuple(tuple(node_in[x].get(i) for i in net.preset(trans[x])) for x in range(len(nodes))),
                      tuple(tuple(node_out[x].get(o) for o in net.postset(trans[x])) for x in range(len(nodes))))
        for x in range(len(nodes)):
            if None in shape.node_in[x] or None in shape.node_out[x] or \
                    len(node_in[x]) != len(net.preset(trans[x])) or len(node_out[x]) != len(net.postset(trans[x])):
                raise ParseError(f"nodes[{x}] (id {n_names[x]!r}): arcs do not match the transition's interface")
        return Process(net, shape, e_names, n_names)
    except StructuralError as exc:
        raise ParseError(f"process: {exc}") from None


def parse_process_file(data, net: SitosNet | None = None, base_dir: str = ".") -> Process:
    return process_from_obj(_load(data), net, base_dir)


def serialize_process(p: Process, net_ref: Any = None) -> bytes:
    return dumps(process_to_obj(p, net_ref))


# files

def _read(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None


def load_net(path: str) -> SitosNet:
    data = _read(path)
    try:
        return parse_net_file(data)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


def load_marking(path: str, net: SitosNet | None = None) -> Marking:
    data = _read(path)
    try:
        return parse_marking_file(data, net, os.path.dirname(path) or ".")
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


def load_process(path: str, net: SitosNet | None = None) -> Process:
    data = _read(path)
    try:
        return parse_process_file(data, net, os.path.dirname(path) or ".")
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None


def load_any(path: str):
    """Read a net, marking or process file, telling them apart by their keys."""
    obj = _load(_read(path))
    base = os.path.dirname(path) or "."
    if isinstance(obj, dict) and "tokens" in obj:
        return marking_from_obj(obj, None, base)
    if isinstance(obj, dict) and "nodes" in obj and "edges" in obj:
        return process_from_obj(obj, None, base)
    return net_from_obj(obj)
