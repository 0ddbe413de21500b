"""Command-line interface.

Exit codes: 0 success, 1 validation failure, 2 parse error, 3 precondition
error (including the GRAINNET_MAX_STATES cap).
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence, TextIO

from . import io as gio
from .dot import export_dot
from .errors import DiagnosticError, ParseError, PreconditionError, StructuralError
from .groupoid import is_fibration
from .net import Marking, SitosNet
from .process import FiringBinding, canonical_code, enabled_firings, enumerate_B_processes, process_of_sequence
from .segal import build_truncation, check_rezk, check_segal, check_simplicial_identities, hom_C
from .species import is_flat, net_isomorphism, net_of_species, species_of_net
from .unfolding import colimit_unfold, event_structure, iso_over_net_and_B, unfold

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_PRECONDITION = 0, 1, 2, 3


class _Result:
    """Collects output in one of the three formats."""

    def __init__(self, fmt: str, out: TextIO):
        self.fmt = fmt
        self.out = out

    def emit(self, data: dict, text: Sequence[str], dot: str | None = None) -> None:
        if self.fmt == "json":
            self.out.write(json.dumps(data, indent=2, ensure_ascii=False) + "\n")
        elif self.fmt == "dot":
            if dot is None:
                raise PreconditionError("this command has no DOT output")
            self.out.write(dot)
        else:
            for line in text:
                self.out.write(line + "\n")


def _marking_text(m: Marking) -> str:
    return "{" + ", ".join(f"{m.token_name(k)}@{m.net.place_name(m.place(k))}" for k in range(m.size)) + "}"


def parse_binding(net: SitosNet, m: Marking, spec: str) -> FiringBinding:
    """Read 't1:i1=m1,i2=m2' into a binding on the current marking."""
    if ":" not in spec:
        raise ParseError(f"binding {spec!r}: expected transition:arc=token,...")
    tname, _, rest = spec.partition(":")
    try:
        t = net.T.index(tname)
    except (ValueError, KeyError):
        raise PreconditionError(f"binding {spec!r}: unknown transition {tname!r}") from None
    pairs = {}
    for part in filter(None, rest.split(",")):
        if "=" not in part:
            raise ParseError(f"binding {spec!r}: expected arc=token in {part!r}")
        arc, _, tok = part.partition("=")
        pairs[arc.strip()] = tok.strip()
    names = {m.token_name(k): k for k in range(m.size)}
    pre = net.preset(t)
    if sorted(pairs) != sorted(net.I.label(i) for i in pre):
        raise PreconditionError(f"binding {spec!r}: must name every input arc of {tname} exactly once")
    tokens = []
    for i in pre:
        tok = pairs[net.I.label(i)]
        if tok not in names:
            raise PreconditionError(f"binding {spec!r}: token {tok!r} is not in the marking")
        tokens.append(names[tok])
    return FiringBinding(t, tuple(tokens))


def _load_pair(args) -> tuple[SitosNet, Marking]:
    net = gio.load_net(args.net)
    return net, gio.load_marking(args.marking, net)


def cmd_check(args, res: _Result) -> int:
    net = gio.load_net(args.net)
    S, I, T, O = net.sizes
    data = {"places": S, "in_arcs": I, "transitions": T, "out_arcs": O,
            "grounded": net.grounded, "graph": net.is_graph()}
    res.emit(data, [f"places={S} in_arcs={I} transitions={T} out_arcs={O}",
                    f"grounded={str(net.grounded).lower()} graph={str(net.is_graph()).lower()}"], export_dot(net))
    return EXIT_OK


def cmd_fire(args, res: _Result) -> int:
    net, m = _load_pair(args)
    if args.apply:
        seq = []
        cur = m
        for spec in args.apply:
            b = parse_binding(net, cur, spec)
            seq.append(b)
            cur = process_of_sequence(net, m, seq).markings[-1]
        sched = process_of_sequence(net, m, seq)
        new = sched.markings[-1]
        data = {"marking": json.loads(gio.serialize_marking(new)),
                "process": json.loads(gio.serialize_process(sched.process))}
        res.emit(data, [f"marking {_marking_text(new)}",
                        f"process nodes={sched.process.n_nodes} edges={sched.process.n_edges}"],
                 export_dot(sched.process))
        return EXIT_OK
    bindings = enabled_firings(net, m)
    data = {"enabled": [b.describe(net, m) for b in bindings]}
    res.emit(data, [f"{k}: {b.describe(net, m)}" for k, b in enumerate(bindings)] or ["(nothing enabled)"])
    return EXIT_OK


def cmd_step(args, res: _Result, stdin: TextIO) -> int:
    """Interactive token game: pick a binding by index, 'u' undoes, 'q' quits."""
    net, m0 = _load_pair(args)
    out = res.out
    seq: list[FiringBinding] = []
    while True:
        sched = process_of_sequence(net, m0, seq)
        cur = sched.markings[-1]
        bindings = enabled_firings(net, cur)
        out.write(f"marking {_marking_text(cur)}\n")
        out.write(f"process nodes={sched.process.n_nodes} edges={sched.process.n_edges}\n")
        for k, b in enumerate(bindings):
            out.write(f"  {k}: {b.describe(net, cur)}\n")
        out.write("choice (index, u=undo, q=quit)> ")
        out.flush()
        line = stdin.readline()
        choice = line.strip()
        if not line or choice == "q":
            out.write("\n")
            out.write(gio.serialize_process(sched.process).decode("utf-8"))
            return EXIT_OK
        if choice == "u":
            if seq:
                seq.pop()
            continue
        try:
            b = bindings[int(choice)]
        except (ValueError, IndexError):
            out.write(f"no binding {choice!r}\n")
            continue
        seq.append(b)


def cmd_enumerate(args, res: _Result) -> int:
    net, m = _load_pair(args)
    en = enumerate_B_processes(net, m, args.max_nodes)
    rows = [{"code": c.short(), "nodes": p.n_nodes, "edges": p.n_edges} for p, c in zip(en.processes, en.codes)]
    res.emit({"count": len(rows), "saturated": en.saturated, "processes": rows},
             [f"{len(rows)} B-processes (saturated={str(en.saturated).lower()})"] +
             [f"{r['code']} nodes={r['nodes']} edges={r['edges']}" for r in rows])
    return EXIT_OK


def cmd_unfold(args, res: _Result) -> int:
    net, m = _load_pair(args)
    u = unfold(net, m, args.depth)
    S, I, T, O = u.sizes
    data = {"events": T, "conditions": S, "in_arcs": I, "out_arcs": O, "saturated": u.saturated}
    text = [f"events={T} conditions={S} in_arcs={I} out_arcs={O} saturated={str(u.saturated).lower()}"]
    status = EXIT_OK
    if args.oracle:
        agree = iso_over_net_and_B(u, colimit_unfold(net, m, args.depth)) is not None
        data["oracle"] = agree
        text.append(f"oracle={'agree' if agree else 'DISAGREE'}")
        status = EXIT_OK if agree else EXIT_INVALID
    res.emit(data, text, export_dot(u))
    return status


def cmd_events(args, res: _Result) -> int:
    net, m = _load_pair(args)
    u = unfold(net, m, args.depth)
    es = event_structure(u)
    names = [u.event_name(x) for x in range(es.n)]
    causes = [[names[x], names[y]] for x in range(es.n) for y in range(es.n) if x != y and es.leq[x][y]]
    conflicts = [[names[x], names[y]] for x in range(es.n) for y in range(x + 1, es.n) if es.conflict[x][y]]
    res.emit({"events": names, "causality": causes, "conflict": conflicts},
             [f"events: {' '.join(names)}"] + [f"{a} <= {b}" for a, b in causes] + [f"{a} # {b}" for a, b in conflicts])
    return EXIT_OK


def cmd_homs(args, res: _Result) -> int:
    net = gio.load_net(args.net)
    m1 = gio.load_marking(args.m1, net)
    m2 = gio.load_marking(args.m2, net)
    codes = hom_C(net, m1, m2, args.max_nodes)
    res.emit({"count": len(codes), "classes": [c.short() for c in codes]},
             [f"{len(codes)} classes"] + [c.short() for c in codes])
    return EXIT_OK


def cmd_species(args, res: _Result) -> int:
    net = gio.load_net(args.net)
    sp = species_of_net(net)
    flat = is_flat(sp)
    arities = {f"{m},{n}": v.size for (m, n), v in sorted(sp.values.items())}
    data = {"colours": sp.colours.size, "operations": arities, "flat": flat.ok}
    text = [f"colours={sp.colours.size} flat={str(flat.ok).lower()}"] + [f"({k}): {v}" for k, v in arities.items()]
    status = EXIT_OK
    if args.roundtrip:
        ok = net_isomorphism(net_of_species(sp), net) is not None
        data["roundtrip"] = ok
        text.append(f"roundtrip={'iso' if ok else 'FAILED'}")
        status = EXIT_OK if ok else EXIT_INVALID
    res.emit(data, text)
    return status


def cmd_segal(args, res: _Result) -> int:
    net = gio.load_net(args.net)
    tr = build_truncation(net, 2, args.max_nodes, args.max_tokens)
    checks = {
        "simplicial_identities": bool(check_simplicial_identities(tr)),
        "segal": bool(check_segal(tr)),
        "d0_fibration": bool(is_fibration(tr.d(1, 0))),
        "rezk": bool(check_rezk(tr)),
    }
    sizes = [len(X.objects) for X in tr.levels]
    res.emit({"objects": sizes, **checks},
             [f"objects X0={sizes[0]} X1={sizes[1]} X2={sizes[2]}"] +
             [f"{k}={'pass' if v else 'FAIL'}" for k, v in checks.items()])
    return EXIT_OK if all(checks.values()) else EXIT_INVALID


def cmd_dot(args, res: _Result) -> int:
    res.out.write(export_dot(gio.load_any(args.file)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grainnet", description="Individual-token Petri net processes and unfoldings.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, *positional):
        p = sub.add_parser(name, help=help_text)
        for arg in positional:
            p.add_argument(arg)
        p.add_argument("--format", choices=["text", "json", "dot"], default="text")
        return p

    add("check", "validate a net and report its flags", "net")
    p = add("fire", "list or apply firings", "net", "marking")
    p.add_argument("--list", action="store_true", help="list enabled bindings (default)")
    p.add_argument("--apply", action="append", metavar="t:arc=token,...", help="fire a binding; repeatable")
    add("step", "interactive token game", "net", "marking")
    p = add("enumerate", "B-processes up to isomorphism", "net", "marking")
    p.add_argument("--max-nodes", type=int, required=True)
    p = add("unfold", "universal unfolding to a depth", "net", "marking")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--oracle", action="store_true", help="cross-check against the colimit of B-processes")
    p = add("events", "event structure of the unfolding", "net", "marking")
    p.add_argument("--depth", type=int, required=True)
    p = add("homs", "boundary-numbered process classes between two markings", "net", "m1", "m2")
    p.add_argument("--max-nodes", type=int, required=True)
    p = add("species", "digraphical species of a net", "net")
    p.add_argument("--roundtrip", action="store_true")
    p = add("segal", "Segal and Rezk checks on a finite window", "net")
    p.add_argument("--max-nodes", type=int, required=True)
    p.add_argument("--max-tokens", type=int, required=True)
    add("dot", "export a net, marking or process file to DOT", "file")
    return parser


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None,
         stdin: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    stdin = stdin or sys.stdin
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    res = _Result(args.format, stdout)
    handlers = {"check": cmd_check, "fire": cmd_fire, "enumerate": cmd_enumerate, "unfold": cmd_unfold,
                "events": cmd_events, "homs": cmd_homs, "species": cmd_species, "segal": cmd_segal, "dot": cmd_dot}
    try:
        if args.command == "step":
            return cmd_step(args, res, stdin)
        return handlers[args.command](args, res)
    except ParseError as exc:
        stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except PreconditionError as exc:
        stderr.write(f"precondition failed: {exc}\n")
        return EXIT_PRECONDITION
    except (StructuralError, DiagnosticError) as exc:
        stderr.write(f"invalid: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
