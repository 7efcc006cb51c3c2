"""Command-line interface.

A thin adapter over the library: graphs are read from a simple text format
(``v: vertex`` and ``e: u -> v`` lines, declaration order preserved), all
structured artifacts (K-theory maps, synthesized homomorphisms, unitaries,
transcripts) are exchanged as JSON.

Exit codes: 0 success, 1 negative decision, 2 contract violation (bad
input, non-synthesizable data, K-theory mismatch), 3 graph outside the
classified class, 4 search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Dict, List, Optional

from .grading import FGAbelianGroup, Subgroup, GroupRingElem
from .gralg import (BaseStarField, GradedMatrix, GradedStarField,
                    MatricialAlgebra, MatricialElement, StarAlgebraMap,
                    verify_graded_star_hom)
from .k0gr import KHomMatrix, k0_module, unit_class
from .fullsynth import (GradedHomSpec, SynthesisError, k0_of_hom, synthesize)
from .faithful import FaithfulnessError, unitary_completion, verify_conjugation
from .ultra import (BudgetExhausted, KHomInconsistent, StageBudget,
                    CHAIN_PRESETS, elliott_intertwine, unit_khom_data,
                    verify_transcript)
from .lpa import (Graph, NotInClass, classify_graph, decide_graded_iso,
                  lpa_invariant, structure_decomposition)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_CONTRACT = 2
EXIT_OUT_OF_CLASS = 3
EXIT_BUDGET = 4


class CliError(Exception):
    pass


class ParseError(CliError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DanglingEndpoint(CliError):
    pass


# ---------------------------------------------------------------------------
# graph text format
# ---------------------------------------------------------------------------

def parse_graph_file(text: str) -> Graph:
    vertices: List[str] = []
    edges: List[tuple] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError(line_no, f"expected 'name: ...', got {raw!r}")
        name, rest = (part.strip() for part in line.split(":", 1))
        if not name:
            raise ParseError(line_no, "empty name")
        if rest == "vertex":
            vertices.append(name)
        elif "->" in rest:
            src, _, rng = (part.strip() for part in rest.partition("->"))
            if not src or not rng:
                raise ParseError(line_no, f"malformed edge {raw!r}")
            edges.append((name, src, rng))
        else:
            raise ParseError(line_no,
                             f"expected 'vertex' or 'u -> v', got {raw!r}")
    declared = set(vertices)
    for name, src, rng in edges:
        for v in (src, rng):
            if v not in declared:
                raise DanglingEndpoint(
                    f"edge {name} refers to undeclared vertex {v!r}")
    try:
        return Graph(tuple(vertices), tuple(edges))
    except ValueError as exc:
        raise CliError(str(exc))


def render_graph(g: Graph) -> str:
    lines = [f"{v}: vertex" for v in g.vertices]
    lines += [f"{name}: {src} -> {rng}" for name, src, rng in g.edges]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON (de)serialization
# ---------------------------------------------------------------------------

def field_to_json(field: GradedStarField) -> dict:
    base = field.base
    return {
        "base": "Q" if base.tag == "Q" else
                "Qi" if base.tag == "Qi" else ["Fp", base.p],
        "grading": {"free_rank": field.grading.free_rank,
                    "torsion": list(field.grading.torsion_moduli)},
        "support": [list(gen) for gen in field.support.generators],
    }


def field_from_json(data: dict) -> GradedStarField:
    base_spec = data["base"]
    if base_spec == "Q":
        base = BaseStarField("Q")
    elif base_spec == "Qi":
        base = BaseStarField("Qi")
    elif isinstance(base_spec, (list, tuple)) and base_spec[0] == "Fp":
        base = BaseStarField("Fp", int(base_spec[1]))
    else:
        raise CliError(f"unknown base field {base_spec!r}")
    g = FGAbelianGroup(int(data["grading"]["free_rank"]),
                       [int(m) for m in data["grading"].get("torsion", [])])
    support = Subgroup(g, [tuple(int(c) for c in gen)
                           for gen in data.get("support", [])])
    return GradedStarField(base, g, support)


def algebra_to_json(alg: MatricialAlgebra) -> dict:
    return {
        "field": field_to_json(alg.field),
        "blocks": [{"size": alg.block_size(i),
                    "shifts": [list(s) for s in alg.block_shifts(i)]}
                   for i in range(alg.nblocks)],
    }


def algebra_from_json(data: dict) -> MatricialAlgebra:
    field = field_from_json(data["field"])
    blocks = [(int(b["size"]), [tuple(int(c) for c in s)
                                for s in b["shifts"]])
              for b in data["blocks"]]
    return MatricialAlgebra(field, blocks)


def grelem_to_json(e: GroupRingElem) -> list:
    return [[list(rep), coeff] for rep, coeff in e.sorted_terms()]


def grelem_from_json(sub: Subgroup, data) -> GroupRingElem:
    terms: Dict[tuple, int] = {}
    for rep, coeff in data:
        key = sub.reduce(tuple(int(c) for c in rep))
        terms[key] = terms.get(key, 0) + int(coeff)
    return GroupRingElem(sub, terms)


def khom_to_json(f: KHomMatrix) -> dict:
    return {
        "source": algebra_to_json(f.source.algebra),
        "target": algebra_to_json(f.target.algebra),
        "matrix": [[grelem_to_json(f.entries[j][i])
                    for i in range(f.source.rank)]
                   for j in range(f.target.rank)],
    }


def khom_from_json(data: dict) -> KHomMatrix:
    source = k0_module(algebra_from_json(data["source"]))
    target = k0_module(algebra_from_json(data["target"]))
    sub = target.coset_space
    rows = [[grelem_from_json(sub, cell) for cell in row]
            for row in data["matrix"]]
    return KHomMatrix(source, target, rows)


def element_to_json(x: MatricialElement) -> list:
    base = x.algebra.field.base
    out = []
    for degree in sorted(x.parts):
        for block in sorted(x.parts[degree]):
            m = x.parts[degree][block]
            out.append({
                "degree": list(degree),
                "block": block,
                "entries": [[r, c, base.to_str(v)]
                            for (r, c), v in sorted(m.entries.items())],
            })
    return out


def element_from_json(alg: MatricialAlgebra, data) -> MatricialElement:
    field = alg.field
    base = field.base
    parts: Dict[tuple, Dict[int, GradedMatrix]] = {}
    for item in data:
        degree = field.grading.reduce(tuple(int(c) for c in item["degree"]))
        block = int(item["block"])
        shifts = alg.block_shifts(block)
        entries = {(int(r), int(c)): base.from_str(v)
                   for r, c, v in item["entries"]}
        parts.setdefault(degree, {})[block] = GradedMatrix(
            field, shifts, shifts, degree, entries)
    return MatricialElement(alg, parts)


def homspec_to_json(spec: GradedHomSpec) -> dict:
    return {
        "khom": khom_to_json(k0_of_hom(spec)),
        "plans": [{
            "sigma": list(plan.sigma),
            "slot_shifts": [list(s) for s in plan.slot_shifts],
            "eps": [list(e) for e in plan.eps],
            "groups": [{"i": grp.i, "t": grp.t, "alpha": list(grp.alpha),
                        "copies": grp.copies, "base": grp.base}
                       for grp in plan.groups],
        } for plan in spec.plans],
        "unital": spec.is_unital(),
    }


def hom_from_json(data: dict) -> StarAlgebraMap:
    """A homomorphism given by its K-theory map plus an optional inner
    twist by a degree-0 unitary of the target."""
    f = khom_from_json(data["khom"])
    phi = synthesize(f).as_map()
    twist = data.get("twist")
    if twist:
        u = element_from_json(phi.target, twist)
        phi = phi.conjugate(u)
    return phi


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _render_text(value, indent: int = 0) -> List[str]:
    pad = "  " * indent
    if isinstance(value, dict):
        lines = []
        for key in value:
            sub = value[key]
            if isinstance(sub, (dict, list)) and sub:
                lines.append(f"{pad}{key}:")
                lines.extend(_render_text(sub, indent + 1))
            else:
                lines.append(f"{pad}{key}: {json.dumps(sub)}")
        return lines
    if isinstance(value, list):
        lines = []
        for item in value:
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{pad}-")
                lines.extend(_render_text(item, indent + 1))
            else:
                lines.append(f"{pad}- {json.dumps(item)}")
        return lines
    return [f"{pad}{json.dumps(value)}"]


def emit(payload, fmt: str, out=None) -> None:
    stream = out if out is not None else sys.stdout
    if fmt == "json":
        stream.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    else:
        stream.write("\n".join(_render_text(payload)) + "\n")


def _write_json(path: str, payload) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _read_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _read_graph(path: str) -> Graph:
    with open(path) as fh:
        return parse_graph_file(fh.read())


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------

def cmd_check(args) -> int:
    g = _read_graph(args.graph)
    rep = classify_graph(g)
    payload = {
        "vertices": list(g.vertices),
        "edges": [list(e) for e in g.edges],
        "sinks": list(rep.sinks),
        "regular": list(rep.regular),
        "cycles": [{"base": base, "edges": list(names)}
                   for base, names in rep.cycles],
        "no_exit": rep.no_exit,
        "in_class": rep.in_class,
    }
    emit(payload, args.format)
    return EXIT_OK if rep.in_class else EXIT_OUT_OF_CLASS


def cmd_decompose(args) -> int:
    g = _read_graph(args.graph)
    sd = structure_decomposition(g)
    payload = {
        "sinks": [{"sink": c.sink,
                   "paths": [list(p) for p in c.paths],
                   "algebra": algebra_to_json(c.algebra)}
                  for c in sd.sinks],
        "cycles": [{"base": c.base, "cycle": list(c.cycle), "n": c.n,
                    "rpaths": [list(p) for p in c.rpaths],
                    "algebra": algebra_to_json(c.algebra)}
                   for c in sd.cycles],
    }
    emit(payload, args.format)
    return EXIT_OK


def cmd_invariant(args) -> int:
    g = _read_graph(args.graph)
    inv = lpa_invariant(g)
    payload = {
        "sinks": [list(lengths) for lengths in inv.sinks],
        "cycles": [{"n": n, "lengths": list(lengths)}
                   for n, lengths in inv.cycles],
    }
    emit(payload, args.format)
    return EXIT_OK


def cmd_decide_iso(args) -> int:
    g1 = _read_graph(args.graph1)
    g2 = _read_graph(args.graph2)
    ok, detail = decide_graded_iso(g1, g2)
    payload = {"isomorphic": ok}
    if ok:
        payload["certificate"] = {
            "sinks": [{"left": i, "right": j, "shift": k}
                      for i, j, k in detail["sinks"]],
            "cycles": [{"left": i, "right": j, "rotation": r}
                       for i, j, r in detail["cycles"]],
        }
    else:
        payload["obstruction"] = detail
    emit(payload, args.format)
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_synth(args) -> int:
    f = khom_from_json(_read_json(args.khom))
    spec = synthesize(f)
    payload = homspec_to_json(spec)
    if args.out:
        _write_json(args.out, payload)
    else:
        emit(payload, args.format)
    return EXIT_OK


def cmd_verify_hom(args) -> int:
    phi = hom_from_json(_read_json(args.hom))
    violations = verify_graded_star_hom(phi, check_unital=args.unital)
    payload = {"valid": not violations, "violations": violations}
    emit(payload, args.format)
    return EXIT_OK if not violations else EXIT_NEGATIVE


def cmd_intertwiner(args) -> int:
    phi = hom_from_json(_read_json(args.phi))
    psi = hom_from_json(_read_json(args.psi))
    u = unitary_completion(phi, psi)
    problems = verify_conjugation(phi, psi, u)
    if problems:
        raise CliError("internal check failed: " + "; ".join(problems))
    payload = {"unitary": element_to_json(u),
               "target": algebra_to_json(phi.target)}
    if args.out:
        _write_json(args.out, payload)
    else:
        emit(payload, args.format)
    return EXIT_OK


def cmd_intertwine_chains(args) -> int:
    try:
        chainR = CHAIN_PRESETS[args.chain_r]()
        chainS = CHAIN_PRESETS[args.chain_s]()
    except KeyError as exc:
        raise CliError(f"unknown chain preset {exc.args[0]!r}; choose from "
                       + ", ".join(sorted(CHAIN_PRESETS)))
    fwd = unit_khom_data(chainR, chainS)
    bwd = unit_khom_data(chainS, chainR)
    budget = StageBudget(args.budget)
    t = elliott_intertwine(chainR, chainS, fwd, bwd,
                           rounds=args.rounds, budget=budget)
    problems = verify_transcript(t, fwd, bwd)
    if problems:
        raise CliError("internal check failed: " + "; ".join(problems))
    payload = {
        "chainR": args.chain_r,
        "chainS": args.chain_s,
        "rounds": args.rounds,
        "n_stages": list(t.n_stages),
        "m_stages": list(t.m_stages),
        "relations_verified": True,
    }
    if args.out:
        _write_json(args.out, payload)
    else:
        emit(payload, args.format)
    return EXIT_OK


def cmd_k0(args) -> int:
    alg = algebra_from_json(_read_json(args.algebra))
    mod = k0_module(alg)
    u = unit_class(mod)
    payload = {
        "rank": mod.rank,
        "coset_space_generators": [list(g) for g in
                                   mod.coset_space.generators],
        "unit_class": [grelem_to_json(c) for c in u.coords],
    }
    emit(payload, args.format)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gradedk",
        description="Exact graded K-theory of matricial *-algebras and "
                    "Leavitt path algebras")
    parser.add_argument("--format", choices=("json", "text"), default="json")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("check", help="classify a graph")
    p.add_argument("graph")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("decompose", help="matricial decomposition of L(E)")
    p.add_argument("graph")
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("invariant", help="graded K-theory invariant of L(E)")
    p.add_argument("graph")
    p.set_defaults(fn=cmd_invariant)

    p = sub.add_parser("decide-iso",
                       help="decide graded *-isomorphism of two L(E)")
    p.add_argument("graph1")
    p.add_argument("graph2")
    p.set_defaults(fn=cmd_decide_iso)

    p = sub.add_parser("synth",
                       help="synthesize a hom from a contractive K0 map")
    p.add_argument("--khom", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("verify-hom", help="verify a graded *-homomorphism")
    p.add_argument("--hom", required=True)
    p.add_argument("--unital", action="store_true")
    p.set_defaults(fn=cmd_verify_hom)

    p = sub.add_parser("intertwiner",
                       help="unitary intertwining two homs with equal K0")
    p.add_argument("--phi", required=True)
    p.add_argument("--psi", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_intertwiner)

    p = sub.add_parser("intertwine-chains",
                       help="Elliott intertwining of two chain presets")
    p.add_argument("--chain-r", required=True)
    p.add_argument("--chain-s", required=True)
    p.add_argument("--rounds", type=int, default=3)
    p.add_argument("--budget", type=int, default=64)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_intertwine_chains)

    p = sub.add_parser("k0", help="graded K0 data of a matricial algebra")
    p.add_argument("--algebra", required=True)
    p.set_defaults(fn=cmd_k0)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except NotInClass as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OUT_OF_CLASS
    except BudgetExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (CliError, SynthesisError, FaithfulnessError, KHomInconsistent,
            OSError, json.JSONDecodeError, KeyError, TypeError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
