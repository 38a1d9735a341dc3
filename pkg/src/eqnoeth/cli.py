"""Command-line entry point.

Every subcommand prints a human-readable text report to stdout, optionally
writes a machine-readable JSON mirror (--json), and always emits exactly
one run manifest (--manifest file, stderr otherwise).  Exit codes: 0 on
success, 1 when a computed table deviates from the predicate it must
reproduce, 2 on input errors or exhausted searches.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import fingrp, gog, matpoly, metabelian, varieties, words, wreath

EXIT_OK = 0
EXIT_FALSIFIED = 1
EXIT_INPUT = 2


@dataclass
class RunManifest:
    """One record per run: what ran, on what, and where results went."""

    subcommand: str
    parameters: Dict[str, object]
    input_digests: Dict[str, str]
    output_paths: List[str]
    duration_seconds: float

    def to_json(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "parameters": self.parameters,
            "input_digests": self.input_digests,
            "output_paths": self.output_paths,
            "duration_seconds": self.duration_seconds,
        }


def _digest(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _load_json(path: str) -> object:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SystemExit2(f"malformed JSON in {path}: line {exc.lineno} column {exc.colno}")
    except OSError as exc:
        raise SystemExit2(f"cannot read {path}: {exc}")


class SystemExit2(Exception):
    """Input error; converted to exit code 2."""


def _load_group(path: str) -> fingrp.FiniteGroup:
    data = _load_json(path)
    try:
        return fingrp.FiniteGroup.from_json(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise SystemExit2(f"bad group file {path}: {exc}")


def _load_system(path: str, n_vars: Optional[int]) -> words.EquationSystem:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    eqs = []
    for ln in lines:
        if not ln or ln.startswith("#"):
            continue
        try:
            eqs.append(words.parse_word(ln, n_vars=None))
        except ValueError as exc:
            raise SystemExit2(f"bad word {ln!r} in {path}: {exc}")
    try:
        return words.system(eqs, n_vars=n_vars)
    except ValueError as exc:
        raise SystemExit2(f"bad system in {path}: {exc}")


def _bool_table_text(table: List[List[bool]], row_label: str, col_label: str) -> str:
    n_rows, n_cols = len(table), len(table[0])
    head = f"{row_label}\\{col_label} " + " ".join(f"{m:>2}" for m in range(n_cols))
    lines = [head]
    for i, row in enumerate(table):
        lines.append(f"{i:>4}   " + " ".join(" 1" if c else " ." for c in row))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (exit_code, text, json_payload)


def _cmd_variety(args) -> Tuple[int, str, dict]:
    G = _load_group(args.group)
    S = _load_system(args.system, args.nvars)
    coeffs = None
    if args.coeffs:
        raw = _load_json(args.coeffs)
        coeffs = {int(k): int(v) for k, v in raw.items()}
    if args.target:
        target = [int(x) for x in _load_json(args.target)]
        V = varieties.quasi_solution_set(S, G, target, coeffs)
    else:
        V = varieties.solution_set(S, G, coeffs)
    tuples = V.sorted_tuples()
    text = "\n".join(json.dumps(list(t)) for t in tuples)
    return EXIT_OK, text, {"n_vars": S.n_vars, "count": len(tuples), "tuples": [list(t) for t in tuples]}


def _cmd_family_min(args) -> Tuple[int, str, dict]:
    groups = [_load_group(p) for p in args.groups]
    S = _load_system(args.system, args.nvars)
    result = varieties.minimal_subsystem(S, groups, shrink=args.shrink)
    lines = [f"subsystem indices: {list(result.indices)}"]
    for cert in result.certificates:
        lines.append(
            f"prefix {cert.prefix_len} rejected: group #{cert.group_index} ({args.groups[cert.group_index]})"
            f" witness {list(cert.witness)} fails equation {cert.failing_equation}"
        )
    payload = {
        "indices": list(result.indices),
        "shrunk": result.shrunk,
        "certificates": [
            {
                "prefix_len": c.prefix_len,
                "group_index": c.group_index,
                "witness": list(c.witness),
                "failing_equation": c.failing_equation,
            }
            for c in result.certificates
        ],
    }
    return EXIT_OK, "\n".join(lines), payload


def _cmd_ut_table(args) -> Tuple[int, str, dict]:
    table = matpoly.g1_witness_table(args.max_rank_exp, args.max_index)
    predicted = matpoly.g1_predicted_table(args.max_rank_exp, args.max_index)
    match = table == predicted
    text = _bool_table_text(table, "n", "m")
    text += "\n" + ("identity table matches the power-of-two criterion" if match else "MISMATCH against the power-of-two criterion")
    payload = {"table": table, "predicate": predicted, "match": match}
    return (EXIT_OK if match else EXIT_FALSIFIED), text, payload


def _cmd_nnsen(args) -> Tuple[int, str, dict]:
    table = matpoly.nnsen_table(args.depth)
    predicted = [[j <= k for k in range(args.depth + 1)] for j in range(args.depth + 1)]
    match = table == predicted
    text = _bool_table_text(table, "j", "k")
    text += "\n" + ("commutation table matches j <= k" if match else "MISMATCH against j <= k")
    return (EXIT_OK if match else EXIT_FALSIFIED), text, {"table": table, "predicate": predicted, "match": match}


def _cmd_bs12(args) -> Tuple[int, str, dict]:
    table = matpoly.bs12_table(args.max, args.max)
    predicted = [[m >= n for m in range(args.max + 1)] for n in range(args.max + 1)]
    match = table == predicted
    text = _bool_table_text(table, "n", "m")
    text += "\n" + ("membership table matches m >= n" if match else "MISMATCH against m >= n")
    return (EXIT_OK if match else EXIT_FALSIFIED), text, {"table": table, "predicate": predicted, "match": match}


def _cmd_poly_translate(args) -> Tuple[int, str, dict]:
    try:
        w = words.parse_word(args.word)
    except ValueError as exc:
        raise SystemExit2(f"bad word: {exc}")
    routed = False
    if not words.is_positive(w):
        w = words.positivize(w)
        routed = True
    mat = matpoly.word_to_polys(w, args.rank)
    hat = matpoly.shat(w, args.rank)
    lines = []
    if routed:
        lines.append(f"word was not inverse-free; positivized to: {words.word_to_text(w)}")
    for i in range(args.rank):
        for j in range(args.rank):
            lines.append(f"s[{i+1},{j+1}] = {mat[i][j].pretty()}")
    for i in range(args.rank):
        for j in range(args.rank):
            lines.append(f"shat[{i+1},{j+1}] = {hat[i][j].pretty()}")
    payload = {
        "word": words.word_to_text(w),
        "positivized": routed,
        "s": [[mat[i][j].pretty() for j in range(args.rank)] for i in range(args.rank)],
        "shat": [[hat[i][j].pretty() for j in range(args.rank)] for i in range(args.rank)],
    }
    return EXIT_OK, "\n".join(lines), payload


def _cmd_metabelian_check(args) -> Tuple[int, str, dict]:
    A = _load_group(args.A)
    P = _load_group(args.P)
    action = _load_json(args.action)
    try:
        G = fingrp.semidirect_product(A, P, action)
    except ValueError as exc:
        raise SystemExit2(f"bad extension data: {exc}")
    S = _load_system(args.words, None)
    import itertools as _it

    lines = []
    results = []
    code = EXIT_OK
    for eq in S.equations:
        word = eq if isinstance(eq, words.Word) else eq.to_word()
        agree = 0
        first_bad = None
        for t in _it.product(range(G.order), repeat=word.n_vars):
            try:
                metabelian.split_solution_check(word, G, t)
                agree += 1
            except RuntimeError:
                first_bad = list(t)
                code = EXIT_FALSIFIED
                break
        text_word = words.word_to_text(word)
        if first_bad is None:
            lines.append(f"{text_word}: {agree} tuples, all agree")
        else:
            lines.append(f"{text_word}: DISAGREEMENT at {first_bad}")
        results.append({"word": text_word, "agreeing_tuples": agree, "first_disagreement": first_bad})
    return code, "\n".join(lines), {"words": results}


def _cmd_wreath_witness(args) -> Tuple[int, str, dict]:
    try:
        witnesses = wreath.non_noetherian_witnesses(args.depth)
    except RuntimeError as exc:
        return EXIT_FALSIFIED, f"witness chain falsified: {exc}", {"error": str(exc)}
    lines = []
    payload = []
    for w in witnesses:
        lines.append(
            f"level {w.level}: spread over the {w.level}-window "
            f"(support size {len(w.witness.support)}) fails equation {w.failing_index}"
        )
        payload.append({"level": w.level, "support_size": len(w.witness.support), "failing_index": w.failing_index})
    return EXIT_OK, "\n".join(lines), {"witnesses": payload}


def _parse_wreath_element(wp: wreath.WreathProduct, raw: str) -> wreath.WreathElement:
    try:
        data = json.loads(raw)
        support = {int(k): int(v) for k, v in data.get("support", {}).items()}
        point = int(data.get("point", 0))
    except (ValueError, AttributeError, TypeError) as exc:
        raise SystemExit2(f"bad wreath element {raw!r}: {exc}")
    for v in support.values():
        if not 0 <= v < wp.g.group.order:
            raise SystemExit2(f"support value {v} outside the value group")
    return wp.element(support, point)


def _cmd_separability_cert(args) -> Tuple[int, str, dict]:
    wp = wreath.c2_wr_z()
    f = _parse_wreath_element(wp, args.element_f)
    h = _parse_wreath_element(wp, args.element_h)
    try:
        cert = wreath.separability_certificate(wp, f, h, max_modulus=args.max_n)
    except ValueError as exc:
        raise SystemExit2(str(exc))
    except wreath.CertificateSearchExhausted as exc:
        raise SystemExit2(str(exc))
    order = wreath.verify_certificate(wp, f, h, cert)
    text = (
        f"certificate: N = {cert.modulus}, B = {list(cert.base_subgroup)}\n"
        f"verified: image of h avoids all {order} powers of the image of f in (C2/B) wr C{cert.modulus}"
    )
    payload = {
        "modulus": cert.modulus,
        "base_subgroup": list(cert.base_subgroup),
        "cyclic_subgroup_order": order,
    }
    return EXIT_OK, text, payload


def _resolve_groupref(base_dir: Path, cache: Dict[str, fingrp.FiniteGroup]):
    def resolve(ref) -> fingrp.FiniteGroup:
        if isinstance(ref, str):
            if ref not in cache:
                cache[ref] = _load_group(str(base_dir / ref))
            return cache[ref]
        return fingrp.FiniteGroup.from_json(ref)

    return resolve


def _cmd_gog_check(args) -> Tuple[int, str, dict]:
    data = _load_json(args.graph)
    try:
        graph = gog.graph_from_json(data, _resolve_groupref(Path(args.graph).parent, {}))
    except ValueError as exc:
        raise SystemExit2(f"bad graph file: {exc}")
    lines: List[str] = []
    payload: Dict[str, object] = {}
    word = None
    if args.word:
        text = next((ln.strip() for ln in Path(args.word).read_text().splitlines() if ln.strip()), "")
        try:
            word = gog.parse_gog_word(graph, text)
        except ValueError as exc:
            raise SystemExit2(f"bad word: {exc}")
        reduced = gog.britton_reduce(word)
        trivial = reduced.edge_length == 0 and reduced.g0 == 0
        lines.append(f"word: {gog.gog_word_to_text(word) or '(empty)'}")
        lines.append(f"reduced: {gog.gog_word_to_text(reduced) or '(empty)'}")
        lines.append(f"trivial: {trivial}")
        payload["word"] = gog.gog_word_to_text(word)
        payload["reduced"] = gog.gog_word_to_text(reduced)
        payload["trivial"] = trivial
        if args.rf_witness:
            if trivial:
                raise SystemExit2("rf-witness requires a nontrivial word")
            try:
                witness = gog.rf_witness(word)
            except gog.WitnessSearchExhausted as exc:
                raise SystemExit2(str(exc))
            lines.append(
                f"rf-witness: seed vertex {witness.seed_vertex}, seed subgroup {list(witness.seed_subgroup)}, "
                f"quotient vertex orders {[q.order for q in witness.quotient.graph.vertices]}"
            )
            payload["rf_witness"] = {
                "seed_vertex": witness.seed_vertex,
                "seed_subgroup": list(witness.seed_subgroup),
                "quotient_vertex_orders": [q.order for q in witness.quotient.graph.vertices],
                "image_word": gog.gog_word_to_text(witness.image_word),
            }
    if args.malnormality:
        D = gog.malnormality_constant(graph)
        d_eps, n_eps = gog.acyl_constants(D, args.eps)
        lines.append(f"malnormality constant D = {D}")
        lines.append(f"acylindricity constants at eps={args.eps}: D_eps = {d_eps}, N_eps = {n_eps}")
        payload["malnormality"] = {"D": D, "eps": args.eps, "D_eps": d_eps, "N_eps": n_eps}
    if args.endos is not None:
        endos = sorted(gog.closed_path_endomorphisms(graph, args.endos), key=lambda h: h.images)
        lines.append(f"closed-path endomorphisms at vertex {args.endos}: {len(endos)}")
        for h in endos:
            lines.append(f"  {list(h.images)}")
        payload["endomorphisms"] = {"vertex": args.endos, "count": len(endos), "images": [list(h.images) for h in endos]}
    return EXIT_OK, "\n".join(lines), payload


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eqnoeth", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--json", help="write a machine-readable JSON mirror here")
        p.add_argument("--manifest", help="write the run manifest here (default: one line on stderr)")

    p = sub.add_parser("variety", help="enumerate a solution set")
    p.add_argument("--group", required=True)
    p.add_argument("--system", required=True)
    p.add_argument("--nvars", type=int, default=None)
    p.add_argument("--target", help="JSON list of element indices: compute V_{G,A} instead")
    p.add_argument("--coeffs", help="JSON object mapping coefficient tokens to element indices")
    common(p)

    p = sub.add_parser("family-min", help="minimal subsystem over a family of groups")
    p.add_argument("--groups", nargs="+", required=True)
    p.add_argument("--system", required=True)
    p.add_argument("--nvars", type=int, default=None)
    p.add_argument("--shrink", action="store_true")
    common(p)

    p = sub.add_parser("ut-table", help="unitriangular chain identity table")
    p.add_argument("--max-rank-exp", type=int, required=True)
    p.add_argument("--max-index", type=int, required=True)
    common(p)

    p = sub.add_parser("nnsen", help="depth-d commutation table over the cyclic quotient ring")
    p.add_argument("--depth", type=int, required=True)
    common(p)

    p = sub.add_parser("bs12", help="BS(1,2) cyclic-subgroup membership table")
    p.add_argument("--max", type=int, required=True)
    common(p)

    p = sub.add_parser("poly-translate", help="entry polynomials of a word map on matrices")
    p.add_argument("--word", required=True)
    p.add_argument("--rank", type=int, required=True)
    common(p)

    p = sub.add_parser("metabelian-check", help="split-extension criterion sweep")
    p.add_argument("--A", required=True)
    p.add_argument("--P", required=True)
    p.add_argument("--action", required=True)
    p.add_argument("--words", required=True)
    common(p)

    p = sub.add_parser("wreath-witness", help="non-Noetherian witness chain in C2 wr (C2 wr Z)")
    p.add_argument("--depth", type=int, required=True)
    common(p)

    p = sub.add_parser("separability-cert", help="cyclic-subgroup separability certificate in C2 wr Z")
    p.add_argument("--element-f", required=True)
    p.add_argument("--element-h", required=True)
    p.add_argument("--max-n", type=int, default=64)
    common(p)

    p = sub.add_parser("gog-check", help="graph-of-groups word problem and constants")
    p.add_argument("--graph", required=True)
    p.add_argument("--word")
    p.add_argument("--rf-witness", action="store_true")
    p.add_argument("--malnormality", action="store_true")
    p.add_argument("--eps", type=int, default=1)
    p.add_argument("--endos", type=int, default=None)
    common(p)

    return parser


_HANDLERS = {
    "variety": (_cmd_variety, ("group", "system", "target", "coeffs")),
    "family-min": (_cmd_family_min, ("system",)),
    "ut-table": (_cmd_ut_table, ()),
    "nnsen": (_cmd_nnsen, ()),
    "bs12": (_cmd_bs12, ()),
    "poly-translate": (_cmd_poly_translate, ()),
    "metabelian-check": (_cmd_metabelian_check, ("A", "P", "action", "words")),
    "wreath-witness": (_cmd_wreath_witness, ()),
    "separability-cert": (_cmd_separability_cert, ()),
    "gog-check": (_cmd_gog_check, ("graph", "word")),
}


def dispatch(argv: Sequence[str]) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler, input_keys = _HANDLERS[args.subcommand]
    started = time.monotonic()
    try:
        code, text, payload = handler(args)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if text:
        print(text)
    outputs = []
    if args.json:
        Path(args.json).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        outputs.append(args.json)
    params = {
        k: v
        for k, v in vars(args).items()
        if k not in ("subcommand", "json", "manifest") and v is not None
    }
    digests = {}
    for key in input_keys:
        value = getattr(args, key.replace("-", "_"), None)
        paths = value if isinstance(value, list) else [value] if value else []
        for pth in paths:
            try:
                digests[str(pth)] = _digest(str(pth))
            except OSError:
                pass
    if "groups" in params and isinstance(params["groups"], list):
        for pth in params["groups"]:
            try:
                digests[str(pth)] = _digest(str(pth))
            except OSError:
                pass
    manifest = RunManifest(
        subcommand=args.subcommand,
        parameters=params,
        input_digests=digests,
        output_paths=outputs,
        duration_seconds=round(time.monotonic() - started, 6),
    )
    if args.manifest:
        Path(args.manifest).write_text(json.dumps(manifest.to_json(), indent=2, sort_keys=True) + "\n")
    else:
        print(json.dumps(manifest.to_json(), sort_keys=True), file=sys.stderr)
    return code


def main() -> None:
    raise SystemExit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
