"""Command-line front end.

Exit codes: 0 success, 1 mathematical failure (obstruction, inconsistency,
failed identity), 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import bounds, coiso, liecoalg, magnus, massey
from .freegroup import Word
from .linalg import fraction_str

SCHEMA = "v1"
FIXTURE_ENV = "MILNORKIT_FIXTURES"


class InputError(Exception):
    pass


class MathFailure(Exception):
    def __init__(self, payload: dict):
        super().__init__(payload.get("error", "mathematical failure"))
        self.payload = payload


# -- input helpers ---------------------------------------------------------


def fixture_dir() -> Path:
    override = os.environ.get(FIXTURE_ENV)
    if override:
        return Path(override)
    return Path(str(resources.files("milnorkit") / "fixtures"))


def load_json(arg: str):
    """Inline JSON, a path to a JSON file, or the name of a bundled fixture."""
    text = arg.strip()
    if text[:1] in "[{":
        source = "inline JSON"
    else:
        path = Path(arg)
        if not path.exists():
            name = arg if arg.endswith(".json") else arg + ".json"
            path = fixture_dir() / name
        if not path.exists():
            raise InputError(f"no file or fixture named {arg!r}")
        text = path.read_text()
        source = str(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"cannot parse {source}: {exc}") from None


def int_list(s: str) -> list:
    try:
        return [int(t) for t in s.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {s!r}") from None


def frac_list(s: str) -> list:
    try:
        return [Fraction(t.strip()) for t in s.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError):
        raise InputError(f"expected comma-separated rationals, got {s!r}") from None


def frac(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"expected a rational number, got {s!r}") from None


def word_arg(s: str, rank: int | None) -> Word:
    obj = load_json(s)
    if isinstance(obj, list):
        if rank is None:
            rank = max((abs(a if isinstance(a, int) else a[0]) for a in obj), default=0)
        return Word(rank, obj)
    return Word.from_json(obj)


def _index_check(I, what="indices"):
    if not I:
        raise InputError(f"{what} must be nonempty")


# -- subcommands -----------------------------------------------------------


def cmd_mu(a) -> dict:
    L = magnus.LinkSystem.from_json(load_json(a.link))
    I = int_list(a.indices)
    res = magnus.mu_bar(L, I, a.maxdeg)
    out = {"indices": I, **res.to_json()}
    if not res.defined:
        raise MathFailure({"error": "lower-order invariants do not vanish", **out})
    return out


def cmd_expand(a) -> dict:
    w = word_arg(a.word, a.rank)
    s = magnus.expand(w, a.maxdeg, squarefree=a.squarefree)
    terms = sorted(s.terms.items(), key=lambda t: (len(t[0]), t[0]))
    return {"word": w.to_json(), "maxdeg": a.maxdeg, "squarefree": a.squarefree,
            "terms": [[list(m), str(c)] for m, c in terms]}


def cmd_shuffle_check(a) -> dict:
    w = word_arg(a.word, a.rank)
    I, J = int_list(a.I), int_list(a.J)
    _index_check(I, "I")
    _index_check(J, "J")
    s = magnus.expand(w, len(I) + len(J))
    r = magnus.shuffle_residual(s, I, J, merge=not a.no_merge)
    out = {"I": I, "J": J, "merge": not a.no_merge, "residual": str(r)}
    if r:
        raise MathFailure({"error": "shuffle residual is nonzero", **out})
    return out


def _tree(s: str):
    try:
        return liecoalg.tree_from_json(load_json(s))
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_pair(a) -> dict:
    ctx = liecoalg.GradedGenerators(tuple(int_list(a.degrees)))
    x = liecoalg.Functional(tuple(int_list(a.I)), ctx)
    t = _tree(a.tree)
    return {"degrees": list(ctx.degrees), "I": list(x.I), "tree": liecoalg.tree_to_json(t),
            "value": liecoalg.pair(x, t)}


def cmd_dual_basis(a) -> dict:
    degs = int_list(a.degrees)
    M = liecoalg.dual_basis_matrix(degs, a.s)
    ok = liecoalg.is_signed_identity(M)
    s = a.s or len(degs)
    out = {"degrees": degs, "permutations": [list(p) for p in liecoalg.fixing_last(s)],
           "matrix": M, "signed_identity": ok}
    if not ok:
        raise MathFailure({"error": "pairing matrix is not a signed identity", **out})
    return out


def cmd_massey(a) -> dict:
    obj = load_json(a.dga)
    D = massey.Dga.from_json(obj)
    names = [t.strip() for t in a.classes.split(",") if t.strip()]
    try:
        classes = [D.basis_vector(n) for n in names]
    except KeyError as exc:
        raise InputError(f"unknown basis element {exc}") from None
    viol = massey.validate_dga(D)
    if viol:
        raise MathFailure({"error": "invalid DGA", "violations": [str(v) for v in viol]})
    out = massey.massey_product(D, classes, a.perturbations, a.seed)
    res = {"classes": names, **out.to_json(D)}
    if out.status != "class":
        raise MathFailure({"error": "defining system obstructed", **res})
    if a.dual:
        try:
            dual = D.vector(load_json(a.dual) if a.dual.strip()[:1] in "[{" else {a.dual: 1})
        except ValueError as exc:
            raise InputError(str(exc)) from None
        try:
            res["coefficient"] = fraction_str(massey.coefficient_extract(out, dual, D))
        except ValueError as exc:
            raise MathFailure({"error": str(exc), **res}) from None
    return res


def cmd_coiso_solve(a) -> dict:
    A = coiso.SparseSignMatrix.from_json(load_json(a.matrix))
    b = frac_list(a.b)
    try:
        sol = coiso.solve_bounded(A, b)
    except coiso.Inconsistent as exc:
        raise MathFailure({"error": str(exc),
                           "certificate": [fraction_str(v) for v in exc.certificate]}) from None
    return {"M": A.M, "N": A.N, "p": A.p, **sol.to_json()}


def cmd_coboundary(a) -> dict:
    K = coiso.SimplicialComplex.from_json(load_json(a.complex))
    A = coiso.coboundary_matrix(K, a.q)
    out = {"q": a.q, "matrix": A.to_json(), "p": A.p}
    if a.b is not None:
        try:
            prim = coiso.coboundary_primitive(K, a.q, frac_list(a.b))
        except coiso.NotACoboundary as exc:
            raise MathFailure({"error": str(exc),
                               "certificate": [fraction_str(v) for v in exc.certificate]}) from None
        out["primitive"] = prim.to_json()
    return out


def _constants(a) -> bounds.Constants:
    return bounds.Constants(C_md=frac(a.C_md), C_m=frac(a.C_m), c=frac(a.c),
                            C_q=frac(a.C_q), slack=frac(a.slack))


def cmd_bounds(a) -> dict:
    L = bounds.LinkDimensions(a.m, tuple(int_list(a.p)), tuple(int_list(a.indices)))
    chk = bounds.check_dimension(L)
    out = {"m": L.m, "p": list(L.p), "indices": list(L.indices), "q": list(L.q),
           "dimension_ok": chk.holds}
    if not chk.holds:
        raise MathFailure({"error": "dimension condition fails; the invariant is zero", **out})
    R = bounds.classify_regime(L, bilipschitz=a.bilipschitz)
    out["regime"] = R.to_json()
    if a.tau is not None:
        out["bound"] = bounds.upper_bound(R, frac(a.tau), None if a.L is None else frac(a.L),
                                          _constants(a)).to_json()
    return out


def cmd_dichotomy(a):
    t = bounds.dichotomy_table(a.m, a.d, range(1, a.n_max + 1), _constants(a))
    if a.format == "csv":
        return t.to_csv()
    return t.to_json()


def cmd_fk(a):
    w = bounds.fk_word(a.q, a.variant)
    if a.length_only:
        return len(w)
    out = {"q": a.q, "variant": a.variant, "length": len(w),
           "literal_length": bounds.fk_literal_length(a.q)}
    if a.l is not None:
        coef = bounds.fk_telescope_coefficient(a.q, a.l, a.variant)
        out.update(l=a.l, monomial=list(bounds.fk_monomial(a.q, a.variant)),
                   coefficient=bounds.format_big(coef),
                   log2_tau_bound=str(bounds.fk_thickness_bound(a.q, a.l, _constants(a))))
    if a.show_word:
        out["word"] = w.to_json()
    return out


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="milnorkit", description="Milnor invariants and thickness bounds.")
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    p.add_argument("--seed", type=int, default=0)
    # the same options are accepted after the subcommand as well
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "text"], default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        return sub.add_parser(name, parents=[common], **kw)

    s = add("mu", help="Milnor invariant of a link system")
    s.add_argument("--link", required=True)
    s.add_argument("--indices", required=True)
    s.add_argument("--maxdeg", type=int)
    s.set_defaults(func=cmd_mu)

    s = add("expand", help="truncated Magnus expansion of a word")
    s.add_argument("--word", required=True, help="word JSON: {rank, letters} or [signed ints]")
    s.add_argument("--rank", type=int)
    s.add_argument("--maxdeg", type=int, required=True)
    s.add_argument("--squarefree", action="store_true")
    s.set_defaults(func=cmd_expand)

    s = add("shuffle-check", help="shuffle identity for Magnus coefficients")
    s.add_argument("--word", required=True)
    s.add_argument("--rank", type=int)
    s.add_argument("--I", required=True)
    s.add_argument("--J", required=True)
    s.add_argument("--no-merge", action="store_true", help="plain shuffle instead of infiltration")
    s.set_defaults(func=cmd_shuffle_check)

    s = add("pair", help="pair x_I with a bracket tree")
    s.add_argument("--degrees", required=True)
    s.add_argument("--I", required=True)
    s.add_argument("--tree", required=True, help="nested pairs, e.g. [1,[2,3]]")
    s.set_defaults(func=cmd_pair)

    s = add("dual-basis", help="pairing matrix over permutations fixing s")
    s.add_argument("--degrees", required=True)
    s.add_argument("--s", type=int)
    s.set_defaults(func=cmd_dual_basis)

    s = add("massey", help="Massey product in a finite DGA")
    s.add_argument("--dga", required=True)
    s.add_argument("--classes", required=True, help="comma-separated basis names")
    s.add_argument("--perturbations", type=int, default=100)
    s.add_argument("--dual", help="basis name or JSON {name: coefficient}")
    s.set_defaults(func=cmd_massey)

    s = add("coiso-solve", help="bounded solution of a sparse +-1 system")
    s.add_argument("--matrix", required=True)
    s.add_argument("--b", required=True)
    s.set_defaults(func=cmd_coiso_solve)

    s = add("coboundary", help="coboundary matrix and primitives")
    s.add_argument("--complex", required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--b")
    s.set_defaults(func=cmd_coboundary)

    def add_constants(sp):
        for name in ("C_md", "C_m", "c", "C_q", "slack"):
            sp.add_argument(f"--{name}", default="1")

    s = add("bounds", help="regime and thickness bound")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--p", required=True)
    s.add_argument("--indices", required=True)
    s.add_argument("--tau")
    s.add_argument("--L")
    s.add_argument("--bilipschitz", action="store_true")
    add_constants(s)
    s.set_defaults(func=cmd_bounds)

    s = add("dichotomy", help="example families against bounds")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--n-max", type=int, default=5)
    add_constants(s)
    s.set_defaults(func=cmd_dichotomy)

    s = add("fk", help="Freedman-Krushkal words")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--variant", choices=["single", "multi"], default="single")
    s.add_argument("--l", type=int)
    s.add_argument("--length-only", action="store_true")
    s.add_argument("--show-word", action="store_true")
    add_constants(s)
    s.set_defaults(func=cmd_fk)
    return p


def render(result, fmt: str) -> str:
    if isinstance(result, str):
        return result.rstrip("\n")
    if isinstance(result, dict):
        result = {"schema": SCHEMA, **result}
        if fmt == "text":
            return "\n".join(f"{k}: {json.dumps(v, sort_keys=True)}" for k, v in result.items())
    return json.dumps(result, sort_keys=True)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.func(args)
    except MathFailure as exc:
        print(render(exc.payload, "json"))
        return 1
    except (InputError, ValueError, liecoalg.UnsupportedTreeShape) as exc:
        print(json.dumps({"schema": SCHEMA, "error": str(exc)}), file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(render({"error": str(exc)}, "json"))
        return 1
    print(render(result, args.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
