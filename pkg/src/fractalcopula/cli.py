"""Command line interface.

Subcommands: decompose, fixpoint, factorize, verify, render. Numbers print
as exact rationals with a decimal approximation in parentheses. Exit codes:
0 success, 1 usage or parse problems, 2 violated mathematical preconditions
(bad mass, rank above one, ...), 3 failed verification checks.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import copula as cop
from . import factorize as fac
from . import io as fio
from . import markov as mk
from . import patch
from . import tmatrix as tm
from ._rat import ONE, ZERO, rat, with_decimal
from .errors import (
    FractalCopulaError,
    IoError,
    NoContraction,
    ParseError,
    RankExceedsOne,
    VerificationError,
)


class _Parser(argparse.ArgumentParser):
    """argparse with the usage exit code pinned to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


def _read_matrix(path: str) -> tm.TransformationMatrix:
    try:
        text = Path(path).read_text(encoding="ascii")
    except OSError as exc:
        raise IoError("cannot read %s: %s" % (path, exc)) from exc
    return fio.parse_matrix(text)


def _read_copula(path: str) -> cop.PatchedCopula:
    try:
        text = Path(path).read_text(encoding="ascii")
    except OSError as exc:
        raise IoError("cannot read %s: %s" % (path, exc)) from exc
    return fio.parse_copula(text)


def _seed_copula(spec: str) -> cop.PatchedCopula:
    if spec == "pi":
        return cop.independence()
    for prefix, builder in (("mgrid:", cop.diagonal), ("wgrid:", cop.antidiagonal)):
        if spec.startswith(prefix):
            try:
                n = int(spec[len(prefix):])
            except ValueError:
                break
            return builder(n)
    raise ParseError("seed must be pi, mgrid:N or wgrid:N; got %r" % spec)


def _cmd_decompose(args) -> int:
    t = _read_matrix(args.matrix)
    d = tm.invariant_pairs(t)
    print("matrix: %d columns x %d rows" % (t.k, t.l))
    print("invariant pairs: %d" % d.n_blocks)
    for n, b in enumerate(d.blocks):
        witness = tm.first_nonzero_minor(t, b)
        if witness is None:
            rank = "yes"
        else:
            rank = "no (minor %s)" % with_decimal(witness[2])
        print(
            "  block %d: columns {%s}, rows {%s}, mass %s, rank one: %s"
            % (
                n + 1,
                ",".join(str(i + 1) for i in b.cols),
                ",".join(str(j + 1) for j in b.rows),
                with_decimal(b.mass),
                rank,
            )
        )
    s1, s2 = tm.scaling_factors(t)
    print("sobolev scaling: s1 = %s, s2 = %s" % (with_decimal(s1), with_decimal(s2)))
    print("contraction factor r^2 = %s" % with_decimal(tm.contraction_factor(t)))
    print("complete dependence: %s" % tm.complete_dependence_kind(t).value)
    return 0


def _cmd_fixpoint(args) -> int:
    t = _read_matrix(args.matrix)
    seed = _seed_copula(args.seed)
    if args.depth < 0:
        raise ParseError("--depth must be >= 0")
    iterates = [seed]
    for _ in range(args.depth):
        iterates.append(patch.apply(t, iterates[-1]))
    final = iterates[-1]
    print(
        "depth %d: mesh %d x %d, support cells %d"
        % (args.depth, final.nx, final.ny, len(patch.support_cells(final)))
    )
    if args.report_norms:
        print("contraction factor r^2 = %s" % with_decimal(tm.contraction_factor(t)))
        prev = None
        for step in range(1, len(iterates)):
            _, _, dssq = cop.sobolev_distance(iterates[step - 1], iterates[step])
            line = "step %d: dS^2 = %s" % (step, with_decimal(dssq))
            if prev not in (None, ZERO) and dssq != ZERO:
                line += ", ratio = %s" % with_decimal(dssq / prev)
            prev = dssq
            print(line)
    if args.out:
        try:
            Path(args.out).write_text(fio.write_copula(final), encoding="ascii")
        except OSError as exc:
            raise IoError("cannot write %s: %s" % (args.out, exc)) from exc
        print("wrote %s" % args.out)
    return 0


def _cmd_factorize(args) -> int:
    t = _read_matrix(args.matrix)
    if args.depth < 0:
        raise ParseError("--depth must be >= 0")
    cl, cr, ca = fac.factor_fixpoints(t, args.depth)
    left, right = fac.build_lr(t)
    for name, matrix in (("left", left), ("right", right)):
        print(
            "%s factor: %d x %d, %s complete dependence"
            % (name, matrix.k, matrix.l, tm.complete_dependence_kind(matrix).value)
        )
    outputs = []
    for suffix, c in (("cl", cl), ("cr", cr), ("ca", ca)):
        out = "%s_%s.txt" % (args.out_prefix, suffix)
        try:
            Path(out).write_text(fio.write_copula(c), encoding="ascii")
        except OSError as exc:
            raise IoError("cannot write %s: %s" % (out, exc)) from exc
        outputs.append(out)
        print("wrote %s" % out)
    print("product identity star(CL, CR) = CA at depth %d: PASS" % args.depth)
    return 0


def _fixed_test_pairs():
    """Deterministic copula pairs exercised by the verify checks."""
    a = cop.diagonal(2)
    b = cop.antidiagonal(3)
    c = cop.convex(rat(1, 3), cop.diagonal(3), cop.independence())
    d = cop.convex(rat(1, 2), cop.antidiagonal(2), cop.diagonal(4))
    return [(a, b), (c, d), (b, c)]


def _cmd_verify(args) -> int:
    t = _read_matrix(args.matrix)
    if args.depth < 0:
        raise ParseError("--depth must be >= 0")
    depth = args.depth
    d = tm.invariant_pairs(t)
    n_blocks = d.n_blocks
    print(
        "matrix: %d columns x %d rows, %d invariant pair(s), r^2 = %s"
        % (t.k, t.l, n_blocks, with_decimal(tm.contraction_factor(t)))
    )
    failed = False

    def report(name: str, ok: bool | None, detail: str = ""):
        nonlocal failed
        if ok is None:
            verdict = "SKIP"
        elif ok:
            verdict = "PASS"
        else:
            verdict = "FAIL"
            failed = True
        suffix = (" (%s)" % detail) if detail else ""
        print("%s: %s%s" % (name, verdict, suffix))

    ca = patch.iterate(t, cop.independence(), depth)

    ok = tuple(mk.operator_apply(ca, (ONE,) * ca.ny)) == (ONE,) * ca.nx
    psis = [
        tuple(rat(1 + ((j * 5) % 7), 3) for j in range(ca.ny)),
        tuple(rat((j % 3) - 1) for j in range(ca.ny)),
    ]
    for psi in psis:
        image = mk.operator_apply(ca, psi)
        mean_in = sum(psi[j] * ca.dy(j) for j in range(ca.ny))
        mean_out = sum(image[i] * ca.dx(i) for i in range(ca.nx))
        ok = ok and mean_in == mean_out
    nonneg = mk.operator_apply(ca, tuple(rat((j * 2) % 5) for j in range(ca.ny)))
    ok = ok and all(v >= ZERO for v in nonneg)
    report("markov-axioms", ok)

    atoms = mk.sigma_atoms(ca)
    expected_count = n_blocks**depth
    max_mass = max(b.mass for b in d.blocks)
    expected_max = ONE
    for _ in range(depth):
        expected_max = expected_max * max_mass
    ok = len(atoms) == expected_count and max(a.measure for a in atoms) == expected_max
    note = "%d atoms, max measure %s" % (len(atoms), with_decimal(expected_max))
    if n_blocks == 1:
        note += "; single block, non-atomicity N/A"
    report("sigma-atoms", ok, note)

    if depth >= 1:
        f, g = mk.build_implicit_pair(d, depth)
        rep = mk.verify_markov_factorization(ca, f, g)
        report(
            "implicit-pair",
            rep.passed,
            "%d targets, %d unions, %d steps" % (rep.targets_checked, rep.unions_checked, rep.steps_checked)
            if rep.passed
            else "; ".join(rep.failures[:3]),
        )
        gm = mk.graph_mass(ca, f, g, depth)
        report("graph-mass", gm == ONE, "mass %s" % with_decimal(gm))
    else:
        report("implicit-pair", None, "needs depth >= 1")
        report("graph-mass", None, "needs depth >= 1")

    s1, s2 = tm.scaling_factors(t)
    ok = True
    for c1, c2 in _fixed_test_pairs():
        d1, d2, _ = cop.sobolev_distance(c1, c2)
        a1, a2, _ = cop.sobolev_distance(patch.apply(t, c1), patch.apply(t, c2))
        ok = ok and a1 == s1 * d1 and a2 == s2 * d2
    report("sobolev-scaling", ok)

    try:
        fac.factor_fixpoints(t, depth)
        pair_ok = all(
            fac.product_identity_check(t, c1, c2) for c1, c2 in _fixed_test_pairs()[:2]
        )
        report("product-identity", pair_ok)
    except RankExceedsOne as exc:
        report("product-identity", None, str(exc))
    except VerificationError as exc:
        report("product-identity", False, str(exc))

    return 3 if failed else 0


def _cmd_render(args) -> int:
    c = _read_copula(args.copula)
    if args.format == "pgm":
        if not args.size:
            raise ParseError("--size WxH is required for pgm output")
        try:
            w_txt, h_txt = args.size.lower().split("x")
            width, height = int(w_txt), int(h_txt)
        except ValueError:
            raise ParseError("--size must look like 729x729, got %r" % args.size) from None
        threshold = rat(args.threshold) if args.threshold is not None else None
        fio.render_pgm(c, width, height, path=args.out, threshold=threshold)
    else:
        if args.threshold is not None:
            raise ParseError("--threshold applies only to pgm output")
        fio.render_csv(c, path=args.out)
    print("wrote %s" % args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="fractalcopula",
        description="Exact computations with self-similar bivariate copulas.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", parents=[], help="invariant pairs and contraction data")
    p.add_argument("matrix", help="transformation matrix file")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("fixpoint", help="iterate the patching operator")
    p.add_argument("matrix")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--seed", default="pi", help="pi, mgrid:N or wgrid:N (default pi)")
    p.add_argument("--out", help="write the final iterate as a copula file")
    p.add_argument("--report-norms", action="store_true", help="print step Sobolev distances")
    p.set_defaults(func=_cmd_fixpoint)

    p = sub.add_parser("factorize", help="write factor iterates CL, CR and CA")
    p.add_argument("matrix")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=_cmd_factorize)

    p = sub.add_parser("verify", help="run the exact invariant checks")
    p.add_argument("matrix")
    p.add_argument("--depth", type=int, required=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("render", help="render a copula file to pgm or csv")
    p.add_argument("copula")
    p.add_argument("--format", choices=("pgm", "csv"), required=True)
    p.add_argument("--size", help="WxH pixel size (pgm only)")
    p.add_argument("--threshold", help="density threshold for a support mask (pgm only)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ParseError, IoError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except VerificationError as exc:
        print("verification failed: %s" % exc, file=sys.stderr)
        return 3
    except (NoContraction, RankExceedsOne, FractalCopulaError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
