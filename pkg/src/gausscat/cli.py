"""Command-line front end.

Exit codes: 0 success, 1 validation/usage error, 2 a law or residual check failed.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from .gauss import (
    TOL_COND,
    ConditionalSplit,
    compose_chain,
    conditional_mp,
    conditional_mp13,
    verify_conditional,
)
from .laws import MAX_SIZE_LIMIT, LawSuiteConfig, inject_bug, run_laws
from .matrix import Matrix, zeros
from .modelfile import ModelError, ModelFile, dumps_model, load_model
from .pinv import TOL_MP, mp13_inverse, mp_inverse, verify_mp
from .sampler import estimate_moments, sample
from .scalar import ScalarKind, format_scalar

DEFAULT_SEED = 20240917

EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2, which means "check failed" here
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _vector(model: ModelFile, literal: str | None, size: int, what: str, default: Matrix) -> Matrix:
    """A named vector from the file, or an inline comma-separated literal."""
    if literal is None:
        return default
    if literal in model.vectors:
        v = model.vector(literal)
    else:
        items = [s for s in literal.split(",") if s.strip()] if literal.strip() else []
        try:
            v = Matrix.from_literal([[s] for s in items], model.kind, shape=(len(items), 1))
        except ValueError as exc:
            raise UsageError(f"{what}: {exc}") from exc
    if v.shape != (size, 1):
        raise UsageError(f"{what} must have length {size}, got {v.rows}")
    return v


# -- compose ---------------------------------------------------------------

def cmd_compose(args) -> int:
    model = load_model(args.file)
    chain = [model.morphism(n) for n in args.names]
    result = compose_chain(*chain)
    out = ModelFile(model.kind, model.x_dim)
    out.add(args.name or ".".join(args.names), result)
    _emit(dumps_model(out), args.output)
    return EXIT_OK


# -- condition -------------------------------------------------------------

def cmd_condition(args) -> int:
    model = load_model(args.file)
    F = model.morphism(args.name)
    split = ConditionalSplit.of(F, args.b_dim)
    seed = None
    if args.method == "mp":
        G = conditional_mp(F, split)
    else:
        seed = DEFAULT_SEED if args.seed is None else args.seed
        G = conditional_mp13(F, split, seed)
    residual = verify_conditional(F, G, split)
    passed = residual <= args.tol
    out = ModelFile(model.kind, model.x_dim)
    out.add(f"{args.name}|{args.b_dim}", G)
    out.report = {
        "source": args.name,
        "b_dim": split.b_dim,
        "c_dim": split.c_dim,
        "method": args.method,
        "seed": seed,
        "residual": f"{residual:.3e}",
        "tol": f"{args.tol:.1e}",
        "passed": passed,
    }
    _emit(dumps_model(out), args.output)
    return EXIT_OK if passed else EXIT_FAILED


# -- sample ----------------------------------------------------------------

_COMPONENT_NAMES = {
    ScalarKind.REAL: ("",),
    ScalarKind.COMPLEX: (".re", ".im"),
    ScalarKind.QUATERNION: (".w", ".x", ".y", ".z"),
}


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _matrix_lines(label: str, m: Matrix) -> list[str]:
    lines = [f"# {label}"]
    for row in m.to_scalars():
        lines.append("#   " + "\t".join(format_scalar(s) for s in row))
    return lines


def cmd_sample(args) -> int:
    model = load_model(args.file)
    F = model.morphism(args.name)
    if args.n < 2:
        raise UsageError("need at least two samples (-n >= 2)")
    default_e = Matrix.from_literal([[1 if i == 0 else 0] for i in range(F.x_dim)], F.kind,
                                    shape=(F.x_dim, 1))
    a = _vector(model, args.input, F.dom, "--input", zeros(F.dom, 1, F.kind))
    e = _vector(model, args.e, F.x_dim, "--e", default_e)
    seed = DEFAULT_SEED if args.seed is None else args.seed
    batch = sample(F, a, e, args.n, seed)
    comps = batch.outputs.components()  # (cod, n, ncomp)

    lines = [f"# seed\t{seed}", f"# morphism\t{args.name}\tkind\t{F.kind.value}\tn\t{args.n}"]
    header = ["i"] + [f"y{j}{c}" for j in range(F.cod) for c in _COMPONENT_NAMES[F.kind]]
    lines.append("\t".join(header))
    flat = np.transpose(comps, (1, 0, 2)).reshape(args.n, -1)
    for i, row in enumerate(flat):
        lines.append("\t".join([str(i)] + [_fmt(v) for v in row]))

    mom = estimate_moments(batch)
    lines.append("# moments")
    lines += _matrix_lines("mean", mom.mean)
    lines += _matrix_lines("covariance", mom.covariance)
    labels = {ScalarKind.COMPLEX: ["pseudocovariance"],
              ScalarKind.QUATERNION: ["complementary covariance i", "complementary covariance j",
                                      "complementary covariance k"]}.get(F.kind, [])
    for label, m in zip(labels, mom.pseudo):
        lines += _matrix_lines(label, m)
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


# -- check-laws ------------------------------------------------------------

def _kinds(text: str) -> tuple[ScalarKind, ...]:
    try:
        return tuple(ScalarKind.parse(k) for k in text.split(",") if k.strip())
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_check_laws(args) -> int:
    try:
        config = LawSuiteConfig(
            kinds=_kinds(args.kinds),
            max_size=args.max_size,
            instances=args.instances,
            seed=args.seed,
            tol=args.tol,
            only=tuple(args.only or ()),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.inject_bug:
        with inject_bug():
            results = run_laws(config)
    else:
        results = run_laws(config)
    if not results:
        raise UsageError("no laws selected")

    if args.format == "tsv":
        print("law\tkind\tworst\ttol\tinstances\tstatus")
        for r in results:
            print(f"{r.name}\t{r.kind.value}\t{r.worst:.3e}\t{r.tol:.1e}\t{r.instances}\t"
                  f"{'pass' if r.passed else 'FAIL'}")
    else:
        print(f"# seed {config.seed}  instances {config.instances}  max-size {config.max_size}"
              + ("  [injected bug]" if args.inject_bug else ""))
        width = max(len(r.name) for r in results)
        for r in results:
            status = "pass" if r.passed else "FAIL"
            line = f"{r.name:<{width}}  {r.kind.value:<10}  {r.worst:>10.3e}  <= {r.tol:.1e}  {status}"
            if r.error:
                line += f"  ({r.error})"
            print(line)
        failed = sum(not r.passed for r in results)
        print(f"# {len(results) - failed}/{len(results)} passed")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


# -- verify-mp -------------------------------------------------------------

def cmd_verify_mp(args) -> int:
    model = load_model(args.file)
    F = model.morphism(args.name)
    a = getattr(F, args.component)
    try:
        axioms = tuple(sorted({int(t) for t in args.axioms.split(",")}))
    except ValueError:
        raise UsageError(f"--axioms must be a comma list of 1..4, got {args.axioms!r}") from None
    if not axioms or not set(axioms) <= {1, 2, 3, 4}:
        raise UsageError(f"--axioms must be a comma list of 1..4, got {args.axioms!r}")
    g = mp_inverse(a) if args.mp13_seed is None else mp13_inverse(a, args.mp13_seed)
    rep = verify_mp(a, g, args.tol)
    inverse = "mp" if args.mp13_seed is None else f"mp13 seed={args.mp13_seed}"
    print(f"# {args.name}.{args.component}  {a.rows}x{a.cols}  inverse {inverse}")
    bound = args.tol * (1.0 + a.norm())
    for i in axioms:
        status = "pass" if rep.passed[i - 1] else "FAIL"
        print(f"MP.{i}  {rep.residuals[i - 1]:.3e}  <= {bound:.1e}  {status}")
    return EXIT_OK if rep.ok(axioms) else EXIT_FAILED


# -- parser ----------------------------------------------------------------

def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gausscat", description="Gaussian morphisms over R, C and H.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compose", help="compose a chain of morphisms (N M means N after M)")
    c.add_argument("file")
    c.add_argument("names", nargs="+")
    c.add_argument("--name", help="name of the result (default: names joined by '.')")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_compose)

    c = sub.add_parser("condition", help="conditional of NAME on its first B_DIM outputs")
    c.add_argument("file")
    c.add_argument("name")
    c.add_argument("b_dim", type=_nonneg)
    c.add_argument("--method", choices=("mp", "mp13"), default="mp")
    c.add_argument("--seed", type=_nonneg, help=f"mp13 perturbation seed (default {DEFAULT_SEED})")
    c.add_argument("--tol", type=float, default=TOL_COND)
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_condition)

    c = sub.add_parser("sample", help="draw samples and print a moment summary")
    c.add_argument("file")
    c.add_argument("name")
    c.add_argument("--input", help="vector name or comma list (default zeros)")
    c.add_argument("--e", help="noise-mean selector, vector name or comma list (default e_1)")
    c.add_argument("-n", type=int, default=10)
    c.add_argument("--seed", type=_nonneg, help=f"default {DEFAULT_SEED}")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_sample)

    c = sub.add_parser("check-laws", help="run the randomized law suite")
    c.add_argument("--kinds", default="real,complex,quaternion")
    c.add_argument("--max-size", type=int, default=6, help=f"at most {MAX_SIZE_LIMIT}")
    c.add_argument("--instances", type=int, default=100)
    c.add_argument("--seed", type=_nonneg, default=0)
    c.add_argument("--tol", type=float, help="override every law's tolerance")
    c.add_argument("--only", action="append", metavar="PREFIX", help="restrict to law-name prefix")
    c.add_argument("--inject-bug", action="store_true",
                   help="negate the dagger in covariance composition (the suite must fail)")
    c.add_argument("--format", choices=("table", "tsv"), default="table")
    c.set_defaults(func=cmd_check_laws)

    c = sub.add_parser("verify-mp", help="check the Penrose equations for one slot of a morphism")
    c.add_argument("file")
    c.add_argument("name")
    c.add_argument("--component", choices=("f", "p", "x"), default="f")
    c.add_argument("--axioms", default="1,2,3,4")
    c.add_argument("--mp13-seed", type=_nonneg, help="check a seeded least-squares inverse instead")
    c.add_argument("--tol", type=float, default=TOL_MP)
    c.set_defaults(func=cmd_verify_mp)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ModelError, UsageError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
