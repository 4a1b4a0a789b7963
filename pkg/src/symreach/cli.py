"""Command-line interface: ``symreach <command> ...``.

Every command prints JSON on stdout. Exit codes: 0 success, 1 usage or
invalid input, 2 I/O error, 3 verification failure. Values starting with
a minus sign need the ``--opt=value`` form, e.g. ``--matrix=-1,0,0,-1``.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import re
import sys

import numpy as np

from . import certificate, euler, explorer, normal_form, pulse, sp2, verify
from .errors import SymreachError

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3

_PI_EXPR = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?)\*?pi(?:/(\d+\.?\d*))?$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def real(text: str) -> float:
    """Parse a float, also accepting multiples of pi such as ``-3pi/4``."""
    s = text.strip().replace(" ", "")
    m = _PI_EXPR.match(s)
    if m:
        coef, den = m.groups()
        k = {"": 1.0, "+": 1.0, "-": -1.0}.get(coef)
        k = float(coef) if k is None else k
        return k * math.pi / (float(den) if den else 1.0)
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from None


def matrix(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("expected four comma-separated entries m11,m12,m21,m22")
    return np.array([real(p) for p in parts]).reshape(2, 2)


def real_pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected two comma-separated values a,b")
    return real(parts[0]), real(parts[1])


def entries(M) -> list[float]:
    return [float(v) for v in np.asarray(M).ravel()]


def emit(obj) -> None:
    print(json.dumps(obj, indent=1))


def _offsets(args) -> euler.RangeOffsets:
    return euler.RangeOffsets(args.theta0, args.phi0)


def cmd_classify(args):
    M = sp2.check_traceless(args.matrix)
    emit({"class": sp2.classify(M).value, "trace_sq": sp2.trace_sq(M)})


def cmd_expm(args):
    emit(entries(sp2.expm(args.matrix, args.t)))


def cmd_svd(args):
    S = sp2.check_symplectic(args.matrix)
    e = euler.decompose(S, _offsets(args))
    emit({"theta": e.theta, "z": e.z, "phi": e.phi})


def cmd_compose(args):
    emit(entries(euler.compose(euler.EulerTriple(args.theta, args.z, args.phi))))


def cmd_certificate(args):
    triple = (args.theta, args.z, args.phi)
    if args.matrix is not None:
        if any(v is not None for v in triple):
            raise UsageError("give either --matrix or --theta/--z/--phi")
        emit({"f": certificate.f_of_matrix(args.matrix)})
        return
    if any(v is None for v in triple):
        raise UsageError("need --matrix or all of --theta, --z, --phi")
    emit({"fz": certificate.fz_of_triple(euler.EulerTriple(*triple))})


def _system(args) -> normal_form.ControlSystem:
    if args.c is not None:
        if args.A is not None or args.B is not None:
            raise UsageError("give either --c or --A/--B")
        return normal_form.example_system(args.c)
    if args.A is None or args.B is None:
        raise UsageError("need --c or both --A and --B")
    return normal_form.ControlSystem(args.A, args.B)


def _nf_dict(nf: normal_form.NormalForm) -> dict:
    return {
        "b": nf.b,
        "time_scale": nf.time_scale,
        "u_offset": nf.u_offset,
        "u_scale": nf.u_scale,
        "time_reversed": nf.time_reversed,
        "P": nf.P.tolist(),
    }


def cmd_normalize(args):
    emit(_nf_dict(normal_form.normalize(_system(args))))


def cmd_reach(args):
    system = normal_form.example_system(args.c)
    target = euler.EulerTriple(args.target_theta, args.target_z, args.target_phi)
    problem = pulse.PulseProblem(
        system=system,
        target=euler.compose(target),
        T=args.T,
        Q=args.slices,
        u_bounds=(-args.umax, args.umax),
        tol=args.tol,
        restarts=args.restarts,
        seed=args.seed,
        wall_limit=args.wall_limit,
    )
    res = pulse.optimize(problem)
    try:
        T_normal = normal_form.normalize(system).to_normal_time(args.T)
    except SymreachError:
        T_normal = None
    emit({
        "status": res.status.value,
        "epsilon": res.epsilon,
        "iterations": res.iterations,
        "grad_norm": res.grad_norm,
        "starts": res.starts,
        "T": args.T,
        "T_normal_form": T_normal,
        "pulse": res.pulse.values.tolist(),
    })


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from exc


def cmd_sweep(args):
    cfg = _load_config(args.config)
    try:
        spec = explorer.SweepSpec.from_dict(cfg)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{args.config}: bad sweep config ({exc})") from exc
    if args.full_grid:
        spec = explorer.SweepSpec(spec.c_values, spec.T_values, explorer.GridSpec.full(spec.grid.offsets),
                                  spec.problem, spec.seed)
    records = explorer.run_grid(spec, jobs=args.jobs, keep_pulse=args.keep_pulse)
    reached = sum(r.reached for r in records)
    if args.out:
        explorer.export(records, args.out, args.format)
    emit({"records": len(records), "reached": reached, "out": args.out})


def cmd_plot(args):
    records = explorer.load_records(args.input)
    explorer.render_scatter(records, args.projection, args.out)
    emit({"records": len(records), "out": args.out})


def cmd_verify(args):
    report = verify.verify_suite(seed=args.seed, scale=args.scale, echo=lambda line: print(line, file=sys.stderr))
    emit([vars(r) for r in report])
    if not all(r.passed for r in report):
        return EXIT_VERIFY
    return EXIT_OK


def _parse_fix(items: list[str]) -> dict[str, float]:
    fixed = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep or name not in explorer.AXES:
            raise UsageError(f"--fix expects name=value with name in {explorer.AXES}, got {item!r}")
        try:
            fixed[name] = real(value)
        except argparse.ArgumentTypeError as exc:
            raise UsageError(str(exc)) from exc
    return fixed


def cmd_boundary(args):
    defaults = explorer.ProblemDefaults(args.slices, args.umax, args.tol, args.restarts, args.wall_limit)
    bp = explorer.bisect_boundary(
        _parse_fix(args.fix), args.axis, args.bracket, args.c, args.T, defaults,
        seed=args.seed, tol=args.bisect_tol, max_probes=args.max_probes,
    )
    emit({
        "fixed": bp.fixed,
        "axis": bp.axis,
        "lower": bp.lower,
        "upper": bp.upper,
        "midpoint": bp.midpoint,
        "width": bp.width,
        "lower_reached": bp.lower_reached,
        "probes": bp.probes,
    })


def _add_offsets(p):
    p.add_argument("--theta0", type=real, default=euler.DEFAULT_OFFSETS.theta0)
    p.add_argument("--phi0", type=real, default=euler.DEFAULT_OFFSETS.phi0)


def _add_optim(p):
    p.add_argument("--c", type=real, required=True, help="example-system parameter")
    p.add_argument("--T", type=real, required=True, help="evolution time")
    p.add_argument("--slices", type=int, default=10, help="piecewise-constant slices Q")
    p.add_argument("--umax", type=real, default=20.0, help="control bound |u| <= umax")
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--wall-limit", type=float, default=10.0, help="seconds per start")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="symreach", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="stability class of an sp(2,R) element")
    p.add_argument("--matrix", type=matrix, required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("expm", help="closed-form exp(M t)")
    p.add_argument("--matrix", type=matrix, required=True)
    p.add_argument("--t", type=real, default=1.0)
    p.set_defaults(func=cmd_expm)

    p = sub.add_parser("svd", help="Euler decomposition S = R(theta) Z(z) R(phi)")
    p.add_argument("--matrix", type=matrix, required=True)
    _add_offsets(p)
    p.set_defaults(func=cmd_svd)

    p = sub.add_parser("compose", help="matrix from Euler coordinates")
    p.add_argument("--theta", type=real, required=True)
    p.add_argument("--z", type=real, required=True)
    p.add_argument("--phi", type=real, required=True)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("certificate", help="certificate value f (matrix) or f_z (triple)")
    p.add_argument("--matrix", type=matrix)
    p.add_argument("--theta", type=real)
    p.add_argument("--z", type=real)
    p.add_argument("--phi", type=real)
    p.set_defaults(func=cmd_certificate)

    p = sub.add_parser("normalize", help="normal form of an unstable system")
    p.add_argument("--c", type=real, help="use the example system with this c")
    p.add_argument("--A", type=matrix)
    p.add_argument("--B", type=matrix)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("reach", help="optimise a pulse towards an Euler-coordinate target")
    _add_optim(p)
    p.add_argument("--target-theta", type=real, required=True)
    p.add_argument("--target-z", type=real, required=True)
    p.add_argument("--target-phi", type=real, required=True)
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("sweep", help="grid sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--full-grid", action="store_true", help="pi/12 steps, 10 z-levels up to 100")
    p.add_argument("--keep-pulse", action="store_true", help="store pulses in JSON output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="SVG scatter projection of sweep results")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--projection", choices=sorted(explorer.PROJECTIONS), default="theta-phi")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("verify", help="run the randomised property suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0, help="multiplier on sample counts")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("boundary", help="bisect the reach boundary along one axis")
    _add_optim(p)
    p.add_argument("--fix", nargs=2, required=True, metavar="NAME=VALUE")
    p.add_argument("--axis", choices=explorer.AXES, required=True)
    p.add_argument("--bracket", type=real_pair, required=True)
    p.add_argument("--bisect-tol", type=float, default=None)
    p.add_argument("--max-probes", type=int, default=60)
    p.set_defaults(func=cmd_boundary)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help and usage errors
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        code = args.func(args)
    except UsageError as exc:
        print(f"symreach {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"symreach {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SymreachError, ValueError) as exc:
        print(f"symreach {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
