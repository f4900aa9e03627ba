"""Command-line entry point: ``kostlab <command> [flags]``.

Exit status is 0 on success, 2 for bad flags or configs and 3 for numerical
failures. Errors go to stderr as ``E:<code>: message``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import closedforms as cf
from .curvetopo import TopologyOptions, b0_affine, b0_projective
from .devlab.config import EXPERIMENT_KINDS, ConfigError, normalize_config
from .devlab.experiments import run_config
from .devlab.records import atomic_write_text, dumps, write_record
from .ensemble import KostlanSampler
from .interval import Box2
from .polycore import Poly1, Poly2
from .roots1d import RootFindingError, complex_roots, count_real_roots, isolate_real_roots

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --- flag parsing helpers ----------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _a_list(text: str) -> list:
    out = []
    for t in (t.strip() for t in text.split(",")):
        if not t:
            continue
        try:
            out.append(t if "/" in t else json.loads(t))
        except json.JSONDecodeError:
            raise argparse.ArgumentTypeError(f"bad a-value {t!r}") from None
    return out


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2^64)")
    return v


def _terms(text: str) -> dict:
    """``"j,k:c;j,k:c"`` for ``sum c x^j y^k``."""
    terms = {}
    try:
        for part in text.split(";"):
            if part.strip():
                mono, c = part.split(":")
                j, k = (int(v) for v in mono.split(","))
                terms[(j, k)] = terms.get((j, k), 0.0) + float(c)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected terms like '2,0:1;0,2:1;0,0:-1', got {text!r}") from None
    return terms


def _common(p: argparse.ArgumentParser, seed_required: bool = True) -> None:
    g = p.add_argument_group("run control")
    g.add_argument("--seed", type=_seed, help="master seed (required)" if seed_required else "accepted for uniformity; unused")
    g.add_argument("--out", help="output path (JSON; experiments also write a .csv next to it)")


def _experiment_flags(p: argparse.ArgumentParser, kind: str) -> None:
    _common(p)
    g = p.add_argument_group("experiment")
    g.add_argument("--config", help="JSON config file; flags given here override its keys")
    g.add_argument("--dump-config", action="store_true", help="print the resolved config as JSON and exit")
    g.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")
    g.add_argument("--d", type=_int_list, help="degree, or a comma-separated list of degrees")
    g.add_argument("--trials", type=int, help="number of samples per degree")
    if kind in ("tail1d", "large-dev"):
        g.add_argument("--eps", type=_float_list, help="comma-separated thresholds")
    if kind == "tail2d":
        g.add_argument("--a", type=_a_list, help="comma-separated a-values (fractions like 1/2 allowed)")
        g.add_argument("--mode", choices=["affine", "projective"], help="count in a window of R^2 or on RP^2")
        g.add_argument("--max-depth", type=int, help="quadtree depth limit")
        g.add_argument("--edge-root-tol", type=float, help="edge root isolation tolerance")
        g.add_argument("--max-attempts", type=int, help="retries after degenerate position")
        g.add_argument("--window", type=_float_list, help="affine window x0,x1,y0,y1")
    if kind in ("lelong", "large-dev"):
        g.add_argument("--quad-grid", type=int, help="quadrature cells per side")
        g.add_argument("--center", type=_float_list, help="cutoff centre re,im")
        g.add_argument("--radius", type=float, help="cutoff radius")
    if kind == "lelong":
        g.add_argument("--compare-refined", action=argparse.BooleanOptionalAction, default=None,
                       help="also evaluate on a grid twice as fine")
    if kind == "equidist":
        g.add_argument("--bands", type=int, help="number of latitude bands (even)")
        g.add_argument("--exclusion", type=float, help="half-width of the excluded strip around the real circle")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kostlab", description="Random real polynomials in the Kostlan ensemble.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command", parser_class=_Parser)

    p = sub.add_parser("sample", help="draw Kostlan samples as JSON lines")
    _common(p)
    p.add_argument("--n", type=int, choices=[1, 2], default=1, help="number of affine variables")
    p.add_argument("--d", type=int, required=True, help="degree")
    p.add_argument("--index", type=int, default=0, help="first sample index")
    p.add_argument("--count", type=int, default=1, help="number of consecutive samples")

    p = sub.add_parser("roots", help="count, isolate and locate roots of a univariate polynomial")
    _common(p)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--coeffs", type=_float_list, help="coefficients, constant term first")
    src.add_argument("--d", type=int, help="degree of a Kostlan sample drawn from --seed and --index")
    p.add_argument("--index", type=int, default=0, help="sample index")
    p.add_argument("--method", choices=["auto", "sturm", "float", "circle"], default="auto", help="real-root counter")
    p.add_argument("--complex", action="store_true", help="also report all complex roots")

    p = sub.add_parser("curve-topo", help="connected components of a real plane curve")
    _common(p)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--terms", type=_terms, help="polynomial as 'j,k:c;...' for sum c x^j y^k")
    src.add_argument("--d", type=int, help="degree of a Kostlan sample drawn from --seed and --index")
    p.add_argument("--index", type=int, default=0, help="sample index")
    p.add_argument("--mode", choices=["affine", "projective"], default="projective", help="count in a window of R^2 or on RP^2")
    p.add_argument("--window", type=_float_list, help="affine window x0,x1,y0,y1 (default -8,8,-8,8)")
    p.add_argument("--max-depth", type=int, default=TopologyOptions.max_depth, help="quadtree depth limit")
    p.add_argument("--edge-root-tol", type=float, default=TopologyOptions.edge_root_tol, help="edge root isolation tolerance")
    p.add_argument("--max-attempts", type=int, default=TopologyOptions.max_attempts, help="retries after degenerate position")
    p.add_argument("--graph", action="store_true", help="include the arc graph in the output")

    helps = {
        "mean-roots": "mean number of real roots",
        "tail1d": "tail of the real-root count",
        "tail2d": "distribution of plane-curve components",
        "lelong": "current-balance residuals",
        "large-dev": "tail of the log-norm deviation variable",
        "equidist": "latitude equidistribution of complex roots",
    }
    for kind in EXPERIMENT_KINDS:
        _experiment_flags(sub.add_parser(kind, help=helps[kind]), kind)

    p = sub.add_parser("closed-form", help="evaluate a closed-form quantity")
    _common(p, seed_required=False)
    cfs = p.add_subparsers(dest="quantity", required=True, metavar="quantity", parser_class=_Parser)
    q = cfs.add_parser("moment-bound", help="bound on E ||sigma(z)||^(2m)")
    q.add_argument("--m", type=int, required=True, help="moment order")
    q.add_argument("--k", type=int, required=True, help="dimension of the projective space")
    q.add_argument("--tau", type=float, required=True, help="||tau(z)|| at the point, in [0, 1)")
    q = cfs.add_parser("expected-log-norm", help="E log ||sigma(z)||^2 for degree one")
    q.add_argument("--k", type=int, required=True, help="dimension of the projective space")
    g = q.add_mutually_exclusive_group(required=True)
    g.add_argument("--tau", type=float, help="||tau(z)|| at the point")
    g.add_argument("--r", type=float, help="use the point [1 : i r : 0 ...]")
    q = cfs.add_parser("tau-phi", help="||tau o Phi_d|| at a point")
    q.add_argument("--geometry", choices=["projective", "ellipsoid", "hyperboloid"], required=True)
    q.add_argument("--point", required=True, help="JSON: list of [re, im] pairs (hyperboloid: two such lists)")
    q.add_argument("--d", type=int, required=True, help="degree of the embedding")
    q.add_argument("--a", type=int, default=1, help="hyperboloid bidegree, first factor")
    q.add_argument("--b", type=int, default=1, help="hyperboloid bidegree, second factor")
    q = cfs.add_parser("harnack", help="Harnack bound of plane curves")
    q.add_argument("--d", type=int, required=True, help="curve degree")
    q = cfs.add_parser("maximality-threshold", help="smallest b0 counted as near-maximal")
    q.add_argument("--d", type=int, required=True, help="curve degree")
    q.add_argument("--a", required=True, help="number or fraction like 1/2")
    return parser


# --- command bodies ------------------------------------------------------------------------


def _emit(obj, out: str | None) -> None:
    text = dumps(obj)
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _need_seed(args) -> int:
    if args.seed is None:
        raise UsageError("--seed is required")
    return args.seed


def _cmd_sample(args) -> None:
    seed = _need_seed(args)
    if args.count < 1 or args.index < 0:
        raise ConfigError("--count must be positive and --index non-negative")
    sampler = KostlanSampler(args.n, args.d)
    lines = [json.dumps(sampler.sample(seed, i).to_json()) for i in range(args.index, args.index + args.count)]
    text = "\n".join(lines) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)


def _cmd_roots(args) -> None:
    seed = _need_seed(args)
    if args.coeffs is not None:
        p = Poly1(args.coeffs)
        origin = {"coeffs": list(args.coeffs)}
    elif args.d is not None:
        s = KostlanSampler(1, args.d).sample(seed, args.index)
        p = s.to_poly()
        origin = {"sample": s.to_json()}
    else:
        raise UsageError("give --coeffs or --d")
    if p.is_zero:
        raise ConfigError("the zero polynomial has infinitely many roots")
    out = {"input": origin, "degree": p.d, "degree_drop": p.degree_drop, "method": args.method,
           "real_root_count": count_real_roots(p, args.method)}
    out["brackets"] = [[float(b.lo), float(b.hi), b.multiple] for b in isolate_real_roots(p)]
    if args.complex:
        z = complex_roots(p)
        out["complex_roots"] = [[float(v.real), float(v.imag)] for v in z]
    _emit(out, args.out)


def _cmd_curve_topo(args) -> None:
    seed = _need_seed(args)
    if args.terms is not None:
        d = max(j + k for j, k in args.terms)
        p = Poly2.from_terms(d, args.terms)
        origin, index = {"terms": [[j, k, c] for (j, k), c in sorted(args.terms.items())]}, args.index
    elif args.d is not None:
        s = KostlanSampler(2, args.d).sample(seed, args.index)
        p, origin, index = s.to_poly(), {"sample": s.to_json()}, args.index
    else:
        raise UsageError("give --terms or --d")
    opts = TopologyOptions(args.max_depth, args.edge_root_tol, args.max_attempts)
    if args.mode == "projective":
        if args.window is not None:
            raise UsageError("--window applies to affine mode only")
        r = b0_projective(p, opts, seed=seed, index=index)
    else:
        window = Box2.from_bounds(*args.window) if args.window else None
        r = b0_affine(p, window, opts, seed=seed, index=index)
    _emit({"input": origin, "mode": args.mode, **r.to_json(include_graph=args.graph)}, args.out)


_FLAG_KEYS = [("trials", "trials"), ("mode", "mode")]
_TOPO_FLAGS = [("max_depth", "max_depth"), ("edge_root_tol", "edge_root_tol"), ("max_attempts", "max_attempts"), ("window", "window")]
_QUAD_FLAGS = [("quad_grid", "quad_grid"), ("center", "center"), ("radius", "radius"), ("compare_refined", "compare_refined")]
_EQ_FLAGS = [("bands", "bands"), ("exclusion", "exclusion")]


def experiment_config(args, kind: str) -> dict:
    """Merge ``--config`` with explicit flags and normalise."""
    raw: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        if raw.get("kind", kind) != kind:
            raise ConfigError(f"config is for {raw.get('kind')!r}, not {kind!r}")
    raw["kind"] = kind
    if args.seed is not None:
        raw["seed"] = args.seed
    if "seed" not in raw:
        raise UsageError("--seed is required")
    if args.d is not None:
        raw.pop("d", None)
        raw["d_list"] = args.d
    for flag, key in _FLAG_KEYS:
        if getattr(args, flag, None) is not None:
            raw[key] = getattr(args, flag)
    thresholds = getattr(args, "eps", None) if kind != "tail2d" else getattr(args, "a", None)
    if thresholds is not None:
        raw["thresholds"] = thresholds
    for group, flags in (("topology_opts", _TOPO_FLAGS), ("quadrature_opts", _QUAD_FLAGS), ("equidist_opts", _EQ_FLAGS)):
        for flag, key in flags:
            if getattr(args, flag, None) is not None:
                raw.setdefault(group, {})[key] = getattr(args, flag)
    return normalize_config(raw)


def _cmd_experiment(args) -> None:
    kind = args.command
    cfg = experiment_config(args, kind)
    if args.dump_config:
        _emit(cfg, args.out)
        return
    if args.threads < 1:
        raise ConfigError("--threads must be at least 1")
    record = run_config(cfg, threads=args.threads)
    if args.out:
        write_record(record, args.out)
    else:
        sys.stdout.write(dumps(record.to_json()))


def _parse_point(text: str, geometry: str):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        raise ConfigError(f"--point is not valid JSON: {text!r}") from None

    def vec(v):
        return np.array([complex(*c) if isinstance(c, list) else complex(c) for c in v])

    if geometry == "hyperboloid":
        if len(obj) != 2:
            raise ConfigError("hyperboloid points are a pair of coordinate lists")
        return vec(obj[0]), vec(obj[1])
    return vec(obj)


def _cmd_closed_form(args) -> None:
    q = args.quantity
    if q == "moment-bound":
        value = cf.moment_bound(args.m, args.k, args.tau)
    elif q == "expected-log-norm":
        tau = args.tau if args.tau is not None else cf.slice_tau(args.r)
        value = cf.expected_log_norm(args.k, tau)
    elif q == "tau-phi":
        point = _parse_point(args.point, args.geometry)
        if args.geometry == "projective":
            g = cf.projective_space(len(point) - 1)
        elif args.geometry == "ellipsoid":
            g = cf.ellipsoid_quadric(len(point) - 2)
        else:
            g = cf.hyperboloid(args.a, args.b)
        value = cf.tau_phi_norm(g, point, args.d)
    elif q == "harnack":
        value = cf.harnack_bound_plane(args.d)
    else:
        try:
            a = Fraction(args.a)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"bad a-value {args.a!r}") from None
        value = cf.maximality_threshold(args.d, a)
    text = _format_number(value)
    print(text)
    if args.out:
        atomic_write_text(args.out, dumps({"quantity": q, "value": value}))


def _format_number(v) -> str:
    if isinstance(v, int) or (isinstance(v, float) and v.is_integer() and math.isfinite(v) and abs(v) < 2**53):
        return str(int(v))
    return repr(float(v))


COMMANDS = {
    "sample": _cmd_sample,
    "roots": _cmd_roots,
    "curve-topo": _cmd_curve_topo,
    "closed-form": _cmd_closed_form,
    **{kind: _cmd_experiment for kind in EXPERIMENT_KINDS},
}


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        COMMANDS[args.command](args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (UsageError, ConfigError, ValueError) as exc:
        print(f"E:{EXIT_CONFIG}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RootFindingError, FloatingPointError, ArithmeticError) as exc:
        print(f"E:{EXIT_NUMERIC}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"E:{EXIT_CONFIG}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
