"""Command-line front end: ``schottkylab <command> --group FILE ...``.

Every run writes a JSON manifest (command, group hash, parameters, wall time,
warnings).  Exit codes: 0 success, 1 validation or numeric failure, 2 usage.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import platform
import re
import sys
import time
import warnings
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import scipy

from . import __version__
from .moebius import mobius_classify
from .schottky import GeometryError, SchottkyGroup, cylinder_group, dumps_group, loads_group, symmetric_group
from .schottky import validate_schottky, width_for_translation_length


class UsageError(ValueError):
    pass


class ValidationFailure(RuntimeError):
    pass


# argument parsing helpers


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _positive(text: str) -> float:
    x = _float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be > 0: {text!r}")
    return x


def _rect(text: str):
    from .zeta import parse_rect

    try:
        return parse_rect(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _ladder(text: str) -> List[float]:
    """'a:b:step' (inclusive) or a comma list."""
    try:
        if ":" in text:
            a, b, h = (float(x) for x in text.split(":"))
            if h <= 0 or b < a:
                raise ValueError
            n = int(math.floor((b - a) / h + 1e-9))
            return [a + k * h for k in range(n + 1)]
        vals = [float(x) for x in text.split(",") if x.strip()]
        if not vals:
            raise ValueError
        return vals
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad ladder {text!r}; use a:b:step or t1,t2,...")


def _complex_list(text: str) -> List[complex]:
    try:
        return [complex(x.replace(" ", "").replace("i", "j")) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad complex list {text!r}")


def load_group_arg(text: str):
    """Group file path, or 'cylinder:ELL' / 'symmetric:P:ELL' for built-in families."""
    kind, _, rest = text.partition(":")
    if kind == "cylinder" and rest and not Path(text).exists():
        g = cylinder_group(float(rest))
        return g, dumps_group(g).encode()
    if kind == "symmetric" and rest and not Path(text).exists():
        p, ell = rest.split(":")
        g = symmetric_group(int(p), width_for_translation_length(float(ell)))
        return g, dumps_group(g).encode()
    data = Path(text).read_bytes()
    return loads_group(data.decode()), data


# output


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(type(o).__name__)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _rows_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


class Output:
    """Collects the command's primary output (CSV text or a JSON report)."""

    def __init__(self):
        self.text = ""
        self.summary: Dict = {}
        self.errors: Dict = {}

    def csv(self, writer: Callable, *args):
        # module writers take a path; route them through a temp file
        import tempfile

        with tempfile.TemporaryDirectory() as d:
            path = Path(d) / "out.csv"
            writer(*args, path)
            self.text = path.read_text()

    def table(self, header, rows):
        self.text = _rows_csv(header, rows)

    def report(self, obj):
        self.text = _dump_json(obj)


# subcommands


def cmd_validate(g, args, out: Output):
    rep = validate_schottky(g)
    out.report({"label": g.label, "rank": g.p, "model": g.model, **rep.to_dict()})
    out.summary = {"passed": rep.passed}
    if not rep.passed:
        raise ValidationFailure("group failed validation: " + ", ".join(rep.failures()))


def cmd_dim(g, args, out: Output):
    from .thermo import hausdorff_dimension, pressure
    from .zeta import largest_real_zero

    res = hausdorff_dimension(g, tol=args.tol, n_max=args.n_max, M=args.M)
    p0 = pressure(g, 0.0, args.n_max)
    report = {
        "delta": res.delta,
        "method": res.method,
        "eigenvalue_delta": res.eigenvalue_delta,
        "estimator_spread": res.estimator_spread,
        "n_used": res.n_used,
        "pressure_at_zero": p0.value,
        "log_2p_minus_1": math.log(2 * g.p - 1),
    }
    if args.zero:
        report["largest_real_zero"] = largest_real_zero(g, M=args.M)
    out.report(report)
    out.errors = {"estimator_spread": res.estimator_spread, "pressure_error_bar": p0.error_bar}


def cmd_lengths(g, args, out: Output):
    from .words import length_spectrum, write_spectrum_csv

    spec = length_spectrum(g, args.T, bin_tol=args.bin_tol)
    out.summary = {"entries": len(spec.entries), "primes": len(spec.primes), "complete": spec.complete}
    if args.format == "json":
        out.report(
            {
                "T": spec.T,
                "complete": spec.complete,
                "entries": [
                    {"ell": e.ell, "prime_length": e.prime_length, "k": e.k, "multiplicity": e.multiplicity, "word": str(e.representative)}
                    for e in spec.entries
                ],
            }
        )
    else:
        out.csv(write_spectrum_csv, spec)


def _eval_points(args) -> List[complex]:
    if args.s:
        return list(args.s)
    if args.rect is None:
        raise UsageError("zeta-eval needs --s or --rect")
    a, b, c, d = args.rect
    xs = np.linspace(a, b, args.n) if args.n > 1 else np.array([a])
    ys = np.linspace(c, d, args.n) if args.n > 1 else np.array([c])
    return [complex(x, y) for y in ys for x in xs]


def cmd_zeta_eval(g, args, out: Output):
    from .zeta import zeta_cycle, zeta_fredholm, zeta_product

    methods = ["cycle", "fredholm"] if args.method == "both" else [args.method]
    rows, worst = [], 0.0
    for s in _eval_points(args):
        for m in methods:
            if m == "cycle":
                ev = zeta_cycle(g, s, N=args.N)
            elif m == "fredholm":
                ev = zeta_fredholm(g, s, M=args.M)
            else:
                ev = zeta_product(g, s)
            worst = max(worst, ev.error_estimate)
            rows.append([f"{s.real:.15g}", f"{s.imag:.15g}", ev.method, ev.order, f"{ev.value.real:.15g}", f"{ev.value.imag:.15g}", f"{ev.error_estimate:.3e}"])
    header = ["re", "im", "method", "order", "value_re", "value_im", "error_estimate"]
    if args.format == "json":
        out.report([dict(zip(header, r)) for r in rows])
    else:
        out.table(header, rows)
    out.errors = {"max_error_estimate": worst}


def _search(g, args, rect):
    from .zeta import find_resonances

    return find_resonances(g, rect, grid_step=args.step, M=args.M, threads=args.threads, cell_factor=args.cell_factor)


def cmd_resonances(g, args, out: Output):
    from .zeta import write_resonance_csv

    if args.rect is None:
        raise UsageError("resonances needs --rect")
    res = _search(g, args, args.rect)
    out.summary = {"zeros": len(res), "with_order": sum(r.order for r in res), "winding": res.winding, "evaluations": res.evaluations}
    out.errors = {"max_newton_residual": max((r.newton_residual for r in res), default=0.0)}
    if args.format == "json":
        out.report(
            {
                "contour": res.contour,
                "winding": res.winding,
                "resonances": [{"re": r.s.real, "im": r.s.imag, "order": r.order, "newton_residual": r.newton_residual, "M": r.M} for r in res],
            }
        )
    else:
        out.csv(write_resonance_csv, res)


def read_resonance_csv(path) -> list:
    from .zeta import Resonance

    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                Resonance(
                    complex(float(row["re"]), float(row["im"])),
                    int(row["order"]),
                    float(row.get("newton_residual") or 0.0),
                    (0.0, 0.0, 0.0, 0.0),
                    row.get("method") or "fredholm",
                    int(row.get("M") or 0),
                    int(row.get("box_id") or 0),
                )
            )
    return out


def _delta(g, args) -> float:
    if getattr(args, "delta", None) is not None:
        return args.delta
    from .zeta import eigenvalue_dimension

    return eigenvalue_dimension(g, M=args.M)


def cmd_strip(g, args, out: Output):
    from .zeta import strip_census, theorem_strip

    delta = _delta(g, args)
    bounds = theorem_strip(delta)
    if args.resonances:
        res = read_resonance_csv(args.resonances)
    elif args.rect is not None:
        res = _search(g, args, args.rect)
    else:
        raise UsageError("strip needs --resonances or --rect")
    sigma = bounds.proven if args.sigma is None else args.sigma
    T = args.T if args.T is not None else max((r.s.imag for r in res), default=1.0)
    census = strip_census(res, sigma, T)
    out.report(
        {
            "delta": delta,
            "proven_gap": bounds.proven,
            "conjectural_gap": bounds.conjectural,
            "sigma": census.sigma,
            "T": census.T,
            "count": census.count,
            "distinct": census.distinct,
            "windows": census.windows,
            "counts": census.counts,
            "weyl_exponent": census.weyl_exponent,
        }
    )


def _trace_resonances(g, args, delta):
    from .trace_formula import cylinder_resonances

    if args.resonances:
        return read_resonance_csv(args.resonances)
    if g.cylinder:
        ell = mobius_classify(g.generators[0]).translation_length
        return cylinder_resonances(ell, int(math.ceil(-args.rho)) + 1, args.coverage)
    rect = (args.rho, max(delta, args.rho) + 0.05, 0.0, args.coverage)
    return list(_search(g, args, rect))


def cmd_trace_check(g, args, out: Output):
    from .trace_formula import TestFunction, residual_scaling, resonance_check, write_trace_report_csv
    from .words import length_spectrum

    delta = _delta(g, args) if g.p > 1 else 0.0
    res = _trace_resonances(g, args, delta)
    spec = length_spectrum(g, max(args.T) + 2.0)
    reports = []
    for T in args.T:
        tf = TestFunction(args.xi, T)
        reports.append(
            resonance_check(
                g, tf, args.rho, res, args.coverage, eps=args.eps, delta=delta, tail_tol=args.tail_tol, spectrum=spec, M=args.M
            )
        )
    out.errors = {"max_residual": max(r.residual_abs for r in reports), "max_tail": max(r.tail_estimate for r in reports)}
    if args.scaling and len(args.T) >= 2:
        sc = residual_scaling(g, args.rho, res, args.T[0], args.T[-1], spectrum=spec)
        out.summary = {"observed_ratio": sc.observed_ratio, "predicted_ratio": sc.predicted_ratio, "discrepancy": sc.discrepancy}
    if args.format == "json":
        out.report(
            [
                {
                    "T": r.T,
                    "rho": r.rho,
                    "geodesic_side": r.geodesic_side,
                    "resonance_side": r.resonance_side,
                    "residual_abs": r.residual_abs,
                    "bound_estimate": r.bound_estimate,
                    "tail_estimate": r.tail_estimate,
                }
                for r in reports
            ]
        )
    else:
        out.csv(write_trace_report_csv, reports)


def cmd_mean_square(g, args, out: Output):
    from .trace_formula import mean_square_G, mean_square_quadrature

    ms = mean_square_G(g, args.sigma, args.T)
    rep = {"sigma": ms.sigma, "T": ms.T, "G": ms.G, "diagonal": ms.diagonal, "n_lengths": ms.n_lengths}
    if args.quadrature:
        q = mean_square_quadrature(g, args.sigma, args.T)
        rep["quadrature"] = q
        out.errors = {"closed_form_vs_quadrature": abs(q - ms.G)}
    out.report(rep)


def cmd_moments(g, args, out: Output):
    from .trace_formula import multiplicity_moments

    mm = multiplicity_moments(g, args.T, ladder=args.ladder)
    rows = [[f"{t:.10g}", m2, d] for t, m2, d in zip(mm.ladder, mm.m2_ladder, mm.distinct_ladder)]
    if args.format == "csv":
        out.table(["T", "m2_sum", "distinct"], rows)
    else:
        out.report(
            {
                "T": mm.T,
                "m_sum": mm.m_sum,
                "m2_sum": mm.m2_sum,
                "distinct": mm.distinct,
                "ladder": mm.ladder,
                "m2_ladder": mm.m2_ladder,
                "distinct_ladder": mm.distinct_ladder,
                "m2_exponent": mm.m2_exponent,
                "distinct_exponent": mm.distinct_exponent,
                "trace_cluster_max": mm.trace_cluster_max,
                "integer_trace": g.integer_trace,
            }
        )
    out.summary = {"m2_exponent": mm.m2_exponent, "distinct_exponent": mm.distinct_exponent}


def _points(g, args):
    from .lattice import default_points

    z, zp = default_points(g)
    return (args.z if args.z is not None else z), (args.zp if args.zp is not None else zp)


def cmd_count(g, args, out: Output):
    from .lattice import count_ladder, growth_exponent, write_counting_csv

    z, zp = _points(g, args)
    counts = count_ladder(g, z, zp, args.T, budget=int(args.budget))
    if len(counts) >= 2:
        out.summary = {"growth_exponent": growth_exponent(counts)}
    if args.format == "json":
        out.report({"z": z, "zp": zp, "counts": [{"T": c.T, "N": c.N} for c in counts], **out.summary})
    else:
        out.csv(write_counting_csv, counts)


def cmd_residuals(g, args, out: Output):
    from .lattice import count_ladder, fit_expansion, residual_analysis, write_residual_csv

    z, zp = _points(g, args)
    delta = _delta(g, args)
    exps = list(args.exponents) if args.exponents else [complex(delta)]
    counts = count_ladder(g, z, zp, args.T, budget=int(args.budget))
    fit_from = [c for c in counts if c.T >= args.fit_from]
    model = fit_expansion(fit_from, exps, delta=delta)
    rep = residual_analysis(counts, model, betas=args.betas)
    out.summary = {"sign_changes": rep.sign_changes, "sup_weighted": dict(zip(map(str, rep.betas), rep.sup_weighted))}
    if args.format == "json":
        out.report({"T": rep.T, "N": rep.N, "model_value": rep.model_value, "residual": rep.residual, **out.summary})
    else:
        out.csv(write_residual_csv, rep)


# parser


def _common(p: argparse.ArgumentParser, fmt: str = "csv"):
    p.add_argument("--config", help="JSON object of flag values (keys are flag names); explicit flags win")
    p.add_argument("--group", required=True, help="group file (JSON), or cylinder:ELL / symmetric:P:ELL")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--manifest", help="manifest path (default: OUT.manifest.json, or stderr)")
    p.add_argument("--format", choices=("csv", "json"), default=fmt)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="parallelism cap (default: all cores)")
    p.add_argument("--M", type=int, default=None, help="collocation order per disc (default: from the contraction ratio)")


def _search_flags(p):
    p.add_argument("--rect", type=_rect, help="re_min,re_max,im_min,im_max")
    p.add_argument("--step", type=_positive, default=0.05, help="grid step")
    p.add_argument("--cell-factor", type=int, default=4)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="schottkylab", description="Numerical lab for Schottky surfaces.")
    ap.add_argument("--version", action="version", version=f"schottkylab {__version__}")
    sub = ap.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("validate", help="check disjointness, orthogonality and pairing")
    _common(p, "json")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("dim", help="dimension of the limit set")
    _common(p, "json")
    p.add_argument("--tol", type=_positive, default=1e-7)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--zero", action="store_true", help="also locate the largest real zero of Z")
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("lengths", help="length spectrum with multiplicities")
    _common(p)
    p.add_argument("--T", type=_positive, required=True)
    p.add_argument("--bin-tol", type=_positive, default=1e-9)
    p.set_defaults(func=cmd_lengths)

    p = sub.add_parser("zeta-eval", help="evaluate Z(s) by cycle expansion, Fredholm determinant or Euler product")
    _common(p)
    p.add_argument("--s", type=_complex_list, help="comma list of points, e.g. 0.3+2j,0.5")
    p.add_argument("--rect", type=_rect, help="evaluate on an n x n grid over this rectangle")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--method", choices=("cycle", "fredholm", "product", "both"), default="both")
    p.add_argument("--N", type=int, default=12, help="cycle expansion order")
    p.set_defaults(func=cmd_zeta_eval)

    p = sub.add_parser("resonances", help="zeros of Z in a rectangle")
    _common(p)
    _search_flags(p)
    p.set_defaults(func=cmd_resonances)

    p = sub.add_parser("strip", help="theorem strip and resonance census")
    _common(p, "json")
    _search_flags(p)
    p.add_argument("--resonances", help="resonance CSV (instead of searching --rect)")
    p.add_argument("--delta", type=_float, default=None)
    p.add_argument("--sigma", type=_float, default=None, help="census abscissa (default: proven gap)")
    p.add_argument("--T", type=_positive, default=None, help="census height (default: highest resonance)")
    p.set_defaults(func=cmd_strip)

    p = sub.add_parser("trace-check", help="both sides of the approximate trace formula")
    _common(p)
    _search_flags(p)
    p.add_argument("--T", type=_ladder, required=True, help="T values (a:b:step or list)")
    p.add_argument("--rho", type=_float, required=True)
    p.add_argument("--xi", type=_float, default=0.0)
    p.add_argument("--coverage", type=_positive, default=60.0, help="resonances are complete up to this height")
    p.add_argument("--eps", type=_positive, default=0.01)
    p.add_argument("--tail-tol", type=_positive, default=1e-10)
    p.add_argument("--delta", type=_float, default=None)
    p.add_argument("--resonances", help="resonance CSV (default: search or closed form for cylinders)")
    p.add_argument("--scaling", action="store_true", help="sup-over-xi residual scaling between first and last T")
    p.set_defaults(func=cmd_trace_check)

    p = sub.add_parser("mean-square", help="mean square of the smoothed length sum")
    _common(p, "json")
    p.add_argument("--sigma", type=_positive, required=True)
    p.add_argument("--T", type=_positive, required=True)
    p.add_argument("--quadrature", action="store_true", help="also integrate over xi directly")
    p.set_defaults(func=cmd_mean_square)

    p = sub.add_parser("moments", help="multiplicity moments over a T-ladder")
    _common(p, "json")
    p.add_argument("--T", type=_positive, required=True)
    p.add_argument("--ladder", type=_ladder, default=None)
    p.set_defaults(func=cmd_moments)

    for name, func, helptext in (
        ("count", cmd_count, "orbit counting N(T; z, z')"),
        ("residuals", cmd_residuals, "counting residuals against a fitted expansion"),
    ):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        p.add_argument("--T", type=_ladder, required=True, help="T values (a:b:step or list)")
        p.add_argument("--z", type=complex, default=None)
        p.add_argument("--zp", type=complex, default=None)
        p.add_argument("--budget", type=_positive, default=5e6)
        if name == "residuals":
            p.add_argument("--delta", type=_float, default=None)
            p.add_argument("--exponents", type=_complex_list, default=None, help="fixed exponents (default: delta)")
            p.add_argument("--fit-from", type=_float, default=0.0)
            p.add_argument("--betas", type=_ladder, default=[0.0, 0.05, 0.1, 0.15, 0.2, 0.25])
        p.set_defaults(func=func)
    return ap


_NEGATIVE_VALUE = re.compile(r"^-(\d|\.\d|inf|nan)")


def _join_negative_values(argv: Sequence[str]) -> List[str]:
    """'--rect -0.5,0.5,0,7' -> '--rect=-0.5,0.5,0,7' (argparse would read a flag)."""
    out, i = [], 0
    argv = list(argv)
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and _NEGATIVE_VALUE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _config_flags(path: str) -> List[str]:
    cfg = json.loads(Path(path).read_text())
    if not isinstance(cfg, dict):
        raise ValueError("config must be a JSON object")
    flags = []
    for k, v in cfg.items():
        flag = "--" + str(k).replace("_", "-")
        if isinstance(v, bool):
            flags += [flag] if v else []
        elif isinstance(v, list):
            flags.append(f"{flag}={','.join(map(str, v))}")
        else:
            flags.append(f"{flag}={v}")
    return flags


def _parse(argv: Sequence[str]) -> argparse.Namespace:
    """Parse argv; values from --config FILE are inserted right after the
    command, so explicit flags (which come later) override them."""
    ap = build_parser()
    argv = _join_negative_values(argv)
    config, rest = None, []
    it = iter(argv)
    for tok in it:
        if tok == "--config":
            config = next(it, None)
            if config is None:
                ap.error("--config needs a file")
        elif tok.startswith("--config="):
            config = tok.split("=", 1)[1]
        else:
            rest.append(tok)
    if config is not None:
        try:
            flags = _config_flags(config)
        except (OSError, ValueError) as exc:
            ap.error(f"cannot read config {config}: {exc}")
        commands = ap._subparsers._group_actions[0].choices
        at = next((i for i, t in enumerate(rest) if t in commands), None)
        if at is None:
            ap.error("no command given")
        rest = rest[: at + 1] + flags + rest[at + 1 :]
    args = ap.parse_args(rest)
    args.config = config
    if getattr(args, "threads", 1) < 1:
        ap.error("--threads must be >= 1")
    return args


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "manifest")}


def run(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
    except SystemExit as exc:  # argparse: 0 for --help/--version, 2 otherwise
        return int(exc.code or 0)

    t0 = time.perf_counter()
    out = Output()
    code, group_hash, message = 0, None, None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            g, raw = load_group_arg(args.group)
            group_hash = hashlib.sha256(raw).hexdigest()
            args.func(g, args, out)
        except UsageError as exc:
            code, message = 2, f"usage error: {exc}"
        except (ValidationFailure, GeometryError) as exc:
            code, message = 1, str(exc)
        except (OSError, ValueError, KeyError) as exc:
            code, message = 1, f"{type(exc).__name__}: {exc}"
        except (RuntimeError, ArithmeticError) as exc:
            code, message = 1, f"{type(exc).__name__}: {exc}"
    if code == 2:
        print(message, file=sys.stderr)
        build_parser().print_usage(sys.stderr)
        return 2

    if out.text:
        if args.out:
            Path(args.out).write_text(out.text)
        else:
            sys.stdout.write(out.text)
    if message:
        print(message, file=sys.stderr)

    seen = []
    for w in caught:
        text = f"{w.category.__name__}: {w.message}"
        if text not in seen:
            seen.append(text)
    manifest = {
        "command": args.command,
        "group_hash": group_hash,
        "params": _params(args),
        "wall_time_s": time.perf_counter() - t0,
        "warnings": seen,
        "exit_code": code,
        "error": message,
        "summary": out.summary,
        "error_estimates": out.errors,
        "versions": {"schottkylab": __version__, "numpy": np.__version__, "scipy": scipy.__version__, "python": platform.python_version()},
    }
    text = _dump_json(manifest)
    target = args.manifest or (args.out + ".manifest.json" if args.out else None)
    if target:
        Path(target).write_text(text)
    else:
        sys.stderr.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
