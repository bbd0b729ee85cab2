"""latconv command line: analysis reports, power/attractor/legendre grids,
bound and stability diagnostics, and the builtin example corpus.

Exit codes: 0 success, 2 usage error, 3 verdict failure (bound violation or
instability), 4 resource-cap error.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

import numpy as np

from . import _config, examples
from .attractor import attractor_grid, llt_approx
from .errors import ResourceLimitError
from .expansion import analyze
from .lattice import norm_linf, power, read_function, write_function
from .legendre import ConjugateEvaluator
from .symbol import SymbolView, check_von_neumann
from .verify import (gaussian_bound_fit, derivative_bound_fit, llt_error_ladder,
                     stability_report, subexp_bound_fit, sup_decay_report,
                     theta, walk_profile)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERDICT = 3
EXIT_RESOURCE = 4


def _fmt(x):
    return f"{x:.17g}"


def _load_function(args):
    if args.example:
        return examples.get(args.example)
    if args.input:
        return read_function(args.input)
    raise SystemExit2("one of --example or --input is required")


class SystemExit2(Exception):
    pass


def _parse_n_list(spec):
    out = []
    for token in spec.split(","):
        token = token.strip()
        if ":" in token:
            parts = [int(t) for t in token.split(":")]
            if len(parts) == 2:
                lo, hi, step = parts[0], parts[1], 1
            elif len(parts) == 3:
                lo, hi, step = parts
            else:
                raise SystemExit2(f"bad n range {token!r}")
            out.extend(range(lo, hi + 1, step))
        else:
            out.append(int(token))
    if not out or min(out) < 1:
        raise SystemExit2("n values must be positive")
    return sorted(set(out))


def _parse_window(spec, dim):
    parts = spec.split(",")
    if len(parts) != dim:
        raise SystemExit2(f"window needs {dim} axis ranges, got {len(parts)}")
    out = []
    for p in parts:
        a, _, b = p.partition(":")
        out.append((int(a), int(b)))
    return out


def _out_path(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def _write_report_csv(path, report):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# verdict: {report.verdict}\n")
        for key, val in sorted(report.constants.items()):
            fh.write(f"# {key}: {val}\n")
        fh.write(",".join(report.columns) + "\n")
        for row in report.rows:
            fh.write(",".join(_fmt(float(v)) if isinstance(v, (float, np.floating))
                              else str(v) for v in row) + "\n")


def _write_pgm(path, field, label):
    lo, hi = float(field.min()), float(field.max())
    span = hi - lo if hi > lo else 1.0
    scaled = np.round((field - lo) / span * 255.0).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{field.shape[1]} {field.shape[0]}\n255\n".encode())
        fh.write(scaled.tobytes())
    with open(path + ".txt", "w", encoding="utf-8") as fh:
        fh.write(f"field: {label}\nmin: {_fmt(lo)}\nmax: {_fmt(hi)}\n"
                 "mapping: linear min->0 max->255, row-major, origin at "
                 "window lower corner\n")


def _grid_field(f, window):
    lo = np.array([w[0] for w in window])
    shape = tuple(w[1] - w[0] + 1 for w in window)
    out = np.zeros(shape, dtype=np.complex128)
    for p, v in zip(f.points, f.values):
        idx = tuple(int(c - l) for c, l in zip(p, lo))
        if all(0 <= i < s for i, s in zip(idx, shape)):
            out[idx] = v
    return out


def cmd_analyze(args):
    f = _load_function(args)
    ana = analyze(f)
    print(f"normalization scale = {_fmt(ana.scale)}")
    print(f"omega points: {len(ana.omega)}")
    rows = []
    for pa in ana.points:
        rows.append(tuple(float(c) for c in pa.xi)
                    + (float(pa.value.real), float(pa.value.imag), pa.phase))
    d = f.dim
    header = ",".join([f"xi_{j + 1}" for j in range(d)] + ["re", "im", "omega"])
    _write_csv(_out_path(args, "omega.csv"), header, rows)
    cls_rows = []
    coef_rows = []
    for i, pa in enumerate(ana.points):
        cls = pa.classification
        print(f"-- point {i}: xi = ({', '.join(_fmt(float(c)) for c in pa.xi)})")
        print(f"   verdict = {cls.verdict}")
        if cls.alpha is not None:
            print(f"   alpha = ({', '.join(_fmt(float(a)) for a in cls.alpha)})")
        if cls.ok:
            E = cls.poly.E
            print("   E = " + "  ".join(_fmt(float(v)) for v in E.reshape(-1)))
            mu = cls.mu
            print(f"   mu = {mu.numerator}/{mu.denominator}")
            print(f"   weights = {cls.poly.weights}")
            for beta, c in sorted(cls.poly.coeffs.items()):
                print(f"   P[{','.join(str(b) for b in beta)}] = "
                      f"{_fmt(c.real)} {_fmt(c.imag)}")
                coef_rows.append((i,) + beta + (c.real, c.imag))
            cls_rows.append((i, cls.verdict, f"{mu.numerator}/{mu.denominator}")
                            + tuple(float(a) for a in cls.alpha)
                            + tuple(float(v) for v in E.reshape(-1)))
        else:
            print(f"   reason: {cls.diagnostics.get('reason', '')}")
            cls_rows.append((i, cls.verdict, "") + (float("nan"),) * (d + d * d))
    _write_csv(_out_path(args, "classification.csv"),
               ",".join(["point", "verdict", "mu"]
                        + [f"alpha_{j + 1}" for j in range(d)]
                        + [f"E_{j + 1}{k + 1}" for j in range(d) for k in range(d)]),
               cls_rows)
    _write_csv(_out_path(args, "p_coefficients.csv"),
               ",".join(["point"] + [f"beta_{j + 1}" for j in range(d)]
                        + ["re", "im"]),
               coef_rows)
    from .homogeneous import write_polynomial
    for i, pa in enumerate(ana.points):
        if pa.classification.ok:
            write_polynomial(pa.classification.poly,
                             _out_path(args, f"polynomial_{i}.csv"))
    if ana.mu_phi is not None:
        print(f"mu_phi = {ana.mu_phi.numerator}/{ana.mu_phi.denominator}")
        print("minimal points: "
              + "; ".join(f"({', '.join(_fmt(float(c)) for c in ana.points[i].xi)})"
                          for i in ana.minimal))
    else:
        print(f"overall verdict: {ana.verdict}")
    return EXIT_OK


def cmd_power(args):
    f = _load_function(args)
    for n in _parse_n_list(args.n):
        g = power(f, n, method=args.method)
        if args.window:
            window = _parse_window(args.window, f.dim)
        else:
            lo, hi = g.extent()
            window = list(zip(lo.tolist(), hi.tolist()))
        rows = [tuple(int(c) for c in p) + (v.real, v.imag)
                for p, v in zip(g.points, g.values)
                if all(a <= c <= b for c, (a, b) in zip(p, window))]
        header = ",".join([f"x_{j + 1}" for j in range(f.dim)] + ["re", "im"])
        _write_csv(_out_path(args, f"power_n{n}.csv"), header, rows)
        print(f"n = {n}: support {len(g)}, sup |phi^n| = {_fmt(norm_linf(g))}")
        if args.pgm:
            if f.dim != 2:
                raise SystemExit2("graymap output needs a 2-d function")
            field = _grid_field(g, window)
            _write_pgm(_out_path(args, f"power_n{n}_re.pgm"),
                       field.real, "Re phi^n")
            _write_pgm(_out_path(args, f"power_n{n}_abs.pgm"),
                       np.abs(field), "abs phi^n")
    return EXIT_OK


def cmd_llt(args):
    f = _load_function(args)
    ana = analyze(f)
    if ana.mu_phi is None:
        print(f"analysis verdict: {ana.verdict}; no local limit")
        return EXIT_VERDICT
    n_values = _parse_n_list(args.n)
    window = _parse_window(args.window, f.dim) if args.window else None
    rep = llt_error_ladder(f, ana, n_values, window=window)
    _write_report_csv(_out_path(args, "llt_error.csv"), rep)
    for n, err, scaled in rep.rows:
        print(f"n={n}: sup error = {_fmt(err)}, scaled = {_fmt(scaled)}")
    print(f"verdict: {rep.verdict}")
    n_last = n_values[-1]
    win = window or _default_window(ana, n_last)
    approx = llt_approx(ana, n_last, win)
    rows = [tuple(int(c) for c in p) + (v.real, v.imag)
            for p, v in zip(approx.points, approx.values)]
    header = ",".join([f"x_{j + 1}" for j in range(f.dim)] + ["re", "im"])
    _write_csv(_out_path(args, f"llt_approx_n{n_last}.csv"), header, rows)
    if getattr(args, "pgm", False) and f.dim == 2:
        field = _grid_field(approx, win)
        _write_pgm(_out_path(args, f"llt_approx_n{n_last}_re.pgm"),
                   field.real, "Re llt approximation")
        _write_pgm(_out_path(args, f"llt_approx_n{n_last}_abs.pgm"),
                   np.abs(field), "abs llt approximation")
    return EXIT_OK


def _default_window(ana, n):
    from .verify import default_llt_window
    return default_llt_window(ana, n)


def cmd_attractor(args):
    f = _load_function(args)
    ana = analyze(f)
    if ana.mu_phi is None:
        print(f"analysis verdict: {ana.verdict}; no attractor")
        return EXIT_VERDICT
    n = _parse_n_list(args.n)[-1]
    window = (_parse_window(args.window, f.dim) if args.window
              else _default_window(ana, n))
    pa = ana.minimal_points()[0]
    grid = attractor_grid(pa.classification.poly, n, window)
    lo = grid.lo
    rows = []
    for idx in np.ndindex(grid.values.shape):
        v = grid.values[idx]
        rows.append(tuple(int(lo[j] + idx[j]) for j in range(f.dim))
                    + (v.real, v.imag))
    header = ",".join([f"x_{j + 1}" for j in range(f.dim)] + ["re", "im"])
    _write_csv(_out_path(args, f"attractor_t{n}.csv"), header, rows)
    print(f"attractor H_P^{n} over {window}: max |H| = "
          f"{_fmt(float(np.abs(grid.values).max()))}")
    if args.pgm and f.dim == 2:
        _write_pgm(_out_path(args, f"attractor_t{n}_re.pgm"),
                   grid.values.real, "Re H_P^t")
        _write_pgm(_out_path(args, f"attractor_t{n}_abs.pgm"),
                   np.abs(grid.values), "abs H_P^t")
    return EXIT_OK


def cmd_legendre(args):
    f = _load_function(args)
    ana = analyze(f)
    if ana.mu_phi is None:
        print(f"analysis verdict: {ana.verdict}; no conjugate")
        return EXIT_VERDICT
    pa = ana.minimal_points()[0]
    ev = ConjugateEvaluator(pa.classification.poly)
    window = (_parse_window(args.window, f.dim) if args.window
              else [(-8, 8)] * f.dim)
    rows = []
    axes = [np.arange(a, b + 1) for a, b in window]
    for pt in np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, f.dim):
        val, arg = ev.conjugate(pt.astype(float), with_argmax=True)
        rows.append(tuple(int(c) for c in pt) + (val,)
                    + tuple(float(a) for a in arg))
    header = ",".join([f"x_{j + 1}" for j in range(f.dim)] + ["value"]
                      + [f"argmax_{j + 1}" for j in range(f.dim)])
    _write_csv(_out_path(args, "legendre.csv"), header, rows)
    print(f"legendre transform evaluated at {len(rows)} points")
    return EXIT_OK


def cmd_bounds(args):
    f = _load_function(args)
    ana = analyze(f)
    n_values = _parse_n_list(args.n)
    if args.kind == "gaussian":
        rep = gaussian_bound_fit(f, ana, n_values)
    elif args.kind == "subexp":
        rep = subexp_bound_fit(f, ana, n_values, N=args.decay_order)
    else:
        vectors = [np.eye(f.dim, dtype=np.int64)[j] for j in range(f.dim)]
        beta = tuple(int(b) for b in args.beta.split(",")) if args.beta \
            else tuple([1] + [0] * (f.dim - 1))
        rep = derivative_bound_fit(f, ana, vectors, beta, n_values)
    _write_report_csv(_out_path(args, f"bounds_{args.kind}.csv"), rep)
    print(f"verdict: {rep.verdict}")
    for key, val in sorted(rep.constants.items()):
        print(f"  {key} = {val}")
    if rep.notes:
        print(f"  note: {rep.notes}")
    return EXIT_OK if rep.passed else EXIT_VERDICT


def cmd_stability(args):
    f = _load_function(args)
    rep = stability_report(f, args.nmax)
    _write_report_csv(_out_path(args, "stability.csv"), rep)
    for n, l1, linf in rep.rows:
        print(f"n={n}: l1 = {_fmt(l1)}, linf = {_fmt(linf)}")
    print(f"verdict: {rep.verdict}")
    return EXIT_OK if rep.verdict == "stable" else EXIT_VERDICT


def cmd_theta(args):
    f = _load_function(args)
    profile = walk_profile(f)
    n_values = _parse_n_list(args.n)
    window = (_parse_window(args.window, f.dim) if args.window
              else [(-4, 4)] * f.dim)
    axes = [np.arange(a, b + 1) for a, b in window]
    rows = []
    for n in n_values:
        for pt in np.stack(np.meshgrid(*axes, indexing="ij"),
                           axis=-1).reshape(-1, f.dim):
            rows.append((n,) + tuple(int(c) for c in pt)
                        + (theta(profile, n, pt.astype(float)),))
    header = ",".join(["n"] + [f"x_{j + 1}" for j in range(f.dim)] + ["theta"])
    _write_csv(_out_path(args, "theta.csv"), header, rows)
    print(f"theta evaluated on {len(rows)} (n, x) pairs")
    return EXIT_OK


def cmd_vonneumann(args):
    f = _load_function(args)
    res = check_von_neumann(SymbolView(f))
    state = "satisfied" if res.satisfied else "violated"
    print(f"von Neumann condition {state}: sup |phi-hat| = {_fmt(res.maximum)} "
          f"at ({', '.join(_fmt(float(c)) for c in res.argmax)})")
    return EXIT_OK if res.satisfied else EXIT_VERDICT


def cmd_examples(args):
    if args.action == "list":
        for name in examples.names():
            print(name)
        return EXIT_OK
    if not args.name:
        raise SystemExit2("examples emit requires a name")
    f = examples.get(args.name)
    safe = args.name.replace(":", "_").replace(",", "_")
    path = _out_path(args, f"{safe}.fn")
    write_function(f, path)
    print(f"wrote {path}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="latconv",
        description="convolution powers of finitely supported functions on Z^d")
    parser.add_argument("--threads", type=int, default=1,
                        help="FFT worker count (results reproducible per value)")
    parser.add_argument("--memory-cap", type=float, default=None,
                        help="dense box cap in GiB (default 2)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_n=False, window=True, pgm=False):
        p.add_argument("--example", help="builtin example name")
        p.add_argument("--input", help="function file path")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--tol", type=float, default=1e-9)
        if needs_n:
            p.add_argument("--n", required=True,
                           help="n values: comma list and a:b[:step] ranges")
        if window:
            p.add_argument("--window", help="per-axis a:b, comma separated")
        if pgm:
            p.add_argument("--pgm", action="store_true",
                           help="emit 8-bit P5 graymaps with scale sidecars")

    common(sub.add_parser("analyze", help="spectral classification report"))
    p = sub.add_parser("power", help="phi^(n) as CSV (optionally graymap)")
    common(p, needs_n=True, pgm=True)
    p.add_argument("--method", choices=("direct", "fast", "spectral"),
                   default="fast")
    common(sub.add_parser("llt", help="local-limit approximation and error"),
           needs_n=True, pgm=True)
    common(sub.add_parser("attractor", help="attractor grid"), needs_n=True,
           pgm=True)
    common(sub.add_parser("legendre", help="Legendre-Fenchel transform grid"))
    p = sub.add_parser("bounds", help="gaussian/subexp/derivative bound fits")
    common(p, needs_n=True, window=False)
    p.add_argument("--kind", choices=("gaussian", "subexp", "derivative"),
                   default="gaussian")
    p.add_argument("--decay-order", type=int, default=4)
    p.add_argument("--beta", help="multi-index for derivative fits, e.g. 1,0")
    p = sub.add_parser("stability", help="l^1 stability ladder")
    common(p, window=False)
    p.add_argument("--nmax", type=int, default=256)
    common(sub.add_parser("theta", help="prefactor Theta(n, x) table"),
           needs_n=True)
    common(sub.add_parser("vonneumann", help="check sup |phi-hat| <= 1"),
           window=False)
    p = sub.add_parser("examples", help="list or emit builtin examples")
    p.add_argument("action", choices=("list", "emit"))
    p.add_argument("name", nargs="?")
    p.add_argument("--out", default="out")
    return parser


_COMMANDS = {
    "analyze": cmd_analyze,
    "power": cmd_power,
    "llt": cmd_llt,
    "attractor": cmd_attractor,
    "legendre": cmd_legendre,
    "bounds": cmd_bounds,
    "stability": cmd_stability,
    "theta": cmd_theta,
    "vonneumann": cmd_vonneumann,
    "examples": cmd_examples,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    _config.set_fft_workers(args.threads)
    if getattr(args, "memory_cap", None):
        _config.set_memory_cap(int(args.memory_cap * 2 ** 30))
    try:
        return _COMMANDS[args.command](args)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except BrokenPipeError:
        return EXIT_OK
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
