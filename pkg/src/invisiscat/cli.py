"""Command-line front end.

    invisiscat source scene.json --farfield ff.csv [--fields u.csv]
    invisiscat medium scene.json --farfield ff.csv [--fields u.csv]
    invisiscat teig itp.json --kmax 4 --modes 0,1 --out eigs.csv
    invisiscat cgo-verify --n 2 --samples 20 --tol 1e-8
    invisiscat experiment NAME [config.json] --out DIR

Exit codes: 0 success, 1 suite assertion failure, 2 configuration
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _write_field_csv(path, pts, values):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"x{i+1}" for i in range(pts.shape[1])] + ["re", "im"])
        for p, v in zip(pts, values):
            writer.writerow(
                [repr(float(c)) for c in p]
                + [repr(float(v.real)), repr(float(v.imag))]
            )


def _field_grid(domain, n):
    lo, hi = domain.bounding_box()
    span = np.max(hi - lo)
    c = 0.5 * (lo + hi)
    lo = c - 0.75 * span
    hi = c + 0.75 * span
    axes = [np.linspace(lo[d], hi[d], n) for d in range(domain.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def cmd_source(args) -> int:
    from .scenes import SceneError, load_source_scene
    from .source import QuadratureFailure, far_field, solve_field

    try:
        from .scenes import read_json

        scene = load_source_scene(read_json(args.scene))
    except SceneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        ff = far_field(scene, args.dirs)
        if args.farfield:
            ff.to_csv(args.farfield)
        if args.farfield_json:
            ff.to_json(args.farfield_json)
        if args.fields:
            pts = _field_grid(scene.domain, args.grid)
            u = solve_field(scene, pts)
            _write_field_csv(args.fields, pts, u)
    except QuadratureFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"far-field sup norm: {ff.sup_norm()!r}")
    return EXIT_OK


def cmd_medium(args) -> int:
    from .medium import NotContractive, scattered_far_field, solve_ls
    from .scenes import SceneError, load_medium_scene, read_json

    try:
        scene = load_medium_scene(read_json(args.scene))
    except SceneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        sol = solve_ls(scene, spacing=args.spacing)
        ff = scattered_far_field(scene, sol, args.dirs)
        if args.farfield:
            ff.to_csv(args.farfield)
        if args.fields:
            _write_field_csv(args.fields, sol.grid.points, sol.u)
    except NotContractive as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(
        f"scattered far-field sup norm: {ff.sup_norm()!r} "
        f"({sol.method}, {len(sol.residuals)} residual evaluations)"
    )
    return EXIT_OK


def cmd_teig(args) -> int:
    from .scenes import SceneError, read_json
    from .transmission import NoneFound, RadialITP, find_eigenvalues

    try:
        cfg = read_json(args.config)
        itp = RadialITP(
            R=float(cfg["radius"]),
            v0=float(cfg["contrast"]),
            n=int(cfg.get("dimension", 2)),
        )
    except (SceneError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    modes = [int(m) for m in args.modes.split(",")] if args.modes else [0]
    try:
        pairs = find_eigenvalues(itp, args.kmax, modes=modes)
    except NoneFound:
        pairs = []
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mode", "index", "k_eig", "boundary_value_u"])
        counts = {}
        for p in pairs:
            counts[p.mode] = counts.get(p.mode, 0) + 1
            u_R = abs(p.u(np.array([itp.R]))[0])
            writer.writerow(
                [p.mode, counts[p.mode], repr(p.k_eig), repr(float(u_R))]
            )
    print(f"{len(pairs)} eigenvalues written to {args.out}")
    return EXIT_OK


def cmd_cgo_verify(args) -> int:
    from .cgo import CgoVector, cgo_over_parabola, cgo_sliced
    from .quadrature import AnnularParaboloid, BudgetExceeded, ParaboloidCap, integrate

    rng = np.random.default_rng(args.seed)
    worst = 0.0
    failures = 0
    for _ in range(args.samples):
        n = args.n
        K = float(rng.uniform(0.5, 100.0))
        tau = float(rng.uniform(0.5, min(50.0, 20.0 * K)))
        vec = CgoVector.canonical(tau, n)
        want = cgo_over_parabola(vec, K)
        tol = max(args.tol * abs(want) / (1.0 + abs(want)) * 0.1, 1e-13)
        try:
            got = integrate(
                vec.field, ParaboloidCap(K, dim=n, decay_rate=tau), tol=tol
            )
        except BudgetExceeded as exc:
            print(f"numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        rel = abs(got - want) / abs(want)
        worst = max(worst, rel)
        failures += int(rel > args.tol)
        km = float(rng.uniform(0.5, 50.0))
        kp = km * float(rng.uniform(1.0 + 1e-3, 3.0))
        h = float(rng.uniform(0.1, 2.0))
        want_s = cgo_sliced(tau, km, kp, h, n)
        got_s = integrate(
            lambda p: np.exp(-tau * p[:, -1]),
            AnnularParaboloid(km, kp, h, dim=n),
            tol=max(args.tol * 0.1, 1e-12),
        )
        rel_s = abs(got_s - want_s) / (1.0 + abs(want_s))
        worst = max(worst, rel_s)
        failures += int(rel_s > args.tol)
    print(f"worst relative deviation over {2*args.samples} checks: {worst:.3e}")
    return EXIT_OK if failures == 0 else EXIT_ASSERTION


def cmd_experiment(args) -> int:
    from .experiments import SUITES, write_outputs
    from .scenes import SceneError, read_json

    if args.suite not in SUITES:
        print(
            f"error: unknown suite {args.suite!r}; choose from {sorted(SUITES)}",
            file=sys.stderr,
        )
        return EXIT_CONFIG
    kwargs = {}
    if args.config:
        try:
            cfg = read_json(args.config)
        except SceneError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        if not isinstance(cfg, dict):
            print("error: experiment config must be a JSON object", file=sys.stderr)
            return EXIT_CONFIG
        kwargs = cfg
    try:
        result = SUITES[args.suite](**kwargs)
    except TypeError as exc:
        print(f"error: bad config for suite {args.suite}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # propagate solver failures as exit 3
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    path = write_outputs(result, args.out)
    status = "pass" if result.passed else "FAIL"
    print(
        f"{result.name}: {status}, {result.counterexamples} counterexample rows, "
        f"table at {path}"
    )
    return EXIT_OK if result.passed else EXIT_ASSERTION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="invisiscat",
        description="Helmholtz scattering laboratory: sources, media, "
        "transmission eigenvalues, visibility experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("source", help="solve a source scene")
    p.add_argument("scene")
    p.add_argument("--farfield", help="far-field CSV output")
    p.add_argument("--farfield-json", help="far-field JSON output")
    p.add_argument("--fields", help="field samples CSV output")
    p.add_argument("--grid", type=int, default=32, help="field sample grid size")
    p.add_argument("--dirs", type=int, default=64)
    p.set_defaults(fn=cmd_source)

    p = sub.add_parser("medium", help="solve a medium scattering scene")
    p.add_argument("scene")
    p.add_argument("--farfield")
    p.add_argument("--fields")
    p.add_argument("--dirs", type=int, default=64)
    p.add_argument("--spacing", type=float, default=None)
    p.set_defaults(fn=cmd_medium)

    p = sub.add_parser("teig", help="transmission eigenvalue table")
    p.add_argument("config")
    p.add_argument("--kmax", type=float, required=True)
    p.add_argument("--modes", default="0")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_teig)

    p = sub.add_parser("cgo-verify", help="closed forms vs oracle cubature")
    p.add_argument("--n", type=int, default=2, choices=(2, 3))
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=20240917)
    p.set_defaults(fn=cmd_cgo_verify)

    p = sub.add_parser("experiment", help="run an experiment suite")
    p.add_argument("suite")
    p.add_argument("config", nargs="?", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_experiment)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
