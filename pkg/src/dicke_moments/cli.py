"""Command-line front end with deterministic CSV/JSON emission.

Trajectory subcommands share one long-format schema (time, series, value)
so downstream plotting stays stable as the system size varies; every run
writes a JSON sidecar echoing the fully resolved configuration. Output is
byte-identical for identical configurations.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy.linalg import expm

from . import bernstein, bipartite, dicke_core, hausdorff, leading_order, reconstruct

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    N: int | None
    initial: str | None
    time_grid: dict | None
    tol_psd: float
    rank_tol: float
    merge_tol: float
    precision_digits: int
    output: str
    format: str


def _fmt(x) -> str:
    """Shortest round-trip decimal form; regression-test stable."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    # adding 0.0 canonicalizes negative zero
    return repr(float(x) + 0.0)


def parse_time_grid(spec: str) -> np.ndarray:
    """Parse 'start:stop:count[:log]' into a time grid."""
    parts = spec.split(":")
    if len(parts) not in (3, 4):
        raise UsageError(f"bad time grid {spec!r}; expected start:stop:count[:log]")
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError as err:
        raise UsageError(f"bad time grid {spec!r}: {err}") from None
    if count < 1:
        raise UsageError("time grid needs count >= 1")
    spacing = parts[3] if len(parts) == 4 else "linear"
    if spacing == "linear":
        if count == 1:
            return np.array([start])
        return np.linspace(start, stop, count)
    if spacing == "log":
        if start <= 0:
            # log grids often want to start at 0; substitute three decades
            # below the stop time and prepend t = 0
            grid = np.geomspace(stop / 10.0**3, stop, count - 1)
            return np.concatenate(([0.0], grid))
        return np.geomspace(start, stop, count)
    raise UsageError(f"unknown spacing {spacing!r}")


def parse_initial(spec: str, N: int) -> dicke_core.PopulationVector:
    """Resolve an initial-state flag into populations."""
    if spec == "fully-excited":
        return dicke_core.dicke_populations(N, N)
    if spec.startswith("dicke:"):
        try:
            k = int(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad Dicke level in {spec!r}") from None
        if not 0 <= k <= N:
            raise UsageError(f"Dicke level {k} outside 0..{N}")
        return dicke_core.dicke_populations(N, k)
    if spec.startswith("coherent:"):
        try:
            eps = float(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad excitation probability in {spec!r}") from None
        return bernstein.coherent_populations(N, eps)
    if spec.startswith("file:"):
        path = spec.split(":", 1)[1]
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise UsageError(f"cannot read initial state {path!r}: {err}") from None
        p = np.asarray(raw, dtype=float)
        if p.ndim != 1 or p.size != N + 1 or np.min(p) < 0:
            raise UsageError(
                f"initial-state file must hold {N + 1} nonnegative reals"
            )
        total = p.sum()
        if abs(total - 1.0) > 1e-8:
            print(
                f"warning: renormalizing initial state (sum={total!r})",
                file=sys.stderr,
            )
        return dicke_core.PopulationVector.from_array(p / total)
    raise UsageError(f"unknown initial state {spec!r}")


def _thread_count() -> int:
    raw = os.environ.get("DICKE_MOMENTS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map(fn, items):
    workers = _thread_count()
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _write_output(config: RunConfig, header: list[str], rows: list[list]) -> None:
    formatted = [[_fmt(v) if not isinstance(v, str) else v for v in row] for row in rows]
    if config.format == "csv":
        with open(config.output, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(formatted)
    else:
        payload = {
            "columns": header,
            "rows": formatted,
        }
        with open(config.output, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    sidecar = config.output + ".config.json"
    with open(sidecar, "w", encoding="utf-8") as fh:
        json.dump(asdict(config), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _trajectory(args) -> tuple[np.ndarray, list[dicke_core.PopulationVector]]:
    times = parse_time_grid(args.t)
    p0 = parse_initial(args.initial, args.n)
    traj = dicke_core.evolve_trajectory(p0, times)
    return traj.times, list(traj.states)


def cmd_simulate(args, config: RunConfig) -> int:
    times, states = _trajectory(args)
    rows = []
    for t, state in zip(times, states):
        for k, pk in enumerate(state.p):
            rows.append([t, f"p_{k}", pk])
        rows.append([t, "intensity", dicke_core.intensity(state)])
    _write_output(config, ["time", "series", "value"], rows)
    return EXIT_OK


def cmd_moments(args, config: RunConfig) -> int:
    times, states = _trajectory(args)
    gen = bernstein.moment_generator(args.n)
    m0 = bernstein.populations_to_moments(states[0]).m
    rows = []
    for t, state in zip(times, states):
        m_pop = bernstein.populations_to_moments(state).m
        m_dyn = expm(gen.Mbar * (t - times[0])) @ m0
        for k, mk in enumerate(m_pop):
            rows.append([t, f"m_{k}", mk])
        rows.append([t, "route_discrepancy", float(np.max(np.abs(m_pop - m_dyn)))])
    _write_output(config, ["time", "series", "value"], rows)
    return EXIT_OK


def cmd_check(args, config: RunConfig) -> int:
    times, states = _trajectory(args)

    def one(state):
        m = bernstein.populations_to_moments(state)
        verdict = hausdorff.validate_moments(m, tol_psd=args.tol_psd)
        neg = hausdorff.hankel_negativity(state, tol_psd=args.tol_psd)
        return verdict, neg

    rows = []
    for t, (verdict, neg) in zip(times, _map(one, states)):
        rows.append([t, "valid", int(verdict.valid)])
        rows.append([t, "boundary", int(verdict.boundary)])
        rows.append([t, "min_eig_H", verdict.min_eig_H])
        rows.append([t, "min_eig_Hbar", verdict.min_eig_Hbar])
        rows.append([t, "negativity", neg])
    _write_output(config, ["time", "series", "value"], rows)
    return EXIT_OK


def cmd_reconstruct(args, config: RunConfig) -> int:
    times, states = _trajectory(args)

    def one(state):
        m = bernstein.populations_to_moments(state)
        d = reconstruct.reconstruct_decomposition(
            m, rank_tol=args.rank_tol, merge_tol=args.merge_tol
        )
        atoms = tuple(sorted(d.atoms, key=lambda a: -a[1]))
        d = reconstruct.Decomposition(N=d.N, atoms=atoms)
        return d, reconstruct.decomposition_residual(state, d)

    try:
        results = _map(one, states)
    except reconstruct.ReconstructionError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INFEASIBLE
    rows = []
    for t, (d, residual) in zip(times, results):
        rows.append([t, "n_atoms", len(d.atoms)])
        for i, (w, eps) in enumerate(d.atoms):
            rows.append([t, f"w_{i}", w])
            rows.append([t, f"eps_{i}", eps])
        rows.append([t, "residual", residual])
    _write_output(config, ["time", "series", "value"], rows)
    return EXIT_OK


def cmd_negativity2(args, config: RunConfig) -> int:
    times, states = _trajectory(args)
    rows = []
    for t, state in zip(times, states):
        s = bipartite.two_spin_state(state)
        rows.append([t, "negativity2", bipartite.two_spin_negativity(s)])
        rows.append([t, "delta", bipartite.delta_witness(s)])
    _write_output(config, ["time", "series", "value"], rows)
    return EXIT_OK


def _parse_partitions(specs: list[str]) -> list[tuple[int, int]]:
    out = []
    for spec in specs:
        try:
            n, n1 = (int(x) for x in spec.split(","))
        except ValueError:
            raise UsageError(f"bad partition {spec!r}; expected n,n1") from None
        out.append((n, n1))
    return out


def cmd_bipartite(args, config: RunConfig) -> int:
    partitions = _parse_partitions(args.partition)
    times, states = _trajectory(args)
    for n, n1 in partitions:
        if not 1 <= n1 < n <= args.n:
            raise UsageError(f"partition ({n},{n1}) invalid for N={args.n}")
    rows = []
    for t, state in zip(times, states):
        for n, n1 in partitions:
            q = bipartite.reduced_dicke_mixture(state, n)
            neg = bipartite.bipartition_negativity(q, n1, tol_psd=args.tol_psd)
            rows.append([t, f"neg_{n}_{n1}", neg])
    _write_output(config, ["time", "series", "value"], rows)
    return EXIT_OK


def cmd_verify_kr(args, config: RunConfig) -> int:
    kinds = ["plain", "shifted"] if args.kind == "both" else [args.kind]
    xs = [float(x) for x in args.x.split(",")]
    rs = [int(r) for r in args.r.split(",")]
    ctx = leading_order.PrecisionContext(digits=args.digits)
    rows = []
    for r in rs:
        for kind in kinds:
            for x in xs:
                N = args.n if args.n is not None else 2 * r + 2
                rep = leading_order.leading_coefficient_extract(N, r, kind, x, ctx)
                rows.append(
                    [
                        rep.r,
                        rep.kind,
                        rep.x,
                        rep.estimated_K,
                        rep.expected_K,
                        rep.relative_error,
                        rep.fitted_exponent,
                    ]
                )
    _write_output(
        config,
        ["r", "kind", "x", "estimated_K", "expected_K", "relative_error", "fitted_exponent"],
        rows,
    )
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="dicke-moments", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, trajectory=True):
        p.add_argument("--output", default="out.csv", help="output file path")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--tol-psd", type=float, dest="tol_psd", default=hausdorff.DEFAULT_TOL_PSD)
        p.add_argument("--rank-tol", type=float, dest="rank_tol", default=reconstruct.DEFAULT_RANK_TOL)
        p.add_argument("--merge-tol", type=float, dest="merge_tol", default=reconstruct.MERGE_TOL)
        if trajectory:
            p.add_argument("--n", type=int, required=True, help="emitter count")
            p.add_argument("--initial", default="fully-excited",
                           help="fully-excited | dicke:K | coherent:EPS | file:PATH")
            p.add_argument("--t", required=True, help="time grid start:stop:count[:log]")

    for name, fn in (
        ("simulate", cmd_simulate),
        ("moments", cmd_moments),
        ("check", cmd_check),
        ("reconstruct", cmd_reconstruct),
        ("negativity2", cmd_negativity2),
    ):
        p = sub.add_parser(name)
        add_common(p)
        p.set_defaults(fn=fn)

    p = sub.add_parser("bipartite")
    add_common(p)
    p.add_argument("--partition", action="append", required=True,
                   help="reduced size and split as n,n1 (repeatable)")
    p.set_defaults(fn=cmd_bipartite)

    p = sub.add_parser("verify-kr")
    add_common(p, trajectory=False)
    p.add_argument("--r", default="2,3,4", help="comma-separated minor orders")
    p.add_argument("--kind", choices=("plain", "shifted", "both"), default="plain")
    p.add_argument("--x", default="0.5", help="comma-separated evaluation points")
    p.add_argument("--n", type=int, default=None, help="emitter count (default 2r+2)")
    p.add_argument("--digits", type=int, default=60)
    p.set_defaults(fn=cmd_verify_kr)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        tolerances = {
            "tol_psd": args.tol_psd,
            "rank_tol": args.rank_tol,
            "merge_tol": args.merge_tol,
        }
        if min(tolerances.values()) <= 0:
            raise UsageError("tolerances must be positive")
        time_grid = None
        if getattr(args, "t", None) is not None:
            grid = parse_time_grid(args.t)
            time_grid = {"spec": args.t, "points": [float(t) for t in grid]}
        config = RunConfig(
            command=args.command,
            N=getattr(args, "n", None),
            initial=getattr(args, "initial", None),
            time_grid=time_grid,
            precision_digits=getattr(args, "digits", 60),
            output=args.output,
            format=args.format,
            **tolerances,
        )
        return args.fn(args, config)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
