"""Experiment harness: reproducible CSV tables for the noise studies.

One subcommand per experiment kind. Every cell (graph, p, series,
multiplier) gets its own optimizer seed derived from the base seed and the
cell index, so re-running a spec reproduces its CSV byte for byte and
cells could be distributed without changing results.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, replace

import numpy as np

from .gates import ry
from .maxcut import (BUILTIN_GRAPHS, Graph, QaoaParams, build_qaoa_circuit,
                     circuit_latency, cost_fidelity_estimate,
                     cost_hamiltonian_latency, evaluate, expectation_for_angles,
                     fom_objective, max_cut_brute_force, resolve_graph)
from .noise import DeviceModel, load_device, scaled_device, toggles_for_series
from .optimize import DEConfig, differential_evolution, grid_scan, qaoa_bounds
from .quantum import expectation_diag
from .noise import simulate_circuit

DEFAULT_SERIES = ("PURE", "GE", "T1", "T2", "COMBINED")
DEFAULT_MULTIPLIERS = {
    "t1": (0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0),
    "t2": (0.5, 1.0, 2.0, 4.0, 6.0, 8.0),
    "ge1": (0.25, 0.5, 0.6, 0.75, 1.0),
    "ge2": (0.25, 0.5, 0.6, 0.75, 1.0),
}

RESULT_FIELDS = ("experiment", "graph", "p", "series", "multiplier",
                 "best_gammas", "best_betas", "expectation", "c_max", "fom",
                 "latency_ns", "chet_ns", "chet_over_t1", "chet_over_t2",
                 "seed", "evaluations")


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    graphs: tuple[str, ...]
    p_min: int = 1
    p_max: int = 4
    series: tuple[str, ...] = DEFAULT_SERIES
    multipliers: tuple[float, ...] = ()
    resolution: int = 50
    seed: int = 0
    out: str | None = None
    device: DeviceModel = DeviceModel()
    de: DEConfig = DEConfig()

    def __post_init__(self):
        if self.p_min < 1 or self.p_max < self.p_min:
            raise ValueError("need 1 <= p_min <= p_max")
        if any(m <= 0 for m in self.multipliers):
            raise ValueError("multipliers must be positive")


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _angles(values) -> str:
    return ";".join(f"{v:.12g}" for v in values)


def _cell_seed(base: int, index: int) -> int:
    return int(np.random.SeedSequence((base, index)).generate_state(1)[0])


def _de_comment(cfg: DEConfig) -> str:
    pop = "auto" if cfg.population is None else cfg.population
    return (f"# optimizer: rand/1/bin population={pop} "
            f"f_range={cfg.f_range[0]:g},{cfg.f_range[1]:g} cr={cfg.crossover:g} "
            f"max_generations={cfg.max_generations} tol={cfg.tol:g}")


def _device_comment(dev: DeviceModel) -> str:
    return (f"# device: n_qubits={dev.n_qubits} t1_us={dev.t1_us:g} t2_us={dev.t2_us:g} "
            f"err_1q={dev.err_1q:g} err_2q={dev.err_2q:g} "
            f"durations_ns=" +
            ",".join(f"{k}:{v:g}" for k, v in sorted(dev.durations.items())))


def _write_csv(out, comments, fieldnames, rows):
    fh = sys.stdout if out is None else open(out, "w", newline="")
    try:
        for line in comments:
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_fmt(row[k]) for k in fieldnames])
    finally:
        if out is not None:
            fh.close()


def _optimized_row(spec: ExperimentSpec, graph_name: str, graph: Graph, p: int,
                   series: str, multiplier: float, device: DeviceModel,
                   cell_index: int) -> dict:
    toggles = toggles_for_series(series)
    seed = _cell_seed(spec.seed, cell_index)
    cfg = replace(spec.de, seed=seed)
    result = differential_evolution(fom_objective(graph, p, device, toggles),
                                    qaoa_bounds(p), cfg)
    params = QaoaParams.from_vector(result.best_params)
    record = evaluate(graph, params, device, toggles)
    c_max, _ = max_cut_brute_force(graph)
    chet = cost_hamiltonian_latency(graph, device)
    return {
        "experiment": spec.kind,
        "graph": graph_name,
        "p": p,
        "series": series,
        "multiplier": multiplier,
        "best_gammas": _angles(params.gammas),
        "best_betas": _angles(params.betas),
        "expectation": record.expectation,
        "c_max": c_max,
        "fom": record.fom,
        "latency_ns": record.latency_ns,
        "chet_ns": chet,
        "chet_over_t1": chet / device.t1_ns,
        "chet_over_t2": chet / device.t2_ns,
        "seed": seed,
        "evaluations": result.evaluations,
    }


def run_fom_table(spec: ExperimentSpec) -> tuple[list[str], tuple, list[dict]]:
    """DE-optimized FOM for every graph x p x noise series."""
    rows = []
    cell = 0
    for graph_name in spec.graphs:
        graph = resolve_graph(graph_name)
        for p in range(spec.p_min, spec.p_max + 1):
            for series in spec.series:
                rows.append(_optimized_row(spec, graph_name, graph, p, series,
                                           1.0, spec.device, cell))
                cell += 1
    comments = [f"# experiment=fom-table seed={spec.seed}",
                _de_comment(spec.de), _device_comment(spec.device)]
    return comments, RESULT_FIELDS, rows


_SWEEP_SERIES = {"t1": "T1", "t2": "T2", "ge1": "GE", "ge2": "GE"}


def run_multiplier_sweep(spec: ExperimentSpec, param: str) -> tuple[list[str], tuple, list[dict]]:
    """Scale one device parameter (T1, T2, or a gate-error rate) and re-optimize."""
    if param not in _SWEEP_SERIES:
        raise ValueError(f"unknown sweep parameter {param!r}")
    series = _SWEEP_SERIES[param]
    multipliers = spec.multipliers or DEFAULT_MULTIPLIERS[param]
    rows = []
    cell = 0
    for graph_name in spec.graphs:
        graph = resolve_graph(graph_name)
        for m in multipliers:
            device = scaled_device(spec.device, **{param: m})
            for p in range(spec.p_min, spec.p_max + 1):
                rows.append(_optimized_row(spec, graph_name, graph, p, series,
                                           m, device, cell))
                cell += 1
    comments = [f"# experiment={param}-sweep seed={spec.seed} "
                f"multipliers={','.join(f'{m:g}' for m in multipliers)}",
                _de_comment(spec.de), _device_comment(spec.device)]
    return comments, RESULT_FIELDS, rows


def run_landscape(spec: ExperimentSpec, p: int = 1) -> tuple[list[str], tuple, list[dict]]:
    """Exhaustive (gamma, beta) scan of the p=1 expectation surface."""
    if p != 1:
        raise ValueError("landscape scans are 2-D and support p=1 only")
    rows = []
    bounds = [(0.0, 2 * np.pi), (0.0, 2 * np.pi)]
    for graph_name in spec.graphs:
        graph = resolve_graph(graph_name)
        for series in spec.series:
            toggles = toggles_for_series(series)

            def neg_expectation(x):
                return -expectation_for_angles(graph, x[:1], x[1:], spec.device, toggles)

            result = grid_scan(neg_expectation, bounds, spec.resolution)
            gammas, betas = result.axes
            for i, g in enumerate(gammas):
                for j, b in enumerate(betas):
                    rows.append({
                        "experiment": "landscape",
                        "graph": graph_name,
                        "series": series,
                        "gamma": g,
                        "beta": b,
                        "expectation": -result.values[i, j],
                    })
    fields = ("experiment", "graph", "series", "gamma", "beta", "expectation")
    comments = [f"# experiment=landscape resolution={spec.resolution}",
                _device_comment(spec.device)]
    return comments, fields, rows


def run_motivation(spec: ExperimentSpec) -> tuple[list[str], tuple, list[dict]]:
    """Single-qubit RY(theta) ansatz: <sigma_z> over the full parameter space,
    ideal and under combined noise."""
    thetas = np.linspace(0.0, 2 * np.pi, spec.resolution, endpoint=False)
    z_diag = np.array([1.0, -1.0])
    rows = []
    for series in ("PURE", "COMBINED"):
        toggles = toggles_for_series(series)
        for theta in thetas:
            rho = simulate_circuit([ry(theta, 0)], spec.device, toggles, n_qubits=1)
            rows.append({
                "experiment": "motivation",
                "series": series,
                "theta": theta,
                "expectation": expectation_diag(rho, z_diag),
            })
    fields = ("experiment", "series", "theta", "expectation")
    comments = [f"# experiment=motivation resolution={spec.resolution}",
                _device_comment(spec.device)]
    return comments, fields, rows


def run_latency_report(spec: ExperimentSpec) -> tuple[list[str], tuple, list[dict]]:
    """Circuit and cost-layer execution times plus the gate-error fidelity
    estimate, per graph and p."""
    rows = []
    for graph_name in spec.graphs:
        graph = resolve_graph(graph_name)
        chet = cost_hamiltonian_latency(graph, spec.device)
        for p in range(spec.p_min, spec.p_max + 1):
            params = QaoaParams((0.0,) * p, (0.0,) * p)
            latency = circuit_latency(build_qaoa_circuit(graph, params), spec.device)
            rows.append({
                "experiment": "latency-report",
                "graph": graph_name,
                "p": p,
                "latency_ns": latency,
                "chet_ns": chet,
                "chet_over_t1": chet / spec.device.t1_ns,
                "chet_over_t2": chet / spec.device.t2_ns,
                "cost_fidelity_estimate": cost_fidelity_estimate(
                    graph.n_edges, spec.device.err_2q * spec.device.ge2_scale),
            })
    fields = ("experiment", "graph", "p", "latency_ns", "chet_ns",
              "chet_over_t1", "chet_over_t2", "cost_fidelity_estimate")
    comments = ["# experiment=latency-report", _device_comment(spec.device)]
    return comments, fields, rows


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_common(sub, graphs_default=None, graphs_required=False):
    sub.add_argument("--graph", nargs="+", dest="graphs", default=graphs_default,
                     required=graphs_required,
                     help="built-in graph name(s) or edge-list file path(s)")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--device-config", help="JSON device model file")
    sub.add_argument("--out", help="output CSV path (default: stdout)")


def _add_prange(sub):
    sub.add_argument("--p-min", type=int, default=1)
    sub.add_argument("--p-max", type=int, default=4)


def _add_de(sub):
    sub.add_argument("--population", type=int, default=None,
                     help="DE population (default max(20, 15*dims))")
    sub.add_argument("--max-generations", type=int, default=200)
    sub.add_argument("--tol", type=float, default=1e-6)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisyqaoa",
        description="QAOA-MaxCut noise experiments on a modeled superconducting device")
    subs = parser.add_subparsers(dest="command", required=True)

    ft = subs.add_parser("fom-table", help="optimized FOM per graph, p, noise series")
    _add_common(ft, graphs_required=True)
    _add_prange(ft)
    _add_de(ft)
    ft.add_argument("--series", nargs="+", default=list(DEFAULT_SERIES),
                    choices=list(DEFAULT_SERIES))

    for param in ("t1", "t2", "ge1", "ge2"):
        sw = subs.add_parser(f"{param}-sweep",
                             help=f"FOM vs {param} multiplier")
        _add_common(sw, graphs_default=["6n-yutsis"])
        _add_prange(sw)
        _add_de(sw)
        sw.add_argument("--multipliers", nargs="+", type=float,
                        default=list(DEFAULT_MULTIPLIERS[param]))

    ls = subs.add_parser("landscape", help="full (gamma, beta) expectation surface at p=1")
    _add_common(ls, graphs_required=True)
    ls.add_argument("--series", nargs="+", default=["PURE", "COMBINED"],
                    choices=list(DEFAULT_SERIES))
    ls.add_argument("--resolution", type=int, default=50)
    ls.add_argument("--p", type=int, default=1)

    mo = subs.add_parser("motivation", help="single-qubit RY solution space, ideal vs noisy")
    _add_common(mo, graphs_default=[])
    mo.add_argument("--resolution", type=int, default=100)

    lr = subs.add_parser("latency-report", help="circuit timing and fidelity estimates")
    _add_common(lr, graphs_default=sorted(BUILTIN_GRAPHS))
    _add_prange(lr)

    return parser


def _spec_from_args(args) -> ExperimentSpec:
    device = load_device(args.device_config) if args.device_config else DeviceModel()
    de = DEConfig(
        population=getattr(args, "population", None),
        max_generations=getattr(args, "max_generations", 200),
        tol=getattr(args, "tol", 1e-6),
    )
    return ExperimentSpec(
        kind=args.command,
        graphs=tuple(args.graphs or ()),
        p_min=getattr(args, "p_min", 1),
        p_max=getattr(args, "p_max", 1),
        series=tuple(getattr(args, "series", DEFAULT_SERIES)),
        multipliers=tuple(getattr(args, "multipliers", ())),
        resolution=getattr(args, "resolution", 50),
        seed=args.seed,
        out=args.out,
        device=device,
        de=de,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = _spec_from_args(args)
        if args.command == "fom-table":
            comments, fields, rows = run_fom_table(spec)
        elif args.command.endswith("-sweep"):
            comments, fields, rows = run_multiplier_sweep(spec, args.command[:-6])
        elif args.command == "landscape":
            comments, fields, rows = run_landscape(spec, p=args.p)
        elif args.command == "motivation":
            comments, fields, rows = run_motivation(spec)
        elif args.command == "latency-report":
            comments, fields, rows = run_latency_report(spec)
        else:  # pragma: no cover - argparse enforces the choices
            raise ValueError(f"unknown command {args.command!r}")
        _write_csv(spec.out, comments, fields, rows)
    except (ValueError, OSError) as exc:
        print(f"noisyqaoa: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
