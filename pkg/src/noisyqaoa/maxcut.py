"""MaxCut problem instances and the QAOA circuit built from them.

A p-level circuit is: Hadamards (as native U2) on every node, then p
repetitions of the phase-separation layer (CNOT - U1(-gamma_k) - CNOT per
edge, in the edge order of the graph) followed by the mixing layer
(RX(beta_k), as native U3, on every node).

Bit conventions: node i corresponds to qubit i; in an assignment bitstring,
character i is node i's side of the partition; basis index z places node i
on side (z >> i) & 1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import quantum
from .gates import GateOp, cnot, duration_of, u1, u2, u3
from .noise import DeviceModel, NoiseToggles, simulate_circuit

MAX_DIAGONAL_QUBITS = 12   # 2^N cost vector / density matrix ceiling
MAX_BRUTE_FORCE_NODES = 24  # exhaustive enumeration guard


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph; edges keep their input order."""

    n_nodes: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ValueError("graph needs at least one node")
        seen = set()
        for (u, v, w) in self.edges:
            if not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise ValueError(f"edge ({u}, {v}) references a missing node")
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add(key)
            if not np.isfinite(w):
                raise ValueError(f"edge ({u}, {v}) has non-finite weight")

    @classmethod
    def from_edges(cls, n_nodes: int, edges) -> "Graph":
        """Build from (u, v) or (u, v, weight) pairs; weight defaults to 1."""
        norm = []
        for e in edges:
            if len(e) == 2:
                u, v = e
                w = 1.0
            else:
                u, v, w = e
            norm.append((int(u), int(v), float(w)))
        return cls(n_nodes, tuple(norm))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def total_weight(self) -> float:
        return sum(w for (_, _, w) in self.edges)


def load_graph(path) -> Graph:
    """Read an edge-list file: first line "N M", then M lines "u v [w]".

    '#' starts a comment; blank lines are ignored.
    """
    lines = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ValueError(f"{path}: empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"{path}: expected header 'N M', got {lines[0]!r}")
    n, m = int(head[0]), int(head[1])
    if len(lines) - 1 != m:
        raise ValueError(f"{path}: header promises {m} edges, file has {len(lines) - 1}")
    edges = []
    for line in lines[1:]:
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ValueError(f"{path}: bad edge line {line!r}")
        u, v = int(parts[0]), int(parts[1])
        w = float(parts[2]) if len(parts) == 3 else 1.0
        edges.append((u, v, w))
    return Graph.from_edges(n, edges)


def _k33_edges():
    return [(u, v) for u in range(3) for v in range(3, 6)]


BUILTIN_GRAPHS = {
    "2n-edge": Graph.from_edges(2, [(0, 1)]),
    "4n-irregular": Graph.from_edges(4, [(0, 1), (1, 2), (2, 0), (2, 3)]),
    "4n-yutsis": Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
    "6n-yutsis": Graph.from_edges(6, _k33_edges()),
    "6n-prism": Graph.from_edges(6, [(0, 1), (1, 2), (2, 0),
                                     (3, 4), (4, 5), (5, 3),
                                     (0, 3), (1, 4), (2, 5)]),
}


def resolve_graph(ref: str) -> Graph:
    """Look up a built-in graph by name, or load an edge-list file."""
    if ref in BUILTIN_GRAPHS:
        return BUILTIN_GRAPHS[ref]
    p = Path(ref)
    if p.exists():
        return load_graph(p)
    raise ValueError(f"unknown graph {ref!r}: not a built-in name "
                     f"({', '.join(sorted(BUILTIN_GRAPHS))}) and no such file")


# ---------------------------------------------------------------------------
# Classical cost function
# ---------------------------------------------------------------------------

def bitstring_of(index: int, n_nodes: int) -> str:
    """Basis index -> assignment string (character i = node i's side)."""
    return "".join(str((index >> i) & 1) for i in range(n_nodes))


def index_of(bitstring: str) -> int:
    """Assignment string -> basis index."""
    return sum((1 << i) for i, c in enumerate(bitstring) if c == "1")


def cut_value(graph: Graph, assignment: str) -> float:
    """Total weight of edges crossing the partition encoded by the bitstring."""
    if len(assignment) != graph.n_nodes:
        raise ValueError(f"assignment of length {len(assignment)} for "
                         f"{graph.n_nodes} nodes")
    if set(assignment) - {"0", "1"}:
        raise ValueError(f"assignment {assignment!r} is not a bitstring")
    return sum(w for (u, v, w) in graph.edges if assignment[u] != assignment[v])


def _cut_values_block(graph: Graph, indices: np.ndarray) -> np.ndarray:
    vals = np.zeros(indices.shape[0])
    for (u, v, w) in graph.edges:
        vals += w * (((indices >> u) & 1) ^ ((indices >> v) & 1))
    return vals


def max_cut_brute_force(graph: Graph) -> tuple[float, tuple[str, ...]]:
    """Exact MaxCut by enumerating all 2^N assignments.

    Returns the maximum cut weight and every argmax bitstring.
    """
    if graph.n_nodes > MAX_BRUTE_FORCE_NODES:
        raise ValueError(f"brute force limited to {MAX_BRUTE_FORCE_NODES} nodes")
    best = -np.inf
    witnesses: list[str] = []
    block = 1 << 20
    for start in range(0, 1 << graph.n_nodes, block):
        idx = np.arange(start, min(start + block, 1 << graph.n_nodes))
        vals = _cut_values_block(graph, idx)
        top = vals.max()
        if top > best + 1e-12:
            best = top
            witnesses = []
        if top >= best - 1e-12:
            for i in idx[np.abs(vals - best) <= 1e-12]:
                witnesses.append(bitstring_of(int(i), graph.n_nodes))
    return float(best), tuple(witnesses)


def cost_diagonal(graph: Graph) -> np.ndarray:
    """Cut value of every basis state: the diagonal of the cost Hamiltonian."""
    if graph.n_nodes > MAX_DIAGONAL_QUBITS:
        raise ValueError(f"cost diagonal limited to {MAX_DIAGONAL_QUBITS} nodes")
    return _cut_values_block(graph, np.arange(1 << graph.n_nodes))


@lru_cache(maxsize=None)
def _cost_data(graph: Graph) -> tuple[np.ndarray, float]:
    diag = cost_diagonal(graph)
    diag.setflags(write=False)
    return diag, float(diag.max())


# ---------------------------------------------------------------------------
# Circuit construction and timing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QaoaParams:
    """Per-level phase (gamma) and mixing (beta) angles."""

    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self):
        if len(self.gammas) != len(self.betas):
            raise ValueError("gammas and betas must have the same length")
        if len(self.gammas) < 1:
            raise ValueError("QAOA needs at least one level")
        eps = 1e-9
        if any(g < -eps or g > 2 * np.pi + eps for g in self.gammas):
            raise ValueError("gamma angles must lie in [0, 2*pi]")
        if any(b < -eps or b > np.pi + eps for b in self.betas):
            raise ValueError("beta angles must lie in [0, pi]")

    @property
    def p(self) -> int:
        return len(self.gammas)

    @classmethod
    def from_vector(cls, x) -> "QaoaParams":
        """Split optimizer vector (gamma_1..gamma_p, beta_1..beta_p)."""
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.size % 2:
            raise ValueError("parameter vector must have even length 2p")
        p = x.size // 2
        return cls(tuple(x[:p]), tuple(x[p:]))


def _circuit_from_angles(graph: Graph, gammas, betas) -> list[GateOp]:
    gates = [u2(0.0, np.pi, q) for q in range(graph.n_nodes)]
    for gamma, beta in zip(gammas, betas):
        for (u, v, _) in graph.edges:
            gates.append(cnot(u, v))
            gates.append(u1(-gamma, v))
            gates.append(cnot(u, v))
        for q in range(graph.n_nodes):
            gates.append(u3(beta, -np.pi / 2, np.pi / 2, q))
    return gates


def build_qaoa_circuit(graph: Graph, params: QaoaParams) -> list[GateOp]:
    """Native-gate QAOA circuit: N U2 gates, then per level 3|E| cost gates
    and N U3 mixer gates."""
    return _circuit_from_angles(graph, params.gammas, params.betas)


def circuit_latency(gates, device: DeviceModel) -> float:
    """Serial execution time: the sum of all gate durations, in ns."""
    return sum(duration_of(g, device) for g in gates)


def cost_hamiltonian_latency(graph: Graph, device: DeviceModel) -> float:
    """Execution time of one phase-separation layer (CHET), in ns."""
    return graph.n_edges * (2 * device.durations["CNOT"] + device.durations["U1"])


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EvalRecord:
    params: QaoaParams
    expectation: float
    fom: float
    latency_ns: float


def evaluate(graph: Graph, params: QaoaParams, device: DeviceModel,
             toggles: NoiseToggles) -> EvalRecord:
    """Simulate the QAOA circuit and score it against the exact MaxCut.

    fom = 1 - expectation / C_max; lower is better.
    """
    diag, c_max = _cost_data(graph)
    gates = build_qaoa_circuit(graph, params)
    rho = simulate_circuit(gates, device, toggles, n_qubits=graph.n_nodes)
    exp = quantum.expectation_diag(rho, diag)
    return EvalRecord(
        params=params,
        expectation=exp,
        fom=1.0 - exp / c_max,
        latency_ns=circuit_latency(gates, device),
    )


def fom_objective(graph: Graph, p: int, device: DeviceModel, toggles: NoiseToggles):
    """Objective for the optimizer: vector (gammas, betas) -> FOM."""
    def objective(x) -> float:
        params = QaoaParams.from_vector(np.asarray(x, dtype=float))
        if params.p != p:
            raise ValueError(f"expected {2 * p} parameters, got {2 * params.p}")
        return evaluate(graph, params, device, toggles).fom
    return objective


def expectation_for_angles(graph: Graph, gammas, betas, device: DeviceModel,
                           toggles: NoiseToggles) -> float:
    """Expectation for raw per-level angles.

    Unlike evaluate(), this does not impose the optimizer's search-domain
    bounds; landscape scans sweep beta all the way to 2*pi.
    """
    diag, _ = _cost_data(graph)
    rho = simulate_circuit(_circuit_from_angles(graph, gammas, betas), device,
                           toggles, n_qubits=graph.n_nodes)
    return quantum.expectation_diag(rho, diag)


# ---------------------------------------------------------------------------
# Shot sampling
# ---------------------------------------------------------------------------

def sample_counts(rho: np.ndarray, shots: int, seed: int) -> dict[str, int]:
    """Multinomial draw from the diagonal of rho; deterministic per seed."""
    if shots < 1:
        raise ValueError("shots must be at least 1")
    n = quantum.n_qubits_of(rho.shape[0])
    probs = np.clip(np.real(np.diagonal(rho)), 0.0, None)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, probs)
    return {bitstring_of(i, n): int(c) for i, c in enumerate(counts) if c > 0}


def estimate_expectation_from_samples(counts: dict[str, int], graph: Graph) -> float:
    """Mean classical cost over sampled bitstrings."""
    total = sum(counts.values())
    if total == 0:
        raise ValueError("empty histogram")
    return sum(c * cut_value(graph, b) for b, c in counts.items()) / total


# ---------------------------------------------------------------------------
# Fidelity estimates
# ---------------------------------------------------------------------------

def cost_fidelity_estimate(n_edges: int, err_2q: float) -> float:
    """(1 - e)^(2n): two CNOTs per edge, each succeeding with probability 1-e."""
    if not 0.0 <= err_2q <= 1.0:
        raise ValueError("error rate must lie in [0, 1]")
    return (1.0 - err_2q) ** (2 * n_edges)


def cost_layer_state_fidelity(graph: Graph, gamma: float, device: DeviceModel,
                              toggles: NoiseToggles, t_scale: float = 1.0) -> float:
    """Fidelity of one noisy phase-separation layer applied to |+>^N.

    t_scale multiplies all gate durations, sweeping the ratio of execution
    time to the coherence times without touching the device parameters.
    """
    if t_scale < 0:
        raise ValueError("t_scale must be non-negative")
    dev = replace(device, durations={k: v * t_scale for k, v in device.durations.items()})
    n = graph.n_nodes
    gates = []
    for (u, v, _) in graph.edges:
        gates.extend([cnot(u, v), u1(-gamma, v), cnot(u, v)])
    initial = quantum.density_from_pure(quantum.plus_state(n))
    rho = simulate_circuit(gates, dev, toggles, initial=initial)
    # ideal output: uniform amplitudes with phase -gamma per crossing edge
    idx = np.arange(1 << n)
    crossings = np.zeros(1 << n)
    for (u, v, _) in graph.edges:
        crossings += ((idx >> u) & 1) ^ ((idx >> v) & 1)
    psi_ideal = np.exp(-1j * gamma * crossings) / np.sqrt(1 << n)
    return quantum.fidelity_to_pure(psi_ideal, rho)
