"""Noise channels and the per-gate noisy evolution pipeline.

Each gate is simulated as the ideal unitary followed by, in order: gate
error (depolarizing on the gate's target qubits, skipped for virtual U1
gates), relaxation (amplitude damping for the gate's duration), and
dephasing (phase damping for the gate's duration). Decoherence acts on
every qubit of the register, since wall-clock time passes globally while
gates execute serially.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import quantum
from .gates import DEFAULT_DURATIONS_NS, GateOp, duration_of, is_virtual, matrix_of

US_TO_NS = 1000.0


@dataclass(frozen=True)
class DeviceModel:
    """Noise and timing parameters of the modeled quantum computer.

    The device is fully connected (CNOT between any pair) and all qubits
    share the same parameters. Defaults are the modeled superconducting
    hardware: T1 = 45 us, T2 = 20 us, gate errors 1.5e-3 (1q) / 4e-2 (2q),
    gate times 0/60/120/720 ns for U1/U2/U3/CNOT.
    """

    n_qubits: int = 6
    t1_us: float = 45.0
    t2_us: float = 20.0
    err_1q: float = 1.5e-3
    err_2q: float = 4e-2
    durations: dict = field(default_factory=lambda: dict(DEFAULT_DURATIONS_NS))
    t1_scale: float = 1.0
    t2_scale: float = 1.0
    ge1_scale: float = 1.0
    ge2_scale: float = 1.0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("device needs at least one qubit")
        if self.t1_us <= 0 or self.t2_us <= 0:
            raise ValueError("coherence times must be positive")
        if not (0.0 <= self.err_1q <= 1.0 and 0.0 <= self.err_2q <= 1.0):
            raise ValueError("gate error rates must lie in [0, 1]")
        if any(d < 0 for d in self.durations.values()):
            raise ValueError("gate durations must be non-negative")
        if min(self.t1_scale, self.t2_scale, self.ge1_scale, self.ge2_scale) <= 0:
            raise ValueError("scale multipliers must be positive")

    @property
    def t1_ns(self) -> float:
        return self.t1_us * self.t1_scale * US_TO_NS

    @property
    def t2_ns(self) -> float:
        return self.t2_us * self.t2_scale * US_TO_NS

    def gate_error_rate(self, gate: GateOp) -> float:
        if len(gate.targets) == 2:
            return self.err_2q * self.ge2_scale
        return self.err_1q * self.ge1_scale


@dataclass(frozen=True)
class NoiseToggles:
    """Which noise sources act; all off reproduces ideal evolution exactly."""

    gate_error: bool = False
    relaxation: bool = False
    dephasing: bool = False


SERIES = {
    "PURE": NoiseToggles(),
    "GE": NoiseToggles(gate_error=True),
    "T1": NoiseToggles(relaxation=True),
    "T2": NoiseToggles(dephasing=True),
    "COMBINED": NoiseToggles(gate_error=True, relaxation=True, dephasing=True),
}


def toggles_for_series(series: str) -> NoiseToggles:
    try:
        return SERIES[series.upper()]
    except KeyError:
        raise ValueError(f"unknown noise series {series!r}; "
                         f"choose from {sorted(SERIES)}") from None


# ---------------------------------------------------------------------------
# Kraus-set constructors
# ---------------------------------------------------------------------------

_PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def depolarizing_kraus(p: float, n_qubits: int = 1) -> list[np.ndarray]:
    """Kraus set of the n-qubit depolarizing channel rho -> (1-p) rho + p I/2^n.

    Realized as the 4^n-element Pauli set with weight sqrt(1 - p (4^n-1)/4^n)
    on the identity and sqrt(p/4^n) on every other Pauli string.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability {p} outside [0, 1]")
    if n_qubits not in (1, 2):
        raise ValueError("depolarizing channel supports 1 or 2 qubits")
    m = 4 ** n_qubits
    ops = []
    for code in range(m):
        pauli = np.eye(1, dtype=complex)
        c = code
        for _ in range(n_qubits):
            pauli = np.kron(_PAULIS[c & 3], pauli)
            c >>= 2
        w = np.sqrt(1.0 - p * (m - 1) / m) if code == 0 else np.sqrt(p / m)
        ops.append(w * pauli)
    return ops


def amplitude_damping_kraus(t_ns: float, t1_ns: float) -> list[np.ndarray]:
    """Relaxation toward |0> after t ns of idling: gamma = 1 - exp(-t/T1)."""
    if t_ns < 0:
        raise ValueError("elapsed time must be non-negative")
    if t1_ns <= 0:
        raise ValueError("T1 must be positive")
    gamma = 1.0 - np.exp(-t_ns / t1_ns)
    return [
        np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex),
        np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex),
    ]


def phase_damping_kraus(t_ns: float, t2_ns: float) -> list[np.ndarray]:
    """Coherence decay after t ns of idling: lambda = 1 - exp(-t/T2).

    Populations (the diagonal of rho) are untouched.
    """
    if t_ns < 0:
        raise ValueError("elapsed time must be non-negative")
    if t2_ns <= 0:
        raise ValueError("T2 must be positive")
    lam = 1.0 - np.exp(-t_ns / t2_ns)
    return [
        np.array([[1, 0], [0, np.sqrt(1 - lam)]], dtype=complex),
        np.array([[0, 0], [0, np.sqrt(lam)]], dtype=complex),
    ]


# ---------------------------------------------------------------------------
# Channel application
#
# The helpers below are algebraic shortcuts for the channels above, used in
# the per-gate pipeline where generic Kraus summation would dominate the
# runtime. Each is checked against quantum.apply_kraus in the test suite.
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _depol_index_maps(targets: tuple[int, ...], n: int):
    """Precomputed gathers for the depolarizing closed form.

    trace_idx[r, c, loc] flat-indexes rho at (embed(r, loc), embed(c, loc));
    expand_idx flat-indexes the traced matrix back at every (I, J) whose
    target bits agree, and same_over_k carries the I/2^k normalization.
    """
    dim = 1 << n
    k = len(targets)
    idx = np.arange(dim)
    mask = 0
    for t in targets:
        mask |= 1 << t
    rest_bits = [b for b in range(n) if not (mask >> b) & 1]
    rest_dim = 1 << (n - k)

    embed = np.zeros((rest_dim, 1 << k), dtype=np.int64)
    for r in range(rest_dim):
        base = 0
        for j, b in enumerate(rest_bits):
            base |= ((r >> j) & 1) << b
        for loc in range(1 << k):
            full = base
            for j, t in enumerate(targets):
                full |= ((loc >> j) & 1) << t
            embed[r, loc] = full
    trace_idx = embed[:, None, :] * dim + embed[None, :, :]

    rest_of = np.zeros(dim, dtype=np.int64)
    for i in range(dim):
        out = 0
        for j, b in enumerate(rest_bits):
            out |= ((i >> b) & 1) << j
        rest_of[i] = out
    expand_idx = rest_of[:, None] * rest_dim + rest_of[None, :]
    same_over_k = (((idx[:, None] ^ idx[None, :]) & mask) == 0) / (1 << k)
    return trace_idx, expand_idx, same_over_k


def _apply_depolarizing(rho: np.ndarray, p: float, targets: tuple[int, ...], n: int) -> np.ndarray:
    """(1-p) rho + p * (I/2^k on targets) tensor Tr_targets(rho)."""
    if p == 0.0:
        return rho
    trace_idx, expand_idx, same_over_k = _depol_index_maps(tuple(sorted(targets)), n)
    flat = rho.reshape(-1)
    tr = flat[trace_idx].sum(axis=-1)
    mixed = tr.reshape(-1)[expand_idx] * same_over_k
    return (1.0 - p) * rho + p * mixed


@lru_cache(maxsize=None)
def _damping_flow_maps(n: int) -> tuple:
    """Per qubit: flat positions with (row bit, col bit) = (0, 0) and their
    (1, 1) sources, for the population flow of amplitude damping."""
    dim = 1 << n
    idx = np.arange(dim)
    maps = []
    for t in range(n):
        clear = (idx >> t) & 1 == 0
        dst = np.flatnonzero(clear[:, None] & clear[None, :])
        maps.append((dst, dst + (1 << t) * (dim + 1)))
    return tuple(maps)


@lru_cache(maxsize=256)
def _damping_decay_mask(gamma: float, lam: float, n: int) -> np.ndarray:
    """Elementwise decay: per qubit, (1-gamma) on the |1><1| population,
    sqrt((1-gamma)(1-lam)) on coherences."""
    coh = np.sqrt((1.0 - gamma) * (1.0 - lam))
    per_pair = np.array([[1.0, coh], [coh, 1.0 - gamma]])
    idx = np.arange(1 << n)
    mask = np.ones(((1 << n), (1 << n)))
    for t in range(n):
        mask *= per_pair[(idx[:, None] >> t) & 1, (idx[None, :] >> t) & 1]
    mask.setflags(write=False)
    return mask


def _apply_damping_all(rho: np.ndarray, gamma: float, lam: float, n: int) -> np.ndarray:
    """Amplitude damping (gamma) then phase damping (lam) on every qubit.

    The product channel factors into commuting population flows (applied
    in place per qubit) followed by one elementwise decay.
    """
    if gamma == 0.0 and lam == 0.0:
        return rho
    rho = rho.copy()
    if gamma:
        flat = rho.reshape(-1)
        for dst, src in _damping_flow_maps(n):
            flat[dst] += gamma * flat[src]
    rho *= _damping_decay_mask(gamma, lam, n)
    return rho


def apply_noisy_gate(rho: np.ndarray, gate: GateOp, device: DeviceModel,
                     toggles: NoiseToggles) -> np.ndarray:
    """One gate of the noisy pipeline: ideal unitary, then the toggled channels."""
    n = quantum.n_qubits_of(rho.shape[0])
    rho = quantum.apply_unitary(rho, matrix_of(gate), gate.targets)
    virtual = is_virtual(gate)
    if toggles.gate_error and not virtual:
        p = 2.0 * device.gate_error_rate(gate)
        if p > 1.0:
            raise ValueError(f"depolarizing probability 2*err = {p:.3g} exceeds 1")
        rho = _apply_depolarizing(rho, p, gate.targets, n)
    if toggles.relaxation or toggles.dephasing:
        t = duration_of(gate, device)
        if t > 0.0:
            gamma = 1.0 - np.exp(-t / device.t1_ns) if toggles.relaxation else 0.0
            lam = 1.0 - np.exp(-t / device.t2_ns) if toggles.dephasing else 0.0
            rho = _apply_damping_all(rho, gamma, lam, n)
    return rho


def simulate_circuit(gates, device: DeviceModel, toggles: NoiseToggles,
                     initial: np.ndarray | None = None,
                     n_qubits: int | None = None) -> np.ndarray:
    """Run a gate list through apply_noisy_gate, starting from |0...0><0...0|.

    The register size comes from `initial` when given, else `n_qubits`, else
    the device size.
    """
    if initial is not None:
        rho = np.array(initial, dtype=complex)
        n = quantum.n_qubits_of(rho.shape[0])
    else:
        n = device.n_qubits if n_qubits is None else n_qubits
        rho = quantum.basis_density(n)
    if n > device.n_qubits:
        raise ValueError(f"circuit needs {n} qubits but the device has {device.n_qubits}")
    for gate in gates:
        if any(t >= n for t in gate.targets):
            raise ValueError(f"gate {gate} addresses qubits outside the {n}-qubit register")
        rho = apply_noisy_gate(rho, gate, device, toggles)
    return rho


# ---------------------------------------------------------------------------
# Device configuration files
# ---------------------------------------------------------------------------

def device_from_dict(cfg: dict) -> DeviceModel:
    """Build a DeviceModel from a config mapping; unknown keys are rejected."""
    known = {"n_qubits", "t1_us", "t2_us", "err_1q", "err_2q", "durations_ns", "scales"}
    unknown = set(cfg) - known
    if unknown:
        raise ValueError(f"unknown device config keys: {sorted(unknown)}")
    kwargs = {k: cfg[k] for k in ("n_qubits", "t1_us", "t2_us", "err_1q", "err_2q")
              if k in cfg}
    durations = dict(DEFAULT_DURATIONS_NS)
    durations.update(cfg.get("durations_ns", {}))
    scales = cfg.get("scales", {})
    return DeviceModel(
        durations=durations,
        t1_scale=scales.get("t1", 1.0),
        t2_scale=scales.get("t2", 1.0),
        ge1_scale=scales.get("ge1", 1.0),
        ge2_scale=scales.get("ge2", 1.0),
        **kwargs,
    )


def load_device(path) -> DeviceModel:
    """Load a DeviceModel from a JSON config file (see README for the schema)."""
    with open(Path(path)) as fh:
        return device_from_dict(json.load(fh))


def scaled_device(device: DeviceModel, t1: float = 1.0, t2: float = 1.0,
                  ge1: float = 1.0, ge2: float = 1.0) -> DeviceModel:
    """Copy of the device with its scale multipliers replaced."""
    return replace(device, t1_scale=t1, t2_scale=t2, ge1_scale=ge1, ge2_scale=ge2)
