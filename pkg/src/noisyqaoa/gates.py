"""Parameterized gate definitions and decomposition into the native set.

The modeled hardware natively supports U1, U2, U3 and CNOT. Derived gates
(H, X, RX, RY, RZ) decompose into a single native gate, possibly up to a
global phase, and inherit its duration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .noise import DeviceModel

NATIVE_KINDS = ("U1", "U2", "U3", "CNOT")
DERIVED_KINDS = ("H", "X", "RX", "RY", "RZ")

_N_PARAMS = {"U1": 1, "U2": 2, "U3": 3, "CNOT": 0,
             "H": 0, "X": 0, "RX": 1, "RY": 1, "RZ": 1}
_ARITY = {kind: (2 if kind == "CNOT" else 1) for kind in _N_PARAMS}

# Default gate-operation times of the modeled hardware, in ns. U1 is a
# virtual frame change: zero duration and zero error.
DEFAULT_DURATIONS_NS = {"U1": 0.0, "U2": 60.0, "U3": 120.0, "CNOT": 720.0}


@dataclass(frozen=True)
class GateOp:
    """A gate instance: kind, angle parameters, target qubits.

    For CNOT, targets are (control, target). Durations are not stored; they
    derive from the device model via duration_of().
    """

    kind: str
    params: tuple[float, ...]
    targets: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in _N_PARAMS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.params) != _N_PARAMS[self.kind]:
            raise ValueError(f"{self.kind} takes {_N_PARAMS[self.kind]} parameter(s), "
                             f"got {len(self.params)}")
        if not all(math.isfinite(a) for a in self.params):
            raise ValueError(f"{self.kind} has non-finite parameters {self.params}")
        if len(self.targets) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} acts on {_ARITY[self.kind]} qubit(s), "
                             f"got targets {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"{self.kind} targets must be distinct, got {self.targets}")
        if any(t < 0 for t in self.targets):
            raise ValueError(f"negative qubit index in {self.targets}")


def u1(lam: float, qubit: int) -> GateOp:
    return GateOp("U1", (lam,), (qubit,))


def u2(phi: float, lam: float, qubit: int) -> GateOp:
    return GateOp("U2", (phi, lam), (qubit,))


def u3(theta: float, phi: float, lam: float, qubit: int) -> GateOp:
    return GateOp("U3", (theta, phi, lam), (qubit,))


def cnot(control: int, target: int) -> GateOp:
    return GateOp("CNOT", (), (control, target))


def h(qubit: int) -> GateOp:
    return GateOp("H", (), (qubit,))


def x(qubit: int) -> GateOp:
    return GateOp("X", (), (qubit,))


def rx(theta: float, qubit: int) -> GateOp:
    return GateOp("RX", (theta,), (qubit,))


def ry(theta: float, qubit: int) -> GateOp:
    return GateOp("RY", (theta,), (qubit,))


def rz(theta: float, qubit: int) -> GateOp:
    return GateOp("RZ", (theta,), (qubit,))


def _u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([
        [c, -np.exp(1j * lam) * s],
        [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
    ])


# CNOT in the package's little-endian convention: local bit 0 = control,
# local bit 1 = target, so |control target> columns run 00, 01, 10, 11 with
# the control as the fast index.
_CNOT_MATRIX = np.array([
    [1, 0, 0, 0],
    [0, 0, 0, 1],
    [0, 0, 1, 0],
    [0, 1, 0, 0],
], dtype=complex)


@lru_cache(maxsize=4096)
def _matrix_for(kind: str, params: tuple[float, ...]) -> np.ndarray:
    if kind == "U3":
        m = _u3_matrix(*params)
    elif kind == "U2":
        m = _u3_matrix(np.pi / 2, params[0], params[1])
    elif kind == "U1":
        m = np.array([[1, 0], [0, np.exp(1j * params[0])]], dtype=complex)
    elif kind == "CNOT":
        m = _CNOT_MATRIX
    elif kind == "H":
        m = _u3_matrix(np.pi / 2, 0.0, np.pi)
    elif kind == "X":
        m = _u3_matrix(np.pi, 0.0, np.pi)
    elif kind == "RX":
        m = _u3_matrix(params[0], -np.pi / 2, np.pi / 2)
    elif kind == "RY":
        m = _u3_matrix(params[0], 0.0, 0.0)
    elif kind == "RZ":
        half = params[0] / 2
        m = np.array([[np.exp(-1j * half), 0], [0, np.exp(1j * half)]])
    else:
        raise ValueError(f"unknown gate kind {kind!r}")
    m.setflags(write=False)
    return m


def matrix_of(gate: GateOp) -> np.ndarray:
    """Unitary matrix of a gate (2x2, or 4x4 for CNOT). Read-only view."""
    return _matrix_for(gate.kind, gate.params)


def decompose_to_native(gate: GateOp) -> list[GateOp]:
    """Rewrite a gate as native U1/U2/U3/CNOT gates, up to a global phase.

    The only phase dropped is RZ(theta) = e^{-i theta/2} U1(theta), which is
    irrelevant for density-matrix evolution.
    """
    kind, p, t = gate.kind, gate.params, gate.targets
    if kind in NATIVE_KINDS:
        return [gate]
    if kind == "H":
        return [u2(0.0, np.pi, t[0])]
    if kind == "X":
        return [u3(np.pi, 0.0, np.pi, t[0])]
    if kind == "RX":
        return [u3(p[0], -np.pi / 2, np.pi / 2, t[0])]
    if kind == "RY":
        return [u3(p[0], 0.0, 0.0, t[0])]
    if kind == "RZ":
        return [u1(p[0], t[0])]
    raise ValueError(f"unknown gate kind {kind!r}")


# native kinds per gate kind; angles don't affect timing, so this mirrors
# decompose_to_native without building gate objects
_NATIVE_DECOMPOSITION_KINDS = {
    "U1": ("U1",), "U2": ("U2",), "U3": ("U3",), "CNOT": ("CNOT",),
    "H": ("U2",), "X": ("U3",), "RX": ("U3",), "RY": ("U3",), "RZ": ("U1",),
}


def duration_of(gate: GateOp, device: "DeviceModel") -> float:
    """Gate-operation time in ns: the summed durations of the native parts."""
    return sum(device.durations[k] for k in _NATIVE_DECOMPOSITION_KINDS[gate.kind])


def is_virtual(gate: GateOp) -> bool:
    """True for frame-change gates (U1 and anything decomposing to U1 only)."""
    return all(k == "U1" for k in _NATIVE_DECOMPOSITION_KINDS[gate.kind])
