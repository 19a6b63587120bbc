"""Dense density-matrix linear algebra: state construction, unitary and
Kraus evolution, expectation values, fidelity.

Qubit ordering convention (used everywhere in this package): qubit 0 is the
least-significant bit of the computational-basis index. For an N-qubit
system, basis index ``z`` assigns qubit ``i`` the bit ``(z >> i) & 1``.
Multi-qubit operator matrices follow the same convention locally: for an
operator on ``targets = (t0, t1, ...)``, bit ``j`` of the local index is the
state of qubit ``t_j``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

# tolerance for structural invariants: Hermiticity, trace, unitarity,
# Kraus completeness
ATOL_STRUCT = 1e-9

MAX_QUBITS = 12  # dense 2^N x 2^N ceiling


def n_qubits_of(dim: int) -> int:
    """Number of qubits for a Hilbert-space dimension; rejects non-powers of 2."""
    n = int(dim).bit_length() - 1
    if dim <= 0 or (1 << n) != dim:
        raise ValueError(f"dimension {dim} is not a power of 2")
    if n > MAX_QUBITS:
        raise ValueError(f"{n} qubits exceeds the dense limit of {MAX_QUBITS}")
    return n


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two matrices (dimensions multiply)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("kron expects 2-D matrices")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValueError("kron inputs must be finite")
    return np.kron(a, b)


def basis_density(n_qubits: int, index: int = 0) -> np.ndarray:
    """Density matrix |index><index| on n qubits."""
    dim = 1 << n_qubits
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for {n_qubits} qubits")
    rho = np.zeros((dim, dim), dtype=complex)
    rho[index, index] = 1.0
    return rho


def density_from_pure(psi: np.ndarray) -> np.ndarray:
    """|psi><psi| for a normalized state vector."""
    psi = _as_state_vector(psi)
    return np.outer(psi, psi.conj())


def plus_state(n_qubits: int) -> np.ndarray:
    """Uniform superposition |+>^n as a state vector."""
    dim = 1 << n_qubits
    return np.full(dim, 1.0 / np.sqrt(dim), dtype=complex)


def _as_state_vector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValueError("state vector must be 1-D")
    n_qubits_of(psi.shape[0])
    norm = np.sum(np.abs(psi) ** 2)
    if abs(norm - 1.0) > ATOL_STRUCT:
        raise ValueError(f"state vector is not normalized (|norm-1| = {abs(norm - 1.0):.2e})")
    return psi


def validate_density_matrix(rho: np.ndarray, check_psd: bool = False) -> np.ndarray:
    """Check Hermiticity and unit trace (and optionally positivity) of rho.

    PSD validation costs an O(d^3) eigenvalue scan, so it is opt-in and meant
    for debugging, not per-operation use.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    n_qubits_of(rho.shape[0])
    if not np.isfinite(rho).all():
        raise ValueError("density matrix has non-finite entries")
    herm = np.abs(rho - rho.conj().T).max()
    if herm > ATOL_STRUCT:
        raise ValueError(f"density matrix is not Hermitian (deviation {herm:.2e})")
    tr = np.trace(rho)
    if abs(tr - 1.0) > ATOL_STRUCT:
        raise ValueError(f"density matrix trace deviates from 1 by {abs(tr - 1.0):.2e}")
    if check_psd:
        min_eig = np.linalg.eigvalsh(rho).min()
        if min_eig < -ATOL_STRUCT:
            raise ValueError(f"density matrix has negative eigenvalue {min_eig:.2e}")
    return rho


def _check_targets(targets, n: int, k: int) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if len(targets) != k:
        raise ValueError(f"operator on {k} qubit(s) given {len(targets)} target(s)")
    if len(set(targets)) != len(targets):
        raise ValueError(f"targets must be distinct, got {targets}")
    for t in targets:
        if not 0 <= t < n:
            raise ValueError(f"target {t} out of range for {n} qubits")
    return targets


def _left_mul(m: np.ndarray, x: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    """U_embedded @ x for a 2^k x 2^k matrix m acting on the given qubits."""
    k = len(targets)
    dim = 1 << n
    m_t = m.reshape((2,) * (2 * k))
    t_work = x.reshape((2,) * n + (dim,))
    # m's input axis k+j carries the bit of targets[k-1-j]; row axis of qubit
    # t in the work tensor is n-1-t
    in_axes = [n - 1 - t for t in reversed(targets)]
    out = np.tensordot(m_t, t_work, axes=(list(range(k, 2 * k)), in_axes))
    out = np.moveaxis(out, list(range(k)), in_axes)
    return out.reshape(dim, dim)


def _apply_matrix(rho: np.ndarray, m: np.ndarray, targets: tuple[int, ...], n: int) -> np.ndarray:
    """m rho m^dagger with m embedded on the target qubits."""
    a = _left_mul(m, rho, targets, n)
    return _left_mul(m, a.conj().T, targets, n).conj().T


def _apply_matrix_1q(rho: np.ndarray, u: np.ndarray, t: int, n: int) -> np.ndarray:
    """Single-qubit case of _apply_matrix via two single-GEMM contractions."""
    a, b = 1 << (n - 1 - t), 1 << t
    dim = 1 << n
    work = rho.reshape(a, 2, b * dim).transpose(1, 0, 2).reshape(2, -1)
    out = (u @ work).reshape(2, a, b * dim).transpose(1, 0, 2).reshape(dim, dim)
    work = out.reshape(dim * a, 2, b).transpose(1, 0, 2).reshape(2, -1)
    out = (u.conj() @ work).reshape(2, dim * a, b).transpose(1, 0, 2)
    return out.reshape(dim, dim)


@lru_cache(maxsize=None)
def _local_index_map(targets: tuple[int, ...], n: int) -> np.ndarray:
    """Local operator index of every global basis index."""
    idx = np.arange(1 << n)
    loc = np.zeros(1 << n, dtype=np.int64)
    for j, t in enumerate(targets):
        loc |= ((idx >> t) & 1) << j
    loc.setflags(write=False)
    return loc


@lru_cache(maxsize=None)
def _expand_permutation(perm: tuple[int, ...], targets: tuple[int, ...], n: int) -> np.ndarray:
    """Global source index for each global index under a local permutation."""
    src_loc = np.asarray(perm)[_local_index_map(targets, n)]
    full = np.arange(1 << n)
    for j, t in enumerate(targets):
        bit = (src_loc >> j) & 1
        full = (full & ~(1 << t)) | (bit << t)
    full.setflags(write=False)
    return full


@lru_cache(maxsize=4096)
def _analyze_unitary(buf: bytes, dim: int):
    """Validate unitarity, then classify the matrix as ('diag', phases),
    ('perm', source-map) or ('general',). Cached by matrix bytes."""
    m = np.frombuffer(buf, dtype=complex).reshape(dim, dim)
    err = np.abs(m.conj().T @ m - np.eye(dim)).max()
    if err > ATOL_STRUCT:
        raise ValueError(f"matrix is not unitary (deviation {err:.2e})")
    d = np.diag(m)
    if np.abs(m - np.diag(d)).max() == 0.0:
        d = d.copy()
        d.setflags(write=False)
        return ("diag", d)
    is_one = m == 1.0
    if (is_one.sum() == dim and np.abs(m - is_one).max() == 0.0
            and (is_one.sum(axis=0) == 1).all() and (is_one.sum(axis=1) == 1).all()):
        # m[i, perm[i]] = 1 means the gate maps |perm[i]> to |i>
        return ("perm", tuple(int(j) for j in np.argmax(is_one, axis=1)))
    return ("general",)


def apply_unitary(rho: np.ndarray, u: np.ndarray, targets) -> np.ndarray:
    """Evolve rho -> U rho U^dagger with u embedded on the target qubits.

    Diagonal and permutation unitaries (U1/RZ phases, CNOT, X) take O(4^N)
    shortcuts; general unitaries go through a tensor contraction. All paths
    compute the same embedded conjugation.
    """
    rho = np.asarray(rho, dtype=complex)
    u = np.ascontiguousarray(u, dtype=complex)
    n = n_qubits_of(rho.shape[0])
    k = n_qubits_of(u.shape[0])
    targets = _check_targets(targets, n, k)

    structure = _analyze_unitary(u.tobytes(), u.shape[0])
    if structure[0] == "diag":
        phases = structure[1][_local_index_map(targets, n)]
        return rho * np.outer(phases, phases.conj())
    if structure[0] == "perm":
        full = _expand_permutation(structure[1], targets, n)
        return rho[np.ix_(full, full)]
    if k == 1:
        return _apply_matrix_1q(rho, u, targets[0], n)
    return _apply_matrix(rho, u, targets, n)


def apply_kraus(rho: np.ndarray, kraus, targets) -> np.ndarray:
    """Evolve rho -> sum_k E_k rho E_k^dagger for a complete Kraus set."""
    rho = np.asarray(rho, dtype=complex)
    n = n_qubits_of(rho.shape[0])
    ops = [np.asarray(e, dtype=complex) for e in kraus]
    if not ops:
        raise ValueError("empty Kraus set")
    k = n_qubits_of(ops[0].shape[0])
    targets = _check_targets(targets, n, k)
    comp = sum(e.conj().T @ e for e in ops)
    err = np.abs(comp - np.eye(ops[0].shape[0])).max()
    if err > ATOL_STRUCT:
        raise ValueError(f"Kraus set is not complete (deviation {err:.2e})")
    out = np.zeros_like(rho)
    for e in ops:
        out += _apply_matrix(rho, e, targets, n)
    return out


def expectation(state: np.ndarray, obs: np.ndarray) -> float:
    """<psi|H|psi> for a state vector, or Tr(rho H) for a density matrix."""
    state = np.asarray(state, dtype=complex)
    obs = np.asarray(obs, dtype=complex)
    if obs.ndim != 2 or obs.shape[0] != obs.shape[1]:
        raise ValueError("observable must be a square matrix")
    herm = np.abs(obs - obs.conj().T).max()
    if herm > ATOL_STRUCT:
        raise ValueError(f"observable is not Hermitian (deviation {herm:.2e})")
    if state.ndim == 1:
        if state.shape[0] != obs.shape[0]:
            raise ValueError("state and observable dimensions differ")
        val = np.vdot(state, obs @ state)
    elif state.ndim == 2:
        if state.shape != obs.shape:
            raise ValueError("state and observable dimensions differ")
        val = np.trace(state @ obs)
    else:
        raise ValueError("state must be a vector or a square matrix")
    if abs(val.imag) > ATOL_STRUCT:
        raise ValueError(f"expectation has imaginary residue {val.imag:.2e}")
    return float(val.real)


def expectation_diag(rho: np.ndarray, diag_obs: np.ndarray) -> float:
    """Tr(rho diag(d)) using only the diagonal of rho (fast path for diagonal H)."""
    rho = np.asarray(rho)
    diag_obs = np.asarray(diag_obs, dtype=float)
    if diag_obs.ndim != 1 or rho.shape[0] != diag_obs.shape[0]:
        raise ValueError("diagonal observable length does not match the state")
    return float(np.real(np.diagonal(rho)) @ diag_obs)


def fidelity_to_pure(psi: np.ndarray, rho: np.ndarray) -> float:
    """F = <psi|rho|psi>, clamped to [0, 1] after a tolerance check."""
    psi = _as_state_vector(psi)
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape != (psi.shape[0], psi.shape[0]):
        raise ValueError("state vector and density matrix dimensions differ")
    val = np.vdot(psi, rho @ psi)
    f = val.real
    if abs(val.imag) > ATOL_STRUCT or f < -ATOL_STRUCT or f > 1.0 + ATOL_STRUCT:
        raise ValueError(f"fidelity {val} outside [0, 1] beyond tolerance")
    return float(min(max(f, 0.0), 1.0))
