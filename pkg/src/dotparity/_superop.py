"""Superoperator utilities: vec/unvec, Choi/Kraus/PTM forms, diamond norm.

Conventions: row-major (C-order) vectorization, so vec(A rho B) =
(A kron B^T) vec(rho).  Choi matrices are ordered (out kron in):
J = sum_ij E(|i><j|) kron |i><j|, hence CP <=> J >= 0 and trace
preservation <=> Tr_out J = I.
"""

from __future__ import annotations

import numpy as np


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1)


def unvec(v: np.ndarray, d: int) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(d, d)


def spre(a: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> a rho."""
    a = np.asarray(a, dtype=complex)
    return np.kron(a, np.eye(a.shape[0], dtype=complex))


def spost(b: np.ndarray) -> np.ndarray:
    """Superoperator of rho -> rho b."""
    b = np.asarray(b, dtype=complex)
    return np.kron(np.eye(b.shape[0], dtype=complex), b.T)


def sandwich(a: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
    """Superoperator of rho -> a rho b^dag (b defaults to a)."""
    a = np.asarray(a, dtype=complex)
    b = a if b is None else np.asarray(b, dtype=complex)
    return np.kron(a, b.conj())


def apply_superop(s: np.ndarray, rho: np.ndarray) -> np.ndarray:
    d = rho.shape[0]
    return (s @ vec(rho)).reshape(d, d)


def superop_from_apply(fn, d: int) -> np.ndarray:
    """Materialize a linear map on d x d matrices column by column."""
    s = np.zeros((d * d, d * d), dtype=complex)
    for k in range(d * d):
        e = np.zeros(d * d, dtype=complex)
        e[k] = 1.0
        s[:, k] = vec(fn(unvec(e, d)))
    return s


def unitary_superop(u: np.ndarray) -> np.ndarray:
    return sandwich(u)


def identity_superop(d: int) -> np.ndarray:
    return np.eye(d * d, dtype=complex)


# ---------------------------------------------------------------------------
# Representation conversions


def choi_from_superop(s: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(s.shape[0])))
    return s.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)


def superop_from_choi(j: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(j.shape[0])))
    return j.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)


def kraus_from_superop(s: np.ndarray, tol: float = 1e-9) -> list[np.ndarray]:
    """Kraus operators from the Choi eigendecomposition.

    Raises if the map is not CP beyond ``tol`` (most negative Choi
    eigenvalue); eigenvalues within the tolerance are clipped.
    """
    j = choi_from_superop(s)
    j = 0.5 * (j + j.conj().T)
    evals, evecs = np.linalg.eigh(j)
    if evals.min() < -tol:
        raise ValueError(f"map is not CP: min Choi eigenvalue {evals.min():.3e}")
    d = int(round(np.sqrt(s.shape[0])))
    out = []
    for lam, v in zip(evals, evecs.T):
        if lam > tol:
            out.append(np.sqrt(lam) * v.reshape(d, d))
    return out


def cp_defect(s: np.ndarray) -> float:
    """Most negative Choi eigenvalue (0 for an exactly CP map)."""
    j = choi_from_superop(s)
    evals = np.linalg.eigvalsh(0.5 * (j + j.conj().T))
    return float(min(evals.min(), 0.0))


def trace_hermitian_defects(s: np.ndarray) -> tuple[float, float]:
    """(trace-preservation defect, hermiticity-preservation defect) of a superop."""
    d = int(round(np.sqrt(s.shape[0])))
    j = choi_from_superop(s)
    tr_out = j.reshape(d, d, d, d).trace(axis1=0, axis2=2)
    tp = float(np.abs(tr_out - np.eye(d)).max())
    herm = float(np.abs(j - j.conj().T).max())
    return tp, herm


# ---------------------------------------------------------------------------
# Pauli transfer matrices and gate fidelity

_PAULI_1 = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_basis(n_qubits: int) -> tuple[list[str], list[np.ndarray]]:
    """All n-qubit Pauli products, lexicographic in (I, X, Y, Z)."""
    names = [""]
    mats = [np.array([[1.0]], dtype=complex)]
    for _ in range(n_qubits):
        names = [a + b for a in names for b in "IXYZ"]
        mats = [np.kron(m, _PAULI_1[b]) for m in mats for b in "IXYZ"]
    return names, mats


def ptm(s: np.ndarray, n_qubits: int) -> np.ndarray:
    """Pauli transfer matrix R_ij = tr(P_i E(P_j))/d of a superoperator."""
    d = 2**n_qubits
    _, paulis = pauli_basis(n_qubits)
    r = np.empty((d * d, d * d))
    for jcol, pj in enumerate(paulis):
        out = apply_superop(s, pj)
        for irow, pi in enumerate(paulis):
            r[irow, jcol] = np.real(np.trace(pi @ out)) / d
    return r


def average_gate_fidelity(s: np.ndarray, u_target: np.ndarray) -> float:
    """Average gate fidelity of channel ``s`` against unitary ``u_target``.

    Computed from the process (entanglement) fidelity via
    F_avg = (d F_pro + 1) / (d + 1).
    """
    d = u_target.shape[0]
    n = int(round(np.log2(d)))
    r_e = ptm(s, n)
    r_u = ptm(unitary_superop(u_target), n)
    f_pro = float(np.trace(r_u.T @ r_e)) / (d * d)
    return (d * f_pro + 1.0) / (d + 1.0)


# ---------------------------------------------------------------------------
# Qubit-register embeddings


def embed_pair_superop_apply(s_pair: np.ndarray, rho: np.ndarray,
                             pair: tuple[int, int], n_qubits: int) -> np.ndarray:
    """Apply a two-qubit superoperator to qubits ``pair`` of an n-qubit rho.

    ``pair`` is ordered: pair[0] feeds the first tensor slot of the map.
    """
    i, j = pair
    d = 2**n_qubits
    t = np.asarray(rho, dtype=complex).reshape((2,) * (2 * n_qubits))
    # bring the pair's ket and bra indices to the front, in order
    src = [i, j, n_qubits + i, n_qubits + j]
    t = np.moveaxis(t, src, [0, 1, 2, 3])
    rest = d // 4
    t = t.reshape(4, 4, rest * rest)
    s4 = s_pair.reshape(4, 4, 4, 4)  # [a, b, i, j] of vec-index blocks
    t = np.einsum("abij,ijr->abr", s4, t)
    t = t.reshape((2, 2, 2, 2) + (2,) * (2 * (n_qubits - 2)))
    t = np.moveaxis(t, [0, 1, 2, 3], src)
    return t.reshape(d, d)


def embed_pair_operator(op4: np.ndarray, pair: tuple[int, int], n_qubits: int) -> np.ndarray:
    """Lift a two-qubit operator onto qubits ``pair`` of an n-qubit register."""
    i, j = pair
    d = 2**n_qubits
    t = np.asarray(op4, dtype=complex).reshape(2, 2, 2, 2)  # [out_i, out_j, in_i, in_j]
    full = np.eye(d, dtype=complex).reshape((2,) * (2 * n_qubits))
    # contract identity's input legs i, j with the operator
    full = np.moveaxis(full, [i, j], [0, 1])
    rest = d // 4
    full = full.reshape(4, rest * d)
    full = np.einsum("ab,bc->ac", t.reshape(4, 4), full)
    full = full.reshape((2, 2) + (2,) * (2 * n_qubits - 2))
    full = np.moveaxis(full, [0, 1], [i, j])
    return full.reshape(d, d)


# ---------------------------------------------------------------------------
# Diamond norm (completely bounded trace norm) via SDP


def diamond_norm(s_delta: np.ndarray) -> float:
    """Diamond norm of a (Hermiticity-preserving) map given as a superoperator.

    Standard SDP (Watrous): maximize Re tr(J^dag X) subject to
    [[I kron rho0, X], [X^dag, I kron rho1]] >= 0 with rho0, rho1 density
    matrices on the input space; stated here in the (out kron in) Choi
    ordering, which swaps the usual rho kron I blocks to I kron rho.
    """
    import cvxpy as cp

    d = int(round(np.sqrt(s_delta.shape[0])))
    j = choi_from_superop(s_delta)

    x = cp.Variable((d * d, d * d), complex=True)
    rho0 = cp.Variable((d, d), hermitian=True)
    rho1 = cp.Variable((d, d), hermitian=True)
    eye = np.eye(d)
    block = cp.bmat([[cp.kron(eye, rho0), x],
                     [x.H, cp.kron(eye, rho1)]])
    constraints = [block >> 0, rho0 >> 0, rho1 >> 0,
                   cp.trace(rho0) == 1, cp.trace(rho1) == 1]
    objective = cp.Maximize(cp.real(cp.trace(j.conj().T @ x)))
    problem = cp.Problem(objective, constraints)
    problem.solve(solver=cp.SCS, eps=1e-8, max_iters=50_000)
    if problem.status not in ("optimal", "optimal_inaccurate"):
        raise RuntimeError(f"diamond-norm SDP failed: status {problem.status}")
    return float(problem.value)


def diamond_distance(s_a: np.ndarray, s_b: np.ndarray) -> float:
    return diamond_norm(s_a - s_b)
