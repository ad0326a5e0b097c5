"""Dense complex linear algebra over small labeled Hilbert spaces.

States and operators are thin wrappers around numpy arrays.  The two-dot
space used throughout the package is the 9-level tensor product of two
three-level dots with per-dot levels ``0`` (spin up), ``1`` (spin down)
and ``X`` (exciton); the composite basis index is ``3*a + b`` for dot
levels ``a`` and ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Centralized numerical tolerances: algebraic identities are checked at
# ATOL_ALGEBRA, positivity (which degrades fastest under integration) at
# the looser ATOL_PSD.
ATOL_ALGEBRA = 1e-12
ATOL_PSD = 1e-10
ATOL_NORM = 1e-9

LEVELS = ("0", "1", "X")
DIM_DOT = 3
DIM_PAIR = 9


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=complex)
    a.setflags(write=False)
    return a


def _as_array(obj) -> np.ndarray:
    """Accept a wrapper type or a bare ndarray."""
    data = getattr(obj, "data", obj)
    return np.asarray(data, dtype=complex)


@dataclass(frozen=True)
class StateVector:
    """Pure state; ``data`` is a complex vector, immutable after construction."""

    data: np.ndarray

    def __post_init__(self):
        vec = _freeze(np.asarray(self.data).reshape(-1))
        object.__setattr__(self, "data", vec)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def normalize(self) -> "StateVector":
        n = self.norm
        if n < ATOL_ALGEBRA:
            raise ValueError("cannot normalize a zero vector")
        return StateVector(self.data / n)

    def density(self) -> "DensityOperator":
        psi = self.normalize().data
        return DensityOperator(np.outer(psi, psi.conj()), normalized=True)

    def overlap(self, other) -> complex:
        return complex(np.vdot(self.data, _as_array(other)))


@dataclass(frozen=True)
class Operator:
    """General (not necessarily Hermitian) square operator."""

    data: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.data)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"operator must be square, got shape {mat.shape}")
        object.__setattr__(self, "data", _freeze(mat))

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def dag(self) -> "Operator":
        return Operator(self.data.conj().T)

    def is_hermitian(self, atol: float = ATOL_ALGEBRA) -> bool:
        return bool(np.allclose(self.data, self.data.conj().T, atol=atol))

    def is_unitary(self, atol: float = ATOL_ALGEBRA) -> bool:
        d = self.dim
        return bool(np.allclose(self.data @ self.data.conj().T, np.eye(d), atol=atol))

    def __matmul__(self, other):
        return Operator(self.data @ _as_array(other))


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, positive-semidefinite operator; trace 1 iff ``normalized``.

    Unnormalized instances carry the no-detection probability weight of a
    conditional evolution in their trace.
    """

    data: np.ndarray
    normalized: bool = field(default=False)

    def __post_init__(self):
        mat = np.asarray(self.data)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {mat.shape}")
        object.__setattr__(self, "data", _freeze(mat))

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def trace(self) -> float:
        return float(np.real(np.trace(self.data)))

    def normalize(self) -> "DensityOperator":
        tr = self.trace()
        if tr < ATOL_ALGEBRA:
            raise ValueError("cannot normalize a density matrix with ~zero trace")
        return DensityOperator(self.data / tr, normalized=True)

    def is_hermitian(self, atol: float = ATOL_ALGEBRA) -> bool:
        return bool(np.allclose(self.data, self.data.conj().T, atol=atol))

    def is_psd(self, atol: float = ATOL_PSD) -> bool:
        evals = np.linalg.eigvalsh(0.5 * (self.data + self.data.conj().T))
        return bool(evals.min() >= -atol)

    def purity(self) -> float:
        rho = self.data / self.trace()
        return float(np.real(np.trace(rho @ rho)))


def tensor(*factors) -> np.ndarray:
    """Kronecker product of states or operators (as bare arrays)."""
    out = _as_array(factors[0])
    for f in factors[1:]:
        out = np.kron(out, _as_array(f))
    return out


def dyad(ket, bra) -> np.ndarray:
    """|ket><bra| as a bare array."""
    k = _as_array(ket).reshape(-1)
    b = _as_array(bra).reshape(-1)
    return np.outer(k, b.conj())


def expectation(op, state) -> complex:
    """<op> for a StateVector or DensityOperator argument."""
    a = _as_array(op)
    s = getattr(state, "data", state)
    s = np.asarray(s, dtype=complex)
    if s.ndim == 1:
        return complex(np.vdot(s, a @ s))
    return complex(np.trace(a @ s))


def fidelity(rho, psi) -> float:
    """<psi|rho|psi> for a pure target; rho is normalized first.

    This is the overlap fidelity used throughout (targets are always pure),
    not the Uhlmann fidelity.
    """
    r = _as_array(rho)
    if r.ndim == 1:  # pure-pure case
        p = _as_array(psi).reshape(-1)
        r = r / np.linalg.norm(r)
        return float(abs(np.vdot(p / np.linalg.norm(p), r)) ** 2)
    tr = np.real(np.trace(r))
    p = _as_array(psi).reshape(-1)
    p = p / np.linalg.norm(p)
    return float(np.real(np.vdot(p, r @ p)) / tr)


def partial_trace(rho, dims, keep) -> np.ndarray:
    """Trace out all subsystems not listed in ``keep``.

    dims : sequence of subsystem dimensions, in tensor order
    keep : indices of subsystems to retain (order preserved)
    """
    r = _as_array(rho)
    dims = list(dims)
    n = len(dims)
    keep = list(keep)
    if r.shape != (int(np.prod(dims)), int(np.prod(dims))):
        raise ValueError("dims inconsistent with matrix shape")
    traced = [i for i in range(n) if i not in keep]
    r = r.reshape(dims + dims)
    # Contract each traced subsystem's ket index with its bra index, highest
    # first so lower ket axes keep their positions as the array shrinks.
    for sub in sorted(traced, reverse=True):
        r = np.trace(r, axis1=sub, axis2=sub + n)
        n -= 1
    d_keep = int(np.prod([dims[i] for i in keep]))
    return r.reshape(d_keep, d_keep)


# ---------------------------------------------------------------------------
# Two-dot basis labels


def index_of(label: str) -> int:
    """Composite index of a two-character dot label, e.g. '1X' -> 5."""
    if len(label) != 2 or label[0] not in LEVELS or label[1] not in LEVELS:
        raise ValueError(f"bad two-dot label {label!r}; use characters from {LEVELS}")
    return DIM_DOT * LEVELS.index(label[0]) + LEVELS.index(label[1])


def label_of(index: int) -> str:
    if not 0 <= index < DIM_PAIR:
        raise ValueError(f"index {index} outside the 9-level space")
    return LEVELS[index // DIM_DOT] + LEVELS[index % DIM_DOT]


def ket(label: str) -> StateVector:
    """Basis state of the two-dot space from its label ('00', '1X', ...)."""
    v = np.zeros(DIM_PAIR, dtype=complex)
    v[index_of(label)] = 1.0
    return StateVector(v)


# Computational (spin) subspace: both dots unexcited.
COMPUTATIONAL_LABELS = ("00", "01", "10", "11")
COMPUTATIONAL_INDICES = tuple(index_of(s) for s in COMPUTATIONAL_LABELS)

# Decoupled exciton-number sectors of the rotating-frame model.
SECTOR_INDICES = {
    0: (index_of("00"),),
    1: (index_of("01"), index_of("0X"), index_of("10"), index_of("X0")),
    2: (index_of("11"), index_of("1X"), index_of("X1"), index_of("XX")),
}


def computational_state(amplitudes) -> StateVector:
    """Embed a 4-amplitude spin state (|00>,|01>,|10>,|11>) in the 9-level space."""
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if amps.shape[0] != 4:
        raise ValueError("expected 4 amplitudes for the computational subspace")
    v = np.zeros(DIM_PAIR, dtype=complex)
    v[list(COMPUTATIONAL_INDICES)] = amps
    return StateVector(v).normalize()


def projector(indices, dim: int = DIM_PAIR) -> np.ndarray:
    p = np.zeros((dim, dim), dtype=complex)
    for i in indices:
        p[i, i] = 1.0
    return p
