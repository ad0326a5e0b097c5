"""Two coupled quantum dots driven by a shared laser, in the rotating frame.

Each dot has levels |0>, |1>, |X>; only |1> couples optically to the
exciton |X>.  The rotating frame at the laser frequency removes the
optical carrier (the ~2 eV exciton energy never enters the dynamics),
leaving detunings (omega_a - omega_l), (omega_b - omega_l) on the
excitonic diagonal, a Foerster coupling V_F between |1X> and |X1>, the
biexciton shift V_XX on |XX>, and drive matrix elements Omega/2 on each
|1> <-> |X> transition.

The doubly-occupied sector is best viewed in the psi_pm basis,
psi_pm = (|1X> +/- |X1>)/sqrt(2): psi_+ is bright with enhanced coupling
Omega' = sqrt(2)*Omega and shifted by +V_F, psi_- is dark.  Those shifts
are what block |11> from being excited by a pulse resonant with the
single-exciton lines, making the fluorescence spin-parity selective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import hilbert
from .analytics import HBAR, detuning_coefficients
from .hilbert import DIM_PAIR, dyad, ket

#: Radiative rate of a single exciton, 1/ps (1 ns lifetime).
GAMMA1_DEFAULT = 1e-3

MODES = ("ideal", "h2_leakage", "detuned", "detuned+h2_leakage")


def canonical_mode(mode: str) -> str:
    """Validated mode token; the combined mode may be spelled with '_' too."""
    m = "detuned+h2_leakage" if mode == "detuned_h2_leakage" else mode
    if m not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    return m


@dataclass(frozen=True)
class DeviceParams:
    """Physical parameters; energies in meV, rates in 1/ps.

    omega_a, omega_b, omega_l are absolute transition/laser energies; only
    their differences matter in the rotating frame.
    """

    omega_a: float = 2.0e3
    omega_b: float = 2.0e3
    omega_l: float = 2.0e3
    v_f: float = 0.85
    v_xx: float = 5.0
    omega: float = 0.1
    gamma1: float = GAMMA1_DEFAULT
    gamma2: float = 2.0 * GAMMA1_DEFAULT
    gamma3: float = 2.0 * GAMMA1_DEFAULT
    eta: float = 0.5
    k0_dr: float = 0.05

    def __post_init__(self):
        for name in ("gamma1", "gamma2", "gamma3"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0,1], got {self.eta}")
        if self.v_f == 0.0:
            raise ValueError("v_f must be nonzero: the parity scheme relies on the "
                             "Foerster shift to protect |11>")
        if self.omega < 0:
            raise ValueError("omega must be nonnegative")

    @property
    def delta(self) -> float:
        """Dot detuning omega_a - omega_b (meV)."""
        return self.omega_a - self.omega_b

    @property
    def omega_prime(self) -> float:
        """Collectively enhanced drive sqrt(2)*Omega seen by psi_+."""
        return math.sqrt(2.0) * self.omega

    def detuned(self, delta: float) -> "DeviceParams":
        """Copy with the laser centered between dots split by delta."""
        return replace(self, omega_a=self.omega_l + delta / 2.0,
                       omega_b=self.omega_l - delta / 2.0)

    def with_omega(self, omega: float) -> "DeviceParams":
        return replace(self, omega=omega)


def default_device() -> DeviceParams:
    """Baseline resonant device (V_F=0.85, V_XX=5, Omega=0.1 meV, eta=0.5)."""
    return DeviceParams()


# ---------------------------------------------------------------------------
# Hamiltonians

_PROJ_X = np.diag([0.0, 0.0, 1.0]).astype(complex)
_DRIVE_DOT = np.zeros((3, 3), dtype=complex)
_DRIVE_DOT[1, 2] = _DRIVE_DOT[2, 1] = 1.0  # |1><X| + |X><1|
_I3 = np.eye(3, dtype=complex)


def hamiltonian_rotating(params: DeviceParams, omega: float | None = None) -> np.ndarray:
    """9x9 rotating-frame Hamiltonian (meV); ``omega`` overrides the drive."""
    w = params.omega if omega is None else omega
    da = params.omega_a - params.omega_l
    db = params.omega_b - params.omega_l
    h = da * np.kron(_PROJ_X, _I3) + db * np.kron(_I3, _PROJ_X)
    h += params.v_xx * dyad(ket("XX"), ket("XX"))
    vf = params.v_f * dyad(ket("1X"), ket("X1"))
    h += vf + vf.conj().T
    h += 0.5 * w * (np.kron(_DRIVE_DOT, _I3) + np.kron(_I3, _DRIVE_DOT))
    return h


#: Site-basis indices of the doubly-occupied sector {|11>,|1X>,|X1>,|XX>}.
H2_SITE_INDICES = (hilbert.index_of("11"), hilbert.index_of("1X"),
                   hilbert.index_of("X1"), hilbert.index_of("XX"))


def psi_basis() -> np.ndarray:
    """Unitary from the site basis {|11>,|1X>,|X1>,|XX>} to {|11>,psi+,psi-,|XX>}."""
    r = 1.0 / math.sqrt(2.0)
    u = np.array([[1, 0, 0, 0],
                  [0, r, r, 0],
                  [0, r, -r, 0],
                  [0, 0, 0, 1]], dtype=complex)
    return u


def psi_plus_vector() -> np.ndarray:
    """(|1X> + |X1>)/sqrt(2) embedded in the 9-level space."""
    v = (ket("1X").data + ket("X1").data) / math.sqrt(2.0)
    return v


def psi_minus_vector() -> np.ndarray:
    v = (ket("1X").data - ket("X1").data) / math.sqrt(2.0)
    return v


def h2_block(params: DeviceParams, omega: float | None = None) -> np.ndarray:
    """4x4 doubly-occupied block in the {|11>, psi+, psi-, |XX>} basis.

    Built directly from the level structure:
        diag(0, dbar+V_F, dbar-V_F, da+db+V_XX) with dbar = (da+db)/2,
        drive Omega'/2 on |11><psi+| and |psi+><XX| (psi- is dark),
        and a -delta/2 mixing of psi+/psi- when the dots are detuned.
    """
    w = params.omega if omega is None else omega
    da = params.omega_a - params.omega_l
    db = params.omega_b - params.omega_l
    dbar = 0.5 * (da + db)
    g = w * math.sqrt(2.0) / 2.0
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = 0.0
    h[1, 1] = dbar + params.v_f
    h[2, 2] = dbar - params.v_f
    h[3, 3] = da + db + params.v_xx
    h[0, 1] = h[1, 0] = g
    h[1, 3] = h[3, 1] = g
    h[1, 2] = h[2, 1] = -0.5 * (da - db)
    return h


def ideal_pi_unitary() -> np.ndarray:
    """Exact pi rotation on the single-exciton transitions.

    Swaps |01> <-> |0X| and |10> <-> |X0> (with the -i of a resonant pi
    pulse), identity elsewhere.  This is the Omega -> 0 idealization of the
    physical square pulse: full transfer in the singly-occupied sector,
    no leakage out of |11>.
    """
    u = np.eye(DIM_PAIR, dtype=complex)
    for g, e in (("01", "0X"), ("10", "X0")):
        i, j = hilbert.index_of(g), hilbert.index_of(e)
        u[i, i] = u[j, j] = 0.0
        u[i, j] = u[j, i] = -1.0j
    return u


# ---------------------------------------------------------------------------
# Collapse channels


@dataclass(frozen=True)
class LindbladChannel:
    """Collapse operator with detection metadata; rate is folded into ``op``.

    When a component of the operator rotates (detuned dots, interaction
    picture) it goes in ``op_phased`` and the full operator at time t is
    ``op + exp(-i*phase_rate*t/HBAR) * op_phased``.  The rate operator
    c^dag c stays time independent because the two components act on
    orthogonal source states (checked at construction).
    """

    name: str
    op: np.ndarray
    op_phased: np.ndarray | None = None
    phase_rate: float = 0.0
    efficiency: float = 0.0
    detectable: bool = True

    def __post_init__(self):
        object.__setattr__(self, "op", np.asarray(self.op, dtype=complex))
        if self.op_phased is not None:
            opb = np.asarray(self.op_phased, dtype=complex)
            object.__setattr__(self, "op_phased", opb)
            cross = self.op.conj().T @ opb
            if np.abs(cross).max() > 1e-12:
                raise ValueError(f"channel {self.name}: phased component must act on "
                                 "orthogonal sources for a static rate operator")
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError(f"channel {self.name}: efficiency outside [0,1]")

    @property
    def eta_effective(self) -> float:
        """Detection probability per emission; undetectable channels count as 0."""
        return self.efficiency if self.detectable else 0.0

    def at(self, t: float) -> np.ndarray:
        """Collapse operator at time t (stage-local clock for the phase)."""
        if self.op_phased is None:
            return self.op
        return self.op + np.exp(-1j * self.phase_rate * t / HBAR) * self.op_phased

    def rate_operator(self) -> np.ndarray:
        """c^dag c; time independent by the orthogonal-source construction."""
        cdc = self.op.conj().T @ self.op
        if self.op_phased is not None:
            cdc = cdc + self.op_phased.conj().T @ self.op_phased
        return cdc

    @property
    def max_rate(self) -> float:
        return float(np.linalg.eigvalsh(self.rate_operator()).max().real)


def channels(params: DeviceParams, mode: str = "ideal") -> list[LindbladChannel]:
    """Collapse channels of the conditional master equation for ``mode``.

    ideal               single detected channel c1 (collective exciton decay)
    detuned             c1 with the dot-a component rotating at params.delta
                        (interaction picture; pair with a detuning-free
                        window Hamiltonian)
    h2_leakage          adds the filtered (undetectable) cascade
                        c2 = sqrt(Gamma2)|11><psi+|, c3 = sqrt(Gamma3)|psi+><XX|
    detuned+h2_leakage  static c1 plus the cascade; here the detuning stays
                        on the Hamiltonian diagonal (laser frame), which is
                        physically equivalent and keeps the generator static
    """
    mode = canonical_mode(mode)
    g1 = math.sqrt(params.gamma1)
    op_a = g1 * dyad(ket("10"), ket("X0"))  # dot a decays
    op_b = g1 * dyad(ket("01"), ket("0X"))  # dot b decays
    out: list[LindbladChannel] = []
    if mode == "detuned":
        # Interaction picture of the exciton detunings: the window
        # Hamiltonian loses its +/- delta/2 diagonal and the dot-a source
        # rotates instead.  A photon at t_d then leaves the odd coherence
        # <01|rho|10> multiplied by exp(+i*delta*t_d/hbar).
        out.append(LindbladChannel(name="c1", op=op_b, op_phased=op_a,
                                   phase_rate=params.delta,
                                   efficiency=params.eta, detectable=True))
    else:
        out.append(LindbladChannel(name="c1", op=op_a + op_b,
                                   efficiency=params.eta, detectable=True))
    if mode.endswith("h2_leakage"):
        psi_p = psi_plus_vector()
        out.append(LindbladChannel(name="c2",
                                   op=math.sqrt(params.gamma2) * dyad(ket("11").data, psi_p),
                                   efficiency=0.0, detectable=False))
        out.append(LindbladChannel(name="c3",
                                   op=math.sqrt(params.gamma3) * dyad(psi_p, ket("XX").data),
                                   efficiency=0.0, detectable=False))
    return out


# ---------------------------------------------------------------------------
# Operating-regime validation


@dataclass(frozen=True)
class RegimeCheck:
    name: str
    ratio: float
    passed: bool


@dataclass(frozen=True)
class RegimeReport:
    checks: tuple[RegimeCheck, ...]
    threshold: float

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def ratio(self, name: str) -> float:
        for c in self.checks:
            if c.name == name:
                return c.ratio
        raise KeyError(name)

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            status = "ok" if c.passed else "FAIL"
            out.append(f"{c.name:34s} ratio {c.ratio:10.3f}  [{status}]")
        return out


def _safe_ratio(num: float, den: float) -> float:
    if den == 0.0:
        return math.inf
    return num / den


def validate_regime(params: DeviceParams, threshold: float = 10.0) -> RegimeReport:
    """Check the separations the parity scheme relies on; pass at ratio >= threshold.

    Resonant operation needs |V_F|, |V_XX| >> |Omega'|/2 so a pulse on the
    single-exciton lines leaves the doubly-occupied sector alone.  With dot
    detuning delta the shifted eigenstates require sqrt(delta^2+V_F^2) and
    V_XX large against the drive matrix elements Omega*(b2 +/- b1)/2 (which
    reduce to Omega'/2 and 0 at delta = 0), and a single pulse only covers
    both dots if delta << Omega.
    """
    half_prime = 0.5 * params.omega_prime
    checks = [
        RegimeCheck("foerster_vs_drive",
                    _safe_ratio(abs(params.v_f), half_prime),
                    _safe_ratio(abs(params.v_f), half_prime) >= threshold),
        RegimeCheck("biexciton_vs_drive",
                    _safe_ratio(abs(params.v_xx), half_prime),
                    _safe_ratio(abs(params.v_xx), half_prime) >= threshold),
    ]
    delta = params.delta
    r_laser = math.inf if delta == 0.0 else params.omega / abs(delta)
    checks.append(RegimeCheck("laser_covers_both_dots", r_laser, r_laser >= threshold))
    coeff = detuning_coefficients(delta, params.v_f)
    split = math.hypot(delta, params.v_f)
    for tag, b in (("sum", coeff.b2 + coeff.b1), ("diff", coeff.b2 - coeff.b1)):
        drive = 0.5 * params.omega * b
        r1 = _safe_ratio(split, drive)
        checks.append(RegimeCheck(f"exciton_splitting_vs_drive_{tag}", r1, r1 >= threshold))
        r2 = _safe_ratio(abs(params.v_xx), drive)
        checks.append(RegimeCheck(f"biexciton_vs_drive_{tag}", r2, r2 >= threshold))
    return RegimeReport(checks=tuple(checks), threshold=threshold)
