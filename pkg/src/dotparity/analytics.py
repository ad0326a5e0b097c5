"""Closed-form results for the parity measurement.

All energies are meV, times are ps, rates are 1/ps.  The measurement
conditions on "no photon detected": starting from an equal superposition
of the four spin states, the even population is untouched while the odd
population is excited and decays with detection efficiency eta, giving

    p_even(t) = 1 / (2 + eta*(exp(-Gamma1 t) - 1))

and the t -> infinity fidelity F0 = 1/(2 - eta).  Repeating the cycle n
times sharpens this to F0(n) = 1/(1 + (1-eta)^n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Reduced Planck constant in meV*ps.
HBAR = 0.6582119569

#: Below this alpha the spatial overlap switches to its Taylor series.
_F_SPATIAL_SERIES_CUTOFF = 1e-3


def p_even_analytic(t, eta: float, gamma1: float):
    """Conditional even-parity probability at time t of the decay window.

    Accepts scalar or array t (ps).  eta in [0,1], gamma1 in 1/ps.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0,1], got {eta}")
    if gamma1 < 0:
        raise ValueError("gamma1 must be nonnegative")
    t = np.asarray(t, dtype=float)
    out = 1.0 / (2.0 + eta * (np.exp(-gamma1 * t) - 1.0))
    return out if out.ndim else float(out)


def fidelity_no_photon(eta: float) -> float:
    """Even-target fidelity after one photonless measurement window, F0 = 1/(2-eta)."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0,1], got {eta}")
    return 1.0 / (2.0 - eta)


def fidelity_repeat(n: int, eta: float) -> float:
    """Fidelity after n photonless cycles, 1/(1 + (1-eta)^n); -> 1 as n grows."""
    if n < 1:
        raise ValueError("need at least one cycle")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0,1], got {eta}")
    return 1.0 / (1.0 + (1.0 - eta) ** n)


def f_spatial(alpha):
    """Spatial mode-overlap function f(alpha), alpha = k0 * |r_a - r_b|.

    f(alpha) = [2 alpha cos(alpha) + (alpha^2 - 2) sin(alpha)] / alpha^3,
    the angular average of cos^2(theta) e^{i alpha cos(theta)} over emission
    directions.  f(0) = 1/3; a Taylor branch avoids cancellation for small
    alpha:  f = 1/3 - alpha^2/10 + alpha^4/168 - ...
    """
    alpha = np.asarray(alpha, dtype=float)
    scalar = alpha.ndim == 0
    a = np.atleast_1d(alpha)
    out = np.empty_like(a)
    small = np.abs(a) < _F_SPATIAL_SERIES_CUTOFF
    asmall = a[small]
    out[small] = 1.0 / 3.0 - asmall**2 / 10.0 + asmall**4 / 168.0
    abig = a[~small]
    out[~small] = (2.0 * abig * np.cos(abig) + (abig**2 - 2.0) * np.sin(abig)) / abig**3
    return float(out[0]) if scalar else out


def fidelity_spatial(k0_dr: float) -> float:
    """Odd-state fidelity after a detected photon from dots separated by k0*dr.

    F = (1 + 3 f(k0_dr)) / 2; equals 1 at zero separation where the emitted
    modes are indistinguishable.
    """
    if k0_dr < 0:
        raise ValueError("k0_dr must be nonnegative")
    return float((1.0 + 3.0 * f_spatial(k0_dr)) / 2.0)


def detuned_phase(delta: float, t: float) -> complex:
    """Phase e^{i delta t / hbar} on the <01|rho|10> coherence after a
    click at time t (equivalently, the factor to restore on the |10>
    amplitude).  delta in meV, t in ps.
    """
    return complex(np.exp(1j * delta * t / HBAR))


@dataclass(frozen=True)
class DetuningCoefficients:
    """Eigenstate mixing amplitudes of the detuned single-exciton doublet."""

    a: float   # A = sqrt(1 + V_F^2 / delta^2)
    b1: float  # sqrt((A - 1) / (2A))
    b2: float  # sqrt((A + 1) / (2A))


def detuning_coefficients(delta: float, v_f: float) -> DetuningCoefficients:
    """Mixing coefficients b1, b2 for dot detuning delta and Foerster coupling v_f.

    A = sqrt(1 + v_f^2/delta^2); b_{1,2} = sqrt((A -/+ ... ) / (2A)) with
    b1^2 + b2^2 = 1.  The delta -> 0 limit is b1 = b2 = 1/sqrt(2).
    """
    if v_f == 0 and delta == 0:
        raise ValueError("detuning coefficients undefined for v_f = delta = 0")
    if delta == 0.0:
        r = 1.0 / math.sqrt(2.0)
        return DetuningCoefficients(a=math.inf, b1=r, b2=r)
    a = math.sqrt(1.0 + (v_f / delta) ** 2)
    b1 = math.sqrt((a - 1.0) / (2.0 * a))
    b2 = math.sqrt((a + 1.0) / (2.0 * a))
    return DetuningCoefficients(a=a, b1=b1, b2=b2)
