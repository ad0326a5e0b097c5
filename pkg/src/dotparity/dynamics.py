"""Conditional master-equation propagation and photon-counting trajectories.

Between detector clicks the (unnormalized) conditional state follows

    d rho~/dt = -(i/hbar)[H, rho~]
                + sum_j ( (1 - eta_j) c_j rho~ c_j^dag
                          - {c_j^dag c_j, rho~}/2 ),

so its trace is the probability that no photon has been recorded;
undetected decay (eta_j < 1, or filtered channels) stays in the smooth
flow and only detected quanta cause jumps.  Setting every feed
coefficient to one instead gives the unconditional master equation.

Trajectories sample clicks from the exact per-step survival probability
tr rho~(t+dt) / tr rho~(t), which keeps click statistics free of
first-order time-step bias; only the O(dt) placement of the click inside
a step remains.  Ensembles are propagated as a single (N, d*d) array per
stage, with one spawned RNG substream per trajectory so results are
independent of batch size and reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm

from ._superop import sandwich, spost, spre
from .analytics import HBAR
from .hilbert import DIM_PAIR, DensityOperator, StateVector
from .model import (DeviceParams, LindbladChannel, canonical_mode,
                    hamiltonian_rotating, ideal_pi_unitary)

#: Dimensionless cap on dt * (spectral rate) for the explicit integrator.
STABILITY_LIMIT = 0.1
#: Cap on dt * max decay rate so first-order click sampling stays valid.
SAMPLING_LIMIT = 0.1

_RNG_CHUNK = 512


class StepSizeError(ValueError):
    """Time step too coarse for the requested propagation."""


class TimeDependenceError(ValueError):
    """Raised when a matrix-exponential propagator is asked for a
    time-dependent generator (detuned channels feeding back undetected
    decay); integrate those with method='rk4'."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size in ps and propagation method ('rk4' or 'expm')."""

    dt: float = 0.01
    method: str = "rk4"

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.method not in ("rk4", "expm"):
            raise ValueError(f"method must be 'rk4' or 'expm', got {self.method!r}")


DEFAULT_CONFIG = IntegratorConfig()


# ---------------------------------------------------------------------------
# Pulse schedules


@dataclass(frozen=True, eq=False)
class Stage:
    """One leg of a schedule: either a timed Hamiltonian segment or an
    instantaneous unitary (duration 0)."""

    label: str
    duration: float = 0.0
    hamiltonian: np.ndarray | None = None
    unitary: np.ndarray | None = None
    dt: float | None = None  # per-stage override of IntegratorConfig.dt

    def __post_init__(self):
        timed = self.hamiltonian is not None
        instant = self.unitary is not None
        if timed == instant:
            raise ValueError("stage needs exactly one of hamiltonian/unitary")
        if timed and self.duration <= 0:
            raise ValueError("timed stage needs a positive duration")
        if instant and self.duration != 0:
            raise ValueError("unitary stage must have zero duration")
        for mat in (self.hamiltonian, self.unitary):
            if mat is not None and mat.shape != (DIM_PAIR, DIM_PAIR):
                raise ValueError(f"stage operator must be {DIM_PAIR}x{DIM_PAIR}")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("stage dt must be positive")


@dataclass(frozen=True, eq=False)
class PulseSchedule:
    stages: tuple[Stage, ...]

    def __post_init__(self):
        if not self.stages:
            raise ValueError("schedule needs at least one stage")

    @property
    def duration(self) -> float:
        return sum(s.duration for s in self.stages)


def pi_pulse_duration(omega: float) -> float:
    """Length of a square pi pulse, pi*hbar/Omega, in ps."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    return math.pi * HBAR / omega


def pulse_stage(device: DeviceParams, omega: float | None = None,
                duration: float | None = None, dt: float | None = None,
                label: str = "pi_pulse") -> Stage:
    """Square drive pulse; duration defaults to a pi rotation of |1>."""
    w = device.omega if omega is None else omega
    if duration is None:
        duration = pi_pulse_duration(w)
    return Stage(label=label, duration=duration,
                 hamiltonian=hamiltonian_rotating(device, omega=w), dt=dt)


def decay_stage(hamiltonian: np.ndarray, duration: float,
                dt: float | None = None, label: str = "decay_window") -> Stage:
    return Stage(label=label, duration=duration, hamiltonian=hamiltonian, dt=dt)


def unitary_stage(u: np.ndarray, label: str = "ideal_pi_pulse") -> Stage:
    return Stage(label=label, unitary=np.asarray(u, dtype=complex))


def parity_schedule(device: DeviceParams, mode: str = "ideal",
                    window: float = 10_000.0, ideal_pulse: bool | None = None,
                    dt_pulse: float | None = None,
                    dt_window: float | None = None) -> PulseSchedule:
    """One excitation-plus-fluorescence cycle for the given model mode.

    Ideal modes replace the drive by the exact pi map and idle with H = 0
    during the window ('detuned' works in the interaction picture of the
    exciton splitting, so its window Hamiltonian vanishes as well and the
    detuning lives on the collapse channel instead).  Leakage modes drive
    a physical square pulse and keep the full Hamiltonian on during the
    window.
    """
    mode = canonical_mode(mode)
    if ideal_pulse is None:
        ideal_pulse = mode in ("ideal", "detuned")
    if mode == "detuned" and not ideal_pulse:
        raise ValueError("mode 'detuned' assumes an instantaneous pulse; "
                         "use 'detuned+h2_leakage' for a driven detuned pair")
    if window <= 0:
        raise ValueError("window must be positive")
    if ideal_pulse:
        first = unitary_stage(ideal_pi_unitary())
    else:
        first = pulse_stage(device, dt=dt_pulse)
    if mode in ("ideal", "detuned"):
        h_window = np.zeros((DIM_PAIR, DIM_PAIR), dtype=complex)
    else:
        h_window = hamiltonian_rotating(device, omega=0.0)
    return PulseSchedule((first, decay_stage(h_window, window, dt=dt_window)))


# ---------------------------------------------------------------------------
# Generators


def _feed_coefficients(chans: Sequence[LindbladChannel], feed: str) -> list[float]:
    if feed == "undetected":
        return [1.0 - ch.eta_effective for ch in chans]
    if feed == "all":
        return [1.0] * len(chans)
    if feed == "none":
        return [0.0] * len(chans)
    raise ValueError(f"feed must be 'undetected', 'all' or 'none', got {feed!r}")


def is_static(chans: Sequence[LindbladChannel], feed: str = "undetected") -> bool:
    """Whether the generator with the given feed-back is time independent."""
    coeffs = _feed_coefficients(chans, feed)
    return all(ch.op_phased is None or c == 0.0 for ch, c in zip(chans, coeffs))


def liouvillian(h: np.ndarray, chans: Sequence[LindbladChannel],
                feed: str = "undetected", hbar: float = HBAR) -> np.ndarray:
    """Static generator matrix acting on row-major vec(rho)."""
    if not is_static(chans, feed):
        raise TimeDependenceError(
            "generator is time dependent (phased channel with nonzero "
            "feed-back); integrate with method='rk4'")
    lv = (-1j / hbar) * (spre(h) - spost(h))
    for coeff, ch in zip(_feed_coefficients(chans, feed), chans):
        cdc = ch.rate_operator()
        lv -= 0.5 * (spre(cdc) + spost(cdc))
        if coeff:
            lv += coeff * sandwich(ch.op)
    return lv


def effective_hamiltonian(h: np.ndarray, chans: Sequence[LindbladChannel],
                          hbar: float = HBAR) -> np.ndarray:
    """Non-Hermitian H - (i*hbar/2) sum c^dag c driving pure no-click states."""
    heff = np.array(h, dtype=complex)
    for ch in chans:
        heff -= 0.5j * hbar * ch.rate_operator()
    return heff


def pure_path_allowed(chans: Sequence[LindbladChannel]) -> bool:
    """No-click states stay pure iff every channel is watched perfectly."""
    return all(ch.detectable and ch.eta_effective == 1.0 for ch in chans)


def spectral_rate(h: np.ndarray, chans: Sequence[LindbladChannel],
                  hbar: float = HBAR) -> float:
    """Fastest timescale 1/ps of the generator: ||H||/hbar + max rate.

    Phased channels contribute their rotation rate too, since the
    feed-back term they enter oscillates at phase_rate/hbar.
    """
    hnorm = float(np.linalg.norm(h, 2)) if h is not None else 0.0
    gmax = max((ch.max_rate for ch in chans), default=0.0)
    spin = max((abs(ch.phase_rate) / hbar for ch in chans
                if ch.op_phased is not None), default=0.0)
    return hnorm / hbar + gmax + spin


def check_step(dt: float, method: str, h: np.ndarray,
               chans: Sequence[LindbladChannel]) -> None:
    """Enforce the step-size invariants; raises StepSizeError."""
    if method == "rk4":
        rate = spectral_rate(h, chans)
        if dt * rate >= STABILITY_LIMIT:
            raise StepSizeError(
                f"dt={dt} ps too coarse: dt*(||H||/hbar + max rate) = "
                f"{dt * rate:.3g} >= {STABILITY_LIMIT} (need dt < "
                f"{STABILITY_LIMIT / rate:.3g} ps)")
    else:
        gmax = max((ch.max_rate for ch in chans), default=0.0)
        if dt * gmax >= SAMPLING_LIMIT:
            raise StepSizeError(
                f"dt={dt} ps too coarse for click sampling: dt*max rate = "
                f"{dt * gmax:.3g} >= {SAMPLING_LIMIT}")


def _rhs(h: np.ndarray, chans: Sequence[LindbladChannel],
         coeffs: Sequence[float], hbar: float) -> Callable:
    """Batched right-hand side on arrays of shape (..., d, d)."""
    cdc_sum = sum((ch.rate_operator() for ch in chans),
                  np.zeros((DIM_PAIR, DIM_PAIR), dtype=complex))
    static_feeds = [(c, ch.op) for c, ch in zip(coeffs, chans)
                    if c and ch.op_phased is None]
    phased_feeds = [(c, ch) for c, ch in zip(coeffs, chans)
                    if c and ch.op_phased is not None]

    def rhs(t: float, rho: np.ndarray) -> np.ndarray:
        out = (-1j / hbar) * (h @ rho - rho @ h)
        out -= 0.5 * (cdc_sum @ rho + rho @ cdc_sum)
        for c, op in static_feeds:
            out += c * (op @ rho @ op.conj().T)
        for c, ch in phased_feeds:
            op_t = ch.at(t)
            out += c * (op_t @ rho @ op_t.conj().T)
        return out

    return rhs


def _rk4_step(rhs: Callable, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = rhs(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


# ---------------------------------------------------------------------------
# Deterministic evolution


def _as_density_matrix(state) -> np.ndarray:
    if isinstance(state, StateVector):
        return state.density().data.copy()
    if isinstance(state, DensityOperator):
        return state.data.copy()
    arr = np.asarray(state, dtype=complex)
    if arr.ndim == 1:
        return np.outer(arr, arr.conj())
    return arr.copy()


def _parse_span(t_span) -> tuple[float, float]:
    if np.isscalar(t_span):
        t0, t1 = 0.0, float(t_span)
    else:
        t0, t1 = (float(x) for x in t_span)
    if t1 < t0:
        raise ValueError("t_span must run forward")
    return t0, t1


def _evolve(rho0, h, chans, t_span, config, sample_times, feed):
    cfg = config or DEFAULT_CONFIG
    t0, t1 = _parse_span(t_span)
    marks = [] if sample_times is None else [float(t) for t in sample_times]
    if any(t < t0 - 1e-12 or t > t1 + 1e-12 for t in marks) or marks != sorted(marks):
        raise ValueError("sample_times must be sorted and lie inside t_span")

    rho = _as_density_matrix(rho0)
    coeffs = _feed_coefficients(chans, feed)
    use_expm = cfg.method == "expm"
    if use_expm:
        lv = liouvillian(h, chans, feed=feed)  # raises if time dependent
    else:
        check_step(cfg.dt, "rk4", h, chans)
        rhs = _rhs(h, chans, coeffs, HBAR)

    samples: list[DensityOperator] = []
    t = t0
    for mark in marks + [t1]:
        seg = mark - t
        if seg > 1e-12:
            if use_expm:
                rho = (expm(lv * seg) @ rho.reshape(-1)).reshape(DIM_PAIR, DIM_PAIR)
            else:
                n = max(1, math.ceil(seg / cfg.dt))
                dt = seg / n
                for k in range(n):
                    rho = _rk4_step(rhs, t + k * dt, rho, dt)
        t = mark
        samples.append(DensityOperator(rho.copy()))

    final = samples.pop()  # the t1 entry
    if sample_times is None:
        return final
    return final, samples


def evolve_no_jump(rho0, h: np.ndarray, chans: Sequence[LindbladChannel],
                   t_span, config: IntegratorConfig | None = None,
                   sample_times: Sequence[float] | None = None):
    """Unnormalized no-click conditional state; its trace is the
    probability that no photon has been detected up to t."""
    return _evolve(rho0, h, chans, t_span, config, sample_times, "undetected")


def evolve_unconditional(rho0, h: np.ndarray, chans: Sequence[LindbladChannel],
                         t_span, config: IntegratorConfig | None = None,
                         sample_times: Sequence[float] | None = None):
    """Detector-averaged (unconditional) master-equation evolution."""
    return _evolve(rho0, h, chans, t_span, config, sample_times, "all")


# ---------------------------------------------------------------------------
# Stochastic trajectories


@dataclass(frozen=True)
class TrajectoryRecord:
    """One photon-counting record: (time, channel index) clicks, the
    accumulated no-click weight, and the final conditional state."""

    events: tuple[tuple[float, int], ...]
    weight: float
    final_state: StateVector | DensityOperator
    seed: int | None = None

    def __post_init__(self):
        times = [t for t, _ in self.events]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("click times must increase strictly")
        if not 0.0 < self.weight <= 1.0 + 1e-9:
            raise ValueError(f"no-click weight {self.weight} outside (0, 1]")


class _StageOps:
    """Precompiled propagator and click data for one timed stage."""

    def __init__(self, stage: Stage, chans: Sequence[LindbladChannel],
                 cfg: IntegratorConfig, pure: bool):
        dt_target = stage.dt if stage.dt is not None else cfg.dt
        self.n_steps = max(1, math.ceil(stage.duration / dt_target))
        self.dt = stage.duration / self.n_steps
        h = stage.hamiltonian
        self.jump_channels = [(i, ch) for i, ch in enumerate(chans)
                              if ch.eta_effective > 0.0]
        # detected-click rate operators, eta * c^dag c (time independent)
        self.click_rates = [ch.eta_effective * ch.rate_operator()
                            for _, ch in self.jump_channels]
        if pure:
            # no-click pure states follow the effective Schroedinger
            # equation, which has an exact stage propagator
            check_step(self.dt, "expm", h, chans)
            self.propagator = expm(-1j * effective_hamiltonian(h, chans)
                                   * self.dt / HBAR)
            self.rhs = None
        elif cfg.method == "expm":
            check_step(self.dt, "expm", h, chans)
            self.propagator = expm(liouvillian(h, chans, "undetected") * self.dt)
            self.rhs = None
        else:
            check_step(self.dt, "rk4", h, chans)
            self.propagator = None
            self.rhs = _rhs(h, chans, _feed_coefficients(chans, "undetected"),
                            HBAR)

    def advance(self, states: np.ndarray, t: float) -> np.ndarray:
        if self.propagator is not None:
            return states @ self.propagator.T
        rho = states.reshape(-1, DIM_PAIR, DIM_PAIR)
        out = _rk4_step(self.rhs, t, rho, self.dt)
        return out.reshape(states.shape)


def _norms(states: np.ndarray, pure: bool) -> np.ndarray:
    if pure:
        return np.einsum("ni,ni->n", states.conj(), states).real
    rho = states.reshape(-1, DIM_PAIR, DIM_PAIR)
    return np.einsum("nii->n", rho).real


def _renormalized(states: np.ndarray, pure: bool) -> np.ndarray:
    scale = _norms(states, pure)
    if pure:
        scale = np.sqrt(scale)
    return states / scale[:, None]


def _apply_unitary(states: np.ndarray, u: np.ndarray, pure: bool) -> np.ndarray:
    if pure:
        return states @ u.T
    rho = states.reshape(-1, DIM_PAIR, DIM_PAIR)
    out = np.einsum("ij,njk,lk->nil", u, rho, u.conj())
    return out.reshape(states.shape)


def _apply_click(state_row: np.ndarray, op_t: np.ndarray, pure: bool) -> np.ndarray:
    if pure:
        psi = op_t @ state_row
        return psi / np.linalg.norm(psi)
    rho = op_t @ state_row.reshape(DIM_PAIR, DIM_PAIR) @ op_t.conj().T
    return (rho / np.trace(rho).real).reshape(-1)


def _advance_trajectories(states: np.ndarray, pure: bool,
                          rngs: Sequence[np.random.Generator],
                          active: np.ndarray, events: list[list],
                          weights: np.ndarray, schedule: PulseSchedule,
                          chans: Sequence[LindbladChannel],
                          cfg: IntegratorConfig, t_start: float = 0.0,
                          stop_on_detection: bool = False) -> tuple[np.ndarray, float]:
    """March a batch of conditional states through a schedule, consuming
    one uniform per trajectory per step.  Mutates active/events/weights
    in place; click times are absolute (t_start plus stage offsets)."""
    n = states.shape[0]
    t = t_start
    for stage in schedule.stages:
        if stage.unitary is not None:
            if active.any():
                states[active] = _apply_unitary(states[active], stage.unitary, pure)
            continue
        ops = _StageOps(stage, chans, cfg, pure)
        done = 0
        while done < ops.n_steps:
            chunk = min(_RNG_CHUNK, ops.n_steps - done)
            uniforms = np.empty((n, chunk))
            for i, rng in enumerate(rngs):
                uniforms[i] = rng.random(chunk)
            for k in range(chunk):
                if not active.any():
                    break
                tk = t + (done + k) * ops.dt
                idx = np.flatnonzero(active)
                cur = states[idx]
                norm_before = _norms(cur, pure)
                nxt = ops.advance(cur, tk)
                survival = np.minimum(_norms(nxt, pure) / norm_before, 1.0)
                u = uniforms[idx, k]
                clicked = u >= survival
                # survivors: renormalize and bank the no-click weight
                keep = idx[~clicked]
                if keep.size:
                    states[keep] = _renormalized(nxt[~clicked], pure)
                    weights[keep] *= survival[~clicked]
                # clicked rows: pick a channel by detected flux, apply it
                for row_pos in np.flatnonzero(clicked):
                    row = idx[row_pos]
                    pre = cur[row_pos]
                    flux = np.array([_click_flux(pre, m, pure)
                                     for m in ops.click_rates])
                    total = flux.sum()
                    if total <= 0.0:
                        # no detectable weight left; count as survival
                        states[row] = _renormalized(nxt[row_pos:row_pos + 1], pure)[0]
                        weights[row] *= survival[row_pos]
                        continue
                    r = rngs[row].random() * total
                    pick = int(np.searchsorted(np.cumsum(flux), r, side="right"))
                    pick = min(pick, len(flux) - 1)
                    ch_index, ch = ops.jump_channels[pick]
                    states[row] = _apply_click(pre, ch.at(tk), pure)
                    events[row].append((tk, ch_index))
                    if stop_on_detection:
                        active[row] = False
            done += chunk
        t += stage.duration
    return states, t


def _click_flux(state_row: np.ndarray, rate_op: np.ndarray, pure: bool) -> float:
    if pure:
        return float(np.real(state_row.conj() @ rate_op @ state_row))
    rho = state_row.reshape(DIM_PAIR, DIM_PAIR)
    return float(np.real(np.trace(rate_op @ rho)))


def _initial_batch(psi0, n: int, pure: bool) -> np.ndarray:
    if pure:
        ket = psi0.data if isinstance(psi0, StateVector) else np.asarray(psi0, complex)
        if ket.ndim != 1:
            raise ValueError("pure-path initial state must be a ket")
        ket = ket / np.linalg.norm(ket)
        return np.tile(ket, (n, 1))
    rho = _as_density_matrix(psi0)
    rho = rho / np.trace(rho).real
    return np.tile(rho.reshape(-1), (n, 1))


@dataclass(eq=False)
class EnsembleStats:
    """Final conditional states and click records of a trajectory batch."""

    seed: int
    final_states: np.ndarray          # (N, 9, 9), unit trace
    weights: np.ndarray               # accumulated no-click weights
    events: tuple[tuple[tuple[float, int], ...], ...]
    duration: float

    @property
    def n_trajectories(self) -> int:
        return self.final_states.shape[0]

    @property
    def detected(self) -> np.ndarray:
        return np.array([len(ev) > 0 for ev in self.events])

    @property
    def n_detected(self) -> int:
        return int(self.detected.sum())

    def _select(self, which: str) -> np.ndarray:
        if which == "all":
            return np.ones(self.n_trajectories, dtype=bool)
        if which == "detected":
            return self.detected
        if which == "undetected":
            return ~self.detected
        raise ValueError("which must be 'all', 'detected' or 'undetected'")

    def mean_state(self, which: str = "all") -> DensityOperator | None:
        mask = self._select(which)
        if not mask.any():
            return None
        return DensityOperator(self.final_states[mask].mean(axis=0))

    def fidelities(self, target, which: str = "all") -> np.ndarray:
        mask = self._select(which)
        ket = target.data if isinstance(target, StateVector) else np.asarray(target, complex)
        return np.real(np.einsum("i,nij,j->n", ket.conj(),
                                 self.final_states[mask], ket))


def sample_trajectory(psi0, schedule: PulseSchedule,
                      chans: Sequence[LindbladChannel],
                      config: IntegratorConfig | None = None,
                      seed: int | np.random.SeedSequence = 0) -> TrajectoryRecord:
    """Draw a single photon-counting record (batch-of-one ensemble).

    ``seed`` may be a SeedSequence, so a spawned child of an ensemble's
    master seed replays exactly one of its trajectories.
    """
    cfg = config or DEFAULT_CONFIG
    pure = pure_path_allowed(chans) and not isinstance(psi0, DensityOperator) \
        and np.asarray(psi0.data if isinstance(psi0, StateVector) else psi0).ndim == 1
    states = _initial_batch(psi0, 1, pure)
    if isinstance(seed, np.random.SeedSequence):
        entropy, seed_label = seed, None
    else:
        entropy, seed_label = np.random.SeedSequence(seed), seed
    rngs = [np.random.default_rng(entropy)]
    active = np.array([True])
    events: list[list] = [[]]
    weights = np.ones(1)
    states, _ = _advance_trajectories(states, pure, rngs, active, events,
                                      weights, schedule, chans, cfg)
    if pure:
        final = StateVector(states[0])
    else:
        final = DensityOperator(states[0].reshape(DIM_PAIR, DIM_PAIR))
    return TrajectoryRecord(events=tuple(tuple(e) for e in events[0]),
                            weight=float(weights[0]), final_state=final,
                            seed=seed_label)


def run_ensemble(psi0, schedule: PulseSchedule,
                 chans: Sequence[LindbladChannel],
                 config: IntegratorConfig | None = None,
                 n_trajectories: int = 1000, seed: int = 0,
                 stop_on_detection: bool = False) -> EnsembleStats:
    """Propagate n independent photon-counting trajectories.

    Each trajectory owns a spawned child of SeedSequence(seed), so the
    i-th record does not depend on n_trajectories, and rerunning with the
    same seed reproduces every state bit for bit.
    """
    if n_trajectories < 1:
        raise ValueError("n_trajectories must be >= 1")
    cfg = config or DEFAULT_CONFIG
    pure = pure_path_allowed(chans) and not isinstance(psi0, DensityOperator) \
        and np.asarray(psi0.data if isinstance(psi0, StateVector) else psi0).ndim == 1
    states = _initial_batch(psi0, n_trajectories, pure)
    seeds = np.random.SeedSequence(seed).spawn(n_trajectories)
    rngs = [np.random.default_rng(s) for s in seeds]
    active = np.ones(n_trajectories, dtype=bool)
    events: list[list] = [[] for _ in range(n_trajectories)]
    weights = np.ones(n_trajectories)
    states, t_end = _advance_trajectories(states, pure, rngs, active, events,
                                          weights, schedule, chans, cfg,
                                          stop_on_detection=stop_on_detection)
    if pure:
        rhos = np.einsum("ni,nj->nij", states, states.conj())
    else:
        rhos = states.reshape(-1, DIM_PAIR, DIM_PAIR)
    return EnsembleStats(seed=seed, final_states=rhos, weights=weights,
                         events=tuple(tuple(tuple(e) for e in ev) for ev in events),
                         duration=t_end)
