"""Time-domain simulation of uncoupled qubits under a shared drive line.

Each qubit evolves independently in the rotating frame of the drive carrier.
Two-level form: H = -(Delta/2) sigma_z + (1/2)(s_x sigma_x - s_y sigma_y).
Three-level form adds the anharmonic ladder: H = Delta n + (alpha/2) n(n-1)
plus the drive through ladder operators with a sqrt(2) matrix element on the
e-f transition; the drive is phased so both truncations agree on the
computational subspace. The propagator is the exact matrix exponential of
each piecewise-constant sample.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import IndexOutOfRange, MissingCoherence, NonUnitaryDrift
from .profiles import FrequencyProfile, build_profile
from .system import QubitSpec, SharedLineSystem
from .waveforms import DEFAULT_DT, Waveform, drag_augment, normalize_area, synthesize

TWO_PI = 2.0 * np.pi

_UNITARITY_TOL = 1e-8

WaveformFamily = Literal["gaussian", "sep_asym", "sep_sym"]


# ---------------------------------------------------------------------------
# Hamiltonians and propagators
# ---------------------------------------------------------------------------

def _qubit_hamiltonians(qubit: QubitSpec, drive: np.ndarray, drive_freq: float) -> np.ndarray:
    """Stack of instantaneous Hamiltonians, one per drive sample."""
    n = drive.size
    delta = qubit.frequency - drive_freq
    if qubit.levels == 2:
        H = np.zeros((n, 2, 2), dtype=complex)
        H[:, 0, 0] = -0.5 * delta
        H[:, 1, 1] = 0.5 * delta
        H[:, 0, 1] = 0.5 * drive
        H[:, 1, 0] = 0.5 * np.conj(drive)
        return H
    H = np.zeros((n, 3, 3), dtype=complex)
    H[:, 1, 1] = delta
    H[:, 2, 2] = 2.0 * delta + qubit.anharmonicity
    # Matches the two-level convention on the g-e block: <g|H|e> = s/2.
    H[:, 0, 1] = 0.5 * drive
    H[:, 1, 0] = 0.5 * np.conj(drive)
    H[:, 1, 2] = 0.5 * np.sqrt(2.0) * drive
    H[:, 2, 1] = 0.5 * np.sqrt(2.0) * np.conj(drive)
    return H


def hamiltonian_at(
    system: SharedLineSystem,
    qubit_index: int,
    w: Waveform,
    drive_freq: float | None = None,
    k: int = 0,
) -> np.ndarray:
    """Instantaneous Hamiltonian of one qubit at sample index ``k``."""
    if not (0 <= qubit_index < len(system.qubits)):
        raise IndexOutOfRange(f"qubit index {qubit_index} out of range")
    if not (0 <= k < w.samples.size):
        raise IndexOutOfRange(f"sample index {k} out of range")
    if drive_freq is None:
        drive_freq = w.carrier_freq
    qubit = system.qubits[qubit_index]
    drive = np.asarray([system.coupling_scales[qubit_index] * w.samples[k]])
    return _qubit_hamiltonians(qubit, drive, drive_freq)[0]


def _step_propagators(H: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i H dt) for each Hamiltonian in the stack (exact per sample)."""
    if H.shape[-1] == 2:
        # Pauli decomposition: traceless 2x2, closed-form exponential.
        hx = H[:, 0, 1].real
        hy = -H[:, 0, 1].imag
        hz = H[:, 0, 0].real
        norm = np.sqrt(hx * hx + hy * hy + hz * hz)
        theta = norm * dt
        sinc = np.where(norm > 0, np.sin(theta) / np.where(norm > 0, norm, 1.0), dt)
        c = np.cos(theta)
        U = np.empty_like(H)
        U[:, 0, 0] = c - 1j * sinc * hz
        U[:, 1, 1] = c + 1j * sinc * hz
        U[:, 0, 1] = -1j * sinc * (hx - 1j * hy)
        U[:, 1, 0] = -1j * sinc * (hx + 1j * hy)
        return U
    evals, vecs = np.linalg.eigh(H)
    phases = np.exp(-1j * evals * dt)
    return np.einsum("kij,kj,klj->kil", vecs, phases, vecs.conj())


def _chain_product(mats: np.ndarray) -> np.ndarray:
    """Time-ordered product M[n-1] @ ... @ M[0] by pairwise folding."""
    out = mats
    while out.shape[0] > 1:
        tail = None
        if out.shape[0] % 2:
            tail = out[-1:]
            out = out[:-1]
        out = np.matmul(out[1::2], out[0::2])
        if tail is not None:
            out = np.concatenate([out, tail], axis=0)
    return out[0]


def propagator(
    qubit: QubitSpec,
    w: Waveform,
    drive_freq: float | None = None,
    coupling_scale: float = 1.0,
) -> np.ndarray:
    """Full-pulse unitary for one qubit under the waveform."""
    if drive_freq is None:
        drive_freq = w.carrier_freq
    H = _qubit_hamiltonians(qubit, coupling_scale * w.samples, drive_freq)
    return _chain_product(_step_propagators(H, w.dt))


def _check_unitarity(U: np.ndarray, label: str) -> None:
    drift = np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0]))
    if drift > _UNITARITY_TOL:
        raise NonUnitaryDrift(f"qubit {label!r}: ||U+U - I|| = {drift:.2e}")


# ---------------------------------------------------------------------------
# Evolution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PropagationResult:
    """Per-qubit populations and final states after one pulse."""

    labels: tuple[str, ...]
    populations: tuple[np.ndarray, ...]
    final_states: tuple[np.ndarray, ...]
    global_phases: tuple[float, ...]

    def _pop(self, level: int) -> np.ndarray:
        return np.array([p[level] if level < p.size else 0.0 for p in self.populations])

    @property
    def P_g(self) -> np.ndarray:
        return self._pop(0)

    @property
    def P_e(self) -> np.ndarray:
        return self._pop(1)

    @property
    def P_f(self) -> np.ndarray:
        return self._pop(2)

    def for_label(self, label: str) -> np.ndarray:
        return self.populations[self.labels.index(label)]


def _ground_state(levels: int) -> np.ndarray:
    psi = np.zeros(levels, dtype=complex)
    psi[0] = 1.0
    return psi


def evolve_unitary(
    system: SharedLineSystem,
    w: Waveform,
    drive_freq: float | None = None,
    initial_states: Sequence[np.ndarray] | None = None,
) -> PropagationResult:
    """Propagate every qubit through the pulse with unitary dynamics."""
    if drive_freq is None:
        drive_freq = w.carrier_freq
    pops, finals, phases = [], [], []
    for i, qubit in enumerate(system.qubits):
        U = propagator(qubit, w, drive_freq, system.coupling_scales[i])
        _check_unitarity(U, qubit.label)
        psi0 = _ground_state(qubit.levels) if initial_states is None else np.asarray(
            initial_states[i], dtype=complex
        )
        psi = U @ psi0
        pops.append(np.abs(psi) ** 2)
        finals.append(psi)
        phases.append(float(np.angle(np.linalg.det(U)) / qubit.levels))
    return PropagationResult(system.labels, tuple(pops), tuple(finals), tuple(phases))


def _damping_kraus(levels: int, gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """Amplitude damping on the level ladder; decay rate scales with n."""
    decay = np.sqrt(gamma * np.arange(1, levels))
    K1 = np.diag(decay, k=1).astype(complex)
    K0 = np.diag(np.sqrt(1.0 - gamma * np.arange(levels))).astype(complex)
    return K0, K1


def _dephasing_mask(levels: int, dt: float, rate: float) -> np.ndarray:
    """Coherence decay factors exp(-dt (i-j)^2 / T_phi); a PSD Hadamard channel."""
    n = np.arange(levels)
    return np.exp(-dt * rate * (n[:, None] - n[None, :]) ** 2)


def _open_step_ops(qubit: QubitSpec, dt: float):
    if qubit.T1 is None:
        raise MissingCoherence(f"qubit {qubit.label!r} has no T1; open evolution needs one")
    gamma = 1.0 - np.exp(-dt / qubit.T1)
    K0, K1 = _damping_kraus(qubit.levels, gamma)
    mask = _dephasing_mask(qubit.levels, dt, qubit.pure_dephasing_rate())
    return K0, K1, mask


def evolve_open(
    system: SharedLineSystem,
    w: Waveform,
    drive_freq: float | None = None,
    initial_states: Sequence[np.ndarray] | None = None,
) -> PropagationResult:
    """Density-matrix evolution: unitary step, then damping and dephasing channels."""
    if drive_freq is None:
        drive_freq = w.carrier_freq
    pops, finals, phases = [], [], []
    for i, qubit in enumerate(system.qubits):
        K0, K1, mask = _open_step_ops(qubit, w.dt)
        H = _qubit_hamiltonians(qubit, system.coupling_scales[i] * w.samples, drive_freq)
        steps = _step_propagators(H, w.dt)
        if initial_states is None:
            psi0 = _ground_state(qubit.levels)
            rho = np.outer(psi0, psi0.conj())
        else:
            state = np.asarray(initial_states[i], dtype=complex)
            rho = np.outer(state, state.conj()) if state.ndim == 1 else state.copy()
        for U in steps:
            rho = U @ rho @ U.conj().T
            rho = K0 @ rho @ K0.conj().T + K1 @ rho @ K1.conj().T
            rho = rho * mask
        pops.append(np.real(np.diag(rho)).copy())
        finals.append(rho)
        phases.append(0.0)
    return PropagationResult(system.labels, tuple(pops), tuple(finals), tuple(phases))


def gate_channel(qubit: QubitSpec, w: Waveform, drive_freq: float | None = None,
                 coupling_scale: float = 1.0) -> np.ndarray:
    """Superoperator (row-major vec convention) for one pulse with T1/T2 noise."""
    if drive_freq is None:
        drive_freq = w.carrier_freq
    K0, K1, mask = _open_step_ops(qubit, w.dt)
    H = _qubit_hamiltonians(qubit, coupling_scale * w.samples, drive_freq)
    steps = _step_propagators(H, w.dt)
    kraus = np.kron(K0, K0.conj()) + np.kron(K1, K1.conj())
    deph = np.diag(mask.reshape(-1))
    per_step = deph @ kraus
    supers = np.einsum("ab,kbc->kac", per_step,
                       np.einsum("kij,kmn->kimjn", steps, steps.conj()).reshape(
                           steps.shape[0], qubit.levels ** 2, qubit.levels ** 2))
    return _chain_product(supers)


# ---------------------------------------------------------------------------
# Parameter sweeps
# ---------------------------------------------------------------------------

def _family_profile(
    family: WaveformFamily,
    target: QubitSpec,
    delta1: float,
    sigma: float,
) -> FrequencyProfile:
    if family == "gaussian":
        return build_profile(target, [], sigma=sigma, symmetry="symmetric")
    nontarget = QubitSpec(frequency=target.frequency + delta1, label="NT",
                          anharmonicity=target.anharmonicity, levels=2)
    symmetry = "asymmetric" if family == "sep_asym" else "symmetric"
    return build_profile(target, [nontarget], sigma=sigma, symmetry=symmetry)


@dataclass(frozen=True)
class ExcitationMap:
    """P_e grids over (pulse duration, non-target detuning) for one family."""

    family: str
    T_values: np.ndarray
    delta1_values: np.ndarray
    target_Pe: np.ndarray
    nontarget_Pe: np.ndarray
    dt: float


def excitation_map(
    template: QubitSpec,
    family: WaveformFamily,
    T_values: Sequence[float],
    delta1_values: Sequence[float],
    dt: float = DEFAULT_DT,
    angle: float = np.pi / 2,
) -> ExcitationMap:
    """Excitation probability of target and non-target over a (T, Delta1) grid.

    The spectral width follows the duration, sigma = 2*pi/T, and each pulse is
    area-normalized to ``angle``. SEP cells with Delta1 exactly 0 are reported
    as NaN (the null would sit on the carrier).
    """
    T_values = np.asarray(list(T_values), dtype=float)
    delta1_values = np.asarray(list(delta1_values), dtype=float)
    if T_values.size == 0 or delta1_values.size == 0:
        raise ValueError("sweep ranges must be nonempty")
    tgt = np.full((T_values.size, delta1_values.size), np.nan)
    ntg = np.full_like(tgt, np.nan)
    for i, T in enumerate(T_values):
        sigma = TWO_PI / T
        for j, d1 in enumerate(delta1_values):
            if family != "gaussian" and d1 == 0.0:
                continue
            profile = _family_profile(family, template, d1, sigma)
            w = normalize_area(synthesize(profile, T, dt), angle)
            target = QubitSpec(frequency=template.frequency, levels=2, label="T")
            nontarget = QubitSpec(frequency=template.frequency + d1, levels=2, label="NT")
            system = SharedLineSystem((target, nontarget), target_index=0)
            result = evolve_unitary(system, w)
            tgt[i, j] = result.P_e[0]
            ntg[i, j] = result.P_e[1]
    return ExcitationMap(family, T_values, delta1_values, tgt, ntg, dt)


@dataclass(frozen=True)
class LeakageScan:
    """Non-target excitation and leakage versus spectral width."""

    sigmas: np.ndarray
    P_e: np.ndarray
    P_f: np.ndarray
    start_discontinuity: np.ndarray
    T: float
    delta1: float


def leakage_scan(
    qubit: QubitSpec,
    sigmas: Sequence[float],
    T: float = 40e-9,
    delta1: float = TWO_PI * 30e6,
    dt: float = DEFAULT_DT,
    angle: float = np.pi / 2,
) -> LeakageScan:
    """Three-level non-target response to symmetric null pulses, per sigma.

    The non-target sits ``delta1`` above the carrier; each pulse keeps its
    null there and is area-normalized to ``angle``.
    """
    if qubit.levels != 3:
        raise ValueError("leakage scan needs a three-level qubit")
    sigmas = np.asarray(list(sigmas), dtype=float)
    target = QubitSpec(frequency=qubit.frequency - delta1, levels=2, label="T")
    pe, pf, disc = [], [], []
    for sigma in sigmas:
        profile = build_profile(target, [qubit], sigma=sigma, symmetry="symmetric")
        w = normalize_area(synthesize(profile, T, dt), angle)
        system = SharedLineSystem((qubit,), target_index=0)
        result = evolve_unitary(system, w)
        pe.append(result.P_e[0])
        pf.append(result.P_f[0])
        disc.append(w.s_x[0])
    return LeakageScan(sigmas, np.array(pe), np.array(pf), np.array(disc), T, delta1)


@dataclass(frozen=True)
class DragScan:
    """Leakage versus DRAG coefficient for a null pulse on a shared line."""

    lambdas: np.ndarray
    target_Pf: np.ndarray
    target_Pe: np.ndarray
    nontarget_Pe: np.ndarray
    nontarget_Pf: np.ndarray

    @property
    def best_lambda(self) -> float:
        return float(self.lambdas[int(np.argmin(self.target_Pf))])

    @property
    def min_target_Pf(self) -> float:
        return float(np.min(self.target_Pf))


def drag_scan(
    target: QubitSpec,
    nontarget_detuning: float = TWO_PI * 46e6,
    lambdas: Sequence[float] | None = None,
    T: float = 16e-9,
    sigma: float | None = None,
    dt: float = DEFAULT_DT,
    angle: float = np.pi / 2,
) -> DragScan:
    """Scan the derivative coefficient and record three-level leakage.

    The base pulse is a symmetric null pulse protecting a neighbour at
    ``nontarget_detuning``; the derivative term is scaled by the target
    anharmonicity. Both qubits are simulated with three levels.
    """
    if target.levels != 3:
        raise ValueError("DRAG scan needs a three-level target")
    if lambdas is None:
        lambdas = np.linspace(-2.0, 2.0, 81)
    lambdas = np.asarray(list(lambdas), dtype=float)
    if sigma is None:
        sigma = TWO_PI / T
    nontarget = QubitSpec(
        frequency=target.frequency + nontarget_detuning,
        anharmonicity=target.anharmonicity,
        levels=3,
        label="NT",
    )
    profile = build_profile(target, [nontarget], sigma=sigma, symmetry="symmetric")
    base = normalize_area(synthesize(profile, T, dt), angle)
    system = SharedLineSystem((target, nontarget), target_index=0)
    t_pf, t_pe, n_pe, n_pf = [], [], [], []
    for lam in lambdas:
        w = drag_augment(base, target.anharmonicity, lam)
        result = evolve_unitary(system, w)
        t_pf.append(result.P_f[0])
        t_pe.append(result.P_e[0])
        n_pe.append(result.P_e[1])
        n_pf.append(result.P_f[1])
    return DragScan(lambdas, np.array(t_pf), np.array(t_pe), np.array(n_pe), np.array(n_pf))
