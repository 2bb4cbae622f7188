"""Single-qubit randomized benchmarking on the simulated shared line.

Cliffords are compiled from quarter-turn X pulses plus zero-duration virtual-Z
frame updates; a frame rotation simply advances the phase of every subsequent
physical pulse. Non-target qubits receive each physical pulse through the
shared line exactly as emitted. Survival curves are fitted to A p^L + B.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import curve_fit

from .errors import FitFailure
from .calibration import CalibratedGate
from .dynamics import gate_channel, propagator
from .system import SharedLineSystem

_PHASE_GRID = (0.0, 0.5 * np.pi, np.pi, 1.5 * np.pi)
_MATCH_TOL = 1e-10

X90 = np.array([[1.0, -1.0j], [-1.0j, 1.0]], dtype=complex) / np.sqrt(2.0)


def z_rotation(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0.0], [0.0, np.exp(0.5j * theta)]])


Token = tuple[str, float]  # ("vz", angle) or ("x90", 0.0), listed in time order


@dataclass(frozen=True)
class CliffordElement:
    """One of the 24 single-qubit Cliffords with its pulse decomposition."""

    index: int
    unitary: np.ndarray
    tokens: tuple[Token, ...]

    @property
    def n_x90(self) -> int:
        return sum(1 for kind, _ in self.tokens if kind == "x90")


def _tokens_unitary(tokens: Sequence[Token]) -> np.ndarray:
    U = np.eye(2, dtype=complex)
    for kind, angle in tokens:  # time order: left-most acts first
        U = (z_rotation(angle) if kind == "vz" else X90) @ U
    return U


def _projective_key(U: np.ndarray) -> tuple:
    flat = U.reshape(-1)
    pivot = flat[np.argmax(np.abs(flat))]
    normalized = flat * (abs(pivot) / pivot)
    return tuple(np.round(normalized, 8).tolist())


def _equal_up_to_phase(U: np.ndarray, V: np.ndarray, tol: float = _MATCH_TOL) -> bool:
    overlap = abs(np.trace(U.conj().T @ V)) / U.shape[0]
    return abs(overlap - 1.0) < tol


@lru_cache(maxsize=1)
def clifford_table() -> tuple[CliffordElement, ...]:
    """The 24 single-qubit Cliffords, each with at most two X90 pulses.

    Candidates are enumerated as vz/x90 token strings with virtual-Z angles
    on the quarter-turn grid, shortest decomposition first; closure of the
    resulting set is verified.
    """
    found: dict[tuple, tuple[np.ndarray, tuple[Token, ...]]] = {}
    for n_pulses in range(3):
        angle_slots = n_pulses + 1
        for angles in product(_PHASE_GRID, repeat=angle_slots):
            tokens: list[Token] = [("vz", angles[0])]
            for a in angles[1:]:
                tokens.append(("x90", 0.0))
                tokens.append(("vz", a))
            U = _tokens_unitary(tokens)
            key = _projective_key(U)
            if key not in found:
                found[key] = (U, tuple(tokens))
        if n_pulses == 2 and len(found) != 24:
            raise AssertionError(f"expected 24 Cliffords, enumerated {len(found)}")
    elements = tuple(
        CliffordElement(i, U, tokens)
        for i, (U, tokens) in enumerate(found.values())
    )
    _compose_table()  # closure check happens while building the table
    return elements


@lru_cache(maxsize=1)
def _compose_table() -> np.ndarray:
    """24x24 composition table: entry [i, j] is the index of U_i @ U_j."""
    elements = _raw_elements()
    keys = {_projective_key(e.unitary): e.index for e in elements}
    table = np.empty((24, 24), dtype=int)
    for i, ei in enumerate(elements):
        for j, ej in enumerate(elements):
            key = _projective_key(ei.unitary @ ej.unitary)
            if key not in keys:
                raise AssertionError("Clifford set is not closed under composition")
            table[i, j] = keys[key]
    return table


@lru_cache(maxsize=1)
def _raw_elements() -> tuple[CliffordElement, ...]:
    # clifford_table() without the closure check, to avoid recursion.
    found: dict[tuple, tuple[np.ndarray, tuple[Token, ...]]] = {}
    for n_pulses in range(3):
        for angles in product(_PHASE_GRID, repeat=n_pulses + 1):
            tokens: list[Token] = [("vz", angles[0])]
            for a in angles[1:]:
                tokens.append(("x90", 0.0))
                tokens.append(("vz", a))
            U = _tokens_unitary(tokens)
            key = _projective_key(U)
            if key not in found:
                found[key] = (U, tuple(tokens))
    if len(found) != 24:
        raise AssertionError(f"expected 24 Cliffords, enumerated {len(found)}")
    return tuple(
        CliffordElement(i, U, tokens) for i, (U, tokens) in enumerate(found.values())
    )


def compose_indices(i: int, j: int) -> int:
    return int(_compose_table()[i, j])


@lru_cache(maxsize=1)
def _inverse_table() -> np.ndarray:
    table = _compose_table()
    identity = _identity_index()
    inv = np.empty(24, dtype=int)
    for i in range(24):
        (matches,) = np.where(table[i] == identity)
        inv[i] = matches[0]
    return inv


@lru_cache(maxsize=1)
def _identity_index() -> int:
    for e in _raw_elements():
        if _equal_up_to_phase(e.unitary, np.eye(2)):
            return e.index
    raise AssertionError("identity missing from Clifford set")


def inverse_index(i: int) -> int:
    return int(_inverse_table()[i])


@dataclass(frozen=True)
class RandomSequence:
    """Uniformly drawn Clifford indices plus the recovery element."""

    indices: tuple[int, ...]
    inverse: int

    def with_recovery(self) -> tuple[int, ...]:
        return self.indices + (self.inverse,)


def random_sequence(L: int, rng: np.random.Generator | int) -> RandomSequence:
    """Draw L Cliffords i.i.d. and compute the single recovery Clifford."""
    if L < 1:
        raise ValueError("sequence length must be >= 1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    draws = rng.integers(0, 24, size=L)
    net = int(draws[0])
    for idx in draws[1:]:
        net = compose_indices(int(idx), net)  # later Cliffords multiply on the left
    return RandomSequence(tuple(int(d) for d in draws), inverse_index(net))


def compile_phases(sequence: Sequence[int]) -> np.ndarray:
    """Drive phases of the physical X90 pulses implementing the sequence.

    Virtual-Z tokens only advance the frame; each X90 is emitted with the
    frame phase current at that instant. The leftover frame rotation after
    the last pulse is diagonal and does not affect populations.
    """
    elements = clifford_table()
    phases: list[float] = []
    frame = 0.0
    for idx in sequence:
        for kind, angle in elements[idx].tokens:
            if kind == "vz":
                frame += angle
            else:
                phases.append(frame)
    return np.asarray(phases)


# ---------------------------------------------------------------------------
# Decay model fitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayFit:
    """Parameters of the survival model A p^L + B with derived gate metrics."""

    A: float
    p: float
    B: float
    stderr: tuple[float, float, float]
    fidelity: float
    gamma_ex: float
    degenerate: bool = False

    @classmethod
    def from_params(cls, A: float, p: float, B: float,
                    stderr: tuple[float, float, float] = (np.nan,) * 3,
                    degenerate: bool = False) -> "DecayFit":
        return cls(
            A=float(A),
            p=float(p),
            B=float(B),
            stderr=tuple(float(s) for s in stderr),
            fidelity=1.0 - (1.0 - float(p)) / 2.0,
            gamma_ex=float(B) * (1.0 - float(p)) / 2.0,
            degenerate=degenerate,
        )


def _decay_model(L, A, p, B):
    return A * np.power(p, L) + B


def fit_decay(lengths: Sequence[int], survivals: Sequence[float]) -> DecayFit:
    """Nonlinear least-squares fit of survivals to A p^L + B.

    Initial guesses: B from the long-length tail, A from the short end, p from
    a log-linear regression of the residual. Constant data is flagged
    degenerate (p unidentifiable) rather than fitted.
    """
    L = np.asarray(list(lengths), dtype=float)
    s = np.asarray(list(survivals), dtype=float)
    if L.size != s.size:
        raise ValueError("lengths and survivals must have equal size")
    if np.unique(L).size < 3 or float(np.ptp(s)) < 1e-12:
        return DecayFit.from_params(0.0, 1.0, float(np.mean(s)), degenerate=True)

    B0 = float(s[np.argmax(L)])
    A0 = float(s[np.argmin(L)]) - B0
    resid = (s - B0) / A0 if A0 != 0 else np.zeros_like(s)
    good = resid > 1e-12
    if np.count_nonzero(good) >= 2:
        slope = np.polyfit(L[good], np.log(resid[good]), 1)[0]
        p0 = float(np.clip(np.exp(slope), 1e-4, 1.0 - 1e-9))
    else:
        p0 = 0.99
    if A0 == 0:
        A0 = 1e-3

    try:
        popt, pcov = curve_fit(
            _decay_model,
            L,
            s,
            p0=[A0, p0, B0],
            bounds=([-2.0, 1e-9, -1.0], [2.0, 1.0, 2.0]),
            maxfev=500,
        )
    except (RuntimeError, ValueError) as exc:
        raise FitFailure(f"decay fit did not converge: {exc}") from exc
    with np.errstate(invalid="ignore"):
        stderr = tuple(np.sqrt(np.diag(pcov)))
    return DecayFit.from_params(popt[0], popt[1], popt[2], stderr)


def excitation_rate(fit: DecayFit) -> float:
    """Steady unwanted-excitation rate B (1 - p) / 2 of a survival fit."""
    return fit.B * (1.0 - fit.p) / 2.0


# ---------------------------------------------------------------------------
# RB simulation
# ---------------------------------------------------------------------------

DEFAULT_LENGTHS = (1, 2, 4, 8, 16, 32, 64, 128, 256, 512)
DEFAULT_SEEDS = 50


@dataclass(frozen=True)
class RBResult:
    """Survival statistics and per-qubit decay fits of one RB run."""

    lengths: tuple[int, ...]
    labels: tuple[str, ...]
    target_label: str
    means: dict[str, np.ndarray]
    stds: dict[str, np.ndarray]
    fits: dict[str, DecayFit | None]
    fit_errors: dict[str, str]
    n_seeds: int
    noise: str


class _UnitaryPulseEngine:
    def __init__(self, system: SharedLineSystem, gate: CalibratedGate):
        self.ops = [
            propagator(q, gate.waveform, coupling_scale=system.coupling_scales[i])
            for i, q in enumerate(system.qubits)
        ]
        self.levels = [q.levels for q in system.qubits]

    def initial(self):
        states = []
        for d in self.levels:
            psi = np.zeros(d, dtype=complex)
            psi[0] = 1.0
            states.append(psi)
        return states

    def apply(self, states, phase: float):
        for i, U in enumerate(self.ops):
            frame = np.exp(1j * phase * np.arange(self.levels[i]))
            states[i] = np.conj(frame) * (U @ (frame * states[i]))
        return states

    def survivals(self, states):
        return [float(np.abs(psi[0]) ** 2) for psi in states]


class _OpenPulseEngine:
    def __init__(self, system: SharedLineSystem, gate: CalibratedGate):
        self.channels = [
            gate_channel(q, gate.waveform, coupling_scale=system.coupling_scales[i])
            for i, q in enumerate(system.qubits)
        ]
        self.levels = [q.levels for q in system.qubits]
        self.masks = [np.subtract.outer(np.arange(d), np.arange(d)) for d in self.levels]

    def initial(self):
        states = []
        for d in self.levels:
            rho = np.zeros((d, d), dtype=complex)
            rho[0, 0] = 1.0
            states.append(rho)
        return states

    def apply(self, states, phase: float):
        for i, S in enumerate(self.channels):
            d = self.levels[i]
            frame = np.exp(1j * phase * self.masks[i])
            rho = states[i] * frame
            rho = (S @ rho.reshape(-1)).reshape(d, d)
            states[i] = rho * np.conj(frame)
        return states

    def survivals(self, states):
        return [float(np.real(rho[0, 0])) for rho in states]


def simulate_rb(
    system: SharedLineSystem,
    gate: CalibratedGate,
    lengths: Sequence[int] = DEFAULT_LENGTHS,
    n_seeds: int = DEFAULT_SEEDS,
    noise: Literal["unitary", "open"] = "unitary",
    shots: int | None = None,
    rng_seed: int = 0,
) -> RBResult:
    """Randomized benchmarking of the target gate, observing every line qubit.

    Each (length, seed) pair draws an independent Clifford sequence from its
    own RNG stream, compiles it to phased X90 pulses, and propagates all
    qubits through every physical pulse. Survival means and standard
    deviations are aggregated over seeds and fitted per qubit; a failed fit is
    recorded without aborting the others.
    """
    lengths = tuple(int(L) for L in lengths)
    if not lengths or any(L < 1 for L in lengths):
        raise ValueError("lengths must be nonempty positive integers")
    if sorted(lengths) != list(lengths):
        raise ValueError("lengths must be strictly increasing")

    engine = (_OpenPulseEngine if noise == "open" else _UnitaryPulseEngine)(system, gate)
    root = np.random.SeedSequence(rng_seed)
    shot_rng = np.random.default_rng(root.spawn(1)[0])

    survivals = {label: np.empty((len(lengths), n_seeds)) for label in system.labels}
    for li, L in enumerate(lengths):
        for si in range(n_seeds):
            rng = np.random.default_rng(np.random.SeedSequence((rng_seed, li, si)))
            seq = random_sequence(L, rng)
            phases = compile_phases(seq.with_recovery())
            states = engine.initial()
            for phase in phases:
                states = engine.apply(states, float(phase))
            values = engine.survivals(states)
            for qi, label in enumerate(system.labels):
                v = values[qi]
                if shots is not None:
                    v = shot_rng.binomial(shots, min(max(v, 0.0), 1.0)) / shots
                survivals[label][li, si] = v

    means = {lab: arr.mean(axis=1) for lab, arr in survivals.items()}
    stds = {lab: arr.std(axis=1) for lab, arr in survivals.items()}
    fits: dict[str, DecayFit | None] = {}
    fit_errors: dict[str, str] = {}
    for label in system.labels:
        try:
            fits[label] = fit_decay(lengths, means[label])
        except FitFailure as exc:
            fits[label] = None
            fit_errors[label] = str(exc)
    return RBResult(
        lengths=lengths,
        labels=system.labels,
        target_label=gate.target_label,
        means=means,
        stds=stds,
        fits=fits,
        fit_errors=fit_errors,
        n_seeds=n_seeds,
        noise=noise,
    )
