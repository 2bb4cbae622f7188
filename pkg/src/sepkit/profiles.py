"""Analytic frequency-domain pulse profiles with engineered spectral nulls.

A profile is a real spectral envelope: a polynomial prefactor whose roots sit
at non-target qubit frequencies, multiplied by a Gaussian centred on the
(optionally shifted) drive frequency. Asymmetric profiles place one root per
null; symmetric profiles add the mirror root reflected about the carrier,
which keeps the spectrum even and minimizes drive-induced phase shifts.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal, Sequence

import numpy as np

from .errors import DegenerateNull, EmptyGrid, InvalidWidth
from .system import QubitSpec

Symmetry = Literal["asymmetric", "symmetric"]

_PEAK_TOL = 1e-9


@dataclass(frozen=True)
class FrequencyProfile:
    """Spectral envelope S(w) = A * prod_j(...) * exp(-(w - wd - delta)^2 / 2 sigma^2).

    All frequencies are angular (rad/s). ``nulls`` holds the absolute
    frequencies at which S vanishes exactly; for ``symmetric`` profiles the
    mirror points 2*drive_freq - null vanish as well. ``delta`` shifts the
    Gaussian factor only, leaving the null positions untouched.
    """

    drive_freq: float
    sigma: float
    delta: float = 0.0
    amplitude: float = 1.0
    nulls: tuple[float, ...] = ()
    symmetry: Symmetry = "symmetric"
    base_envelope: Literal["gaussian"] = "gaussian"

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise InvalidWidth(f"sigma must be positive, got {self.sigma}")
        if self.symmetry not in ("asymmetric", "symmetric"):
            raise ValueError(f"unknown symmetry {self.symmetry!r}")
        if self.base_envelope != "gaussian":
            raise ValueError(f"unsupported base envelope {self.base_envelope!r}")
        nulls = tuple(float(w) for w in self.nulls)
        object.__setattr__(self, "nulls", nulls)
        for wj in nulls:
            if wj == self.drive_freq:
                raise DegenerateNull(
                    "null frequency coincides with the drive frequency; "
                    "the target would be unaddressable"
                )

    @property
    def null_detunings(self) -> tuple[float, ...]:
        """Null positions relative to the carrier (rad/s)."""
        return tuple(wj - self.drive_freq for wj in self.nulls)

    def __call__(self, omega):
        return evaluate_profile(self, omega)


def build_profile(
    target: QubitSpec,
    nontargets: Sequence[QubitSpec],
    sigma: float,
    delta: float = 0.0,
    symmetry: Symmetry = "symmetric",
) -> FrequencyProfile:
    """Profile drawn on the target with nulls at every non-target frequency.

    The amplitude starts at 1; calibration scales it later. An empty
    ``nontargets`` list gives a plain Gaussian profile (empty product).
    """
    if sigma <= 0:
        raise InvalidWidth(f"sigma must be positive, got {sigma}")
    for q in nontargets:
        if q.frequency == target.frequency:
            raise DegenerateNull(
                f"non-target {q.label!r} is degenerate with target {target.label!r}"
            )
    return FrequencyProfile(
        drive_freq=target.frequency,
        sigma=sigma,
        delta=delta,
        amplitude=1.0,
        nulls=tuple(q.frequency for q in nontargets),
        symmetry=symmetry,
    )


def evaluate_profile(profile: FrequencyProfile, omega):
    """Evaluate S(omega). Zero is exact at every null (and mirror) frequency."""
    w = np.asarray(omega, dtype=float)
    pref = np.ones_like(w)
    for wj in profile.nulls:
        pref = pref * (w - wj)
        if profile.symmetry == "symmetric":
            pref = pref * (w - (2.0 * profile.drive_freq - wj))
    arg = (w - profile.drive_freq - profile.delta) / profile.sigma
    out = profile.amplitude * pref * np.exp(-0.5 * arg * arg)
    return out if out.shape else float(out)


def default_grid(
    profile: FrequencyProfile,
    span_sigmas: float = 8.0,
    null_margin_sigmas: float = 3.0,
    min_points: int = 4096,
) -> np.ndarray:
    """Frequency grid covering carrier +- span_sigmas, widened past every null.

    Point density is kept at or above ``min_points`` per 2*span_sigmas so a
    wider span never dilutes resolution.
    """
    half = span_sigmas * profile.sigma + abs(profile.delta)
    for x in profile.null_detunings:
        half = max(half, abs(x) + null_margin_sigmas * profile.sigma)
    base = span_sigmas * profile.sigma
    n = max(min_points, int(np.ceil(min_points * half / base)))
    return profile.drive_freq + np.linspace(-half, half, n)


def peak_normalize(profile: FrequencyProfile, grid: np.ndarray | None = None) -> FrequencyProfile:
    """Rescale the amplitude so max |S| over the grid equals 1.

    With ``grid=None`` a default grid spanning the carrier +-8 sigma (and all
    nulls) is used. Idempotent at its fixed point.
    """
    if grid is None:
        grid = default_grid(profile)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise EmptyGrid("peak normalization needs a nonempty frequency grid")
    peak = float(np.max(np.abs(evaluate_profile(profile, grid))))
    if peak == 0.0:
        raise EmptyGrid("profile vanishes on the supplied grid")
    if abs(peak - 1.0) <= _PEAK_TOL:
        return profile
    return replace(profile, amplitude=profile.amplitude / peak)
