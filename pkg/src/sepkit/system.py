"""Qubit and shared-line system descriptions.

All frequencies are angular (rad/s); times are seconds. A shared-line system
is an ordered set of mutually uncoupled qubits driven by one microwave line,
with one qubit designated as the gate target.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NegativeDephasing, ZeroAnharmonicity


@dataclass(frozen=True)
class QubitSpec:
    """A single transmon-like qubit.

    ``levels`` selects the simulation truncation: 2 keeps the computational
    subspace only, 3 adds the leakage level and requires a nonzero
    anharmonicity.
    """

    frequency: float
    anharmonicity: float = 0.0
    levels: int = 2
    T1: float | None = None
    T2_echo: float | None = None
    label: str = "Q"

    def __post_init__(self) -> None:
        if self.frequency <= 0:
            raise ValueError(f"qubit frequency must be positive, got {self.frequency}")
        if self.levels not in (2, 3):
            raise ValueError(f"levels must be 2 or 3, got {self.levels}")
        if self.levels == 3 and self.anharmonicity == 0.0:
            raise ZeroAnharmonicity(
                f"qubit {self.label!r}: three-level simulation needs a nonzero anharmonicity"
            )
        if self.T1 is not None and self.T1 <= 0:
            raise ValueError(f"T1 must be positive, got {self.T1}")
        if self.T2_echo is not None and self.T2_echo <= 0:
            raise ValueError(f"T2_echo must be positive, got {self.T2_echo}")
        if self.T1 is not None and self.T2_echo is not None and self.T2_echo > 2 * self.T1:
            raise NegativeDephasing(
                f"qubit {self.label!r}: T2_echo={self.T2_echo} exceeds 2*T1={2 * self.T1}"
            )

    def pure_dephasing_rate(self) -> float:
        """1/T_phi = 1/T2_echo - 1/(2*T1); zero when T2_echo is unset."""
        if self.T2_echo is None:
            return 0.0
        rate = 1.0 / self.T2_echo
        if self.T1 is not None:
            rate -= 1.0 / (2.0 * self.T1)
        return max(rate, 0.0)


@dataclass(frozen=True)
class SharedLineSystem:
    """Ordered qubits on one drive line, with a target designation.

    Qubits are mutually uncoupled, so the joint dynamics factorizes and each
    qubit may be propagated independently. ``coupling_scales`` multiplies the
    drive seen by each qubit (divider asymmetry; defaults to 1).
    """

    qubits: tuple[QubitSpec, ...]
    target_index: int = 0
    coupling_scales: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        qubits = tuple(self.qubits)
        object.__setattr__(self, "qubits", qubits)
        if not qubits:
            raise ValueError("system needs at least one qubit")
        if not (0 <= self.target_index < len(qubits)):
            raise IndexError(f"target_index {self.target_index} out of range")
        labels = [q.label for q in qubits]
        if len(set(labels)) != len(labels):
            raise ValueError(f"qubit labels must be unique, got {labels}")
        scales = tuple(self.coupling_scales) or (1.0,) * len(qubits)
        if len(scales) != len(qubits):
            raise ValueError("coupling_scales length must match qubit count")
        object.__setattr__(self, "coupling_scales", scales)

    @property
    def target(self) -> QubitSpec:
        return self.qubits[self.target_index]

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(q.label for q in self.qubits)

    def nontargets(self) -> tuple[QubitSpec, ...]:
        return tuple(q for i, q in enumerate(self.qubits) if i != self.target_index)

    def index_of(self, label: str) -> int:
        for i, q in enumerate(self.qubits):
            if q.label == label:
                return i
        raise KeyError(f"no qubit labelled {label!r}")

    def retarget(self, label: str) -> "SharedLineSystem":
        """Same line with a different target qubit."""
        return SharedLineSystem(self.qubits, self.index_of(label), self.coupling_scales)

    def detunings(self, drive_freq: float) -> tuple[float, ...]:
        """Per-qubit detuning from the drive carrier."""
        return tuple(q.frequency - drive_freq for q in self.qubits)
