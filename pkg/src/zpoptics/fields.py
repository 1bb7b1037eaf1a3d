"""Vacuum modes and sparse complex-linear field expressions.

Every beam amplitude in this package is a finite linear combination of
vacuum mode amplitudes (and their conjugates) tagged with the space-time
event at which it is evaluated.  Optical elements act on these expressions
as linear maps, so every observable reduces to Gaussian moments of the
underlying mode amplitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterator, Mapping, Sequence

C_LIGHT = 299_792_458.0  # m/s

# Coefficients with modulus below this are dropped from expressions.
PRUNE_TOL = 1e-15


class Source(Enum):
    """Where a vacuum mode enters the experiment."""

    CRYSTAL1 = "crystal1"
    CRYSTAL2 = "crystal2"
    IDLE = "idle"


class Wavevector(Enum):
    K1 = "k1"
    K2 = "k2"
    K3 = "k3"
    K4 = "k4"
    IDLE = "idle"


class Pol(Enum):
    H = "H"
    V = "V"


# Each crystal couples the pump to two wavevector labels only.
CRYSTAL_WAVEVECTORS = {
    Source.CRYSTAL1: (Wavevector.K1, Wavevector.K2),
    Source.CRYSTAL2: (Wavevector.K3, Wavevector.K4),
}


@dataclass(frozen=True)
class ModeId:
    """One vacuum mode: origin, wavevector label, polarization.

    ``index`` disambiguates idle-channel injections (one fresh pair per
    polarizing splitter); ``channel`` records which beam's splitter injected
    an idle mode.  The tuple (source, wavevector, polarization, index) is
    unique within a registry.
    """

    source: Source
    wavevector: Wavevector
    polarization: Pol
    index: int = 0
    channel: str = ""

    def __post_init__(self) -> None:
        if self.source is Source.IDLE:
            if self.wavevector is not Wavevector.IDLE:
                raise ValueError("idle modes must carry the idle wavevector label")
        else:
            allowed = CRYSTAL_WAVEVECTORS[self.source]
            if self.wavevector not in allowed:
                raise ValueError(
                    f"{self.source.value} modes are restricted to "
                    f"{[w.value for w in allowed]}, got {self.wavevector.value}"
                )

    def __str__(self) -> str:
        if self.source is Source.IDLE:
            return f"z{self.channel}.{self.polarization.value}{self.index}"
        return f"{self.wavevector.value}{self.polarization.value}"


@dataclass(frozen=True)
class BasisVar:
    """A mode amplitude or its conjugate.

    ``amplified`` marks content admixed by the down-conversion coupling; the
    temporal kernel applies only where amplified content pairs with plain
    content (signal-idler pairings).  Conjugation toggles ``conjugated`` and
    preserves ``amplified``.
    """

    mode: ModeId
    conjugated: bool = False
    amplified: bool = False

    def conjugate(self) -> "BasisVar":
        return BasisVar(self.mode, not self.conjugated, self.amplified)

    def __str__(self) -> str:
        star = "*" if self.conjugated else ""
        return f"{self.mode}{star}"


@dataclass(frozen=True)
class SpaceTimeEvent:
    """Evaluation point of a field expression.

    ``path_length_m`` is the optical path accumulated since the source, so
    the emission time of the content is ``time_s - path_length_m / c``.
    """

    position_label: str
    path_length_m: float = 0.0
    time_s: float = 0.0

    def __post_init__(self) -> None:
        if self.path_length_m < 0:
            raise ValueError("path length must be non-negative")

    @property
    def emission_time_s(self) -> float:
        return self.time_s - self.path_length_m / C_LIGHT


@dataclass(frozen=True)
class FieldExpr:
    """Sparse complex-linear form over basis variables, at one event."""

    terms: Mapping[BasisVar, complex]
    event: SpaceTimeEvent
    omega: float  # central frequency, rad/s

    @staticmethod
    def make(terms: Mapping[BasisVar, complex], event: SpaceTimeEvent,
             omega: float) -> "FieldExpr":
        pruned = {v: complex(c) for v, c in terms.items() if abs(c) >= PRUNE_TOL}
        return FieldExpr(pruned, event, omega)

    @staticmethod
    def zero(event: SpaceTimeEvent, omega: float) -> "FieldExpr":
        return FieldExpr({}, event, omega)

    def is_zero(self) -> bool:
        return not self.terms

    def scaled(self, factor: complex) -> "FieldExpr":
        return FieldExpr.make(
            {v: factor * c for v, c in self.terms.items()}, self.event, self.omega)

    def at_event(self, event: SpaceTimeEvent) -> "FieldExpr":
        return FieldExpr(dict(self.terms), event, self.omega)

    def plain_weight(self) -> float:
        """Total |coefficient|^2 of the un-amplified (bare vacuum) content."""
        return sum(abs(c) ** 2 for v, c in self.terms.items() if not v.amplified)

    def amplified_weight(self) -> float:
        return sum(abs(c) ** 2 for v, c in self.terms.items() if v.amplified)

    def __add__(self, other: "FieldExpr") -> "FieldExpr":
        return linear_combine([1.0, 1.0], [self, other])

    def __sub__(self, other: "FieldExpr") -> "FieldExpr":
        return linear_combine([1.0, -1.0], [self, other])

    def __mul__(self, factor: complex) -> "FieldExpr":
        return self.scaled(factor)

    __rmul__ = __mul__

    def __neg__(self) -> "FieldExpr":
        return self.scaled(-1.0)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({c:.3g})*{v}" for v, c in self.terms.items())


def conj(expr: FieldExpr) -> FieldExpr:
    """Complex conjugate: coefficients conjugated, every variable starred."""
    return FieldExpr(
        {v.conjugate(): c.conjugate() for v, c in expr.terms.items()},
        expr.event, expr.omega)


def linear_combine(coeffs: Sequence[complex], exprs: Sequence[FieldExpr],
                   event: SpaceTimeEvent | None = None) -> FieldExpr:
    """Termwise linear combination sum_k coeffs[k] * exprs[k].

    All inputs must share the central frequency.  The resulting event is
    taken from the inputs when they agree, otherwise the caller must supply
    one explicitly.
    """
    if len(coeffs) != len(exprs):
        raise ValueError("coefficient/expression count mismatch")
    if not exprs:
        raise ValueError("nothing to combine")
    omega = exprs[0].omega
    for e in exprs[1:]:
        if e.omega != omega:
            raise ValueError("cannot combine expressions of different frequency")
    if event is None:
        event = exprs[0].event
        for e in exprs[1:]:
            if e.event != event:
                raise ValueError(
                    "expressions carry different events; supply the result event")
    out: dict[BasisVar, complex] = {}
    for c, e in zip(coeffs, exprs):
        if c == 0:
            continue
        for v, coef in e.terms.items():
            out[v] = out.get(v, 0j) + c * coef
    return FieldExpr.make(out, event, omega)


class ModeRegistry:
    """Allocates the vacuum modes of one experiment and keeps the ledger.

    Each crystal consumes four independent mode sets; each polarizing
    splitter injects one idle set (an H, V pair through its unused input).
    """

    def __init__(self) -> None:
        self._modes: set[ModeId] = set()
        self._crystals: set[Source] = set()
        self._idle_sets = 0

    def _register(self, mode: ModeId) -> ModeId:
        if mode in self._modes:
            raise ValueError(f"mode {mode} already allocated")
        self._modes.add(mode)
        return mode

    def allocate_crystal_set(self, crystal: Source) -> dict[tuple[Wavevector, Pol], ModeId]:
        """The four mode sets amplified in one crystal, keyed by (k, pol)."""
        if crystal not in CRYSTAL_WAVEVECTORS:
            raise ValueError("crystal must be CRYSTAL1 or CRYSTAL2")
        if crystal in self._crystals:
            raise ValueError(f"{crystal.value} mode sets already allocated")
        self._crystals.add(crystal)
        return {
            (k, pol): self._register(ModeId(crystal, k, pol))
            for k in CRYSTAL_WAVEVECTORS[crystal]
            for pol in (Pol.H, Pol.V)
        }

    def allocate_idle_set(self, channel: str) -> tuple[ModeId, ModeId]:
        """A fresh (H, V) idle pair for the unused input of one splitter."""
        idx = self._idle_sets
        self._idle_sets += 1
        h = self._register(ModeId(Source.IDLE, Wavevector.IDLE, Pol.H, idx, channel))
        v = self._register(ModeId(Source.IDLE, Wavevector.IDLE, Pol.V, idx, channel))
        return h, v

    @property
    def source_set_count(self) -> int:
        """Number of crystal-amplified mode sets allocated so far."""
        return sum(1 for m in self._modes if m.source is not Source.IDLE)

    @property
    def idle_set_count(self) -> int:
        """Number of idle-channel injections (one per polarizing splitter)."""
        return self._idle_sets

    def __contains__(self, mode: ModeId) -> bool:
        return mode in self._modes

    def __iter__(self) -> Iterator[ModeId]:
        return iter(sorted(self._modes, key=str))

    def __len__(self) -> int:
        return len(self._modes)
