"""Optical elements as linear maps on two-polarization beams.

The pair source emits beams in their canonical first-order form: each
polarization component is one bare vacuum amplitude plus the coupling times
the conjugate of its partner mode.  The balanced splitter and the
polarizing splitters are transcribed with the phase conventions that
reproduce the assembled detector amplitudes sign for sign: reflection at
the balanced splitter carries i, reflection of the vertical component at a
polarizing splitter carries -i, and the idle injection on a transmitted
port carries i.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from enum import Enum

from .covariance import CovarianceModel
from .detection import DetectorPort
from .fields import (
    C_LIGHT,
    CRYSTAL_WAVEVECTORS,
    BasisVar,
    FieldExpr,
    ModeRegistry,
    Pol,
    Source,
    SpaceTimeEvent,
    linear_combine,
)

# Default optical central frequency (rad/s), near-infrared down-conversion.
DEFAULT_CENTRAL_FREQUENCY = 2.7e15

SQRT_HALF = 1.0 / math.sqrt(2.0)

SOURCE_POSITIONS = {Source.CRYSTAL1: "S1", Source.CRYSTAL2: "S2"}
BEAM_LABELS = {Source.CRYSTAL1: ("1", "2"), Source.CRYSTAL2: ("3", "4")}


def phase_factor(phi: float) -> complex:
    """e^{i phi}, exact at quarter-turn multiples so sign flips stay exact."""
    reduced = phi % (2.0 * math.pi)
    if reduced == 0.0:
        return 1.0 + 0j
    if reduced == math.pi:
        return -1.0 + 0j
    if reduced == 0.5 * math.pi:
        return 1j
    if reduced == 1.5 * math.pi:
        return -1j
    return cmath.exp(1j * phi)


@dataclass(frozen=True)
class Beam:
    """A two-polarization field at one location."""

    label: str
    h: FieldExpr
    v: FieldExpr

    def __post_init__(self) -> None:
        if self.h.event != self.v.event:
            raise ValueError("beam components must share one event")
        if self.h.omega != self.v.omega:
            raise ValueError("beam components must share the central frequency")

    @property
    def event(self) -> SpaceTimeEvent:
        return self.h.event

    @property
    def omega(self) -> float:
        return self.h.omega

    def component(self, pol: Pol) -> FieldExpr:
        return self.h if pol is Pol.H else self.v


class ElementKind(Enum):
    BEAM_SPLITTER = "beam_splitter"
    POLARIZING_BEAM_SPLITTER = "polarizing_beam_splitter"
    PHASE_SHIFTER = "phase_shifter"
    PROPAGATION = "propagation"


@dataclass(frozen=True)
class ElementSpec:
    """Description of one optical element."""

    kind: ElementKind
    polarization: Pol | None = None
    phase_rad: float = 0.0
    distance_m: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.phase_rad < 2.0 * math.pi:
            raise ValueError("phase must lie in [0, 2*pi)")
        if self.distance_m < 0:
            raise ValueError("propagation distance must be non-negative")
        if self.kind is ElementKind.PHASE_SHIFTER and self.polarization is None:
            raise ValueError("a phase shifter acts on a named polarization")

    @staticmethod
    def beam_splitter() -> "ElementSpec":
        return ElementSpec(ElementKind.BEAM_SPLITTER)

    @staticmethod
    def polarizing_beam_splitter() -> "ElementSpec":
        return ElementSpec(ElementKind.POLARIZING_BEAM_SPLITTER)

    @staticmethod
    def phase_shifter(phase_rad: float, polarization: Pol) -> "ElementSpec":
        return ElementSpec(ElementKind.PHASE_SHIFTER, polarization, phase_rad)

    @staticmethod
    def propagation(distance_m: float) -> "ElementSpec":
        return ElementSpec(ElementKind.PROPAGATION, distance_m=distance_m)


def pdc_source(crystal: Source, model: CovarianceModel, registry: ModeRegistry,
               omega: float = DEFAULT_CENTRAL_FREQUENCY) -> tuple[Beam, Beam]:
    """Signal/idler beam pair of one crystal in canonical first-order form.

    For the second crystal the components read

        F_s = a(k3,H) + gV a*(k4,V)      F_q = a(k4,H) + gV a*(k3,V)
        F_p = a(k3,V) + gV a*(k4,H)      F_r = a(k4,V) + gV a*(k3,H)

    assembled as beam3 = F_s i + F_p j and beam4 = F_q i - F_r j (the minus
    sign carries the singlet structure); the first crystal is identical with
    (k1, k2) and beams 1, 2.  Exactly four mode sets are consumed.
    """
    modes = registry.allocate_crystal_set(crystal)
    ka, kb = CRYSTAL_WAVEVECTORS[crystal]
    event = SpaceTimeEvent(SOURCE_POSITIONS[crystal])
    gain = model.gain

    def amplitude(plain_k, plain_pol, partner_k, partner_pol) -> FieldExpr:
        return FieldExpr.make({
            BasisVar(modes[plain_k, plain_pol]): 1.0,
            BasisVar(modes[partner_k, partner_pol], conjugated=True,
                     amplified=True): gain,
        }, event, omega)

    f_s = amplitude(ka, Pol.H, kb, Pol.V)
    f_p = amplitude(ka, Pol.V, kb, Pol.H)
    f_q = amplitude(kb, Pol.H, ka, Pol.V)
    f_r = amplitude(kb, Pol.V, ka, Pol.H)

    label_s, label_i = BEAM_LABELS[crystal]
    signal = Beam(label_s, h=f_s, v=f_p)
    idler = Beam(label_i, h=f_q, v=f_r.scaled(-1.0))
    return signal, idler


def apply_bs(in_a: Beam, in_b: Beam) -> tuple[Beam, Beam]:
    """Balanced splitter, componentwise: out_a = (i a + b)/sqrt2, out_b = (a + i b)/sqrt2.

    No new vacuum modes enter; the map is unitary so the summed vacuum
    weight of the outputs equals that of the inputs.
    """
    if in_a.omega != in_b.omega:
        raise ValueError("splitter inputs must share the central frequency")
    ev_a, ev_b = in_a.event, in_b.event
    if (ev_a.path_length_m, ev_a.time_s) != (ev_b.path_length_m, ev_b.time_s):
        raise ValueError(
            "splitter inputs must arrive with equal path length and time")
    event = replace(ev_a, position_label=f"BS({in_a.label},{in_b.label})")

    def mix(first: FieldExpr, second: FieldExpr) -> FieldExpr:
        return linear_combine([1j * SQRT_HALF, SQRT_HALF], [first, second],
                              event=event)

    out_a = Beam(in_a.label + "'", h=mix(in_a.h, in_b.h), v=mix(in_a.v, in_b.v))
    out_b = Beam(in_b.label + "'", h=mix(in_b.h, in_a.h), v=mix(in_b.v, in_a.v))
    return out_a, out_b


def apply_pbs(beam: Beam, registry: ModeRegistry) -> tuple[DetectorPort, DetectorPort]:
    """Polarizing splitter: transmit H, reflect V, inject one idle set.

    The transmitted port keeps the horizontal content and receives i times
    the idle vertical mode; the reflected port carries -i times the vertical
    content plus the idle horizontal mode.  Both output ports draw from the
    single idle beam entering the unused input.
    """
    area = beam.label.replace("'", "")
    idle_h, idle_v = registry.allocate_idle_set(channel=area)
    omega = beam.omega

    h_event = replace(beam.event, position_label=f"DH{area}")
    v_event = replace(beam.event, position_label=f"DV{area}")
    z_h = FieldExpr.make({BasisVar(idle_h): 1.0}, v_event, omega)
    z_v = FieldExpr.make({BasisVar(idle_v): 1j}, h_event, omega)

    transmitted = DetectorPort(
        name=f"DH{area}",
        components={Pol.H: beam.h.at_event(h_event), Pol.V: z_v},
        detects=Pol.H)
    reflected = DetectorPort(
        name=f"DV{area}",
        components={Pol.V: beam.v.scaled(-1j).at_event(v_event), Pol.H: z_h},
        detects=Pol.V)
    return transmitted, reflected


def apply_phase(beam: Beam, pol: Pol, phase_rad: float) -> Beam:
    """Multiply the selected polarization component by e^{i phase}."""
    factor = phase_factor(phase_rad)
    if pol is Pol.H:
        return Beam(beam.label, h=beam.h.scaled(factor), v=beam.v)
    return Beam(beam.label, h=beam.h, v=beam.v.scaled(factor))


def propagate(beam: Beam, distance_m: float) -> Beam:
    """Free propagation over a distance d.

    Both components pick up the phase e^{i omega d / c}; the accumulated
    path length grows by d, so the content is referred to the emission time
    t - path/c when correlations are evaluated.
    """
    if distance_m < 0:
        raise ValueError("propagation distance must be non-negative")
    if distance_m == 0:
        return beam
    factor = phase_factor(beam.omega * distance_m / C_LIGHT)
    event = replace(beam.event,
                    path_length_m=beam.event.path_length_m + distance_m)
    return Beam(beam.label,
                h=beam.h.scaled(factor).at_event(event),
                v=beam.v.scaled(factor).at_event(event))


def apply_element(spec: ElementSpec, *beams: Beam, registry: ModeRegistry | None = None):
    """Dispatch an element description onto beams."""
    if spec.kind is ElementKind.BEAM_SPLITTER:
        if len(beams) != 2:
            raise ValueError("a balanced splitter takes two input beams")
        return apply_bs(*beams)
    if spec.kind is ElementKind.POLARIZING_BEAM_SPLITTER:
        if len(beams) != 1 or registry is None:
            raise ValueError("a polarizing splitter takes one beam and a registry")
        return apply_pbs(beams[0], registry)
    if spec.kind is ElementKind.PHASE_SHIFTER:
        if len(beams) != 1:
            raise ValueError("a phase shifter takes one beam")
        return apply_phase(beams[0], spec.polarization, spec.phase_rad)
    if len(beams) != 1:
        raise ValueError("propagation takes one beam")
    return propagate(beams[0], spec.distance_m)
