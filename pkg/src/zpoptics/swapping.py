"""The entanglement-swapping experiment: assembly, outcome classes, feed-forward.

Two crystals emit beam pairs (1,2) and (3,4).  Beams 2 and 3 meet on a
balanced splitter; its outputs and the outer beams each hit a polarizing
splitter whose ports feed the eight detectors DH1..DV4.  A two-click
pattern on the analyser ports selects a Bell class for the outer pair, and
a half-turn phase on beam 4's vertical component converts the same-area
outcome into the singlet signature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .config import BEAM_LABELS, ConfigError, CorrectionSpec, ScenarioConfig
from .covariance import CovarianceModel, pair_correlation
from .detection import (
    RESOLVABLE_PATTERNS,
    DetectorPort,
    SignTableRow,
    double_detection_correlation,
    sign_table,
)
from .elements import apply_bs, apply_pbs, apply_phase, pdc_source, propagate
from .fields import ModeRegistry, Pol, Source

BSM_PORTS = ("DH2", "DV2", "DH3", "DV3")

# The eight resolvable four-fold patterns, names only.
RESOLVABLE_PATTERNS_BY_NAME = tuple(p for p, _, _ in RESOLVABLE_PATTERNS)
AREA1_PORTS = ("DH1", "DV1")
AREA4_PORTS = ("DH4", "DV4")

FEED_FORWARD = CorrectionSpec(beam="4", polarization=Pol.V, phase_rad=math.pi)
IDENTITY_CORRECTION = CorrectionSpec(beam="4", polarization=Pol.V, phase_rad=0.0)


class BellLabel(Enum):
    PSI_PLUS = "psi_plus"
    PSI_MINUS = "psi_minus"
    PHI_AMBIGUOUS = "phi_ambiguous"
    UNRESOLVABLE_NULL = "unresolvable_null"


@dataclass(frozen=True)
class CoincidencePattern:
    """Two analyser clicks: two distinct ports, or one port doubled."""

    clicks: tuple[str, str]

    def __post_init__(self) -> None:
        if len(self.clicks) != 2:
            raise ValueError("a coincidence pattern holds exactly two clicks")
        for name in self.clicks:
            if name not in BSM_PORTS:
                raise ValueError(f"{name} is not an analyser port")
        ordered = tuple(sorted(self.clicks, key=BSM_PORTS.index))
        object.__setattr__(self, "clicks", ordered)

    @property
    def doubled(self) -> bool:
        return self.clicks[0] == self.clicks[1]


@dataclass(frozen=True)
class BellOutcome:
    """Bell class of a click pattern plus the beam-4 correction it calls for."""

    label: BellLabel
    correction: CorrectionSpec | None


def classify_pattern(pattern: CoincidencePattern) -> BellOutcome:
    """Map analyser clicks to a Bell class.

    Same-area clicks need the half-turn correction on beam 4; cross-area
    orthogonal clicks already leave the outer pair in the singlet.  A
    doubled port cannot separate the two same-polarization Bell states, and
    same-polarization two-port patterns carry no coincidence weight at
    balanced arms.
    """
    a, b = pattern.clicks
    if pattern.doubled:
        return BellOutcome(BellLabel.PHI_AMBIGUOUS, None)
    same_area = a[-1] == b[-1]
    same_pol = a[1] == b[1]
    if same_area:
        return BellOutcome(BellLabel.PSI_PLUS, FEED_FORWARD)
    if same_pol:
        return BellOutcome(BellLabel.UNRESOLVABLE_NULL, None)
    return BellOutcome(BellLabel.PSI_MINUS, IDENTITY_CORRECTION)


@dataclass(frozen=True)
class SwappingScenario:
    """The assembled experiment: model, mode ledger and the eight ports."""

    config: ScenarioConfig
    model: CovarianceModel
    registry: ModeRegistry
    ports: Mapping[str, DetectorPort]

    def port(self, name: str) -> DetectorPort:
        return self.ports[name]

    def sign_table(self) -> list[SignTableRow]:
        return sign_table(self.ports, self.model)


def build_scenario(config: ScenarioConfig | None = None) -> SwappingScenario:
    """Assemble the full experiment from a configuration.

    Sources fire, configured phase corrections act on the raw beams, each
    beam propagates its arm, beams 2 and 3 interfere on the balanced
    splitter, and four polarizing splitters terminate on the detectors.
    The two analyser arms must have equal length: the splitter merges its
    inputs into amplitudes referred to a single path.
    """
    if config is None:
        config = ScenarioConfig()
    arms = {label: float(config.arm_lengths_m.get(label, 0.0))
            for label in BEAM_LABELS}
    if arms["2"] != arms["3"]:
        raise ConfigError(
            "analyser arms (beams 2 and 3) must have equal length; "
            f"got {arms['2']} and {arms['3']}")
    for label, length in arms.items():
        if length < 0:
            raise ConfigError(f"arm {label} has negative length")

    model = config.model()
    registry = ModeRegistry()
    omega = config.central_frequency_rad_s

    beam1, beam2 = pdc_source(Source.CRYSTAL1, model, registry, omega)
    beam3, beam4 = pdc_source(Source.CRYSTAL2, model, registry, omega)
    beams = {"1": beam1, "2": beam2, "3": beam3, "4": beam4}

    for correction in config.corrections:
        beam = beams[correction.beam]
        beams[correction.beam] = apply_phase(
            beam, correction.polarization, correction.phase_rad)

    for label in BEAM_LABELS:
        beams[label] = propagate(beams[label], arms[label])

    analysed_2, analysed_3 = apply_bs(beams["2"], beams["3"])

    ports: dict[str, DetectorPort] = {}
    for beam in (beams["1"], analysed_2, analysed_3, beams["4"]):
        for port in apply_pbs(beam, registry):
            ports[port.name] = port.with_detection_time(
                float(config.detection_times_s.get(port.name, 0.0)))

    return SwappingScenario(config, model, registry, ports)


def apply_feedforward(scenario: SwappingScenario,
                      outcome: BellOutcome) -> SwappingScenario:
    """Rebuild the experiment with the outcome's correction on beam 4.

    The correction acts on the raw beam before its analyser, so for the
    same-area outcome the (r,s)-chain rows of the sign table flip while the
    (p,q)-chain rows stay put, which is the singlet alternation.
    """
    if outcome.correction is None:
        raise ValueError(f"no correction available for {outcome.label.value}")
    if outcome.correction.phase_rad == 0.0:
        return scenario
    return build_scenario(scenario.config.with_corrections(outcome.correction))


@dataclass(frozen=True)
class WitnessReport:
    """Evidence that the outer pair carries the claimed Bell signature.

    ``conditional_rows`` are the sign-table rows consistent with the click
    pattern; ``double_detections`` holds the doubled-port correlations for
    the ambiguous class; ``cross_correlations`` lists every outer
    area-1 x area-4 component correlation, all of which stay zero.
    """

    pattern: CoincidencePattern
    outcome: BellOutcome
    conditional_rows: tuple[SignTableRow, ...]
    double_detections: tuple[tuple[str, str, str, complex], ...]
    cross_correlations: tuple[tuple[str, Pol, str, Pol, complex], ...]

    @property
    def cross_correlation_max(self) -> float:
        return max((abs(v) for *_, v in self.cross_correlations), default=0.0)


def outer_cross_correlations(
        scenario: SwappingScenario) -> tuple[tuple[str, Pol, str, Pol, complex], ...]:
    """All sixteen area-1 x area-4 component pair correlations."""
    rows = []
    for n1 in AREA1_PORTS:
        for pol1 in (Pol.H, Pol.V):
            for n4 in AREA4_PORTS:
                for pol4 in (Pol.H, Pol.V):
                    value = pair_correlation(
                        scenario.ports[n1].components[pol1],
                        scenario.ports[n4].components[pol4],
                        scenario.model)
                    rows.append((n1, pol1, n4, pol4, value))
    return tuple(rows)


def swapped_pair_witness(scenario: SwappingScenario,
                         pattern: CoincidencePattern) -> WitnessReport:
    """Conditional signature of the outer pair for one click pattern.

    Conditioning selects the matching quadruple-correlation rows; it does
    not alter the Gaussian ensemble, and the unconditional outer-pair
    correlations remain zero whatever the outcome.
    """
    outcome = classify_pattern(pattern)
    if outcome.label is BellLabel.UNRESOLVABLE_NULL:
        raise ValueError("same-polarization two-port patterns carry no "
                         "resolvable outcome")

    conditional = tuple(
        row for row in scenario.sign_table()
        if tuple(sorted(row.pattern[1:3], key=BSM_PORTS.index)) == pattern.clicks)

    doubles: tuple[tuple[str, str, str, complex], ...] = ()
    if outcome.label is BellLabel.PHI_AMBIGUOUS:
        doubled = pattern.clicks[0]
        # Outer detectors orthogonal to the doubled port click together.
        outer_pol = "V" if doubled[1] == "H" else "H"
        a, c = f"D{outer_pol}1", f"D{outer_pol}4"
        doubles = tuple(
            (a, name, c, double_detection_correlation(
                scenario.ports[a], scenario.ports[name], scenario.ports[c],
                scenario.model))
            for name in (doubled,))

    return WitnessReport(
        pattern=pattern,
        outcome=outcome,
        conditional_rows=conditional,
        double_detections=doubles,
        cross_correlations=outer_cross_correlations(scenario),
    )
