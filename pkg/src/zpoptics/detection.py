"""Analytic detection observables.

Rates and coincidence probabilities are computed from field correlations
with the vacuum intensity subtracted: a detector fires on the amplified
excess over the zeropoint background.  Joint and four-fold probabilities
are sums of squared moduli of field cross-correlations over all
polarization component selections.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, NamedTuple, Sequence

from .covariance import CovarianceModel, gaussian_moment, isserlis_quadruple, pair_correlation
from .fields import FieldExpr, Pol, SpaceTimeEvent, conj

# Analytic probabilities more negative than this indicate a broken model;
# anything between -NEGATIVE_TOL and 0 is floating-point cancellation.
NEGATIVE_TOL = 1e-14


class InternalConsistencyError(RuntimeError):
    """A quantity that must be non-negative came out significantly negative."""


def clamp_probability(value: float, tol: float = NEGATIVE_TOL) -> float:
    if value < -tol:
        raise InternalConsistencyError(
            f"probability {value} below -{tol}; covariance model is inconsistent")
    return max(value, 0.0)


@dataclass(frozen=True)
class DetectorPort:
    """One output of a polarizing splitter, wired to a detector.

    Both polarization axes reach the detector: the signal axis carries beam
    content, the other carries the idle-channel injection.  ``efficiency``
    is the multiplicative detection constant K.
    """

    name: str
    components: Mapping[Pol, FieldExpr]
    detects: Pol
    efficiency: float = 1.0

    def __post_init__(self) -> None:
        if self.efficiency <= 0:
            raise ValueError("detection constant must be positive")
        if set(self.components) != {Pol.H, Pol.V}:
            raise ValueError("a port carries exactly the H and V axes")
        if self.components[Pol.H].event != self.components[Pol.V].event:
            raise ValueError("port components must share one detection event")

    @property
    def event(self) -> SpaceTimeEvent:
        return self.components[Pol.H].event

    @property
    def signal(self) -> FieldExpr:
        """The component on the detected polarization axis."""
        return self.components[self.detects]

    def with_detection_time(self, time_s: float) -> "DetectorPort":
        event = replace(self.event, time_s=time_s)
        comps = {pol: e.at_event(event) for pol, e in self.components.items()}
        return DetectorPort(self.name, comps, self.detects, self.efficiency)


def component_zpf_intensity(expr: FieldExpr, model: CovarianceModel) -> float:
    """Vacuum intensity of one port component (the subtraction baseline)."""
    return model.sigma_sq * expr.plain_weight()


def single_rate(port: DetectorPort, model: CovarianceModel) -> float:
    """Amplified excess over vacuum, K * sum_axes (<F F*> - I_zpf)."""
    excess = 0.0
    for comp in port.components.values():
        mean_intensity = pair_correlation(comp, conj(comp), model).real
        excess += mean_intensity - component_zpf_intensity(comp, model)
    return clamp_probability(port.efficiency * excess)


def joint_probability(a: DetectorPort, b: DetectorPort,
                      model: CovarianceModel) -> float:
    """K_a K_b * sum over component pairs of |<F_a F_b>|^2."""
    return clamp_probability(
        a.efficiency * b.efficiency * _joint_value(a, b, model))


def _joint_value(a: DetectorPort, b: DetectorPort, model: CovarianceModel) -> float:
    total = 0.0
    for ca in a.components.values():
        for cb in b.components.values():
            total += abs(pair_correlation(ca, cb, model)) ** 2
    return total


@dataclass(frozen=True)
class ProbabilityReport:
    """A four-fold probability and its nonzero component selections."""

    value: float
    selections: tuple[tuple[str, complex], ...]


def quadruple_probability(a: DetectorPort, b: DetectorPort, c: DetectorPort,
                          d: DetectorPort, model: CovarianceModel) -> ProbabilityReport:
    """Four-fold coincidence probability.

    Sums |<F_a F_b F_c F_d>|^2 over the sixteen polarization component
    selections; each quadruple correlation factorizes by Wick.  The report
    lists the selections that contribute.
    """
    ports = (a, b, c, d)
    value = 0.0
    selections: list[tuple[str, complex]] = []
    for axes in itertools.product((Pol.H, Pol.V), repeat=4):
        quad = isserlis_quadruple(
            *(p.components[ax] for p, ax in zip(ports, axes)), model)
        if quad != 0:
            label = " ".join(f"{p.name}.{ax.value}" for p, ax in zip(ports, axes))
            selections.append((label, quad))
            value += abs(quad) ** 2
    k = a.efficiency * b.efficiency * c.efficiency * d.efficiency
    return ProbabilityReport(clamp_probability(k * value), tuple(selections))


def double_detection_correlation(a: DetectorPort, b: DetectorPort, c: DetectorPort,
                                 model: CovarianceModel) -> complex:
    """<F_a F_b F_b F_c> with port b screened twice at one event.

    With the doubled component taken at identical position and time this is
    2 <F_a F_b><F_b F_c> (the <F_b F_b> self-pairing carries <F_a F_c>,
    which vanishes for the outer beam pair).  The signs of the two pair
    correlations are erased in the product, which is why the two
    same-polarization Bell outcomes cannot be told apart this way.
    """
    ab = pair_correlation(a.signal, b.signal, model)
    bc = pair_correlation(b.signal, c.signal, model)
    return 2.0 * ab * bc


class WickCheck(NamedTuple):
    grouped: float
    modulus_form: float


def wick_expansion_check(a: DetectorPort, b: DetectorPort, c: DetectorPort,
                         d: DetectorPort, model: CovarianceModel) -> WickCheck:
    """Four-fold probability computed two algebraically equal ways.

    ``grouped``: pairwise-probability products plus the interference terms
    written as re-combined pair correlations (with complex conjugates).
    ``modulus_form``: the squared-modulus sum of quadruple correlations.
    The two must agree to rounding; this validates the moment bookkeeping.
    """
    ports = (a, b, c, d)
    k = a.efficiency * b.efficiency * c.efficiency * d.efficiency

    cross = 0.0
    for axes in itertools.product((Pol.H, Pol.V), repeat=4):
        fa, fb, fc, fd = (p.components[ax] for p, ax in zip(ports, axes))
        p1 = pair_correlation(fa, fb, model) * pair_correlation(fc, fd, model)
        p2 = pair_correlation(fa, fc, model) * pair_correlation(fb, fd, model)
        p3 = pair_correlation(fa, fd, model) * pair_correlation(fb, fc, model)
        cross += 2.0 * (p1.conjugate() * p2 + p1.conjugate() * p3
                        + p2.conjugate() * p3).real

    grouped = (_joint_value(a, b, model) * _joint_value(c, d, model)
               + _joint_value(a, c, model) * _joint_value(b, d, model)
               + _joint_value(a, d, model) * _joint_value(b, c, model)
               + cross)
    modulus = quadruple_probability(a, b, c, d, model).value
    return WickCheck(k * grouped, modulus)


def intensity_correlation(ports: Sequence[DetectorPort],
                          model: CovarianceModel) -> float:
    """Exact <prod_i (I_i - I_zpf,i)> over the joint Gaussian field model.

    This is the quantity the Monte Carlo estimator targets, evaluated in
    closed form by complete Wick pairings of the port components.  It
    coincides with the squared-modulus coincidence forms up to terms
    suppressed by extra powers of the coupling.
    """
    m = len(ports)
    total = 0j
    axis_choices = [(Pol.H, Pol.V)] * m
    for axes in itertools.product(*axis_choices):
        comps = [p.components[ax] for p, ax in zip(ports, axes)]
        baselines = [component_zpf_intensity(e, model) for e in comps]
        for mask in range(1 << m):
            coeff = 1.0
            exprs: list[FieldExpr] = []
            for i in range(m):
                if mask >> i & 1:
                    exprs.append(comps[i])
                    exprs.append(conj(comps[i]))
                else:
                    coeff *= -baselines[i]
            total += coeff * gaussian_moment(exprs, model)
    k = 1.0
    for p in ports:
        k *= p.efficiency
    return k * total.real


# The eight correlated component pairs of the assembled experiment, each a
# ((port, axis), (port, axis)) selection, in the canonical listing order.
CORRELATED_COMPONENT_PAIRS: tuple[tuple[tuple[str, Pol], tuple[str, Pol]], ...] = (
    (("DH2", Pol.H), ("DV1", Pol.V)),
    (("DH2", Pol.H), ("DV4", Pol.V)),
    (("DV2", Pol.V), ("DH1", Pol.H)),
    (("DV2", Pol.V), ("DH4", Pol.H)),
    (("DH3", Pol.H), ("DV1", Pol.V)),
    (("DH3", Pol.H), ("DV4", Pol.V)),
    (("DV3", Pol.V), ("DH1", Pol.H)),
    (("DV3", Pol.V), ("DH4", Pol.H)),
)

# The eight resolvable four-fold click patterns (outer port, two analyser
# ports, outer port), split by Bell class and by which correlation chain
# ((r,s) or (p,q) content) feeds them.
RESOLVABLE_PATTERNS: tuple[tuple[tuple[str, str, str, str], str, str], ...] = (
    (("DH1", "DH2", "DV2", "DV4"), "psi_plus", "rs"),
    (("DH1", "DH3", "DV3", "DV4"), "psi_plus", "rs"),
    (("DV1", "DH2", "DV2", "DH4"), "psi_plus", "pq"),
    (("DV1", "DH3", "DV3", "DH4"), "psi_plus", "pq"),
    (("DH1", "DH2", "DV3", "DV4"), "psi_minus", "rs"),
    (("DH1", "DV2", "DH3", "DV4"), "psi_minus", "rs"),
    (("DV1", "DH2", "DV3", "DH4"), "psi_minus", "pq"),
    (("DV1", "DV2", "DH3", "DH4"), "psi_minus", "pq"),
)

# Same-polarization analyser patterns: their quadruple correlations cancel
# at balanced arms (two reflections against two transmissions).
NULL_PATTERNS: tuple[tuple[str, str, str, str], ...] = (
    ("DH1", "DV2", "DV3", "DH4"),
    ("DV1", "DH2", "DH3", "DV4"),
)


@dataclass(frozen=True)
class SignTableRow:
    pattern: tuple[str, str, str, str]
    bell_class: str  # "psi_plus" | "psi_minus"
    chain: str       # "rs" | "pq"
    value: complex


def sign_table(ports: Mapping[str, DetectorPort],
               model: CovarianceModel) -> list[SignTableRow]:
    """The eight resolvable quadruple correlations with their sign classes.

    Same-area analyser patterns share one common prefactor; the cross-area
    (singlet) patterns alternate in sign.  A half-turn phase on the second
    outer beam's vertical component flips exactly the (r,s)-chain rows.
    """
    rows = []
    for pattern, bell_class, chain in RESOLVABLE_PATTERNS:
        value = isserlis_quadruple(
            *(ports[name].signal for name in pattern), model)
        rows.append(SignTableRow(pattern, bell_class, chain, value))
    return rows


def correlation_table(ports: Mapping[str, DetectorPort],
                      model: CovarianceModel) -> list[tuple[tuple[str, Pol], tuple[str, Pol], complex]]:
    """Values of the eight correlated component pairs, in canonical order."""
    out = []
    for (na, pa), (nb, pb) in CORRELATED_COMPONENT_PAIRS:
        value = pair_correlation(
            ports[na].components[pa], ports[nb].components[pb], model)
        out.append(((na, pa), (nb, pb), value))
    return out
