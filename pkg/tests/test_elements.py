import cmath
import math

import pytest

from zpoptics.covariance import CovarianceModel, pair_correlation
from zpoptics.elements import (
    Beam,
    ElementKind,
    ElementSpec,
    SQRT_HALF,
    apply_bs,
    apply_element,
    apply_pbs,
    apply_phase,
    pdc_source,
    phase_factor,
    propagate,
)
from zpoptics.fields import (
    C_LIGHT,
    BasisVar,
    FieldExpr,
    ModeId,
    ModeRegistry,
    Pol,
    Source,
    SpaceTimeEvent,
    Wavevector,
    conj,
)

from conftest import expr, var

OMEGA = 2.7e15


def crystal_mode(k, pol):
    source = Source.CRYSTAL1 if k in (Wavevector.K1, Wavevector.K2) else Source.CRYSTAL2
    return ModeId(source, k, pol)


def plain(k, pol):
    return BasisVar(crystal_mode(k, pol))


def admix(k, pol):
    return BasisVar(crystal_mode(k, pol), conjugated=True, amplified=True)


@pytest.fixture()
def registry():
    return ModeRegistry()


@pytest.fixture()
def sources(model, registry):
    beam1, beam2 = pdc_source(Source.CRYSTAL1, model, registry, OMEGA)
    beam3, beam4 = pdc_source(Source.CRYSTAL2, model, registry, OMEGA)
    return beam1, beam2, beam3, beam4


class TestPdcSource:
    def test_canonical_first_order_forms(self, model, sources):
        beam1, beam2, beam3, beam4 = sources
        gv = model.gain
        # crystal 2, transcription term for term
        assert beam3.h.terms == {plain(Wavevector.K3, Pol.H): 1.0,
                                 admix(Wavevector.K4, Pol.V): gv}
        assert beam3.v.terms == {plain(Wavevector.K3, Pol.V): 1.0,
                                 admix(Wavevector.K4, Pol.H): gv}
        assert beam4.h.terms == {plain(Wavevector.K4, Pol.H): 1.0,
                                 admix(Wavevector.K3, Pol.V): gv}
        # the vertical component enters with a minus sign
        assert beam4.v.terms == {plain(Wavevector.K4, Pol.V): -1.0,
                                 admix(Wavevector.K3, Pol.H): -gv}
        # crystal 1 mirrors it on (k1, k2)
        assert beam1.h.terms == {plain(Wavevector.K1, Pol.H): 1.0,
                                 admix(Wavevector.K2, Pol.V): gv}
        assert beam2.v.terms == {plain(Wavevector.K2, Pol.V): -1.0,
                                 admix(Wavevector.K1, Pol.H): -gv}

    def test_partner_cross_correlation_value(self, model, sources):
        # <F_p F_q> at the source, equal times: two admixture pairings of
        # sigma_sq each, totalling g V
        _, _, beam3, beam4 = sources
        f_p, f_q = beam3.v, beam4.h
        assert pair_correlation(f_p, f_q, model) == pytest.approx(0.1, rel=1e-12)
        f_s, f_r = beam3.h, beam4.v.scaled(-1.0)
        assert pair_correlation(f_r, f_s, model) == pytest.approx(0.1, rel=1e-12)

    def test_same_beam_components_uncorrelated(self, model, sources):
        _, _, beam3, beam4 = sources
        assert pair_correlation(beam3.v, beam3.h, model) == 0
        assert pair_correlation(beam4.h, beam4.v, model) == 0

    def test_crystals_mutually_uncorrelated(self, model, sources):
        beam1, beam2, beam3, beam4 = sources
        for first in (beam1, beam2):
            for second in (beam3, beam4):
                for ca in (first.h, first.v):
                    for cb in (second.h, second.v):
                        assert pair_correlation(ca, cb, model) == 0
                        assert pair_correlation(ca, conj(cb), model) == 0

    def test_mode_sets_consumed_once(self, model, registry):
        pdc_source(Source.CRYSTAL1, model, registry, OMEGA)
        with pytest.raises(ValueError):
            pdc_source(Source.CRYSTAL1, model, registry, OMEGA)


class TestBalancedSplitter:
    def test_output_form(self, model):
        ev = SpaceTimeEvent("in")
        a = Beam("2", h=expr({var(0): 1.0}, event=ev, omega=OMEGA),
                 v=FieldExpr.zero(ev, OMEGA))
        b = Beam("3", h=FieldExpr.zero(ev, OMEGA),
                 v=FieldExpr.zero(ev, OMEGA))
        out_a, out_b = apply_bs(a, b)
        assert out_a.h.terms == {var(0): 1j * SQRT_HALF}
        assert out_b.h.terms == {var(0): SQRT_HALF}
        assert out_a.label == "2'" and out_b.label == "3'"

    def test_no_new_modes(self, model, sources):
        _, beam2, beam3, _ = sources
        out_a, out_b = apply_bs(beam2, beam3)
        before = set(beam2.h.terms) | set(beam2.v.terms) | set(beam3.h.terms) | set(beam3.v.terms)
        after = set(out_a.h.terms) | set(out_a.v.terms) | set(out_b.h.terms) | set(out_b.v.terms)
        assert after == before

    def test_energy_bookkeeping(self, model, sources):
        _, beam2, beam3, _ = sources
        out_a, out_b = apply_bs(beam2, beam3)

        def intensity(beam):
            return sum(pair_correlation(c, conj(c), model).real
                       for c in (beam.h, beam.v))

        assert intensity(out_a) + intensity(out_b) == pytest.approx(
            intensity(beam2) + intensity(beam3), rel=1e-12)

    def test_interference_limit(self, model):
        ev = SpaceTimeEvent("in")
        x = expr({var(0): 1.0}, event=ev, omega=OMEGA)
        a = Beam("a", h=x, v=FieldExpr.zero(ev, OMEGA))
        b = Beam("b", h=x.scaled(1j), v=FieldExpr.zero(ev, OMEGA))
        out_a, out_b = apply_bs(a, b)
        assert out_b.h.is_zero()
        assert out_a.h.terms == {var(0): 2j * SQRT_HALF}

    def test_rejects_mismatched_arrival(self, model):
        ev0 = SpaceTimeEvent("in", path_length_m=0.0)
        ev1 = SpaceTimeEvent("in", path_length_m=1.0)
        a = Beam("a", h=expr({var(0): 1.0}, event=ev0, omega=OMEGA),
                 v=FieldExpr.zero(ev0, OMEGA))
        b = Beam("b", h=expr({var(1): 1.0}, event=ev1, omega=OMEGA),
                 v=FieldExpr.zero(ev1, OMEGA))
        with pytest.raises(ValueError):
            apply_bs(a, b)


class TestPolarizingSplitter:
    def test_port_structure(self, model, registry, sources):
        beam1, _, _, _ = sources
        dh1, dv1 = apply_pbs(beam1, registry)
        assert dh1.name == "DH1" and dv1.name == "DV1"
        # transmitted horizontal content survives unchanged
        assert dh1.components[Pol.H].terms == beam1.h.terms
        # idle V mode enters the transmitted port with i
        (idle_v, coef), = dh1.components[Pol.V].terms.items()
        assert idle_v.mode.source is Source.IDLE
        assert idle_v.mode.polarization is Pol.V
        assert coef == 1j
        # reflection carries -i
        assert dv1.components[Pol.V].terms == {
            v: -1j * c for v, c in beam1.v.terms.items()}
        (idle_h, coef_h), = dv1.components[Pol.H].terms.items()
        assert idle_h.mode.polarization is Pol.H
        assert coef_h == 1.0
        # one idle set per splitter, shared between the two ports
        assert idle_v.mode.index == idle_h.mode.index
        assert registry.idle_set_count == 1

    def test_fresh_modes_uncorrelated_with_everything(self, model, registry, sources):
        beam1, beam2, beam3, beam4 = sources
        dh1, dv1 = apply_pbs(beam1, registry)
        idle = dh1.components[Pol.V]
        for beam in (beam1, beam2, beam3, beam4):
            for comp in (beam.h, beam.v):
                assert pair_correlation(idle, comp, model) == 0
                assert pair_correlation(idle, conj(comp), model) == 0

    def test_vacuum_weight_restored_per_component(self, model, registry, sources):
        _, beam2, beam3, _ = sources
        out_a, _ = apply_bs(beam2, beam3)
        dh, dv = apply_pbs(out_a, registry)
        for port in (dh, dv):
            for comp in port.components.values():
                assert model.sigma_sq * comp.plain_weight() == pytest.approx(
                    model.sigma_sq, rel=1e-12)


class TestPhaseShifter:
    def test_half_turn_flips_vertical(self, sources):
        _, _, _, beam4 = sources
        flipped = apply_phase(beam4, Pol.V, math.pi)
        assert flipped.v.terms == {v: -c for v, c in beam4.v.terms.items()}
        assert flipped.h == beam4.h

    def test_zero_is_identity(self, sources):
        beam1, _, _, _ = sources
        assert apply_phase(beam1, Pol.H, 0.0) == beam1

    def test_quarter_turns_compose_to_half_turn(self, sources):
        beam1, _, _, _ = sources
        twice = apply_phase(apply_phase(beam1, Pol.V, math.pi / 2),
                            Pol.V, math.pi / 2)
        once = apply_phase(beam1, Pol.V, math.pi)
        assert twice == once

    def test_phase_factor_exact_at_quarter_turns(self):
        assert phase_factor(0.0) == 1
        assert phase_factor(math.pi) == -1
        assert phase_factor(math.pi / 2) == 1j
        assert phase_factor(3 * math.pi / 2) == -1j
        assert phase_factor(0.3) == pytest.approx(cmath.exp(0.3j))


class TestPropagation:
    def test_zero_distance_is_identity(self, sources):
        beam1, _, _, _ = sources
        assert propagate(beam1, 0.0) is beam1

    def test_global_phase_and_retardation(self, sources):
        beam1, _, _, _ = sources
        d = 1.25
        moved = propagate(beam1, d)
        factor = cmath.exp(1j * OMEGA * d / C_LIGHT)
        assert moved.event.path_length_m == d
        assert moved.event.emission_time_s == pytest.approx(-d / C_LIGHT)
        for before, after in ((beam1.h, moved.h), (beam1.v, moved.v)):
            for bvar, coef in before.terms.items():
                assert after.terms[bvar] == pytest.approx(factor * coef)

    def test_correlation_modulus_preserved_at_retarded_times(self, model, sources):
        _, _, beam3, beam4 = sources
        d = 0.5
        # detecting at times advanced by the flight time keeps the kernel at
        # zero lag, so only the unimodular phase changes
        t = d / C_LIGHT
        moved3 = propagate(beam3, d)
        moved4 = propagate(beam4, d)
        late3 = Beam("3", moved3.h.at_event(
            SpaceTimeEvent("3", d, t)), moved3.v.at_event(SpaceTimeEvent("3", d, t)))
        late4 = Beam("4", moved4.h.at_event(
            SpaceTimeEvent("4", d, t)), moved4.v.at_event(SpaceTimeEvent("4", d, t)))
        before = pair_correlation(beam3.v, beam4.h, model)
        after = pair_correlation(late3.v, late4.h, model)
        assert abs(after) == pytest.approx(abs(before), rel=1e-12)
        assert after == pytest.approx(before * cmath.exp(2j * OMEGA * d / C_LIGHT))

    def test_negative_distance_rejected(self, sources):
        beam1, _, _, _ = sources
        with pytest.raises(ValueError):
            propagate(beam1, -0.1)


class TestElementSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            ElementSpec(ElementKind.PHASE_SHIFTER, phase_rad=7.0, polarization=Pol.H)
        with pytest.raises(ValueError):
            ElementSpec(ElementKind.PROPAGATION, distance_m=-1.0)
        with pytest.raises(ValueError):
            ElementSpec(ElementKind.PHASE_SHIFTER, phase_rad=1.0)

    def test_dispatch_matches_direct_calls(self, model, registry, sources):
        beam1, beam2, beam3, _ = sources
        spec = ElementSpec.phase_shifter(math.pi, Pol.V)
        assert apply_element(spec, beam1) == apply_phase(beam1, Pol.V, math.pi)
        spec = ElementSpec.propagation(2.0)
        assert apply_element(spec, beam1) == propagate(beam1, 2.0)
        out = apply_element(ElementSpec.beam_splitter(), beam2, beam3)
        assert out == apply_bs(beam2, beam3)
        with pytest.raises(ValueError):
            apply_element(ElementSpec.polarizing_beam_splitter(), beam1)
