import pytest

from zpoptics import CovarianceModel, ScenarioConfig, build_scenario
from zpoptics.fields import FieldExpr, BasisVar, ModeId, Pol, Source, SpaceTimeEvent, Wavevector

LAB = SpaceTimeEvent("lab")


def mode(i: int) -> ModeId:
    """A generic standalone mode for algebra tests (all distinct by index)."""
    return ModeId(Source.IDLE, Wavevector.IDLE, Pol.H, index=i)


def var(i: int, conjugated: bool = False, amplified: bool = False) -> BasisVar:
    return BasisVar(mode(i), conjugated, amplified)


def expr(terms, event=LAB, omega=2.7e15) -> FieldExpr:
    return FieldExpr.make(terms, event, omega)


@pytest.fixture(scope="session")
def model():
    return CovarianceModel()


@pytest.fixture(scope="session")
def default_scenario():
    return build_scenario()


@pytest.fixture(scope="session")
def boosted_scenario():
    return build_scenario(ScenarioConfig(coupling=0.5))
