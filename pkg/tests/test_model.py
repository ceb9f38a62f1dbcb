import math

import pytest

from rgg_spectra.errors import InvalidParams
from rgg_spectra.model import (
    CRITICAL_HIGH,
    CRITICAL_LOW,
    SUBCRITICAL,
    SUPERCRITICAL,
    ModelParams,
    RegimeSpec,
    derive_scalars,
    limiting_regime,
    regime_of_schedule,
    unit_ball_volume,
)


@pytest.mark.parametrize("d, expected", [(1, 2.0), (2, math.pi), (3, 4 * math.pi / 3), (4, math.pi**2 / 2)])
def test_unit_ball_volume(d, expected):
    assert unit_ball_volume(d) == pytest.approx(expected, rel=1e-14)


def test_critical_boundary_belongs_to_low_branch():
    assert RegimeSpec.critical(1.0).kind == CRITICAL_LOW
    assert RegimeSpec.critical(1.0 + 1e-12).kind == CRITICAL_HIGH


@pytest.mark.parametrize(
    "kind, c",
    [(CRITICAL_LOW, 1.5), (CRITICAL_HIGH, 1.0), (CRITICAL_LOW, 0.0), (SUBCRITICAL, 0.5), ("other", None)],
)
def test_regime_rejects_mismatch(kind, c):
    with pytest.raises(InvalidParams):
        RegimeSpec(kind, c)


def test_regime_round_trip():
    for r in (RegimeSpec.subcritical(), RegimeSpec.supercritical(), RegimeSpec.critical(0.3), RegimeSpec.critical(4)):
        assert RegimeSpec.from_dict(r.to_dict()) == r
    assert RegimeSpec.from_dict({"kind": "critical", "c": 2.0}).kind == CRITICAL_HIGH


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(d=0, taus=(0.0,)),
        dict(d=2, taus=()),
        dict(d=2, taus=(1.0, 1.0)),
        dict(d=2, taus=(2.0, 1.0)),
        dict(d=2, taus=(-1.0, 0.0)),
        dict(d=2, taus=(0.0,), volume=0.0),
        dict(d=2, taus=(float("nan"),)),
        dict(d=1.5, taus=(0.0,)),
    ],
)
def test_params_validation(kwargs):
    with pytest.raises(InvalidParams):
        ModelParams(**kwargs)


def test_params_lower_power_limit_is_open():
    ModelParams(d=2, taus=(-0.999,))
    with pytest.raises(InvalidParams):
        ModelParams(d=2, taus=(-1.0,))


def test_derived_scalars_natural():
    p = ModelParams.natural(3, RegimeSpec.supercritical())
    s = derive_scalars(p)
    assert list(s.a) == [2.0, 3.0, 4.0]
    assert list(s.x) == [1.0, 2.0, 3.0]
    # b = 9*16 + 4*16 + 4*9
    assert s.b == 244.0
    assert p.is_natural


def test_params_round_trip():
    p = ModelParams(d=3, taus=(-1.0, 0.5), volume=2.0, regime=RegimeSpec.critical(0.7))
    assert ModelParams.from_dict(p.to_dict()) == p


def test_limiting_regime():
    assert limiting_regime(1.0, 0.5, 2).kind == CRITICAL_LOW
    assert limiting_regime(2.0, 0.5, 2) == RegimeSpec.critical(4.0)
    assert limiting_regime(1.0, 1.0, 2).kind == SUBCRITICAL
    assert limiting_regime(1.0, 0.25, 2).kind == SUPERCRITICAL


def test_regime_of_schedule_hint():
    h = regime_of_schedule(100.0, 0.1, 2)
    assert h.product == pytest.approx(1.0)
    assert h.regime is None
    assert regime_of_schedule(100.0, 0.1, 2, alpha=0.5).regime.kind == CRITICAL_LOW
