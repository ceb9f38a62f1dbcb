import pytest

from rgg_spectra import ModelParams, RegimeSpec
from rgg_spectra.closed_forms import cross_cholesky_relation, cross_lu_relation
from rgg_spectra.closed_forms.cross_regime import cholesky_multiplier, lu_multiplier
from rgg_spectra.errors import InvalidParams, NaturalPowersOnly, WrongRegime

NS = range(2, 9)
CS = [0.3, 1.0, 2.5]


@pytest.mark.parametrize("n", NS)
@pytest.mark.parametrize("c", CS)
def test_lu_relation_natural(n, c):
    rep = cross_lu_relation(ModelParams.natural(n, RegimeSpec.critical(c)))
    assert rep.source == "closed_form"
    assert rep.holds, rep.residuals
    assert not rep.expected_failure


@pytest.mark.parametrize("n", NS)
@pytest.mark.parametrize("c", CS)
def test_cholesky_first_column_natural(n, c):
    rep = cross_cholesky_relation(ModelParams.natural(n, RegimeSpec.critical(c)))
    for key in ("first_column_ratio_v", "first_column_closed_v", "v_agree", "columns_rest_scaled"):
        assert rep.passed(key), (key, rep.residuals[key])
    assert rep.scalars["v"] == pytest.approx(cholesky_multiplier(c, c > 1))


@pytest.mark.parametrize("c", [0.3, 1.0])
def test_cholesky_other_columns_unchanged_low_branch(c):
    rep = cross_cholesky_relation(ModelParams.natural(5, RegimeSpec.critical(c)))
    assert rep.passed("columns_rest_equal")
    assert rep.holds


def test_cholesky_other_columns_rescale_high_branch():
    rep = cross_cholesky_relation(ModelParams.natural(5, RegimeSpec.critical(2.5)))
    assert not rep.passed("columns_rest_equal")
    assert rep.passed("columns_rest_scaled")


def test_multipliers():
    assert lu_multiplier(1.0, False) == pytest.approx(1 + 2 * 3.141592653589793)
    assert lu_multiplier(2.0, True) == pytest.approx((1 + 4 * 3.141592653589793) / 2)
    assert cholesky_multiplier(2.0, True) ** 2 == pytest.approx(lu_multiplier(2.0, True))


def test_non_natural_probe_breaks_relation():
    p = ModelParams(d=2, taus=(1.0, 3.0, 5.0), regime=RegimeSpec.critical(1.0))
    with pytest.raises(NaturalPowersOnly):
        cross_lu_relation(p)
    rep = cross_lu_relation(p, probe=True)
    assert rep.source == "oracle"
    assert rep.expected_failure
    assert not rep.holds
    assert rep.residuals["L_equal"] > 1e-3
    assert not cross_cholesky_relation(p, probe=True).holds


def test_relation_preconditions():
    with pytest.raises(WrongRegime):
        cross_lu_relation(ModelParams.natural(3, RegimeSpec.subcritical()))
    with pytest.raises(InvalidParams):
        cross_lu_relation(ModelParams.natural(1, RegimeSpec.critical(1.0)))


def test_report_serializes():
    d = cross_lu_relation(ModelParams.natural(3, RegimeSpec.critical(0.3))).to_dict()
    assert d["holds"] and d["source"] == "closed_form"
    assert set(d["passed"]) == set(d["residuals"])
