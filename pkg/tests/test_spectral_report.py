import json
import time

import numpy as np
import pytest

from rgg_spectra import ModelParams, RegimeSpec
from rgg_spectra.spectral_report import (
    ERROR,
    FAIL,
    NA,
    PASS,
    XFAIL,
    XPASS,
    build_dossier,
    list_checks,
    random_params,
)


def statuses(dossier):
    return {c.name: c.status for c in dossier.checks}


def test_supercritical_three_powers_dossier():
    p = ModelParams(d=2, taus=(0.0, 1.0, 2.0), regime=RegimeSpec.supercritical())
    dos = build_dossier(p)
    assert dos.ok, dos.to_text()
    assert dos.scalars["rank"] == 1
    st = statuses(dos)
    assert st["sp_schur_row_index"] == XFAIL
    assert st["sb_det"] == NA and st["cr_det"] == NA
    assert st["positive_definite"] == NA


def test_critical_two_powers_per_index():
    dos = build_dossier(ModelParams(d=2, taus=(0.0, 1.0), regime=RegimeSpec.critical(1.0)))
    assert dos.ok, dos.to_text()
    per = [c for c in dos.checks if c.name.startswith("cr_eigen_bounds.per_index")]
    assert per and all(c.status == PASS for c in per)


@pytest.mark.parametrize("kind", ["subcritical", "critical_low", "critical_high"])
def test_random_six_powers(kind):
    regime = {
        "subcritical": RegimeSpec.subcritical(),
        "critical_low": RegimeSpec.critical(0.6),
        "critical_high": RegimeSpec.critical(3.0),
    }[kind]
    p = ModelParams(d=3, taus=(-1.2, -0.4, 0.5, 1.1, 2.0, 3.3), volume=1.4, regime=regime)
    dos = build_dossier(p)
    assert dos.ok, dos.to_text()
    assert dos.scalars["rank"] == 6


def test_natural_checks_need_natural_powers():
    dos = build_dossier(ModelParams(d=2, taus=(1.0, 3.0, 5.0), regime=RegimeSpec.critical(1.0)))
    cr = dos.check("cr_lu_natural")
    assert cr.status == NA and "0..n-1" in cr.detail
    assert dos.check("sb_eigenvalues_2").status == NA


def test_high_branch_literal_columns_is_expected_failure():
    dos = build_dossier(ModelParams.natural(4, RegimeSpec.critical(2.5)))
    st = statuses(dos)
    assert st["cross_cholesky_other_columns"] == XFAIL
    assert st["cross_cholesky_other_columns_scaled"] == PASS
    assert dos.ok


def test_include_filter_and_bad_tolerance():
    p = ModelParams.natural(3, RegimeSpec.subcritical())
    dos = build_dossier(p, include=["sb_det", "psd"])
    assert {c.name.split(".")[0] for c in dos.checks} == {"sb_det", "psd"}
    with pytest.raises(ValueError):
        build_dossier(p, base_rel=-1.0)


def test_tiny_tolerance_reports_failures():
    p = ModelParams(d=3, taus=(-1.2, -0.4, 0.5, 1.1, 2.0, 3.3), regime=RegimeSpec.subcritical())
    dos = build_dossier(p, base_rel=1e-30)
    assert not dos.ok
    assert all(c.status in (FAIL, PASS, NA, XFAIL, XPASS) for c in dos.checks)
    assert "check(s) failed" in dos.to_text()


def test_dossier_serializes():
    dos = build_dossier(ModelParams.natural(3, RegimeSpec.critical(1.0)))
    d = json.loads(json.dumps(dos.to_dict(), default=float))
    assert d["ok"]
    assert np.allclose(d["matrices"]["sigma"], dos.matrices["sigma"])
    assert "matrices" not in dos.to_dict(include_matrices=False)


def test_registry_lists_checks():
    names = [n for n, _, _ in list_checks()]
    assert len(names) == len(set(names))
    assert {"sb_det", "sp_root", "cr_inverse", "cross_lu"} <= set(names)


def test_random_sweep_small():
    rng = np.random.default_rng(11)
    for _ in range(30):
        p = random_params(rng)
        dos = build_dossier(p)
        assert dos.ok, dos.to_text()
        assert not any(c.status == ERROR for c in dos.checks)


def test_dossier_is_fast():
    p = ModelParams(d=2, taus=tuple(np.arange(8) * 0.7), regime=RegimeSpec.critical(2.0))
    build_dossier(p)
    t0 = time.perf_counter()
    build_dossier(p)
    assert time.perf_counter() - t0 < 1.0
