import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from rgg_spectra import ModelParams, RegimeSpec

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def frozen_oracles():
    return json.loads((DATA / "frozen_oracles.json").read_text())["cases"]


def regimes():
    return st.one_of(
        st.just(RegimeSpec.subcritical()),
        st.just(RegimeSpec.supercritical()),
        st.floats(0.05, 5.0).map(RegimeSpec.critical),
    )


@st.composite
def model_params(draw, n_min=1, n_max=6, regime=None, min_gap=0.25):
    d = draw(st.integers(1, 3))
    n = draw(st.integers(n_min, n_max))
    start = -d / 2 + draw(st.floats(0.05, 1.5))
    gaps = draw(st.lists(st.floats(min_gap, 2.5), min_size=n - 1, max_size=n - 1))
    taus = tuple(np.concatenate([[start], start + np.cumsum(gaps)]).tolist())
    volume = draw(st.floats(0.25, 4.0))
    reg = draw(regimes()) if regime is None else draw(regime)
    return ModelParams(d=d, taus=taus, volume=volume, regime=reg)


@st.composite
def spd_matrices(draw, n_max=6):
    n = draw(st.integers(1, n_max))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    B = rng.normal(size=(n, n))
    return B @ B.T + n * np.eye(n)


# acceptance bookkeeping: one summary line per criterion at the end of the run
_ACCEPTANCE: dict[str, list[tuple[bool, str]]] = {}


@pytest.fixture
def acceptance():
    def record(criterion: str, ok: bool, detail: str = "") -> bool:
        _ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))
        line = f"{criterion} {'PASS' if ok else 'FAIL'} {detail}".rstrip()
        print(line)
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_ACCEPTANCE):
        parts = _ACCEPTANCE[criterion]
        ok = all(p for p, _ in parts)
        failing = "; ".join(d for p, d in parts if not p)
        detail = failing if failing else "; ".join(d for _, d in parts if d)
        terminalreporter.write_line(f"{criterion} {'PASS' if ok else 'FAIL'}  {detail}")
