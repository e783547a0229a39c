import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qflow import oracle, symfun
from qflow.symfun import ConeViolation, DomainError

lam_st = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.floats(-5, 5, allow_nan=False), min_size=n, max_size=n)
)


@pytest.mark.parametrize("lam,k,expected", [((1, 1, 1), 2, 3), ((1, 2, 3), 2, 11), ((1, 2, 3), 0, 1)])
def test_elementary_sym_examples(lam, k, expected):
    assert symfun.elementary_sym(lam, k) == expected


def test_elementary_sym_domain():
    for k in (-1, 4):
        with pytest.raises(DomainError):
            symfun.elementary_sym((1, 2, 3), k)
    with pytest.raises(DomainError):
        symfun.elementary_sym(np.ones(7), 2)
    with pytest.raises(DomainError):
        symfun.elementary_sym((1.0, np.nan), 1)


def test_elementary_sym_excl_examples():
    assert symfun.elementary_sym_excl((1, 2, 3), 1, [0]) == 5
    assert symfun.elementary_sym_excl((1, 2, 3), -1, [1]) == 0
    assert symfun.elementary_sym_excl((1, 2, 3), -2, [1, 2]) == 0
    assert symfun.elementary_sym_excl((4, 5), 0, [0]) == 1
    for bad in ([0, 0], [3], [-1]):
        with pytest.raises(DomainError):
            symfun.elementary_sym_excl((1, 2, 3), 1, bad)


def test_batched_matches_single(rng):
    lam = rng.normal(size=(4, 5, 3))
    batch = symfun.elementary_sym(lam, 2)
    assert batch.shape == (4, 5)
    assert batch[2, 3] == symfun.elementary_sym(lam[2, 3], 2)


@given(lam_st)
@settings(max_examples=300, deadline=None)
def test_oracle_equivalence(lam):
    scale = [oracle.sym_enum(np.abs(lam), k) for k in range(len(lam) + 1)]
    for k in range(len(lam) + 1):
        assert abs(symfun.elementary_sym(lam, k) - oracle.sym_enum(lam, k)) <= 1e-12 * max(scale[k], 1e-300)


@given(lam_st)
@settings(max_examples=300, deadline=None)
def test_exclusion_and_euler_identities(lam):
    n = len(lam)
    lam = np.array(lam)
    for k in range(1, n + 1):
        scale = 1e-12 * max(1.0, oracle.sym_enum(np.abs(lam), k))
        euler = sum(lam[i] * symfun.elementary_sym_excl(lam, k - 1, [i]) for i in range(n))
        assert abs(euler - k * symfun.elementary_sym(lam, k)) <= k * scale
        for i in range(n):
            split = symfun.elementary_sym_excl(lam, k, [i]) + lam[i] * symfun.elementary_sym_excl(lam, k - 1, [i])
            assert abs(split - symfun.elementary_sym(lam, k)) <= scale


def test_in_gamma_k_examples():
    assert symfun.in_gamma_k((1, 1, 1), 3)
    assert symfun.in_gamma_k((-1, 2, 3), 2)
    assert not symfun.in_gamma_k((-1, 2, 3), 3)
    # boundary values are excluded by the tolerance
    assert not symfun.in_gamma_k((1.0, -1.0 + 1e-15), 2)


def test_f_value_examples():
    assert symfun.f_value((1, 1, 1), 2, 1) == pytest.approx(0.0, abs=1e-15)
    assert symfun.f_value((2, 2), 2, 1) == pytest.approx(0.0, abs=1e-15)
    assert symfun.f_value((1, 2, 3), 3, 0) == pytest.approx(math.log(6), abs=1e-15)


def test_f_value_cone_violation_reports_level():
    with pytest.raises(ConeViolation) as exc:
        symfun.f_value((-1, 2, 3), 3, 1)
    assert exc.value.level == 3
    with pytest.raises(ConeViolation) as exc:
        symfun.f_value(np.array([[1, 1, 1], [-3, 1, 1]]), 2, 1)
    assert exc.value.level == 1 and exc.value.index == 1


def test_f_gradient_examples():
    np.testing.assert_allclose(symfun.f_gradient((1, 1, 1), 2, 1), [1 / 3] * 3, atol=1e-15)
    np.testing.assert_allclose(symfun.f_gradient((1, 1), 2, 0), [1, 1], atol=1e-15)


def test_f_pair_coefficient_examples():
    assert symfun.f_pair_coefficient((1, 1, 1), 2, 1, 0, 1) == pytest.approx(1 / 3, abs=1e-15)
    assert symfun.f_pair_coefficient((0.5, 2.0, 1.0), 1, 0, 0, 2) == 0.0
    assert symfun.f_pair_coefficient((1, 2, 3), 3, 1, 1, 2) == pytest.approx(1 / 6, abs=1e-15)
    with pytest.raises(DomainError):
        symfun.f_pair_coefficient((1, 2, 3), 3, 1, 1, 1)


def _cone_samples(rng, n, k, count):
    out = []
    while len(out) < count:
        lam = rng.uniform(-5, 5, size=n)
        if symfun.in_gamma_k(lam, k):
            out.append(lam)
    return np.array(out)


@pytest.mark.parametrize("n,k,l", [(2, 2, 1), (3, 2, 0), (3, 3, 1), (4, 3, 2), (6, 4, 2)])
def test_ellipticity_and_concavity(rng, n, k, l):
    lam = _cone_samples(rng, n, k, 400)
    assert np.all(symfun.f_gradient(lam, k, l) > 0)
    mu = lam[::-1]
    mid = symfun.f_value(0.5 * (lam + mu), k, l)
    assert np.all(mid >= 0.5 * (symfun.f_value(lam, k, l) + symfun.f_value(mu, k, l)) - 1e-10)


def test_cone_margin():
    # the strict-positivity tolerance keeps the margin slightly below 1
    assert symfun.cone_margin((1, 1, 1), 3) == pytest.approx(1.0, abs=1e-3)
    assert symfun.cone_margin((-1, 2, 3), 3) <= 0.0
    # shifting by the margin lands on the cone boundary
    m = symfun.cone_margin((-1, 2, 3), 2)
    assert symfun.elementary_sym(np.array((-1, 2, 3)) - m, 2) == pytest.approx(0.0, abs=1e-8)
