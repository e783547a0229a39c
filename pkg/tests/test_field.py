import math

import numpy as np
import pytest

from qflow import field, oracle
from qflow.field import TorusGeometry, TrigPolynomial

from conftest import random_hermitian


def sinsin(geom, eps=1.0):
    return geom.sample(TrigPolynomial.sin_sin(geom.n, eps))


def test_geometry_validation():
    for kwargs in ({"n": 4, "N": 8}, {"n": 2, "N": 6}, {"n": 2, "N": 9}, {"n": 2, "N": 8, "a": 0.0}):
        with pytest.raises(ValueError):
            TorusGeometry(**kwargs)
    steep = TrigPolynomial((((1, 0, 0, 0), 1.0, 0.0),))
    with pytest.raises(ValueError, match="Gamma_2"):
        TorusGeometry(2, 8, a=1.0, rho=steep, toy=True, k=2)
    with pytest.raises(ValueError, match="toy"):
        TorusGeometry(2, 8, rho=TrigPolynomial((((0, 0, 1, 0), 0.01, 0.0),)), toy=True)


def test_shapes():
    assert TorusGeometry(2, 8).shape == (8,) * 4
    assert TorusGeometry(3, 8, toy=True).shape == (8, 8)


def test_hessian_of_constant_is_zero(toy16):
    H = field.complex_hessian(toy16, np.full(toy16.shape, 3.0))
    assert np.all(H == 0)


def test_hessian_cos_mode():
    geom = TorusGeometry(2, 32, toy=True)
    eps = 0.1
    H = field.complex_hessian(geom, geom.sample(TrigPolynomial((((1, 0, 0, 0), eps, 0.0),))))
    assert H[0, 0, 0, 0].real == pytest.approx(-math.pi**2 * eps, rel=2 * (2 * math.pi * geom.h) ** 2)
    assert np.all(H[..., 1, :] == 0) and np.all(H[..., :, 1] == 0)


def test_hessian_full_grid_matches_oracle_stencil(rng):
    geom = TorusGeometry(2, 8)
    u = rng.normal(size=geom.shape)
    H = field.complex_hessian(geom, u)
    np.testing.assert_allclose(H, oracle._hessian(geom, u), atol=1e-10)
    np.testing.assert_allclose(H, np.conj(np.swapaxes(H, -1, -2)), atol=0)


def test_hessian_second_order():
    errors = []
    for N in (16, 32, 64):
        geom = TorusGeometry(2, N, toy=True)
        trig = TrigPolynomial.sin_sin(2, 1.0)
        exact = geom.sample_hessian(trig)
        np.testing.assert_allclose(exact[..., 0, 0].real, -2 * math.pi**2 * sinsin(geom), atol=1e-12)
        errors.append(np.max(np.abs(field.complex_hessian(geom, geom.sample(trig)) - exact)))
        assert np.max(np.abs(exact[..., 1, :])) == 0
    assert errors[0] / errors[1] >= 3.5 and errors[1] / errors[2] >= 3.5


def test_sin_sin_modes_are_exact(toy16):
    x, y = np.meshgrid(np.arange(16) / 16, np.arange(16) / 16, indexing="ij")
    np.testing.assert_allclose(sinsin(toy16, 0.05), 0.05 * np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y), atol=1e-16)


def test_chi_u(rng):
    rho = TrigPolynomial.sin_sin(2, 0.02)
    geom = TorusGeometry(2, 32, a=2.0, rho=rho, toy=True)
    u = rng.normal(size=geom.shape) * 1e-3
    # exact up to the rounding of one addition
    np.testing.assert_allclose(field.chi_u(geom, u) - geom.chi, field.complex_hessian(geom, u), rtol=0, atol=4 * np.finfo(float).eps * np.abs(geom.chi).max())
    cancel = field.chi_u(geom, -geom.sample(rho))
    assert np.max(np.abs(cancel - 2 * np.eye(2))) < 0.02 * 2 * math.pi**2 * 4 * (math.pi * geom.h) ** 2
    flat = TorusGeometry(2, 8, a=1.5, toy=True)
    np.testing.assert_array_equal(field.chi_u(flat, flat.zeros()), np.broadcast_to(1.5 * np.eye(2), flat.shape + (2, 2)))


def test_mixed_density_examples(rng):
    A, B = np.diag([1.0, 2.0]), np.diag([3.0, 4.0])
    assert field.mixed_density(A, B, 1, 1) == pytest.approx(5.0, rel=1e-14)
    X = random_hermitian(rng, 3)
    assert field.mixed_density(X, X, 1, 2) == pytest.approx(float(field.hermitian.wedge_ratio(X, 3)), rel=1e-12)
    assert field.mixed_density(X, A[:1, :1] * 0 + np.eye(3), 2, 0) == pytest.approx(float(field.hermitian.wedge_ratio(X, 2)))
    with pytest.raises(ValueError):
        field.mixed_density(X, X, 2, 2)


def test_mixed_density_symmetry_and_oracle(rng):
    for _ in range(30):
        n = int(rng.integers(2, 4))
        A, B = random_hermitian(rng, n), random_hermitian(rng, n)
        i = int(rng.integers(0, n + 1))
        j = int(rng.integers(0, n - i + 1))
        d = field.mixed_density(A, B, i, j)
        assert d == pytest.approx(field.mixed_density(B, A, j, i), abs=1e-11)
        assert d == pytest.approx(oracle.mixed_determinant(A, B, i, j), rel=1e-10, abs=1e-12)


def test_integrate_examples(toy16):
    geom = TorusGeometry(2, 16)
    ones = np.ones(geom.shape)
    assert field.integrate(geom, ones, ones) == pytest.approx(2.0, abs=1e-14)
    sinx = geom.sample(TrigPolynomial((((1, 0, 0, 0), 1.0, -math.pi / 2),)))
    assert abs(field.integrate(geom, sinx)) <= 1e-14
    with pytest.raises(ValueError):
        field.integrate(geom, np.ones(toy16.shape))
    with pytest.raises(ValueError):
        field.integrate(toy16, np.ones(toy16.shape), np.ones((4, 4)))


def test_discrete_integration_by_parts(rng, toy16):
    for geom in (toy16, TorusGeometry(2, 8)):
        u = rng.normal(size=geom.shape)
        assert abs(field.integrate(geom, field.laplacian(geom, u))) <= 1e-12 * np.max(np.abs(field.laplacian(geom, u)))


def test_cohomological_invariance(rng, toy16):
    base = [field.integrate(toy16, field.hermitian.wedge_ratio(toy16.chi, l)) for l in range(3)]
    for _ in range(5):
        modes = tuple(((int(rng.integers(-2, 3)), int(rng.integers(-2, 3)), 0, 0), 0.01 * rng.normal(), 0.0) for _ in range(3))
        u = toy16.sample(TrigPolynomial(modes))
        X = field.chi_u(toy16, u)
        for l in range(3):
            for i in range(l + 1):
                val = field.integrate(toy16, field.mixed_density(X, toy16.chi, i, l - i))
                assert val == pytest.approx(base[l], abs=1e-4)


def test_oscillation_examples():
    geom = TorusGeometry(2, 32, toy=True)
    assert field.oscillation(np.full((4, 4), 5.0)) == 0.0
    sinx = geom.sample(TrigPolynomial((((1, 0, 0, 0), 1.0, -math.pi / 2),)))
    assert field.oscillation(sinx) == pytest.approx(2.0, abs=(2 * math.pi * geom.h) ** 2)
    assert field.oscillation(np.array([1.0, 4.0, 1.0])) == 3.0


def test_snapshot_round_trip(tmp_path, rng):
    for geom in (TorusGeometry(2, 8, toy=True), TorusGeometry(2, 8)):
        u = rng.normal(size=geom.shape)
        path = tmp_path / "u.qf1"
        field.save_field(path, geom, u, "u_hat")
        header = path.read_bytes().split(b"\n", 1)[0].decode()
        assert header.startswith(f"QFLOW1 n=2 N=8 name=u_hat")
        assert ("toy=1" in header) == geom.toy
        assert path.stat().st_size == len(header) + 1 + 8 * u.size
        meta, back = field.load_field(path)
        assert meta == {"n": 2, "N": 8, "name": "u_hat", "toy": geom.toy}
        np.testing.assert_array_equal(back, u)


def test_snapshot_rejects_bad_files(tmp_path, toy16):
    bad = tmp_path / "bad.qf1"
    bad.write_bytes(b"NOTQF n=2 N=8 name=x\n" + bytes(8))
    with pytest.raises(ValueError):
        field.load_field(bad)
    bad.write_bytes(b"QFLOW1 n=2 N=8 name=x toy=1\n" + bytes(8 * 63))
    with pytest.raises(ValueError):
        field.load_field(bad)
    with pytest.raises(ValueError):
        field.save_field(tmp_path / "x.qf1", toy16, toy16.zeros(), "has space")
