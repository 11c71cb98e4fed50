import math

import numpy as np
import pytest

from fkstates import model
from fkstates.action import action_eval, eigen_sym, gradient, hessian, morse_index
from fkstates.configspace import Configuration, config, translate
from fkstates.model import GeneratingModel, PotentialSpec, potential_eval

PI = math.pi
ex4 = model.example4()
zero = model.standard(0)

# Hessian of example4 at (0, 0.5), derived from the symbolic curvatures -1.98 pi, -1.38 pi
H_EX4 = np.array([[2 - 1.98 * PI, -2.0], [-2.0, 2 - 1.38 * PI]])


def random_model(rng):
    return GeneratingModel(PotentialSpec(tuple(
        (k, c) for k, c in zip(range(1, 4), rng.uniform(-0.1, 0.1, 3)))))


def random_config(rng):
    q = int(rng.integers(1, 6))
    p = int(rng.choice([k for k in range(-2, 4) if math.gcd(abs(k), q) == 1]))
    return Configuration(p, q, np.arange(q) * p / q + rng.normal(scale=0.3, size=q))


def test_action_examples():
    assert action_eval(zero, config(1, [0, 0])) == 0.5
    assert action_eval(zero, config(1, [0, 0.5])) == 0.25
    U = ex4.potential
    expect = 0.25 + potential_eval(U, 0.0) + potential_eval(U, 0.5)
    c = dict(U.harmonics)
    assert expect == pytest.approx(0.25 + sum(c.values()) + (-c[1] + c[2] - c[3]), abs=1e-15)
    assert action_eval(ex4, config(1, [0, 0.5])) == pytest.approx(expect, abs=1e-15)


def test_gradient_examples():
    np.testing.assert_allclose(gradient(zero, config(1, [0, 0.3])), [0.4, -0.4], atol=1e-15)
    np.testing.assert_allclose(gradient(ex4, config(1, [0, 0.5])), [0, 0], atol=1e-15)
    for eps in (0.5, 1, 12):
        np.testing.assert_allclose(gradient(model.standard(eps), config(1, [0, 0.5])), 0, atol=1e-15)


def test_hessian_examples():
    np.testing.assert_array_equal(hessian(zero, config(1, [0.1, 0.7])), [[2, -2], [-2, 2]])
    np.testing.assert_array_equal(hessian(zero, config(1, [0, 0.3, 0.6])),
                                  [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])
    H = hessian(ex4, config(1, [0, 0.5]))
    np.testing.assert_allclose(H, H_EX4, atol=1e-12)
    np.testing.assert_allclose(H, [[-4.22035, -2], [-2, -2.33540]], atol=1e-5)
    # q = 1 folds both couplings onto the diagonal
    H1 = hessian(ex4, config(3, [0.0]))
    assert H1.shape == (1, 1)
    assert H1[0, 0] == pytest.approx(potential_eval(ex4.potential, 0.0, 2), abs=1e-12)


def test_eigen_examples():
    w, V = eigen_sym([[2, -2], [-2, 2]])
    np.testing.assert_allclose(w, [0, 4], atol=1e-12)
    w, _ = eigen_sym([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])
    np.testing.assert_allclose(w, [0, 3, 3], atol=1e-12)
    w, _ = eigen_sym([[-10, -2], [-2, 14]])
    np.testing.assert_allclose(w, [2 - math.sqrt(148), 2 + math.sqrt(148)], atol=1e-12)
    np.testing.assert_allclose(w, [-10.16552, 14.16552], atol=1e-5)
    with pytest.raises(ValueError):
        eigen_sym([[1, 2], [0, 1]])


def test_eigen_reconstruction():
    rng = np.random.default_rng(6)
    for _ in range(20):
        n = int(rng.integers(1, 30))
        A = rng.normal(size=(n, n))
        M = A + A.T
        w, V = eigen_sym(M)
        assert np.all(np.diff(w) >= 0)
        np.testing.assert_allclose(V.T @ V, np.eye(n), atol=1e-10)
        assert np.max(np.abs(M - V @ np.diag(w) @ V.T)) < 1e-9


def test_morse_examples():
    np.testing.assert_array_equal(hessian(model.standard(1), config(1, [0, 0.5])), [[1, -2], [-2, 3]])
    assert morse_index(model.standard(1), config(1, [0, 0.5])) == (1, False)
    # both eigenvalues negative: trace < 0 and det > 0
    assert np.trace(H_EX4) < 0
    # det = (2 - 1.98 pi)(2 - 1.38 pi) - 4 = 2.7324 pi^2 - 6.72 pi
    assert np.linalg.det(H_EX4) == pytest.approx(2.7324 * PI**2 - 6.72 * PI, abs=1e-12)
    assert np.linalg.det(H_EX4) == pytest.approx(5.8562, abs=1e-4)
    assert morse_index(ex4, config(1, [0, 0.5])) == (2, False)
    assert morse_index(zero, config(1, [0.2, 0.7]))[1] is True


def test_gradient_finite_difference():
    rng = np.random.default_rng(7)
    delta = 1e-5
    for _ in range(100):
        m, c = random_model(rng), random_config(rng)
        g = gradient(m, c)
        fd = np.empty(c.q)
        for k in range(c.q):
            e = np.zeros(c.q)
            e[k] = delta
            fd[k] = (action_eval(m, c.with_coords(c.coords + e))
                     - action_eval(m, c.with_coords(c.coords - e))) / (2 * delta)
        assert np.max(np.abs(fd - g)) < 1e-6


def test_hessian_finite_difference():
    rng = np.random.default_rng(8)
    delta = 1e-5
    for _ in range(100):
        m, c = random_model(rng), random_config(rng)
        H = hessian(m, c)
        assert np.max(np.abs(H - H.T)) <= 1e-12
        fd = np.empty((c.q, c.q))
        for k in range(c.q):
            e = np.zeros(c.q)
            e[k] = delta
            fd[:, k] = (gradient(m, c.with_coords(c.coords + e))
                        - gradient(m, c.with_coords(c.coords - e))) / (2 * delta)
        assert np.max(np.abs(fd - H)) < 1e-5


def test_translation_invariance():
    rng = np.random.default_rng(9)
    for _ in range(50):
        m, c = random_model(rng), random_config(rng)
        i, j = (int(v) for v in rng.integers(-4, 5, 2))
        t = translate(c, i, j)
        assert action_eval(m, t) == pytest.approx(action_eval(m, c), abs=1e-10)
        np.testing.assert_allclose(gradient(m, t), np.roll(gradient(m, c), -i), atol=1e-10)


@pytest.mark.parametrize("q", [2, 3, 4, 7])
def test_cooperative_couplings(q):
    rng = np.random.default_rng(q)
    H = -hessian(model.threeharmonic(1.2), Configuration(1, q, rng.uniform(0, 1, q)))
    off = H - np.diag(np.diag(H))
    if q == 2:
        assert off[0, 1] == off[1, 0] == 2.0
    else:
        nz = off[off != 0]
        assert nz.size == 2 * q and np.all(nz > 0)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_flat_spectrum(q):
    w, _ = eigen_sym(hessian(zero, Configuration(1, q, np.arange(q) / q)))
    expect = np.sort(2 - 2 * np.cos(2 * PI * np.arange(q) / q))
    np.testing.assert_allclose(w, expect, atol=1e-10)
