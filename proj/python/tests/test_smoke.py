import numpy as np
import pytest

import vpgrad


def random_complex(rng, *shape):
    return rng.uniform(-1, 1, shape) + 1j * rng.uniform(-1, 1, shape)


def test_mgs_orthonormal():
    rng = np.random.default_rng(1)
    b = random_complex(rng, 30, 5)
    q, norms = vpgrad.mgs(b)
    assert q.shape == (30, 5)
    assert np.allclose(q.conj().T @ q, np.eye(5), atol=1e-12)
    assert np.all(norms > 0)


def test_objective_matches_numpy_projection():
    rng = np.random.default_rng(2)
    a = random_complex(rng, 20, 6)
    b = random_complex(rng, 20, 3)
    q, _ = np.linalg.qr(b)
    expected = np.linalg.norm(a - q @ (q.conj().T @ a))
    assert vpgrad.objective(a, b) == pytest.approx(expected, rel=1e-10)


def test_gradient_routes_agree():
    rng = np.random.default_rng(3)
    a = random_complex(rng, 12, 4)
    b = random_complex(rng, 12, 3)
    amgs = vpgrad.gradient(a, b)
    fd = vpgrad.gradient(a, b, method="fd")
    assert np.max(np.abs(amgs["g"] - fd["g"])) <= 1e-6 * np.max(np.abs(fd["g"]))
    assert amgs["words"] == vpgrad.account_words("amgs", 12, 4, 3) == 4 * 12 * 3 + 3


def test_gradient_directional_derivative():
    rng = np.random.default_rng(4)
    a = random_complex(rng, 10, 5)
    b = random_complex(rng, 10, 2)
    d = random_complex(rng, 10, 2)
    g = vpgrad.gradient(a, b)["g"]
    h = 1e-6
    fd = (vpgrad.objective(a, b + h * d) - vpgrad.objective(a, b - h * d)) / (2 * h)
    assert np.real(np.vdot(g, d)) == pytest.approx(fd, rel=1e-6)


def test_recover_c_is_least_squares():
    rng = np.random.default_rng(5)
    a = random_complex(rng, 15, 4)
    b = random_complex(rng, 15, 3)
    c = vpgrad.recover_c(a, b)
    ch, *_ = np.linalg.lstsq(b, a, rcond=None)
    assert np.allclose(c, ch.conj().T, atol=1e-10)


def test_kronecker_build_order():
    b = vpgrad.build("kronecker", 2, 1, [1, 2, 3, 4])
    assert np.array_equal(b[:, 0], np.array([3, 4, 6, 8], dtype=complex))


def test_planted_solve():
    inst = vpgrad.generate("kronecker", seed=3, base_n=2, pairs=2, noise=0.0)
    rep = vpgrad.solve("kronecker", 2, 2, inst["a"], inst["sigma0"])
    assert rep["termination"] in ("GradTol", "ObjectiveNearZero")
    assert rep["final_f"] <= 1e-8 * np.linalg.norm(inst["a"])
    assert len(rep["f_history"]) == rep["iterations"] + 1


def test_errors_map_to_python():
    b = np.array([[1, 2], [2, 4], [3, 6]], dtype=complex)
    with pytest.raises(vpgrad.RankDeficient):
        vpgrad.mgs(b)
    with pytest.raises(vpgrad.ObjectiveNearZero):
        vpgrad.gradient(b[:, :1], b[:, :1])
    with pytest.raises(ValueError):
        vpgrad.gradient(b, b[:2, :1])
