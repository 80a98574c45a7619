import numpy as np
import pytest

from maxmargin.data import Dataset
from maxmargin.losses import (
    exponential_loss,
    grad_psi,
    grad_risk,
    logistic_loss,
    psi,
    risk,
)
from maxmargin.synth import separable_dataset

EXP = exponential_loss()


def bisect_root(f, lo, hi, iters=200):
    """Scalar bisection; independent oracle for inverse-loss values."""
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) * flo <= 0:
            hi = mid
        else:
            lo = mid
            flo = f(lo)
    return 0.5 * (lo + hi)


class TestPsi:
    def test_exp_two_zeros(self):
        assert psi(np.zeros(2), EXP) == pytest.approx(np.log(2))

    def test_exp_singleton_identity(self):
        for c in (-5.0, 0.3, 12.0):
            assert psi(np.array([c]), EXP) == pytest.approx(c, abs=1e-12)

    def test_logistic_two_zeros_against_root_finding(self):
        # psi solves ell(z) = 2 ln 2 for the logistic ell
        target = 2 * np.log(2)
        root = bisect_root(lambda z: np.log1p(np.exp(z)) - target, -10, 10)
        value = psi(np.zeros(2), logistic_loss(2))
        assert value == pytest.approx(root, abs=1e-9)
        assert value == pytest.approx(np.log(3))

    def test_exp_bounds_vs_max(self):
        rng = np.random.default_rng(0)
        for n in (1, 2, 5, 9):
            xi = rng.standard_normal(n) * 4
            value = psi(xi, EXP)
            assert value >= xi.max()
            assert value <= xi.max() + np.log(n) + 1e-12

    def test_extreme_negative_scores_stay_finite(self):
        for loss in (EXP, logistic_loss(3)):
            xi = np.array([-1e9, -2e9, -3e9])
            value = psi(xi, loss)
            assert np.isfinite(value)
            q = grad_psi(xi, loss)
            assert np.all(np.isfinite(q))
            assert q.sum() == pytest.approx(1.0, abs=1e-9)


class TestGradPsi:
    def test_uniform_softmax(self):
        assert np.allclose(grad_psi(np.zeros(2), EXP), [0.5, 0.5])

    def test_softmax_of_known_ratio(self):
        q = grad_psi(np.array([np.log(3), 0.0]), EXP)
        assert np.allclose(q, [0.75, 0.25])

    @pytest.mark.parametrize("loss", [EXP, logistic_loss(5)], ids=["exp", "logistic"])
    def test_matches_finite_differences(self, loss):
        rng = np.random.default_rng(42)
        step = 1e-5
        for _ in range(20):
            n = rng.integers(2, 11)
            bound = logistic_loss(int(n)) if loss.kind == "logistic" else EXP
            xi = rng.standard_normal(n) * 2
            grad = grad_psi(xi, bound)
            for i in range(n):
                left, right = xi.copy(), xi.copy()
                left[i] -= step
                right[i] += step
                fd = (psi(right, bound) - psi(left, bound)) / (2 * step)
                assert grad[i] == pytest.approx(fd, rel=1e-6, abs=1e-9)

    def test_strictly_positive(self):
        rng = np.random.default_rng(1)
        for loss in (EXP, logistic_loss(7)):
            for _ in range(30):
                xi = rng.standard_normal(7) * 6
                assert np.all(grad_psi(xi, loss) > 0)

    def test_l1_norms(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            xi = rng.standard_normal(6) * 3
            assert np.abs(grad_psi(xi, EXP)).sum() == pytest.approx(1.0, abs=1e-12)
            assert np.abs(grad_psi(xi, logistic_loss(6))).sum() >= 1.0 - 1e-12


class TestRisk:
    def test_exp_at_zero(self):
        ds = separable_dataset(8, 3, seed=1)
        assert risk(np.zeros(3), ds, EXP) == pytest.approx(1.0)

    def test_logistic_at_zero(self):
        ds = separable_dataset(8, 3, seed=1)
        assert risk(np.zeros(3), ds, logistic_loss(8)) == pytest.approx(np.log(2))

    def test_single_term(self):
        ds = Dataset(z=np.array([[-1.0, 0.0]]))
        assert risk(np.array([1.0, 0.0]), ds, EXP) == pytest.approx(np.exp(-1))

    def test_exp_gradient_identity(self):
        # Z^T grad_psi(Zw) * risk(w) reproduces grad risk entrywise
        rng = np.random.default_rng(3)
        ds = separable_dataset(10, 4, seed=2)
        for _ in range(20):
            w = rng.standard_normal(4) * 2
            lhs = ds.z.T @ grad_psi(ds.z @ w, EXP) * risk(w, ds, EXP)
            rhs = grad_risk(w, ds, EXP)
            assert np.allclose(lhs, rhs, atol=1e-10)
