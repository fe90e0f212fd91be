"""Tests for the Kalman recursion and its maxitive (possibility) twin."""

import math

import numpy as np
import pytest

from sigmamax.gaussian import (
    InnovationRecord,
    LinearGaussianModel,
    StateEstimate,
    gaussian_possibility,
    kf_predict,
    kf_update,
    pdf_to_possibility_1d,
    poss_predict,
    poss_update,
)


def model_1d(F=1.0, G=1.0, Q=1.0, R=1.0, H=1.0):
    return LinearGaussianModel([[F]], [[G]], [[H]], [[Q]], [[R]])


def random_model(rng, n, m=None):
    m = m or max(1, n - 1)
    F = rng.normal(size=(n, n)) * 0.5 + np.eye(n)
    G = rng.normal(size=(n, n))
    A = rng.normal(size=(n, n))
    Q = A @ A.T + 0.1 * np.eye(n)
    H = rng.normal(size=(m, n))
    B = rng.normal(size=(m, m))
    R = B @ B.T + 0.1 * np.eye(m)
    return LinearGaussianModel(F, G, H, Q, R)


def random_estimate(rng, n):
    mean = rng.normal(size=n) * 10
    A = rng.normal(size=(n, n))
    return StateEstimate(mean, A @ A.T + 0.5 * np.eye(n))


# independent straight-line moment recursion, inv-based on purpose
def predict_oracle(mean, cov, model):
    return model.F @ mean, model.F @ cov @ model.F.T + model.G @ model.Q @ model.G.T


def update_oracle(mean, cov, z, model):
    H = model.H
    S = H @ cov @ H.T + model.R
    W = cov @ H.T @ np.linalg.inv(S)
    resid = z - H @ mean
    post_mean = mean + W @ resid
    post_cov = cov - W @ S @ W.T
    d = len(z)
    loglik = (-0.5 * d * math.log(2 * math.pi)
              - 0.5 * math.log(np.linalg.det(S))
              - 0.5 * resid @ np.linalg.inv(S) @ resid)
    return post_mean, post_cov, loglik


class TestTypes:
    def test_covariance_must_be_symmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            StateEstimate([0.0, 0.0], [[1.0, 0.5], [0.2, 1.0]])

    def test_covariance_must_be_psd(self):
        with pytest.raises(ValueError, match="semi-definite"):
            StateEstimate([0.0], [[-1.0]])

    def test_model_requires_positive_definite_r(self):
        with pytest.raises(ValueError, match="positive definite"):
            model_1d(R=0.0)

    def test_model_dimension_checks(self):
        with pytest.raises(ValueError):
            LinearGaussianModel(np.eye(2), np.eye(2), [[1.0, 0.0]], np.eye(3), [[1.0]])


class TestKalmanPredict:
    def test_identity_dynamics_no_noise(self):
        est = StateEstimate([1.0, -2.0], np.diag([3.0, 4.0]))
        model = LinearGaussianModel(np.eye(2), np.eye(2), np.eye(2),
                                    np.zeros((2, 2)), np.eye(2))
        out = kf_predict(est, model)
        assert out.mean == pytest.approx(est.mean, abs=0)
        assert out.cov == pytest.approx(est.cov, abs=0)

    def test_identity_dynamics_adds_process_noise(self):
        est = StateEstimate([0.0, 0.0], np.eye(2))
        model = LinearGaussianModel(np.eye(2), np.eye(2), np.eye(2),
                                    0.7 * np.eye(2), np.eye(2))
        out = kf_predict(est, model)
        assert out.cov == pytest.approx(1.7 * np.eye(2), abs=1e-15)

    def test_scalar_hand_case(self):
        out = kf_predict(StateEstimate([2.0], [[1.0]]), model_1d(Q=0.5))
        assert out.mean == pytest.approx([2.0], abs=0)
        assert out.cov == pytest.approx(np.array([[1.5]]), abs=0)


class TestKalmanUpdate:
    def test_confirming_measurement_tightens(self):
        pred = StateEstimate([1.0, 2.0], np.eye(2))
        model = LinearGaussianModel(np.eye(2), np.eye(2), np.eye(2),
                                    np.eye(2), 1e-10 * np.eye(2))
        post, rec = kf_update(pred, [1.0, 2.0], model)
        assert post.mean == pytest.approx(pred.mean, abs=1e-9)
        assert np.abs(post.cov).max() < 1e-9
        assert rec.residual == pytest.approx([0.0, 0.0], abs=0)

    def test_zero_prior_variance_ignores_measurement(self):
        post, rec = kf_update(StateEstimate([3.0], [[0.0]]), [10.0], model_1d(R=2.0))
        assert rec.gain == pytest.approx(np.array([[0.0]]), abs=0)
        assert post.mean == pytest.approx([3.0], abs=0)
        assert post.cov == pytest.approx(np.array([[0.0]]), abs=0)

    def test_scalar_hand_case(self):
        post, rec = kf_update(StateEstimate([0.0], [[2.0]]), [4.0], model_1d(R=2.0))
        assert rec.gain == pytest.approx(np.array([[0.5]]), abs=1e-15)
        assert post.mean == pytest.approx([2.0], abs=1e-15)
        assert post.cov == pytest.approx(np.array([[1.0]]), abs=1e-15)

    def test_degenerate_innovation_covariance(self):
        bad_pred = StateEstimate([0.0], [[-3.0]], validate=False)
        with pytest.raises(np.linalg.LinAlgError, match="degenerate innovation"):
            kf_update(bad_pred, [0.0], model_1d(R=1.0))

    def test_joseph_form_identity(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            n = int(rng.integers(1, 7))
            model = random_model(rng, n)
            pred = random_estimate(rng, n)
            z = rng.normal(size=model.measurement_dim)
            post, rec = kf_update(pred, z, model)
            I_WH = np.eye(n) - rec.gain @ model.H
            joseph = I_WH @ pred.cov @ I_WH.T + rec.gain @ model.R @ rec.gain.T
            scale = max(np.abs(joseph).max(), 1.0)
            assert np.abs(post.cov - joseph).max() <= 1e-9 * scale

    def test_posterior_never_exceeds_prior_in_loewner_order(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            n = int(rng.integers(1, 7))
            model = random_model(rng, n)
            pred = random_estimate(rng, n)
            z = rng.normal(size=model.measurement_dim)
            post, _ = kf_update(pred, z, model)
            gap = np.linalg.eigvalsh(pred.cov - post.cov)
            assert gap.min() >= -1e-9 * np.trace(pred.cov)

    def test_log_likelihood_matches_direct_formula_1d_2d(self):
        rng = np.random.default_rng(5)
        for n, m in [(1, 1), (3, 2)]:
            for _ in range(20):
                model = random_model(rng, n, m)
                pred = random_estimate(rng, n)
                z = rng.normal(size=m) * 5
                _, rec = kf_update(pred, z, model)
                _, _, want = update_oracle(pred.mean, pred.cov, z, model)
                assert rec.log_likelihood == pytest.approx(want, abs=1e-9)


class TestGaussianPossibility:
    def test_peak_at_mean(self):
        assert gaussian_possibility([1.0, 2.0], [1.0, 2.0], np.eye(2)) == 1.0

    def test_one_sigma_point(self):
        val = gaussian_possibility([3.0], [1.0], [[4.0]])  # x - mu = sigma = 2
        assert val == pytest.approx(math.exp(-0.5), abs=1e-15)

    def test_two_dim_quadratic_form(self):
        cov = np.array([[2.0, 0.5], [0.5, 1.0]])
        x = np.array([1.0, -1.0])
        mu = np.array([0.0, 0.0])
        want = math.exp(-0.5 * x @ np.linalg.inv(cov) @ x)
        assert gaussian_possibility(x, mu, cov) == pytest.approx(want, abs=1e-12)

    def test_rotation_invariance(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            n = int(rng.integers(2, 6))
            rot, _ = np.linalg.qr(rng.normal(size=(n, n)))
            x = rng.normal(size=n)
            mu = rng.normal(size=n)
            A = rng.normal(size=(n, n))
            cov = A @ A.T + 0.2 * np.eye(n)
            base = gaussian_possibility(x, mu, cov)
            rotated = gaussian_possibility(rot @ x, rot @ mu, rot @ cov @ rot.T)
            assert rotated == pytest.approx(base, abs=1e-12)

    def test_singular_covariance_rejected(self):
        with pytest.raises(np.linalg.LinAlgError):
            gaussian_possibility([0.0, 0.0], [0.0, 0.0], np.zeros((2, 2)))


class TestMaxitiveRecursion:
    """The maxitive predict/update must move the exact Kalman moments."""

    def test_prediction_examples_match_kalman(self):
        cases = [
            (StateEstimate([1.0, -2.0], np.diag([3.0, 4.0])),
             LinearGaussianModel(np.eye(2), np.eye(2), np.eye(2), np.zeros((2, 2)), np.eye(2))),
            (StateEstimate([0.0], [[1.0]]), model_1d(Q=0.5)),
        ]
        for est, model in cases:
            kf = kf_predict(est, model)
            mx = poss_predict(est, model)
            assert np.array_equal(mx.mean, kf.mean)
            assert np.array_equal(mx.cov, kf.cov)

    def test_update_examples_match_kalman(self):
        pred = StateEstimate([0.0], [[2.0]])
        kf, _ = kf_update(pred, [4.0], model_1d(R=2.0))
        mx = poss_update(pred, [4.0], model_1d(R=2.0))
        assert np.array_equal(mx.mean, kf.mean)
        assert np.array_equal(mx.cov, kf.cov)

    def test_randomized_equivalence_and_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(1, 10))
            model = random_model(rng, n)
            est = random_estimate(rng, n)
            z = rng.normal(size=model.measurement_dim) * 3

            kf_p = kf_predict(est, model)
            mx_p = poss_predict(est, model)
            assert np.array_equal(mx_p.mean, kf_p.mean)
            assert np.array_equal(mx_p.cov, kf_p.cov)
            want_mean, want_cov = predict_oracle(est.mean, est.cov, model)
            assert mx_p.mean == pytest.approx(want_mean, rel=1e-9, abs=1e-9)
            assert mx_p.cov == pytest.approx(want_cov, rel=1e-9, abs=1e-9)

            kf_u, _ = kf_update(kf_p, z, model)
            mx_u = poss_update(mx_p, z, model)
            assert np.array_equal(mx_u.mean, kf_u.mean)
            assert np.array_equal(mx_u.cov, kf_u.cov)
            want_mean, want_cov, _ = update_oracle(kf_p.mean, kf_p.cov, z, model)
            assert mx_u.mean == pytest.approx(want_mean, rel=1e-8, abs=1e-8)
            assert mx_u.cov == pytest.approx(want_cov, rel=1e-8, abs=1e-8)


class TestPdfToPossibility:
    def test_standard_normal_peaks_at_zero(self):
        grid = np.linspace(-5, 5, 1001)
        density = np.exp(-0.5 * grid**2) / math.sqrt(2 * math.pi)
        out = pdf_to_possibility_1d(grid, density)
        assert out.max() == 1.0
        assert grid[np.argmax(out)] == pytest.approx(0.0, abs=1e-12)

    def test_constant_density_all_ones(self):
        out = pdf_to_possibility_1d(np.linspace(0, 1, 11), np.full(11, 0.37))
        assert out == pytest.approx(np.ones(11), abs=0)

    def test_bimodal_mixture_pointwise_ratio(self):
        grid = np.linspace(-6, 6, 601)
        density = 0.4 * np.exp(-0.5 * (grid + 2) ** 2) + 0.6 * np.exp(-0.5 * (grid - 2) ** 2)
        out = pdf_to_possibility_1d(grid, density)
        assert out == pytest.approx(density / density.max(), abs=0)

    def test_zero_density_rejected(self):
        with pytest.raises(ValueError):
            pdf_to_possibility_1d(np.arange(3.0), np.zeros(3))
