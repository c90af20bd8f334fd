import numpy as np
import pytest

import coxred


def test_chisq_quantile():
    assert coxred.chisq_quantile(1, 0.95) == pytest.approx(3.841459, abs=1e-6)
    assert coxred.chisq_cdf(2, coxred.chisq_quantile(2, 0.9)) == pytest.approx(0.9)


def test_generate_noise_free():
    y, x, theta = coxred.generate(50, 8, 2, signal=1.5, sigma=0.0, seed=3)
    assert x.shape == (50, 8)
    np.testing.assert_allclose(y, x @ theta, atol=1e-10)
    np.testing.assert_allclose(x.mean(axis=0), 0.0, atol=1e-12)


def test_wald_matches_least_squares():
    y, x, _ = coxred.generate(80, 4, 2, seed=1)
    stats, pvals, sigma = coxred.wald(y, x)
    beta, *_ = np.linalg.lstsq(x, y, rcond=None)
    resid = y - x @ beta
    s = np.sqrt(resid @ resid / (80 - 4))
    se = s * np.sqrt(np.diag(np.linalg.inv(x.T @ x)))
    np.testing.assert_allclose(stats, beta / se, rtol=1e-8)
    assert sigma == pytest.approx(s)
    assert all(0.0 <= p <= 1.0 for p in pvals)


def test_lrt_known_sigma():
    y, x, _ = coxred.generate(60, 3, 3, seed=2)
    w, df = coxred.lrt(y, x, x[:, :1], sigma=1.0)
    full = y - x @ np.linalg.lstsq(x, y, rcond=None)[0]
    sub = y - x[:, :1] @ np.linalg.lstsq(x[:, :1], y, rcond=None)[0]
    assert df == 2
    assert w == pytest.approx(sub @ sub - full @ full)


def test_reduce_then_confidence_set():
    y, x, _ = coxred.generate(200, 64, 3, signal=1.0, seed=4)
    red = coxred.cox_reduce(y, x, seed=9, rerandomisations=3)
    assert {0, 1, 2} <= set(red["comprehensive"])
    assert len(red["runs"]) == 3
    mcs = coxred.build_confidence_set(y, x, red["comprehensive"][:6], s_max=3)
    assert mcs["tested"] == len(mcs["models"])
    assert mcs["accepted_count"] == sum(m["accepted"] for m in mcs["models"])


def test_threads_do_not_change_reduction():
    y, x, _ = coxred.generate(150, 64, 3, seed=5)
    a = coxred.cox_reduce(y, x, seed=1, rerandomisations=2, threads=1)
    b = coxred.cox_reduce(y, x, seed=1, rerandomisations=2, threads=4)
    assert a == b


def test_comparators():
    y, x, _ = coxred.generate(100, 20, 2, signal=2.0, seed=6)
    assert set(coxred.marginal_screen(y, x, 2)) == {0, 1}
    coef, gap = coxred.lasso(y, x, coxred.lambda_max(y, x) * 1.01)
    assert np.all(coef == 0.0)
    support, lam, exhausted = coxred.lasso_undertuned_support(y, x, 5)
    assert len(support) >= 5 and not exhausted and lam > 0


def test_errors_map_to_classes():
    y, x, _ = coxred.generate(40, 30, 2, seed=7)
    with pytest.raises(coxred.BudgetExceeded):
        coxred.build_confidence_set(y, x, list(range(30)), s_max=10, budget=100)
    with pytest.raises(coxred.ConfigError):
        coxred.cox_reduce(y, x, alpha=2.0)
    assert issubclass(coxred.ConfigError, coxred.CoxredError)
