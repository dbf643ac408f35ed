import numpy as np
import pytest

from allmach.stability import (amp_naive, amp_staggered, max_amp_staggered,
                               naive_margin, naive_threshold, stability_map,
                               xi_grid)


def test_amp_naive_limits():
    assert abs(amp_naive(0.3, 0.0) - 1.0) < 1e-15
    xi = xi_grid()
    assert np.max(np.abs(np.abs(amp_naive(0.0, xi)) - np.abs(np.cos(xi / 2)))) < 1e-14


def test_margin_sign_change_at_half():
    xi = np.linspace(-np.pi, np.pi, 10000)
    assert float(np.min(naive_margin(0.5, xi))) >= -1e-12
    assert float(np.min(naive_margin(0.51, xi))) < 0.0


def test_margin_consistent_with_modulus():
    # F >= 0 exactly when |rho| <= 1
    xi = xi_grid(513)
    for c in (0.2, 0.5, 0.8, 2.0):
        mod = np.abs(amp_naive(c, xi)) ** 2 - 1.0
        marg = naive_margin(c, xi)
        denom = 1.0 + c ** 2 * np.sin(xi) ** 2
        assert np.max(np.abs(mod * denom + marg)) < 1e-12


def test_amp_staggered_values_and_bound():
    assert amp_staggered(1.0, np.pi) < 1e-30
    assert abs(amp_staggered(1.0, 0.0) - 1.0) < 1e-15
    for c in (0.1, 1.0, 10.0, 100.0):
        assert max_amp_staggered(c) <= 1.0 + 1e-14


def test_threshold_bisection():
    c_star = naive_threshold()
    assert abs(c_star - 0.5) <= 1e-3
    with pytest.raises(ValueError):
        naive_threshold(0.6, 0.9)


def test_stability_map_rows():
    rows = stability_map([])
    assert rows == []
    rows = stability_map([0.25, 0.75])
    assert len(rows) == 2
    assert rows[0][1] <= 1.0 + 1e-12      # stable below threshold
    assert rows[1][1] > 1.0               # unstable above
    assert all(r[2] <= 1.0 + 1e-12 for r in rows)
