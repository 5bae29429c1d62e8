import itertools

import numpy as np
import pytest
from sympy import isprime

from autogowers import fixtures
from autogowers.gowers import (
    BudgetExceeded,
    alpha_d,
    ap_count,
    gowers_norm_cyclic,
    gowers_norm_interval,
    gowers_u2_fourier,
    lp_norm,
    many_ap_check,
    ntilde,
    p_d,
    periodic_correlation,
    pi_count,
    progression_indicator,
    restriction_check,
    skewed_progression_average,
    smooth_approx,
)
from autogowers.cube import vertices


def _cyclic_brute(f, d):
    N = len(f)
    total = 0j
    for x in range(N):
        for h in itertools.product(range(N), repeat=d):
            p = 1 + 0j
            for w in vertices(d):
                v = f[(x + sum(wi * hi for wi, hi in zip(w, h))) % N]
                p *= np.conj(v) if sum(w) % 2 else v
            total += p
    return max((total / N ** (d + 1)).real, 0.0) ** (1 / 2 ** d)


def _pi_brute(N, d):
    count = 0
    for n in itertools.product(range(-(N - 1), N), repeat=d + 1):
        if all(0 <= n[0] + sum(wi * ni for wi, ni in zip(w, n[1:])) < N for w in vertices(d)):
            count += 1
    return count


def _interval_brute(f, d):
    N = len(f)
    total = 0j
    for n in itertools.product(range(-(N - 1), N), repeat=d + 1):
        xs = [n[0] + sum(wi * ni for wi, ni in zip(w, n[1:])) for w in vertices(d)]
        if all(0 <= x < N for x in xs):
            p = 1 + 0j
            for w, x in zip(vertices(d), xs):
                p *= np.conj(f[x]) if sum(w) % 2 else f[x]
            total += p
    return max((total / _pi_brute(N, d)).real, 0.0) ** (1 / 2 ** d)


def test_cyclic_against_brute():
    rng = np.random.default_rng(1)
    for d in (1, 2, 3):
        f = rng.normal(size=7) + 1j * rng.normal(size=7)
        assert abs(gowers_norm_cyclic(f, d) - _cyclic_brute(f, d)) < 1e-9


def test_pi_count_against_brute():
    for d in (1, 2, 3):
        for N in (1, 2, 3, 5, 7):
            assert pi_count(N, d) == _pi_brute(N, d)
    # the interpolated branch agrees with the table
    from autogowers.gowers import _pi_count_table
    assert pi_count(5000, 2) == _pi_count_table(5000, 2)[5000]


def test_interval_against_brute():
    rng = np.random.default_rng(2)
    for d, N in ((1, 9), (2, 8), (3, 5)):
        f = rng.normal(size=N) + 1j * rng.normal(size=N)
        assert abs(gowers_norm_interval(f, d).value - _interval_brute(f, d)) < 1e-9


def test_fft2_matches_naive():
    tm = fixtures.thue_morse(signed=True)
    f = np.array([tm.eval(n) for n in range(64)], dtype=complex)
    a = gowers_norm_interval(f, 2, "naive").value
    b = gowers_norm_interval(f, 2, "fft2").value
    assert abs(a - b) < 1e-9
    with pytest.raises(ValueError):
        gowers_norm_interval(f, 3, "fft2")


def test_ntilde_is_least_prime_above():
    for N, d in ((10, 2), (64, 3), (1, 1)):
        p = ntilde(N, d)
        assert isprime(p) and p > 2 * d * N
        assert not any(isprime(q) for q in range(2 * d * N + 1, p))


def test_u2_fourier_identity():
    rng = np.random.default_rng(3)
    f = rng.normal(size=11) + 1j * rng.normal(size=11)
    assert abs(gowers_u2_fourier(f) - gowers_norm_cyclic(f, 2)) < 1e-9


def test_phase_and_constants():
    N = 13
    x = np.arange(N)
    quad = np.exp(2j * np.pi * 3 * x * x / N)
    assert abs(gowers_norm_cyclic(quad, 3) - 1) < 1e-9
    assert p_d(2) == 4 / 3
    assert alpha_d(2) == 1.0
    assert alpha_d(3) == 4 / 6


def test_budget(monkeypatch):
    monkeypatch.setenv("AUTOGOWERS_BUDGET", "100")
    with pytest.raises(BudgetExceeded):
        gowers_norm_interval(np.ones(50), 2)
    assert gowers_norm_interval(np.ones(50), 2, force=True).value == pytest.approx(1.0)


def test_smooth_approx_bounds():
    P = progression_indicator(101, 5, 7, 30)
    for eta in (0.3, 0.1, 0.03):
        for p in (1, 2, 4):
            f, rep = smooth_approx(101, P, 7, eta, p)
            assert rep["lp_error"] <= rep["lp_bound"]
            assert rep["fourier_l1"] <= 2 * eta ** -0.5
    with pytest.raises(ValueError):
        smooth_approx(100, P[:100], 7, 0.1)


def test_restriction_and_skewed_average_run():
    rng = np.random.default_rng(4)
    f = np.exp(2j * np.pi * rng.random(24))
    P = progression_indicator(24, 1, 3, 6)
    lhs, rhs, ratio = restriction_check(f, P, 2)
    assert 0 <= lhs <= 1 and 0 < rhs <= 1 and ratio >= 0
    ones = np.ones(16)
    # with all f = 1 the average counts (n, m) with n + 2m < N, m in P
    P = np.zeros(16)
    P[[1, 2]] = 1
    expect = (16 - 2) + (16 - 4)
    assert skewed_progression_average([ones, ones, ones], P) == pytest.approx(expect / 256)


def test_ap_counts_against_brute():
    rng = np.random.default_rng(5)
    A = rng.random(200) < 0.4
    for l, m in ((3, 0), (3, 7), (4, 11), (2, 150)):
        brute = sum(1 for x in range(200) if all(x + i * m < 200 and A[x + i * m] for i in range(l)))
        assert ap_count(A, l, m) == brute
    good, frac = many_ap_check(A, 200, 3, 0.05)
    assert 0 <= frac <= 1 and good == round(frac * 200)


def test_lp_and_periodic_correlation():
    assert lp_norm([3, 4], 2) == pytest.approx((12.5) ** 0.5)
    alt = np.array([(-1) ** n for n in range(100)])
    assert periodic_correlation(alt, 2) == pytest.approx(1.0)
    assert periodic_correlation(alt, 1) == pytest.approx(0.0)


@pytest.mark.parametrize("seed", range(10))
def test_norm_axioms_quick(seed):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(5, 12))
    f = rng.normal(size=N) + 1j * rng.normal(size=N)
    g = rng.normal(size=N) + 1j * rng.normal(size=N)
    for d in (2, 3):
        nf, ng_, nfg = (gowers_norm_cyclic(x, d) for x in (f, g, f + g))
        assert nfg <= nf + ng_ + 1e-9
        assert abs(gowers_norm_cyclic(2.5 * f, d) - 2.5 * nf) < 1e-9
        assert gowers_norm_cyclic(f, d - 1) <= nf + 1e-9
