"""Gowers norms on Z/NZ and on intervals [N], approximation lemmas as
numeric checks, and arithmetic progression counts."""

from __future__ import annotations

import os
import time
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np
from sympy import isprime, nextprime

DEFAULT_BUDGET = 2 ** 34


class BudgetExceeded(RuntimeError):
    pass


def budget():
    return int(os.environ.get("AUTOGOWERS_BUDGET", DEFAULT_BUDGET))


def check_budget(ops, force=False):
    if not force and ops > budget():
        raise BudgetExceeded(f"{ops} operations exceeds budget {budget()} (use --force)")


@dataclass
class SequenceWindow:
    values: np.ndarray
    source: object = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)

    @property
    def N(self):
        return len(self.values)

    @property
    def bounded(self):
        return bool(np.all(np.abs(self.values) <= 1 + 1e-12))

    @classmethod
    def from_sequence(cls, a, N):
        return cls(np.array([a.eval(n) for n in range(N)], dtype=complex), a)


@dataclass
class NormResult:
    d: int
    N: int
    Ntilde: int
    value: float
    method: str
    power: complex = None
    seconds: float = field(default=0.0, compare=False)

    def csv_row(self):
        return f"{self.method},{self.d},{self.N},{self.Ntilde},{self.value:.15g},{self.seconds:.4f}"


CSV_HEADER = "method,d,N,Ntilde,value,seconds"


def least_prime(n):
    """The least prime strictly larger than n."""
    return int(nextprime(n))


def ntilde(N, d):
    return least_prime(2 * d * N)


def _root(power, d):
    if abs(power.imag) > 1e-9 * max(1.0, abs(power.real)):
        raise ArithmeticError(f"Gowers average has imaginary part {power.imag}")
    return max(power.real, 0.0) ** (1.0 / 2 ** d)


# ---------------------------------------------------------------- cyclic

def _cyclic_power(f, d):
    """E_{x,h} prod_w C^{|w|} f(x + w.h) on Z/NZ by successive derivatives."""
    if d == 1:
        m = f.mean()
        return m * np.conj(m)
    N = len(f)
    total = 0j
    for h in range(N):
        total += _cyclic_power(f * np.conj(np.roll(f, -h)), d - 1)
    return total / N


def gowers_norm_cyclic(f, d, force=False):
    f = np.asarray(f, dtype=complex)
    if d < 1:
        raise ValueError("d must be at least 1")
    check_budget(len(f) ** (d + 1), force)
    return _root(complex(_cyclic_power(f, d)), d)


def gowers_u2_fourier(f):
    """(sum_xi |f^(xi)|^4)^(1/4) with f^(xi) = E f(x) e(-x xi / N)."""
    fh = np.fft.fft(np.asarray(f, dtype=complex)) / len(f)
    return float(np.sum(np.abs(fh) ** 4)) ** 0.25


# ---------------------------------------------------------------- intervals

def _interval_sum(F, d):
    """sum over n in Pi(N) of prod_w C^{|w|} F(1w.n), F supported on [N].

    n_0 = x and n_1..n_d are the differences; the last difference is summed
    in closed form as |sum G|^2.
    """
    if d == 0:
        return F.sum()
    if d == 1:
        s = F.sum()
        return s * np.conj(s)
    N = len(F)
    total = 0j
    for h in range(-(N - 1), N):
        if h >= 0:
            G = F[: N - h] * np.conj(F[h:])
        else:
            G = F[-h:] * np.conj(F[: N + h])
        if G.any():
            total += _interval_sum(G, d - 1)
    return total


def _pi_count_table(N, d):
    """c_d(n) for n <= N from c_d(n) = c_{d-1}(n) + 2 sum_{j<n} c_{d-1}(j)."""
    c = list(range(N + 1))
    for _ in range(d):
        prefix = 0
        nxt = [0] * (N + 1)
        for n in range(1, N + 1):
            nxt[n] = c[n] + 2 * prefix
            prefix += c[n]
        c = nxt
    return c


def pi_count(N, d):
    """|Pi(N)| = #{n in Z^{d+1} : 1w.n in [N] for every w}, exact.

    Summing out the last difference gives the recursion in _pi_count_table,
    so |Pi(N)| is a polynomial of degree d + 1 in N; large N are handled by
    exact Lagrange interpolation through the first d + 2 values.
    """
    if N <= 0:
        return 0
    if N <= 4096:
        return _pi_count_table(N, d)[N]
    ys = _pi_count_table(d + 1, d)
    total = Fraction(0)
    for i, yi in enumerate(ys):
        term = Fraction(yi)
        for j in range(len(ys)):
            if j != i:
                term *= Fraction(N - j, i - j)
        total += term
    assert total.denominator == 1
    return int(total)


def gowers_norm_interval(f, d, method="naive", force=False):
    """||f||_{U^d[N]}: naive sums over Pi(N); fft2 uses the Fourier identity
    on Z/Ntilde Z (d = 2 only)."""
    win = f if isinstance(f, SequenceWindow) else SequenceWindow(f)
    F = win.values
    N = win.N
    Nt = ntilde(N, d)
    t0 = time.perf_counter()
    if method == "naive":
        check_budget(N ** (d + 1), force)
        power = complex(_interval_sum(F, d)) / pi_count(N, d)
    elif method == "fft2":
        if d != 2:
            raise ValueError("fft2 is only available for d = 2")
        g = np.zeros(Nt, dtype=complex)
        g[:N] = F
        one = np.zeros(Nt)
        one[:N] = 1
        num = np.sum(np.abs(np.fft.fft(g)) ** 4)
        den = np.sum(np.abs(np.fft.fft(one)) ** 4)
        power = complex(num / den)
    else:
        raise ValueError(f"unknown method {method!r}")
    return NormResult(d, N, Nt, _root(power, d), method, power, time.perf_counter() - t0)


def lp_norm(f, p):
    f = np.asarray(f, dtype=complex)
    return float(np.mean(np.abs(f) ** p)) ** (1.0 / p)


def p_d(d):
    return 2 ** d / (d + 1)


def alpha_d(d):
    return (d + 1) / (2 ** (d - 1) + d - 1)


# ---------------------------------------------------------------- approximation lemmas

def progression_indicator(N, a, q, length):
    """1_P on Z/NZ for P = {a + q j : 0 <= j < length}."""
    ind = np.zeros(N)
    ind[(a + q * np.arange(length)) % N] = 1
    return ind


def smooth_approx(N, P, q, eta, p=2):
    """Smoothed indicator f = 1_P * (N/K) 1_{q[K]}, K = max(floor(eta N / 2), 1).

    P is the indicator array of a progression with common difference q.
    Returns (f, report) with the L^p error, the Fourier l^1 norm and the
    constant C = ||f^||_1 * eta^(1/2).
    """
    if not isprime(N):
        raise ValueError("N must be prime")
    if not 0 < eta <= 1:
        raise ValueError("eta must lie in (0, 1]")
    P = np.asarray(P, dtype=float)
    K = max(int(eta * N // 2), 1)
    f = np.zeros(N)
    for j in range(K):
        f += np.roll(P, q * j)
    f /= K
    fhat_l1 = float(np.sum(np.abs(np.fft.fft(f) / N)))
    err = lp_norm(f - P, p)
    report = {
        "K": K,
        "lp_error": err,
        "lp_bound": eta ** (1.0 / p),
        "fourier_l1": fhat_l1,
        "C": fhat_l1 * eta ** 0.5,
    }
    return f, report


def restriction_check(f, P, d, method="naive", force=False):
    """(||f 1_P||, ||f||, ratio ||f 1_P|| / ||f||^alpha_d) on [N]."""
    f = np.asarray(f, dtype=complex)
    lhs = gowers_norm_interval(f * np.asarray(P), d, method, force).value
    rhs = gowers_norm_interval(f, d, method, force).value
    ratio = lhs / rhs ** alpha_d(d) if rhs > 0 else (0.0 if lhs == 0 else float("inf"))
    return lhs, rhs, ratio


def skewed_progression_average(fs, P):
    """|E_{n,m in [N]} prod_i (1_[N] f_i)(n + i m) 1_P(m)|."""
    fs = [np.asarray(f, dtype=complex) for f in fs]
    N = len(fs[0])
    P = np.asarray(P)
    total = 0j
    for m in np.flatnonzero(P[:N]):
        span = N - (len(fs) - 1) * m
        if span <= 0:
            continue
        prod = np.ones(span, dtype=complex)
        for i, f in enumerate(fs):
            prod *= f[i * m : i * m + span]
        total += prod.sum()
    return abs(total) / N ** 2


# ---------------------------------------------------------------- progressions

def ap_count(A, l, m):
    """#{x : x, x+m, ..., x+(l-1)m all in A}, A a boolean array on [N]."""
    A = np.asarray(A, dtype=bool)
    N = len(A)
    span = N - (l - 1) * m
    if span <= 0:
        return 0
    ok = A[:span].copy()
    for i in range(1, l):
        ok &= A[i * m : i * m + span]
    return int(ok.sum())


def many_ap_check(A, N, l, eps):
    """Count m in [N] with ap_count(A, l, m) >= (alpha^l - eps) N."""
    A = np.asarray(A[:N], dtype=bool)
    alpha = A.sum() / N
    threshold = (alpha ** l - eps) * N
    good = sum(1 for m in range(N) if ap_count(A, l, m) >= threshold)
    return good, good / N


def ap_exponent_fit(A, N, l, eps_grid):
    """Fit fraction ~ eps^C over the eps grid; returns (C, fractions)."""
    fracs = [many_ap_check(A, N, l, e)[1] for e in eps_grid]
    xs = np.log(np.asarray(eps_grid, dtype=float))
    ys = np.log(np.maximum(fracs, 1e-300))
    slope = np.polyfit(xs, ys, 1)[0]
    return float(slope), fracs


def periodic_correlation(f, P_max, N=None):
    """max over q <= P_max and residues r of |mean_{n<N, n = r mod q} f(n)|."""
    f = np.asarray(f, dtype=complex)
    if N is not None:
        f = f[:N]
    best = 0.0
    for q in range(1, P_max + 1):
        for r in range(min(q, len(f))):
            best = max(best, abs(f[r::q].mean()))
    return best
