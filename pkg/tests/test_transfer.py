from fractions import Fraction

import numpy as np
import pytest

from autogowers import fixtures
from autogowers import groups as grp
from autogowers.decompose import decompose
from autogowers.gowers import gowers_norm_interval, pi_count
from autogowers.transfer import (
    CountingTransfer,
    OperatorTransfer,
    counting_identity,
    decay_fit,
    dp_decay,
    frobenius_perron_check,
    gowers_norm_dp,
    norm_matrix_decay,
)


def _naive(a, d, L):
    N = a.k ** L
    f = np.array([complex(a.eval(n)) for n in range(N)])
    return gowers_norm_interval(f, d).value


@pytest.mark.parametrize("a", [fixtures.thue_morse(signed=True), fixtures.rudin_shapiro()],
                         ids=["tm", "rs"])
def test_dp_matches_naive(a):
    for d, Ls in ((1, range(2, 7)), (2, range(3, 7)), (3, range(2, 4))):
        for L in Ls:
            assert abs(gowers_norm_dp(a, d, L).value - _naive(a, d, L)) < 1e-9


def test_dp_matches_naive_base3():
    a = fixtures.length_mod(2, 3).with_outputs([1, 1, -1])
    for L in (2, 3, 4):
        assert abs(gowers_norm_dp(a, 2, L).value - _naive(a, 2, L)) < 1e-9


def test_dp_on_rational_outputs():
    D = decompose(fixtures.example_1_5())
    for L in (3, 5):
        assert abs(gowers_norm_dp(D.a_uni, 2, L).value - _naive(D.a_uni, 2, L)) < 1e-9


def test_counting_identity():
    a = fixtures.thue_morse()
    for d in (1, 2, 3):
        for L in (1, 4, 7):
            total, pi = counting_identity(a, d, L)
            assert total == pi


def test_counting_transfer_totals():
    ct = CountingTransfer(fixtures.example_1_5_gea(), 2)
    for L in (1, 2, 3, 5):
        assert ct.pi_total(L) == pi_count(2 ** L, 2)
    W = ct.W(1)
    assert all(isinstance(x, Fraction) for x in W.flat)


def test_operator_blocks_match_direct_sum():
    T = fixtures.rudin_shapiro_gea()
    rho = grp.builtin_rep("sign", T.group)
    op = OperatorTransfer(T, rho, 1)
    for l in (1, 2, 3):
        Ml = op.M(l)
        for i in range(len(op.objects)):
            for j in range(len(op.objects)):
                assert np.allclose(op.block(Ml, i, j), op.direct_block(i, j, l))
    assert np.allclose(op.A(4), op.A_recursive(4))


def test_norm_matrix_decay_sign_vs_trivial():
    T = fixtures.rudin_shapiro_gea()
    sign = norm_matrix_decay(T, grp.builtin_rep("sign", T.group), 2, 10, 4)
    triv = norm_matrix_decay(T, grp.builtin_rep("trivial", T.group), 2, 10, 4)
    assert sign["submultiplicative"] and triv["submultiplicative"]
    assert sign["gamma"] < 0.9
    assert sign["gamma"] < triv["gamma"]


def test_frobenius_perron_examples():
    W = np.array([[0.5, 0.5], [0.0, 1.0]])
    M = np.array([[0.5, 0.5], [0.0, 0.9]])
    rep = frobenius_perron_check(W, M)
    assert rep["spectral_radius"] == pytest.approx(1.0)
    assert rep["basic_classes"] == [[1]]
    assert rep["gamma"] == pytest.approx(0.9, abs=1e-6)
    zero = frobenius_perron_check(W, np.zeros((2, 2)))
    assert zero["gamma"] == 0
    with pytest.raises(ValueError):
        frobenius_perron_check(np.array([[2.0]]), np.eye(1))


def test_decay_fit_recovers_exponent():
    Ls = list(range(4, 12))
    vals = [3.0 * 2.0 ** (-0.3 * L) for L in Ls]
    fit = decay_fit(vals, Ls, 2)
    assert fit.c == pytest.approx(0.3) and fit.r2 == pytest.approx(1.0)
    with pytest.raises(ValueError):
        decay_fit(vals[:3], Ls[:3], 2)


def test_thue_morse_decays():
    fit = dp_decay(fixtures.thue_morse(signed=True), 2, range(6, 13))
    assert fit.c > 0.05 and fit.r2 > 0.9
