from __future__ import annotations

from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

import oracle
from tdlab.analysis import nullspace
from tdlab.errors import UsageError
from tdlab.field import FieldConfig
from tdlab.linalg import Matrix
from tdlab.loopmod import ALL_KINDS, KIND_1, KIND_2, KIND_3, EvalFactor, ModuleSpec, build_evaluation, build_module
from tdlab.tdalg import (TModule, iota_t, phi_s, st_equivalents, theta_sequences, verify_a_relations,
                         verify_t_relations)

F = FieldConfig(2)
S = F.scalar


def module(kind, factors, lead=None):
    return build_module(ModuleSpec(kind, [EvalFactor(l, S(a)) for l, a in factors], lead), F)


def dense(m):
    return [[Fr(int(v.x.numerator), int(v.x.denominator)) for v in row] for row in m.to_dense()]


def test_phi_s_kind_00():
    rep = module(KIND_3, [(2, 3)])
    tm = phi_s(rep, S(5))
    alpha = F.constants.alpha
    assert tm.x == rep.e0p.scale(alpha * 5)
    assert tm.y == rep.e1p.scale(Fr(1, 5))


def test_phi_s_matches_oracle():
    factors = [(1, 2), (2, 3)]
    for kind in ALL_KINDS:
        eps, eps_star = kind.epsilon, kind.epsilon_star
        tm = phi_s(module(kind, factors), S(3))
        x, y, k = oracle.phi(oracle.module(factors, 2), 3, eps, eps_star, 2)
        assert (dense(tm.x), dense(tm.y), dense(tm.k)) == (x, y, k)


def test_k_on_lowest_vector():
    tm = phi_s(module(KIND_1, [(1, 2), (2, 5)]), S(3))
    assert tm.k[0, 0] == 3 * F.qpow(-3)


def test_x_on_v0():
    a, s = S(3), S(5)
    tm = phi_s(build_evaluation(EvalFactor(1, a), KIND_1), s)
    alpha = F.constants.alpha
    assert tm.x.apply({0: F.one}) == {1: alpha * 2 * (s * a + s.inverse())}


def test_zero_s_and_t_rejected():
    rep = module(KIND_1, [(1, 3)])
    with pytest.raises(UsageError):
        phi_s(rep, 0)
    with pytest.raises(UsageError):
        iota_t(phi_s(rep, 1), 0)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_t_and_a_relations(kind):
    for factors in ([(1, 3)], [(1, 2), (2, -1)], [(1, 5), (1, Fr(1, 2)), (1, 3)]):
        tm = phi_s(module(kind, factors), S(3))
        assert verify_t_relations(tm).passed
        assert verify_a_relations(iota_t(tm, S(5))).passed


def test_kind_00_right_sides_vanish():
    tm = phi_s(module(KIND_3, [(2, 3)]), S(2))
    report = verify_t_relations(tm)
    assert report.passed
    assert len(report.residuals) == 6


def test_corrupted_k_is_detected():
    tm = phi_s(module(KIND_1, [(2, 3)]), S(2))
    bad_k = tm.k + Matrix.from_entries(3, 3, [(1, 1, 1)], F)
    report = verify_t_relations(tm.replace(k=bad_k))
    assert not report.get("k x k^-1 = q^2 x").passed


def test_swapping_a_and_a_star_breaks_kind_10():
    tm = phi_s(module(KIND_2, [(1, 3), (1, 5)]), S(3))
    c = iota_t(tm, S(5))
    swapped = type(c)(c.A_star, c.A, c.t, c.parent)
    report = verify_a_relations(swapped)
    assert not report.passed


def test_iota_kind_00():
    tm = phi_s(module(KIND_3, [(1, 3)]), S(2))
    c = iota_t(tm, S(5))
    assert c.A_star == tm.y + tm.k_inv.scale(5)
    assert c.b == 10 and c.b_star == Fr(2, 5)


def test_a_minus_theta_is_x_on_weight_space():
    tm = phi_s(module(KIND_1, [(1, 2), (1, 5)]), S(3))
    c = iota_t(tm, S(7))
    th = theta_sequences(S(3), S(7), tm.d, KIND_1, F)
    for idx, w in enumerate(tm.weights):
        v = {idx: F.one}
        lhs = c.A.apply(v)
        lhs = {j: val for j, val in lhs.items()}
        lhs[idx] = lhs.get(idx, F.zero) - th.theta[w]
        lhs = {j: val for j, val in lhs.items() if val}
        assert lhs == tm.x.apply(v)


def test_theta_d1_eigenvalues():
    tm = phi_s(build_evaluation(EvalFactor(1, S(3)), KIND_1), S(2))
    c = iota_t(tm, S(5))
    th = theta_sequences(S(2), S(5), 1, KIND_1, F)
    for theta in th.theta:
        assert len(nullspace(c.A - Matrix.identity(2, F).scale(theta))) == 1


def test_theta_closed_form_examples():
    th = theta_sequences(S(1), S(2), 3, KIND_1, F)
    assert not th.theta_distinct and th.consistent
    th = theta_sequences(S(1), S(3), 3, KIND_1, F)
    assert th.theta_distinct and th.theta_distinct_pairwise
    assert th.theta == [3 * F.qpow(2 * i - 3) + F.qpow(3 - 2 * i) / 3 for i in range(4)]
    for kind in (KIND_3,):
        assert theta_sequences(S(1), S(2), 3, kind, F).theta_distinct


@settings(max_examples=120, deadline=None)
@given(st.sampled_from(ALL_KINDS), st.sampled_from([1, 2, 3, 4, Fr(1, 2), Fr(1, 4), -2, -1, Fr(-1, 8), 5]),
       st.sampled_from([1, 2, 8, Fr(1, 2), -4, 3, Fr(1, 3), 16]), st.integers(0, 6))
def test_theta_closed_form_matches_pairwise(kind, s, t, d):
    assert theta_sequences(S(s), S(t), d, kind, F).consistent


def test_st_equivalents():
    s, t = S(3), S(5)
    assert len(st_equivalents(s, t, KIND_1)) == 8
    assert len(st_equivalents(s, t, KIND_2)) == 4
    assert st_equivalents(s, t, KIND_3) == [(s, t), (-s, -t)]
    # every equivalent pair gives the same {b, b^-1} x {b*, b*^-1} up to sign
    for s2, t2 in st_equivalents(s, t, KIND_1):
        assert {s2 * t2, (s2 * t2).inverse()} <= {S(15), S(Fr(1, 15))}
