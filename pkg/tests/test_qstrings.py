from __future__ import annotations

import random
from collections import Counter
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from tdlab.analysis import drinfeld_closed_form
from tdlab.errors import FieldExtensionError, MultisetError, RealizationError
from tdlab.field import FieldConfig
from tdlab.loopmod import KIND_1, KIND_2, KIND_3, EvalFactor, ModuleSpec
from tdlab.qstrings import (DIAMETER, GENERAL_POSITION, T_EXCLUDED, THETA_DISTINCT, TYPE_EXCLUDED, QString,
                            QStringMultiset, ScalarMultiset, adjacent, adjacent_by_union, classify_module,
                            decompose, decompose_symmetric, equivalent, general_position, realize_polynomial,
                            strongly_general_position)

F = FieldConfig(2)
S = F.scalar
q = F.q_scalar
BASES = [S(1), S(3), S(-1), S(5), S(Fr(1, 3)), S(-3)]


def qs(ell, a):
    return QString(ell, S(a))


def test_elements():
    assert qs(3, 5).elements() == [S(Fr(5, 4)), S(5), S(20)]
    assert qs(2, 1).elements() == [S(Fr(1, 2)), S(2)]
    assert qs(4, 3).contains(S(3) * F.qpow(3)) and not qs(4, 3).contains(S(3) * F.qpow(2))


def test_adjacent_examples():
    assert adjacent(QString(1, q), QString(1, q.inverse()))
    assert not adjacent(qs(2, 3), qs(2, 3))
    assert not adjacent(qs(1, 1), qs(1, 3))
    assert adjacent(qs(2, 4), qs(1, 32))  # {2, 8} and {32}
    assert not adjacent(qs(3, 1), qs(1, 1))


def test_general_position_examples():
    assert general_position([]) and general_position([qs(2, 3)])
    assert general_position([qs(3, 5), qs(1, 5)])
    assert not general_position([QString(1, q), QString(1, q.inverse())])


def test_strong_position_examples():
    assert not strongly_general_position([QString(1, q), QString(1, q)])
    assert strongly_general_position([qs(2, 5), qs(2, 5)])
    assert general_position([QString(1, q), QString(1, q)])


def test_equivalent_examples():
    m = [qs(2, 3), qs(1, 5)]
    assert equivalent(m, list(reversed(m)))
    assert equivalent([qs(2, 3)], [qs(2, Fr(1, 3))])
    assert not equivalent([qs(1, 3)], [qs(2, 3)])
    assert not equivalent([qs(1, 3), qs(1, 3)], [qs(1, 3), qs(1, 5)])


def test_decompose_examples():
    assert decompose(qs(3, 5).elements()) == QStringMultiset([qs(3, 5)])
    assert decompose([q, q.inverse()]) == QStringMultiset([qs(2, 1)])
    assert decompose([S(7), S(7)]) == QStringMultiset([qs(1, 7), qs(1, 7)])
    assert decompose([]) == QStringMultiset()


def test_decompose_symmetric_examples():
    assert decompose_symmetric([q, q.inverse()]) == QStringMultiset([QString(1, q)])
    assert decompose_symmetric([S(-1), S(-1)]) == QStringMultiset([qs(1, -1)])
    with pytest.raises(MultisetError):
        decompose_symmetric([S(2)])
    with pytest.raises(MultisetError):
        decompose_symmetric([S(1)])


def test_scalar_multiset_json():
    om = ScalarMultiset.from_json([{"value": "2", "mult": 2}, "1/2"], F)
    assert om.counts == Counter({S(2): 2, S(Fr(1, 2)): 1})
    assert om.to_json() == [{"value": "1/2", "mult": 1}, {"value": "2", "mult": 2}]
    with pytest.raises(MultisetError):
        ScalarMultiset.from_json([{"value": "2", "mult": 0}], F)


def spec(kind, factors, lead=None):
    return ModuleSpec(kind, [EvalFactor(l, S(a)) for l, a in factors], lead)


def test_classify_examples():
    rep = classify_module(spec(KIND_3, [(1, 2), (1, Fr(1, 2))]), S(1))
    assert not rep.irreducible_as_T_module and rep.failed_conditions == [GENERAL_POSITION]
    s = S(3)
    rep = classify_module(spec(KIND_1, [(1, -9)]), s)
    assert not rep.irreducible_as_T_module and rep.failed_conditions == [TYPE_EXCLUDED]
    rep = classify_module(spec(KIND_1, [(1, Fr(-1, 9))]), s)
    assert rep.failed_conditions == [TYPE_EXCLUDED]
    rep = classify_module(spec(KIND_2, [(1, Fr(-1, 9))]), s)
    assert rep.failed_conditions == [TYPE_EXCLUDED]
    rep = classify_module(spec(KIND_2, [(1, -9)]), s)
    assert rep.irreducible_as_T_module
    rep = classify_module(spec(KIND_1, [(1, 3), (1, 5)]), S(1), t=S(2))
    assert rep.irreducible_as_T_module and rep.m_sdt_member is False
    assert THETA_DISTINCT in rep.failed_conditions
    assert DIAMETER not in rep.failed_conditions


def test_classify_t_condition():
    rep = classify_module(spec(KIND_3, [(1, -25)]), S(3), t=S(5))
    assert rep.irreducible_as_T_module and not rep.m_sdt_member
    assert rep.failed_conditions == [T_EXCLUDED]
    assert classify_module(spec(KIND_3, [(1, 3)]), S(3)).m_sdt_member is None


def test_realize_examples():
    assert realize_polynomial([S(-3)], KIND_3, S(1)) == spec(KIND_3, [(1, 3)])
    r = realize_polynomial([F.zero] * 3, KIND_2, S(1), field=F)
    assert r.leading_trivial_ell == 3 and not r.factors
    assert realize_polynomial([S(-3) / q, S(-3) * q], KIND_3, S(1)) == spec(KIND_3, [(2, 3)])


def test_realize_errors():
    with pytest.raises(RealizationError):
        realize_polynomial([S(-1) * 0 + 1], KIND_2, S(1))  # forbidden value s^-2 = 1
    with pytest.raises(FieldExtensionError):
        realize_polynomial([S(1)], KIND_1, S(3))  # zeta^2 + zeta + 1 has no rational root


def test_realize_kind_1_needs_splitting_field():
    K = FieldConfig(2, D=5)
    root = K.scalar(3)  # zeta^2 + 3 zeta + 1: discriminant 5
    sp = realize_polynomial([root], KIND_1, K.scalar(1))
    assert drinfeld_closed_form(sp, field=K).coeffs == (-root, K.one)


# properties -------------------------------------------------------------

strings = st.builds(QString, st.integers(1, 4),
                    st.tuples(st.sampled_from(BASES), st.integers(-5, 5)).map(lambda p: p[0] * F.qpow(p[1])))


@settings(max_examples=150, deadline=None)
@given(strings, strings)
def test_adjacent_symmetric_and_matches_union(s1, s2):
    assert adjacent(s1, s2) == adjacent(s2, s1)
    assert adjacent(s1, s2) == adjacent_by_union(s1, s2)


@settings(max_examples=100, deadline=None)
@given(strings, st.integers(-8, 8))
def test_membership_paths_agree(s, j):
    c = s.a * F.qpow(j)
    assert s.contains(c) == s.contains_enumerated(c)


@settings(max_examples=80, deadline=None)
@given(st.lists(strings, max_size=5), st.randoms(use_true_random=False))
def test_decompose_round_trip(ms, rnd):
    omega = QStringMultiset(ms).union()
    vals = list(omega.elements())
    out = decompose(vals)
    assert general_position(out)
    assert out.union() == omega
    rnd.shuffle(vals)
    assert decompose(vals) == out


@settings(max_examples=80, deadline=None)
@given(st.lists(strings, max_size=4), st.randoms(use_true_random=False))
def test_decompose_symmetric_round_trip(ms, rnd):
    omega = QStringMultiset(ms).symmetric_union()
    vals = list(omega.elements())
    out = decompose_symmetric(vals)
    assert strongly_general_position(out)
    assert out.symmetric_union() == omega
    rnd.shuffle(vals)
    assert equivalent(decompose_symmetric(vals), out)


@settings(max_examples=80, deadline=None)
@given(st.lists(strings, min_size=1, max_size=3))
def test_strong_implies_general(ms):
    if strongly_general_position(ms):
        assert general_position(ms)


@settings(max_examples=60, deadline=None)
@given(st.lists(strings, min_size=2, max_size=2), st.lists(strings, min_size=2, max_size=2),
       st.lists(st.booleans(), min_size=2, max_size=2))
def test_equivalent_is_an_equivalence(m1, m2, flips):
    m1b = [s.inverse() if f else s for s, f in zip(m1, flips)][::-1]
    assert equivalent(m1, m1)
    assert equivalent(m1, m1b) and equivalent(m1b, m1)
    if equivalent(m1, m2):
        assert equivalent(m1b, m2)


def test_random_symmetric_sets_seeded():
    rng = random.Random(7)
    for _ in range(30):
        vals = []
        for _ in range(rng.randint(1, 4)):
            c = rng.choice(BASES) * F.qpow(rng.randint(-4, 4))
            vals += [c, c.inverse()]
        out = decompose_symmetric(vals)
        assert out.symmetric_union() == Counter(vals)
