from __future__ import annotations

from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

import oracle
from tdlab.errors import KindError, UsageError
from tdlab.field import FieldConfig
from tdlab.linalg import Matrix
from tdlab.loopmod import (KIND_1, KIND_2, KIND_3, ALL_KINDS, AlgebraKind, EvalFactor, ModuleSpec, RelationResidual,
                           Representation, build_evaluation, build_module, dual, dual_basis_change,
                           highest_embedding, rescale_basis, tensor, verify_loop_relations)

F = FieldConfig(2)
S = F.scalar
A_VALUES = [S(2), S(3), S(Fr(1, 2)), S(-1), S(5)]


def dense(m):
    return [[Fr(int(v.x.numerator), int(v.x.denominator)) for v in row] for row in m.to_dense()]


def test_kind_parsing():
    assert AlgebraKind.parse("1,0") == KIND_2
    assert AlgebraKind.parse([0, 0]) == KIND_3
    with pytest.raises(UsageError):
        AlgebraKind.parse([0, 1])


def test_v1_matrices():
    a = S(3)
    r = build_evaluation(EvalFactor(1, a), KIND_1)
    assert r.e0p.to_dense() == [[0, 0], [a * 2, 0]]
    assert r.k0.diagonal_entries() == [Fr(1, 2), 2]


def test_trivial_module_kind_10():
    r = build_evaluation(EvalFactor(0, F.zero), KIND_2, F, leading=True)
    assert r.dim == 1
    assert r.e0p.is_zero() and r.e1p.is_zero() and r.f1.is_zero()
    assert r.k0.diagonal_entries() == [1]
    assert "f0" not in r.gens


def test_zero_parameter_rejected_outside_kind_10():
    with pytest.raises(UsageError):
        build_evaluation(EvalFactor(1, F.zero), KIND_1, F)
    with pytest.raises(UsageError):
        ModuleSpec(KIND_1, [EvalFactor(1, S(2))], leading_trivial_ell=1)


def test_v2_raising_by_e1():
    r = build_evaluation(EvalFactor(2, S(7)), KIND_1)
    e1 = r.e1p
    assert e1[0, 1] == Fr(5, 2)  # [2] at q = 2
    assert e1[1, 2] == 1


@pytest.mark.parametrize("ell,a", [(1, 3), (2, Fr(1, 2)), (3, -1), (4, 5)])
def test_evaluation_matches_oracle(ell, a):
    r = build_evaluation(EvalFactor(ell, S(a)), KIND_1)
    ref = oracle.evaluation(ell, a, 2)
    for name, key in (("e0p", "e0"), ("e1p", "e1"), ("f0", "f0"), ("f1", "f1"), ("k0", "k0")):
        assert dense(r.gens[name]) == ref[key]


def test_tensor_matches_oracle():
    factors = [(1, 2), (2, 3), (1, Fr(1, 2))]
    rep = build_module(ModuleSpec(KIND_1, [EvalFactor(l, S(a)) for l, a in factors]), F)
    ref = oracle.module(factors, 2)
    for name, key in (("e0p", "e0"), ("e1p", "e1"), ("f0", "f0"), ("f1", "f1"), ("k0", "k0")):
        assert dense(rep.gens[name]) == ref[key]


def test_tensor_of_two_v1():
    a, b = S(3), S(5)
    r = tensor(build_evaluation(EvalFactor(1, a), KIND_1), build_evaluation(EvalFactor(1, b), KIND_1))
    assert r.dim == 4
    assert tensor(build_evaluation(EvalFactor(1, a), KIND_1), build_evaluation(EvalFactor(2, b), KIND_1)).dim == 6
    assert r.k0[0, 0] == Fr(1, 4)
    v = r.e0p.apply({0: F.one})
    # basis index of u_i (x) v_j is 2i + j
    assert v == {1: b, 2: a * 2}
    assert r.weights == (0, 1, 1, 2)


def test_tensor_kind_mismatch():
    with pytest.raises(KindError):
        tensor(build_evaluation(EvalFactor(1, S(2)), KIND_1), build_evaluation(EvalFactor(1, S(2)), KIND_3))


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_relations_hold_on_small_modules(kind):
    for factors in ([(1, 3)], [(1, 3), (1, 5)], [(2, 2), (1, Fr(1, 2))], [(3, -1)]):
        spec = ModuleSpec(kind, [EvalFactor(l, S(a)) for l, a in factors])
        rep = build_module(spec, F)
        report = verify_loop_relations(rep)
        assert report.passed, report.failed()


def test_relations_with_leading_trivial_factor():
    spec = ModuleSpec(KIND_2, [EvalFactor(1, S(3))], leading_trivial_ell=2)
    rep = build_module(spec, F)
    assert rep.dim == 6 and rep.d == 3
    assert verify_loop_relations(rep).passed


def test_corrupted_generator_breaks_a_relation():
    rep = build_evaluation(EvalFactor(1, S(3)), KIND_1)
    gens = dict(rep.gens)
    gens["e0p"] = gens["e0p"] + Matrix.from_entries(2, 2, [(0, 1, 1)], F)
    bad = Representation(rep.kind, F, gens, rep.weights, rep.d, rep.factors)
    report = verify_loop_relations(bad)
    assert not report.passed
    assert not report.get("[e0+, e1-] = 0").passed
    entry = report.get("[e0+, e1-] = 0").max_entry()
    assert entry is not None and entry[2]


def test_residual_reports_are_plain_scalars():
    rep = build_evaluation(EvalFactor(1, S(3)), KIND_1)
    res = verify_loop_relations(rep).residuals[0]
    assert isinstance(res, RelationResidual) and not res.residual.raw


def test_weight_blocks_shift():
    rep = build_module(ModuleSpec(KIND_1, [EvalFactor(1, S(3)), EvalFactor(2, S(5))]), F)
    w = rep.weights
    for name, shift in (("e0p", 1), ("f1", 1), ("e1p", -1), ("f0", -1)):
        for i, j, _ in rep.gens[name].nonzero_entries():
            assert w[i] == w[j] + shift
    for i, k in enumerate(rep.k0.diagonal_entries()):
        assert k == F.qpow(2 * w[i] - rep.d)
    assert (rep.k0 @ rep.k0inv) == Matrix.identity(rep.dim, F)


def test_tensor_associative():
    r = [build_evaluation(EvalFactor(l, S(a)), KIND_1) for l, a in ((1, 2), (1, 3), (2, 5))]
    left = tensor(tensor(r[0], r[1]), r[2])
    right = tensor(r[0], tensor(r[1], r[2]))
    assert left.same_matrices(right)


@pytest.mark.parametrize("ell", [1, 2, 3])
@pytest.mark.parametrize("a", [S(3), S(Fr(-1, 2))])
def test_dual_is_inverse_parameter(ell, a):
    d = dual(build_evaluation(EvalFactor(ell, a), KIND_1))
    assert verify_loop_relations(d).passed
    g = rescale_basis(d, dual_basis_change(ell, F))
    assert g.same_matrices(build_evaluation(EvalFactor(ell, a.inverse()), KIND_1))


def test_dual_basis_v1():
    assert dual_basis_change(1, F) == [1, Fr(1, 2)]
    # the plain q-binomial; the variant with [l-1]! in the numerator breaks l = 3
    coeffs = dual_basis_change(3, F)
    assert coeffs[1] == F.qpow(-3) * F.q_binomial(3, 1)


def test_dual_of_trivial_and_double_dual():
    triv = build_evaluation(EvalFactor(2, S(3)), KIND_1)
    assert dual(dual(triv)).same_matrices(triv)
    rep = build_module(ModuleSpec(KIND_1, [EvalFactor(1, S(2)), EvalFactor(1, S(5))]), F)
    assert dual(dual(rep)).same_matrices(rep)
    assert verify_loop_relations(dual(rep)).passed


def test_dual_refuses_kind_10():
    with pytest.raises(KindError):
        dual(build_evaluation(EvalFactor(1, S(2)), KIND_2))


@pytest.mark.parametrize("ell", [2, 3, 4])
def test_highest_embedding(ell):
    w = highest_embedding(ell, S(3), F)
    assert w.vectors[0] == {0: F.one}
    assert w.isomorphic
    assert set(w.restricted) == set(w.target.gens)


def test_highest_embedding_needs_ell_2():
    with pytest.raises(UsageError):
        highest_embedding(1, S(3), F)


def test_spec_json_round_trip():
    spec = ModuleSpec(KIND_2, [EvalFactor(2, S(Fr(3, 2)))], leading_trivial_ell=1)
    data = spec.to_json()
    assert data == {"kind": [1, 0], "factors": [{"ell": 2, "a": "3/2"}], "leading_trivial_ell": 1}
    assert ModuleSpec.from_json(data, F) == spec


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(ALL_KINDS),
       st.lists(st.tuples(st.integers(1, 2), st.sampled_from(A_VALUES)), min_size=1, max_size=3))
def test_relations_closed_under_tensor(kind, factors):
    spec = ModuleSpec(kind, [EvalFactor(l, a) for l, a in factors])
    assert verify_loop_relations(build_module(spec, F)).passed
