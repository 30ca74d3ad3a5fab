"""Structure of T-modules: weights, sigma sequences, Drinfel'd polynomials,
irreducibility and TD-pair checks."""
from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

from .errors import InconclusiveError, UsageError, WeightError
from .field import FieldConfig, Scalar
from .linalg import (Echelon, Matrix, cooked_vec, intersection, nullspace, nullspace_of_rows, raw_vec,
                     spin as spin_vectors, subspace_sum)
from .loopmod import EvalFactor, ModuleSpec, build_evaluation, tensor
from .poly import Polynomial
from .qstrings import QString
from .tdalg import TDPairCandidate, ThetaData, TModule, phi_s, theta_sequences

DrinfeldPolynomial = Polynomial


# weights --------------------------------------------------------------------

@dataclass
class WeightData:
    s: Scalar
    d: int
    blocks: list
    dims: list

    def to_json(self) -> dict:
        return {"s": str(self.s), "d": self.d, "dims": list(self.dims),
                "blocks": [list(b) for b in self.blocks]}


def weight_decomposition(tm: TModule) -> WeightData:
    """Group basis vectors by k-eigenvalue and read off the type s and diameter d."""
    f = tm.field
    if not tm.k.is_diagonal():
        raise WeightError("k is not diagonal in the stored basis")
    diag = tm.k.diagonal_entries()
    if any(not v for v in diag):
        raise WeightError("k has a zero eigenvalue")
    ref = diag[0]
    exps = []
    for v in diag:
        j = f.q_power_ratio(ref, v)
        if j is None or j % 2:
            raise WeightError(f"eigenvalue {v} is not on the q^2 ladder through {ref}")
        exps.append(j // 2)
    lo, hi = min(exps), max(exps)
    d = hi - lo
    blocks = [[] for _ in range(d + 1)]
    for idx, e in enumerate(exps):
        blocks[e - lo].append(idx)
    lowest = ref * f.qpow(2 * (lo - exps[0]))
    s = lowest * f.qpow(d)
    return WeightData(s, d, [tuple(b) for b in blocks], [len(b) for b in blocks])


def shape_generating_function(tm: TModule) -> Polynomial:
    wd = weight_decomposition(tm)
    return Polynomial(wd.dims, tm.field)


def expected_shape(spec: ModuleSpec, field: FieldConfig) -> Polynomial:
    """prod (1 + lambda + ... + lambda^{l_i}) over all factors."""
    out = Polynomial([1], field)
    for f in spec.all_factors:
        out = out * Polynomial([1] * (f.ell + 1), field)
    return out


# sigma sequence and Drinfel'd polynomial -----------------------------------

@dataclass
class SigmaSequence:
    sigma: list

    def __getitem__(self, i):
        return self.sigma[i]

    def __len__(self):
        return len(self.sigma)

    def to_json(self) -> list[str]:
        return [str(v) for v in self.sigma]


def _top_index(tm: TModule) -> int:
    wd = weight_decomposition(tm)
    if wd.dims[0] != 1:
        raise WeightError(f"U_0 has dimension {wd.dims[0]}; the sigma sequence needs dim U_0 = 1")
    return wd.blocks[0][0]


def sigma_sequence(tm: TModule) -> SigmaSequence:
    """sigma_i with y^i x^i u = sigma_i u on the one-dimensional U_0."""
    i0 = _top_index(tm)
    f = tm.field
    out = [f.one]
    xi = {i0: f.one}
    for i in range(1, tm.d + 1):
        xi = tm.x.apply(xi)
        w = xi
        for _ in range(i):
            w = tm.y.apply(w)
        extra = [j for j in w if j != i0]
        if extra:
            raise WeightError("y^i x^i does not preserve U_0")
        out.append(w.get(i0, f.zero))
    return SigmaSequence(out)


def drinfeld_from_sigma(sigma, s: Scalar, d: int, kind, field: FieldConfig) -> Polynomial:
    eps, eps_star = kind.epsilon, kind.epsilon_star
    s2 = s * s
    total = Polynomial([], field)
    for i in range(d + 1):
        term = Polynomial([sigma[i]], field)
        for j in range(i + 1, d + 1):
            diff = field.qpow(j) - field.qpow(-j)
            c = field.zero
            if eps:
                c = c + field.qpow(2 * (d - j)) / s2
            if eps_star:
                c = c + s2 * field.qpow(-2 * (d - j))
            term = term * Polynomial([diff * diff * c, -(diff * diff)], field)
        total = total + term
    return total * field.constants.q_d_norm(d).inverse()


def drinfeld(tm: TModule) -> Polynomial:
    sig = sigma_sequence(tm)
    return drinfeld_from_sigma(sig.sigma, tm.type_s, tm.d, tm.kind, tm.field)


def special_value(kind, s: Scalar) -> Scalar:
    """eps s^{-2} + eps* s^2."""
    s2 = s * s
    out = s.field.zero
    if kind.epsilon:
        out = out + s2.inverse()
    if kind.epsilon_star:
        out = out + s2
    return out


def drinfeld_closed_form(spec: ModuleSpec, kind=None, field: FieldConfig | None = None) -> Polynomial:
    """prod over strings of prod_{c in S(l,a)} (lambda + c + eps eps* c^{-1}), times lambda^{l_0}."""
    kind = kind or spec.kind
    if field is None:
        if not spec.factors:
            raise UsageError("drinfeld_closed_form needs a field for specs without strings")
        field = spec.factors[0].a.field
    both = kind.epsilon and kind.epsilon_star
    out = Polynomial([1], field)
    for fct in spec.factors:
        for c in QString(fct.ell, fct.a).elements():
            lin = c + c.inverse() if both else c
            out = out * Polynomial.linear(lin, field)
    lead = spec.leading_trivial_ell or 0
    if lead:
        out = out * Polynomial([0] * lead + [1], field)
    return out


@dataclass
class RecursionWitness:
    i: int
    c_i_m: Scalar
    c_star_i_m: Scalar
    lhs: Scalar
    rhs: Scalar
    via_c: Scalar

    @property
    def passed(self) -> bool:
        return self.lhs == self.rhs == self.via_c

    def to_json(self) -> dict:
        return {"i": self.i, "c_i": str(self.c_i_m), "c_star_i": str(self.c_star_i_m),
                "lhs": str(self.lhs), "rhs": str(self.rhs), "passed": self.passed}


def sigma_recursion_check(tm_V: TModule, a) -> list[RecursionWitness]:
    """Compare sigma(V (x) V(1,a)) with the recursion in terms of sigma(V)."""
    if tm_V.rep is None:
        raise UsageError("sigma_recursion_check needs a TModule built by phi_s")
    f = tm_V.field
    a = f.scalar(a)
    kind = tm_V.kind
    eps, eps_star = kind.epsilon, kind.epsilon_star
    s, d = tm_V.type_s, tm_V.d
    qp = f.qpow
    ext = tensor(tm_V.rep, build_evaluation(EvalFactor(1, a), kind, f))
    tilde = sigma_sequence(phi_s(ext, s)).sigma
    sigma = sigma_sequence(tm_V).sigma + [f.zero]
    alpha = f.constants.alpha
    ainv = a.inverse() if a else f.zero
    out = []
    for i in range(1, d + 2):
        diff = qp(i) - qp(-i)
        coeff = a
        if eps and eps_star:
            coeff = coeff + ainv
        if eps:
            coeff = coeff + qp(2 * (d + 1 - i)) / (s * s)
        if eps_star:
            coeff = coeff + s * s * qp(-2 * (d + 1 - i))
        rhs = sigma[i] - diff * diff * coeff * sigma[i - 1]
        c_i = a * s * qp(i - d - 1)
        if eps:
            c_i = c_i + qp(-i + d + 1) / s
        c_star = qp(i - 2 * (i - 1) + d - 1) / s
        if eps_star:
            c_star = c_star + ainv * s * qp(-i + 2 * (i - 1) - d + 1)
        qi = f.q_integer(i)
        via_c = sigma[i] + alpha * qp(1) * qi * qi * c_i * c_star * sigma[i - 1]
        out.append(RecursionWitness(i, c_i, c_star, tilde[i], rhs, via_c))
    return out


# spinning and the irreducibility oracle ---------------------------------------

def spin(tm: TModule, v) -> Echelon:
    """Smallest x, y, k, k^{-1}-invariant subspace containing v (row-reduced basis)."""
    if not isinstance(v, dict):
        v = {i: tm.field.scalar(c) for i, c in enumerate(v) if c}
    return spin_vectors(tm.gens, [v] if v else [], tm.dim, tm.field)


@dataclass
class NortonResult:
    irreducible: bool
    witness: Echelon | None
    method: str
    details: dict = dc_field(default_factory=dict)

    def __iter__(self):
        yield self.irreducible
        yield self.witness

    def to_json(self) -> dict:
        out = {"irreducible": self.irreducible, "method": self.method}
        if self.witness is not None:
            out["witness_dim"] = self.witness.dim
        out.update(self.details)
        return out


def _proper(space: Echelon) -> bool:
    return 0 < space.dim < space.n


def _kernel_test(gens, n, field, kernel, cokernel, label) -> NortonResult | None:
    """Norton's test for an element whose kernel has dimension one.

    ``kernel`` spans ker(theta) and ``cokernel`` spans ker(theta^T).  A proper
    submodule either meets ker(theta) or its annihilator meets ker(theta^T),
    so two full spins prove irreducibility (over every extension field too).
    """
    s1 = spin_vectors(gens, [kernel], n, field)
    if s1.dim < n:
        return NortonResult(False, s1, label, {"witness_from": "kernel"})
    s2 = spin_vectors(gens, [cokernel], n, field, transpose=True)
    if s2.dim < n:
        return NortonResult(False, s2.annihilator(), label, {"witness_from": "cokernel"})
    return NortonResult(True, None, label)


def _random_element(gens, n, field, rng: random.Random, max_len: int) -> Matrix:
    total = Matrix.identity(n, field).scale(rng.randint(-3, 3))
    for _ in range(rng.randint(1, 3)):
        word = Matrix.identity(n, field)
        for _ in range(rng.randint(1, max_len)):
            word = word @ gens[rng.randrange(len(gens))]
        coeff = rng.choice([-3, -2, -1, 1, 2, 3])
        total = total + word.scale(coeff)
    return total


def norton_test(gens, n: int, field: FieldConfig, hints=(), seed: int = 0, rounds: int = 200,
                max_word_len: int = 6) -> NortonResult:
    """Decide irreducibility of F^n under the algebra generated by ``gens``.

    ``hints`` are pairs (u, f) describing rank-one elements u f^T known to lie
    in the algebra (e.g. projectors onto one-dimensional eigenspaces of a
    generator); they are tried first.  Afterwards seeded pseudorandom
    elements are drawn until one has a one-dimensional kernel.  Any kernel
    vector that spins to a proper subspace is returned as a witness.
    """
    if n <= 1:
        return NortonResult(True, None, "dimension <= 1")
    for u, f in hints:
        res = _kernel_test(gens, n, field, u, f, "rank-one element")
        if res is not None:
            return res
    rng = random.Random(seed)
    for r in range(rounds):
        theta = _random_element(gens, n, field, rng, max_word_len)
        ker = nullspace(theta)
        if not ker:
            continue
        for v in ker:
            s1 = spin_vectors(gens, [v], n, field)
            if s1.dim < n:
                return NortonResult(False, s1, "random element", {"round": r})
        coker = nullspace(theta.transpose())
        for w in coker:
            s2 = spin_vectors(gens, [w], n, field, transpose=True)
            if s2.dim < n:
                return NortonResult(False, s2.annihilator(), "random element", {"round": r})
        if len(ker) == 1:
            return NortonResult(True, None, "random element", {"round": r})
    raise InconclusiveError(f"no decisive algebra element found in {rounds} rounds (seed {seed})")


def weight_hints(tm: TModule):
    """Projectors onto one-dimensional weight spaces; each is a polynomial in k."""
    wd = weight_decomposition(tm)
    one = tm.field.one
    out = []
    for block in wd.blocks:
        if len(block) == 1:
            e = {block[0]: one}
            out.append((e, e))
    return out


def norton_irreducible(tm: TModule, seed: int = 0) -> NortonResult:
    try:
        hints = weight_hints(tm)
    except WeightError:
        hints = []
    return norton_test(tm.gens, tm.dim, tm.field, hints=hints, seed=seed)


# isomorphisms ---------------------------------------------------------------

def find_intertwiner(tm1: TModule, tm2: TModule) -> Matrix | None:
    """An invertible X with X g1 = g2 X for g in (x, y, k, k^{-1}), or None.

    Only entries between basis vectors of equal k-eigenvalue can be nonzero;
    the first basis vector of the solution space is tested for invertibility.
    """
    if tm1.dim != tm2.dim:
        return None
    f = tm1.field
    n = tm1.dim
    k1, k2 = tm1.k.diagonal_entries(), tm2.k.diagonal_entries()
    unknowns = [(i, j) for i in range(n) for j in range(n) if k2[i] == k1[j]]
    index = {p: u for u, p in enumerate(unknowns)}
    rows = []
    for g1, g2 in ((tm1.x, tm2.x), (tm1.y, tm2.y)):
        g1c = g1.columns()
        for a in range(n):
            for b in range(n):
                eq = {}
                # (X g1)_{ab} = sum_j X_{aj} g1_{jb}
                for j, v in g1c[b].items():
                    u = index.get((a, j))
                    if u is not None:
                        eq[u] = eq.get(u, f.zero) + v
                # (g2 X)_{ab} = sum_i g2_{ai} X_{ib}
                for i, v in g2.rows[a].items():
                    u = index.get((i, b))
                    if u is not None:
                        eq[u] = eq.get(u, f.zero) - v
                eq = {u: v for u, v in eq.items() if v}
                if eq:
                    rows.append(eq)
    sol = nullspace_of_rows(rows, len(unknowns), f)
    if not sol:
        return None
    X = Matrix.from_entries(n, n, [(unknowns[u][0], unknowns[u][1], v) for u, v in sol[0].items()], f)
    if Echelon(n, f, X.rows).dim != n:
        return None
    return X


# TD-pair verification -----------------------------------------------------

@dataclass
class TDPairReport:
    theta_used: ThetaData
    diagonalizable_A: bool = False
    diagonalizable_Astar: bool = False
    tridiagonal_A_on_Vstar: bool = False
    tridiagonal_Astar_on_V: bool = False
    irreducible: bool = False
    split_blocks: list = dc_field(default_factory=list)
    split_matches_weights: bool = False
    filtration_matches: bool = False
    shape: list = dc_field(default_factory=list)
    E0star_identity: bool | None = None
    E0star_V0_zero: bool | None = None
    Theta_norm: Scalar | None = None
    Theta_i: list = dc_field(default_factory=list)
    Theta_star_i: list = dc_field(default_factory=list)
    skipped: list = dc_field(default_factory=list)
    norton: NortonResult | None = None

    @property
    def is_td_pair(self) -> bool:
        return (self.diagonalizable_A and self.diagonalizable_Astar and self.tridiagonal_A_on_Vstar
                and self.tridiagonal_Astar_on_V and self.irreducible)

    def to_json(self) -> dict:
        return {
            "theta": self.theta_used.to_json(),
            "diagonalizable_A": self.diagonalizable_A,
            "diagonalizable_Astar": self.diagonalizable_Astar,
            "tridiagonal_A_on_Vstar": self.tridiagonal_A_on_Vstar,
            "tridiagonal_Astar_on_V": self.tridiagonal_Astar_on_V,
            "irreducible": self.irreducible,
            "split_blocks": [list(b) for b in self.split_blocks],
            "split_matches_weights": self.split_matches_weights,
            "filtration_matches": self.filtration_matches,
            "shape": list(self.shape),
            "E0star_identity": self.E0star_identity,
            "E0star_V0_zero": self.E0star_V0_zero,
            "Theta_norm": None if self.Theta_norm is None else str(self.Theta_norm),
            "Theta_i": [str(v) for v in self.Theta_i],
            "Theta_star_i": [str(v) for v in self.Theta_star_i],
            "skipped": list(self.skipped),
            "is_td_pair": self.is_td_pair,
        }


def _shifted(m: Matrix, theta: Scalar) -> Matrix:
    return m - Matrix.identity(m.nrows, m.field, raw=m.raw).scale(theta)


def _annihilates(m: Matrix, thetas, n: int, field: FieldConfig) -> bool:
    """prod (m - theta_i) == 0, checked column by column."""
    shifted = [_shifted(m, th) for th in thetas]
    one = Matrix.identity(1, field, raw=m.raw)[0, 0]
    for j in range(n):
        v = {j: one}
        for sm in shifted:
            v = sm.apply(v)
            if not v:
                break
        if v:
            return False
    return True


def _coordinate_space(indices, n, field, raw=False) -> Echelon:
    return Echelon(n, field, [raw_vec({i: field.one}, field) if raw else {i: field.one} for i in indices], raw=raw)


def _tridiagonal(op: Matrix, spaces) -> bool:
    d = len(spaces) - 1
    for i, sp in enumerate(spaces):
        nbrs = [spaces[j] for j in (i - 1, i, i + 1) if 0 <= j <= d]
        target = subspace_sum(*nbrs)
        for v in sp.basis():
            if not target.contains(op.apply(v)):
                return False
    return True


def td_pair_verify(c: TDPairCandidate, seed: int = 0) -> TDPairReport:
    tm = c.parent
    f = tm.field
    n = tm.dim
    th = theta_sequences(tm.type_s, c.t, tm.d, tm.kind, f)
    rep = TDPairReport(th)
    if not th.theta_distinct:
        rep.skipped.append("theta_distinct")
    if not th.theta_star_distinct:
        rep.skipped.append("theta_star_distinct")
    if rep.skipped:
        return rep
    d = tm.d
    theta, theta_s = th.theta, th.theta_star
    rep.Theta_i = []
    rep.Theta_star_i = []
    acc, acc_s = f.one, f.one
    for i in range(d + 1):
        if i:
            acc = acc * (theta[0] - theta[i])
            acc_s = acc_s * (theta_s[0] - theta_s[i])
        rep.Theta_i.append(acc)
        rep.Theta_star_i.append(acc_s)
    rep.Theta_norm = acc * acc_s

    # subspace work runs on plain rationals over Q (see Matrix.raw)
    A, As = c.A.to_raw(), c.A_star.to_raw()
    rep.diagonalizable_A = _annihilates(A, theta, n, f)
    rep.diagonalizable_Astar = _annihilates(As, theta_s, n, f)
    V = [Echelon(n, f, nullspace(_shifted(A, t), raw_out=True), raw=True) for t in theta]
    Vs = [Echelon(n, f, nullspace(_shifted(As, t), raw_out=True), raw=True) for t in theta_s]
    rep.tridiagonal_Astar_on_V = _tridiagonal(As, V)
    rep.tridiagonal_A_on_Vstar = _tridiagonal(A, Vs)

    wd = weight_decomposition(tm)
    split = []
    for i in range(d + 1):
        low = subspace_sum(*Vs[: i + 1])
        high = subspace_sum(*V[i:])
        split.append(intersection(low, high))
    rep.shape = [s.dim for s in split]
    weight_spaces = [_coordinate_space(b, n, f, raw=True) for b in wd.blocks]
    rep.split_matches_weights = all(s == w for s, w in zip(split, weight_spaces))
    rep.split_blocks = [list(b) for b in wd.blocks] if rep.split_matches_weights else [
        [str(x) for x in s.pivots()] for s in split]
    rep.filtration_matches = all(
        subspace_sum(*V[i:]) == subspace_sum(*weight_spaces[i:]) for i in range(d + 1))

    hints = []
    if V[0].dim == 1:
        u = cooked_vec(V[0].basis()[0], f)
        cok = nullspace(_shifted(A, theta[0]).transpose())
        if len(cok) == 1:
            hints.append((u, cok[0]))
    rep.norton = norton_test([c.A, c.A_star], n, f, hints=hints, seed=seed)
    rep.irreducible = rep.norton.irreducible

    if wd.dims[0] == 1 and V[0].dim == 1:
        i0 = wd.blocks[0][0]
        v = cooked_vec(V[0].basis()[0], f)
        w = v
        for j in range(1, d + 1):
            w = _shifted(c.A_star, theta_s[j]).apply(w)
            if w:
                w = {k: val / (theta_s[0] - theta_s[j]) for k, val in w.items()}
        P = drinfeld(tm)
        t = c.t
        lam = t * t
        if tm.kind.epsilon and tm.kind.epsilon_star:
            lam = lam + (t * t).inverse()
        factor = rep.Theta_norm.inverse() * f.constants.q_d_norm(d) * P(lam)
        u0 = v.get(i0, f.zero)
        expected = {i0: factor * u0} if factor * u0 else {}
        rep.E0star_identity = w == expected
        rep.E0star_V0_zero = not w
    return rep
