"""Evaluation modules of the U_q(sl2)-loop algebra as explicit matrices.

A module is stored through the generators e0+, e1+, f0 = e0- k0, f1 = e1- k1,
k0 and k0^{-1}.  The coproduct is stated on exactly these elements:

    D(k) = k (x) k,   D(e_i+) = k_i (x) e_i+ + e_i+ (x) 1,
    D(f_i) = k_i (x) f_i + f_i (x) 1,

with k1 = k0^{-1}.  Tensor bases are row-major over (index1, index2).
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .errors import KindError, UsageError
from .field import FieldConfig, Scalar
from .linalg import Matrix, commutator, coordinates

GEN_NAMES = ("e0p", "e1p", "f0", "f1", "k0", "k0inv")


@dataclass(frozen=True)
class AlgebraKind:
    """The pair (epsilon, epsilon*); only (1,1), (1,0) and (0,0) occur."""

    epsilon: int
    epsilon_star: int

    def __post_init__(self):
        if (self.epsilon, self.epsilon_star) not in ((1, 1), (1, 0), (0, 0)):
            raise UsageError(f"unsupported kind ({self.epsilon},{self.epsilon_star})")

    @classmethod
    def parse(cls, value) -> AlgebraKind:
        if isinstance(value, AlgebraKind):
            return value
        names = {"1": (1, 1), "I": (1, 1), "2": (1, 0), "II": (1, 0), "3": (0, 0), "III": (0, 0)}
        if isinstance(value, str):
            v = value.strip().strip("()[]")
            if v in names:
                return cls(*names[v])
            parts = [p.strip() for p in v.split(",")]
            try:
                return cls(int(parts[0]), int(parts[1]))
            except (ValueError, IndexError) as exc:
                raise UsageError(f"cannot parse kind {value!r}") from exc
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return cls(int(value[0]), int(value[1]))
        raise UsageError(f"cannot parse kind {value!r}")

    @property
    def has_f0(self) -> bool:
        return self.epsilon_star == 1 or self.epsilon == 0

    @property
    def is_borel(self) -> bool:
        """True for (1,0), where only the subalgebra without e0- acts."""
        return (self.epsilon, self.epsilon_star) == (1, 0)

    def to_json(self) -> list[int]:
        return [self.epsilon, self.epsilon_star]

    def __str__(self):
        return f"({self.epsilon},{self.epsilon_star})"


KIND_1 = AlgebraKind(1, 1)
KIND_2 = AlgebraKind(1, 0)
KIND_3 = AlgebraKind(0, 0)
ALL_KINDS = (KIND_1, KIND_2, KIND_3)


@dataclass(frozen=True)
class EvalFactor:
    ell: int
    a: Scalar

    def validate(self, kind: AlgebraKind, leading: bool = False) -> None:
        if self.ell < 0 or (self.ell == 0 and not (leading and kind.is_borel and not self.a)):
            raise UsageError(f"ell must be positive (ell = 0 only for a leading V(0)), got {self.ell}")
        if not self.a and not kind.is_borel:
            raise UsageError("a = 0 is only allowed for kind (1,0)")

    def to_json(self) -> dict:
        return {"ell": self.ell, "a": str(self.a)}

    def __str__(self):
        if not self.a:
            return f"V({self.ell})"
        return f"V({self.ell},{self.a})"


@dataclass(frozen=True)
class ModuleSpec:
    """V(l_0) (x) V(l_1,a_1) (x) ... ; the V(l_0) factor exists only for kind (1,0)."""

    kind: AlgebraKind
    factors: tuple
    leading_trivial_ell: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if self.leading_trivial_ell is not None and not self.kind.is_borel:
            raise UsageError("a leading V(l) factor requires kind (1,0)")
        if self.leading_trivial_ell is not None and self.leading_trivial_ell < 0:
            raise UsageError("leading_trivial_ell must be >= 0")
        for f in self.factors:
            if not f.a:
                raise UsageError("string factors need a != 0; use leading_trivial_ell for V(l)")
            f.validate(self.kind)
        if not self.factors and self.leading_trivial_ell is None:
            raise UsageError("a module spec needs at least one factor")

    @property
    def all_factors(self) -> tuple:
        if self.leading_trivial_ell is None:
            return self.factors
        field = self.factors[0].a.field if self.factors else None
        zero = field.zero if field is not None else None
        return (EvalFactor(self.leading_trivial_ell, zero),) + self.factors

    @property
    def diameter(self) -> int:
        return sum(f.ell for f in self.factors) + (self.leading_trivial_ell or 0)

    @property
    def dim(self) -> int:
        n = 1
        for f in self.factors:
            n *= f.ell + 1
        return n * ((self.leading_trivial_ell or 0) + 1)

    def to_json(self) -> dict:
        out = {"kind": self.kind.to_json(), "factors": [f.to_json() for f in self.factors]}
        if self.leading_trivial_ell is not None:
            out["leading_trivial_ell"] = self.leading_trivial_ell
        return out

    @classmethod
    def from_json(cls, data: dict, field: FieldConfig, kind=None) -> ModuleSpec:
        k = AlgebraKind.parse(kind if kind is not None else data.get("kind", [1, 1]))
        factors = [EvalFactor(int(f["ell"]), field.scalar(str(f["a"]))) for f in data.get("factors", [])]
        lead = data.get("leading_trivial_ell")
        if lead is None and k.is_borel:
            lead = 0
        if not k.is_borel:
            lead = None if not lead else lead
        return cls(k, factors, None if lead is None else int(lead))

    def __str__(self):
        parts = [str(f) for f in self.all_factors]
        return f"{self.kind} " + " x ".join(parts)


@dataclass(frozen=True, eq=False)
class Representation:
    """Generator matrices of a finite-dimensional loop-algebra module."""

    kind: AlgebraKind
    field: FieldConfig
    gens: dict
    weights: tuple
    d: int
    factors: tuple = dc_field(default=())

    @property
    def dim(self) -> int:
        return len(self.weights)

    def gen(self, name: str) -> Matrix:
        m = self.gens.get(name)
        if m is None:
            raise KindError(f"generator {name} is not available for kind {self.kind}")
        return m

    @property
    def e0p(self) -> Matrix:
        return self.gens["e0p"]

    @property
    def e1p(self) -> Matrix:
        return self.gens["e1p"]

    @property
    def f0(self) -> Matrix | None:
        return self.gens.get("f0")

    @property
    def f1(self) -> Matrix:
        return self.gens["f1"]

    @property
    def k0(self) -> Matrix:
        return self.gens["k0"]

    @property
    def k0inv(self) -> Matrix:
        return self.gens["k0inv"]

    def e_minus(self, i: int) -> Matrix:
        """e_i- recovered as f_i k_i^{-1}."""
        if i == 0:
            return self.gen("f0") @ self.k0inv
        return self.f1 @ self.k0

    def same_matrices(self, other: Representation) -> bool:
        return set(self.gens) == set(other.gens) and all(self.gens[n] == other.gens[n] for n in self.gens)


def build_evaluation(factor: EvalFactor, kind: AlgebraKind, field: FieldConfig | None = None,
                     leading: bool = False) -> Representation:
    """The (l+1)-dimensional evaluation module in its standard basis v_0..v_l."""
    kind = AlgebraKind.parse(kind)
    field = field or factor.a.field
    a = field.scalar(factor.a)
    ell = factor.ell
    EvalFactor(ell, a).validate(kind, leading=leading or (not a and kind.is_borel))
    n = ell + 1
    qp, qi = field.qpow, field.q_integer
    e0p, e1p, f0, f1 = [], [], [], []
    for i in range(n):
        if i + 1 <= ell:
            if a:
                e0p.append((i + 1, i, a * qp(1) * qi(i + 1)))
            # f1 = e1- k1 : v_i -> q^{l-2i} [i+1] v_{i+1}
            f1.append((i + 1, i, qp(ell - 2 * i) * qi(i + 1)))
        if i >= 1:
            e1p.append((i - 1, i, qi(ell - i + 1)))
            if a:
                # f0 = e0- k0 : v_i -> q^{2i-l} a^{-1} q^{-1} [l-i+1] v_{i-1}
                f0.append((i - 1, i, qp(2 * i - ell - 1) * qi(ell - i + 1) / a))
    gens = {
        "e0p": Matrix.from_entries(n, n, e0p, field),
        "e1p": Matrix.from_entries(n, n, e1p, field),
        "f1": Matrix.from_entries(n, n, f1, field),
        "k0": Matrix.diagonal([qp(2 * i - ell) for i in range(n)], field),
        "k0inv": Matrix.diagonal([qp(ell - 2 * i) for i in range(n)], field),
    }
    if kind.has_f0:
        gens["f0"] = Matrix.from_entries(n, n, f0, field)
    return Representation(kind, field, gens, tuple(range(n)), ell, (EvalFactor(ell, a),))


def tensor(r1: Representation, r2: Representation) -> Representation:
    if r1.kind != r2.kind:
        raise KindError(f"cannot tensor kinds {r1.kind} and {r2.kind}")
    if r1.field.D != r2.field.D or r1.field.q != r2.field.q:
        raise UsageError("cannot tensor modules over different fields")
    field = r1.field
    id2 = Matrix.identity(r2.dim, field)
    k0, k0inv = r1.k0, r1.k0inv
    gens = {
        "k0": k0.kron(r2.k0),
        "k0inv": k0inv.kron(r2.k0inv),
        "e0p": k0.kron(r2.e0p) + r1.e0p.kron(id2),
        "e1p": k0inv.kron(r2.e1p) + r1.e1p.kron(id2),
        "f1": k0inv.kron(r2.f1) + r1.f1.kron(id2),
    }
    if "f0" in r1.gens:
        gens["f0"] = k0.kron(r2.f0) + r1.f0.kron(id2)
    weights = tuple(w1 + w2 for w1 in r1.weights for w2 in r2.weights)
    return Representation(r1.kind, field, gens, weights, r1.d + r2.d, r1.factors + r2.factors)


def build_module(spec: ModuleSpec, field: FieldConfig) -> Representation:
    """Tensor product of the evaluation modules listed in ``spec``, left to right."""
    rep = None
    for idx, f in enumerate(spec.all_factors):
        a = f.a if f.a is not None else field.zero
        r = build_evaluation(EvalFactor(f.ell, field.scalar(a)), spec.kind, field,
                             leading=(idx == 0 and spec.leading_trivial_ell is not None))
        rep = r if rep is None else tensor(rep, r)
    return rep


@dataclass
class RelationResidual:
    name: str
    residual: Matrix

    def __post_init__(self):
        if self.residual.raw:
            object.__setattr__(self, "residual", self.residual.from_raw())

    @property
    def nonzero(self) -> int:
        return self.residual.nnz()

    @property
    def passed(self) -> bool:
        return self.residual.is_zero()

    def max_entry(self):
        """Position and value of the nonzero entry of largest rational height."""
        best = None
        for i, j, v in self.residual.nonzero_entries():
            h = max(abs(v.x.numerator), abs(v.x.denominator), abs(v.y.numerator), abs(v.y.denominator))
            if best is None or h > best[0]:
                best = (h, i, j, v)
        if best is None:
            return None
        return (best[1], best[2], best[3])

    def to_json(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "nonzero_entries": self.nonzero}
        m = self.max_entry()
        if m is not None:
            out["max_entry"] = {"row": m[0], "col": m[1], "value": str(m[2])}
        return out


@dataclass
class RelationReport:
    residuals: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.residuals)

    def failed(self) -> list[str]:
        return [r.name for r in self.residuals if not r.passed]

    def get(self, name: str) -> RelationResidual:
        for r in self.residuals:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"passed": self.passed, "relations": [r.to_json() for r in self.residuals]}


def _serre(a: Matrix, b: Matrix, beta: Scalar) -> Matrix:
    """[a, a^2 b - beta a b a + b a^2]."""
    a2 = a @ a
    inner = a2 @ b - (a @ b @ a).scale(beta) + b @ a2
    return commutator(a, inner)


def verify_loop_relations(r: Representation) -> RelationReport:
    """Residuals of the defining relations (the e0- free subalgebra for kind (1,0))."""
    f = r.field
    c = f.constants
    q2, qm2 = f.qpow(2), f.qpow(-2)
    inv_qdiff = (f.qpow(1) - f.qpow(-1)).inverse()
    ident = Matrix.identity(r.dim, f, raw=True)
    k0, k0inv = r.k0.to_raw(), r.k0inv.to_raw()
    k = [k0, k0inv]
    kinv = [k0inv, k0]
    ep = [r.e0p.to_raw(), r.e1p.to_raw()]
    out = []

    def add(name, m):
        out.append(RelationResidual(name, m))

    add("k0 k1 = 1", k0 @ k0inv - ident)
    add("k1 k0 = 1", k0inv @ k0 - ident)
    if r.kind.is_borel:
        em1 = r.e_minus(1).to_raw()
        add("k0 e0+ k0^-1 = q^2 e0+", k[0] @ ep[0] @ kinv[0] - ep[0].scale(q2))
        add("k1 e1+ k1^-1 = q^2 e1+", k[1] @ ep[1] @ kinv[1] - ep[1].scale(q2))
        add("k1 e1- k1^-1 = q^-2 e1-", k[1] @ em1 @ kinv[1] - em1.scale(qm2))
        add("[e0+, e1-] = 0", commutator(ep[0], em1))
        add("[e1+, e1-] = (k1 - k1^-1)/(q - q^-1)", commutator(ep[1], em1) - (k[1] - kinv[1]).scale(inv_qdiff))
        add("serre e0+ e1+", _serre(ep[0], ep[1], c.beta))
        add("serre e1+ e0+", _serre(ep[1], ep[0], c.beta))
        return RelationReport(out)
    em = [r.e_minus(0).to_raw(), r.e_minus(1).to_raw()]
    for i in (0, 1):
        j = 1 - i
        add(f"k{i} e{i}+ k{i}^-1 = q^2 e{i}+", k[i] @ ep[i] @ kinv[i] - ep[i].scale(q2))
        add(f"k{i} e{i}- k{i}^-1 = q^-2 e{i}-", k[i] @ em[i] @ kinv[i] - em[i].scale(qm2))
        add(f"k{i} e{j}+ k{i}^-1 = q^-2 e{j}+", k[i] @ ep[j] @ kinv[i] - ep[j].scale(qm2))
        add(f"k{i} e{j}- k{i}^-1 = q^2 e{j}-", k[i] @ em[j] @ kinv[i] - em[j].scale(q2))
    for i in (0, 1):
        j = 1 - i
        add(f"[e{i}+, e{i}-] = (k{i} - k{i}^-1)/(q - q^-1)",
            commutator(ep[i], em[i]) - (k[i] - kinv[i]).scale(inv_qdiff))
        add(f"[e{i}+, e{j}-] = 0", commutator(ep[i], em[j]))
    for i in (0, 1):
        j = 1 - i
        add(f"serre e{i}+ e{j}+", _serre(ep[i], ep[j], c.beta))
        add(f"serre e{i}- e{j}-", _serre(em[i], em[j], c.beta))
    return RelationReport(out)


def dual(r: Representation) -> Representation:
    """Dual module via the anti-automorphism swapping e_i+ and e_i- k_i.

    In the dual basis f_0..f_{n-1} every generator X acts by transpose(tau(X)).
    """
    if r.kind != KIND_1:
        raise KindError("dual modules are only available for kind (1,1)")
    g = r.gens
    gens = {
        "e0p": g["f0"].transpose(),
        "f0": g["e0p"].transpose(),
        "e1p": g["f1"].transpose(),
        "f1": g["e1p"].transpose(),
        "k0": g["k0"].transpose(),
        "k0inv": g["k0inv"].transpose(),
    }
    factors = tuple(EvalFactor(fc.ell, fc.a.inverse()) for fc in r.factors)
    return Representation(r.kind, r.field, gens, r.weights, r.d, factors)


def dual_basis_change(ell: int, field: FieldConfig) -> list[Scalar]:
    """Coefficients c_i with g_i = c_i f_i identifying the dual of V(l,a) with V(l,a^{-1})."""
    return [field.qpow(-i * (ell - i + 1)) * field.q_binomial(ell, i) for i in range(ell + 1)]


def rescale_basis(r: Representation, coeffs) -> Representation:
    """Matrices of r in the basis b_i = coeffs[i] * (old basis vector i)."""
    f = r.field
    inv = [f.scalar(c).inverse() for c in coeffs]
    gens = {}
    for name, m in r.gens.items():
        # new matrix entry (i, j) = old (i, j) * c_j / c_i
        rows = [{j: v * coeffs[j] * inv[i] for j, v in row.items()} for i, row in enumerate(m.rows)]
        gens[name] = Matrix(m.nrows, m.ncols, rows, f)
    return Representation(r.kind, f, gens, r.weights, r.d, r.factors)


@dataclass
class EmbeddingWitness:
    ell: int
    a: Scalar
    ambient: Representation
    vectors: list
    restricted: dict
    target: Representation

    @property
    def isomorphic(self) -> bool:
        return all(self.restricted.get(n) == self.target.gens[n] for n in self.target.gens)


def highest_embedding(ell: int, a, field: FieldConfig | None = None,
                      kind: AlgebraKind = KIND_1) -> EmbeddingWitness:
    """The copy of V(l,a) spanned by w_i = q^{-i} u_i (x) v_0 + u_{i-1} (x) v_1."""
    if ell < 2:
        raise UsageError("highest_embedding needs ell >= 2")
    field = field or a.field
    a = field.scalar(a)
    left = build_evaluation(EvalFactor(ell - 1, a * field.qpow(-1)), kind, field)
    right = build_evaluation(EvalFactor(1, a * field.qpow(ell - 1)), kind, field)
    amb = tensor(left, right)
    vectors = []
    for i in range(ell + 1):
        w = {}
        if i <= ell - 1:
            w[2 * i] = field.qpow(-i)
        if i >= 1:
            w[2 * (i - 1) + 1] = field.one
        vectors.append(w)
    restricted = {}
    for name, m in amb.gens.items():
        cols = []
        for w in vectors:
            c = coordinates(vectors, m.apply(w), field)
            if c is None:
                cols = None
                break
            cols.append({i: v for i, v in enumerate(c) if v})
        if cols is not None:
            restricted[name] = Matrix.from_columns(cols, ell + 1, field)
    target = build_evaluation(EvalFactor(ell, a), kind, field)
    return EmbeddingWitness(ell, a, amb, vectors, restricted, target)
