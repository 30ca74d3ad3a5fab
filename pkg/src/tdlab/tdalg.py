"""The augmented TD-algebra on loop-algebra modules and the TD-pair candidates."""
from __future__ import annotations

from dataclasses import dataclass

from .errors import UsageError
from .field import FieldConfig, Scalar
from .linalg import Matrix, commutator
from .loopmod import AlgebraKind, RelationReport, RelationResidual, Representation


@dataclass(frozen=True, eq=False)
class TModule:
    """Matrices of x, y, k, k^{-1} obtained by pulling back along phi_s."""

    x: Matrix
    y: Matrix
    k: Matrix
    k_inv: Matrix
    type_s: Scalar
    d: int
    weights: tuple
    kind: AlgebraKind
    field: FieldConfig
    rep: Representation | None = None

    @property
    def dim(self) -> int:
        return len(self.weights)

    @property
    def gens(self) -> list[Matrix]:
        return [self.x, self.y, self.k, self.k_inv]

    def replace(self, **changes) -> TModule:
        data = {n: getattr(self, n) for n in
                ("x", "y", "k", "k_inv", "type_s", "d", "weights", "kind", "field", "rep")}
        data.update(changes)
        return TModule(**data)


def phi_s(r: Representation, s) -> TModule:
    """x = alpha(s e0+ + eps s^{-1} f1), y = eps* s f0 + s^{-1} e1+, k = s k0."""
    f = r.field
    s = f.scalar(s)
    if not s:
        raise UsageError("s must be nonzero")
    eps, eps_star = r.kind.epsilon, r.kind.epsilon_star
    alpha = f.constants.alpha
    sinv = s.inverse()
    x = r.e0p.scale(alpha * s)
    if eps:
        x = x + r.f1.scale(alpha * sinv)
    y = r.e1p.scale(sinv)
    if eps_star:
        y = y + r.gen("f0").scale(s)
    return TModule(x, y, r.k0.scale(s), r.k0inv.scale(sinv), s, r.d, r.weights, r.kind, f, r)


def _serre(a: Matrix, b: Matrix, beta: Scalar) -> Matrix:
    a2 = a @ a
    return commutator(a, a2 @ b - (a @ b @ a).scale(beta) + b @ a2)


def verify_t_relations(tm: TModule) -> RelationReport:
    f = tm.field
    c = f.constants
    eps, eps_star = tm.kind.epsilon, tm.kind.epsilon_star
    ident = Matrix.identity(tm.dim, f, raw=True)
    x, y, k, ki = (m.to_raw() for m in (tm.x, tm.y, tm.k, tm.k_inv))
    out = [
        RelationResidual("k k^-1 = 1", k @ ki - ident),
        RelationResidual("k^-1 k = 1", ki @ k - ident),
        RelationResidual("k x k^-1 = q^2 x", k @ x @ ki - x.scale(f.qpow(2))),
        RelationResidual("k y k^-1 = q^-2 y", k @ y @ ki - y.scale(f.qpow(-2))),
    ]
    x2, y2, k2, ki2 = x @ x, y @ y, k @ k, ki @ ki
    rhs_x = Matrix.zeros(tm.dim, tm.dim, f, raw=True)
    rhs_y = Matrix.zeros(tm.dim, tm.dim, f, raw=True)
    if eps_star:
        rhs_x = rhs_x + (x2 @ k2).scale(c.delta_prime)
        rhs_y = rhs_y - (k2 @ y2).scale(c.delta_prime)
    if eps:
        rhs_x = rhs_x - (ki2 @ x2).scale(c.delta_prime)
        rhs_y = rhs_y + (y2 @ ki2).scale(c.delta_prime)
    out.append(RelationResidual("[x, x^2 y - beta x y x + y x^2] = delta'(eps* x^2 k^2 - eps k^-2 x^2)",
                                _serre(x, y, c.beta) - rhs_x))
    out.append(RelationResidual("[y, y^2 x - beta y x y + x y^2] = delta'(-eps* k^2 y^2 + eps y^2 k^-2)",
                                _serre(y, x, c.beta) - rhs_y))
    return RelationReport(out)


@dataclass(frozen=True, eq=False)
class TDPairCandidate:
    A: Matrix
    A_star: Matrix
    t: Scalar
    parent: TModule

    @property
    def b(self) -> Scalar:
        return self.parent.type_s * self.t

    @property
    def b_star(self) -> Scalar:
        return self.parent.type_s / self.t


def iota_t(tm: TModule, t) -> TDPairCandidate:
    """A = x + t k + eps t^{-1} k^{-1},  A* = y + eps* t^{-1} k + t k^{-1}."""
    f = tm.field
    t = f.scalar(t)
    if not t:
        raise UsageError("t must be nonzero")
    tinv = t.inverse()
    eps, eps_star = tm.kind.epsilon, tm.kind.epsilon_star
    A = tm.x + tm.k.scale(t)
    if eps:
        A = A + tm.k_inv.scale(tinv)
    A_star = tm.y + tm.k_inv.scale(t)
    if eps_star:
        A_star = A_star + tm.k.scale(tinv)
    return TDPairCandidate(A, A_star, t, tm)


def verify_a_relations(c: TDPairCandidate) -> RelationReport:
    tm = c.parent
    f = tm.field
    consts = f.constants
    eps, eps_star = tm.kind.epsilon, tm.kind.epsilon_star
    A, As, k = c.A.to_raw(), c.A_star.to_raw(), tm.k.to_raw()
    t, tinv = c.t, c.t.inverse()
    ident = Matrix.identity(tm.dim, f, raw=True)
    q, qi = f.qpow(1), f.qpow(-1)
    inv_qdiff = (q - qi).inverse()
    k2 = k @ k
    rhs0 = k2.scale(t)
    if eps:
        rhs0 = rhs0 + ident.scale(tinv)
    rhs0s = ident.scale(t)
    if eps_star:
        rhs0s = rhs0s + k2.scale(tinv)
    out = [
        RelationResidual("(q A k - q^-1 k A)/(q - q^-1) = t k^2 + eps t^-1",
                         ((A @ k).scale(q) - (k @ A).scale(qi)).scale(inv_qdiff) - rhs0),
        RelationResidual("(q k A* - q^-1 A* k)/(q - q^-1) = eps* t^-1 k^2 + t",
                         ((k @ As).scale(q) - (As @ k).scale(qi)).scale(inv_qdiff) - rhs0s),
    ]
    comm = commutator(A, As)
    out.append(RelationResidual("[A, A^2 A* - beta A A* A + A* A^2] = eps delta [A, A*]",
                                _serre(A, As, consts.beta) - comm.scale(consts.delta * eps)))
    out.append(RelationResidual("[A*, A*^2 A - beta A* A A* + A A*^2] = eps* delta [A*, A]",
                                _serre(As, A, consts.beta) + comm.scale(consts.delta * eps_star)))
    return RelationReport(out)


@dataclass
class ThetaData:
    theta: list
    theta_star: list
    s: Scalar
    t: Scalar
    d: int
    b: Scalar
    b_star: Scalar
    theta_distinct: bool
    theta_star_distinct: bool
    theta_distinct_pairwise: bool
    theta_star_distinct_pairwise: bool

    @property
    def consistent(self) -> bool:
        """The closed-form conditions agree with the pairwise comparison."""
        return (self.theta_distinct == self.theta_distinct_pairwise
                and self.theta_star_distinct == self.theta_star_distinct_pairwise)

    def to_json(self) -> dict:
        return {
            "theta": [str(v) for v in self.theta],
            "theta_star": [str(v) for v in self.theta_star],
            "s": str(self.s), "t": str(self.t), "d": self.d,
            "b": str(self.b), "b_star": str(self.b_star),
            "theta_distinct": self.theta_distinct,
            "theta_star_distinct": self.theta_star_distinct,
        }


def _all_distinct(values) -> bool:
    return len(set(values)) == len(values)


def power_condition(field: FieldConfig, value: Scalar, eps: int, d: int) -> bool:
    """True when value != +-eps q^i for every 1-d <= i <= d-1."""
    if not eps:
        return True
    for sign in (1, -1):
        i = field.q_power_ratio(field.scalar(sign), value)
        if i is not None and abs(i) <= d - 1:
            return False
    return True


def theta_sequences(s, t, d: int, kind: AlgebraKind, field: FieldConfig | None = None) -> ThetaData:
    field = field or s.field
    s, t = field.scalar(s), field.scalar(t)
    if not s or not t:
        raise UsageError("s and t must be nonzero")
    eps, eps_star = kind.epsilon, kind.epsilon_star
    qp = field.qpow
    b = s * t
    b_star = s / t
    theta, theta_star = [], []
    for i in range(d + 1):
        up, down = qp(2 * i - d), qp(d - 2 * i)
        th = b * up
        if eps:
            th = th + down / b
        ths = down / b_star
        if eps_star:
            ths = ths + b_star * up
        theta.append(th)
        theta_star.append(ths)
    return ThetaData(
        theta, theta_star, s, t, d, b, b_star,
        power_condition(field, b, eps, d),
        power_condition(field, b_star, eps_star, d),
        _all_distinct(theta), _all_distinct(theta_star),
    )


def st_equivalents(s, t, kind: AlgebraKind) -> list[tuple[Scalar, Scalar]]:
    """Pairs (s', t') giving the same family of TD-pairs as (s, t), up to eigenvalue reordering."""
    sinv, tinv = s.inverse(), t.inverse()
    base = [(s, t)]
    if kind.epsilon:
        base.append((tinv, sinv))
    if kind.epsilon and kind.epsilon_star:
        base += [(t, s), (sinv, tinv)]
    out = []
    for a, b in base:
        for pair in ((a, b), (-a, -b)):
            if pair not in out:
                out.append(pair)
    return out
