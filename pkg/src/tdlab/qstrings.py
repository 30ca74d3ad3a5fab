"""q-strings S(l, a) = {a q^{2i-l+1} : 0 <= i < l} and their combinatorics."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .errors import FieldExtensionError, MultisetError, RealizationError, UsageError
from .field import FieldConfig, Scalar
from .loopmod import KIND_1, AlgebraKind, EvalFactor, ModuleSpec
from .poly import Polynomial
from .tdalg import power_condition

# condition tags used in classification reports
GENERAL_POSITION = "general_position"
TYPE_EXCLUDED = "type_not_in_strings"
DIAMETER = "diameter"
T_EXCLUDED = "t_not_in_strings"
THETA_DISTINCT = "theta_distinct"
THETA_STAR_DISTINCT = "theta_star_distinct"


@dataclass(frozen=True)
class QString:
    ell: int
    a: Scalar

    def __post_init__(self):
        if self.ell < 1:
            raise UsageError("q-strings need ell >= 1")
        if not self.a:
            raise UsageError("q-strings need a != 0")

    @property
    def field(self) -> FieldConfig:
        return self.a.field

    def elements(self) -> list[Scalar]:
        f = self.field
        return [self.a * f.qpow(2 * i - self.ell + 1) for i in range(self.ell)]

    def inverse(self) -> QString:
        return QString(self.ell, self.a.inverse())

    def contains(self, c) -> bool:
        """Membership through the ratio a^{-1} c = q^j with |j| <= l-1 and j = l-1 mod 2."""
        c = self.field.scalar(c)
        if not c:
            return False
        j = self.field.q_power_ratio(self.a, c)
        return j is not None and abs(j) <= self.ell - 1 and (j - self.ell + 1) % 2 == 0

    def contains_enumerated(self, c) -> bool:
        c = self.field.scalar(c)
        return any(c == e for e in self.elements())

    def sort_key(self) -> tuple:
        return (self.ell, self.a.sort_key())

    def to_json(self) -> dict:
        return {"ell": self.ell, "a": str(self.a)}

    def __str__(self):
        return f"S({self.ell},{self.a})"


class QStringMultiset:
    """Finite multiset of q-strings; equality ignores order."""

    __slots__ = ("strings",)

    def __init__(self, strings=()):
        self.strings = tuple(strings)

    def __iter__(self):
        return iter(self.strings)

    def __len__(self):
        return len(self.strings)

    def canonical(self) -> tuple:
        return tuple(sorted(self.strings, key=QString.sort_key))

    def __eq__(self, other):
        if not isinstance(other, QStringMultiset):
            return NotImplemented
        return Counter(self.strings) == Counter(other.strings)

    def __hash__(self):
        return hash(self.canonical())

    def union(self) -> Counter:
        out = Counter()
        for s in self.strings:
            out.update(s.elements())
        return out

    def symmetric_union(self) -> Counter:
        out = Counter()
        for s in self.strings:
            out.update(s.elements())
            out.update(s.inverse().elements())
        return out

    def to_json(self) -> list[dict]:
        return [s.to_json() for s in self.canonical()]

    @classmethod
    def from_json(cls, data, field: FieldConfig) -> QStringMultiset:
        return cls(QString(int(d["ell"]), field.scalar(str(d["a"]))) for d in data)

    @classmethod
    def from_spec(cls, spec: ModuleSpec) -> QStringMultiset:
        return cls(QString(f.ell, f.a) for f in spec.factors)

    def __repr__(self):
        return "{" + ", ".join(str(s) for s in self.canonical()) + "}"


class ScalarMultiset:
    """Finite multiset of scalars, kept as value -> multiplicity."""

    __slots__ = ("counts",)

    def __init__(self, values=()):
        if isinstance(values, Counter):
            self.counts = Counter({k: v for k, v in values.items() if v > 0})
        else:
            self.counts = Counter(values)

    @classmethod
    def from_entries(cls, entries) -> ScalarMultiset:
        c = Counter()
        for value, mult in entries:
            if mult < 1:
                raise MultisetError("multiplicities must be >= 1")
            c[value] += mult
        return cls(c)

    def elements(self) -> list[Scalar]:
        out = []
        for v in sorted(self.counts, key=Scalar.sort_key):
            out.extend([v] * self.counts[v])
        return out

    def __len__(self):
        return sum(self.counts.values())

    def __eq__(self, other):
        if isinstance(other, ScalarMultiset):
            return self.counts == other.counts
        if isinstance(other, Counter):
            return self.counts == other
        return NotImplemented

    def to_json(self) -> list[dict]:
        return [{"value": str(v), "mult": self.counts[v]} for v in sorted(self.counts, key=Scalar.sort_key)]

    @classmethod
    def from_json(cls, data, field: FieldConfig) -> ScalarMultiset:
        entries = []
        for d in data:
            if isinstance(d, dict):
                entries.append((field.scalar(str(d["value"])), int(d.get("mult", 1))))
            else:
                entries.append((field.scalar(str(d)), 1))
        return cls.from_entries(entries)


def _as_multiset(omega) -> ScalarMultiset:
    if isinstance(omega, ScalarMultiset):
        return omega
    return ScalarMultiset(list(omega))


# adjacency and position ---------------------------------------------------

def adjacent(s1: QString, s2: QString) -> bool:
    """a^{-1} a' = q^{+-i} with i in {|l-l'|+2, |l-l'|+4, ..., l+l'}."""
    i = s1.field.q_power_ratio(s1.a, s2.a)
    if i is None:
        return False
    i = abs(i)
    lo = abs(s1.ell - s2.ell) + 2
    return lo <= i <= s1.ell + s2.ell and (i - lo) % 2 == 0


def adjacent_by_union(s1: QString, s2: QString) -> bool:
    """Element-level check: the union is a q-string strictly longer than both."""
    f = s1.field
    elems = set(s1.elements()) | set(s2.elements())
    base = s1.elements()[0]
    pos = []
    for e in elems:
        j = f.q_power_ratio(base, e)
        if j is None or j % 2:
            return False
        pos.append(j // 2)
    pos.sort()
    contiguous = pos == list(range(pos[0], pos[0] + len(pos)))
    return contiguous and len(pos) > max(s1.ell, s2.ell)


def general_position(ms) -> bool:
    strings = list(ms)
    for i in range(len(strings)):
        for j in range(i + 1, len(strings)):
            if adjacent(strings[i], strings[j]):
                return False
    return True


def strongly_general_position(ms) -> bool:
    # inverting both strings of a pair preserves adjacency, so two sign choices suffice
    strings = list(ms)
    for i in range(len(strings)):
        for j in range(i + 1, len(strings)):
            if adjacent(strings[i], strings[j]) or adjacent(strings[i], strings[j].inverse()):
                return False
    return True


def _canonical_inverse_class(s: QString) -> tuple:
    a, ai = s.a, s.a.inverse()
    return (s.ell, min(a.sort_key(), ai.sort_key()))


def equivalent(m1, m2) -> bool:
    """Same strings up to permutation and replacing a by a^{-1} in each string.

    Matching S(l,a) with S(l',a') iff l = l' and a' in {a, a^{-1}} is an
    equivalence relation, so a perfect matching exists exactly when the class
    counts agree.
    """
    m1, m2 = list(m1), list(m2)
    if len(m1) != len(m2):
        return False
    return Counter(map(_canonical_inverse_class, m1)) == Counter(map(_canonical_inverse_class, m2))


# decompositions -----------------------------------------------------------

def _ladder_classes(counts: Counter, field: FieldConfig) -> list[tuple[Scalar, dict]]:
    """Group values into q^2-ladders: list of (base, {position: multiplicity})."""
    classes: list[tuple[Scalar, dict]] = []
    for v in sorted(counts, key=Scalar.sort_key):
        for base, pos in classes:
            j = field.q_power_ratio(base, v)
            if j is not None and j % 2 == 0:
                pos[j // 2] = pos.get(j // 2, 0) + counts[v]
                break
        else:
            classes.append((v, {0: counts[v]}))
    return classes


def decompose(omega) -> QStringMultiset:
    """The unique general-position multiset of q-strings whose union is omega."""
    ms = _as_multiset(omega)
    if not ms.counts:
        return QStringMultiset()
    field = next(iter(ms.counts)).field
    if any(not v for v in ms.counts):
        raise MultisetError("omega must not contain 0")
    out = []
    for base, pos in _ladder_classes(ms.counts, field):
        mult = dict(pos)
        while mult:
            start = min(mult)
            end = start
            while end + 1 in mult:
                end += 1
            # maximal run [start, end]; take one copy of each element
            for e in range(start, end + 1):
                mult[e] -= 1
                if not mult[e]:
                    del mult[e]
            ell = end - start + 1
            a = base * field.qpow(2 * start + ell - 1)
            out.append(QString(ell, a))
    return QStringMultiset(sorted(out, key=QString.sort_key))


def _check_symmetric(counts: Counter) -> None:
    for v, m in counts.items():
        if not v:
            raise MultisetError("omega must not contain 0")
        if counts.get(v.inverse(), 0) != m:
            raise MultisetError(f"omega is not inversion-symmetric at {v}")
        if (v == 1 or v == -1) and m % 2:
            raise MultisetError(f"{v} must appear an even number of times")


def _maximal_element(counts: Counter, field: FieldConfig) -> Scalar:
    values = [v for v, m in counts.items() if m > 0]
    maximal = []
    for c in values:
        above = False
        for other in values:
            if other == c:
                continue
            j = field.q_power_ratio(c, other)
            if j is not None and j > 0 and j % 2 == 0:
                above = True
                break
        if not above:
            maximal.append(c)
    return min(maximal, key=Scalar.sort_key)


def decompose_symmetric(omega) -> QStringMultiset:
    """Strongly-general-position strings with omega = union of S(l_i,a_i) and S(l_i,a_i^{-1}).

    Peels off a maximal c together with c^{-1}, solves the smaller problem, then
    either lengthens the longest string that c extends or appends S(1, c).
    """
    ms = _as_multiset(omega)
    counts = Counter(ms.counts)
    _check_symmetric(counts)
    if not counts:
        return QStringMultiset()
    field = next(iter(counts)).field
    peeled = []
    while +counts:
        counts = +counts
        c = _maximal_element(counts, field)
        counts[c] -= 1
        counts[c.inverse()] -= 1
        peeled.append(c)
    strings: list[QString] = []
    for c in reversed(peeled):
        cinv = c.inverse()
        best = None
        for idx, s in enumerate(strings):
            top = s.a * field.qpow(s.ell + 1)
            bottom = s.a * field.qpow(-s.ell - 1)
            if c == top:
                cand = (s.ell, idx, False)
            elif cinv == bottom:
                cand = (s.ell, idx, True)
            else:
                continue
            if best is None or cand[0] > best[0]:
                best = cand
        if best is None:
            strings.append(QString(1, c))
        else:
            ell, idx, flip = best
            a = strings[idx].a.inverse() if flip else strings[idx].a
            strings[idx] = QString(ell + 1, a * field.qpow(1))
    return QStringMultiset(strings)


# classification -----------------------------------------------------------

@dataclass
class ClassificationReport:
    irreducible_as_T_module: bool
    m_sdt_member: bool | None
    failed_conditions: list
    b: Scalar | None
    b_star: Scalar | None
    d: int

    def to_json(self) -> dict:
        return {
            "irreducible_as_T_module": self.irreducible_as_T_module,
            "m_sdt_member": self.m_sdt_member,
            "failed_conditions": list(self.failed_conditions),
            "b": None if self.b is None else str(self.b),
            "b_star": None if self.b_star is None else str(self.b_star),
            "d": self.d,
        }


def _hits(strings, value, with_inverse: bool) -> bool:
    for s in strings:
        if s.contains(value) or (with_inverse and s.inverse().contains(value)):
            return True
    return False


def classify_module(spec: ModuleSpec, s, t=None, field: FieldConfig | None = None) -> ClassificationReport:
    """Irreducibility of V via phi_s, and membership in the (s, d, t) class when t is given."""
    kind = spec.kind
    if field is None:
        field = spec.factors[0].a.field if spec.factors else None
    if field is None:
        raise UsageError("classify_module needs a field for specs without strings")
    s = field.scalar(s)
    strings = list(QStringMultiset.from_spec(spec))
    d = spec.diameter
    failed = []
    first = (kind.epsilon, kind.epsilon_star) == (1, 1)
    pos_ok = strongly_general_position(strings) if first else general_position(strings)
    if not pos_ok:
        failed.append(GENERAL_POSITION)
    if first:
        if _hits(strings, -(s * s), True):
            failed.append(TYPE_EXCLUDED)
    elif kind.is_borel:
        if _hits(strings, -(s * s).inverse(), False):
            failed.append(TYPE_EXCLUDED)
    if sum(f.ell for f in spec.all_factors) != d:
        failed.append(DIAMETER)
    irreducible = not failed
    b = b_star = None
    member = None
    if t is not None:
        t = field.scalar(t)
        b, b_star = s * t, s / t
        if not power_condition(field, b, kind.epsilon, d):
            failed.append(THETA_DISTINCT)
        if not power_condition(field, b_star, kind.epsilon_star, d):
            failed.append(THETA_STAR_DISTINCT)
        if _hits(strings, -(t * t), first):
            failed.append(T_EXCLUDED)
        member = not failed
    return ClassificationReport(irreducible, member, failed, b, b_star, d)


def realize_polynomial(roots, kind: AlgebraKind, s, field: FieldConfig | None = None) -> ModuleSpec:
    """A module spec whose Drinfel'd polynomial has exactly the given roots."""
    kind = AlgebraKind.parse(kind)
    roots = list(roots)
    if field is None:
        if not roots:
            raise UsageError("realize_polynomial needs a field when no roots are given")
        field = roots[0].field
    roots = [field.scalar(r) for r in roots]
    s = field.scalar(s)
    s2 = s * s
    forbidden = field.zero
    if kind.epsilon:
        forbidden = forbidden + s2.inverse()
    if kind.epsilon_star:
        forbidden = forbidden + s2
    p = Polynomial.from_roots(roots, field)
    if not p(forbidden):
        raise RealizationError(f"the polynomial vanishes at the forbidden value {forbidden}")
    if kind == KIND_1:
        omega = []
        for lam in roots:
            disc = field.sqrt(lam * lam - 4)
            if disc is None:
                raise FieldExtensionError(f"zeta^2 + ({lam}) zeta + 1 does not split over Q(sqrt({field.D}))")
            z1 = (-lam + disc) / 2
            z2 = (-lam - disc) / 2
            omega.extend([z1, z2])
        strings = decompose_symmetric(omega)
        return ModuleSpec(kind, [EvalFactor(x.ell, x.a) for x in strings.canonical()])
    zeros = sum(1 for lam in roots if not lam)
    omega = [-lam for lam in roots if lam]
    strings = decompose(omega) if omega else QStringMultiset()
    factors = [EvalFactor(x.ell, x.a) for x in strings.canonical()]
    if kind.is_borel:
        return ModuleSpec(kind, factors, zeros)
    if zeros:
        raise RealizationError("kind (0,0) polynomials cannot have the root 0")
    return ModuleSpec(kind, factors)
