"""Exact matrices and subspaces over Q(sqrt(D)).

Matrices keep dense-matrix semantics but store each row as a dict
{column: nonzero Scalar}; the generator matrices of graded modules are very
sparse, so products and eliminations only touch the nonzero entries.
Vectors are dicts {index: nonzero Scalar} as well.
"""
from __future__ import annotations

from gmpy2 import mpq

from .field import FieldConfig, Scalar, _new

Vector = dict
_RAW_ZERO = mpq(0)
_RAW_ONE = mpq(1)


def vec_add(u: Vector, v: Vector, c: Scalar | None = None) -> Vector:
    """u + c*v as a new vector (c defaults to 1)."""
    out = dict(u)
    for j, b in v.items():
        val = b if c is None else c * b
        if j in out:
            s = out[j] + val
            if s:
                out[j] = s
            else:
                del out[j]
        else:
            out[j] = val
    return out


def vec_sub(u: Vector, v: Vector) -> Vector:
    out = dict(u)
    for j, b in v.items():
        if j in out:
            s = out[j] - b
            if s:
                out[j] = s
            else:
                del out[j]
        else:
            out[j] = -b
    return out


def _axpy_inplace(u: Vector, c: Scalar, v: Vector) -> None:
    for j, b in v.items():
        if j in u:
            s = u[j] + c * b
            if s:
                u[j] = s
            else:
                del u[j]
        else:
            u[j] = c * b


def raw_vec(v: Vector, field: FieldConfig) -> Vector:
    """Plain-rational copy of v when the field is Q (see Matrix.raw)."""
    if field.D:
        return v
    return {j: c.x for j, c in v.items()}


def cooked_vec(v: Vector, field: FieldConfig) -> Vector:
    if field.D:
        return v
    return {j: _new(c, _RAW_ZERO, field) for j, c in v.items()}


def vec_scale(v: Vector, c: Scalar) -> Vector:
    if not c:
        return {}
    return {j: c * b for j, b in v.items()}


def vec_from_dense(values, field: FieldConfig) -> Vector:
    out = {}
    for j, b in enumerate(values):
        b = field.scalar(b)
        if b:
            out[j] = b
    return out


class Matrix:
    """Immutable nrows x ncols matrix with Scalar entries.

    A matrix flagged ``raw`` holds plain gmpy2 rationals instead of Scalars
    when the field is Q; the sparse kernels only use +, -, * and truth
    testing, so they run unchanged and several times faster on raw entries.
    """

    __slots__ = ("nrows", "ncols", "rows", "field", "_cols", "raw")

    def __init__(self, nrows: int, ncols: int, rows, field: FieldConfig, raw: bool = False):
        self.nrows = nrows
        self.ncols = ncols
        self.rows = tuple(rows)
        self.field = field
        self._cols = None
        self.raw = raw

    def _same(self, rows, nrows=None, ncols=None) -> Matrix:
        return Matrix(self.nrows if nrows is None else nrows, self.ncols if ncols is None else ncols,
                      rows, self.field, self.raw)

    def to_raw(self) -> Matrix:
        if self.raw:
            return self
        if self.field.D:
            return Matrix(self.nrows, self.ncols, [dict(r) for r in self.rows], self.field, True)
        return Matrix(self.nrows, self.ncols, [{j: v.x for j, v in r.items()} for r in self.rows],
                      self.field, True)

    def from_raw(self) -> Matrix:
        if not self.raw:
            return self
        if self.field.D:
            return Matrix(self.nrows, self.ncols, [dict(r) for r in self.rows], self.field)
        f = self.field
        return Matrix(self.nrows, self.ncols,
                      [{j: _new(v, _RAW_ZERO, f) for j, v in r.items()} for r in self.rows], f)

    def _coef(self, c):
        c = self.field.scalar(c)
        if self.raw and not self.field.D:
            return c.x
        return c

    # constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, nrows: int, ncols: int, field: FieldConfig, raw: bool = False) -> Matrix:
        return cls(nrows, ncols, [{} for _ in range(nrows)], field, raw)

    @classmethod
    def identity(cls, n: int, field: FieldConfig, raw: bool = False) -> Matrix:
        one = _RAW_ONE if raw and not field.D else field.one
        return cls(n, n, [{i: one} for i in range(n)], field, raw)

    @classmethod
    def diagonal(cls, values, field: FieldConfig) -> Matrix:
        vals = [field.scalar(v) for v in values]
        return cls(len(vals), len(vals), [({i: v} if v else {}) for i, v in enumerate(vals)], field)

    @classmethod
    def from_dense(cls, rows, field: FieldConfig) -> Matrix:
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols, [vec_from_dense(r, field) for r in rows], field)

    @classmethod
    def from_entries(cls, nrows: int, ncols: int, entries, field: FieldConfig) -> Matrix:
        """Build from an iterable of (i, j, value); repeated positions add up."""
        rows = [{} for _ in range(nrows)]
        for i, j, v in entries:
            v = field.scalar(v)
            if not v:
                continue
            r = rows[i]
            s = r[j] + v if j in r else v
            if s:
                r[j] = s
            else:
                r.pop(j, None)
        return cls(nrows, ncols, rows, field)

    @classmethod
    def from_columns(cls, columns, nrows: int, field: FieldConfig) -> Matrix:
        rows = [{} for _ in range(nrows)]
        for j, col in enumerate(columns):
            for i, v in col.items():
                rows[i][j] = v
        return cls(nrows, len(columns), rows, field)

    # access -------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij) -> Scalar:
        i, j = ij
        v = self.rows[i].get(j)
        if v is None:
            return _RAW_ZERO if self.raw and not self.field.D else self.field.zero
        return v

    def columns(self) -> list[Vector]:
        if self._cols is None:
            cols = [{} for _ in range(self.ncols)]
            for i, r in enumerate(self.rows):
                for j, v in r.items():
                    cols[j][i] = v
            self._cols = cols
        return self._cols

    def column(self, j: int) -> Vector:
        return self.columns()[j]

    def nonzero_entries(self):
        for i, r in enumerate(self.rows):
            for j in sorted(r):
                yield i, j, r[j]

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def to_dense(self) -> list[list[Scalar]]:
        m = self.from_raw()
        z = self.field.zero
        return [[r.get(j, z) for j in range(self.ncols)] for r in m.rows]

    def to_json(self) -> list[list[str]]:
        return [[str(v) for v in row] for row in self.to_dense()]

    def is_zero(self) -> bool:
        return not any(self.rows)

    def is_diagonal(self) -> bool:
        return all(all(j == i for j in r) for i, r in enumerate(self.rows))

    def diagonal_entries(self) -> list[Scalar]:
        return [self[i, i] for i in range(min(self.nrows, self.ncols))]

    # arithmetic ---------------------------------------------------------

    def _check_same_shape(self, other: Matrix):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def _match(self, other: Matrix) -> Matrix:
        if other.raw == self.raw:
            return other
        return other.to_raw() if self.raw else other.from_raw()

    def __add__(self, other: Matrix) -> Matrix:
        self._check_same_shape(other)
        other = self._match(other)
        return self._same([vec_add(a, b) for a, b in zip(self.rows, other.rows)])

    def __sub__(self, other: Matrix) -> Matrix:
        self._check_same_shape(other)
        other = self._match(other)
        return self._same([vec_sub(a, b) for a, b in zip(self.rows, other.rows)])

    def __neg__(self) -> Matrix:
        return self._same([{j: -v for j, v in r.items()} for r in self.rows])

    def scale(self, c) -> Matrix:
        c = self._coef(c)
        return self._same([vec_scale(r, c) for r in self.rows])

    def __mul__(self, c):
        if isinstance(c, Matrix):
            return self @ c
        return self.scale(c)

    def __rmul__(self, c):
        return self.scale(c)

    def __matmul__(self, other):
        if isinstance(other, dict):
            return self.apply(other)
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        other = self._match(other)
        brows = other.rows
        out = []
        for r in self.rows:
            acc: Vector = {}
            for k, a in r.items():
                b = brows[k]
                if b:
                    _axpy_inplace(acc, a, b)
            out.append(acc)
        return self._same(out, ncols=other.ncols)

    def apply(self, v: Vector) -> Vector:
        """Matrix-vector product M v."""
        cols = self.columns()
        acc: Vector = {}
        for j, c in v.items():
            col = cols[j]
            if col:
                _axpy_inplace(acc, c, col)
        return acc

    def apply_transpose(self, v: Vector) -> Vector:
        """M^T v."""
        acc: Vector = {}
        rows = self.rows
        for i, c in v.items():
            r = rows[i]
            if r:
                _axpy_inplace(acc, c, r)
        return acc

    def transpose(self) -> Matrix:
        return self._same([dict(c) for c in self.columns()], self.ncols, self.nrows)

    @property
    def T(self) -> Matrix:
        return self.transpose()

    def kron(self, other: Matrix) -> Matrix:
        n2, m2 = other.nrows, other.ncols
        rows = []
        for ra in self.rows:
            for rb in other.rows:
                row = {}
                for j1, a in ra.items():
                    base = j1 * m2
                    for j2, b in rb.items():
                        row[base + j2] = a * b
                rows.append(row)
        return self._same(rows, self.nrows * n2, self.ncols * m2)

    def submatrix(self, row_idx, col_idx) -> Matrix:
        pos = {j: k for k, j in enumerate(col_idx)}
        rows = []
        for i in row_idx:
            rows.append({pos[j]: v for j, v in self.rows[i].items() if j in pos})
        return self._same(rows, len(row_idx), len(col_idx))

    def permute(self, perm) -> Matrix:
        """P M P^{-1} where basis vector i is sent to perm[i]."""
        rows = [None] * self.nrows
        for i, r in enumerate(self.rows):
            rows[perm[i]] = {perm[j]: v for j, v in r.items()}
        return self._same(rows)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.raw != other.raw:
            return self.from_raw() == other.from_raw()
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, tuple(tuple(sorted(r.items())) for r in self.rows)))

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


def commutator(a: Matrix, b: Matrix) -> Matrix:
    return a @ b - b @ a


class Echelon:
    """A subspace of F^n kept as a reduced row echelon basis.

    Pivots are the leading (smallest) indices of the rows; every row has a 1
    at its pivot and zeros at all other pivots, so the basis is canonical.
    """

    __slots__ = ("n", "field", "rows", "raw")

    def __init__(self, n: int, field: FieldConfig, vectors=(), raw: bool = False):
        self.n = n
        self.field = field
        self.raw = raw and not field.D
        self.rows: dict[int, Vector] = {}
        for v in vectors:
            self.add(v)

    def cooked(self) -> Echelon:
        """The same subspace with Scalar entries."""
        if not self.raw:
            return self
        e = Echelon(self.n, self.field)
        e.rows = {p: cooked_vec(r, self.field) for p, r in self.rows.items()}
        return e

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __len__(self):
        return len(self.rows)

    def reduce(self, v: Vector) -> Vector:
        rows = self.rows
        out = dict(v)
        for p in [k for k in v if k in rows]:
            c = out.get(p)
            if c:
                _axpy_inplace(out, -c, rows[p])
        return out

    def contains(self, v: Vector) -> bool:
        return not self.reduce(v)

    def add(self, v: Vector) -> bool:
        """Insert v; returns True when the dimension grew."""
        r = self.reduce(v)
        if not r:
            return False
        p = min(r)
        inv = _RAW_ONE / r[p] if self.raw else r[p].inverse()
        r = {j: inv * b for j, b in r.items()}
        for row in self.rows.values():
            c = row.get(p)
            if c:
                _axpy_inplace(row, -c, r)
        self.rows[p] = r
        return True

    def basis(self) -> list[Vector]:
        return [self.rows[p] for p in sorted(self.rows)]

    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def copy(self) -> Echelon:
        e = Echelon(self.n, self.field, raw=self.raw)
        e.rows = {p: dict(r) for p, r in self.rows.items()}
        return e

    def is_full(self) -> bool:
        return len(self.rows) == self.n

    def annihilator(self) -> Echelon:
        """{f : f . v = 0 for all v in the subspace} under the standard pairing."""
        vecs = nullspace_of_rows(self.basis(), self.n, self.field, raw_in=self.raw, raw_out=self.raw)
        return Echelon(self.n, self.field, vecs, raw=self.raw)

    def __eq__(self, other):
        if not isinstance(other, Echelon):
            return NotImplemented
        if self.raw != other.raw:
            return self.cooked() == other.cooked()
        return self.n == other.n and self.rows == other.rows

    def to_json(self) -> list[list[str]]:
        z = self.field.zero
        return [[str(v.get(j, z)) for j in range(self.n)] for v in self.basis()]


def nullspace_of_rows(rows, n: int, field: FieldConfig, raw_in: bool = False,
                      raw_out: bool = False) -> list[Vector]:
    """Basis of {x : r . x = 0 for every r in rows}, canonical order by free column."""
    e = Echelon(n, field, rows if raw_in else (raw_vec(r, field) for r in rows), raw=True)
    pivots = set(e.rows)
    out = []
    one = field.one if field.D else _RAW_ONE
    for f in range(n):
        if f in pivots:
            continue
        vec = {f: one}
        for p, row in e.rows.items():
            c = row.get(f)
            if c:
                vec[p] = -c
        out.append(vec if raw_out else cooked_vec(vec, field))
    return out


def nullspace(m: Matrix, raw_out: bool = False) -> list[Vector]:
    """Right kernel of m."""
    return nullspace_of_rows(m.rows, m.ncols, m.field, raw_in=m.raw, raw_out=raw_out)


def rank(m: Matrix) -> int:
    return Echelon(m.ncols, m.field, m.to_raw().rows, raw=True).dim


def span(vectors, n: int, field: FieldConfig) -> Echelon:
    return Echelon(n, field, vectors)


def subspace_sum(*spaces: Echelon) -> Echelon:
    out = spaces[0].copy()
    for s in spaces[1:]:
        for v in s.basis():
            out.add(v)
    return out


def intersection(u: Echelon, w: Echelon) -> Echelon:
    ann = subspace_sum(u.annihilator(), w.annihilator())
    return ann.annihilator()


def coordinates(basis: list[Vector], v: Vector, field: FieldConfig) -> list[Scalar] | None:
    """Coefficients c with sum c_i basis[i] = v, or None if v is outside the span.

    ``basis`` must be linearly independent.
    """
    k = len(basis)
    # rows of the transposed system: one unknown per basis vector plus v
    cols = list(basis) + [v]
    n = 1 + max([j for b in cols for j in b] + [0])
    system = Matrix.from_columns(cols, n, field)
    kernel = nullspace(system)
    for z in kernel:
        c = z.get(k)
        if c:
            scale = field.scalar(-1) / c
            return [scale * z.get(i, field.zero) for i in range(k)]
    return None


def spin(gens, seeds, n: int, field: FieldConfig, transpose: bool = False) -> Echelon:
    """Smallest subspace containing ``seeds`` and closed under every matrix in gens.

    With ``transpose`` the closure is taken under the transposed matrices.
    """
    gens = [g.to_raw() for g in gens]
    space = Echelon(n, field, raw=True)
    queue = []
    for s in seeds:
        s = raw_vec(s, field)
        if space.add(s):
            queue.append(s)
    while queue:
        v = queue.pop()
        for g in gens:
            w = g.apply_transpose(v) if transpose else g.apply(v)
            if w and space.add(w):
                queue.append(w)
                if space.is_full():
                    return space.cooked()
    return space.cooked()


def is_invariant(space: Echelon, gens) -> bool:
    return all(space.contains(g.apply(v)) for v in space.basis() for g in gens)
