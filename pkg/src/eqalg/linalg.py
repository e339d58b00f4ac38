"""Exact rational linear algebra.

Dense matrices (:class:`QMatrix`) serve the Mackey-functor and Burnside
computations, where dimensions stay small.  The chain complexes of
:mod:`eqalg.cdga` are much larger and very sparse; they go through
:class:`Echelon`, an incremental sparse row reducer keyed by arbitrary
hashable column labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Sequence

from gmpy2 import mpq

Rational = Fraction


class ContainmentError(ValueError):
    """Raised when a subspace is not contained in the one it should be."""


class DimensionError(ValueError):
    pass


def q(x) -> Fraction:
    """Coerce ints, strings like ``"3/4"``, Fractions and gmpy2 rationals to a
    Fraction with plain int parts."""
    if isinstance(x, Fraction):
        if type(x.numerator) is int:
            return x
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted")
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(int(x.numerator), int(x.denominator))


def fmt_q(x: Fraction) -> str:
    """Serialise a rational as ``p/q`` (or ``p`` when the denominator is 1)."""
    x = q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class QMatrix:
    """Immutable dense matrix of Fractions, stored row-major."""

    __slots__ = ("_rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(q(x) for x in r) for r in rows)
        if ncols is None:
            if not data:
                raise DimensionError("ncols required for a matrix with no rows")
            ncols = len(data[0])
        for r in data:
            if len(r) != ncols:
                raise DimensionError("ragged rows")
        self._rows = data
        self.nrows = len(data)
        self.ncols = ncols

    @classmethod
    def _raw(cls, rows: tuple, ncols: int) -> "QMatrix":
        m = object.__new__(cls)
        m._rows = rows
        m.nrows = len(rows)
        m.ncols = ncols
        return m

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "QMatrix":
        z = Fraction(0)
        return cls._raw(tuple((z,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        one, z = Fraction(1), Fraction(0)
        return cls._raw(tuple(tuple(one if i == j else z for j in range(n)) for i in range(n)), n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int) -> "QMatrix":
        if not cols:
            return cls.zeros(nrows, 0)
        return cls([[c[i] for c in cols] for i in range(nrows)], len(cols))

    @classmethod
    def scalar(cls, n: int, c) -> "QMatrix":
        c = q(c)
        z = Fraction(0)
        return cls._raw(tuple(tuple(c if i == j else z for j in range(n)) for i in range(n)), n)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self._rows[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._rows[i]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.ncols, self._rows))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(fmt_q(x) for x in r) for r in self._rows)
        return f"QMatrix({self.nrows}x{self.ncols}: [{body}])"

    def __add__(self, other: "QMatrix") -> "QMatrix":
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        return QMatrix._raw(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)), self.ncols
        )

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        return QMatrix._raw(
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)), self.ncols
        )

    def __neg__(self) -> "QMatrix":
        return QMatrix._raw(tuple(tuple(-a for a in r) for r in self._rows), self.ncols)

    def scale(self, c) -> "QMatrix":
        c = q(c)
        return QMatrix._raw(tuple(tuple(c * a for a in r) for r in self._rows), self.ncols)

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.ncols != other.nrows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns()
        zero = Fraction(0)
        out = []
        for r in self._rows:
            nz = [(k, a) for k, a in enumerate(r) if a]
            out.append(tuple(sum((a * c[k] for k, a in nz), zero) for c in cols))
        return QMatrix._raw(tuple(out), other.ncols)

    def apply(self, v: Sequence) -> tuple[Fraction, ...]:
        if len(v) != self.ncols:
            raise DimensionError("vector length mismatch")
        zero = Fraction(0)
        return tuple(sum((a * b for a, b in zip(r, v) if a and b), zero) for r in self._rows)

    def transpose(self) -> "QMatrix":
        if not self.nrows:
            return QMatrix.zeros(self.ncols, 0)
        return QMatrix._raw(tuple(zip(*self._rows)), self.nrows)

    def is_zero(self) -> bool:
        return all(not a for r in self._rows for a in r)

    def trace(self) -> Fraction:
        return sum((self._rows[i][i] for i in range(min(self.shape))), Fraction(0))

    def rank(self) -> int:
        return len(rref(self)[1])

    def inverse(self) -> "QMatrix":
        n = self.nrows
        if n != self.ncols:
            raise DimensionError("inverse of a non-square matrix")
        aug = QMatrix._raw(
            tuple(r + QMatrix.identity(n)._rows[i] for i, r in enumerate(self._rows)), 2 * n
        )
        red, piv = rref(aug)
        if piv[:n] != list(range(n)) or (len(piv) > n and piv[n] < n):
            raise ZeroDivisionError("matrix is singular")
        return QMatrix._raw(tuple(r[n:] for r in red._rows), n)

    def hstack(self, other: "QMatrix") -> "QMatrix":
        if self.nrows != other.nrows:
            raise DimensionError("row count mismatch")
        return QMatrix._raw(tuple(a + b for a, b in zip(self._rows, other._rows)), self.ncols + other.ncols)

    def vstack(self, other: "QMatrix") -> "QMatrix":
        if self.ncols != other.ncols:
            raise DimensionError("column count mismatch")
        return QMatrix._raw(self._rows + other._rows, self.ncols)

    def to_strings(self) -> list[list[str]]:
        return [[fmt_q(x) for x in r] for r in self._rows]


def rref(m: QMatrix) -> tuple[QMatrix, list[int]]:
    """Reduced row-echelon form and the list of pivot columns."""
    rows = [list(r) for r in m.rows]
    pivots: list[int] = []
    r = 0
    for c in range(m.ncols):
        if r == len(rows):
            break
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = Fraction(1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        pr = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    return QMatrix._raw(tuple(tuple(x) for x in rows), m.ncols), pivots


def solve(a: QMatrix, b: Sequence) -> tuple[Fraction, ...] | None:
    """One exact solution of ``a x = b``, or None if the system is inconsistent.

    Free variables are set to zero, so the answer is supported on the pivot
    columns of ``rref(a)``.
    """
    if len(b) != a.nrows:
        raise DimensionError("right-hand side length mismatch")
    aug = QMatrix._raw(tuple(r + (q(x),) for r, x in zip(a.rows, b)), a.ncols + 1)
    red, piv = rref(aug)
    if piv and piv[-1] == a.ncols:
        return None
    x = [Fraction(0)] * a.ncols
    for i, c in enumerate(piv):
        x[c] = red[i, a.ncols]
    x = tuple(x)
    assert a.apply(x) == tuple(q(v) for v in b)
    return x


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^ambient, canonically stored by its RREF basis rows."""

    ambient: int
    basis: QMatrix

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient: int) -> "Subspace":
        vecs = [tuple(q(x) for x in v) for v in vectors]
        if not vecs:
            return cls(ambient, QMatrix.zeros(0, ambient))
        red, piv = rref(QMatrix(vecs, ambient))
        return cls(ambient, QMatrix._raw(red.rows[: len(piv)], ambient))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, QMatrix.identity(n))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, QMatrix.zeros(0, n))

    @property
    def dim(self) -> int:
        return self.basis.nrows

    def vectors(self) -> list[tuple[Fraction, ...]]:
        return list(self.basis.rows)

    def contains_vector(self, v: Sequence) -> bool:
        return Subspace.span(self.vectors() + [tuple(v)], self.ambient).dim == self.dim

    def contains(self, other: "Subspace") -> bool:
        return self.ambient == other.ambient and self.sum(other).dim == self.dim

    def sum(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.vectors() + other.vectors(), self.ambient)


def image(m: QMatrix) -> Subspace:
    """Column space of ``m``."""
    return Subspace.span(m.columns(), m.nrows)


def kernel(a: QMatrix) -> Subspace:
    """Null space of ``a``, of dimension ``cols - rank``."""
    red, piv = rref(a)
    free = [c for c in range(a.ncols) if c not in set(piv)]
    vecs = []
    for f in free:
        v = [Fraction(0)] * a.ncols
        v[f] = Fraction(1)
        for i, c in enumerate(piv):
            v[c] = -red[i, f]
        vecs.append(v)
    return Subspace.span(vecs, a.ncols)


@dataclass(frozen=True)
class Quotient:
    """``v / w`` with an explicit projection and a section.

    ``projection`` maps Q^ambient onto Q^dim and kills ``w``; ``section`` maps
    Q^dim back into ``v`` using chosen coset representatives.
    """

    dim: int
    projection: QMatrix
    section: QMatrix


class _Extender:
    """Dense incremental elimination: ``add`` reports whether a vector is new."""

    def __init__(self):
        self.rows: list[tuple[int, list[Fraction]]] = []

    def add(self, vec) -> bool:
        r = list(vec)
        for p, row in self.rows:
            c = r[p]
            if c:
                r = [a - c * b for a, b in zip(r, row)]
        p = next((i for i, a in enumerate(r) if a), None)
        if p is None:
            return False
        c = r[p]
        self.rows.append((p, [a / c for a in r]))
        return True


def quotient(v: Subspace, w: Subspace) -> Quotient:
    if v.ambient != w.ambient:
        raise DimensionError("ambient dimensions differ")
    if not v.contains(w):
        raise ContainmentError("w is not contained in v")
    n = v.ambient
    # complete a basis of w to a basis of v, then to a basis of Q^n
    ext = _Extender()
    for vec in w.vectors():
        ext.add(vec)
    reps = [vec for vec in v.vectors() if ext.add(vec)]
    others = []
    for i in range(n):
        e = tuple(Fraction(int(i == j)) for j in range(n))
        if ext.add(e):
            others.append(e)
    k = len(reps)
    if n == 0:
        return Quotient(0, QMatrix.zeros(0, 0), QMatrix.zeros(0, 0))
    basis = QMatrix.from_columns(list(w.vectors()) + reps + others, n)
    inv = basis.inverse()
    start = w.dim
    proj = QMatrix._raw(inv.rows[start:start + k], n) if k else QMatrix.zeros(0, n)
    section = QMatrix.from_columns(reps, n) if k else QMatrix.zeros(n, 0)
    return Quotient(k, proj, section)


# ---------------------------------------------------------------------------
# sparse incremental elimination


class Echelon:
    """Incremental sparse row echelon form.

    Vectors are dicts ``label -> rational``; results carry ``gmpy2.mpq``
    coefficients, which compare and hash like Fractions.  Each stored row has its pivot at
    the label of largest ``key``; reducing a vector eliminates every pivot
    label, so :meth:`reduce` returns a canonical normal form modulo the span.

    With ``track=True`` every row carries the combination of inserted vectors
    (by insertion tag) that produced it, which is what :meth:`express`
    and kernel extraction rely on.
    """

    def __init__(self, key: Callable[[Hashable], object], track: bool = False):
        self.key = key
        self.track = track
        self.rows: dict[Hashable, tuple[dict, dict | None]] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def _reduce(self, v: dict, tag: dict | None):
        # rows hold gmpy2 rationals; the arithmetic here is the hot loop of
        # every homology computation
        v = {c: mpq(a) for c, a in v.items() if a}
        rows = self.rows
        key = self.key
        while True:
            hits = [c for c in v if c in rows]
            if not hits:
                return v, tag
            c = max(hits, key=key)
            f = v[c]
            row, rtag = rows[c]
            for col, a in row.items():
                nv = v.get(col, 0) - f * a
                if nv:
                    v[col] = nv
                else:
                    v.pop(col, None)
            if tag is not None:
                for t, a in rtag.items():
                    nt = tag.get(t, 0) - f * a
                    if nt:
                        tag[t] = nt
                    else:
                        tag.pop(t, None)

    def reduce(self, v: dict) -> dict:
        return self._reduce(v, None)[0]

    def add(self, v: dict, tag: Hashable = None) -> dict | None:
        """Insert ``v``.  Returns None if it was independent, otherwise the
        dependency: a combination of earlier tags equal to ``v`` is recorded as
        ``{tag: 1, earlier...: -coeffs}`` summing to zero (tracking mode), or
        ``{}`` when not tracking."""
        t0 = {tag: mpq(1)} if self.track else None
        r, t = self._reduce(v, t0)
        if not r:
            return t if self.track else {}
        c = max(r, key=self.key)
        inv = 1 / r[c]
        r = {k: a * inv for k, a in r.items()}
        if t is not None:
            t = {k: a * inv for k, a in t.items()}
        self.rows[c] = (r, t)
        return None

    def contains(self, v: dict) -> bool:
        return not self.reduce(v)

    def express(self, v: dict) -> dict | None:
        """Coefficients (by tag) of a combination of inserted vectors equal to
        ``v``, or None if ``v`` is not in the span.  Only independent inserted
        vectors receive nonzero coefficients."""
        if not self.track:
            raise ValueError("express needs a tracking Echelon")
        r, t = self._reduce(v, {})
        if r:
            return None
        return {k: -a for k, a in t.items()}


def sparse_kernel(columns: Sequence[dict], key: Callable) -> list[dict[int, Fraction]]:
    """Basis of the kernel of the linear map sending basis vector ``i`` to
    ``columns[i]``; kernel vectors are dicts ``index -> coefficient``."""
    ech = Echelon(key, track=True)
    out = []
    for i, col in enumerate(columns):
        dep = ech.add(col, i)
        if dep is not None:
            out.append(dep)
    return out
