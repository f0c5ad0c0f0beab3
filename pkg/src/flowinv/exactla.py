"""Exact integer linear algebra: determinants, Smith normal form, cokernels.

Everything here runs on Python's arbitrary-precision integers; no floating
point is involved anywhere.  The functions are deterministic: the same input
always yields the same decomposition, so downstream invariant reports are
reproducible bit for bit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from math import gcd


class Ternary(Enum):
    """Verdict of a decision procedure that may hit a resource bound."""

    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    def __bool__(self):
        # Forcing explicit comparison; truthiness of an enum member would
        # silently treat NO/UNKNOWN as True.
        raise TypeError("Ternary verdicts must be compared explicitly")


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix, row-major, immutable."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_rows(rows) -> "IntMatrix":
        data = tuple(tuple(int(x) for x in row) for row in rows)
        if not data:
            raise ValueError("matrix needs at least one row")
        width = len(data[0])
        if width == 0:
            raise ValueError("matrix needs at least one column")
        if any(len(row) != width for row in data):
            raise ValueError("ragged rows")
        return IntMatrix(len(data), width, data)

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix.from_rows(
            [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def zeros(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix.from_rows([[0] * cols for _ in range(rows)])

    def __getitem__(self, ij) -> int:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)]
        )

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix.from_rows(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._same_shape(other)
        return IntMatrix.from_rows(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.shape} @ {other.shape}")
        cols = other.transpose().entries
        return IntMatrix.from_rows(
            [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in self.entries]
        )

    def mul_vector(self, vec) -> tuple[int, ...]:
        v = tuple(int(x) for x in vec)
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.entries)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return IntMatrix.from_rows(
            [list(ra) + list(rb) for ra, rb in zip(self.entries, other.entries)]
        )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    def __str__(self) -> str:
        return "\n".join(" ".join(str(x) for x in row) for row in self.entries)

    def _same_shape(self, other: "IntMatrix") -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")


def det(a: IntMatrix) -> int:
    """Determinant by the Bareiss fraction-free elimination, exact.

    Examples
    --------
    >>> det(IntMatrix.from_rows([[-3]]))
    -3
    >>> det(IntMatrix.from_rows([[0, -3], [-1, -1]]))
    -3
    """
    if not a.is_square:
        raise ValueError("determinant requires a square matrix")
    n = a.rows
    m = [list(row) for row in a.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ A @ V = S with U, V unimodular and S in Smith normal form."""

    u: IntMatrix
    s: IntMatrix
    v: IntMatrix

    def diagonal(self) -> tuple[int, ...]:
        n = min(self.s.rows, self.s.cols)
        return tuple(self.s[i, i] for i in range(n))


def smith_normal_form(a: IntMatrix) -> SmithDecomposition:
    """Smith normal form over the integers.

    The diagonal of S is non-negative, each entry divides the next, and zero
    entries come last.  Pivoting always selects the nonzero entry of least
    absolute value in the remaining submatrix (ties broken by smallest row,
    then smallest column index), making the decomposition deterministic.
    """
    nr, nc = a.rows, a.cols
    s = [list(row) for row in a.entries]
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    v = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def row_sub(i, j, q):
        # row i -= q * row j
        si, sj = s[i], s[j]
        for t in range(nc):
            si[t] -= q * sj[t]
        ui, uj = u[i], u[j]
        for t in range(nr):
            ui[t] -= q * uj[t]

    def col_sub(i, j, q):
        # col i -= q * col j
        for row in s:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    def find_pivot(k):
        best = None
        for i in range(k, nr):
            row = s[i]
            for j in range(k, nc):
                e = row[j]
                if e and (best is None or abs(e) < abs(s[best[0]][best[1]])):
                    best = (i, j)
        return best

    k = 0
    limit = min(nr, nc)
    while k < limit:
        piv = find_pivot(k)
        if piv is None:
            break
        if piv[0] != k:
            swap_rows(k, piv[0])
        if piv[1] != k:
            swap_cols(k, piv[1])
        pivot = s[k][k]
        dirty = False
        for i in range(nr):
            if i != k and s[i][k]:
                q = s[i][k] // pivot
                if q:
                    row_sub(i, k, q)
                if s[i][k]:
                    dirty = True
        for j in range(nc):
            if j != k and s[k][j]:
                q = s[k][j] // pivot
                if q:
                    col_sub(j, k, q)
                if s[k][j]:
                    dirty = True
        if dirty:
            continue
        offender = None
        for i in range(k + 1, nr):
            row = s[i]
            for j in range(k + 1, nc):
                if row[j] % pivot:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            # Pull the non-divisible row up next to the pivot and reduce again.
            row_sub(k, offender, -1)
            continue
        k += 1

    for i in range(limit):
        if s[i][i] < 0:
            for row in s:
                row[i] = -row[i]
            for row in v:
                row[i] = -row[i]

    return SmithDecomposition(
        IntMatrix.from_rows(u), IntMatrix.from_rows(s), IntMatrix.from_rows(v)
    )


@dataclass(frozen=True)
class AbelianGroup:
    """Finitely generated abelian group in invariant-factor form.

    ``torsion`` lists the invariant factors that are at least 2, each
    dividing the next; ``free_rank`` counts the Z summands.
    """

    torsion: tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        for d in self.torsion:
            if d < 2:
                raise ValueError("invariant factors must be at least 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError("invariant factors must form a divisibility chain")

    @property
    def is_trivial(self) -> bool:
        return not self.torsion and self.free_rank == 0

    def torsion_order(self) -> int:
        order = 1
        for d in self.torsion:
            order *= d
        return order

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion]
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class CokernelProjection:
    """Maps an integer vector to its class in coker(A) coordinates.

    Coordinates follow the group's invariant factors: one residue per torsion
    factor, then one integer per free summand.
    """

    u: IntMatrix
    diagonal: tuple[int, ...]

    def __call__(self, vec) -> tuple[int, ...]:
        y = self.u.mul_vector(vec)
        torsion = [y[i] % d for i, d in enumerate(self.diagonal) if d >= 2]
        free = [y[i] for i, d in enumerate(self.diagonal) if d == 0]
        return tuple(torsion + free)


def cokernel(a: IntMatrix) -> tuple[AbelianGroup, CokernelProjection]:
    """Cokernel Z^n / A Z^n of a square integer matrix.

    Examples
    --------
    >>> group, project = cokernel(IntMatrix.from_rows([[-3]]))
    >>> str(group), project([1])
    ('Z/3', (1,))
    """
    if not a.is_square:
        raise ValueError("cokernel requires a square matrix")
    dec = smith_normal_form(a)
    diag = dec.diagonal()
    group = AbelianGroup(
        torsion=tuple(d for d in diag if d >= 2),
        free_rank=sum(1 for d in diag if d == 0),
    )
    return group, CokernelProjection(dec.u, diag)


def group_iso(a: AbelianGroup, b: AbelianGroup) -> bool:
    """Whether two groups in invariant-factor form are isomorphic."""
    return a == b


@dataclass(frozen=True)
class PointedGroup:
    """A finitely generated abelian group with a marked element."""

    group: AbelianGroup
    point: tuple[int, ...]

    def __post_init__(self):
        expected = len(self.group.torsion) + self.group.free_rank
        if len(self.point) != expected:
            raise ValueError(
                f"point has {len(self.point)} coordinates, group needs {expected}"
            )
        reduced = tuple(
            c % d for c, d in zip(self.point, self.group.torsion)
        ) + tuple(self.point[len(self.group.torsion):])
        object.__setattr__(self, "point", reduced)

    def torsion_part(self) -> tuple[int, ...]:
        return self.point[: len(self.group.torsion)]

    def free_part(self) -> tuple[int, ...]:
        return self.point[len(self.group.torsion):]


def _factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    m = n
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1 if p == 2 else 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def _prime_layout(torsion: tuple[int, ...]) -> dict[int, list[tuple[int, int]]]:
    """For each prime p: list of (index into torsion, exponent of p)."""
    layout: dict[int, list[tuple[int, int]]] = {}
    for i, d in enumerate(torsion):
        for p, e in _factorize(d).items():
            layout.setdefault(p, []).append((i, e))
    return layout


def _height_sequence(p: int, comps: list[tuple[int, int]]) -> tuple[int, ...]:
    """Height sequence of an element of a finite abelian p-group.

    ``comps`` lists (coordinate value, exponent) pairs for the summands
    Z/p^e.  Returns the finite heights of x, px, p^2 x, ... until the element
    dies; the zero element gives the empty sequence.
    """
    values = [(c % (p ** e), e) for c, e in comps]
    seq = []
    while any(c for c, _ in values):
        h = None
        for c, e in values:
            if c:
                val = 0
                while c % p == 0:
                    c //= p
                    val += 1
                if h is None or val < h:
                    h = val
        seq.append(h)
        values = [((c * p) % (p ** e), e) for c, e in values]
    return tuple(seq)


def _orbit_signature(torsion, coords, layout) -> tuple:
    """Automorphism-orbit invariant of a torsion element.

    Two elements of a finite abelian group lie in the same automorphism orbit
    exactly when their per-prime height sequences agree.
    """
    sig = []
    for p in sorted(layout):
        comps = [(coords[i], e) for i, e in layout[p]]
        sig.append((p, _height_sequence(p, comps)))
    return tuple(sig)


def _content(vec) -> int:
    c = 0
    for x in vec:
        c = gcd(c, abs(x))
    return c


def pointed_equivalent(
    p: PointedGroup, q: PointedGroup, *, torsion_order_cap: int = 10_000
) -> Ternary:
    """Whether some isomorphism of the underlying groups maps point to point.

    Decides exactly for purely free groups (content of the marked vector),
    purely torsion groups and mixed groups whose marked free part vanishes
    (per-prime height sequences), and mixed groups with small torsion
    (orbit scan).  Returns UNKNOWN only when the marked free part is nonzero
    and the torsion subgroup order exceeds ``torsion_order_cap``.
    """
    if not group_iso(p.group, q.group):
        return Ternary.NO
    if p.point == q.point:
        return Ternary.YES

    torsion = p.group.torsion
    tp, tq = p.torsion_part(), q.torsion_part()
    fp, fq = p.free_part(), q.free_part()

    c = _content(fp)
    if c != _content(fq):
        return Ternary.NO
    if not torsion:
        # Z^f orbits under GL_f(Z) are classified by the content gcd.
        return Ternary.YES

    layout = _prime_layout(torsion)
    if c == 0:
        sig_p = _orbit_signature(torsion, tp, layout)
        sig_q = _orbit_signature(torsion, tq, layout)
        return Ternary.YES if sig_p == sig_q else Ternary.NO

    # Mixed case with nonzero free content c: the orbit of (u, t) consists of
    # all (u', t') with content(u') = c and t' congruent mod c*T to some
    # automorphic image of t.  Scan the torsion subgroup for such an image.
    if p.group.torsion_order() > torsion_order_cap:
        return Ternary.UNKNOWN
    target_sig = _orbit_signature(torsion, tp, layout)
    moduli = [gcd(c, d) for d in torsion]
    for cand in itertools.product(*(range(d) for d in torsion)):
        if any((a - b) % m for a, b, m in zip(cand, tq, moduli)):
            continue
        if _orbit_signature(torsion, cand, layout) == target_sig:
            return Ternary.YES
    return Ternary.NO


def lattice_contains(a: IntMatrix, vec) -> bool:
    """Whether ``vec`` lies in the lattice spanned by the columns of ``a``."""
    dec = smith_normal_form(a)
    y = dec.u.mul_vector(vec)
    n = min(a.rows, a.cols)
    for i in range(a.rows):
        d = dec.s[i, i] if i < n else 0
        if d == 0:
            if y[i] != 0:
                return False
        elif y[i] % d:
            return False
    return True
