"""Truncated polynomial rings, free-module maps, and periodic resolutions.

The ground ring is R = F_p[a]/(a^q) for a prime p and exponent q >= 3.
Maps between free R-modules are matrices of ring elements; flattening
such a map replaces each entry by the q x q multiplication matrix of the
entry, giving the underlying F_p-linear map on coefficient vectors.

`build_cyclic_resolution` produces the period-2 truncated free resolution
of the ground field with rank-1 modules and differentials alternating
between multiplication by a and by a^(q-1); d_1 (the map feeding the
augmentation) is multiplication by a.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidParameter
from .ff_linalg import PrimeField, _frozen, rank_array


@dataclass(frozen=True)
class TruncatedPolyAlgebra:
    """R = F_p[a]/(a^q), with q >= 3."""

    p: int
    q: int
    field: PrimeField = None  # derived from p, set in __post_init__

    def __post_init__(self):
        if self.q < 3:
            raise InvalidParameter(f"truncation exponent q={self.q} must be >= 3")
        object.__setattr__(self, "field", PrimeField(self.p))

    def element(self, coeffs) -> "AlgebraElement":
        coeffs = self.field.array(coeffs)
        if coeffs.shape != (self.q,):
            raise DimensionMismatch(f"need {self.q} coefficients, got {coeffs.shape}")
        return AlgebraElement(self, coeffs)

    def zero(self) -> "AlgebraElement":
        return self.element(np.zeros(self.q, dtype=np.int64))

    def one(self) -> "AlgebraElement":
        return self.scalar(1)

    def scalar(self, c: int) -> "AlgebraElement":
        coeffs = np.zeros(self.q, dtype=np.int64)
        coeffs[0] = c % self.p
        return self.element(coeffs)

    def alpha(self, power: int = 1, coeff: int = 1) -> "AlgebraElement":
        """coeff * a^power, which is zero once power >= q."""
        coeffs = np.zeros(self.q, dtype=np.int64)
        if 0 <= power < self.q:
            coeffs[power] = coeff % self.p
        return self.element(coeffs)


class AlgebraElement:
    """Element of R, stored as the length-q coefficient vector of 1, a, ..., a^(q-1)."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: TruncatedPolyAlgebra, coeffs: np.ndarray):
        self.algebra = algebra
        self.coeffs = _frozen(coeffs)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AlgebraElement)
            and self.algebra == other.algebra
            and bool(np.array_equal(self.coeffs, other.coeffs))
        )

    def __hash__(self):
        return hash((self.algebra, self.coeffs.tobytes()))

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.algebra, (self.coeffs + other.coeffs) % self.algebra.p)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return AlgebraElement(self.algebra, (self.coeffs - other.coeffs) % self.algebra.p)

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, (-self.coeffs) % self.algebra.p)

    def scale(self, c: int) -> "AlgebraElement":
        return AlgebraElement(self.algebra, (self.coeffs * (int(c) % self.algebra.p)) % self.algebra.p)

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        # Truncated polynomial product: a^i * a^j = 0 once i + j >= q.
        full = np.convolve(self.coeffs, other.coeffs)
        return AlgebraElement(self.algebra, full[: self.algebra.q] % self.algebra.p)

    def mult_matrix(self) -> np.ndarray:
        """q x q matrix of multiplication by this element on coefficient vectors."""
        q = self.algebra.q
        m = np.zeros((q, q), dtype=np.int64)
        for j in range(q):
            if self.coeffs[j]:
                idx = np.arange(q - j)
                m[idx + j, idx] = self.coeffs[j]
        return m

    def __repr__(self):
        if self.is_zero():
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                terms.append(str(int(c)))
            else:
                pw = "a" if i == 1 else f"a^{i}"
                terms.append(pw if c == 1 else f"{int(c)}*{pw}")
        return " + ".join(terms)


class AlgebraMap:
    """R-linear map between free R-modules, as a target_rank x source_rank
    matrix of ring elements acting on column vectors."""

    __slots__ = ("algebra", "entries")

    def __init__(self, algebra: TruncatedPolyAlgebra, entries: np.ndarray):
        # entries has shape (target_rank, source_rank, q)
        self.algebra = algebra
        entries = algebra.field.array(entries)
        if entries.ndim != 3 or entries.shape[2] != algebra.q:
            raise DimensionMismatch(f"bad entry tensor shape {entries.shape}")
        self.entries = _frozen(entries)

    @classmethod
    def zero(cls, algebra: TruncatedPolyAlgebra, target_rank: int, source_rank: int) -> "AlgebraMap":
        return cls(algebra, np.zeros((target_rank, source_rank, algebra.q), dtype=np.int64))

    @classmethod
    def identity(cls, algebra: TruncatedPolyAlgebra, rank: int) -> "AlgebraMap":
        e = np.zeros((rank, rank, algebra.q), dtype=np.int64)
        for i in range(rank):
            e[i, i, 0] = 1
        return cls(algebra, e)

    @classmethod
    def from_element(cls, elem: AlgebraElement) -> "AlgebraMap":
        """Rank-1 map: multiplication by a single ring element."""
        return cls(elem.algebra, elem.coeffs.reshape(1, 1, -1))

    @classmethod
    def from_elements(cls, algebra: TruncatedPolyAlgebra, rows) -> "AlgebraMap":
        data = [[e.coeffs for e in row] for row in rows]
        return cls(algebra, np.array(data, dtype=np.int64))

    @property
    def target_rank(self) -> int:
        return self.entries.shape[0]

    @property
    def source_rank(self) -> int:
        return self.entries.shape[1]

    def entry(self, i: int, j: int) -> AlgebraElement:
        return AlgebraElement(self.algebra, self.entries[i, j])

    def is_zero(self) -> bool:
        return not np.any(self.entries)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AlgebraMap)
            and self.algebra == other.algebra
            and self.entries.shape == other.entries.shape
            and bool(np.array_equal(self.entries, other.entries))
        )

    def __hash__(self):
        return hash((self.algebra, self.entries.shape, self.entries.tobytes()))

    def __add__(self, other: "AlgebraMap") -> "AlgebraMap":
        self._check_same_shape(other)
        return AlgebraMap(self.algebra, (self.entries + other.entries) % self.algebra.p)

    def __sub__(self, other: "AlgebraMap") -> "AlgebraMap":
        self._check_same_shape(other)
        return AlgebraMap(self.algebra, (self.entries - other.entries) % self.algebra.p)

    def __neg__(self) -> "AlgebraMap":
        return AlgebraMap(self.algebra, (-self.entries) % self.algebra.p)

    def scale(self, c: int) -> "AlgebraMap":
        return AlgebraMap(self.algebra, (self.entries * (int(c) % self.algebra.p)) % self.algebra.p)

    def _check_same_shape(self, other: "AlgebraMap"):
        if self.entries.shape != other.entries.shape:
            raise DimensionMismatch(f"{self.entries.shape} vs {other.entries.shape}")

    def compose(self, other: "AlgebraMap") -> "AlgebraMap":
        """self after other (matrix product over R)."""
        if self.source_rank != other.target_rank:
            raise DimensionMismatch(
                f"compose {self.entries.shape} after {other.entries.shape}"
            )
        q = self.algebra.q
        t, s = self.target_rank, other.source_rank
        out = np.zeros((t, s, q), dtype=np.int64)
        for i in range(t):
            for k in range(s):
                acc = np.zeros(2 * q - 1, dtype=np.int64)
                for j in range(self.source_rank):
                    a = self.entries[i, j]
                    b = other.entries[j, k]
                    if a.any() and b.any():
                        acc += np.convolve(a, b)
                out[i, k] = acc[:q] % self.algebra.p
        return AlgebraMap(self.algebra, out)

    def flatten(self) -> np.ndarray:
        """Underlying F_p-matrix, shape (q*target_rank, q*source_rank)."""
        q = self.algebra.q
        t, s = self.target_rank, self.source_rank
        out = np.zeros((q * t, q * s), dtype=np.int64)
        for i in range(t):
            for j in range(s):
                out[i * q:(i + 1) * q, j * q:(j + 1) * q] = self.entry(i, j).mult_matrix()
        return out

    def coords(self) -> np.ndarray:
        """Coefficient vector of the map in the Hom-space basis, length t*s*q."""
        return self.entries.reshape(-1).copy()

    @classmethod
    def from_coords(cls, algebra: TruncatedPolyAlgebra, target_rank: int,
                    source_rank: int, coords: np.ndarray) -> "AlgebraMap":
        return cls(algebra, np.asarray(coords, dtype=np.int64).reshape(
            target_rank, source_rank, algebra.q))

    def __repr__(self):
        rows = [[repr(self.entry(i, j)) for j in range(self.source_rank)]
                for i in range(self.target_rank)]
        return f"AlgebraMap({rows})"


class PeriodicResolution:
    """Truncated free resolution of the ground field with a declared period.

    Modules are X_0 .. X_L with ranks `ranks[n]`; differentials d_n map
    X_n to X_(n-1) for 1 <= n <= L.  Construction checks d o d = 0 and
    that differentials and ranks repeat with the period.
    """

    __slots__ = ("algebra", "period", "length", "ranks", "differentials",
                 "augmentation", "family")

    def __init__(self, algebra: TruncatedPolyAlgebra, period: int, length: int,
                 ranks, differentials: dict, augmentation: np.ndarray,
                 family: str = "custom"):
        if period < 1:
            raise InvalidParameter(f"period {period} must be positive")
        if length < 2:
            raise InvalidParameter(f"length {length} must be at least 2")
        self.algebra = algebra
        self.period = period
        self.length = length
        self.ranks = list(ranks)
        if len(self.ranks) != length + 1:
            raise InvalidParameter("need one rank per position 0..L")
        self.differentials = dict(differentials)
        self.augmentation = _frozen(algebra.field.array(augmentation))
        self.family = family
        self._validate()

    def _validate(self):
        for n in range(1, self.length + 1):
            d = self.differentials.get(n)
            if d is None:
                raise InvalidParameter(f"missing differential at position {n}")
            if d.source_rank != self.ranks[n] or d.target_rank != self.ranks[n - 1]:
                raise InvalidParameter(f"differential at {n} has wrong shape")
        for n in range(2, self.length + 1):
            if not self.differentials[n - 1].compose(self.differentials[n]).is_zero():
                raise InvalidParameter(f"d o d != 0 at position {n}")
        for n in range(1, self.length + 1 - self.period):
            if self.differentials[n + self.period] != self.differentials[n]:
                raise InvalidParameter(
                    f"differentials do not repeat with period {self.period} at {n}")
            if self.ranks[n + self.period] != self.ranks[n]:
                raise InvalidParameter(
                    f"ranks do not repeat with period {self.period} at {n}")

    def differential(self, n: int) -> AlgebraMap:
        if not 1 <= n <= self.length:
            raise InvalidParameter(f"differential index {n} outside 1..{self.length}")
        return self.differentials[n]

    def module_rank(self, n: int) -> int:
        if not 0 <= n <= self.length:
            raise InvalidParameter(f"module index {n} outside 0..{self.length}")
        return self.ranks[n]

    def __repr__(self):
        return (f"PeriodicResolution(p={self.algebra.p}, q={self.algebra.q}, "
                f"period={self.period}, length={self.length}, family={self.family!r})")


def build_cyclic_resolution(p: int, q: int, length: int) -> PeriodicResolution:
    """Rank-1 period-2 resolution of k over F_p[a]/(a^q).

    d_n is multiplication by a for odd n and by a^(q-1) for even n, so the
    map next to the augmentation is multiplication by a.
    """
    if q < 3:
        raise InvalidParameter(f"q={q} must be >= 3")
    if length < 2:
        raise InvalidParameter(f"length={length} must be >= 2")
    algebra = TruncatedPolyAlgebra(p, q)
    mult_a = AlgebraMap.from_element(algebra.alpha(1))
    mult_a_top = AlgebraMap.from_element(algebra.alpha(q - 1))
    diffs = {n: (mult_a if n % 2 == 1 else mult_a_top) for n in range(1, length + 1)}
    augmentation = np.zeros((1, q), dtype=np.int64)
    augmentation[0, 0] = 1  # evaluation at a = 0
    return PeriodicResolution(algebra, 2, length, [1] * (length + 1), diffs,
                              augmentation, family="cyclic")


@dataclass(frozen=True)
class PositionReport:
    position: int
    dd_zero: bool | None  # None where d o d is out of range
    exact: bool | None    # None where exactness is not part of the check
    kernel_dim: int | None = None
    image_dim: int | None = None

    @property
    def passed(self) -> bool:
        return (self.dd_zero is not False) and (self.exact is not False)


@dataclass(frozen=True)
class ExactnessReport:
    entries: tuple

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> list[PositionReport]:
        return [e for e in self.entries if not e.passed]

    def __str__(self):
        lines = []
        for e in self.entries:
            bits = [f"position {e.position}:"]
            if e.dd_zero is not None:
                bits.append("d.d=0" if e.dd_zero else "d.d!=0")
            if e.exact is not None:
                bits.append(
                    f"ker={e.kernel_dim} im={e.image_dim} "
                    + ("exact" if e.exact else "NOT exact"))
            lines.append(" ".join(bits))
        lines.append("overall: " + ("pass" if self.passed else "fail"))
        return "\n".join(lines)


def check_exactness(res: PeriodicResolution) -> ExactnessReport:
    """Check d o d = 0 everywhere and ker d_n = im d_(n+1) for 1 <= n <= L-1.

    Kernel and image dimensions are compared over F_p after flattening;
    together with d o d = 0 the dimension count is equivalent to exactness.
    Failures are report entries, not exceptions.
    """
    p = res.algebra.p
    q = res.algebra.q
    flat = {n: res.differential(n).flatten() for n in range(1, res.length + 1)}
    ranks = {n: rank_array(flat[n], p) for n in flat}
    entries = []
    for n in range(1, res.length + 1):
        if n == 1:
            dd_zero = not np.any((res.augmentation @ flat[1]) % p)
        else:
            dd_zero = res.differential(n - 1).compose(res.differential(n)).is_zero()
        exact = None
        ker_dim = im_dim = None
        if 1 <= n <= res.length - 1:
            ker_dim = q * res.module_rank(n) - ranks[n]
            im_dim = ranks[n + 1]
            exact = (dd_zero is not False) and ker_dim == im_dim
        entries.append(PositionReport(n, dd_zero, exact, ker_dim, im_dim))
    return ExactnessReport(tuple(entries))
