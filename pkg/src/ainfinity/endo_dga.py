"""The endomorphism dg-algebra of a truncated free resolution.

A degree-g element is a family of module maps f_n : X_n -> X_(n-g) for
g <= n <= L (cohomological grading: degree-n classes of the Ext algebra
are represented by endomorphisms lowering the position by n).  The
differential is

    D f = d o f - (-1)^|f| f o d,

which raises the degree by one.  Homology is computed exactly over the
prime field: cycle and boundary spaces are flattened onto coefficient
vectors of the R-linear components, one block per position.

Conventions that the rest of the engine relies on:

* class coordinates are read off a canonical solve against
  [representatives | boundary-operator], so they are deterministic;
* nullhomotopies are solved position by position from the bottom of the
  truncation upward, always taking the canonical solution (free
  coordinates zero).  On periodic input this reproduces the periodic
  homotopies of the cyclic family on the nose;
* for the cyclic family the degree-1 homology generator is represented
  by the cocycle with component (-1)^n * a^(q-2) at even positions n and
  (-1)^n * 1 at odd positions, and the degree-2 generator by the
  all-identity shift.  In characteristic two these are the classical
  alternating (a^(q-2), 1) and (1, 1) pictures; in odd characteristic
  the sign alternation is forced by D f = d f + f d on degree-1 maps.

Homology data is cached per degree behind a lock; all values are
immutable after construction, so concurrent readers need no further
coordination.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .errors import (DimensionMismatch, InvalidParameter, NotABoundary,
                     NotACycle, NotPeriodic, TruncationTooShort)
from .ff_linalg import (SolveContext, kernel_basis_array, rank_array,
                        rref_array, solve_array)
from .resolution import AlgebraMap, PeriodicResolution


@dataclass(frozen=True)
class HomologyClass:
    """Coordinates of a homology class in the chosen basis of its degree."""

    degree: int
    coords: tuple

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def scale(self, c: int, p: int) -> "HomologyClass":
        return HomologyClass(self.degree, tuple((x * c) % p for x in self.coords))

    def add(self, other: "HomologyClass", p: int) -> "HomologyClass":
        if other.degree != self.degree:
            raise DimensionMismatch(
                f"classes in degrees {self.degree} and {other.degree}")
        return HomologyClass(self.degree,
                             tuple((a + b) % p for a, b in zip(self.coords, other.coords)))


class GradedEndomorphism:
    """Degree-g chain endomorphism of the resolution, one component per position.

    Missing positions denote zero components; the differential of the
    element is computed once and cached (the cache can never disagree
    with recomputation because components are immutable).
    """

    __slots__ = ("algebra", "degree", "components", "_diff")

    def __init__(self, algebra: "EndomorphismAlgebra", degree: int, components: dict):
        if degree < 0:
            raise InvalidParameter(f"degree {degree} must be >= 0")
        self.algebra = algebra
        self.degree = degree
        comps = {}
        for n, m in components.items():
            lo, hi = degree, algebra.resolution.length
            if not lo <= n <= hi:
                raise InvalidParameter(f"component position {n} outside [{lo}, {hi}]")
            algebra._check_component_shape(degree, n, m)
            if not m.is_zero():
                comps[n] = m
        self.components = comps
        self._diff = None

    def position_range(self) -> range:
        return range(self.degree, self.algebra.resolution.length + 1)

    def component(self, n: int) -> AlgebraMap:
        m = self.components.get(n)
        if m is not None:
            return m
        res = self.algebra.resolution
        if not self.degree <= n <= res.length:
            raise TruncationTooShort(
                f"component {n} of a degree-{self.degree} map on a length-{res.length} window")
        return AlgebraMap.zero(res.algebra, res.module_rank(n - self.degree),
                               res.module_rank(n))

    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other) -> bool:
        # value equality: same grading, same window, same components
        # (components of different ground rings already compare unequal)
        if not isinstance(other, GradedEndomorphism):
            return NotImplemented
        return (self.degree == other.degree
                and self.algebra.resolution.length == other.algebra.resolution.length
                and self.components == other.components)

    __hash__ = None

    def __add__(self, other: "GradedEndomorphism") -> "GradedEndomorphism":
        self._check_compatible(other)
        comps = dict(self.components)
        for n, m in other.components.items():
            comps[n] = comps[n] + m if n in comps else m
        return GradedEndomorphism(self.algebra, self.degree, comps)

    def __sub__(self, other: "GradedEndomorphism") -> "GradedEndomorphism":
        return self + (-other)

    def __neg__(self) -> "GradedEndomorphism":
        return GradedEndomorphism(self.algebra, self.degree,
                                  {n: -m for n, m in self.components.items()})

    def scale(self, c: int) -> "GradedEndomorphism":
        return GradedEndomorphism(self.algebra, self.degree,
                                  {n: m.scale(c) for n, m in self.components.items()})

    def _check_compatible(self, other: "GradedEndomorphism"):
        if self.algebra is not other.algebra:
            raise DimensionMismatch("endomorphisms of different algebras")
        if self.degree != other.degree:
            raise DimensionMismatch(
                f"endomorphisms of degrees {self.degree} and {other.degree}")

    def differential(self) -> "GradedEndomorphism":
        if self._diff is None:
            self._diff = self.algebra.differential(self)
        return self._diff

    def compose(self, other: "GradedEndomorphism") -> "GradedEndomorphism":
        return self.algebra.compose(self, other)

    __mul__ = compose

    def coords(self) -> np.ndarray:
        return self.algebra.coords_of(self)

    def __repr__(self):
        comps = {n: self.components[n] for n in sorted(self.components)}
        return f"GradedEndomorphism(degree={self.degree}, components={comps})"


@dataclass(frozen=True)
class CompactForm:
    """Period-compressed view of a periodic endomorphism."""

    degree: int
    period: int
    base: int
    blocks: tuple  # AlgebraMap per residue, blocks[(n - base) % period]

    def component(self, n: int) -> AlgebraMap:
        if n < self.base:
            raise InvalidParameter(f"position {n} below base {self.base}")
        return self.blocks[(n - self.base) % self.period]

    def expand(self, algebra: "EndomorphismAlgebra") -> GradedEndomorphism:
        comps = {n: self.component(n)
                 for n in range(self.base, algebra.resolution.length + 1)}
        return GradedEndomorphism(algebra, self.degree, comps)


class _DegreeLayout:
    """Coordinate layout of the degree-g component space within the window."""

    def __init__(self, algebra: "EndomorphismAlgebra", degree: int):
        res = algebra.resolution
        q = res.algebra.q
        self.degree = degree
        self.positions = list(range(degree, res.length + 1))
        self.offsets = {}
        self.sizes = {}
        off = 0
        for n in self.positions:
            size = q * res.module_rank(n) * res.module_rank(n - degree)
            self.offsets[n] = off
            self.sizes[n] = size
            off += size
        self.total = off


class EndomorphismAlgebra:
    """End_R(X) for a truncated periodic resolution X, with exact homology.

    `f1_mode` selects the cycle-choosing section used by `homology_basis`:
    "paper" pins the cyclic-family generators described in the module
    docstring, "auto" echelonizes the cycle space against the boundaries.
    """

    #: extra positions beyond the requested degree that homology-level
    #: operations demand, so the window edge cannot contaminate classes
    STABILITY_MARGIN_PERIODS = 2

    def __init__(self, res: PeriodicResolution, f1_mode: str = "paper"):
        if f1_mode not in ("paper", "auto"):
            raise InvalidParameter(f"unknown f1 mode {f1_mode!r}")
        if f1_mode == "paper" and res.family != "cyclic":
            raise InvalidParameter(
                "paper representatives are only defined for the cyclic family")
        self.resolution = res
        self.f1_mode = f1_mode
        self._lock = threading.Lock()
        self._layouts: dict[int, _DegreeLayout] = {}
        self._d_matrices: dict[int, np.ndarray] = {}
        self._d_ranks: dict[int, int] = {}
        self._class_contexts: dict[int, tuple] = {}
        self._basis: dict[int, list] = {}

    # ----- basic constructors -------------------------------------------------

    @property
    def p(self) -> int:
        return self.resolution.algebra.p

    @property
    def q(self) -> int:
        return self.resolution.algebra.q

    def zero(self, degree: int) -> GradedEndomorphism:
        return GradedEndomorphism(self, degree, {})

    def identity(self) -> GradedEndomorphism:
        res = self.resolution
        comps = {n: AlgebraMap.identity(res.algebra, res.module_rank(n))
                 for n in range(res.length + 1)}
        return GradedEndomorphism(self, 0, comps)

    def from_components(self, degree: int, components: dict) -> GradedEndomorphism:
        return GradedEndomorphism(self, degree, components)

    def from_element_pattern(self, degree: int, even, odd) -> GradedEndomorphism:
        """Rank-1 helper: component `even` at even positions, `odd` at odd ones."""
        res = self.resolution
        comps = {}
        for n in range(degree, res.length + 1):
            elem = even if n % 2 == 0 else odd
            comps[n] = AlgebraMap.from_element(elem)
        return GradedEndomorphism(self, degree, comps)

    def rep_x(self) -> GradedEndomorphism:
        """Cocycle generating degree-1 homology of the cyclic family."""
        alg = self.resolution.algebra
        return self.from_element_pattern(
            1, alg.alpha(alg.q - 2), alg.scalar(-1))

    def rep_y(self) -> GradedEndomorphism:
        """The all-identity degree-2 shift; generates degree-2 homology."""
        alg = self.resolution.algebra
        return self.from_element_pattern(2, alg.one(), alg.one())

    def random_endomorphism(self, rng: np.random.Generator, degree: int) -> GradedEndomorphism:
        res = self.resolution
        q = res.algebra.q
        comps = {}
        for n in range(degree, res.length + 1):
            shape = (res.module_rank(n - degree), res.module_rank(n), q)
            comps[n] = AlgebraMap(res.algebra, rng.integers(0, self.p, size=shape))
        return GradedEndomorphism(self, degree, comps)

    def _check_component_shape(self, degree: int, n: int, m: AlgebraMap):
        res = self.resolution
        if (m.target_rank != res.module_rank(n - degree)
                or m.source_rank != res.module_rank(n)):
            raise DimensionMismatch(
                f"component at {n} of a degree-{degree} map has shape "
                f"{(m.target_rank, m.source_rank)}")

    # ----- dg-algebra operations ----------------------------------------------

    def differential(self, f: GradedEndomorphism) -> GradedEndomorphism:
        """D f = d o f - (-1)^|f| f o d, of degree |f| + 1."""
        res = self.resolution
        g = f.degree
        sign = -1 if g % 2 else 1
        comps = {}
        for n in range(g + 1, res.length + 1):
            term = None
            fn = f.components.get(n)
            if fn is not None:
                term = res.differential(n - g).compose(fn)
            fprev = f.components.get(n - 1)
            if fprev is not None:
                right = fprev.compose(res.differential(n)).scale(sign)
                term = -right if term is None else term - right
            if term is not None:
                comps[n] = term
        return GradedEndomorphism(self, g + 1, comps)

    def compose(self, f: GradedEndomorphism, g: GradedEndomorphism) -> GradedEndomorphism:
        """(f o g)_n = f_(n - |g|) o g_n, of degree |f| + |g|."""
        if f.algebra is not self or g.algebra is not self:
            raise DimensionMismatch("endomorphisms of a different algebra")
        res = self.resolution
        comps = {}
        for n in range(f.degree + g.degree, res.length + 1):
            gn = g.components.get(n)
            fm = f.components.get(n - g.degree)
            if gn is not None and fm is not None:
                comps[n] = fm.compose(gn)
        return GradedEndomorphism(self, f.degree + g.degree, comps)

    def power(self, f: GradedEndomorphism, e: int) -> GradedEndomorphism:
        if e == 0:
            return self.identity()
        out = f
        for _ in range(e - 1):
            out = self.compose(out, f)
        return out

    # ----- flattened coordinates ----------------------------------------------

    def layout(self, degree: int) -> _DegreeLayout:
        lay = self._layouts.get(degree)
        if lay is None:
            lay = _DegreeLayout(self, degree)
            self._layouts[degree] = lay
        return lay

    def coords_of(self, f: GradedEndomorphism) -> np.ndarray:
        lay = self.layout(f.degree)
        v = np.zeros(lay.total, dtype=np.int64)
        for n, m in f.components.items():
            off = lay.offsets[n]
            v[off:off + lay.sizes[n]] = m.coords()
        return v

    def from_coords(self, degree: int, v: np.ndarray) -> GradedEndomorphism:
        res = self.resolution
        lay = self.layout(degree)
        comps = {}
        for n in lay.positions:
            off = lay.offsets[n]
            block = v[off:off + lay.sizes[n]]
            if np.any(block):
                comps[n] = AlgebraMap.from_coords(
                    res.algebra, res.module_rank(n - degree), res.module_rank(n), block)
        return GradedEndomorphism(self, degree, comps)

    def d_matrix(self, degree: int) -> np.ndarray:
        """Matrix of the differential from degree g to degree g+1 coordinates."""
        m = self._d_matrices.get(degree)
        if m is not None:
            return m
        res = self.resolution
        src, tgt = self.layout(degree), self.layout(degree + 1)
        out = np.zeros((tgt.total, src.total), dtype=np.int64)
        sign = (-1 if degree % 2 else 1)
        for n in tgt.positions:
            # d o f_n contribution
            left = self._compose_operator(res.differential(n - degree),
                                          res.module_rank(n), left_side=True)
            out[tgt.offsets[n]:tgt.offsets[n] + tgt.sizes[n],
                src.offsets[n]:src.offsets[n] + src.sizes[n]] += left
            # -(-1)^g f_(n-1) o d_n contribution
            if n - 1 >= degree:
                right = self._compose_operator(res.differential(n),
                                               res.module_rank(n - 1 - degree),
                                               left_side=False)
                out[tgt.offsets[n]:tgt.offsets[n] + tgt.sizes[n],
                    src.offsets[n - 1]:src.offsets[n - 1] + src.sizes[n - 1]] -= sign * right
        out %= self.p
        self._d_matrices[degree] = out
        return out

    def _compose_operator(self, d: AlgebraMap, other_rank: int, left_side: bool) -> np.ndarray:
        """Coordinate matrix of h -> d o h (left) or h -> h o d (right).

        For h in Hom(R^s, R^t) the coordinates are the (t, s, q) entry
        tensor; composition by a fixed map is F_p-linear in them.
        """
        q = d.algebra.q
        if left_side:
            t_in, s_in = d.source_rank, other_rank
            t_out = d.target_rank
            out = np.zeros((t_out * s_in * q, t_in * s_in * q), dtype=np.int64)
            for i_out in range(t_out):
                for j in range(t_in):
                    block = d.entry(i_out, j).mult_matrix()
                    for k in range(s_in):
                        r0 = (i_out * s_in + k) * q
                        c0 = (j * s_in + k) * q
                        out[r0:r0 + q, c0:c0 + q] += block
        else:
            t_in, s_in = other_rank, d.target_rank
            s_out = d.source_rank
            out = np.zeros((t_in * s_out * q, t_in * s_in * q), dtype=np.int64)
            for k in range(s_out):
                for j in range(s_in):
                    block = d.entry(j, k).mult_matrix()
                    for i in range(t_in):
                        r0 = (i * s_out + k) * q
                        c0 = (i * s_in + j) * q
                        out[r0:r0 + q, c0:c0 + q] += block
        return out % self.p

    def d_rank(self, degree: int) -> int:
        r = self._d_ranks.get(degree)
        if r is None:
            if degree < 0:
                r = 0
            else:
                r = rank_array(self.d_matrix(degree), self.p)
            self._d_ranks[degree] = r
        return r

    # ----- homology ------------------------------------------------------------

    def _require_window(self, degree: int):
        margin = self.STABILITY_MARGIN_PERIODS * self.resolution.period
        if self.resolution.length - degree < margin + 1:
            raise TruncationTooShort(
                f"homology in degree {degree} needs window length >= "
                f"{degree + margin + 1}, have {self.resolution.length}")

    def homology_dimension(self, degree: int) -> int:
        # Degree 0 is measured through the induced action on the augmented
        # homology of the resolution (the nullhomotopies of chain maps have
        # degree -1 and live outside the window kept here); every other
        # degree is an honest kernel/image count.
        if degree == 0:
            return 1
        self._require_window(degree)
        return self.layout(degree).total - self.d_rank(degree) - self.d_rank(degree - 1)

    def homology_basis(self, degree: int, verify: str = "light") -> list:
        """Ordered [(HomologyClass, representative)] for the given degree.

        In "paper" mode degree 2j+e is represented by x_rep^e o y_rep^j
        (identity in degree 0); "auto" mode echelonizes cycles against
        boundaries.  With verify="full" the dimension count is checked.
        """
        with self._lock:
            cached = self._basis.get(degree)
            if cached is None:
                self._require_window(degree)
                reps = self._build_reps(degree)
                cached = [(HomologyClass(degree, tuple(int(i == k) for i in range(len(reps)))),
                           rep) for k, rep in enumerate(reps)]
                self._basis[degree] = cached
        if verify == "full":
            dim = self.homology_dimension(degree)
            if dim != len(cached):
                raise TruncationTooShort(
                    f"degree {degree}: found {len(cached)} representatives for a "
                    f"homology space of dimension {dim}")
        return cached

    def _build_reps(self, degree: int) -> list:
        if degree == 0:
            return [self.identity()]
        if self.f1_mode == "paper":
            rep = self.power(self.rep_y(), degree // 2)
            if degree % 2:
                rep = self.compose(self.rep_x(), rep)
            reps = [rep]
        else:
            reps = self._echelon_reps(degree)
        p = self.p
        dmat = self.d_matrix(degree)
        for rep in reps:
            if np.any((dmat @ self.coords_of(rep)) % p):
                raise NotACycle(f"degree-{degree} representative is not a cycle")
        return reps

    def _echelon_reps(self, degree: int) -> list:
        p = self.p
        cycles = kernel_basis_array(self.d_matrix(degree), p)
        if not cycles:
            return []
        boundary = self.d_matrix(degree - 1) if degree > 0 else None
        reduced = np.array(cycles, dtype=np.int64)
        if boundary is not None and boundary.size:
            b_red, b_pivots = rref_array(boundary.T, p)
            for row, col in zip(b_red, b_pivots):
                coef = reduced[:, col].copy()
                reduced = (reduced - np.outer(coef, row)) % p
        q_red, q_pivots = rref_array(reduced, p)
        return [self.from_coords(degree, q_red[i]) for i in range(len(q_pivots))]

    def _class_context(self, degree: int):
        ctx = self._class_contexts.get(degree)
        if ctx is None:
            basis = self.homology_basis(degree)
            reps = np.array([self.coords_of(rep) for _, rep in basis],
                            dtype=np.int64).T if basis else \
                np.zeros((self.layout(degree).total, 0), dtype=np.int64)
            if degree > 0:
                boundary = self.d_matrix(degree - 1)
                m = np.concatenate([reps, boundary], axis=1)
            else:
                m = reps
            solver = SolveContext(m, self.p)
            for k in range(reps.shape[1]):
                if k not in solver.pivots:
                    raise TruncationTooShort(
                        f"degree {degree}: representative {k} is a boundary; "
                        "the truncation window is unstable")
            ctx = (solver, reps.shape[1])
            self._class_contexts[degree] = ctx
        return ctx

    def class_of(self, f: GradedEndomorphism) -> HomologyClass:
        """Coordinates of the class of a cycle in the chosen basis."""
        g = f.degree
        self._require_window(g)
        v = self.coords_of(f)
        if np.any((self.d_matrix(g) @ v) % self.p):
            raise NotACycle(f"degree-{g} element has nonzero differential")
        if g == 0:
            return HomologyClass(0, (self._augmentation_scalar(f),))
        solver, nreps = self._class_context(g)
        x = solver.solve(v)
        if x is None:
            raise TruncationTooShort(
                f"degree {g}: cycle outside the span of representatives and "
                "boundaries; the truncation window is unstable")
        return HomologyClass(g, tuple(int(c) for c in x[:nreps]))

    def _augmentation_scalar(self, f: GradedEndomorphism) -> int:
        """Scalar by which a chain map acts on the augmented homology of X."""
        res = self.resolution
        aug = res.augmentation
        v = solve_array(aug, np.array([1], dtype=np.int64), self.p)
        if v is None:
            raise InvalidParameter("augmentation is not surjective")
        image = (f.component(0).flatten() @ v) % self.p
        return int((aug @ image)[0] % self.p)

    def nullhomotopy(self, f: GradedEndomorphism, assume_boundary: bool = False) -> GradedEndomorphism:
        """Canonical h with D h = f, solved from the bottom position upward.

        The first window equation is solved jointly for the two lowest
        components; every later position is a single canonical solve.
        Raises NotABoundary when the class of f is nonzero.
        """
        if f.degree < 1:
            raise InvalidParameter("a boundary has degree at least 1")
        if not assume_boundary:
            if not self.class_of(f).is_zero():
                raise NotABoundary(f"degree-{f.degree} element has nonzero class")
        res = self.resolution
        g = f.degree - 1
        L = res.length
        if L < g + 1:
            return self.zero(g)
        sign = -1 if g % 2 else 1
        q = res.algebra.q

        def left_op(n):
            return self._compose_operator(res.differential(n - g),
                                          res.module_rank(n), left_side=True)

        def right_op(n):
            return self._compose_operator(res.differential(n),
                                          res.module_rank(n - 1 - g), left_side=False)

        comps = {}
        n0 = g + 1
        lmat, rmat = left_op(n0), right_op(n0)
        joint = np.concatenate([(-sign * rmat) % self.p, lmat], axis=1)
        rhs = f.component(n0).coords()
        x = solve_array(joint, rhs, self.p)
        if x is None:
            raise NotABoundary(f"no homotopy at position {n0}")
        split = res.module_rank(g) * res.module_rank(0) * q
        prev = x[:split]
        comps[g] = AlgebraMap.from_coords(res.algebra, res.module_rank(0),
                                          res.module_rank(g), prev)
        cur = x[split:]
        comps[n0] = AlgebraMap.from_coords(res.algebra, res.module_rank(1),
                                           res.module_rank(n0), cur)
        prev = cur
        for n in range(n0 + 1, L + 1):
            rhs = (f.component(n).coords() + sign * (right_op(n) @ prev)) % self.p
            x = solve_array(left_op(n), rhs, self.p)
            if x is None:
                raise NotABoundary(f"no homotopy at position {n}")
            comps[n] = AlgebraMap.from_coords(res.algebra, res.module_rank(n - g),
                                              res.module_rank(n), x)
            prev = x
        return GradedEndomorphism(self, g, comps)

    def periodic_compact(self, f: GradedEndomorphism, period: int | None = None) -> CompactForm:
        """Compress f to one period of components, or raise NotPeriodic.

        Requires at least two periods of positions in the window; succeeds
        exactly when f_(n + period) = f_n for every comparable position.
        """
        if period is None:
            period = self.resolution.period
        L = self.resolution.length
        base = f.degree
        if L - base + 1 < 2 * period:
            raise TruncationTooShort(
                f"need {2 * period} positions to certify period {period}, "
                f"have {L - base + 1}")
        for n in range(base, L - period + 1):
            if f.component(n) != f.component(n + period):
                raise NotPeriodic(
                    f"components differ between positions {n} and {n + period}")
        blocks = tuple(f.component(base + i) for i in range(period))
        return CompactForm(f.degree, period, base, blocks)
