"""Graded GF(2)-algebra presentations and truncated power series over them.

Ring elements are ``frozenset``s of packed monomials: each generator owns a
16-bit exponent field, the first declared generator in the most significant
field, so monomial multiplication is integer addition and lexicographic
comparison on the declared order is integer comparison.

Grading convention: every formal variable carries a positive integer weight
(x, y, t, s have weight 1 and u = x F(x, t) weight 2). A homogeneous series
term ``c * x^i t^k`` satisfies ``deg(c) = weight - offset`` for a fixed
offset; this is the negative grading of the variables read with the sign
flipped, so every internal degree is nonnegative and truncation is a bound
on the weighted degree.
"""

from __future__ import annotations

import itertools
import re
from collections import defaultdict
from typing import Iterable, Mapping, Sequence

from . import gf2

WIDTH = 16
FIELD = (1 << WIDTH) - 1

Element = frozenset
ZERO: frozenset = frozenset()
ONE: frozenset = frozenset({0})


class NonHomogeneousRelation(ValueError):
    pass


class VariableMismatch(ValueError):
    pass


class NonzeroConstantTerm(ValueError):
    pass


class DegreeOutOfRange(ValueError):
    pass


class NotInvariant(ValueError):
    def __init__(self, monomial, coefficient):
        super().__init__(f"series is not invariant under x -> F(x, t): first difference at {monomial} ({coefficient})")
        self.monomial = monomial
        self.coefficient = coefficient


class NotExpressible(ValueError):
    def __init__(self, degree, monomial, coefficient):
        super().__init__(f"nonzero residual in degree {degree} at {monomial} ({coefficient})")
        self.degree = degree
        self.monomial = monomial
        self.coefficient = coefficient


class Underdetermined(ValueError):
    def __init__(self, degree, unknowns):
        super().__init__(f"degree {degree}: unknowns {unknowns} are not determined")
        self.degree = degree
        self.unknowns = unknowns


def _toggle(acc: set, m: int) -> None:
    if m in acc:
        acc.remove(m)
    else:
        acc.add(m)


class CoefficientRing:
    """A graded commutative GF(2)-algebra ``GF(2)[g_1..g_n] / I``.

    The first ``n - n_free`` generators are *presented*: they carry the
    relations and their degree is bounded by ``max_degree`` (products above
    it are zero, i.e. we work modulo the ideal of elements of presented
    degree > ``max_degree``). The trailing ``n_free`` generators are free
    polynomial variables with no bound. Degree-0 generators must be free.
    """

    def __init__(
        self,
        generators: Sequence[tuple[str, int]] = (),
        relations: Iterable[frozenset] = (),
        max_degree: int | None = None,
        n_free: int | None = None,
    ):
        gens = tuple((str(n), int(d)) for n, d in generators)
        names = [n for n, _ in gens]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        if any(d < 0 for _, d in gens):
            raise ValueError("generator degrees must be nonnegative")
        relations = [frozenset(r) for r in relations]
        if n_free is None:
            n_free = len(gens) if not relations and max_degree is None else 0
        if not 0 <= n_free <= len(gens):
            raise ValueError("n_free out of range")
        self.generators = gens
        self.n_free = n_free
        self.n_presented = len(gens) - n_free
        if any(d == 0 for _, d in gens[: self.n_presented]):
            raise ValueError("degree-0 generators must be free (declare them last)")
        if relations and max_degree is None:
            max_degree = 10
        self.max_degree = max_degree
        self._index = {n: i for i, n in enumerate(names)}
        self._degs = [d for _, d in gens]
        self._shift = WIDTH * n_free
        self._free_mask = (1 << self._shift) - 1
        self._pdeg_cache: dict[int, int] = {0: 0}
        self._deg_cache: dict[int, int] = {0: 0}
        self._basis: dict[int, list[int]] = {}
        self._tables: dict[int, tuple[dict[int, int], dict[int, int], int, list[int]]] = {}
        self.relations = tuple(r for r in relations if r)
        for r in self.relations:
            degs = {self.degree_of_monomial(m) for m in r}
            if len(degs) != 1:
                raise NonHomogeneousRelation(f"relation {self.format(r)} mixes degrees {sorted(degs)}")
            if any(m & self._free_mask for m in r):
                raise ValueError("relations may only involve presented generators")
        self._build_tables()
        self._trivial = not self._tables and self.max_degree is None

    # -- monomials ---------------------------------------------------------

    def exponents(self, m: int) -> tuple[int, ...]:
        n = len(self.generators)
        return tuple((m >> (WIDTH * (n - 1 - i))) & FIELD for i in range(n))

    def monomial(self, exps: Sequence[int]) -> int:
        n = len(self.generators)
        if len(exps) != n:
            raise ValueError("exponent vector length mismatch")
        m = 0
        for i, e in enumerate(exps):
            if not 0 <= e <= FIELD:
                raise ValueError("exponent out of range")
            m |= e << (WIDTH * (n - 1 - i))
        return m

    def degree_of_monomial(self, m: int) -> int:
        d = self._deg_cache.get(m)
        if d is None:
            d = sum(e * g for e, g in zip(self.exponents(m), self._degs))
            self._deg_cache[m] = d
        return d

    def _presented_degree(self, p: int) -> int:
        d = self._pdeg_cache.get(p)
        if d is None:
            d = 0
            k = self.n_presented
            for i in range(k):
                d += ((p >> (WIDTH * (k - 1 - i))) & FIELD) * self._degs[i]
            self._pdeg_cache[p] = d
        return d

    def monomial_basis(self, degree: int) -> list[int]:
        """Monomials of the given degree in the positive-degree generators,
        greatest first in graded-lex order. Degree-0 generators are excluded
        (they would make every graded piece infinite)."""
        pos = [i for i, d in enumerate(self._degs) if d > 0]
        n = len(self.generators)
        out = []

        def rec(j: int, remaining: int, acc: int):
            if remaining == 0:
                out.append(acc)
                return
            if j == len(pos):
                return
            i = pos[j]
            d = self._degs[i]
            for e in range(remaining // d, -1, -1):
                rec(j + 1, remaining - e * d, acc | (e << (WIDTH * (n - 1 - i))))

        rec(0, degree, 0)
        return sorted(out, reverse=True)

    def _presented_basis(self, degree: int) -> list[int]:
        b = self._basis.get(degree)
        if b is None:
            b = sorted((m >> self._shift for m in self.monomial_basis(degree) if not m & self._free_mask), reverse=True)
            self._basis[degree] = b
        return b

    def _build_tables(self) -> None:
        if not self.relations:
            return
        by_degree = defaultdict(list)
        for r in self.relations:
            by_degree[self.degree_of_monomial(next(iter(r)))].append(r)
        k = self.n_presented
        units = [(1 << (WIDTH * (k - 1 - i)), self._degs[i]) for i in range(k)]
        for d in range(1, self.max_degree + 1):
            basis = self._presented_basis(d)
            index = {m: i for i, m in enumerate(basis)}
            rows = []
            for r in by_degree.get(d, ()):
                v = 0
                for m in r:
                    v ^= 1 << index[m >> self._shift]
                rows.append(v)
            for unit, gd in units:
                lower = self._tables.get(d - gd)
                if lower is None:
                    continue
                table, _, _, lbasis = lower
                for row in table.values():
                    v = 0
                    for i in gf2.iter_bits(row):
                        v ^= 1 << index[lbasis[i] + unit]
                    rows.append(v)
            table = gf2.rref(rows)
            if table:
                self._tables[d] = (table, index, gf2.pivot_mask(table), basis)

    # -- graded structure --------------------------------------------------

    def dimension(self, degree: int) -> int:
        """Dimension over GF(2) of the degree-``degree`` piece of the
        presented part (degree-0 generators excluded)."""
        if degree < 0:
            return 0
        if self.max_degree is not None and degree > self.max_degree:
            raise DegreeOutOfRange(f"degree {degree} exceeds the exact range <= {self.max_degree}")
        n = len(self.monomial_basis(degree))
        t = self._tables.get(degree)
        return n - (len(t[0]) if t else 0)

    def pivots(self, degree: int) -> list[int]:
        """Pivot monomials (eliminated by the relations) in a degree."""
        t = self._tables.get(degree)
        if not t:
            return []
        return sorted((t[3][p] << self._shift for p in t[0]), reverse=True)

    # -- arithmetic --------------------------------------------------------

    def normal_form(self, elem: Iterable[int]) -> frozenset:
        if self._trivial:
            return elem if isinstance(elem, frozenset) else frozenset(elem)
        out = set()
        groups: dict[tuple[int, int], set] = {}
        shift, fmask, top = self._shift, self._free_mask, self.max_degree
        for m in elem:
            p = m >> shift
            d = self._presented_degree(p)
            if top is not None and d > top:
                continue
            if d in self._tables:
                groups.setdefault((m & fmask, d), set()).add(p)
            else:
                out.add(m)
        for (free, d), ps in groups.items():
            table, index, mask, basis = self._tables[d]
            v = 0
            for p in ps:
                v |= 1 << index[p]
            x = v & mask
            while x:
                v ^= table[gf2.low_bit(x)]
                x = v & mask
            for i in gf2.iter_bits(v):
                out.add((basis[i] << shift) | free)
        return frozenset(out)

    def add(self, a: frozenset, b: frozenset) -> frozenset:
        return a ^ b

    def mul_raw(self, a: Iterable[int], b: Iterable[int], acc: set | None = None) -> set:
        if acc is None:
            acc = set()
        for x in a:
            for y in b:
                _toggle(acc, x + y)
        return acc

    def mul(self, a: frozenset, b: frozenset) -> frozenset:
        if not a or not b:
            return ZERO
        if a == ONE:
            return b
        if b == ONE:
            return a
        return self.normal_form(self.mul_raw(a, b))

    def power(self, a: frozenset, e: int) -> frozenset:
        r = ONE
        for _ in range(e):
            r = self.mul(r, a)
        return r

    def square(self, a: frozenset) -> frozenset:
        # Frobenius: cross terms cancel in characteristic 2
        return self.normal_form({m + m for m in a})

    def gen(self, name: str) -> frozenset:
        i = self._index[name]
        exps = [0] * len(self.generators)
        exps[i] = 1
        return self.normal_form({self.monomial(exps)})

    def gen_index(self, name: str) -> int:
        return self._index[name]

    def has_generator(self, name: str) -> bool:
        return name in self._index

    def degree(self, elem: frozenset) -> int | None:
        """Degree of a homogeneous element; ``None`` for zero; raises if mixed."""
        degs = {self.degree_of_monomial(m) for m in elem}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("element is not homogeneous")
        return degs.pop()

    def is_homogeneous(self, elem: frozenset, degree: int) -> bool:
        return all(self.degree_of_monomial(m) == degree for m in elem)

    def is_constant(self, elem: frozenset) -> bool:
        return elem == ZERO or elem == ONE

    def exact_above(self, degree: int) -> bool:
        """True if the ring has no nonzero elements of degree > ``degree``."""
        if any(d > 0 for d in self._degs[self.n_presented :]):
            return False
        if self.n_presented == 0:
            return True
        return self.max_degree is not None and self.max_degree <= degree

    # -- construction of related rings -------------------------------------

    def adjoin(self, generators: Sequence[tuple[str, int]]) -> "CoefficientRing":
        """``self[g...]`` with new free generators appended."""
        new = CoefficientRing.__new__(CoefficientRing)
        new.__dict__.update(self.__dict__)
        gens = self.generators + tuple((str(n), int(d)) for n, d in generators)
        names = [n for n, _ in gens]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        k = len(generators)
        new.generators = gens
        new.n_free = self.n_free + k
        new._index = {n: i for i, n in enumerate(names)}
        new._degs = [d for _, d in gens]
        new._shift = WIDTH * new.n_free
        new._free_mask = (1 << new._shift) - 1
        new._deg_cache = {0: 0}
        new._basis = {}
        new.relations = tuple(frozenset(m << (WIDTH * k) for m in r) for r in self.relations)
        new._trivial = not new._tables and new.max_degree is None
        return new

    def embed_from(self, other: "CoefficientRing", elem: frozenset) -> frozenset:
        """Image of ``elem`` under the map sending each generator of ``other``
        to the generator of the same name here."""
        return ring_map(elem, other, self, {n: self.gen(n) for n, _ in other.generators})

    # -- text --------------------------------------------------------------

    def format_monomial(self, m: int) -> str:
        parts = []
        for (name, _), e in zip(self.generators, self.exponents(m)):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    def sorted_monomials(self, elem: frozenset) -> list[int]:
        return sorted(elem, key=lambda m: (self.degree_of_monomial(m), m), reverse=False)

    def monomial_strings(self, elem: frozenset) -> list[str]:
        return [self.format_monomial(m) for m in self.canonical_order(elem)]

    def canonical_order(self, elem: frozenset) -> list[int]:
        """Graded-lex: ascending degree, greater lex first within a degree."""
        return sorted(elem, key=lambda m: (self.degree_of_monomial(m), -m))

    def format(self, elem: frozenset) -> str:
        if not elem:
            return "0"
        return " + ".join(self.monomial_strings(elem))

    def parse_monomial(self, text: str) -> int:
        text = text.strip()
        exps = [0] * len(self.generators)
        if text != "1":
            for factor in text.split("*"):
                factor = factor.strip()
                name, _, e = factor.partition("^")
                if name not in self._index:
                    raise ValueError(f"unknown generator {name!r}")
                exps[self._index[name]] += int(e) if e else 1
        return self.monomial(exps)

    def parse(self, text: str | Sequence[str]) -> frozenset:
        if isinstance(text, str):
            text = text.strip()
            if text == "0":
                return ZERO
            terms = [t for t in re.split(r"\s*\+\s*", text) if t]
        else:
            terms = list(text)
        acc: set = set()
        for t in terms:
            _toggle(acc, self.parse_monomial(t))
        return self.normal_form(acc)

    def to_json(self) -> dict:
        return {
            "generators": [{"name": n, "degree": d} for n, d in self.generators],
            "n_free": self.n_free,
            "max_degree": self.max_degree,
            "relations": [self.monomial_strings(r) for r in self.relations],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "CoefficientRing":
        gens = [(g["name"], g["degree"]) for g in data["generators"]]
        free = cls(gens, n_free=len(gens))
        rels = [frozenset(free.parse(r)) for r in data.get("relations", [])]
        return cls(gens, rels, data.get("max_degree"), data.get("n_free"))

    def __repr__(self) -> str:
        gens = ", ".join(f"{n}:{d}" for n, d in self.generators)
        return f"CoefficientRing([{gens}], relations={len(self.relations)}, max_degree={self.max_degree})"


GF2 = CoefficientRing()


def ring_create(generators, relation_elements=(), max_degree=None) -> CoefficientRing:
    """Build a presentation. Relations may be given as strings or as elements
    of the free ring on the same generators."""
    gens = [(str(n), int(d)) for n, d in generators]
    free = CoefficientRing(gens, n_free=len(gens))
    rels = [free.parse(r) if isinstance(r, str) else frozenset(r) for r in relation_elements]
    n_zero = sum(1 for _, d in gens if d == 0)
    if rels or max_degree is not None:
        # degree-0 generators stay free; they must come last
        return CoefficientRing(gens, rels, max_degree, n_free=n_zero)
    return CoefficientRing(gens)


def ring_map(elem: frozenset, source: CoefficientRing, target: CoefficientRing, images: Mapping[str, frozenset]) -> frozenset:
    """Evaluate the ring homomorphism given by generator images."""
    if not elem:
        return ZERO
    img = [images.get(n, ZERO) if n in images else None for n, _ in source.generators]
    for (n, _), v in zip(source.generators, img):
        if v is None:
            raise KeyError(f"no image for generator {n}")
    powers: dict[tuple[int, int], frozenset] = {}

    def pw(i: int, e: int) -> frozenset:
        key = (i, e)
        r = powers.get(key)
        if r is None:
            r = img[i] if e == 1 else target.mul(pw(i, e - 1), img[i])
            powers[key] = r
        return r

    acc: set = set()
    for m in elem:
        r = ONE
        for i, e in enumerate(source.exponents(m)):
            if e:
                r = target.mul(r, pw(i, e))
                if not r:
                    break
        acc ^= r
    return target.normal_form(acc)


# ---------------------------------------------------------------------------
# truncated series


Variables = tuple  # tuple[tuple[str, int], ...]


def _norm_vars(variables) -> Variables:
    out = tuple((str(n), int(w)) for n, w in variables)
    names = [n for n, _ in out]
    if len(set(names)) != len(names):
        raise ValueError("duplicate variable names")
    if any(w <= 0 for _, w in out):
        raise ValueError("variable weights must be positive")
    return out


class TruncatedSeries:
    """A power series in weighted variables over a ``CoefficientRing``,
    truncated at total weighted degree ``truncation`` (negative means no
    information). Immutable; ``terms`` maps exponent tuples to normal-form
    coefficients and never stores zeros."""

    __slots__ = ("ring", "variables", "truncation", "terms", "_weights", "_hash")

    def __init__(self, ring: CoefficientRing, variables, truncation: int, terms: Mapping | None = None, *, _clean: bool = False):
        self.ring = ring
        self.variables = variables if _clean else _norm_vars(variables)
        self.truncation = int(truncation)
        self._weights = tuple(w for _, w in self.variables)
        self._hash = None
        if _clean:
            self.terms = terms
            return
        out = {}
        n = len(self.variables)
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != n or any(x < 0 for x in e):
                raise ValueError(f"bad exponent vector {e}")
            if self.degree_of(e) > self.truncation:
                continue
            c = ring.normal_form(c)
            if c:
                out[e] = c
        self.terms = out

    # constructors
    @classmethod
    def zero(cls, ring, variables, truncation) -> "TruncatedSeries":
        return cls(ring, variables, truncation, {})

    @classmethod
    def constant(cls, ring, variables, truncation, c=ONE) -> "TruncatedSeries":
        variables = _norm_vars(variables)
        return cls(ring, variables, truncation, {(0,) * len(variables): c})

    @classmethod
    def variable(cls, ring, variables, truncation, name: str) -> "TruncatedSeries":
        variables = _norm_vars(variables)
        names = [n for n, _ in variables]
        e = [0] * len(variables)
        e[names.index(name)] = 1
        return cls(ring, variables, truncation, {tuple(e): ONE})

    def _new(self, terms, truncation=None, variables=None) -> "TruncatedSeries":
        return TruncatedSeries(
            self.ring,
            self.variables if variables is None else variables,
            self.truncation if truncation is None else truncation,
            terms,
            _clean=True,
        )

    # basic queries
    def degree_of(self, e) -> int:
        return sum(x * w for x, w in zip(e, self._weights))

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.variables]

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exps) -> frozenset:
        return self.terms.get(tuple(exps), ZERO)

    def lead_degree(self) -> int | None:
        if not self.terms:
            return None
        return min(self.degree_of(e) for e in self.terms)

    def constant_term(self) -> frozenset:
        return self.terms.get((0,) * len(self.variables), ZERO)

    def homogeneous_part(self, degree: int) -> "TruncatedSeries":
        return self._new({e: c for e, c in self.terms.items() if self.degree_of(e) == degree})

    def truncate(self, truncation: int) -> "TruncatedSeries":
        return self._new({e: c for e, c in self.terms.items() if self.degree_of(e) <= truncation}, truncation)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], frozenset]]:
        """Canonical order: ascending weighted degree, then lex-greatest exponent first."""
        return sorted(self.terms.items(), key=lambda kv: (self.degree_of(kv[0]), tuple(-x for x in kv[0])))

    # comparisons
    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.variables == other.variables and self.truncation == other.truncation and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.variables, self.truncation, frozenset(self.terms.items())))
        return self._hash

    def first_difference(self, other: "TruncatedSeries", truncation: int | None = None):
        """First monomial (canonical order) where the two series differ, up to
        the common truncation; ``None`` if they agree."""
        self._check(other)
        N = min(self.truncation, other.truncation) if truncation is None else truncation
        diff = {}
        for e in set(self.terms) | set(other.terms):
            if self.degree_of(e) > N:
                continue
            d = self.terms.get(e, ZERO) ^ other.terms.get(e, ZERO)
            if d:
                diff[e] = d
        if not diff:
            return None
        e = min(diff, key=lambda e: (self.degree_of(e), tuple(-x for x in e)))
        return e, diff[e]

    def agrees_with(self, other: "TruncatedSeries", truncation: int | None = None) -> bool:
        return self.first_difference(other, truncation) is None

    def _check(self, other: "TruncatedSeries") -> None:
        if self.variables != other.variables:
            raise VariableMismatch(f"{self.variables} vs {other.variables}")
        if self.ring is not other.ring:
            raise VariableMismatch("series are over different coefficient rings")

    # arithmetic
    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check(other)
        N = min(self.truncation, other.truncation)
        out = {e: c for e, c in self.terms.items() if self.degree_of(e) <= N}
        for e, c in other.terms.items():
            if self.degree_of(e) > N:
                continue
            r = out.get(e, ZERO) ^ c
            if r:
                out[e] = r
            else:
                out.pop(e, None)
        return self._new(out, N)

    __sub__ = __add__

    def __mul__(self, other) -> "TruncatedSeries":
        if isinstance(other, frozenset):
            return self.scale(other)
        self._check(other)
        return series_mul(self, other)

    def scale(self, c: frozenset) -> "TruncatedSeries":
        if not c:
            return self._new({})
        if c == ONE:
            return self
        out = {}
        for e, a in self.terms.items():
            r = self.ring.mul(a, c)
            if r:
                out[e] = r
        return self._new(out)

    def __pow__(self, k: int) -> "TruncatedSeries":
        r = TruncatedSeries.constant(self.ring, self.variables, self.truncation)
        for _ in range(k):
            r = r * self
        return r

    def times_monomial(self, exps, extend: bool = True) -> "TruncatedSeries":
        """Multiply by a monomial; with ``extend`` the truncation rises by the
        monomial's degree (exact: shifting loses no information)."""
        exps = tuple(exps)
        d = self.degree_of(exps)
        N = self.truncation + d if extend else self.truncation
        out = {}
        for e, c in self.terms.items():
            f = tuple(a + b for a, b in zip(e, exps))
            if self.degree_of(f) <= N:
                out[f] = c
        return self._new(out, N)

    def with_truncation(self, truncation: int) -> "TruncatedSeries":
        """Reinterpret at another truncation (caller guarantees exactness when raising it)."""
        if truncation <= self.truncation:
            return self.truncate(truncation)
        return self._new(dict(self.terms), truncation)

    # variables
    def embed(self, variables, rename: Mapping[str, str] | None = None) -> "TruncatedSeries":
        """Re-express over a variable list containing (renamed) current variables."""
        variables = _norm_vars(variables)
        rename = dict(rename or {})
        target = {n: i for i, (n, _) in enumerate(variables)}
        pos = []
        for n, w in self.variables:
            m = rename.get(n, n)
            if m not in target:
                raise VariableMismatch(f"variable {m} missing from target list")
            if variables[target[m]][1] != w:
                raise VariableMismatch(f"weight of {m} changes under embedding")
            pos.append(target[m])
        k = len(variables)
        out = {}
        for e, c in self.terms.items():
            f = [0] * k
            for p, x in zip(pos, e):
                f[p] += x
            out[tuple(f)] = c
        return TruncatedSeries(self.ring, variables, self.truncation, out, _clean=True)

    def swap(self, a: str, b: str) -> "TruncatedSeries":
        """Exchange two variables of equal weight."""
        names = self.names
        i, j = names.index(a), names.index(b)
        if self._weights[i] != self._weights[j]:
            raise VariableMismatch("cannot swap variables of different weight")
        out = {}
        for e, c in self.terms.items():
            f = list(e)
            f[i], f[j] = f[j], f[i]
            out[tuple(f)] = c
        return self._new(out)

    def set_zero(self, name: str) -> "TruncatedSeries":
        """Substitute 0 for a variable and drop it."""
        i = self.names.index(name)
        variables = self.variables[:i] + self.variables[i + 1 :]
        out = {e[:i] + e[i + 1 :]: c for e, c in self.terms.items() if e[i] == 0}
        return TruncatedSeries(self.ring, variables, self.truncation, out, _clean=True)

    def coefficient_series(self, fixed: Mapping[str, int]) -> "TruncatedSeries":
        """Coefficient of a monomial in some variables, as a series in the rest.
        The truncation drops by the fixed monomial's degree."""
        names = self.names
        idx = {names.index(n): e for n, e in fixed.items()}
        keep = [i for i in range(len(names)) if i not in idx]
        shift = sum(self._weights[i] * e for i, e in idx.items())
        variables = tuple(self.variables[i] for i in keep)
        out = {}
        for e, c in self.terms.items():
            if all(e[i] == x for i, x in idx.items()):
                out[tuple(e[i] for i in keep)] = c
        return TruncatedSeries(self.ring, variables, self.truncation - shift, out, _clean=True)

    def map_coefficients(self, fn, ring: CoefficientRing | None = None) -> "TruncatedSeries":
        ring = self.ring if ring is None else ring
        out = {}
        for e, c in self.terms.items():
            r = ring.normal_form(fn(c))
            if r:
                out[e] = r
        return TruncatedSeries(ring, self.variables, self.truncation, out, _clean=True)

    def change_ring(self, ring: CoefficientRing) -> "TruncatedSeries":
        return self.map_coefficients(lambda c: ring.embed_from(self.ring, c), ring)

    # text / json
    def format_monomial(self, e) -> str:
        parts = []
        for (n, _), x in zip(self.variables, e):
            if x == 1:
                parts.append(n)
            elif x > 1:
                parts.append(f"{n}^{x}")
        return "*".join(parts) if parts else "1"

    def format(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for e, c in self.sorted_terms():
            mono = self.format_monomial(e)
            if c == ONE:
                out.append(mono)
            else:
                cs = self.ring.format(c)
                if len(c) > 1:
                    cs = f"({cs})"
                out.append(cs if mono == "1" else f"{cs}*{mono}")
        return " + ".join(out)

    def __repr__(self) -> str:
        return f"<{self.format()} + O({self.truncation + 1})>"

    def to_json(self) -> dict:
        return {
            "variables": [{"name": n, "weight": w} for n, w in self.variables],
            "truncation": self.truncation,
            "terms": [
                {"exponents": list(e), "coefficient": self.ring.monomial_strings(c)}
                for e, c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping, ring: CoefficientRing) -> "TruncatedSeries":
        variables = [(v["name"], v["weight"]) for v in data["variables"]]
        terms = {}
        for t in data["terms"]:
            terms[tuple(t["exponents"])] = ring.parse(t["coefficient"])
        return cls(ring, variables, data["truncation"], terms)


def series_mul(a: TruncatedSeries, b: TruncatedSeries, truncation: int | None = None) -> TruncatedSeries:
    """Product, dropping terms above the truncation. By default the common
    truncation; an explicit larger value is the caller's guarantee that the
    factors' missing terms cannot contribute (e.g. one factor has large
    lead degree)."""
    a._check(b)
    N = min(a.truncation, b.truncation) if truncation is None else truncation
    ring = a.ring
    bi = sorted(((b.degree_of(e), e, c) for e, c in b.terms.items()), key=lambda x: x[0])
    acc: dict[tuple, set] = {}
    for ea, ca in a.terms.items():
        da = a.degree_of(ea)
        if da > N:
            continue
        for db, eb, cb in bi:
            if da + db > N:
                break
            e = tuple(x + y for x, y in zip(ea, eb))
            s = acc.get(e)
            if s is None:
                s = acc[e] = set()
            if ca == ONE:
                for m in cb:
                    _toggle(s, m)
            elif cb == ONE:
                for m in ca:
                    _toggle(s, m)
            else:
                ring.mul_raw(ca, cb, s)
    out = {}
    for e, s in acc.items():
        if s:
            c = ring.normal_form(s)
            if c:
                out[e] = c
    return TruncatedSeries(ring, a.variables, N, out, _clean=True)


def series_substitute(
    target: TruncatedSeries,
    bindings: Mapping[str, TruncatedSeries],
    variables=None,
    truncation: int | None = None,
) -> TruncatedSeries:
    """Substitute series for variables of ``target``.

    The result lives over ``variables`` (default: the unbound variables of
    ``target`` followed by the variables of the bindings, in order of first
    appearance). Each binding needs zero constant term; it must not lower
    weighted degree (lead degree >= the replaced variable's weight), which
    is what makes the truncated composite exact at ``truncation``
    (default: the target's).
    """
    names = target.names
    for v, s in bindings.items():
        if v not in names:
            raise VariableMismatch(f"{v} is not a variable of the target")
        if s.constant_term():
            raise NonzeroConstantTerm(f"binding for {v} has nonzero constant term")
        if s.ring is not target.ring:
            raise VariableMismatch("binding over a different coefficient ring")
        ld = s.lead_degree()
        w = target.variables[names.index(v)][1]
        if ld is not None and ld < w:
            raise ValueError(f"binding for {v} lowers weighted degree ({ld} < {w})")
    if variables is None:
        seen: dict[str, int] = {}
        for n, w in target.variables:
            if n not in bindings:
                seen.setdefault(n, w)
        for s in bindings.values():
            for n, w in s.variables:
                if seen.setdefault(n, w) != w:
                    raise VariableMismatch(f"conflicting weights for {n}")
        variables = tuple(seen.items())
    variables = _norm_vars(variables)
    N = target.truncation if truncation is None else truncation
    ring = target.ring

    bound = [i for i, n in enumerate(names) if n in bindings]
    free = [i for i, n in enumerate(names) if n not in bindings]
    free_vars = tuple(target.variables[i] for i in free)
    one = TruncatedSeries.constant(ring, variables, N)
    emb = {n: s.embed(variables) for n, s in bindings.items()}

    cache: dict[tuple, TruncatedSeries] = {(0,) * len(bound): one}

    def product(be: tuple) -> TruncatedSeries:
        r = cache.get(be)
        if r is None:
            k = max(i for i, x in enumerate(be) if x)
            prev = list(be)
            prev[k] -= 1
            r = series_mul(product(tuple(prev)), emb[names[bound[k]]], N)
            cache[be] = r
        return r

    grouped: dict[tuple, dict] = defaultdict(dict)
    for e, c in target.terms.items():
        grouped[tuple(e[i] for i in bound)][tuple(e[i] for i in free)] = c
    total: dict[tuple, frozenset] = {}
    for be, rest in grouped.items():
        part = TruncatedSeries(ring, free_vars, N, rest, _clean=True).embed(variables)
        prod = series_mul(product(be), part, N)
        for e, c in prod.terms.items():
            r = total.get(e, ZERO) ^ c
            if r:
                total[e] = r
            else:
                total.pop(e, None)
    return TruncatedSeries(ring, variables, N, total, _clean=True)


# ---------------------------------------------------------------------------
# degreewise triangular solving


def solve_degreewise(target: TruncatedSeries, unknowns: Sequence[tuple[object, TruncatedSeries]], *, lead_degrees: Mapping | None = None):
    """Find ring coefficients ``c_k`` with ``sum c_k * S_k == target``.

    Each basis series ``S_k`` must have a lead part (its lowest-degree
    homogeneous part) with coefficients in GF(2). Degrees are processed in
    increasing order; within a degree the unknowns are eliminated in the
    given order. Raises ``Underdetermined`` or ``NotExpressible``.
    """
    ring = target.ring
    N = target.truncation
    deg = target.degree_of
    by_degree: dict[int, list] = defaultdict(list)
    for key, s in unknowns:
        s._check(target)
        d = s.lead_degree() if lead_degrees is None else lead_degrees[key]
        if d is None:
            raise Underdetermined(-1, [key])
        by_degree[d].append((key, s))
    residual = {e: c for e, c in target.terms.items()}
    solution: dict = {}
    for d in range(0, N + 1):
        res_d = {e: c for e, c in residual.items() if deg(e) == d}
        unk = by_degree.get(d, [])
        if not unk:
            if res_d:
                e = min(res_d, key=lambda e: tuple(-x for x in e))
                raise NotExpressible(d, target.format_monomial(e), ring.format(res_d[e]))
            continue
        rowmask: dict[tuple, int] = defaultdict(int)
        for j, (key, s) in enumerate(unk):
            for e, c in s.terms.items():
                if deg(e) != d:
                    continue
                if c != ONE:
                    raise ValueError(f"lead part of basis element {key} has non-constant coefficient")
                rowmask[e] |= 1 << j
        monos = sorted(set(rowmask) | set(res_d), key=lambda e: tuple(-x for x in e))
        rows = [(rowmask.get(e, 0), res_d.get(e, ZERO)) for e in monos]
        table, leftovers = gf2.eliminate(rows, lambda a, b: a ^ b)
        for payload in leftovers:
            if payload:
                raise NotExpressible(d, "(combination)", ring.format(payload))
        if len(table) < len(unk):
            missing = [unk[j][0] for j in range(len(unk)) if j not in table]
            raise Underdetermined(d, missing)
        for j, (mask, payload) in table.items():
            if not payload:
                continue
            key, s = unk[j]
            solution[key] = payload
            for e, c in s.terms.items():
                r = residual.get(e, ZERO) ^ ring.mul(c, payload)
                if r:
                    residual[e] = r
                else:
                    residual.pop(e, None)
        left = {e: c for e, c in residual.items() if deg(e) == d}
        if left:
            e = min(left)
            raise NotExpressible(d, target.format_monomial(e), ring.format(left[e]))
    return solution


def invariant_rewrite(G: TruncatedSeries, F, x: str | None = None, t: str | None = None, u: str = "u") -> TruncatedSeries:
    """Write a series ``G(x, t)`` invariant under ``x -> F(x, t)`` as
    ``H(t, u)`` with ``u = x F(x, t)``.

    ``F`` is a ``FormalGroupLaw`` whose argument weight is 1; the result has
    variables ``(t, 1), (u, 2)`` and the truncation of ``G``.
    """
    x = G.names[0] if x is None else x
    t = G.names[1] if t is None else t
    if sorted(G.names) != sorted([x, t]):
        raise VariableMismatch("G must be a series in exactly two variables")
    N = G.truncation
    law = F.extended(N)
    X = TruncatedSeries.variable(G.ring, G.variables, N, x)
    T = TruncatedSeries.variable(G.ring, G.variables, N, t)
    sigma_x = law.evaluate(X, T)
    moved = series_substitute(G, {x: sigma_x}, G.variables, N)
    diff = moved.first_difference(G)
    if diff is not None:
        e, c = diff
        raise NotInvariant(G.format_monomial(e), G.ring.format(c))
    u_series = series_mul(X, law.evaluate(X, T), N)
    unknowns = []
    tw = dict(G.variables)[t]
    upow = [TruncatedSeries.constant(G.ring, G.variables, N)]
    while 2 * len(upow) <= N:
        upow.append(series_mul(upow[-1], u_series, N))
    ti = G.names.index(t)
    for d in range(N + 1):
        for b in range(d // 2, -1, -1):
            rem = d - 2 * b
            if rem % tw:
                continue
            a = rem // tw
            e = [0, 0]
            e[ti] = a
            unknowns.append(((a, b), upow[b].times_monomial(e, extend=False)))
    sol = solve_degreewise(G, unknowns)
    out = {(a, b): c for (a, b), c in sol.items()}
    return TruncatedSeries(G.ring, ((t, tw), (u, 2)), N, out)
