"""Mod-2 Dyer-Lashof calculus: Adem rewriting, Cartan expansion, admissible
monomials, and the action on GF(2)[b_0, b_1, ...]."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .fgl import additive_fgl
from .series import ONE, ZERO, CoefficientRing, TruncatedSeries, invariant_rewrite, series_mul, series_substitute


class NonTermination(RuntimeError):
    pass


def _lucas(a: int, b: int) -> int:
    return 1 if 0 <= b <= a and (a & b) == b else 0


def binom_mod2(a: int, b: int) -> int:
    """Coefficient of z^b in (1 + z)^a over GF(2), for any integer a.

    For a < 0 this is the inverse power series: (1+z)^a = sum (-1)^b
    C(b - a - 1, b) z^b, and the sign disappears mod 2.
    """
    if b < 0:
        return 0
    if a >= 0:
        return _lucas(a, b)
    return _lucas(b - a - 1, b)


def is_admissible_pair(m: int, n: int) -> bool:
    """``q_m q_n`` is admissible iff m <= n.

    The Adem sum for m > n only produces pairs (m', i) with m' <= n < i,
    and rewriting toward m <= n is confluent; the weaker bound m <= 2n is
    not (it leaves q_2 q_1 = 0 unapplied).
    """
    return m <= n


@dataclass(frozen=True, order=True)
class QMonomial:
    """``q_{m1} ... q_{mk}`` applied to a generator; ``q_{mk}`` acts first."""

    indices: tuple[int, ...]
    generator: str = ""
    generator_grade: int = 0

    def grade(self) -> int:
        g = self.generator_grade
        for n in reversed(self.indices):
            g = 2 * g + n
        return g

    def inadmissible_positions(self) -> list[int]:
        ix = self.indices
        return [j for j in range(len(ix) - 1) if not is_admissible_pair(ix[j], ix[j + 1])]

    def is_admissible(self) -> bool:
        return not self.inadmissible_positions()

    def sort_key(self):
        return (self.grade(), len(self.indices), self.indices, self.generator)

    def format(self) -> str:
        parts = [f"q_{n}" for n in self.indices]
        if self.generator:
            parts.append(self.generator)
        return " ".join(parts) if parts else "1"

    def to_json(self) -> dict:
        return {"indices": list(self.indices), "generator": self.generator, "grade": self.grade()}


class QPolynomial:
    """A GF(2)-linear combination of ``QMonomial``s."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[QMonomial] = ()):
        acc: set = set()
        for m in terms:
            acc ^= {m}
        self.terms = frozenset(acc)

    @classmethod
    def monomial(cls, *indices: int, generator: str = "", generator_grade: int = 0) -> "QPolynomial":
        return cls([QMonomial(tuple(indices), generator, generator_grade)])

    def __add__(self, other: "QPolynomial") -> "QPolynomial":
        p = QPolynomial()
        p.terms = self.terms ^ other.terms
        return p

    def __eq__(self, other) -> bool:
        return isinstance(other, QPolynomial) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self):
        return iter(self.sorted())

    def __len__(self) -> int:
        return len(self.terms)

    def sorted(self) -> list[QMonomial]:
        return sorted(self.terms, key=QMonomial.sort_key)

    def grades(self) -> set[int]:
        return {m.grade() for m in self.terms}

    def format(self) -> str:
        return " + ".join(m.format() for m in self.sorted()) if self.terms else "0"

    def __repr__(self) -> str:
        return f"QPolynomial({self.format()!r})"

    def to_json(self) -> list:
        return [m.to_json() for m in self.sorted()]


def adem_expand(m: int, n: int) -> QPolynomial:
    """Right-hand side of the Adem relation for ``q_m q_n`` (one step, not
    normalized): sum over i of C(i-n-1, 2i-m-n) q_{m+2n-2i} q_i."""
    out = []
    for i in range(0, (m + 2 * n) // 2 + 1):
        if binom_mod2(i - n - 1, 2 * i - m - n):
            out.append(QMonomial((m + 2 * n - 2 * i, i)))
    return QPolynomial(out)


def _rewrite(mono: QMonomial, strategy: str):
    bad = mono.inadmissible_positions()
    if not bad:
        return None
    j = bad[0] if strategy == "leftmost" else bad[-1]
    ix = mono.indices
    out = []
    for r in adem_expand(ix[j], ix[j + 1]).terms:
        out.append(QMonomial(ix[:j] + r.indices + ix[j + 2 :], mono.generator, mono.generator_grade))
    return out


def normal_form(p: QPolynomial, strategy: str = "leftmost", max_steps: int = 100_000, on_step=None) -> QPolynomial:
    """Rewrite until every monomial is admissible (m <= n for each adjacent
    pair). ``on_step(before, after_terms)`` observes each rewrite."""
    if strategy not in ("leftmost", "rightmost"):
        raise ValueError("strategy must be 'leftmost' or 'rightmost'")
    pending = set(p.terms)
    done: set = set()
    steps = 0
    while pending:
        mono = max(pending, key=QMonomial.sort_key)
        pending.remove(mono)
        new = _rewrite(mono, strategy)
        if new is None:
            done ^= {mono}
            continue
        steps += 1
        if steps > max_steps:
            raise NonTermination(f"more than {max_steps} rewrite steps; last term {mono.format()}")
        if on_step is not None:
            on_step(mono, new)
        for m in new:
            pending ^= {m}
    out = QPolynomial()
    out.terms = frozenset(done)
    return out


def cartan_expand(n: int, factors: Sequence) -> frozenset:
    """``q_n(f_1 ... f_k)`` as a GF(2) sum of products ``prod q_{i_j}(f_j)``.

    Each product is a sorted tuple of ``(factor, index)`` pairs, so equal
    products arising from repeated factors cancel in pairs.
    """
    factors = list(factors)
    if not factors:
        raise ValueError("need at least one factor")
    acc: set = set()
    k = len(factors)
    for cut in itertools.combinations(range(n + k - 1), k - 1):
        parts, prev = [], -1
        for c in cut + (n + k - 1,):
            parts.append(c - prev - 1)
            prev = c
        term = tuple(sorted(zip(factors, parts)))
        acc ^= {term}
    return frozenset(acc)


def format_cartan(terms: frozenset) -> str:
    if not terms:
        return "0"
    out = []
    for term in sorted(terms):
        out.append("*".join(f"q_{i}({f})" for f, i in term))
    return " + ".join(out)


def free_q_basis(generator_grade: int, max_weight: int, max_grade: int, max_length: int = 3, generator: str = "x") -> list[QMonomial]:
    """Admissible monomials ``q_{m1}..q_{mk} x`` with 1 <= k <= max_length,
    index sum <= max_weight and grade <= max_grade."""
    out = []
    for k in range(1, max_length + 1):
        for ix in itertools.product(range(max_weight + 1), repeat=k):
            if sum(ix) > max_weight:
                continue
            m = QMonomial(ix, generator, generator_grade)
            if m.is_admissible() and m.grade() <= max_grade:
                out.append(m)
    return sorted(out, key=QMonomial.sort_key)


# ---------------------------------------------------------------------------
# action on GF(2)[b_0, b_1, ...]


def b_ring(top: int) -> CoefficientRing:
    return CoefficientRing([(f"b_{i}", i) for i in range(top + 1)])


@dataclass(frozen=True)
class PriddyTable:
    """``q_n(b_k)`` read off ``b(x) b(x+t) = sum_k Q_t(b_k) (x(x+t))^k``."""

    ring: CoefficientRing
    truncation: int
    rewrite: TruncatedSeries

    def q(self, n: int, k: int) -> frozenset:
        if 2 * k + n > self.truncation:
            raise ValueError(f"q_{n}(b_{k}) needs truncation >= {2 * k + n}")
        return self.rewrite.coefficient((n, k))

    def b(self, k: int) -> frozenset:
        return self.ring.gen(f"b_{k}")

    def apply(self, n: int, elem: frozenset) -> frozenset:
        """``q_n`` on a polynomial in the b's, by additivity and Cartan."""
        ring = self.ring
        acc: set = set()
        for mono in elem:
            factors = []
            for i, e in enumerate(ring.exponents(mono)):
                factors += [i] * e
            if not factors:
                if n == 0:
                    acc ^= ONE
                continue
            for term in cartan_expand(n, factors):
                r = ONE
                for k, i in term:
                    r = ring.mul(r, self.q(i, k))
                    if not r:
                        break
                acc ^= r
        return ring.normal_form(acc)

    def apply_word(self, indices: Sequence[int], elem: frozenset) -> frozenset:
        for n in reversed(indices):
            elem = self.apply(n, elem)
        return elem


@lru_cache(maxsize=8)
def priddy_table(truncation: int) -> PriddyTable:
    ring = b_ring(truncation)
    N = truncation
    v = (("x", 1), ("t", 1))
    bx = TruncatedSeries(ring, v, N, {(i, 0): ring.gen(f"b_{i}") for i in range(N + 1)})
    X = TruncatedSeries.variable(ring, v, N, "x")
    T = TruncatedSeries.variable(ring, v, N, "t")
    bxt = series_substitute(bx, {"x": X + T}, v, N)
    G = series_mul(bx, bxt)
    H = invariant_rewrite(G, additive_fgl(N, ring))
    return PriddyTable(ring, N, H)


def priddy_action(n: int, k: int, truncation: int | None = None) -> frozenset:
    N = 2 * k + n if truncation is None else truncation
    if N < 2 * k + n:
        raise ValueError("truncation must be at least n + 2k")
    return priddy_table(N).q(n, k)


def required_truncation(m: int, n: int, k: int) -> int:
    need = 2 * (2 * k + n) + m
    for mono in adem_expand(m, n).terms:
        a, b = mono.indices
        need = max(need, 2 * (2 * k + b) + a)
    return need


@dataclass(frozen=True)
class AdemCheck:
    m: int
    n: int
    k: int
    lhs: frozenset
    rhs: frozenset
    ring: CoefficientRing

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    @property
    def difference(self) -> frozenset:
        return self.lhs ^ self.rhs

    def format(self) -> str:
        status = "equal" if self.equal else f"UNEQUAL, difference {self.ring.format(self.difference)}"
        return f"q_{self.m} q_{self.n}(b_{self.k}): {status}"


def check_adem_on_priddy(m: int, n: int, k: int, truncation: int | None = None) -> AdemCheck:
    """Compare ``q_m(q_n(b_k))`` with ``adem_expand(m, n)`` evaluated on
    ``b_k`` in the polynomial ring model."""
    need = required_truncation(m, n, k)
    N = need if truncation is None else truncation
    if N < need:
        raise ValueError(f"truncation must be at least {need}")
    table = priddy_table(N)
    bk = table.b(k)
    lhs = table.apply(m, table.apply(n, bk))
    rhs: set = set()
    for mono in adem_expand(m, n).terms:
        rhs ^= table.apply_word(mono.indices, bk)
    return AdemCheck(m, n, k, lhs, table.ring.normal_form(rhs), table.ring)
