"""Formal group laws of order two, the truncated Lazard ring, Lubin quotients."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .series import (
    GF2,
    ONE,
    ZERO,
    CoefficientRing,
    TruncatedSeries,
    Underdetermined,
    NotExpressible,
    series_mul,
    series_substitute,
    solve_degreewise,
)


class LawViolation(ValueError):
    axiom = "law"

    def __init__(self, monomial: str, coefficient: str, detail: str = ""):
        msg = f"{self.axiom}: first offending coefficient at {monomial}: {coefficient}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.monomial = monomial
        self.coefficient = coefficient


class UnitViolation(LawViolation):
    axiom = "unit"


class CommutativityViolation(LawViolation):
    axiom = "commutativity"


class AssociativityViolation(LawViolation):
    axiom = "associativity"


class OrderTwoViolation(LawViolation):
    axiom = "order-two"


class HomogeneityViolation(LawViolation):
    axiom = "homogeneity"


class InvalidFormalGroupLaw(ValueError):
    def __init__(self, violations: list[LawViolation]):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = violations


class UnderdeterminedStep(ValueError):
    pass


class InconsistentStep(ValueError):
    pass


class ClosedFormMismatch(ValueError):
    pass


class KernelMismatch(ValueError):
    pass


class SymmetryMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=True)
class FormalGroupLaw:
    """A validated law ``F(x, y)``; variables after the first two are
    parameters (``t``, ``s``) of the coefficient power-series ring."""

    series: TruncatedSeries

    @property
    def ring(self) -> CoefficientRing:
        return self.series.ring

    @property
    def truncation(self) -> int:
        return self.series.truncation

    @property
    def weight(self) -> int:
        return self.series.variables[0][1]

    @property
    def x(self) -> str:
        return self.series.variables[0][0]

    @property
    def y(self) -> str:
        return self.series.variables[1][0]

    @property
    def params(self) -> tuple:
        return self.series.variables[2:]

    def evaluate(self, a: TruncatedSeries, b: TruncatedSeries, truncation: int | None = None) -> TruncatedSeries:
        """``F(a, b)`` over the variables of ``a`` (which must contain the
        law's parameters and share variables with ``b``)."""
        variables = a.variables
        if b.variables != variables:
            raise ValueError("arguments must share variables")
        N = a.truncation if truncation is None else truncation
        return series_substitute(self.series, {self.x: a, self.y: b}, variables, N)

    def extended(self, truncation: int) -> "FormalGroupLaw":
        """The same law at another truncation. Raising it is only possible
        when homogeneity forces every missing coefficient to vanish."""
        if truncation <= self.truncation:
            return FormalGroupLaw(self.series.truncate(truncation))
        if not self.ring.exact_above(self.truncation - self.weight):
            raise ValueError(f"cannot extend law beyond truncation {self.truncation}")
        return FormalGroupLaw(self.series.with_truncation(truncation))

    def coefficient(self, i: int, j: int, **params) -> frozenset:
        e = [i, j] + [params.get(n, 0) for n, _ in self.params]
        return self.series.coefficient(e)

    def map_ring(self, ring: CoefficientRing, fn=None) -> "FormalGroupLaw":
        if fn is None:
            return FormalGroupLaw(self.series.change_ring(ring))
        return FormalGroupLaw(self.series.map_coefficients(fn, ring))

    def format(self) -> str:
        return self.series.format()


@dataclass(frozen=True)
class Isogeny:
    source: FormalGroupLaw
    target: FormalGroupLaw
    map: TruncatedSeries
    kernel: tuple = field(default=())

    def format(self) -> str:
        return self.map.format()


# ---------------------------------------------------------------------------
# validation


def _first(s: TruncatedSeries, other: TruncatedSeries | None = None):
    if other is None:
        if not s.terms:
            return None
        e, c = s.sorted_terms()[0]
        return s.format_monomial(e), s.ring.format(c)
    d = s.first_difference(other)
    if d is None:
        return None
    e, c = d
    return s.format_monomial(e), s.ring.format(c)


def check_law(candidate: TruncatedSeries) -> list[LawViolation]:
    """All violated axioms, each with its first offending coefficient."""
    s = candidate
    if len(s.variables) < 2:
        raise ValueError("a law needs two argument variables")
    if s.variables[0][1] != s.variables[1][1]:
        raise ValueError("argument variables must have equal weight")
    x, y = s.names[:2]
    w = s.variables[0][1]
    N = s.truncation
    ring = s.ring
    out: list[LawViolation] = []

    X = TruncatedSeries.variable(ring, s.variables, N, x)
    Y = TruncatedSeries.variable(ring, s.variables, N, y)
    bad = _first(s.set_zero(y), X.set_zero(y)) or _first(s.set_zero(x), Y.set_zero(x))
    if bad:
        out.append(UnitViolation(*bad))

    bad = _first(s, s.swap(x, y))
    if bad:
        out.append(CommutativityViolation(*bad))

    if s.terms:
        z = "z"
        while z in s.names:
            z += "_"
        v3 = s.variables[:2] + ((z, w),) + s.variables[2:]
        X3 = TruncatedSeries.variable(ring, v3, N, x)
        Y3 = TruncatedSeries.variable(ring, v3, N, y)
        Z3 = TruncatedSeries.variable(ring, v3, N, z)
        law = FormalGroupLaw(s)
        left = law.evaluate(law.evaluate(X3, Y3), Z3)
        right = law.evaluate(X3, law.evaluate(Y3, Z3))
        bad = _first(left, right)
        if bad:
            out.append(AssociativityViolation(*bad))

        vx = (s.variables[0],) + s.variables[2:]
        Xo = TruncatedSeries.variable(ring, vx, N, x)
        bad = _first(law.evaluate(Xo, Xo))
        if bad:
            out.append(OrderTwoViolation(*bad))

    for e, c in s.sorted_terms():
        want = s.degree_of(e) - w
        if not ring.is_homogeneous(c, want):
            out.append(HomogeneityViolation(s.format_monomial(e), ring.format(c), f"expected ring degree {want}"))
            break
    return out


def fgl_validate(candidate: TruncatedSeries) -> FormalGroupLaw:
    if candidate.truncation < 2:
        raise ValueError("truncation must be at least 2")
    violations = check_law(candidate)
    if violations:
        raise InvalidFormalGroupLaw(violations)
    return FormalGroupLaw(candidate)


def additive_fgl(N: int, ring: CoefficientRing = GF2, weight: int = 1, params=()) -> FormalGroupLaw:
    variables = (("x", weight), ("y", weight)) + tuple(params)
    k = len(variables)
    ex = (1, 0) + (0,) * (k - 2)
    ey = (0, 1) + (0,) * (k - 2)
    return FormalGroupLaw(TruncatedSeries(ring, variables, N, {ex: ONE, ey: ONE}))


def is_additive(F: FormalGroupLaw) -> bool:
    k = len(F.series.variables)
    ex = (1, 0) + (0,) * (k - 2)
    ey = (0, 1) + (0,) * (k - 2)
    return F.series.terms == {ex: ONE, ey: ONE}


# ---------------------------------------------------------------------------
# Lazard ring


def lazard_generators(Dmax: int) -> list[tuple[str, int]]:
    gens = []
    for d in range(1, Dmax + 1):
        for i in range(1, d + 1):
            gens.append((f"a_{i}_{d + 1 - i}", d))
    return gens


def _generic_law(Dmax: int, ring: CoefficientRing) -> TruncatedSeries:
    terms = {(1, 0): ONE, (0, 1): ONE}
    for name, d in lazard_generators(Dmax):
        _, i, j = name.split("_")
        terms[(int(i), int(j))] = ring.gen(name)
    return TruncatedSeries(ring, (("x", 1), ("y", 1)), Dmax + 1, terms)


def lazard_relations(Dmax: int) -> tuple[CoefficientRing, list[frozenset]]:
    """Axiom coefficients of the generic law over the free ring, through ring
    degree ``Dmax``. Returns the free ring and the nonzero relations."""
    gens = lazard_generators(Dmax)
    free = CoefficientRing(gens, max_degree=Dmax)
    F = _generic_law(Dmax, free)
    N = Dmax + 1
    rels: list[frozenset] = []
    comm = F + F.swap("x", "y")
    rels += list(comm.terms.values())
    law = FormalGroupLaw(F)
    v3 = (("x", 1), ("y", 1), ("z", 1))
    X, Y, Z = (TruncatedSeries.variable(free, v3, N, n) for n in "xyz")
    assoc = law.evaluate(law.evaluate(X, Y), Z) + law.evaluate(X, law.evaluate(Y, Z))
    rels += list(assoc.terms.values())
    X1 = TruncatedSeries.variable(free, (("x", 1),), N, "x")
    rels += list(law.evaluate(X1, X1).terms.values())
    return free, rels


@lru_cache(maxsize=None)
def lazard_ring(Dmax: int) -> tuple[CoefficientRing, FormalGroupLaw]:
    """The order-two Lazard ring, exact in degrees <= Dmax, with its
    universal law ``x + y + sum a_ij x^i y^j`` (truncation Dmax + 1)."""
    if Dmax < 1:
        raise ValueError("Dmax must be at least 1")
    free, rels = lazard_relations(Dmax)
    ring = CoefficientRing(free.generators, rels, max_degree=Dmax, n_free=0)
    F = _generic_law(Dmax, ring)
    return ring, FormalGroupLaw(F)


def lazard_dimensions(Dmax: int) -> dict[int, int]:
    ring, _ = lazard_ring(Dmax)
    return {d: ring.dimension(d) for d in range(Dmax + 1)}


def thom_dimensions(Dmax: int) -> dict[int, int]:
    """Monomial counts for a polynomial ring with one generator in each
    degree not of the form 2^k - 1."""
    gens = [d for d in range(1, Dmax + 1) if (d + 1) & d]
    counts = [1] + [0] * Dmax
    for g in gens:
        for d in range(g, Dmax + 1):
            counts[d] += counts[d - g]
    return dict(enumerate(counts))


# ---------------------------------------------------------------------------
# Lubin quotients


def _leading(s: TruncatedSeries, degree: int) -> TruncatedSeries:
    return s.homogeneous_part(degree)


def lubin_quotient(F: FormalGroupLaw, kill: TruncatedSeries | None = None, name: str = "t", validate: bool = True):
    """Quotient of ``F`` by the subgroup ``{0, kill}``.

    ``kill`` defaults to a fresh parameter ``name`` of the law's weight. The
    isogeny is ``h(x) = x F(x, kill)``; the quotient law has argument weight
    ``2w`` and truncation ``N + w`` (``N``, ``w`` those of ``F``), which is
    the range in which ``h(F(x, y)) = F'(h(x), h(y))`` determines it.
    """
    w, N = F.weight, F.truncation
    ring = F.ring
    params = dict(F.params)
    if kill is None:
        if name in params or name in (F.x, F.y):
            raise ValueError(f"parameter {name} already in use")
        kill = TruncatedSeries.variable(ring, ((name, w),), N, name)
    if kill.ring is not ring:
        raise ValueError("kill element over a different ring")
    for n, wt in kill.variables:
        if params.setdefault(n, wt) != wt:
            raise ValueError(f"conflicting weight for parameter {n}")
    ld = kill.lead_degree()
    if ld is None or ld < w:
        raise ValueError("kill element must have lead degree >= the law's weight")
    P = tuple(params.items())
    M = N + w

    vx = (("x", w),) + P
    vxy = (("x", w), ("y", w)) + P
    law = FormalGroupLaw(F.series.embed((("x", w), ("y", w)) + P, {F.x: "x", F.y: "y"}))
    X = TruncatedSeries.variable(ring, vx, N, "x")
    tau = kill.embed(vx)
    h = series_mul(X, law.evaluate(X, tau), M)

    # target h(F(x, y))
    X2 = TruncatedSeries.variable(ring, vxy, N, "x")
    Y2 = TruncatedSeries.variable(ring, vxy, N, "y")
    tau2 = kill.embed(vxy)
    Fxy = law.evaluate(X2, Y2)
    target = series_mul(Fxy, law.evaluate(Fxy, tau2), M)

    hx = h.embed(vxy)
    hy = h.embed(vxy, {"x": "y"})
    lead = h.homogeneous_part(2 * w)
    if any(c != ONE for c in lead.terms.values()):
        raise UnderdeterminedStep("isogeny lead part is not defined over GF(2)")

    hxp = [TruncatedSeries.constant(ring, vxy, M)]
    hyp = [TruncatedSeries.constant(ring, vxy, M)]
    while 2 * w * len(hxp) <= M:
        hxp.append(series_mul(hxp[-1], hx, M))
        hyp.append(series_mul(hyp[-1], hy, M))

    pw = [wt for _, wt in P]
    unknowns = []
    for total in range(1, M // (2 * w) + 1):
        for i in range(total, -1, -1):
            j = total - i
            base = series_mul(hxp[i], hyp[j], M)
            rem = M - 2 * w * total
            for pe in _monomials(pw, rem):
                unknowns.append(((i, j) + pe, base.times_monomial((0, 0) + pe, extend=False)))
    try:
        sol = solve_degreewise(target, unknowns)
    except Underdetermined as exc:
        raise UnderdeterminedStep(str(exc)) from exc
    except NotExpressible as exc:
        raise InconsistentStep(str(exc)) from exc

    out_vars = (("x", 2 * w), ("y", 2 * w)) + P
    Ft = TruncatedSeries(ring, out_vars, M, sol)
    if validate:
        Ft_law = fgl_validate(Ft)
    else:
        Ft_law = FormalGroupLaw(Ft)

    # kernel: h(0) = 0 trivially; h(kill) = kill F(kill, kill) = 0
    kv = kill.variables
    hk = series_substitute(h, {"x": kill.embed(P)}, P, M)
    if not hk.is_zero():
        raise KernelMismatch(f"h does not vanish on the kernel element: {hk.format()}")
    zero = TruncatedSeries.zero(ring, kv, M)
    iso = Isogeny(F, Ft_law, h, (zero, kill))
    return Ft_law, iso


def _monomials(weights: list[int], bound: int):
    """Exponent vectors with weighted degree <= bound, ascending degree."""
    out = []

    def rec(i, rem, acc):
        if i == len(weights):
            out.append(tuple(acc))
            return
        for e in range(rem // weights[i] + 1):
            rec(i + 1, rem - e * weights[i], acc + [e])

    rec(0, bound, [])
    out.sort(key=lambda e: (sum(a * b for a, b in zip(e, weights)), tuple(-x for x in e)))
    return out


@dataclass(frozen=True)
class IteratedQuotient:
    Ft: FormalGroupLaw
    ht: Isogeny
    Fts: FormalGroupLaw
    hts: Isogeny
    checks: dict


def iterated_quotient(F: FormalGroupLaw, t: str = "t", s: str = "s") -> IteratedQuotient:
    """Two Lubin quotients: by ``{0, t}`` and then by ``{0, h_t(s)}``.

    Verifies the closed form ``h_ts(x) = x F(x,t) F(x,s) F(x, F(s,t))``, the
    kernel ``{0, t, s, F(s,t)}`` and the symmetry ``F_ts = F_st``.
    """
    w, N = F.weight, F.truncation
    ring = F.ring
    Ft, ht = lubin_quotient(F, name=t)
    # h_t(s)
    hts_kill = ht.map.embed(((s, w), (t, w)), {"x": s})
    hts_kill = hts_kill.embed(((t, w), (s, w)))
    Fts, H = lubin_quotient(Ft, kill=hts_kill)
    M = N + 3 * w
    vx = (("x", w), (t, w), (s, w))
    hx = ht.map.embed(vx)
    Hx = H.map.embed((("x", 2 * w), (t, w), (s, w)))
    composite = series_substitute(Hx, {"x": hx}, vx, M)

    # closed form
    law = FormalGroupLaw(F.series.embed((("x", w), ("y", w)) + vx[1:], {F.x: "x", F.y: "y"}))
    X = TruncatedSeries.variable(ring, vx, N, "x")
    T = TruncatedSeries.variable(ring, vx, N, t)
    S = TruncatedSeries.variable(ring, vx, N, s)
    Fst = law.evaluate(S, T)
    closed = series_mul(X, law.evaluate(X, T), N + w)
    closed = series_mul(closed, law.evaluate(X, S), N + 2 * w)
    closed = series_mul(closed, law.evaluate(X, Fst), M)
    checks = {}
    diff = closed.first_difference(composite)
    if diff is not None:
        raise ClosedFormMismatch(f"h_ts differs from closed form at {closed.format_monomial(diff[0])}")
    checks["closed_form"] = len(composite.terms)

    kv = ((t, w), (s, w))
    kernel = [
        TruncatedSeries.zero(ring, kv, N),
        TruncatedSeries.variable(ring, kv, N, t),
        TruncatedSeries.variable(ring, kv, N, s),
        Fst.set_zero("x"),
    ]
    names = ["0", t, s, f"F({s},{t})"]
    for nm, k in zip(names, kernel):
        if k.is_zero():
            continue
        val = series_substitute(composite, {"x": k}, kv, M)
        if not val.is_zero():
            raise KernelMismatch(f"h_ts({nm}) = {val.format()} != 0")
    checks["kernel"] = names

    swapped = Fts.series.swap(t, s)
    diff = Fts.series.first_difference(swapped)
    if diff is not None:
        raise SymmetryMismatch(f"F_ts != F_st at {Fts.series.format_monomial(diff[0])}")
    checks["symmetry_truncation"] = Fts.truncation
    hts = Isogeny(F, Fts, composite, tuple(kernel))
    return IteratedQuotient(Ft, ht, Fts, hts, checks)
