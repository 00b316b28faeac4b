"""Total squares (D-rings): axiom checks, the structure on the Lazard ring
and on R[b_0, b_1, ...], Adem relations derived from the symmetry axiom,
the d/q basis change, and Thom reduction."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from . import gf2
from .fgl import FormalGroupLaw, additive_fgl, lazard_ring, lubin_quotient
from .qring import is_admissible_pair
from .series import (
    ONE,
    ZERO,
    CoefficientRing,
    TruncatedSeries,
    invariant_rewrite,
    ring_map,
    series_mul,
    series_substitute,
)

T_VARS = (("t", 1),)


@dataclass(frozen=True)
class TotalSquare:
    """``D_t : R -> R[[t]]`` given on generators.

    ``truncation`` bounds the ring degree of coefficients: ``D_t(g)`` is
    known for ``t^n`` with ``2 deg(g) + n <= truncation``.
    """

    ring: CoefficientRing
    law: FormalGroupLaw
    action: Mapping[str, TruncatedSeries]
    truncation: int

    def series_truncation(self, degree: int) -> int:
        return self.truncation - 2 * degree

    def image(self, name: str) -> TruncatedSeries:
        return self.action[name]

    def apply(self, elem: frozenset, variable: str = "t") -> TruncatedSeries:
        """Ring-homomorphism extension of the action to an element."""
        ring = self.ring
        degs = [ring.degree_of_monomial(m) for m in elem]
        N = self.truncation - 2 * (max(degs) if degs else 0)
        v = ((variable, 1),)
        acc = TruncatedSeries.zero(ring, v, N)
        cache: dict[tuple[int, int], TruncatedSeries] = {}

        def pw(i: int, e: int) -> TruncatedSeries:
            key = (i, e)
            if key not in cache:
                base = self.action[ring.generators[i][0]]
                if variable != "t":
                    base = base.embed(v, {"t": variable})
                cache[key] = base if e == 1 else series_mul(pw(i, e - 1), base, N)
            return cache[key]

        for m in elem:
            r = TruncatedSeries.constant(ring, v, N)
            for i, e in enumerate(ring.exponents(m)):
                if e:
                    r = series_mul(r, pw(i, e), N)
            acc = acc + r
        return acc

    def operation(self, n: int, elem: frozenset) -> frozenset:
        """``d_n(elem)``, the t^n coefficient of the total square."""
        return self.apply(elem).coefficient((n,))

    def to_json(self) -> dict:
        return {
            "ring": self.ring.to_json(),
            "truncation": self.truncation,
            "law": self.law.series.to_json(),
            "action": {n: s.to_json() for n, s in self.action.items()},
        }


@dataclass
class AxiomResult:
    passed: bool = True
    checked: int = 0
    counterexample: str | None = None

    def fail(self, msg: str) -> None:
        if self.passed:
            self.passed = False
            self.counterexample = msg


@dataclass
class DRingReport:
    axioms: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.axioms.values())

    def format(self) -> str:
        lines = []
        for name, a in self.axioms.items():
            status = "PASS" if a.passed else "FAIL"
            line = f"{name}: {status} ({a.checked} coefficients checked)"
            if a.counterexample:
                line += f" first counterexample: {a.counterexample}"
            lines.append(line)
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "axioms": {
                n: {"status": "pass" if a.passed else "fail", "checked": a.checked, "counterexample": a.counterexample}
                for n, a in self.axioms.items()
            },
        }


def _count(variables, N: int) -> int:
    """Number of monomials of weighted degree <= N."""
    counts = [1] + [0] * N if N >= 0 else []
    for _, w in variables:
        for d in range(w, N + 1):
            counts[d] += counts[d - w]
    return sum(counts)


def _compare(res: AxiomResult, got: TruncatedSeries, want: TruncatedSeries, label: str, N: int | None = None) -> None:
    N = min(got.truncation, want.truncation) if N is None else N
    res.checked += _count(got.variables, N)
    d = got.first_difference(want, N)
    if d is not None:
        e, c = d
        res.fail(f"{label} at {got.format_monomial(e)}: {got.ring.format(c)}")


def dring_validate(ts: TotalSquare, swap_inputs: bool = False) -> DRingReport:
    """Check D_0(a) = a^2, D_t(F) = F_t, and the symmetry of D_t D_s with
    D_t(s) = s F(s, t); relations must map to zero."""
    ring, law, T = ts.ring, ts.law, ts.truncation
    report = DRingReport()

    # (i) D_0(g) = g^2 and well-definedness on relations
    sq = AxiomResult()
    for name, _ in ring.generators:
        s = ts.action[name]
        if s.truncation < 0:
            continue
        sq.checked += 1
        g = ring.gen(name)
        if s.constant_term() != ring.square(g):
            sq.fail(f"D_0({name}) = {ring.format(s.constant_term())}, expected {ring.format(ring.square(g))}")
    report.axioms["squaring"] = sq

    rel = AxiomResult()
    for r in ring.relations:
        img = ts.apply(r)
        rel.checked += max(0, img.truncation + 1)
        if not img.is_zero():
            e, c = img.sorted_terms()[0]
            rel.fail(f"D_t({ring.format(r)}) has t^{e[0]} coefficient {ring.format(c)}")
    report.axioms["relations"] = rel

    # (ii) D_t(F) = F_t
    lub = AxiomResult()
    w = law.weight
    Ft, _ = lubin_quotient(law)
    Fv = ((law.x, 2 * w), (law.y, 2 * w), ("t", 1))
    M = min(T + 2 * w, Ft.truncation)
    # the coefficient at x^i y^j is the generator a_i_j when there is one, so
    # its own image is used (normal forms would hide a_1_2 behind a_2_1)
    if law.params:
        raise ValueError("the law of a total square has no parameters")
    coeffs = {(e[0], e[1]): ts.apply(c) for e, c in law.series.terms.items()}
    for name, _ in ring.generators:
        parts = name.split("_")
        if len(parts) == 3 and parts[0] == "a" and name in ts.action:
            coeffs[(int(parts[1]), int(parts[2]))] = ts.action[name]
    terms: dict = {}
    for (i, j), img in coeffs.items():
        for (n,), d in img.terms.items():
            key = (i, j, n)
            terms[key] = terms.get(key, ZERO) ^ d
    DF = TruncatedSeries(ring, Fv, M, terms)
    _compare(lub, DF, Ft.series.embed(Fv), "D_t(F) vs F_t", M)
    report.axioms["lubin"] = lub

    # (iii) D_t D_s symmetric
    sym = AxiomResult()
    names = ("s", "t") if swap_inputs else ("t", "s")
    for name, deg in ring.generators:
        N = T - 4 * deg
        if N < 0:
            continue
        lhs = _double(ts, name, N, *names)
        if swap_inputs:
            lhs = lhs.swap("t", "s")
        _compare(sym, lhs, lhs.swap("t", "s"), f"D_t D_s({name})")
    report.axioms["symmetry"] = sym
    return report


def _double(ts: TotalSquare, elem: frozenset | str, N: int, t: str = "t", s: str = "s") -> TruncatedSeries:
    """``D_t(D_s(elem))`` over variables (t, s), extending D_t by s -> s F(s, t).
    A generator name uses that generator's own image for the inner step."""
    ring = ts.ring
    v = (("t", 1), ("s", 1))
    if isinstance(elem, str):
        inner = ts.action[elem].embed(((s, 1),), {"t": s}) if s != "t" else ts.action[elem]
    else:
        inner = ts.apply(elem, variable=s)
    law = ts.law.extended(max(N, ts.law.truncation)) if ring.exact_above(ts.law.truncation - ts.law.weight) else ts.law
    L = min(N, law.truncation + 1)
    lv = law.series.embed((("x", 1), ("y", 1)) + v, {law.x: "x", law.y: "y"})
    S = TruncatedSeries.variable(ring, v, L, s)
    Tt = TruncatedSeries.variable(ring, v, L, t)
    h = series_mul(S, FormalGroupLaw(lv).evaluate(S, Tt), L)
    acc = TruncatedSeries.zero(ring, v, L)
    hp = TruncatedSeries.constant(ring, v, L)
    powers = [hp]
    top = max((e[0] for e in inner.terms), default=0)
    for _ in range(top):
        powers.append(series_mul(powers[-1], h, L))
    for (n,), c in inner.terms.items():
        img = ts.apply(c, variable=t).embed(v)
        acc = acc + series_mul(img.with_truncation(L) if img.truncation >= L else img, powers[n], L)
    return acc.truncate(L)


# ---------------------------------------------------------------------------
# constructions


def action_from_quotient(law: FormalGroupLaw, T: int) -> dict[str, TruncatedSeries]:
    """D_t on the generators ``a_i_j`` of a Lazard ring: the (i, j)
    coefficient of the Lubin quotient ``F_t``."""
    ring = law.ring
    if law.truncation < T + 1:
        law = law.extended(T + 1)
    Ft, _ = lubin_quotient(law)
    action = {}
    for name, deg in ring.generators:
        if not name.startswith("a_"):
            raise ValueError(f"generator {name} is not a law coefficient")
        _, i, j = name.split("_")
        c = Ft.series.coefficient_series({Ft.x: int(i), Ft.y: int(j)})
        action[name] = c.truncate(T - 2 * deg)
    return action


def nstar_total_square(Dmax: int, truncation: int | None = None) -> TotalSquare:
    """Total square on the Lazard approximation, ``D_t(a_ij)`` read off
    ``F_t``. The ring is exact (all degrees above ``Dmax`` vanish), so the
    truncation may exceed ``Dmax``; it defaults to ``Dmax + 2``."""
    ring, F = lazard_ring(Dmax)
    T = Dmax + 2 if truncation is None else truncation
    action = action_from_quotient(F, T)
    return TotalSquare(ring, F.extended(max(F.truncation, T + 1)), action, T)


def trivial_total_square(law: FormalGroupLaw, T: int) -> TotalSquare:
    if law.ring.generators:
        raise ValueError("trivial total square needs a ring without generators")
    return TotalSquare(law.ring, law, {}, T)


def bo_dring(F: FormalGroupLaw, K: int, truncation: int | None = None) -> TotalSquare:
    """D-structure on ``R[b_0..b_N]`` from ``D_t(b)(x F(x,t)) = b(x) b(F(x,t))``.

    ``N`` (default ``2K``) is the series truncation; all b's up to ``b_N``
    are adjoined because ``D_t(b_k)`` involves ``b_j`` with ``j <= 2k + n``.
    """
    N = 2 * K if truncation is None else truncation
    if N < 2 * K:
        raise ValueError("truncation must be at least 2K")
    base = F.ring
    if base.generators:
        base_action = action_from_quotient(F, N)
    else:
        base_action = {}
    law = F.extended(N)
    ring = base.adjoin([(f"b_{i}", i) for i in range(N + 1)])
    lawR = law.map_ring(ring)
    v = (("x", 1), ("t", 1))
    bx = TruncatedSeries(ring, v, N, {(i, 0): ring.gen(f"b_{i}") for i in range(N + 1)})
    X = TruncatedSeries.variable(ring, v, N, "x")
    Tt = TruncatedSeries.variable(ring, v, N, "t")
    G = series_mul(bx, series_substitute(bx, {"x": lawR.evaluate(X, Tt)}, v, N))
    H = invariant_rewrite(G, lawR)
    action = {n: s.change_ring(ring) for n, s in base_action.items()}
    for k in range(N + 1):
        action[f"b_{k}"] = H.coefficient_series({"u": k})
    return TotalSquare(ring, lawR, action, N)


def thom_reduction(ts: TotalSquare, validate: bool = True) -> TotalSquare:
    """Kill the presented (positive-degree coefficient) generators; the law
    becomes additive."""
    ring = ts.ring
    keep = [(n, d) for n, d in ring.generators[ring.n_presented :]]
    target = CoefficientRing(keep)
    images = {n: ZERO for n, _ in ring.generators[: ring.n_presented]}
    images.update({n: target.gen(n) for n, _ in keep})
    fn = lambda c: ring_map(c, ring, target, images)
    law = ts.law.map_ring(target, fn)
    action = {n: ts.action[n].map_coefficients(fn, target) for n, _ in keep}
    out = TotalSquare(target, law, action, ts.truncation)
    if validate:
        rep = dring_validate(out)
        if not rep.passed:
            raise ValueError(f"reduced total square fails validation:\n{rep.format()}")
    return out


# ---------------------------------------------------------------------------
# generalized Adem relations from the symmetry axiom


def _pivot_order(c: tuple[int, int]):
    m, n = c
    return (-(m - 2 * n), m, n)


@dataclass
class DerivedAdem:
    ring: CoefficientRing
    relations: dict  # (a, b) -> {composite: coefficient}
    rules: dict  # inadmissible composite -> {composite: coefficient}
    unsolved: list
    admissible_relations: list
    bound: int

    def rule_support(self, lhs) -> set:
        return {c for c, v in self.rules[lhs].items() if v}

    def to_json(self) -> list:
        out = []
        for lhs in sorted(self.rules, key=lambda c: (c[0] + c[1], c)):
            rhs = []
            for ops, coeff in sorted(self.rules[lhs].items(), key=lambda kv: (-(kv[0][0] + 2 * kv[0][1]), kv[0])):
                rhs.append({"coeff": self.ring.monomial_strings(coeff), "ops": list(ops)})
            out.append({"lhs": list(lhs), "rhs": rhs})
        return out

    def format_rule(self, lhs) -> str:
        terms = []
        for ops, coeff in sorted(self.rules[lhs].items(), key=lambda kv: (-(kv[0][0] + 2 * kv[0][1]), kv[0])):
            op = f"q_{ops[0]} q_{ops[1]}"
            terms.append(op if coeff == ONE else f"({self.ring.format(coeff)}) {op}")
        return f"q_{lhs[0]} q_{lhs[1]} = " + (" + ".join(terms) if terms else "0")


def _add_into(acc: dict, comp, c: frozenset) -> None:
    r = acc.get(comp, ZERO) ^ c
    if r:
        acc[comp] = r
    else:
        acc.pop(comp, None)


def generalized_adem_relations(F: FormalGroupLaw, Amax: int) -> dict:
    """Coefficients of t^a s^b (a > b, a + b <= Amax) in
    sum (q_m q_n) t^m h_t(s)^n  minus its (s <-> t) swap, with the
    composites ``(m, n)`` kept as uninterpreted symbols."""
    ring = F.ring
    law = F.extended(Amax) if ring.exact_above(F.truncation - F.weight) else F
    if law.truncation + 1 < Amax:
        raise ValueError("law truncation too small for the requested bound")
    v = (("t", 1), ("s", 1))
    lv = law.series.embed((("x", 1), ("y", 1)) + v, {law.x: "x", law.y: "y"})
    S = TruncatedSeries.variable(ring, v, Amax, "s")
    Tt = TruncatedSeries.variable(ring, v, Amax, "t")
    h = series_mul(S, FormalGroupLaw(lv).evaluate(S, Tt), Amax)
    P: dict = {}
    hp = TruncatedSeries.constant(ring, v, Amax)
    n = 0
    while 2 * n <= Amax:
        for m in range(0, Amax - 2 * n + 1):
            for (a, b), c in hp.terms.items():
                if a + m + b <= Amax:
                    P.setdefault((a + m, b), {})
                    _add_into(P[(a + m, b)], (m, n), c)
        hp = series_mul(hp, h, Amax)
        n += 1
    rels = {}
    for a in range(Amax + 1):
        for b in range(min(a, Amax - a + 1)):
            if a == b:
                continue
            rel = dict(P.get((a, b), {}))
            for comp, c in P.get((b, a), {}).items():
                _add_into(rel, comp, c)
            if rel:
                rels[(a, b)] = rel
    return rels


def derive_generalized_adem(F: FormalGroupLaw, Amax: int) -> DerivedAdem:
    """Solve the symmetry relations for the inadmissible composites.

    Composites of weight m + 2n are processed in increasing weight; at each
    weight the constant-coefficient (top) parts are row-reduced over GF(2)
    with inadmissible composites of largest excess m - 2n as preferred
    pivots, lower-weight tails being carried along and rewritten with the
    rules already found.
    """
    ring = F.ring
    rels = generalized_adem_relations(F, Amax)
    rules: dict = {}
    unsolved = []
    adm_rel = []
    by_weight: dict[int, list] = {}
    for (a, b), rel in rels.items():
        by_weight.setdefault(a + b, []).append(rel)

    def substitute(tail: dict) -> dict:
        out: dict = {}
        for comp, c in tail.items():
            if comp in rules:
                for comp2, c2 in rules[comp].items():
                    _add_into(out, comp2, ring.mul(c, c2))
            else:
                _add_into(out, comp, c)
        return out

    for w in range(Amax + 1):
        comps = sorted({(m, (w - m) // 2) for m in range(w + 1) if (w - m) % 2 == 0}, key=_pivot_order)
        col = {c: i for i, c in enumerate(comps)}
        rows = []
        for rel in by_weight.get(w, []):
            mask = 0
            tail = {}
            for comp, c in rel.items():
                if comp[0] + 2 * comp[1] == w:
                    if c != ONE:
                        raise ValueError("top coefficient is not a GF(2) constant")
                    mask |= 1 << col[comp]
                else:
                    tail[comp] = c
            rows.append((mask, frozenset(substitute(tail).items())))

        def combine(p, q):
            d = dict(p)
            for comp, c in q:
                _add_into(d, comp, c)
            return frozenset(d.items())

        table, leftovers = gf2.eliminate(rows, combine)
        for left in leftovers:
            if left:
                adm_rel.append(dict(left))
        for p, (mask, tail) in table.items():
            lhs = comps[p]
            rhs = dict(tail)
            for i in gf2.iter_bits(mask):
                if i != p:
                    _add_into(rhs, comps[i], ONE)
            if not is_admissible_pair(*lhs):
                rules[lhs] = rhs
            else:
                adm_rel.append({lhs: ONE, **rhs})
        for c in comps:
            if not is_admissible_pair(*c) and c not in rules:
                unsolved.append(c)
    # make right-hand sides admissible where later rules allow
    for lhs in list(rules):
        rules[lhs] = substitute(rules[lhs]) if any(c in rules for c in rules[lhs]) else rules[lhs]
    return DerivedAdem(ring, rels, rules, unsolved, adm_rel, Amax)


def derive_bound(max_sum: int) -> int:
    """Weight bound covering every inadmissible (m, n) with m + n <= max_sum."""
    pairs = [(m, n) for m in range(max_sum + 1) for n in range(max_sum + 1 - m)]
    return max((m + 2 * n for m, n in pairs if not is_admissible_pair(m, n)), default=0)


# ---------------------------------------------------------------------------
# d/q basis change


@dataclass(frozen=True)
class BasisChange:
    """Symbols [RP^i] with [RP^0] = 1 and [RP^1] = 0; the rest are free."""

    max_index: int

    @property
    def ring(self) -> CoefficientRing:
        return _rp_ring(self.max_index)

    def rp(self, i: int) -> frozenset:
        if i == 0:
            return ONE
        if i == 1:
            return ZERO
        return self.ring.gen(f"RP{i}")


_RP_CACHE: dict[int, CoefficientRing] = {}


def _rp_ring(M: int) -> CoefficientRing:
    if M not in _RP_CACHE:
        _RP_CACHE[M] = CoefficientRing([(f"RP{i}", i) for i in range(2, M + 1)])
    return _RP_CACHE[M]


def basis_change(rp: BasisChange, direction: str = "d-to-q", M: int | None = None) -> list[list[frozenset]]:
    """Lower-unitriangular matrix A with q_n = sum_k A[n][k] d_k (d-to-q) or
    d_n = sum_k A[n][k] q_k (q-to-d)."""
    M = rp.max_index if M is None else M
    if M > rp.max_index:
        raise ValueError("not enough [RP^i] symbols")
    ring = rp.ring
    series = [rp.rp(i) for i in range(M + 1)]
    if direction == "q-to-d":
        inv = [ONE]
        for n in range(1, M + 1):
            acc = ZERO
            for i in range(1, n + 1):
                acc ^= ring.mul(series[i], inv[n - i])
            inv.append(acc)
        series = inv
    elif direction != "d-to-q":
        raise ValueError("direction must be 'd-to-q' or 'q-to-d'")
    return [[series[n - k] if k <= n else ZERO for k in range(M + 1)] for n in range(M + 1)]


def matmul(ring: CoefficientRing, A, B):
    n = len(A)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = ZERO
            for k in range(n):
                acc ^= ring.mul(A[i][k], B[k][j])
            row.append(acc)
        out.append(row)
    return out


def reduce_matrix(rp: BasisChange, A):
    """Thom reduction on a basis-change matrix: [RP^i] -> 0 for i > 0."""
    ring = rp.ring
    target = CoefficientRing()
    images = {n: ZERO for n, _ in ring.generators}
    return [[ring_map(c, ring, target, images) for c in row] for row in A]
