import pytest

import oracles
from conftest import poly
from dlring.fgl import (
    AssociativityViolation,
    InvalidFormalGroupLaw,
    OrderTwoViolation,
    additive_fgl,
    check_law,
    fgl_validate,
    is_additive,
    iterated_quotient,
    lazard_dimensions,
    lazard_ring,
    lubin_quotient,
)
from dlring.series import GF2, ZERO, TruncatedSeries, series_mul, series_substitute

XY = (("x", 1), ("y", 1))


def test_additive_is_valid():
    F = fgl_validate(poly(XY, 6, [(1, 0), (0, 1)]))
    assert is_additive(F)


def test_xy_term_breaks_order_two():
    violations = check_law(poly(XY, 4, [(1, 0), (0, 1), (1, 1)]))
    kinds = {type(v) for v in violations}
    assert OrderTwoViolation in kinds
    v = next(v for v in violations if isinstance(v, OrderTwoViolation))
    assert v.monomial == "x^2"
    with pytest.raises(InvalidFormalGroupLaw):
        fgl_validate(poly(XY, 4, [(1, 0), (0, 1), (1, 1)]))


def test_x2y_fails_associativity_brute_force():
    # brute force: F(F(x,y),z) + F(x,F(y,z)) for F = x + y + x^2 y
    def F(u, v):
        return u ^ v ^ oracles.pmul(oracles.pmul(u, u), v)

    x, y, z = {(1, 0, 0)}, {(0, 1, 0)}, {(0, 0, 1)}
    keep = lambda e: sum(e) <= 5
    diff = {e for e in F(F(x, y), z) ^ F(x, F(y, z)) if keep(e)}
    assert diff
    violations = check_law(poly(XY, 5, [(1, 0), (0, 1), (2, 1)]))
    assert AssociativityViolation in {type(v) for v in violations}


def test_validate_needs_truncation_two():
    with pytest.raises(ValueError):
        fgl_validate(poly(XY, 1, [(1, 0), (0, 1)]))


def test_additive_fgl():
    F = additive_fgl(5)
    assert len(F.series.terms) == 2
    assert check_law(F.series) == []
    X = TruncatedSeries.variable(GF2, (("x", 1),), 5, "x")
    assert F.evaluate(X, X).is_zero()


# -- Lazard ring -----------------------------------------------------------------


def test_lazard_degree_one():
    ring, _ = lazard_ring(1)
    assert ring.gen("a_1_1") == ZERO
    assert ring.dimension(1) == 0


def test_lazard_degree_two():
    ring, _ = lazard_ring(2)
    assert ring.dimension(2) == 1
    assert ring.gen("a_1_2") == ring.gen("a_2_1")


@pytest.mark.parametrize("D", [2, 3, 4, 5, 6])
def test_lazard_dimensions_against_oracles(D):
    got = lazard_dimensions(D)
    brute = oracles.graded_dimensions(D)
    counts = oracles.polynomial_ring_counts(oracles.not_two_power_minus_one(D), D)
    assert [got[d] for d in range(D + 1)] == [brute[d] for d in range(D + 1)] == counts


def test_lazard_dimensions_six():
    assert [lazard_dimensions(6)[d] for d in range(7)] == [1, 0, 1, 0, 2, 1, 3]


def test_lazard_dimensions_monotone():
    small, big = lazard_dimensions(6), lazard_dimensions(9)
    assert all(small[d] == big[d] for d in small)


def test_universal_law_valid():
    for D in (2, 4, 6):
        _, F = lazard_ring(D)
        assert check_law(F.series) == []


# -- Lubin quotient ----------------------------------------------------------------


def test_lubin_additive():
    Ft, h = lubin_quotient(additive_fgl(12))
    assert h.map.format() == "x^2 + x*t"
    assert is_additive(Ft)
    t = TruncatedSeries.variable(GF2, (("t", 1),), 12, "t")
    assert series_substitute(h.map, {"x": t}, (("t", 1),)).is_zero()


def _morphism_defect(F, Ft, h):
    w = F.weight
    P = F.params + (("t", w),)
    vxy = (("x", w), ("y", w)) + P
    law = F.series.embed(vxy[:2] + P)
    X = TruncatedSeries.variable(F.ring, vxy, F.truncation, "x")
    Y = TruncatedSeries.variable(F.ring, vxy, F.truncation, "y")
    Fxy = series_substitute(law, {"x": X, "y": Y}, vxy)
    M = Ft.truncation
    lhs = series_substitute(h.map, {"x": Fxy}, vxy, M)
    hx = h.map.embed(vxy)
    hy = h.map.embed(vxy, {"x": "y"})
    rhs = series_substitute(Ft.series, {"x": hx, "y": hy}, vxy, M)
    return lhs.first_difference(rhs)


@pytest.mark.parametrize("D", [2, 4, 6])
def test_lubin_universal_morphism(D):
    _, F = lazard_ring(D)
    Ft, h = lubin_quotient(F)
    assert check_law(Ft.series) == []
    assert _morphism_defect(F, Ft, h) is None


def test_lubin_frobenius_base_case():
    ring, F = lazard_ring(4)
    Ft, _ = lubin_quotient(F)
    at_zero = Ft.series.set_zero("t")
    squared = {}
    for (i, j), c in F.series.terms.items():
        squared[(i, j)] = ring.square(c)
    expected = TruncatedSeries(ring, at_zero.variables, Ft.truncation, squared)
    assert at_zero == expected


# -- iterated quotient ---------------------------------------------------------------


def test_iterated_additive_closed_form():
    iq = iterated_quotient(additive_fgl(8))
    v = (("x", 1), ("t", 1), ("s", 1))
    # x (x + t)(x + s)(x + s + t) with variables (x, t, s) -> indices 0, 1, 2
    brute = oracles.expand_product([[0], [0, 1], [0, 2], [0, 1, 2]], 3)
    expected = poly(v, iq.hts.map.truncation, sorted(brute))
    assert iq.hts.map == expected
    st = TruncatedSeries.variable(GF2, (("t", 1), ("s", 1)), 8, "t") + TruncatedSeries.variable(GF2, (("t", 1), ("s", 1)), 8, "s")
    assert series_substitute(iq.hts.map, {"x": st}, (("t", 1), ("s", 1))).is_zero()


@pytest.mark.parametrize("D", [4, 6, 8, 10, 12])
def test_iterated_universal(D):
    _, F = lazard_ring(D)
    iq = iterated_quotient(F)
    assert iq.checks["kernel"] == ["0", "t", "s", "F(s,t)"]
    assert iq.Fts.series == iq.Fts.series.swap("t", "s")
    assert check_law(iq.Fts.series) == []


def test_iterated_symmetry_nontrivial_at_eight():
    # below Dmax 8 the doubly-quotiented law is x + y to the available order
    _, F = lazard_ring(8)
    iq = iterated_quotient(F)
    assert not is_additive(iq.Fts)


def test_isogeny_composition():
    _, F = lazard_ring(4)
    iq = iterated_quotient(F)
    w = F.weight
    vx = (("x", w), ("t", w), ("s", w))
    ht = iq.ht.map.embed(vx)
    M = iq.hts.map.truncation
    # h_ts(x) = h_t(x) F_t(h_t(x), h_t(s))
    hs = iq.ht.map.embed(vx, {"x": "s"}).embed(vx)
    Ft = iq.Ft.series.embed((("x", 2 * w), ("y", 2 * w), ("t", w), ("s", w)))
    inner = series_substitute(Ft, {"x": ht.embed(vx), "y": hs}, vx, M)
    assert series_mul(ht, inner, M) == iq.hts.map
