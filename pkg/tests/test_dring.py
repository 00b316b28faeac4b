import dataclasses

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dlring.dring import (
    BasisChange,
    TotalSquare,
    basis_change,
    bo_dring,
    derive_bound,
    derive_generalized_adem,
    dring_validate,
    generalized_adem_relations,
    matmul,
    nstar_total_square,
    reduce_matrix,
    thom_reduction,
    trivial_total_square,
)
from dlring.fgl import additive_fgl, lazard_ring
from dlring.qring import adem_expand, is_admissible_pair, priddy_table
from dlring.series import ONE, ZERO, CoefficientRing, TruncatedSeries, ring_map


def test_trivial_total_square_passes():
    report = dring_validate(trivial_total_square(additive_fgl(6), 6))
    assert report.passed


@pytest.mark.parametrize("D,T", [(4, None), (4, 8), (6, None), (8, 10)])
def test_nstar_passes(D, T):
    report = dring_validate(nstar_total_square(D, T))
    assert report.passed, report.format()
    assert report.axioms["lubin"].checked > 0


def test_nstar_symmetry_reaches_generators_at_higher_degree():
    # at Dmax 8 the degree-2 generator is inside the range 4 deg <= T
    report = dring_validate(nstar_total_square(8, 10))
    assert report.axioms["symmetry"].passed
    assert report.axioms["symmetry"].checked > 0


def test_nstar_squaring():
    ts = nstar_total_square(6)
    for name, _ in ts.ring.generators:
        assert ts.action[name].constant_term() == ts.ring.square(ts.ring.gen(name))


def test_nstar_additive_specialization():
    reduced = thom_reduction(nstar_total_square(4))
    assert reduced.ring.generators == ()
    assert reduced.action == {}
    assert dring_validate(reduced).passed


def test_corrupted_nstar_action_fails():
    ts = nstar_total_square(4)
    action = dict(ts.action)
    s = action["a_1_2"]
    flipped = s.constant_term() ^ ts.ring.gen("a_1_4")
    terms = dict(s.terms)
    terms[(0,)] = flipped
    action["a_1_2"] = TruncatedSeries(ts.ring, s.variables, s.truncation, terms)
    report = dring_validate(dataclasses.replace(ts, action=action))
    assert not report.passed
    assert not report.axioms["lubin"].passed or not report.axioms["symmetry"].passed
    assert report.axioms["lubin"].counterexample


def test_corrupted_bo_action_breaks_symmetry():
    ts = bo_dring(additive_fgl(4), 2)
    action = dict(ts.action)
    s = action["b_1"]
    terms = dict(s.terms)
    terms[(1,)] = terms.get((1,), ZERO) ^ ts.ring.gen("b_0")
    action["b_1"] = TruncatedSeries(ts.ring, s.variables, s.truncation, terms)
    report = dring_validate(dataclasses.replace(ts, action=action))
    assert not report.axioms["symmetry"].passed
    assert report.axioms["symmetry"].counterexample


@pytest.mark.parametrize("ts", [nstar_total_square(6), bo_dring(lazard_ring(3)[1], 2)], ids=["nstar", "bo"])
def test_symmetry_check_is_symmetric(ts):
    assert dring_validate(ts).to_json() == dring_validate(ts, swap_inputs=True).to_json()


def test_bo_additive_matches_priddy():
    N = 6
    ts = bo_dring(additive_fgl(N), 3)
    table = priddy_table(N)
    for k in range(4):
        for n in range(N - 2 * k + 1):
            assert ts.action[f"b_{k}"].coefficient((n,)) == table.q(n, k)
        assert ts.action[f"b_{k}"].constant_term() == ts.ring.square(ts.ring.gen(f"b_{k}"))


@pytest.mark.parametrize("K", [1, 2, 3])
def test_bo_universal_validates(K):
    _, F = lazard_ring(3)
    report = dring_validate(bo_dring(F, K))
    assert report.passed, report.format()
    assert report.axioms["symmetry"].checked > 0


@pytest.mark.parametrize("K", [1, 2, 3])
def test_thom_reduction_of_bo(K):
    _, F = lazard_ring(3)
    reduced = thom_reduction(bo_dring(F, K))
    additive = bo_dring(additive_fgl(2 * K), K)
    assert reduced.ring.generators == additive.ring.generators
    assert reduced.law.series == additive.law.series
    for name, _ in additive.ring.generators:
        assert reduced.action[name] == additive.action[name]


def test_bo_truncation_guard():
    with pytest.raises(ValueError):
        bo_dring(additive_fgl(6), 3, truncation=4)


# -- derived Adem relations ------------------------------------------------------------


@pytest.mark.parametrize("a", range(1, 9))
def test_additive_relation_at_s_zero(a):
    rels = generalized_adem_relations(additive_fgl(8), 8)
    want = {(a, 0): ONE}
    if a % 2 == 0:
        want[(0, a // 2)] = ONE
    assert rels[(a, 0)] == want


def test_additive_derivation_matches_closed_form():
    bound = derive_bound(10)
    derived = derive_generalized_adem(additive_fgl(bound), bound)
    assert derived.unsolved == []
    assert derived.admissible_relations == []
    pairs = [(m, n) for m in range(11) for n in range(11 - m) if not is_admissible_pair(m, n)]
    assert pairs
    for lhs in pairs:
        got = {c for c, v in derived.rules[lhs].items() if v}
        assert all(v == ONE for v in derived.rules[lhs].values())
        assert got == {m.indices for m in adem_expand(*lhs).terms}, lhs


def test_universal_derivation_specializes_to_additive():
    ring, F = lazard_ring(3)
    universal = derive_generalized_adem(F, 8)
    additive = derive_generalized_adem(additive_fgl(8), 8)
    target = CoefficientRing()
    kill = {n: ZERO for n, _ in ring.generators}
    assert set(universal.rules) == set(additive.rules)
    for lhs, rhs in universal.rules.items():
        special = {c: ring_map(v, ring, target, kill) for c, v in rhs.items()}
        special = {c: v for c, v in special.items() if v}
        assert special == additive.rules[lhs]


def test_universal_derivation_has_law_dependent_terms():
    ring, F = lazard_ring(3)
    universal = derive_generalized_adem(F, 8)
    assert any(v != ONE for rhs in universal.rules.values() for v in rhs.values())


def test_rule_table_json():
    derived = derive_generalized_adem(additive_fgl(6), 6)
    table = derived.to_json()
    row = next(r for r in table if r["lhs"] == [3, 1])
    assert row["rhs"] == [{"coeff": ["1"], "ops": [1, 2]}]


# -- basis change ----------------------------------------------------------------------


def test_basis_change_low_indices():
    bc = BasisChange(10)
    A = basis_change(bc, "d-to-q")
    assert A[0][0] == ONE and A[1][1] == ONE and A[1][0] == ZERO
    B = basis_change(bc, "q-to-d")
    assert B[2] [:3] == [bc.ring.gen("RP2"), ZERO, ONE]


def test_basis_change_round_trip_and_reduction():
    M = 10
    bc = BasisChange(M)
    A = basis_change(bc, "d-to-q")
    B = basis_change(bc, "q-to-d")
    ident = [[ONE if i == j else ZERO for j in range(M + 1)] for i in range(M + 1)]
    assert matmul(bc.ring, A, B) == ident
    assert matmul(bc.ring, B, A) == ident
    assert reduce_matrix(bc, A) == ident
    for i in range(M + 1):
        assert A[i][i] == ONE
        assert all(A[i][j] == ZERO for j in range(i + 1, M + 1))


def test_basis_change_bad_direction():
    with pytest.raises(ValueError):
        basis_change(BasisChange(3), "sideways")


# -- ring-homomorphism extension -------------------------------------------------------

NSTAR = nstar_total_square(6)


@st.composite
def elements(draw):
    ring = NSTAR.ring
    d = draw(st.integers(1, 3))
    acc = ZERO
    for m in draw(st.lists(st.sampled_from(ring.monomial_basis(d)), max_size=3)):
        acc = acc ^ frozenset({m})
    return ring.normal_form(acc)


@given(elements(), elements())
def test_total_square_additive(a, b):
    lhs = NSTAR.apply(a ^ b)
    rhs = NSTAR.apply(a) + NSTAR.apply(b)
    assert lhs.first_difference(rhs, min(lhs.truncation, rhs.truncation)) is None


@given(elements(), elements())
def test_total_square_multiplicative(a, b):
    ring = NSTAR.ring
    lhs = NSTAR.apply(ring.mul(a, b))
    pa, pb = NSTAR.apply(a), NSTAR.apply(b)
    N = min(lhs.truncation, pa.truncation, pb.truncation)
    prod = pa.truncate(N) * pb.truncate(N)
    assert lhs.first_difference(prod, N) is None
