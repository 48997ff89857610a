import random

import pytest

from chromalg.chart import BigradedChart
from chromalg.linalg import GF2RowSpace
from chromalg.steenrod import (
    ProductsNotZero, ResourceCeiling, SteenrodCobar, adem_reduce,
    admissible_basis, cobar_cohomology, is_admissible, milnor_diagonal,
    milnor_reduced_diagonal, minimal_resolution, periodicity_operator,
    vanishing_line_check, xi_degree, xi_monomials,
)


def test_adem_squares():
    assert adem_reduce((1, 1)) == frozenset()
    assert adem_reduce((2, 2)) == frozenset({(3, 1)})
    assert adem_reduce((1, 2)) == frozenset({(3,)})


def test_adem_admissible_fixed():
    assert adem_reduce((4, 2)) == frozenset({(4, 2)})
    assert adem_reduce((7, 3, 1)) == frozenset({(7, 3, 1)})


def test_adem_idempotent_and_degree_preserving():
    rng = random.Random(2)
    for _ in range(30):
        word = tuple(rng.randrange(1, 8) for _ in range(rng.randrange(1, 4)))
        out = adem_reduce(word)
        deg = sum(word)
        for mono in out:
            assert is_admissible(mono)
            assert sum(mono) == deg
        assert adem_reduce(list(out)) == out


def test_admissible_basis_counts():
    # dimensions of the mod-2 Steenrod algebra in low degrees
    expected = [1, 1, 1, 2, 2, 2, 3, 4, 4, 5, 6, 6]
    got = [len(admissible_basis(t)) for t in range(12)]
    assert got == expected


def test_dual_basis_counts_match_admissible():
    # the dual has the same Poincare series
    for t in range(0, 17):
        assert len(xi_monomials(t)) == len(admissible_basis(t))


def test_xi_degree():
    assert xi_degree((3,)) == 3
    assert xi_degree((0, 1)) == 3
    assert xi_degree((1, 0, 1)) == 8


def test_milnor_diagonal_xi1():
    assert milnor_diagonal((1,)) == frozenset({(((1,)), ()), ((), (1,))})


def test_milnor_diagonal_xi2():
    got = milnor_diagonal((0, 1))
    want = frozenset({((0, 1), ()), ((2,), (1,)), ((), (0, 1))})
    assert got == want


def test_milnor_diagonal_counital():
    for mon in [(1,), (0, 1), (2, 1), (0, 0, 1)]:
        left = frozenset(b for a, b in milnor_diagonal(mon) if a == ())
        right = frozenset(a for a, b in milnor_diagonal(mon) if b == ())
        assert left == {mon} and right == {mon}


def test_milnor_diagonal_coassociative_xi3():
    def expand_left(mon):
        out = set()
        for a, b in milnor_diagonal(mon):
            for a1, a2 in milnor_diagonal(a):
                out ^= {(a1, a2, b)}
        return out

    def expand_right(mon):
        out = set()
        for a, b in milnor_diagonal(mon):
            for b1, b2 in milnor_diagonal(b):
                out ^= {(a, b1, b2)}
        return out

    for mon in [(0, 0, 1), (1, 1), (4,), (2, 1)]:
        assert expand_left(mon) == expand_right(mon)


def test_milnor_diagonal_multiplicative():
    # Delta(m1 m2) = Delta(m1) Delta(m2), sampled
    from chromalg.steenrod import _mon_mul, _pairs_multiply
    samples = [((1,), (0, 1)), ((2,), (2, 1)), ((0, 1), (0, 1))]
    for m1, m2 in samples:
        prod = milnor_diagonal(_mon_mul(m1, m2))
        sep = _pairs_multiply(milnor_diagonal(m1), milnor_diagonal(m2))
        assert prod == sep


def test_cobar_d_squared_zero():
    cobar = SteenrodCobar()
    for (s, t) in [(1, 5), (2, 7), (3, 9), (2, 10)]:
        for elem in cobar.basis(s, t):
            once = cobar.diff_of_basis_element(elem)
            mask = cobar.to_mask(once, s + 1, t)
            assert cobar.diff_mask(mask, s + 1, t) == 0


def test_cobar_one_line():
    chart, _ = cobar_cohomology(2, 20, with_products=False)
    for t in range(1, 21):
        want = 1 if t in (1, 2, 4, 8, 16) else 0
        assert chart.dim(1, t) == want, t
    assert chart.names(1, 4) == ["h2"]


def test_cobar_diagonal_h0_tower():
    chart, cobar = cobar_cohomology(4, 10, with_products=False)
    for s in range(5):
        assert chart.dim(s, s) == 1
    # the single basis element of C^{s,s} is the h0-power cocycle
    h0 = cobar.h_class(0)
    acc = h0[0]
    for _ in range(3):
        acc = cobar.product_cochain(acc, h0[0])
    assert cobar.is_cocycle(acc, 4, 4)
    assert cobar.class_reduce(cobar.to_mask(acc, 4, 4), 4, 4) != 0


def test_cobar_two_line_relations():
    chart, cobar = cobar_cohomology(3, 16)
    # h_i h_{i+1} = 0 within the window
    for i in (0, 1, 2):
        t = 2**i + 2**(i + 1)
        hi, hj = cobar.h_class(i), cobar.h_class(i + 1)
        prod = cobar.product_cochain(hi[0], hj[0])
        assert cobar.class_reduce(cobar.to_mask(prod, 2, t), 2, t) == 0
    # commutativity and nonvanishing of the other products
    for i, j in [(0, 0), (0, 2), (1, 1), (0, 3), (1, 3), (2, 2), (3, 3)]:
        t = 2**i + 2**j
        hi, hj = cobar.h_class(i), cobar.h_class(j)
        ab = cobar.product_cochain(hi[0], hj[0])
        ba = cobar.product_cochain(hj[0], hi[0])
        ra = cobar.class_reduce(cobar.to_mask(ab, 2, t), 2, t)
        rb = cobar.class_reduce(cobar.to_mask(ba, 2, t), 2, t)
        assert ra == rb
        assert ra != 0
    # the h_i h_j classes span the 2-line across the window
    for t in range(2, 17):
        reps = []
        span = GF2RowSpace()
        for i in range(5):
            for j in range(i, 5):
                if 2**i + 2**j != t or j == i + 1:
                    continue
                prod = cobar.product_cochain(
                    cobar.h_class(i)[0], cobar.h_class(j)[0])
                red = cobar.class_reduce(cobar.to_mask(prod, 2, t), 2, t)
                if red:
                    span.insert(red)
        assert span.rank == chart.dim(2, t), t


def test_cobar_three_line_relations():
    cobar = SteenrodCobar()
    # h_i h_{i+2}^2 = 0 for i = 0; h_i^2 h_{i+2} = h_{i+1}^3 for i = 0, 1
    h0, h1, h2, h3 = (cobar.h_class(i) for i in range(4))
    prod = cobar.product_cochain(
        h0[0], cobar.product_cochain(h2[0], h2[0]))
    assert cobar.class_reduce(cobar.to_mask(prod, 3, 9), 3, 9) == 0
    lhs = cobar.product_cochain(
        cobar.product_cochain(h0[0], h0[0]), h2[0])
    rhs = cobar.product_cochain(
        cobar.product_cochain(h1[0], h1[0]), h1[0])
    assert (cobar.class_reduce(cobar.to_mask(lhs, 3, 6), 3, 6)
            == cobar.class_reduce(cobar.to_mask(rhs, 3, 6), 3, 6) != 0)
    lhs = cobar.product_cochain(
        cobar.product_cochain(h1[0], h1[0]), h3[0])
    rhs = cobar.product_cochain(
        cobar.product_cochain(h2[0], h2[0]), h2[0])
    assert (cobar.class_reduce(cobar.to_mask(lhs, 3, 12), 3, 12)
            == cobar.class_reduce(cobar.to_mask(rhs, 3, 12), 3, 12) != 0)


def test_minimal_resolution_one_line():
    chart, _ = minimal_resolution(1, 14)
    gens = [t for t in range(15) if chart.dim(1, t)]
    assert gens == [1, 2, 4, 8]


def test_minimal_resolution_zeroth_module():
    chart, res = minimal_resolution(2, 6)
    assert res.gens[0] == [0]
    assert chart.dim(0, 0) == 1
    assert all(chart.dim(0, t) == 0 for t in range(1, 7))


def test_minimal_resolution_is_a_complex():
    _, res = minimal_resolution(4, 12)
    for s in range(2, 5):
        for gi in range(len(res.gens[s])):
            acc = set()
            for gj, mon in res.d[s][gi]:
                for gk, mon2 in res.apply_d(s - 1, gj, mon):
                    acc ^= {(gk, mon2)}
            assert not acc


def test_dual_method_dimensions_agree():
    s_max, t_max = 4, 16
    mchart, _ = minimal_resolution(s_max, t_max)
    cchart, _ = cobar_cohomology(s_max, t_max, with_products=False)
    for s in range(s_max + 1):
        for t in range(t_max + 1):
            assert mchart.dim(s, t) == cchart.dim(s, t), (s, t)


def test_massey_h1_h0_h1():
    cobar = SteenrodCobar()
    h0, h1, h2 = cobar.h_class(0), cobar.h_class(1), cobar.h_class(2)
    w, (s, t), indet = cobar.massey_product(h1, h0, h1)
    assert (s, t) == (2, 5)
    h0h2 = cobar.product_cochain(h0[0], h2[0])
    ma = cobar.class_reduce(cobar.to_mask(w, s, t), s, t)
    mb = cobar.class_reduce(cobar.to_mask(h0h2, s, t), s, t)
    assert cobar.classes_equal_mod_indet(ma, mb, indet, s, t)
    assert ma != 0


def test_massey_zero_middle_contains_zero():
    cobar = SteenrodCobar()
    h0 = cobar.h_class(0)
    zero = (frozenset(), 1, 1)
    w, (s, t), indet = cobar.massey_product(h0, zero, h0)
    red = cobar.class_reduce(cobar.to_mask(w, s, t), s, t)
    space = GF2RowSpace()
    for r in indet:
        space.insert(r)
    assert space.contains(red)


def test_massey_rejects_nonzero_products():
    cobar = SteenrodCobar()
    h0 = cobar.h_class(0)
    with pytest.raises(ProductsNotZero):
        cobar.massey_product(h0, h0, h0)


def test_massey_c0_nonzero():
    cobar = SteenrodCobar()
    h0, h1, h2 = cobar.h_class(0), cobar.h_class(1), cobar.h_class(2)
    h2sq = (cobar.product_cochain(h2[0], h2[0]), 2, 8)
    w, (s, t), indet = cobar.massey_product(h1, h0, h2sq)
    assert (s, t) == (3, 11)
    red = cobar.class_reduce(cobar.to_mask(w, s, t), s, t)
    space = GF2RowSpace()
    for r in indet:
        space.insert(r)
    assert not space.contains(red)
    assert cobar.dim_h(3, 11) == 1


def test_massey_well_defined_mod_indeterminacy():
    cobar = SteenrodCobar()
    h0, h1 = cobar.h_class(0), cobar.h_class(1)
    base, (s, t), indet = cobar.massey_product(h1, h0, h1)
    base_mask = cobar.class_reduce(cobar.to_mask(base, s, t), s, t)
    for seed in range(5):
        rng = random.Random(seed)
        w, _, indet2 = cobar.massey_product(h1, h0, h1, rng=rng)
        m = cobar.class_reduce(cobar.to_mask(w, s, t), s, t)
        assert cobar.classes_equal_mod_indet(base_mask, m, indet2, s, t)


def test_periodicity_operator_on_h1():
    cobar = SteenrodCobar()
    h1 = cobar.h_class(1)
    w, (s, t), indet = periodicity_operator(cobar, h1)
    assert (s, t) == (5, 14)
    red = cobar.class_reduce(cobar.to_mask(w, s, t), s, t)
    space = GF2RowSpace()
    for r in indet:
        space.insert(r)
    assert not space.contains(red)


def test_vanishing_line_no_violations_small():
    chart, _ = minimal_resolution(8, 20, stem_max=12)
    assert vanishing_line_check(chart) == []


def test_vanishing_line_detects_planted_defect():
    chart, _ = minimal_resolution(6, 10, stem_max=4)
    chart.set_cell(4, 5, 1)
    viol = vanishing_line_check(chart)
    assert any((s, t) == (4, 5) for s, t, _ in viol)


def test_vanishing_line_epsilon_boundaries():
    # s = 6 (eps 2): the boundary stem 2s - eps = 10 is allowed nonzero,
    # one inside (stem 9) must vanish
    chart = BigradedChart(2, "synthetic")
    chart.set_cell(6, 16, 1)    # stem 10: on the boundary, legal
    assert vanishing_line_check(chart) == []
    chart.set_cell(6, 15, 1)    # stem 9: inside the wedge
    viol = vanishing_line_check(chart)
    assert [(s, t) for s, t, _ in viol] == [(6, 15)]


def test_resource_ceiling():
    cobar = SteenrodCobar(max_basis=50)
    with pytest.raises(ResourceCeiling):
        cobar.basis(4, 16)


def test_chart_json_and_svg_deterministic():
    chart, _ = cobar_cohomology(2, 8)
    j1, j2 = chart.to_json(), chart.to_json()
    assert j1 == j2
    doc = chart.to_json_dict()
    assert set(doc) == {"prime", "method", "cells", "products"}
    assert all(set(c) == {"s", "t", "dim", "names"} for c in doc["cells"])
    svg1, svg2 = chart.to_svg(), chart.to_svg()
    assert svg1 == svg2 and svg1.startswith("<svg")
    chart2 = BigradedChart.from_json_dict(doc)
    assert chart2.to_json() == j1
