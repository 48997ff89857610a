import random
from fractions import Fraction

import pytest

from chromalg.rings import (
    IRREDUCIBLE_MODULI, ExtensionField, IntegersMod, NotInvertible,
    PLocalRationals, PolynomialRing, PrimeField, Rationals, WittRing,
    finite_field, frobenius_lift, p_valuation,
)


def brute_poly_is_irreducible(p, coeffs):
    """No roots suffices for degrees 2 and 3; degree 1 is always irreducible."""
    deg = len(coeffs) - 1
    if deg == 1:
        return True
    assert deg in (2, 3)
    for a in range(p):
        val = sum(c * a**i for i, c in enumerate(coeffs)) % p
        if val == 0:
            return False
    return True


def test_shipped_moduli_are_irreducible():
    for (p, n), coeffs in IRREDUCIBLE_MODULI.items():
        assert len(coeffs) == n + 1 and coeffs[-1] == 1
        assert brute_poly_is_irreducible(p, coeffs), (p, n)


@pytest.mark.parametrize("field", [
    finite_field(2), finite_field(2, 2), finite_field(3, 2), finite_field(5, 2),
])
def test_field_axioms_exhaustive(field):
    elems = list(field.elements())
    zero, one = field.zero(), field.one()
    for a in elems:
        assert field.eq(field.add(a, zero), a)
        assert field.eq(field.mul(a, one), a)
        assert field.is_zero(field.add(a, field.neg(a)))
        if not field.is_zero(a):
            assert field.eq(field.mul(a, field.inv(a)), one)
    for a in elems:
        for b in elems:
            assert field.eq(field.add(a, b), field.add(b, a))
            assert field.eq(field.mul(a, b), field.mul(b, a))
            for c in elems:
                assert field.eq(field.mul(a, field.add(b, c)),
                                field.add(field.mul(a, b), field.mul(a, c)))
                assert field.eq(field.mul(field.mul(a, b), c),
                                field.mul(a, field.mul(b, c)))


def test_extension_field_frobenius_is_additive():
    F = finite_field(3, 2)
    for a in F.elements():
        for b in F.elements():
            assert F.eq(F.frobenius(F.add(a, b)),
                        F.add(F.frobenius(a), F.frobenius(b)))


def test_field_axioms_sampled_larger():
    rng = random.Random(7)
    F = finite_field(5, 3)
    elems = [tuple(rng.randrange(5) for _ in range(3)) for _ in range(12)]
    for a in elems:
        for b in elems:
            assert F.eq(F.mul(a, b), F.mul(b, a))
            if not F.is_zero(a):
                assert F.eq(F.mul(a, F.inv(a)), F.one())
    for a, b, c in zip(elems, elems[1:], elems[2:]):
        assert F.eq(F.mul(F.mul(a, b), c), F.mul(a, F.mul(b, c)))
        assert F.eq(F.mul(a, F.add(b, c)),
                    F.add(F.mul(a, b), F.mul(a, c)))


def test_witt_reduction_recovers_field_arithmetic():
    rng = random.Random(11)
    W = WittRing(3, 2, 3)
    F = W.residue_field
    for _ in range(40):
        a = tuple(rng.randrange(27) for _ in range(2))
        b = tuple(rng.randrange(27) for _ in range(2))
        assert F.eq(W.reduce(W.mul(a, b)), F.mul(W.reduce(a), W.reduce(b)))
        assert F.eq(W.reduce(W.add(a, b)), F.add(W.reduce(a), W.reduce(b)))


def test_witt_inverse():
    rng = random.Random(13)
    W = WittRing(5, 2, 3)
    count = 0
    while count < 20:
        a = tuple(rng.randrange(125) for _ in range(2))
        if not W.is_unit(a):
            continue
        count += 1
        assert W.eq(W.mul(a, W.inv(a)), W.one())


def test_frobenius_lift_prime_field_is_identity():
    W = WittRing(5, 1, 3)
    for k in (0, 1, 7, 101):
        a = W.from_int(k)
        assert W.eq(frobenius_lift(W, a), a)


def test_frobenius_lift_w9_matches_root_search_oracle():
    # brute-force oracle: the unique root of the lifted modulus congruent
    # to x^3 mod 3 inside W(F_9)/9
    W = WittRing(3, 2, 2)
    f = W.modulus
    gen_cubed = W.pow(W.generator(), 3)
    roots = []
    for c0 in range(9):
        for c1 in range(9):
            y = (c0, c1)
            val = W._eval_poly([W.from_int(c) for c in f], y)
            if W.is_zero(val) and W.eq(tuple(x % 3 for x in y),
                                       tuple(x % 3 for x in gen_cubed)):
                roots.append(y)
    assert len(roots) == 1
    assert W.eq(W.frobenius(W.generator()), roots[0])


def test_frobenius_lift_is_ring_hom_and_fixes_base():
    rng = random.Random(17)
    W = WittRing(3, 2, 3)
    for k in (0, 1, 5, 26):
        a = W.from_int(k)
        assert W.eq(W.frobenius(a), a)
    for _ in range(25):
        a = tuple(rng.randrange(27) for _ in range(2))
        b = tuple(rng.randrange(27) for _ in range(2))
        assert W.eq(W.frobenius(W.mul(a, b)),
                    W.mul(W.frobenius(a), W.frobenius(b)))
        assert W.eq(W.frobenius(W.add(a, b)),
                    W.add(W.frobenius(a), W.frobenius(b)))


def test_frobenius_order_n():
    rng = random.Random(19)
    W = WittRing(3, 2, 3)  # W(F_9)/27
    for _ in range(20):
        a = tuple(rng.randrange(27) for _ in range(2))
        assert W.eq(W.frobenius(W.frobenius(a)), a)
    W3 = WittRing(2, 3, 3)
    for _ in range(10):
        a = tuple(rng.randrange(8) for _ in range(3))
        b = W3.frobenius(W3.frobenius(W3.frobenius(a)))
        assert W3.eq(b, a)


def test_frobenius_reduces_to_pth_power():
    rng = random.Random(23)
    W = WittRing(5, 2, 2)
    F = W.residue_field
    for _ in range(20):
        a = tuple(rng.randrange(25) for _ in range(2))
        assert F.eq(W.reduce(W.frobenius(a)), F.pow(W.reduce(a), 5))


def test_teichmuller_digits_reassemble():
    W = WittRing(3, 2, 3)
    rng = random.Random(29)
    for _ in range(10):
        a = tuple(rng.randrange(27) for _ in range(2))
        digits = W.teichmuller_digits(a)
        acc = W.zero()
        for k, c in enumerate(digits):
            t = W.teichmuller(W.lift(c))
            acc = W.add(acc, tuple(x * 3**k % 27 for x in t))
        assert W.eq(acc, a)


def test_p_local_rationals():
    R = PLocalRationals(5)
    assert R.is_unit(Fraction(3, 7))
    assert not R.is_unit(Fraction(5, 3))
    assert not R.is_unit(Fraction(0))
    assert R.valuation(Fraction(50, 3)) == 2
    assert R.valuation(Fraction(3, 25)) == -2
    assert p_valuation(5, Fraction(0)) is None
    assert R.is_integral(Fraction(3, 7))
    assert not R.is_integral(Fraction(1, 5))
    with pytest.raises(NotInvertible):
        R.inv(Fraction(5))


def test_integers_mod():
    R = IntegersMod(27)
    assert R.eq(R.mul(R.inv(5), 5), 1)
    assert not R.is_unit(6)


def test_polynomial_ring_basic():
    Q = Rationals()
    P = PolynomialRing(Q, ("v1", "v2"), degrees=(4, 16))
    v1, v2 = P.gen("v1"), P.gen("v2")
    a = P.add(P.mul(v1, v1), P.constant(Fraction(3)))
    b = P.mul(a, v2)
    assert P.eq(P.mul(v1, v2), P.mul(v2, v1))
    assert not P.is_unit(v1)
    assert P.is_unit(P.constant(Fraction(2, 3)))
    assert P.degree_of(P.mul(v1, v2)) == 20
    with pytest.raises(ValueError):
        P.degree_of(a)  # mixed degrees
    assert P.is_homogeneous(b) is False


def test_polynomial_ring_laurent_and_substitute():
    F5 = PrimeField(5)
    K = PolynomialRing(F5, ("u",), degrees=(2,), inverted="u")
    u = K.gen("u")
    uinv = K.inv(u)
    assert K.eq(K.mul(u, uinv), K.one())
    assert K.is_unit(K.gen("u", -3))
    Q = Rationals()
    P = PolynomialRing(Q, ("a", "b"))
    expr = P.add(P.mul(P.gen("a"), P.gen("b")), P.from_int(2))
    val = P.substitute(expr, {"a": F5.from_int(3), "b": F5.from_int(4)}, F5)
    assert F5.eq(val, F5.from_int(14))


def test_extension_field_format_and_parse_roundtrip_shape():
    F = ExtensionField(5, 2)
    w = F.generator()
    s = F.format(F.add(w, F.from_int(2)))
    assert "w" in s
