"""Exact coefficient rings: prime fields, unramified extensions, truncated
Witt rings, p-local rationals, and graded polynomial rings.

Every ring is an object exposing arithmetic on plain Python values
(ints, Fractions, tuples, dicts), so the same series and linear-algebra
engines run over any of them.  All values are immutable after
construction and every operation is pure.
"""

from __future__ import annotations

from fractions import Fraction


class NotInvertible(ArithmeticError):
    pass


class RingNotDivisible(ArithmeticError):
    """Raised when a termwise division (e.g. integration) hits a
    non-invertible integer in the coefficient ring."""


class UnsupportedRing(TypeError):
    pass


# Fixed table of monic irreducible moduli over F_p, coefficients listed
# low degree to high (leading coefficient 1 included).  Shipping a fixed
# table keeps every run deterministic.
IRREDUCIBLE_MODULI = {
    (2, 1): (0, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (3, 1): (0, 1),
    (3, 2): (1, 0, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 1): (0, 1),
    (5, 2): (2, 0, 1),
    (5, 3): (1, 1, 0, 1),
    (7, 1): (0, 1),
    (7, 2): (1, 0, 1),
    (7, 3): (2, 0, 0, 1),
}


class Ring:
    """Minimal exact-ring interface shared by all coefficient rings."""

    characteristic = 0
    name = "ring"

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def from_int(self, n):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def is_zero(self, a):
        raise NotImplementedError

    def eq(self, a, b):
        return self.is_zero(self.sub(a, b))

    def is_unit(self, a):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def pow(self, a, k):
        if k < 0:
            return self.pow(self.inv(a), -k)
        result = self.one()
        base = a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def sum(self, items):
        acc = self.zero()
        for x in items:
            acc = self.add(acc, x)
        return acc

    def format(self, a):
        return str(a)

    def __repr__(self):
        return self.name


class Rationals(Ring):
    name = "QQ"

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, n):
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a == 0

    def eq(self, a, b):
        return a == b

    def is_unit(self, a):
        return a != 0

    def inv(self, a):
        if a == 0:
            raise NotInvertible("division by zero")
        return 1 / Fraction(a)


class Integers(Ring):
    name = "ZZ"

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return int(n)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return a == 0

    def eq(self, a, b):
        return a == b

    def is_unit(self, a):
        return a in (1, -1)

    def inv(self, a):
        if a in (1, -1):
            return a
        raise NotInvertible(f"{a} is not a unit in ZZ")


def p_valuation(p, a):
    """p-adic valuation of a rational (None for 0)."""
    a = Fraction(a)
    if a == 0:
        return None
    v = 0
    num, den = a.numerator, a.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


class PLocalRationals(Rationals):
    """Z localized at p: rationals with p-integrality bookkeeping.

    Arithmetic is plain Fraction arithmetic; is_unit / valuation answer
    the p-local questions.  Elements with negative valuation can arise
    mid-computation; integrality is asserted where a contract needs it.
    """

    def __init__(self, p):
        self.p = p
        self.name = f"Z_({p})"

    def is_unit(self, a):
        return a != 0 and p_valuation(self.p, a) == 0

    def inv(self, a):
        if not self.is_unit(a):
            raise NotInvertible(f"{a} is not a unit in {self.name}")
        return 1 / Fraction(a)

    def valuation(self, a):
        return p_valuation(self.p, a)

    def is_integral(self, a):
        return Fraction(a).denominator % self.p != 0 if a != 0 else True


class IntegersMod(Ring):
    """Z/m with m typically a prime power p^K."""

    def __init__(self, m):
        self.m = m
        self.name = f"Z/{m}"
        self.characteristic = m

    def zero(self):
        return 0

    def one(self):
        return 1 % self.m

    def from_int(self, n):
        return n % self.m

    def add(self, a, b):
        return (a + b) % self.m

    def neg(self, a):
        return (-a) % self.m

    def sub(self, a, b):
        return (a - b) % self.m

    def mul(self, a, b):
        return (a * b) % self.m

    def is_zero(self, a):
        return a % self.m == 0

    def eq(self, a, b):
        return (a - b) % self.m == 0

    def is_unit(self, a):
        from math import gcd

        return gcd(a, self.m) == 1

    def inv(self, a):
        if not self.is_unit(a):
            raise NotInvertible(f"{a} is not a unit mod {self.m}")
        return pow(a, -1, self.m)


class PrimeField(IntegersMod):
    def __init__(self, p):
        super().__init__(p)
        self.p = p
        self.n = 1
        self.q = p
        self.name = f"F_{p}"

    def frobenius(self, a):
        return a % self.p

    def elements(self):
        return range(self.p)


class ExtensionField(Ring):
    """F_{p^n} as F_p[x]/(modulus); elements are coefficient tuples."""

    def __init__(self, p, n, modulus=None):
        if modulus is None:
            modulus = IRREDUCIBLE_MODULI[(p, n)]
        assert len(modulus) == n + 1 and modulus[-1] == 1
        self.p = p
        self.n = n
        self.q = p**n
        self.modulus = tuple(c % p for c in modulus[:-1]) + (1,)
        self.characteristic = p
        self.name = f"F_{p}^{n}"

    def zero(self):
        return (0,) * self.n

    def one(self):
        return (1,) + (0,) * (self.n - 1)

    def from_int(self, k):
        return (k % self.p,) + (0,) * (self.n - 1)

    def generator(self):
        if self.n == 1:
            return self.one()
        return (0, 1) + (0,) * (self.n - 2)

    def add(self, a, b):
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.p
        return tuple((-x) % p for x in a)

    def sub(self, a, b):
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def mul(self, a, b):
        p, n = self.p, self.n
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] = (prod[i + j] + x * y) % p
        # reduce by the monic modulus
        for k in range(2 * n - 2, n - 1, -1):
            c = prod[k]
            if c:
                prod[k] = 0
                for j in range(n):
                    prod[k - n + j] = (prod[k - n + j] - c * self.modulus[j]) % p
        return tuple(prod[:n])

    def is_zero(self, a):
        return all(x == 0 for x in a)

    def eq(self, a, b):
        return a == b

    def is_unit(self, a):
        return not self.is_zero(a)

    def inv(self, a):
        if self.is_zero(a):
            raise NotInvertible("division by zero in " + self.name)
        return self.pow(a, self.q - 2)

    def frobenius(self, a):
        return self.pow(a, self.p)

    def elements(self):
        from itertools import product

        for t in product(range(self.p), repeat=self.n):
            yield t

    def format(self, a):
        if self.n == 1:
            return str(a[0])
        terms = []
        for i, c in enumerate(a):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*w" if c != 1 else "w")
            else:
                terms.append(f"{c}*w^{i}" if c != 1 else f"w^{i}")
        return "+".join(terms) if terms else "0"


def finite_field(p, n=1, modulus=None):
    if n == 1 and modulus is None:
        return PrimeField(p)
    return ExtensionField(p, n, modulus)


class WittRing(Ring):
    """W(F_{p^n})/p^K realized as (Z/p^K)[x]/(lift of the field modulus).

    Arithmetic is plain polynomial arithmetic; the Frobenius lift is
    computed once by Hensel's lemma and then applied by evaluation.
    Reduction mod p recovers the ExtensionField with the same modulus.
    """

    def __init__(self, p, n, K, modulus=None):
        if modulus is None:
            modulus = IRREDUCIBLE_MODULI[(p, n)]
        self.p = p
        self.n = n
        self.K = K
        self.m = p**K
        self.modulus = tuple(int(c) for c in modulus)
        self.residue_field = finite_field(p, n, modulus)
        self.characteristic = self.m
        self.name = f"W(F_{p}^{n})/{p}^{K}"
        self._frob_gen = None

    def zero(self):
        return (0,) * self.n

    def one(self):
        return (1 % self.m,) + (0,) * (self.n - 1)

    def from_int(self, k):
        return (k % self.m,) + (0,) * (self.n - 1)

    def generator(self):
        if self.n == 1:
            return self.one()
        return (0, 1) + (0,) * (self.n - 2)

    def add(self, a, b):
        m = self.m
        return tuple((x + y) % m for x, y in zip(a, b))

    def neg(self, a):
        m = self.m
        return tuple((-x) % m for x in a)

    def sub(self, a, b):
        m = self.m
        return tuple((x - y) % m for x, y in zip(a, b))

    def mul(self, a, b):
        m, n = self.m, self.n
        prod = [0] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] = (prod[i + j] + x * y) % m
        for k in range(2 * n - 2, n - 1, -1):
            c = prod[k]
            if c:
                prod[k] = 0
                for j in range(n):
                    prod[k - n + j] = (prod[k - n + j] - c * self.modulus[j]) % m
        return tuple(prod[:n])

    def is_zero(self, a):
        return all(x % self.m == 0 for x in a)

    def eq(self, a, b):
        return all((x - y) % self.m == 0 for x, y in zip(a, b))

    def reduce(self, a):
        """Reduction W/p^K -> F_{p^n}."""
        p = self.p
        r = tuple(x % p for x in a)
        return r[0] if self.n == 1 and isinstance(self.residue_field, PrimeField) else r

    def lift(self, c):
        """Tautological lift F_{p^n} -> W/p^K (coefficientwise)."""
        if isinstance(self.residue_field, PrimeField):
            return (c % self.m,) + (0,) * (self.n - 1)
        return tuple(x % self.m for x in c)

    def is_unit(self, a):
        return a[0] % self.p != 0 or any(x % self.p for x in a)

    def inv(self, a):
        if not self.is_unit(a):
            raise NotInvertible(f"{a} is not a unit in {self.name}")
        fld = self.residue_field
        r0 = fld.inv(self.reduce(a))
        x = self.lift(r0)
        # Hensel: x -> x(2 - ax) doubles the precision each pass.
        for _ in range(self.K.bit_length() + 1):
            ax = self.mul(a, x)
            x = self.mul(x, self.sub(self.from_int(2), ax))
        return x

    def divide_by_p(self, a):
        """Exact division by p; precision loss is the caller's concern."""
        if any(x % self.p for x in a):
            raise ArithmeticError("element not divisible by p")
        return tuple((x // self.p) % self.m for x in a)

    def valuation(self, a):
        """Largest v with a divisible by p^v (K for 0)."""
        v = 0
        cur = a
        while v < self.K and all(x % self.p == 0 for x in cur):
            cur = tuple(x // self.p for x in cur)
            v += 1
        return v

    def teichmuller(self, a):
        """Teichmuller representative with the same reduction as a."""
        t = a
        for _ in range(self.K + 1):
            t = self.pow(t, self.p**self.n)
        return t

    def teichmuller_digits(self, a):
        """Digits c_0, c_1, ... in F_{p^n} with a = sum tau(c_k) p^k.

        Digit k is reliable modulo the precision left after k exact
        divisions by p, so only the first K digits are returned.
        """
        digits = []
        cur = a
        for _ in range(self.K):
            c = self.reduce(cur)
            digits.append(c)
            t = self.teichmuller(self.lift(c))
            cur = tuple((x - y) // self.p % self.m for x, y in zip(cur, t))
        return digits

    def frobenius_generator_image(self):
        """Hensel-lifted root of the modulus congruent to x^p mod p."""
        if self._frob_gen is not None:
            return self._frob_gen
        if self.n == 1:
            self._frob_gen = self.one()
            return self._frob_gen
        r = self.pow(self.generator(), self.p)
        # Newton iteration r -> r - f(r)/f'(r) on the lifted modulus.
        coeffs = [self.from_int(c) for c in self.modulus]
        dcoeffs = [self.from_int(i * self.modulus[i]) for i in range(1, len(self.modulus))]
        for _ in range(self.K.bit_length() + 2):
            fr = self._eval_poly(coeffs, r)
            dfr = self._eval_poly(dcoeffs, r)
            r = self.sub(r, self.mul(fr, self.inv(dfr)))
        self._frob_gen = r
        return r

    def _eval_poly(self, coeffs, x):
        acc = self.zero()
        for c in reversed(coeffs):
            acc = self.add(self.mul(acc, x), c)
        return acc

    def frobenius(self, a):
        """The lift of x -> x^p fixing Z/p^K; a ring homomorphism."""
        if self.n == 1:
            return a
        img = self.frobenius_generator_image()
        acc = self.zero()
        for c in reversed(a):
            acc = self.add(self.mul(acc, img), self.from_int(c))
        return acc

    def format(self, a):
        if self.n == 1:
            return str(a[0])
        terms = []
        for i, c in enumerate(a):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                base = "w" if i == 1 else f"w^{i}"
                terms.append(base if c == 1 else f"{c}*{base}")
        return "+".join(terms) if terms else "0"


def frobenius_lift(ring, a):
    """Frobenius lift on a truncated Witt ring element.

    Reduces to a -> a^p mod p, fixes Z/p^K, and is a ring homomorphism.
    """
    if not isinstance(ring, WittRing):
        raise UnsupportedRing("frobenius_lift is defined on Witt rings")
    return ring.frobenius(a)


class PolynomialRing(Ring):
    """Sparse (optionally graded, optionally one-Laurent-generator)
    polynomial ring over an exact base ring.

    Elements are dicts mapping exponent tuples to nonzero base elements.
    Grading (one integer degree per generator) enables homogeneity
    checks; a single generator may be declared invertible, allowing
    negative exponents in that slot only.
    """

    def __init__(self, base, names, degrees=None, inverted=None):
        self.base = base
        self.names = tuple(names)
        self.degrees = tuple(degrees) if degrees is not None else None
        self.inverted = inverted
        self.inverted_index = self.names.index(inverted) if inverted else None
        self.characteristic = base.characteristic
        self.name = f"{base.name}[{','.join(self.names)}]"

    # -- construction helpers ------------------------------------------
    def zero(self):
        return {}

    def one(self):
        return {(0,) * len(self.names): self.base.one()}

    def from_int(self, n):
        c = self.base.from_int(n)
        if self.base.is_zero(c):
            return {}
        return {(0,) * len(self.names): c}

    def constant(self, c):
        if self.base.is_zero(c):
            return {}
        return {(0,) * len(self.names): c}

    def gen(self, name, power=1):
        i = self.names.index(name)
        if power < 0 and i != self.inverted_index:
            raise NotInvertible(f"{name} is not invertible in {self.name}")
        exps = [0] * len(self.names)
        exps[i] = power
        return {tuple(exps): self.base.one()}

    def monomial(self, exps, coeff=None):
        coeff = self.base.one() if coeff is None else coeff
        if self.base.is_zero(coeff):
            return {}
        return {tuple(exps): coeff}

    # -- arithmetic ----------------------------------------------------
    def add(self, a, b):
        out = dict(a)
        for e, c in b.items():
            if e in out:
                s = self.base.add(out[e], c)
                if self.base.is_zero(s):
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = c
        return out

    def neg(self, a):
        return {e: self.base.neg(c) for e, c in a.items()}

    def mul(self, a, b):
        if len(a) > len(b):
            a, b = b, a
        out = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(x + y for x, y in zip(ea, eb))
                c = self.base.mul(ca, cb)
                if self.base.is_zero(c):
                    continue
                if e in out:
                    s = self.base.add(out[e], c)
                    if self.base.is_zero(s):
                        del out[e]
                    else:
                        out[e] = s
                else:
                    out[e] = c
        return out

    def is_zero(self, a):
        return not a

    def eq(self, a, b):
        if set(a) != set(b):
            return False
        return all(self.base.eq(a[e], b[e]) for e in a)

    def is_unit(self, a):
        if len(a) != 1:
            return False
        (e, c), = a.items()
        for i, x in enumerate(e):
            if x != 0 and i != self.inverted_index:
                return False
        return self.base.is_unit(c)

    def inv(self, a):
        if not self.is_unit(a):
            raise NotInvertible("not a monomial unit in " + self.name)
        (e, c), = a.items()
        return {tuple(-x for x in e): self.base.inv(c)}

    # -- grading and maps ----------------------------------------------
    def degree_of(self, a):
        """Degree of a homogeneous element (None for 0, ValueError if mixed)."""
        if self.degrees is None:
            raise UnsupportedRing("ring has no grading")
        if not a:
            return None
        degs = {sum(x * d for x, d in zip(e, self.degrees)) for e in a}
        if len(degs) > 1:
            raise ValueError(f"element is not homogeneous: degrees {sorted(degs)}")
        return degs.pop()

    def is_homogeneous(self, a, degree=None):
        if not a:
            return True
        try:
            d = self.degree_of(a)
        except ValueError:
            return False
        return True if degree is None else d == degree

    def substitute(self, a, images, target, coeff_map=None):
        """Ring map sending each generator to images[name] in target.

        coeff_map carries base coefficients into the target ring
        (default: via from_int on numerator/denominator-free ints).
        """
        if coeff_map is None:
            def coeff_map(c):
                if isinstance(c, Fraction):
                    if c.denominator != 1:
                        raise ValueError(f"non-integral coefficient {c}")
                    return target.from_int(c.numerator)
                return target.from_int(c)
        out = target.zero()
        for e, c in a.items():
            term = coeff_map(c)
            for name, x in zip(self.names, e):
                if x:
                    term = target.mul(term, target.pow(images[name], x))
            out = target.add(out, term)
        return out

    def map_coefficients(self, a, fn, new_base=None):
        ring = self if new_base is None else PolynomialRing(
            new_base, self.names, self.degrees, self.inverted)
        out = {}
        for e, c in a.items():
            c2 = fn(c)
            if not ring.base.is_zero(c2):
                out[e] = c2
        return out

    def format(self, a):
        if not a:
            return "0"
        parts = []
        for e in sorted(a):
            c = a[e]
            factors = []
            cs = self.base.format(c)
            for name, x in zip(self.names, e):
                if x == 1:
                    factors.append(name)
                elif x != 0:
                    factors.append(f"{name}^{x}")
            if not factors:
                parts.append(cs)
            elif cs == "1":
                parts.append("*".join(factors))
            else:
                parts.append(cs + "*" + "*".join(factors))
        return " + ".join(parts)
