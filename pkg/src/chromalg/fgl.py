"""Formal group law engine: axioms, n-series, invariant differential,
logarithms, Cartier p-typicalization, v-sequence extraction, height,
Frobenius twists, symmetric 2-cocycles and the Landweber criterion.

A law is a two-variable truncated series F(x, y) = x + y + higher over an
exact coefficient ring.  Laws built from a logarithm carry it along; all
verification paths recompute from the series itself.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .rings import (
    Integers, NotInvertible, PLocalRationals, PolynomialRing, Rationals,
    UnsupportedRing, p_valuation,
)
from .series import TruncatedPowerSeries as TPS


class IntegralityError(ArithmeticError):
    """A construction that must produce p-integral output did not."""


class InsufficientTruncation(ValueError):
    pass


class UnsupportedPresentation(ValueError):
    pass


XY = ("x", "y")


def _is_rational_like(ring):
    if isinstance(ring, (Rationals, Integers)):
        return True
    if isinstance(ring, PolynomialRing):
        return _is_rational_like(ring.base)
    return False


class FormalGroupLaw:
    """F(x, y) with optional grading metadata and cached logarithm.

    When graded is set, the coefficient of x^i y^j is homogeneous of
    homology degree 2(i+j-1); the homogeneity verifier enforces this.
    """

    def __init__(self, series, prime=None, graded=False, log=None, vs=None,
                 name=None):
        if series.vars != XY:
            series = series.rename_variables(XY)
        self.series = series
        self.ring = series.ring
        self.trunc = series.trunc
        self.prime = prime
        self.graded = graded
        self.log = log  # one-variable TPS over the same ring, if known
        self.vs = vs    # p-typical v-values, if constructed that way
        self.name = name or "fgl"

    def coefficient(self, i, j):
        return self.series.coefficient((i, j))

    def plus(self, a, b):
        """Formal sum a +_F b of one-variable series (or series in shared vars)."""
        return self.series.substitute({"x": a, "y": b})

    def grading_violations(self):
        if not self.graded:
            return []
        return self.series.homogeneity_violations({"x": -2, "y": -2}, -2)

    def __repr__(self):
        return f"FormalGroupLaw({self.name}, trunc={self.trunc}, ring={self.ring.name})"


class StrictIsomorphism:
    """f with f(x) = x + higher and f(x +_F y) = f(x) +_G f(y)."""

    def __init__(self, source, target, series):
        self.source = source
        self.target = target
        self.series = series

    def check(self, trunc=None):
        t = trunc or min(self.source.trunc, self.series.trunc)
        f = self.series.truncate(t)
        lhs = f.compose(self.source.series.truncate(t))
        fx = f.compose(TPS.variable(f.ring, XY, "x", t))
        fy = f.compose(TPS.variable(f.ring, XY, "y", t))
        rhs = self.target.series.truncate(t).substitute({"x": fx, "y": fy})
        return lhs.eq(rhs)


class PTypicalData:
    """A p-typical law together with the v-sequence read off its p-series."""

    def __init__(self, law, prime, vs):
        self.law = law
        self.prime = prime
        self.vs = list(vs)


class AxiomReport:
    def __init__(self, unit_ok, comm_ok, assoc_ok, assoc_fail_degree, trunc):
        self.unit_ok = unit_ok
        self.comm_ok = comm_ok
        self.assoc_ok = assoc_ok
        self.assoc_fail_degree = assoc_fail_degree
        self.trunc = trunc

    @property
    def all_ok(self):
        return self.unit_ok and self.comm_ok and self.assoc_ok

    def __repr__(self):
        return (f"AxiomReport(unit={self.unit_ok}, comm={self.comm_ok}, "
                f"assoc={self.assoc_ok}, fail_deg={self.assoc_fail_degree}, "
                f"trunc={self.trunc})")


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def additive_law(ring, trunc, prime=None):
    series = TPS.from_terms(ring, XY, trunc,
                            [((1, 0), ring.one()), ((0, 1), ring.one())])
    log = TPS.variable(ring, ("x",), "x", trunc)
    return FormalGroupLaw(series, prime=prime, log=log, name="additive")


def multiplicative_law(ring, trunc, u=None, prime=None):
    """x + y + u xy; ungraded (u = 1) when u is omitted."""
    uu = ring.one() if u is None else u
    series = TPS.from_terms(ring, XY, trunc, [
        ((1, 0), ring.one()), ((0, 1), ring.one()), ((1, 1), uu)])
    return FormalGroupLaw(series, prime=prime, graded=u is not None,
                          name="multiplicative")


def law_from_log(log, trunc=None, prime=None, graded=False, name=None):
    """Build F(x,y) = exp(log x + log y) from a one-variable logarithm."""
    t = trunc or log.trunc
    log = log.truncate(t)
    exp = log.reversion()
    R = log.ring
    lx = TPS(R, XY, t, {(e[0], 0): c for e, c in log.coeffs.items()})
    ly = TPS(R, XY, t, {(0, e[0]): c for e, c in log.coeffs.items()})
    series = exp.compose(lx.add(ly))
    return FormalGroupLaw(series, prime=prime, graded=graded, log=log,
                          name=name)


def rational_scalar_divide(ring, elem, k):
    """Exact division by a nonzero integer inside a Q-based ring
    (Rationals, Z_(p)-as-fractions, or polynomials over those)."""
    if isinstance(ring, PolynomialRing):
        return {e: c / k for e, c in elem.items()}
    return Fraction(elem) / k


def hazewinkel_logarithm(p, v_images, ring, trunc):
    """log coefficients from p*l_n = sum_{i<n} l_i v_{n-i}^{p^i}, l_0 = 1.

    v_images[k] is the image of v_{k+1} in the coefficient ring (zero for
    indices beyond the list).  Returns the one-variable log series with
    terms at x^{p^n} only.
    """
    ls = [ring.one()]
    n = 1
    while p**n < trunc:
        acc = ring.zero()
        for i in range(n):
            k = n - i
            v = v_images[k - 1] if k - 1 < len(v_images) else ring.zero()
            acc = ring.add(acc, ring.mul(ls[i], ring.pow(v, p**i)))
        ls.append(rational_scalar_divide(ring, acc, p))
        n += 1
    terms = [((1,), ring.one())]
    for k in range(1, len(ls)):
        terms.append(((p**k,), ls[k]))
    return TPS.from_terms(ring, ("x",), trunc, terms)


def araki_logarithm(p, v_images, ring, trunc):
    """log coefficients from p*l_n = sum_{0<=i<=n} l_i v_{n-i}^{p^i}, v_0 = p.

    With these generators the p-series is exactly
    px +_F v_1 x^p +_F v_2 x^{p^2} +_F ...
    """
    ls = [ring.one()]
    n = 1
    while p**n < trunc:
        acc = ring.zero()
        for i in range(n):
            k = n - i
            v = v_images[k - 1] if k - 1 < len(v_images) else ring.zero()
            acc = ring.add(acc, ring.mul(ls[i], ring.pow(v, p**i)))
        ls.append(rational_scalar_divide(ring, acc, p - p**(p**n)))
        n += 1
    terms = [((1,), ring.one())]
    for k in range(1, len(ls)):
        terms.append(((p**k,), ls[k]))
    return TPS.from_terms(ring, ("x",), trunc, terms)


def universal_p_typical(p, degree_bound, style="araki", trunc=None):
    """The universal p-typical law over Z_(p)[v_1, ..., v_m], where v_i is
    included when its degree 2(p^i - 1) is within the degree bound.

    style 'araki' makes the p-series exactly px +_F v_1 x^p +_F ...;
    style 'hazewinkel' makes eta_R(v_1) = v_1 + p t_1 exact downstream.
    Raises IntegralityError if any law coefficient fails p-integrality.
    """
    m = 0
    while 2 * (p**(m + 1) - 1) <= degree_bound:
        m += 1
    if m == 0:
        raise ValueError("degree bound admits no v generators")
    names = tuple(f"v{i}" for i in range(1, m + 1))
    degrees = tuple(2 * (p**i - 1) for i in range(1, m + 1))
    V = PolynomialRing(PLocalRationals(p), names, degrees=degrees)
    t = trunc or (p**m + 1)
    vs = [V.gen(nm) for nm in names]
    logfn = araki_logarithm if style == "araki" else hazewinkel_logarithm
    log = logfn(p, vs, V, t)
    law = law_from_log(log, trunc=t, prime=p, graded=True,
                       name=f"universal-p-typical(p={p},{style})")
    law.vs = vs
    bad = _nonintegral_coefficients(law.series, p)
    if bad:
        raise IntegralityError(f"universal law has non p-integral terms {bad[:3]}")
    viol = law.grading_violations()
    if viol:
        raise IntegralityError(f"universal law fails homogeneity at {viol[:3]}")
    return PTypicalData(law, p, vs)


def _nonintegral_coefficients(series, p):
    bad = []
    for e, c in series.coeffs.items():
        if isinstance(c, dict):
            for _, cc in c.items():
                if p_valuation(p, cc) is not None and p_valuation(p, cc) < 0:
                    bad.append(e)
                    break
        elif isinstance(c, Fraction):
            v = p_valuation(p, c)
            if v is not None and v < 0:
                bad.append(e)
    return bad


def honda_law(p, n, trunc=None, field=None, graded=False):
    """The height-n law with p-series  v_n x^{p^n}  (x^{p^n} when ungraded).

    Built over Q with only v_n nonzero, checked p-integral, then reduced
    modulo p into `field` (default F_p) or, when graded, into
    F_p[v_n^{+-1}].
    """
    from .rings import PrimeField, finite_field

    t = trunc or (p**n + 1)
    Q = Rationals()
    vimgs = [Q.zero()] * (n - 1) + [Q.one()]
    log = hazewinkel_logarithm(p, vimgs, Q, t)
    law_q = law_from_log(log, trunc=t, prime=p)
    bad = _nonintegral_coefficients(law_q.series, p)
    if bad:
        raise IntegralityError(f"honda construction non-integral at {bad[:3]}")
    if graded:
        K = PolynomialRing(PrimeField(p), (f"v{n}",), degrees=(2 * (p**n - 1),),
                           inverted=f"v{n}")
        gen = K.gen(f"v{n}")
        per = p**n - 1
        coeffs = {}
        for e, c in law_q.series.coeffs.items():
            k, r = divmod(e[0] + e[1] - 1, per)
            if r != 0:
                raise IntegralityError("graded honda coefficient off-period")
            val = K.monomial((k,), K.base.from_int(
                c.numerator * pow(c.denominator, -1, p)))
            if not K.is_zero(val):
                coeffs[e] = val
        series = TPS(K, XY, t, coeffs)
        law = FormalGroupLaw(series, prime=p, graded=True, name=f"honda:{n}")
        law.vs = [K.zero()] * (n - 1) + [gen]
        return law
    F = field or finite_field(p)

    def reduce_c(c):
        num = c.numerator * pow(c.denominator, -1, p)
        return F.from_int(num)
    series = law_q.series.map_coefficients(reduce_c, F)
    law = FormalGroupLaw(series, prime=p, name=f"honda:{n}")
    law.vs = [F.zero()] * (n - 1) + [F.one()]
    return law


def base_change(law, new_ring, coeff_map, name=None):
    series = law.series.map_coefficients(coeff_map, new_ring)
    out = FormalGroupLaw(series, prime=law.prime, graded=law.graded,
                         name=name or law.name)
    if law.vs is not None:
        out.vs = [coeff_map(v) for v in law.vs]
    return out


def periodic_reindex(law, u_name, target_ring, coeff_map=None):
    """Pass from a graded law over A_0[u^{+-1}] to the ungraded law over
    A_0 given by  u * F(x/u, y/u); the coefficient of x^i y^j picks up
    u^(1-i-j), which must cancel all u-exponents."""
    ring = law.ring
    if not isinstance(ring, PolynomialRing) or u_name not in ring.names:
        raise UnsupportedPresentation("law ring has no inverted generator " + u_name)
    ui = ring.names.index(u_name)
    out = {}
    for (i, j), c in law.series.coeffs.items():
        shifted = ring.mul(c, ring.gen(u_name, 1 - i - j))
        val = target_ring.zero()
        for e, cc in shifted.items():
            if e[ui] != 0:
                raise IntegralityError("u-exponent does not cancel; law is not homogeneous")
            rest = tuple(x for k, x in enumerate(e) if k != ui)
            if any(rest):
                raise UnsupportedPresentation("extra generators in coefficients")
            val = target_ring.add(val, coeff_map(cc) if coeff_map else
                                  target_ring.from_int(cc))
        if not target_ring.is_zero(val):
            out[(i, j)] = val
    series = TPS(target_ring, XY, law.trunc, out)
    return FormalGroupLaw(series, prime=law.prime, name=law.name + "-ungraded")


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def check_fgl_axioms(law, trunc=None):
    t = min(law.trunc, trunc or law.trunc)
    F = law.series.truncate(t)
    R = law.ring
    x1 = TPS.variable(R, ("x",), "x", t)
    z1 = TPS.zero(R, ("x",), t)
    unit = F.substitute({"x": x1, "y": z1})
    unit_ok = unit.eq(x1)
    swapped = TPS(R, XY, t, {(j, i): c for (i, j), c in F.coeffs.items()})
    comm_ok = F.eq(swapped)
    vars3 = ("x", "y", "z")
    x3 = TPS.variable(R, vars3, "x", t)
    y3 = TPS.variable(R, vars3, "y", t)
    z3 = TPS.variable(R, vars3, "z", t)
    fxy = F.substitute({"x": x3, "y": y3})
    fyz = F.substitute({"x": y3, "y": z3})
    lhs = F.substitute({"x": fxy, "y": z3})
    rhs = F.substitute({"x": x3, "y": fyz})
    diff = lhs.sub(rhs)
    assoc_ok = diff.is_zero()
    fail_deg = None if assoc_ok else min(sum(e) for e in diff.coeffs)
    return AxiomReport(unit_ok, comm_ok, assoc_ok, fail_deg, t)


def formal_inverse(law, trunc=None):
    """iota with x +_F iota(x) = 0, by Newton iteration."""
    t = min(law.trunc, trunc or law.trunc)
    R = law.ring
    # iota mod x^t depends only on F mod degree t: pad the missing band
    F = TPS(R, XY, t + 1, {e: c for e, c in law.series.coeffs.items()
                           if sum(e) <= t})
    dFy = F.derivative("y")
    x = TPS.variable(R, ("x",), "x", t)
    g = x.neg().truncate(2)
    prec = 2
    while prec < t:
        prec = min(2 * prec, t)
        gp = TPS(R, ("x",), prec, g.coeffs)
        val = F.truncate(prec).substitute({"x": x.truncate(prec), "y": gp})
        dval = dFy.truncate(prec).substitute({"x": x.truncate(prec), "y": gp})
        g = gp.sub(val.mul(dval.inverse()))
    return g.truncate(t)


def n_series(law, n, trunc=None):
    """[n](x): iterated formal sum, via the formal inverse for n < 0."""
    t = min(law.trunc, trunc or law.trunc)
    R = law.ring
    x = TPS.variable(R, ("x",), "x", t)
    if n == 0:
        return TPS.zero(R, ("x",), t)
    if n < 0:
        iota = formal_inverse(law, t)
        pos = n_series(law, -n, t)
        return iota.compose(pos)
    F = law.series.truncate(t)
    acc = x
    for _ in range(n - 1):
        acc = F.substitute({"x": acc, "y": x})
    return acc


def invariant_differential(law):
    """1/F_y(x, 0): the normalized invariant differential coefficient,
    valid one degree below the law's truncation."""
    R = law.ring
    dy = law.series.derivative("y")
    coeffs = {}
    for (i, j), c in dy.coeffs.items():
        if j == 0:
            coeffs[(i,)] = c
    fy0 = TPS(R, ("x",), dy.trunc, coeffs)
    return fy0.inverse()


def logarithm(law):
    """Strict isomorphism to the additive law over a Q-algebra-like ring,
    as the integral of the invariant differential with zero constant term.

    Integration passes through the rational embedding, so log
    coefficients may be non-integral (x^p/p terms and the like) even
    when the law itself is defined over Z_(p).
    """
    if law.log is not None:
        lg = law.log
    else:
        if not _is_rational_like(law.ring):
            raise UnsupportedRing(
                "logarithm needs a torsion-free coefficient ring embedding in Q")
        omega = invariant_differential(law)
        R = law.ring
        out = {}
        for (e,), c in omega.coeffs.items():
            out[(e + 1,)] = rational_scalar_divide(R, c, e + 1)
        lg = TPS(R, ("x",), omega.trunc + 1, out)
    add = additive_law(law.ring, law.trunc, prime=law.prime)
    return StrictIsomorphism(law, add, lg)


def p_typicalize(law, p):
    """Cartier idempotent via the logarithm: keep p-power log terms.

    Valid over torsion-free p-local rings; returns (PTypicalData, e) with
    e: law -> p-typical law a strict isomorphism, the identity when the
    law is already p-typical.
    """
    if not _is_rational_like(law.ring):
        raise UnsupportedRing(
            "p_typicalize requires a torsion-free p-local coefficient ring")
    lf = logarithm(law).series
    R = law.ring
    keep = {}
    k = 0
    while p**k < lf.trunc:
        e = (p**k,)
        c = lf.coeffs.get(e)
        if c is not None:
            keep[e] = c
        k += 1
    lg = TPS(R, ("x",), lf.trunc, keep)
    G = law_from_log(lg, trunc=law.trunc, prime=p, graded=law.graded,
                     name=law.name + "-p-typical")
    e_series = lg.reversion().compose(lf)
    iso = StrictIsomorphism(law, G, e_series)
    vs = extract_v(G, p, _max_extractable(p, law.trunc))
    return PTypicalData(G, p, vs), iso


def _max_extractable(p, trunc):
    k = 0
    while p ** (k + 1) < trunc:
        k += 1
    return k


def is_p_typical(law, p):
    """Logarithm supported on p-power degrees only."""
    lf = logarithm(law).series
    for (e,), _c in lf.coeffs.items():
        n = e
        while n % p == 0:
            n //= p
        if n != 1:
            return False
    return True


def extract_v(law, p, count):
    """Peel v_1 ... v_count off the p-series:
    [p](x) -_F (px +_F v_1 x^p +_F ... +_F v_k x^{p^k}) starts with
    v_{k+1} x^{p^{k+1}}."""
    if law.trunc <= p**count:
        raise InsufficientTruncation(
            f"need trunc > p^{count} = {p**count}, have {law.trunc}")
    R = law.ring
    ps = n_series(law, p)
    iota = formal_inverse(law)
    x = TPS.variable(R, ("x",), "x", law.trunc)

    def fsum(a, b):
        return law.series.substitute({"x": a, "y": b})

    partial = x.scalar_mul(R.from_int(p))
    vs = []
    for k in range(1, count + 1):
        diff = fsum(ps, iota.compose(partial))
        vk = diff.coefficient((p**k,))
        low = [e for e, _ in diff.coeffs.items() if sum(e) < p**k]
        if low:
            raise ArithmeticError(
                f"p-series peel left unexpected low terms {sorted(low)[:3]}")
        vs.append(vk)
        term = x.pow(p**k).scalar_mul(vk)
        partial = fsum(partial, term)
    return vs


def resynthesize_p_series(law, vs):
    """px +_F v_1 x^p +_F ... for comparison against n_series(law, p)."""
    R = law.ring
    x = TPS.variable(R, ("x",), "x", law.trunc)
    acc = x.scalar_mul(R.from_int(law.prime))
    p = law.prime
    for k, v in enumerate(vs, start=1):
        acc = law.series.substitute({"x": acc, "y": x.pow(p**k).scalar_mul(v)})
    return acc


class HeightResult:
    def __init__(self, exact, n):
        self.exact = exact
        self.n = n

    def __repr__(self):
        return f"height {'=' if self.exact else '>='} {self.n}"

    def __eq__(self, other):
        return (self.exact, self.n) == (other.exact, other.n)


def height(law, bound=10):
    """Largest n with [p](x) a series in x^{p^n}, exact when the
    x^{p^n}-coefficient is a unit; (>= bound) for the additive family."""
    p = law.prime or law.ring.characteristic
    if not p or (law.ring.characteristic == 0):
        raise UnsupportedRing("height requires a characteristic-p coefficient ring")
    ps = n_series(law, p)
    if ps.is_zero():
        return HeightResult(False, bound)
    R = law.ring
    n = 0
    while n + 1 < bound:
        q = p ** (n + 1)
        if all(e[0] % q == 0 for e in ps.coeffs):
            n += 1
        else:
            break
    vn = ps.coefficient((p**n,))
    if R.is_unit(vn):
        return HeightResult(True, n)
    # x^{p^n}-coefficient zero means height at least n+1
    return HeightResult(False, n + 1 if R.is_zero(vn) else n)


def frobenius_twist(law):
    """Coefficientwise p-th power; x -> x^p is a homomorphism to the twist."""
    p = law.ring.characteristic
    if not p:
        raise UnsupportedRing("frobenius twist requires characteristic p")
    prime = law.prime or p
    series = law.series.map_coefficients(lambda c: law.ring.pow(c, prime))
    return FormalGroupLaw(series, prime=law.prime, graded=law.graded,
                          name=law.name + "^(p)")


def symmetric_cocycle(n):
    """C_n(x,y) = (1/d)[(x+y)^n - x^n - y^n], d = p when n is a p-power."""
    if n < 2:
        raise ValueError("n must be at least 2")
    d = 1
    m = n
    for p in range(2, n + 1):
        if m % p == 0:
            while m % p == 0:
                m //= p
            d = p if m == 1 else 1
            break
    Z = Integers()
    terms = []
    for k in range(1, n):
        terms.append(((k, n - k), comb(n, k) // d))
    return TPS.from_terms(Z, XY, n + 1, terms)


# ---------------------------------------------------------------------------
# Landweber regularity
# ---------------------------------------------------------------------------

class LandweberReport:
    def __init__(self, stages, exact, zero_from):
        self.stages = stages            # list of (label, status, note)
        self.exact = exact              # regular through the requested range
        self.zero_from = zero_from      # stage index where quotient became 0

    def __repr__(self):
        body = "; ".join(f"{l}:{s}" for l, s, _ in self.stages)
        return f"LandweberReport({body}, exact={self.exact})"


def landweber_check(presentation, v_values, p, n_max):
    """Regularity of p, v_1, ..., v_{n_max} in a graded polynomial/Laurent
    presentation over Z_(p) (or a field), by stagewise content inspection.

    presentation: PolynomialRing whose base is Z_(p)-like or F_p.
    v_values: images of v_1..v_n_max in that ring.
    """
    A = presentation
    base_char = A.base.characteristic
    stages = []
    zero_from = None
    killed = set()

    def reduce_stage(poly, mod_p):
        out = {}
        for e, c in poly.items():
            if any(e[A.names.index(g)] for g in killed):
                continue
            if mod_p:
                if isinstance(c, Fraction):
                    if c.denominator % p == 0:
                        raise UnsupportedPresentation("non p-integral value")
                    cc = c.numerator * pow(c.denominator, -1, p) % p
                else:
                    cc = c % p
                if cc:
                    out[e] = cc
            else:
                out[e] = c
        return out

    # stage 0: multiplication by p
    if base_char == 0:
        stages.append(("p", "regular", "nonzerodivisor in a torsion-free ring"))
    elif base_char == p:
        stages.append(("p", "fails", "p = 0 in the presented ring"))
        return LandweberReport(stages, False, None)
    else:
        raise UnsupportedPresentation("base ring characteristic unsupported")

    for i in range(1, n_max + 1):
        label = f"v{i}"
        if zero_from is not None:
            stages.append((label, "regular", "quotient ring is zero"))
            continue
        if i - 1 >= len(v_values):
            raise UnsupportedPresentation(f"no value supplied for {label}")
        img = reduce_stage(v_values[i - 1], mod_p=True)
        if not img:
            stages.append((label, "fails", "image is zero in the quotient"))
            return LandweberReport(stages, False, zero_from)
        if len(img) == 1:
            (e, c), = img.items()
            live = [(k, x) for k, x in enumerate(e)
                    if x != 0 and A.names[k] not in killed]
            non_inverted = [(k, x) for k, x in live if k != A.inverted_index]
            if not non_inverted:
                stages.append((label, "regular",
                               "unit in the quotient; later stages vanish"))
                zero_from = i
                continue
            if len(non_inverted) == 1 and non_inverted[0][1] == 1 and len(live) == len(non_inverted):
                killed.add(A.names[non_inverted[0][0]])
                stages.append((label, "regular", "polynomial generator"))
                continue
        # general nonzero polynomial in a domain: a nonzerodivisor, but the
        # next quotient stage is no longer of polynomial type
        if i == n_max:
            stages.append((label, "regular", "nonzero in a domain"))
        else:
            raise UnsupportedPresentation(
                f"quotient by {label} is not of polynomial type")
    return LandweberReport(stages, True, zero_from)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def law_to_json(law):
    coeffs = {}
    for (i, j) in sorted(law.series.coeffs):
        coeffs[f"{i},{j}"] = law.ring.format(law.series.coeffs[(i, j)])
    return {
        "prime": law.prime,
        "trunc": law.trunc,
        "variables": list(XY),
        "coefficients": coeffs,
        "grading": bool(law.graded),
    }


def law_from_json(doc, ring=None):
    """Laws with rational coefficients only (the file interchange format)."""
    R = ring or Rationals()
    coeffs = {}
    for key, val in doc["coefficients"].items():
        i, j = (int(t) for t in key.split(","))
        coeffs[(i, j)] = Fraction(val)
    series = TPS(R, XY, int(doc["trunc"]), coeffs)
    return FormalGroupLaw(series, prime=doc.get("prime"),
                          graded=bool(doc.get("grading")))
