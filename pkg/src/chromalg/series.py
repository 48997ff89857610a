"""Truncated multivariate power series over any exact coefficient ring.

A series is valid modulo a stated total-degree bound: terms of total
degree >= trunc are undefined and never stored.  Every binary operation
propagates trunc = min of the operands', so precision loss is always
explicit.  Coefficient arithmetic is delegated to a Ring object, which
lets the same engine run over Q, Z_(p), F_q, Z/p^K and graded
polynomial rings.
"""

from __future__ import annotations

from .rings import NotInvertible, RingNotDivisible


class NonzeroConstantTerm(ValueError):
    pass


class TruncatedPowerSeries:
    __slots__ = ("ring", "vars", "trunc", "coeffs", "weights")

    def __init__(self, ring, variables, trunc, coeffs=None, weights=None):
        self.ring = ring
        self.vars = tuple(variables)
        self.trunc = trunc
        self.weights = weights
        clean = {}
        if coeffs:
            for e, c in coeffs.items():
                if sum(e) < trunc and not ring.is_zero(c):
                    clean[tuple(e)] = c
        self.coeffs = clean

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, ring, variables, trunc):
        return cls(ring, variables, trunc)

    @classmethod
    def constant(cls, ring, variables, trunc, value):
        return cls(ring, variables, trunc, {(0,) * len(variables): value})

    @classmethod
    def variable(cls, ring, variables, name, trunc):
        variables = tuple(variables)
        e = [0] * len(variables)
        e[variables.index(name)] = 1
        return cls(ring, variables, trunc, {tuple(e): ring.one()})

    @classmethod
    def from_terms(cls, ring, variables, trunc, terms):
        """terms: iterable of (exponent tuple, coefficient)."""
        out = {}
        for e, c in terms:
            e = tuple(e)
            if sum(e) >= trunc or ring.is_zero(c):
                continue
            if e in out:
                s = ring.add(out[e], c)
                if ring.is_zero(s):
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = c
        return cls(ring, variables, trunc, out)

    # -- basics -----------------------------------------------------------
    def coefficient(self, exps):
        return self.coeffs.get(tuple(exps), self.ring.zero())

    def constant_term(self):
        return self.coefficient((0,) * len(self.vars))

    def is_zero(self):
        return not self.coeffs

    def truncate(self, trunc):
        if trunc >= self.trunc:
            return self
        return TruncatedPowerSeries(self.ring, self.vars, trunc, self.coeffs,
                                    self.weights)

    def eq(self, other):
        """Equality of the jointly defined region (degrees < min trunc)."""
        t = min(self.trunc, other.trunc)
        a = {e: c for e, c in self.coeffs.items() if sum(e) < t}
        b = {e: c for e, c in other.coeffs.items() if sum(e) < t}
        if set(a) != set(b):
            return False
        return all(self.ring.eq(a[e], b[e]) for e in a)

    # -- ring operations --------------------------------------------------
    def _check_compatible(self, other):
        if self.vars != other.vars:
            raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")

    def add(self, other):
        self._check_compatible(other)
        R = self.ring
        t = min(self.trunc, other.trunc)
        out = {e: c for e, c in self.coeffs.items() if sum(e) < t}
        for e, c in other.coeffs.items():
            if sum(e) >= t:
                continue
            if e in out:
                s = R.add(out[e], c)
                if R.is_zero(s):
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = c
        return TruncatedPowerSeries(R, self.vars, t, out)

    def neg(self):
        R = self.ring
        return TruncatedPowerSeries(
            R, self.vars, self.trunc,
            {e: R.neg(c) for e, c in self.coeffs.items()})

    def sub(self, other):
        return self.add(other.neg())

    def scalar_mul(self, c):
        R = self.ring
        if R.is_zero(c):
            return TruncatedPowerSeries(R, self.vars, self.trunc)
        out = {}
        for e, v in self.coeffs.items():
            w = R.mul(c, v)
            if not R.is_zero(w):
                out[e] = w
        return TruncatedPowerSeries(R, self.vars, self.trunc, out)

    def mul(self, other):
        self._check_compatible(other)
        R = self.ring
        t = min(self.trunc, other.trunc)
        a = sorted(self.coeffs.items(), key=lambda kv: sum(kv[0]))
        b = sorted(other.coeffs.items(), key=lambda kv: sum(kv[0]))
        out = {}
        for ea, ca in a:
            da = sum(ea)
            if da >= t:
                break
            for eb, cb in b:
                if da + sum(eb) >= t:
                    break
                e = tuple(x + y for x, y in zip(ea, eb))
                c = R.mul(ca, cb)
                if R.is_zero(c):
                    continue
                if e in out:
                    s = R.add(out[e], c)
                    if R.is_zero(s):
                        del out[e]
                    else:
                        out[e] = s
                else:
                    out[e] = c
        return TruncatedPowerSeries(R, self.vars, t, out)

    def pow(self, k):
        if k < 0:
            raise ValueError("negative power of a series")
        result = TruncatedPowerSeries.constant(self.ring, self.vars,
                                               self.trunc, self.ring.one())
        base = self
        while k:
            if k & 1:
                result = result.mul(base)
            base = base.mul(base) if k > 1 else base
            k >>= 1
        return result

    # -- composition -------------------------------------------------------
    def compose(self, inner):
        """Substitute a series for the unique variable of this series.

        The inner series must have zero constant term; the result is a
        series in the inner series' variables.
        """
        if len(self.vars) != 1:
            raise ValueError("compose requires a one-variable outer series")
        if not inner.ring.is_zero(inner.constant_term()):
            raise NonzeroConstantTerm("inner series has nonzero constant term")
        return self.substitute({self.vars[0]: inner})

    def substitute(self, images):
        """Simultaneous substitution var -> series (all with zero constant
        term not required here for unused variables; used ones must be
        zero-constant when this series has unbounded support in them --
        the engine requires zero constant term for every substituted
        variable to keep truncation exact)."""
        some = next(iter(images.values()))
        R = some.ring
        tvars = some.vars
        t = min([self.trunc] + [img.trunc for img in images.values()])
        for v in self.vars:
            if v not in images:
                raise ValueError(f"no image supplied for variable {v}")
            if not R.is_zero(images[v].constant_term()):
                raise NonzeroConstantTerm(
                    f"image of {v} has nonzero constant term")
        # lazily built power tables, one per variable
        powers = {v: {0: TruncatedPowerSeries.constant(R, tvars, t, R.one()),
                      1: images[v].truncate(t)} for v in self.vars}

        def get_power(v, k):
            table = powers[v]
            if k in table:
                return table[k]
            half = get_power(v, k // 2)
            cur = half.mul(half)
            if k & 1:
                cur = cur.mul(table[1])
            table[k] = cur
            return cur

        acc = TruncatedPowerSeries.zero(R, tvars, t)
        for e in sorted(self.coeffs, key=sum):
            c = self.coeffs[e]
            term = TruncatedPowerSeries.constant(R, tvars, t, c)
            dead = False
            for v, k in zip(self.vars, e):
                if k:
                    term = term.mul(get_power(v, k))
                    if term.is_zero():
                        dead = True
                        break
            if not dead:
                acc = acc.add(term)
        return acc

    # -- calculus ----------------------------------------------------------
    def derivative(self, var):
        """Termwise derivative; the result is valid one degree lower,
        since its top band would need the undefined band of the input."""
        R = self.ring
        i = self.vars.index(var)
        out = {}
        for e, c in self.coeffs.items():
            if e[i] == 0:
                continue
            c2 = R.mul(c, R.from_int(e[i]))
            if R.is_zero(c2):
                continue
            e2 = list(e)
            e2[i] -= 1
            out[tuple(e2)] = c2
        return TruncatedPowerSeries(R, self.vars, max(self.trunc - 1, 0), out)

    def integrate(self, var):
        """Termwise integral with zero constant term.

        Raises RingNotDivisible when some exponent+1 is not invertible
        in the coefficient ring (e.g. degree p-1 over F_p).
        """
        R = self.ring
        i = self.vars.index(var)
        out = {}
        for e, c in self.coeffs.items():
            n = R.from_int(e[i] + 1)
            if not R.is_unit(n):
                raise RingNotDivisible(
                    f"cannot divide by {e[i] + 1} in {R.name}")
            e2 = list(e)
            e2[i] += 1
            out[tuple(e2)] = R.mul(c, R.inv(n))
        # integration is valid one degree higher than the input
        return TruncatedPowerSeries(R, self.vars, self.trunc + 1, out)

    # -- inverses ------------------------------------------------------------
    def inverse(self):
        """Multiplicative inverse; requires a unit constant term."""
        R = self.ring
        c0 = self.constant_term()
        if not R.is_unit(c0):
            raise NotInvertible("constant term is not a unit")
        one = TruncatedPowerSeries.constant(R, self.vars, self.trunc, R.one())
        y = TruncatedPowerSeries.constant(R, self.vars, 1, R.inv(c0))
        prec = 1
        while prec < self.trunc:
            prec = min(2 * prec, self.trunc)
            f = self.truncate(prec)
            # Newton doubling extends the precision claim, so rebuild at prec
            yt = TruncatedPowerSeries(R, self.vars, prec, y.coeffs)
            err = one.truncate(prec).sub(f.mul(yt))
            y = yt.add(yt.mul(err))
        return y.truncate(self.trunc)

    def reversion(self):
        """Compositional inverse of a one-variable series u*x + higher,
        u a unit: compose(self, result) == x == compose(result, self)."""
        if len(self.vars) != 1:
            raise ValueError("reversion requires a one-variable series")
        R = self.ring
        if not R.is_zero(self.constant_term()):
            raise NonzeroConstantTerm("series has nonzero constant term")
        a1 = self.coefficient((1,))
        if not R.is_unit(a1):
            raise NotInvertible("linear coefficient is not a unit")
        # the reversion mod x^T depends only on f mod x^T, so the missing
        # band may be padded with zero for the Newton iteration
        T = self.trunc
        fpad = TruncatedPowerSeries(R, self.vars, T + 1, self.coeffs)
        x = TruncatedPowerSeries.variable(R, self.vars, self.vars[0], T)
        if T <= 2:
            return x.scalar_mul(R.inv(a1))
        g = x.scalar_mul(R.inv(a1)).truncate(2)
        dfpad = fpad.derivative(self.vars[0])
        prec = 2
        while prec < T:
            prec = min(2 * prec, T)
            gp = TruncatedPowerSeries(R, self.vars, prec, g.coeffs)
            fg = fpad.truncate(prec).compose(gp)
            err = fg.sub(x.truncate(prec))
            dfg = dfpad.truncate(prec).compose(gp)
            g = gp.sub(err.mul(dfg.inverse()))
        return g.truncate(T)

    # -- grading -----------------------------------------------------------
    def homogeneity_violations(self, var_weights, expected, coeff_degree=None):
        """Monomials whose weight differs from expected.

        var_weights maps variable name to an integer weight; coeff_degree
        gives the degree of a coefficient (defaults to the ring grading
        for polynomial coefficient rings, 0 otherwise).
        """
        if coeff_degree is None:
            ring = self.ring
            if hasattr(ring, "degree_of") and getattr(ring, "degrees", None):
                coeff_degree = ring.degree_of
            else:
                def coeff_degree(_):
                    return 0
        bad = []
        for e, c in self.coeffs.items():
            d = coeff_degree(c)
            if d is None:
                continue
            w = d + sum(k * var_weights[v] for v, k in zip(self.vars, e))
            if w != expected:
                bad.append((e, w))
        return bad

    # -- misc ---------------------------------------------------------------
    def map_coefficients(self, fn, new_ring=None):
        R = new_ring or self.ring
        out = {}
        for e, c in self.coeffs.items():
            c2 = fn(c)
            if not R.is_zero(c2):
                out[e] = c2
        return TruncatedPowerSeries(R, self.vars, self.trunc, out)

    def rename_variables(self, new_vars):
        return TruncatedPowerSeries(self.ring, tuple(new_vars), self.trunc,
                                    self.coeffs)

    def support_degrees(self):
        return sorted({sum(e) for e in self.coeffs})

    def terms_sorted(self):
        return sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def __repr__(self):
        parts = []
        for e, c in self.terms_sorted()[:8]:
            mono = "*".join(
                f"{v}^{k}" if k > 1 else v
                for v, k in zip(self.vars, e) if k) or "1"
            parts.append(f"{self.ring.format(c)}*{mono}")
        body = " + ".join(parts) if parts else "0"
        if len(self.coeffs) > 8:
            body += " + ..."
        return f"<{body} + O(deg {self.trunc})>"


def ps_compose(outer, inner):
    """Composition outer(inner) for a one-variable outer series."""
    return outer.compose(inner)


def ps_reversion(f):
    """Compositional inverse of f = unit*x + higher."""
    return f.reversion()


def ps_derivative_integrate(f, var, mode):
    """Termwise derivative or integral with respect to one variable."""
    if mode == "derive":
        return f.derivative(var)
    if mode == "integrate":
        return f.integrate(var)
    raise ValueError(f"unknown mode {mode!r}")
