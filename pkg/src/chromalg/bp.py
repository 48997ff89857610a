"""The BP Hopf algebroid in a degree window, comodule cobar cohomology
over Z_(p), chromatic connecting maps, Greek-letter elements, the
v1-Bockstein engine and the beta-family enumerator.

Structure maps are built from the Hazewinkel-style logarithm recursion
p*l_n = sum_{i<n} l_i v_{n-i}^{p^i}; with these generators the right
unit satisfies eta_R(v1) = v1 + p t1 on the nose, and eta_R(v2) agrees
with v2 + v1 t1^p - v1^p t1 mod p.  Everything is verified at
construction time and again in the test suite.

Polynomial data lives in "left form": a dict mapping (v-exponents,
t-exponents) to an integer, meaning sum eta_L(v^a) t^b.  Cobar cochains
are written in module-slot form (t-monomial slots, module monomial at
the right end); converting left coefficients across slots uses the
triangular right-expansion through eta_R.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .chart import BigradedChart
from .linalg import (
    FieldRowSpace, homology_of_presented_complex, integer_solve, p_part,
    smith_normal_form,
)
from .rings import PLocalRationals, PolynomialRing, PrimeField


class IntegralityError(ArithmeticError):
    pass


class NotTorsion(ValueError):
    pass


class BudgetExhausted(RuntimeError):
    pass


class StageNotStable(RuntimeError):
    pass


def _mon_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _mon_scale(a, k):
    return tuple(x * k for x in a)


class BPPresentation:
    """BP and its operations ring below an internal degree window D.

    Carries the generator count m (v_i and t_i appear when their degree
    2(p^i - 1) fits in D), the right unit on v-monomials, the coproduct
    on t-monomials, and the counit; Hopf-algebroid identities are
    checked below D at construction time.
    """

    def __init__(self, p, D, check=True):
        self.p = p
        self.D = D
        m = 0
        while 2 * (p ** (m + 1) - 1) <= D:
            m += 1
        if m == 0:
            raise ValueError("degree window admits no generators")
        self.m = m
        self.gen_degrees = tuple(2 * (p**i - 1) for i in range(1, m + 1))
        self._ls = self._hazewinkel_ls()
        self.eta_R_v = {}
        self._compute_eta_R()
        self.delta_t = {}
        self._compute_delta()
        self._eta_mon_cache = {}
        self._right_cache = {}
        self._delta_mon_cache = {}
        if check:
            self._verify()

    # -- construction over Q -------------------------------------------
    def _hazewinkel_ls(self):
        """l_0 = 1, l_n from p*l_n = sum_{i<n} l_i v_{n-i}^{p^i}; values are
        polynomials in the v's as dicts vexps -> Fraction."""
        p, m = self.p, self.m
        zero_v = (0,) * m
        ls = [{zero_v: Fraction(1)}]
        for n in range(1, m + 1):
            acc = {}
            for i in range(n):
                k = n - i
                if k > m:
                    continue
                v_pow = [0] * m
                v_pow[k - 1] = p**i
                for e, c in ls[i].items():
                    e2 = _mon_add(e, tuple(v_pow))
                    acc[e2] = acc.get(e2, Fraction(0)) + c
            ls.append({e: c / p for e, c in acc.items()})
        return ls

    def _vt_mul(self, a, b, scale=1):
        out = {}
        for (va, ta), ca in a.items():
            for (vb, tb), cb in b.items():
                key = (_mon_add(va, vb), _mon_add(ta, tb))
                out[key] = out.get(key, Fraction(0)) + ca * cb * scale
        return {k: v for k, v in out.items() if v}

    def _vt_pow(self, a, k):
        zero = ((0,) * self.m, (0,) * self.m)
        out = {zero: Fraction(1)}
        base = a
        while k:
            if k & 1:
                out = self._vt_mul(out, base)
            base = self._vt_mul(base, base)
            k >>= 1
        return out

    def _compute_eta_R(self):
        """eta_R(v_n) by applying eta_R to the logarithm recursion:
        eta_R(l_n) = sum_{i+j=n} l_i t_j^{p^i}."""
        p, m = self.p, self.m
        zero_v = (0,) * m
        zero_t = (0,) * m

        def eta_l(n):
            out = {}
            for i in range(n + 1):
                j = n - i
                if j > m:
                    continue
                t_pow = [0] * m
                if j > 0:
                    t_pow[j - 1] = p**i
                for e, c in self._ls[i].items():
                    key = (e, tuple(t_pow))
                    out[key] = out.get(key, Fraction(0)) + c
            return out

        eta_v = {}
        for n in range(1, m + 1):
            acc = {k: c * p for k, c in eta_l(n).items()}
            for i in range(1, n):
                ev = {k: Fraction(c) for k, c in eta_v[n - i].items()}
                term = self._vt_mul(eta_l(i), self._vt_pow(ev, p**i))
                for k, c in term.items():
                    acc[k] = acc.get(k, Fraction(0)) - c
            acc = {k: c for k, c in acc.items() if c}
            for k, c in acc.items():
                if c.denominator != 1:
                    raise IntegralityError(f"eta_R(v{n}) non-integral at {k}: {c}")
            eta_v[n] = {k: int(c) for k, c in acc.items()}
        self.eta_R_v = eta_v

    def _compute_delta(self):
        """Delta(t_n) from sum_{h+k=n} l_h Delta(t_k)^{p^h}
        = sum_{h+i+j=n} l_h t_i^{p^h} (x) t_j^{p^{h+i}}.

        Pairs are stored with the coefficient on the far left:
        dict (vexps, t-left, t-right) -> int."""
        p, m = self.p, self.m
        zero_v = (0,) * m
        zero_t = (0,) * m

        def pair_mul(a, b, scale=1):
            out = {}
            for (va, ua, wa), ca in a.items():
                for (vb, ub, wb), cb in b.items():
                    key = (_mon_add(va, vb), _mon_add(ua, ub), _mon_add(wa, wb))
                    out[key] = out.get(key, Fraction(0)) + ca * cb * scale
            return {k: v for k, v in out.items() if v}

        def pair_pow(a, k):
            out = {(zero_v, zero_t, zero_t): Fraction(1)}
            base = a
            while k:
                if k & 1:
                    out = pair_mul(out, base)
                base = pair_mul(base, base)
                k >>= 1
            return out

        delta = {0: {(zero_v, zero_t, zero_t): Fraction(1)}}
        for n in range(1, m + 1):
            rhs = {}
            for h in range(n + 1):
                for i in range(n - h + 1):
                    j = n - h - i
                    if i > m or j > m:
                        continue
                    tl = [0] * m
                    if i > 0:
                        tl[i - 1] = p**h
                    tr = [0] * m
                    if j > 0:
                        tr[j - 1] = p ** (h + i)
                    for e, c in self._ls[h].items():
                        key = (e, tuple(tl), tuple(tr))
                        rhs[key] = rhs.get(key, Fraction(0)) + c
            for h in range(1, n + 1):
                k = n - h
                dk = {key: Fraction(v) for key, v in delta[k].items()}
                term = pair_pow(dk, p**h)
                lh = {(e, zero_t, zero_t): c for e, c in self._ls[h].items()}
                term = pair_mul(lh, term)
                for key, c in term.items():
                    rhs[key] = rhs.get(key, Fraction(0)) - c
            rhs = {k: v for k, v in rhs.items() if v}
            for k, c in rhs.items():
                if c.denominator != 1:
                    raise IntegralityError(f"Delta(t{n}) non-integral at {k}: {c}")
            delta[n] = {k: int(c) for k, c in rhs.items()}
        self.delta_t = delta

    # -- monomial-level structure maps ---------------------------------
    def degree_v(self, vexps):
        return sum(e * d for e, d in zip(vexps, self.gen_degrees))

    def degree_t(self, texps):
        return sum(e * d for e, d in zip(texps, self.gen_degrees))

    def eta_R_monomial(self, vexps):
        """Left-form expansion of eta_R(v^vexps): dict (vexps, texps) -> int."""
        vexps = tuple(vexps)
        if vexps in self._eta_mon_cache:
            return self._eta_mon_cache[vexps]
        zero = ((0,) * self.m, (0,) * self.m)
        out = {zero: 1}
        for i, e in enumerate(vexps):
            if e:
                base = {k: Fraction(v) for k, v in self.eta_R_v[i + 1].items()}
                powed = self._vt_pow(base, e)
                out = self._vt_mul({k: Fraction(v) for k, v in out.items()}, powed)
        out = {k: int(v) for k, v in out.items() if v}
        self._eta_mon_cache[vexps] = out
        return out

    def right_expand(self, left_form):
        """Convert sum eta_L(v^a) t^b into sum t^b' eta_R(v^a'):
        returns dict texps -> dict vexps -> int.

        Peels the minimal-t-degree term; eta_R(v^a) = v^a + strictly
        higher t-terms makes the peel triangular and terminating."""
        work = {k: v for k, v in left_form.items() if v}
        out = {}
        while work:
            key = min(work, key=lambda k: (self.degree_t(k[1]), k[1], k[0]))
            vex, tex = key
            c = work.pop(key)
            out.setdefault(tex, {})
            out[tex][vex] = out[tex].get(vex, 0) + c
            for (v2, t2), c2 in self.eta_R_monomial(vex).items():
                if t2 == (0,) * self.m and v2 == vex:
                    continue  # the leading term, already accounted
                k2 = (v2, _mon_add(tex, t2))
                val = work.get(k2, 0) - c * c2
                if val:
                    work[k2] = val
                elif k2 in work:
                    del work[k2]
        return {t: {v: c for v, c in d.items() if c} for t, d in out.items()}

    def delta_monomial(self, texps):
        """Delta of a t-monomial: dict (vexps, t-left, t-right) -> int."""
        texps = tuple(texps)
        if texps in self._delta_mon_cache:
            return self._delta_mon_cache[texps]
        zero_v = (0,) * self.m
        zero_t = (0,) * self.m
        out = {(zero_v, zero_t, zero_t): Fraction(1)}

        def pair_mul(a, b):
            res = {}
            for (va, ua, wa), ca in a.items():
                for (vb, ub, wb), cb in b.items():
                    key = (_mon_add(va, vb), _mon_add(ua, ub),
                           _mon_add(wa, wb))
                    res[key] = res.get(key, Fraction(0)) + ca * cb
            return {k: v for k, v in res.items() if v}

        for i, e in enumerate(texps):
            if not e:
                continue
            base = {k: Fraction(v) for k, v in self.delta_t[i + 1].items()}
            powed = {(zero_v, zero_t, zero_t): Fraction(1)}
            b = base
            k = e
            while k:
                if k & 1:
                    powed = pair_mul(powed, b)
                b = pair_mul(b, b)
                k >>= 1
            out = pair_mul(out, powed)
        out = {k: int(v) for k, v in out.items() if v}
        self._delta_mon_cache[texps] = out
        return out

    def delta_reduced(self, texps):
        """Reduced coproduct: both tensor factors in the augmentation ideal."""
        zero_t = (0,) * self.m
        return {k: c for k, c in self.delta_monomial(texps).items()
                if k[1] != zero_t and k[2] != zero_t}

    def counit_ok(self, texps):
        """(eps x 1) Delta = id = (1 x eps) Delta on the monomial."""
        zero_v = (0,) * self.m
        zero_t = (0,) * self.m
        left = {}
        right = {}
        for (v, u, w), c in self.delta_monomial(texps).items():
            if u == zero_t:
                key = (v, w)
                left[key] = left.get(key, 0) + c
            if w == zero_t:
                key = (v, u)
                right[key] = right.get(key, 0) + c
        expected = {(zero_v, tuple(texps)): 1}
        clean = lambda d: {k: v for k, v in d.items() if v}
        return clean(left) == expected and clean(right) == expected

    def coassociativity_defect(self, texps, degree_cap=None):
        """(Delta x 1)Delta - (1 x Delta)Delta on a t-monomial, as a dict
        over (vexps, t1, t2, t3); empty means coassociative.

        The right-hand expansion needs coefficients moved across the
        first slot, which is exactly the right-expansion through eta_R.
        """
        lhs = {}
        for (v, u, w), c in self.delta_monomial(texps).items():
            for (v2, u1, u2), c2 in self.delta_monomial(u).items():
                key = (_mon_add(v, v2), u1, u2, w)
                lhs[key] = lhs.get(key, 0) + c * c2
        rhs = {}
        for (v, u, w), c in self.delta_monomial(texps).items():
            for (v2, w1, w2), c2 in self.delta_monomial(w).items():
                # coefficient v2 sits left of slot 2: move it across slot 1
                for tex, vd in self.right_expand({(v2, u): 1}).items():
                    for vres, c3 in vd.items():
                        # now eta_R(v^vres) multiplies slot 2 from the left:
                        # expand once more
                        for (v4, t4), c4 in self.eta_R_monomial(vres).items():
                            key = (_mon_add(v, v4), tex,
                                   _mon_add(t4, w1), w2)
                            rhs[key] = rhs.get(key, 0) + c * c2 * c3 * c4
        out = {}
        for key in set(lhs) | set(rhs):
            d = lhs.get(key, 0) - rhs.get(key, 0)
            if d:
                out[key] = d
        return out

    # -- construction-time checks --------------------------------------
    def _verify(self):
        p, m = self.p, self.m
        # eta_R(v1) = v1 + p t1 exactly
        v1 = tuple([1] + [0] * (m - 1))
        t1 = tuple([1] + [0] * (m - 1))
        zero = (0,) * m
        want = {(v1, zero): 1, (zero, t1): p}
        if self.eta_R_v[1] != want:
            raise IntegralityError(f"eta_R(v1) = {self.eta_R_v[1]} != v1 + p t1")
        if m >= 2:
            # eta_R(v2) = v2 + v1 t1^p - v1^p t1 mod p
            v2 = tuple([0, 1] + [0] * (m - 2))
            got = {k: c % p for k, c in self.eta_R_v[2].items() if c % p}
            t1p = tuple([p] + [0] * (m - 1))
            want2 = {(v2, zero): 1, (v1, t1p): 1,
                     (tuple([p] + [0] * (m - 1)), t1): (-1) % p}
            if got != want2:
                raise IntegralityError(
                    f"eta_R(v2) mod p = {got}, expected {want2}")

    def t_monomials(self, degree):
        """t-monomials of the given internal degree (exponent tuples)."""
        return _graded_monomials(degree, self.gen_degrees)

    def v_monomials(self, degree, caps=None):
        out = []
        for mon in _graded_monomials(degree, self.gen_degrees):
            if caps:
                if any(mon[i] >= caps[i] for i in caps):
                    continue
            out.append(mon)
        return out


def _graded_monomials(degree, gen_degrees, _cache={}):
    key = (degree, gen_degrees)
    if key in _cache:
        return _cache[key]
    m = len(gen_degrees)
    out = []

    def build(idx, remaining, prefix):
        if idx == m:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        d = gen_degrees[idx]
        for e in range(remaining // d + 1):
            build(idx + 1, remaining - e * d, prefix + [e])

    if degree >= 0 and degree % 2 == 0:
        build(0, degree, [])
    out.sort()
    _cache[key] = out
    return out


# ---------------------------------------------------------------------------
# Comodules and their cobar complexes
# ---------------------------------------------------------------------------

class ComodulePresentation:
    """A cyclic comodule stage: BP*/(p^e0, v1^e1, ...) (exponents None
    meaning no truncation), optionally rationalized.

    Infinite-exponent modules are handled as explicit colimits of
    finite stages by the operations that need them; a presentation here
    is always a single finite stage.
    """

    def __init__(self, bp, p_exp=None, v_caps=None, rational=False):
        self.bp = bp
        self.p_exp = p_exp
        self.v_caps = dict(v_caps or {})     # generator index (1-based) -> cap
        self.rational = rational
        if rational and (p_exp is not None or self.v_caps):
            raise ValueError("a rationalized module cannot carry torsion data")

    def caps_by_slot(self):
        return {i - 1: cap for i, cap in self.v_caps.items()}

    def module_basis(self, degree):
        return self.bp.v_monomials(degree, caps=self.caps_by_slot() or None)

    def reduce_coefficient(self, c):
        if self.p_exp is not None:
            return c % (self.bp.p ** self.p_exp)
        return c

    def kills(self, vexps):
        caps = self.caps_by_slot()
        return any(vexps[i] >= cap for i, cap in caps.items())

    def describe(self):
        parts = []
        if self.rational:
            parts.append("p^-1")
        if self.p_exp is not None:
            parts.append(f"p^{self.p_exp}")
        for i, cap in sorted(self.v_caps.items()):
            parts.append(f"v{i}^{cap}")
        body = ",".join(parts)
        return f"BP/({body})" if (self.p_exp is not None or self.v_caps) else (
            "p^-1 BP" if self.rational else "BP")


class BPCobar:
    """Reduced cobar complex of a cyclic BP comodule stage.

    Basis of C^s in internal degree T: (tm_1, ..., tm_s; mu) with each
    tm_i a nonzero t-monomial and mu a module monomial.  Differentials
    are integer matrices; torsion is imposed through relation columns.
    """

    def __init__(self, module):
        self.module = module
        self.bp = module.bp
        self._basis = {}
        self._columns = {}

    def basis(self, s, T):
        key = (s, T)
        if key in self._basis:
            return self._basis[key]
        bp = self.bp
        out = []

        def build(slots_left, remaining, prefix):
            if slots_left == 0:
                for mu in self.module.module_basis(remaining):
                    out.append((tuple(prefix), mu))
                return
            for d in range(2, remaining + 1, 2):
                for tm in bp.t_monomials(d):
                    if any(tm):
                        build(slots_left - 1, remaining - d, prefix + [tm])

        if T >= 0:
            build(s, T, [])
        out.sort()
        self._basis[key] = out
        return out

    def push_right(self, coeff_vexps, slots, mu):
        """Element eta_L(v^coeff) slot_1 (x) ... (x) slot_k (x) mu in basis
        form: list of (slots', mu', integer)."""
        bp = self.bp
        results = []

        def rec(c_vex, idx, cur_slots, scale):
            if not any(c_vex):
                results.append((tuple(cur_slots) + tuple(slots[idx:]), mu,
                                scale))
                return
            if idx == len(slots):
                mu2 = _mon_add(c_vex, mu)
                if not self.module.kills(mu2):
                    results.append((tuple(cur_slots), mu2, scale))
                return
            shifted = {(tuple(c_vex), slots[idx]): 1}
            for tex, vd in bp.right_expand(shifted).items():
                for vres, c in vd.items():
                    rec(vres, idx + 1, cur_slots + [tex], scale * c)

        rec(tuple(coeff_vexps), 0, [], 1)
        merged = {}
        for slots2, mu2, c in results:
            if any(not any(t) for t in slots2):
                continue  # a slot collapsed to 1: dies in the reduced complex
            key = (slots2, mu2)
            merged[key] = merged.get(key, 0) + c
        return [(k[0], k[1], c) for k, c in merged.items() if c]

    def differential_element(self, slots, mu):
        """d(slots; mu) as dict basis-key -> int in C^{s+1}."""
        bp = self.bp
        s = len(slots)
        out = {}

        def add(slots2, mu2, c):
            if self.module.kills(mu2):
                return
            c = self.module.reduce_coefficient(c)
            if not c:
                return
            key = (tuple(slots2), mu2)
            out[key] = out.get(key, 0) + c

        # interior terms: reduced coproduct in slot i, sign (-1)^i
        for i in range(s):
            sign = -1 if (i + 1) % 2 else 1
            for (v, u1, u2), c in bp.delta_reduced(slots[i]).items():
                # coefficient v sits left of u1: push right through
                # (u1, u2, remaining slots) into the module
                tail = [u1, u2] + list(slots[i + 1:])
                for slots2, mu2, c2 in self.push_right(v, tail, mu):
                    add(tuple(slots[:i]) + slots2, mu2, sign * c * c2)
        # module term: sign (-1)^{s+1}
        sign = -1 if (s + 1) % 2 else 1
        eta = bp.eta_R_monomial(mu)
        zero_t = (0,) * bp.m
        for tex, vd in bp.right_expand(eta).items():
            if tex == zero_t:
                continue  # the 1 (x) mu part of psi is removed
            for vres, c in vd.items():
                if self.module.kills(vres):
                    continue
                add(tuple(slots) + (tex,), vres, sign * c)
        return {k: v for k, v in out.items() if v}

    def differential_columns(self, s, T):
        key = (s, T)
        if key in self._columns:
            return self._columns[key]
        src = self.basis(s, T)
        tgt = self.basis(s + 1, T)
        tgt_index = {b: i for i, b in enumerate(tgt)}
        cols = []
        for slots, mu in src:
            col = [0] * len(tgt)
            for (slots2, mu2), c in self.differential_element(slots, mu).items():
                col[tgt_index[(slots2, mu2)]] += c
            cols.append(col)
        self._columns[key] = cols
        return cols

    def relation_columns(self, s, T):
        if self.module.p_exp is None or self.module.rational:
            return []
        q = self.bp.p ** self.module.p_exp
        n = len(self.basis(s, T))
        cols = []
        for i in range(n):
            col = [0] * n
            col[i] = q
            cols.append(col)
        return cols

    def cohomology(self, s, T):
        """H^{s,T} as (p-torsion orders, free rank) via Smith forms, or
        dimension over Q in rational mode."""
        if self.module.rational:
            return self._cohomology_rational(s, T)
        n_prev = len(self.basis(s - 1, T)) if s >= 1 else 0
        n_this = len(self.basis(s, T))
        n_next = len(self.basis(s + 1, T))
        d_prev = self.differential_columns(s - 1, T) if s >= 1 else []
        d_this = self.differential_columns(s, T)
        torsion, free = homology_of_presented_complex(
            d_prev, d_this, self.relation_columns(s, T),
            self.relation_columns(s + 1, T), n_prev, n_this, n_next)
        p = self.bp.p
        torsion_p = sorted(
            (p_part(d, p) for d in torsion if p_part(d, p) > 1))
        return torsion_p, free

    def _cohomology_rational(self, s, T):
        from .rings import Rationals
        Q = Rationals()
        n_this = len(self.basis(s, T))
        if n_this == 0:
            return [], 0
        rows_this = [[Fraction(x) for x in col]
                     for col in self.differential_columns(s, T)]
        n_next = len(self.basis(s + 1, T))
        rank_this = 0
        if n_next and rows_this:
            space = FieldRowSpace(Q, n_next)
            for row in rows_this:
                space.insert(row)
            rank_this = space.rank
        rank_prev = 0
        if s >= 1:
            n_prevb = len(self.basis(s - 1, T))
            if n_prevb:
                space = FieldRowSpace(Q, n_this)
                for col in self.differential_columns(s - 1, T):
                    space.insert([Fraction(x) for x in col])
                rank_prev = space.rank
        return [], n_this - rank_this - rank_prev

    def class_order(self, s, T, vector):
        """Order p^a of a cocycle's class in H^{s,T} (1 if trivial;
        None if not p-power torsion)."""
        n_this = len(self.basis(s, T))
        d_this = self.differential_columns(s, T)
        n_next = len(self.basis(s + 1, T))
        # verify cocycle
        img = [0] * n_next
        for j, c in enumerate(vector):
            if c:
                for i in range(n_next):
                    img[i] += c * d_this[j][i]
        rel_next = self.relation_columns(s + 1, T)
        if any(img):
            ok = False
            if rel_next:
                q = self.bp.p ** self.module.p_exp
                ok = all(x % q == 0 for x in img)
            if not ok:
                raise ValueError("input is not a cocycle")
        sub = (self.differential_columns(s - 1, T) if s >= 1 else []) + \
            self.relation_columns(s, T)
        if not sub:
            return None if any(vector) else 1
        A = [[col[i] for col in sub] for i in range(n_this)]
        snf = smith_normal_form(A)
        p = self.bp.p
        for a in range(0, 40):
            target = [x * p**a for x in vector]
            if integer_solve(snf, target) is not None:
                return p**a
        return None


def bp_structure(p, D):
    """Construct and verify the BP presentation in the degree window."""
    return BPPresentation(p, D)


def cobar_cohomology_bp(module, s_max, t_values):
    """Bigraded abelian-group chart of the cobar cohomology of a stage."""
    cobar = BPCobar(module)
    cells = {}
    for T in t_values:
        for s in range(s_max + 1):
            cells[(s, T)] = cobar.cohomology(s, T)
    return cells


def cobar_cohomology_colimit(make_module, s, T, start_exp, max_exp=8):
    """Cohomology of a colimit of stages, raising the stage until the
    answer is stable under one further increase.  Returns
    ((torsion, free), certificate)."""
    prev = None
    for e in range(start_exp, max_exp + 1):
        cur = BPCobar(make_module(e)).cohomology(s, T)
        if prev is not None and cur == prev:
            return cur, {"stable_at": e - 1, "verified_next": e}
        prev = cur
    raise StageNotStable(
        f"no stabilization through stage exponent {max_exp}")


# ---------------------------------------------------------------------------
# Chromatic short exact sequences and Greek letters
# ---------------------------------------------------------------------------

def f_shift(n, p):
    """f(1) = 0, f(n) = 2(p-1) + ... + 2(p^{n-1}-1)."""
    return sum(2 * (p**i - 1) for i in range(1, n))


def greek_degree(n, k, p):
    """Internal degree of the k-th element of the n-th family."""
    return 2 * k * (p**n - 1) - f_shift(n, p)


def connecting_delta_p_family(bp, numerator, e):
    """Connecting map for 0 -> BP -> p^{-1}BP -> BP/p^inf -> 0 on an
    H^0 class of the quotient presented as numerator / p^e.

    numerator is a dict vexps -> int; returns the C^1(BP) cocycle
    psi-bar(numerator)/p^e as a dict (texps, vexps) -> int, or raises if
    the class is not primitive at this stage.
    """
    out = {}
    zero_t = (0,) * bp.m
    q = bp.p ** e
    for vex, c in numerator.items():
        for tex, vd in bp.right_expand(bp.eta_R_monomial(vex)).items():
            if tex == zero_t:
                continue
            for vres, c2 in vd.items():
                key = (tex, vres)
                out[key] = out.get(key, 0) + c * c2
    for key, val in list(out.items()):
        if val % q:
            raise ValueError(
                f"input is not primitive at stage p^{e}: term {key}")
        out[key] = val // q
    return {k: v for k, v in out.items() if v}


class GreekLetterElement:
    def __init__(self, family, params, degree, order, cocycle=None,
                 certificate=None):
        self.family = family
        self.params = params
        self.degree = degree
        self.order = order
        self.cocycle = cocycle
        self.certificate = certificate or {}

    def to_json_dict(self):
        return {"family": self.family, "params": self.params,
                "degree": self.degree, "order": self.order,
                "certificate": self.certificate}

    def __repr__(self):
        return (f"{self.family}({self.params}) degree {self.degree} "
                f"order {self.order}")


def alpha_family(bp, k, h1_check=True):
    """The k-th element of the first family at an odd prime:
    the H^0(BP/p^inf) generator v1^k / p^{r+1} (primitive on the nose
    with these generators), its connecting image in H^1(BP), and the
    order p^{r+1} where k = p^r k0.
    """
    p = bp.p
    if p < 3:
        raise ValueError("first-family machinery runs at odd primes")
    T = 2 * k * (p - 1)
    if T > bp.D:
        raise ValueError(f"degree {T} outside window {bp.D}")
    r = 0
    kk = k
    while kk % p == 0:
        kk //= p
        r += 1
    numerator = {tuple([k] + [0] * (bp.m - 1)): 1}
    cocycle = connecting_delta_p_family(bp, numerator, r + 1)
    certificate = {"k": k, "r": r, "stage": r + 1}
    # order of the H^0 colimit group, stabilized over stages
    def make_module(e):
        return ComodulePresentation(bp, p_exp=e)
    (torsion, free), stab = cobar_cohomology_colimit(
        make_module, 0, T, start_exp=r + 1, max_exp=r + 3)
    if free or len(torsion) != 1:
        raise ArithmeticError(
            f"H^0(BP/p^inf) at degree {T} is {(torsion, free)}")
    certificate.update(stab)
    order_h0 = torsion[0]
    if h1_check:
        # order of the image class in H^1(BP)
        module = ComodulePresentation(bp)
        cobar = BPCobar(module)
        basis1 = cobar.basis(1, T)
        index = {b: i for i, b in enumerate(basis1)}
        vec = [0] * len(basis1)
        for (tex, vex), c in cocycle.items():
            vec[index[((tex,), vex)]] += c
        order_h1 = cobar.class_order(1, T, vec)
        certificate["h1_order"] = order_h1
        if order_h1 != order_h0:
            raise ArithmeticError(
                f"H^0 order {order_h0} vs delta-image order {order_h1}")
    return GreekLetterElement("alpha", {"k": k, "r": r}, T, order_h0,
                              cocycle=cocycle, certificate=certificate)


# ---------------------------------------------------------------------------
# v1-Bockstein engine (mod p machinery)
# ---------------------------------------------------------------------------

class ModPStructure:
    """eta_R and psi-bar mod p, on polynomials in v1, v2 (window m >= 2)."""

    def __init__(self, bp):
        self.bp = bp
        self.p = bp.p
        self.m = bp.m

    def eta_r_mod_p(self, vexps):
        p = self.p
        out = {}
        for (vex, tex), c in self.bp.eta_R_monomial(vexps).items():
            c %= p
            if c:
                key = (vex, tex)
                out[key] = (out.get(key, 0) + c) % p
        return {k: v for k, v in out.items() if v}

    def psi_bar_mod_p(self, poly):
        """psi-bar of a v-polynomial (dict vexps -> int), mod p;
        returns dict (vexps, texps) -> int with texps != 0."""
        p = self.p
        zero_t = (0,) * self.m
        out = {}
        for vex, c in poly.items():
            for (v2, t2), c2 in self.eta_r_mod_p(vex).items():
                if t2 == zero_t:
                    continue
                key = (v2, t2)
                out[key] = (out.get(key, 0) + c * c2) % p
        return {k: v for k, v in out.items() if v}


def _v1_valuation(terms):
    """Largest j with every term divisible by v1^j (None for zero)."""
    if not terms:
        return None
    return min(key[0][0] for key in terms)


def _strip_v1(terms, j):
    out = {}
    for (vex, tex), c in terms.items():
        vex2 = (vex[0] - j,) + vex[1:]
        out[(vex2, tex)] = c
    return out


def _solve_bockstein_correction(engine, W, deg_W, b):
    """Find a mod-p v-polynomial z with psi-bar(z) = v1^b (W + O(v1)),
    or None.  z ranges over all v-monomials of degree deg_W + b|v1|."""
    bp = engine.bp
    p = engine.p
    deg_z = deg_W + b * bp.gen_degrees[0]
    candidates = bp.v_monomials(deg_z)
    if not candidates:
        return None
    # constraint keys: psi-bar terms with v1-exponent <= b
    field = PrimeField(p)
    keys = set()
    profiles = []
    for mu in candidates:
        prof = {}
        for (vex, tex), c in engine.psi_bar_mod_p({mu: 1}).items():
            if vex[0] <= b:
                prof[(vex, tex)] = c % p
        profiles.append(prof)
        keys.update(prof)
    target = {}
    for (vex, tex), c in W.items():
        key = ((b,) + vex[1:], tex)
        target[key] = c % p
    keys.update(target)
    keys = sorted(keys)
    key_index = {k: i for i, k in enumerate(keys)}
    width = len(keys)
    space = FieldRowSpace(field, width)
    for idx, prof in enumerate(profiles):
        row = [0] * width
        for k, c in prof.items():
            row[key_index[k]] = c
        space.insert(row, {idx: 1})
    trow = [0] * width
    for k, c in target.items():
        trow[key_index[k]] = c
    residual, tag = space.reduce(trow)
    if space.leading(residual) is not None:
        return None
    z = {}
    for idx, coeff in tag.items():
        c = (-coeff) % p
        if c:
            mu = candidates[idx]
            z[mu] = (z.get(mu, 0) + c) % p
    return {k: v for k, v in z.items() if v}


def sigma_n_reduce(texps_coeff_terms, p, n=2):
    """Rewrite t1-exponents through t1^{p^n} = v_n^{p^{1}-1}... for the
    height-2 quotient: t1^{p^2} -> v2^{p-1} t1.  Terms are
    dict (vexps, texps) -> coeff with only t1 present."""
    out = {}
    for (vex, tex), c in texps_coeff_terms.items():
        e = tex[0]
        v2_extra = 0
        while e >= p**2:
            e = e - p**2 + 1
            v2_extra += p - 1
        vex2 = (vex[0], vex[1] + v2_extra) + vex[2:]
        tex2 = (e,) + tex[1:]
        key = (vex2, tex2)
        out[key] = (out.get(key, 0) + c) % p
    return {k: v for k, v in out.items() if v}


class BocksteinResult:
    def __init__(self, step, value_terms, named, representative, corrections):
        self.step = step
        self.value_terms = value_terms
        self.named = named  # list of (coeff, v2_exp, h_index)
        self.representative = representative
        self.corrections = corrections

    def __repr__(self):
        body = " + ".join(f"{c}*v2^{a}*h{b}" for c, a, b in self.named)
        return f"d^{self.step} = {body or '0'}"


def v1_bockstein(bp, s, budget=None):
    """First nonvanishing v1-Bockstein differential on v2^s in the tower
    of BP/(p, v1^e) stages.

    Maintains a corrected representative x = v2^s + v1(...) whose
    reduced coaction vanishes mod v1^j.  When the step-j obstruction W is
    hit by an earlier differential -- some z has psi-bar(z) =
    v1^b (W + O(v1)) with b < j -- greedily correct x by v1^{j-b} z to
    push divisibility one step further; otherwise (j, W) is the answer.
    Everything is exact mod-p polynomial algebra.
    """
    p = bp.p
    if bp.m < 2:
        raise ValueError("window must include v2")
    budget = budget or (p**2 + p)
    engine = ModPStructure(bp)
    x = {tuple([0, s] + [0] * (bp.m - 2)): 1}
    deg_x = bp.degree_v(next(iter(x)))
    corrections = []
    j = 1
    while j <= budget:
        psi = engine.psi_bar_mod_p(x)
        val = _v1_valuation(psi)
        if val is None:
            raise BudgetExhausted(
                f"coaction of the corrected class vanished below v1^{budget}")
        if val < j:
            raise ArithmeticError("lost divisibility during correction")
        if val > j:
            j = val
            continue
        # obstruction: [psi / v1^j mod v1] in H^1 of the mod-(p, v1) stage
        obs = {k: c for k, c in _strip_v1(psi, j).items() if k[0][0] == 0}
        obs = {k: c % p for k, c in obs.items() if c % p}
        if not obs:
            j += 1
            continue
        deg_W = deg_x - j * bp.gen_degrees[0]
        corrected = False
        for b in range(1, j):
            z = _solve_bockstein_correction(engine, obs, deg_W, b)
            if z:
                shift = tuple([j - b] + [0] * (bp.m - 1))
                for mu, c in z.items():
                    key = _mon_add(mu, shift)
                    x[key] = (x.get(key, 0) - c) % p
                x = {k: v for k, v in x.items() if v}
                corrections.append({"step": j, "order": b, "terms": len(z)})
                corrected = True
                break
        if corrected:
            continue
        # direct coboundaries vanish (v2-powers are primitive mod I_2), so
        # a non-correctable obstruction is a nonzero class; name it through
        # the height-2 relation t1^{p^2} = v2^{p-1} t1
        named_terms = sigma_n_reduce(obs, p)
        named = []
        for (vex, tex), c in sorted(named_terms.items()):
            e = tex[0]
            if e == 1 and not any(tex[1:]):
                named.append((c, vex[1], 0))
            elif e == p and not any(tex[1:]):
                named.append((c, vex[1], 1))
            else:
                named.append((c, vex[1], ("t", tex)))
        return BocksteinResult(j, obs, named, x, corrections)
    raise BudgetExhausted(f"no nonzero differential within budget {budget}")


def x_element(bp, i, budget=None):
    """Search for the corrected representative of v2^{p^i} that
    maximizes v1-divisibility of the Bockstein image; returns
    (BocksteinResult, achieved divisibility step)."""
    s = bp.p ** i
    budget = budget or (a_sequence(bp.p, i) + bp.p)
    result = v1_bockstein(bp, s, budget=budget)
    return result, result.step


def a_sequence(p, i):
    """a_0 = 1, a_i = p^i + p^{i-1} - 1 for i >= 1."""
    return 1 if i == 0 else p**i + p ** (i - 1) - 1


def beta_enumerate(p, s_max):
    """Second-family bookkeeping: all surviving beta_{s/j,k} with
    1 <= s <= s_max, with constraint certificates.

    Verbatim window constraints assign each j in (a_{i-k-1}, a_{i-k}]
    with p^k | j; the flagged low-end cases (j = 1 at i >= 1, where the
    windows exclude an element whose order-p part exists by the
    divisibility oracle) are emitted with the maximal k satisfying
    p^k | j and j <= a_{i-k}, marked in the certificate.
    """
    if p < 5:
        note = "enumerator hypotheses stated for p >= 5; running anyway"
    else:
        note = None
    out = []
    for s in range(1, s_max + 1):
        i = 0
        s0 = s
        while s0 % p == 0:
            s0 //= p
            i += 1
        ai = a_sequence(p, i)
        for j in range(1, ai + 1):
            # verbatim window: the unique k with a_{i-k-1} < j <= a_{i-k}
            k_window = None
            for k in range(0, i + 1):
                lo = a_sequence(p, i - k - 1) if i - k - 1 >= 0 else 0
                hi = a_sequence(p, i - k)
                if lo < j <= hi:
                    k_window = k
                    break
            flagged = False
            if k_window is not None and j % (p**k_window) == 0:
                k = k_window
            else:
                # resolved by maximal divisibility (order-p part certified
                # by the v1-divisibility oracle when j <= a_i)
                k = max(kk for kk in range(0, i + 1)
                        if j % (p**kk) == 0 and j <= a_sequence(p, i - kk))
                flagged = True
            # the exclusion list: x_i / p v1^j for i >= 2, p^i < j <= a_i
            if k == 0 and i >= 2 and p**i < j <= ai:
                continue
            cert = {"s": s, "s0": s0, "i": i, "j": j, "k": k,
                    "a_i": ai, "window_constraint": not flagged}
            if flagged:
                cert["resolution"] = "max-divisibility reading"
            if note:
                cert["prime_note"] = note
            degree = 2 * s * (p**2 - 1) - 2 * j * (p - 1)
            out.append(GreekLetterElement(
                "beta", {"s": s, "j": j, "k": k}, degree, p ** (k + 1),
                certificate=cert))
    return out


def chromatic_e1_layout(bp, q_max=2, k_max=6):
    """The first-page layout of the chromatic filtration: column n holds
    H^q of the n-th localized tower stage.  Columns 0 and 1 are filled
    from computations, column 2 from the second-family bookkeeping,
    higher columns are marked symbolic."""
    p = bp.p
    table = {"prime": p, "columns": []}
    # column 0: rationalized BP
    module = ComodulePresentation(bp, rational=True)
    cobar = BPCobar(module)
    degs = sorted({0} | {2 * k * (p - 1) for k in range(1, 4)})
    cells = []
    for T in degs:
        for q in range(q_max + 1):
            _, free = cobar.cohomology(q, T)
            if free or (q == 0 and T == 0):
                cells.append({"q": q, "t": T, "value":
                              "Q" if free == 1 else f"Q^{free}"})
    table["columns"].append({"n": 0, "cells": cells, "status": "computed"})
    # column 1: orders from the first-family tower
    cells = []
    for k in range(1, k_max + 1):
        r = 0
        kk = k
        while kk % p == 0:
            kk //= p
            r += 1
        T = 2 * k * (p - 1)
        value = f"Z/{p**(r + 1)}"
        cells.append({"q": 0, "t": T, "value": value})
    table["columns"].append({"n": 1, "cells": cells, "status": "computed"})
    # column 2: beta bookkeeping
    cells = []
    for el in beta_enumerate(p, min(k_max, p + 1)):
        cells.append({"q": 0, "t": el.degree,
                      "value": f"Z/{el.order}",
                      "params": el.params})
    table["columns"].append({"n": 2, "cells": cells, "status": "computed"})
    for n in range(3, 5):
        table["columns"].append({"n": n, "cells": [], "status": "symbolic"})
    return table


# ---------------------------------------------------------------------------
# localization of torsion comodules
# ---------------------------------------------------------------------------

class LocalizedComodule:
    """v_n^{-1} M for an I_n-torsion stage M, with the structure map
    computed through the geometric expansion of (1 - f/v_n)^{-k},
    f = v_n - eta_R(v_n); the expansion terminates because f lies in
    I_n Gamma and the stage is I_n-torsion."""

    def __init__(self, bp, module, n):
        if module.p_exp is None:
            raise NotTorsion("localization needs an I_n-torsion stage")
        for i in range(1, n):
            if i not in module.v_caps:
                raise NotTorsion(f"stage is not v{i}-torsion")
        self.bp = bp
        self.module = module
        self.n = n
        # f = v_n - eta_R(v_n) in left form
        vn = tuple(1 if i == n - 1 else 0 for i in range(bp.m))
        f = {}
        for (vex, tex), c in bp.eta_R_monomial(vn).items():
            f[(vex, tex)] = -c
        f[(vn, (0,) * bp.m)] = f.get((vn, (0,) * bp.m), 0) + 1
        self.f = {k: v for k, v in f.items() if v}

    def _reduce_terms(self, terms):
        out = {}
        q = self.bp.p ** self.module.p_exp
        caps = self.module.caps_by_slot()
        for key, c in terms.items():
            vex = key[0]
            if any(vex[i] >= cap for i, cap in caps.items()):
                continue
            c %= q
            if c:
                out[key] = c
        return out

    def psi(self, numerator, k, expansion_cap=40):
        """Structure map on numerator / v_n^k.

        Returns (terms, expansion_length): terms maps
        (texps, vexps, denominator_exponent) -> int, denominator a power
        of v_n.  psi(m/v^k) = sum_j C(k+j-1, j) f^j psi_M(m) / v^{k+j}.
        """
        bp = self.bp
        q = bp.p ** self.module.p_exp
        # running left-form product f^j * eta_R(m)
        current = {}
        for vex, c in numerator.items():
            for key, c2 in bp.eta_R_monomial(vex).items():
                current[key] = (current.get(key, 0) + c * c2) % q
        current = {kk: v for kk, v in current.items() if v}
        terms = {}
        length = 0
        for j in range(expansion_cap + 1):
            coeff = comb(k + j - 1, j) if j else 1
            contrib = {}
            for (vex, tex), c in current.items():
                c2 = (c * coeff) % q
                if c2:
                    contrib[(vex, tex)] = c2
            # convert to slot form and reduce by the module truncations
            live = False
            for (vex, tex), c in contrib.items():
                for tex2, vd in bp.right_expand({(vex, tex): 1}).items():
                    for vres, c2 in vd.items():
                        key = (tex2, vres, k + j)
                        val = (terms.get(key, 0) + c * c2)
                        terms[key] = val
            terms = self._reduce_terms(terms)
            if contrib:
                length = j + 1
            # next power of f
            nxt = {}
            for (v1e, t1e), c1 in current.items():
                for (v2e, t2e), c2 in self.f.items():
                    key = (_mon_add(v1e, v2e), _mon_add(t1e, t2e))
                    nxt[key] = (nxt.get(key, 0) + c1 * c2) % q
            current = {kk: v for kk, v in nxt.items() if v}
            # drop terms annihilated by the torsion truncations
            caps = self.module.caps_by_slot()
            current = {kk: v for kk, v in current.items()
                       if not any(kk[0][i] >= cap for i, cap in caps.items())}
            if not current:
                return terms, length
        raise BudgetExhausted("geometric expansion did not terminate")
