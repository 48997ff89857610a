"""Mod-2 Steenrod algebra and Adams E2 charts.

Two deliberately different presentations drive two independent
computations of Ext over the Steenrod algebra:

  * minimal free resolutions in the admissible-monomial basis, and
  * the reduced cobar complex of the Milnor dual.

Their chart dimensions agreeing across a window is the main internal
cross-check.  Massey products, the vanishing-line verifier and the
chart naming conventions live here too.

Conventions: an admissible monomial is a tuple (i_1, ..., i_k) with
i_j >= 2 i_{j+1}; a dual monomial is an exponent tuple (e_1, e_2, ...)
for xi_1, xi_2, ... with trailing zeros stripped.  Cochains are kept as
frozensets (mod-2 sums) of basis elements, and linear algebra runs on
bitmask rows.  Everything is pure and deterministic: bidegrees are
independent problems, safe to compute in any order.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

from .chart import BigradedChart
from .linalg import GF2RowSpace, gf2_left_kernel

MAX_COBAR_BASIS = 40000


class ResourceCeiling(RuntimeError):
    pass


class ProductsNotZero(ValueError):
    """Massey product preconditions [x][y] = [y][z] = 0 fail."""


# ---------------------------------------------------------------------------
# Admissible-basis Steenrod algebra
# ---------------------------------------------------------------------------

def is_admissible(word):
    return all(word[i] >= 2 * word[i + 1] for i in range(len(word) - 1))


@lru_cache(maxsize=None)
def adem_reduce_word(word):
    """Admissible-basis normal form of Sq^{i_1}...Sq^{i_k} (frozenset of
    admissible tuples, empty set meaning 0)."""
    word = tuple(word)
    if 0 in word:
        word = tuple(i for i in word if i != 0)
    for idx in range(len(word) - 1):
        a, b = word[idx], word[idx + 1]
        if a < 2 * b:
            acc = set()
            for c in range(a // 2 + 1):
                if comb(b - c - 1, a - 2 * c) & 1:
                    mid = (a + b,) if c == 0 else (a + b - c, c)
                    rewritten = word[:idx] + mid + word[idx + 2:]
                    acc ^= adem_reduce_word(rewritten)
            return frozenset(acc)
    return frozenset([word])


def adem_reduce(terms):
    """Normal form of a formal F_2-sum of Sq words."""
    if isinstance(terms, tuple):
        terms = [terms]
    out = set()
    for word in terms:
        out ^= adem_reduce_word(tuple(word))
    return frozenset(out)


@lru_cache(maxsize=None)
def admissible_basis(degree):
    """Admissible monomials of the given degree, sorted."""
    if degree == 0:
        return ((),)
    out = []

    def build(remaining, max_lead, prefix):
        # next entry i must satisfy i >= 2 * (next one); build left to right:
        # choose leading i, then the tail is admissible with lead <= i // 2
        for i in range(remaining, 0, -1):
            if i > max_lead:
                continue
            if i == remaining:
                out.append(prefix + (i,))
            else:
                build(remaining - i, i // 2, prefix + (i,))

    build(degree, degree, ())
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def steenrod_product(m1, m2):
    """Product of two admissible monomials in the admissible basis."""
    return adem_reduce_word(m1 + m2)


# ---------------------------------------------------------------------------
# Milnor dual
# ---------------------------------------------------------------------------

def xi_degree(mon):
    return sum(e * (2 ** (k + 1) - 1) for k, e in enumerate(mon))


@lru_cache(maxsize=None)
def xi_monomials(degree, max_index=None):
    """Exponent tuples of total degree `degree` (trailing zeros stripped)."""
    if max_index is None:
        max_index = 1
        while 2 ** (max_index + 1) - 1 <= degree:
            max_index += 1
    if degree == 0:
        return ((),)
    out = []

    def build(remaining, idx, tail):
        # idx counts down; xi_idx has degree 2^idx - 1
        if idx == 0:
            return
        if idx == 1:
            out.append((remaining,) + tail)
            return
        d = 2**idx - 1
        for e in range(remaining // d, -1, -1):
            rest = remaining - e * d
            new_tail = ((e,) + tail) if (e or tail) else ()
            if rest == 0:
                if new_tail:
                    out.append((0,) * (idx - 1) + new_tail)
            else:
                build(rest, idx - 1, new_tail)

    build(degree, max_index, ())
    return tuple(sorted(out))


def _mon_mul(a, b):
    n = max(len(a), len(b))
    a = a + (0,) * (n - len(a))
    b = b + (0,) * (n - len(b))
    out = tuple(x + y for x, y in zip(a, b))
    while out and out[-1] == 0:
        out = out[:-1]
    return out


def _pairs_multiply(p1, p2):
    out = set()
    for a1, b1 in p1:
        for a2, b2 in p2:
            key = (_mon_mul(a1, a2), _mon_mul(b1, b2))
            out ^= {key}
    return frozenset(out)


def _pairs_square(p):
    # mod 2, squaring kills all cross terms
    return frozenset((_mon_mul(a, a), _mon_mul(b, b)) for a, b in p)


@lru_cache(maxsize=None)
def _delta_xi_power(n, e):
    """Delta(xi_n^e) as a frozenset of (mon, mon) pairs."""
    if n == 0 or e == 0:
        return frozenset([((), ())])
    if e == 1:
        pairs = set()
        for i in range(n + 1):
            left = () if i == n else tuple(
                [0] * (n - i - 1) + [2**i])
            right = () if i == 0 else tuple([0] * (i - 1) + [1])
            pairs.add((left, right))
        return frozenset(pairs)
    if e % 2 == 0:
        return _pairs_square(_delta_xi_power(n, e // 2))
    return _pairs_multiply(_delta_xi_power(n, e - 1), _delta_xi_power(n, 1))


@lru_cache(maxsize=None)
def milnor_diagonal(mon):
    """Coproduct of a dual monomial: frozenset of (mon, mon) pairs."""
    out = frozenset([((), ())])
    for k, e in enumerate(mon):
        if e:
            out = _pairs_multiply(out, _delta_xi_power(k + 1, e))
    return out


@lru_cache(maxsize=None)
def milnor_reduced_diagonal(mon):
    """Diagonal minus the two primitive-context terms (both factors
    in the augmentation ideal)."""
    return frozenset((a, b) for a, b in milnor_diagonal(mon) if a and b)


# ---------------------------------------------------------------------------
# Cobar complex of the dual (module = F_2)
# ---------------------------------------------------------------------------

class SteenrodCobar:
    """Reduced cobar complex over the Milnor dual with F_2 coefficients.

    Basis of C^{s,t}: s-tuples of nonunit dual monomials with degrees
    summing to t.  Cochains are frozensets of such tuples or bitmasks
    relative to the sorted basis.
    """

    def __init__(self, max_basis=MAX_COBAR_BASIS):
        self.max_basis = max_basis
        self._basis = {}
        self._index = {}
        self._rows = {}
        self._image_space = {}
        self._kernel = {}

    def basis(self, s, t):
        key = (s, t)
        if key in self._basis:
            return self._basis[key]
        if s == 0:
            items = [()] if t == 0 else []
        elif s == 1:
            items = [(m,) for m in xi_monomials(t)] if t >= 1 else []
        else:
            items = []
            for d in range(1, t - s + 2):
                for m in xi_monomials(d):
                    for rest in self.basis(s - 1, t - d):
                        items.append((m,) + rest)
        items.sort()
        if len(items) > self.max_basis:
            raise ResourceCeiling(
                f"cobar basis at (s={s}, t={t}) has {len(items)} elements "
                f"(ceiling {self.max_basis})")
        self._basis[key] = items
        self._index[key] = {b: i for i, b in enumerate(items)}
        return items

    def index(self, s, t):
        self.basis(s, t)
        return self._index[(s, t)]

    def to_mask(self, cochain, s, t):
        idx = self.index(s, t)
        mask = 0
        for b in cochain:
            mask ^= 1 << idx[b]
        return mask

    def from_mask(self, mask, s, t):
        basis = self.basis(s, t)
        out = set()
        i = 0
        while mask:
            if mask & 1:
                out.add(basis[i])
            mask >>= 1
            i += 1
        return frozenset(out)

    def diff_of_basis_element(self, elem):
        """d applied to one basis tuple: frozenset of (s+1)-tuples."""
        out = set()
        for i, m in enumerate(elem):
            for a, b in milnor_reduced_diagonal(m):
                out ^= {elem[:i] + (a, b) + elem[i + 1:]}
        return frozenset(out)

    def diff_rows(self, s, t):
        """Row i = d(basis_i) as a bitmask over the (s+1, t) basis."""
        key = (s, t)
        if key in self._rows:
            return self._rows[key]
        tgt = self.index(s + 1, t)
        rows = []
        for elem in self.basis(s, t):
            mask = 0
            for term in self.diff_of_basis_element(elem):
                mask ^= 1 << tgt[term]
            rows.append(mask)
        self._rows[key] = rows
        return rows

    def diff_mask(self, mask, s, t):
        rows = self.diff_rows(s, t)
        out = 0
        i = 0
        while mask:
            if mask & 1:
                out ^= rows[i]
            mask >>= 1
            i += 1
        return out

    def rank(self, s, t):
        space = GF2RowSpace()
        for r in self.diff_rows(s, t):
            space.insert(r)
        return space.rank

    def dim_h(self, s, t):
        """dim H^{s,t} by rank-nullity."""
        n = len(self.basis(s, t))
        if n == 0:
            return 0
        r_out = self.rank(s, t)
        r_in = self.rank(s - 1, t) if s >= 1 else 0
        return n - r_out - r_in

    # -- class-level machinery -------------------------------------------
    def image_space(self, s, t):
        """Echelon space of coboundaries inside C^{s,t}."""
        key = (s, t)
        if key in self._image_space:
            return self._image_space[key]
        space = GF2RowSpace()
        if s >= 1:
            for r in self.diff_rows(s - 1, t):
                space.insert(r)
        self._image_space[key] = space
        return space

    def kernel_masks(self, s, t):
        """Cocycle subspace basis as bitmasks over the (s,t) basis."""
        key = (s, t)
        if key in self._kernel:
            return self._kernel[key]
        ker = gf2_left_kernel(self.diff_rows(s, t))
        self._kernel[key] = ker
        return ker

    def is_cocycle(self, cochain, s, t):
        return self.diff_mask(self.to_mask(cochain, s, t), s, t) == 0

    def class_reduce(self, mask, s, t):
        """Canonical representative of the class of a cocycle."""
        residual, _ = self.image_space(s, t).reduce(mask)
        return residual

    def classes_basis(self, s, t):
        """Canonical masks representing a basis of H^{s,t}."""
        img = self.image_space(s, t)
        reps = []
        span = GF2RowSpace()
        for pvt in sorted(img.pivots):
            span.insert(img.pivots[pvt][0])
        for kmask in self.kernel_masks(s, t):
            residual, _ = span.insert(kmask)
            if residual:
                reps.append(self.class_reduce(kmask, s, t))
        return reps

    def solve_coboundary(self, target_mask, s, t):
        """u in C^{s-1,t} with d(u) = target, or None."""
        rows = self.diff_rows(s - 1, t)
        space = GF2RowSpace()
        for i, r in enumerate(rows):
            space.insert(r, 1 << i)
        residual, tag = space.reduce(target_mask)
        return None if residual else tag

    def product_cochain(self, a, b):
        """Concatenation product of cochains (tuples of dual monomials)."""
        out = set()
        for x in a:
            for y in b:
                out ^= {x + y}
        return frozenset(out)

    def massey_product(self, x, y, z, rng=None):
        """<x, y, z> with its indeterminacy.

        x, y, z are (cochain, s, t) triples of cocycles with [x][y] = 0
        and [y][z] = 0.  Returns (representative cochain, (s, t), list of
        indeterminacy class masks).  Raises ProductsNotZero otherwise.
        """
        (cx, sx, tx), (cy, sy, ty), (cz, sz, tz) = x, y, z
        for c, s, t, nm in ((cx, sx, tx, "x"), (cy, sy, ty, "y"),
                            (cz, sz, tz, "z")):
            if not self.is_cocycle(c, s, t):
                raise ValueError(f"{nm} is not a cocycle")
        xy = self.product_cochain(cx, cy)
        xy_mask = self.to_mask(xy, sx + sy, tx + ty)
        if self.class_reduce(xy_mask, sx + sy, tx + ty):
            raise ProductsNotZero("[x][y] is nonzero")
        yz = self.product_cochain(cy, cz)
        yz_mask = self.to_mask(yz, sy + sz, ty + tz)
        if self.class_reduce(yz_mask, sy + sz, ty + tz):
            raise ProductsNotZero("[y][z] is nonzero")
        u_tag = self.solve_coboundary(xy_mask, sx + sy, tx + ty)
        v_tag = self.solve_coboundary(yz_mask, sy + sz, ty + tz)
        u = self.from_mask(u_tag, sx + sy - 1, tx + ty)
        v = self.from_mask(v_tag, sy + sz - 1, ty + tz)
        if rng is not None:
            u = self._randomize_solution(u, sx + sy - 1, tx + ty, rng)
            v = self._randomize_solution(v, sy + sz - 1, ty + tz, rng)
        s_out = sx + sy + sz - 1
        t_out = tx + ty + tz
        w = self.product_cochain(u, cz) ^ self.product_cochain(cx, v)
        w = frozenset(w)
        assert self.is_cocycle(w, s_out, t_out)
        indet = self.indeterminacy(x, z, sy, ty)
        return w, (s_out, t_out), indet

    def _randomize_solution(self, u, s, t, rng):
        out = self.to_mask(u, s, t)
        for kmask in self.kernel_masks(s, t):
            if rng.random() < 0.5:
                out ^= kmask
        return self.from_mask(out, s, t)

    def indeterminacy(self, x, z, sy, ty):
        """Span of x * H^{sy+sz-1, ty+tz} + H^{sx+sy-1, tx+ty} * z, as
        canonical class masks in the bracket's bidegree."""
        (cx, sx, tx), (cz, sz, tz) = x, z
        s_out = sx + sy + sz - 1
        t_out = tx + ty + tz
        span = GF2RowSpace()
        reps = []
        for hmask in self.classes_basis(sy + sz - 1, ty + tz):
            h = self.from_mask(hmask, sy + sz - 1, ty + tz)
            w = self.product_cochain(cx, h)
            red = self.class_reduce(self.to_mask(w, s_out, t_out), s_out, t_out)
            if red:
                residual, _ = span.insert(red)
                if residual:
                    reps.append(red)
        for hmask in self.classes_basis(sx + sy - 1, tx + ty):
            h = self.from_mask(hmask, sx + sy - 1, tx + ty)
            w = self.product_cochain(h, cz)
            red = self.class_reduce(self.to_mask(w, s_out, t_out), s_out, t_out)
            if red:
                residual, _ = span.insert(red)
                if residual:
                    reps.append(red)
        return reps

    def classes_equal_mod_indet(self, mask_a, mask_b, indet, s, t):
        diff = self.class_reduce(mask_a ^ mask_b, s, t)
        space = GF2RowSpace()
        for r in indet:
            space.insert(r)
        return space.contains(diff)

    # -- named classes -----------------------------------------------------
    def h_class(self, i):
        """h_i as the cobar cocycle [xi_1^{2^i}] in bidegree (1, 2^i)."""
        mon = (2**i,)
        return (frozenset([(mon,)]), 1, 2**i)


def periodicity_operator(cobar, x, n=2):
    """<x, h_0^{2^n}, h_{n+1}>: the chart periodicity operator as a
    Massey product special case (default the classical <-, h_0^4, h_3>)."""
    h0 = cobar.h_class(0)
    cochain = h0[0]
    for _ in range(2**n - 1):
        cochain = cobar.product_cochain(cochain, h0[0])
    mid = (cochain, 2**n, 2**n)
    hn1 = cobar.h_class(n + 1)
    return cobar.massey_product(x, mid, hn1)


def cobar_cohomology(s_max, t_max, max_basis=MAX_COBAR_BASIS,
                     with_products=True):
    """Adams E2 chart from the reduced cobar complex of the dual.

    Computes dim H^{s,t} for 0 <= s <= s_max, 0 <= t <= t_max, names the
    one-line classes h_i at (1, 2^i), and records products of named
    generators when with_products is set.
    """
    cobar = SteenrodCobar(max_basis=max_basis)
    chart = BigradedChart(2, "cobar")
    for t in range(t_max + 1):
        for s in range(s_max + 1):
            if s > t:
                chart.set_cell(s, t, 1 if s == t == 0 else 0)
                continue
            dim = cobar.dim_h(s, t)
            names = []
            if s == 0:
                names = ["1"] if t == 0 else []
            elif s == 1 and dim == 1:
                i = t.bit_length() - 1
                if 2**i == t:
                    names = [f"h{i}"]
            elif s == t and dim == 1:
                names = [f"h0^{s}"]
            chart.set_cell(s, t, dim, names)
    if with_products:
        _record_h_products(cobar, chart, s_max, t_max)
    return chart, cobar


def _record_h_products(cobar, chart, s_max, t_max):
    """Products h_i h_j (and h0-tower products) among named classes."""
    max_i = 0
    while 2 ** (max_i + 1) <= t_max:
        max_i += 1
    hs = {i: cobar.h_class(i) for i in range(max_i + 1)}
    if s_max < 2:
        return
    for i in range(max_i + 1):
        for j in range(i, max_i + 1):
            t = 2**i + 2**j
            if t > t_max:
                continue
            ci, cj = hs[i], hs[j]
            prod = cobar.product_cochain(ci[0], cj[0])
            mask = cobar.class_reduce(cobar.to_mask(prod, 2, t), 2, t)
            if mask == 0:
                chart.add_product(f"h{i}", f"h{j}", [])
            else:
                chart.add_product(f"h{i}", f"h{j}", [f"h{i}h{j}"])


def minimal_resolution(s_max, t_max, stem_max=None):
    """Minimal free resolution of F_2 over the Steenrod algebra.

    Returns (chart, resolution) where the chart dimension at (s,t) is the
    number of degree-t generators of the s-th free module.  When stem_max
    is given, cells with t - s > stem_max are skipped (their absence
    cannot affect the cells kept, since the differential preserves t and
    generators only feed cells of equal or larger stem).
    """
    res = MinimalResolutionData(s_max, t_max, stem_max)
    res.compute()
    chart = BigradedChart(2, "minres")
    for (s, t), dim in sorted(res.dims.items()):
        names = []
        if s == 0:
            names = ["1"] if t == 0 else []
        elif s == 1 and dim == 1 and t & (t - 1) == 0:
            names = [f"h{t.bit_length() - 1}"]
        elif s == t and dim == 1:
            names = [f"h0^{s}"]
        chart.set_cell(s, t, dim, names)
    return chart, res


class MinimalResolutionData:
    """Free modules F_s with generator degrees and differential values.

    gens[s] is the list of generator degrees; d[s][k] is the value of the
    differential on generator k as a frozenset of (gen_index, admissible
    monomial) pairs in F_{s-1}.  New generators are chosen by
    deterministic lowest-index pivoting, so charts are reproducible.
    """

    def __init__(self, s_max, t_max, stem_max=None):
        self.s_max = s_max
        self.t_max = t_max
        self.stem_max = stem_max
        self.gens = {0: [0]}
        self.d = {0: [frozenset()]}
        self.dims = {}

    def in_window(self, s, t):
        if s > self.s_max or t > self.t_max:
            return False
        if self.stem_max is not None and t - s > self.stem_max:
            return False
        return True

    def module_basis(self, s, t):
        out = []
        for gi, gdeg in enumerate(self.gens.get(s, [])):
            if gdeg > t:
                continue
            for mon in admissible_basis(t - gdeg):
                out.append((gi, mon))
        return out

    def apply_d(self, s, gi, mon):
        """d_s(mon * generator gi) as a frozenset of (gen, monomial)."""
        out = set()
        for gj, mon2 in self.d[s][gi]:
            for prod in steenrod_product(mon, mon2):
                out ^= {(gj, prod)}
        return frozenset(out)

    def compute(self):
        for t in range(0, self.t_max + 1):
            self.dims[(0, t)] = 1 if t == 0 else 0
            for s in range(1, self.s_max + 1):
                if not self.in_window(s, t):
                    continue
                self.gens.setdefault(s, [])
                self.d.setdefault(s, [])
                prev_basis = self.module_basis(s - 1, t)
                prev_index = {b: i for i, b in enumerate(prev_basis)}
                if s == 1:
                    # kernel of the augmentation F_0 -> F_2
                    if t == 0:
                        kernel = []
                    else:
                        kernel = [1 << i for i in range(len(prev_basis))]
                else:
                    pp_basis = self.module_basis(s - 2, t)
                    pp_index = {b: i for i, b in enumerate(pp_basis)}
                    rows = []
                    for gi, mon in prev_basis:
                        mask = 0
                        for term in self.apply_d(s - 1, gi, mon):
                            mask ^= 1 << pp_index[term]
                        rows.append(mask)
                    kernel = gf2_left_kernel(rows)
                image = GF2RowSpace()
                for gi, mon in self.module_basis(s, t):
                    mask = 0
                    for term in self.apply_d(s, gi, mon):
                        mask ^= 1 << prev_index[term]
                    image.insert(mask)
                new = 0
                for kmask in kernel:
                    residual, _ = image.insert(kmask)
                    if residual:
                        new += 1
                        value = frozenset(
                            prev_basis[i] for i in range(len(prev_basis))
                            if kmask >> i & 1)
                        self.gens[s].append(t)
                        self.d[s].append(value)
                self.dims[(s, t)] = new


EPSILON_BY_S_MOD_4 = {0: 1, 1: 1, 2: 2, 3: 3}


def vanishing_line_check(chart):
    """Violations of the vanishing constraints on an Adams chart:
    (1) cells with t < s must vanish, (2) the diagonal t = s is
    one-dimensional (the h_0 tower), (3) the wedge 0 < t-s < 2s - eps(s)
    vanishes, with eps depending on s mod 4.

    Returns a list of (s, t, description)."""
    violations = []
    for (s, t) in chart.computed_cells():
        dim = chart.dim(s, t)
        stem = t - s
        if stem < 0 and dim != 0:
            violations.append((s, t, f"dim {dim} below the zero stem"))
        elif stem == 0:
            if dim != 1:
                violations.append((s, t, f"diagonal dim {dim} != 1"))
        elif s >= 1:
            eps = EPSILON_BY_S_MOD_4[s % 4]
            if 0 < stem < 2 * s - eps and dim != 0:
                violations.append(
                    (s, t, f"dim {dim} inside the vanishing wedge"))
    return violations
