"""Submodule handles and the operations on them: products, powers, Fitting
ideals, colengths, minimal generators, socle colons, parameter predicates.

Finite-colength questions run through the truncation backend and always start
from a Nakayama certificate (certified_level).  A parallel Groebner route
(colength_gb, colon_gb) exists for the same questions and is kept independent
so the two can be checked against each other.
"""

import math
from itertools import combinations, combinations_with_replacement

from .errors import DomainError, ResourceError, StructuralError
from .rings import FreeElement, SymSpace, free_space, _monomials_of_degree
from .groebner import (
    buchberger,
    freeze_elements,
    ideal_groebner,
    membership,
    normal_form,
    reduce_mod_relations,
    staircase_count,
    syzygies,
)
from .artinian import truncate

DEFAULT_LEVEL_CAP = 64

# process-wide truncation policy, set once by the CLI before execution:
# "fixed" pins every certificate to one level (still verified), "cap" bounds
# the ascending search.
LEVEL_POLICY = {"fixed": None, "cap": DEFAULT_LEVEL_CAP}

INFINITE = math.inf


class PolyMatrix:
    """Matrix over A with polynomial entries."""

    __slots__ = ("ring", "entries")

    def __init__(self, ring, entries):
        entries = tuple(tuple(row) for row in entries)
        if not entries or not entries[0]:
            raise StructuralError("matrix dimensions must be positive")
        width = len(entries[0])
        if any(len(row) != width for row in entries):
            raise StructuralError("ragged matrix")
        self.ring = ring
        self.entries = entries

    @property
    def rows(self):
        return len(self.entries)

    @property
    def cols(self):
        return len(self.entries[0])

    def transpose(self):
        return PolyMatrix(self.ring, list(zip(*self.entries)))

    def column(self, j, space=None):
        space = space or free_space(self.rows)
        return FreeElement(space, [self.entries[i][j] for i in range(self.rows)])

    def columns(self):
        space = free_space(self.rows)
        return [self.column(j, space) for j in range(self.cols)]

    def entry(self, i, j):
        return self.entries[i][j]

    def render(self):
        return (
            "["
            + ", ".join(
                "[" + ", ".join(self.ring.render_poly(e) for e in row) + "]"
                for row in self.entries
            )
            + "]"
        )

    def __eq__(self, other):
        return (
            isinstance(other, PolyMatrix)
            and self.ring.same_ring(other.ring)
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"PolyMatrix({self.rows}x{self.cols})"


def matrix_product(a, b):
    if a.cols != b.rows:
        raise StructuralError("matrix shapes do not compose")
    zero = a.ring.zero()
    out = []
    for i in range(a.rows):
        row = []
        for j in range(b.cols):
            acc = zero
            for k in range(a.cols):
                acc = acc + a.entries[i][k] * b.entries[k][j]
            row.append(acc)
        out.append(row)
    return PolyMatrix(a.ring, out)


class SubmoduleHandle:
    """Finitely generated submodule of a graded piece of Sym(F), with caches."""

    __slots__ = ("ring", "space", "gens", "matrix", "_cache")

    def __init__(self, ring, space, gens, matrix=None):
        gens = tuple(g for g in gens if not g.is_zero())
        for g in gens:
            if g.space != space:
                raise StructuralError("generator outside the ambient module")
        self.ring = ring
        self.space = space
        self.gens = gens
        self.matrix = matrix
        self._cache = {}

    @property
    def is_zero(self):
        return not self.gens

    def key(self):
        return (self.space.base_rank, self.space.degree, freeze_elements(self.gens))

    def cached(self, key, build):
        try:
            return self._cache[key]
        except KeyError:
            value = build()
            self._cache[key] = value
            return value

    def component_matrix(self):
        """The matrix whose columns are the generators (degree-1 ambient only)."""
        if self.matrix is not None:
            return self.matrix
        if self.space.degree != 1:
            raise StructuralError("component matrix needs a rank-one graded ambient")
        if not self.gens:
            raise StructuralError("zero module has no matrix")
        return PolyMatrix(self.ring, [[g.comps[i] for g in self.gens] for i in range(self.space.rank)])

    def __repr__(self):
        return f"SubmoduleHandle({self.space}, {len(self.gens)} gens)"


def module_from_gens(ring, space, gens, matrix=None):
    return SubmoduleHandle(ring, space, gens, matrix)


def columns_to_module(mat):
    """Submodule of A^rows generated by the columns of the matrix."""
    space = free_space(mat.rows)
    return SubmoduleHandle(mat.ring, space, mat.columns(), matrix=mat)


def full_module(ring, rank):
    """F = A^rank presented as a submodule of itself."""
    space = free_space(rank)
    gens = [FreeElement.basis_vector(space, ring.field, ring.nvars, i) for i in range(rank)]
    return SubmoduleHandle(ring, space, gens)


def unit_module(ring, base_rank):
    """The degree-zero module A inside Sym^0(F)."""
    space = SymSpace(base_rank, 0)
    return SubmoduleHandle(ring, space, [FreeElement(space, [ring.one()])])


def ideal_handle(ring, polys):
    """An ideal seen as a submodule of the rank-one free module."""
    space = free_space(1)
    return SubmoduleHandle(ring, space, [FreeElement(space, [p]) for p in polys])


def sym_multiply(u, v):
    """Product of elements of symmetric powers, expanded on the target basis."""
    space = u.space.product_space(v.space)
    field = u.comps[0].field if u.comps else v.comps[0].field
    comps = [None] * space.rank
    from .rings import Poly

    for i in range(space.rank):
        comps[i] = Poly.zero(field)
    for eu, pu in zip(u.space.basis, u.comps):
        if pu.is_zero():
            continue
        for ev, pv in zip(v.space.basis, v.comps):
            if pv.is_zero():
                continue
            idx = space.index[tuple(a + b for a, b in zip(eu, ev))]
            comps[idx] = comps[idx] + pu * pv
    return FreeElement(space, comps)


def module_product(U, V):
    """Product of two submodules inside the symmetric algebra."""
    if not U.ring.same_ring(V.ring):
        raise StructuralError("product over different rings")
    if U.space.base_rank != V.space.base_rank:
        raise StructuralError("product over different free modules")
    space = U.space.product_space(V.space)
    gens = []
    seen = set()
    for u in U.gens:
        for v in V.gens:
            w = sym_multiply(u, v)
            if w.is_zero():
                continue
            k = freeze_elements([w])
            if k not in seen:
                seen.add(k)
                gens.append(w)
    return SubmoduleHandle(U.ring, space, gens)


def module_power(M, s):
    """s-fold product; the zeroth power is the unit module."""
    if s < 0:
        raise StructuralError("negative module power")
    if s == 0:
        return unit_module(M.ring, M.space.base_rank)
    out = M
    for _ in range(s - 1):
        out = module_product(out, M)
    return out


def ideal_times_module(polys, M):
    """Product of an ideal with a module, inside the same graded piece."""
    gens = []
    for p in polys:
        for g in M.gens:
            w = g.scale_poly(p)
            if not w.is_zero():
                gens.append(w)
    return SubmoduleHandle(M.ring, M.space, gens)


def _minor(mat, rows, cols, memo):
    key = (rows, cols)
    got = memo.get(key)
    if got is not None:
        return got
    ring = mat.ring
    if len(rows) == 1:
        val = mat.entries[rows[0]][cols[0]]
    else:
        val = ring.zero()
        r0 = rows[0]
        rest = rows[1:]
        for k, c in enumerate(cols):
            e = mat.entries[r0][c]
            if e.is_zero():
                continue
            sub = _minor(mat, rest, cols[:k] + cols[k + 1 :], memo)
            term = e * sub
            val = val + term if k % 2 == 0 else val - term
    memo[key] = val
    return val


def fitting_ideal(mat, t):
    """Ideal of all t x t minors, by Laplace expansion with memoization."""
    if t < 1 or t > min(mat.rows, mat.cols):
        raise StructuralError(f"minor size {t} out of range")
    memo = {}
    polys = []
    for rows in combinations(range(mat.rows), t):
        for cols in combinations(range(mat.cols), t):
            m = _minor(mat, rows, cols, memo)
            if not m.is_zero():
                polys.append(m)
    return ideal_handle(mat.ring, polys)


def presentation_fitting_ideal(N):
    """I(N): the ideal of maximal minors of the generator matrix of N in F."""
    if N.space.degree != 1:
        raise StructuralError("Fitting certificate needs a submodule of F")
    if N.is_zero:
        return ideal_handle(N.ring, [])
    mat = N.component_matrix()
    r = N.space.rank
    if mat.cols < r:
        return ideal_handle(N.ring, [])
    return fitting_ideal(mat, r)


def ring_dimension(ring):
    """Krull dimension of the presentation, from the lead terms of J."""

    def build():
        d = ring.nvars
        if not ring.relations:
            return d
        gb = ideal_groebner(list(ring.relations), ring)
        leads = [lt[1] for lt in gb.lead_terms()]
        supports = [frozenset(i for i, e in enumerate(exp) if e) for exp in leads]
        for size in range(d, -1, -1):
            for T in combinations(range(d), size):
                tset = set(T)
                if not any(s <= tset for s in supports):
                    return size
        return 0

    return ring.cache(("dim",), build)


def finite_colength(N):
    """Is the colength of F/N finite (I(N) m-primary)?

    Detected from the lead-term ideal of I(N) + J: a pure power of every
    variable must appear.
    """
    if N.space.degree != 1:
        raise StructuralError("colength test needs a submodule of F")

    def build():
        I = presentation_fitting_ideal(N)
        polys = [g.comps[0] for g in I.gens]
        gb = ideal_groebner(polys, N.ring)
        leads = [lt[1] for lt in gb.lead_terms()]
        for v in range(N.ring.nvars):
            if not any(
                e[v] and all(x == 0 for i, x in enumerate(e) if i != v) for e in leads
            ):
                return False
        return True

    return N.cached("finite", build)


def certified_level(N, power=1, cap=None, fixed=None):
    """Smallest K with every degree-K monomial in I(N)^power + m^(K+1).

    By Nakayama applied to m^K * (A / I(N)^power) this containment forces
    m^K inside I(N)^power in the local ring, which makes level-K truncation
    faithful for every comparison of modules containing I(N)^power times the
    ambient (colengths, colons, and Sym^power products).
    """
    if cap is None:
        cap = LEVEL_POLICY["cap"]
    if fixed is None:
        fixed = LEVEL_POLICY["fixed"]
    if not finite_colength(N):
        raise DomainError("not m-primary: colength of F/N is infinite")

    def build():
        ring = N.ring
        I = presentation_fitting_ideal(N)
        base = [g.comps[0] for g in I.gens]
        powgens = [
            _product(ring, pick) for pick in combinations_with_replacement(base, power)
        ]
        space = free_space(1)
        candidates = [fixed] if fixed is not None else range(2, cap + 1)
        for K in candidates:
            mK1 = [ring.monomial(e) for e in _monomials_of_degree(ring.nvars, K + 1)]
            gb = ideal_groebner(powgens + mK1, ring)
            ok = True
            for e in _monomials_of_degree(ring.nvars, K):
                f = FreeElement(space, [ring.monomial(e)])
                if not normal_form(f, gb).is_zero():
                    ok = False
                    break
            if ok:
                return K
        if fixed is not None:
            raise DomainError(f"truncation level {fixed} fails the Nakayama certificate")
        raise ResourceError(f"no certified level below the cap {cap}")

    return N.cached(("level", power, fixed), build)


def _product(ring, polys):
    out = ring.one()
    for p in polys:
        out = out * p
    return out


def span_at(N, level):
    """Truncated span of the handle at the given level (no certification here)."""

    def build():
        alg = truncate(N.ring, level)
        return alg.span_of(N.gens, N.space.rank)

    return N.cached(("span", level), build)


def colength(N, level=None):
    """Exact colength of the ambient modulo N; INFINITE when not m-primary.

    For submodules of F the level is certified automatically; for higher
    symmetric powers a certified level must be passed in (certificate-first).
    """
    if level is None:
        if N.space.degree != 1:
            raise StructuralError("level required for higher symmetric powers")
        if not finite_colength(N):
            return INFINITE
        level = certified_level(N, 1)
    alg = truncate(N.ring, level)
    return alg.colength(span_at(N, level), N.space.rank)


def colength_gb(N):
    """Independent colength oracle: staircase count of the module lead terms."""
    gb = buchberger(list(N.gens), N.ring, N.space)
    per_position = {}
    for pos, exp in gb.lead_terms():
        per_position.setdefault(pos, []).append(exp)
    total = 0
    for pos in range(N.space.rank):
        leads = per_position.get(pos)
        if not leads:
            return INFINITE
        c = staircase_count(leads, N.ring.nvars)
        if c is None:
            return INFINITE
        total += c
    return total


def socle_module(N, level=None):
    """M = N :_F m with a minimal generating set, via the truncated kernel."""
    if level is None:
        if not finite_colength(N):
            raise DomainError("socle colon needs finite colength")
        level = certified_level(N, 1)
    def build():
        alg = truncate(N.ring, level)
        rank = N.space.rank
        span = span_at(N, level)
        kernel = alg.colon_vectors(span, rank)
        field = N.ring.field
        # minimal generators: independent residuals modulo m * M
        from .artinian import Subspace

        m_of_M = Subspace(field, alg.dim * rank)
        queue = []
        for vec in kernel:
            for v in range(N.ring.nvars):
                queue.append(alg.apply_var(vec, v))
        while queue:
            vec = queue.pop()
            row = m_of_M.insert(vec)
            if row is None:
                continue
            for v in range(N.ring.nvars):
                queue.append(alg.apply_var(row, v))
        chosen = []
        probe = Subspace(field, alg.dim * rank)
        for row in m_of_M.sorted_rows():
            probe.insert(dict(row))
        for vec in kernel:
            if probe.insert(dict(vec)) is not None:
                chosen.append(vec)
        gens = [alg.lift(vec, N.space) for vec in chosen]
        return SubmoduleHandle(N.ring, N.space, gens)

    return N.cached(("socle", level), build)


def soc_dim(N):
    """Length of (N :_F m) / N, the socle dimension of F/N."""
    if not finite_colength(N):
        raise DomainError("socle dimension needs finite colength")
    level = certified_level(N, 1)
    M = socle_module(N, level)
    return colength(N, level) - colength(M, level)


def submodule_equal(U, V, level=None):
    """Do the truncated spans coincide (row-space equality) at a faithful level?"""
    if U.space != V.space:
        raise StructuralError("submodules of different ambient modules")
    if not U.ring.same_ring(V.ring):
        raise StructuralError("submodules over different rings")
    if level is None:
        if U.space.degree != 1:
            raise StructuralError("level required for higher symmetric powers")
        level = max(certified_level(U, 1), certified_level(V, 1))
    return span_at(U, level).equals(span_at(V, level))


def membership_trunc(f, N, level):
    """Truncation-backend membership of f in N at a certified level."""
    alg = truncate(N.ring, level)
    return span_at(N, level).contains(alg.reduce_free(f))


def contains_element(N, f):
    """Groebner-route membership of f in N (with quotient relations)."""
    return membership(f, list(N.gens), N.ring)


def module_contains(U, V):
    """Groebner-route containment V <= U."""
    return all(contains_element(U, g) for g in V.gens)


def minimal_generators(N):
    """A minimal generating subset of the given generators, by Nakayama.

    Finite-colength handles go through the truncated model (generators
    independent modulo m*N); otherwise a greedy redundancy drop runs on the
    Groebner route.
    """
    if N.is_zero:
        return []
    if finite_colength(N):
        level = certified_level(N, 1) + 1
        alg = truncate(N.ring, level)
        rank = N.space.rank
        from .artinian import Subspace

        mN = ideal_times_module(
            [N.ring.variable(v) for v in range(N.ring.nvars)], N
        )
        span_mN = alg.span_of(mN.gens, rank)
        probe = Subspace(N.ring.field, alg.dim * rank)
        for row in span_mN.sorted_rows():
            probe.insert(dict(row))
        chosen = []
        for g in N.gens:
            if probe.insert(alg.reduce_free(g)) is not None:
                chosen.append(g)
        return chosen
    # infinite colength: greedy redundancy drop through the Groebner route
    kept = list(N.gens)
    i = 0
    while i < len(kept):
        g = kept[i]
        others = kept[:i] + kept[i + 1 :]
        mg = [g.scale_poly(N.ring.variable(v)) for v in range(N.ring.nvars)]
        if others or mg:
            if membership(g, others + mg, N.ring):
                kept.pop(i)
                continue
        i += 1
    return kept


def mingens(N):
    """Minimal number of generators, dim_k N/mN by Nakayama."""
    return len(minimal_generators(N))


def is_parameter_module(N):
    """Finite colength and exactly d + r - 1 minimal generators.

    Returns (verdict, report); the report carries the analytic spread
    d + r - 1 whenever the colength is finite.
    """
    d = ring_dimension(N.ring)
    r = N.space.rank
    target = d + r - 1
    fin = finite_colength(N)
    mu = mingens(N)
    report = {
        "colength": colength(N) if fin else "infinite",
        "mu": mu,
        "target": target,
    }
    if fin:
        report["analytic_spread"] = target
    return (fin and mu == target), report


def contained_in_max_ideal_times_F(N):
    """Is N inside m*F (every generator component a non-unit)?"""
    for g in N.gens:
        for p in g.comps:
            if not N.ring.field.is_zero(reduce_mod_relations(p, N.ring).constant_term()):
                return False
    return True


def colon_by_element(N, p):
    """Groebner-route colon (N :_F p) via syzygies of [p*basis | gens]."""
    ring = N.ring
    space = N.space
    r = space.rank
    basis = [
        FreeElement.basis_vector(space, ring.field, ring.nvars, i).scale_poly(p)
        for i in range(r)
    ]
    combined = basis + list(N.gens)
    syz = syzygies(combined, ring, space)
    out_gens = []
    for s in syz:
        comps = [s.comps[i] for i in range(r)]
        f = FreeElement(space, comps)
        if not f.is_zero():
            out_gens.append(f)
    return SubmoduleHandle(ring, space, out_gens)


def intersect_gb(U, V):
    """Groebner-route intersection via syzygies of the concatenated generators."""
    if U.space != V.space:
        raise StructuralError("intersection of modules in different ambients")
    ring = U.ring
    combined = list(U.gens) + list(V.gens)
    syz = syzygies(combined, ring, U.space)
    p = len(U.gens)
    out = []
    for s in syz:
        f = FreeElement.zero(U.space, ring.field)
        for i in range(p):
            f = f + U.gens[i].scale_poly(s.comps[i])
        f = FreeElement(U.space, [reduce_mod_relations(c, ring) for c in f.comps])
        if not f.is_zero():
            out.append(f)
    return SubmoduleHandle(ring, U.space, out)


def colon_gb(N):
    """Groebner-route N :_F m, the intersection of the variable colons."""
    out = None
    for v in range(N.ring.nvars):
        piece = colon_by_element(N, N.ring.variable(v))
        out = piece if out is None else intersect_gb(out, piece)
    return out
