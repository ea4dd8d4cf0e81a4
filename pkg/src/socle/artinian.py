"""Certified truncation backend: finite-colength questions by exact linear algebra.

A TruncatedAlgebra realizes A/(J + m^K) as a finite-dimensional vector space
with a standard-monomial basis.  Nothing here decides on its own whether a
level K is faithful for a given module; callers must certify K first (see
modules.certified_level), and every public entry point takes the level as an
explicit argument.  That certificate-first policy is what replaces local
orderings in this engine.
"""

from .errors import DomainError
from .rings import FreeElement, Poly, SymSpace, free_space, monomials_below_degree, _monomials_of_degree
from .groebner import ideal_groebner, normal_form


class Subspace:
    """Row space over the coefficient field, kept in reduced echelon form.

    Rows are sparse maps column -> coefficient, monic at their pivot (the
    smallest column), fully back-substituted, so equal subspaces compare as
    equal row dictionaries.
    """

    __slots__ = ("field", "dim", "rows")

    def __init__(self, field, dim):
        self.field = field
        self.dim = dim
        self.rows = {}

    @property
    def rank(self):
        return len(self.rows)

    def reduce(self, vec):
        """Residual of vec after reduction; does not modify the subspace."""
        field = self.field
        work = {k: v for k, v in vec.items() if not field.is_zero(v)}
        out = {}
        while work:
            c = min(work)
            coeff = work.pop(c)
            row = self.rows.get(c)
            if row is None:
                out[c] = coeff
                continue
            for k, v in row.items():
                if k == c:
                    continue
                s = field.sub(work.get(k, field.zero), field.mul(coeff, v))
                if field.is_zero(s):
                    work.pop(k, None)
                else:
                    work[k] = s
        return out

    def insert(self, vec):
        """Add vec to the span; returns the new monic row, or None if dependent."""
        field = self.field
        resid = self.reduce(vec)
        if not resid:
            return None
        p = min(resid)
        inv = field.inv(resid[p])
        row = {k: field.mul(inv, v) for k, v in resid.items()}
        for r in self.rows.values():
            coeff = r.get(p)
            if coeff is None:
                continue
            for k, v in row.items():
                s = field.sub(r.get(k, field.zero), field.mul(coeff, v))
                if field.is_zero(s):
                    r.pop(k, None)
                else:
                    r[k] = s
        self.rows[p] = row
        return row

    def contains(self, vec):
        return not self.reduce(vec)

    def equals(self, other):
        return self.dim == other.dim and self.rows == other.rows

    def sorted_rows(self):
        return [self.rows[p] for p in sorted(self.rows)]


def kernel_of_columns(field, columns, eq_dim):
    """Kernel of the linear map sending unit vector u to columns[u].

    Returns coefficient dictionaries (index -> coeff), one per kernel basis
    vector, via echelon reduction of tagged columns.
    """
    sub = Subspace(field, eq_dim + len(columns))
    for u, col in enumerate(columns):
        vec = dict(col)
        vec[eq_dim + u] = field.one
        sub.insert(vec)
    out = []
    for piv in sorted(sub.rows):
        if piv >= eq_dim:
            out.append({k - eq_dim: v for k, v in sub.rows[piv].items()})
    return out


def solve_columns(field, columns, rhs, eq_dim):
    """Any solution x of sum(x_u * columns[u]) = rhs, or None if inconsistent."""
    sub = Subspace(field, eq_dim + len(columns))
    for u, col in enumerate(columns):
        vec = dict(col)
        vec[eq_dim + u] = field.one
        sub.insert(vec)
    resid = sub.reduce(rhs)
    if any(k < eq_dim for k in resid):
        return None
    return {k - eq_dim: field.neg(v) for k, v in resid.items()}


class TruncatedAlgebra:
    """Exact model of A/(J + m^K) with standard monomial basis and variable actions."""

    __slots__ = ("ring", "level", "basis", "index", "dim", "_var_action", "_gb")

    def __init__(self, ring, level):
        if level < 1:
            raise DomainError("truncation level must be >= 1")
        self.ring = ring
        self.level = level
        nvars = ring.nvars
        if ring.relations:
            mK = [ring.monomial(e) for e in _monomials_of_degree(nvars, level)]
            self._gb = ideal_groebner(mK, ring)
            leads = [lt[1] for lt in self._gb.lead_terms()]
            self.basis = tuple(
                e
                for e in monomials_below_degree(nvars, level)
                if not any(all(a >= b for a, b in zip(e, lead)) for lead in leads)
            )
        else:
            self._gb = None
            self.basis = tuple(monomials_below_degree(nvars, level))
        self.index = {e: i for i, e in enumerate(self.basis)}
        self.dim = len(self.basis)
        self._var_action = None

    def reduce_poly(self, p):
        """Coordinates of the class of p on the standard monomial basis."""
        field = self.ring.field
        if self._gb is not None:
            nf = normal_form(FreeElement(SymSpace(1, 1), [p]), self._gb)
            p = nf.comps[0]
            return {self.index[e]: c for e, c in p.terms.items()}
        return {
            self.index[e]: c for e, c in p.terms.items() if sum(e) < self.level
        }

    def reduce_free(self, f):
        """Coordinates of a free-module element, one block of size dim per component."""
        out = {}
        for c, p in enumerate(f.comps):
            off = c * self.dim
            for i, v in self.reduce_poly(p).items():
                out[off + i] = v
        return out

    @property
    def var_action(self):
        """Sparse matrices of multiplication by each variable on the basis."""
        if self._var_action is None:
            acts = []
            for v in range(self.ring.nvars):
                col = []
                for e in self.basis:
                    shifted = tuple(x + (1 if i == v else 0) for i, x in enumerate(e))
                    col.append(self.reduce_poly(self.ring.monomial(shifted)))
                acts.append(col)
            self._var_action = acts
        return self._var_action

    def apply_var(self, vec, v):
        """Multiply a coordinate vector (any rank) by the variable x_v."""
        field = self.ring.field
        act = self.var_action[v]
        out = {}
        for idx, c in vec.items():
            block = idx - idx % self.dim
            for j, cc in act[idx % self.dim].items():
                k = block + j
                s = field.add(out.get(k, field.zero), field.mul(c, cc))
                if field.is_zero(s):
                    out.pop(k, None)
                else:
                    out[k] = s
        return out

    def span_of(self, gens, rank):
        """k-span of the A-module generated by gens inside the truncated model.

        Closure under the variable actions: only vectors that grow the span
        get their multiples queued, so at most dim*rank*nvars insertions run.
        """
        sub = Subspace(self.ring.field, self.dim * rank)
        queue = [self.reduce_free(g) for g in gens]
        while queue:
            vec = queue.pop()
            row = sub.insert(vec)
            if row is None:
                continue
            for v in range(self.ring.nvars):
                queue.append(self.apply_var(row, v))
        return sub

    def colength(self, span, rank):
        """dim of (truncated ambient) / span; exact colength at a certified level."""
        return self.dim * rank - span.rank

    def colon_vectors(self, span, rank):
        """Kernel of v -> (x_1 v, .., x_d v) into the quotient by span.

        The result spans {f : m f in N} modulo the truncation, which equals
        the socle colon N :_F m at a certified level.
        """
        nvars = self.ring.nvars
        U = self.dim * rank
        columns = []
        for u in range(U):
            base = {u: self.ring.field.one}
            eq = {}
            for v in range(nvars):
                resid = span.reduce(self.apply_var(base, v))
                for col, c in resid.items():
                    eq[v * U + col] = c
            columns.append(eq)
        return kernel_of_columns(self.ring.field, columns, nvars * U)

    def lift(self, vec, space):
        """Polynomial element of degree < level with the given coordinates."""
        field = self.ring.field
        comps = [dict() for _ in range(space.rank)]
        for idx, c in vec.items():
            comps[idx // self.dim][self.basis[idx % self.dim]] = c
        return FreeElement(space, [Poly(field, t) for t in comps])


def truncate(ring, level):
    """Cached exact model of A/(J + m^K)."""
    return ring.cache(("trunc", level), lambda: TruncatedAlgebra(ring, level))
