"""Koszul complexes, grade via homology support, perfect matrices, minimal
free resolutions over the local ring, and the dual-image construction.

All resolutions are minimal in the local sense: differentials carry entries
inside the maximal ideal.  Row and column operations used while pivoting out
unit entries multiply rows or columns by local units, which preserves the
local isomorphism class (the only thing the engine reasons about) without
ever leaving polynomial arithmetic.
"""

from itertools import combinations

from .errors import DomainError, StructuralError
from .rings import FreeElement, SymSpace, free_space
from .groebner import membership, reduce_mod_relations, syzygies, is_local_unit
from .modules import (
    PolyMatrix,
    SubmoduleHandle,
    columns_to_module,
    fitting_ideal,
    finite_colength,
    ideal_handle,
    matrix_product,
    ring_dimension,
)


class BettiTable:
    """Ranks of a minimalized free resolution, F_0 first."""

    __slots__ = ("ranks",)

    def __init__(self, ranks):
        self.ranks = tuple(ranks)

    def alternating_sum(self):
        return sum((-1) ** i * r for i, r in enumerate(self.ranks))

    def __eq__(self, other):
        ranks = other.ranks if isinstance(other, BettiTable) else tuple(other)
        return self.ranks == ranks

    def __iter__(self):
        return iter(self.ranks)

    def __repr__(self):
        return f"BettiTable{self.ranks}"


class ChainComplex:
    """A finite complex of free modules, given by its differentials d_1, d_2, ...

    d_i maps C_i to C_(i-1); composition of consecutive differentials must
    vanish in A (checked exactly by is_complex).
    """

    __slots__ = ("ring", "diffs")

    def __init__(self, ring, diffs):
        self.ring = ring
        self.diffs = tuple(diffs)

    def ranks(self):
        if not self.diffs:
            return ()
        out = [self.diffs[0].rows]
        for d in self.diffs:
            out.append(d.cols)
        return tuple(out)

    def is_complex(self):
        for a, b in zip(self.diffs, self.diffs[1:]):
            prod = matrix_product(a, b)
            for row in prod.entries:
                for e in row:
                    if not reduce_mod_relations(e, self.ring).is_zero():
                        return False
        return True

    def __repr__(self):
        return f"ChainComplex(ranks={self.ranks()})"


def koszul_complex(seq, ring):
    """The Koszul complex on ring elements, signs by sorted-index convention."""
    seq = list(seq)
    n = len(seq)
    if n < 1:
        raise StructuralError("Koszul complex needs at least one element")
    zero = ring.zero()
    diffs = []
    for k in range(1, n + 1):
        rows = list(combinations(range(n), k - 1))
        cols = list(combinations(range(n), k))
        row_index = {T: i for i, T in enumerate(rows)}
        entries = [[zero for _ in cols] for _ in rows]
        for j, T in enumerate(cols):
            for l, t in enumerate(T):
                rest = T[:l] + T[l + 1 :]
                sign = 1 if l % 2 == 0 else -1
                val = seq[t] if sign == 1 else -seq[t]
                i = row_index[rest]
                entries[i][j] = entries[i][j] + val
        diffs.append(PolyMatrix(ring, entries))
    return ChainComplex(ring, diffs)


def koszul_graded_piece(mat):
    """Degree-2 slice of the Koszul complex on the columns of mat as linear forms.

    The three terms are wedge^2(A^n), A^n tensor F, and Sym^2(F); this is the
    finite complex of free A-modules whose first homology controls whether
    every quadratic relation has coefficients inside the deleted-generator
    submodules.
    """
    ring = mat.ring
    r, n = mat.rows, mat.cols
    sym2 = SymSpace(r, 2)
    zero = ring.zero()

    # d1: e_i (x) t_l  ->  t_l * c_i  in Sym^2(F)
    d1 = [[zero for _ in range(n * r)] for _ in range(sym2.rank)]
    unit_exps = [tuple(1 if a == b else 0 for a in range(r)) for b in range(r)]
    for i in range(n):
        for l in range(r):
            col = i * r + l
            for u in range(r):
                c = mat.entries[u][i]
                if c.is_zero():
                    continue
                exp = tuple(a + b for a, b in zip(unit_exps[l], unit_exps[u]))
                row = sym2.index[exp]
                d1[row][col] = d1[row][col] + c

    pieces = [PolyMatrix(ring, d1)]

    # d2: e_i ^ e_j  ->  c_i e_j - c_j e_i  (only when n >= 2)
    pairs = list(combinations(range(n), 2))
    if pairs:
        d2 = [[zero for _ in pairs] for _ in range(n * r)]
        for col, (i, j) in enumerate(pairs):
            for l in range(r):
                ci = mat.entries[l][i]
                cj = mat.entries[l][j]
                if not ci.is_zero():
                    d2[j * r + l][col] = d2[j * r + l][col] + ci
                if not cj.is_zero():
                    d2[i * r + l][col] = d2[i * r + l][col] - cj
        pieces.append(PolyMatrix(ring, d2))

    return ChainComplex(ring, pieces)


def graded_piece_h1(mat):
    """Does H_1 of the degree-2 graded piece vanish?  Returns (bool, witness).

    The kernel of d_1 is generated by syzygies; H_1 = 0 exactly when each of
    them lies in the column module of d_2.  A failing generator is returned
    as the witness (its coordinates are the relation coefficients).
    """
    ring = mat.ring
    cc = koszul_graded_piece(mat)
    d1 = cc.diffs[0]
    ker_gens = list(syzygies(d1.columns(), ring))
    if len(cc.diffs) > 1:
        image_gens = cc.diffs[1].columns()
    else:
        image_gens = []
    for u in ker_gens:
        if not membership(u, image_gens, ring):
            return False, u
    return True, None


def _proper_at_m(polys, ring):
    field = ring.field
    return all(
        field.is_zero(reduce_mod_relations(p, ring).constant_term()) for p in polys
    )


def homology_nonzero_at_m(diff_cols, next_cols, ring):
    """Is ker/im nonzero locally at m, via Fitt_0 of a presentation?

    Presentation: generators are the kernel syzygies u; relations are the
    coefficient vectors expressing membership of both the image columns and
    the u-syzygies, read off from syzygies of the concatenated list.
    """
    if not diff_cols:
        return False
    u = list(syzygies(diff_cols, ring))
    if not u:
        return False
    combined = u + list(next_cols)
    rel = list(syzygies(combined, ring))
    t = len(u)
    pres_cols = []
    for s in rel:
        col = [s.comps[i] for i in range(t)]
        if any(not reduce_mod_relations(p, ring).is_zero() for p in col):
            pres_cols.append(col)
    if len(pres_cols) < t:
        # fewer relations than generators: Fitt_0 = 0, supported everywhere
        return True
    pres = PolyMatrix(ring, [[col[i] for col in pres_cols] for i in range(t)])
    fitt = fitting_ideal(pres, t)
    if not fitt.gens:
        return True
    return _proper_at_m([g.comps[0] for g in fitt.gens], ring)


def grade(I):
    """Grade of a proper ideal at m: generator count minus the top nonvanishing
    Koszul homology, with a fast path returning dim A for m-primary ideals
    over Cohen-Macaulay presentations."""
    ring = I.ring
    gens = [reduce_mod_relations(g.comps[0], ring) for g in I.gens]
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise DomainError("grade of the zero ideal")
    if not _proper_at_m(gens, ring):
        raise DomainError("improper ideal")
    if ring.cm and finite_colength(ideal_handle(ring, gens)):
        return ring_dimension(ring)
    cc = koszul_complex(gens, ring)
    s = len(gens)
    space = free_space(1)
    col_lists = [d.columns() for d in cc.diffs]
    for i in range(s, 0, -1):
        cols_i = col_lists[i - 1]
        next_cols = col_lists[i].copy() if i < s else []
        if homology_nonzero_at_m(cols_i, next_cols, ring):
            return s - i
    return s


def is_perfect_matrix(mat):
    """Both conditions at the local ring: I_r proper, of maximal grade n-r+1.

    Returns (verdict, report).
    """
    r, n = mat.rows, mat.cols
    if n < r:
        raise DomainError("matrix needs at least as many columns as rows")
    ring = mat.ring
    Ir = fitting_ideal(mat, r)
    target = n - r + 1
    polys = [g.comps[0] for g in Ir.gens]
    if not polys:
        return False, {"proper": True, "grade": 0, "target": target}
    proper = _proper_at_m(polys, ring)
    if not proper:
        return False, {"proper": False, "grade": None, "target": target}
    g = grade(Ir)
    return g == target, {"proper": True, "grade": g, "target": target}


def _unit_positions(mat):
    for i in range(mat.rows):
        for j in range(mat.cols):
            if is_local_unit(mat.entries[i][j], mat.ring):
                return i, j
    return None


def unit_prune(mat):
    """Pivot out unit entries (smallest row, col first) until all entries lie in m.

    Column operations scale the other columns by the unit before subtracting,
    and row operations do the same on rows, so everything stays polynomial;
    both kinds of moves preserve the local isomorphism class of the cokernel.
    Returns None when the matrix prunes away completely.
    """
    entries = [list(row) for row in mat.entries]
    ring = mat.ring
    while True:
        if not entries or not entries[0]:
            return None if not entries else PolyMatrix(ring, entries)
        probe = PolyMatrix(ring, entries)
        pos = _unit_positions(probe)
        if pos is None:
            return probe
        a, b = pos
        u = entries[a][b]
        rows = len(entries)
        cols = len(entries[0])
        for j in range(cols):
            if j == b:
                continue
            c = entries[a][j]
            for i in range(rows):
                entries[i][j] = u * entries[i][j] - c * entries[i][b]
        for i in range(rows):
            if i == a:
                continue
            c = entries[i][b]
            for j in range(cols):
                entries[i][j] = u * entries[i][j] - c * entries[a][j]
        entries = [
            [e for j, e in enumerate(row) if j != b]
            for i, row in enumerate(entries)
            if i != a
        ]
        entries = [row for row in entries if row] if entries and entries[0] else entries


def _drop_zero_columns(cols, ring):
    out = []
    for c in cols:
        reduced = [reduce_mod_relations(p, ring) for p in c.comps]
        f = FreeElement(c.space, reduced)
        if not f.is_zero():
            out.append(f)
    return out


def _prune_redundant(cols, ring):
    """Minimal generating set: drop any column inside (others) + m*(itself)."""
    kept = list(cols)
    i = 0
    while i < len(kept):
        g = kept[i]
        others = kept[:i] + kept[i + 1 :]
        mg = [g.scale_poly(ring.variable(v)) for v in range(ring.nvars)]
        if membership(g, others + mg, ring):
            kept.pop(i)
            continue
        i += 1
    return kept


def _matrix_from_columns(cols, rows, ring):
    return PolyMatrix(ring, [[c.comps[i] for c in cols] for i in range(rows)])


def minimal_free_resolution(presentation, max_length=10):
    """Iterated syzygies of a cokernel presentation, minimalized stage by stage.

    Returns (BettiTable, ChainComplex, completed).  Stops when the syzygy
    module vanishes, or flags completed=False at max_length.
    """
    ring = presentation.ring
    pruned = unit_prune(presentation)
    if pruned is None:
        return BettiTable([0]), ChainComplex(ring, []), True
    cols = _prune_redundant(_drop_zero_columns(pruned.columns(), ring), ring)
    if not cols:
        return BettiTable([pruned.rows]), ChainComplex(ring, []), True
    betti = [pruned.rows, len(cols)]
    diffs = [_matrix_from_columns(cols, pruned.rows, ring)]
    completed = False
    while len(diffs) < max_length:
        syz = _drop_zero_columns(list(syzygies(cols, ring)), ring)
        syz = _prune_redundant(syz, ring)
        if not syz:
            completed = True
            break
        diffs.append(_matrix_from_columns(syz, len(cols), ring))
        betti.append(len(syz))
        cols = syz
    return BettiTable(betti), ChainComplex(ring, diffs), completed


def resolution_entries_in_max_ideal(cc):
    """Are all differential entries non-units (the minimality certificate)?"""
    ring = cc.ring
    for d in cc.diffs:
        for row in d.entries:
            for e in row:
                if is_local_unit(e, ring):
                    return False
    return True


def dual_image_module(phi):
    """Column module of the transpose of phi inside A^(cols of phi)."""
    return columns_to_module(phi.transpose())
