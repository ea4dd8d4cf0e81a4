"""Buchberger's algorithm for submodules of free modules over a ring presentation.

Quotient relations are appended as extra generators (one copy per basis
position) in every computation, so all answers are relative to A = S/J.
Pair selection follows the normal strategy: smallest lcm total degree first,
then lowest generator indices, which makes every output deterministic.
"""

import hashlib
import json
import os
from fractions import Fraction

from .errors import StructuralError
from .rings import POT, FreeElement, Poly, SymSpace, grevlex_key

# optional content-addressed on-disk cache, enabled by the CLI (--cache DIR)
CACHE_DIR = None


class GroebnerBasis:
    """A reduced Groebner basis together with its order and input identity."""

    __slots__ = ("order", "generators", "source_key", "_leads")

    def __init__(self, order, generators, source_key):
        self.order = order
        self.generators = tuple(generators)
        self.source_key = source_key
        self._leads = tuple(
            (g.lead_term(order), g.coeff(g.lead_term(order))) for g in self.generators
        )

    def lead_terms(self):
        return [lt for lt, _ in self._leads]

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)


class SyzygyModule:
    """Generators of all relations sum(s_i * c_i) = 0 over A among given elements."""

    __slots__ = ("ambient_rank", "generators")

    def __init__(self, ambient_rank, generators):
        self.ambient_rank = ambient_rank
        self.generators = tuple(generators)

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)


def freeze_elements(gens):
    """Canonical hashable form of a generator list, for cache keys."""
    return tuple(
        tuple(frozenset(p.terms.items()) for p in g.comps) for g in gens
    )


def divide_term(term, lead):
    """Quotient exponent if lead divides term (same position), else None."""
    pos, exp = term
    lpos, lexp = lead
    if pos != lpos:
        return None
    if all(a >= b for a, b in zip(exp, lexp)):
        return tuple(a - b for a, b in zip(exp, lexp))
    return None


def _single_term(space, field, term, c):
    pos, exp = term
    comps = [Poly.zero(field)] * space.rank
    comps[pos] = Poly(field, {exp: c})
    return FreeElement(space, comps)


def normal_form(f, gb, order=None):
    """Fully reduce f: no term of the result is divisible by any lead term.

    Idempotent; for a reduced basis the result is the unique normal form.
    """
    if isinstance(gb, GroebnerBasis):
        gens = gb.generators
        leads = gb._leads
        order = gb.order
    else:
        gens = tuple(gb)
        leads = tuple((g.lead_term(order), g.coeff(g.lead_term(order))) for g in gens)
    if f.is_zero() or not gens:
        return f
    field = f.comps[0].field
    space = f.space
    work = f
    done = []
    while not work.is_zero():
        t = work.lead_term(order)
        c = work.coeff(t)
        for g, (lt, lc) in zip(gens, leads):
            q = divide_term(t, lt)
            if q is not None:
                work = work - g.mul_term(q, field.div(c, lc))
                break
        else:
            done.append((t, c))
            work = work - _single_term(space, field, t, c)
    result = FreeElement.zero(space, field)
    for t, c in done:
        result = result + _single_term(space, field, t, c)
    return result


def _augment_with_relations(gens, ring, space):
    extra = []
    for rel in ring.relations:
        for pos in range(space.rank):
            comps = [ring.zero()] * space.rank
            comps[pos] = rel
            extra.append(FreeElement(space, comps))
    return list(gens) + extra


def _lcm_exp(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _buchberger_core(gens, order):
    """Run Buchberger on already-augmented generators; returns an unreduced basis."""
    G = [g.scale(g.comps[0].field.inv(g.coeff(g.lead_term(order)))) for g in gens if not g.is_zero()]
    if not G:
        return []
    field = G[0].comps[0].field
    rank_one = G[0].space.rank == 1
    leads = [g.lead_term(order) for g in G]

    pairs = []
    done = set()

    def push_pairs(j):
        pj, ej = leads[j]
        for i in range(j):
            pi, ei = leads[i]
            if pi != pj:
                continue
            lcm = _lcm_exp(ei, ej)
            pairs.append((sum(lcm), i, j, lcm))
        pairs.sort(key=lambda q: (q[0], q[1], q[2]), reverse=True)

    for j in range(len(G)):
        push_pairs(j)

    while pairs:
        _, i, j, lcm = pairs.pop()
        done.add((i, j))
        pi, ei = leads[i]
        _, ej = leads[j]
        # product criterion: only valid for ideals (single position)
        if rank_one and all(a + b == c for a, b, c in zip(ei, ej, lcm)):
            continue
        # chain criterion: a third lead dividing the lcm whose pairs were handled
        skip = False
        for k in range(len(G)):
            if k in (i, j):
                continue
            pk, ek = leads[k]
            if pk != pi or not all(a <= b for a, b in zip(ek, lcm)):
                continue
            pik = (min(i, k), max(i, k))
            pjk = (min(j, k), max(j, k))
            if pik in done and pjk in done:
                skip = True
                break
        if skip:
            continue
        fi, fj = G[i], G[j]
        s = fi.mul_term(tuple(a - b for a, b in zip(lcm, ei)), field.one) - fj.mul_term(
            tuple(a - b for a, b in zip(lcm, ej)), field.one
        )
        r = normal_form(s, G, order)
        if not r.is_zero():
            r = r.scale(field.inv(r.coeff(r.lead_term(order))))
            G.append(r)
            leads.append(r.lead_term(order))
            push_pairs(len(G) - 1)
    return G


def _reduce_basis(G, order):
    """Interreduce to the unique reduced basis: minimal leads, reduced tails, monic."""
    if not G:
        return []
    field = G[0].comps[0].field
    items = sorted(G, key=lambda g: order.term_key(g.lead_term(order)))
    minimal = []
    for g in items:
        lt = g.lead_term(order)
        if any(divide_term(lt, h.lead_term(order)) is not None for h in minimal):
            continue
        minimal.append(g)
    reduced = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1 :]
        r = normal_form(g, others, order) if others else g
        if not r.is_zero():
            reduced.append(r.scale(field.inv(r.coeff(r.lead_term(order)))))
    reduced.sort(key=lambda g: order.term_key(g.lead_term(order)))
    return reduced


def _coeff_to_text(c):
    return str(c)


def _coeff_from_text(field, text):
    if field.characteristic:
        return int(text) % field.characteristic
    return Fraction(text)


def serialize_basis(gb, space):
    return {
        "order": gb.order.rule,
        "base_rank": space.base_rank,
        "degree": space.degree,
        "generators": [
            [
                [[list(exp), _coeff_to_text(c)] for exp, c in sorted(p.terms.items())]
                for p in g.comps
            ]
            for g in gb.generators
        ],
    }


def deserialize_basis(data, ring, space, order):
    gens = []
    for comps in data["generators"]:
        polys = []
        for terms in comps:
            polys.append(
                Poly(
                    ring.field,
                    {tuple(exp): _coeff_from_text(ring.field, c) for exp, c in terms},
                )
            )
        gens.append(FreeElement(space, polys))
    return GroebnerBasis(order, gens, None)


def _disk_cached(key, ring, space, order, build):
    if CACHE_DIR is None:
        return build()
    name = hashlib.sha256(repr(key).encode()).hexdigest() + ".json"
    path = os.path.join(CACHE_DIR, name)
    if os.path.exists(path):
        with open(path) as fh:
            return deserialize_basis(json.load(fh), ring, space, order)
    gb = build()
    os.makedirs(CACHE_DIR, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(serialize_basis(gb, space), fh)
    return gb


def buchberger(gens, ring, space, order=POT):
    """Reduced Groebner basis of the submodule generated by gens over A = S/J.

    Results are cached on the ring by content; with a cache directory enabled
    they are also persisted content-addressed on disk.
    """
    gens = list(gens)
    for g in gens:
        if g.space != space:
            raise StructuralError("generators in different free modules")
    key = (
        "gb",
        space.base_rank,
        space.degree,
        order.rule,
        freeze_elements(gens),
        freeze_elements(
            [FreeElement(SymSpace(1, 1), [rel]) for rel in ring.relations]
        ),
    )

    def build():
        work = _augment_with_relations(gens, ring, space)
        basis = _reduce_basis(_buchberger_core(work, order), order)
        return GroebnerBasis(order, basis, key)

    return ring.cache(key, lambda: _disk_cached(key, ring, space, order, build))


def membership(f, gens, ring, order=POT):
    """Is f in the submodule generated by gens (together with J) over A?"""
    if f.is_zero():
        return True
    gb = buchberger(list(gens), ring, f.space, order)
    return normal_form(f, gb).is_zero()


def reduce_mod_relations(p, ring):
    """Canonical representative of p in A = S/J (identity when J = 0)."""
    if not ring.relations or p.is_zero():
        return p
    space = SymSpace(1, 1)
    gb = buchberger([], ring, space)
    nf = normal_form(FreeElement(space, [p]), gb)
    return nf.comps[0]


def is_local_unit(p, ring):
    """Does p have a nonzero constant term after reduction mod J?"""
    return not ring.field.is_zero(reduce_mod_relations(p, ring).constant_term())


def syzygies(gens, ring, space=None):
    """Generators of the module of relations among gens over A.

    Computed by elimination on the graph module: each generator c_i is paired
    with a unit vector e_i in a trailing block, relation generators J*e are
    added on the leading block only, and a position-over-term basis is taken.
    Basis elements supported entirely on the trailing block are exactly the
    syzygies (every relation over A is reachable this way because the J
    multiples make the leading part vanish as a polynomial identity).
    """
    gens = list(gens)
    if not gens:
        raise StructuralError("syzygies of an empty generator list")
    if space is None:
        space = gens[0].space
    n = len(gens)
    lead_rank = space.rank
    graph_space = SymSpace(lead_rank + n, 1)
    field = ring.field
    zero = ring.zero()

    graph_gens = []
    for i, c in enumerate(gens):
        comps = list(c.comps) + [zero] * n
        comps[lead_rank + i] = ring.one()
        graph_gens.append(FreeElement(graph_space, comps))
    for rel in ring.relations:
        for pos in range(lead_rank):
            comps = [zero] * (lead_rank + n)
            comps[pos] = rel
            graph_gens.append(FreeElement(graph_space, comps))

    basis = _reduce_basis(_buchberger_core(graph_gens, POT), POT)

    out_space = SymSpace(n, 1)
    out = []
    for g in basis:
        if all(g.comps[i].is_zero() for i in range(lead_rank)):
            comps = [reduce_mod_relations(p, ring) for p in g.comps[lead_rank:]]
            s = FreeElement(out_space, comps)
            if not s.is_zero():
                out.append(s)
    out.sort(key=lambda g: POT.term_key(g.lead_term(POT)))
    return SyzygyModule(n, out)


def verify_syzygy(s, gens, ring):
    """Check sum(s_i * c_i) reduces to zero in A, by direct expansion."""
    space = gens[0].space
    total = FreeElement.zero(space, ring.field)
    for coeff, c in zip(s.comps, gens):
        total = total + c.scale_poly(coeff)
    return all(reduce_mod_relations(p, ring).is_zero() for p in total.comps)


def s_pairs_reduce_to_zero(gb, ring, space):
    """Independent re-check of the Buchberger criterion on a computed basis."""
    gens = list(gb.generators) + _augment_with_relations([], ring, space)
    order = gb.order
    field = ring.field
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            ti = gens[i].lead_term(order)
            tj = gens[j].lead_term(order)
            if ti[0] != tj[0]:
                continue
            lcm = _lcm_exp(ti[1], tj[1])
            ci = gens[i].coeff(ti)
            cj = gens[j].coeff(tj)
            s = gens[i].mul_term(
                tuple(a - b for a, b in zip(lcm, ti[1])), field.inv(ci)
            ) - gens[j].mul_term(tuple(a - b for a, b in zip(lcm, tj[1])), field.inv(cj))
            if not normal_form(s, gens, order).is_zero():
                return False
    return True


def ideal_groebner(polys, ring):
    """Groebner basis of an ideal, as the rank-one module case."""
    space = SymSpace(1, 1)
    elems = [FreeElement(space, [p]) for p in polys if not p.is_zero()]
    return buchberger(elems, ring, space)


def ideal_membership(p, polys, ring):
    gb = ideal_groebner(polys, ring)
    return normal_form(FreeElement(SymSpace(1, 1), [p]), gb).is_zero()


def ideal_lead_exponents(polys, ring):
    gb = ideal_groebner(polys, ring)
    return [lt[1] for lt in gb.lead_terms()]


def staircase_count(lead_exps, nvars):
    """Number of monomials outside the monomial ideal of the given exponents.

    Returns None when the count is infinite (some variable has no pure power).
    """
    bounds = []
    for v in range(nvars):
        pures = [e[v] for e in lead_exps if all(x == 0 for i, x in enumerate(e) if i != v)]
        if not pures:
            return None
        bounds.append(min(pures))

    count = 0

    def rec(prefix, v):
        nonlocal count
        if v == nvars:
            exp = tuple(prefix)
            if not any(all(a >= b for a, b in zip(exp, lead)) for lead in lead_exps):
                count += 1
            return
        for e in range(bounds[v]):
            rec(prefix + [e], v + 1)

    rec([], 0)
    return count
