"""Exact coefficient fields, sparse polynomials, monomial orders, and ring presentations.

A ring presentation describes a localized affine algebra A = (k[x_1..x_d]/J)
at the maximal ideal generated by all variables.  Every object downstream
(free modules, symmetric powers, Groebner data, truncations) is built from
the types here.  All values are immutable after construction and safe to
share between concurrent tasks.
"""

from fractions import Fraction
from functools import lru_cache

from .errors import StructuralError

DEFAULT_PRIME = 32003

LT, EQ, GT = -1, 0, 1


def _is_prime(p):
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


class FieldSpec:
    """The coefficient field: QQ or a prime field GF(p).

    Coefficients are plain values: Fraction over QQ (auto gcd-reduced with
    positive denominator), ints in [0, p) over GF(p).
    """

    __slots__ = ("kind", "characteristic")

    def __init__(self, kind, characteristic):
        if kind == "rationals":
            if characteristic != 0:
                raise StructuralError("rationals have characteristic 0")
        elif kind == "prime_field":
            if not _is_prime(characteristic):
                raise StructuralError(f"{characteristic} is not prime")
        else:
            raise StructuralError(f"unknown field kind {kind!r}")
        self.kind = kind
        self.characteristic = characteristic

    @classmethod
    def rationals(cls):
        return cls("rationals", 0)

    @classmethod
    def prime_field(cls, p=None):
        return cls("prime_field", DEFAULT_PRIME if p is None else p)

    @property
    def zero(self):
        return Fraction(0) if self.characteristic == 0 else 0

    @property
    def one(self):
        return Fraction(1) if self.characteristic == 0 else 1

    def of_int(self, n, d=1):
        if self.characteristic == 0:
            return Fraction(n, d)
        p = self.characteristic
        num = n % p
        if d == 1:
            return num
        return num * self.inv(d % p) % p

    def add(self, a, b):
        c = a + b
        return c if self.characteristic == 0 else c % self.characteristic

    def sub(self, a, b):
        c = a - b
        return c if self.characteristic == 0 else c % self.characteristic

    def mul(self, a, b):
        c = a * b
        return c if self.characteristic == 0 else c % self.characteristic

    def neg(self, a):
        return -a if self.characteristic == 0 else (-a) % self.characteristic

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("field inverse of zero")
        if self.characteristic == 0:
            return 1 / a
        return pow(a, self.characteristic - 2, self.characteristic)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a):
        return a == 0

    def __eq__(self, other):
        return (
            isinstance(other, FieldSpec)
            and self.kind == other.kind
            and self.characteristic == other.characteristic
        )

    def __hash__(self):
        return hash((self.kind, self.characteristic))

    def __repr__(self):
        return "QQ" if self.characteristic == 0 else f"GF({self.characteristic})"


@lru_cache(maxsize=None)
def grevlex_key(exp):
    """Sort key under graded reverse lexicographic order; larger key = larger monomial."""
    return (sum(exp), tuple(-e for e in reversed(exp)))


def monomial_compare(a, b):
    """Compare exponent vectors under grevlex; returns LT, EQ, or GT."""
    if len(a) != len(b):
        raise StructuralError("exponent vectors of unequal length")
    ka, kb = grevlex_key(a), grevlex_key(b)
    if ka < kb:
        return LT
    if ka > kb:
        return GT
    return EQ


class ModuleOrder:
    """Order on module terms (position, exponent vector).

    position-over-term: lower position dominates; term-over-position: grevlex
    on the monomial first, lower position breaking ties.  Both are global.
    """

    __slots__ = ("rule",)

    POSITION_OVER_TERM = "position-over-term"
    TERM_OVER_POSITION = "term-over-position"

    def __init__(self, rule=POSITION_OVER_TERM):
        if rule not in (self.POSITION_OVER_TERM, self.TERM_OVER_POSITION):
            raise StructuralError(f"unknown module rule {rule!r}")
        self.rule = rule

    def term_key(self, term):
        pos, exp = term
        if self.rule == self.POSITION_OVER_TERM:
            return (-pos, grevlex_key(exp))
        return (grevlex_key(exp), -pos)

    def compare(self, s, t):
        ks, kt = self.term_key(s), self.term_key(t)
        return LT if ks < kt else GT if ks > kt else EQ

    def __eq__(self, other):
        return isinstance(other, ModuleOrder) and self.rule == other.rule

    def __hash__(self):
        return hash(self.rule)

    def __repr__(self):
        return f"ModuleOrder({self.rule})"


POT = ModuleOrder(ModuleOrder.POSITION_OVER_TERM)
TOP = ModuleOrder(ModuleOrder.TERM_OVER_POSITION)


class Poly:
    """Sparse exact polynomial: map from exponent tuple to nonzero coefficient."""

    __slots__ = ("field", "terms")

    def __init__(self, field, terms):
        # terms is trusted: already normalized, no zero coefficients
        self.field = field
        self.terms = terms

    @classmethod
    def from_terms(cls, field, items):
        terms = {}
        for exp, c in items:
            exp = tuple(exp)
            c = terms.get(exp, field.zero) + c
            if field.characteristic:
                c %= field.characteristic
            if c:
                terms[exp] = c
            elif exp in terms:
                del terms[exp]
        return cls(field, terms)

    @classmethod
    def zero(cls, field):
        return cls(field, {})

    @classmethod
    def constant(cls, field, c, nvars):
        c = field.of_int(c) if isinstance(c, int) else c
        return cls(field, {(0,) * nvars: c} if c else {})

    @classmethod
    def variable(cls, field, i, nvars):
        exp = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(field, {exp: field.one})

    def is_zero(self):
        return not self.terms

    def nvars(self):
        for exp in self.terms:
            return len(exp)
        return None

    def __eq__(self, other):
        return (
            isinstance(other, Poly)
            and self.field == other.field
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        self._check(other)
        terms = dict(self.terms)
        add = self.field.add
        for exp, c in other.terms.items():
            s = add(terms.get(exp, self.field.zero), c)
            if s:
                terms[exp] = s
            elif exp in terms:
                del terms[exp]
        return Poly(self.field, terms)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        neg = self.field.neg
        return Poly(self.field, {e: neg(c) for e, c in self.terms.items()})

    def __mul__(self, other):
        self._check(other)
        field = self.field
        mul, add = field.mul, field.add
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                s = add(out.get(exp, field.zero), mul(c1, c2))
                if s:
                    out[exp] = s
                elif exp in out:
                    del out[exp]
        return Poly(field, out)

    def scale(self, c):
        if self.field.is_zero(c):
            return Poly(self.field, {})
        mul = self.field.mul
        return Poly(self.field, {e: mul(c, v) for e, v in self.terms.items()})

    def mul_term(self, exp, c):
        """Multiply by the single term c * x^exp."""
        if self.field.is_zero(c):
            return Poly(self.field, {})
        mul = self.field.mul
        return Poly(
            self.field,
            {tuple(a + b for a, b in zip(e, exp)): mul(c, v) for e, v in self.terms.items()},
        )

    def constant_term(self):
        for exp, c in self.terms.items():
            if not any(exp):
                return c
        return self.field.zero

    def total_degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def lead_exp(self):
        return max(self.terms, key=grevlex_key)

    def lead_coeff(self):
        return self.terms[self.lead_exp()]

    def monic(self):
        if not self.terms:
            return self
        return self.scale(self.field.inv(self.lead_coeff()))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def _check(self, other):
        if self.field != other.field:
            raise StructuralError("mixed coefficient fields")

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for exp, c in self.sorted_terms():
            mono = "*".join(
                f"x{i}^{e}" if e > 1 else f"x{i}" for i, e in enumerate(exp) if e
            )
            bits.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(bits)


def _monomials_of_degree(nvars, degree):
    """All exponent tuples of the given total degree, grevlex-descending."""
    if nvars == 0:
        return [()] if degree == 0 else []
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining, -1, -1):
            rec(prefix + (e,), remaining - e, slots - 1)

    rec((), degree, nvars)
    out.sort(key=grevlex_key, reverse=True)
    return out


def monomials_below_degree(nvars, bound):
    """All exponent tuples of total degree < bound, grevlex-descending degree by degree."""
    out = []
    for deg in range(bound):
        out.extend(_monomials_of_degree(nvars, deg))
    return out


class SymSpace:
    """A free module identified with a graded piece of Sym(F), F = A^base_rank.

    degree 1 is F itself; degree s has basis the degree-s monomials in the
    t-variables, listed grevlex-descending.  degree 0 is the ring A.
    """

    __slots__ = ("base_rank", "degree", "basis", "index")

    def __init__(self, base_rank, degree):
        if base_rank < 1 or degree < 0:
            raise StructuralError("base rank must be >= 1, degree >= 0")
        self.base_rank = base_rank
        self.degree = degree
        self.basis = tuple(_monomials_of_degree(base_rank, degree))
        self.index = {exp: i for i, exp in enumerate(self.basis)}

    @property
    def rank(self):
        return len(self.basis)

    def product_space(self, other):
        if self.base_rank != other.base_rank:
            raise StructuralError("symmetric powers over different free modules")
        return SymSpace(self.base_rank, self.degree + other.degree)

    def __eq__(self, other):
        return (
            isinstance(other, SymSpace)
            and self.base_rank == other.base_rank
            and self.degree == other.degree
        )

    def __hash__(self):
        return hash((self.base_rank, self.degree))

    def __repr__(self):
        return f"Sym^{self.degree}(A^{self.base_rank})"


def free_space(rank):
    """The plain free module A^rank, i.e. Sym^1 of A^rank."""
    return SymSpace(rank, 1)


class FreeElement:
    """Element of a SymSpace: one polynomial component per basis position."""

    __slots__ = ("space", "comps")

    def __init__(self, space, comps):
        comps = tuple(comps)
        if len(comps) != space.rank:
            raise StructuralError("component count does not match the ambient rank")
        self.space = space
        self.comps = comps

    @classmethod
    def zero(cls, space, field):
        z = Poly.zero(field)
        return cls(space, (z,) * space.rank)

    @classmethod
    def basis_vector(cls, space, field, nvars, pos):
        comps = [Poly.zero(field)] * space.rank
        comps[pos] = Poly.constant(field, 1, nvars)
        return cls(space, comps)

    def is_zero(self):
        return all(p.is_zero() for p in self.comps)

    def __eq__(self, other):
        return (
            isinstance(other, FreeElement)
            and self.space == other.space
            and self.comps == other.comps
        )

    def __hash__(self):
        return hash((self.space, self.comps))

    def __add__(self, other):
        self._check(other)
        return FreeElement(self.space, tuple(a + b for a, b in zip(self.comps, other.comps)))

    def __sub__(self, other):
        self._check(other)
        return FreeElement(self.space, tuple(a - b for a, b in zip(self.comps, other.comps)))

    def __neg__(self):
        return FreeElement(self.space, tuple(-p for p in self.comps))

    def scale_poly(self, p):
        return FreeElement(self.space, tuple(p * c for c in self.comps))

    def scale(self, c):
        return FreeElement(self.space, tuple(p.scale(c) for p in self.comps))

    def mul_term(self, exp, c):
        return FreeElement(self.space, tuple(p.mul_term(exp, c) for p in self.comps))

    def iter_terms(self):
        for pos, p in enumerate(self.comps):
            for exp, c in p.terms.items():
                yield (pos, exp), c

    def lead_term(self, order):
        """Largest (position, exponent) term under the module order; None if zero."""
        best = None
        best_key = None
        for term, _ in self.iter_terms():
            k = order.term_key(term)
            if best_key is None or k > best_key:
                best, best_key = term, k
        return best

    def coeff(self, term):
        pos, exp = term
        return self.comps[pos].terms.get(exp)

    def total_degree(self):
        degs = [p.total_degree() for p in self.comps if not p.is_zero()]
        return max(degs) if degs else -1

    def _check(self, other):
        if self.space != other.space:
            raise StructuralError("elements of different free modules")

    def __repr__(self):
        return f"FreeElement({self.space}, {list(self.comps)})"


class RingPresentation:
    """A local ring A = (k[x_1..x_d]/J) localized at m = (x_1..x_d).

    relations generate J and must lie in m (zero constant term).  The cm flag
    records a user assertion that A is Cohen-Macaulay; presentations with no
    relations are regular and hence always CM.
    """

    __slots__ = ("field", "vars", "relations", "cm", "_caches")

    def __init__(self, field, vars, relations=(), cm=False):
        vars = tuple(vars)
        if not vars:
            raise StructuralError("a ring presentation needs at least one variable")
        if len(set(vars)) != len(vars):
            raise StructuralError("duplicate variable names")
        relations = tuple(relations)
        for rel in relations:
            if rel.is_zero():
                raise StructuralError("zero relation")
            if not rel.field == field:
                raise StructuralError("relation over the wrong field")
            if not field.is_zero(rel.constant_term()):
                raise StructuralError("relation has a unit constant term")
        self.field = field
        self.vars = vars
        self.relations = relations
        self.cm = cm or not relations
        self._caches = {}

    @property
    def nvars(self):
        return len(self.vars)

    @property
    def is_regular(self):
        return not self.relations

    def zero(self):
        return Poly.zero(self.field)

    def one(self):
        return Poly.constant(self.field, 1, self.nvars)

    def constant(self, c):
        return Poly.constant(self.field, c, self.nvars)

    def variable(self, i):
        if isinstance(i, str):
            i = self.vars.index(i)
        return Poly.variable(self.field, i, self.nvars)

    def monomial(self, exp, c=1):
        c = self.field.of_int(c) if isinstance(c, int) else c
        if self.field.is_zero(c):
            return self.zero()
        return Poly(self.field, {tuple(exp): c})

    def free_element(self, space, comps):
        return FreeElement(space, comps)

    def same_ring(self, other):
        return (
            self.field == other.field
            and self.vars == other.vars
            and self.relations == other.relations
        )

    def render_poly(self, p):
        if p.is_zero():
            return "0"
        bits = []
        for exp, c in p.sorted_terms():
            mono = "*".join(
                (f"{self.vars[i]}^{e}" if e > 1 else self.vars[i])
                for i, e in enumerate(exp)
                if e
            )
            if mono and c == self.field.one:
                term = mono
            elif mono and c == self.field.of_int(-1):
                term = f"-{mono}"
            elif mono:
                term = f"{c}*{mono}"
            else:
                term = f"{c}"
            bits.append(term)
        text = " + ".join(bits)
        return text.replace("+ -", "- ")

    def render_element(self, f):
        return "[" + ", ".join(self.render_poly(p) for p in f.comps) + "]"

    def cache(self, key, build):
        """Content-addressed fill-once cache slot (concurrent readers, one writer)."""
        try:
            return self._caches[key]
        except KeyError:
            value = build()
            self._caches[key] = value
            return value

    def __repr__(self):
        rel = ""
        if self.relations:
            rel = " / (" + ", ".join(self.render_poly(r) for r in self.relations) + ")"
        return f"{self.field}[{', '.join(self.vars)}]{rel}"
