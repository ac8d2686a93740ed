"""Division, Buchberger's algorithm, reduced Groebner bases and elimination.

The public functions take and return :class:`~semgb.polyring.Polynomial`
objects.  Internally Buchberger runs on a packed representation: each
monomial becomes two Python ints, an order key whose integer comparison is
the term order and an exponent word with a guard bit per variable for
constant-time divisibility tests.  Both encodings are additive, so
multiplying by a monomial is an integer addition.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpq, mpz

from .polyring import (
    Polynomial,
    Ring,
    RingMismatchError,
    TermOrder,
    block_order,
)

__all__ = [
    "Budget",
    "ResourceLimitExceeded",
    "IdealGens",
    "GroebnerBasis",
    "divide",
    "s_polynomial",
    "buchberger",
    "eliminate",
    "ideal_membership",
    "normal_form",
    "is_groebner",
]


class ResourceLimitExceeded(RuntimeError):
    """A Groebner computation ran out of its time or S-pair budget."""

    def __init__(self, reason: str, pairs: int = 0, seconds: float = 0.0):
        super().__init__(reason)
        self.reason = reason
        self.pairs = pairs
        self.seconds = seconds


@dataclass(frozen=True)
class Budget:
    """Per-computation limits; ``None`` disables a limit."""

    max_seconds: float | None = 600.0
    max_pairs: int | None = None

    def scaled(self, factor: float) -> "Budget":
        return Budget(
            None if self.max_seconds is None else self.max_seconds * factor,
            None if self.max_pairs is None else int(self.max_pairs * factor),
        )


UNLIMITED = Budget(None, None)


class _Clock:
    __slots__ = ("budget", "start", "deadline", "pairs")

    def __init__(self, budget: Budget | None):
        self.budget = budget or UNLIMITED
        self.start = time.perf_counter()
        s = self.budget.max_seconds
        self.deadline = None if s is None else self.start + s
        self.pairs = 0

    def check(self) -> None:
        if self.deadline is not None and time.perf_counter() > self.deadline:
            raise ResourceLimitExceeded(
                f"time budget of {self.budget.max_seconds}s exceeded",
                self.pairs,
                time.perf_counter() - self.start,
            )

    def tick_pair(self) -> None:
        self.pairs += 1
        mp = self.budget.max_pairs
        if mp is not None and self.pairs > mp:
            raise ResourceLimitExceeded(
                f"S-pair budget of {mp} exceeded", self.pairs, time.perf_counter() - self.start
            )
        self.check()


@dataclass(frozen=True)
class IdealGens:
    generators: tuple[Polynomial, ...]
    ring: Ring
    order: TermOrder

    def __init__(self, generators: Iterable[Polynomial], ring: Ring | None = None,
                 order: TermOrder | None = None):
        gens = tuple(generators)
        if ring is None:
            if not gens:
                raise ValueError("ring required for an empty generator list")
            ring = gens[0].ring
        for g in gens:
            if g.ring != ring:
                raise RingMismatchError("generator from a different ring")
            if g.is_zero():
                raise ValueError("zero generator")
        order = order or ring.order
        order.rows(ring.ngens)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "order", order)

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)


@dataclass(frozen=True)
class GroebnerBasis:
    """Groebner basis; when ``reduced`` the elements are monic and sorted by
    ascending leading monomial, which makes the representation unique."""

    elements: tuple[Polynomial, ...]
    ring: Ring
    order: TermOrder
    reduced: bool = True
    pairs_processed: int = field(default=0, compare=False)
    seconds: float = field(default=0.0, compare=False)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def leading_monomials(self):
        return [g.leading_monomial(self.order) for g in self.elements]

    def is_unit_ideal(self) -> bool:
        return len(self.elements) == 1 and self.elements[0].is_constant()

    def render(self, names=None) -> list[str]:
        return [g.render(self.order, names) for g in self.elements]


# ---------------------------------------------------------------------------
# textbook division (reference implementation, Fraction arithmetic)
# ---------------------------------------------------------------------------


def _divides(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def divide(f: Polynomial, divisors: Sequence[Polynomial], order: TermOrder | None = None):
    """Multivariate division; returns ``(quotients, remainder)``.

    ``f == sum(q*d) + r`` and no term of ``r`` is divisible by a leading
    monomial of a divisor.  The first applicable divisor is always used.
    """
    ring = f.ring
    order = order or ring.order
    for d in divisors:
        if d.ring != ring:
            raise RingMismatchError("divisor from a different ring")
        if d.is_zero():
            raise ZeroDivisionError("zero divisor")
    # exact arithmetic runs on mpq internally; results convert back to Fraction
    leads = []
    dterms = []
    for d in divisors:
        dm, dc = d.leading_term(order)
        leads.append((dm, mpq(dc.numerator, dc.denominator)))
        dterms.append([(m, mpq(c.numerator, c.denominator)) for m, c in d.terms.items()])
    quotients = [dict() for _ in divisors]
    remainder: dict = {}
    p = {m: mpq(c.numerator, c.denominator) for m, c in f.terms.items()}
    # max-heap of negated order keys; stale entries are skipped on pop
    heap = [(tuple(-x for x in order.key(m)), m) for m in p]
    heapq.heapify(heap)
    while p:
        _, m = heapq.heappop(heap)
        c = p.get(m)
        if c is None:
            continue
        for i, (dm, dc) in enumerate(leads):
            if _divides(dm, m):
                qm = tuple(x - y for x, y in zip(m, dm))
                qc = c / dc
                quotients[i][qm] = quotients[i].get(qm, 0) + qc
                for dmon, dcoef in dterms[i]:
                    t = tuple(x + y for x, y in zip(dmon, qm))
                    old = p.get(t)
                    v = (old or 0) - qc * dcoef
                    if v:
                        p[t] = v
                        if old is None:
                            heapq.heappush(heap, (tuple(-x for x in order.key(t)), t))
                    else:
                        p.pop(t, None)
                break
        else:
            remainder[m] = c
            del p[m]
    return ([Polynomial(ring, _to_fractions(q)) for q in quotients],
            Polynomial(ring, _to_fractions(remainder)))


def _to_fractions(terms: dict) -> dict:
    return {m: Fraction(int(c.numerator), int(c.denominator)) for m, c in terms.items() if c}


def s_polynomial(f: Polynomial, g: Polynomial, order: TermOrder | None = None) -> Polynomial:
    order = order or f.ring.order
    mf, cf = f.leading_term(order)
    mg, cg = g.leading_term(order)
    lcm = tuple(max(a, b) for a, b in zip(mf, mg))
    return (f.mul_term(tuple(l - a for l, a in zip(lcm, mf)), 1 / cf)
            - g.mul_term(tuple(l - b for l, b in zip(lcm, mg)), 1 / cg))


def is_groebner(polys: Sequence[Polynomial], order: TermOrder | None = None) -> bool:
    """Post-hoc check: every pairwise S-polynomial divides to remainder 0.

    Pairs with coprime leading monomials are skipped; their S-polynomials
    always reduce to zero (Buchberger's first criterion).
    """
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        return True
    order = order or polys[0].ring.order
    leads = [p.leading_monomial(order) for p in polys]
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            if all(a == 0 or b == 0 for a, b in zip(leads[i], leads[j])):
                continue
            _, r = divide(s_polynomial(polys[i], polys[j], order), polys, order)
            if not r.is_zero():
                return False
    return True


# ---------------------------------------------------------------------------
# packed kernel
# ---------------------------------------------------------------------------

_KEY_BITS = 24   # per order-key field
_EXP_BITS = 16   # per exponent field, top bit is the guard


class _Packer:
    """Encodes exponent tuples as (order key, guarded exponent word)."""

    def __init__(self, n: int, order: TermOrder):
        self.n = n
        self.rows = order.rows(n)
        nf = len(self.rows)
        # weight of variable i in the packed key
        self.key_weight = [0] * n
        for k, r in enumerate(self.rows):
            shift = _KEY_BITS * (nf - 1 - k)
            for i in r:
                self.key_weight[i] += 1 << shift
        self.exp_weight = [1 << (_EXP_BITS * i) for i in range(n)]
        self.guard = sum(1 << (_EXP_BITS * i + _EXP_BITS - 1) for i in range(n))
        self.field_mask = (1 << _EXP_BITS) - 1
        self.max_exp = (1 << (_EXP_BITS - 1)) - 1

    def pack(self, e: Sequence[int]) -> tuple[int, int]:
        k = 0
        p = 0
        for i, x in enumerate(e):
            if x:
                if x > self.max_exp:
                    raise OverflowError("exponent too large for packed kernel")
                k += x * self.key_weight[i]
                p += x * self.exp_weight[i]
        return k, p

    def unpack(self, p: int) -> tuple[int, ...]:
        fm = self.field_mask
        return tuple((p >> (_EXP_BITS * i)) & fm for i in range(self.n))


class _KPoly:
    """Kernel polynomial: terms sorted by descending key, integer content 1."""

    __slots__ = ("terms", "lk", "lp", "lc", "lexp", "sugar", "deg")

    def __init__(self, terms: list, packer: _Packer, sugar: int | None = None):
        self.terms = terms
        self.lk, self.lp, self.lc = terms[0]
        self.lexp = packer.unpack(self.lp)
        self.deg = max(_pdeg(t[1], packer) for t in terms)
        self.sugar = self.deg if sugar is None else max(sugar, self.deg)


def _pdeg(p: int, packer: _Packer) -> int:
    return sum(packer.unpack(p))


def _primitive(terms: list) -> list:
    """Scale mpq terms to integer coefficients, content 1, positive lead."""
    den = mpz(1)
    for _, _, c in terms:
        den = gmpy2.lcm(den, c.denominator)
    ints = [c.numerator * (den // c.denominator) for _, _, c in terms]
    g = mpz(0)
    for x in ints:
        g = gmpy2.gcd(g, x)
        if g == 1:
            break
    if ints[0] < 0:
        g = -g
    return [(k, p, mpq(x // g)) for (k, p, _), x in zip(terms, ints)]


def _reduce(terms: list, basis: list, guard: int, clock: _Clock | None, full: bool = True) -> list:
    """Normal form of ``terms`` modulo ``basis`` (list of _KPoly).

    Returns remaining terms sorted by descending key (mpq coefficients).
    With ``full=False`` stops at the first irreducible leading term.
    """
    coef: dict = {}
    pexp: dict = {}
    heap = []
    for k, p, c in terms:
        coef[k] = c
        pexp[k] = p
        heap.append(-k)
    heapq.heapify(heap)
    rem = []
    steps = 0
    while heap:
        k = -heapq.heappop(heap)
        c = coef.pop(k)
        if not c:
            continue
        p = pexp[k]
        for g in basis:
            if ((p | guard) - g.lp) & guard == guard:
                break
        else:
            rem.append((k, p, c))
            if not full:
                while heap:
                    k2 = -heapq.heappop(heap)
                    c2 = coef.pop(k2)
                    if c2:
                        rem.append((k2, pexp[k2], c2))
                return rem
            continue
        dk = k - g.lk
        dp = p - g.lp
        f = c / g.lc
        for gk, gp, gc in g.terms[1:]:
            nk = gk + dk
            old = coef.get(nk)
            if old is None:
                coef[nk] = -f * gc
                pexp[nk] = gp + dp
                heapq.heappush(heap, -nk)
            else:
                coef[nk] = old - f * gc
        steps += 1
        if clock is not None and not steps & 1023:
            clock.check()
    return rem


def _to_kernel(f: Polynomial, packer: _Packer) -> list:
    terms = []
    for m, c in f.terms.items():
        k, p = packer.pack(m)
        terms.append((k, p, mpq(c.numerator, c.denominator)))
    terms.sort(key=lambda t: t[0], reverse=True)
    return terms


def _from_kernel(terms: list, ring: Ring, packer: _Packer) -> Polynomial:
    return Polynomial._raw(
        ring,
        {packer.unpack(p): Fraction(int(c.numerator), int(c.denominator)) for _, p, c in terms},
    )


def _lcm_exp(a: tuple, b: tuple) -> tuple:
    return tuple(x if x > y else y for x, y in zip(a, b))


def _coprime(a: tuple, b: tuple) -> bool:
    return not any(x and y for x, y in zip(a, b))


def _spoly_terms(f: _KPoly, g: _KPoly, lk: int, lp: int) -> list:
    """S-polynomial of integer-content polys with the leading terms cancelled exactly."""
    # lc_g * (lcm/lm_f) * f - lc_f * (lcm/lm_g) * g, leading terms dropped
    a = g.lc
    b = f.lc
    fk, fp = lk - f.lk, lp - f.lp
    gk, gp = lk - g.lk, lp - g.lp
    coef: dict = {}
    pexp: dict = {}
    for k, p, c in f.terms[1:]:
        nk = k + fk
        coef[nk] = a * c
        pexp[nk] = p + fp
    for k, p, c in g.terms[1:]:
        nk = k + gk
        v = coef.get(nk, 0) - b * c
        coef[nk] = v
        pexp[nk] = p + gp
    out = [(k, pexp[k], c) for k, c in coef.items() if c]
    out.sort(key=lambda t: t[0], reverse=True)
    return out


def _buchberger_kernel(inputs: list, packer: _Packer, clock: _Clock, strategy: str):
    """Returns the reduced basis as a list of _KPoly (monic, ascending lead)."""
    guard = packer.guard
    polys: list[_KPoly] = []
    active: list[int] = []          # indices into polys forming current G
    pairs: dict = {}                # (i, j) -> heap entry, valid pairs only
    heap: list = []

    def update(h_idx: int) -> None:
        # Gebauer-Moeller installation of h (Becker-Weispfenning UPDATE)
        h = polys[h_idx]
        hexp = h.lexp
        cand = [(g_idx, _lcm_exp(hexp, polys[g_idx].lexp), _coprime(hexp, polys[g_idx].lexp))
                for g_idx in active]
        kept = []
        for pos, (g_idx, lcm, cop) in enumerate(cand):
            if not cop:
                if any(_divides(l2, lcm) for _, l2, _ in cand[pos + 1:]):
                    continue
                if any(_divides(l2, lcm) for _, l2, _ in kept):
                    continue
            kept.append((g_idx, lcm, cop))
        new_pairs = [(g_idx, lcm) for g_idx, lcm, cop in kept if not cop]
        for key in list(pairs):
            i, j = key
            lcm = pairs[key][-1]
            if (_divides(hexp, lcm)
                    and _lcm_exp(polys[i].lexp, hexp) != lcm
                    and _lcm_exp(polys[j].lexp, hexp) != lcm):
                del pairs[key]
        for g_idx, lcm in new_pairs:
            lk, lp = packer.pack(lcm)
            g = polys[g_idx]
            if strategy == "sugar":
                dl = sum(lcm)
                sug = max(h.sugar + dl - sum(hexp), g.sugar + dl - sum(g.lexp))
                ent = (sug, lk, h_idx, g_idx, lp, lcm)
            else:
                ent = (lk, h_idx, g_idx, lp, lcm)
            pairs[(g_idx, h_idx)] = ent
            heapq.heappush(heap, ent)
        active[:] = [g for g in active if not _divides(hexp, polys[g].lexp)]
        active.append(h_idx)

    def add(terms: list, sugar: int | None) -> bool:
        terms = _primitive(terms)
        h = _KPoly(terms, packer, sugar)
        polys.append(h)
        if h.lk == 0:   # nonzero constant: unit ideal
            return True
        update(len(polys) - 1)
        return False

    def current():
        return [polys[i] for i in active]

    for terms in inputs:
        clock.check()
        r = _reduce(terms, current(), guard, clock)
        if r and add(r, None):
            return [_KPoly([(0, 0, mpq(1))], packer)]

    while heap:
        ent = heapq.heappop(heap)
        if strategy == "sugar":
            sug, lk, h_idx, g_idx, lp, lcm = ent
        else:
            lk, h_idx, g_idx, lp, lcm = ent
            sug = None
        key = (g_idx, h_idx)
        if pairs.get(key) is not ent:
            continue
        del pairs[key]
        clock.tick_pair()
        s = _spoly_terms(polys[h_idx], polys[g_idx], lk, lp)
        if not s:
            continue
        r = _reduce(s, current(), guard, clock)
        if r and add(r, sug):
            return [_KPoly([(0, 0, mpq(1))], packer)]

    # interreduce tails; leads are already minimal
    basis = current()
    basis.sort(key=lambda g: g.lk)
    out = []
    for idx, g in enumerate(basis):
        others = basis[:idx] + basis[idx + 1:]
        tail = _reduce(g.terms[1:], others, guard, clock) if len(g.terms) > 1 else []
        terms = [g.terms[0]] + tail
        lc = g.lc
        terms = [(k, p, c / lc) for k, p, c in terms]
        out.append(_KPoly(terms, packer, g.sugar))
    return out


def buchberger(gens: IdealGens, budget: Budget | None = None, strategy: str = "sugar") -> GroebnerBasis:
    """Reduced Groebner basis of ``<gens>`` under ``gens.order``.

    ``strategy`` is ``"normal"`` (smallest lcm first) or ``"sugar"``.
    Raises :class:`ResourceLimitExceeded` when the budget runs out.
    """
    if strategy not in ("normal", "sugar"):
        raise ValueError(f"unknown selection strategy {strategy!r}")
    if not gens.generators:
        raise ValueError("empty generator list")
    ring, order = gens.ring, gens.order
    packer = _Packer(ring.ngens, order)
    clock = _Clock(budget)
    inputs = [_to_kernel(g, packer) for g in gens.generators]
    kb = _buchberger_kernel(inputs, packer, clock, strategy)
    elements = tuple(_from_kernel(g.terms, ring, packer) for g in kb)
    return GroebnerBasis(elements, ring, order, True, clock.pairs,
                         time.perf_counter() - clock.start)


def normal_form(f: Polynomial, gb: GroebnerBasis) -> Polynomial:
    """Remainder of ``f`` modulo a Groebner basis (unique for a GB)."""
    if f.ring != gb.ring:
        raise RingMismatchError("polynomial and basis in different rings")
    if f.is_zero():
        return f
    packer = _Packer(gb.ring.ngens, gb.order)
    basis = [_KPoly(_to_kernel(g, packer), packer) for g in gb.elements]
    r = _reduce(_to_kernel(f, packer), basis, packer.guard, None)
    return _from_kernel(r, gb.ring, packer)


def ideal_membership(f: Polynomial, gb: GroebnerBasis) -> bool:
    return normal_form(f, gb).is_zero()


def elimination_order(ring: Ring, drop: Iterable[int], order: TermOrder | None = None) -> TermOrder:
    """Block order with ``drop`` (grevlex inside) above the remaining variables,
    which keep the block structure induced from ``order``."""
    n = ring.ngens
    drop = sorted({ring.index(v) for v in drop})
    order = order or ring.order
    if order.kind == "block" and order.blocks and sorted(order.blocks[0][0]) == drop:
        return order
    keep = [i for i in range(n) if i not in set(drop)]
    blocks = [(tuple(drop), "grevlex")] if drop else []
    if keep:
        rest = order.restrict(keep)
        if rest.kind == "block":
            blocks += [(tuple(keep[i] for i in idx), inner) for idx, inner in rest.blocks]
        else:
            perm = rest.perm if rest.perm is not None else range(len(keep))
            blocks.append((tuple(keep[i] for i in perm), rest.kind))
    return block_order(*blocks)


def eliminate(gens: IdealGens, drop: Iterable[int | str], budget: Budget | None = None,
              strategy: str = "sugar", basis: GroebnerBasis | None = None):
    """Generators of ``<gens>`` intersected with the subring free of ``drop``.

    The result is an :class:`IdealGens` over the smaller ring whose generators
    form its reduced Groebner basis under the induced order.  Pass
    ``basis`` to reuse an already computed basis under the elimination order.
    """
    ring = gens.ring
    drop_idx = sorted({ring.index(v) for v in drop})
    order = elimination_order(ring, drop_idx, gens.order)
    gb = basis
    if gb is None:
        gb = buchberger(IdealGens(gens.generators, ring, order), budget, strategy)
    elif gb.order != order:
        raise ValueError("supplied basis is not under the elimination order")
    keep = [i for i in range(ring.ngens) if i not in set(drop_idx)]
    sub_ring = Ring([ring.names[i] for i in keep], order.restrict(keep))
    mapping = [None] * ring.ngens
    for new, old in enumerate(keep):
        mapping[old] = new
    dropped = set(drop_idx)
    kept = [g.change_ring(sub_ring, mapping) for g in gb.elements if not (g.variables() & dropped)]
    return IdealGens(kept, sub_ring, sub_ring.order)
