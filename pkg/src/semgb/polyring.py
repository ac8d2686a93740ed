"""Sparse multivariate polynomials with exact rational coefficients.

A :class:`Ring` carries the ordered variable names and a default
:class:`TermOrder`.  A :class:`Polynomial` is an immutable map from exponent
tuples to nonzero :class:`fractions.Fraction` coefficients.  Monomials are
plain tuples of nonnegative ints, one entry per ring variable; a variable is
referred to by its integer index into the ring.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

Monomial = tuple[int, ...]

__all__ = [
    "Monomial",
    "Ring",
    "TermOrder",
    "Polynomial",
    "RingMismatchError",
    "ZeroPolynomialError",
    "lex",
    "grevlex",
    "block_order",
    "compare",
    "leading_term",
    "arith",
    "substitute",
]


class RingMismatchError(ValueError):
    """Operands live in rings of different dimension or naming."""


class ZeroPolynomialError(ValueError):
    """The zero polynomial has no leading term."""


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    # gmpy2.mpq / mpz and friends
    if hasattr(c, "numerator") and hasattr(c, "denominator") and not isinstance(c, float):
        return Fraction(int(c.numerator), int(c.denominator))
    raise TypeError(f"inexact coefficient {c!r} ({type(c).__name__}) is not allowed")


# ---------------------------------------------------------------------------
# term orders
# ---------------------------------------------------------------------------

_INNER_KINDS = ("grevlex", "lex")


@dataclass(frozen=True)
class TermOrder:
    """A monomial order described by nonnegative 0/1 weight rows.

    ``kind`` is ``"lex"``, ``"grevlex"`` or ``"block"``.  For lex and
    grevlex, ``perm`` lists the variable indices from most to least
    significant (``None`` means ring order).  A block order holds
    ``blocks``: a tuple of ``(indices, inner_kind)`` pairs, earliest block
    most expensive.

    Every order here is realised as a matrix order whose rows are 0/1 vectors,
    so the sort key of a product is the sum of the keys.
    """

    kind: str
    perm: tuple[int, ...] | None = None
    blocks: tuple[tuple[tuple[int, ...], str], ...] = ()

    def __post_init__(self):
        if self.kind not in ("lex", "grevlex", "block"):
            raise ValueError(f"unknown term order kind {self.kind!r}")
        if self.kind == "block":
            if not self.blocks:
                raise ValueError("block order needs at least one block")
            seen: set[int] = set()
            for idx, inner in self.blocks:
                if inner not in _INNER_KINDS:
                    raise ValueError(f"unknown inner order {inner!r}")
                if not idx:
                    raise ValueError("empty block")
                if seen.intersection(idx) or len(set(idx)) != len(idx):
                    raise ValueError("blocks must be disjoint")
                seen.update(idx)
        elif self.perm is not None and len(set(self.perm)) != len(self.perm):
            raise ValueError("permutation has repeated variables")

    def _check_dim(self, n: int) -> None:
        if self.kind == "block":
            idx = sorted(i for b, _ in self.blocks for i in b)
            if idx != list(range(n)):
                raise RingMismatchError(f"blocks do not partition {n} variables")
        elif self.perm is not None and sorted(self.perm) != list(range(n)):
            raise RingMismatchError(f"permutation is not over {n} variables")

    def rows(self, n: int) -> tuple[tuple[int, ...], ...]:
        """Weight rows as index tuples; key component k is ``sum(e[i] for i in rows[k])``."""
        return _order_rows(self, n)

    def _rows(self, n: int) -> tuple[tuple[int, ...], ...]:
        self._check_dim(n)
        if self.kind == "block":
            out: list[tuple[int, ...]] = []
            for idx, inner in self.blocks:
                out.extend(_inner_rows(idx, inner))
            return tuple(out)
        perm = self.perm if self.perm is not None else tuple(range(n))
        return tuple(_inner_rows(perm, self.kind))

    def key(self, m: Sequence[int]) -> tuple[int, ...]:
        """Sort key: ``a < b`` in the order iff ``key(a) < key(b)``."""
        return _order_key(self, tuple(m))

    def compare(self, a: Sequence[int], b: Sequence[int]) -> int:
        if len(a) != len(b):
            raise RingMismatchError("monomials of different length")
        ka, kb = self.key(a), self.key(b)
        return (ka > kb) - (ka < kb)

    def restrict(self, keep: Sequence[int]) -> "TermOrder":
        """The induced order on the variables ``keep``, re-indexed 0..len(keep)-1."""
        pos = {v: i for i, v in enumerate(keep)}
        if self.kind == "block":
            blocks = []
            for idx, inner in self.blocks:
                sub = tuple(pos[i] for i in idx if i in pos)
                if sub:
                    blocks.append((sub, inner))
            if len(blocks) == 1 and blocks[0][0] == tuple(range(len(keep))):
                return TermOrder(blocks[0][1])
            return TermOrder("block", blocks=tuple(blocks))
        if self.perm is None:
            perm = tuple(pos[i] for i in sorted(keep))
        else:
            perm = tuple(pos[i] for i in self.perm if i in pos)
        if perm == tuple(range(len(keep))):
            perm = None
        return TermOrder(self.kind, perm=perm)

    def describe(self, names: Sequence[str] | None = None) -> str:
        def nm(i):
            return names[i] if names else f"x{i}"

        if self.kind == "block":
            parts = [f"{inner}({', '.join(nm(i) for i in idx)})" for idx, inner in self.blocks]
            return "block[" + " > ".join(parts) + "]"
        if self.perm is None:
            return self.kind
        return f"{self.kind}({' > '.join(nm(i) for i in self.perm)})"


@functools.lru_cache(maxsize=None)
def _order_rows(order: TermOrder, n: int) -> tuple[tuple[int, ...], ...]:
    return order._rows(n)


@functools.lru_cache(maxsize=1 << 18)
def _order_key(order: TermOrder, m: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(sum(m[i] for i in r) for r in _order_rows(order, len(m)))


def _inner_rows(idx: Sequence[int], kind: str) -> list[tuple[int, ...]]:
    idx = tuple(idx)
    if kind == "lex":
        return [(i,) for i in idx]
    # grevlex on x_1 > ... > x_k: (deg, deg - e_k, deg - e_{k-1}, ..., deg - e_2)
    rows = [idx]
    for t in range(len(idx) - 1, 0, -1):
        rows.append(idx[:t] + idx[t + 1:])
    return rows


def lex(perm: Sequence[int] | None = None) -> TermOrder:
    return TermOrder("lex", perm=None if perm is None else tuple(perm))


def grevlex(perm: Sequence[int] | None = None) -> TermOrder:
    return TermOrder("grevlex", perm=None if perm is None else tuple(perm))


def block_order(*blocks: Sequence[int] | tuple[Sequence[int], str]) -> TermOrder:
    """Elimination order; each block is either an index sequence (grevlex inside)
    or an ``(indices, "lex"|"grevlex")`` pair.  Empty blocks are dropped."""
    norm = []
    for b in blocks:
        if len(b) == 2 and isinstance(b[1], str):
            norm.append((tuple(b[0]), b[1]))
        else:
            norm.append((tuple(b), "grevlex"))
    norm = [b for b in norm if b[0]]
    return TermOrder("block", blocks=tuple(norm))


def compare(a: Monomial, b: Monomial, order: TermOrder) -> int:
    """-1, 0 or 1 as ``a`` is below, equal to, or above ``b``."""
    return order.compare(a, b)


# ---------------------------------------------------------------------------
# rings
# ---------------------------------------------------------------------------

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


class Ring:
    """Ordered list of variable names plus a default term order."""

    __slots__ = ("names", "order", "_index")

    def __init__(self, names: Iterable[str], order: TermOrder | None = None):
        names = tuple(names)
        for nm in names:
            if not _NAME_RE.fullmatch(nm):
                raise ValueError(f"bad variable name {nm!r}")
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self.names = names
        self.order = order if order is not None else grevlex()
        self.order._check_dim(len(names))
        self._index = {nm: i for i, nm in enumerate(names)}

    @property
    def ngens(self) -> int:
        return len(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def __eq__(self, other) -> bool:
        return isinstance(other, Ring) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"Ring({', '.join(self.names)}; {self.order.describe(self.names)})"

    def with_order(self, order: TermOrder) -> "Ring":
        return Ring(self.names, order)

    def index(self, var: int | str) -> int:
        if isinstance(var, str):
            try:
                return self._index[var]
            except KeyError:
                raise KeyError(f"no variable {var!r} in {self!r}") from None
        if not 0 <= var < len(self.names):
            raise IndexError(f"variable index {var} out of range")
        return var

    def var(self, var: int | str) -> "Polynomial":
        i = self.index(var)
        e = [0] * len(self.names)
        e[i] = 1
        return Polynomial._raw(self, {tuple(e): Fraction(1)})

    def gens(self) -> tuple["Polynomial", ...]:
        return tuple(self.var(i) for i in range(len(self.names)))

    def zero(self) -> "Polynomial":
        return Polynomial._raw(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c) -> "Polynomial":
        c = _as_fraction(c)
        if c == 0:
            return self.zero()
        return Polynomial._raw(self, {(0,) * len(self.names): c})

    def monomial(self, exps: Sequence[int], coeff=1) -> "Polynomial":
        return Polynomial(self, {tuple(exps): coeff})

    def parse(self, text: str) -> "Polynomial":
        """Inverse of :meth:`Polynomial.render` (ASCII names)."""
        return _parse(self, text)


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


class Polynomial:
    """Immutable sparse polynomial over the rationals."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[Sequence[int], object] | None = None):
        n = len(ring.names)
        clean: dict[Monomial, Fraction] = {}
        for m, c in (terms or {}).items():
            m = tuple(int(e) for e in m)
            if len(m) != n:
                raise RingMismatchError(f"monomial {m} has wrong length for {n} variables")
            if any(e < 0 for e in m):
                raise ValueError(f"negative exponent in {m}")
            c = _as_fraction(c)
            c = clean.get(m, 0) + c
            if c:
                clean[m] = c
            else:
                clean.pop(m, None)
        self.ring = ring
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring: Ring, terms: dict[Monomial, Fraction]) -> "Polynomial":
        obj = cls.__new__(cls)
        obj.ring = ring
        obj._terms = terms
        obj._hash = None
        return obj

    # -- container-ish ------------------------------------------------------
    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get((0,) * len(self.ring.names), Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring.names, frozenset(self._terms.items())))
        return self._hash

    # -- arithmetic ----------------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise RingMismatchError("polynomials from different rings")
            return other
        return self.ring.const(other)

    def __add__(self, other) -> "Polynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                del out[m]
        return Polynomial._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.ring, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            try:
                c = _as_fraction(other)
            except TypeError:
                return NotImplemented
            if c == 0:
                return self.ring.zero()
            return Polynomial._raw(self.ring, {m: v * c for m, v in self._terms.items()})
        other = self._coerce(other)
        out: dict[Monomial, Fraction] = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                m = tuple(x + y for x, y in zip(ma, mb))
                v = out.get(m, 0) + ca * cb
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Polynomial._raw(self.ring, out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Polynomial":
        c = _as_fraction(other)
        if c == 0:
            raise ZeroDivisionError("division by zero")
        return self * (1 / c)

    def __pow__(self, k: int) -> "Polynomial":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative int")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mul_term(self, m: Sequence[int], c) -> "Polynomial":
        c = _as_fraction(c)
        if c == 0:
            return self.ring.zero()
        return Polynomial._raw(
            self.ring,
            {tuple(x + y for x, y in zip(mm, m)): cc * c for mm, cc in self._terms.items()},
        )

    # -- order-dependent -----------------------------------------------------
    def sorted_terms(self, order: TermOrder | None = None) -> list[tuple[Monomial, Fraction]]:
        """Terms, largest first."""
        order = order or self.ring.order
        rows = order.rows(len(self.ring.names))
        return sorted(
            self._terms.items(),
            key=lambda t: tuple(sum(t[0][i] for i in r) for r in rows),
            reverse=True,
        )

    def leading_term(self, order: TermOrder | None = None) -> tuple[Monomial, Fraction]:
        if not self._terms:
            raise ZeroPolynomialError("the zero polynomial has no leading term")
        order = order or self.ring.order
        rows = order.rows(len(self.ring.names))
        m = max(self._terms, key=lambda e: tuple(sum(e[i] for i in r) for r in rows))
        return m, self._terms[m]

    def leading_monomial(self, order: TermOrder | None = None) -> Monomial:
        return self.leading_term(order)[0]

    def leading_coefficient(self, order: TermOrder | None = None) -> Fraction:
        return self.leading_term(order)[1]

    def monic(self, order: TermOrder | None = None) -> "Polynomial":
        if not self._terms:
            return self
        return self / self.leading_coefficient(order)

    def primitive(self, order: TermOrder | None = None) -> "Polynomial":
        """Integer coefficients with content 1 and positive leading coefficient."""
        if not self._terms:
            return self
        from math import gcd, lcm

        den = lcm(*(c.denominator for c in self._terms.values()))
        num = gcd(*(c.numerator * (den // c.denominator) for c in self._terms.values()))
        scale = Fraction(den, num)
        if self.leading_coefficient(order) < 0:
            scale = -scale
        return self * scale

    # -- structure -----------------------------------------------------------
    def variables(self) -> set[int]:
        return {i for m in self._terms for i, e in enumerate(m) if e}

    def degree(self, var: int | str | None = None) -> int:
        """Total degree, or degree in one variable; -1 for zero."""
        if not self._terms:
            return -1
        if var is None:
            return max(sum(m) for m in self._terms)
        i = self.ring.index(var)
        return max(m[i] for m in self._terms)

    def coefficients_in(self, var: int | str) -> dict[int, "Polynomial"]:
        """Split as ``sum(c_k * var**k)``; returns ``{k: c_k}`` with ``c_k`` free of var."""
        i = self.ring.index(var)
        parts: dict[int, dict[Monomial, Fraction]] = {}
        for m, c in self._terms.items():
            k = m[i]
            parts.setdefault(k, {})[m[:i] + (0,) + m[i + 1:]] = c
        return {k: Polynomial._raw(self.ring, t) for k, t in sorted(parts.items())}

    def change_ring(self, ring: Ring, mapping: Sequence[int | None] | None = None) -> "Polynomial":
        """Move into ``ring``; ``mapping[i]`` is the target index of source variable i
        (by default matched by name).  Variables mapped to ``None`` must not occur."""
        if mapping is None:
            mapping = [ring._index.get(nm) for nm in self.ring.names]
        n = len(ring.names)
        out: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            e = [0] * n
            for i, k in enumerate(m):
                if k:
                    j = mapping[i]
                    if j is None:
                        raise ValueError(f"variable {self.ring.names[i]} has no image in target ring")
                    e[j] += k
            t = tuple(e)
            out[t] = out.get(t, 0) + c
        return Polynomial(ring, out)

    # -- evaluation ----------------------------------------------------------
    def _value_vector(self, values: Mapping[int | str, object], partial: bool):
        n = len(self.ring.names)
        vec: list[Fraction | None] = [None] * n
        for k, v in values.items():
            vec[self.ring.index(k)] = _as_fraction(v)
        if not partial:
            missing = [self.ring.names[i] for i in sorted(self.variables()) if vec[i] is None]
            if missing:
                raise KeyError(f"no value for {', '.join(missing)}")
        return vec

    def substitute(self, values: Mapping[int | str, object]) -> Fraction:
        """Exact evaluation; every occurring variable must be assigned."""
        vec = self._value_vector(values, partial=False)
        total = Fraction(0)
        for m, c in self._terms.items():
            t = c
            for i, e in enumerate(m):
                if e:
                    t *= vec[i] ** e
            total += t
        return total

    __call__ = substitute

    def specialize(self, values: Mapping[int | str, object]) -> "Polynomial":
        """Substitute a subset of variables, keeping the rest symbolic."""
        vec = self._value_vector(values, partial=True)
        out: dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            e = list(m)
            for i, k in enumerate(m):
                if k and vec[i] is not None:
                    c *= vec[i] ** k
                    e[i] = 0
            t = tuple(e)
            out[t] = out.get(t, 0) + c
        return Polynomial(self.ring, out)

    def compose(self, images: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute polynomial ``images[i]`` (all in one common ring) for variable i."""
        if len(images) != len(self.ring.names):
            raise RingMismatchError("need one image per variable")
        target = images[0].ring if images else self.ring
        result = target.zero()
        powers: dict[tuple[int, int], Polynomial] = {}
        for m, c in self._terms.items():
            t = target.const(c)
            for i, e in enumerate(m):
                if e:
                    if (i, e) not in powers:
                        powers[(i, e)] = images[i] ** e
                    t = t * powers[(i, e)]
            result = result + t
        return result

    # -- printing ------------------------------------------------------------
    def render(self, order: TermOrder | None = None, names: Sequence[str] | None = None) -> str:
        """Terms descending by ``order``; e.g. ``s12*q - s13`` or ``1/3*x^2 + 2``."""
        if not self._terms:
            return "0"
        names = names or self.ring.names
        pieces = []
        for idx, (m, c) in enumerate(self.sorted_terms(order)):
            neg = c < 0
            a = -c if neg else c
            factors = []
            for i, e in enumerate(m):
                if e == 1:
                    factors.append(names[i])
                elif e:
                    factors.append(f"{names[i]}^{e}")
            body = "*".join(factors)
            if not body:
                body = str(a)
            elif a != 1:
                body = f"{a}*{body}"
            if idx == 0:
                pieces.append(("-" if neg else "") + body)
            else:
                pieces.append((" - " if neg else " + ") + body)
        return "".join(pieces)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"Polynomial({self.render()!r})"


_TERM_RE = re.compile(r"\s*([+-])?\s*([^+\-]+)")


def _parse(ring: Ring, text: str) -> Polynomial:
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial text")
    if s == "0":
        return ring.zero()
    n = len(ring.names)
    terms: dict[Monomial, Fraction] = {}
    pos = 0
    first = True
    while pos < len(s):
        mt = _TERM_RE.match(s, pos)
        if not mt or (mt.group(1) is None and not first):
            raise ValueError(f"cannot parse polynomial at {s[pos:]!r}")
        first = False
        sign = -1 if mt.group(1) == "-" else 1
        coeff = Fraction(sign)
        exps = [0] * n
        for factor in mt.group(2).strip().split("*"):
            factor = factor.strip()
            if not factor:
                raise ValueError(f"empty factor in {text!r}")
            if factor[0].isdigit():
                coeff *= Fraction(factor)
                continue
            name, _, power = factor.partition("^")
            exps[ring.index(name.strip())] += int(power) if power else 1
        m = tuple(exps)
        terms[m] = terms.get(m, 0) + coeff
        pos = mt.end()
    return Polynomial(ring, terms)


# ---------------------------------------------------------------------------
# functional surface
# ---------------------------------------------------------------------------


def leading_term(f: Polynomial, order: TermOrder | None = None) -> tuple[Monomial, Fraction]:
    return f.leading_term(order)


def arith(f: Polynomial, g: Polynomial, op: str) -> Polynomial:
    if f.ring != g.ring:
        raise RingMismatchError("polynomials from different rings")
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown op {op!r}")


def substitute(f: Polynomial, values: Mapping[int | str, object]) -> Fraction:
    return f.substitute(values)
