"""Polynomial parametrization of a linear SEM and its parameters of interest.

For a mixed graph the covariance matrix is ``(I - L)^-T W (I - L)^-1`` with
``L`` the edge-coefficient matrix and ``W`` the error covariance.  The inverse
is the finite sum ``I + L + ... + L^(m-1)`` because ``L`` is strictly upper
triangular.

Ring variables use ASCII names ``l12`` (edge coefficients), ``w11``/``w23``
(error covariances), ``q`` (the target) and ``s12`` (covariance coordinates).
:func:`pretty` maps them to the Greek forms used in reports.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np
from gmpy2 import mpq

from .polyring import Polynomial, Ring, block_order
from .semgraph import DirectedPath, MixedGraph, directed_paths, path_vertices

__all__ = [
    "ParamRing",
    "ParameterTarget",
    "sigma_polys",
    "total_effect_poly",
    "path_effect_polys",
    "all_targets",
    "omega_backsolve_numeric",
    "pretty",
    "param_ring",
]


def _pair(prefix: str, i: int, j: int) -> str:
    if i < 10 and j < 10:
        return f"{prefix}{i}{j}"
    return f"{prefix}{i}_{j}"


def lam(i: int, j: int) -> str:
    return _pair("l", i, j)


def omg(i: int, j: int) -> str:
    return _pair("w", min(i, j), max(i, j))


def sig(i: int, j: int) -> str:
    return _pair("s", min(i, j), max(i, j))


_GREEK = {"l": "λ", "w": "ω", "s": "σ"}


def pretty(name: str) -> str:
    """``s12`` -> ``σ12``; ``q`` stays ``q``."""
    if name and name[0] in _GREEK and name[1:2].isdigit():
        return _GREEK[name[0]] + name[1:].replace("_", ",")
    return name


@dataclass(frozen=True)
class ParamRing:
    """Variables ordered as the t-block (lambdas, then omegas), q, then the sigmas.

    The ring order is the elimination order t > q > sigma with grevlex inside
    the t and sigma blocks.
    """

    graph: MixedGraph

    @cached_property
    def lambda_names(self) -> tuple[str, ...]:
        return tuple(lam(i, j) for i, j in self.graph.sorted_directed)

    @cached_property
    def omega_names(self) -> tuple[str, ...]:
        g = self.graph
        out = []
        for i in g.vertices:
            for j in g.vertices:
                if i == j or (i < j and g.has_bidirected(i, j)):
                    out.append(omg(i, j))
        return tuple(out)

    @cached_property
    def sigma_names(self) -> tuple[str, ...]:
        m = self.graph.m
        return tuple(sig(i, j) for i in range(1, m + 1) for j in range(i, m + 1))

    @cached_property
    def t_names(self) -> tuple[str, ...]:
        return self.lambda_names + self.omega_names

    @cached_property
    def ring(self) -> Ring:
        names = self.t_names + ("q",) + self.sigma_names
        nt = len(self.t_names)
        order = block_order(range(nt), [nt], range(nt + 1, len(names)))
        return Ring(names, order)

    @cached_property
    def sigma_ring(self) -> Ring:
        """Ring of the covariance coordinates alone (grevlex)."""
        return Ring(self.sigma_names)

    @cached_property
    def qsigma_ring(self) -> Ring:
        """Ring (q, sigmas) with q above the grevlex sigma block."""
        names = ("q",) + self.sigma_names
        return Ring(names, block_order([0], range(1, len(names))))

    def __len__(self) -> int:
        g = self.graph
        m = g.m
        return len(g.directed) + m + len(g.bidirected) + 1 + m * (m + 1) // 2


def param_ring(g: MixedGraph) -> ParamRing:
    return ParamRing(g)


def _lambda_matrix(g: MixedGraph, ring: Ring) -> list[list[Polynomial]]:
    m = g.m
    zero = ring.zero()
    L = [[zero] * m for _ in range(m)]
    for i, j in g.sorted_directed:
        L[i - 1][j - 1] = ring.var(lam(i, j))
    return L


def _matmul(a, b, zero):
    n, k, p = len(a), len(b), len(b[0])
    out = [[zero] * p for _ in range(n)]
    for i in range(n):
        for t in range(k):
            ait = a[i][t]
            if ait.is_zero():
                continue
            for j in range(p):
                if not b[t][j].is_zero():
                    out[i][j] = out[i][j] + ait * b[t][j]
    return out


def inverse_i_minus_lambda(g: MixedGraph, ring: Ring) -> list[list[Polynomial]]:
    """``(I - L)^-1`` by the finite Neumann sum."""
    m = g.m
    zero, one = ring.zero(), ring.one()
    L = _lambda_matrix(g, ring)
    result = [[one if i == j else zero for j in range(m)] for i in range(m)]
    power = [row[:] for row in result]
    for _ in range(m - 1):
        power = _matmul(power, L, zero)
        result = [[result[i][j] + power[i][j] for j in range(m)] for i in range(m)]
    return result


def omega_matrix(g: MixedGraph, ring: Ring) -> list[list[Polynomial]]:
    m = g.m
    zero = ring.zero()
    W = [[zero] * m for _ in range(m)]
    for i in g.vertices:
        W[i - 1][i - 1] = ring.var(omg(i, i))
    for i, j in g.sorted_bidirected:
        W[i - 1][j - 1] = W[j - 1][i - 1] = ring.var(omg(i, j))
    return W


def sigma_polys(g: MixedGraph, ring: Ring | None = None) -> dict[tuple[int, int], Polynomial]:
    """Covariance entries ``{(i, j): Sigma_ij}`` for ``i <= j`` as polynomials in lambda/omega."""
    ring = ring or ParamRing(g).ring
    zero = ring.zero()
    inv = inverse_i_minus_lambda(g, ring)
    inv_t = [list(r) for r in zip(*inv)]
    S = _matmul(_matmul(inv_t, omega_matrix(g, ring), zero), inv, zero)
    return {(i, j): S[i - 1][j - 1] for i in g.vertices for j in g.vertices if i <= j}


def total_effect_poly(g: MixedGraph, i: int, j: int, ring: Ring | None = None) -> Polynomial:
    """Sum over directed paths i ~> j of the product of edge coefficients."""
    if i > j:
        raise ValueError("total effects need i <= j under the topological order")
    ring = ring or ParamRing(g).ring
    total = ring.zero()
    for poly in (_path_monomial(p, ring) for p in directed_paths(g, i, j)):
        total = total + poly
    return total


def _path_monomial(path: DirectedPath, ring: Ring) -> Polynomial:
    e = [0] * ring.ngens
    for a, b in path:
        e[ring.index(lam(a, b))] += 1
    return ring.monomial(e)


def path_effect_polys(g: MixedGraph, i: int, j: int,
                      ring: Ring | None = None) -> list[tuple[DirectedPath, Polynomial]]:
    if i >= j:
        raise ValueError("path effects need i < j")
    ring = ring or ParamRing(g).ring
    return [(p, _path_monomial(p, ring)) for p in directed_paths(g, i, j)]


@dataclass(frozen=True)
class ParameterTarget:
    """A parameter to identify.

    ``kind`` is one of ``"direct"``, ``"total"``, ``"path"``, ``"omega"``;
    ``pair`` is ``(i, j)``; ``path`` is set for path effects.  ``poly`` lives
    in the graph's :class:`ParamRing` ring.
    """

    kind: str
    pair: tuple[int, int]
    poly: Polynomial
    path: DirectedPath | None = None

    @property
    def name(self) -> str:
        i, j = self.pair
        if self.kind == "direct":
            return lam(i, j)
        if self.kind == "omega":
            return omg(i, j)
        if self.kind == "total":
            return f"TE({i},{j})"
        return "PE(" + "->".join(str(v) for v in path_vertices(self.path)) + ")"

    @property
    def label(self) -> str:
        i, j = self.pair
        if self.kind in ("direct", "omega"):
            return pretty(self.name)
        return self.name

    @property
    def is_lambda_or_omega(self) -> bool:
        return self.kind in ("direct", "omega")


def direct_target(g: MixedGraph, i: int, j: int, pr: ParamRing | None = None) -> ParameterTarget:
    if (i, j) not in g.directed:
        raise ValueError(f"no edge {i}->{j}")
    pr = pr or ParamRing(g)
    return ParameterTarget("direct", (i, j), pr.ring.var(lam(i, j)))


def omega_target(g: MixedGraph, i: int, j: int, pr: ParamRing | None = None) -> ParameterTarget:
    i, j = min(i, j), max(i, j)
    if i != j and not g.has_bidirected(i, j):
        raise ValueError(f"omega_{i}{j} is fixed at zero in this graph")
    pr = pr or ParamRing(g)
    return ParameterTarget("omega", (i, j), pr.ring.var(omg(i, j)))


def total_target(g: MixedGraph, i: int, j: int, pr: ParamRing | None = None) -> ParameterTarget:
    pr = pr or ParamRing(g)
    return ParameterTarget("total", (i, j), total_effect_poly(g, i, j, pr.ring))


def path_target(g: MixedGraph, path: DirectedPath, pr: ParamRing | None = None) -> ParameterTarget:
    pr = pr or ParamRing(g)
    for e in path:
        if e not in g.directed:
            raise ValueError(f"path uses missing edge {e}")
    vs = path_vertices(path)
    return ParameterTarget("path", (vs[0], vs[-1]), _path_monomial(path, pr.ring), path)


def all_targets(g: MixedGraph, pr: ParamRing | None = None) -> list[ParameterTarget]:
    """Direct effects, omega entries, total effects (pairs with a path), path effects."""
    pr = pr or ParamRing(g)
    out = [direct_target(g, i, j, pr) for i, j in g.sorted_directed]
    out += [omega_target(g, i, i, pr) for i in g.vertices]
    out += [omega_target(g, i, j, pr) for i, j in g.sorted_bidirected]
    pairs = [(i, j) for i in g.vertices for j in g.vertices if i < j]
    for i, j in pairs:
        if directed_paths(g, i, j):
            out.append(total_target(g, i, j, pr))
    for i, j in pairs:
        for p in directed_paths(g, i, j):
            out.append(path_target(g, p, pr))
    return out


def target_by_name(g: MixedGraph, name: str, pr: ParamRing | None = None) -> ParameterTarget:
    for t in all_targets(g, pr):
        if name in (t.name, t.label):
            return t
    raise KeyError(f"no target {name!r} in graph {g}")


# ---------------------------------------------------------------------------
# numeric (exact rational) covariance matrices
# ---------------------------------------------------------------------------


def _frac_matrix(a) -> np.ndarray:
    arr = np.array(a, dtype=object)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("expected a square matrix")
    for idx, v in np.ndenumerate(arr):
        if isinstance(v, float):
            raise TypeError("floating-point entries are not allowed; use Fraction or int")
        arr[idx] = Fraction(v)
    return arr


def leading_minors_positive(a) -> bool:
    """Positive definiteness of a symmetric rational matrix (Sylvester, exact)."""
    a = _frac_matrix(a)
    n = a.shape[0]
    work = a.copy()
    for k in range(n):
        # Gaussian elimination without pivoting: pivots are ratios of leading minors
        piv = work[k, k]
        if piv <= 0:
            return False
        for r in range(k + 1, n):
            f = work[r, k] / piv
            if f:
                work[r, k:] = work[r, k:] - f * work[k, k:]
    return True


def lambda_matrix_numeric(g: MixedGraph, lambdas: Mapping[tuple[int, int], object]) -> np.ndarray:
    L = np.full((g.m, g.m), Fraction(0), dtype=object)
    for (i, j), v in lambdas.items():
        if (i, j) not in g.directed:
            raise ValueError(f"lambda given for missing edge {i}->{j}")
        if isinstance(v, float):
            raise TypeError("floating-point lambdas are not allowed; use Fraction or int")
        L[i - 1, j - 1] = Fraction(v)
    return L


def sigma_numeric(g: MixedGraph, lambdas: Mapping[tuple[int, int], object], omega) -> np.ndarray:
    """Exact ``(I - L)^-T W (I - L)^-1``."""
    L = lambda_matrix_numeric(g, lambdas)
    W = _frac_matrix(omega)
    m = g.m
    # gmpy2 rationals for the products, Fractions at the boundary
    to_q = np.vectorize(lambda v: mpq(v.numerator, v.denominator), otypes=[object])
    Lq, Wq = to_q(L), to_q(W)
    inv = np.identity(m, dtype=object) * mpq(1)
    power = inv.copy()
    for _ in range(m - 1):
        power = power.dot(Lq)
        inv = inv + power
    S = inv.T.dot(Wq).dot(inv)
    return np.vectorize(lambda v: Fraction(int(v.numerator), int(v.denominator)), otypes=[object])(S)


def omega_backsolve_numeric(g: MixedGraph, sigma, lambdas: Mapping[tuple[int, int], object],
                            check_pd: bool = True) -> np.ndarray:
    """``W = (I - L)^T S (I - L)`` in exact rationals."""
    S = _frac_matrix(sigma)
    if S.shape != (g.m, g.m):
        raise ValueError(f"sigma must be {g.m}x{g.m}")
    if not (S == S.T).all():
        raise ValueError("sigma is not symmetric")
    if check_pd and not leading_minors_positive(S):
        raise ValueError("sigma is not positive definite")
    L = lambda_matrix_numeric(g, lambdas)
    A = np.identity(g.m, dtype=object) * Fraction(1) - L
    return A.T.dot(S).dot(A)


def sigma_values(sigma: np.ndarray) -> dict[str, Fraction]:
    """Map ``s_ij`` names to the entries of a numeric covariance matrix."""
    m = sigma.shape[0]
    return {sig(i, j): Fraction(sigma[i - 1, j - 1])
            for i in range(1, m + 1) for j in range(i, m + 1)}


def theta_values(g: MixedGraph, lambdas: Mapping[tuple[int, int], object], omega) -> dict[str, Fraction]:
    W = _frac_matrix(omega)
    vals = {lam(i, j): Fraction(v) for (i, j), v in lambdas.items()}
    for i in g.vertices:
        vals[omg(i, i)] = W[i - 1, i - 1]
    for i, j in g.sorted_bidirected:
        vals[omg(i, j)] = W[i - 1, j - 1]
    return vals


def pattern_check(g: MixedGraph, ring: Ring | None = None) -> list[list[Polynomial]]:
    """Symbolic ``(I - L)^T Sigma(L, W) (I - L)``; equals the omega pattern matrix."""
    ring = ring or ParamRing(g).ring
    zero, one = ring.zero(), ring.one()
    S = sigma_polys(g, ring)
    m = g.m
    Sm = [[S[(min(i, j), max(i, j))] for j in g.vertices] for i in g.vertices]
    L = _lambda_matrix(g, ring)
    A = [[(one if i == j else zero) - L[i][j] for j in range(m)] for i in range(m)]
    At = [list(r) for r in zip(*A)]
    return _matmul(_matmul(At, Sm, zero), A, zero)


def omega_constraints(g: MixedGraph, ring: Ring) -> dict[tuple[int, int], Polynomial]:
    """Entries of ``(I - L)^T S (I - L)`` with S the symbolic sigma matrix (ring needs
    ``l``/``s`` variables).  Entry (i, j) equals ``w_ij`` on the model."""
    zero, one = ring.zero(), ring.one()
    m = g.m
    Sm = [[ring.var(sig(i, j)) for j in g.vertices] for i in g.vertices]
    L = _lambda_matrix(g, ring)
    A = [[(one if i == j else zero) - L[i][j] for j in range(m)] for i in range(m)]
    At = [list(r) for r in zip(*A)]
    P = _matmul(_matmul(At, Sm, zero), A, zero)
    return {(i, j): P[i - 1][j - 1] for i in g.vertices for j in g.vertices if i <= j}
