"""Decide generic identifiability of SEM parameters via elimination ideals.

For a target ``s`` the engine forms the ideal ``<q - s, sigma_ij - Sigma_ij>``,
eliminates the model parameters under a block order ``params > q > sigma``
and inspects the reduced basis of what is left:

* no element involves ``q``: not generically identifiable;
* the smallest admissible ``q``-degree is 1: identifiable by a rational formula;
* it is ``d >= 2``: algebraically ``d``-identifiable.

An element is admissible when its leading ``q``-coefficient is not in the
vanishing ideal of the model (the ``q``-free part of the same basis).

Two constructions of the elimination ideal are available.  ``"full"`` builds
the ideal literally in the lambda/omega/q/sigma ring.  ``"reduced"`` (the
default) first removes the omegas: ``Omega = (I - L)^T Sigma (I - L)`` is a
polynomial change of coordinates, so the omega variables eliminate linearly,
leaving ``<q - s', [(I - L)^T S (I - L)]_ij for non-adjacent i != j>`` in the
lambda/q/sigma ring.  Both give the same ideal after elimination and hence
the same reduced basis.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, lcm
from typing import Iterable, Sequence

import numpy as np

from .groebner import (
    Budget,
    GroebnerBasis,
    IdealGens,
    ResourceLimitExceeded,
    eliminate,
    ideal_membership,
)
from .parametrize import (
    ParameterTarget,
    ParamRing,
    all_targets,
    lam,
    omega_constraints,
    omg,
    sig,
    sigma_numeric,
    sigma_polys,
    sigma_values,
    theta_values,
)
from .polyring import Polynomial, Ring, block_order
from .semgraph import MixedGraph

__all__ = [
    "RationalFormula",
    "GenericallyIdentifiable",
    "AlgebraicallyIdentifiable",
    "NotGenericallyIdentifiable",
    "Unresolved",
    "TriviallyConstant",
    "GraphReport",
    "Verdict",
    "elimination_ideal",
    "vanishing_ideal",
    "classify_parameter",
    "classify_graph",
    "verify_numeric",
    "VerificationReport",
]

DEFAULT_BUDGET = Budget(600.0)


# ---------------------------------------------------------------------------
# statuses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalFormula:
    """``numerator / denominator`` in the covariance coordinates.

    Canonical form: jointly integer with content 1, and the denominator's
    grevlex-leading coefficient positive.
    """

    numerator: Polynomial
    denominator: Polynomial

    @classmethod
    def canonical(cls, numerator: Polynomial, denominator: Polynomial) -> "RationalFormula":
        if denominator.is_zero():
            raise ZeroDivisionError("zero denominator")
        coeffs = list(numerator.terms.values()) + list(denominator.terms.values())
        den = lcm(*(c.denominator for c in coeffs))
        num = gcd(*(c.numerator * (den // c.denominator) for c in coeffs))
        scale = Fraction(den, num)
        if denominator.leading_coefficient() < 0:
            scale = -scale
        return cls(numerator * scale, denominator * scale)

    def evaluate(self, values) -> Fraction | None:
        """Exact value, or ``None`` where the denominator vanishes."""
        d = self.denominator.substitute(values)
        if d == 0:
            return None
        return self.numerator.substitute(values) / d

    def render(self, names=None) -> str:
        num = self.numerator.render(names=names)
        den = self.denominator.render(names=names)
        if den == "1":
            return num
        if len(self.numerator) > 1:
            num = f"({num})"
        if len(self.denominator) > 1:
            den = f"({den})"
        return f"{num}/{den}"

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class GenericallyIdentifiable:
    formula: RationalFormula
    ident_poly: Polynomial          # the q-linear basis element, in the (q, sigma) ring
    kind = "generic"

    @property
    def degree(self) -> int:
        return 1


@dataclass(frozen=True)
class AlgebraicallyIdentifiable:
    d: int
    ident_poly: Polynomial
    kind = "algebraic"

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("algebraic identifiability needs d >= 2")

    @property
    def degree(self) -> int:
        return self.d


@dataclass(frozen=True)
class NotGenericallyIdentifiable:
    kind = "not"

    @property
    def degree(self) -> None:
        return None


@dataclass(frozen=True)
class Unresolved:
    reason: str
    kind = "unresolved"

    @property
    def degree(self) -> None:
        return None


@dataclass(frozen=True)
class TriviallyConstant:
    value: Fraction
    kind = "constant"

    @property
    def degree(self) -> None:
        return None


IdentStatus = (GenericallyIdentifiable | AlgebraicallyIdentifiable | NotGenericallyIdentifiable
               | Unresolved | TriviallyConstant)


def describe_status(status) -> str:
    if status.kind == "generic":
        return "generically identifiable"
    if status.kind == "algebraic":
        return f"algebraically {status.d}-identifiable"
    if status.kind == "not":
        return "not generically identifiable"
    if status.kind == "constant":
        return f"identified, trivially {status.value}"
    return f"unresolved ({status.reason})"


# ---------------------------------------------------------------------------
# elimination
# ---------------------------------------------------------------------------


class _Reduced:
    """The lambda/q/sigma ring of the omega-free construction."""

    def __init__(self, pr: ParamRing):
        self.pr = pr
        g = pr.graph
        nl = len(pr.lambda_names)
        names = pr.lambda_names + ("q",) + pr.sigma_names
        self.nl = nl
        self.ring = Ring(names, block_order(range(nl), [nl], range(nl + 1, len(names))))
        self.P = omega_constraints(g, self.ring)
        self.constraints = [
            p for (i, j), p in sorted(self.P.items())
            if i != j and not g.has_bidirected(i, j) and not p.is_zero()
        ]
        images = []
        for nm in pr.ring.names:
            if nm[0] == "w":
                i, j = _indices(nm)
                images.append(self.P[(i, j)])
            else:
                images.append(self.ring.var(nm))
        self._images = images

    def translate(self, poly: Polynomial) -> Polynomial:
        """Move a lambda/omega polynomial into this ring, replacing omegas."""
        return poly.compose(self._images)


def _indices(name: str) -> tuple[int, int]:
    body = name[1:]
    if "_" in body:
        a, b = body.split("_")
        return int(a), int(b)
    return int(body[0]), int(body[1])


def _to_qsigma(ideal: IdealGens, pr: ParamRing) -> list[Polynomial]:
    target = pr.qsigma_ring
    return [p.change_ring(target) for p in ideal.generators]


def elimination_ideal(g: MixedGraph, target: ParameterTarget | Polynomial,
                      budget: Budget | None = None, method: str = "reduced",
                      strategy: str = "sugar", pr: ParamRing | None = None) -> list[Polynomial]:
    """Reduced basis of the ideal of ``(s, Sigma)`` relations, in the (q, sigma) ring.

    Sorted ascending under the block order q > sigma (grevlex).
    """
    pr = pr or ParamRing(g)
    s = target.poly if isinstance(target, ParameterTarget) else target
    if method == "full":
        R = pr.ring
        S = sigma_polys(g, R)
        gens = [R.var("q") - s] + [R.var(sig(i, j)) - p for (i, j), p in S.items()]
        elim = eliminate(IdealGens(gens, R), range(len(pr.t_names)), budget, strategy)
    elif method == "reduced":
        red = _Reduced(pr)
        gens = [red.ring.var("q") - red.translate(s)] + red.constraints
        elim = eliminate(IdealGens(gens, red.ring), range(red.nl), budget, strategy)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _to_qsigma(elim, pr)


def vanishing_ideal(g: MixedGraph, budget: Budget | None = None, method: str = "reduced",
                    strategy: str = "sugar", pr: ParamRing | None = None) -> list[Polynomial]:
    """Reduced grevlex basis of the polynomial relations among the sigma_ij."""
    pr = pr or ParamRing(g)
    target = pr.sigma_ring
    if method == "full":
        R = pr.ring
        S = sigma_polys(g, R)
        gens = [R.var(sig(i, j)) - p for (i, j), p in S.items()]
        elim = eliminate(IdealGens(gens, R), list(range(len(pr.t_names))) + [R.index("q")],
                         budget, strategy)
    elif method == "reduced":
        red = _Reduced(pr)
        if not red.constraints:
            return []
        elim = eliminate(IdealGens(red.constraints, red.ring),
                         list(range(red.nl)) + [red.ring.index("q")], budget, strategy)
    else:
        raise ValueError(f"unknown method {method!r}")
    return [p.change_ring(target) for p in elim.generators]


def _status_from_basis(basis: Sequence[Polynomial], pr: ParamRing):
    qs = pr.qsigma_ring
    q = qs.index("q")
    order = qs.order
    sring = pr.sigma_ring
    mapping = [None] + list(range(sring.ngens))
    qfree = [p.change_ring(sring, mapping) for p in basis if p.degree(q) == 0]
    withq = [p for p in basis if p.degree(q) > 0]
    if not withq:
        return NotGenericallyIdentifiable()
    vgb = GroebnerBasis(tuple(qfree), sring, sring.order) if qfree else None
    admissible = []
    for p in withq:
        parts = p.coefficients_in(q)
        d = max(parts)
        lead = parts[d].change_ring(sring, mapping)
        if vgb is not None and ideal_membership(lead, vgb):
            continue
        admissible.append((d, order.key(p.leading_monomial(order)), p, parts))
    if not admissible:
        return NotGenericallyIdentifiable()
    d = min(a[0] for a in admissible)
    best = min((a for a in admissible if a[0] == d), key=lambda a: a[1])
    _, _, p, parts = best
    if d == 1:
        g1 = parts[1].change_ring(sring, mapping)
        g0 = parts.get(0, qs.zero()).change_ring(sring, mapping)
        return GenericallyIdentifiable(RationalFormula.canonical(-g0, g1), p)
    return AlgebraicallyIdentifiable(d, p)


def classify_parameter(g: MixedGraph, target: ParameterTarget, budget: Budget | None = DEFAULT_BUDGET,
                       method: str = "reduced", strategy: str = "sugar",
                       pr: ParamRing | None = None):
    """Identifiability status of one target (never raises on budget exhaustion)."""
    if target.poly.is_constant():
        return TriviallyConstant(target.poly.constant_value())
    pr = pr or ParamRing(g)
    try:
        basis = elimination_ideal(g, target, budget, method, strategy, pr)
    except ResourceLimitExceeded as exc:
        return Unresolved(exc.reason)
    return _status_from_basis(basis, pr)


# ---------------------------------------------------------------------------
# whole graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    """Graph-level outcome over the lambda and omega targets."""

    kind: str           # "generic", "algebraic", "not", "unresolved"
    k: int | None = None

    def __str__(self) -> str:
        if self.kind == "generic":
            return "generically identifiable"
        if self.kind == "algebraic":
            return f"algebraically {self.k}-identified"
        if self.kind == "not":
            return "not generically identifiable"
        return "unresolved"


def aggregate_verdict(statuses: Iterable) -> Verdict:
    statuses = list(statuses)
    kinds = {s.kind for s in statuses}
    if "not" in kinds:
        return Verdict("not")
    if "unresolved" in kinds:
        return Verdict("unresolved")
    k = max((s.degree for s in statuses if s.degree is not None), default=1)
    if k == 1:
        return Verdict("generic")
    return Verdict("algebraic", k)


@dataclass
class GraphReport:
    graph: MixedGraph
    targets: list[ParameterTarget]
    statuses: dict[str, object]
    vanishing: list[Polynomial] | None
    seconds: dict[str, float] = field(default_factory=dict)
    vanishing_status: str = "ok"

    @property
    def verdict(self) -> Verdict:
        return aggregate_verdict(self.statuses[t.name] for t in self.targets if t.is_lambda_or_omega)

    def status(self, name: str):
        if name in self.statuses:
            return self.statuses[name]
        for t in self.targets:
            if t.label == name:
                return self.statuses[t.name]
        raise KeyError(name)

    def target(self, name: str) -> ParameterTarget:
        for t in self.targets:
            if name in (t.name, t.label):
                return t
        raise KeyError(name)

    @cached_property
    def param_ring(self) -> ParamRing:
        return ParamRing(self.graph)

    def unresolved(self) -> list[str]:
        return [n for n, s in self.statuses.items() if s.kind == "unresolved"]


def classify_graph(g: MixedGraph, budget: Budget | None = DEFAULT_BUDGET, method: str = "reduced",
                   strategy: str = "sugar", targets: Iterable[ParameterTarget] | None = None,
                   with_vanishing: bool = True) -> GraphReport:
    """Classify every target of ``g``; identical target polynomials share one computation."""
    pr = ParamRing(g)
    targets = list(targets) if targets is not None else all_targets(g, pr)
    statuses: dict[str, object] = {}
    seconds: dict[str, float] = {}
    cache: dict[Polynomial, tuple[object, float]] = {}
    for t in targets:
        if t.poly in cache:
            statuses[t.name], seconds[t.name] = cache[t.poly]
            continue
        t0 = time.perf_counter()
        st = classify_parameter(g, t, budget, method, strategy, pr)
        dt = time.perf_counter() - t0
        cache[t.poly] = (st, dt)
        statuses[t.name] = st
        seconds[t.name] = dt
    vanishing = None
    vstatus = "skipped"
    if with_vanishing:
        t0 = time.perf_counter()
        try:
            vanishing = vanishing_ideal(g, budget, method, strategy, pr)
            vstatus = "ok"
        except ResourceLimitExceeded as exc:
            vstatus = f"unresolved ({exc.reason})"
        seconds["vanishing_ideal"] = time.perf_counter() - t0
    return GraphReport(g, targets, statuses, vanishing, seconds, vstatus)


# ---------------------------------------------------------------------------
# numeric verification
# ---------------------------------------------------------------------------

LAMBDA_GRID = tuple(Fraction(k, 2) for k in range(-6, 7))   # -3 .. 3 in halves, includes 0
OMEGA_GRID = tuple(Fraction(k, 2) for k in range(-4, 5))


def sample_theta(g: MixedGraph, rng: random.Random):
    """Exact rational parameters; Omega strictly diagonally dominant (hence PD)."""
    lambdas = {e: rng.choice(LAMBDA_GRID) for e in g.sorted_directed}
    m = g.m
    W = np.full((m, m), Fraction(0), dtype=object)
    for i, j in g.sorted_bidirected:
        W[i - 1, j - 1] = W[j - 1, i - 1] = rng.choice(OMEGA_GRID)
    for i in range(m):
        off = sum(abs(W[i, j]) for j in range(m) if j != i)
        W[i, i] = off + rng.randint(1, 4)
    return lambdas, W


@dataclass
class TrialFailure:
    target: str
    theta: dict[str, Fraction]
    sigma: dict[str, Fraction]
    expected: Fraction
    got: object


@dataclass
class TargetVerification:
    target: str
    status: str
    passed: int = 0
    skipped: int = 0
    degree_witnessed: bool = False
    failures: list[TrialFailure] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        if self.failures:
            return False
        if self.status == "algebraic":
            return self.degree_witnessed
        return True


@dataclass
class VerificationReport:
    graph: MixedGraph
    seed: int
    trials: int
    targets: list[TargetVerification]

    @property
    def ok(self) -> bool:
        return all(t.ok for t in self.targets)


class ParameterDraws:
    """Lazily grown, reproducible stream of parameter points for one graph.

    Every target of a graph is checked against the same points, so the
    covariance matrix of each point is computed once.
    """

    def __init__(self, g: MixedGraph, seed: int = 0):
        self.graph = g
        self.seed = seed
        self._rng = random.Random(f"{seed}:{g.to_text()}")
        self._points: list[tuple[dict, dict]] = []

    def __getitem__(self, k: int) -> tuple[dict, dict]:
        """``(theta, sigma)`` values of the k-th draw, keyed by variable name."""
        while len(self._points) <= k:
            lambdas, W = sample_theta(self.graph, self._rng)
            theta = theta_values(self.graph, lambdas, W)
            S = sigma_values(sigma_numeric(self.graph, lambdas, W))
            self._points.append((theta, S))
        return self._points[k]


def verify_numeric(g: MixedGraph, target: ParameterTarget, status, trials: int = 100, seed: int = 0,
                   max_attempts: int | None = None, draws: ParameterDraws | None = None
                   ) -> TargetVerification:
    """Check a status against exact evaluations at random parameter points.

    ``trials`` counts non-degenerate draws; degenerate ones (vanishing
    denominator or vanishing leading coefficient) are skipped and counted.
    """
    if status.kind not in ("generic", "algebraic"):
        raise ValueError("only identified statuses can be verified")
    if draws is None:
        draws = ParameterDraws(g, seed)
    out = TargetVerification(target.name, status.kind)
    limit = max_attempts if max_attempts is not None else 20 * trials
    qs = ParamRing(g).qsigma_ring
    attempt = 0
    while out.passed + len(out.failures) < trials and attempt < limit:
        theta, S = draws[attempt]
        attempt += 1
        s_val = target.poly.substitute(theta)
        if status.kind == "generic":
            got = status.formula.evaluate(S)
            if got is None:
                out.skipped += 1
                continue
            if got == s_val:
                out.passed += 1
            else:
                out.failures.append(TrialFailure(target.name, theta, S, s_val, got))
        else:
            value = status.ident_poly.substitute({**S, "q": s_val})
            special = status.ident_poly.specialize(S)
            if special.degree(qs.index("q")) == status.d:
                out.degree_witnessed = True
            elif value == 0:
                out.skipped += 1
                continue
            if value == 0:
                out.passed += 1
            else:
                out.failures.append(TrialFailure(target.name, theta, S, Fraction(0), value))
    return out


def verify_report(report: GraphReport, trials: int = 100, seed: int = 0,
                  names: Iterable[str] | None = None) -> VerificationReport:
    wanted = set(names) if names is not None else None
    draws = ParameterDraws(report.graph, seed)
    out = []
    for t in report.targets:
        st = report.statuses[t.name]
        if st.kind not in ("generic", "algebraic"):
            continue
        if wanted is not None and t.name not in wanted and t.label not in wanted:
            continue
        out.append(verify_numeric(report.graph, t, st, trials, seed, draws=draws))
    return VerificationReport(report.graph, seed, trials, out)
