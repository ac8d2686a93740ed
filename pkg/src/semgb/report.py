"""Serialisation of graph reports: versioned JSON, plain text and coloured DOT."""

from __future__ import annotations

import json
from fractions import Fraction

from .criteria import criteria_table
from .identify import (
    AlgebraicallyIdentifiable,
    GenericallyIdentifiable,
    GraphReport,
    NotGenericallyIdentifiable,
    RationalFormula,
    TriviallyConstant,
    Unresolved,
    VerificationReport,
    describe_status,
)
from .parametrize import (
    ParamRing,
    ParameterTarget,
    direct_target,
    omg,
    omega_target,
    path_target,
    total_target,
)
from .semgraph import parse_graph

__all__ = [
    "SCHEMA_VERSION",
    "report_to_dict",
    "report_from_dict",
    "report_to_json",
    "report_from_json",
    "report_to_text",
    "report_to_dot",
    "criteria_to_text",
    "criteria_to_dict",
    "verification_to_text",
    "verification_to_dict",
    "subscripted",
    "STATUS_COLORS",
]

SCHEMA_VERSION = 1

_SUB = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")
_GREEK = {"l": "λ", "w": "ω", "s": "σ"}


def _pretty_name(name: str) -> str:
    if name and name[0] in _GREEK and name[1:2].isdigit():
        idx = name[1:]
        if "_" in idx:
            return _GREEK[name[0]] + idx.replace("_", ",").translate(_SUB)
        return _GREEK[name[0]] + idx.translate(_SUB)
    return name


def subscripted(names) -> list[str]:
    """Display names: ``s13`` -> ``σ₁₃``, ``l10_11`` -> ``λ₁₀,₁₁``."""
    return [_pretty_name(n) for n in names]


def _target_label(t: ParameterTarget) -> str:
    if t.kind in ("direct", "omega"):
        return _pretty_name(t.name)
    return t.name


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _status_to_dict(st) -> dict:
    out = {"kind": st.kind, "text": describe_status(st)}
    if st.kind == "generic":
        out["numerator"] = st.formula.numerator.render()
        out["denominator"] = st.formula.denominator.render()
        out["formula"] = st.formula.render()
        out["ident_poly"] = st.ident_poly.render()
        out["degree"] = 1
    elif st.kind == "algebraic":
        out["degree"] = st.d
        out["ident_poly"] = st.ident_poly.render()
    elif st.kind == "unresolved":
        out["reason"] = st.reason
    elif st.kind == "constant":
        out["value"] = str(st.value)
    return out


def _status_from_dict(d: dict, pr: ParamRing):
    kind = d["kind"]
    if kind == "generic":
        sr = pr.sigma_ring
        formula = RationalFormula(sr.parse(d["numerator"]), sr.parse(d["denominator"]))
        return GenericallyIdentifiable(formula, pr.qsigma_ring.parse(d["ident_poly"]))
    if kind == "algebraic":
        return AlgebraicallyIdentifiable(int(d["degree"]), pr.qsigma_ring.parse(d["ident_poly"]))
    if kind == "not":
        return NotGenericallyIdentifiable()
    if kind == "unresolved":
        return Unresolved(d["reason"])
    if kind == "constant":
        return TriviallyConstant(Fraction(d["value"]))
    raise ValueError(f"unknown status kind {kind!r}")


def _target_to_dict(t: ParameterTarget) -> dict:
    from .semgraph import path_vertices

    return {
        "name": t.name,
        "kind": t.kind,
        "pair": list(t.pair),
        "path": list(path_vertices(t.path)) if t.path is not None else None,
        "poly": t.poly.render(),
    }


def _target_from_dict(d: dict, g, pr: ParamRing) -> ParameterTarget:
    i, j = d["pair"]
    kind = d["kind"]
    if kind == "direct":
        t = direct_target(g, i, j, pr)
    elif kind == "omega":
        t = omega_target(g, i, j, pr)
    elif kind == "total":
        t = total_target(g, i, j, pr)
    elif kind == "path":
        vs = d["path"]
        t = path_target(g, tuple(zip(vs, vs[1:])), pr)
    else:
        raise ValueError(f"unknown target kind {kind!r}")
    if t.poly != pr.ring.parse(d["poly"]):
        raise ValueError(f"target {d['name']}: stored polynomial does not match the graph")
    return t


def report_to_dict(rep: GraphReport) -> dict:
    v = rep.verdict
    return {
        "schema_version": SCHEMA_VERSION,
        "graph": rep.graph.to_text(),
        "verdict": {"kind": v.kind, "k": v.k, "text": str(v)},
        "targets": [
            {**_target_to_dict(t), "status": _status_to_dict(rep.statuses[t.name])}
            for t in rep.targets
        ],
        "vanishing_ideal": {
            "status": rep.vanishing_status,
            "generators": None if rep.vanishing is None else [p.render() for p in rep.vanishing],
        },
        "seconds": dict(rep.seconds),
    }


def report_from_dict(d: dict) -> GraphReport:
    if d.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema version {d.get('schema_version')!r}")
    g = parse_graph(d["graph"])
    pr = ParamRing(g)
    targets, statuses = [], {}
    for td in d["targets"]:
        t = _target_from_dict(td, g, pr)
        targets.append(t)
        statuses[t.name] = _status_from_dict(td["status"], pr)
    van = d["vanishing_ideal"]
    gens = van["generators"]
    vanishing = None if gens is None else [pr.sigma_ring.parse(p) for p in gens]
    return GraphReport(g, targets, statuses, vanishing, dict(d.get("seconds", {})), van["status"])


def report_to_json(rep: GraphReport, indent: int | None = 2) -> str:
    return json.dumps(report_to_dict(rep), indent=indent, ensure_ascii=False)


def report_from_json(text: str) -> GraphReport:
    return report_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# text
# ---------------------------------------------------------------------------


def _status_line(t: ParameterTarget, st, pr: ParamRing) -> str:
    head = f"{_target_label(t)}: {describe_status(st)}"
    if st.kind == "generic":
        return f"{head}, formula {st.formula.render(names=subscripted(pr.sigma_ring.names))}"
    if st.kind == "algebraic":
        return f"{head}, {st.ident_poly.render(names=subscripted(pr.qsigma_ring.names))} = 0"
    return head


def report_to_text(rep: GraphReport) -> str:
    pr = rep.param_ring
    lines = [f"graph: {rep.graph.to_text()}"]
    sections = [
        ("direct effects", "direct"),
        ("error covariances", "omega"),
        ("total effects", "total"),
        ("path effects", "path"),
    ]
    for title, kind in sections:
        ts = [t for t in rep.targets if t.kind == kind]
        if not ts:
            continue
        lines.append(f"{title}:")
        for t in ts:
            lines.append("  " + _status_line(t, rep.statuses[t.name], pr))
    if rep.vanishing_status == "ok" and rep.vanishing is not None:
        snames = subscripted(pr.sigma_ring.names)
        if rep.vanishing:
            lines.append("model equations:")
            lines.extend(f"  {p.render(names=snames)} = 0" for p in rep.vanishing)
        else:
            lines.append("model equations: none")
    elif rep.vanishing_status != "skipped":
        lines.append(f"model equations: {rep.vanishing_status}")
    lines.append(f"graph verdict: {rep.verdict}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# DOT
# ---------------------------------------------------------------------------

# colour and black-and-white label shape per status
STATUS_COLORS = {
    "generic": ("green", "circle"),
    "constant": ("green", "circle"),
    "algebraic": ("blue", "ellipse"),
    "not": ("red", "box"),
    "unresolved": ("gray", "diamond"),
}


def report_to_dot(rep: GraphReport) -> str:
    """Directed edges as arrows, bidirected edges dashed with both heads; every
    lambda/omega parameter coloured by status, with a matching label shape."""
    g = rep.graph
    by_name = {t.name: t for t in rep.targets}
    lines = [
        "digraph G {",
        '  graph [label="' + str(rep.verdict) + '", labelloc=t];',
        "  node [style=filled, fillcolor=white, penwidth=2];",
    ]
    for v in g.vertices:
        t = by_name[omg(v, v)]
        st = rep.statuses[t.name]
        color, shape = STATUS_COLORS[st.kind]
        lines.append(f'  {v} [label="{v}\\n{_target_label(t)}", color={color}, shape={shape}];')
    for t in rep.targets:
        if t.kind not in ("direct", "omega") or t.pair[0] == t.pair[1]:
            continue
        st = rep.statuses[t.name]
        color, shape = STATUS_COLORS[st.kind]
        i, j = t.pair
        label = _target_label(t)
        attrs = [f"color={color}", f'label="{label}"', f"fontcolor={color}"]
        if t.kind == "omega":
            attrs += ["style=dashed", "dir=both", "constraint=false"]
        lines.append(f"  {i} -> {j} [{', '.join(attrs)}];")
        # separate label node carrying the black-and-white shape decoration
        lab = f"lab_{t.name}"
        lines.append(f'  {lab} [label="{label}", shape={shape}, color={color}, fontsize=9, '
                     f'width=0.2, height=0.2, margin=0.02];')
        lines.append(f"  {i} -> {lab} [style=invis];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# criteria and verification
# ---------------------------------------------------------------------------


def criteria_to_dict(g) -> dict:
    tab = criteria_table(g)

    def wit(r):
        if not r.satisfied:
            return None
        return sorted(r.witness) if isinstance(r.witness, frozenset) else r.witness

    return {
        "schema_version": SCHEMA_VERSION,
        "graph": g.to_text(),
        "edges": [
            {"edge": f"{i}->{j}",
             "single_door": {"satisfied": r["single_door"].satisfied, "witness": wit(r["single_door"])},
             "iv": {"satisfied": r["instrumental_variable"].satisfied,
                    "witness": wit(r["instrumental_variable"])}}
            for (i, j), r in tab["edges"].items()
        ],
        "back_door": [
            {"pair": [i, j], "satisfied": r.satisfied, "witness": wit(r)}
            for (i, j), r in tab["back_door"].items()
        ],
        "bow_free": tab["bow_free"],
    }


def criteria_to_text(g) -> str:
    tab = criteria_table(g)
    lines = [f"graph: {g.to_text()}", "direct effects:"]
    if not tab["edges"]:
        lines.append("  (no directed edges)")
    for (i, j), r in tab["edges"].items():
        lines.append(f"  {i}->{j}: single-door {r['single_door'].describe()}, "
                     f"IV {r['instrumental_variable'].describe()}")
    lines.append("total effects (back-door):")
    for (i, j), r in tab["back_door"].items():
        lines.append(f"  ({i},{j}): {r.describe()}")
    lines.append(f"bow-free: {'true' if tab['bow_free'] else 'false'}")
    return "\n".join(lines)


def verification_to_dict(vr: VerificationReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "graph": vr.graph.to_text(),
        "seed": vr.seed,
        "trials": vr.trials,
        "ok": vr.ok,
        "targets": [
            {
                "name": t.target,
                "status": t.status,
                "passed": t.passed,
                "skipped": t.skipped,
                "degree_witnessed": t.degree_witnessed,
                "ok": t.ok,
                "failures": [
                    {"theta": {k: str(v) for k, v in f.theta.items()},
                     "sigma": {k: str(v) for k, v in f.sigma.items()},
                     "expected": str(f.expected), "got": str(f.got)}
                    for f in t.failures
                ],
            }
            for t in vr.targets
        ],
    }


def verification_to_text(vr: VerificationReport) -> str:
    lines = [f"graph: {vr.graph.to_text()} (seed {vr.seed}, {vr.trials} trials per target)"]
    for t in vr.targets:
        flag = "PASS" if t.ok else "FAIL"
        extra = ""
        if t.status == "algebraic":
            extra = ", full degree seen" if t.degree_witnessed else ", full degree never seen"
        lines.append(f"  {flag} {_pretty_name(t.target)}: {t.passed} passed, {t.skipped} skipped"
                     f"{extra}")
        for f in t.failures[:3]:
            theta = ", ".join(f"{k}={v}" for k, v in f.theta.items())
            lines.append(f"    counterexample: {theta}; expected {f.expected}, got {f.got}")
    lines.append("all targets pass" if vr.ok else "verification FAILED")
    return "\n".join(lines)
