"""A four-vertex model where every direct effect is only algebraically identified.

The chain 1 -> 2 -> 3 -> 4 with vertex 1 confounded with everything.  The
elimination ideal for lambda23 is generated by a quadratic in q, so Sigma
pins lambda23 down to at most two values.  Numerically we watch both roots
appear: one is the true parameter, the other a spurious solution.
"""

import random
from fractions import Fraction

from semgb.identify import classify_graph, sample_theta
from semgb.parametrize import sigma_numeric, sigma_values
from semgb.semgraph import parse_graph

g = parse_graph("4; 1->2 2->3 3->4; 1<->2 1<->3 1<->4")
report = classify_graph(g)
print("verdict:", report.verdict)

st = report.status("l23")
print("lambda23 satisfies:", st.ident_poly.render(), "= 0")

lambdas, omega = sample_theta(g, random.Random(3))
S = sigma_values(sigma_numeric(g, lambdas, omega))
quad = st.ident_poly.specialize(S)
coeffs = {m[quad.ring.index("q")]: c for m, c in quad.terms.items()}
a, b, c = (coeffs.get(k, Fraction(0)) for k in (2, 1, 0))
disc = b * b - 4 * a * c
print(f"true lambda23 = {lambdas[(2, 3)]}")
print(f"specialised: {a} q^2 + {b} q + {c}, discriminant {float(disc):.4g}")
if disc >= 0:
    roots = sorted((-b + s * float(disc) ** 0.5) / (2 * a) for s in (-1, 1))
    print("roots:", [round(float(r), 6) for r in roots])
