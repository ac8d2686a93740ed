"""Coloured DOT output for the graph whose total effect 2 -> 4 is identified
although no back-door set exists.

Green nodes/edges are generically identified, blue algebraically, red not.
Pipe the output through ``dot -Tpng`` if graphviz is installed.
"""

import sys

from semgb.criteria import back_door
from semgb.identify import classify_graph
from semgb.report import report_to_dot
from semgb.semgraph import parse_graph

g = parse_graph("4; 1->2 2->3 2->4 3->4; 1<->2 2<->4 3<->4")
report = classify_graph(g)

te = report.status("TE(2,4)")
print(f"// TE(2,4): {te.kind}, {te.ident_poly.render()} = 0", file=sys.stderr)
print(f"// back-door for (2,4): {back_door(g, 2, 4).describe()}", file=sys.stderr)
print(report_to_dot(report))
