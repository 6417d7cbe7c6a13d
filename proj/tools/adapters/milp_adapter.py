#!/usr/bin/env python3
"""MILP adapter: solves an LP-format model with scipy's HiGHS backend.

Usage: milp_adapter.py MODEL.lp SOLUTION.sol TIME_LIMIT_SECONDS

Reads the LP subset written by ppmatch (Minimize / Subject To / Bounds /
Binaries / End, one constraint per line, '+'/'-' separated terms) and
writes a "name value" solution file with a "# status <word>" header, the
format ppmatch re-imports.
"""

import re
import sys

import numpy as np
from scipy import sparse
from scipy.optimize import LinearConstraint, milp


TERM_RE = re.compile(r"([+-])?\s*(\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][\w]*)")


def parse_terms(text):
    terms = []
    for sign, coef, name in TERM_RE.findall(text):
        value = float(coef) if coef else 1.0
        if sign == "-":
            value = -value
        terms.append((name, value))
    return terms


def parse_lp(path):
    sections = {"minimize": [], "subject to": [], "bounds": [], "binaries": []}
    current = None
    with open(path) as fh:
        for raw in fh:
            line = raw.split("\\")[0].strip()
            if not line:
                continue
            low = line.lower()
            if low in ("minimize", "maximize"):
                current = "minimize"
                continue
            if low in ("subject to", "st", "s.t."):
                current = "subject to"
                continue
            if low == "bounds":
                current = "bounds"
                continue
            if low in ("binaries", "binary", "bin"):
                current = "binaries"
                continue
            if low == "end":
                break
            if current:
                sections[current].append(line)

    objective = {}
    for line in sections["minimize"]:
        body = line.split(":", 1)[1] if ":" in line else line
        for name, coef in parse_terms(body):
            objective[name] = objective.get(name, 0.0) + coef

    # Constraints may wrap across lines; a line without a relation continues
    # on the next one.
    constraints = []
    pending = ""
    for line in sections["subject to"]:
        pending += " " + line
        if ">=" in pending or "<=" in pending or "=" in pending:
            body = pending.split(":", 1)[1] if ":" in pending else pending
            if ">=" in body:
                lhs, rhs = body.split(">=")
                rel = ">="
            elif "<=" in body:
                lhs, rhs = body.split("<=")
                rel = "<="
            else:
                lhs, rhs = body.split("=")
                rel = "="
            constraints.append((parse_terms(lhs), rel, float(rhs)))
            pending = ""

    binaries = []
    for line in sections["binaries"]:
        binaries.extend(line.split())
    return objective, constraints, binaries


def main():
    if len(sys.argv) != 4:
        print(__doc__, file=sys.stderr)
        return 2
    model_path, solution_path, time_limit = sys.argv[1], sys.argv[2], float(sys.argv[3])

    objective, constraints, binaries = parse_lp(model_path)
    names = list(binaries)
    index = {n: i for i, n in enumerate(names)}
    n = len(names)

    c = np.zeros(n)
    for name, coef in objective.items():
        c[index[name]] += coef

    rows, cols, vals, lo, hi = [], [], [], [], []
    for r, (terms, rel, rhs) in enumerate(constraints):
        for name, coef in terms:
            rows.append(r)
            cols.append(index[name])
            vals.append(coef)
        if rel == "=":
            lo.append(rhs)
            hi.append(rhs)
        elif rel == ">=":
            lo.append(rhs)
            hi.append(np.inf)
        else:
            lo.append(-np.inf)
            hi.append(rhs)

    lc = None
    if constraints:
        mat = sparse.csr_matrix((vals, (rows, cols)), shape=(len(constraints), n))
        lc = LinearConstraint(mat, np.array(lo), np.array(hi))

    res = milp(
        c=c,
        constraints=lc,
        integrality=np.ones(n),
        bounds=(0, 1),
        options={"time_limit": time_limit, "mip_rel_gap": 0.0},
    )

    if res.status == 0:
        status = "optimal"
    elif res.status == 1 and res.x is not None:
        status = "timelimit"
    elif res.status == 2:
        status = "infeasible"
    else:
        status = "nosolution"

    with open(solution_path, "w") as out:
        out.write(f"# status {status}\n")
        if res.x is not None and status in ("optimal", "timelimit"):
            out.write(f"# objective {res.fun:.12g}\n")
            for i, name in enumerate(names):
                v = int(round(res.x[i]))
                if v:
                    out.write(f"{name} {v}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
