"""Independent oracle for the scenario clearing LP.

Reads a case JSON, writes the model with bus angles (no shift factors) and solves it
with HiGHS through scipy. Prints the numbers the C++ tests freeze.

    python3 tests/oracle/model_two.py data/twobus.case.json
"""
import json
import sys

import numpy as np
from scipy.optimize import linprog


def load(path):
    with open(path) as f:
        return json.load(f)


def solve(case, fix=None):
    buses = [b["id"] for b in case["buses"]]
    nb = len(buses)
    pos = {b: i for i, b in enumerate(buses)}
    gens, loads, lines, scen = case["generators"], case["loads"], case["lines"], case["scenarios"]
    ng, nd, K = len(gens), len(loads), len(scen)
    slack = pos[case["slack_bus"]]

    cols = []  # (name, cost, lo, hi)

    def var(name, c, lo, hi):
        cols.append((name, c, lo, hi))
        return len(cols) - 1

    g = [var("g" + x["name"], x["c_energy"], None, None) for x in gens]
    ru = [var("rU" + x["name"], x["c_ru"], 0, x["ru_max"]) for x in gens]
    rd = [var("rD" + x["name"], x["c_rd"], 0, x["rd_max"]) for x in gens]
    A_eq, b_eq, A_ub, b_ub = [], [], [], []

    def row(entries):
        r = {}
        for j, v in entries:
            r[j] = r.get(j, 0.0) + v
        return r

    for j, x in enumerate(gens):
        A_ub.append(row([(g[j], 1), (ru[j], 1)])); b_ub.append(x["g_max"])
        A_ub.append(row([(rd[j], 1), (g[j], -1)])); b_ub.append(-x["g_min"])

    def state(k, up=None, dn=None, shed=None):
        left = {ln["id"]: ln.get("circuits", 1) for ln in lines}
        rate = 1.0
        pi = {x["name"]: 0.0 for x in loads}
        if k is not None:
            s = scen[k]
            rate = s.get("exceed_rate", 1.0)
            for o in s.get("outages", []):
                left[o["line"]] -= o.get("circuits", 1)
            pi.update(s.get("fluctuation", {}))
        th = [var("th", 0, 0 if b == slack else None, 0 if b == slack else None) for b in range(nb)]
        node = [[] for _ in range(nb)]
        rhs = [0.0] * nb
        for j, x in enumerate(gens):
            b = pos[x["bus"]]
            node[b].append((g[j], 1))
            if k is not None:
                node[b] += [(up[j], 1), (dn[j], -1)]
        for l, x in enumerate(loads):
            b = pos[x["bus"]]
            rhs[b] += x["demand"] + pi[x["name"]]
            if k is not None:
                node[b].append((shed[l], 1))
        for ln in lines:
            n = ln.get("circuits", 1)
            if left[ln["id"]] <= 0:
                continue
            bsus = left[ln["id"]] / (ln["reactance"] * n)
            f, t = pos[ln["from"]], pos[ln["to"]]
            # flow f->t leaves bus f
            node[f] += [(th[f], -bsus), (th[t], bsus)]
            node[t] += [(th[t], -bsus), (th[f], bsus)]
            cap = ln["capacity"] * (left[ln["id"]] / n) * rate
            A_ub.append(row([(th[f], bsus), (th[t], -bsus)])); b_ub.append(cap)
            A_ub.append(row([(th[f], -bsus), (th[t], bsus)])); b_ub.append(cap)
        first = len(A_eq)
        for b in range(nb):
            A_eq.append(row(node[b])); b_eq.append(rhs[b])
        return first

    base_rows = state(None)
    scen_rows = []
    for k, s in enumerate(scen):
        eps = s["probability"]
        up = [var("u", eps * s["c_up"][x["name"]], 0, None) for x in gens]
        dn = [var("d", -eps * s["c_down"][x["name"]], 0, None) for x in gens]
        pi = s.get("fluctuation", {})
        shed = [var("s", eps * x["c_shed"], 0, x["demand"] + pi.get(x["name"], 0.0)) for x in loads]
        for j in range(ng):
            A_ub.append(row([(up[j], 1), (ru[j], -1)])); b_ub.append(0)
            A_ub.append(row([(dn[j], 1), (rd[j], -1)])); b_ub.append(0)
        scen_rows.append(state(k, up, dn, shed))

    n = len(cols)
    bounds = [(c[2], c[3]) for c in cols]
    if fix:
        for name, v in fix.items():
            for j, c in enumerate(cols):
                if c[0] == name:
                    bounds[j] = (v, v)

    def dense(rows):
        M = np.zeros((len(rows), n))
        for i, r in enumerate(rows):
            for j, v in r.items():
                M[i, j] = v
        return M

    res = linprog([c[1] for c in cols], A_ub=dense(A_ub), b_ub=b_ub, A_eq=dense(A_eq), b_eq=b_eq,
                  bounds=bounds, method="highs")
    if res.status != 0:
        return {"status": res.message}
    # HiGHS marginals are d(objective)/d(rhs), which is the nodal price directly.
    lam0 = res.eqlin.marginals[base_rows:base_rows + nb]
    total = lam0.copy()
    for r in scen_rows:
        total = total + res.eqlin.marginals[r:r + nb]
    return {"status": "optimal", "objective": res.fun,
            "g": [res.x[j] for j in g], "r_up": [res.x[j] for j in ru], "r_down": [res.x[j] for j in rd],
            "bus_price_total": list(total)}


def traditional(case, req_up, req_down):
    """Requirement-based clearing on the base network; returns (g, r_up, r_down, objective)."""
    buses = [b["id"] for b in case["buses"]]
    nb = len(buses)
    pos = {b: i for i, b in enumerate(buses)}
    gens, loads, lines = case["generators"], case["loads"], case["lines"]
    ng = len(gens)
    slack = pos[case["slack_bus"]]
    n = 3 * ng + nb
    c = [x["c_energy"] for x in gens] + [x["c_ru"] for x in gens] + [x["c_rd"] for x in gens] + [0] * nb
    bounds = [(None, None)] * ng + [(0, x["ru_max"]) for x in gens] + [(0, x["rd_max"]) for x in gens]
    bounds += [(0, 0) if b == slack else (None, None) for b in range(nb)]
    A_eq, b_eq, A_ub, b_ub = [], [], [], []
    node = np.zeros((nb, n))
    rhs = np.zeros(nb)
    for j, x in enumerate(gens):
        node[pos[x["bus"]], j] += 1
        r = np.zeros(n); r[j] = 1; r[ng + j] = 1; A_ub.append(r); b_ub.append(x["g_max"])
        r = np.zeros(n); r[2 * ng + j] = 1; r[j] = -1; A_ub.append(r); b_ub.append(-x["g_min"])
    for x in loads:
        rhs[pos[x["bus"]]] += x["demand"]
    for ln in lines:
        bsus = 1.0 / ln["reactance"]
        f, t = pos[ln["from"]], pos[ln["to"]]
        node[f, 3 * ng + f] -= bsus; node[f, 3 * ng + t] += bsus
        node[t, 3 * ng + t] -= bsus; node[t, 3 * ng + f] += bsus
        r = np.zeros(n); r[3 * ng + f] = bsus; r[3 * ng + t] = -bsus
        A_ub.append(r); b_ub.append(ln["capacity"]); A_ub.append(-r); b_ub.append(ln["capacity"])
    A_eq = list(node); b_eq = list(rhs)
    r = np.zeros(n); r[ng:2 * ng] = 1; A_eq.append(r); b_eq.append(req_up)
    r = np.zeros(n); r[2 * ng:3 * ng] = 1; A_eq.append(r); b_eq.append(req_down)
    res = linprog(c, A_ub=np.array(A_ub), b_ub=b_ub, A_eq=np.array(A_eq), b_eq=b_eq, bounds=bounds, method="highs")
    x = res.x
    return list(x[:ng]), list(x[ng:2 * ng]), list(x[2 * ng:3 * ng]), res.fun


def recourse(case, g, r_up, r_down):
    fix = {}
    for j, x in enumerate(case["generators"]):
        fix["g" + x["name"]] = g[j]
        fix["rU" + x["name"]] = r_up[j]
        fix["rD" + x["name"]] = r_down[j]
    return solve(case, fix)


if __name__ == "__main__":
    case = load(sys.argv[1])
    out = solve(case)
    print(json.dumps(out, indent=2))
    if out["status"] == "optimal":
        ru, rd = sum(out["r_up"]), sum(out["r_down"])
        g, u, d, obj = traditional(case, ru, rd)
        rec = recourse(case, g, u, d)
        print(json.dumps({"traditional": {"g": g, "r_up": u, "r_down": d, "objective": obj},
                          "recourse": rec.get("objective", rec["status"])}, indent=2))
