#!/usr/bin/env python3
"""Generate the shipped AC/DC case files from the MATPOWER IEEE 14/118-bus data.

The shipped cases are not stock IEEE data: selected AC branches are replaced
by DC lines with VSC terminals, generator and voltage limits are tightened and
the bus-9 capacitor of the 14-bus system becomes a switched bank.  This script
documents every one of those edits and regenerates the JSON files in
``crates/core/cases``.

Requirements: ``pip install pypower`` (pulls numpy/scipy).

Usage: python3 tools/make_cases.py [output-dir]
"""

import json
import os
import sys

from pypower.api import case14, case118, ppoption, runpf

S_BASE = 100.0
LOSS = {"loss_a": 11.033e-3, "loss_b": 3.464e-3, "loss_c": 5.534e-3}
PQ_CIRCLE = {"p0": 0.0, "q0": 0.0, "r_min": 0.0, "r_max": 1.0}
TAP_GRID = {"ratio_min": 0.9, "ratio_max": 1.1, "step": 0.0125}
# MATPOWER's 9900 MVA rating means "unlimited"; keep it as a large per-unit cap.
UNLIMITED_RATING = 99.0

KIND = {1: "pq", 2: "pv", 3: "slack"}


def r6(x):
    return round(float(x), 6)


def buses_from(ppc, drop_shunt_at=()):
    out = []
    for b in ppc["bus"]:
        bid = int(b[0])
        gs, bs = b[4] / S_BASE, b[5] / S_BASE
        if bid in drop_shunt_at:
            gs, bs = 0.0, 0.0
        out.append({
            "id": bid,
            "kind": KIND[int(b[1])],
            "p_load": r6(b[2] / S_BASE),
            "q_load": r6(b[3] / S_BASE),
            "shunt_g": r6(gs),
            "shunt_b": r6(bs),
            "v_min": 0.94,
            "v_max": 1.06,
            "v_ref": 1.0,
        })
    return out


def branches_from(ppc, removed):
    out = []
    for br in ppc["branch"]:
        f, t = int(br[0]), int(br[1])
        if (f, t) in removed or (t, f) in removed:
            continue
        item = {
            "from": f,
            "to": t,
            "r": r6(br[2]),
            "x": r6(br[3]),
            "b_charging": r6(br[4]),
            "s_max": UNLIMITED_RATING,
        }
        if br[8] != 0.0:
            item["tap"] = dict(ratio=r6(br[8]), **TAP_GRID)
        out.append(item)
    return out


def branch_r(ppc, f, t):
    for br in ppc["branch"]:
        if {int(br[0]), int(br[1])} == {f, t}:
            return r6(br[2])
    raise KeyError((f, t))


def converter(ac_bus, dc_bus, x, mode, p_s, q_s, u_dc=1.0):
    return {
        "ac_bus": ac_bus,
        "dc_bus": dc_bus,
        "r_xfmr": 0.0015,
        "x_xfmr": x,
        "b_filter": 0.0,
        **LOSS,
        "mode": mode,
        "p_s_min": -1.0,
        "p_s_max": 1.0,
        "q_s_min": -1.0,
        "q_s_max": 1.0,
        "pq_circle": dict(PQ_CIRCLE),
        "init": {"p_s": p_s, "q_s": q_s, "u_dc": u_dc},
    }


def dc_buses(n):
    return [{"id": i + 1, "u_min": 0.94, "u_max": 1.06, "u_ref": 1.0, "i_max": 1.1}
            for i in range(n)]


def const_udc(u_dc, q_s):
    return {"type": "const_udc_const_qs", "u_dc": u_dc, "q_s": q_s}


def const_ps(p_s, q_s):
    return {"type": "const_ps_const_qs", "p_s": p_s, "q_s": q_s}


# ---------------------------------------------------------------- 14-bus

# Active-power limits: P_G1 <= 3.32, P_G2 <= 1.40, P_G3 <= 0.30, P_G4,5 <= 0.10.
C14_PMAX = {1: 3.32, 2: 1.40, 3: 0.30, 6: 0.10, 8: 0.10}
# Reactive limits widened so the reference operating points stay feasible.
C14_Q = {1: (-0.5, 1.0), 2: (-0.4, 0.5), 3: (0.0, 0.4), 6: (-0.06, 0.4), 8: (-0.06, 0.24)}


def gens_14(ppc):
    out = []
    for g, c in zip(ppc["gen"], ppc["gencost"]):
        bus = int(g[0])
        q_min, q_max = C14_Q[bus]
        out.append({
            "bus": bus,
            "p_min": 0.0,
            "p_max": C14_PMAX[bus],
            "q_min": q_min,
            "q_max": q_max,
            "cost_a": r6(c[4] * S_BASE ** 2),
            "cost_b": r6(c[5] * S_BASE),
            "cost_c": r6(c[6]),
            "p_set": r6(g[1] / S_BASE),
            "v_set": r6(g[5]),
        })
    return out


def case14_base(name, removed):
    ppc = case14()
    return {
        "name": name,
        "s_base": S_BASE,
        # the fixed 19 MVAr capacitor at bus 9 becomes switched bank Q_C,1
        "buses": buses_from(ppc, drop_shunt_at=(9,)),
        "branches": branches_from(ppc, removed),
        "generators": gens_14(ppc),
        "shunts": [{"bus": 9, "q_min": 0.0, "q_max": 0.5, "step": 0.01, "q_set": 0.19}],
        "dc_buses": [],
        "dc_branches": [],
        "converters": [],
    }, ppc


def case14_ac():
    case, _ = case14_base("case14_ac", removed=())
    return case


def case14_2t():
    case, ppc = case14_base("case14_2t", removed={(4, 5)})
    case["dc_buses"] = dc_buses(2)
    case["dc_branches"] = [{"from": 1, "to": 2, "r": branch_r(ppc, 4, 5), "i_max": 1.0}]
    # bus-4 terminal is power-controlled; the bus-5 terminal holds the DC voltage
    case["converters"] = [
        converter(4, 1, 0.1121, const_ps(-0.492, 0.116), -0.492, 0.116),
        converter(5, 2, 0.1121, const_udc(1.0, -0.105), 0.495, -0.105),
    ]
    return case


def case14_3t():
    removed = {(2, 4), (2, 5), (4, 5)}
    case, ppc = case14_base("case14_3t", removed=removed)
    case["dc_buses"] = dc_buses(3)
    case["dc_branches"] = [
        {"from": 1, "to": 2, "r": branch_r(ppc, 2, 4), "i_max": 1.0},
        {"from": 1, "to": 3, "r": branch_r(ppc, 2, 5), "i_max": 1.0},
        {"from": 2, "to": 3, "r": branch_r(ppc, 4, 5), "i_max": 1.0},
    ]
    # VSC3 (bus 5) holds the DC voltage
    case["converters"] = [
        converter(2, 1, 0.150, const_ps(0.877, 0.001), 0.877, 0.001),
        converter(4, 2, 0.150, const_ps(-0.983, 0.124), -0.983, 0.124),
        converter(5, 3, 0.150, const_udc(1.0, -0.135), 0.118, -0.135),
    ]
    return case


# ---------------------------------------------------------------- 118-bus

N_DISPATCHABLE_118 = 14


def gens_118(ppc):
    slack = int(next(b[0] for b in ppc["bus"] if int(b[1]) == 3))
    movable = [(g[8], int(g[0])) for g in ppc["gen"] if int(g[0]) != slack and g[8] > 100.0]
    movable = {bus for _, bus in sorted(movable, reverse=True)[:N_DISPATCHABLE_118]}
    out = []
    for g, c in zip(ppc["gen"], ppc["gencost"]):
        bus = int(g[0])
        p_set = r6(g[1] / S_BASE)
        if bus == slack or bus in movable:
            p_min, p_max = r6(g[9] / S_BASE), r6(g[8] / S_BASE)
        else:
            p_min = p_max = p_set
        out.append({
            "bus": bus,
            "p_min": p_min,
            "p_max": p_max,
            "q_min": r6(g[4] / S_BASE),
            "q_max": r6(g[3] / S_BASE),
            "cost_a": r6(c[4] * S_BASE ** 2),
            "cost_b": r6(c[5] * S_BASE),
            "cost_c": r6(c[6]),
            "p_set": p_set,
            "v_set": r6(g[5]),
        })
    return out


def base_flows_118():
    res, ok = runpf(case118(), ppoption(VERBOSE=0, OUT_ALL=0))
    assert ok, "base 118-bus power flow failed"
    flows = {}
    for br in res["branch"]:
        f, t = int(br[0]), int(br[1])
        flows[(f, t)] = (br[13] / S_BASE, br[14] / S_BASE)
        flows[(t, f)] = (br[15] / S_BASE, br[16] / S_BASE)
    return flows


def case118_base(name, removed):
    ppc = case118()
    return {
        "name": name,
        "s_base": S_BASE,
        "buses": buses_from(ppc),
        "branches": branches_from(ppc, removed),
        "generators": gens_118(ppc),
        "shunts": [],
        "dc_buses": [],
        "dc_branches": [],
        "converters": [],
    }, ppc


def withdrawn(flows, bus, others):
    p = sum(flows[(bus, o)][0] for o in others)
    q = sum(flows[(bus, o)][1] for o in others)
    return round(p, 3), round(q, 3)


def case118_ac():
    case, _ = case118_base("case118_ac", removed=())
    return case


def case118_2t(flows):
    case, ppc = case118_base("case118_2t", removed={(103, 104)})
    case["dc_buses"] = dc_buses(2)
    case["dc_branches"] = [{"from": 1, "to": 2, "r": branch_r(ppc, 103, 104), "i_max": 1.0}]
    p1, q1 = withdrawn(flows, 103, [104])
    p2, q2 = withdrawn(flows, 104, [103])
    case["converters"] = [
        converter(103, 1, 0.150, const_ps(p1, q1), p1, q1),
        converter(104, 2, 0.150, const_udc(1.0, q2), p2, q2),
    ]
    return case


def case118_3t(flows):
    removed = {(103, 104), (103, 105), (104, 105)}
    case, ppc = case118_base("case118_3t", removed=removed)
    case["dc_buses"] = dc_buses(3)
    # DC bus 1 <-> AC 103, DC bus 2 <-> AC 105, DC bus 3 <-> AC 104
    case["dc_branches"] = [
        {"from": 1, "to": 2, "r": branch_r(ppc, 103, 105), "i_max": 1.0},
        {"from": 1, "to": 3, "r": branch_r(ppc, 103, 104), "i_max": 1.0},
        {"from": 3, "to": 2, "r": branch_r(ppc, 104, 105), "i_max": 1.0},
    ]
    p1, q1 = withdrawn(flows, 103, [104, 105])
    p2, q2 = withdrawn(flows, 105, [103, 104])
    p3, q3 = withdrawn(flows, 104, [103, 105])
    case["converters"] = [
        converter(103, 1, 0.150, const_ps(p1, q1), p1, q1),
        converter(105, 2, 0.150, const_ps(p2, q2), p2, q2),
        converter(104, 3, 0.150, const_udc(1.0, q3), p3, q3),
    ]
    return case


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(__file__), "..", "crates", "core", "cases")
    flows = base_flows_118()
    cases = [case14_ac(), case14_2t(), case14_3t(),
             case118_ac(), case118_2t(flows), case118_3t(flows)]
    for case in cases:
        path = os.path.join(out_dir, case["name"] + ".json")
        with open(path, "w") as fh:
            json.dump(case, fh, indent=1)
            fh.write("\n")
        print("wrote", path)


if __name__ == "__main__":
    main()
