#!/usr/bin/env python3
# Independent dict-based reference simulation of the butterfly protocol.
# Used once to compute the frozen constants asserted in the C++ tests.
import cmath
import itertools
import math

import numpy as np


def inv(x, p):
    return pow(x, p - 2, p)


def phi(k, p):
    return np.array([cmath.exp(2j * math.pi * k * a / p) for a in range(p)]) / math.sqrt(p)


REGS = ["r1", "r2", "1", "2", "5", "6", "7", "8", "9", "10", "11", "12", "13"]


def gates(p, b1):
    h = inv(2, p)
    return [
        ("5", [("1", 2)], b1), ("6", [("2", 2)], b1), ("7", [("1", 1)], b1),
        ("8", [("2", 1)], b1), ("9", [("5", 1), ("6", 1)], 0), ("10", [("9", 1)], 0),
        ("11", [("9", 1)], 0), ("12", [("11", h), ("8", p - 1)], 0),
        ("13", [("10", h), ("7", p - 1)], 0),
    ]


def attack_keep_phi0(p):
    V = np.zeros((p * p, p), complex)
    for a in range(p):
        for x in range(p):
            V[a * p + x, a] = 1 / math.sqrt(p)
    return V


def attack_measure_z(p):
    V = np.zeros((p * p, p), complex)
    for a in range(p):
        V[a * p + a, a] = 1
    return V


def after_step2(p, b1, edge, V):
    st = {}
    for a1 in range(p):
        for a2 in range(p):
            t = dict.fromkeys(REGS, 0)
            t.update({"r1": a1, "r2": a2, "1": a1, "2": a2})
            t["E"] = 0
            st[tuple(sorted(t.items()))] = 1 / p
    for tgt, ctl, c in gates(p, b1):
        nst = {}
        for k, amp in st.items():
            t = dict(k)
            t[tgt] = (t[tgt] + sum(co * t[r] for r, co in ctl) + c) % p
            nk = tuple(sorted(t.items()))
            nst[nk] = nst.get(nk, 0) + amp
        st = nst
        if V is not None and tgt == str(edge):
            dE = V.shape[0] // p
            nst = {}
            for k, amp in st.items():
                t = dict(k)
                a = t[tgt]
                for e in range(dE):
                    for x in range(p):
                        v = V[e * p + x, a]
                        if abs(v) < 1e-15:
                            continue
                        t2 = dict(t)
                        t2[tgt] = x
                        t2["E"] = e
                        nk = tuple(sorted(t2.items()))
                        nst[nk] = nst.get(nk, 0) + amp * v
            st = nst
    return st


MEAS = ["1", "2", "5", "6", "7", "8", "9", "10", "11"]
M1 = {"1": 1, "2": 0, "5": 2, "6": 0, "7": 1, "8": 0, "9": 2, "10": 2, "11": 2}
M2 = {"1": 0, "2": 1, "5": 0, "6": 2, "7": 0, "8": 1, "9": 2, "10": 2, "11": 2}


def average_fidelity(p, b1, edge, V):
    st = after_step2(p, b1, edge, V)
    w = cmath.exp(2j * math.pi / p)
    total = 0.0
    for c in itertools.product(range(p), repeat=len(MEAS)):
        cd = dict(zip(MEAS, c))
        rest = {}
        for k, amp in st.items():
            t = dict(k)
            # outcome C projects onto conj(phi_C): coefficient omega^{+C z}/sqrt(p)
            ex = sum(cd[r] * t[r] for r in MEAS)
            co = w ** ex / math.sqrt(p) ** len(MEAS)
            s1 = -sum(cd[r] * M1[r] for r in MEAS)
            s2 = -sum(cd[r] * M2[r] for r in MEAS)
            co *= w ** (s1 * t["12"]) * w ** (s2 * t["13"])
            rk = (t["r1"], t["r2"], t["12"], t["13"], t["E"])
            rest[rk] = rest.get(rk, 0) + amp * co
        # sum over E of |<Phi Phi| psi_E>|^2 ; this is prob * fidelity
        byE = {}
        for (r1, r2, z12, z13, e), amp in rest.items():
            if r1 == z12 and r2 == z13:
                byE[e] = byE.get(e, 0) + amp / p
        total += sum(abs(v) ** 2 for v in byE.values())
    return total


if __name__ == "__main__":
    p = 3
    for b1 in range(p):
        print("honest b1=%d" % b1, average_fidelity(p, b1, None, None))
        print("keep_phi0 e11 b1=%d" % b1, repr(average_fidelity(p, b1, 11, attack_keep_phi0(p))))
        print("measure_z e7 b1=%d" % b1, repr(average_fidelity(p, b1, 7, attack_measure_z(p))))
