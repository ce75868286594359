#!/usr/bin/env python3
"""Independent reference computations for the frozen expected values used in
the C++ unit and acceptance tests. Plain Python, no shared code with the
library. Run: python3 tests/oracles/derive_expected.py"""

import csv
import io
import itertools


def local_cost(x, row, weights):
    total = sum(weights)
    return sum((w / total) * abs(x - y) for w, y in zip(weights, row))


def all_paths(n, m):
    """Every monotone, contiguous warping path from (0,0) to (n-1,m-1)."""
    def rec(i, j):
        if (i, j) == (n - 1, m - 1):
            yield [(i, j)]
            return
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            a, b = i + di, j + dj
            if a < n and b < m:
                for tail in rec(a, b):
                    yield [(i, j)] + tail
    yield from rec(0, 0)


def brute_dtw(x, rows, weights, window):
    best = float("inf")
    for path in all_paths(len(x), len(rows)):
        if any(abs(i - j) > window for i, j in path):
            continue
        best = min(best, sum(local_cost(x[i], rows[j], weights) for i, j in path))
    return best


def type7(values, p):
    s = sorted(values)
    h = (len(s) - 1) * p
    lo = int(h)
    hi = min(lo + 1, len(s) - 1)
    return s[lo] + (h - lo) * (s[hi] - s[lo])


def stoch_metric(target, scenarios, weights):
    steps = []
    for t, tv in enumerate(target):
        vals = [f[t] for f in scenarios]
        mean = sum(w * v for w, v in zip(weights, vals)) / sum(weights)
        steps.append((abs(tv - mean), max(tv - max(vals), 0.0), max(min(vals) - tv, 0.0)))
    return steps, sum(a + b + c for a, b, c in steps) / len(target)


def inverse_probs(dists, eps):
    inv = [1.0 / max(d, eps) for d in dists]
    return [v / sum(inv) for v in inv]


def dispatch_bruteforce(prices, soc0, levels, power):
    """Unit-step battery: SoC levels 0..levels-1, action = SoC delta in
    [-power, power] (100% efficiency, 1 MWh per level, value = price * discharge)."""
    best = None
    for seq in itertools.product(range(-power, power + 1), repeat=len(prices)):
        soc, value, ok = soc0, 0.0, True
        for price, a in zip(prices, seq):
            soc -= a
            if not 0 <= soc < levels:
                ok = False
                break
            value += price * a
        if ok and (best is None or value > best[0]):
            best = (value, seq[0])
    return best


if __name__ == "__main__":
    print("local_cost(2,[1,3,6],{.25,.5,.25}) =", local_cost(2, [1, 3, 6], [0.25, 0.5, 0.25]))
    print("dtw x=[0,2] y=[[1],[1]] W=1 =", brute_dtw([0, 2], [[1], [1]], [1.0], 1))
    print("dtw x=[0,0,10] y=[[10],[0],[0]] W=0 =", brute_dtw([0, 0, 10], [[10], [0], [0]], [1.0], 0))
    print("type7 {1..5} @0.9 =", type7([1, 2, 3, 4, 5], 0.9))
    print("SM example =", stoch_metric([10, 30], [[8, 22], [12, 18]], [0.5, 0.5]))
    print("inverse probs {0,2} eps=1e-6 =", inverse_probs([0, 2], 1e-6))
    print("inverse probs {1,3} =", inverse_probs([1, 3], 1e-6))
    print("mae [1,2] vs [2,4] =", sum(abs(a - b) for a, b in zip([1, 2], [2, 4])) / 2)
    print("improvement 34.84 -> 27 =", 100 * (34.84 - 27) / 34.84)
    print("dispatch prices [0,100] soc0=0 =", dispatch_bruteforce([0, 100], 0, 2, 1))
    print("dispatch prices [100,0] soc0=1 =", dispatch_bruteforce([100, 0], 1, 2, 1))

    text = ("timestamp,product,value\n"
            "2023-07-01T01:00:00Z,B,20\n2023-07-01T00:00:00Z,A,1\n"
            "2023-07-01T00:00:00Z,B,10\n2023-07-01T01:00:00Z,A,2\n"
            "2023-07-01T02:00:00Z,A,3\n2023-07-01T02:00:00Z,B,30\n")
    groups = {}
    for row in csv.DictReader(io.StringIO(text)):
        groups.setdefault(row["product"], []).append((row["timestamp"], float(row["value"])))
    print("interleaved grouping =", {k: [v for _, v in sorted(g)] for k, g in groups.items()})
