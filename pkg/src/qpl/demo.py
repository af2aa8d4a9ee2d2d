"""Symmetric partial sums of the cotangent series.

S_N(x) = sum_{|k| <= N} 1 / (2 pi (x + k)) tends to 1/2 cot(pi x). The pair
(k, -k) contributes x / (pi (x^2 - k^2)), so the tail after N is
-x / (pi N) + O(1/N^2) and the error decays like 1/N.
"""

from __future__ import annotations

import math

import numpy as np


def partial_sum(x, N):
    """S_N(x), summed pairwise with :func:`math.fsum`."""
    if float(x).is_integer():
        raise ValueError("x must not be an integer (the series has a pole)")
    terms = [1.0 / (2.0 * math.pi * x)]
    terms += [x / (math.pi * (x * x - k * k)) for k in range(1, N + 1)]
    return math.fsum(terms)


def cotangent_limit(x):
    """1/2 cot(pi x), exactly 0 at half-integers."""
    if float(x).is_integer():
        raise ValueError("x must not be an integer (the series has a pole)")
    if float(2 * x).is_integer():
        return 0.0
    return 0.5 / math.tan(math.pi * x)


def half_integer_sum(x, N):
    """Exact S_N at a half-integer x: terms at +-j cancel, leaving the unpaired ones."""
    if not float(2 * x).is_integer() or float(x).is_integer():
        raise ValueError("x must be a half-integer")
    twice = {int(round(2 * x)) + 2 * k for k in range(-N, N + 1)}  # values 2 (x + k)
    return math.fsum(1.0 / (math.pi * t) for t in sorted(twice) if -t not in twice)


def cotangent_demo(x, nmax):
    """Table of S_N(x) for N = 1, 10, ..., nmax with errors and a fitted log-log rate."""
    if nmax < 1:
        raise ValueError("nmax must be at least 1")
    limit = cotangent_limit(x)
    Ns = [10**j for j in range(int(math.log10(nmax)) + 1)]
    if Ns[-1] != nmax:
        Ns.append(int(nmax))
    rows = []
    for N in Ns:
        s = partial_sum(x, N)
        row = {"N": N, "S_N": s, "error": abs(s - limit),
               "tail_estimate": abs(x) / (math.pi * N)}
        if float(2 * x).is_integer():
            row["exact"] = half_integer_sum(x, N)
        rows.append(row)
    errs = np.array([r["error"] for r in rows])
    ok = errs > 0
    rate = None
    if ok.sum() >= 2:
        rate = float(np.polyfit(np.log([r["N"] for r, k in zip(rows, ok) if k]),
                                np.log(errs[ok]), 1)[0])
    monotone = bool(np.all(np.diff(errs) < 0))
    return {"x": x, "limit": limit, "rows": rows, "rate": rate, "monotone": monotone}


def format_demo(result):
    lines = [f"x = {result['x']}, limit 1/2 cot(pi x) = {result['limit']:.16g}",
             f"{'N':>10} {'S_N':>22} {'|S_N - limit|':>14} {'x/(pi N)':>12}"]
    for r in result["rows"]:
        line = (f"{r['N']:>10} {r['S_N']:>22.16g} {r['error']:>14.3e} "
                f"{r['tail_estimate']:>12.3e}")
        if "exact" in r:
            line += f"  exact {r['exact']:.16g}"
        lines.append(line)
    rate = result["rate"]
    lines.append(f"fitted rate: error ~ N^{rate:.3f}" if rate is not None else
                 "fitted rate: n/a")
    lines.append(f"error decreasing in N: {result['monotone']}")
    return "\n".join(lines) + "\n"
