"""Regularized limits: reading the constant off an asymptotic expansion.

A function with an expansion in powers and log-powers of x has a
well-defined "finite part" as x grows: the coefficient of x^0 log(x)^0.
This script extracts that constant numerically by least-squares fitting a
declared basis to samples on a geometric grid.
"""

import math

import numpy as np

from torusdet import BasisSpec, Expansion, Samples, TO_INFINITY, \
    eval_expansion, extract_reglimit, regularized_limit

print("A hand-built expansion: 2x + 7 log x + 3.5 + 4/x")
e = Expansion(TO_INFINITY, ((1.0, 0, 2.0), (0.0, 1, 7.0), (0.0, 0, 3.5),
                            (-1.0, 0, 4.0)))
print("  value at x=10:", eval_expansion(e, 10.0))
print("  regularized limit (the 3.5):", regularized_limit(e))

print()
print("Numerical extraction for f(n) = pi/2 - arctan(1/n):")
n = 8.0 * 2.0 ** np.arange(9)
y = math.pi / 2 - np.arctan(1.0 / n)
basis = BasisSpec(((0.0, 0), (-1.0, 0), (-3.0, 0), (-5.0, 0), (-7.0, 0)))
a00, unc = extract_reglimit(Samples(n, y), basis)
print(f"  extracted constant: {a00:.12f}")
print(f"  true limit pi/2:    {math.pi / 2:.12f}")
print(f"  uncertainty estimate: {unc:.1e}")

print()
print("Growing functions work the same way: f(n) = n + log n + 2")
y2 = n + np.log(n) + 2.0
a00, unc = extract_reglimit(Samples(n, y2),
                            BasisSpec(((1.0, 0), (0.0, 1), (0.0, 0))))
print(f"  extracted constant: {a00:.12f} (true value 2)")
