#
# Walk through the integer-set reduction on three small knapsack regions.
# Each run prints the floor start, the binding rows, and every ratio or
# probe step until the lower corner settles.
#
# Usage:
#
# $ python demos/01_reduction_walkthrough.py
#

from fendec import reduce_integer_set

PROBLEMS = [
    ("one knapsack row", dict(W=[[0.4, 1.0]], tau=[3.4], u=[3, 3], y_hat=[3.0, 2.2])),
    ("mirrored rows", dict(W=[[0.4, 1.0], [1.0, 0.4]], tau=[3.4, 3.4],
                           u=[3, 3], y_hat=[17 / 7, 17 / 7])),
    ("heavy weights", dict(W=[[6.0, 5.0]], tau=[37.4], u=[5, 5], y_hat=[5.0, 1.48])),
]

for title, data in PROBLEMS:
    print(f"=== {title} ===")
    trace = reduce_integer_set(**data)
    print(trace.describe())
    print()

# the third region shows why the probe matters: the ratio rules alone stop
# at (4, 0), which still excludes the feasible lattice point (2, 5)
ratio_only = reduce_integer_set(probe=False, **PROBLEMS[2][1])
full = reduce_integer_set(probe=True, **PROBLEMS[2][1])
print(f"heavy weights without the probe: {ratio_only.final.astype(int).tolist()}")
print(f"heavy weights with the probe:    {full.final.astype(int).tolist()}")
