"""The closed-form reference curves.

All rates in nats. capacity/capacity_inv convert between noise level and
achievable rate; the remaining formulas bound how many samples any
learner needs (lower bounds) or how much information samples can carry
(upper bounds).
"""

import math

from spherecodes import (
    capacity,
    capacity_inv,
    labeled_mi_upper,
    quantitative_lower_curve,
    rate,
    rdf_lower_bound,
    sc_lower_trivial,
    single_sample_mi_upper,
)

print("noise -> rate and back:")
for s2 in (0.25, 1.0, 4.0):
    y = capacity(s2)
    print(f"  sigma2={s2:5.2f}  capacity={y:.4f} nats  inverse={capacity_inv(y):.4f}")

d, k = 100, 10
print(f"\ndescribing k={k} centers in d={d} to precision eps:")
for eps in (0.1, 0.01, 0.001):
    print(f"  eps={eps:6.3f}  rate-distortion floor {rdf_lower_bound(d, k, eps):10.1f} nats")

print(f"\nlabel-revealed information cap, d={d} k={k} sigma2=1:")
for n in (10, 100, 1000):
    print(f"  n={n:5d}  {labeled_mi_upper(d, k, 1.0, n):9.2f} nats")

print("\ntrivial sample-complexity floor e^(-2R)/eps - 1 at eps=0.01:")
for dd, kk in ((100, 10), (16, 2981), (8, 256)):
    R = rate(dd, kk)
    print(f"  d={dd:3d} k={kk:4d} R={R:.3f}  floor={sc_lower_trivial(0.01, R):8.1f}")

k = 4096
print(f"\nper-sample information cap at k={k}, slack delta=0.1:")
for e in (0.0, 0.1, 0.3):
    v = single_sample_mi_upper(0.1, e, k)
    print(f"  decode error e={e:.1f}  cap={v:.4f} nats (ln k = {math.log(k):.2f})")

print("\nsuper-linear factor above capacity (samples per center grow like this):")
for kk in (100, 10_000, 10**6):
    v = quantitative_lower_curve("positive", 64, kk)
    print(f"  k={kk:>8d}  factor {v:6.3f}")
