"""Uniform points on the radius-sqrt(d) sphere, plus covering nets.

Run from the repo root after an editable install:

    python3 demos/01_sampling_and_nets.py
"""

import numpy as np

from spherecodes import (
    build_net,
    net_size,
    project_ball,
    rng_for,
    sample_uniform_sphere_batch,
    verify_covering,
)

d = 8
rng = rng_for(42, 0)

pts = sample_uniform_sphere_batch(d, 5, rng)
print(f"five uniform points on the radius-sqrt({d}) sphere:")
print(np.round(pts, 3))
print("squared norms / d:", np.round(np.sum(pts**2, axis=1) / d, 12))

# projection clips anything outside the closed ball back to the surface
far = 10.0 * pts[0]
print("\nprojection of a far point has norm^2/d =",
      float(np.sum(project_ball(far) ** 2) / d))

# a covering net: every ball point is within the target radius of some
# net point. net_size tells you the cost before you pay it.
d, eps = 6, 0.3
print(f"\nnet for d={d}, eps_I={eps}: {net_size(d, eps, 16.0)} points")
net = build_net(d, eps, "randomized", rng_for(42, 1), C_net=16.0)
frac = verify_covering(net, 2000, rng_for(42, 2))
print(f"covering check on 2000 random probes: {frac:.4f} covered")
print("certified >= 0.999:", frac >= 0.999)
