"""End-to-end center learning from unlabeled mixture samples.

Two-step pipeline: screen a covering net against a first batch with a
local hypothesis test (keep net points that pass often, thin them to a
separated set, cap at k), then decode a second batch against the kept
candidates and average the clusters. Accuracy is judged against the
label-revealed genie on the same sample budget.
"""

import numpy as np

from spherecodes import (
    LearnerConfig,
    loss_avg,
    noise_for_beta,
    rng_for,
    run_learner,
    sample_codebook,
)

d, k, beta = 6, 4, 2.0
sigma2 = noise_for_beta(d, k, beta).sigma2

cfg = LearnerConfig(
    eps_I=0.25,
    N=2000,
    Nbar=273,
    test_kind="zero_rate",
    decoder_kind="mismatched_mmse",
    mmse_c=1.4,
    mmse_c2=1.4,
    threshold_const=0.25,
    C_net=16.0,
)

cb = sample_codebook(d, k, rng_for(0, 0))
res = run_learner(cb, sigma2, cfg, 0)
st = res.screening_stats

print(f"d={d} k={k} beta={beta} sigma2={sigma2:.3f}")
print(f"net size {st.net_size}, candidates kept after screening: {res.m}")
print(f"step-2 erasure rate: {st.erasure_rate_step2:.3f}")
print(f"learned-center loss_avg: {res.loss_avg:.4f}")
print(f"genie loss at the same Nbar: {res.genie_loss:.4f}")

print("\ntrue centers vs estimates (first two coordinates):")
for i in range(k):
    t = cb.centers[i, :2]
    # estimates are in learner slot order, match by nearest
    j = int(np.argmin(np.sum((res.estimates - cb.centers[i]) ** 2, axis=1)))
    e = res.estimates[j, :2]
    print(f"  center {i}: ({t[0]: .3f}, {t[1]: .3f})  ->  ({e[0]: .3f}, {e[1]: .3f})")

assert np.isclose(res.loss_avg, loss_avg(cb, res.estimates))
