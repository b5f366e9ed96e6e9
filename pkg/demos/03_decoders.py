"""The decoder families side by side on one noisy batch.

Nearest-neighbor always answers. The threshold decoders (correlation and
residual) may return ERASURE = -1 instead of guessing, which is what the
center learner wants: a wrong confident answer poisons a cluster, an
erasure just costs one sample.
"""

import numpy as np

from spherecodes import (
    ERASURE,
    DecoderSpec,
    decode_batch,
    estimate_error_prob,
    noise_for_beta,
    rng_for,
    sample_codebook,
    sample_gmm,
)

d, k, beta = 64, 256, 2.0
sigma2 = noise_for_beta(d, k, beta).sigma2
cb = sample_codebook(d, k, rng_for(1, 0))
batch = sample_gmm(cb, sigma2, 2000, rng_for(1, 1))
truth = batch.privileged_labels()

specs = {
    "nn": DecoderSpec.nn(),
    "corr": DecoderSpec.corr(eta1=0.35, eta2=0.35),
    "mmse": DecoderSpec.mmse(sigma2, c=1.2, c2=1.2),
}

print(f"d={d} k={k} beta={beta} sigma2={sigma2:.3f}, 2000 draws\n")
print(f"{'decoder':8s} {'correct':>8s} {'wrong':>8s} {'erased':>8s}")
for name, spec in specs.items():
    out = decode_batch(cb, batch.observations(), spec)
    erased = int(np.sum(out == ERASURE))
    correct = int(np.sum(out == truth))
    wrong = len(out) - erased - correct
    print(f"{name:8s} {correct:8d} {wrong:8d} {erased:8d}")

# the Monte Carlo estimator wraps this with fixed-size trial blocks,
# fresh codebook noise per block, and a Wilson confidence interval
est = estimate_error_prob(cb, sigma2, DecoderSpec.nn(), 10_000, 0, seed_path=(1, 2))
print(f"\nnn error probability on 10^4 trials: {est.rho_hat:.4f} "
      f"(95% CI {est.ci_low:.4f}..{est.ci_high:.4f})")

# erasures count as errors in rho_hat; the counts are also kept separate
est2 = estimate_error_prob(cb, sigma2, specs["mmse"], 10_000, 0, seed_path=(1, 3))
print(f"mmse: rho_hat={est2.rho_hat:.4f} errors={est2.error_count} "
      f"of which erasures={est2.erasure_count}")
