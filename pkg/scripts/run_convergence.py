"""Trace the objective (and view weights) across alternating rounds.

Fits the single-view model and a two-view variant (second view = noise
features) on one synthetic seed and prints both trajectories.

Usage: python scripts/run_convergence.py [--seed N] [--n-hidden L] [--max-iter T]
"""

import argparse
from dataclasses import replace

from edapt import (
    EdaParams,
    augment_noise_view,
    default_shift_spec,
    derive_view_seed,
    fit_eda,
    fit_mveda,
    generate_shift,
    new_hidden_map,
    preclassify_elm,
    standardize_bundle,
)

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--seed", type=int, default=0)
parser.add_argument("--n-hidden", type=int, default=200)
parser.add_argument("--max-iter", type=int, default=10)
args = parser.parse_args()

params = EdaParams(n_hidden=args.n_hidden, max_iter=args.max_iter, seed=args.seed)
bundle = standardize_bundle(generate_shift(default_shift_spec(args.seed)))

hm = new_hidden_map(args.n_hidden, 2, params.activation, args.seed)
model = fit_eda(bundle, preclassify_elm(bundle, hm, 1.0), params, hidden_map=hm)
print("single view")
for it, obj in enumerate(model.objective_history, start=1):
    print(f"  round {it:2d}  objective {obj:.10f}")

noisy = augment_noise_view(bundle, 2, derive_view_seed(args.seed, 1))
maps = [hm, new_hidden_map(args.n_hidden, 4, params.activation,
                           derive_view_seed(args.seed, 1))]
phis = [preclassify_elm(b, m, 1.0) for b, m in zip((bundle, noisy), maps)]
mv = fit_mveda([bundle, noisy], phis, params, maps)
print("two views (second = noise features)")
for it, (obj, alpha) in enumerate(zip(mv.objective_history, mv.alpha_history),
                                  start=1):
    weights = " ".join(f"{a:.4f}" for a in alpha)
    print(f"  round {it:2d}  objective {obj:.10f}  weights {weights}")
