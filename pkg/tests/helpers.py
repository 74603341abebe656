"""Small deterministic problem builders shared across the test modules."""

import numpy as np

from edapt import Dataset, DomainBundle, EdaParams, build_problem

__all__ = ["blob_bundle", "small_params", "small_problem", "random_prelabels"]


def blob_bundle(seed=0, d=2, c=3, per_source=4, per_labeled=2, per_unlabeled=3,
                per_test=0, shift=1.0):
    """Gaussian class blobs with a translated target domain.

    Counts are per class.  Built directly from a local RNG so the tests
    do not lean on the package's own synthetic generator.
    """
    rng = np.random.default_rng(seed)
    means = rng.normal(0.0, 3.0, size=(c, d))

    def block(per_class, translate):
        xs, ys = [], []
        for i in range(c):
            x = means[i][:, None] + 0.5 * rng.standard_normal((d, per_class))
            xs.append(x + translate)
            ys.append(np.full(per_class, i, dtype=np.int64))
        return np.hstack(xs), np.concatenate(ys)

    xs, ys = block(per_source, 0.0)
    xl, yl = block(per_labeled, shift)
    xu, _ = block(per_unlabeled, shift)
    source = Dataset(xs, ys)
    labeled = Dataset(xl, yl)
    unlabeled = Dataset(xu) if per_unlabeled > 0 else None
    test = None
    if per_test > 0:
        xt, yt = block(per_test, shift)
        test = Dataset(xt, yt)
    return DomainBundle(source, labeled, unlabeled, c, test)


def small_params(**overrides):
    defaults = dict(n_hidden=24, n_neighbors=3, c_source=1.0, c_target=10.0,
                    fidelity_weight=5.0, manifold_weight=1.0)
    defaults.update(overrides)
    return EdaParams(**defaults)


def random_prelabels(bundle, seed=0):
    rng = np.random.default_rng(seed + 1000)
    return rng.uniform(-1.0, 1.0, size=(bundle.n_unlabeled, bundle.n_classes))


def small_problem(seed=0, **overrides):
    """A ready-to-solve (problem, params) pair on a tiny bundle."""
    bundle = blob_bundle(seed)
    params = small_params(**overrides)
    prob, _ = build_problem(bundle, random_prelabels(bundle, seed), params)
    return prob, params
