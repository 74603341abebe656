"""Multi-view extreme domain adaptation with learned view weights.

Each view ``v`` owns its feature space, hidden map, graph, output
weights ``beta_v`` and drift matrix ``theta_v``; the views are tied
together by a weight vector ``alpha`` on the probability simplex:

    J = sum_v ||beta_v||_{2,1}
      + sum_v alpha_v * (c_source * src_v + c_target * tgt_v
                         + drift_w * drift_v + fidelity_w * fid_v)
      + manifold_w * sum_v alpha_v**r * tr(beta_v' Hv' Lv Hv beta_v)

The exponent ``r > 1`` applies to the graph-smoothness term only; under
that placement the weight update has the closed form
``alpha_v ∝ (1 / q_v)**(1/(r-1))`` with ``q_v`` the per-view smoothness,
which is exactly how it is implemented here.  All block updates reuse
the single-view operations with per-view scale factors.

With one view the solver defers to the single-view path, so histories
match it bit for bit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .data import Dataset, DomainBundle, decode_labels
from .errors import ParameterError, ShapeError
from .features import HiddenMap, derive_view_seed, map_features, new_hidden_map
from .graph import quadratic_energy
from .linalg import solve_spd
from .single import (
    EdaParams,
    EdaProblem,
    REL_STOP,
    beta_gradient,
    build_problem,
    eda_objective,
    fit_eda,
    update_beta,
    update_theta,
    update_u,
)

__all__ = [
    "MvEdaModel",
    "fit_mveda",
    "mv_objective",
    "predict_mveda",
    "update_alpha",
    "update_beta_view",
    "update_theta_view",
    "view_trace",
]

# traces at or below this are treated as exact zeros in the weight update
TRACE_FLOOR = 1e-12


def view_trace(beta: np.ndarray, prob: EdaProblem) -> float:
    """Graph smoothness ``q_v = tr(beta' H' L H beta)`` of one view."""
    return quadratic_energy(prob.graph, prob.h_target @ beta)


def mv_objective(
    betas: list[np.ndarray],
    thetas: list[np.ndarray],
    alpha: np.ndarray,
    problems: list[EdaProblem],
    params: EdaParams,
) -> float:
    """The joint objective over all views (exact row-sparse norms)."""
    total = 0.0
    for beta, theta, a, prob in zip(betas, thetas, alpha, problems, strict=True):
        total += eda_objective(
            beta, theta, prob, params,
            loss_scale=float(a),
            smooth_scale=float(a) ** params.view_exponent,
        )
    return total


def update_beta_view(
    u: np.ndarray,
    theta: np.ndarray,
    prob: EdaProblem,
    view_weight: float,
    params: EdaParams,
) -> np.ndarray:
    """Per-view beta update: the single-view solve with loss terms scaled
    by ``alpha_v`` and the smoothness term by ``alpha_v**r``."""
    return update_beta(
        u, theta, prob, params,
        loss_scale=view_weight,
        smooth_scale=view_weight**params.view_exponent,
    )


def update_theta_view(
    beta: np.ndarray,
    prob: EdaProblem,
    params: EdaParams,
    view_weight: float | None = None,
) -> np.ndarray:
    """Per-view drift update.  The view weight multiplies both the fit and
    the identity-pull term, so it cancels; the argument is accepted only
    to make that explicit at call sites."""
    del view_weight
    return update_theta(beta, prob, params)


def update_alpha(
    traces, view_exponent: float, floor: float = TRACE_FLOOR
) -> np.ndarray:
    """Closed-form simplex weights from per-view smoothness values.

    ``alpha_v ∝ (1 / q_v)**(1 / (r - 1))``, normalized to sum to one.
    Views whose trace is at or below ``floor`` (numerically zero; the
    traces are non-negative up to roundoff) take over the entire mass,
    split evenly among themselves.  If every view is degenerate the
    weights fall back to uniform with a warning.
    """
    q = np.asarray(traces, dtype=np.float64)
    if q.ndim != 1 or q.shape[0] < 1:
        raise ShapeError("traces must be a non-empty vector")
    if view_exponent <= 1.0:
        raise ParameterError(f"view_exponent must exceed 1, got {view_exponent}")
    degenerate = q <= floor
    if degenerate.all():
        warnings.warn(
            "all view smoothness traces are numerically zero; "
            "falling back to uniform view weights",
            RuntimeWarning,
            stacklevel=2,
        )
        return np.full(q.shape[0], 1.0 / q.shape[0])
    alpha = np.zeros(q.shape[0])
    if degenerate.any():
        alpha[degenerate] = 1.0 / degenerate.sum()
        return alpha
    w = (1.0 / q) ** (1.0 / (view_exponent - 1.0))
    return w / w.sum()


@dataclass(frozen=True, eq=False)
class MvEdaModel:
    """A fitted multi-view adaptation model."""

    hidden_maps: list[HiddenMap]
    betas: list[np.ndarray]
    thetas: list[np.ndarray]
    us: list[np.ndarray]
    alpha: np.ndarray
    alpha_history: np.ndarray
    objective_history: np.ndarray
    params: EdaParams

    def __post_init__(self):
        v = len(self.hidden_maps)
        if not (len(self.betas) == len(self.thetas) == len(self.us) == v):
            raise ShapeError("per-view field lists disagree on view count")
        a = np.array(self.alpha, dtype=np.float64)
        if a.shape != (v,):
            raise ShapeError(f"alpha must have shape ({v},), got {a.shape}")
        a.flags.writeable = False
        object.__setattr__(self, "alpha", a)
        h = np.array(self.objective_history, dtype=np.float64)
        h.flags.writeable = False
        object.__setattr__(self, "objective_history", h)
        ah = np.array(self.alpha_history, dtype=np.float64)
        if ah.shape != (h.shape[0], v):
            raise ShapeError(
                f"alpha_history must have shape {(h.shape[0], v)}, got {ah.shape}"
            )
        ah.flags.writeable = False
        object.__setattr__(self, "alpha_history", ah)

    @property
    def n_views(self) -> int:
        return len(self.hidden_maps)


def _check_aligned(bundles: list[DomainBundle]) -> None:
    first = bundles[0]
    for i, b in enumerate(bundles[1:], start=1):
        if b.n_classes != first.n_classes:
            raise ParameterError(
                f"view {i} has {b.n_classes} classes, view 0 has {first.n_classes}"
            )
        same_counts = (
            b.source.n == first.source.n
            and b.target_labeled.n == first.target_labeled.n
            and b.n_unlabeled == first.n_unlabeled
        )
        if not same_counts:
            raise ShapeError(f"view {i} sample counts differ from view 0")
        if not (
            np.array_equal(b.source.labels, first.source.labels)
            and np.array_equal(b.target_labeled.labels, first.target_labeled.labels)
        ):
            raise ParameterError(
                f"view {i} labels differ from view 0; views must describe "
                f"the same samples"
            )


def fit_mveda(
    bundles: list[DomainBundle],
    prelabels,
    params: EdaParams = EdaParams(),
    hidden_maps: list[HiddenMap] | None = None,
) -> MvEdaModel:
    """Run the alternating solver across views.

    Parameters
    ----------
    bundles : list of DomainBundle
        One bundle per view, describing the same samples in different
        feature spaces (labels and counts must agree across views).
    prelabels
        Per-view list of score matrices / callables, or a single one
        shared by every view.
    params : EdaParams
        ``params.seed`` seeds view ``v``'s hidden map through a per-view
        derived seed; pass ``hidden_maps`` to override.
    hidden_maps : list of HiddenMap, optional

    Notes
    -----
    With a single view this defers to :func:`~edapt.single.fit_eda`
    (same seed, same updates), so the objective history is identical
    bit for bit.  The weight vector starts uniform and every iterate
    stays on the simplex.
    """
    if not bundles:
        raise ParameterError("need at least one view")
    n_views = len(bundles)
    if not isinstance(prelabels, (list, tuple)):
        prelabels = [prelabels] * n_views
    if len(prelabels) != n_views:
        raise ShapeError(f"{len(prelabels)} prelabel blocks for {n_views} views")
    if hidden_maps is not None and len(hidden_maps) != n_views:
        raise ShapeError(f"{len(hidden_maps)} hidden maps for {n_views} views")

    if n_views == 1:
        single = fit_eda(
            bundles[0], prelabels[0], params,
            None if hidden_maps is None else hidden_maps[0],
        )
        return MvEdaModel(
            hidden_maps=[single.hidden_map],
            betas=[single.beta],
            thetas=[single.theta],
            us=[single.u],
            alpha=np.array([1.0]),
            alpha_history=np.ones((len(single.objective_history), 1)),
            objective_history=single.objective_history,
            params=params,
        )

    _check_aligned(bundles)
    problems: list[EdaProblem] = []
    maps: list[HiddenMap] = []
    for v, bundle in enumerate(bundles):
        hm = hidden_maps[v] if hidden_maps is not None else new_hidden_map(
            params.n_hidden, bundle.target_dim, params.activation,
            derive_view_seed(params.seed, v),
        )
        prob, hm = build_problem(bundle, prelabels[v], params, hm)
        problems.append(prob)
        maps.append(hm)

    betas, thetas, us, alpha, alphas, history = _alternate_views(problems, params)
    return MvEdaModel(maps, betas, thetas, us, alpha, np.asarray(alphas),
                      np.asarray(history), params)


def _alternate_views(problems: list[EdaProblem], params: EdaParams):
    n_views = len(problems)
    r = params.view_exponent
    # per-view constant blocks, assembled once; the loop only rescales
    # them by the current view weight
    g_loss, g_smooth, rhs_loss = [], [], []
    for prob in problems:
        m = params.c_source * (prob.h_source.T @ prob.h_source)
        m += params.c_target * (prob.h_labeled.T @ prob.h_labeled)
        m += params.fidelity_weight * (prob.h_unlabeled.T @ prob.h_unlabeled)
        g_loss.append(m)
        g_smooth.append(
            params.manifold_weight
            * (prob.h_target.T @ (prob.graph.laplacian @ prob.h_target))
        )
        rhs_loss.append(
            params.c_source * (prob.h_source.T @ prob.t_source)
            + params.fidelity_weight * (prob.h_unlabeled.T @ prob.prelabels)
        )

    us = [np.ones(p.n_hidden) for p in problems]
    thetas = [np.eye(p.n_classes) for p in problems]
    alpha = np.full(n_views, 1.0 / n_views)
    betas: list[np.ndarray] = [None] * n_views  # type: ignore[list-item]
    alphas: list[np.ndarray] = []
    history: list[float] = []
    for _ in range(params.max_iter):
        for v, prob in enumerate(problems):
            av = float(alpha[v])
            a = av * g_loss[v] + av**r * g_smooth[v]
            a[np.diag_indices_from(a)] += us[v]
            rhs = av * (
                rhs_loss[v]
                + params.c_target * (prob.h_labeled.T @ (prob.t_labeled @ thetas[v]))
            )

            def residual(x, v=v, av=av, prob=prob):
                return -0.5 * beta_gradient(x, us[v], thetas[v], prob, params,
                                            av, av**r)

            betas[v] = solve_spd(a, rhs, jitter=1e-10, residual_fn=residual)
        thetas = [update_theta(b, p, params) for b, p in zip(betas, problems)]
        alpha = update_alpha(
            [view_trace(b, p) for b, p in zip(betas, problems)], r
        )
        us = [update_u(b, params.reweight_eps) for b in betas]
        alphas.append(alpha.copy())
        value = mv_objective(betas, thetas, alpha, problems, params)
        history.append(value)
        if len(history) > 1 and abs(history[-2] - value) <= REL_STOP * (
            1.0 + abs(history[-2])
        ):
            break
    return betas, thetas, us, alpha, alphas, history


def predict_mveda(
    model: MvEdaModel, datasets: list[Dataset]
) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
    """Score new samples given one dataset per view.

    Returns ``(labels, fused_scores, per_view_scores)`` where the fused
    scores are the weight-averaged per-view scores
    ``sum_v alpha_v * map_v(X_v) @ beta_v``.
    """
    if len(datasets) != model.n_views:
        raise ShapeError(f"{len(datasets)} datasets for {model.n_views} views")
    per_view = [
        map_features(hm, ds) @ beta
        for hm, ds, beta in zip(model.hidden_maps, datasets, model.betas)
    ]
    ns = {s.shape[0] for s in per_view}
    if len(ns) != 1:
        raise ShapeError(f"views disagree on sample count: {sorted(ns)}")
    fused = sum(a * s for a, s in zip(model.alpha, per_view))
    return decode_labels(fused), fused, per_view
