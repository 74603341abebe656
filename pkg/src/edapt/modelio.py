"""Text serialization of fitted models.

Every model file is plain JSON (binary-free, diff-friendly); floats are
written with full round-trip precision.  Multi-view models are saved as
a directory: one ``view<i>.json`` per view, the shared weights in
``alpha.txt`` (one value per line), and ``mveda.json`` with parameters
and objective history.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict

import numpy as np

from .baselines import ElmModel
from .errors import ParseError
from .features import HiddenMap
from .multiview import MvEdaModel
from .single import EdaModel, EdaParams

__all__ = ["load_model", "save_model"]


def _map_block(hm: HiddenMap) -> dict:
    return {
        "weights": hm.weights.tolist(),
        "biases": hm.biases.tolist(),
        "activation": hm.activation,
        "seed": hm.seed,
    }


def _map_from_block(d: dict) -> HiddenMap:
    return HiddenMap(
        np.asarray(d["weights"]), np.asarray(d["biases"]), d["activation"], d["seed"]
    )


def _dump(obj: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")


def _view_block(hm: HiddenMap, beta, theta, u) -> dict:
    return {
        "kind": "eda_view",
        "hidden_map": _map_block(hm),
        "beta": np.asarray(beta).tolist(),
        "theta": np.asarray(theta).tolist(),
        "u": np.asarray(u).tolist(),
    }


def save_model(model, path: str) -> str:
    """Serialize a fitted model; returns the path written.

    ``ElmModel`` and ``EdaModel`` become single JSON files;
    ``MvEdaModel`` becomes a directory (``path`` is created).
    """
    if isinstance(model, ElmModel):
        _dump(
            {
                "kind": "elm",
                "hidden_map": _map_block(model.hidden_map),
                "beta": model.beta.tolist(),
                "ridge": model.ridge,
            },
            path,
        )
        return path
    if isinstance(model, EdaModel):
        _dump(
            {
                "kind": "eda",
                "hidden_map": _map_block(model.hidden_map),
                "beta": model.beta.tolist(),
                "theta": model.theta.tolist(),
                "u": model.u.tolist(),
                "objective_history": model.objective_history.tolist(),
                "params": asdict(model.params),
            },
            path,
        )
        return path
    if isinstance(model, MvEdaModel):
        os.makedirs(path, exist_ok=True)
        for v in range(model.n_views):
            _dump(
                _view_block(
                    model.hidden_maps[v], model.betas[v], model.thetas[v], model.us[v]
                ),
                os.path.join(path, f"view{v}.json"),
            )
        with open(os.path.join(path, "alpha.txt"), "w", encoding="utf-8",
                  newline="\n") as fh:
            for a in model.alpha:
                fh.write(f"{repr(float(a))}\n")
        _dump(
            {
                "kind": "mveda",
                "n_views": model.n_views,
                "alpha_history": model.alpha_history.tolist(),
                "objective_history": model.objective_history.tolist(),
                "params": asdict(model.params),
            },
            os.path.join(path, "mveda.json"),
        )
        return path
    raise TypeError(f"cannot serialize {type(model).__name__}")


def load_model(path: str):
    """Load a model written by :func:`save_model` (file or directory)."""
    if os.path.isdir(path):
        with open(os.path.join(path, "mveda.json"), encoding="utf-8") as fh:
            head = json.load(fh)
        if head.get("kind") != "mveda":
            raise ParseError(f"{path}: not a multi-view model directory")
        params = EdaParams(**head["params"])
        maps, betas, thetas, us = [], [], [], []
        for v in range(head["n_views"]):
            with open(os.path.join(path, f"view{v}.json"), encoding="utf-8") as fh:
                blk = json.load(fh)
            if blk.get("kind") != "eda_view":
                raise ParseError(f"{path}/view{v}.json: wrong kind {blk.get('kind')!r}")
            maps.append(_map_from_block(blk["hidden_map"]))
            betas.append(np.asarray(blk["beta"]))
            thetas.append(np.asarray(blk["theta"]))
            us.append(np.asarray(blk["u"]))
        alpha = []
        with open(os.path.join(path, "alpha.txt"), encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    alpha.append(float(line))
        return MvEdaModel(
            maps, betas, thetas, us, np.asarray(alpha),
            np.asarray(head["alpha_history"]),
            np.asarray(head["objective_history"]), params,
        )
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    kind = d.get("kind")
    if kind == "elm":
        return ElmModel(_map_from_block(d["hidden_map"]), np.asarray(d["beta"]),
                        d["ridge"])
    if kind == "eda":
        return EdaModel(
            _map_from_block(d["hidden_map"]),
            np.asarray(d["beta"]),
            np.asarray(d["theta"]),
            np.asarray(d["u"]),
            np.asarray(d["objective_history"]),
            EdaParams(**d["params"]),
        )
    raise ParseError(f"{path}: unknown model kind {kind!r}")
