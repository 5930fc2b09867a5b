"""JSON game files.

A stochastic game document::

    {
      "states": ["s0", "s1"],
      "actions1": [2, 2],
      "actions2": [2, 2],
      "payoff": [[[...], ...], ...],          # [k][i][j]
      "transition": [[[[...], ...], ...], ...] # [k][i][j] -> prob per next state
    }

A hidden game adds ``"signals": [names]`` and ``"kernel"``, where
``kernel[k][i][j]`` is the joint law of (next state, signal) flattened row-major,
so entry ``k2 * len(signals) + a`` is the probability of moving to ``k2`` and
announcing ``a``. ``transition`` is optional for hidden games; if present it
must agree with the kernel marginal.

Probabilities are checked to 1e-9 and then renormalized.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .hidden import HiddenGameSpec
from .stochastic import FiniteGame

__all__ = ["GameFileError", "load_game_file", "parse_game", "parse_hidden", "game_to_dict"]

LOAD_TOL = 1e-9


class GameFileError(ValueError):
    pass


def _distribution(row, where):
    arr = np.asarray(row, dtype=float)
    if arr.ndim != 1 or not np.all(np.isfinite(arr)):
        raise GameFileError(f"{where}: expected a finite probability vector")
    if np.any(arr < -LOAD_TOL):
        raise GameFileError(f"{where}: negative probability")
    total = arr.sum()
    if abs(total - 1.0) > LOAD_TOL:
        raise GameFileError(f"{where}: probabilities sum to {total!r}")
    arr = np.clip(arr, 0.0, None)
    return arr / arr.sum()


def _require(doc, key):
    if key not in doc:
        raise GameFileError(f"missing field {key!r}")
    return doc[key]


def _action_counts(doc, K):
    a1 = _require(doc, "actions1")
    a2 = _require(doc, "actions2")
    if len(a1) != K or len(a2) != K:
        raise GameFileError("actions1/actions2 need one entry per state")
    if any(int(m) < 1 for m in a1) or any(int(n) < 1 for n in a2):
        raise GameFileError("action counts must be positive")
    return [int(m) for m in a1], [int(n) for n in a2]


def _payoffs(doc, K, a1, a2):
    pay = _require(doc, "payoff")
    if len(pay) != K:
        raise GameFileError("payoff needs one matrix per state")
    out = []
    for k in range(K):
        try:
            g = np.asarray(pay[k], dtype=float)
        except (TypeError, ValueError) as exc:
            raise GameFileError(f"payoff[{k}] is not numeric: {exc}") from None
        if g.shape != (a1[k], a2[k]):
            raise GameFileError(f"payoff[{k}] has shape {g.shape}, expected {(a1[k], a2[k])}")
        if not np.all(np.isfinite(g)):
            raise GameFileError(f"payoff[{k}] has non-finite entries")
        out.append(g)
    return out


def _kernel_rows(rows, k, a1, a2, width, name):
    try:
        if len(rows) != a1[k] or any(len(r) != a2[k] for r in rows):
            raise GameFileError(f"{name}[{k}] must have shape ({a1[k]}, {a2[k]}, {width})")
    except TypeError:
        raise GameFileError(f"{name}[{k}] is malformed") from None
    out = np.empty((a1[k], a2[k], width))
    for i in range(a1[k]):
        for j in range(a2[k]):
            row = rows[i][j]
            if len(row) != width:
                raise GameFileError(f"{name}[{k}][{i}][{j}] has {len(row)} entries, expected {width}")
            out[i, j] = _distribution(row, f"{name}[{k}][{i}][{j}]")
    return out


def parse_game(doc) -> FiniteGame:
    states = _require(doc, "states")
    K = len(states)
    if K == 0:
        raise GameFileError("game has no states")
    a1, a2 = _action_counts(doc, K)
    pay = _payoffs(doc, K, a1, a2)
    trans = _require(doc, "transition")
    if len(trans) != K:
        raise GameFileError("transition needs one entry per state")
    q = [_kernel_rows(trans[k], k, a1, a2, K, "transition") for k in range(K)]
    return FiniteGame(tuple(pay), tuple(q), tuple(str(s) for s in states))


def parse_hidden(doc) -> HiddenGameSpec:
    states = _require(doc, "states")
    signals = _require(doc, "signals")
    K, A = len(states), len(signals)
    if K == 0 or A == 0:
        raise GameFileError("hidden game needs at least one state and one signal")
    a1, a2 = _action_counts(doc, K)
    if len(set(a1)) != 1 or len(set(a2)) != 1:
        raise GameFileError("hidden games need the same action counts in every state")
    pay = np.stack(_payoffs(doc, K, a1, a2))
    kern = _require(doc, "kernel")
    if len(kern) != K:
        raise GameFileError("kernel needs one entry per state")
    flat = np.stack([_kernel_rows(kern[k], k, a1, a2, K * A, "kernel") for k in range(K)])
    kernel = flat.reshape(K, a1[0], a2[0], K, A)
    if "transition" in doc:
        trans = doc["transition"]
        if len(trans) != K:
            raise GameFileError("transition needs one entry per state")
        q = np.stack([_kernel_rows(trans[k], k, a1, a2, K, "transition") for k in range(K)])
        if np.max(np.abs(q - kernel.sum(axis=4))) > LOAD_TOL:
            raise GameFileError("transition disagrees with the kernel marginal")
    return HiddenGameSpec(pay, kernel, tuple(map(str, states)), tuple(map(str, signals)))


def load_game_file(path):
    """Load a game file; returns a HiddenGameSpec if it declares signals."""
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise GameFileError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise GameFileError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise GameFileError("top-level JSON value must be an object")
    try:
        if "signals" in doc or "kernel" in doc:
            return parse_hidden(doc)
        return parse_game(doc)
    except GameFileError:
        raise
    except (TypeError, ValueError) as exc:
        raise GameFileError(str(exc)) from None


def game_to_dict(game):
    """Inverse of :func:`parse_game` / :func:`parse_hidden`."""
    if isinstance(game, HiddenGameSpec):
        K, I, J, _, A = game.kernel.shape
        return {
            "states": list(game.state_names),
            "signals": list(game.signal_names),
            "actions1": [I] * K,
            "actions2": [J] * K,
            "payoff": game.payoff.tolist(),
            "kernel": game.kernel.reshape(K, I, J, K * A).tolist(),
        }
    return {
        "states": list(game.state_names),
        "actions1": [g.shape[0] for g in game.payoff],
        "actions2": [g.shape[1] for g in game.payoff],
        "payoff": [g.tolist() for g in game.payoff],
        "transition": [q.tolist() for q in game.transition],
    }
