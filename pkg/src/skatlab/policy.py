"""Decision rules that turn network outputs into actions."""
from __future__ import annotations

import numpy as np

DEFAULT_LAMBDA = 0.1


class NoLegalAction(ValueError):
    pass


def _mask(n: int, legal) -> np.ndarray:
    if legal is None:
        return np.ones(n, dtype=bool)
    legal = np.asarray(legal)
    if legal.dtype == bool:
        if len(legal) != n:
            raise ValueError("legality mask length mismatch")
        return legal.copy()
    m = np.zeros(n, dtype=bool)
    m[legal.astype(int)] = True
    return m


def renormalize(dist, legal=None) -> np.ndarray:
    """Probabilities restricted to the legal actions, summing to one.

    If every legal action has zero mass the result is uniform over them.
    """
    p = np.asarray(dist, dtype=np.float64)
    m = _mask(len(p), legal)
    if not m.any():
        raise NoLegalAction("no legal action")
    q = np.where(m, np.maximum(p, 0.0), 0.0)
    s = q.sum()
    return q / s if s > 0 else m / m.sum()


def maxbid(dist, aggression: float) -> int:
    """Smallest ladder index whose cumulative probability reaches ``aggression``.

    ``dist`` is ordered by ladder index with passing-without-bid first.
    """
    if not 0.0 <= aggression <= 1.0:
        raise ValueError("aggression must lie in [0, 1]")
    p = np.asarray(dist, dtype=np.float64)
    cum = np.cumsum(p)
    hit = np.nonzero(cum >= aggression)[0]
    if len(hit):
        return int(hit[0])
    # float round-off can leave the total a hair under 1
    return int(np.nonzero(p > 0)[0][-1]) if np.any(p > 0) else 0


def bid_action(maxbid_index: int, current_high_index: int) -> bool:
    """True: bid the next ladder value. False: pass."""
    return maxbid_index > current_high_index


def answer_action(maxbid_index: int, current_high_index: int) -> bool:
    """True: hold ("yes") at the offered bid. False: pass."""
    return maxbid_index >= current_high_index


def di_argmax(dist, legal=None) -> int:
    """Most probable legal action; ties go to the lowest id."""
    q = renormalize(dist, legal)
    m = _mask(len(q), legal)
    return int(np.argmax(np.where(m, q, -1.0)))


def di_sample(dist, legal=None, seed=None) -> int:
    q = renormalize(dist, legal)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return int(rng.choice(len(q), p=q))


def mv_select(values, legal=None) -> int:
    """Highest-valued legal action; ties go to the lowest id."""
    v = np.asarray(values, dtype=np.float64)
    m = _mask(len(v), legal)
    if not m.any():
        raise NoLegalAction("no legal action")
    return int(np.argmax(np.where(m, v, -np.inf)))


def mlv_select(values, dist, legal=None, lam: float = DEFAULT_LAMBDA) -> int:
    """Highest value among legal actions the policy plays with probability >= ``lam``.

    Falls back to the policy's legal argmax if no action clears the threshold.
    """
    v = np.asarray(values, dtype=np.float64)
    m = _mask(len(v), legal)
    p_legal = renormalize(dist, m)
    confident = m & (p_legal >= lam)
    if not confident.any():
        return di_argmax(dist, m)
    return int(np.argmax(np.where(confident, v, -np.inf)))


def cardplay_select(dist, legal) -> int:
    """Legal argmax over the 32 card outputs."""
    return di_argmax(dist, legal)
