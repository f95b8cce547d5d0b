"""Independent reference computations shared by the unit and acceptance tests."""
import numpy as np

from skatlab.engine import CardplayState
from skatlab.neuralnet import NetworkConfig, _run, dropout_masks, init, loss_and_grads


def engine_minimax(state: CardplayState):
    """Straight minimax on the engine itself, for cross-checking the oracle."""
    if state.finished:
        return state.soloist_points, state.soloist_tricks
    results = []
    for c in state.legal_moves():
        s = state.copy()
        s.play(c)
        results.append(engine_minimax(s))
    solo = state.to_move == state.soloist
    if state.declaration.is_null:
        key = lambda r: r[1]
        return min(results, key=key) if solo else max(results, key=key)
    key = lambda r: r[0]
    return max(results, key=key) if solo else min(results, key=key)


def numeric_grads(w, X, y, actions, masks, h=1e-4):
    """Central differences over every parameter."""
    out = []
    for p in w.params():
        g = np.zeros_like(p)
        it = np.nditer(p, flags=["multi_index"])
        for _ in it:
            i = it.multi_index
            old = p[i]
            p[i] = old + h
            lp, _, _ = loss_and_grads(w, X, y, actions, masks)
            p[i] = old - h
            lm, _, _ = loss_and_grads(w, X, y, actions, masks)
            p[i] = old
            g[i] = (lp - lm) / (2 * h)
        out.append(g)
    return out


def max_relative_error(analytic, numeric, floor=1e-6):
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


def random_problem(seed):
    rng = np.random.default_rng(seed)
    n_hidden = int(rng.integers(1, 4))
    hidden = tuple(int(x) for x in rng.integers(2, 17, size=n_hidden))
    head = "softmax" if seed % 2 == 0 else "linear"
    out = int(rng.integers(2, 6))
    cfg = NetworkConfig(input_width=int(rng.integers(2, 8)), hidden_widths=hidden,
                        output_width=out, head=head, dropout_keep=0.7)
    w = init(cfg, seed=seed, dtype=np.float64)
    for b in w.biases:
        b[:] = rng.normal(0, 0.1, size=b.shape)
    # central differences are meaningless across a ReLU kink: redraw inputs
    # until every hidden pre-activation is well clear of zero
    while True:
        X = rng.normal(size=(5, cfg.input_width))
        _, _, pres = _run(w, X, None)
        if all(np.min(np.abs(z)) > 1e-2 for z in pres[:-1]):
            break
    if head == "softmax":
        y, actions = rng.integers(0, out, size=5), None
    else:
        y, actions = rng.normal(size=5), rng.integers(0, out, size=5)
    masks = dropout_masks(cfg, 5, rng, np.float64) if seed % 3 == 0 else None
    return w, X, y, actions, masks
