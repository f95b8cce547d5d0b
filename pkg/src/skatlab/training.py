"""Train one network per decision context from game records."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .agents import CONTEXTS
from .dataio import InsufficientData, build_datasets, split
from .game import GameRecord
from .neuralnet import Dataset, EpochMetrics, NetworkConfig, NetworkWeights, evaluate, save, train

# value heads regress tournament points divided by this; argmax is unaffected
VALUE_SCALE = 100.0

PRETTY = {
    "bid_answer": "Bid/Answer", "continue_answer": "Continue/Answer",
    "pickup_hand": "Pickup/Hand", "pickup_hand_value": "Pickup/Hand value",
    "declare": "Declare", "declare_value": "Declare value",
}


@dataclass(frozen=True)
class TrainSettings:
    hidden_widths: tuple[int, ...] | None = None  # None: 736 x 5 pre-cardplay, 722 x 5 cardplay
    learning_rate: float = 1e-4
    dropout_keep: float = 0.6
    max_epochs: int = 20
    batch_size: int = 256
    patience: int = 3
    test: int | float = 0.1
    min_examples: int = 20
    seed: int = 0


def context_config(context: str, s: TrainSettings = TrainSettings()) -> NetworkConfig:
    fin, fout, head = CONTEXTS[context]
    hidden = s.hidden_widths or ((722,) * 5 if context.startswith("cardplay") else (736,) * 5)
    return NetworkConfig(fin, tuple(hidden), fout, head=head, dropout_keep=s.dropout_keep,
                         learning_rate=s.learning_rate, max_epochs=s.max_epochs,
                         batch_size=s.batch_size, patience=s.patience, seed=s.seed)


@dataclass(frozen=True)
class ContextReport:
    context: str
    train_size: int
    test_size: int
    epochs: int
    train_loss: float
    train_acc: float
    test_loss: float
    test_acc: float

    def text(self) -> str:
        return (f"context={self.context} train={self.train_size} test={self.test_size} "
                f"epochs={self.epochs} train_loss={self.train_loss:.4f} "
                f"train_acc={self.train_acc:.4f} test_loss={self.test_loss:.4f} "
                f"test_acc={self.test_acc:.4f}")


def _scaled(d: Dataset, head: str) -> Dataset:
    if head != "linear":
        return d
    return Dataset(d.X, d.y.astype(np.float32) / VALUE_SCALE, d.actions)


def train_context(data: Dataset, context: str, s: TrainSettings = TrainSettings(),
                  log: Callable[[EpochMetrics], None] | None = None
                  ) -> tuple[NetworkWeights, ContextReport, list[EpochMetrics]]:
    """Hold out ``s.test`` examples, train with early stopping on them, report both sides."""
    cfg = context_config(context, s)
    if len(data) < max(s.min_examples, 2):
        raise InsufficientData(f"{context}: {len(data)} examples, need {s.min_examples}")
    data = _scaled(data, cfg.head)
    tr, te = split(data, s.test, seed=s.seed)
    w, hist = train(cfg, tr, te, log=log)
    tl, ta = evaluate(w, tr)
    vl, va = evaluate(w, te)
    return w, ContextReport(context, len(tr), len(te), len(hist), tl, ta, vl, va), hist


def train_all(records: Iterable[GameRecord], out_dir, s: TrainSettings = TrainSettings(),
              contexts: Sequence[str] | None = None,
              log: Callable[[str], None] | None = None,
              epoch_log: Callable[[str, EpochMetrics], None] | None = None
              ) -> list[ContextReport]:
    """Train every context with enough data and write ``<context>.skw`` files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    datasets = build_datasets(records, contexts)
    reports = []
    for ctx in CONTEXTS:
        if ctx not in datasets:
            continue
        d = datasets[ctx]
        if len(d) < s.min_examples:
            if log:
                log(f"skip {ctx}: {len(d)} examples")
            continue
        w, rep, hist = train_context(d, ctx, s)
        for h in hist if epoch_log else ():
            epoch_log(ctx, h)
        save(w, out / f"{ctx}.skw")
        reports.append(rep)
        if log:
            log(rep.text())
    (out / "metrics.txt").write_text(report_table(reports))
    return reports


def report_table(reports: Sequence[ContextReport]) -> str:
    """Per-context sizes and accuracies; value heads report MSE instead."""
    rows = [f"{'Phase':<26}{'Train Size':>11}{'Test Size':>10}{'Train Acc.%':>12}"
            f"{'Test Acc.%':>11}"]
    for r in reports:
        name = PRETTY.get(r.context) or r.context.replace("_", " ").title()
        if np.isnan(r.train_acc):
            tail = f"{'mse ' + format(r.train_loss, '.3f'):>12}{format(r.test_loss, '.3f'):>11}"
        else:
            tail = f"{100 * r.train_acc:>12.1f}{100 * r.test_acc:>11.1f}"
        rows.append(f"{name:<26}{r.train_size:>11}{r.test_size:>10}" + tail)
    return "\n".join(rows) + "\n"


def teacher_declare_dataset(n: int, seed: int = 0, teacher=None) -> Dataset:
    """Declare decisions of a deterministic rule player on random holdings.

    Position, pass bid and winning bid are drawn at random so that every
    input row is exercised; all seven declarations are offered as legal.
    """
    from .agents import BaselinePlayer
    from .engine import N_BIDS, deal
    from .features import PreCardplayObservation, encode_pre_cardplay
    from .game import ChoiceObservation, N_DECLARE

    teacher = teacher or BaselinePlayer()
    rng = np.random.default_rng(seed)
    X = np.zeros((n, CONTEXTS["declare"][0]), dtype=np.float32)
    y = np.zeros(n, dtype=np.int64)
    for i in range(n):
        d = deal(int(rng.integers(2**31)))
        seat = int(rng.integers(3))
        hand = frozenset(d.hands[seat])
        win = int(rng.integers(1, N_BIDS))
        pass_bid = int(rng.integers(0, win + 1)) or None
        pre = PreCardplayObservation(hand=hand, position=seat, hand_plus_skat=hand | set(d.skat),
                                     bid_answer_pass_bid=pass_bid, winning_bid=win)
        obs = ChoiceObservation(seat, "Declare", pre, tuple(range(N_DECLARE)))
        X[i] = encode_pre_cardplay("Declare", pre)
        y[i] = teacher.declare(obs)
    return Dataset(X, y)
