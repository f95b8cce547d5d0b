"""Train the Declare network on synthetic decisions of the rule player.

    python scripts/declare_imitation.py --examples 50000 --hidden 64 64 64 64 64
"""
import argparse

from skatlab import dataio, training
from skatlab.neuralnet import evaluate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--examples", type=int, default=50_000)
    ap.add_argument("--held-out", type=int, default=5_000)
    ap.add_argument("--hidden", type=int, nargs="+", default=[64] * 5)
    ap.add_argument("--lr", type=float, default=1e-3)
    ap.add_argument("--keep", type=float, default=1.0)
    ap.add_argument("--epochs", type=int, default=20)
    ap.add_argument("--batch", type=int, default=128)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    data = training.teacher_declare_dataset(args.examples, seed=args.seed)
    rest, held_out = dataio.split(data, args.held_out, seed=args.seed + 1)
    s = training.TrainSettings(hidden_widths=tuple(args.hidden), learning_rate=args.lr,
                               dropout_keep=args.keep, max_epochs=args.epochs,
                               batch_size=args.batch, patience=args.epochs,
                               test=args.held_out, seed=args.seed)
    w, rep, hist = training.train_context(
        rest, "declare", s, log=lambda m: print(f"epoch {m.epoch:2d} train {m.train_acc:.4f} "
                                                f"val {m.val_acc:.4f}"))
    print(rep.text())
    print(f"held-out accuracy {evaluate(w, held_out)[1]:.4f}")


if __name__ == "__main__":
    main()
