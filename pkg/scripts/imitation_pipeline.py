"""Self-play the rule player, train every context on it, then pit MLV against a baseline.

    python scripts/imitation_pipeline.py --games 3000 --matches 1000 --out runs/mlv
"""
import argparse
import time
from pathlib import Path

from skatlab import dataio, training
from skatlab.agents import parse_player_spec
from skatlab.tournament import run_tournament


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--games", type=int, default=3000)
    ap.add_argument("--matches", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--hidden", type=int, nargs="+", default=[64] * 5)
    ap.add_argument("--epochs", type=int, default=10)
    ap.add_argument("--player", default="MLV(0.85,0.1)")
    ap.add_argument("--baseline", default="random")
    ap.add_argument("--cardplay", default="network", choices=["network", "baseline"])
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="runs/pipeline")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    records = list(dataio.selfplay_generate(["baseline"] * 3, args.games, seed=args.seed))
    dataio.write_records(records, out / "records.txt")
    print(f"self-play: {len(records)} games in {time.perf_counter() - t0:.0f}s")

    s = training.TrainSettings(hidden_widths=tuple(args.hidden), learning_rate=1e-3,
                               dropout_keep=1.0, max_epochs=args.epochs, batch_size=128,
                               seed=args.seed)
    reports = training.train_all(records, out / "weights", s)
    print(training.report_table(reports))

    cand = parse_player_spec(f"{args.player},weights={out / 'weights'},cardplay={args.cardplay}")
    rep = run_tournament(cand, parse_player_spec(args.baseline), args.matches,
                         seed=args.seed + 1, threads=args.threads)
    (out / "tourney.txt").write_text(rep.table())
    (out / "tourney.kv").write_text(rep.key_values())
    print(rep.table())
    print(f"total {time.perf_counter() - t0:.0f}s")


if __name__ == "__main__":
    main()
