"""Command-line entry point: ``skatlab {gen,selfplay,train,tourney}``.

Exit status: 0 success, 1 usage error, 2 bad input data, 3 internal error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import agents, dataio, training
from .engine import CardError, SkatError, deal
from .neuralnet import EmptyDataset, FormatError, ShapeMismatch, VersionMismatch, save
from .tournament import TournamentError, deal_seed, run_tournament

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3
DEFAULT_SEED = 20190101


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


DATA_ERRORS = (dataio.ParseError, dataio.ReplayError, dataio.InsufficientData, CardError,
               FormatError, ShapeMismatch, VersionMismatch, EmptyDataset, OSError, DataError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _player(text: str, weights_dir=None, aggression=None, lam=None) -> agents.PlayerSpec:
    """Parse a spec; flags fill in weights and override A and lambda."""
    try:
        try:
            spec = agents.parse_player_spec(text)
        except agents.SpecError:
            if not weights_dir:
                raise
            spec = agents.parse_player_spec(text, weights=weights_dir)
        over = {}
        if aggression is not None and spec.name in ("AB", "MV", "MLV"):
            over["aggression"] = aggression
        if lam is not None and spec.name == "MLV":
            over["lam"] = lam
        return replace(spec, **over) if over else spec
    except (agents.SpecError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _cand(text, args):
    return _player(text, args.weights_dir, args.aggression, args.lam)


def _check_loadable(*specs):
    """Load networks before any game starts so a bad weight directory fails early."""
    for spec in specs:
        try:
            agents.make_player(spec)
        except agents.SpecError as exc:
            raise DataError(str(exc)) from exc


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w")


# ------------------------------------------------------------------ commands

def cmd_gen(args) -> int:
    out = _open_out(args.out)
    try:
        for i in range(args.games):
            out.write(deal(deal_seed(args.seed, i)).text() + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_selfplay(args) -> int:
    texts = args.player or ["baseline"]
    if len(texts) == 1:
        texts = texts * 3
    if len(texts) != 3:
        raise UsageError("give --player once (all seats) or three times (one per seat)")
    specs = [_cand(t, args) for t in texts]
    _check_loadable(*specs)
    recs = list(dataio.selfplay_generate(specs, args.games, args.seed))
    if args.out:
        dataio.write_records(recs, args.out)
    played = [r for r in recs if not r.result.passed_out]
    won = sum(r.result.soloist_won for r in played)
    print(f"games={len(recs)} played={len(played)} passed_out={len(recs) - len(played)} "
          f"soloist_won={won}", file=sys.stderr if args.out is None else sys.stdout)
    if args.out is None:
        for r in recs:
            print(dataio.serialize_record(r))
    return EXIT_OK


def _settings(args) -> training.TrainSettings:
    hidden = None
    if args.hidden:
        try:
            width, _, depth = args.hidden.lower().partition("x")
            hidden = (int(width),) * int(depth or 5)
        except ValueError as exc:
            raise UsageError(f"--hidden expects WIDTHxDEPTH, got {args.hidden!r}") from exc
    s = training.TrainSettings(hidden_widths=hidden, seed=args.seed)
    over = {k: v for k, v in (("learning_rate", args.lr), ("dropout_keep", args.keep),
                               ("max_epochs", args.epochs), ("batch_size", args.batch),
                               ("patience", args.patience)) if v is not None}
    if args.test is not None:
        over["test"] = args.test if args.test < 1 else int(args.test)
    return replace(s, **over)


def cmd_train(args) -> int:
    s = _settings(args)
    contexts = args.context or None
    if contexts:
        bad = [c for c in contexts if c not in agents.CONTEXTS]
        if bad:
            raise UsageError(f"unknown context(s): {', '.join(bad)}")
    out = Path(args.out or args.weights_dir or "weights")
    if args.teacher:
        if contexts not in (None, ["declare"]):
            raise UsageError("--teacher only produces the declare context")
        data = training.teacher_declare_dataset(args.teacher, seed=args.seed)
        out.mkdir(parents=True, exist_ok=True)
        w, rep, hist = training.train_context(data, "declare", s)
        save(w, out / "declare.skw")
        epochs = [("declare", h) for h in hist]
        reports = [rep]
    else:
        if not args.records:
            raise UsageError("train needs --records FILE or --teacher N")
        recs = dataio.read_records(args.records)
        if not recs:
            raise dataio.InsufficientData(f"{args.records}: no records")
        epochs = []
        reports = training.train_all(recs, out, s, contexts,
                                     log=lambda m: print(m, file=sys.stderr),
                                     epoch_log=lambda c, h: epochs.append((c, h)))
        if not reports:
            raise dataio.InsufficientData("no context had enough examples")
    table = training.report_table(reports)
    (out / "metrics.txt").write_text(table)
    with open(out / "epochs.txt", "w") as f:
        f.write("context epoch train_loss train_acc test_loss test_acc\n")
        for ctx, h in epochs:
            f.write(f"{ctx} {h.epoch} {h.train_loss:.6f} {h.train_acc:.6f} "
                    f"{h.val_loss:.6f} {h.val_acc:.6f}\n")
    sys.stdout.write(table)
    return EXIT_OK


def cmd_tourney(args) -> int:
    cand = _cand(args.player or "baseline", args)
    base = _player(args.baseline, args.baseline_weights)
    if args.matches < 1:
        raise UsageError("--matches must be at least 1")
    _check_loadable(cand, base)
    rep = run_tournament(cand, base, args.matches, seed=args.seed, threads=args.threads,
                         duplicate=not args.independent_deals)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(f"{args.out}.txt").write_text(rep.table())
        Path(f"{args.out}.kv").write_text(rep.key_values())
    sys.stdout.write(rep.table())
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="skatlab", description="Skat imitation-learning lab.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, games=True):
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED, help="master seed")
        sp.add_argument("--out", help="output path (default: stdout where sensible)")
        if games:
            sp.add_argument("--games", type=int, default=100, help="number of deals/games")

    def player_flags(sp):
        sp.add_argument("--weights-dir", help="weight directory for network players")
        sp.add_argument("--aggression", type=float, help="override A for AB/MV/MLV players")
        sp.add_argument("--lambda", dest="lam", type=float, help="override lambda for MLV")

    g = sub.add_parser("gen", help="write random deals, one per line")
    common(g)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("selfplay", help="play games and write records")
    common(s)
    s.add_argument("--player", action="append",
                   help="player spec; once for all seats or three times (default baseline)")
    player_flags(s)
    s.set_defaults(func=cmd_selfplay)

    t = sub.add_parser("train", help="train networks from records")
    common(t, games=False)
    t.add_argument("--records", help="record file from selfplay")
    t.add_argument("--teacher", type=int, metavar="N",
                   help="train declare on N synthetic decisions of the rule player instead")
    t.add_argument("--context", action="append", help="context to train (repeatable; default all)")
    t.add_argument("--weights-dir", help="alias for --out")
    t.add_argument("--hidden", help="hidden layers as WIDTHxDEPTH, e.g. 64x5")
    t.add_argument("--epochs", type=int)
    t.add_argument("--lr", type=float)
    t.add_argument("--keep", type=float, help="dropout keep probability")
    t.add_argument("--batch", type=int)
    t.add_argument("--patience", type=int)
    t.add_argument("--test", type=float, help="held-out count, or fraction below one")
    t.set_defaults(func=cmd_train)

    r = sub.add_parser("tourney", help="duplicate-deal tournament")
    common(r, games=False)
    r.add_argument("--player", help="candidate spec (default baseline)")
    r.add_argument("--baseline", default="baseline", help="baseline spec (default baseline)")
    r.add_argument("--baseline-weights", help="weight directory for a network baseline")
    r.add_argument("--matches", type=int, default=100, help="matches of six games each")
    r.add_argument("--threads", type=int, default=1, help="worker processes")
    r.add_argument("--independent-deals", action="store_true",
                   help="draw a fresh deal for every game instead of repeating it")
    player_flags(r)
    r.set_defaults(func=cmd_tourney)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"skatlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DATA_ERRORS as exc:
        print(f"skatlab: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (SkatError, TournamentError, AssertionError) as exc:
        print(f"skatlab: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
