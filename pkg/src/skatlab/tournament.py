"""Duplicate-deal tournaments between a candidate and a baseline player.

Every match plays one deal six times, once per seat configuration with at
least one of each player type. Only the cards are repeated: every game gives
each seat a fresh random stream, so stochastic players do not replay their
own coin flips. Deterministic players facing themselves score exactly zero.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .agents import PlayerSpec, make_player, parse_player_spec
from .engine import Deal, GameType, deal
from .game import GameRecord, play_game

# K = baseline, N = candidate (network) slot
CONFIGURATIONS = ("KKN", "KNK", "KNN", "NNK", "NKN", "NKK")
BREAKDOWN_ROWS = ("Grand", "Suit", "Null", "NO", "Def", "Pass")


class DegenerateVariance(ValueError):
    pass


class TournamentError(RuntimeError):
    pass


@dataclass(frozen=True)
class MatchPlan:
    deal: Deal
    configurations: tuple[str, ...] = CONFIGURATIONS


def schedule(d: Deal) -> MatchPlan:
    return MatchPlan(d)


def deal_seed(seed: int, match: int, game: int | None = None) -> int:
    key = [seed, match] if game is None else [seed, match, game]
    return int(np.random.SeedSequence(key).generate_state(1)[0])


def seat_rng(seed: int, match: int, game: int, seat: int) -> np.random.Generator:
    return np.random.default_rng([seed, match, game, seat, 0xA5])


# ------------------------------------------------------------------ statistics

def paired_ttest(diffs, alpha: float = 0.05) -> tuple[float, float, bool]:
    """Two-tailed one-sample t-test on paired differences.

    Returns (t, p, p < alpha). Raises DegenerateVariance with fewer than two
    differences or when they are all equal.
    """
    d = np.asarray(diffs, dtype=np.float64)
    n = len(d)
    if n < 2:
        raise DegenerateVariance("need at least two matches")
    sd = d.std(ddof=1)
    if sd == 0 or not np.isfinite(sd):
        raise DegenerateVariance("all differences are equal")
    t = float(d.mean() / (sd / np.sqrt(n)))
    p = float(2 * stats.t.sf(abs(t), n - 1))
    return t, p, p < alpha


def _category(rec: GameRecord, seat: int) -> str:
    r = rec.result
    if r.passed_out:
        return "Pass"
    if r.soloist != seat:
        return "Def"
    gt = r.declaration.game_type
    if gt is GameType.NULL:
        return "NO" if r.declaration.ouvert else "Null"
    return "Grand" if gt is GameType.GRAND else "Suit"


def breakdown(games) -> dict[str, float]:
    """Percentages over (record, seat) pairs: soloist game family, defence, pass."""
    games = list(games)
    counts = dict.fromkeys(BREAKDOWN_ROWS, 0)
    for rec, seat in games:
        counts[_category(rec, seat)] += 1
    n = max(len(games), 1)
    return {k: 100.0 * v / n for k, v in counts.items()}


# ------------------------------------------------------------------ running

@dataclass
class MatchResult:
    match: int
    records: list[GameRecord]
    # TP per slot summed over the six games, and seat-games per slot
    tp: dict[str, int]
    seats: dict[str, list[tuple[int, int]]]  # slot -> (game index, seat)


def play_match(candidate: PlayerSpec, baseline: PlayerSpec, match: int, seed: int,
               duplicate: bool = True) -> MatchResult:
    players = {"N": make_player(candidate), "K": make_player(baseline)}
    recs, tp = [], {"N": 0, "K": 0}
    seats = {"N": [], "K": []}
    for g, row in enumerate(CONFIGURATIONS):
        d = deal(deal_seed(seed, match) if duplicate else deal_seed(seed, match, g))
        rngs = [seat_rng(seed, match, g, s) for s in range(3)]
        try:
            rec = play_game(d, [players[c] for c in row], rngs)
        except Exception as exc:
            raise TournamentError(f"match {match} game {g} ({row}): {exc}") from exc
        pts = rec.tournament_points()
        for s, c in enumerate(row):
            tp[c] += pts[s]
            seats[c].append((g, s))
        recs.append(rec)
    return MatchResult(match, recs, tp, seats)


def _play_match_args(args):
    return play_match(*args)


@dataclass
class TournamentReport:
    candidate: str
    baseline: str
    n_matches: int
    seed: int
    games: int
    tpg: dict[str, float]
    soloist_pct: dict[str, float]
    breakdown: dict[str, dict[str, float]]
    t: float
    p: float
    significant: bool
    match_diffs: np.ndarray = field(repr=False)

    @property
    def tpg_diff(self) -> float:
        return self.tpg["N"] - self.tpg["K"]

    def key_values(self) -> str:
        lines = [
            f"candidate={self.candidate}", f"baseline={self.baseline}",
            f"matches={self.n_matches}", f"games={self.games}", f"seed={self.seed}",
            f"tpg_candidate={self.tpg['N']:.4f}", f"tpg_baseline={self.tpg['K']:.4f}",
            f"tpg_diff={self.tpg_diff:.4f}",
            f"soloist_pct_candidate={self.soloist_pct['N']:.2f}",
            f"soloist_pct_baseline={self.soloist_pct['K']:.2f}",
        ]
        for slot, name in (("N", "candidate"), ("K", "baseline")):
            for row in BREAKDOWN_ROWS:
                lines.append(f"breakdown_{name}_{row.lower()}={self.breakdown[slot][row]:.2f}")
        lines += [f"t={self.t:.4f}", f"p={self.p:.6f}",
                  f"significant={'yes' if self.significant else 'no'}"]
        return "\n".join(lines) + "\n"

    def table(self) -> str:
        head = f"{'Player':<24}{'TP/G':>8}{'Sol%':>7}" + "".join(
            f"{r:>7}" for r in BREAKDOWN_ROWS)
        rows = [head, "-" * len(head)]
        for slot, name in (("N", self.candidate), ("K", self.baseline)):
            rows.append(f"{name[:23]:<24}{self.tpg[slot]:>8.2f}{self.soloist_pct[slot]:>7.1f}"
                        + "".join(f"{self.breakdown[slot][r]:>7.1f}" for r in BREAKDOWN_ROWS))
        sig = "significant" if self.significant else "not significant"
        rows.append(f"TP/G difference {self.tpg_diff:+.2f} over {self.n_matches} matches "
                    f"({self.games} games), t={self.t:.3f}, p={self.p:.4f} ({sig})")
        return "\n".join(rows) + "\n"


def run_tournament(candidate: PlayerSpec | str, baseline: PlayerSpec | str, n_matches: int,
                   seed: int = 0, threads: int = 1, duplicate: bool = True) -> TournamentReport:
    """Play ``n_matches`` six-game matches and aggregate in match order."""
    cand = parse_player_spec(candidate) if isinstance(candidate, str) else candidate
    base = parse_player_spec(baseline) if isinstance(baseline, str) else baseline
    jobs = [(cand, base, m, seed, duplicate) for m in range(n_matches)]
    if threads > 1 and n_matches > 1:
        with ProcessPoolExecutor(threads) as pool:
            results = list(pool.map(_play_match_args, jobs, chunksize=max(1, n_matches // (4 * threads))))
    else:
        results = [_play_match_args(j) for j in jobs]

    total = {"N": 0, "K": 0}
    seat_games = {"N": 0, "K": 0}
    solo = {"N": 0, "K": 0}
    per_slot = {"N": [], "K": []}
    diffs = []
    for r in results:
        for c in "NK":
            total[c] += r.tp[c]
            seat_games[c] += len(r.seats[c])
            for g, s in r.seats[c]:
                per_slot[c].append((r.records[g], s))
                solo[c] += r.records[g].result.soloist == s
        diffs.append(r.tp["N"] / len(r.seats["N"]) - r.tp["K"] / len(r.seats["K"]))
    diffs = np.array(diffs)
    try:
        t, p, sig = paired_ttest(diffs)
    except DegenerateVariance:
        t, p, sig = 0.0, 1.0, False
    n = {c: max(seat_games[c], 1) for c in "NK"}
    return TournamentReport(
        candidate=cand.text(), baseline=base.text(), n_matches=n_matches, seed=seed,
        games=6 * n_matches,
        tpg={c: total[c] / n[c] for c in "NK"},
        soloist_pct={c: 100.0 * solo[c] / n[c] for c in "NK"},
        breakdown={c: breakdown(per_slot[c]) for c in "NK"},
        t=t, p=p, significant=sig, match_diffs=diffs)
