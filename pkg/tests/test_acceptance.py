"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s``; the lines are also
repeated in the terminal summary. The full suite takes a few minutes.
"""
import time

import numpy as np
import pytest

from skatlab import dataio, policy, training
from skatlab.agents import endgame_oracle, make_player, parse_player_spec, random_endgame
from skatlab.engine import (BID_ENCODING_WIDTH, BID_LADDER, N_BIDS, GameDeclaration, GameResult,
                            GameType, deal, tournament_points)
from skatlab.features import encode_observation
from skatlab.game import play_game
from skatlab.neuralnet import (CARDPLAY_DEFAULT, PRE_CARDPLAY_DEFAULT, evaluate, forward, init,
                               loss_and_grads)
from skatlab.tournament import run_tournament

from conftest import ACCEPTANCE
from oracles import engine_minimax, max_relative_error, numeric_grads, random_problem


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def test_01_endgame_oracle_matches_engine():
    t0 = time.perf_counter()
    bad = []
    for seed in range(1000):
        pos = random_endgame(seed, tricks=1 + seed % 3)
        sol = endgame_oracle(pos)
        end = pos.copy()
        for c in sol.line:
            end.play(c)
        pts, tricks = engine_minimax(pos)
        target = (tricks == sol.soloist_tricks) if pos.declaration.is_null else (pts == sol.points)
        if not (end.finished and end.soloist_points == sol.points
                and end.soloist_tricks == sol.soloist_tricks and target):
            bad.append(seed)
    dt = time.perf_counter() - t0
    report(1, not bad and dt < 60,
           f"1000 endgames, {1000 - len(bad)} agree, {dt:.1f}s (limit 60s)")


def test_02_tournament_points_exhaustive():
    wrong = 0
    for gv in BID_LADDER[1:]:
        for soloist in range(3):
            won = tournament_points(GameResult(soloist, GameDeclaration(GameType.CLUBS),
                                               game_value=gv, soloist_won=True))
            lost = tournament_points(GameResult(soloist, GameDeclaration(GameType.CLUBS),
                                                game_value=gv, soloist_won=False))
            want_won = tuple(50 + gv if s == soloist else 0 for s in range(3))
            want_lost = tuple(-(50 + 2 * gv) if s == soloist else 40 for s in range(3))
            wrong += (won != want_won) + (lost != want_lost)
    passed = tournament_points(GameResult(None)) == (0, 0, 0)
    report(2, wrong == 0 and passed,
           f"{len(BID_LADDER) - 1} game values x 3 seats x win/loss, {wrong} wrong")


def test_03_bid_ladder():
    bids = BID_LADDER[1:]
    shape_ok = (list(bids) == sorted(set(bids)) and bids[:5] == (18, 20, 22, 23, 24)
                and max(bids) == 264 and BID_LADDER[0] == 0)
    report(3, shape_ok and len(BID_LADDER) == BID_ENCODING_WIDTH,
           f"ascending/unique/first five/max {'ok' if shape_ok else 'WRONG'}; "
           f"{len(bids)} bids + pass = {len(BID_LADDER)} vs encoding width {BID_ENCODING_WIDTH}")


def test_04_maxbid_properties():
    rng = np.random.default_rng(4)
    grid = np.linspace(0, 1, 21)
    bad = 0
    for _ in range(10_000):
        p = rng.dirichlet(np.full(N_BIDS, rng.uniform(0.05, 2)))
        picks = [policy.maxbid(p, a) for a in np.sort(np.concatenate([grid, rng.random(5)]))]
        bad += any(b < a for a, b in zip(picks, picks[1:])) or picks[0] != 0
    report(4, bad == 0, f"10000 distributions, {bad} violations (monotone in A, A=0 gives pass)")


def test_05_mlv_properties():
    rng = np.random.default_rng(5)
    gated = same = 0
    for _ in range(10_000):
        n = int(rng.choice([7, 13]))
        dist = rng.dirichlet(np.full(n, rng.uniform(0.1, 2)))
        values = rng.normal(0, 50, n)
        legal = np.flatnonzero(rng.random(n) < 0.6)
        if len(legal) == 0:
            legal = np.array([int(rng.integers(n))])
        lam = float(rng.uniform(0.01, 0.5))
        p_legal = policy.renormalize(dist, legal)
        k = policy.mlv_select(values, dist, legal, lam)
        if any(p_legal[i] >= lam for i in legal):
            gated += k not in legal or p_legal[k] < lam
        if all(p_legal[i] >= lam for i in legal):
            same += k != policy.mv_select(values, legal)
    report(5, gated == 0 and same == 0,
           f"10000 instances, {gated} below-threshold picks, {same} MLV/MV disagreements")


def test_06_gradient_check():
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(100):
        w, X, y, actions, masks = random_problem(seed)
        _, gW, gb = loss_and_grads(w, X, y, actions, masks)
        analytic = [g for pair in zip(gW, gb) for g in pair]
        worst = max(worst, max_relative_error(analytic, numeric_grads(w, X, y, actions, masks)))
    dt = time.perf_counter() - t0
    report(6, worst < 1e-3 and dt < 30,
           f"100 networks, max relative error {worst:.2e} (limit 1e-3), {dt:.1f}s (limit 30s)")


def test_07_declare_imitation():
    t0 = time.perf_counter()
    data = training.teacher_declare_dataset(50_000, seed=0)
    rest, held_out = dataio.split(data, 5_000, seed=1)
    s = training.TrainSettings(hidden_widths=(64,) * 5, learning_rate=1e-3, dropout_keep=1.0,
                               max_epochs=20, batch_size=128, patience=20, test=5_000)
    w, rep, hist = training.train_context(rest, "declare", s)
    _, acc = evaluate(w, held_out)
    dt = time.perf_counter() - t0
    report(7, acc >= 0.98 and len(hist) <= 20 and dt < 300,
           f"held-out accuracy {100 * acc:.2f}% (limit 98%), {len(hist)} epochs, {dt:.0f}s "
           f"(limit 300s)")


def test_08_parameter_counts():
    pre = init(PRE_CARDPLAY_DEFAULT).param_count()
    card = init(CARDPLAY_DEFAULT).param_count()
    ok = abs(pre - 2.3e6) / 2.3e6 < 0.05 and abs(card - 2.4e6) / 2.4e6 < 0.05
    report(8, ok, f"pre-cardplay {pre:,} (2.3M +-5%), cardplay {card:,} (2.4M +-5%)")


def test_09_duplicate_deals_reduce_variance():
    # two competent agents whose results depend mostly on the cards; against a
    # uniform-random agent its own coin flips dominate and both designs tie
    a, b = "name=noisy,noise=0.05", "name=noisy,noise=0.15"
    dup = [run_tournament(a, b, 200, seed=r).tpg_diff for r in range(50)]
    ind = [run_tournament(a, b, 200, seed=r, duplicate=False).tpg_diff for r in range(50)]
    v_dup, v_ind = np.var(dup, ddof=1), np.var(ind, ddof=1)
    report(9, v_dup <= v_ind,
           f"noisy 0.05 vs 0.15, 50 x 200 matches: variance {v_dup:.3f} identical deals vs "
           f"{v_ind:.3f} independent deals")


def test_10_cardplay_latency():
    weights = init(CARDPLAY_DEFAULT, seed=0)
    observations = []
    p = make_player("baseline")
    for seed in range(40):
        play_game(deal(seed), [p, p, p], observer=lambda kind, seat, obs, a: (
            observations.append(obs) if kind == "play" and obs.family == "suit"
            and obs.role == "defender" else None))
    for obs in observations[:20]:  # warm up
        policy.cardplay_select(forward(weights, encode_observation(obs)[None])[0], obs.legal)
    t0 = time.perf_counter()
    for obs in observations:
        policy.cardplay_select(forward(weights, encode_observation(obs)[None])[0], obs.legal)
    ms = 1000 * (time.perf_counter() - t0) / len(observations)
    report(10, ms < 10, f"{len(observations)} decisions, {ms:.2f} ms each (limit 10 ms)")


def test_11_imitation_agent_beats_random(tmp_path):
    t0 = time.perf_counter()
    records = list(dataio.selfplay_generate(["baseline"] * 3, 3_000, seed=7))
    s = training.TrainSettings(hidden_widths=(64,) * 5, learning_rate=1e-3, dropout_keep=1.0,
                               max_epochs=10, batch_size=128, patience=3)
    training.train_all(records, tmp_path, s)
    cand = parse_player_spec(f"MLV(0.85,0.1),weights={tmp_path},cardplay=network")
    r = run_tournament(cand, parse_player_spec("random"), 1_000, seed=11)
    dt = time.perf_counter() - t0
    report(11, r.tpg_diff > 0 and r.p < 0.05 and dt < 600,
           f"MLV vs random over 1000 matches: TP/G difference {r.tpg_diff:+.2f}, p={r.p:.2g}, "
           f"{dt:.0f}s (limit 600s)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-s"]))
