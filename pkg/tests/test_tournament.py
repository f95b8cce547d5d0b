from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from skatlab.engine import GameDeclaration, GameResult, GameType, deal
from skatlab.tournament import (BREAKDOWN_ROWS, CONFIGURATIONS, DegenerateVariance, breakdown,
                                paired_ttest, play_match, run_tournament, schedule)
from skatlab.agents import parse_player_spec


def test_schedule_rows():
    plan = schedule(deal(0))
    assert plan.configurations == ("KKN", "KNK", "KNN", "NNK", "NKN", "NKK")
    assert len(plan.configurations) == 6
    assert "KKK" not in plan.configurations and "NNN" not in plan.configurations


def test_every_seat_sees_each_type():
    for seat in range(3):
        assert {row[seat] for row in CONFIGURATIONS} == {"K", "N"}


# ---------------------------------------------------------------- t-test

def test_ttest_hand_example():
    t, p, sig = paired_ttest([1, 2, 3, 4, 5])
    assert t == pytest.approx(3 * np.sqrt(5) / np.sqrt(2.5))
    assert t == pytest.approx(4.243, abs=1e-3)
    assert p == pytest.approx(0.0132, abs=1e-4)
    assert sig


def test_ttest_symmetric_pair_not_significant():
    t, p, sig = paired_ttest([-1, 1])
    assert t == 0 and p == pytest.approx(1.0) and not sig


@pytest.mark.parametrize("diffs", [[0, 0, 0], [2.5, 2.5], [1.0]])
def test_ttest_degenerate(diffs):
    with pytest.raises(DegenerateVariance):
        paired_ttest(diffs)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-200, 200), min_size=2, max_size=40))
def test_ttest_matches_scipy(diffs):
    if len(set(diffs)) == 1:
        return
    t, p, _ = paired_ttest(diffs)
    ref = stats.ttest_1samp(diffs, 0.0)
    assert t == pytest.approx(ref.statistic, rel=1e-9, abs=1e-12)
    assert p == pytest.approx(ref.pvalue, rel=1e-7, abs=1e-12)


# ---------------------------------------------------------------- breakdown

def fake(soloist, gt=None, ouvert=False):
    decl = None if gt is None else GameDeclaration(gt, ouvert=ouvert, hand=ouvert)
    return SimpleNamespace(result=GameResult(soloist, decl))


def test_breakdown_hand_counted():
    # seat 0 over ten games: 2 grand, 3 suit, 1 null, 1 null ouvert, 2 defence, 1 pass
    games = [fake(0, GameType.GRAND), fake(0, GameType.GRAND), fake(0, GameType.CLUBS),
             fake(0, GameType.HEARTS), fake(0, GameType.DIAMONDS), fake(0, GameType.NULL),
             fake(0, GameType.NULL, ouvert=True), fake(1, GameType.SPADES),
             fake(2, GameType.GRAND), fake(None)]
    b = breakdown((g, 0) for g in games)
    assert b == {"Grand": 20.0, "Suit": 30.0, "Null": 10.0, "NO": 10.0, "Def": 20.0,
                 "Pass": 10.0}


def test_breakdown_extremes():
    assert breakdown([(fake(None), 1)] * 4)["Pass"] == 100
    assert breakdown([(fake(2, GameType.GRAND), 2)] * 3)["Grand"] == 100


# ---------------------------------------------------------------- tournaments

@pytest.fixture(scope="module")
def small_report():
    return run_tournament("noisy", "baseline", 12, seed=5)


def test_breakdown_rows_sum_to_100(small_report):
    for slot in "NK":
        assert sum(small_report.breakdown[slot].values()) == pytest.approx(100)
        assert tuple(small_report.breakdown[slot]) == BREAKDOWN_ROWS


def test_tournament_is_deterministic(small_report):
    again = run_tournament("noisy", "baseline", 12, seed=5)
    assert again.key_values() == small_report.key_values()
    assert np.array_equal(again.match_diffs, small_report.match_diffs)


def test_worker_pool_gives_same_report(small_report):
    pooled = run_tournament("noisy", "baseline", 12, seed=5, threads=2)
    assert pooled.key_values() == small_report.key_values()


def test_difference_is_candidate_minus_baseline(small_report):
    r = small_report
    assert r.tpg_diff == pytest.approx(r.tpg["N"] - r.tpg["K"])
    # every slot fills nine seat-games per match
    assert r.match_diffs.mean() == pytest.approx(r.tpg_diff)


def test_mirror_match_scores_zero():
    r = run_tournament("baseline", "baseline", 5, seed=3)
    assert r.tpg_diff == 0
    assert r.soloist_pct["N"] == r.soloist_pct["K"]
    assert not r.significant


def test_stochastic_mirror_is_not_significant():
    r = run_tournament("noisy", "noisy", 40, seed=3)
    assert abs(r.tpg_diff) < 5 and not r.significant


def test_single_match_is_six_games():
    r = run_tournament("baseline", "random", 1, seed=0)
    assert r.games == 6 and r.n_matches == 1
    assert "t=0.0000" in r.key_values() and "significant=no" in r.key_values()


def test_duplicate_match_reuses_the_deal():
    m = play_match(parse_player_spec("baseline"), parse_player_spec("random"), 0, seed=2)
    assert len({rec.deal.text() for rec in m.records}) == 1
    m = play_match(parse_player_spec("baseline"), parse_player_spec("random"), 0, seed=2,
                   duplicate=False)
    assert len({rec.deal.text() for rec in m.records}) == 6


def test_score_identity():
    m = play_match(parse_player_spec("noisy"), parse_player_spec("random"), 4, seed=9)
    for rec in m.records:
        r = rec.result
        total = sum(rec.tournament_points())
        if r.passed_out:
            assert total == 0
        elif r.soloist_won:
            assert total == 50 + r.game_value
        else:
            assert total == -(50 + 2 * r.game_value) + 80


def test_report_formats(small_report):
    kv = dict(line.split("=", 1) for line in small_report.key_values().splitlines())
    assert float(kv["tpg_diff"]) == pytest.approx(small_report.tpg_diff, abs=1e-4)
    assert kv["matches"] == "12" and kv["games"] == "72"
    table = small_report.table()
    assert table.splitlines()[0].split() == ["Player", "TP/G", "Sol%", *BREAKDOWN_ROWS]
