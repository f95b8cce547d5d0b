import itertools
import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from skatlab.engine import (BID_LADDER, DECK, BiddingState, BidPhase, CardplayState,
                            ConstructionMismatch, GameDeclaration, GameType,
                            IllegalDeclaration, IncompleteTrick, NotYourTurn, build_bid_ladder,
                            card_points, deal, game_value, legal_moves, parse_card,
                            parse_cards, resolve_game, tournament_points, trick_winner)


def C(text):
    return parse_card(text)


# ---------------------------------------------------------------- deal

def test_deal_is_deterministic():
    assert deal(0) == deal(0)
    assert deal(0) != deal(1)


def test_deal_sizes():
    d = deal(123)
    assert [len(h) for h in d.hands] == [10, 10, 10]
    assert len(d.skat) == 2
    assert sorted(c for h in (*d.hands, d.skat) for c in h) == list(DECK)


def test_skat_frequency_is_uniform():
    n = 10_000
    counts = Counter(c for s in range(n) for c in deal(s).skat)
    p = 1 / 16
    sigma = (n * p * (1 - p)) ** 0.5
    for card in DECK:
        assert abs(counts[card] - n * p) <= 3 * sigma, card


def test_deal_text_roundtrip():
    d = deal(7)
    assert type(d).from_text(d.text()) == type(d)(d.hands, d.skat)


# ---------------------------------------------------------------- bid ladder

def test_ladder_head_and_tail():
    assert BID_LADDER[0] == 0
    assert BID_LADDER[1:6] == (18, 20, 22, 23, 24)
    assert BID_LADDER[-1] == 264
    assert list(BID_LADDER) == sorted(set(BID_LADDER))
    assert BID_LADDER.count(23) == 1


def test_ladder_enumeration_by_brute_force():
    products = {b * m for b in (9, 10, 11, 12) for m in range(2, 19)}
    products |= {24 * m for m in range(2, 12)} | {23, 35, 46, 59}
    assert BID_LADDER[1:] == tuple(sorted(products))


def test_strict_ladder_reports_width_mismatch():
    # pass + 63 standard bids is 64 entries, not the 67-wide encoding
    with pytest.raises(ConstructionMismatch):
        build_bid_ladder(strict=True)


# ---------------------------------------------------------------- declarations and value

def test_clubs_with_one():
    cards = parse_cards("CJSAS7HAH8D7DKC7C8C9CTCQ")
    assert game_value(GameDeclaration(GameType.CLUBS), cards) == 24


def test_grand_hand_with_four():
    cards = parse_cards("CJSJHJDJSAS7HAH8D7DKC7C8")
    assert game_value(GameDeclaration(GameType.GRAND, hand=True), cards) == 144


def test_null_values():
    cards = parse_cards("C7C8C9S7S8S9H7H8H9D7D8D9")
    assert game_value(GameDeclaration(GameType.NULL, ouvert=True), cards) == 46
    assert game_value(GameDeclaration(GameType.NULL), cards) == 23
    assert game_value(GameDeclaration(GameType.NULL, hand=True), cards) == 35
    assert game_value(GameDeclaration(GameType.NULL, hand=True, ouvert=True), cards) == 59


def test_without_matadors():
    # no club or spade jack, holds heart jack: "without 2", game 3
    cards = parse_cards("HJSAS7HAH8D7DKC7C8C9CTCQ")
    assert game_value(GameDeclaration(GameType.HEARTS), cards) == 30


@pytest.mark.parametrize("kwargs", [
    dict(schneider_announced=True),
    dict(hand=True, schwarz_announced=True),
    dict(hand=True, ouvert=True, schneider_announced=True),
    dict(ouvert=True),
])
def test_illegal_flag_combinations(kwargs):
    with pytest.raises(IllegalDeclaration):
        GameDeclaration(GameType.SPADES, **kwargs)


def test_null_rejects_announcements():
    with pytest.raises(IllegalDeclaration):
        GameDeclaration(GameType.NULL, hand=True, schneider_announced=True)


def test_declaration_text_roundtrip():
    d = GameDeclaration(GameType.HEARTS, hand=True, ouvert=True,
                        schneider_announced=True, schwarz_announced=True)
    assert d.text() == "Hhosz"
    assert GameDeclaration.from_text("Hhosz") == d


FLAGS = ("hand", "ouvert", "schneider_announced", "schwarz_announced")


def _legal_flag_sets(game_type):
    out = []
    for bits in itertools.product([False, True], repeat=4):
        kw = dict(zip(FLAGS, bits))
        try:
            out.append(GameDeclaration(game_type, **kw))
        except IllegalDeclaration:
            pass
    return out


@given(st.sampled_from([GameType.DIAMONDS, GameType.HEARTS, GameType.SPADES,
                        GameType.CLUBS, GameType.GRAND]),
       st.integers(0, 10_000))
def test_adding_a_modifier_adds_one_base(game_type, seed):
    cards = random.Random(seed).sample(range(32), 12)
    decls = _legal_flag_sets(game_type)
    base = {GameType.DIAMONDS: 9, GameType.HEARTS: 10, GameType.SPADES: 11,
            GameType.CLUBS: 12, GameType.GRAND: 24}[game_type]
    for a in decls:
        for b in decls:
            fa = [getattr(a, f) for f in FLAGS]
            fb = [getattr(b, f) for f in FLAGS]
            if sum(fb) == sum(fa) + 1 and all(x <= y for x, y in zip(fa, fb)):
                assert game_value(b, cards) - game_value(a, cards) == base


# ---------------------------------------------------------------- legal moves and tricks

def _state(game_type, hands, trick=(), leader=0, soloist=0):
    st_ = CardplayState(GameDeclaration(game_type), hands=[set(h) for h in hands],
                        soloist=soloist, skat=())
    st_.trick_leader = leader
    st_.current_trick = list(trick)
    return st_


def test_must_follow_led_suit():
    s = _state(GameType.HEARTS, [set(), {C("S7"), C("H8")}, set()], trick=[C("SA")])
    assert legal_moves(s, 1) == [C("S7")]


def test_leader_may_play_anything():
    hand = {C("S7"), C("H8"), C("CJ")}
    s = _state(GameType.HEARTS, [hand, set(), set()])
    assert set(legal_moves(s, 0)) == hand


def test_jack_follows_trump():
    s = _state(GameType.HEARTS, [set(), {C("CJ"), C("D7")}, set()], trick=[C("HT")])
    assert legal_moves(s, 1) == [C("CJ")]


def test_not_your_turn():
    s = _state(GameType.HEARTS, [{C("S7")}, {C("H8")}, {C("D7")}])
    with pytest.raises(NotYourTurn):
        legal_moves(s, 2)


def test_trick_winner_examples():
    assert trick_winner([C("S9"), C("SA"), C("S7")], 0, GameType.HEARTS) == 1
    assert trick_winner([C("SA"), C("S7"), C("HJ")], 0, GameType.HEARTS) == 2
    assert trick_winner([C("DT"), C("DK"), C("D7")], 0, GameType.NULL) == 1
    with pytest.raises(IncompleteTrick):
        trick_winner([C("SA")], 0, GameType.HEARTS)


# Independent comparator: explicit high-to-low orders written out by hand.
_SIDE = "A T K Q 9 8 7".split()
_NULL = "A K Q J T 9 8 7".split()
_JACKS = ["CJ", "SJ", "HJ", "DJ"]


def _orders(game_type):
    """(trump order, {suit letter: side order}) as card texts, highest first."""
    if game_type is GameType.NULL:
        return [], {s: [s + r for r in _NULL] for s in "CSHD"}
    trump_letter = {GameType.DIAMONDS: "D", GameType.HEARTS: "H",
                    GameType.SPADES: "S", GameType.CLUBS: "C"}.get(game_type)
    trumps = list(_JACKS) + ([trump_letter + r for r in _SIDE] if trump_letter else [])
    sides = {s: [s + r for r in _SIDE] for s in "CSHD" if s != trump_letter}
    return trumps, sides


def _oracle_winner(texts, game_type):
    trumps, sides = _orders(game_type)
    played_trumps = [t for t in texts if t in trumps]
    if played_trumps:
        best = min(played_trumps, key=trumps.index)
    else:
        led = texts[0][0]
        best = min((t for t in texts if t[0] == led), key=sides[led].index)
    return texts.index(best)


@pytest.mark.parametrize("game_type", list(GameType))
def test_trick_winner_matches_exhaustive_comparator(game_type):
    from skatlab.engine import card_text
    for a, b, c in itertools.permutations(range(32), 3):
        got = trick_winner((a, b, c), 0, game_type)
        assert got == _oracle_winner([card_text(a), card_text(b), card_text(c)], game_type)


# ---------------------------------------------------------------- points and results

def test_card_points():
    assert card_points(DECK) == 120
    assert card_points([]) == 0
    assert card_points(parse_cards("CJDAH7")) == 13


def _cards12():
    return parse_cards("CJSAS7HAH8D7DKC7C8C9CTCQ")


def test_suit_game_with_61_wins():
    r = resolve_game(GameDeclaration(GameType.CLUBS), 18, _cards12(), 61, 5, 5)
    assert r.soloist_won and not r.overbid


def test_suit_game_with_60_loses():
    r = resolve_game(GameDeclaration(GameType.CLUBS), 18, _cards12(), 60, 5, 5)
    assert not r.soloist_won


def test_null_trick_loses():
    r = resolve_game(GameDeclaration(GameType.NULL), 18, _cards12(), 0, 1, 0)
    assert not r.soloist_won


def test_overbid_loses_regardless_of_points():
    r = resolve_game(GameDeclaration(GameType.CLUBS), 27, _cards12(), 70, 6, 4)
    assert r.game_value == 24 and r.overbid and not r.soloist_won


def test_schneider_announced_needs_90():
    d = GameDeclaration(GameType.CLUBS, hand=True, schneider_announced=True)
    assert not resolve_game(d, 18, _cards12(), 89, 8, 2).soloist_won
    assert resolve_game(d, 18, _cards12(), 90, 8, 2).soloist_won


def test_schwarz_announced_needs_every_trick():
    d = GameDeclaration(GameType.CLUBS, hand=True, schneider_announced=True,
                        schwarz_announced=True)
    assert not resolve_game(d, 18, _cards12(), 115, 9, 1).soloist_won
    assert resolve_game(d, 18, _cards12(), 120, 10, 0).soloist_won


def test_tournament_points():
    win = resolve_game(GameDeclaration(GameType.CLUBS), 18, _cards12(), 70, 6, 4)
    assert win.game_value == 24
    assert tournament_points(win) == (74, 0, 0)
    loss = resolve_game(GameDeclaration(GameType.CLUBS), 18, _cards12(), 40, 4, 6)
    assert tournament_points(loss) == (-98, 40, 40)
    from skatlab.engine import PASSED_OUT
    assert tournament_points(PASSED_OUT) == (0, 0, 0)


# ---------------------------------------------------------------- bidding

def _run_bids(choices):
    b = BiddingState()
    it = iter(choices)
    while not b.done:
        b.apply(next(it))
    return b


def test_everyone_passes():
    b = _run_bids([False, False, False])
    assert b.soloist is None and b.tokens == ["P", "P", "P"]


def test_forehand_plays_18_after_two_passes():
    b = _run_bids([False, False, True])
    assert b.soloist == 0 and b.winning_bid == 18


def test_two_stage_duel():
    # middle bids 18, fore accepts, middle bids 20, fore passes;
    # rear bids 22, middle accepts, rear passes
    b = _run_bids([True, True, True, False, True, True, False])
    assert b.tokens == ["18", "Y", "20", "P", "22", "Y", "P"]
    assert b.soloist == 1 and b.winning_bid == 22
    assert b.bid_answer_pass_bid == BID_LADDER.index(20)
    assert b.max_bid == [18, 22, 22]


def test_tokens_replay():
    b = _run_bids([True, True, True, False, True, True, False])
    r = BiddingState()
    for t in b.tokens:
        r.apply_token(t)
    assert r.soloist == b.soloist and r.current_high == b.current_high
    assert r.phase is BidPhase.DONE


# ---------------------------------------------------------------- invariants during play

def _random_game(seed, game_type):
    rng = random.Random(seed)
    d = deal(seed)
    soloist = rng.randrange(3)
    hands = [set(h) for h in d.hands]
    decl = GameDeclaration(game_type, hand=True)
    return CardplayState(decl, hands, soloist, d.skat), rng


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(list(GameType)))
def test_conservation_along_random_play(seed, game_type):
    s, rng = _random_game(seed, game_type)
    while not s.finished:
        moves = s.legal_moves(s.to_move)
        assert moves
        everything = [c for h in s.hands for c in h] + s.current_trick + list(s.skat)
        everything += [c for t in s.history for c in t.cards]
        assert sorted(everything) == list(DECK)
        if not s.declaration.is_null:
            assert (s.soloist_points + s.defender_points + s.unplayed_points()
                    + card_points(s.skat)) == 120
        s.play(rng.choice(moves))
    r = s.result()
    if not game_type == GameType.NULL:
        assert len(s.history) == 10
    if r.overbid:
        assert not r.soloist_won
