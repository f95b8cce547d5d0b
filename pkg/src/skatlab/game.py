"""Drive a full game through the engine with three players.

Players answer five kinds of question (bid, pickup, declare, discard, play);
``play_game`` builds the matching observation for each, applies the answer,
and returns a :class:`GameRecord`. Replaying a record uses the same loop with
scripted players, so anything observed during self-play is reproduced exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Protocol, Sequence

import numpy as np

from .engine import (BID_LADDER, PASSED_OUT, BiddingState, CardplayState, Deal,
                     GameDeclaration, GameResult, GameType, SkatError, max_reachable_value,
                     tournament_points)
from .features import CardplayObservation, PreCardplayObservation, observe_cardplay

SUITS = (GameType.DIAMONDS, GameType.HEARTS, GameType.SPADES, GameType.CLUBS)

# index 0 is "pick up the skat"; the rest are hand games
PICKUP_ACTIONS: tuple[GameDeclaration | None, ...] = (
    None,
    *(GameDeclaration(g, hand=True) for g in (*SUITS, GameType.GRAND)),
    *(GameDeclaration(g, hand=True, ouvert=True, schneider_announced=True,
                      schwarz_announced=True) for g in (*SUITS, GameType.GRAND)),
    GameDeclaration(GameType.NULL, hand=True),
    GameDeclaration(GameType.NULL, hand=True, ouvert=True),
)
DECLARE_ACTIONS: tuple[GameDeclaration, ...] = (
    *(GameDeclaration(g) for g in (*SUITS, GameType.GRAND)),
    GameDeclaration(GameType.NULL),
    GameDeclaration(GameType.NULL, ouvert=True),
)
N_PICKUP, N_DECLARE, N_PAIRS = len(PICKUP_ACTIONS), len(DECLARE_ACTIONS), 496

DISCARD_CONTEXTS = ("diamonds", "hearts", "spades", "clubs", "grand", "null")


class ReplayError(SkatError):
    pass


def pair_index(a: int, b: int) -> int:
    """Index of the unordered card pair over C(32, 2) = 496 slots."""
    i, j = sorted((a, b))
    if i == j:
        raise ValueError("a pair needs two distinct cards")
    return j * (j - 1) // 2 + i


def pair_from_index(k: int) -> tuple[int, int]:
    j = int((1 + np.sqrt(1 + 8 * k)) // 2)
    while j * (j - 1) // 2 > k:
        j -= 1
    while (j + 1) * j // 2 <= k:
        j += 1
    return k - j * (j - 1) // 2, j


def discard_context(declaration: GameDeclaration) -> str:
    if declaration.is_null:
        return "null"
    return DISCARD_CONTEXTS[int(declaration.game_type)]


def pickup_index(declaration: GameDeclaration | None) -> int:
    try:
        return PICKUP_ACTIONS.index(declaration)
    except ValueError:
        raise ReplayError(f"hand declaration {declaration.text()} outside the action space")


# -------------------------------------------------------------------- observations

@dataclass(frozen=True)
class BidObservation:
    seat: int
    phase: str              # "BidAnswer" or "ContinueAnswer"
    role: str               # "bidder" or "answerer"
    current: int            # ladder index being bid past (bidder) or offered (answerer)
    pre: PreCardplayObservation


@dataclass(frozen=True)
class ChoiceObservation:
    seat: int
    phase: str              # "PickupHand", "Declare" or "Discard"
    pre: PreCardplayObservation
    legal: tuple[int, ...]
    context: str | None = None  # discard family


class Player(Protocol):
    def bid(self, obs: BidObservation, rng: np.random.Generator) -> bool: ...
    def pickup(self, obs: ChoiceObservation, rng: np.random.Generator) -> int: ...
    def declare(self, obs: ChoiceObservation, rng: np.random.Generator) -> int: ...
    def discard(self, obs: ChoiceObservation, rng: np.random.Generator) -> int: ...
    def play(self, obs: CardplayObservation, rng: np.random.Generator) -> int: ...


Observer = Callable[[str, int, object, object], None]


def legal_declares(cards12, winning_bid: int) -> tuple[int, ...]:
    """Declarations that can still reach the bid; all of them if none can."""
    ok = tuple(i for i, d in enumerate(DECLARE_ACTIONS)
               if max_reachable_value(d, cards12) >= winning_bid)
    return ok or tuple(range(N_DECLARE))


def legal_discards(cards12) -> tuple[int, ...]:
    return tuple(sorted(pair_index(a, b) for a, b in combinations(cards12, 2)))


# -------------------------------------------------------------------- records

@dataclass(frozen=True)
class GameRecord:
    deal: Deal
    bids: tuple[str, ...]
    picked_up: bool | None = None
    declaration: GameDeclaration | None = None
    discard: tuple[int, int] | None = None
    play: tuple[int, ...] = ()
    result: GameResult = PASSED_OUT
    max_bids: tuple[int, int, int] = (0, 0, 0)

    @property
    def soloist(self) -> int | None:
        return self.result.soloist

    def tournament_points(self) -> tuple[int, ...]:
        return tournament_points(self.result)


def _rngs(deal: Deal, rngs):
    if rngs is not None:
        return list(rngs)
    base = 0 if deal.seed is None else deal.seed
    return [np.random.default_rng([base, s]) for s in range(3)]


def play_game(deal: Deal, players: Sequence[Player], rngs=None,
              observer: Observer | None = None) -> GameRecord:
    """Play one game; seat 0 is forehand and leads the first trick."""
    rngs = _rngs(deal, rngs)
    note = observer or (lambda *a: None)
    hands = [frozenset(h) for h in deal.hands]

    b = BiddingState()
    while not b.done:
        seat, role, current = b.to_act()
        phase = b.phase.value
        pre = PreCardplayObservation(hand=hands[seat], position=seat,
                                     bid_answer_pass_bid=b.bid_answer_pass_bid
                                     if phase == "ContinueAnswer" else None)
        obs = BidObservation(seat, phase, role, current, pre)
        yes = bool(players[seat].bid(obs, rngs[seat]))
        note("bid", seat, obs, yes)
        b.apply(yes)
    max_bids = tuple(b.max_bid)
    if b.soloist is None:
        return GameRecord(deal, tuple(b.tokens), max_bids=max_bids)

    s, win_idx = b.soloist, b.current_high
    win_value = BID_LADDER[win_idx]
    pass_bid = b.bid_answer_pass_bid
    pre = PreCardplayObservation(hand=hands[s], position=s, bid_answer_pass_bid=pass_bid,
                                 winning_bid=win_idx)
    obs = ChoiceObservation(s, "PickupHand", pre, tuple(range(N_PICKUP)))
    a = int(players[s].pickup(obs, rngs[s]))
    if a not in obs.legal:
        raise ReplayError(f"illegal pickup action {a}")
    note("pickup", s, obs, a)

    skat = tuple(deal.skat)
    discard = None
    if a == 0:
        cards12 = hands[s] | set(skat)
        pre = PreCardplayObservation(hand=hands[s], position=s, hand_plus_skat=cards12,
                                     bid_answer_pass_bid=pass_bid, winning_bid=win_idx)
        obs = ChoiceObservation(s, "Declare", pre, legal_declares(cards12, win_value))
        k = int(players[s].declare(obs, rngs[s]))
        if k not in range(N_DECLARE):
            raise ReplayError(f"illegal declare action {k}")
        note("declare", s, obs, k)
        decl = DECLARE_ACTIONS[k]
        pre = PreCardplayObservation(hand=hands[s], position=s, hand_plus_skat=cards12,
                                     bid_answer_pass_bid=pass_bid, winning_bid=win_idx,
                                     ouvert=decl.ouvert)
        obs = ChoiceObservation(s, "Discard", pre, legal_discards(cards12),
                                discard_context(decl))
        k = int(players[s].discard(obs, rngs[s]))
        if k not in obs.legal:
            raise ReplayError(f"illegal discard {k}")
        note("discard", s, obs, k)
        discard = pair_from_index(k)
        soloist_hand = set(cards12) - set(discard)
        skat = discard
    else:
        decl = PICKUP_ACTIONS[a]
        soloist_hand = set(hands[s])

    cur_hands = [set(h) for h in hands]
    cur_hands[s] = soloist_hand
    state = CardplayState(decl, cur_hands, s, tuple(skat),
                          soloist_cards=tuple(sorted(soloist_hand | set(skat))),
                          winning_bid=win_value)
    played = []
    while not state.finished:
        seat = state.to_move
        obs = observe_cardplay(state, seat, max_bids, skat_known=(a == 0))
        card = int(players[seat].play(obs, rngs[seat]))
        if card not in obs.legal:
            raise ReplayError(f"seat {seat} played illegal card {card}")
        note("play", seat, obs, card)
        state.play(card)
        played.append(card)
    return GameRecord(deal, tuple(b.tokens), a == 0, decl,
                      tuple(discard) if discard else None, tuple(played), state.result(),
                      max_bids)


class ScriptedPlayer:
    """Replays the decisions stored in a record for every seat it is given."""

    def __init__(self, record: GameRecord):
        self.record = record
        self._bids = iter(record.bids)
        self._cards = iter(record.play)

    def bid(self, obs, rng):
        tok = next(self._bids, None)
        if tok is None:
            raise ReplayError("bid sequence ended early")
        if tok == "P":
            return False
        if obs.role == "answerer" and tok == "Y":
            return True
        if obs.role == "bidder" and tok.isdigit() and obs.current + 1 < len(BID_LADDER) \
                and int(tok) == BID_LADDER[obs.current + 1]:
            return True
        raise ReplayError(f"token {tok!r} does not fit a {obs.role} at index {obs.current}")

    def pickup(self, obs, rng):
        r = self.record
        if r.picked_up is None or r.declaration is None:
            raise ReplayError("record has no declaration")
        return 0 if r.picked_up else pickup_index(r.declaration)

    def declare(self, obs, rng):
        try:
            return DECLARE_ACTIONS.index(self.record.declaration)
        except ValueError:
            raise ReplayError("declaration outside the declare action space")

    def discard(self, obs, rng):
        if not self.record.discard:
            raise ReplayError("record lacks a discard")
        return pair_index(*self.record.discard)

    def play(self, obs, rng):
        card = next(self._cards, None)
        if card is None:
            raise ReplayError("card sequence ended early")
        return card


def replay(record: GameRecord, observer: Observer | None = None) -> GameRecord:
    """Re-run a record through the engine; raises ReplayError on any inconsistency."""
    p = ScriptedPlayer(record)
    try:
        again = play_game(record.deal, [p, p, p], observer=observer)
    except ReplayError:
        raise
    except SkatError as exc:
        raise ReplayError(str(exc)) from exc
    if next(p._bids, None) is not None or next(p._cards, None) is not None:
        raise ReplayError("record has trailing moves")
    if again.result != record.result:
        raise ReplayError(f"stored result {record.result} != replayed {again.result}")
    return again
