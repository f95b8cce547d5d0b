"""One-hot feature encoders for every decision point.

Each encoder has a fixed layout: an ordered list of named segments. The
layout doubles as a manifest (``manifest_text``) so vectors can be decoded
outside this package.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .engine import (BID_ENCODING_WIDTH, CardplayState, GameDeclaration, card_points,
                     game_value, trump_sequence)
from .engine.rules import CARD_TABLES, TRUMP, winning_position


class MissingField(ValueError):
    pass


PRE_PHASES = ("BidAnswer", "ContinueAnswer", "PickupHand", "Declare", "Discard")
FAMILIES = ("grand", "suit", "null")
ROLES = ("soloist", "defender")

# table row order; each phase picks a subset
_PRE_ROWS = {
    "player_hand": 32,
    "player_position": 3,
    "bid_answer_pass_bid": BID_ENCODING_WIDTH,
    "winning_bid": BID_ENCODING_WIDTH,
    "player_hand_plus_skat": 32,
    "ouvert": 1,
}
_PRE_USES = {
    "BidAnswer": ("player_hand", "player_position"),
    "ContinueAnswer": ("player_hand", "player_position", "bid_answer_pass_bid"),
    "PickupHand": ("player_hand", "player_position", "bid_answer_pass_bid", "winning_bid"),
    "Declare": ("player_position", "bid_answer_pass_bid", "winning_bid",
                "player_hand_plus_skat"),
    "Discard": ("player_position", "bid_answer_pass_bid", "winning_bid",
                "player_hand_plus_skat", "ouvert"),
}

_COMMON = [
    ("player_hand", 32), ("hand_value", 1),
    ("played_self", 32), ("played_opp1", 32), ("played_opp2", 32),
    ("lead_opp1", 32), ("lead_opp2", 32),
    ("slough_opp1", 32), ("slough_opp2", 32),
    ("void_opp1", 5), ("void_opp2", 5),
    ("current_trick", 32), ("trick_value", 1),
    ("max_bid_type_opp1", 6), ("max_bid_type_opp2", 6),
    ("soloist_points", 1), ("defender_points", 1),
    ("hand_game", 1), ("ouvert_game", 1), ("schneider_announced", 1), ("schwarz_announced", 1),
]
_ROLE_ROWS = {
    "soloist": [("skat", 32), ("needs_schneider", 1)],
    "defender": [("winning_current_trick", 1), ("declarer_position", 2),
                 ("declarer_ouvert", 32)],
}
_FAMILY_ROWS = {
    "grand": [("trump_remaining", 32)],
    "suit": [("trump_remaining", 32), ("suit_declaration", 4)],
    "null": [],
}

MAX_BID_BASES = (9, 10, 11, 12, 24, 23)
POINT_SCALE = 120.0


@dataclass(frozen=True)
class Layout:
    name: str
    segments: tuple[tuple[str, int], ...]

    @property
    def width(self) -> int:
        return sum(w for _, w in self.segments)

    def offsets(self) -> dict[str, tuple[int, int]]:
        out, pos = {}, 0
        for name, w in self.segments:
            out[name] = (pos, w)
            pos += w
        return out

    def manifest_text(self) -> str:
        lines = [f"# {self.name} width={self.width}"]
        lines += [f"{n} {o} {w}" for n, (o, w) in self.offsets().items()]
        return "\n".join(lines) + "\n"


def pre_cardplay_layout(phase: str) -> Layout:
    if phase not in _PRE_USES:
        raise ValueError(f"unknown pre-cardplay phase {phase!r}")
    rows = [(n, _PRE_ROWS[n]) for n in _PRE_ROWS if n in _PRE_USES[phase]]
    return Layout(phase, tuple(rows))


def cardplay_layout(family: str, role: str) -> Layout:
    family, role = family.lower(), role.lower()
    if family not in _FAMILY_ROWS or role not in _ROLE_ROWS:
        raise ValueError(f"unknown cardplay context {family}/{role}")
    return Layout(f"{family}_{role}", tuple(_COMMON + _ROLE_ROWS[role] + _FAMILY_ROWS[family]))


def parse_manifest(text: str) -> dict[str, tuple[int, int]]:
    out = {}
    for line in text.splitlines():
        if line and not line.startswith("#"):
            name, off, w = line.split()
            out[name] = (int(off), int(w))
    return out


# -------------------------------------------------------------------- observations

@dataclass(frozen=True)
class PreCardplayObservation:
    hand: frozenset[int]
    position: int
    hand_plus_skat: frozenset[int] | None = None
    bid_answer_pass_bid: int | None = None
    winning_bid: int | None = None
    ouvert: bool | None = None


@dataclass(frozen=True)
class CardplayObservation:
    """Everything one seat can see at its turn, relative to that seat.

    ``opp1`` is the next seat in play order (left), ``opp2`` the one after.
    """

    seat: int
    soloist: int
    declaration: GameDeclaration
    hand: frozenset[int]
    played: tuple[frozenset[int], frozenset[int], frozenset[int]]  # self, opp1, opp2
    leads: tuple[frozenset[int], frozenset[int]]
    sloughs: tuple[frozenset[int], frozenset[int]]
    voids: tuple[frozenset[int], frozenset[int]]  # effective-suit ids, TRUMP=4
    current_trick: tuple[int, ...]
    soloist_points: int
    defender_points: int
    opp_max_bids: tuple[int, int]
    skat: frozenset[int] | None = None
    needs_schneider: bool = False
    winning_current_trick: bool = False
    declarer_ouvert: frozenset[int] | None = None
    trump_remaining: frozenset[int] | None = None
    legal: tuple[int, ...] = field(default=(), compare=False)

    @property
    def role(self) -> str:
        return "soloist" if self.seat == self.soloist else "defender"

    @property
    def family(self) -> str:
        return self.declaration.family


def max_bid_type(max_bid_value: int) -> np.ndarray:
    """6-bit mask: bit i set iff the bid is a positive multiple of base i."""
    v = int(max_bid_value)
    return np.array([v > 0 and v % b == 0 for b in MAX_BID_BASES], dtype=np.float32)


def observe_cardplay(state: CardplayState, seat: int, max_bids: Sequence[int],
                     skat_known: bool = True) -> CardplayObservation:
    """Build ``seat``'s view of ``state``.

    ``max_bids`` holds each seat's highest bid value (0 if it never bid).
    ``skat_known`` says whether the soloist saw the skat (not in hand games).
    """
    gt = state.game_type
    eff = CARD_TABLES[gt][0]
    rel = [seat, (seat + 1) % 3, (seat + 2) % 3]
    played = {s: set() for s in range(3)}
    leads = {s: set() for s in range(3)}
    sloughs = {s: set() for s in range(3)}
    voids = {s: set() for s in range(3)}

    def scan(leader, cards):
        led = eff[cards[0]]
        leads[leader].add(cards[0])
        for i, c in enumerate(cards):
            p = (leader + i) % 3
            played[p].add(c)
            if i and eff[c] != led:
                voids[p].add(led)
                if eff[c] != TRUMP:
                    sloughs[p].add(c)

    for t in state.history:
        scan(t.leader, t.cards)
    if state.current_trick:
        scan(state.trick_leader, state.current_trick)

    decl = state.declaration
    soloist = state.soloist
    hand = frozenset(state.hands[seat])
    all_played = set().union(*played.values())
    obs = dict(
        seat=seat, soloist=soloist, declaration=decl, hand=hand,
        played=tuple(frozenset(played[s]) for s in rel),
        leads=(frozenset(leads[rel[1]]), frozenset(leads[rel[2]])),
        sloughs=(frozenset(sloughs[rel[1]]), frozenset(sloughs[rel[2]])),
        voids=(frozenset(voids[rel[1]]), frozenset(voids[rel[2]])),
        current_trick=tuple(state.current_trick),
        soloist_points=state.soloist_points, defender_points=state.defender_points,
        opp_max_bids=(max_bids[rel[1]], max_bids[rel[2]]),
        legal=tuple(state.legal_moves()) if state.to_move == seat and not state.finished else (),
    )
    trumps = set(trump_sequence(gt))
    if seat == soloist:
        skat = frozenset(state.skat) if skat_known else None
        obs["skat"] = skat
        if not decl.is_null:
            bid = state.winning_bid
            plain = game_value(decl, state.soloist_cards)
            with_schneider = game_value(decl, state.soloist_cards, schneider=True)
            obs["needs_schneider"] = plain < bid <= with_schneider
        hidden = trumps - hand - (skat or set()) - all_played
    else:
        if state.current_trick:
            w = (state.trick_leader + winning_position(state.current_trick, gt)) % 3
            obs["winning_current_trick"] = w != soloist and w != seat
        visible = frozenset(state.hands[soloist]) if decl.ouvert else frozenset()
        obs["declarer_ouvert"] = visible
        hidden = trumps - hand - visible - all_played
    if not decl.is_null:
        obs["trump_remaining"] = frozenset(hidden)
    return CardplayObservation(**obs)


# -------------------------------------------------------------------- encoders

def _cards(vec, off, cards):
    for c in cards:
        vec[off + c] = 1.0


def encode_pre_cardplay(phase: str, obs: PreCardplayObservation) -> np.ndarray:
    layout = pre_cardplay_layout(phase)
    vec = np.zeros(layout.width, dtype=np.float32)
    for name, (off, _) in layout.offsets().items():
        if name == "player_hand":
            _cards(vec, off, obs.hand)
        elif name == "player_position":
            vec[off + obs.position] = 1.0
        elif name == "bid_answer_pass_bid":
            if obs.bid_answer_pass_bid:
                vec[off + obs.bid_answer_pass_bid] = 1.0
        elif name == "winning_bid":
            if obs.winning_bid is None:
                raise MissingField("winning_bid")
            vec[off + obs.winning_bid] = 1.0
        elif name == "player_hand_plus_skat":
            if obs.hand_plus_skat is None:
                raise MissingField("hand_plus_skat")
            _cards(vec, off, obs.hand_plus_skat)
        elif name == "ouvert":
            if obs.ouvert is None:
                raise MissingField("ouvert")
            vec[off] = float(obs.ouvert)
    return vec


def encode_cardplay(family: str, role: str, obs: CardplayObservation) -> np.ndarray:
    layout = cardplay_layout(family, role)
    off = layout.offsets()
    vec = np.zeros(layout.width, dtype=np.float32)
    d = obs.declaration
    _cards(vec, off["player_hand"][0], obs.hand)
    vec[off["hand_value"][0]] = card_points(obs.hand) / POINT_SCALE
    for key, cards in zip(("played_self", "played_opp1", "played_opp2"), obs.played):
        _cards(vec, off[key][0], cards)
    for i in (0, 1):
        _cards(vec, off[f"lead_opp{i + 1}"][0], obs.leads[i])
        _cards(vec, off[f"slough_opp{i + 1}"][0], obs.sloughs[i])
        for v in obs.voids[i]:
            vec[off[f"void_opp{i + 1}"][0] + v] = 1.0
        o = off[f"max_bid_type_opp{i + 1}"][0]
        vec[o:o + 6] = max_bid_type(obs.opp_max_bids[i])
    _cards(vec, off["current_trick"][0], obs.current_trick)
    vec[off["trick_value"][0]] = card_points(obs.current_trick) / POINT_SCALE
    vec[off["soloist_points"][0]] = obs.soloist_points / POINT_SCALE
    vec[off["defender_points"][0]] = obs.defender_points / POINT_SCALE
    vec[off["hand_game"][0]] = d.hand
    vec[off["ouvert_game"][0]] = d.ouvert
    vec[off["schneider_announced"][0]] = d.schneider_announced
    vec[off["schwarz_announced"][0]] = d.schwarz_announced
    if role.lower() == "soloist":
        if obs.skat:
            _cards(vec, off["skat"][0], obs.skat)
        vec[off["needs_schneider"][0]] = obs.needs_schneider
    else:
        if obs.declarer_ouvert is None:
            raise MissingField("declarer_ouvert")
        vec[off["winning_current_trick"][0]] = obs.winning_current_trick
        # soloist left of us -> bit 0, right of us -> bit 1
        vec[off["declarer_position"][0] + (0 if obs.soloist == (obs.seat + 1) % 3 else 1)] = 1.0
        _cards(vec, off["declarer_ouvert"][0], obs.declarer_ouvert)
    if "trump_remaining" in off:
        if obs.trump_remaining is None:
            raise MissingField("trump_remaining")
        _cards(vec, off["trump_remaining"][0], obs.trump_remaining)
    if "suit_declaration" in off:
        # order diamonds, hearts, spades, clubs as in the game-type table
        vec[off["suit_declaration"][0] + int(d.game_type)] = 1.0
    return vec


def encode_observation(obs: CardplayObservation) -> np.ndarray:
    return encode_cardplay(obs.family, obs.role, obs)


CARDPLAY_CONTEXTS = tuple(f"{f}_{r}" for f in FAMILIES for r in ROLES)

__all__ = [
    "CARDPLAY_CONTEXTS", "CardplayObservation", "FAMILIES", "Layout", "MissingField",
    "PRE_PHASES", "PreCardplayObservation", "ROLES", "cardplay_layout", "encode_cardplay",
    "encode_observation", "encode_pre_cardplay", "max_bid_type", "observe_cardplay",
    "parse_manifest", "pre_cardplay_layout",
]
