"""The 32-card Skat deck.

Cards are plain ints in ``0..31``: suit-major over clubs, spades, hearts,
diamonds, and within a suit the ranks 7, 8, 9, 10, jack, queen, king, ace.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable

import numpy as np


class Suit(IntEnum):
    CLUBS = 0
    SPADES = 1
    HEARTS = 2
    DIAMONDS = 3


class Rank(IntEnum):
    SEVEN = 0
    EIGHT = 1
    NINE = 2
    TEN = 3
    JACK = 4
    QUEEN = 5
    KING = 6
    ACE = 7


SUIT_CHARS = "CSHD"
RANK_CHARS = "789TJQKA"
N_CARDS = 32
DECK = tuple(range(N_CARDS))

_RANK_POINTS = (0, 0, 0, 10, 2, 3, 4, 11)
CARD_POINTS = tuple(_RANK_POINTS[c % 8] for c in DECK)
JACKS = tuple(s * 8 + Rank.JACK for s in Suit)


class CardError(ValueError):
    pass


def make_card(suit: int, rank: int) -> int:
    return int(suit) * 8 + int(rank)


def suit_of(card: int) -> Suit:
    return Suit(card // 8)


def rank_of(card: int) -> Rank:
    return Rank(card % 8)


def card_text(card: int) -> str:
    return SUIT_CHARS[card // 8] + RANK_CHARS[card % 8]


def parse_card(text: str) -> int:
    if len(text) != 2 or text[0] not in SUIT_CHARS or text[1] not in RANK_CHARS:
        raise CardError(f"bad card text {text!r}")
    return SUIT_CHARS.index(text[0]) * 8 + RANK_CHARS.index(text[1])


def cards_text(cards: Iterable[int]) -> str:
    """Concatenated two-char encoding, in the given order."""
    return "".join(card_text(c) for c in cards)


def parse_cards(text: str) -> list[int]:
    """Inverse of ``cards_text``; whitespace between cards is ignored."""
    text = "".join(text.split())
    if len(text) % 2:
        raise CardError(f"odd-length card string {text!r}")
    return [parse_card(text[i:i + 2]) for i in range(0, len(text), 2)]


def card_points(cards: Iterable[int]) -> int:
    return sum(CARD_POINTS[c] for c in cards)


@dataclass(frozen=True)
class Deal:
    """Three ten-card hands (seat 0 is forehand) plus the two-card skat."""

    hands: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]
    skat: tuple[int, ...]
    seed: int | None = None

    def __post_init__(self):
        if [len(h) for h in self.hands] != [10, 10, 10] or len(self.skat) != 2:
            raise CardError("a deal is 10/10/10 + 2 cards")
        everything = [c for h in self.hands for c in h] + list(self.skat)
        if sorted(everything) != list(DECK):
            raise CardError("deal is not a partition of the deck")

    def text(self) -> str:
        return " ".join(cards_text(sorted(h)) for h in (*self.hands, self.skat))

    @classmethod
    def from_text(cls, text: str, seed: int | None = None) -> "Deal":
        parts = text.split()
        if len(parts) != 4:
            raise CardError(f"expected 4 card groups, got {len(parts)}")
        groups = [tuple(parse_cards(p)) for p in parts]
        return cls(hands=(groups[0], groups[1], groups[2]), skat=groups[3], seed=seed)


def deal(seed: int) -> Deal:
    """Uniformly random deal; identical seeds give identical deals."""
    perm = np.random.default_rng(seed).permutation(N_CARDS).tolist()
    hands = tuple(tuple(sorted(perm[i * 10:(i + 1) * 10])) for i in range(3))
    return Deal(hands=hands, skat=tuple(sorted(perm[30:])), seed=seed)
