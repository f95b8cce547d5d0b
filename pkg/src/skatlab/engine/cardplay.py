"""Trick-taking cardplay state."""
from __future__ import annotations

from dataclasses import dataclass, field

from .cards import card_points, CARD_POINTS
from .rules import (CARD_TABLES, GameDeclaration, GameResult, IllegalMove, NotYourTurn,
                    legal_cards, resolve_game, winning_position)


@dataclass(frozen=True)
class Trick:
    leader: int
    cards: tuple[int, int, int]
    winner: int

    def seat_of(self, i: int) -> int:
        return (self.leader + i) % 3


@dataclass
class CardplayState:
    """Mutable cardplay state for a single game; use ``copy`` to branch."""

    declaration: GameDeclaration
    hands: list[set[int]]
    soloist: int
    skat: tuple[int, ...]
    trick_leader: int = 0
    current_trick: list[int] = field(default_factory=list)
    history: list[Trick] = field(default_factory=list)
    soloist_points: int = 0
    defender_points: int = 0
    soloist_tricks: int = 0
    defender_tricks: int = 0
    # all twelve soloist cards, for matador counting
    soloist_cards: tuple[int, ...] = ()
    winning_bid: int = 18

    def __post_init__(self):
        self.hands = [set(h) for h in self.hands]
        if not self.soloist_cards:
            self.soloist_cards = tuple(sorted(self.hands[self.soloist] | set(self.skat)))

    def copy(self) -> "CardplayState":
        return CardplayState(self.declaration, [set(h) for h in self.hands], self.soloist,
                             self.skat, self.trick_leader, list(self.current_trick),
                             list(self.history), self.soloist_points, self.defender_points,
                             self.soloist_tricks, self.defender_tricks, self.soloist_cards,
                             self.winning_bid)

    @property
    def game_type(self):
        return self.declaration.game_type

    @property
    def to_move(self) -> int:
        return (self.trick_leader + len(self.current_trick)) % 3

    @property
    def finished(self) -> bool:
        if self.declaration.is_null and self.soloist_tricks:
            return True
        return not self.current_trick and not any(self.hands)

    @property
    def tricks_played(self) -> int:
        return len(self.history)

    def legal_moves(self, seat: int | None = None) -> list[int]:
        if seat is not None and seat != self.to_move:
            raise NotYourTurn(f"seat {seat} asked, seat {self.to_move} to move")
        return legal_cards(self.hands[self.to_move], self.current_trick, self.game_type)

    def play(self, card: int) -> Trick | None:
        """Play ``card`` for the seat to move; returns the trick if it completed."""
        if self.finished:
            raise IllegalMove("game is over")
        seat = self.to_move
        if card not in self.legal_moves():
            raise IllegalMove(f"card {card} not legal for seat {seat}")
        self.hands[seat].remove(card)
        self.current_trick.append(card)
        if len(self.current_trick) < 3:
            return None
        cards = tuple(self.current_trick)
        winner = (self.trick_leader + winning_position(cards, self.game_type)) % 3
        trick = Trick(self.trick_leader, cards, winner)
        pts = card_points(cards)
        if winner == self.soloist:
            self.soloist_points += pts
            self.soloist_tricks += 1
        else:
            self.defender_points += pts
            self.defender_tricks += 1
        self.history.append(trick)
        self.current_trick = []
        self.trick_leader = winner
        return trick

    def unplayed_points(self) -> int:
        return sum(CARD_POINTS[c] for h in self.hands for c in h) + card_points(self.current_trick)

    def result(self) -> GameResult:
        if not self.finished:
            raise IllegalMove("game not finished")
        pts = self.soloist_points
        if not self.declaration.is_null:
            pts += card_points(self.skat)
        return resolve_game(self.declaration, self.winning_bid, self.soloist_cards, pts,
                            self.soloist_tricks, self.defender_tricks, self.soloist)

    def current_winner(self) -> int | None:
        """Seat presently winning the incomplete trick, if any card is down."""
        if not self.current_trick:
            return None
        return (self.trick_leader + winning_position(self.current_trick, self.game_type)) % 3

    def effective_suit(self, card: int) -> int:
        return CARD_TABLES[self.game_type][0][card]
