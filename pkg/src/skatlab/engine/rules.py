"""Declarations, game values, card ordering, and scoring."""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .cards import CARD_POINTS, JACKS, N_CARDS, Rank, Suit, card_points


class SkatError(Exception):
    """Base class for engine errors."""


class ConstructionMismatch(SkatError):
    pass


class IllegalDeclaration(SkatError):
    pass


class NotYourTurn(SkatError):
    pass


class IncompleteTrick(SkatError):
    pass


class IllegalMove(SkatError):
    pass


class GameType(IntEnum):
    DIAMONDS = 0
    HEARTS = 1
    SPADES = 2
    CLUBS = 3
    GRAND = 4
    NULL = 5

    @property
    def is_suit(self) -> bool:
        return self <= GameType.CLUBS

    @property
    def trump_suit(self) -> Suit | None:
        return _TRUMP_SUIT.get(self)

    @property
    def family(self) -> str:
        if self.is_suit:
            return "suit"
        return "grand" if self is GameType.GRAND else "null"


_TRUMP_SUIT = {
    GameType.DIAMONDS: Suit.DIAMONDS,
    GameType.HEARTS: Suit.HEARTS,
    GameType.SPADES: Suit.SPADES,
    GameType.CLUBS: Suit.CLUBS,
}

BASE_VALUES = {
    GameType.DIAMONDS: 9,
    GameType.HEARTS: 10,
    GameType.SPADES: 11,
    GameType.CLUBS: 12,
    GameType.GRAND: 24,
    GameType.NULL: 23,
}

# (hand, ouvert) -> value
NULL_VALUES = {(False, False): 23, (True, False): 35, (False, True): 46, (True, True): 59}

GAME_LETTERS = "DHSCGN"

# Width of the one-hot bid encoding the networks are built for.
BID_ENCODING_WIDTH = 67


@dataclass(frozen=True)
class GameDeclaration:
    game_type: GameType
    hand: bool = False
    ouvert: bool = False
    schneider_announced: bool = False
    schwarz_announced: bool = False

    def __post_init__(self):
        object.__setattr__(self, "game_type", GameType(self.game_type))
        check_declaration(self)

    @property
    def is_null(self) -> bool:
        return self.game_type is GameType.NULL

    @property
    def family(self) -> str:
        return self.game_type.family

    def text(self) -> str:
        flags = "".join(ch for ch, on in (("h", self.hand), ("o", self.ouvert),
                                          ("s", self.schneider_announced),
                                          ("z", self.schwarz_announced)) if on)
        return GAME_LETTERS[self.game_type] + flags

    @classmethod
    def from_text(cls, text: str) -> "GameDeclaration":
        if not text or text[0] not in GAME_LETTERS or set(text[1:]) - set("hosz"):
            raise IllegalDeclaration(f"bad declaration text {text!r}")
        return cls(GameType(GAME_LETTERS.index(text[0])), hand="h" in text[1:],
                   ouvert="o" in text[1:], schneider_announced="s" in text[1:],
                   schwarz_announced="z" in text[1:])


def check_declaration(d: GameDeclaration) -> None:
    if d.game_type is GameType.NULL:
        if d.schneider_announced or d.schwarz_announced:
            raise IllegalDeclaration("null games take no schneider/schwarz announcements")
        return
    if (d.schneider_announced or d.schwarz_announced) and not d.hand:
        raise IllegalDeclaration("announcements require a hand game")
    if d.schwarz_announced and not d.schneider_announced:
        raise IllegalDeclaration("schwarz announced implies schneider announced")
    if d.ouvert and not d.schwarz_announced:
        raise IllegalDeclaration("suit/grand ouvert implies schwarz announced")


def build_bid_ladder(strict: bool = True) -> tuple[int, ...]:
    """Ascending bid values with index 0 standing for passing without a bid.

    Bids are every reachable suit/grand value (base x multiplier) plus the
    fixed null values. With ``strict`` the length is checked against the
    67-wide bid encoding and ConstructionMismatch is raised on disagreement.
    """
    values = set()
    for base in (9, 10, 11, 12):
        values.update(base * m for m in range(2, 19))
    values.update(24 * m for m in range(2, 12))
    values.update(NULL_VALUES.values())
    ladder = (0, *sorted(values))
    if strict and len(ladder) != BID_ENCODING_WIDTH:
        raise ConstructionMismatch(
            f"bid ladder has {len(ladder)} entries (pass + {len(ladder) - 1} bids), "
            f"encoding width is {BID_ENCODING_WIDTH}")
    return ladder


BID_LADDER = build_bid_ladder(strict=False)
N_BIDS = len(BID_LADDER)
BID_INDEX = {v: i for i, v in enumerate(BID_LADDER)}


# -- trump order and matadors -------------------------------------------------

def trump_sequence(game_type: GameType) -> tuple[int, ...]:
    """Trumps from highest to lowest; empty for null."""
    if game_type is GameType.NULL:
        return ()
    seq = list(JACKS)
    if game_type.is_suit:
        s = int(game_type.trump_suit) * 8
        seq += [s + r for r in (Rank.ACE, Rank.TEN, Rank.KING, Rank.QUEEN,
                                Rank.NINE, Rank.EIGHT, Rank.SEVEN)]
    return tuple(seq)


def matadors(game_type: GameType, cards) -> int:
    """Length of the unbroken top-trump run held ("with") or missing ("without")."""
    seq = trump_sequence(game_type)
    held = set(cards)
    with_top = seq[0] in held
    n = 0
    for c in seq:
        if (c in held) != with_top:
            break
        n += 1
    return n


def game_value(declaration: GameDeclaration, soloist_cards, schneider: bool = False,
               schwarz: bool = False) -> int:
    """Value of a declared game given the soloist's twelve cards.

    ``schneider``/``schwarz`` are the achieved outcomes; every flag, achieved
    or declared, contributes exactly one multiplier level.
    """
    d = declaration
    check_declaration(d)
    if d.is_null:
        return NULL_VALUES[(d.hand, d.ouvert)]
    mult = matadors(d.game_type, soloist_cards) + 1
    mult += sum((d.hand, schneider, d.schneider_announced, schwarz,
                 d.schwarz_announced, d.ouvert))
    return BASE_VALUES[d.game_type] * mult


def max_reachable_value(declaration: GameDeclaration, soloist_cards) -> int:
    """Highest value the declaration can end with (schneider and schwarz achieved)."""
    return game_value(declaration, soloist_cards, schneider=True, schwarz=True)


# -- card ordering ------------------------------------------------------------

TRUMP = 4  # effective-suit id of the trump class


def _tables(game_type: GameType) -> tuple[tuple[int, ...], tuple[int, ...]]:
    eff = [c // 8 for c in range(N_CARDS)]
    strength = [0] * N_CARDS
    if game_type is GameType.NULL:
        # canonical rank order already is A K Q J 10 9 8 7 from the top
        strength = [c % 8 for c in range(N_CARDS)]
        return tuple(eff), tuple(strength)
    side_order = (Rank.SEVEN, Rank.EIGHT, Rank.NINE, Rank.QUEEN, Rank.KING, Rank.TEN, Rank.ACE)
    for c in range(N_CARDS):
        if c % 8 != Rank.JACK:
            strength[c] = side_order.index(c % 8)
    for c in trump_sequence(game_type):
        eff[c] = TRUMP
    for i, j in enumerate(JACKS):
        strength[j] = 20 - i
    return tuple(eff), tuple(strength)


# per game type: effective suit of each card, and strength within it
CARD_TABLES = {gt: _tables(gt) for gt in GameType}


def effective_suit(card: int, game_type: GameType) -> int:
    return CARD_TABLES[game_type][0][card]


def is_trump(card: int, game_type: GameType) -> bool:
    return CARD_TABLES[game_type][0][card] == TRUMP


def legal_cards(hand, trick_cards, game_type: GameType) -> list[int]:
    """Cards from ``hand`` that may be played onto a trick holding ``trick_cards``."""
    hand = sorted(hand)
    if not trick_cards:
        return hand
    eff = CARD_TABLES[game_type][0]
    led = eff[trick_cards[0]]
    follow = [c for c in hand if eff[c] == led]
    return follow or hand


def winning_position(trick_cards, game_type: GameType) -> int:
    """Index (in play order) of the card currently winning the trick."""
    eff, strength = CARD_TABLES[game_type]
    led = eff[trick_cards[0]]
    best, best_key = 0, None
    for i, c in enumerate(trick_cards):
        e = eff[c]
        key = (2 if e == TRUMP else 1 if e == led else 0, strength[c])
        if best_key is None or key > best_key:
            best, best_key = i, key
    return best


def trick_winner(trick_cards, leader: int, declaration: GameDeclaration | GameType) -> int:
    """Seat winning a complete three-card trick led by ``leader``."""
    if len(trick_cards) != 3:
        raise IncompleteTrick(f"trick has {len(trick_cards)} cards")
    gt = declaration.game_type if isinstance(declaration, GameDeclaration) else declaration
    return (leader + winning_position(trick_cards, gt)) % 3


# -- outcome ------------------------------------------------------------------

@dataclass(frozen=True)
class GameResult:
    soloist: int | None
    declaration: GameDeclaration | None = None
    game_value: int = 0
    soloist_won: bool = False
    soloist_card_points: int = 0
    schneider: bool = False
    schwarz: bool = False
    overbid: bool = False
    winning_bid: int = 0

    @property
    def passed_out(self) -> bool:
        return self.soloist is None


PASSED_OUT = GameResult(soloist=None)


def resolve_game(declaration: GameDeclaration, highest_bid: int, soloist_cards,
                 soloist_points: int, soloist_tricks: int, defender_tricks: int,
                 soloist: int = 0) -> GameResult:
    """Decide the outcome of a finished (or early-ended null) game.

    ``soloist_points`` must already include the skat for suit/grand games.
    """
    d = declaration
    if d.is_null:
        won = soloist_tricks == 0
        gv = game_value(d, soloist_cards)
        overbid = gv < highest_bid
        return GameResult(soloist, d, gv, won and not overbid, soloist_points,
                          overbid=overbid, winning_bid=highest_bid)
    schneider = soloist_points >= 90 or soloist_points <= 30
    schwarz = defender_tricks == 0 or soloist_tricks == 0
    # an announced level is scored as reached, win or lose
    schwarz = schwarz or d.schwarz_announced
    schneider = schneider or schwarz or d.schneider_announced
    gv = game_value(d, soloist_cards, schneider=schneider, schwarz=schwarz)
    if d.schwarz_announced:
        won = defender_tricks == 0
    elif d.schneider_announced:
        won = soloist_points >= 90
    else:
        won = soloist_points >= 61
    overbid = gv < highest_bid
    return GameResult(soloist, d, gv, won and not overbid, soloist_points, schneider,
                      schwarz, overbid, highest_bid)


def tournament_points(result: GameResult) -> tuple[int, ...]:
    """Fabian-Seeger points per seat for one game."""
    if result.soloist is None:
        return (0, 0, 0)
    gv = result.game_value
    if result.soloist_won:
        sol, dfn = 50 + gv, 0
    else:
        sol, dfn = -(50 + 2 * gv), 40
    return tuple(sol if s == result.soloist else dfn for s in range(3))


__all__ = [
    "BASE_VALUES", "BID_ENCODING_WIDTH", "BID_INDEX", "BID_LADDER", "CARD_POINTS",
    "CARD_TABLES", "ConstructionMismatch", "GameDeclaration", "GameResult", "GameType",
    "IllegalDeclaration", "IllegalMove", "IncompleteTrick", "NotYourTurn", "N_BIDS",
    "NULL_VALUES", "PASSED_OUT", "SkatError", "TRUMP", "build_bid_ladder", "card_points",
    "effective_suit", "game_value", "is_trump", "legal_cards", "matadors",
    "max_reachable_value", "resolve_game", "tournament_points", "trick_winner",
    "trump_sequence", "winning_position",
]
