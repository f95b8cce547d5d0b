"""Skat rules engine: deck, bidding, declarations, cardplay and scoring."""
from .cards import (CARD_POINTS, DECK, JACKS, N_CARDS, CardError, Deal, Rank, Suit, card_points,
                    card_text, cards_text, deal, make_card, parse_card, parse_cards, rank_of,
                    suit_of)
from .rules import (BASE_VALUES, BID_ENCODING_WIDTH, BID_INDEX, BID_LADDER, N_BIDS,
                    NULL_VALUES, PASSED_OUT, TRUMP, ConstructionMismatch, GameDeclaration,
                    GameResult, GameType, IllegalDeclaration, IllegalMove, IncompleteTrick,
                    NotYourTurn, SkatError, build_bid_ladder, effective_suit, game_value,
                    is_trump, legal_cards, matadors, max_reachable_value, resolve_game,
                    tournament_points, trick_winner, trump_sequence, winning_position)
from .bidding import BiddingError, BiddingState, BidPhase
from .cardplay import CardplayState, Trick


def legal_moves(state: CardplayState, seat: int) -> list[int]:
    return state.legal_moves(seat)
