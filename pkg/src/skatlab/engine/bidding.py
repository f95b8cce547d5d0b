"""The two-stage bidding state machine.

Seat 0 is forehand, 1 middlehand, 2 rearhand. Middlehand bids to forehand
first; rearhand then bids to whoever survived. Bids always climb exactly one
ladder step. If nobody bid at all, the last remaining player is offered the
lowest bid.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .rules import BID_LADDER, SkatError


class BidPhase(str, Enum):
    BID_ANSWER = "BidAnswer"
    CONTINUE_ANSWER = "ContinueAnswer"
    DONE = "Done"


class BiddingError(SkatError):
    pass


@dataclass
class BiddingState:
    phase: BidPhase = BidPhase.BID_ANSWER
    current_high: int = 0
    bidder: int = 1
    answerer: int = 0
    waiting: int | None = 2
    passed: list[bool] = field(default_factory=lambda: [False, False, False])
    bid_answer_pass_bid: int | None = None
    answering: bool = False
    # the lone survivor is offered the lowest bid when nobody bid
    final_offer: bool = False
    soloist: int | None = None
    max_bid: list[int] = field(default_factory=lambda: [0, 0, 0])
    tokens: list[str] = field(default_factory=list)

    @property
    def done(self) -> bool:
        return self.phase is BidPhase.DONE

    @property
    def winning_bid(self) -> int:
        return BID_LADDER[self.current_high]

    def to_act(self) -> tuple[int, str, int]:
        """(seat, role, ladder index under consideration)."""
        if self.done:
            raise BiddingError("bidding is over")
        if self.final_offer:
            return self.answerer, "answerer", 1
        if self.answering:
            return self.answerer, "answerer", self.current_high
        return self.bidder, "bidder", self.current_high

    def apply(self, yes: bool) -> None:
        """Bid the next value / accept (``True``) or pass (``False``)."""
        seat, role, idx = self.to_act()
        if role == "bidder":
            if yes:
                if self.current_high + 1 >= len(BID_LADDER):
                    raise BiddingError("no higher bid exists")
                self.current_high += 1
                self.max_bid[seat] = BID_LADDER[self.current_high]
                self.tokens.append(str(BID_LADDER[self.current_high]))
                self.answering = True
            else:
                self.passed[seat] = True
                self.tokens.append("P")
                self._bidder_passed()
            return
        self.tokens.append("Y" if yes else "P")
        if yes:
            self.max_bid[seat] = max(self.max_bid[seat], BID_LADDER[idx])
            if self.final_offer:
                self.current_high = 1
                self._finish(seat)
            else:
                self.answering = False
            return
        self.passed[seat] = True
        if self.final_offer:
            self._finish(None)
        elif self.phase is BidPhase.BID_ANSWER:
            self._start_continue(self.bidder)
        else:
            self._finish(self.bidder)

    def apply_token(self, token: str) -> None:
        seat, role, idx = self.to_act()
        if token == "P":
            self.apply(False)
        elif role == "answerer" and token == "Y":
            self.apply(True)
        elif role == "bidder" and token.isdigit() and idx + 1 < len(BID_LADDER) \
                and int(token) == BID_LADDER[idx + 1]:
            self.apply(True)
        else:
            raise BiddingError(f"token {token!r} illegal for {role} at {BID_LADDER[idx]}")

    def _bidder_passed(self) -> None:
        if self.phase is BidPhase.BID_ANSWER:
            self._start_continue(self.answerer)
        elif self.current_high == 0:
            self.final_offer = True
        else:
            self._finish(self.answerer)

    def _start_continue(self, survivor: int) -> None:
        self.bid_answer_pass_bid = self.current_high or None
        self.phase = BidPhase.CONTINUE_ANSWER
        self.bidder, self.answerer, self.waiting = 2, survivor, None
        self.answering = False

    def _finish(self, soloist: int | None) -> None:
        self.phase = BidPhase.DONE
        self.soloist = soloist
        self.answering = self.final_offer = False
