"""Game records on disk and the training sets extracted from them.

A record is one line, ``deal;bids;pickup;decl;discard;play;result``:

    deal     four card groups: forehand, middlehand, rearhand, skat
    bids     space-separated tokens in order: bid values, Y (hold), P (pass)
    pickup   S (took the skat), H (hand game) or - (passed out)
    decl     declaration text such as C, Gh, Nho, Hhosz, or -
    discard  the two cards put away, or -
    play     all cards in play order, concatenated
    result   soloist:game_value:soloist_points:W|L, or -
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .agents import CONTEXTS, PlayerSpec, make_player
from .engine import (BID_INDEX, BID_LADDER, BiddingState, CardError, Deal, GameDeclaration,
                     SkatError, cards_text, deal, parse_cards, tournament_points)
from .features import PreCardplayObservation, encode_observation, encode_pre_cardplay
from .game import GameRecord, ReplayError, ScriptedPlayer, play_game
from .neuralnet import Dataset
from .policy import answer_action, bid_action
from .tournament import deal_seed


class ParseError(ValueError):
    pass


class InsufficientData(ValueError):
    pass


# ------------------------------------------------------------------ wire format

def serialize_record(rec: GameRecord) -> str:
    r = rec.result
    if r.passed_out:
        return ";".join([rec.deal.text(), " ".join(rec.bids), "-", "-", "-", "-", "-"])
    return ";".join([
        rec.deal.text(),
        " ".join(rec.bids),
        "S" if rec.picked_up else "H",
        rec.declaration.text(),
        cards_text(sorted(rec.discard)) if rec.discard else "-",
        cards_text(rec.play),
        f"{r.soloist}:{r.game_value}:{r.soloist_card_points}:{'W' if r.soloist_won else 'L'}",
    ])


def _parse_fields(line: str):
    parts = line.strip().split(";")
    if len(parts) != 7:
        raise ParseError(f"expected 7 sections, got {len(parts)}")
    deal_s, bids_s, pick_s, decl_s, disc_s, play_s, res_s = (p.strip() for p in parts)
    try:
        d = Deal.from_text(deal_s)
    except CardError as exc:
        # a malformed card is a syntax problem; a repeated card breaks the rules
        if "partition" in str(exc):
            raise ReplayError(str(exc)) from exc
        raise ParseError(str(exc)) from exc
    bids = tuple(bids_s.split())
    for tok in bids:
        if tok not in ("P", "Y") and not (tok.isdigit() and int(tok) in BID_LADDER):
            raise ParseError(f"bad bid token {tok!r}")
    if pick_s == "-":
        if any(x != "-" for x in (decl_s, disc_s, play_s, res_s)):
            raise ParseError("a passed-out game has no declaration or play")
        return d, bids, None, None, None, (), None
    if pick_s not in ("S", "H"):
        raise ParseError(f"bad pickup field {pick_s!r}")
    try:
        decl = GameDeclaration.from_text(decl_s)
    except (ValueError, SkatError) as exc:
        raise ParseError(f"bad declaration {decl_s!r}: {exc}") from exc
    if decl.hand != (pick_s == "H"):
        raise ParseError("pickup field disagrees with the declaration's hand flag")
    try:
        discard = None if disc_s == "-" else tuple(parse_cards(disc_s))
        play = tuple(parse_cards(play_s))
    except CardError as exc:
        raise ParseError(str(exc)) from exc
    if discard is not None and len(discard) != 2:
        raise ParseError("discard must be two cards")
    fields = res_s.split(":")
    if len(fields) != 4 or fields[3] not in ("W", "L") or not all(
            f.isdigit() for f in fields[:3]):
        raise ParseError(f"bad result {res_s!r}")
    result = (int(fields[0]), int(fields[1]), int(fields[2]), fields[3] == "W")
    return d, bids, pick_s == "S", decl, discard, play, result


def parse_record(line: str) -> GameRecord:
    """Parse and replay one line; the returned record carries the engine's result."""
    d, bids, picked, decl, discard, play, summary = _parse_fields(line)
    draft = GameRecord(d, bids, picked, decl, discard, play)
    p = ScriptedPlayer(draft)
    try:
        rec = play_game(d, [p, p, p])
    except ReplayError:
        raise
    except (SkatError, StopIteration, ValueError) as exc:
        raise ReplayError(str(exc)) from exc
    if next(p._bids, None) is not None or next(p._cards, None) is not None:
        raise ReplayError("record has moves after the game ended")
    r = rec.result
    if summary is None:
        if not r.passed_out:
            raise ReplayError("bids produce a soloist but the record says passed out")
        return rec
    if r.passed_out:
        raise ReplayError("bids pass the game out but the record has a declaration")
    got = (r.soloist, r.game_value, r.soloist_card_points, r.soloist_won)
    if got != summary:
        raise ReplayError(f"stored result {summary} != replayed {got}")
    return rec


def parse_records(lines: Iterable[str]) -> list[GameRecord]:
    """Parse a stream of lines; blank lines and ``#`` comments are skipped.

    Errors carry the 1-based line number.
    """
    out = []
    for no, line in enumerate(lines, 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            out.append(parse_record(line))
        except ParseError as exc:
            raise ParseError(f"line {no}: {exc}") from exc
        except ReplayError as exc:
            raise ReplayError(f"line {no}: {exc}") from exc
    return out


def write_records(records: Iterable[GameRecord], path) -> int:
    n = 0
    with open(path, "w") as f:
        for rec in records:
            f.write(serialize_record(rec) + "\n")
            n += 1
    return n


def read_records(path) -> list[GameRecord]:
    with open(path) as f:
        return parse_records(f)


# ------------------------------------------------------------------ max-bid labels

@dataclass(frozen=True)
class MaxBidExample:
    seat: int
    phase: str                  # phase of the pass: BidAnswer or ContinueAnswer
    pre: PreCardplayObservation
    label: int                  # ladder index, 0 = pass without bidding

    @property
    def context(self) -> str:
        return "bid_answer" if self.phase == "BidAnswer" else "continue_answer"


def _events(rec: GameRecord):
    ev = []
    p = ScriptedPlayer(rec)
    play_game(rec.deal, [p, p, p], observer=lambda *a: ev.append(a))
    return ev


def extract_maxbid_labels(rec: GameRecord, events=None) -> list[MaxBidExample]:
    """One example per player who passed.

    A bidder who passes is labelled with its own last bid in that phase
    (b0 if it never bid); an answerer who declines an offer is labelled with
    the ladder step below the declined bid, i.e. the last bid it would hold.
    """
    out = []
    bid_in_phase: set[tuple[str, int]] = set()
    for kind, seat, obs, yes in (events if events is not None else _events(rec)):
        if kind != "bid":
            continue
        if yes:
            if obs.role == "bidder":
                bid_in_phase.add((obs.phase, seat))
            continue
        if obs.role == "bidder":
            label = obs.current if (obs.phase, seat) in bid_in_phase else 0
        else:
            label = obs.current - 1
        out.append(MaxBidExample(seat, obs.phase, obs.pre, label))
    return out


def labels_reproduce_bidding(rec: GameRecord) -> bool:
    """Feed every seat's max bid through the bid/answer rules and compare.

    Seats that never passed (the soloist) are given the winning bid.
    """
    labels = {e.seat: e.label for e in extract_maxbid_labels(rec)}
    if not rec.result.passed_out:
        labels[rec.result.soloist] = BID_INDEX[rec.result.winning_bid]
    b = BiddingState()
    while not b.done:
        seat, role, cur = b.to_act()
        m = labels[seat]
        b.apply(bid_action(m, cur) if role == "bidder" else answer_action(m, cur))
    return tuple(b.tokens) == tuple(rec.bids)


# ------------------------------------------------------------------ datasets

VALUE_CONTEXTS = ("pickup_hand_value", "declare_value")


def _examples(rec: GameRecord):
    """Yield (context, features, label, action) for every decision in ``rec``."""
    events = _events(rec)
    for e in extract_maxbid_labels(rec, events):
        yield e.context, encode_pre_cardplay(e.phase, e.pre), e.label, None
    if rec.result.passed_out:
        return
    value = tournament_points(rec.result)[rec.result.soloist]
    for kind, seat, obs, action in events:
        if kind == "pickup":
            x = encode_pre_cardplay("PickupHand", obs.pre)
            yield "pickup_hand", x, action, None
            yield "pickup_hand_value", x, value, action
        elif kind == "declare":
            x = encode_pre_cardplay("Declare", obs.pre)
            yield "declare", x, action, None
            yield "declare_value", x, value, action
        elif kind == "discard":
            yield f"discard_{obs.context}", encode_pre_cardplay("Discard", obs.pre), action, None
        elif kind == "play":
            yield f"cardplay_{obs.family}_{obs.role}", encode_observation(obs), action, None


def build_datasets(records: Iterable[GameRecord], contexts: Sequence[str] | None = None
                   ) -> dict[str, Dataset]:
    """Every requested context's dataset from one pass over ``records``.

    Contexts with no examples get an empty dataset of the right width.
    """
    want = set(contexts or CONTEXTS)
    unknown = want - set(CONTEXTS)
    if unknown:
        raise ValueError(f"unknown contexts: {sorted(unknown)}")
    rows: dict[str, list] = {c: [] for c in want}
    for rec in records:
        try:
            for ctx, x, y, a in _examples(rec):
                if ctx in want:
                    rows[ctx].append((x, y, a))
        except ReplayError:
            raise
        except SkatError as exc:
            raise ReplayError(str(exc)) from exc
    out = {}
    for ctx in want:
        width, _, head = CONTEXTS[ctx]
        r = rows[ctx]
        X = np.array([x for x, _, _ in r], dtype=np.float32).reshape(len(r), width)
        if head == "linear":
            out[ctx] = Dataset(X, np.array([y for _, y, _ in r], dtype=np.float32),
                               np.array([a for _, _, a in r], dtype=np.int64))
        else:
            out[ctx] = Dataset(X, np.array([y for _, y, _ in r], dtype=np.int64))
    return out


def build_dataset(records: Iterable[GameRecord], context: str) -> Dataset:
    return build_datasets(records, [context])[context]


def split(data: Dataset, test: int | float, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Disjoint (train, test) split; ``test`` is a count or a fraction below one."""
    n = len(data)
    k = int(round(test * n)) if isinstance(test, float) and test < 1 else int(test)
    if n == 0 or k < 1 or k >= n:
        raise InsufficientData(f"cannot take {k} test examples from {n}")
    perm = np.random.default_rng(seed).permutation(n)
    return data.subset(np.sort(perm[k:])), data.subset(np.sort(perm[:k]))


# ------------------------------------------------------------------ self-play

def selfplay_generate(players: Sequence, n_games: int, seed: int = 0) -> Iterator[GameRecord]:
    """Play ``n_games`` on fresh deals; ``players`` holds three specs or player objects."""
    if len(players) != 3:
        raise ValueError("need exactly three players")
    ps = [make_player(p) if isinstance(p, (PlayerSpec, str)) else p for p in players]
    for g in range(n_games):
        d = deal(deal_seed(seed, g))
        rngs = [np.random.default_rng([seed, g, s, 0x5E]) for s in range(3)]
        yield play_game(d, ps, rngs)


__all__ = [
    "InsufficientData", "MaxBidExample", "ParseError", "ReplayError", "build_dataset",
    "build_datasets", "extract_maxbid_labels", "labels_reproduce_bidding", "parse_record",
    "parse_records", "read_records", "selfplay_generate", "serialize_record", "split",
    "write_records",
]
