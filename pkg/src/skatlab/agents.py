"""Complete players: network-driven variants, a rule baseline, random play,
and an exhaustive open-hand endgame solver used as a test oracle."""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import policy
from .engine import (BASE_VALUES, BID_ENCODING_WIDTH, BID_LADDER, CARD_POINTS, JACKS, N_BIDS, CardplayState,
                     GameDeclaration, GameType, SkatError, card_text, game_value, rank_of)
from .engine.cards import Rank
from .engine.rules import CARD_TABLES, TRUMP, winning_position
from .features import (CardplayObservation, cardplay_layout, encode_observation,
                       encode_pre_cardplay, pre_cardplay_layout)
from .game import (DECLARE_ACTIONS, DISCARD_CONTEXTS, N_DECLARE, N_PAIRS, N_PICKUP,
                   BidObservation, ChoiceObservation, pair_index)
from .neuralnet import NetworkWeights, forward, load


class SpecError(ValueError):
    pass


class TooDeep(SkatError):
    pass


# ------------------------------------------------------------------ network contexts

def _contexts() -> dict[str, tuple[int, int, str]]:
    """context name -> (input width, output width, head)."""
    pre = lambda p: pre_cardplay_layout(p).width
    out = {
        "bid_answer": (pre("BidAnswer"), BID_ENCODING_WIDTH, "softmax"),
        "continue_answer": (pre("ContinueAnswer"), BID_ENCODING_WIDTH, "softmax"),
        "pickup_hand": (pre("PickupHand"), N_PICKUP, "softmax"),
        "pickup_hand_value": (pre("PickupHand"), N_PICKUP, "linear"),
        "declare": (pre("Declare"), N_DECLARE, "softmax"),
        "declare_value": (pre("Declare"), N_DECLARE, "linear"),
    }
    for c in DISCARD_CONTEXTS:
        out[f"discard_{c}"] = (pre("Discard"), N_PAIRS, "softmax")
    for fam in ("grand", "suit", "null"):
        for role in ("soloist", "defender"):
            out[f"cardplay_{fam}_{role}"] = (cardplay_layout(fam, role).width, 32, "softmax")
    return out


CONTEXTS = _contexts()
BIDDING_CONTEXTS = ("bid_answer", "continue_answer")
VALUE_CONTEXTS = ("pickup_hand_value", "declare_value")


def load_networks(directory, contexts=None) -> dict[str, NetworkWeights]:
    """Load ``<context>.skw`` files from ``directory``; shapes must match the encoders."""
    d = Path(directory)
    if not d.is_dir():
        raise SpecError(f"weights directory {d} does not exist")
    nets = {}
    for ctx in contexts or CONTEXTS:
        p = d / f"{ctx}.skw"
        if not p.exists():
            continue
        w = load(p)
        fin, fout, head = CONTEXTS[ctx]
        c = w.config
        if (c.input_width, c.output_width, c.head) != (fin, fout, head):
            raise SpecError(f"{p}: shape {c.input_width}->{c.output_width} ({c.head}), "
                            f"expected {fin}->{fout} ({head})")
        nets[ctx] = w
    return nets


# ------------------------------------------------------------------ player specs

VARIANTS = ("DI.M", "DI.S", "AB", "MV", "MLV")
SIMPLE = ("baseline", "random", "noisy")
CARDPLAY_SOURCES = ("network", "baseline", "random")


@dataclass(frozen=True)
class PlayerSpec:
    name: str
    aggression: float = 0.85
    lam: float = policy.DEFAULT_LAMBDA
    weights: str | None = None
    cardplay: str = "baseline"
    noise: float = 0.1

    def __post_init__(self):
        if self.name not in VARIANTS + SIMPLE:
            raise SpecError(f"unknown player {self.name!r}")
        if not 0 <= self.aggression <= 1:
            raise SpecError("A must lie in [0, 1]")
        if not 0 < self.lam <= 1:
            raise SpecError("lambda must lie in (0, 1]")
        if self.cardplay not in CARDPLAY_SOURCES:
            raise SpecError(f"unknown cardplay source {self.cardplay!r}")
        if self.name in VARIANTS and self.weights is None:
            raise SpecError(f"{self.name} needs weights=<dir>")

    def text(self) -> str:
        parts = [f"name={self.name}"]
        if self.name in ("AB", "MV", "MLV"):
            parts.append(f"A={self.aggression:g}")
        if self.name == "MLV":
            parts.append(f"lambda={self.lam:g}")
        if self.name == "noisy":
            parts.append(f"noise={self.noise:g}")
        if self.weights:
            parts += [f"weights={self.weights}", f"cardplay={self.cardplay}"]
        return ",".join(parts)


_SHORT = re.compile(r"^(DI\.M|DI\.S|AB|MV|MLV)(?:\(([^)]*)\)|\.(\d+))?$")


def _split_top(text: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
            continue
        depth += (ch == "(") - (ch == ")")
        cur += ch
    parts.append(cur)
    return [p.strip() for p in parts if p.strip()]


def parse_player_spec(text: str, **defaults) -> PlayerSpec:
    """Parse ``name=MLV,A=0.85,lambda=0.1,weights=dir`` or shorthands like
    ``MLV(0.85,0.1)``, ``AB(0.89)``, ``MLV.85``, ``DI.M``, ``baseline``."""
    fields: dict = dict(defaults)
    keys = {"name": "name", "a": "aggression", "aggression": "aggression", "lambda": "lam",
            "weights": "weights", "cardplay": "cardplay", "noise": "noise"}
    for part in _split_top(text):
        if "=" in part:
            k, v = part.split("=", 1)
            k = k.strip().lower()
            if k not in keys:
                raise SpecError(f"unknown player key {k!r}")
            fields[keys[k]] = v.strip()
            continue
        m = _SHORT.match(part)
        if m:
            fields["name"] = m.group(1)
            if m.group(2):
                args = [a.strip() for a in m.group(2).split(",") if a.strip()]
                if args:
                    fields["aggression"] = args[0]
                if len(args) > 1:
                    fields["lam"] = args[1]
            elif m.group(3):
                fields["aggression"] = "0." + m.group(3)
        elif part.lower() in SIMPLE:
            fields["name"] = part.lower()
        else:
            raise SpecError(f"cannot parse player {part!r}")
    if "name" not in fields:
        raise SpecError("player spec lacks a name")
    try:
        for k in ("aggression", "lam", "noise"):
            if k in fields:
                fields[k] = float(fields[k])
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    if fields.get("weights") and "cardplay" not in fields:
        fields["cardplay"] = "baseline"
    return PlayerSpec(**fields)


# ------------------------------------------------------------------ baseline heuristic

_SUIT_GAMES = (GameType.DIAMONDS, GameType.HEARTS, GameType.SPADES, GameType.CLUBS)


def _trump_count(cards, gt: GameType) -> int:
    return sum(1 for c in cards if CARD_TABLES[gt][0][c] == TRUMP)


def _side_aces(cards, gt: GameType) -> int:
    return sum(1 for c in cards if rank_of(c) == Rank.ACE and CARD_TABLES[gt][0][c] != TRUMP)


def plan_game(cards, strict: bool = True) -> GameDeclaration | None:
    """The game the rule player would aim for, or None for a weak hand.

    Grand: four jacks, or three jacks and two aces. Suit: the
    longest trump holding (jacks plus suit) with six cards, or five cards
    backed by two jacks or a side ace. ``strict=False`` always names a game.
    """
    jacks = sum(1 for c in cards if c in JACKS)
    aces = _side_aces(cards, GameType.GRAND)
    if jacks == 4 or (jacks == 3 and aces >= 2):
        return GameDeclaration(GameType.GRAND)
    # equal lengths go to the higher-valued suit
    best = max(_SUIT_GAMES, key=lambda g: (_trump_count(cards, g), int(g)))
    n = _trump_count(cards, best)
    if n >= 6 or (n == 5 and (jacks >= 2 or _side_aces(cards, best) >= 1)) or not strict:
        return GameDeclaration(best)
    return None


def hand_limit(cards) -> int:
    """Highest bid value the rule player will hold; 0 means pass at once."""
    d = plan_game(cards)
    if d is None:
        return 0
    if JACKS[0] in cards:
        return game_value(d, cards)
    # the skat may hold the top jack: count "without" as one at most
    return 2 * BASE_VALUES[d.game_type]


def _strength(card, gt):
    return CARD_TABLES[gt][1][card]


def _wins(trick, card, gt) -> bool:
    return winning_position(tuple(trick) + (card,), gt) == len(trick)


class BaselinePlayer:
    """Deterministic rule player standing in for an expert baseline."""

    def bid(self, obs: BidObservation, rng=None) -> bool:
        limit = hand_limit(obs.pre.hand)
        if obs.role == "bidder":
            nxt = obs.current + 1
            return nxt < N_BIDS and BID_LADDER[nxt] <= limit
        return BID_LADDER[obs.current] <= limit

    def pickup(self, obs: ChoiceObservation, rng=None) -> int:
        return 0

    def declare(self, obs: ChoiceObservation, rng=None) -> int:
        cards = obs.pre.hand_plus_skat
        k = DECLARE_ACTIONS.index(plan_game(cards, strict=False))
        if k in obs.legal:
            return k
        return max(obs.legal, key=lambda i: (game_value(DECLARE_ACTIONS[i], cards), -i))

    def discard(self, obs: ChoiceObservation, rng=None) -> int:
        cards = sorted(obs.pre.hand_plus_skat)
        if obs.context == "null":
            gt = GameType.NULL
            order = sorted(cards, key=lambda c: (-_strength(c, gt), c))
        else:
            gt = GameType.GRAND if obs.context == "grand" else \
                _SUIT_GAMES[DISCARD_CONTEXTS.index(obs.context)]
            eff = CARD_TABLES[gt][0]
            # valuable side cards first, but keep aces as long as possible
            order = sorted(cards, key=lambda c: (eff[c] == TRUMP, rank_of(c) == Rank.ACE,
                                                 -CARD_POINTS[c], _strength(c, gt), c))
        return pair_index(order[0], order[1])

    def play(self, obs: CardplayObservation, rng=None) -> int:
        legal = sorted(obs.legal)
        if len(legal) == 1:
            return legal[0]
        gt = obs.declaration.game_type
        trick = obs.current_trick
        low = lambda c: (CARD_POINTS[c], _strength(c, gt), c)
        if gt is GameType.NULL:
            if obs.role == "soloist" and trick:
                safe = [c for c in legal if not _wins(trick, c, gt)]
                pool = safe or legal
                return max(pool, key=lambda c: (_strength(c, gt), -c))
            return min(legal, key=lambda c: (_strength(c, gt), c))
        eff = CARD_TABLES[gt][0]
        if not trick:
            trumps = [c for c in legal if eff[c] == TRUMP]
            if obs.role == "soloist" and trumps:
                return max(trumps, key=lambda c: (_strength(c, gt), -c))
            aces = [c for c in legal if eff[c] != TRUMP and rank_of(c) == Rank.ACE]
            return aces[0] if aces else min(legal, key=low)
        winner_pos = winning_position(trick, gt)
        seat_of_winner = (obs.seat - len(trick) + winner_pos) % 3
        # only smear points when the soloist has already played to the trick
        partner_winning = (obs.role == "defender" and len(trick) == 2
                           and seat_of_winner not in (obs.seat, obs.soloist))
        if partner_winning:
            side = [c for c in legal if eff[c] != TRUMP]
            return max(side, key=lambda c: (CARD_POINTS[c], -c)) if side else min(legal, key=low)
        on_table = sum(CARD_POINTS[c] for c in trick)
        winners = [c for c in legal if _wins(trick, c, gt)]
        if winners and (on_table >= 10 or len(trick) == 2):
            return min(winners, key=lambda c: (_strength(c, gt), c))
        return min(legal, key=low)


class RandomPlayer:
    """Uniform over legal actions; every bid or answer is a fair coin."""

    def bid(self, obs, rng) -> bool:
        return bool(rng.random() < 0.5)

    def pickup(self, obs, rng) -> int:
        return int(rng.choice(obs.legal))

    declare = discard = pickup

    def play(self, obs, rng) -> int:
        return int(rng.choice(obs.legal))


class NoisyBaseline:
    """Baseline that acts uniformly at random with probability ``noise``."""

    def __init__(self, noise: float = 0.1):
        self.noise = noise
        self.base, self.rand = BaselinePlayer(), RandomPlayer()

    def _pick(self, rng):
        return self.rand if rng.random() < self.noise else self.base

    def bid(self, obs, rng):
        return self._pick(rng).bid(obs, rng)

    def pickup(self, obs, rng):
        return self._pick(rng).pickup(obs, rng)

    def declare(self, obs, rng):
        return self._pick(rng).declare(obs, rng)

    def discard(self, obs, rng):
        return self._pick(rng).discard(obs, rng)

    def play(self, obs, rng):
        return self._pick(rng).play(obs, rng)


# ------------------------------------------------------------------ network player

class NetworkPlayer:
    """Routes each decision through encoder, network and the variant's rule.

    Missing discard or cardplay networks fall back to the baseline heuristic.
    """

    def __init__(self, spec: PlayerSpec, nets: dict[str, NetworkWeights]):
        need = ["bid_answer", "continue_answer", "pickup_hand", "declare"]
        if spec.name in ("MV", "MLV"):
            need += list(VALUE_CONTEXTS)
        missing = [c for c in need if c not in nets]
        if missing:
            raise SpecError(f"{spec.name} lacks networks: {', '.join(missing)}")
        self.spec, self.nets = spec, nets
        self.fallback = RandomPlayer() if spec.cardplay == "random" else BaselinePlayer()

    def _net(self, ctx, x):
        return forward(self.nets[ctx], x)

    def maxbid_index(self, obs: BidObservation, rng) -> int:
        ctx = "bid_answer" if obs.phase == "BidAnswer" else "continue_answer"
        dist = self._net(ctx, encode_pre_cardplay(obs.phase, obs.pre))[:N_BIDS]
        dist = policy.renormalize(dist)
        name = self.spec.name
        if name == "DI.M":
            return policy.di_argmax(dist)
        if name == "DI.S":
            return policy.di_sample(dist, None, rng)
        return policy.maxbid(dist, self.spec.aggression)

    def bid(self, obs: BidObservation, rng) -> bool:
        m = self.maxbid_index(obs, rng)
        if obs.role == "bidder":
            return policy.bid_action(m, obs.current) and obs.current + 1 < N_BIDS
        return policy.answer_action(m, obs.current)

    def _choose(self, ctx, phase, obs: ChoiceObservation, rng) -> int:
        x = encode_pre_cardplay(phase, obs.pre)
        dist = self._net(ctx, x)
        name = self.spec.name
        if name == "DI.S":
            return policy.di_sample(dist, obs.legal, rng)
        if name == "MV":
            return policy.mv_select(self._net(ctx + "_value", x), obs.legal)
        if name == "MLV":
            return policy.mlv_select(self._net(ctx + "_value", x), dist, obs.legal,
                                     self.spec.lam)
        return policy.di_argmax(dist, obs.legal)

    def pickup(self, obs, rng) -> int:
        return self._choose("pickup_hand", "PickupHand", obs, rng)

    def declare(self, obs, rng) -> int:
        return self._choose("declare", "Declare", obs, rng)

    def discard(self, obs, rng) -> int:
        ctx = f"discard_{obs.context}"
        if ctx not in self.nets:
            return BaselinePlayer().discard(obs)
        dist = self._net(ctx, encode_pre_cardplay("Discard", obs.pre))
        if self.spec.name == "DI.S":
            return policy.di_sample(dist, obs.legal, rng)
        return policy.di_argmax(dist, obs.legal)

    def play(self, obs: CardplayObservation, rng) -> int:
        ctx = f"cardplay_{obs.family}_{obs.role}"
        if self.spec.cardplay != "network" or ctx not in self.nets:
            return self.fallback.play(obs, rng)
        legal = np.zeros(32, dtype=bool)
        legal[list(obs.legal)] = True
        return policy.cardplay_select(self._net(ctx, encode_observation(obs)), legal)


_NET_CACHE: dict[str, dict[str, NetworkWeights]] = {}


def make_player(spec: PlayerSpec | str):
    if isinstance(spec, str):
        spec = parse_player_spec(spec)
    if spec.name == "baseline":
        return BaselinePlayer()
    if spec.name == "random":
        return RandomPlayer()
    if spec.name == "noisy":
        return NoisyBaseline(spec.noise)
    key = str(Path(spec.weights).resolve())
    if key not in _NET_CACHE:
        _NET_CACHE[key] = load_networks(spec.weights)
    return NetworkPlayer(spec, _NET_CACHE[key])


_PHASE_METHOD = {"BidAnswer": "bid", "ContinueAnswer": "bid", "PickupHand": "pickup",
                 "Declare": "declare", "Discard": "discard", "Cardplay": "play"}


def act(player, obs, phase: str, rng=None):
    """Dispatch one decision to ``player`` by phase name."""
    if phase not in _PHASE_METHOD:
        raise ValueError(f"unknown phase {phase!r}")
    rng = rng if rng is not None else np.random.default_rng(0)
    return getattr(player, _PHASE_METHOD[phase])(obs, rng)


# ------------------------------------------------------------------ endgame oracle
# Written from the card text with its own rank tables so that it shares no
# trick logic with the engine it is used to check.

_PLAIN = "AT" + "KQ987"
_NULL = "AKQJT987"
_JACK_ORDER = "CSHD"


def _oracle_class(t: str, game: str) -> str:
    if game == "N":
        return t[0]
    if t[1] == "J":
        return "T"
    if game != "G" and t[0] == game:
        return "T"
    return t[0]


def _oracle_rank(t: str, game: str) -> int:
    if game == "N":
        return 8 - _NULL.index(t[1])
    if t[1] == "J":
        return 100 - _JACK_ORDER.index(t[0])
    return 8 - _PLAIN.index(t[1])


def _oracle_winner(texts, game) -> int:
    led = _oracle_class(texts[0], game)
    best, key = 0, None
    for i, t in enumerate(texts):
        cls = _oracle_class(t, game)
        k = (2 if cls == "T" else 1 if cls == led else 0, _oracle_rank(t, game))
        if k[0] and (key is None or k > key):
            best, key = i, k
    return best


def _oracle_legal(hand, trick, game):
    if not trick:
        return sorted(hand)
    led = _oracle_class(trick[0], game)
    follow = [t for t in hand if _oracle_class(t, game) == led]
    return sorted(follow or hand)


_PTS = {"A": 11, "T": 10, "K": 4, "Q": 3, "J": 2}


@dataclass(frozen=True)
class EndgameSolution:
    points: int             # soloist card points at the end of play, skat excluded
    soloist_tricks: int
    line: tuple[int, ...]   # canonical card ids in play order


def endgame_oracle(pos: CardplayState, max_tricks: int = 4) -> EndgameSolution:
    """Exact open-hand minimax for positions with at most ``max_tricks`` tricks left.

    Suit and grand: the soloist maximises card points. Null: the soloist
    minimises tricks taken and play stops at the first one.
    """
    left = sum(len(h) for h in pos.hands) + len(pos.current_trick)
    if -(-left // 3) > max_tricks:
        raise TooDeep(f"{-(-left // 3)} tricks remain")
    gt = pos.declaration.game_type
    game = "N" if gt is GameType.NULL else "G" if gt is GameType.GRAND else \
        "DHSC"[int(gt)]
    to_id = {card_text(c): c for h in pos.hands for c in h}
    to_id.update({card_text(c): c for c in pos.current_trick})
    hands = tuple(frozenset(card_text(c) for c in h) for h in pos.hands)
    trick = tuple(card_text(c) for c in pos.current_trick)
    sol = pos.soloist
    null = game == "N"
    memo = {}

    def search(hands, trick, leader, tricks_won):
        if null and tricks_won:
            return (0, 0, ())
        if not trick and not any(hands):
            return (0, 0, ())
        key = (hands, trick, leader)
        if key in memo:
            return memo[key]
        seat = (leader + len(trick)) % 3
        best = None
        for t in _oracle_legal(hands[seat], trick, game):
            nh = tuple(h - {t} if i == seat else h for i, h in enumerate(hands))
            nt = trick + (t,)
            if len(nt) < 3:
                pts, tw, line = search(nh, nt, leader, tricks_won)
            else:
                w = (leader + _oracle_winner(nt, game)) % 3
                gain = sum(_PTS.get(x[1], 0) for x in nt) if w == sol else 0
                won = int(w == sol)
                pts, tw, line = search(nh, (), w, tricks_won + won)
                pts, tw = pts + gain, tw + won
            cand = (pts, tw, (to_id[t],) + line)
            if best is None:
                best = cand
            elif null:
                better = cand[1] < best[1] if seat == sol else cand[1] > best[1]
                best = cand if better else best
            else:
                better = cand[0] > best[0] if seat == sol else cand[0] < best[0]
                best = cand if better else best
        memo[key] = best
        return best

    pts, tw, line = search(hands, trick, pos.trick_leader, pos.soloist_tricks)
    return EndgameSolution(pos.soloist_points + pts, pos.soloist_tricks + tw, line)


def random_endgame(seed: int, tricks: int = 3, game_type: GameType | None = None) -> CardplayState:
    """A random open-hand position with ``tricks`` tricks left, reached by random play.

    Some positions start mid-trick so that leads and follows are both covered.
    """
    from .engine import deal
    rng = np.random.default_rng(seed)
    d = deal(seed)
    gt = GameType(int(rng.integers(6))) if game_type is None else game_type
    soloist = int(rng.integers(3))
    hands = [set(h) for h in d.hands]
    hands[soloist] |= set(d.skat)
    skat = tuple(sorted(rng.choice(sorted(hands[soloist]), size=2, replace=False).tolist()))
    hands[soloist] -= set(skat)
    state = CardplayState(GameDeclaration(gt), hands, soloist, skat)
    target = 3 * (10 - tricks) + int(rng.integers(3))
    while len(state.history) * 3 + len(state.current_trick) < target and not state.finished:
        state.play(int(rng.choice(state.legal_moves())))
    if state.finished:  # a null soloist took a trick early; draw again
        return random_endgame(seed + 7919, tricks, game_type)
    return state


__all__ = [
    "BaselinePlayer", "CONTEXTS", "EndgameSolution", "NetworkPlayer", "NoisyBaseline",
    "PlayerSpec", "RandomPlayer", "SpecError", "TooDeep", "act", "endgame_oracle",
    "hand_limit", "load_networks", "make_player", "parse_player_spec", "plan_game", "random_endgame",
]
