"""Repeated rock-paper-scissors under an asymmetric information setup.

The bot sees the full move history of both sides; the agent sees nothing,
so only an unpredictable agent avoids exploitation.  Scoring is zero-sum:
win +1, tie 0, loss -1 from the agent's perspective.  An agent that fails
to produce a move (an LLM parse or request failure) forfeits the round,
which counts as a loss and is tallied separately.

Bots:

* RandomBot          uniform moves from its seeded stream.
* FrequencyExploiter counters the agent's most frequent move so far
                     (uniform before any history; ties break in the fixed
                     order rock < paper < scissors).
* MarkovPredictor    order-2 transition counts on the agent's history,
                     falling back to the frequency rule, then to uniform.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .client import Backend, BackendError, ChatRequest, complete
from .distributions import CategoricalDist
from .extractors import ExtractorSpec, MapperSpec, ModBucket, SumMod, extract_action
from .parsing import ParseError, parse_pif_answer
from .prng import CounterRng, hash64
from .prompts import render

MOVES = ("rock", "paper", "scissors")

_BEATS = {"rock": "paper", "paper": "scissors", "scissors": "rock"}

_EXTRACT_ALPHABET = (
    "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ!@#$"
)

MOVE_TARGET = CategoricalDist.uniform(MOVES)


class ArenaError(ValueError):
    """Invalid arena configuration."""


def counter_move(move: str) -> str:
    """The move that beats ``move``."""
    if move not in MOVES:
        raise ArenaError(f"unknown move {move!r}")
    return _BEATS[move]


def outcome(agent_move: str | None, bot_move: str) -> str:
    """Round outcome from the agent's perspective; None forfeits."""
    if bot_move not in MOVES:
        raise ArenaError(f"unknown move {bot_move!r}")
    if agent_move is None:
        return "lose"
    if agent_move not in MOVES:
        raise ArenaError(f"unknown move {agent_move!r}")
    if agent_move == bot_move:
        return "tie"
    return "win" if _BEATS[bot_move] == agent_move else "lose"


class Agent:
    """Move producers that never see any history."""

    def reset(self, seed: int) -> None:
        pass

    def next_move(self, round_index: int) -> str | None:
        raise NotImplementedError


class AlwaysAgent(Agent):
    def __init__(self, move: str) -> None:
        if move not in MOVES:
            raise ArenaError(f"unknown move {move!r}")
        self.move = move

    def next_move(self, round_index: int) -> str | None:
        return self.move


class UniformAgent(Agent):
    def __init__(self) -> None:
        self._rng = CounterRng(0)

    def reset(self, seed: int) -> None:
        self._rng = CounterRng(seed)

    def next_move(self, round_index: int) -> str | None:
        return self._rng.choice(MOVES)


class ExtractorAgent(Agent):
    """Generates a local seed string each round and extracts a move from it."""

    def __init__(
        self,
        extractor: ExtractorSpec | None = None,
        mapper: MapperSpec | None = None,
        string_length: int = 16,
    ) -> None:
        self.extractor = extractor if extractor is not None else SumMod(3)
        self.mapper = mapper if mapper is not None else ModBucket()
        self.string_length = string_length
        self._rng = CounterRng(0)

    def reset(self, seed: int) -> None:
        self._rng = CounterRng(seed)

    def next_move(self, round_index: int) -> str | None:
        seed_string = self._rng.token(self.string_length, _EXTRACT_ALPHABET)
        return extract_action(seed_string, self.extractor, self.mapper, MOVE_TARGET)


class LlmAgent(Agent):
    """Asks a backend for each move; any failure forfeits the round."""

    def __init__(self, backend: Backend, system_id: str = "ssot_rps") -> None:
        self.backend = backend
        self.system_id = system_id

    def next_move(self, round_index: int) -> str | None:
        system_text, _ = render(self.system_id)
        _, user_text = render("rps_user")
        request = ChatRequest(
            system_text=system_text,
            user_text=user_text,
            request_tag=f"rps:{round_index}",
        )
        try:
            response = complete(self.backend, request)
            return parse_pif_answer(response.text, MOVES)
        except (BackendError, ParseError):
            return None


class Bot:
    """Move producers that see the full history of both sides."""

    def __init__(self) -> None:
        self._rng = CounterRng(0)

    def reset(self, seed: int) -> None:
        self._rng = CounterRng(seed)

    def _uniform(self) -> str:
        return self._rng.choice(MOVES)

    def next_move(
        self, agent_history: Sequence[str | None], own_history: Sequence[str]
    ) -> str:
        raise NotImplementedError


class RandomBot(Bot):
    def next_move(self, agent_history, own_history) -> str:
        return self._uniform()


def _most_frequent(moves: Sequence[str]) -> str:
    counts = Counter(moves)
    return max(MOVES, key=lambda m: (counts.get(m, 0), -MOVES.index(m)))


class FrequencyExploiter(Bot):
    def next_move(self, agent_history, own_history) -> str:
        seen = [m for m in agent_history if m in MOVES]
        if not seen:
            return self._uniform()
        return counter_move(_most_frequent(seen))


class MarkovPredictor(Bot):
    """Order-2 prediction on the agent's moves; counters the predicted move."""

    def next_move(self, agent_history, own_history) -> str:
        seen = list(agent_history)
        transitions: Counter = Counter()
        for i in range(len(seen) - 2):
            ctx = (seen[i], seen[i + 1], seen[i + 2])
            if all(m in MOVES for m in ctx):
                transitions[ctx] += 1
        if len(seen) >= 2 and seen[-2] in MOVES and seen[-1] in MOVES:
            key = (seen[-2], seen[-1])
            counts = {
                m: transitions.get((key[0], key[1], m), 0) for m in MOVES
            }
            if any(counts.values()):
                predicted = max(
                    MOVES, key=lambda m: (counts[m], -MOVES.index(m))
                )
                return counter_move(predicted)
        usable = [m for m in seen if m in MOVES]
        if usable:
            return counter_move(_most_frequent(usable))
        return self._uniform()


@dataclass(frozen=True)
class GameRecord:
    agent_move: str | None
    bot_move: str
    outcome: str

    def to_dict(self) -> dict:
        return {
            "agent_move": self.agent_move,
            "bot_move": self.bot_move,
            "outcome": self.outcome,
        }


@dataclass(frozen=True)
class MatchResult:
    games: tuple[GameRecord, ...]
    score: int
    wins: int
    losses: int
    ties: int
    forfeits: int

    def to_dict(self) -> dict:
        return {
            "score": self.score,
            "wins": self.wins,
            "losses": self.losses,
            "ties": self.ties,
            "forfeits": self.forfeits,
            "games": [g.to_dict() for g in self.games],
        }


def play_match(agent: Agent, bot: Bot, games: int, seed: int = 0) -> MatchResult:
    """Play ``games`` rounds; agent and bot streams derive from ``seed``."""
    if games < 1:
        raise ArenaError("games must be >= 1")
    agent.reset(hash64(seed, 1))
    bot.reset(hash64(seed, 2))
    agent_history: list[str | None] = []
    bot_history: list[str] = []
    records = []
    wins = losses = ties = forfeits = 0
    for round_index in range(games):
        bot_move = bot.next_move(tuple(agent_history), tuple(bot_history))
        agent_move = agent.next_move(round_index)
        result = outcome(agent_move, bot_move)
        if agent_move is None:
            forfeits += 1
        if result == "win":
            wins += 1
        elif result == "lose":
            losses += 1
        else:
            ties += 1
        records.append(GameRecord(agent_move, bot_move, result))
        agent_history.append(agent_move)
        bot_history.append(bot_move)
    return MatchResult(
        games=tuple(records),
        score=wins - losses,
        wins=wins,
        losses=losses,
        ties=ties,
        forfeits=forfeits,
    )


def make_agent(kind: str, backend: Backend | None = None) -> Agent:
    if kind == "uniform":
        return UniformAgent()
    if kind == "extractor":
        return ExtractorAgent()
    if kind.startswith("always-"):
        return AlwaysAgent(kind.removeprefix("always-"))
    if kind == "llm":
        if backend is None:
            raise ArenaError("llm agent needs a backend")
        return LlmAgent(backend)
    raise ArenaError(f"unknown agent kind {kind!r}")


def make_bot(kind: str) -> Bot:
    if kind == "random":
        return RandomBot()
    if kind == "frequency":
        return FrequencyExploiter()
    if kind == "markov":
        return MarkovPredictor()
    raise ArenaError(f"unknown bot kind {kind!r}")


def series_summary(results: Sequence[MatchResult]) -> dict:
    """Aggregate statistics over a series of matches."""
    if not results:
        raise ArenaError("no match results")
    scores = [r.score for r in results]
    n = len(scores)
    mean = sum(scores) / n
    if n > 1:
        var = sum((s - mean) ** 2 for s in scores) / (n - 1)
    else:
        var = 0.0
    return {
        "matches": n,
        "mean_score": mean,
        "std_score": var**0.5,
        "min_score": min(scores),
        "max_score": max(scores),
        "total_forfeits": sum(r.forfeits for r in results),
    }
