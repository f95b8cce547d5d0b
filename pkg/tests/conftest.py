import numpy as np
import pytest


class RandomPlayer:
    """Uniform over legal actions; bids with probability 1/2."""

    def bid(self, obs, rng):
        return bool(rng.random() < 0.5)

    def pickup(self, obs, rng):
        return int(rng.choice(obs.legal))

    declare = discard = pickup

    def play(self, obs, rng):
        return int(rng.choice(obs.legal))


@pytest.fixture
def random_player():
    return RandomPlayer()


def random_games(n, seed=0):
    from skatlab.engine import deal
    from skatlab.game import play_game
    p = RandomPlayer()
    return [play_game(deal(seed + i), [p, p, p]) for i in range(n)]


@pytest.fixture(scope="session")
def game_corpus():
    return random_games(300)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


# acceptance results, printed together at the end of the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
