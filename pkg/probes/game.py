"""
Choquet game on the injection tree.

Beta opens inside alpha's last neighbourhood [t, oo)_q (strict extensions of
t whose new labels are all >= q) with a pair (t', p). Alpha answers with
r = the n-th element of N minus the range of t' and q' = max(p, r + 1), which
keeps every chosen r out of every range beta can ever play.
"""
import logging

import numpy as np

from utils.exceptions import IllegalMove, ParamOutOfRange
from .domain import GameState

logger = logging.getLogger(__name__)

RANDOM_WINDOW = 10
PACKING_WINDOW = 3


def _available(state, low, high):
    taken = set(state.current)
    return [label for label in range(low, high) if label not in taken]


def _smallest_available(state, low):
    taken = set(state.current)
    label = low
    while label in taken:
        label += 1
    return label


def random_beta(state, rng):
    """Extend by one to three free labels from [q, q + 10)"""
    free = _available(state, state.q, state.q + RANDOM_WINDOW) or [_smallest_available(state, state.q)]
    size = int(rng.integers(1, 4))
    chosen = rng.choice(free, size=min(size, len(free)), replace=False)
    return state.current + tuple(int(label) for label in chosen), state.q + int(rng.integers(0, 3))


def greedy_beta(state, rng):
    """The smallest free label, keeping q where it is"""
    return state.current + (_smallest_available(state, state.q),), state.q


def adversarial_beta(state, rng):
    """Packs every free label of [q, q + 3) to exhaust small labels early"""
    free = _available(state, state.q, state.q + PACKING_WINDOW)
    if not free:
        free = [_smallest_available(state, state.q)]
    return state.current + tuple(free), state.q


BETA_STRATEGIES = {
    'random': random_beta,
    'greedy': greedy_beta,
    'adversarial': adversarial_beta,
}


def check_move(state: GameState, extension, p):
    """Raise IllegalMove unless (extension, p) lies in [t, oo)_q with p >= q"""
    extension = tuple(extension)
    n = len(state.current)
    witness = {'round': state.round, 'current': list(state.current), 'q': state.q, 'move': list(extension), 'p': p}
    if len(extension) <= n or extension[:n] != state.current:
        raise IllegalMove('Beta must play a strict extension of the current injection', witness=witness)
    if len(set(extension)) != len(extension) or any(label < 0 for label in extension):
        raise IllegalMove('Beta must play an injection into the naturals', witness=witness)
    if any(label < state.q for label in extension[n:]):
        raise IllegalMove(f'New labels must be at least q={state.q}', witness=witness)
    if p < state.q:
        raise IllegalMove(f'Beta must choose p >= q={state.q}', witness=witness)
    return extension


def nth_missing(n, taken) -> int:
    """The n-th element (from 0) of N minus `taken`"""
    label = -1
    for _ in range(n + 1):
        label += 1
        while label in taken:
            label += 1
    return label


def play_round(state: GameState, extension, p) -> GameState:
    extension = check_move(state, extension, p)
    r = nth_missing(state.round, set(extension))
    q = max(p, r + 1)
    state.current = extension
    state.ranges.append(frozenset(extension))
    state.r_list.append(r)
    state.last_beta = (extension, p)
    state.trace.append({'round': state.round, 'beta': list(extension), 'p': p, 'r': r, 'q': q})
    state.q = q
    state.round += 1
    logger.debug(f'Round {state.round}: beta {list(extension)} p={p}, alpha r={r} q={q}')
    return state


def choquet_game(rounds: int, beta_strategy='random', seed: int = 0) -> GameState:
    """
    Play `rounds` rounds of alpha's strategy against a named or callable beta
    strategy; the state is checked for the r-list invariant after every round.
    """
    if rounds < 0:
        raise ParamOutOfRange(f'choquet_game needs rounds >= 0, got {rounds}')
    if callable(beta_strategy):
        beta = beta_strategy
    else:
        try:
            beta = BETA_STRATEGIES[beta_strategy]
        except KeyError:
            raise ParamOutOfRange(
                f'Unknown beta strategy "{beta_strategy}". Choose from: {", ".join(sorted(BETA_STRATEGIES))}',
                witness=beta_strategy,
            )

    rng = np.random.default_rng(seed)
    state = GameState()
    if rounds == 0:
        state.verdict = 'VACUOUS'
        return state

    for _ in range(rounds):
        extension, p = beta(state, rng)
        play_round(state, extension, p)
        if not state.invariant_holds():
            state.verdict = 'FAIL'
            logger.error(f'Game invariant broken at round {state.round}: r-list {state.r_list}')
            return state

    state.verdict = 'PASS'
    logger.info(f'Choquet game: {rounds} rounds against {getattr(beta, "__name__", beta_strategy)}, seed {seed}: PASS')
    return state


def replay_game(trace) -> GameState:
    """Replay beta's recorded moves; the alpha answers are recomputed"""
    moves = iter([(tuple(entry['beta']), entry['p']) for entry in trace])

    def recorded(state, rng):
        return next(moves)

    return choquet_game(len(trace), recorded)
