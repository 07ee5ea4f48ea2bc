"""
Scenario Generators

Runs for demos, tests and the verification sweeps:

- gen_lower_bound_run: the tightness construction. k-1 loners hear only
  themselves, every other process hears a single hub. Satisfies the
  k-sources predicate and violates it for k-1.
- gen_complete: everybody hears everybody, forever
- gen_two_roots: six processes whose stable skeleton has two root
  components feeding a common sink, reached after a shrinking prefix
- gen_random_psrcs: seeded sampler of runs that satisfy the predicate for k
- gen_arbitrary: seeded unconstrained runs (no predicate)

Every random generator is deterministic in its seed.
"""
import logging
import random
from typing import Iterable, List, Optional, Set

from django.conf import settings
from django.db import models

from rounds.graphs import Edge, RoundGraph, RunSpec
from rounds.services import complete_run
from .exceptions import GenerationFailed, ParameterOutOfRange
from .services import p_srcs_holds

logger = logging.getLogger(__name__)

# Probability of a stray extra edge in a random tail
TAIL_NOISE_PROB = 0.1


class GeneratorKind(models.TextChoices):
    LOWER_BOUND = 'lower-bound', 'Lower-bound construction'
    COMPLETE = 'complete', 'Complete graph'
    RANDOM = 'random', 'Random k-sources run'
    TWO_ROOTS = 'two-roots', 'Two root components'
    ARBITRARY = 'arbitrary', 'Arbitrary random run'


def _require(condition: bool, parameter: str, value, expected: str) -> None:
    if not condition:
        raise ParameterOutOfRange(parameter, value, expected)


def _require_size(n: int) -> None:
    """n in [1, KSET_MAX_PROCESSES], the scenario reader's limit."""
    limit = getattr(settings, 'KSET_MAX_PROCESSES', 16)
    _require(1 <= n <= limit, 'n', n, f'1 <= n <= {limit}')


def gen_lower_bound_run(
    n: int,
    k: int,
    loner_ids: Optional[Iterable[int]] = None,
    hub: Optional[int] = None,
) -> RunSpec:
    """
    Constant run: self-loops everywhere plus (hub -> p) for every p outside
    the loner set. Defaults: loners 0..k-2, hub k-1.

    Raises:
        ParameterOutOfRange: n above KSET_MAX_PROCESSES, k not in (1, n),
            wrong loner count, ids out of range, or the hub among the loners
    """
    _require_size(n)
    _require(1 < k < n, 'k', k, f'1 < k < n (n={n})')
    loners: Set[int] = set(range(k - 1)) if loner_ids is None else set(loner_ids)
    if hub is None:
        hub = k - 1
    _require(len(loners) == k - 1, 'loner_ids', sorted(loners), f'exactly {k - 1} processes')
    _require(all(0 <= p < n for p in loners), 'loner_ids', sorted(loners), f'ids in [0, {n})')
    _require(0 <= hub < n, 'hub', hub, f'an id in [0, {n})')
    _require(hub not in loners, 'hub', hub, 'a process outside loner_ids')

    edges = [(hub, p) for p in range(n) if p not in loners]
    return RunSpec.constant(RoundGraph.from_edges(n, edges))


def gen_complete(n: int) -> RunSpec:
    _require_size(n)
    return complete_run(n)


def gen_two_roots() -> RunSpec:
    """
    Stable skeleton: 0<->1 and 2->3->4->2 are the root components, and
    process 5 hears 1 and 4. Rounds 1-3 carry extra edges that disappear
    one after another, so the skeleton settles at round 4.
    """
    n = 6
    stable: List[Edge] = [(0, 1), (1, 0), (2, 3), (3, 4), (4, 2), (1, 5), (4, 5)]
    round_extras = (
        [(5, 0), (3, 5), (0, 2), (2, 1)],
        [(5, 0), (3, 5), (0, 2)],
        [(5, 0)],
    )
    prefix = tuple(RoundGraph.from_edges(n, stable + extras) for extras in round_extras)
    return RunSpec(n=n, prefix=prefix, tail=RoundGraph.from_edges(n, stable))


def _random_pairs(rng: random.Random, n: int, probability: float) -> Set[Edge]:
    return {(q, p) for q in range(n) for p in range(n) if q != p and rng.random() < probability}


def _split_into_groups(rng: random.Random, n: int, groups: int) -> List[List[int]]:
    order = list(range(n))
    rng.shuffle(order)
    cuts = sorted(rng.sample(range(1, n), groups - 1))
    return [order[a:b] for a, b in zip([0] + cuts, cuts + [n])]


def gen_random_psrcs(n: int, k: int, seed: int, prefix_len: int = 3) -> RunSpec:
    """
    Sample a run satisfying the k-sources predicate.

    The tail splits the processes into at most k groups and gives each group
    a source that every member hears. Any k + 1 processes then put two members
    into one group, whose source is their 2-source. Prefix rounds add random
    edges on top of the tail, some of them lingering for several rounds
    before they vanish. Each sample is re-checked exhaustively and resampled
    on failure.

    Raises:
        ParameterOutOfRange: n above KSET_MAX_PROCESSES, k not in [1, n) or
            negative prefix_len
        GenerationFailed: no admissible sample within KSET_RANDOM_MAX_ATTEMPTS
    """
    _require_size(n)
    _require(1 <= k < n, 'k', k, f'1 <= k < n (n={n})')
    _require(prefix_len >= 0, 'prefix_len', prefix_len, 'prefix_len >= 0')
    max_attempts = getattr(settings, 'KSET_RANDOM_MAX_ATTEMPTS', 200)
    extra_prob = getattr(settings, 'KSET_RANDOM_EXTRA_EDGE_PROB', 0.3)
    rng = random.Random(f'psrcs:{n}:{k}:{seed}:{prefix_len}')

    for attempt in range(1, max_attempts + 1):
        tail_edges: Set[Edge] = set()
        for group in _split_into_groups(rng, n, rng.randint(1, k)):
            source = rng.randrange(n)
            tail_edges.update((source, member) for member in group)
        tail_edges |= _random_pairs(rng, n, TAIL_NOISE_PROB)

        lingering = {
            edge: rng.randint(1, prefix_len)
            for edge in sorted(_random_pairs(rng, n, extra_prob) - tail_edges)
        } if prefix_len else {}

        prefix = []
        for r in range(1, prefix_len + 1):
            edges = set(tail_edges)
            edges.update(edge for edge, last in lingering.items() if r <= last)
            edges |= _random_pairs(rng, n, extra_prob / 2)
            prefix.append(RoundGraph.from_edges(n, edges))

        run = RunSpec(n=n, prefix=tuple(prefix), tail=RoundGraph.from_edges(n, tail_edges))
        if p_srcs_holds(run, k).holds:
            if attempt > 1:
                logger.debug(f'gen_random_psrcs(n={n}, k={k}, seed={seed}) accepted attempt {attempt}')
            return run
        logger.warning(f'gen_random_psrcs(n={n}, k={k}, seed={seed}): attempt {attempt} rejected')

    raise GenerationFailed(max_attempts, n, k)


def gen_arbitrary(n: int, seed: int, prefix_len: int = 3, density: float = 0.3) -> RunSpec:
    """
    Unconstrained random run. Prefix rounds draw non-tail edges with
    probability density and keep each tail edge with probability
    1 - density / 2, so the skeleton may lose edges the tail has.
    """
    _require_size(n)
    _require(prefix_len >= 0, 'prefix_len', prefix_len, 'prefix_len >= 0')
    _require(0.0 <= density <= 1.0, 'density', density, '0 <= density <= 1')
    rng = random.Random(f'arbitrary:{n}:{seed}:{prefix_len}:{density}')

    tail_edges = _random_pairs(rng, n, density)
    prefix = []
    for _ in range(prefix_len):
        edges = {e for e in sorted(tail_edges) if rng.random() < 1 - density / 2}
        edges |= _random_pairs(rng, n, density) - tail_edges
        prefix.append(RoundGraph.from_edges(n, edges))
    return RunSpec(n=n, prefix=tuple(prefix), tail=RoundGraph.from_edges(n, tail_edges))
