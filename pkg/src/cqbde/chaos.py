"""Uniform and chaotic random sources.

The chaotic source is the logistic map ``d <- lam * d * (1 - d)``. At
``lam = 4`` the map is fully chaotic; a burn-in discards the first
iterates so that emitted numbers come from the settled chaotic regime.
"""

import math

import numpy as np

from .errors import DegenerateSeed

DEFAULT_LAMBDA = 4.0
DEFAULT_BURN_IN = 5000
LYAPUNOV_TRANSIENT = 100

# seeds that land on a fixed point of the lam=4 map within two steps
DEGENERATE_SEEDS = (0.0, 0.25, 0.5, 0.75, 1.0)

_BELOW_ONE = np.nextafter(1.0, 0.0)


def logistic_step(state, lam=DEFAULT_LAMBDA):
    """One iterate of the logistic map. Works on floats and arrays."""
    return lam * state * (1.0 - state)


class LogisticMapStream:
    """Stateful logistic-map generator.

    Parameters
    ----------
    state : float
        Initial iterate ``d_0`` in [0, 1].
    lam : float
        Control parameter in [0, 4].
    burn_in : int
        Number of iterates discarded before the first emission.

    Notes
    -----
    Construction does not validate the seed against the degenerate set;
    use :func:`make_lyapunov_guided_stream` for that.
    """

    def __init__(self, state, lam=DEFAULT_LAMBDA, burn_in=0):
        if not 0.0 <= lam <= 4.0:
            raise ValueError(f"lambda must lie in [0, 4], got {lam}")
        if not 0.0 <= state <= 1.0:
            raise ValueError(f"state must lie in [0, 1], got {state}")
        if burn_in < 0:
            raise ValueError("burn_in must be non-negative")
        self.lam = float(lam)
        self.seed_state = float(state)
        self.burn_in = int(burn_in)
        self.state = float(state)
        self.steps_emitted = 0
        self._burned = False

    def _burn(self):
        lam, d = self.lam, self.state
        for _ in range(self.burn_in):
            d = lam * d * (1.0 - d)
        self.state = d
        self._burned = True

    def next(self):
        if not self._burned:
            self._burn()
        d = self.lam * self.state * (1.0 - self.state)
        self.state = d
        self.steps_emitted += 1
        return d

    def take(self, count):
        """Emit the next ``count`` iterates as an array."""
        if not self._burned:
            self._burn()
        lam, d = self.lam, self.state
        out = [0.0] * count
        for i in range(count):
            d = lam * d * (1.0 - d)
            out[i] = d
        self.state = d
        self.steps_emitted += count
        return np.array(out, dtype=float)

    def __iter__(self):
        return self

    def __next__(self):
        return self.next()


def make_lyapunov_guided_stream(seed_state, lam=DEFAULT_LAMBDA, burn_in=DEFAULT_BURN_IN):
    """Build a stream whose first emission is iterate ``burn_in + 1``.

    Raises
    ------
    DegenerateSeed
        If ``seed_state`` is one of 0, 0.25, 0.5, 0.75, 1.
    """
    seed_state = float(seed_state)
    if seed_state in DEGENERATE_SEEDS or not 0.0 < seed_state < 1.0:
        raise DegenerateSeed(f"seed {seed_state} degenerates to a fixed point")
    return LogisticMapStream(seed_state, lam=lam, burn_in=burn_in)


def estimate_lyapunov(stream, horizon=1_000_000, transient=LYAPUNOV_TRANSIENT):
    """Time-average of ``ln|lam * (1 - 2 d_t)|`` along the stream's orbit.

    The first ``transient`` iterates are skipped before averaging. An orbit
    that passes exactly through the critical point ``d = 0.5`` (at any
    point, transient included) has a zero derivative product and is
    reported as ``-inf``.
    """
    if horizon < 1000:
        raise ValueError("horizon must be at least 1000")
    lam = stream.lam
    if stream.state == 0.5:
        return -math.inf
    head = stream.take(transient)
    if np.any(head == 0.5):
        return -math.inf
    orbit = stream.take(horizon)
    deriv = np.abs(lam * (1.0 - 2.0 * orbit))
    if np.any(deriv == 0.0):
        return -math.inf
    return float(np.mean(np.log(deriv)))


def histogram_counts(values, bins=50):
    """Counts per uniform bin over [0, 1]."""
    counts, _ = np.histogram(np.asarray(values, dtype=float), bins=bins, range=(0.0, 1.0))
    return counts


class RandomSource:
    """Base class for the random draws consumed by the search operators.

    Subclasses implement :meth:`_draw`; every derived draw (integers,
    permutations, samples) is computed from it so any source can drive
    any operator.
    """

    kind = "abstract"

    def _draw(self, count):
        raise NotImplementedError

    def random(self, size=None):
        """Draw(s) in [0, 1)."""
        if size is None:
            return float(self._draw(1)[0])
        size = tuple(np.atleast_1d(size))
        count = int(np.prod(size))
        return self._draw(count).reshape(size)

    def integers(self, high, size=None):
        """Integers uniform over ``[0, high)``."""
        u = self.random(size)
        if size is None:
            return min(int(u * high), high - 1)
        return np.minimum((u * high).astype(np.int64), high - 1)

    def permutation(self, n):
        return np.argsort(self.random(n), kind="stable")

    def distinct(self, n, k, exclude=None):
        """``k`` distinct indices from ``range(n)`` minus ``exclude``."""
        pool = np.arange(n)
        if exclude is not None:
            pool = pool[pool != exclude]
        if k > pool.size:
            raise ValueError(f"cannot draw {k} distinct values from {pool.size}")
        return pool[self.permutation(pool.size)[:k]]


class UniformSource(RandomSource):
    """PCG64-backed uniform source."""

    kind = "uniform"

    def __init__(self, seed=None):
        self.seed = seed
        self.generator = np.random.default_rng(seed)

    def _draw(self, count):
        return self.generator.random(count)

    def spawn(self, n):
        """``n`` independent child sources."""
        return [UniformSource(g) for g in self.generator.spawn(n)]


class ChaoticSource(RandomSource):
    """Draws taken from a logistic-map stream, clipped into [0, 1)."""

    kind = "chaotic"

    def __init__(self, stream):
        self.stream = stream

    @classmethod
    def from_seed(cls, seed_state, lam=DEFAULT_LAMBDA, burn_in=DEFAULT_BURN_IN):
        return cls(make_lyapunov_guided_stream(seed_state, lam, burn_in))

    def _draw(self, count):
        return np.minimum(self.stream.take(count), _BELOW_ONE)


class SequenceSource(RandomSource):
    """Replays a fixed sequence of draws; raises when exhausted."""

    kind = "sequence"

    def __init__(self, values):
        self.values = np.asarray(values, dtype=float)
        self.position = 0

    def _draw(self, count):
        end = self.position + count
        if end > self.values.size:
            raise IndexError("scripted draw sequence exhausted")
        out = self.values[self.position:end]
        self.position = end
        return out.copy()


def draw_chaotic_seed(source):
    """A logistic-map seed in (0, 1) outside the degenerate set."""
    while True:
        s = source.random()
        if 0.0 < s < 1.0 and s not in DEGENERATE_SEEDS:
            return s
