"""Quantum-inspired encoding: amplitude matrices, collapse rules, rotation gate.

Amplitudes are real and non-negative. Only ``alpha**2`` and ``beta**2``
enter any rule, so phases carry no information here.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateColumn

NORM_TOL = 1e-9
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class QubitPair:
    alpha: float
    beta: float

    def norm(self):
        return math.hypot(self.alpha, self.beta)


def rotate(qubit, delta_theta):
    """Apply the 2x2 rotation gate ``U(delta_theta)`` to one qubit."""
    c, s = math.cos(delta_theta), math.sin(delta_theta)
    return QubitPair(c * qubit.alpha - s * qubit.beta, s * qubit.alpha + c * qubit.beta)


class QuantumMatrix:
    """A ``2 x n`` amplitude matrix, one qubit column per feature.

    Row 0 holds the alphas, row 1 the betas. Instances are immutable: the
    backing array is marked read-only.
    """

    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes, check=True):
        a = np.array(amplitudes, dtype=float)
        if a.ndim != 2 or a.shape[0] != 2:
            raise ValueError(f"expected a 2 x n array, got shape {a.shape}")
        if check:
            dev = np.abs(np.hypot(a[0], a[1]) - 1.0)
            if dev.size and dev.max() > NORM_TOL:
                raise ValueError(f"column norm deviates by {dev.max():.3g}")
        a.setflags(write=False)
        self.amplitudes = a

    @classmethod
    def from_alpha(cls, alpha):
        alpha = np.clip(np.asarray(alpha, dtype=float), 0.0, 1.0)
        return cls(np.vstack([alpha, np.sqrt(1.0 - alpha * alpha)]))

    @classmethod
    def uniform_superposition(cls, n):
        return cls(np.full((2, n), _INV_SQRT2))

    @property
    def alpha(self):
        return self.amplitudes[0]

    @property
    def beta(self):
        return self.amplitudes[1]

    @property
    def n(self):
        return self.amplitudes.shape[1]

    def __len__(self):
        return self.n

    def __getitem__(self, j):
        return QubitPair(float(self.amplitudes[0, j]), float(self.amplitudes[1, j]))

    def __eq__(self, other):
        return isinstance(other, QuantumMatrix) and np.array_equal(self.amplitudes, other.amplitudes)

    def __repr__(self):
        return f"QuantumMatrix(n={self.n})"

    def prob_one(self):
        """Per-feature probability of collapsing to 1 (``beta**2``)."""
        return self.amplitudes[1] ** 2

    def max_norm_deviation(self):
        return float(np.max(np.abs(np.hypot(self.amplitudes[0], self.amplitudes[1]) - 1.0)))


def repair_empty(bits, rng):
    """Set one uniformly chosen bit if ``bits`` has none set."""
    if not bits.any():
        bits = bits.copy()
        bits[rng.integers(bits.size)] = True
    return bits


def collapse_standard(q, rng):
    """Observe ``q``: bit j is 1 iff a uniform draw falls below ``beta_j**2``."""
    return rng.random(q.n) < q.prob_one()


def collapse_threshold(q, rng, theta):
    """Threshold-trick observation.

    Bit j is 1 iff ``draw1_j < beta_j**2`` and ``draw2_j < theta``. The
    first n draws feed the amplitude test, the next n the threshold test.
    An all-zero outcome is repaired by setting one random bit.
    """
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    amp = rng.random(q.n) < q.prob_one()
    gate = rng.random(q.n) < theta
    return repair_empty(amp & gate, rng)


def quantum_mutation(q1, q2, q3, f):
    """DE mutation on amplitudes, then clamp to [0, 1] and renormalize.

    A column that clamps to (0, 0) is reset to the uniform superposition.
    """
    if not q1.n == q2.n == q3.n:
        raise ValueError("quantum matrices differ in dimension")
    raw = q1.amplitudes + f * (q2.amplitudes - q3.amplitudes)
    return QuantumMatrix(_project(raw))


def _project(raw):
    a = np.clip(raw, 0.0, 1.0)
    norm = np.hypot(a[0], a[1])
    dead = norm == 0.0
    if dead.any():
        a[:, dead] = _INV_SQRT2
        norm[dead] = 1.0
    return a / norm


def normalize_column(alpha, beta):
    """Clamp-and-renormalize one column.

    Raises
    ------
    DegenerateColumn
        If the column is (0, 0) after clamping.
    """
    a, b = min(max(alpha, 0.0), 1.0), min(max(beta, 0.0), 1.0)
    norm = math.hypot(a, b)
    if norm == 0.0:
        raise DegenerateColumn("column (0, 0) has no direction")
    return QubitPair(a / norm, b / norm)


def quantum_crossover(qm, qx, cr, randi, rng):
    """Column-wise crossover of mutant ``qm`` into target ``qx``.

    Column j comes from the mutant when its draw is below ``cr`` and
    ``j != randi``; otherwise from the target.
    """
    if qm.n != qx.n:
        raise ValueError("quantum matrices differ in dimension")
    take = rng.random(qm.n) < cr
    take[randi] = False
    return QuantumMatrix(np.where(take, qm.amplitudes, qx.amplitudes), check=False)


class RotationTable:
    """Signed rotation angles keyed by (x_bit, best_bit, x_is_fitter).

    Angles are stored as multiples of pi. A positive angle raises
    ``beta**2`` for first-quadrant qubits, so it pushes the bit toward 1.
    """

    DEFAULT = {
        (0, 0, False): 0.0,
        (0, 0, True): 0.0,
        (0, 1, False): 0.05,
        (0, 1, True): -0.025,
        (1, 0, False): -0.05,
        (1, 0, True): 0.025,
        (1, 1, False): 0.0,
        (1, 1, True): 0.0,
    }

    def __init__(self, entries=None):
        table = dict(self.DEFAULT)
        if entries:
            table.update({(int(x), int(b), bool(f)): float(v) for (x, b, f), v in entries.items()})
        self.entries = table
        # [x_bit, best_bit, fitter] -> radians
        self._grid = np.zeros((2, 2, 2))
        for (x, b, f), v in table.items():
            self._grid[x, b, int(f)] = v * math.pi

    @classmethod
    def from_file(cls, path):
        """Load ``x_bit,best_bit,x_is_fitter,angle_pi`` rows (header required)."""
        entries = {}
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                fitter = row["x_is_fitter"].strip().lower() in ("1", "true", "yes")
                key = (int(row["x_bit"]), int(row["best_bit"]), fitter)
                entries[key] = float(row["angle_pi"])
        if len(entries) != 8:
            raise ValueError(f"rotation table needs 8 rows, found {len(entries)}")
        return cls(entries)

    def to_file(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x_bit", "best_bit", "x_is_fitter", "angle_pi"])
            for (x, b, f), v in sorted(self.entries.items()):
                w.writerow([x, b, int(f), repr(v)])

    def angle(self, x_bit, best_bit, x_is_fitter):
        return float(self._grid[int(x_bit), int(best_bit), int(bool(x_is_fitter))])

    def angles(self, x_bits, best_bits, x_is_fitter):
        x = np.asarray(x_bits, dtype=np.intp)
        b = np.asarray(best_bits, dtype=np.intp)
        return self._grid[x, b, int(bool(x_is_fitter))]


DEFAULT_ROTATION_TABLE = RotationTable()


def lookup_rotation_angle(x_bit, best_bit, x_is_fitter, table=DEFAULT_ROTATION_TABLE):
    """Signed rotation angle in radians from the lookup table."""
    return table.angle(x_bit, best_bit, x_is_fitter)


def rotate_toward(q, x_bits, best_bits, x_is_fitter, table=DEFAULT_ROTATION_TABLE):
    """Rotate every qubit of ``q`` by its table angle.

    Angles are limited so each qubit stays in the first quadrant; without
    the limit a large rotation would flip the sign of an amplitude and
    move ``beta**2`` against the intended direction.
    """
    phi = np.arctan2(q.beta, q.alpha)
    delta = table.angles(x_bits, best_bits, x_is_fitter)
    delta = np.clip(phi + delta, 0.0, math.pi / 2) - phi
    c, s = np.cos(delta), np.sin(delta)
    a, b = q.alpha, q.beta
    out = np.vstack([c * a - s * b, s * a + c * b])
    return QuantumMatrix(np.clip(out, 0.0, 1.0), check=False)
