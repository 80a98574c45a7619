"""Reduction of k-class problems to the binary machinery.

Each example (x_i, c_i) spawns k-1 fake binary examples, one per wrong label
j != c_i, whose input is the flattening of the rank-one matrix
x_i (e_{c_i} - e_j)^T / sqrt(2) with label +1.  The flattening is fixed to
column-major so traces and the two-column sparse updates are reproducible.
The multiclass margin of a weight matrix U then equals sqrt(2) times the
binary margin of its flattening on the reduced dataset.
"""

from dataclasses import dataclass

import numpy as np

from .data import DataError, Dataset, LabeledExample, build_dataset

SQRT2 = float(np.sqrt(2.0))


@dataclass(frozen=True)
class MulticlassProblem:
    xs: np.ndarray       # (N, d) inputs
    labels: np.ndarray   # (N,) integers in 1..k
    k: int

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        labels = np.asarray(self.labels, dtype=int)
        if xs.ndim != 2 or xs.shape[0] < 1:
            raise DataError("inputs must form a nonempty (N, d) matrix")
        if self.k < 2:
            raise DataError("k must be >= 2")
        if labels.shape != (xs.shape[0],):
            raise DataError("labels must match the number of inputs")
        if labels.min() < 1 or labels.max() > self.k:
            raise DataError(
                f"label out of range: values must lie in 1..{self.k}"
            )
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "labels", labels)

    @property
    def count(self) -> int:
        return self.xs.shape[0]

    @property
    def d(self) -> int:
        return self.xs.shape[1]


def flatten_cm(m: np.ndarray) -> np.ndarray:
    """Column-major flattening: entry (r, c) of a d x k matrix -> index c*d + r."""
    return np.reshape(m, -1, order="F")


def unflatten_cm(w: np.ndarray, d: int, k: int) -> np.ndarray:
    return np.reshape(w, (d, k), order="F")


@dataclass(frozen=True)
class FlattenedReduction:
    dataset: Dataset                  # n = N(k-1) rows in dimension d*k
    pairs: tuple                      # row r -> (example index, wrong label), both 0-based/1-based as given
    d: int
    k: int

    def row_index(self, example: int, wrong_label: int) -> int:
        return self.pairs.index((example, wrong_label))


def fake_example(x: np.ndarray, correct: int, wrong: int, k: int) -> np.ndarray:
    """Flattened x (e_correct - e_wrong)^T / sqrt(2); labels are 1-based."""
    d = x.shape[0]
    m = np.zeros((d, k))
    m[:, correct - 1] = x / SQRT2
    m[:, wrong - 1] = -x / SQRT2
    return flatten_cm(m)


def reduce_to_binary(problem: MulticlassProblem) -> FlattenedReduction:
    """Build the N(k-1)-row binary dataset, wrong labels ascending per example.

    The fake inputs carry label +1 ("the correct class should outscore the
    wrong one"), so the stored signed rows are their negations, matching the
    binary convention.  Including the correct label itself would add a zero
    row and force every margin to zero, so it is excluded by construction.
    """
    examples = []
    pairs = []
    for i in range(problem.count):
        c = int(problem.labels[i])
        for j in range(1, problem.k + 1):
            if j == c:
                continue
            examples.append(
                LabeledExample(x=fake_example(problem.xs[i], c, j, problem.k), y=1)
            )
            pairs.append((i, j))
    ds = build_dataset(examples, normalize=False)
    return FlattenedReduction(dataset=ds, pairs=tuple(pairs), d=problem.d, k=problem.k)


def multiclass_margin(U: np.ndarray, problem: MulticlassProblem) -> float:
    """min_i min_{c != c_i} (x_i^T U e_{c_i} - x_i^T U e_c) / ||U||_F, 0 at U = 0."""
    U = np.asarray(U, dtype=float)
    if U.shape != (problem.d, problem.k):
        raise ValueError(f"U has shape {U.shape}, expected ({problem.d}, {problem.k})")
    norm = float(np.linalg.norm(U))
    if norm == 0.0:
        return 0.0
    scores = problem.xs @ U  # (N, k)
    worst = np.inf
    for i in range(problem.count):
        correct = scores[i, problem.labels[i] - 1]
        for c in range(problem.k):
            if c == problem.labels[i] - 1:
                continue
            worst = min(worst, correct - scores[i, c])
    return float(worst) / norm


@dataclass
class ColumnSparseState:
    """Weight and momentum matrices kept as U = P + a * Ghat, g = c * Ghat.

    One adaptive-sampling step touches only the two columns of P and Ghat
    named by the sampled (example, wrong label) pair, plus the scalars; the
    reconstructed U matches the dense flattened trajectory.
    """

    P: np.ndarray
    Ghat: np.ndarray
    a: float
    c: float
    t: int

    @property
    def U(self) -> np.ndarray:
        return self.P + self.a * self.Ghat

    @property
    def G(self) -> np.ndarray:
        return self.c * self.Ghat


def init_column_sparse_state(d: int, k: int) -> ColumnSparseState:
    return ColumnSparseState(
        P=np.zeros((d, k)), Ghat=np.zeros((d, k)), a=0.0, c=0.0, t=0
    )


def sparse_column_update(
    state: ColumnSparseState,
    problem: MulticlassProblem,
    example: int,
    wrong_label: int,
    beta: float,
    theta: float,
) -> ColumnSparseState:
    """Apply one sampled primal update through the fake row pi(example, wrong_label)."""
    correct = int(problem.labels[example])
    if wrong_label == correct or not (1 <= wrong_label <= problem.k):
        raise ValueError(f"invalid sampled pair ({example}, {wrong_label})")
    col_c, col_j = correct - 1, wrong_label - 1
    # s is the signed row -(fake input) restricted to its two nonzero columns
    x = problem.xs[example] / SQRT2
    s_c, s_j = -x, x
    P, Ghat, a, c = state.P, state.Ghat, state.a, state.c
    if beta == 0.0:
        # momentum vanishes: U -= theta * s
        c = 0.0
        P[:, col_c] -= theta * s_c
        P[:, col_j] -= theta * s_j
    elif c == 0.0:
        # momentum restarts from s alone; fold the stale Ghat into P
        if a != 0.0:
            P += a * Ghat
            a = 0.0
        Ghat[:] = 0.0
        Ghat[:, col_c] = s_c
        Ghat[:, col_j] = s_j
        c = beta
        P[:, col_c] -= theta * (1.0 + beta) * s_c
        P[:, col_j] -= theta * (1.0 + beta) * s_j
    else:
        coeff = a / c + theta
        P[:, col_c] -= coeff * s_c
        P[:, col_j] -= coeff * s_j
        Ghat[:, col_c] += s_c / c
        Ghat[:, col_j] += s_j / c
        c = beta * c
        a = a - theta * c
    return ColumnSparseState(P=P, Ghat=Ghat, a=a, c=c, t=state.t + 1)
