"""Deterministic synthetic problems for tests, demos, and benchmarks."""

import numpy as np

from .data import Dataset, LabeledExample, build_dataset
from .multiclass import MulticlassProblem


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def separable_dataset(
    n: int,
    d: int,
    seed: int,
    planted_margin: float = 0.2,
    margin_spread: float = 0.6,
) -> Dataset:
    """Linearly separable points in the unit ball with a planted witness.

    Every x_i sits at signed distance at least ``planted_margin`` from the
    hyperplane of a random unit witness u, so the maximum margin is at least
    that value (often larger).
    """
    rng = np.random.default_rng(seed)
    u = _unit(rng.standard_normal(d))
    examples = []
    for _ in range(n):
        y = -1 if rng.random() < 0.5 else 1
        dist = planted_margin + margin_spread * rng.random()
        dist = min(dist, 1.0)
        perp = rng.standard_normal(d)
        perp -= (perp @ u) * u
        norm = np.linalg.norm(perp)
        if norm > 0:
            radial = np.sqrt(1.0 - dist**2) * rng.random()
            perp = perp / norm * radial
        else:
            perp = np.zeros(d)
        examples.append(LabeledExample(x=y * dist * u + perp, y=y))
    return build_dataset(examples, normalize=True)


def nonseparable_dataset(n: int, d: int, seed: int) -> Dataset:
    """Random points plus one duplicated input carrying both labels."""
    rng = np.random.default_rng(seed)
    examples = []
    clash = _unit(rng.standard_normal(d)) * 0.8
    examples.append(LabeledExample(x=clash, y=1))
    examples.append(LabeledExample(x=clash.copy(), y=-1))
    for _ in range(max(0, n - 2)):
        x = rng.standard_normal(d)
        x = x / max(1.0, np.linalg.norm(x))
        y = -1 if rng.random() < 0.5 else 1
        examples.append(LabeledExample(x=x, y=y))
    return build_dataset(examples, normalize=True)


def clustered_dataset(n: int, d: int, seed: int, spread: float = 0.25) -> Dataset:
    """Points concentrated around one direction: a large-margin problem."""
    rng = np.random.default_rng(seed)
    u = _unit(rng.standard_normal(d))
    examples = []
    for _ in range(n):
        y = -1 if rng.random() < 0.5 else 1
        noise = rng.standard_normal(d)
        noise -= (noise @ u) * u
        x = _unit(u + spread * _unit(noise) * rng.random()) * (0.8 + 0.2 * rng.random())
        examples.append(LabeledExample(x=y * x, y=y))
    return build_dataset(examples, normalize=True)


def benchmark_dataset() -> Dataset:
    """The bundled comparison problem: n = 64, d = 16, seed 7."""
    return separable_dataset(64, 16, seed=7)


def orthogonal_pair() -> Dataset:
    """Two orthogonal unit rows; maximum margin 1/sqrt(2)."""
    return build_dataset(
        [
            LabeledExample(x=np.array([1.0, 0.0]), y=1),
            LabeledExample(x=np.array([0.0, 1.0]), y=1),
        ]
    )


def opposite_pair() -> Dataset:
    """The same input with both labels; nonseparable, maximum margin 0."""
    return build_dataset(
        [
            LabeledExample(x=np.array([1.0, 0.0]), y=1),
            LabeledExample(x=np.array([1.0, 0.0]), y=-1),
        ]
    )


def single_point() -> Dataset:
    """One example; maximum margin 1."""
    return build_dataset([LabeledExample(x=np.array([1.0, 0.0]), y=1)])


def three_class_problem(per_class: int = 3, seed: int = 3) -> MulticlassProblem:
    """Three well-separated planar clusters, labels 1..3."""
    rng = np.random.default_rng(seed)
    centers = np.array(
        [
            [np.cos(a), np.sin(a)]
            for a in (0.0, 2 * np.pi / 3, 4 * np.pi / 3)
        ]
    ) * 0.85
    xs, labels = [], []
    for cls in range(3):
        for _ in range(per_class):
            x = centers[cls] + 0.08 * rng.standard_normal(2)
            xs.append(x / max(1.0, np.linalg.norm(x)))
            labels.append(cls + 1)
    return MulticlassProblem(xs=np.array(xs), labels=np.array(labels), k=3)
