"""Instance generators: the tight ladder family, random graphs, permutations."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Union

from .bucket import class_index
from .core import Edge, StreamSource

__all__ = [
    "TightExampleConfig",
    "UniformWeights",
    "ExponentialClassWeights",
    "RandomInstanceConfig",
    "tight_instance",
    "tight_instance_opt_weight",
    "random_instance",
    "permute_stream",
]


@dataclass(frozen=True, slots=True)
class TightExampleConfig:
    """Ladder family on which the deterministic variant's ratio is tight.

    The instance has a center edge (x, y) of weight gamma^k, per level
    i < k a pair of center-touching edges of weight gamma^i and a pair
    of outer edges of weight gamma^(i+1) - eps, and two top edges of
    weight gamma^(k+1) - eps; 4k + 3 edges on 4k + 4 vertices.
    """

    gamma: float
    k: int
    eps: float

    def __post_init__(self) -> None:
        if self.gamma < 2:
            raise ValueError(f"gamma must be at least 2, got {self.gamma}")
        if self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if not 0 < self.eps < self.gamma - 1:
            raise ValueError(
                f"eps must lie in (0, gamma-1) to keep weights positive and ordered, "
                f"got {self.eps}")


def tight_instance(config: TightExampleConfig) -> StreamSource:
    """Emit the ladder instance as a stream.

    The order only has to put every class-i center edge before the
    outer edge that conflicts with it at the shared vertex (so each
    class matching ends maximal exactly as intended); the rest of the
    total order is fixed canonically per level for reproducibility.
    """
    gamma, k, eps = config.gamma, config.k, config.eps
    x, y = 0, 1
    edges: list[Edge] = []
    for i in range(k):
        alpha, beta, a, b = 2 + 4 * i, 3 + 4 * i, 4 + 4 * i, 5 + 4 * i
        center_w = gamma ** i
        outer_w = gamma ** (i + 1) - eps
        if class_index(center_w, gamma) != i or class_index(outer_w, gamma) != i:
            raise ValueError(
                f"eps={eps} does not keep level-{i} weights inside class {i} "
                f"(gamma={gamma}); reduce k or increase eps")
        edges.append(Edge(alpha, x, center_w))
        edges.append(Edge(y, beta, center_w))
        edges.append(Edge(alpha, a, outer_w))
        edges.append(Edge(beta, b, outer_w))
    top_w = gamma ** (k + 1) - eps
    if class_index(gamma ** k, gamma) != k or class_index(top_w, gamma) != k:
        raise ValueError(f"top-level weights fall outside class {k}; adjust eps or k")
    edges.append(Edge(x, y, gamma ** k))
    edges.append(Edge(2 + 4 * k, x, top_w))
    edges.append(Edge(3 + 4 * k, y, top_w))
    return StreamSource(4 * k + 4, edges)


def tight_instance_opt_weight(config: TightExampleConfig) -> float:
    """Closed-form optimum of the ladder: all outer and top edges."""
    gamma, k, eps = config.gamma, config.k, config.eps
    return 2.0 * math.fsum(gamma ** i - eps for i in range(1, k + 2))


@dataclass(frozen=True, slots=True)
class UniformWeights:
    """Weights drawn uniformly from [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not 0 < self.lo <= self.hi:
            raise ValueError(f"need 0 < lo <= hi, got [{self.lo}, {self.hi}]")

    def sample(self, rng: random.Random) -> float:
        return rng.uniform(self.lo, self.hi)


@dataclass(frozen=True, slots=True)
class ExponentialClassWeights:
    """Log-uniform weights spanning `depth` geometric classes of ratio gamma."""

    gamma: float
    depth: int

    def __post_init__(self) -> None:
        if not self.gamma > 1:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if self.depth < 1:
            raise ValueError(f"depth must be positive, got {self.depth}")

    def sample(self, rng: random.Random) -> float:
        return self.gamma ** (rng.random() * self.depth)


WeightLaw = Union[UniformWeights, ExponentialClassWeights]


@dataclass(frozen=True, slots=True)
class RandomInstanceConfig:
    """Seeded random graph: n vertices, m distinct edges, weights per law."""

    n: int
    m: int
    weight_law: WeightLaw
    seed: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"need at least 2 vertices, got {self.n}")
        if self.m < 0 or self.m > self.n * (self.n - 1) // 2:
            raise ValueError(
                f"m={self.m} impossible on {self.n} vertices "
                f"(max {self.n * (self.n - 1) // 2})")


def random_instance(config: RandomInstanceConfig) -> StreamSource:
    """Reproducible random stream: same config, same edges in the same order."""
    rng = random.Random(config.seed)
    seen: set[tuple[int, int]] = set()
    edges: list[Edge] = []
    while len(edges) < config.m:
        u = rng.randrange(config.n)
        v = rng.randrange(config.n)
        if u == v:
            continue
        key = (u, v) if u < v else (v, u)
        if key in seen:
            continue
        seen.add(key)
        edges.append(Edge(u, v, config.weight_law.sample(rng)))
    return StreamSource(config.n, edges)


def permute_stream(stream: StreamSource, seed: int) -> StreamSource:
    """Seeded shuffle of the arrival order; same edge multiset."""
    rng = random.Random(seed)
    edges = list(stream.edges)
    rng.shuffle(edges)
    return StreamSource(stream.num_vertices, edges)
