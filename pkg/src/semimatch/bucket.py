"""One-pass bucketed weighted matching.

Edges are partitioned into geometric weight classes
``[phi*gamma^i, phi*gamma^(i+1))`` with ``phi = gamma^delta``; a maximal
matching is kept per class under consideration, classes far below the
running maximum weight are pruned, and a greedy scan over the surviving
classes (highest first) produces the final matching.  Three variants
share the pipeline: deterministic (delta = 0), shifted (fixed delta),
and an ensemble of q shifted copies on a delta grid, best one wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import Edge, Matching, StreamSource

__all__ = [
    "BucketConfig",
    "BucketState",
    "class_index",
    "process_edge",
    "prune_classes",
    "finalize",
    "run_deterministic",
    "run_shifted",
    "choose_q",
    "run_ensemble",
    "expected_rounded_weight",
    "stream_bucket_run",
    "ensemble_states",
    "delta_grid",
    "deterministic_ratio_bound",
    "randomized_ratio_bound",
    "ensemble_ratio_bound",
    "minimize_randomized_bound",
]


@dataclass(frozen=True, slots=True)
class BucketConfig:
    """Parameters of one bucketed run."""

    gamma: float
    epsilon: float
    num_vertices: int
    delta: float = 0.0

    def __post_init__(self) -> None:
        if not self.gamma > 1:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 <= self.delta < 1:
            raise ValueError(f"delta must lie in [0, 1), got {self.delta}")
        if self.num_vertices < 1:
            raise ValueError("num_vertices must be positive")

    @property
    def phi(self) -> float:
        return self.gamma ** self.delta


def class_index(w: float, gamma: float, delta: float = 0.0) -> int:
    """Index i of the weight class [gamma^(i+delta), gamma^(i+1+delta)) holding w.

    The floor of the logarithm is corrected against the actual floating
    powers so the half-open containment holds exactly; a weight equal to
    a class floor belongs to that class.
    """
    if not w > 0:
        raise ValueError(f"weight must be positive, got {w}")
    if not gamma > 1:
        raise ValueError(f"gamma must exceed 1, got {gamma}")
    i = math.floor(math.log(w) / math.log(gamma) - delta)
    while gamma ** (i + delta) > w:
        i -= 1
    while gamma ** (i + 1 + delta) <= w:
        i += 1
    return i


class _ClassSlot:
    """Maximal matching of one weight class with O(1) conflict checks."""

    __slots__ = ("edges", "cover")

    def __init__(self) -> None:
        self.edges: list[Edge] = []
        self.cover: set[int] = set()

    def conflicts(self, edge: Edge) -> bool:
        return edge.u in self.cover or edge.v in self.cover

    def add(self, edge: Edge) -> None:
        self.edges.append(edge)
        self.cover.add(edge.u)
        self.cover.add(edge.v)


class BucketState:
    """Streaming state: running w_max, class window, per-class matchings."""

    def __init__(self, config: BucketConfig):
        self.config = config
        self.w_max = 0.0
        self.window: Optional[tuple[int, int]] = None
        self.matchings: dict[int, _ClassSlot] = {}
        self.stored_edge_count = 0
        self.stored_edge_peak = 0
        self.edges_processed = 0

    @property
    def threshold(self) -> float:
        """Discard threshold 2*epsilon*w_max/n below which classes die."""
        cfg = self.config
        return 2.0 * cfg.epsilon * self.w_max / cfg.num_vertices

    def prune(self) -> None:
        """Recompute the class window for the current w_max and drop dead classes.

        The window spans the classes whose interval intersects
        [threshold, w_max]; matchings of classes entirely below the
        threshold are deleted.  A no-op when w_max has not changed.
        """
        if self.w_max <= 0:
            return
        cfg = self.config
        hi = class_index(self.w_max, cfg.gamma, cfg.delta)
        # The class containing the threshold is the lowest whose interval
        # still intersects [threshold, w_max]; clamping keeps the edge
        # that raised w_max from discarding itself under extreme epsilon.
        lo = min(class_index(self.threshold, cfg.gamma, cfg.delta), hi)
        self.window = (lo, hi)
        for i in [i for i in self.matchings if i < lo]:
            self.stored_edge_count -= len(self.matchings[i].edges)
            del self.matchings[i]

    def process(self, edge: Edge) -> None:
        """Classify one arriving edge; store it or discard it forever."""
        self.edges_processed += 1
        if edge.weight > self.w_max:
            self.w_max = edge.weight
            self.prune()
        lo, hi = self.window  # type: ignore[misc]  # set once w_max > 0
        cfg = self.config
        i = class_index(edge.weight, cfg.gamma, cfg.delta)
        if i < lo or i > hi:
            return
        slot = self.matchings.get(i)
        if slot is None:
            slot = self.matchings[i] = _ClassSlot()
        if slot.conflicts(edge):
            return
        slot.add(edge)
        self.stored_edge_count += 1
        if self.stored_edge_count > self.stored_edge_peak:
            self.stored_edge_peak = self.stored_edge_count

    def finalize(self, by_weight: bool = False) -> Matching:
        """Greedy matching over the stored edges, highest class first.

        Within one class edges keep insertion order.  ``by_weight``
        switches to an exact-weight ordering for experimentation; it is
        off by default to preserve the class-order behavior.
        """
        if by_weight:
            pool = sorted(
                (e for slot in self.matchings.values() for e in slot.edges),
                key=lambda e: (-e.weight, e.key))
        else:
            pool = [e for i in sorted(self.matchings, reverse=True)
                    for e in self.matchings[i].edges]
        chosen: list[Edge] = []
        covered: set[int] = set()
        for e in pool:
            if e.u in covered or e.v in covered:
                continue
            chosen.append(e)
            covered.add(e.u)
            covered.add(e.v)
        return Matching.from_edges(chosen)


def process_edge(state: BucketState, edge: Edge) -> BucketState:
    """Feed one edge through the state; returns the same (mutated) state."""
    state.process(edge)
    return state


def prune_classes(state: BucketState) -> BucketState:
    """Recompute the window and drop dead classes; idempotent."""
    state.prune()
    return state


def finalize(state: BucketState, by_weight: bool = False) -> Matching:
    """Greedy single matching from a state whose stream is exhausted."""
    return state.finalize(by_weight=by_weight)


def stream_bucket_run(stream: StreamSource, config: BucketConfig) -> BucketState:
    """Fold a whole stream through a fresh state (one pass)."""
    state = BucketState(config)
    for edge in stream:
        state.process(edge)
    return state


def run_deterministic(stream: StreamSource, gamma: float, epsilon: float) -> Matching:
    """Single pass with delta = 0 (phi = 1), then greedy finalize."""
    config = BucketConfig(gamma=gamma, epsilon=epsilon, num_vertices=stream.num_vertices)
    return stream_bucket_run(stream, config).finalize()


def run_shifted(stream: StreamSource, gamma: float, epsilon: float, delta: float) -> Matching:
    """Same pipeline with shifted classes (phi = gamma^delta)."""
    config = BucketConfig(
        gamma=gamma, epsilon=epsilon, num_vertices=stream.num_vertices, delta=delta)
    return stream_bucket_run(stream, config).finalize()


def choose_q(gamma: float, epsilon: float) -> int:
    """Smallest number of grid copies q with gamma^(1/q) <= 1 + epsilon/5.

    That keeps the grid-rounding degradation factor gamma^(1/q) inside
    the epsilon budget.
    """
    if not gamma > 1:
        raise ValueError(f"gamma must exceed 1, got {gamma}")
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    q = 1
    while gamma ** (1.0 / q) > 1.0 + epsilon / 5.0:
        q += 1
    return q


def delta_grid(q: int) -> list[float]:
    """The grid {0, 1/q, ..., (q-1)/q} of shift values."""
    if q < 1:
        raise ValueError("q must be at least 1")
    return [i / q for i in range(q)]


def ensemble_states(
    stream: StreamSource, gamma: float, epsilon: float, q: int,
) -> list[BucketState]:
    """One pass over the stream feeding q shifted copies, one per grid delta."""
    states = [
        BucketState(BucketConfig(
            gamma=gamma, epsilon=epsilon, num_vertices=stream.num_vertices, delta=d))
        for d in delta_grid(q)
    ]
    for edge in stream:
        for state in states:
            state.process(edge)
    return states


def run_ensemble(
    stream: StreamSource, gamma: float, epsilon: float, q: int,
) -> tuple[Matching, list[Matching]]:
    """Best of q grid-shifted copies, plus every copy's result.

    Copies are independent; the reduction is deterministic (maximum
    weight, ties to the smallest delta), so concurrent execution of the
    copies would return the same answer.
    """
    per_copy = [state.finalize() for state in ensemble_states(stream, gamma, epsilon, q)]
    best = per_copy[0]
    for candidate in per_copy[1:]:
        if candidate.weight > best.weight:
            best = candidate
    return best, per_copy


def expected_rounded_weight(w: float, gamma: float) -> float:
    """Mean class-floor rounding of w under a uniform shift: w*(1 - 1/gamma)/ln(gamma)."""
    if not w > 0:
        raise ValueError(f"weight must be positive, got {w}")
    if not gamma > 1:
        raise ValueError(f"gamma must exceed 1, got {gamma}")
    return w * (1.0 - 1.0 / gamma) / math.log(gamma)


def deterministic_ratio_bound(gamma: float) -> float:
    """Worst-case OPT/ALG for the delta = 0 variant: 2*gamma^2/(gamma-1)."""
    return 2.0 * gamma * gamma / (gamma - 1.0)


def randomized_ratio_bound(gamma: float) -> float:
    """Expected-ratio bound under a uniform shift: 2*gamma^2*ln(gamma)/(gamma-1)^2."""
    return 2.0 * gamma * gamma * math.log(gamma) / (gamma - 1.0) ** 2


def ensemble_ratio_bound(gamma: float, q: int) -> float:
    """Grid-of-q bound: 2*gamma^(2+1/q)*ln(gamma)/(gamma-1)^2."""
    return 2.0 * gamma ** (2.0 + 1.0 / q) * math.log(gamma) / (gamma - 1.0) ** 2


def minimize_randomized_bound(
    lo: float = 1.5, hi: float = 10.0, tol: float = 1e-10,
) -> tuple[float, float]:
    """Golden-section minimizer of the randomized ratio bound over (lo, hi)."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = randomized_ratio_bound(c), randomized_ratio_bound(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = randomized_ratio_bound(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = randomized_ratio_bound(d)
    best = 0.5 * (a + b)
    return best, randomized_ratio_bound(best)
