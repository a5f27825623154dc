"""Adversarial lower-bound machinery for deterministic preemptive matching.

A target ratio C below the critical constant R (the unique real root of
x^3 = 4(x^2 + x + 1), about 4.967) determines two weight sequences

    w_1 = 1,   w_{k+1} = ((C^2+1) w_k - C S_{k-1}) / (2C+1),
    w'_{k+1} = ((C+1) w_{k+1} - w_k) / C,

with prefix sums S_i.  The sequence is cut at the first decrease
(w_k < w_{k-1}), one extra term is computed, and n = k+1.  The prefix
sums obey a two-term linear recurrence whose characteristic roots are
complex for C < R, giving the closed form S_j = -2A r^j sin(j*theta);
the sine factor forces a sign change, so the construction is finite.

The game presents edges from these sequences to any deterministic
preemptive algorithm and maintains a certified optimum alongside; at
every decision point where the algorithm declines the mandated switch,
or at the final step, the tracked-optimum-to-algorithm ratio is at
least C.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .core import Edge, matching_weight, validate_matching
from .preemptive import PreemptiveAlgorithm

__all__ = [
    "AdversaryConfig",
    "SequenceTable",
    "ClosedFormParams",
    "IdentityReport",
    "GameState",
    "GameResult",
    "ContractViolationError",
    "solve_R",
    "generate_sequences",
    "closed_form_params",
    "closed_form_S",
    "first_nonpositive_recurrence",
    "first_nonpositive_closed_form",
    "verify_identities",
    "ratio_checkpoint",
    "run_adversary",
]


def _cubic(x: float) -> float:
    return x ** 3 - 4.0 * x ** 2 - 4.0 * x - 4.0


@lru_cache(maxsize=1)
def solve_R() -> float:
    """Unique real root of x^3 = 4(x^2 + x + 1), bisected to 1e-12."""
    lo, hi = 4.0, 6.0
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if _cubic(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True, slots=True)
class AdversaryConfig:
    """Game parameters; C must sit strictly below the critical root."""

    C: float
    max_steps: int = 10 ** 6
    stop_on_violation: bool = True

    def __post_init__(self) -> None:
        if not self.C > 1:
            raise ValueError(f"C must exceed 1, got {self.C}")
        if not self.C < solve_R() - 1e-9:
            raise ValueError(
                f"C must stay below the critical constant {solve_R():.6f}, got {self.C}")
        if self.max_steps < 3:
            raise ValueError("max_steps too small to play any game")


@dataclass(frozen=True, slots=True)
class SequenceTable:
    """1-indexed weight sequences for one C.

    ``w[k]`` is w_k for k = 1..n, ``w_prime[k]`` is w'_k for
    k = 2..n-1, ``S[i]`` is the prefix sum for i = 0..n; unused slots
    hold NaN.
    """

    C: float
    n: int
    w: tuple[float, ...]
    w_prime: tuple[float, ...]
    S: tuple[float, ...]


def generate_sequences(C: float, max_steps: int = 10 ** 6) -> SequenceTable:
    """Iterate the sequences until the first decrease, then one more term."""
    if not 1 < C < solve_R() - 1e-9:
        raise ValueError(f"need 1 < C < {solve_R():.6f}, got {C}")
    w = [math.nan, 1.0]
    S = [0.0, 1.0]
    while not (len(w) >= 3 and w[-1] < w[-2]):
        nxt = ((C * C + 1.0) * w[-1] - C * S[-2]) / (2.0 * C + 1.0)
        w.append(nxt)
        S.append(S[-1] + nxt)
        if len(w) > max_steps:
            raise RuntimeError(
                f"sequence for C={C} did not terminate within {max_steps} steps")
    # w[-1] is the first decrease, at index k = len(w)-1; n = k+1.
    nxt = ((C * C + 1.0) * w[-1] - C * S[-2]) / (2.0 * C + 1.0)
    w.append(nxt)
    S.append(S[-1] + nxt)
    n = len(w) - 1
    w_prime = [math.nan, math.nan]
    w_prime.extend(((C + 1.0) * w[k] - w[k - 1]) / C for k in range(2, n))
    return SequenceTable(C=C, n=n, w=tuple(w), w_prime=tuple(w_prime), S=tuple(S))


@dataclass(frozen=True, slots=True)
class ClosedFormParams:
    """Characteristic roots of the prefix-sum recurrence for one C.

    x1 and x2 = conj(x1) solve (2C+1)x^2 - (C^2+2C+2)x + (C^2+C+1) = 0;
    r and theta are the modulus and argument of x1, and the boundary
    coefficient alpha = A*i (with beta = -alpha) is purely imaginary.
    """

    C: float
    x1: complex
    x2: complex
    r: float
    theta: float
    A: float


def closed_form_params(C: float) -> ClosedFormParams:
    if not 1 < C < solve_R() - 1e-9:
        raise ValueError(f"need 1 < C < {solve_R():.6f}, got {C}")
    disc = C * (C ** 3 - 4.0 * C ** 2 - 4.0 * C - 4.0)
    if not disc < 0:
        raise ValueError(f"discriminant must be negative below the root, got {disc}")
    root = math.sqrt(-disc)
    denom = 2.0 * (2.0 * C + 1.0)
    x1 = complex((C * C + 2.0 * C + 2.0) / denom, root / denom)
    return ClosedFormParams(
        C=C,
        x1=x1,
        x2=x1.conjugate(),
        r=abs(x1),
        theta=cmath.phase(x1),
        A=-(2.0 * C + 1.0) / root,
    )


def closed_form_S(params: ClosedFormParams, j: int) -> float:
    """Prefix sum from the closed form: -2 A r^j sin(j theta)."""
    return -2.0 * params.A * params.r ** j * math.sin(j * params.theta)


def first_nonpositive_recurrence(C: float, cap: int = 100_000) -> int:
    """First index j >= 1 with S_j <= 0, iterating the recurrence directly."""
    prev, cur = 0.0, 1.0
    j = 1
    while cur > 0:
        prev, cur = cur, (
            (C * C + 2.0 * C + 2.0) * cur - (C * C + C + 1.0) * prev) / (2.0 * C + 1.0)
        j += 1
        if j > cap:
            raise RuntimeError(f"no sign change within {cap} terms for C={C}")
    return j


def first_nonpositive_closed_form(params: ClosedFormParams, cap: int = 100_000) -> int:
    """First index j >= 1 with the closed-form S_j <= 0."""
    j = 1
    while closed_form_S(params, j) > 0:
        j += 1
        if j > cap:
            raise RuntimeError(f"no sign change within {cap} terms for C={params.C}")
    return j


@dataclass(frozen=True, slots=True)
class IdentityReport:
    """Result of checking both sequence identities across a table."""

    ok: bool
    first_failure: Optional[tuple[str, int, float, float]] = None
    max_rel_error: float = 0.0


def verify_identities(table: SequenceTable, rel_tol: float = 1e-9) -> IdentityReport:
    """Check w'_{i+1} + w_{i+1} + S_{i-1} = C w_i  (i = 1..n-2)
    and S_{i-2} + w_i + w_{i+1} + w'_{i+1} = C w'_i  (i = 2..n-2)."""
    C, w, wp, S, n = table.C, table.w, table.w_prime, table.S, table.n
    worst = 0.0
    for i in range(1, n - 1):
        lhs = wp[i + 1] + w[i + 1] + S[i - 1]
        rhs = C * w[i]
        err = abs(lhs - rhs) / max(1.0, abs(rhs))
        worst = max(worst, err)
        if err > rel_tol:
            return IdentityReport(ok=False, first_failure=("chain", i, lhs, rhs),
                                  max_rel_error=worst)
    for i in range(2, n - 1):
        lhs = S[i - 2] + w[i] + w[i + 1] + wp[i + 1]
        rhs = C * wp[i]
        err = abs(lhs - rhs) / max(1.0, abs(rhs))
        worst = max(worst, err)
        if err > rel_tol:
            return IdentityReport(ok=False, first_failure=("escape", i, lhs, rhs),
                                  max_rel_error=worst)
    return IdentityReport(ok=True, max_rel_error=worst)


# ---------------------------------------------------------------------------
# The game
# ---------------------------------------------------------------------------

CHAIN = "chain"
ESCAPE = "escape"


class ContractViolationError(RuntimeError):
    """The victim broke the preemptive contract (resurrection or invalid hold)."""


@dataclass
class GameState:
    """Mutable bookkeeping exposed to checkpoints and transcripts."""

    step: int = 0
    kind: str = "none"
    algorithm_edge: Optional[Edge] = None
    label_map: dict[str, int] = field(default_factory=dict)
    opt_edges: list[Edge] = field(default_factory=list)
    missing_index: Optional[int] = None
    transcript: list[dict] = field(default_factory=list)


@dataclass(frozen=True, slots=True)
class GameResult:
    """Outcome of one adversary game."""

    achieved_ratio: Optional[float]
    unbounded: bool
    steps_played: int
    violation_step: Optional[int]
    transcript: tuple[dict, ...]
    tracked_opt_weight: float
    algorithm_weight: float
    num_vertices: int
    presented_edges: tuple[Edge, ...]

    def to_json_dict(self) -> dict:
        return {
            "achieved_ratio": self.achieved_ratio,
            "unbounded": self.unbounded,
            "steps_played": self.steps_played,
            "violation_step": self.violation_step,
            "tracked_opt_weight": self.tracked_opt_weight,
            "algorithm_weight": self.algorithm_weight,
            "num_vertices": self.num_vertices,
            "transcript": list(self.transcript),
        }


def ratio_checkpoint(state: GameState, table: SequenceTable,
                     C: Optional[float] = None) -> Optional[float]:
    """Certified ratio at a construction decision point.

    For a victim declining both mandated switches at step ``state.step``
    the identities give OPT/ALG of exactly C (chain kind) or at least C
    (escape kind); at the final step the bound is S_{n-1}/w_{n-1}.
    Returns the ratio, or None when the state is not at a decision
    point or the ratio does not reach C.
    """
    if state.kind not in (CHAIN, ESCAPE):
        return None
    i, n = state.step, table.n
    w, wp, S = table.w, table.w_prime, table.S
    if i >= n - 1:
        ratio = S[n - 1] / w[n - 1]
    elif state.kind == CHAIN:
        ratio = (S[i - 1] + w[i + 1] + wp[i + 1]) / w[i]
    else:
        ratio = (S[i - 2] + w[i] + w[i + 1] + wp[i + 1]) / wp[i]
    if C is not None and ratio < C * (1.0 - 1e-12):
        return None
    return ratio


class _VictimMonitor:
    """Presents edges and enforces the preemptive contract after every call."""

    def __init__(self, victim: PreemptiveAlgorithm, state: GameState):
        self.victim = victim
        self.state = state
        self.presented: dict[tuple[int, int], Edge] = {}
        self.ever_absent: set[tuple[int, int]] = set()

    def present(self, edge: Edge, label: str) -> dict:
        if not edge.weight > 0:
            raise RuntimeError(
                f"construction produced a non-positive edge weight {edge.weight} "
                f"for {label}; the sequence table is outside the playable range")
        if edge.key in self.presented:
            raise RuntimeError(f"adversary bug: edge {edge.key} presented twice")
        self.presented[edge.key] = edge
        self.victim.on_edge(edge)
        held = self.victim.current_matching
        report = validate_matching(held.edges)
        if not report.ok:
            raise ContractViolationError(
                f"victim holds a non-matching after {label}: {report.conflict}")
        for e in held:
            known = self.presented.get(e.key)
            if known is None or known != e:
                raise ContractViolationError(
                    f"victim holds an edge it was never given: {e}")
            if e.key in self.ever_absent:
                raise ContractViolationError(
                    f"victim resurrected {e} after dropping it ({label})")
        held_keys = held.keys()
        self.ever_absent.update(set(self.presented) - held_keys)
        record = {
            "step": self.state.step + 1,
            "label": label,
            "u": edge.u,
            "v": edge.v,
            "weight": edge.weight,
            "held_after": sorted([*e.key, e.weight] for e in held),
            "opt_after": sorted([*e.key, e.weight] for e in self.state.opt_edges),
        }
        self.state.transcript.append(record)
        return record

    def held_keys(self) -> set[tuple[int, int]]:
        return self.victim.current_matching.keys()

    def held_weight(self) -> float:
        return matching_weight(self.victim.current_matching)


class _TrackedOpt:
    """The adversary's certified optimum, kept as an explicit matching."""

    def __init__(self, state: GameState):
        self.state = state
        self.by_key: dict[tuple[int, int], Edge] = {}

    def add(self, edge: Edge) -> None:
        self.by_key[edge.key] = edge
        self._sync()

    def remove(self, edge: Edge) -> None:
        del self.by_key[edge.key]
        self._sync()

    def weight(self) -> float:
        return matching_weight(self.by_key.values())

    def _sync(self) -> None:
        self.state.opt_edges = list(self.by_key.values())
        report = validate_matching(self.state.opt_edges)
        if not report.ok:
            raise RuntimeError(f"adversary bug: tracked optimum invalid: {report.conflict}")
        if self.state.transcript:
            # The optimum settles right after the sub-step's last edge;
            # reflect it in that edge's record.
            self.state.transcript[-1]["opt_after"] = sorted(
                [*e.key, e.weight] for e in self.state.opt_edges)


def run_adversary(algorithm: PreemptiveAlgorithm, config: AdversaryConfig) -> GameResult:
    """Play the construction against a fresh deterministic victim.

    Terminates when a declined mandated switch certifies a ratio >= C
    (unless ``stop_on_violation`` is off, in which case the violation
    is recorded and play continues mechanically), when the final step
    completes, or when the victim holds nothing while the tracked
    optimum is positive (unbounded ratio).
    """
    table = generate_sequences(config.C, max_steps=config.max_steps)
    n = table.n
    state = GameState()
    monitor = _VictimMonitor(algorithm, state)
    opt = _TrackedOpt(state)
    next_vertex = 0

    def alloc() -> int:
        nonlocal next_vertex
        next_vertex += 1
        return next_vertex - 1

    first_violation: Optional[int] = None

    def result(ratio: Optional[float], unbounded: bool, steps: int) -> GameResult:
        return GameResult(
            achieved_ratio=ratio,
            unbounded=unbounded,
            steps_played=steps,
            violation_step=first_violation,
            transcript=tuple(state.transcript),
            tracked_opt_weight=opt.weight(),
            algorithm_weight=monitor.held_weight(),
            num_vertices=next_vertex,
            presented_edges=tuple(monitor.presented.values()),
        )

    # -- step 1: two unit edges sharing one endpoint ------------------------
    x1 = alloc()
    p, q = alloc(), alloc()
    first = Edge(p, x1, table.w[1])
    second = Edge(q, x1, table.w[1])
    rec1 = monitor.present(first, "a1-x1")
    rec2 = monitor.present(second, "b1-x1")
    held = monitor.held_keys()
    state.step = 1
    if not held:
        opt.add(first)
        return result(None, True, 1)
    if held == {second.key}:
        rec1["label"], rec2["label"] = "b1-x1", "a1-x1"
        a_cur, b_vertex = q, p
        held_edge = second
    elif held == {first.key}:
        a_cur, b_vertex = p, q
        held_edge = first
    else:
        raise ContractViolationError(f"victim holds unexpected edges after step 1: {held}")
    x_cur = x1
    opt_partner = Edge(b_vertex, x_cur, table.w[1])  # the (x_i, b_i) edge kept by OPT
    opt.add(opt_partner)
    state.kind = CHAIN
    state.algorithm_edge = held_edge
    state.label_map = {"a1": a_cur, "b1": b_vertex, "x1": x1}
    # For escape states: the OPT edge dropped on entering, restored later.
    restore: Optional[Edge] = None
    y_cur: Optional[int] = None
    c_cur: Optional[int] = None

    # -- steps 2 .. n-1 ------------------------------------------------------
    for i1 in range(2, n):
        i = state.step
        anchor = a_cur if state.kind == CHAIN else c_cur
        assert anchor is not None
        f1, f2 = alloc(), alloc()
        rec_b = monitor.present(Edge(anchor, f1, table.w[i1]), f"x{i1}-b{i1}")
        rec_a = monitor.present(Edge(anchor, f2, table.w[i1]), f"x{i1}-a{i1}")
        held = monitor.held_keys()
        if not held:
            state.step = i1
            return result(None, True, i1)

        key_b = (min(anchor, f1), max(anchor, f1))
        key_a = (min(anchor, f2), max(anchor, f2))
        if held in ({key_b}, {key_a}):
            # WLOG relabel: the held symmetric edge is the (x, a) edge.
            if held == {key_b}:
                rec_b["label"], rec_a["label"] = f"x{i1}-a{i1}", f"x{i1}-b{i1}"
                a_new, b_new = f1, f2
            else:
                a_new, b_new = f2, f1
            new_partner = Edge(anchor, b_new, table.w[i1])
            if state.kind == CHAIN:
                opt.add(new_partner)
            else:
                opt.remove(state.algorithm_edge)  # the (c_i, y_i) edge OPT shared
                opt.add(new_partner)
                assert restore is not None
                opt.add(restore)
                restore = None
                state.missing_index = None
            state.kind = CHAIN
            state.algorithm_edge = Edge(anchor, a_new, table.w[i1])
            state.step = i1
            state.label_map.update({f"x{i1}": anchor, f"a{i1}": a_new, f"b{i1}": b_new})
            a_cur, x_cur = a_new, anchor
            opt_partner = new_partner
            continue

        if held != {state.algorithm_edge.key}:
            raise ContractViolationError(
                f"victim holds unexpected edges after step {i1}: {held}")

        # Victim kept its edge: offer the escape edge.
        y_new = x_cur if state.kind == CHAIN else y_cur
        assert y_new is not None
        f3 = alloc()
        third = Edge(y_new, f3, table.w_prime[i1])
        monitor.present(third, f"y{i1}-c{i1}")
        held = monitor.held_keys()
        if not held:
            state.step = i1
            return result(None, True, i1)

        if held == {third.key}:
            if state.kind == CHAIN:
                dropped = opt_partner
                opt.remove(dropped)
                opt.add(Edge(anchor, f1, table.w[i1]))
                opt.add(third)
                restore = dropped
                state.missing_index = i
            else:
                opt.remove(state.algorithm_edge)
                opt.add(Edge(anchor, f1, table.w[i1]))
                opt.add(third)
            state.kind = ESCAPE
            state.algorithm_edge = third
            state.step = i1
            state.label_map.update({f"y{i1}": y_new, f"c{i1}": f3})
            y_cur, c_cur = y_new, f3
            continue

        if held != {state.algorithm_edge.key}:
            raise ContractViolationError(
                f"victim holds unexpected edges after step {i1}: {held}")

        # Declined both mandated switches: the checkpoint fires.
        if state.kind == CHAIN:
            mod_drop = [opt_partner]
            mod_add = [third, Edge(anchor, f1, table.w[i1])]
        else:
            mod_drop = [state.algorithm_edge]
            mod_add = [Edge(anchor, f2, table.w[i1]), third]
        if first_violation is None:
            first_violation = i1
        if config.stop_on_violation:
            for e in mod_drop:
                opt.remove(e)
            for e in mod_add:
                opt.add(e)
            state.step = i1
            ratio = opt.weight() / monitor.held_weight()
            return result(ratio, False, i1)
        # Exploration mode: keep the invariant optimum and press on with
        # the victim's stale edge; later ratios use actual weights.
        state.step = i1

    # -- final step n --------------------------------------------------------
    anchor = a_cur if state.kind == CHAIN else c_cur
    assert anchor is not None
    if table.w[n] > 0:
        fb = alloc()
        final_edge = Edge(anchor, fb, table.w[n])
        monitor.present(final_edge, f"x{n}-b{n}")
        state.label_map.update({f"x{n}": anchor, f"b{n}": fb})
        if state.kind == CHAIN:
            opt.add(final_edge)
        else:
            opt.remove(state.algorithm_edge)
            opt.add(final_edge)
            assert restore is not None
            opt.add(restore)
    elif state.kind == ESCAPE:
        # No positive final edge to present; restoring the missing chain
        # edge in place of the shared escape edge certifies S_{n-1}.
        assert restore is not None
        if restore.weight > state.algorithm_edge.weight:
            opt.remove(state.algorithm_edge)
            opt.add(restore)
    state.step = n
    alg_weight = monitor.held_weight()
    if alg_weight <= 0:
        return result(None, True, n)
    return result(opt.weight() / alg_weight, False, n)
