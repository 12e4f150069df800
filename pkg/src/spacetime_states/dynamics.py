"""Evolution of a lattice state along hypersurfaces and foliations.

Two modes are supported. In ``"unitary"`` mode every event is a gate. In
``"frc"`` (foliation-relative collapse) mode events may also be projective
measurements; a measurement acts once, on the first surface of a foliation
whose past contains it, and the branch is renormalized there.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Hashable, Sequence

import numpy as np

from . import settings
from .errors import BranchAnnihilatedError, DimensionError, FoliationError, LatticeError, PreconditionError
from .lattice import (
    Event,
    Foliation,
    Hypersurface,
    Lattice,
    Region,
    check_events,
    event_in_past,
    straddles,
    validate_foliation,
)
from .qstate import LinearOperator, StateVector, TensorFactorization, apply_operator, pure_distance

UNITARY = "unitary"
FRC = "frc"
MODES = (UNITARY, FRC)


@dataclass(frozen=True)
class GateSpec:
    name: str
    matrix: LinearOperator
    arity: int = 1

    def __post_init__(self):
        if self.arity not in (1, 2):
            raise DimensionError("gates act on one or two sites")
        if not self.matrix.unitary:
            object.__setattr__(self, "matrix", LinearOperator(self.matrix.matrix, unitary=True))


@dataclass(frozen=True)
class MeasurementSpec:
    """Complete orthogonal projective measurement.

    ``outcome`` fixes (postselects) the result; ``None`` means the outcome
    is drawn from the Born rule with a generator supplied at evolution time.
    """

    name: str
    projectors: tuple[np.ndarray, ...] = field(repr=False)
    arity: int = 1
    outcome: int | None = None

    def __post_init__(self):
        projs = tuple(np.asarray(p, dtype=complex) for p in self.projectors)
        for p in projs:
            p.setflags(write=False)
        object.__setattr__(self, "projectors", projs)
        if not projs:
            raise DimensionError("a measurement needs at least one projector")
        tol = settings.tol()
        dim = projs[0].shape[0]
        if not np.allclose(sum(projs), np.eye(dim), rtol=0, atol=tol):
            raise DimensionError(f"projectors of {self.name!r} do not sum to the identity")
        for j, a in enumerate(projs):
            for k, b in enumerate(projs):
                expect = a if j == k else np.zeros_like(a)
                if not np.allclose(a @ b, expect, rtol=0, atol=tol):
                    raise DimensionError(f"projectors of {self.name!r} are not orthogonal idempotents")
        if self.outcome is not None and not 0 <= self.outcome < len(projs):
            raise DimensionError(f"outcome {self.outcome} out of range for {self.name!r}")

    def with_outcome(self, outcome: int | None) -> "MeasurementSpec":
        return replace(self, outcome=outcome)


SPIN_FLIP = GateSpec("spin_flip", LinearOperator([[0, -1], [1, 0]], unitary=True))
IDENTITY = GateSpec("identity", LinearOperator.identity(2))


def z_measurement(outcome: int | None = None, name: str = "z_measure") -> MeasurementSpec:
    return MeasurementSpec(name, (np.diag([1.0, 0.0]), np.diag([0.0, 1.0])), outcome=outcome)


@dataclass(frozen=True)
class EventSchedule:
    lattice: Lattice
    initial: StateVector
    events: tuple[Event, ...]
    mode: str = UNITARY

    def __init__(self, lattice: Lattice, initial: StateVector, events: Sequence[Event] = (), mode: str = UNITARY):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        events = tuple(events)
        check_events(events, lattice)
        factorization = TensorFactorization.uniform(lattice.n_sites, lattice.local_dim)
        factorization.check(initial.dim)
        for e in events:
            _check_payload(e, lattice, mode)
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "mode", mode)

    @property
    def factorization(self) -> TensorFactorization:
        return TensorFactorization.uniform(self.lattice.n_sites, self.lattice.local_dim)

    def with_events(self, extra: Sequence[Event]) -> "EventSchedule":
        return EventSchedule(self.lattice, self.initial, self.events + tuple(extra), self.mode)

    def with_mode(self, mode: str) -> "EventSchedule":
        return EventSchedule(self.lattice, self.initial, self.events, mode)

    def with_initial(self, initial: StateVector) -> "EventSchedule":
        return EventSchedule(self.lattice, initial, self.events, self.mode)

    def event(self, event_id: Hashable) -> Event:
        for e in self.events:
            if e.id == event_id:
                return e
        raise KeyError(event_id)


def _check_payload(e: Event, lattice: Lattice, mode: str) -> None:
    p = e.payload
    if not isinstance(p, (GateSpec, MeasurementSpec)):
        raise LatticeError(f"event {e.id!r} payload must be a GateSpec or MeasurementSpec")
    if p.arity != len(e.sites):
        raise LatticeError(f"event {e.id!r}: payload arity {p.arity} but {len(e.sites)} sites")
    dim = lattice.local_dim ** p.arity
    size = p.matrix.dim if isinstance(p, GateSpec) else p.projectors[0].shape[0]
    if size != dim:
        raise DimensionError(f"event {e.id!r}: payload of dimension {size}, sites need {dim}")
    if isinstance(p, MeasurementSpec) and mode != FRC:
        raise LatticeError(f"measurement event {e.id!r} requires frc mode")


def ordered(events: Sequence[Event]) -> list[Event]:
    """Layer order, ties broken by lowest site index."""
    return sorted(events, key=lambda e: (e.layer, min(e.sites)))


@dataclass
class _Branch:
    amplitudes: np.ndarray
    weight: float = 1.0
    outcomes: dict = field(default_factory=dict)


def _apply(event: Event, branch: _Branch, f: TensorFactorization, rng) -> None:
    p = event.payload
    if isinstance(p, GateSpec):
        branch.amplitudes = apply_operator(p.matrix.matrix, branch.amplitudes, f, event.sites)
        return
    projected = [apply_operator(proj, branch.amplitudes, f, event.sites) for proj in p.projectors]
    probs = np.array([np.vdot(v, v).real for v in projected])
    if p.outcome is not None:
        k = p.outcome
    elif event.id in branch.outcomes:
        k = branch.outcomes[event.id]
    else:
        if rng is None:
            raise PreconditionError(f"measurement {event.id!r} samples its outcome but no generator was given")
        k = int(rng.choice(len(probs), p=probs / probs.sum()))
    if probs[k] <= settings.norm_tol() ** 2:
        raise BranchAnnihilatedError(f"outcome {k} of {event.id!r} has zero probability")
    branch.amplitudes = projected[k] / np.sqrt(probs[k])
    branch.weight *= float(probs[k])
    branch.outcomes[event.id] = k


def _check_surface(schedule: EventSchedule, sigma: Hypersurface) -> None:
    sigma.check(schedule.lattice)
    bad = [e.id for e in schedule.events if straddles(e, sigma)]
    if bad:
        raise FoliationError(f"surface {sigma.cut} straddles events {bad}", [{"kind": "straddle", "event": b} for b in bad])


def evolve_to(schedule: EventSchedule, sigma: Hypersurface, rng=None, outcomes: dict | None = None) -> tuple[StateVector, float]:
    """Global state on ``sigma`` and the branch weight of the fixed outcomes.

    ``outcomes`` may pin sampled measurements (event id -> index) so that
    several surfaces see one branch.
    """
    _check_surface(schedule, sigma)
    f = schedule.factorization
    branch = _Branch(np.array(schedule.initial.amplitudes), outcomes=dict(outcomes or {}))
    for e in ordered([e for e in schedule.events if event_in_past(e, sigma)]):
        _apply(e, branch, f, rng)
    return StateVector(branch.amplitudes, check=False), branch.weight


@dataclass(frozen=True)
class StateHistory:
    foliation: Foliation
    states: tuple[StateVector, ...]
    branch_weight: float
    weights: tuple[float, ...] = ()
    outcomes: dict = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.states)


def history_along(schedule: EventSchedule, f: Foliation, rng=None) -> StateHistory:
    """Global states on every surface of ``f``, applying each event once."""
    validate_foliation(f, schedule.events, schedule.lattice).raise_if_invalid()
    fact = schedule.factorization
    branch = _Branch(np.array(schedule.initial.amplitudes))
    done: set = set()
    states, weights = [], []
    for sigma in f:
        fresh = [e for e in schedule.events if e.id not in done and event_in_past(e, sigma)]
        for e in ordered(fresh):
            _apply(e, branch, fact, rng)
            done.add(e.id)
        states.append(StateVector(branch.amplitudes.copy(), check=False))
        weights.append(branch.weight)
    return StateHistory(f, tuple(states), branch.weight, tuple(weights), dict(branch.outcomes))


@dataclass(frozen=True)
class HistoryComparison:
    equal: bool
    distances: tuple[float, ...]

    def __bool__(self) -> bool:
        return self.equal


def histories_equal(h1: StateHistory, h2: StateHistory) -> HistoryComparison:
    """Compare two histories surface by surface, ignoring global phase."""
    if len(h1) != len(h2):
        raise DimensionError(f"histories have {len(h1)} and {len(h2)} surfaces")
    distances = tuple(pure_distance(a, b) for a, b in zip(h1.states, h2.states))
    return HistoryComparison(all(d < settings.tol() for d in distances), distances)


def translate_event(e: Event, k: int, lattice: Lattice) -> Event:
    return Event(e.id, [(s + k) % lattice.n_sites for s in e.sites], e.layer, e.payload)


def translate_surface(sigma: Hypersurface, k: int) -> Hypersurface:
    n = len(sigma)
    return Hypersurface([sigma[(j - k) % n] for j in range(n)])


def translate_region(region: Region, k: int, lattice: Lattice) -> Region:
    return Region([(s + k) % lattice.n_sites for s in region])


def translate_state(psi: StateVector, k: int, lattice: Lattice) -> StateVector:
    """Move the tensor factor of site ``s`` to site ``s + k``."""
    n = lattice.n_sites
    tensor = psi.amplitudes.reshape([lattice.local_dim] * n)
    moved = tensor.transpose([(j - k) % n for j in range(n)])
    return StateVector(moved.reshape(-1), check=False)


def translate_schedule(schedule: EventSchedule, k: int) -> EventSchedule:
    """Shift every event site and initial-state factor by ``k`` (mod the lattice size)."""
    lattice = schedule.lattice
    if not lattice.periodic:
        raise LatticeError("translation needs a periodic lattice")
    return EventSchedule(
        lattice,
        translate_state(schedule.initial, k, lattice),
        [translate_event(e, k, lattice) for e in schedule.events],
        schedule.mode,
    )


def random_circuit(
    lattice: Lattice,
    rng: np.random.Generator,
    density: float = 0.7,
    two_site_fraction: float = 0.5,
    initial: StateVector | None = None,
    mode: str = UNITARY,
) -> EventSchedule:
    """Random brickwork-style circuit of Haar-random one- and two-site gates."""
    from .qstate import random_state, random_unitary

    d = lattice.local_dim
    events = []
    for layer in range(lattice.n_layers):
        free = set(range(lattice.n_sites))
        pairs = lattice.adjacent_pairs()
        rng.shuffle(pairs)
        for i, j in pairs:
            if i in free and j in free and rng.random() < density * two_site_fraction:
                gate = GateSpec("u2", random_unitary(d * d, rng), arity=2)
                events.append(Event(f"g{layer}_{i}_{j}", (i, j), layer, gate))
                free -= {i, j}
        for i in sorted(free):
            if rng.random() < density * (1 - two_site_fraction):
                events.append(Event(f"g{layer}_{i}", (i,), layer, GateSpec("u1", random_unitary(d, rng))))
    if initial is None:
        initial = random_state(d ** lattice.n_sites, rng)
    return EventSchedule(lattice, initial, events, mode)
