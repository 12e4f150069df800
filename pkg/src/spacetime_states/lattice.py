"""A discrete (1+1)-dimensional spacetime.

Sites ``0 .. n_sites-1`` are spatial cells; integer layers ``0 .. n_layers-1``
are time steps. An event at layer ``l`` acts between cut values ``l`` and
``l + 1``. A hypersurface is a cut: one integer in ``[0, n_layers]`` per site,
with neighbouring values differing by at most one (light speed is one site
per layer). An event lies in the past of a cut when ``layer < cut[i]`` on
every site it touches.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Sequence

from .errors import FoliationError, LatticeError


@dataclass(frozen=True)
class Lattice:
    n_sites: int
    n_layers: int
    local_dim: int = 2
    periodic: bool = False

    def __post_init__(self):
        if self.n_sites < 1 or self.n_layers < 1:
            raise LatticeError("lattice needs at least one site and one layer")
        if self.local_dim < 1:
            raise LatticeError("local dimension must be positive")

    def distance(self, a: int, b: int) -> int:
        d = abs(a - b)
        if self.periodic:
            d = min(d, self.n_sites - d)
        return d

    def neighbours(self, i: int) -> list[int]:
        if self.periodic and self.n_sites > 1:
            return sorted({(i - 1) % self.n_sites, (i + 1) % self.n_sites} - {i})
        return [j for j in (i - 1, i + 1) if 0 <= j < self.n_sites]

    def adjacent_pairs(self) -> list[tuple[int, int]]:
        pairs = [(i, i + 1) for i in range(self.n_sites - 1)]
        if self.periodic and self.n_sites > 2:
            pairs.append((self.n_sites - 1, 0))
        return pairs

    def flat(self, k: int) -> "Hypersurface":
        return Hypersurface([k] * self.n_sites)

    def flat_foliation(self) -> "Foliation":
        return Foliation([self.flat(k) for k in range(self.n_layers + 1)])


@dataclass(frozen=True)
class Event:
    """A gate or measurement on one site or two adjacent sites at one layer.

    ``sites`` is ordered: the first site is the leftmost tensor slot of the
    payload's matrix.
    """

    id: Hashable
    sites: tuple[int, ...]
    layer: int
    payload: Any = field(default=None, compare=False)

    def __init__(self, id, sites, layer: int, payload=None):
        sites = tuple(int(s) for s in (sites if isinstance(sites, Iterable) else [sites]))
        if len(sites) not in (1, 2) or len(set(sites)) != len(sites):
            raise LatticeError(f"event {id!r} must act on 1 or 2 distinct sites, got {sites}")
        object.__setattr__(self, "id", id)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "layer", int(layer))
        object.__setattr__(self, "payload", payload)

    @property
    def payload_name(self) -> str:
        return getattr(self.payload, "name", str(self.payload))

    def to_dict(self) -> dict:
        return {"id": self.id, "layer": self.layer, "payload": self.payload_name, "sites": list(self.sites)}


def check_event(event: Event, lattice: Lattice) -> None:
    bad = [s for s in event.sites if not 0 <= s < lattice.n_sites]
    if bad:
        raise LatticeError(f"event {event.id!r} touches sites {bad} outside the lattice")
    if not 0 <= event.layer < lattice.n_layers:
        raise LatticeError(f"event {event.id!r} layer {event.layer} outside [0, {lattice.n_layers})")
    if len(event.sites) == 2 and lattice.distance(*event.sites) != 1:
        raise LatticeError(f"event {event.id!r} couples non-adjacent sites {event.sites}")


def check_events(events: Sequence[Event], lattice: Lattice) -> None:
    """Validate each event and the no-shared-site-per-layer rule."""
    ids = [e.id for e in events]
    if len(set(ids)) != len(ids):
        raise LatticeError("event ids must be unique")
    used: dict[tuple[int, int], Hashable] = {}
    for e in events:
        check_event(e, lattice)
        for s in e.sites:
            key = (e.layer, s)
            if key in used:
                raise LatticeError(
                    f"events {used[key]!r} and {e.id!r} share site {s} at layer {e.layer}"
                )
            used[key] = e.id


@dataclass(frozen=True)
class Hypersurface:
    cut: tuple[int, ...]

    def __init__(self, cut: Iterable[int]):
        object.__setattr__(self, "cut", tuple(int(c) for c in cut))

    def __getitem__(self, i: int) -> int:
        return self.cut[i]

    def __len__(self) -> int:
        return len(self.cut)

    def to_list(self) -> list[int]:
        return list(self.cut)

    def slope_violations(self, lattice: Lattice) -> list[dict]:
        problems = []
        if len(self.cut) != lattice.n_sites:
            return [{"kind": "length", "expected": lattice.n_sites, "actual": len(self.cut)}]
        for i, c in enumerate(self.cut):
            if not 0 <= c <= lattice.n_layers:
                problems.append({"kind": "range", "site": i, "value": c})
        for i, j in lattice.adjacent_pairs():
            if abs(self.cut[i] - self.cut[j]) > 1:
                problems.append({"kind": "slope", "site": i, "neighbour": j})
        return problems

    def check(self, lattice: Lattice) -> None:
        problems = self.slope_violations(lattice)
        if problems:
            raise FoliationError(f"invalid hypersurface {self.cut}: {problems}", problems)

    def is_below(self, other: "Hypersurface") -> bool:
        return all(a <= b for a, b in zip(self.cut, other.cut))


@dataclass(frozen=True)
class Foliation:
    surfaces: tuple[Hypersurface, ...]

    def __init__(self, surfaces: Iterable):
        object.__setattr__(
            self,
            "surfaces",
            tuple(s if isinstance(s, Hypersurface) else Hypersurface(s) for s in surfaces),
        )

    def __len__(self) -> int:
        return len(self.surfaces)

    def __iter__(self):
        return iter(self.surfaces)

    def __getitem__(self, k: int) -> Hypersurface:
        return self.surfaces[k]


@dataclass(frozen=True)
class Region:
    sites: tuple[int, ...]

    def __init__(self, sites):
        sites = tuple(sorted({int(s) for s in (sites if isinstance(sites, Iterable) else [sites])}))
        if not sites:
            raise LatticeError("a region needs at least one site")
        object.__setattr__(self, "sites", sites)

    def check(self, lattice: Lattice) -> None:
        bad = [s for s in self.sites if not 0 <= s < lattice.n_sites]
        if bad:
            raise LatticeError(f"region sites {bad} outside the lattice")

    def __iter__(self):
        return iter(self.sites)

    def __len__(self) -> int:
        return len(self.sites)

    def __or__(self, other: "Region") -> "Region":
        return Region(self.sites + other.sites)

    def isdisjoint(self, other: "Region") -> bool:
        return not set(self.sites) & set(other.sites)

    def issubset(self, other: "Region") -> bool:
        return set(self.sites) <= set(other.sites)


def _distance(a: int, b: int, lattice: Lattice | None) -> int:
    return lattice.distance(a, b) if lattice is not None else abs(a - b)


def is_spacelike(a: Event, b: Event, lattice: Lattice | None = None) -> bool:
    """Minimum site distance strictly exceeds the layer difference."""
    d = min(_distance(i, j, lattice) for i in a.sites for j in b.sites)
    return d > abs(a.layer - b.layer)


def past_cone_slice(region: Region, sigma: Hypersurface, sigma0: Hypersurface, lattice: Lattice) -> Region:
    """Sites of ``sigma0`` from which a signal can reach ``region`` on ``sigma``."""
    if not sigma0.is_below(sigma):
        raise FoliationError("base surface is not pointwise below the target surface")
    region.check(lattice)
    sites = [
        j
        for j in range(lattice.n_sites)
        if any(lattice.distance(i, j) <= sigma[i] - sigma0[j] for i in region)
    ]
    return Region(sites)


def event_in_past(e: Event, sigma: Hypersurface) -> bool:
    return all(e.layer < sigma[i] for i in e.sites)


def straddles(e: Event, sigma: Hypersurface) -> bool:
    below = [e.layer < sigma[i] for i in e.sites]
    return any(below) and not all(below)


def in_causal_past(e: Event, region: Region, sigma: Hypersurface, lattice: Lattice) -> bool:
    """Whether ``e`` can affect the state of ``region`` as seen on ``sigma``."""
    return any(lattice.distance(i, j) <= sigma[i] - 1 - e.layer for i in region for j in e.sites)


@dataclass
class FoliationReport:
    problems: list[dict]

    @property
    def ok(self) -> bool:
        return not self.problems

    def raise_if_invalid(self) -> None:
        if self.problems:
            raise FoliationError(f"invalid foliation: {self.problems}", self.problems)


def validate_foliation(f: Foliation, events: Sequence[Event], lattice: Lattice) -> FoliationReport:
    problems: list[dict] = []
    if len(f) == 0:
        return FoliationReport([{"kind": "empty"}])
    for k, s in enumerate(f):
        problems.extend(dict(p, surface=k) for p in s.slope_violations(lattice))
        for e in events:
            if straddles(e, s):
                problems.append({"kind": "straddle", "surface": k, "event": e.id})
    if f[0].cut != (0,) * lattice.n_sites:
        problems.append({"kind": "start", "surface": 0})
    if f[-1].cut != (lattice.n_layers,) * lattice.n_sites:
        problems.append({"kind": "end", "surface": len(f) - 1})
    for k in range(len(f) - 1):
        for i, (a, b) in enumerate(zip(f[k].cut, f[k + 1].cut)):
            if b < a:
                problems.append({"kind": "monotone", "surface": k + 1, "site": i})
    return FoliationReport(problems)


def enumerate_hypersurfaces_through(
    region: Region,
    lattice: Lattice,
    layer_range: tuple[int, int],
    events: Sequence[Event] = (),
) -> list[Hypersurface]:
    """All valid cuts equal to a constant ``v`` on ``region``, for ``v`` in the inclusive range.

    Cuts straddling any of ``events`` are skipped. Ordered by ``v``, then
    lexicographically by cut.
    """
    lo, hi = layer_range
    lo, hi = max(lo, 0), min(hi, lattice.n_layers)
    if lo > hi:
        raise LatticeError(f"empty layer range {layer_range}")
    region.check(lattice)
    out = []
    for v in range(lo, hi + 1):
        choices = [[v] if i in region.sites else range(lattice.n_layers + 1) for i in range(lattice.n_sites)]
        for cut in _slope_products(choices, lattice):
            s = Hypersurface(cut)
            if not any(straddles(e, s) for e in events):
                out.append(s)
    return out


def _slope_products(choices: list, lattice: Lattice):
    def extend(prefix: list[int]):
        i = len(prefix)
        if i == len(choices):
            if lattice.periodic and lattice.n_sites > 2 and abs(prefix[0] - prefix[-1]) > 1:
                return
            yield tuple(prefix)
            return
        for c in choices[i]:
            if prefix and abs(c - prefix[-1]) > 1:
                continue
            yield from extend(prefix + [c])

    yield from extend([])


def all_hypersurfaces(lattice: Lattice, events: Sequence[Event] = ()) -> list[Hypersurface]:
    """Every valid, non-straddling cut of the lattice."""
    grid = [range(lattice.n_layers + 1)] * lattice.n_sites
    return [
        Hypersurface(c)
        for c in _slope_products(list(grid), lattice)
        if not any(straddles(e, Hypersurface(c)) for e in events)
    ]


def random_foliation(lattice: Lattice, events: Sequence[Event], rng) -> Foliation:
    """A random valid foliation that advances one site, or one coupled pair, per step."""
    cut = [0] * lattice.n_sites
    top = lattice.n_layers
    surfaces = [Hypersurface(cut)]
    while min(cut) < top:
        moves = []
        for i in range(lattice.n_sites):
            if cut[i] < top:
                moves.append((i,))
        for i, j in lattice.adjacent_pairs():
            if cut[i] < top and cut[j] < top:
                moves.append((i, j))
        valid = []
        for move in moves:
            trial = list(cut)
            for i in move:
                trial[i] += 1
            s = Hypersurface(trial)
            if not s.slope_violations(lattice) and not any(straddles(e, s) for e in events):
                valid.append(s)
        s = valid[rng.integers(len(valid))]
        cut = list(s.cut)
        surfaces.append(s)
    return Foliation(surfaces)


def pairs(regions: Sequence[Region]) -> list[tuple[Region, Region]]:
    return [(a, b) for a, b in itertools.combinations(regions, 2) if a.isdisjoint(b)]
