"""Truncated bosonic Fock spaces over a partitioned single-particle space.

The single-particle space is split into regions, region ``i`` carrying
``d_i`` modes. Two representations of the same states are provided:

* the *joint* space: occupation vectors over all ``sum(d_i)`` modes with
  total particle number at most ``M``;
* the *region product* space: the tensor product over regions of each
  region's own truncated Fock space (also cut at ``M``).

:class:`RegionFactorization` is the basis bijection between the joint
space and the total-number-at-most-``M`` subspace of the product.

Occupation bases are graded: ordered by total particle number, then in
descending lexicographic order, so the one-particle states of two modes
come out as ``(1, 0), (0, 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Sequence

import numpy as np

from . import settings
from .errors import DimensionError, InvalidStateError
from .qstate import LinearOperator, StateVector, TensorFactorization


def occupation_basis(n_modes: int, cutoff: int) -> list[tuple[int, ...]]:
    """All occupation vectors over ``n_modes`` modes with total <= ``cutoff``."""
    if n_modes < 0 or cutoff < 0:
        raise DimensionError("mode count and cutoff must be non-negative")
    basis: list[tuple[int, ...]] = []
    for total in range(cutoff + 1):
        basis.extend(_compositions(total, n_modes))
    return basis


def _compositions(total: int, parts: int):
    # descending lexicographic: largest first entry first
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class RegionPartition:
    regions: tuple[Hashable, ...]
    modes_per_region: tuple[int, ...]

    def __init__(self, regions: Sequence[Hashable], modes_per_region: Sequence[int]):
        regions = tuple(regions)
        modes = tuple(int(d) for d in modes_per_region)
        if not regions:
            raise DimensionError("a partition needs at least one region")
        if len(regions) != len(modes):
            raise DimensionError("one mode count per region is required")
        if len(set(regions)) != len(regions):
            raise DimensionError(f"duplicate region labels in {regions}")
        if any(d < 1 for d in modes):
            raise DimensionError(f"every region needs at least one mode, got {modes}")
        object.__setattr__(self, "regions", regions)
        object.__setattr__(self, "modes_per_region", modes)

    @classmethod
    def uniform(cls, n_regions: int, modes: int = 1) -> "RegionPartition":
        return cls(list(range(n_regions)), [modes] * n_regions)

    @property
    def n_modes(self) -> int:
        return sum(self.modes_per_region)

    def region_index(self, region: Hashable) -> int:
        try:
            return self.regions.index(region)
        except ValueError:
            raise DimensionError(f"unknown region {region!r}") from None

    def mode_slice(self, region: Hashable) -> slice:
        i = self.region_index(region)
        start = sum(self.modes_per_region[:i])
        return slice(start, start + self.modes_per_region[i])

    def region_of_mode(self, mode: int) -> Hashable:
        if not 0 <= mode < self.n_modes:
            raise DimensionError(f"mode {mode} out of range")
        edge = 0
        for label, d in zip(self.regions, self.modes_per_region):
            edge += d
            if mode < edge:
                return label
        raise AssertionError("unreachable")


@dataclass(frozen=True)
class TruncatedFockSpace:
    partition: RegionPartition
    cutoff: int = 2

    def __post_init__(self):
        if self.cutoff < 0:
            raise DimensionError("cutoff must be non-negative")

    @cached_property
    def basis(self) -> list[tuple[int, ...]]:
        return occupation_basis(self.partition.n_modes, self.cutoff)

    @cached_property
    def index(self) -> dict[tuple[int, ...], int]:
        return {occ: i for i, occ in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def state(self, occupation: Sequence[int]) -> StateVector:
        occupation = tuple(occupation)
        if occupation not in self.index:
            raise DimensionError(f"{occupation} is not in the truncated basis")
        return StateVector.basis(self.index[occupation], self.dim)

    def vacuum(self) -> StateVector:
        return self.state((0,) * self.partition.n_modes)

    def region_space(self, region: Hashable) -> "TruncatedFockSpace":
        """One region's own Fock space, truncated at the same cutoff."""
        d = self.partition.modes_per_region[self.partition.region_index(region)]
        return TruncatedFockSpace(RegionPartition([region], [d]), self.cutoff)


def fock_dimension(space: TruncatedFockSpace) -> int:
    """Number of occupation vectors with total <= cutoff: C(modes + M, M)."""
    return math.comb(space.partition.n_modes + space.cutoff, space.cutoff)


def creation_operator(space: TruncatedFockSpace, mode: int) -> LinearOperator:
    """Truncated ``a_dagger`` for ``mode``; states already at the cutoff are annihilated."""
    if not 0 <= mode < space.partition.n_modes:
        raise DimensionError(f"mode {mode} out of range")
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    for j, occ in enumerate(space.basis):
        if sum(occ) >= space.cutoff:
            continue
        raised = occ[:mode] + (occ[mode] + 1,) + occ[mode + 1 :]
        mat[space.index[raised], j] = math.sqrt(occ[mode] + 1)
    return LinearOperator(mat)


def annihilation_operator(space: TruncatedFockSpace, mode: int) -> LinearOperator:
    return LinearOperator(creation_operator(space, mode).matrix.conj().T)


def number_operator(space: TruncatedFockSpace, region: Hashable) -> LinearOperator:
    """Diagonal operator counting particles in the modes of ``region``."""
    sl = space.partition.mode_slice(region)
    return LinearOperator(np.diag([float(sum(occ[sl])) for occ in space.basis]))


def total_number_operator(space: TruncatedFockSpace) -> LinearOperator:
    return LinearOperator(np.diag([float(sum(occ)) for occ in space.basis]))


def number_sector_projector(space: TruncatedFockSpace, max_total: int) -> np.ndarray:
    """Projector onto joint states with total particle number <= ``max_total``."""
    return np.diag([1.0 if sum(occ) <= max_total else 0.0 for occ in space.basis])


class RegionFactorization:
    """Basis bijection from the joint Fock space to the product of region Fock spaces.

    ``isometry`` is the ``product_dim x joint_dim`` 0/1 matrix sending each
    joint occupation vector to the tensor product of its per-region parts.
    """

    def __init__(self, space: TruncatedFockSpace):
        self.space = space
        part = space.partition
        self.factor_spaces = [space.region_space(r) for r in part.regions]
        self.factorization = TensorFactorization([fs.dim for fs in self.factor_spaces])
        slices = [part.mode_slice(r) for r in part.regions]
        strides = _strides(self.factorization.dims)
        self.image_index = np.empty(space.dim, dtype=int)
        for j, occ in enumerate(space.basis):
            pieces = [fs.index[occ[sl]] for fs, sl in zip(self.factor_spaces, slices)]
            self.image_index[j] = int(np.dot(pieces, strides))

    @property
    def joint_dim(self) -> int:
        return self.space.dim

    @property
    def product_dim(self) -> int:
        return self.factorization.dim

    @cached_property
    def isometry(self) -> np.ndarray:
        v = np.zeros((self.product_dim, self.joint_dim), dtype=complex)
        v[self.image_index, np.arange(self.joint_dim)] = 1.0
        v.setflags(write=False)
        return v

    def map_occupation(self, occupation: Sequence[int]) -> tuple[int, ...]:
        """Per-region factor basis indices for a joint occupation vector."""
        j = self.space.index[tuple(occupation)]
        return tuple(int(k) for k in np.unravel_index(self.image_index[j], self.factorization.dims))

    def to_product(self, psi: StateVector) -> StateVector:
        return StateVector(self.isometry @ psi.amplitudes, check=False)

    def from_product(self, psi: StateVector) -> StateVector:
        """Pull back a product-space state; raises if it leaves the image."""
        back = self.isometry.conj().T @ psi.amplitudes
        if abs(np.linalg.norm(back) - psi.norm) > settings.norm_tol():
            raise InvalidStateError("state has weight outside the total <= cutoff sector")
        return StateVector(back, check=False)

    def pullback(self, op: LinearOperator | np.ndarray) -> LinearOperator:
        """``V^dagger op V``: a product-space operator seen on the joint space."""
        mat = op.matrix if isinstance(op, LinearOperator) else np.asarray(op)
        v = self.isometry
        return LinearOperator(v.conj().T @ mat @ v)

    def product_number_operator(self, region: Hashable) -> LinearOperator:
        """Region number operator acting on its own factor, identity elsewhere."""
        i = self.space.partition.region_index(region)
        fs = self.factor_spaces[i]
        local = total_number_operator(fs).matrix
        return LinearOperator(_embed(local, i, self.factorization.dims))

    def product_creation_operator(self, mode: int) -> LinearOperator:
        """Creation on the region factor owning ``mode``, identity on the others.

        Each factor is truncated at the cutoff on its own, so this differs from
        the joint creation operator only outside the total <= cutoff sector.
        """
        part = self.space.partition
        region = part.region_of_mode(mode)
        i = part.region_index(region)
        local_mode = mode - part.mode_slice(region).start
        local = creation_operator(self.factor_spaces[i], local_mode).matrix
        return LinearOperator(_embed(local, i, self.factorization.dims))


def _strides(dims: Sequence[int]) -> np.ndarray:
    strides = np.ones(len(dims), dtype=int)
    for k in range(len(dims) - 2, -1, -1):
        strides[k] = strides[k + 1] * dims[k + 1]
    return strides


def _embed(local: np.ndarray, slot: int, dims: Sequence[int]) -> np.ndarray:
    left = math.prod(dims[:slot])
    right = math.prod(dims[slot + 1 :])
    return np.kron(np.kron(np.eye(left), local), np.eye(right))


def region_factorization_iso(space: TruncatedFockSpace) -> RegionFactorization:
    return RegionFactorization(space)


def embed_first_quantized(psi, partition: RegionPartition, cutoff: int = 1) -> tuple[StateVector, RegionFactorization]:
    """Second-quantize a one-particle wavefunction into the region product space.

    ``psi`` holds one amplitude per mode, modes grouped by region in
    partition order. Returns the product-space state
    ``sum_m psi_m a_dagger_m |vac>`` and the factorization it lives in.
    """
    amps = np.asarray(psi, dtype=complex).reshape(-1)
    if amps.size != partition.n_modes:
        raise DimensionError(f"expected {partition.n_modes} amplitudes, got {amps.size}")
    if abs(np.linalg.norm(amps) - 1.0) > settings.norm_tol():
        raise InvalidStateError("single-particle wavefunction is not normalized")
    if cutoff < 1:
        raise DimensionError("a one-particle state needs cutoff >= 1")
    space = TruncatedFockSpace(partition, cutoff)
    iso = RegionFactorization(space)
    joint = np.zeros(space.dim, dtype=complex)
    n = partition.n_modes
    for m, a in enumerate(amps):
        occ = tuple(1 if k == m else 0 for k in range(n))
        joint[space.index[occ]] = a
    return StateVector(iso.isometry @ joint), iso
