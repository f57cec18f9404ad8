"""Tunables for the multipole repulsion solver."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class FmmParams:
    order: int = 8  # series truncation; error falls geometrically with it
    leaf_capacity: int = 32
    max_depth: int = 40  # cap so coincident points cannot recurse forever
    k_r: float = 1.0  # repulsion constant, force = k_r / distance

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.leaf_capacity < 1:
            raise ValueError("leaf_capacity must be >= 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not self.k_r > 0:
            raise ValueError("k_r must be positive")

    def with_k_r(self, k_r: float) -> "FmmParams":
        return replace(self, k_r=k_r)
