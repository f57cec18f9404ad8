"""Cell expansions as typed values.

Thin wrappers over `algebra`; the force evaluation helpers return the
actual 2D force vectors (k_r = 1) so tests can compare against direct
sums.  ``outgoing`` expansions describe what a cell's charges do far
away; ``incoming`` expansions describe what far charges do inside the
cell.
"""

from dataclasses import dataclass

import numpy as np

from .. import _series as algebra


def _as_complex(point) -> complex:
    if isinstance(point, complex):
        return point
    p = np.asarray(point, dtype=np.float64).reshape(2)
    return complex(p[0], p[1])


@dataclass(frozen=True)
class Expansion:
    kind: str  # "outgoing" | "incoming"
    center: complex
    coeffs: np.ndarray  # order+1 complex coefficients

    def __post_init__(self):
        if self.kind not in ("outgoing", "incoming"):
            raise ValueError(f"unknown expansion kind {self.kind!r}")
        if not np.isfinite(self.coeffs.view(np.float64)).all():
            raise ValueError("expansion coefficients must be finite")

    @property
    def order(self) -> int:
        return self.coeffs.size - 1


def outgoing_from_points(center, points, order: int) -> Expansion:
    """Multipole expansion of unit charges about ``center``."""
    z = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    zc = _as_complex(center)
    coeffs = algebra.outgoing_from_charges(z[:, 0] + 1j * z[:, 1], zc, order)
    return Expansion("outgoing", zc, coeffs)


def translate_outgoing(exp: Expansion, new_center) -> Expansion:
    """Re-center an outgoing expansion (exact on the truncated series)."""
    if exp.kind != "outgoing":
        raise ValueError("translate_outgoing needs an outgoing expansion")
    zc = _as_complex(new_center)
    return Expansion("outgoing", zc, algebra.shift_outgoing(exp.coeffs, exp.center - zc))


def outgoing_to_incoming(exp: Expansion, target_center) -> Expansion:
    """Convert an outgoing expansion to an incoming one about a well
    separated target center.  Violating the separation makes the result
    arbitrarily inaccurate (the series stops converging); it is the
    caller's contract, not checked here."""
    if exp.kind != "outgoing":
        raise ValueError("outgoing_to_incoming needs an outgoing expansion")
    zc = _as_complex(target_center)
    return Expansion(
        "incoming", zc, algebra.outgoing_to_incoming(exp.coeffs, exp.center - zc)
    )


def translate_incoming(exp: Expansion, new_center) -> Expansion:
    """Re-center an incoming expansion (exact on the truncated series)."""
    if exp.kind != "incoming":
        raise ValueError("translate_incoming needs an incoming expansion")
    zc = _as_complex(new_center)
    return Expansion("incoming", zc, algebra.shift_incoming(exp.coeffs, zc - exp.center))


def incoming_from_points(center, points, order: int) -> Expansion:
    """Incoming expansion of the field of unit charges outside the cell."""
    z = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    zc = _as_complex(center)
    coeffs = algebra.incoming_from_charges(z[:, 0] + 1j * z[:, 1], zc, order)
    return Expansion("incoming", zc, coeffs)


def force_at(exp: Expansion, point) -> np.ndarray:
    """Unit-k_r repulsion force the expansion induces at ``point``."""
    z = _as_complex(point)
    u = np.array([z - exp.center])
    if exp.kind == "outgoing":
        s = algebra.field_from_outgoing(exp.coeffs, u)[0]
    else:
        s = algebra.field_from_incoming(exp.coeffs, u)[0]
    return np.array([s.real, -s.imag])


def direct_force_at(point, sources) -> np.ndarray:
    """Exact unit-k_r force at ``point`` from all ``sources``."""
    z = _as_complex(point)
    src = np.asarray(sources, dtype=np.float64).reshape(-1, 2)
    s = algebra.direct_field(np.array([z]), src[:, 0] + 1j * src[:, 1])[0]
    return np.array([s.real, -s.imag])
