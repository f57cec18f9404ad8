"""Complex-variable series algebra for the logarithmic repulsion kernel.

Positions map to complex numbers z = x + iy.  With unit charges the
pairwise field summed at z is

    S(z) = sum_j 1 / (z - z_j)

and the repulsive force vector on a node at z is ``k_r * conj(S(z))``,
i.e. magnitude k_r/r pointing away from each source.  S is the
derivative of the potential ``sum_j log(z - z_j)``, so cells can carry
truncated series of the potential:

* outgoing coefficients ``a`` about a center c:
  ``phi(z) = a_0 log(z-c) + sum_{k>=1} a_k (z-c)^-k``  (valid far away)
* incoming coefficients ``b`` about a center c:
  ``phi(z) = sum_{l>=0} b_l (z-c)^l``                  (valid nearby)

Only the derivative of the potential is ever evaluated, so the constant
term of incoming expansions is irrelevant; conversions produced here
leave it at 0.  All translations are exact on the truncated series (no
error beyond the original truncation at ``order``).
"""

import numpy as np


def binomial_table(order: int) -> np.ndarray:
    """Pascal triangle as a dense (2*order+2)^2 float array.

    Large enough for every index pair the translations use; exact in
    float64 for order <= 24.
    """
    m = 2 * order + 2
    t = np.zeros((m, m))
    t[:, 0] = 1.0
    for i in range(1, m):
        t[i, 1 : i + 1] = t[i - 1, : i] + t[i - 1, 1 : i + 1]
    return t


def outgoing_from_charges(z: np.ndarray, center: complex, order: int) -> np.ndarray:
    """Multipole coefficients of unit charges at ``z`` about ``center`` (P2M)."""
    a = np.zeros(order + 1, dtype=np.complex128)
    if z.size == 0:
        return a
    w = np.asarray(z, dtype=np.complex128) - center
    a[0] = z.size
    pw = w.copy()
    for k in range(1, order + 1):
        a[k] = -np.sum(pw) / k
        pw *= w
    return a


def shift_outgoing(a: np.ndarray, delta: complex) -> np.ndarray:
    """Re-center a multipole series; ``delta`` = old center - new center (M2M)."""
    order = a.size - 1
    binom = binomial_table(order)
    b = np.zeros_like(a)
    b[0] = a[0]
    dpow = delta ** np.arange(order + 1)
    for l in range(1, order + 1):
        s = -a[0] * dpow[l] / l
        for k in range(1, l + 1):
            s += a[k] * dpow[l - k] * binom[l - 1, k - 1]
        b[l] = s
    return b


def outgoing_to_incoming(a: np.ndarray, z0: complex) -> np.ndarray:
    """Convert a multipole series into a local series (M2L).

    ``z0`` = source center - target center; requires the target
    neighbourhood to be well separated from the source cell.
    """
    order = a.size - 1
    binom = binomial_table(order)
    inv = 1.0 / z0
    ipow = inv ** np.arange(order + 1)
    signed = a[1:] * ipow[1:] * ((-1.0) ** np.arange(1, order + 1))
    b = np.zeros_like(a)
    for l in range(1, order + 1):
        s = -a[0] / l
        for k in range(1, order + 1):
            s += signed[k - 1] * binom[l + k - 1, k - 1]
        b[l] = s * ipow[l]
    return b


def shift_incoming(b: np.ndarray, delta: complex) -> np.ndarray:
    """Re-center a local series; ``delta`` = new center - old center (L2L)."""
    order = b.size - 1
    binom = binomial_table(order)
    dpow = delta ** np.arange(order + 1)
    out = np.zeros_like(b)
    for l in range(order + 1):
        s = 0.0 + 0.0j
        for k in range(l, order + 1):
            s += b[k] * binom[k, l] * dpow[k - l]
        out[l] = s
    return out


def incoming_from_charges(z: np.ndarray, center: complex, order: int) -> np.ndarray:
    """Local coefficients of the field of unit charges at ``z`` (P2L).

    Sources must lie outside the evaluation disk around ``center``; the
    series enters exactly (no source-side truncation), so this stays
    accurate even for sources in cells much larger than the target.
    """
    b = np.zeros(order + 1, dtype=np.complex128)
    if z.size == 0:
        return b
    m = -1.0 / (center - np.asarray(z, dtype=np.complex128))
    pw = m.copy()
    for l in range(1, order + 1):
        b[l] = -np.sum(pw) / l
        pw *= m
    return b


def field_from_outgoing(a: np.ndarray, u) -> np.ndarray:
    """Evaluate S(z) from a multipole series at ``u`` = z - center."""
    order = a.size - 1
    u = np.atleast_1d(np.asarray(u, dtype=np.complex128))
    inv = 1.0 / u
    # Horner in inv: sum_k (-k a_k) inv^{k+1}
    acc = np.zeros_like(u)
    for k in range(order, 0, -1):
        acc = acc * inv - k * a[k]
    return a[0] * inv + acc * inv * inv


def field_from_incoming(b: np.ndarray, u) -> np.ndarray:
    """Evaluate S(z) from a local series at ``u`` = z - center."""
    order = b.size - 1
    u = np.atleast_1d(np.asarray(u, dtype=np.complex128))
    acc = np.zeros_like(u)
    for l in range(order, 0, -1):
        acc = acc * u + l * b[l]
    return acc


def direct_field(z_targets, z_sources) -> np.ndarray:
    """Exact S at each target from all sources (coincident pairs skipped)."""
    zt = np.atleast_1d(np.asarray(z_targets, dtype=np.complex128))
    zs = np.asarray(z_sources, dtype=np.complex128)
    diff = zt[:, None] - zs[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(diff == 0, 0.0, 1.0 / diff)
    return inv.sum(axis=1)
