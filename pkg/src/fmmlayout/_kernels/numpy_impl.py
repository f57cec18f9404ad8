"""Pure-numpy kernels (fallback backend).

Same signatures and semantics as `numba_impl`.  Loops over cells/nodes
stay in Python with vectorized bodies, so this path is functional and
reasonably quick but not meant for the large-scale timing targets.

Array contracts
---------------
* quadtree arrays: cells in BFS creation order (parent index < child
  index), ``child0`` is the first of four contiguous children or -1,
  ``start``/``count`` delimit each cell's subtree slice of ``perm``.
* ``nbr``/``m2l``/``p2l`` are fixed-width per-cell lists with separate
  count vectors.
* expansion coefficient rows follow `fmmlayout.fmm.algebra`.
"""

import heapq
import math

import numpy as np

from .. import _series as algebra

# --------------------------------------------------------------------------
# shortest paths
# --------------------------------------------------------------------------


def floyd_warshall_inplace(d):
    n = d.shape[0]
    for k in range(n):
        np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :], out=d)


def dijkstra_all_sources(indptr, indices, weights, out):
    n = indptr.shape[0] - 1
    for s in range(n):
        dist = out[s]
        dist[:] = np.inf
        dist[s] = 0.0
        heap = [(0.0, s)]
        while heap:
            d0, v = heapq.heappop(heap)
            if d0 > dist[v]:
                continue
            for e in range(indptr[v], indptr[v + 1]):
                w = indices[e]
                alt = d0 + weights[e]
                if alt < dist[w]:
                    dist[w] = alt
                    heapq.heappush(heap, (alt, w))


# --------------------------------------------------------------------------
# force accumulation
# --------------------------------------------------------------------------


def accumulate_attraction(edges, pos, k_a, out):
    if edges.shape[0] == 0:
        return
    u = edges[:, 0]
    v = edges[:, 1]
    f = k_a * (pos[v] - pos[u])
    np.add.at(out, u, f)
    np.subtract.at(out, v, f)


def brute_repulsion(pts, k_r, out, chunk=512):
    n = pts.shape[0]
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        diff = pts[lo:hi, None, :] - pts[None, :, :]
        r2 = diff[..., 0] ** 2 + diff[..., 1] ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(r2 > 0.0, k_r / np.where(r2 > 0.0, r2, 1.0), 0.0)
        out[lo:hi] += (diff * w[..., None]).sum(axis=1)


# --------------------------------------------------------------------------
# Kamada-Kawai energy minimization
# --------------------------------------------------------------------------


def _kk_pair_terms(pos, dist, l, m, x, y):
    dx = x - np.delete(pos[:, 0], m)
    dy = y - np.delete(pos[:, 1], m)
    dij = np.delete(dist[m], m)
    k = 1.0 / (dij * dij)
    target = l * dij
    r = np.sqrt(dx * dx + dy * dy)
    return dx, dy, k, target, np.maximum(r, 1e-300)


def _kk_delta_energy(pos, dist, l, m, nx, ny):
    _, _, k, target, ro = _kk_pair_terms(pos, dist, l, m, pos[m, 0], pos[m, 1])
    _, _, _, _, rn = _kk_pair_terms(pos, dist, l, m, nx, ny)
    return float(np.sum(k * ((rn - target) ** 2 - (ro - target) ** 2)))


def _kk_apply_move(pos, dist, l, m, nx, ny, gx, gy):
    n = pos.shape[0]
    idx = np.arange(n) != m
    dxo, dyo, k, target, ro = _kk_pair_terms(pos, dist, l, m, pos[m, 0], pos[m, 1])
    co = 2.0 * k * (1.0 - target / ro)
    dxn, dyn, _, _, rn = _kk_pair_terms(pos, dist, l, m, nx, ny)
    cn = 2.0 * k * (1.0 - target / rn)
    # gradients of the others: pair term is c * (p_j - p_m)
    gx[idx] += cn * -dxn - co * -dxo
    gy[idx] += cn * -dyn - co * -dyo
    gx[m] = np.sum(cn * dxn)
    gy[m] = np.sum(cn * dyn)
    pos[m, 0] = nx
    pos[m, 1] = ny


def kk_minimize(pos, dist, l, eps, max_outer, newton_max_steps):
    n = pos.shape[0]
    diff = pos[:, None, :] - pos[None, :, :]
    r = np.sqrt((diff**2).sum(axis=2))
    np.fill_diagonal(r, 1.0)
    r = np.maximum(r, 1e-300)
    with np.errstate(divide="ignore"):
        k = 1.0 / (dist * dist)
        target = l * dist
    np.fill_diagonal(k, 0.0)
    c = 2.0 * k * (1.0 - target / r)
    np.fill_diagonal(c, 0.0)
    gx = np.sum(c * diff[:, :, 0], axis=1)
    gy = np.sum(c * diff[:, :, 1], axis=1)
    eps2 = eps * eps
    frozen = np.zeros(n, bool)
    outer = 0
    while outer < max_outer:
        g2 = gx * gx + gy * gy
        g2 = np.where(frozen, -1.0, g2)
        m = int(np.argmax(g2))
        if g2[m] < eps2:
            break
        outer += 1
        for _ in range(newton_max_steps):
            gmx = gx[m]
            gmy = gy[m]
            if gmx * gmx + gmy * gmy < eps2:
                break
            dx, dy, kk, tt, rr = _kk_pair_terms(pos, dist, l, m, pos[m, 0], pos[m, 1])
            r3 = rr * rr * rr + 1e-300
            hxx = 2.0 * np.sum(kk * (1.0 - tt * dy * dy / r3))
            hyy = 2.0 * np.sum(kk * (1.0 - tt * dx * dx / r3))
            hxy = 2.0 * np.sum(kk * tt * dx * dy / r3)
            det = hxx * hyy - hxy * hxy
            moved = False
            if abs(det) > 1e-12:
                sx = (-hyy * gmx + hxy * gmy) / det
                sy = (hxy * gmx - hxx * gmy) / det
                nx = pos[m, 0] + sx
                ny = pos[m, 1] + sy
                if _kk_delta_energy(pos, dist, l, m, nx, ny) <= 0.0:
                    _kk_apply_move(pos, dist, l, m, nx, ny, gx, gy)
                    moved = True
            if not moved:
                gnorm = math.sqrt(gmx * gmx + gmy * gmy)
                t = 0.25 * l / gnorm
                for _bt in range(40):
                    nx = pos[m, 0] - t * gmx
                    ny = pos[m, 1] - t * gmy
                    if _kk_delta_energy(pos, dist, l, m, nx, ny) < 0.0:
                        _kk_apply_move(pos, dist, l, m, nx, ny, gx, gy)
                        moved = True
                        break
                    t *= 0.5
            if moved:
                frozen[:] = False
            else:
                frozen[m] = True
                break
    return outer


# --------------------------------------------------------------------------
# quadtree
# --------------------------------------------------------------------------


def build_quadtree_arrays(px, py, leaf_capacity, max_depth):
    n = px.shape[0]
    xmin, xmax = px.min(), px.max()
    ymin, ymax = py.min(), py.max()
    cx0 = 0.5 * (xmin + xmax)
    cy0 = 0.5 * (ymin + ymax)
    span = max(xmax - xmin, ymax - ymin)
    half0 = 0.5 * span * (1.0 + 1e-9)
    if half0 <= 0.0:
        half0 = 1e-9 * (1.0 + abs(cx0) + abs(cy0))
    # power-of-two halfwidth keeps cell geometry exact; see numba_impl
    half0 = 2.0 ** np.ceil(np.log2(half0))
    sx = px - cx0
    sy = py - cy0

    ccx = [0.0]
    ccy = [0.0]
    half = [half0]
    parent = [-1]
    child0 = [-1]
    depth = [0]
    start = [0]
    count = [n]
    perm = np.arange(n)

    head = 0
    while head < len(ccx):
        c = head
        head += 1
        if count[c] <= leaf_capacity or depth[c] >= max_depth:
            continue
        s, cnt = start[c], count[c]
        sl = perm[s : s + cnt]
        q = (sx[sl] >= ccx[c]).astype(np.int64) + 2 * (sy[sl] >= ccy[c]).astype(
            np.int64
        )
        order = np.argsort(q, kind="stable")
        perm[s : s + cnt] = sl[order]
        sizes = np.bincount(q, minlength=4)
        offs = s + np.concatenate(([0], np.cumsum(sizes)[:-1]))
        hh = half[c] * 0.5
        child0[c] = len(ccx)
        for qi in range(4):
            ccx.append(ccx[c] + (hh if qi & 1 else -hh))
            ccy.append(ccy[c] + (hh if qi & 2 else -hh))
            half.append(hh)
            parent.append(c)
            child0.append(-1)
            depth.append(depth[c] + 1)
            start.append(int(offs[qi]))
            count.append(int(sizes[qi]))
    return (
        sx,
        sy,
        cx0,
        cy0,
        np.array(ccx),
        np.array(ccy),
        np.array(half),
        np.array(parent, dtype=np.int64),
        np.array(child0, dtype=np.int64),
        np.array(depth, dtype=np.int64),
        np.array(start, dtype=np.int64),
        np.array(count, dtype=np.int64),
        perm,
    )


def build_neighbor_lists(ccx, ccy, half, child0, depth, nbr, nbr_cnt):
    ncells = ccx.shape[0]
    for c in range(ncells):
        hc = half[c]
        dc = depth[c]
        cnt = 0
        stack = [0]
        while stack:
            d = stack.pop()
            if d == c:
                continue
            dx = abs(ccx[d] - ccx[c])
            dy = abs(ccy[d] - ccy[c])
            hd = half[d]
            if hd > hc and dx <= hd - hc and dy <= hd - hc:
                f = child0[d]
                if f >= 0:
                    stack.extend((f, f + 1, f + 2, f + 3))
                continue
            s = hd + hc
            if dx <= s and dy <= s:
                if child0[d] < 0 or depth[d] == dc:
                    nbr[c, cnt] = d
                    cnt += 1
                else:
                    f = child0[d]
                    stack.extend((f, f + 1, f + 2, f + 3))
        nbr_cnt[c] = cnt


def build_interaction_lists(
    ccx, ccy, half, parent, child0, nbr, nbr_cnt, m2l, m2l_cnt, p2l, p2l_cnt
):
    ncells = ccx.shape[0]
    for c in range(ncells):
        nm = 0
        npl = 0
        p = parent[c]
        if p >= 0:
            hc = half[c]
            for t in range(nbr_cnt[p]):
                e = nbr[p, t]
                f = child0[e]
                if f >= 0:
                    for q in range(4):
                        ch = f + q
                        if ch == c:
                            continue
                        dx = abs(ccx[ch] - ccx[c])
                        dy = abs(ccy[ch] - ccy[c])
                        if dx <= 2.0 * hc and dy <= 2.0 * hc:
                            continue
                        m2l[c, nm] = ch
                        nm += 1
                else:
                    dx = abs(ccx[e] - ccx[c])
                    dy = abs(ccy[e] - ccy[c])
                    s = half[e] + hc
                    if dx <= s and dy <= s:
                        continue
                    p2l[c, npl] = e
                    npl += 1
        m2l_cnt[c] = nm
        p2l_cnt[c] = npl


# --------------------------------------------------------------------------
# FMM passes
# --------------------------------------------------------------------------


def upward_pass(px, py, perm, start, count, child0, ccx, ccy, order, binom, outgoing):
    ncells = ccx.shape[0]
    z = px + 1j * py
    for c in range(ncells - 1, -1, -1):
        if count[c] == 0:
            continue
        zc = complex(ccx[c], ccy[c])
        f = child0[c]
        if f < 0:
            pts = z[perm[start[c] : start[c] + count[c]]]
            outgoing[c] += algebra.outgoing_from_charges(pts, zc, order)
        else:
            for q in range(4):
                ch = f + q
                if count[ch] == 0:
                    continue
                d = complex(ccx[ch], ccy[ch]) - zc
                outgoing[c] += algebra.shift_outgoing(outgoing[ch], d)


def downward_pass(
    px,
    py,
    perm,
    start,
    count,
    parent,
    ccx,
    ccy,
    order,
    binom,
    m2l,
    m2l_cnt,
    p2l,
    p2l_cnt,
    outgoing,
    incoming,
):
    ncells = ccx.shape[0]
    z = px + 1j * py
    for c in range(ncells):
        if count[c] == 0:
            continue
        p = parent[c]
        if p < 0:
            continue
        zc = complex(ccx[c], ccy[c])
        incoming[c] += algebra.shift_incoming(
            incoming[p], zc - complex(ccx[p], ccy[p])
        )
        for t in range(m2l_cnt[c]):
            src = m2l[c, t]
            if count[src] == 0:
                continue
            z0 = complex(ccx[src], ccy[src]) - zc
            incoming[c] += algebra.outgoing_to_incoming(outgoing[src], z0)
        for t in range(p2l_cnt[c]):
            src = p2l[c, t]
            pts = z[perm[start[src] : start[src] + count[src]]]
            incoming[c] += algebra.incoming_from_charges(pts, zc, order)


def evaluate_forces(
    px,
    py,
    perm,
    start,
    count,
    child0,
    ccx,
    ccy,
    order,
    incoming,
    nbr,
    nbr_cnt,
    k_r,
    fx,
    fy,
    degen,
):
    ncells = ccx.shape[0]
    z = px + 1j * py
    skipped = 0
    for c in range(ncells):
        if child0[c] >= 0 or count[c] == 0:
            continue
        own = perm[start[c] : start[c] + count[c]]
        zc = complex(ccx[c], ccy[c])
        s = algebra.field_from_incoming(incoming[c], z[own] - zc)
        near = [own]
        for a in range(nbr_cnt[c]):
            d = nbr[c, a]
            near.append(perm[start[d] : start[d] + count[d]])
        src = np.concatenate(near)
        diff = z[own][:, None] - z[src][None, :]
        r2 = diff.real**2 + diff.imag**2
        self_block = np.zeros_like(r2, dtype=bool)
        self_block[:, : own.size] = own[:, None] == own[None, :]
        zero = (r2 <= 0.0) & ~self_block
        skipped += int(zero.sum())
        if zero.any():
            degen[own[zero.any(axis=1)]] = 1
        ok = ~self_block & ~zero
        inv = np.zeros_like(diff)
        inv[ok] = diff[ok].conjugate() / r2[ok]
        s = s + inv.sum(axis=1)
        fx[own] = k_r * s.real
        fy[own] = -k_r * s.imag
    return skipped
