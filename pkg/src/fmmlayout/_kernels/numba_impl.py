"""Compiled loop kernels (numba backend).

Mirrors `numpy_impl` function-for-function; see that module's docstrings
for the array contracts.  Everything here is nopython-compiled with
caching so repeated runs skip compilation.
"""

import math

import numpy as np
from numba import njit

# --------------------------------------------------------------------------
# shortest paths
# --------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def floyd_warshall_inplace(d):
    n = d.shape[0]
    for k in range(n):
        for i in range(n):
            dik = d[i, k]
            if dik == np.inf:
                continue
            for j in range(n):
                alt = dik + d[k, j]
                if alt < d[i, j]:
                    d[i, j] = alt


@njit(cache=True, nogil=True)
def dijkstra_all_sources(indptr, indices, weights, out):
    n = indptr.shape[0] - 1
    m = indices.shape[0]
    heap_d = np.empty(m + n + 1, np.float64)
    heap_v = np.empty(m + n + 1, np.int64)
    dist = np.empty(n, np.float64)
    for s in range(n):
        for i in range(n):
            dist[i] = np.inf
        dist[s] = 0.0
        size = 1
        heap_d[0] = 0.0
        heap_v[0] = s
        while size > 0:
            # pop min
            d0 = heap_d[0]
            v0 = heap_v[0]
            size -= 1
            heap_d[0] = heap_d[size]
            heap_v[0] = heap_v[size]
            i = 0
            while True:
                l = 2 * i + 1
                if l >= size:
                    break
                c = l
                r = l + 1
                if r < size and heap_d[r] < heap_d[l]:
                    c = r
                if heap_d[c] >= heap_d[i]:
                    break
                heap_d[i], heap_d[c] = heap_d[c], heap_d[i]
                heap_v[i], heap_v[c] = heap_v[c], heap_v[i]
                i = c
            if d0 > dist[v0]:
                continue
            for e in range(indptr[v0], indptr[v0 + 1]):
                w = indices[e]
                alt = d0 + weights[e]
                if alt < dist[w]:
                    dist[w] = alt
                    # push (alt, w)
                    i = size
                    heap_d[i] = alt
                    heap_v[i] = w
                    size += 1
                    while i > 0:
                        p = (i - 1) >> 1
                        if heap_d[p] <= heap_d[i]:
                            break
                        heap_d[p], heap_d[i] = heap_d[i], heap_d[p]
                        heap_v[p], heap_v[i] = heap_v[i], heap_v[p]
                        i = p
        for i in range(n):
            out[s, i] = dist[i]


# --------------------------------------------------------------------------
# force accumulation
# --------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def accumulate_attraction(edges, pos, k_a, out):
    for e in range(edges.shape[0]):
        u = edges[e, 0]
        v = edges[e, 1]
        fx = k_a * (pos[v, 0] - pos[u, 0])
        fy = k_a * (pos[v, 1] - pos[u, 1])
        out[u, 0] += fx
        out[u, 1] += fy
        out[v, 0] -= fx
        out[v, 1] -= fy


@njit(cache=True, nogil=True)
def brute_repulsion(pts, k_r, out):
    n = pts.shape[0]
    for i in range(n):
        xi = pts[i, 0]
        yi = pts[i, 1]
        fx = 0.0
        fy = 0.0
        for j in range(i + 1, n):
            dx = xi - pts[j, 0]
            dy = yi - pts[j, 1]
            r2 = dx * dx + dy * dy
            if r2 > 0.0:
                w = k_r / r2
                fx += w * dx
                fy += w * dy
                out[j, 0] -= w * dx
                out[j, 1] -= w * dy
        out[i, 0] += fx
        out[i, 1] += fy


# --------------------------------------------------------------------------
# Kamada-Kawai energy minimization
# --------------------------------------------------------------------------


@njit(cache=True)
def _kk_delta_energy(pos, dist, l, m, nx, ny):
    """Energy change if node m moves to (nx, ny); O(n)."""
    n = pos.shape[0]
    ox = pos[m, 0]
    oy = pos[m, 1]
    de = 0.0
    for j in range(n):
        if j == m:
            continue
        dij = dist[m, j]
        k = 1.0 / (dij * dij)
        target = l * dij
        dxo = ox - pos[j, 0]
        dyo = oy - pos[j, 1]
        dxn = nx - pos[j, 0]
        dyn = ny - pos[j, 1]
        ro = math.sqrt(dxo * dxo + dyo * dyo)
        rn = math.sqrt(dxn * dxn + dyn * dyn)
        de += k * ((rn - target) * (rn - target) - (ro - target) * (ro - target))
    return de


@njit(cache=True)
def _kk_apply_move(pos, dist, l, m, nx, ny, gx, gy):
    """Update all gradients for the move of node m; call before writing pos[m]."""
    n = pos.shape[0]
    ox = pos[m, 0]
    oy = pos[m, 1]
    gmx = 0.0
    gmy = 0.0
    for j in range(n):
        if j == m:
            continue
        dij = dist[m, j]
        k = 2.0 / (dij * dij)
        target = l * dij
        dxo = pos[j, 0] - ox
        dyo = pos[j, 1] - oy
        ro = math.sqrt(dxo * dxo + dyo * dyo)
        if ro < 1e-300:
            ro = 1e-300
        co = k * (1.0 - target / ro)
        dxn = pos[j, 0] - nx
        dyn = pos[j, 1] - ny
        rn = math.sqrt(dxn * dxn + dyn * dyn)
        if rn < 1e-300:
            rn = 1e-300
        cn = k * (1.0 - target / rn)
        gx[j] += cn * dxn - co * dxo
        gy[j] += cn * dyn - co * dyo
        gmx -= cn * dxn
        gmy -= cn * dyn
    gx[m] = gmx
    gy[m] = gmy
    pos[m, 0] = nx
    pos[m, 1] = ny


@njit(cache=True, nogil=True)
def kk_minimize(pos, dist, l, eps, max_outer, newton_max_steps):
    """Per-node Newton descent on the stress energy; returns outer passes used.

    Each outer pass picks the node with the largest gradient norm and
    relaxes it with damped 2x2 Newton steps; steps that would raise the
    energy fall back to a backtracking gradient step, so the energy is
    non-increasing by construction.
    """
    n = pos.shape[0]
    gx = np.zeros(n)
    gy = np.zeros(n)
    for i in range(n):
        sx = 0.0
        sy = 0.0
        for j in range(n):
            if j == i:
                continue
            dij = dist[i, j]
            k = 2.0 / (dij * dij)
            target = l * dij
            dx = pos[i, 0] - pos[j, 0]
            dy = pos[i, 1] - pos[j, 1]
            r = math.sqrt(dx * dx + dy * dy)
            if r < 1e-300:
                r = 1e-300
            c = k * (1.0 - target / r)
            sx += c * dx
            sy += c * dy
        gx[i] = sx
        gy[i] = sy
    eps2 = eps * eps
    frozen = np.zeros(n, np.uint8)
    outer = 0
    while outer < max_outer:
        m = -1
        best = -1.0
        for i in range(n):
            if frozen[i]:
                continue
            g2 = gx[i] * gx[i] + gy[i] * gy[i]
            if g2 > best:
                best = g2
                m = i
        if m < 0 or best < eps2:
            break
        outer += 1
        for _ in range(newton_max_steps):
            gmx = gx[m]
            gmy = gy[m]
            if gmx * gmx + gmy * gmy < eps2:
                break
            hxx = 0.0
            hxy = 0.0
            hyy = 0.0
            for j in range(n):
                if j == m:
                    continue
                dij = dist[m, j]
                k = 2.0 / (dij * dij)
                target = l * dij
                dx = pos[m, 0] - pos[j, 0]
                dy = pos[m, 1] - pos[j, 1]
                r2 = dx * dx + dy * dy
                r = math.sqrt(r2)
                if r < 1e-300:
                    r = 1e-300
                r3 = r * r2 + 1e-300
                hxx += k * (1.0 - target * dy * dy / r3)
                hyy += k * (1.0 - target * dx * dx / r3)
                hxy += k * target * dx * dy / r3
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
                for i in range(n):
                    frozen[i] = 0
            else:
                frozen[m] = 1
                break
    return outer


# --------------------------------------------------------------------------
# quadtree
# --------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def build_quadtree_arrays(px, py, leaf_capacity, max_depth):
    n = px.shape[0]
    xmin = px[0]
    xmax = px[0]
    ymin = py[0]
    ymax = py[0]
    for i in range(1, n):
        if px[i] < xmin:
            xmin = px[i]
        if px[i] > xmax:
            xmax = px[i]
        if py[i] < ymin:
            ymin = py[i]
        if py[i] > ymax:
            ymax = py[i]
    cx0 = 0.5 * (xmin + xmax)
    cy0 = 0.5 * (ymin + ymax)
    span = xmax - xmin
    if ymax - ymin > span:
        span = ymax - ymin
    half0 = 0.5 * span * (1.0 + 1e-9)
    if half0 <= 0.0:
        half0 = 1e-9 * (1.0 + abs(cx0) + abs(cy0))
    # round up to a power of two and center the root at the origin: every
    # cell center/halfwidth is then exact in float64, so the adjacency
    # predicates below are exact (corner contacts included)
    half0 = 2.0 ** np.ceil(np.log2(half0))
    sx = np.empty(n, np.float64)
    sy = np.empty(n, np.float64)
    for i in range(n):
        sx[i] = px[i] - cx0
        sy[i] = py[i] - cy0

    cap = 256
    ccx = np.zeros(cap, np.float64)
    ccy = np.zeros(cap, np.float64)
    half = np.zeros(cap, np.float64)
    parent = np.full(cap, -1, np.int64)
    child0 = np.full(cap, -1, np.int64)
    depth = np.zeros(cap, np.int64)
    start = np.zeros(cap, np.int64)
    count = np.zeros(cap, np.int64)

    perm = np.arange(n)
    scratch = np.empty(n, np.int64)
    qcode = np.empty(n, np.int64)

    half[0] = half0
    count[0] = n
    ncells = 1
    head = 0
    while head < ncells:
        c = head
        head += 1
        if count[c] <= leaf_capacity or depth[c] >= max_depth:
            continue
        if ncells + 4 > cap:
            newcap = cap * 2
            ccx2 = np.zeros(newcap, np.float64)
            ccy2 = np.zeros(newcap, np.float64)
            half2 = np.zeros(newcap, np.float64)
            parent2 = np.full(newcap, -1, np.int64)
            child02 = np.full(newcap, -1, np.int64)
            depth2 = np.zeros(newcap, np.int64)
            start2 = np.zeros(newcap, np.int64)
            count2 = np.zeros(newcap, np.int64)
            ccx2[:ncells] = ccx[:ncells]
            ccy2[:ncells] = ccy[:ncells]
            half2[:ncells] = half[:ncells]
            parent2[:ncells] = parent[:ncells]
            child02[:ncells] = child0[:ncells]
            depth2[:ncells] = depth[:ncells]
            start2[:ncells] = start[:ncells]
            count2[:ncells] = count[:ncells]
            ccx = ccx2
            ccy = ccy2
            half = half2
            parent = parent2
            child0 = child02
            depth = depth2
            start = start2
            count = count2
            cap = newcap
        s = start[c]
        e = s + count[c]
        n0 = 0
        n1 = 0
        n2 = 0
        n3 = 0
        for t in range(s, e):
            i = perm[t]
            q = 0
            if sx[i] >= ccx[c]:
                q += 1
            if sy[i] >= ccy[c]:
                q += 2
            qcode[t] = q
            if q == 0:
                n0 += 1
            elif q == 1:
                n1 += 1
            elif q == 2:
                n2 += 1
            else:
                n3 += 1
        o0 = s
        o1 = o0 + n0
        o2 = o1 + n1
        o3 = o2 + n2
        p0 = o0
        p1 = o1
        p2 = o2
        p3 = o3
        for t in range(s, e):
            q = qcode[t]
            if q == 0:
                scratch[p0] = perm[t]
                p0 += 1
            elif q == 1:
                scratch[p1] = perm[t]
                p1 += 1
            elif q == 2:
                scratch[p2] = perm[t]
                p2 += 1
            else:
                scratch[p3] = perm[t]
                p3 += 1
        for t in range(s, e):
            perm[t] = scratch[t]
        hh = half[c] * 0.5
        child0[c] = ncells
        for q in range(4):
            ch = ncells + q
            if q == 0:
                ccx[ch] = ccx[c] - hh
                ccy[ch] = ccy[c] - hh
                start[ch] = o0
                count[ch] = n0
            elif q == 1:
                ccx[ch] = ccx[c] + hh
                ccy[ch] = ccy[c] - hh
                start[ch] = o1
                count[ch] = n1
            elif q == 2:
                ccx[ch] = ccx[c] - hh
                ccy[ch] = ccy[c] + hh
                start[ch] = o2
                count[ch] = n2
            else:
                ccx[ch] = ccx[c] + hh
                ccy[ch] = ccy[c] + hh
                start[ch] = o3
                count[ch] = n3
            half[ch] = hh
            parent[ch] = c
            child0[ch] = -1
            depth[ch] = depth[c] + 1
        ncells += 4
    return (
        sx,
        sy,
        cx0,
        cy0,
        ccx[:ncells].copy(),
        ccy[:ncells].copy(),
        half[:ncells].copy(),
        parent[:ncells].copy(),
        child0[:ncells].copy(),
        depth[:ncells].copy(),
        start[:ncells].copy(),
        count[:ncells].copy(),
        perm,
    )


@njit(cache=True, nogil=True)
def build_neighbor_lists(ccx, ccy, half, child0, depth, nbr, nbr_cnt):
    """Adjacent cells of minimal size not smaller than each cell.

    Descends from the root; a touching cell is reported once it is a leaf
    or as deep as the query cell, so reported cells are never smaller.
    """
    ncells = ccx.shape[0]
    stack = np.empty(4096, np.int64)
    for c in range(ncells):
        hc = half[c]
        dc = depth[c]
        cnt = 0
        sp = 1
        stack[0] = 0
        while sp > 0:
            sp -= 1
            d = stack[sp]
            if d == c:
                continue
            dx = abs(ccx[d] - ccx[c])
            dy = abs(ccy[d] - ccy[c])
            hd = half[d]
            if hd > hc and dx <= hd - hc and dy <= hd - hc:
                # strict ancestor of c: look inside for cells beside c
                f = child0[d]
                if f >= 0:
                    stack[sp] = f
                    stack[sp + 1] = f + 1
                    stack[sp + 2] = f + 2
                    stack[sp + 3] = f + 3
                    sp += 4
                continue
            s = hd + hc
            if dx <= s and dy <= s:
                if child0[d] < 0 or depth[d] == dc:
                    nbr[c, cnt] = d
                    cnt += 1
                else:
                    f = child0[d]
                    stack[sp] = f
                    stack[sp + 1] = f + 1
                    stack[sp + 2] = f + 2
                    stack[sp + 3] = f + 3
                    sp += 4
        nbr_cnt[c] = cnt


@njit(cache=True, nogil=True)
def build_interaction_lists(
    ccx, ccy, half, parent, child0, nbr, nbr_cnt, m2l, m2l_cnt, p2l, p2l_cnt
):
    """Split each cell's far set into same-depth sources (M2L) and coarse
    leaf sources (P2L, entered point-by-point so no source truncation)."""
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
                    # children of a same-depth internal neighbour of the parent
                    for q in range(4):
                        ch = f + q
                        if ch == c:
                            continue
                        dx = abs(ccx[ch] - ccx[c])
                        dy = abs(ccy[ch] - ccy[c])
                        if dx <= 2.0 * hc and dy <= 2.0 * hc:
                            continue  # touches c: handled as near field
                        m2l[c, nm] = ch
                        nm += 1
                else:
                    dx = abs(ccx[e] - ccx[c])
                    dy = abs(ccy[e] - ccy[c])
                    s = half[e] + hc
                    if dx <= s and dy <= s:
                        continue  # touches c: near field
                    p2l[c, npl] = e
                    npl += 1
        m2l_cnt[c] = nm
        p2l_cnt[c] = npl


# --------------------------------------------------------------------------
# FMM passes
# --------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def upward_pass(px, py, perm, start, count, child0, ccx, ccy, order, binom, outgoing):
    ncells = ccx.shape[0]
    dpow = np.empty(order + 1, np.complex128)
    # children are created after parents, so reverse index order is bottom-up
    for c in range(ncells - 1, -1, -1):
        if count[c] == 0:
            continue
        zc = complex(ccx[c], ccy[c])
        f = child0[c]
        if f < 0:
            for t in range(start[c], start[c] + count[c]):
                i = perm[t]
                w = complex(px[i], py[i]) - zc
                outgoing[c, 0] += 1.0
                pw = w
                for k in range(1, order + 1):
                    outgoing[c, k] -= pw / k
                    pw *= w
        else:
            for q in range(4):
                ch = f + q
                if count[ch] == 0:
                    continue
                d = complex(ccx[ch], ccy[ch]) - zc
                dpow[0] = 1.0
                for k in range(1, order + 1):
                    dpow[k] = dpow[k - 1] * d
                a0 = outgoing[ch, 0]
                outgoing[c, 0] += a0
                for l in range(1, order + 1):
                    s = -a0 * dpow[l] / l
                    for k in range(1, l + 1):
                        s += outgoing[ch, k] * dpow[l - k] * binom[l - 1, k - 1]
                    outgoing[c, l] += s


@njit(cache=True, nogil=True)
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
    dpow = np.empty(order + 1, np.complex128)
    ipow = np.empty(order + 1, np.complex128)
    tk = np.empty(order + 1, np.complex128)
    for c in range(ncells):
        if count[c] == 0:
            continue
        p = parent[c]
        if p < 0:
            continue
        zc = complex(ccx[c], ccy[c])
        # L2L from the parent
        d = zc - complex(ccx[p], ccy[p])
        dpow[0] = 1.0
        for k in range(1, order + 1):
            dpow[k] = dpow[k - 1] * d
        for l in range(1, order + 1):
            s = 0.0 + 0.0j
            for k in range(l, order + 1):
                s += incoming[p, k] * binom[k, l] * dpow[k - l]
            incoming[c, l] += s
        # M2L from same-depth far cells
        for t in range(m2l_cnt[c]):
            src = m2l[c, t]
            if count[src] == 0:
                continue
            z0 = complex(ccx[src], ccy[src]) - zc
            inv = 1.0 / z0
            ipow[0] = 1.0
            for k in range(1, order + 1):
                ipow[k] = ipow[k - 1] * inv
            sign = -1.0
            for k in range(1, order + 1):
                tk[k] = sign * outgoing[src, k] * ipow[k]
                sign = -sign
            a0 = outgoing[src, 0]
            for l in range(1, order + 1):
                s = -a0 / l
                for k in range(1, order + 1):
                    s += tk[k] * binom[l + k - 1, k - 1]
                incoming[c, l] += s * ipow[l]
        # P2L from coarse leaf cells
        for t in range(p2l_cnt[c]):
            src = p2l[c, t]
            for u in range(start[src], start[src] + count[src]):
                i = perm[u]
                mm = -1.0 / (zc - complex(px[i], py[i]))
                pw = mm
                for l in range(1, order + 1):
                    incoming[c, l] -= pw / l
                    pw *= mm


@njit(cache=True, nogil=True)
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
    """Local-series far field plus direct near field at every leaf.

    Returns the number of (ordered) coincident pairs that were skipped;
    the nodes involved are flagged in ``degen``.
    """
    ncells = ccx.shape[0]
    skipped = 0
    for c in range(ncells):
        if child0[c] >= 0 or count[c] == 0:
            continue
        zc = complex(ccx[c], ccy[c])
        s0 = start[c]
        e0 = s0 + count[c]
        for t in range(s0, e0):
            i = perm[t]
            zx = px[i]
            zy = py[i]
            u = complex(zx, zy) - zc
            acc = 0.0 + 0.0j
            for l in range(order, 0, -1):
                acc = acc * u + l * incoming[c, l]
            sre = acc.real
            sim = acc.imag
            for t2 in range(s0, e0):
                j = perm[t2]
                if j == i:
                    continue
                dx = zx - px[j]
                dy = zy - py[j]
                r2 = dx * dx + dy * dy
                if r2 <= 0.0:
                    skipped += 1
                    degen[i] = 1
                    continue
                sre += dx / r2
                sim -= dy / r2
            for a in range(nbr_cnt[c]):
                d = nbr[c, a]
                for t2 in range(start[d], start[d] + count[d]):
                    j = perm[t2]
                    dx = zx - px[j]
                    dy = zy - py[j]
                    r2 = dx * dx + dy * dy
                    if r2 <= 0.0:
                        skipped += 1
                        degen[i] = 1
                        continue
                    sre += dx / r2
                    sim -= dy / r2
            # force = k_r * conj(S)
            fx[i] = k_r * sre
            fy[i] = -k_r * sim
    return skipped
