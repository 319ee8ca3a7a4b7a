"""Hot loops over prefix-sum arrays.

Every kernel here is compiled with numba unless ``RECTPART_DISABLE_NUMBA`` is
set, in which case the same source runs as plain Python over numpy arrays.

Conventions: a *k-row workload* is an int64 array ``pre`` of shape
``(k, n + 1)`` whose rows are non-decreasing prefix sums starting at 0. The
load of the interval of positions ``(a, b]`` is ``max_r pre[r, b] - pre[r, a]``.
With ``k == 1`` this is an ordinary 1D chain; ``k > 1`` gives the
max-over-stripes workload used by rectilinear refinement.
"""
import numpy as np

from ._jit import njit


@njit
def interval_load(pre, a, b):
    best = 0
    for r in range(pre.shape[0]):
        v = pre[r, b] - pre[r, a]
        if v > best:
            best = v
    return best


@njit
def max_element(pre):
    best = 0
    for r in range(pre.shape[0]):
        for i in range(1, pre.shape[1]):
            v = pre[r, i] - pre[r, i - 1]
            if v > best:
                best = v
    return best


@njit
def greedy_end(pre, a, target, lo, hi):
    """Largest ``b`` in ``[lo, hi]`` with ``load(a, b) <= target``.

    Caller guarantees the condition holds at ``lo``.
    """
    best = hi
    for r in range(pre.shape[0]):
        base = pre[r, a]
        if pre[r, best] - base <= target:
            continue
        v = base + target
        # pre[r, lo..best] is sorted; last index with value <= v
        idx = lo + np.searchsorted(pre[r, lo:best + 1], v, side="right") - 1
        if idx < best:
            best = idx
    return best


@njit
def _sliced_end(row, a, target, lo, hi, chunk, cptr):
    # Han's slicing: locate the chunk by forward scan (amortised O(1) since
    # successive targets increase), then binary search inside it.
    base = row[a]
    if row[hi] - base <= target:
        return hi, cptr
    v = base + target
    c = lo // chunk
    if cptr > c:
        c = cptr
    while (c + 1) * chunk <= hi and row[(c + 1) * chunk] <= v:
        c += 1
    s = c * chunk
    if s < lo:
        s = lo
    e = (c + 1) * chunk
    if e > hi:
        e = hi
    idx = s + np.searchsorted(row[s:e + 1], v, side="right") - 1
    return idx, c


@njit
def probe(pre, start, r, target, borders, lo_b, hi_b, chunk):
    """Greedy feasibility test of ``target`` on positions ``(start, n]``.

    Fills ``borders[0:r-1]`` with the ends of the first ``r - 1`` maximal
    intervals and returns whether the remainder fits in the last one.
    ``lo_b``/``hi_b`` narrow each border search; pass 0 and n to disable.
    """
    n = pre.shape[1] - 1
    a = start
    sliced = chunk > 0 and pre.shape[0] == 1
    cptr = 0
    for t in range(r - 1):
        if a == n:
            borders[t] = n
            continue
        lo = a
        if lo_b[t] > lo:
            lo = lo_b[t]
        hi = n
        if hi_b[t] < hi:
            hi = hi_b[t]
        if hi < lo or interval_load(pre, a, lo) > target:
            lo = a
            hi = n
        if sliced:
            b, cptr = _sliced_end(pre[0], a, target, lo, hi, chunk, cptr)
        else:
            b = greedy_end(pre, a, target, lo, hi)
        borders[t] = b
        a = b
    return interval_load(pre, a, n) <= target


@njit
def reverse_cuts(pre, r, target, out):
    """Right-to-left greedy: componentwise smallest borders reaching ``target``."""
    n = pre.shape[1] - 1
    b = n
    for t in range(r - 2, -1, -1):
        a = 0
        for row in range(pre.shape[0]):
            v = pre[row, b] - target
            if v <= pre[row, 0]:
                continue
            idx = np.searchsorted(pre[row, :b + 1], v, side="left")
            if idx > a:
                a = idx
        out[t] = a
        b = a
    return interval_load(pre, 0, b) <= target


@njit
def direct_cut_borders(row, m, out):
    """Cumulative-threshold DirectCut on one prefix row (exact integer thresholds)."""
    total = row[row.shape[0] - 1]
    q = total // m
    rem = total - q * m
    for t in range(1, m):
        # ceil(t * total / m) without overflowing t * total
        extra = t * rem
        v = t * q + extra // m
        if extra % m != 0:
            v += 1
        out[t - 1] = np.searchsorted(row, v, side="left")


@njit
def chain_lmax(pre, borders):
    a = 0
    best = 0
    for t in range(borders.shape[0]):
        v = interval_load(pre, a, borders[t])
        if v > best:
            best = v
        a = borders[t]
    v = interval_load(pre, a, pre.shape[1] - 1)
    if v > best:
        best = v
    return best


@njit
def _first_at_least(pre, a, lo, hi, value):
    # smallest i in [lo, hi] with load(a, i) >= value; hi + 1 if none
    if interval_load(pre, a, hi) < value:
        return hi + 1
    l = lo
    h = hi
    while l < h:
        mid = (l + h) // 2
        if interval_load(pre, a, mid) >= value:
            h = mid
        else:
            l = mid + 1
    return l


@njit
def nicol(pre, m, lb, ub, use_bounds, chunk):
    """Optimal bottleneck value of an m-way chain partition (NicolPlus).

    ``ub`` must be achievable and ``lb`` must not exceed the optimum. The
    search keeps a running upper bound (best feasible probe), a running lower
    bound (one above the largest infeasible probe) and, when ``use_bounds``
    is set, per-border index windows reused across probes.
    """
    n = pre.shape[1] - 1
    if m == 1:
        return interval_load(pre, 0, n)
    best = ub
    lo_b = np.zeros(m, np.int64)
    hi_b = np.full(m, n, np.int64)
    tmp = np.zeros(m, np.int64)
    i0 = 0
    for p in range(m - 1):
        if best <= lb:
            return best
        r = m - p
        h = _first_at_least(pre, i0, i0, n, best)
        lo = _first_at_least(pre, i0, i0, n, lb)
        hi = h
        if hi > n:
            hi = n + 1
        if lo > hi:
            lo = hi
        while lo < hi:
            mid = (lo + hi) // 2
            target = interval_load(pre, i0, mid)
            if use_bounds:
                ok = probe(pre, i0, r, target, tmp, lo_b, hi_b, chunk)
            else:
                ok = _probe_plain(pre, i0, r, target, tmp)
            if ok:
                hi = mid
                if target < best:
                    best = target
                if use_bounds:
                    for t in range(r - 1):
                        hi_b[t] = tmp[t]
            else:
                lo = mid + 1
                if target + 1 > lb:
                    lb = target + 1
                if use_bounds:
                    for t in range(r - 1):
                        lo_b[t] = tmp[t]
            if best <= lb:
                return best
        istar = lo
        if istar == i0 or istar > n:
            # zero-load remainder; the whole rest always fits otherwise
            return best
        i0 = istar - 1
        if use_bounds:
            for t in range(r - 2):
                hi_b[t] = hi_b[t + 1]
    v = interval_load(pre, i0, n)
    if v < best:
        best = v
    return best


@njit
def _probe_plain(pre, start, r, target, borders):
    n = pre.shape[1] - 1
    a = start
    for t in range(r - 1):
        if a == n:
            borders[t] = n
            continue
        b = greedy_end(pre, a, target, a, n)
        borders[t] = b
        a = b
    return interval_load(pre, a, n) <= target


# ---------------------------------------------------------------------------
# several independent chains: ``flat`` concatenates each chain's prefix row,
# chain s occupying flat[offs[s]:offs[s + 1]] (length n_s + 1)


@njit
def _chain_load(flat, base, a, b):
    return flat[base + b] - flat[base + a]


@njit
def _chain_end(flat, base, n_s, a, target, chunk, cptr):
    row = flat[base:base + n_s + 1]
    if chunk > 0:
        return _sliced_end(row, a, target, a, n_s, chunk, cptr)
    if row[n_s] - row[a] <= target:
        return n_s, cptr
    idx = np.searchsorted(row[a:], row[a] + target, side="right") - 1
    return a + idx, cptr


@njit
def probe_multi(flat, offs, s0, i0, r, target, counts, borders, chunk):
    """Greedy feasibility of ``target`` over chains ``s0..`` starting at ``i0``.

    On success ``counts[s]`` holds the interval count of each chain (spare
    processors appended to the last chain as empty intervals) and
    ``borders`` the interval ends, chain by chain. Returns the number of
    intervals used, or -1 when infeasible.
    """
    nchains = offs.shape[0] - 1
    used = 0
    pos = 0
    for s in range(s0, nchains):
        base = offs[s]
        n_s = offs[s + 1] - base - 1
        a = i0 if s == s0 else 0
        c = 0
        cptr = 0
        while True:
            b, cptr = _chain_end(flat, base, n_s, a, target, chunk, cptr)
            if b == a and a < n_s:
                return -1
            used += 1
            if used > r:
                return -1
            borders[pos] = b
            pos += 1
            c += 1
            a = b
            if a >= n_s:
                break
        counts[s] = c
    last = nchains - 1
    if used < r:
        end = offs[last + 1] - offs[last] - 1
        for _ in range(r - used):
            borders[pos] = end
            pos += 1
        counts[last] += r - used
    return used


@njit
def nicol_multi(flat, offs, m, lb, ub):
    """Optimal bottleneck for splitting ``m`` processors over several chains.

    Intervals are visited in the order the multi-chain probe creates them;
    each chain needs at least one processor (``m >= chain count``).
    """
    nchains = offs.shape[0] - 1
    best = ub
    counts = np.zeros(nchains, np.int64)
    borders = np.zeros(m + 1, np.int64)
    s = 0
    i0 = 0
    r = m
    while True:
        if best <= lb:
            return best
        base = offs[s]
        n_s = offs[s + 1] - base - 1
        if r == nchains - s:
            cand = _chain_load(flat, base, i0, n_s)
            for s2 in range(s + 1, nchains):
                v = flat[offs[s2 + 1] - 1] - flat[offs[s2]]
                if v > cand:
                    cand = v
            if cand < best:
                best = cand
            return best
        # smallest i with load(i0, i) >= best / >= lb inside chain s
        h = n_s + 1
        if _chain_load(flat, base, i0, n_s) >= best:
            l = i0
            hh = n_s
            while l < hh:
                mid = (l + hh) // 2
                if _chain_load(flat, base, i0, mid) >= best:
                    hh = mid
                else:
                    l = mid + 1
            h = l
        lo = n_s + 1
        if _chain_load(flat, base, i0, n_s) >= lb:
            l = i0
            hh = n_s
            while l < hh:
                mid = (l + hh) // 2
                if _chain_load(flat, base, i0, mid) >= lb:
                    hh = mid
                else:
                    l = mid + 1
            lo = l
        hi = h
        if lo > hi:
            lo = hi
        while lo < hi:
            mid = (lo + hi) // 2
            target = _chain_load(flat, base, i0, mid)
            used = probe_multi(flat, offs, s, i0, r, target, counts, borders, 0)
            if used >= 0:
                hi = mid
                if target < best:
                    best = target
            else:
                lo = mid + 1
                if target + 1 > lb:
                    lb = target + 1
            if best <= lb:
                return best
        istar = lo
        if istar == n_s + 1:
            # the rest of chain s is below the optimum: it forms one interval
            s += 1
            i0 = 0
            r -= 1
            continue
        if istar <= i0 + 1:
            # empty intervals are infeasible here, so the candidate is optimal
            return best
        i0 = istar - 1
        r -= 1
    return best


# ---------------------------------------------------------------------------
# 2D helpers; gamma is the (n1 + 1, n2 + 1) padded prefix array


@njit
def rect_sum(gamma, x1, x2, y1, y2):
    # 1-based inclusive; empty ranges give 0
    if x2 < x1 or y2 < y1:
        return 0
    return gamma[x2, y2] - gamma[x1 - 1, y2] - gamma[x2, y1 - 1] + gamma[x1 - 1, y1 - 1]


@njit
def _part_load(gamma, x1, x2, y1, y2, axis, c, left):
    # load of the part left (or right) of cut c (cut after index c on axis)
    if axis == 0:
        if left:
            return rect_sum(gamma, x1, c, y1, y2)
        return rect_sum(gamma, c + 1, x2, y1, y2)
    if left:
        return rect_sum(gamma, x1, x2, y1, c)
    return rect_sum(gamma, x1, x2, c + 1, y2)


@njit
def bisect_cut(gamma, x1, x2, y1, y2, axis, jl, jr, cmin, cmax):
    """Cut in ``[cmin, cmax]`` minimising ``max(L_left / jl, L_right / jr)``.

    Returns ``(cut, num, den)`` where ``num / den`` is the attained value.
    Left load grows with the cut, so the crossover is found by binary search
    and its two neighbours compared; ties keep the smaller cut.
    """
    lo = cmin
    hi = cmax
    # smallest c with L_left * jr >= L_right * jl
    if _part_load(gamma, x1, x2, y1, y2, axis, hi, True) * jr < _part_load(gamma, x1, x2, y1, y2, axis, hi, False) * jl:
        lo = hi
    else:
        while lo < hi:
            mid = (lo + hi) // 2
            ll = _part_load(gamma, x1, x2, y1, y2, axis, mid, True)
            lr = _part_load(gamma, x1, x2, y1, y2, axis, mid, False)
            if ll * jr >= lr * jl:
                hi = mid
            else:
                lo = mid + 1
    best_c = -1
    best_num = 0
    best_den = 1
    start = lo - 1
    if start < cmin:
        start = cmin
    for c in range(start, lo + 1):
        if c > cmax:
            break
        ll = _part_load(gamma, x1, x2, y1, y2, axis, c, True)
        lr = _part_load(gamma, x1, x2, y1, y2, axis, c, False)
        # value = max(ll / jl, lr / jr)
        if ll * jr >= lr * jl:
            num = ll
            den = jl
        else:
            num = lr
            den = jr
        if best_c < 0 or num * best_den < best_num * den:
            best_c = c
            best_num = num
            best_den = den
    return best_c, best_num, best_den


@njit
def relaxed_scan(gamma, x1, x2, y1, y2, m, axis):
    """Best (cut, j) on one axis for the average-load relaxation.

    Scans every cut; for each, the optimal processor split lies at the floor
    or ceiling of ``m * L_left / L`` clamped to the cell-count window.
    Returns ``(cut, j, num, den)``, or cut ``-1`` when no split is possible.
    """
    if axis == 0:
        length = x2 - x1 + 1
        width = y2 - y1 + 1
    else:
        length = y2 - y1 + 1
        width = x2 - x1 + 1
    lo_edge = x1 if axis == 0 else y1
    total = rect_sum(gamma, x1, x2, y1, y2)
    best_c = -1
    best_j = 0
    best_num = 0
    best_den = 1
    cand = np.zeros(4, np.int64)
    for k in range(1, length):
        c = lo_edge + k - 1
        area_l = k * width
        area_r = (length - k) * width
        jmin = m - area_r
        if jmin < 1:
            jmin = 1
        jmax = area_l
        if jmax > m - 1:
            jmax = m - 1
        if jmin > jmax:
            continue
        ll = _part_load(gamma, x1, x2, y1, y2, axis, c, True)
        lr = total - ll
        if total > 0:
            jf = (m * ll) // total
        else:
            jf = jmin
        cand[0] = jf
        cand[1] = jf + 1
        cand[2] = jmin
        cand[3] = jmax
        for q in range(4):
            j = cand[q]
            if j < jmin:
                j = jmin
            if j > jmax:
                j = jmax
            if ll * (m - j) >= lr * j:
                num = ll
                den = j
            else:
                num = lr
                den = m - j
            better = False
            if best_c < 0:
                better = True
            else:
                lhs = num * best_den
                rhs = best_num * den
                if lhs < rhs:
                    better = True
                elif lhs == rhs and c == best_c and j < best_j:
                    better = True
            if better:
                best_c = c
                best_j = j
                best_num = num
                best_den = den
    return best_c, best_j, best_num, best_den


@njit
def rect_loads(gamma, rects):
    out = np.empty(rects.shape[0], np.int64)
    for i in range(rects.shape[0]):
        out[i] = rect_sum(gamma, rects[i, 0], rects[i, 1], rects[i, 2], rects[i, 3])
    return out


@njit
def overlap_pairs(rects):
    """All index pairs of intersecting rectangles, O(m^2)."""
    m = rects.shape[0]
    out = []
    for i in range(m):
        a0 = rects[i, 0]
        a1 = rects[i, 1]
        b0 = rects[i, 2]
        b1 = rects[i, 3]
        for j in range(i + 1, m):
            if rects[j, 0] <= a1 and a0 <= rects[j, 1] and rects[j, 2] <= b1 and b0 <= rects[j, 3]:
                out.append((i, j))
    return out
