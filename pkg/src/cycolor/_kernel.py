"""JIT-compiled branch runner for reducibility checking.

Mirrors ``reducibility._fast_branch`` exactly (same canonical enumeration
order, same statistics) on flat int64 arrays.  The pure-Python runner stays
as the reference implementation and fallback; equality of the two paths is
asserted in the test suite at small palette sizes.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap

MAX_CLASSES = 160
MAX_FACES = 8
MAX_DEPTH = 6


@njit(cache=True)
def _extend_search(n_int, vf_off, vf, masks, palette_mask, assignment):
    """Most-constrained-vertex backtracking; fills assignment (color bits)."""
    if n_int == 0:
        return True
    remaining = (1 << n_int) - 1
    sel_v = np.empty(n_int, dtype=np.int64)
    sel_bit = np.empty(n_int, dtype=np.int64)
    sel_avail = np.empty(n_int, dtype=np.int64)
    depth = 0
    need_select = True
    while True:
        if need_select:
            if remaining == 0:
                for d in range(depth):
                    assignment[sel_v[d]] = sel_bit[d]
                return True
            best_v = -1
            best_avail = 0
            best_count = 1 << 30
            rem = remaining
            while rem:
                vbit = rem & (-rem)
                rem ^= vbit
                v = 0
                t = vbit >> 1
                while t:
                    v += 1
                    t >>= 1
                used = 0
                for j in range(vf_off[v], vf_off[v + 1]):
                    used |= masks[vf[j]]
                avail = palette_mask & ~used
                cnt = 0
                a = avail
                while a:
                    a &= a - 1
                    cnt += 1
                if cnt == 0:
                    best_v = -2
                    break
                if cnt < best_count:
                    best_count = cnt
                    best_v = v
                    best_avail = avail
                    if cnt == 1:
                        break
            if best_v == -2:
                # dead vertex: backtrack
                need_select = False
                depth -= 1
                if depth < 0:
                    return False
                # undo current depth's bit and advance
                v = sel_v[depth]
                bit = sel_bit[depth]
                for j in range(vf_off[v], vf_off[v + 1]):
                    masks[vf[j]] &= ~bit
                remaining |= 1 << v
                sel_avail[depth] ^= bit
                continue
            sel_v[depth] = best_v
            sel_avail[depth] = best_avail
            bit = best_avail & (-best_avail)
            sel_bit[depth] = bit
            for j in range(vf_off[best_v], vf_off[best_v + 1]):
                masks[vf[j]] |= bit
            remaining &= ~(1 << best_v)
            depth += 1
            need_select = True
            continue
        # advance at current depth (entered after an undo)
        if sel_avail[depth] == 0:
            depth -= 1
            if depth < 0:
                return False
            v = sel_v[depth]
            bit = sel_bit[depth]
            for j in range(vf_off[v], vf_off[v + 1]):
                masks[vf[j]] &= ~bit
            remaining |= 1 << v
            sel_avail[depth] ^= bit
            continue
        v = sel_v[depth]
        bit = sel_avail[depth] & (-sel_avail[depth])
        sel_bit[depth] = bit
        for j in range(vf_off[v], vf_off[v + 1]):
            masks[vf[j]] |= bit
        remaining &= ~(1 << v)
        depth += 1
        need_select = True


@njit(cache=True)
def _low_bits_jit(mask, t):
    out = 0
    for _ in range(t):
        b = mask & (-mask)
        out |= b
        mask ^= b
    return out


@njit(cache=True)
def run_branch(
    H,
    kvec,
    excl,
    palette,
    lb0,
    cm0,
    used0,
    base_r,
    hpos_r,
    nvr,
    vf_off_r,
    vf_r,
    coll_r,
    base_o,
    hpos_o,
    nvo,
    vf_off_o,
    vf_o,
    coll_o,
    stop_at_witness,
    out,
    out_hidden,
):
    """DFS over hidden faces with class refinement; counts stats in ``out``
    (scenarios, extensions, red_true, witness_found)."""
    nfr = base_r.shape[0]
    nfo = base_o.shape[0]
    palette_mask = (1 << palette) - 1

    # per-level class arrays
    lb = np.zeros((MAX_DEPTH, MAX_CLASSES), dtype=np.int64)
    cm = np.zeros((MAX_DEPTH, MAX_CLASSES), dtype=np.int64)
    ncls = np.zeros(MAX_DEPTH, dtype=np.int64)
    used_arr = np.zeros(MAX_DEPTH, dtype=np.int64)
    hidden = np.zeros(MAX_DEPTH, dtype=np.int64)

    n0 = lb0.shape[0]
    for i in range(n0):
        lb[0, i] = lb0[i]
        cm[0, i] = cm0[i]
    ncls[0] = n0
    used_arr[0] = used0

    # per-level odometer
    elig = np.zeros((MAX_DEPTH, MAX_CLASSES), dtype=np.int64)
    caps = np.zeros((MAX_DEPTH, MAX_CLASSES), dtype=np.int64)
    takes = np.zeros((MAX_DEPTH, MAX_CLASSES), dtype=np.int64)
    ne = np.zeros(MAX_DEPTH, dtype=np.int64)
    started = np.zeros(MAX_DEPTH, dtype=np.int64)

    masks_r = np.zeros(nfr, dtype=np.int64)
    masks_o = np.zeros(nfo, dtype=np.int64)
    assign_r = np.zeros(max(nvr, 1), dtype=np.int64)
    assign_o = np.zeros(max(nvo, 1), dtype=np.int64)

    fi = 0
    started[0] = 0

    while fi >= 0:
        if fi == H:
            # leaf
            out[0] += 1
            out[1] += 1
            red_ok = False
            if coll_r == 0:
                for i in range(nfr):
                    hp = hpos_r[i]
                    if hp >= 0:
                        masks_r[i] = base_r[i] | hidden[hp]
                    else:
                        masks_r[i] = base_r[i]
                red_ok = _extend_search(nvr, vf_off_r, vf_r, masks_r, palette_mask, assign_r)
            if red_ok:
                out[2] += 1
                out[1] += 1
                orig_ok = False
                if coll_o == 0:
                    for i in range(nfo):
                        hp = hpos_o[i]
                        if hp >= 0:
                            masks_o[i] = base_o[i] | hidden[hp]
                        else:
                            masks_o[i] = base_o[i]
                    orig_ok = _extend_search(
                        nvo, vf_off_o, vf_o, masks_o, palette_mask, assign_o
                    )
                if not orig_ok:
                    if out[3] == 0:
                        out[3] = 1
                        for h in range(H):
                            out_hidden[h] = hidden[h]
                    if stop_at_witness:
                        return
            fi -= 1
            continue
        if started[fi] == 0:
            # initialize odometer for this face level
            started[fi] = 1
            cnt = 0
            for ci in range(ncls[fi]):
                if (lb[fi, ci] & excl[fi]) == 0:
                    elig[fi, cnt] = ci
                    cnt += 1
            ne[fi] = cnt
            for p in range(cnt):
                ci = elig[fi, p]
                c = cm[fi, ci]
                pc = 0
                while c:
                    c &= c - 1
                    pc += 1
                caps[fi, p] = pc
            for p in range(cnt):
                takes[fi, p] = 0
            # fall through to evaluate the all-zero take-vector
        else:
            # advance odometer: lexicographic counter over take-vectors with
            # per-position caps and prefix sums bounded by k
            p = ne[fi] - 1
            while p >= 0:
                prefix = 0
                for q in range(p):
                    prefix += takes[fi, q]
                limit = caps[fi, p]
                if kvec[fi] - prefix < limit:
                    limit = kvec[fi] - prefix
                if takes[fi, p] < limit:
                    takes[fi, p] += 1
                    for q in range(p + 1, ne[fi]):
                        takes[fi, q] = 0
                    break
                p -= 1
            if p < 0:
                started[fi] = 0
                fi -= 1
                continue
        # evaluate current take-vector
        s = 0
        for q in range(ne[fi]):
            s += takes[fi, q]
        fresh = kvec[fi] - s
        if fresh < 0:
            continue
        if used_arr[fi] + fresh > palette:
            continue
        # build child classes at level fi+1
        nc = 0
        taken_mask = 0
        pos = 0
        for ci in range(ncls[fi]):
            t = 0
            if pos < ne[fi] and elig[fi, pos] == ci:
                t = takes[fi, pos]
                pos += 1
            lcur = lb[fi, ci]
            ccur = cm[fi, ci]
            if t > 0:
                tk = _low_bits_jit(ccur, t)
                taken_mask |= tk
                lb[fi + 1, nc] = lcur
                cm[fi + 1, nc] = tk
                nc += 1
                rest = ccur ^ tk
                if rest != 0:
                    lb[fi + 1, nc] = lcur
                    cm[fi + 1, nc] = rest
                    nc += 1
            else:
                lb[fi + 1, nc] = lcur
                cm[fi + 1, nc] = ccur
                nc += 1
        if fresh > 0:
            fm = ((1 << fresh) - 1) << used_arr[fi]
            taken_mask |= fm
            lb[fi + 1, nc] = 0
            cm[fi + 1, nc] = fm
            nc += 1
        ncls[fi + 1] = nc
        used_arr[fi + 1] = used_arr[fi] + fresh
        hidden[fi] = taken_mask
        started[fi + 1] = 0
        fi += 1
