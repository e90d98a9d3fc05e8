"""Compiled trajectory kernels for bulk Monte Carlo.

Randomness is counter-based: every trial index maps to its own splitmix64
stream derived from the master seed, so results do not depend on how trials
are scheduled across threads.  Weights stay in log2 domain; per-configuration
sampling subtracts the running maximum before exponentiating.

Jump-chain sampling organizes the configuration-changing transitions in two
tiers.  Edges are bucketed by their exact normalized log-weight; buckets split
into slots by source type (mutant/resident), so one step samples a slot and
then a uniform member.  Large uniform fans (>= _FAN_THRESHOLD edges out of or
into a single vertex within one bucket) are promoted to aggregate groups whose
active count is read off a type-partitioned member array, making flips of
high-degree vertices (star centers, complete-graph rows) O(1) instead of
O(degree).
"""

from __future__ import annotations

import numba as nb
import numpy as np

U64 = np.uint64
GOLDEN = U64(0x9E3779B97F4A7C15)
_M1 = U64(0xBF58476D1CE4E5B9)
_M2 = U64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0  # 2^-53

OUTCOME_EXTINCT = 0
OUTCOME_FIXED = 1
OUTCOME_TIMEOUT = 2

_FAN_THRESHOLD = 48


@nb.njit(nb.uint64(nb.uint64), inline="always", cache=True)
def _mix64(z):
    z = (z ^ (z >> U64(30))) * _M1
    z = (z ^ (z >> U64(27))) * _M2
    return z ^ (z >> U64(31))


def trial_seeds(master_seed: int, start: int, count: int) -> np.ndarray:
    """Per-trial splitmix64 states for trial indices start..start+count-1."""
    idx = np.arange(start, start + count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (idx + U64(1)) * GOLDEN + U64(master_seed & 0xFFFFFFFFFFFFFFFF)
        z = (z ^ (z >> U64(30))) * _M1
        z = (z ^ (z >> U64(27))) * _M2
        z ^= z >> U64(31)
    return z


@nb.njit(nb.float64(nb.uint64[:]), inline="always", cache=True)
def _u01(state):
    state[0] += GOLDEN
    return (_mix64(state[0]) >> U64(11)) * _INV53


@nb.njit(cache=True, nogil=True)
def _pick_initial(init_cum, state):
    x = _u01(state)
    lo, hi = 0, len(init_cum) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if init_cum[mid] > x:
            hi = mid
        else:
            lo = mid + 1
    return lo


@nb.njit(cache=True, nogil=True, inline="always")
def _slot_insert(e, s, slot_start, slot_count, slot_items, pos_in_slot, cur_slot,
                 active_slots, as_pos, n_as):
    i = slot_count[s]
    slot_items[slot_start[s] + i] = e
    pos_in_slot[e] = i
    cur_slot[e] = s
    slot_count[s] = i + 1
    if i == 0:
        as_pos[s] = n_as
        active_slots[n_as] = s
        n_as += 1
    return n_as


@nb.njit(cache=True, nogil=True, inline="always")
def _slot_remove(e, slot_start, slot_count, slot_items, pos_in_slot, cur_slot,
                 active_slots, as_pos, n_as):
    s = cur_slot[e]
    i = pos_in_slot[e]
    last = slot_items[slot_start[s] + slot_count[s] - 1]
    slot_items[slot_start[s] + i] = last
    pos_in_slot[last] = i
    slot_count[s] -= 1
    cur_slot[e] = -1
    if slot_count[s] == 0:
        p = as_pos[s]
        lasts = active_slots[n_as - 1]
        active_slots[p] = lasts
        as_pos[lasts] = p
        as_pos[s] = -1
        n_as -= 1
    return n_as


@nb.njit(cache=True, nogil=True, inline="always")
def _group_flip(v, now_mutant, g, n, g_mstart, g_members, g_mc, g_pos):
    """Move v across the mutant-prefix boundary of group g's member array."""
    base = g * n
    p = g_pos[base + v]
    start = g_mstart[g]
    if now_mutant:
        b = g_mc[g]
        other = g_members[start + b]
        g_members[start + b] = v
        g_members[start + p] = other
        g_pos[base + v] = b
        g_pos[base + other] = p
        g_mc[g] = b + 1
    else:
        b = g_mc[g] - 1
        other = g_members[start + b]
        g_members[start + b] = v
        g_members[start + p] = other
        g_pos[base + v] = b
        g_pos[base + other] = p
        g_mc[g] = b


@nb.njit(cache=True, nogil=True)
def _jump_trial(esrc, edst, bucket_lw, bid, inc_ptr, inc_eid, n, log2r, init_cum,
                state, max_steps,
                slot_start, slot_count, slot_items, pos_in_slot, cur_slot,
                active_slots, as_pos, slot_w,
                n_groups, g_kind, g_owner, g_lw, g_mstart, g_msize, g_members,
                g_mc, g_pos, g_w, vg_ptr, vg_gid):
    """One jump-chain trajectory over slots + promoted fan groups."""
    mutant = np.zeros(n, dtype=np.uint8)
    v0 = _pick_initial(init_cum, state)
    mutant[v0] = 1
    k = 1
    n_as = 0
    for j in range(inc_ptr[v0], inc_ptr[v0 + 1]):
        e = inc_eid[j]
        # every incident simple non-loop edge of the lone mutant is active
        s = 2 * bid[e] + mutant[esrc[e]]
        n_as = _slot_insert(e, s, slot_start, slot_count, slot_items,
                            pos_in_slot, cur_slot, active_slots, as_pos, n_as)
    for j in range(vg_ptr[v0], vg_ptr[v0 + 1]):
        _group_flip(v0, True, vg_gid[j], n, g_mstart, g_members, g_mc, g_pos)

    steps = 0
    while 0 < k < n:
        if steps >= max_steps:
            break
        # pass 1: log-weights and running max over slots and groups
        hi = -np.inf
        for i in range(n_as):
            s = active_slots[i]
            lw = bucket_lw[s >> 1]
            if s & 1:
                lw += log2r
            slot_w[i] = lw
            if lw > hi:
                hi = lw
        for g in range(n_groups):
            if g_kind[g] == 0:
                # fan out of owner u: active members are opposite to type(u)
                if mutant[g_owner[g]]:
                    cnt = g_msize[g] - g_mc[g]
                    lw = g_lw[g] + log2r
                else:
                    cnt = g_mc[g]
                    lw = g_lw[g]
            else:
                # fan into owner w: active sources are opposite to type(w)
                if mutant[g_owner[g]]:
                    cnt = g_msize[g] - g_mc[g]
                    lw = g_lw[g]
                else:
                    cnt = g_mc[g]
                    lw = g_lw[g] + log2r
            if cnt > 0:
                g_w[g] = lw
                if lw > hi:
                    hi = lw
            else:
                g_w[g] = np.nan  # inactive marker
        # pass 2: shifted weights and total
        total = 0.0
        for i in range(n_as):
            p = slot_count[active_slots[i]] * 2.0 ** (slot_w[i] - hi)
            slot_w[i] = p
            total += p
        for g in range(n_groups):
            if g_w[g] == g_w[g]:
                if g_kind[g] == 0:
                    cnt = (g_msize[g] - g_mc[g]) if mutant[g_owner[g]] else g_mc[g]
                else:
                    cnt = (g_msize[g] - g_mc[g]) if mutant[g_owner[g]] else g_mc[g]
                p = cnt * 2.0 ** (g_w[g] - hi)
                g_w[g] = p
                total += p
        # pass 3: pick a slot or group, then the flipped vertex
        x = _u01(state) * total
        acc = 0.0
        v = -1
        src_mut = False
        for i in range(n_as):
            acc += slot_w[i]
            if acc > x:
                s = active_slots[i]
                j = int(_u01(state) * slot_count[s])
                if j >= slot_count[s]:
                    j = slot_count[s] - 1
                e = slot_items[slot_start[s] + j]
                v = edst[e]
                src_mut = mutant[esrc[e]] == 1
                break
        if v < 0:
            g_sel = -1
            for g in range(n_groups):
                if g_w[g] == g_w[g]:
                    g_sel = g  # last active group is the rounding fallback
                    acc += g_w[g]
                    if acc > x:
                        break
            if g_sel < 0:
                # rounding exhausted the mass inside the slots; take the last one
                s = active_slots[n_as - 1]
                e = slot_items[slot_start[s] + slot_count[s] - 1]
                v = edst[e]
                src_mut = mutant[esrc[e]] == 1
        if v < 0:
            owner = g_owner[g_sel]
            if g_kind[g_sel] == 0:
                # pick a uniform opposite-type member as the flipped target
                mc = g_mc[g_sel]
                if mutant[owner]:
                    cnt = g_msize[g_sel] - mc
                    j = mc + int(_u01(state) * cnt)
                    if j >= g_msize[g_sel]:
                        j = g_msize[g_sel] - 1
                else:
                    j = int(_u01(state) * mc)
                    if j >= mc:
                        j = mc - 1
                v = g_members[g_mstart[g_sel] + j]
                src_mut = mutant[owner] == 1
            else:
                # all members flip the same destination: the owner
                v = owner
                src_mut = mutant[owner] == 0
        if src_mut:
            mutant[v] = 1
            k += 1
        else:
            mutant[v] = 0
            k -= 1
        # flipping v toggles the activity of every incident simple edge
        for jj in range(inc_ptr[v], inc_ptr[v + 1]):
            e2 = inc_eid[jj]
            if cur_slot[e2] >= 0:
                n_as = _slot_remove(e2, slot_start, slot_count, slot_items,
                                    pos_in_slot, cur_slot, active_slots, as_pos,
                                    n_as)
            else:
                s = 2 * bid[e2] + mutant[esrc[e2]]
                n_as = _slot_insert(e2, s, slot_start, slot_count, slot_items,
                                    pos_in_slot, cur_slot, active_slots, as_pos,
                                    n_as)
        # and repartitions v inside every fan group that contains it
        now = mutant[v] == 1
        for jj in range(vg_ptr[v], vg_ptr[v + 1]):
            _group_flip(v, now, vg_gid[jj], n, g_mstart, g_members, g_mc, g_pos)
        steps += 1

    # reset shared structures for the next trial
    while n_as > 0:
        s = active_slots[n_as - 1]
        for i in range(slot_count[s]):
            cur_slot[slot_items[slot_start[s] + i]] = -1
        slot_count[s] = 0
        as_pos[s] = -1
        n_as -= 1
    for g in range(n_groups):
        g_mc[g] = 0  # member order is arbitrary once everyone is resident
    if 0 < k < n:
        return OUTCOME_TIMEOUT, steps
    return (OUTCOME_FIXED if k == n else OUTCOME_EXTINCT), steps


@nb.njit(cache=True, nogil=True)
def _full_trial(edst, elogw, rowlog, indptr, n, r, log2r, init_cum, state, max_steps):
    mutant = np.zeros(n, dtype=np.uint8)
    v0 = _pick_initial(init_cum, state)
    mutant[v0] = 1
    k = 1
    steps = 0
    jump_steps = 0
    while 0 < k < n:
        if steps >= max_steps:
            return OUTCOME_TIMEOUT, jump_steps
        # reproducer ~ fitness
        x = _u01(state) * (r * k + (n - k))
        if x < r * k:
            j = int(_u01(state) * k)
            want = 1
        else:
            j = int(_u01(state) * (n - k))
            want = 0
        u = -1
        for w in range(n):
            if mutant[w] == want:
                if j == 0:
                    u = w
                    break
                j -= 1
        # death target ~ W[u, .]
        lo, hi_e = indptr[u], indptr[u + 1]
        mx = elogw[lo]
        for e in range(lo + 1, hi_e):
            if elogw[e] > mx:
                mx = elogw[e]
        total = 0.0
        for e in range(lo, hi_e):
            total += 2.0 ** (elogw[e] - mx)
        y = _u01(state) * total
        acc = 0.0
        sel = hi_e - 1
        for e in range(lo, hi_e):
            acc += 2.0 ** (elogw[e] - mx)
            if acc > y:
                sel = e
                break
        v = edst[sel]
        if mutant[u] != mutant[v]:
            jump_steps += 1
            if mutant[u]:
                mutant[v] = 1
                k += 1
            else:
                mutant[v] = 0
                k -= 1
        steps += 1
    return (OUTCOME_FIXED if k == n else OUTCOME_EXTINCT), jump_steps


@nb.njit(cache=True, nogil=True)
def run_block(esrc, edst, elogw, rowlog, indptr, n, r, init_cum, seeds,
              jump_mode, max_steps, outcomes, jump_steps):
    """Run trials for a contiguous block; write per-trial results in place."""
    log2r = np.log2(r)
    m = len(esrc)

    # bucket edges by exact normalized log-weight
    base_lw = np.empty(m, dtype=np.float64)
    for e in range(m):
        base_lw[e] = elogw[e] - rowlog[esrc[e]]
    order = np.argsort(base_lw)
    bid = np.empty(m, dtype=np.int64)
    bucket_lw = np.empty(m, dtype=np.float64)
    n_buckets = 0
    for i in range(m):
        e = order[i]
        if n_buckets == 0 or base_lw[e] != bucket_lw[n_buckets - 1]:
            bucket_lw[n_buckets] = base_lw[e]
            n_buckets += 1
        bid[e] = n_buckets - 1

    # promote large uniform fans to groups; home[e] = group id or -1
    home = np.full(m, -1, dtype=np.int64)
    bcount = np.zeros(n_buckets, dtype=np.int64)
    max_groups = 2 * (m // _FAN_THRESHOLD + 1)
    g_kind = np.zeros(max_groups, dtype=np.int64)
    g_owner = np.zeros(max_groups, dtype=np.int64)
    g_lw = np.zeros(max_groups, dtype=np.float64)
    g_mstart = np.zeros(max_groups, dtype=np.int64)
    g_msize = np.zeros(max_groups, dtype=np.int64)
    g_members = np.empty(m, dtype=np.int64)
    n_groups = 0
    mfill = 0
    # out-fans: all non-loop edges of one source sharing a bucket
    for u in range(n):
        lo, hi = indptr[u], indptr[u + 1]
        for e in range(lo, hi):
            if edst[e] != u:
                bcount[bid[e]] += 1
        for e in range(lo, hi):
            b = bid[e]
            if edst[e] != u and bcount[b] >= _FAN_THRESHOLD and home[e] == -1:
                # open the group on first contact
                found = -1
                for g in range(n_groups):
                    if g_kind[g] == 0 and g_owner[g] == u and g_lw[g] == bucket_lw[b]:
                        found = g
                        break
                if found == -1:
                    found = n_groups
                    g_kind[found] = 0
                    g_owner[found] = u
                    g_lw[found] = bucket_lw[b]
                    g_mstart[found] = mfill
                    g_msize[found] = 0
                    n_groups += 1
                home[e] = found
                g_members[mfill] = edst[e]
                g_msize[found] += 1
                mfill += 1
        for e in range(lo, hi):  # reset the scratch counters
            bcount[bid[e]] = 0
    # in-fans over the remaining simple edges
    in_count = np.zeros(n, dtype=np.int64)
    for e in range(m):
        if home[e] == -1 and esrc[e] != edst[e]:
            in_count[edst[e]] += 1
    in_ptr = np.zeros(n + 1, dtype=np.int64)
    for u in range(n):
        in_ptr[u + 1] = in_ptr[u] + in_count[u]
    in_fill = in_ptr[:-1].copy()
    in_eid = np.empty(in_ptr[n], dtype=np.int64)
    for e in range(m):
        if home[e] == -1 and esrc[e] != edst[e]:
            in_eid[in_fill[edst[e]]] = e
            in_fill[edst[e]] += 1
    for w in range(n):
        lo, hi = in_ptr[w], in_ptr[w + 1]
        for j in range(lo, hi):
            bcount[bid[in_eid[j]]] += 1
        for j in range(lo, hi):
            e = in_eid[j]
            b = bid[e]
            if bcount[b] >= _FAN_THRESHOLD and home[e] == -1:
                found = -1
                for g in range(n_groups):
                    if g_kind[g] == 1 and g_owner[g] == w and g_lw[g] == bucket_lw[b]:
                        found = g
                        break
                if found == -1:
                    found = n_groups
                    g_kind[found] = 1
                    g_owner[found] = w
                    g_lw[found] = bucket_lw[b]
                    g_mstart[found] = mfill
                    g_msize[found] = 0
                    n_groups += 1
                home[e] = found
                g_members[mfill] = esrc[e]
                g_msize[found] += 1
                mfill += 1
        for j in range(lo, hi):
            bcount[bid[in_eid[j]]] = 0

    g_mc = np.zeros(max(n_groups, 1), dtype=np.int64)
    g_w = np.empty(max(n_groups, 1), dtype=np.float64)
    g_pos = np.full(max(n_groups, 1) * n, -1, dtype=np.int64)
    for g in range(n_groups):
        for i in range(g_msize[g]):
            g_pos[g * n + g_members[g_mstart[g] + i]] = i
    # vertex -> containing groups
    vg_ptr = np.zeros(n + 1, dtype=np.int64)
    for g in range(n_groups):
        for i in range(g_msize[g]):
            vg_ptr[g_members[g_mstart[g] + i] + 1] += 1
    for u in range(n):
        vg_ptr[u + 1] += vg_ptr[u]
    vg_fill = vg_ptr[:-1].copy()
    vg_gid = np.empty(mfill, dtype=np.int64)
    for g in range(n_groups):
        for i in range(g_msize[g]):
            v = g_members[g_mstart[g] + i]
            vg_gid[vg_fill[v]] = g
            vg_fill[v] += 1

    # per-vertex incidence over simple non-loop edges (loops are never active)
    inc_ptr = np.zeros(n + 1, dtype=np.int64)
    for e in range(m):
        if esrc[e] != edst[e] and home[e] == -1:
            inc_ptr[esrc[e] + 1] += 1
            inc_ptr[edst[e] + 1] += 1
    for u in range(n):
        inc_ptr[u + 1] += inc_ptr[u]
    fill = inc_ptr[:-1].copy()
    inc_eid = np.empty(inc_ptr[n], dtype=np.int64)
    for e in range(m):
        if esrc[e] != edst[e] and home[e] == -1:
            inc_eid[fill[esrc[e]]] = e
            fill[esrc[e]] += 1
            inc_eid[fill[edst[e]]] = e
            fill[edst[e]] += 1

    # slot storage over simple edges: slot 2b resident-source, 2b+1 mutant-source
    bucket_size = np.zeros(n_buckets, dtype=np.int64)
    for e in range(m):
        if home[e] == -1:
            bucket_size[bid[e]] += 1
    slot_start = np.zeros(2 * n_buckets + 1, dtype=np.int64)
    for b in range(n_buckets):
        slot_start[2 * b + 1] = slot_start[2 * b] + bucket_size[b]
        slot_start[2 * b + 2] = slot_start[2 * b + 1] + bucket_size[b]
    slot_count = np.zeros(2 * n_buckets, dtype=np.int64)
    slot_items = np.empty(slot_start[2 * n_buckets], dtype=np.int64)
    pos_in_slot = np.empty(m, dtype=np.int64)
    cur_slot = np.full(m, -1, dtype=np.int64)
    active_slots = np.empty(2 * n_buckets, dtype=np.int64)
    as_pos = np.full(2 * n_buckets, -1, dtype=np.int64)
    slot_w = np.empty(2 * n_buckets, dtype=np.float64)

    state = np.empty(1, dtype=np.uint64)
    for i in range(len(seeds)):
        state[0] = seeds[i]
        if jump_mode:
            oc, js = _jump_trial(esrc, edst, bucket_lw, bid, inc_ptr, inc_eid, n,
                                 log2r, init_cum, state, max_steps,
                                 slot_start, slot_count, slot_items, pos_in_slot,
                                 cur_slot, active_slots, as_pos, slot_w,
                                 n_groups, g_kind, g_owner, g_lw, g_mstart,
                                 g_msize, g_members, g_mc, g_pos, g_w,
                                 vg_ptr, vg_gid)
        else:
            oc, js = _full_trial(edst, elogw, rowlog, indptr, n, r, log2r,
                                 init_cum, state, max_steps)
        outcomes[i] = oc
        jump_steps[i] = js
