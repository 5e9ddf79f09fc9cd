# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: example-record generation, Levenshtein distances, and
scene rasterization.

Each function reproduces the pure-Python reference in _pykernels.py
bit-for-bit; the generation kernel in particular consumes the splitmix64
stream in exactly the same order as the sampling-op composition.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int32_t, uint8_t, uint64_t

from .sampling import SamplingError

cnp.import_array()

DEF MAX_DRAWS = 100000
DEF MAX_ATTRS = 16
DEF MAX_VALUES = 256
DEF MAX_OBJECTS = 64
DEF MAX_GRID_CELLS = 1024

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15u
cdef uint64_t MULT_A = 0xBF58476D1CE4E5B9u
cdef uint64_t MULT_B = 0x94D049BB133111EBu

ctypedef struct Stream:
    uint64_t state


cdef inline uint64_t _next_u64(Stream* s) nogil:
    cdef uint64_t z
    s.state += GAMMA
    z = s.state
    z = (z ^ (z >> 30)) * MULT_A
    z = (z ^ (z >> 27)) * MULT_B
    return z ^ (z >> 31)


cdef inline int _below(Stream* s, int n) nogil:
    return <int>(_next_u64(s) % <uint64_t>n)


cdef inline void _sort_ints(int* values, int n) nogil:
    cdef int i, j, v
    for i in range(1, n):
        v = values[i]
        j = i - 1
        while j >= 0 and values[j] > v:
            values[j + 1] = values[j]
            j -= 1
        values[j + 1] = v


cdef int _draw_distinct(Stream* stream, const int32_t[:] pool, int k, int* out) except -1:
    """k distinct pool indices by rejection; mirrors sampling._draw_distinct."""
    cdef int chosen = 0, draws = 0, idx, i, dup
    while chosen < k:
        idx = _below(stream, <int>pool.shape[0])
        dup = 0
        for i in range(chosen):
            if out[i] == idx:
                dup = 1
                break
        if not dup:
            out[chosen] = idx
            chosen += 1
        draws += 1
        if draws > MAX_DRAWS:
            raise SamplingError("distinct-item sampling exhausted")
    return 0


cdef int _place_free(Stream* stream, uint8_t* occupied, int* n_occupied,
                     int grid, int* row, int* col) except -1:
    cdef int cells = grid * grid, cell, tries = 0
    if n_occupied[0] >= cells:
        raise SamplingError("grid is full")
    while True:
        cell = _below(stream, cells)
        if not occupied[cell]:
            occupied[cell] = 1
            n_occupied[0] += 1
            row[0] = cell // grid
            col[0] = cell % grid
            return 0
        tries += 1
        if tries > MAX_DRAWS:
            raise SamplingError("cell placement exhausted")


def generate_example(params, seed):
    """One packed example record; byte-identical to the pure kernel."""
    cdef Stream stream
    stream.state = <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)

    cdef int task = params.task_code
    cdef int arity = params.arity
    cdef int n_objects = params.num_objects
    cdef int num_attrs = params.num_attrs
    cdef int C = params.num_colors
    cdef int T = params.num_textures
    cdef int grid = params.grid_size
    cdef int n_distr = params.num_distractors
    cdef int ips = params.images_per_side
    cdef int pps = params.positives_per_side
    cdef int uses_holdout = params.uses_holdout
    cdef const int32_t[:] pool = params.pool_items
    cdef const uint8_t[:] pool_holdout = params.pool_holdout
    cdef const uint8_t[:] item_ok = params.item_ok
    cdef int pool_len = <int>pool.shape[0]

    if num_attrs > MAX_ATTRS or grid * grid > MAX_GRID_CELLS:
        raise SamplingError("configuration exceeds compiled kernel limits")
    if n_objects + n_distr > MAX_OBJECTS:
        raise SamplingError("too many objects for compiled kernel")

    out_arr = np.empty(params.record_size, dtype=np.uint8)
    cdef uint8_t[:] out = out_arr
    cdef int pos = 0

    # --- sample hypothesis (mirrors sampling.sample_hypothesis) ---
    cdef int hyp[MAX_ATTRS]          # canonical tuple values
    cdef int idxs[MAX_ATTRS]
    cdef int items[MAX_ATTRS]        # item ids (colors/textures/pair ids)
    cdef int n_items = n_objects if task != 3 else 2
    cdef int tries = 0, i, j, ok, prep = 0
    while True:
        if task == 3:
            items[0] = pool[_below(&stream, pool_len)]
            items[1] = pool[_below(&stream, pool_len)]
            prep = _below(&stream, 2)
            ok = 1
            if uses_holdout:
                ok = 0
                for i in range(pool_len):
                    if (pool[i] == items[0] or pool[i] == items[1]) and pool_holdout[i]:
                        ok = 1
                        break
        else:
            _draw_distinct(&stream, pool, arity, idxs)
            ok = 1
            if uses_holdout:
                ok = 0
                for i in range(arity):
                    if pool_holdout[idxs[i]]:
                        ok = 1
                        break
            for i in range(arity):
                items[i] = pool[idxs[i]]
        if ok:
            break
        tries += 1
        if tries >= MAX_DRAWS:
            raise SamplingError("could not sample a hypothesis containing a holdout item")

    if task == 3:
        hyp[0] = items[0] // T
        hyp[1] = items[0] % T
        hyp[2] = prep
        hyp[3] = items[1] // T
        hyp[4] = items[1] % T
    else:
        _sort_ints(items, arity)
        if task == 2:
            for i in range(arity):
                hyp[2 * i] = items[i] // T
                hyp[2 * i + 1] = items[i] % T
        else:
            for i in range(arity):
                hyp[i] = items[i]

    out[pos] = <uint8_t>task; pos += 1
    out[pos] = <uint8_t>num_attrs; pos += 1
    for i in range(num_attrs):
        out[pos] = <uint8_t>hyp[i]; pos += 1

    # --- per-example candidate tables (no stream draws) ---
    # distractor candidates, mirroring sampling._distractor_specs
    cdef int dc_items[MAX_VALUES]
    cdef int dc_len = 0, c, t, pid, used
    cdef cnp.ndarray[int32_t, ndim=1] dpairs_np
    cdef int32_t* dpairs = NULL
    cdef int dp_len = 0
    if task == 0:
        for i in range(pool_len):
            c = pool[i]
            used = 0
            for j in range(arity):
                if hyp[j] == c:
                    used = 1
                    break
            if not used:
                dc_items[dc_len] = c
                dc_len += 1
    elif task == 1:
        for i in range(pool_len):
            t = pool[i]
            used = 0
            for j in range(arity):
                if hyp[j] == t:
                    used = 1
                    break
            if not used:
                dc_items[dc_len] = t
                dc_len += 1
    else:
        dpairs_np = np.empty(pool_len, dtype=np.int32)
        dpairs = <int32_t*>dpairs_np.data
        for i in range(pool_len):
            pid = pool[i]
            used = 0
            for j in range(n_objects):
                if task == 2:
                    if pid == hyp[2 * j] * T + hyp[2 * j + 1]:
                        used = 1
                        break
                else:
                    if (j == 0 and pid == hyp[0] * T + hyp[1]) or (
                        j == 1 and pid == hyp[3] * T + hyp[4]
                    ):
                        used = 1
                        break
            if not used:
                dpairs[dp_len] = pid
                dp_len += 1
    if n_distr > 0:
        if task <= 1 and dc_len == 0:
            raise SamplingError("empty distractor pool")
        if task >= 2 and dp_len == 0:
            raise SamplingError("empty distractor pool")

    # tight-negative slot candidates, mirroring _negative_slot_candidates
    cdef int slots[MAX_ATTRS][MAX_VALUES]
    cdef int slot_len[MAX_ATTRS]
    cdef int feasible[MAX_ATTRS]
    cdef int n_feasible = 0
    cdef int s, v, ti, ci
    for s in range(num_attrs):
        slot_len[s] = 0
    if task == 0 or task == 1:
        # same candidate list for every slot: pool values not used by h
        for s in range(num_attrs):
            for i in range(dc_len):
                slots[s][slot_len[s]] = dc_items[i]
                slot_len[s] += 1
    elif task == 2:
        for j in range(arity):
            ci = hyp[2 * j]
            ti = hyp[2 * j + 1]
            s = 2 * j
            for v in range(C):
                used = 0
                for i in range(arity):
                    if hyp[2 * i] == v:
                        used = 1
                        break
                if not used and item_ok[v * T + ti]:
                    slots[s][slot_len[s]] = v
                    slot_len[s] += 1
            s = 2 * j + 1
            for v in range(T):
                used = 0
                for i in range(arity):
                    if hyp[2 * i + 1] == v:
                        used = 1
                        break
                if not used and item_ok[ci * T + v]:
                    slots[s][slot_len[s]] = v
                    slot_len[s] += 1
    else:
        for v in range(C):
            if v != hyp[0] and v != hyp[3] and item_ok[v * T + hyp[1]]:
                slots[0][slot_len[0]] = v
                slot_len[0] += 1
        for v in range(T):
            if v != hyp[1] and v != hyp[4] and item_ok[hyp[0] * T + v]:
                slots[1][slot_len[1]] = v
                slot_len[1] += 1
        slots[2][0] = 1 - hyp[2]
        slot_len[2] = 1
        for v in range(C):
            if v != hyp[0] and v != hyp[3] and item_ok[v * T + hyp[4]]:
                slots[3][slot_len[3]] = v
                slot_len[3] += 1
        for v in range(T):
            if v != hyp[1] and v != hyp[4] and item_ok[hyp[3] * T + v]:
                slots[4][slot_len[4]] = v
                slot_len[4] += 1
    for s in range(num_attrs):
        if slot_len[s] > 0:
            feasible[n_feasible] = s
            n_feasible += 1

    # --- sides ---
    cdef uint8_t labels[256]
    cdef uint8_t occupied[MAX_GRID_CELLS]
    cdef int n_occupied
    cdef int scene_vals[MAX_ATTRS]
    cdef int scene_pairs[MAX_ATTRS]
    cdef int obj_row[MAX_OBJECTS]
    cdef int obj_col[MAX_OBJECTS]
    cdef int obj_color[MAX_OBJECTS]
    cdef int obj_texture[MAX_OBJECTS]
    cdef int side, it, lab, k, n_placed, cells = grid * grid
    cdef int flip_slot, flip_val, lane, a, b, lo, hi, sprep, d_idx, r, cc
    cdef uint8_t tmp

    for side in range(2):
        out[pos] = <uint8_t>ips; pos += 1
        for i in range(ips):
            labels[i] = 1 if i < pps else 0
        # Fisher-Yates, mirroring rng.Stream.shuffle
        for i in range(ips - 1, 0, -1):
            j = _below(&stream, i + 1)
            tmp = labels[i]; labels[i] = labels[j]; labels[j] = tmp
        for it in range(ips):
            lab = labels[it]
            # scene attribute values: the hypothesis tuple or a tight negative
            for i in range(num_attrs):
                scene_vals[i] = hyp[i]
            sprep = prep
            if not lab:
                flip_slot = feasible[_below(&stream, n_feasible)] if n_feasible else -1
                if flip_slot < 0:
                    raise SamplingError("no attribute admits a tight-negative replacement")
                flip_val = slots[flip_slot][_below(&stream, slot_len[flip_slot])]
                scene_vals[flip_slot] = flip_val
                # canonicalize as hypothesis_from_tuple would
                if task == 0 or task == 1:
                    _sort_ints(scene_vals, num_attrs)
                elif task == 2:
                    for i in range(arity):
                        scene_pairs[i] = scene_vals[2 * i] * T + scene_vals[2 * i + 1]
                    _sort_ints(scene_pairs, arity)
                    for i in range(arity):
                        scene_vals[2 * i] = scene_pairs[i] // T
                        scene_vals[2 * i + 1] = scene_pairs[i] % T
                else:
                    sprep = scene_vals[2]
            # object specs in canonical order (mirrors _hypothesis_specs)
            if task == 0:
                for i in range(n_objects):
                    obj_color[i] = scene_vals[i]
                    obj_texture[i] = _below(&stream, T)
            elif task == 1:
                for i in range(n_objects):
                    obj_color[i] = _below(&stream, C)
                    obj_texture[i] = scene_vals[i]
            elif task == 2:
                for i in range(n_objects):
                    obj_color[i] = scene_vals[2 * i]
                    obj_texture[i] = scene_vals[2 * i + 1]
            else:
                obj_color[0] = scene_vals[0]
                obj_texture[0] = scene_vals[1]
                obj_color[1] = scene_vals[3]
                obj_texture[1] = scene_vals[4]
            # placement
            for i in range(cells):
                occupied[i] = 0
            n_occupied = 0
            if task == 3:
                lane = _below(&stream, grid)
                a = _below(&stream, grid)
                b = _below(&stream, grid)
                while b == a:
                    b = _below(&stream, grid)
                lo = a if a < b else b
                hi = b if a < b else a
                if sprep == 0:
                    obj_row[0] = lo; obj_col[0] = lane
                    obj_row[1] = hi; obj_col[1] = lane
                else:
                    obj_row[0] = lane; obj_col[0] = hi
                    obj_row[1] = lane; obj_col[1] = lo
                occupied[obj_row[0] * grid + obj_col[0]] = 1
                occupied[obj_row[1] * grid + obj_col[1]] = 1
                n_occupied = 2
            else:
                for i in range(n_objects):
                    _place_free(&stream, occupied, &n_occupied, grid, &r, &cc)
                    obj_row[i] = r
                    obj_col[i] = cc
            n_placed = n_objects
            # distractors (mirrors add_distractors)
            for k in range(n_distr):
                if task == 0:
                    d_idx = _below(&stream, dc_len * T)
                    obj_color[n_placed] = dc_items[d_idx // T]
                    obj_texture[n_placed] = d_idx % T
                elif task == 1:
                    d_idx = _below(&stream, C * dc_len)
                    obj_color[n_placed] = d_idx // dc_len
                    obj_texture[n_placed] = dc_items[d_idx % dc_len]
                else:
                    pid = dpairs[_below(&stream, dp_len)]
                    obj_color[n_placed] = pid // T
                    obj_texture[n_placed] = pid % T
                _place_free(&stream, occupied, &n_occupied, grid, &r, &cc)
                obj_row[n_placed] = r
                obj_col[n_placed] = cc
                n_placed += 1
            # pack the scene
            out[pos] = <uint8_t>n_placed; pos += 1
            for i in range(n_placed):
                out[pos] = <uint8_t>obj_row[i]
                out[pos + 1] = <uint8_t>obj_col[i]
                out[pos + 2] = <uint8_t>obj_color[i]
                out[pos + 3] = <uint8_t>obj_texture[i]
                pos += 4
            out[pos] = 1 if lab else 0
            pos += 1
    return out_arr.tobytes()


def levenshtein(a, b):
    """Unit-cost edit distance between two token sequences."""
    cdef cnp.ndarray[uint8_t, ndim=1] aa = np.asarray(a, dtype=np.uint8).ravel()
    cdef cnp.ndarray[uint8_t, ndim=1] bb = np.asarray(b, dtype=np.uint8).ravel()
    cdef int n = <int>aa.shape[0], m = <int>bb.shape[0]
    if n == 0:
        return m
    cdef cnp.ndarray[int32_t, ndim=1] prev_np = np.arange(n + 1, dtype=np.int32)
    cdef cnp.ndarray[int32_t, ndim=1] cur_np = np.empty(n + 1, dtype=np.int32)
    cdef int32_t* prev = <int32_t*>prev_np.data
    cdef int32_t* cur = <int32_t*>cur_np.data
    cdef int32_t* swap
    cdef int i, j
    cdef int32_t cost, best
    for i in range(1, m + 1):
        cur[0] = i
        for j in range(1, n + 1):
            cost = prev[j - 1] + (0 if aa[j - 1] == bb[i - 1] else 1)
            best = prev[j] + 1
            if cur[j - 1] + 1 < best:
                best = cur[j - 1] + 1
            if cost < best:
                best = cost
            cur[j] = best
        swap = prev; prev = cur; cur = swap
    return int(prev[n])


def pairwise_levenshtein(tokens):
    """Condensed (i<j) edit distances between rows of a (n, L) uint8 array."""
    cdef cnp.ndarray[uint8_t, ndim=2] tok = np.ascontiguousarray(tokens, dtype=np.uint8)
    cdef int n = <int>tok.shape[0], L = <int>tok.shape[1]
    if L > 255:
        raise ValueError("utterance length exceeds compiled kernel limit")
    cdef cnp.ndarray[int32_t, ndim=1] out_np = np.empty(n * (n - 1) // 2, dtype=np.int32)
    cdef int32_t[:] out = out_np
    cdef uint8_t[:, :] tv = tok
    cdef int32_t dp_prev[256]
    cdef int32_t dp_cur[256]
    cdef int i, j, x, y, p = 0
    cdef int32_t cost, best
    with nogil:
        for x in range(n):
            for y in range(x + 1, n):
                for j in range(L + 1):
                    dp_prev[j] = j
                for i in range(1, L + 1):
                    dp_cur[0] = i
                    for j in range(1, L + 1):
                        cost = dp_prev[j - 1] + (0 if tv[x, j - 1] == tv[y, i - 1] else 1)
                        best = dp_prev[j] + 1
                        if dp_cur[j - 1] + 1 < best:
                            best = dp_cur[j - 1] + 1
                        if cost < best:
                            best = cost
                        dp_cur[j] = best
                    for j in range(L + 1):
                        dp_prev[j] = dp_cur[j]
                out[p] = dp_prev[L]
                p += 1
    return out_np


def paint_scene(rows, cols, colors, textures, palette, masks, grid_size, cell_size):
    """Rasterize objects onto a black (grid*cell, grid*cell, 3) canvas."""
    cdef cnp.ndarray[uint8_t, ndim=1] rr = np.ascontiguousarray(rows, dtype=np.uint8)
    cdef cnp.ndarray[uint8_t, ndim=1] cc = np.ascontiguousarray(cols, dtype=np.uint8)
    cdef cnp.ndarray[uint8_t, ndim=1] col = np.ascontiguousarray(colors, dtype=np.uint8)
    cdef cnp.ndarray[uint8_t, ndim=1] tex = np.ascontiguousarray(textures, dtype=np.uint8)
    cdef cnp.ndarray[uint8_t, ndim=2] pal = np.ascontiguousarray(palette, dtype=np.uint8)
    cdef cnp.ndarray[uint8_t, ndim=3] msk = np.ascontiguousarray(masks, dtype=np.uint8)
    cdef int g = grid_size, cell = cell_size
    cdef int dim = <int>msk.shape[1]
    cdef int scale = cell // dim
    cdef int side = g * cell
    out_np = np.zeros((side, side, 3), dtype=np.uint8)
    cdef uint8_t[:, :, :] img = out_np
    cdef uint8_t[:, :] palv = pal
    cdef uint8_t[:, :, :] mskv = msk
    cdef int i, mr, mc, pr, pc, r0, c0, y, x
    cdef uint8_t cr, cgn, cb
    cdef int n = <int>rr.shape[0]
    with nogil:
        for i in range(n):
            r0 = rr[i] * cell
            c0 = cc[i] * cell
            cr = palv[col[i], 0]
            cgn = palv[col[i], 1]
            cb = palv[col[i], 2]
            for mr in range(dim):
                for mc in range(dim):
                    if mskv[tex[i], mr, mc]:
                        for y in range(scale):
                            pr = r0 + mr * scale + y
                            for x in range(scale):
                                pc = c0 + mc * scale + x
                                img[pr, pc, 0] = cr
                                img[pr, pc, 1] = cgn
                                img[pr, pc, 2] = cb
    return out_np
