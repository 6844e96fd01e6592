# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernels; mirrors ``pure`` exactly.

Per-family batch evaluators for prefix chains, first-circuit probes,
one-element-added batches, and greedy scans.  See ``pure`` for the
conventions; the two backends are interchangeable and equivalence-tested.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef cnp.int32_t i32
ctypedef cnp.int64_t i64
ctypedef cnp.uint8_t u8


# ---------------------------------------------------------------- partition


def partition_chain(part_id, budgets, pre, orders, offsets):
    cdef i32[::1] pid = np.ascontiguousarray(part_id, dtype=np.int32)
    cdef i64[::1] bud = np.ascontiguousarray(budgets, dtype=np.int64)
    cdef i32[::1] pre_v = np.ascontiguousarray(pre, dtype=np.int32)
    cdef i32[::1] ord_v = np.ascontiguousarray(orders, dtype=np.int32)
    cdef i64[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef Py_ssize_t nparts = bud.shape[0]
    cdef Py_ssize_t nchains = off.shape[0] - 1
    base_np = np.zeros(nparts, dtype=np.int64)
    cdef i64[::1] base = base_np
    cdef Py_ssize_t i, c, j
    cdef i32 e, part
    for i in range(pre_v.shape[0]):
        base[pid[pre_v[i]]] += 1
    out_np = np.zeros(nchains, dtype=np.int32)
    cdef i32[::1] out = out_np
    counts_np = base_np.copy()
    cdef i64[::1] counts = counts_np
    touched_np = np.empty(ord_v.shape[0] + 1, dtype=np.int32)
    cdef i32[::1] touched = touched_np
    cdef Py_ssize_t ntouched
    for c in range(nchains):
        ntouched = 0
        for j in range(off[c], off[c + 1]):
            e = ord_v[j]
            part = pid[e]
            counts[part] += 1
            touched[ntouched] = part
            ntouched += 1
            if counts[part] > bud[part]:
                out[c] = <i32>(j - off[c] + 1)
                break
        for j in range(ntouched):
            counts[touched[j]] = base[touched[j]]
    return out_np


def partition_circuit(part_id, budgets, pre, orders, offsets):
    cdef i32[::1] pid = np.ascontiguousarray(part_id, dtype=np.int32)
    t_np = partition_chain(part_id, budgets, pre, orders, offsets)
    cdef i32[::1] t_arr = t_np
    cdef i32[::1] ord_v = np.ascontiguousarray(orders, dtype=np.int32)
    cdef i64[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef Py_ssize_t nchains = t_arr.shape[0]
    flat_np = np.empty(ord_v.shape[0], dtype=np.int32)
    cdef i32[::1] flat = flat_np
    counts_np = np.zeros(nchains, dtype=np.int64)
    cdef i64[::1] cnt = counts_np
    cdef Py_ssize_t c, j, pos = 0, start
    cdef i32 t, trig_part
    for c in range(nchains):
        t = t_arr[c]
        if t == 0:
            continue
        start = off[c]
        trig_part = pid[ord_v[start + t - 1]]
        for j in range(start, start + t):
            if pid[ord_v[j]] == trig_part:
                flat[pos] = ord_v[j]
                pos += 1
                cnt[c] += 1
    return t_np, flat_np[:pos].copy(), counts_np


def partition_one_added(part_id, budgets, pre, bases, boff, cands, coff):
    cdef i32[::1] pid = np.ascontiguousarray(part_id, dtype=np.int32)
    cdef i64[::1] bud = np.ascontiguousarray(budgets, dtype=np.int64)
    cdef i32[::1] pre_v = np.ascontiguousarray(pre, dtype=np.int32)
    cdef i32[::1] bas = np.ascontiguousarray(bases, dtype=np.int32)
    cdef i64[::1] bo = np.ascontiguousarray(boff, dtype=np.int64)
    cdef i32[::1] cnd = np.ascontiguousarray(cands, dtype=np.int32)
    cdef i64[::1] co = np.ascontiguousarray(coff, dtype=np.int64)
    cdef Py_ssize_t nparts = bud.shape[0]
    base_np = np.zeros(nparts, dtype=np.int64)
    cdef i64[::1] base = base_np
    cdef Py_ssize_t i, k, j
    cdef i32 e, part
    cdef bint ok
    for i in range(pre_v.shape[0]):
        base[pid[pre_v[i]]] += 1
    out_np = np.zeros(cnd.shape[0], dtype=np.uint8)
    cdef u8[::1] out = out_np
    counts_np = base_np.copy()
    cdef i64[::1] counts = counts_np
    touched_np = np.empty(bas.shape[0] + 1, dtype=np.int32)
    cdef i32[::1] touched = touched_np
    cdef Py_ssize_t ntouched
    for k in range(bo.shape[0] - 1):
        ntouched = 0
        ok = True
        for j in range(bo[k], bo[k + 1]):
            e = bas[j]
            part = pid[e]
            counts[part] += 1
            touched[ntouched] = part
            ntouched += 1
            if counts[part] > bud[part]:
                ok = False
                break
        if ok:
            for j in range(co[k], co[k + 1]):
                part = pid[cnd[j]]
                if counts[part] + 1 <= bud[part]:
                    out[j] = 1
        for j in range(ntouched):
            counts[touched[j]] = base[touched[j]]
    return out_np


def partition_greedy(part_id, budgets, pre, order):
    cdef i32[::1] pid = np.ascontiguousarray(part_id, dtype=np.int32)
    cdef i64[::1] bud = np.ascontiguousarray(budgets, dtype=np.int64)
    cdef i32[::1] pre_v = np.ascontiguousarray(pre, dtype=np.int32)
    cdef i32[::1] ord_v = np.ascontiguousarray(order, dtype=np.int32)
    counts_np = np.zeros(bud.shape[0], dtype=np.int64)
    cdef i64[::1] counts = counts_np
    cdef Py_ssize_t i
    cdef i32 part
    for i in range(pre_v.shape[0]):
        counts[pid[pre_v[i]]] += 1
    kept_np = np.empty(ord_v.shape[0], dtype=np.int32)
    cdef i32[::1] kept = kept_np
    cdef Py_ssize_t nkept = 0
    for i in range(ord_v.shape[0]):
        part = pid[ord_v[i]]
        if counts[part] + 1 <= bud[part]:
            counts[part] += 1
            kept[nkept] = ord_v[i]
            nkept += 1
    return kept_np[:nkept].copy()


# ------------------------------------------------------------------ graphic


cdef inline i32 _find(i32[::1] parent, i32 x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def graphic_chain(edge_u, edge_v, num_vertices, pre, orders, offsets):
    cdef i32[::1] eu = np.ascontiguousarray(edge_u, dtype=np.int32)
    cdef i32[::1] ev = np.ascontiguousarray(edge_v, dtype=np.int32)
    cdef i32[::1] pre_v = np.ascontiguousarray(pre, dtype=np.int32)
    cdef i32[::1] ord_v = np.ascontiguousarray(orders, dtype=np.int32)
    cdef i64[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef Py_ssize_t nv = num_vertices
    cdef Py_ssize_t nchains = off.shape[0] - 1
    base_np = np.arange(nv, dtype=np.int32)
    cdef i32[::1] base = base_np
    cdef Py_ssize_t i, c, j
    cdef i32 e, ru, rv
    for i in range(pre_v.shape[0]):
        e = pre_v[i]
        ru = _find(base, eu[e])
        rv = _find(base, ev[e])
        if ru != rv:
            base[rv] = ru
    out_np = np.zeros(nchains, dtype=np.int32)
    cdef i32[::1] out = out_np
    parent_np = np.empty(nv, dtype=np.int32)
    cdef i32[::1] parent = parent_np
    for c in range(nchains):
        parent[:] = base
        for j in range(off[c], off[c + 1]):
            e = ord_v[j]
            ru = _find(parent, eu[e])
            rv = _find(parent, ev[e])
            if ru == rv:
                out[c] = <i32>(j - off[c] + 1)
                break
            parent[rv] = ru
    return out_np


def graphic_circuit(edge_u, edge_v, num_vertices, pre, orders, offsets):
    cdef i32[::1] eu = np.ascontiguousarray(edge_u, dtype=np.int32)
    cdef i32[::1] ev = np.ascontiguousarray(edge_v, dtype=np.int32)
    cdef i32[::1] pre_v = np.ascontiguousarray(pre, dtype=np.int32)
    cdef i32[::1] ord_v = np.ascontiguousarray(orders, dtype=np.int32)
    cdef i64[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    t_np = graphic_chain(edge_u, edge_v, num_vertices, pre, orders, offsets)
    cdef i32[::1] t_arr = t_np
    cdef Py_ssize_t nv = num_vertices
    cdef Py_ssize_t nchains = t_arr.shape[0]
    cdef Py_ssize_t npre = pre_v.shape[0]
    flat_np = np.empty(ord_v.shape[0] + nchains, dtype=np.int32)
    cdef i32[::1] flat = flat_np
    counts_np = np.zeros(nchains, dtype=np.int64)
    cdef i64[::1] cnt = counts_np

    # adjacency scratch shared across hit chains
    head_np = np.empty(nv, dtype=np.int64)
    cdef i64[::1] head = head_np
    prevv_np = np.empty(nv, dtype=np.int32)
    cdef i32[::1] prevv = prevv_np
    preve_np = np.empty(nv, dtype=np.int32)
    cdef i32[::1] preve = preve_np
    queue_np = np.empty(nv, dtype=np.int32)
    cdef i32[::1] queue = queue_np

    cdef Py_ssize_t max_len = 0
    cdef Py_ssize_t c
    for c in range(nchains):
        if off[c + 1] - off[c] > max_len:
            max_len = off[c + 1] - off[c]
    cdef Py_ssize_t cap = 2 * (npre + max_len) + 2
    nxt_np = np.empty(cap, dtype=np.int64)
    cdef i64[::1] nxt = nxt_np
    to_np = np.empty(cap, dtype=np.int32)
    cdef i32[::1] to_v = to_np
    elem_np = np.empty(cap, dtype=np.int32)
    cdef i32[::1] elem_of = elem_np

    cdef Py_ssize_t j, pos = 0, start, slot
    cdef i32 t, closing, src, dst, v, w, edge_elem, e
    cdef Py_ssize_t qhead, qtail

    for c in range(nchains):
        t = t_arr[c]
        if t == 0:
            continue
        start = off[c]
        closing = ord_v[start + t - 1]
        src = eu[closing]
        dst = ev[closing]
        if src == dst:
            flat[pos] = closing
            pos += 1
            cnt[c] = 1
            continue
        head[:] = -1
        slot = 0
        for j in range(npre):
            e = pre_v[j]
            nxt[slot] = head[eu[e]]; to_v[slot] = ev[e]; elem_of[slot] = -1; head[eu[e]] = slot; slot += 1
            nxt[slot] = head[ev[e]]; to_v[slot] = eu[e]; elem_of[slot] = -1; head[ev[e]] = slot; slot += 1
        for j in range(start, start + t - 1):
            e = ord_v[j]
            nxt[slot] = head[eu[e]]; to_v[slot] = ev[e]; elem_of[slot] = e; head[eu[e]] = slot; slot += 1
            nxt[slot] = head[ev[e]]; to_v[slot] = eu[e]; elem_of[slot] = e; head[ev[e]] = slot; slot += 1
        prevv[:] = -1
        prevv[src] = src
        queue[0] = src
        qhead = 0
        qtail = 1
        while qhead < qtail and prevv[dst] < 0:
            v = queue[qhead]
            qhead += 1
            j = head[v]
            while j >= 0:
                w = to_v[j]
                if prevv[w] < 0:
                    prevv[w] = v
                    preve[w] = elem_of[j]
                    queue[qtail] = w
                    qtail += 1
                j = nxt[j]
        flat[pos] = closing
        pos += 1
        cnt[c] = 1
        v = dst
        while v != src:
            edge_elem = preve[v]
            if edge_elem >= 0:
                flat[pos] = edge_elem
                pos += 1
                cnt[c] += 1
            v = prevv[v]
    return t_np, flat_np[:pos].copy(), counts_np


def graphic_one_added(edge_u, edge_v, num_vertices, pre, bases, boff, cands, coff):
    cdef i32[::1] eu = np.ascontiguousarray(edge_u, dtype=np.int32)
    cdef i32[::1] ev = np.ascontiguousarray(edge_v, dtype=np.int32)
    cdef i32[::1] pre_v = np.ascontiguousarray(pre, dtype=np.int32)
    cdef i32[::1] bas = np.ascontiguousarray(bases, dtype=np.int32)
    cdef i64[::1] bo = np.ascontiguousarray(boff, dtype=np.int64)
    cdef i32[::1] cnd = np.ascontiguousarray(cands, dtype=np.int32)
    cdef i64[::1] co = np.ascontiguousarray(coff, dtype=np.int64)
    cdef Py_ssize_t nv = num_vertices
    base_np = np.arange(nv, dtype=np.int32)
    cdef i32[::1] base = base_np
    cdef Py_ssize_t i, k, j
    cdef i32 el, ru, rv
    cdef bint ok
    for i in range(pre_v.shape[0]):
        el = pre_v[i]
        ru = _find(base, eu[el])
        rv = _find(base, ev[el])
        if ru != rv:
            base[rv] = ru
    out_np = np.zeros(cnd.shape[0], dtype=np.uint8)
    cdef u8[::1] out = out_np
    parent_np = np.empty(nv, dtype=np.int32)
    cdef i32[::1] parent = parent_np
    for k in range(bo.shape[0] - 1):
        parent[:] = base
        ok = True
        for j in range(bo[k], bo[k + 1]):
            el = bas[j]
            ru = _find(parent, eu[el])
            rv = _find(parent, ev[el])
            if ru == rv:
                ok = False
                break
            parent[rv] = ru
        if ok:
            for j in range(co[k], co[k + 1]):
                el = cnd[j]
                if _find(parent, eu[el]) != _find(parent, ev[el]):
                    out[j] = 1
    return out_np


def graphic_greedy(edge_u, edge_v, num_vertices, pre, order):
    cdef i32[::1] eu = np.ascontiguousarray(edge_u, dtype=np.int32)
    cdef i32[::1] ev = np.ascontiguousarray(edge_v, dtype=np.int32)
    cdef i32[::1] pre_v = np.ascontiguousarray(pre, dtype=np.int32)
    cdef i32[::1] ord_v = np.ascontiguousarray(order, dtype=np.int32)
    cdef Py_ssize_t nv = num_vertices
    parent_np = np.arange(nv, dtype=np.int32)
    cdef i32[::1] parent = parent_np
    cdef Py_ssize_t i
    cdef i32 el, ru, rv
    for i in range(pre_v.shape[0]):
        el = pre_v[i]
        ru = _find(parent, eu[el])
        rv = _find(parent, ev[el])
        if ru != rv:
            parent[rv] = ru
    kept_np = np.empty(ord_v.shape[0], dtype=np.int32)
    cdef i32[::1] kept = kept_np
    cdef Py_ssize_t nkept = 0
    for i in range(ord_v.shape[0]):
        el = ord_v[i]
        ru = _find(parent, eu[el])
        rv = _find(parent, ev[el])
        if ru != rv:
            parent[rv] = ru
            kept[nkept] = el
            nkept += 1
    return kept_np[:nkept].copy()


# ------------------------------------------------------------------- linear


def _linear_pre_basis(columns, p, inverses, pre):
    """Reduced, pivot-normalized basis of the preload columns."""
    cdef i64[:, ::1] cols = np.ascontiguousarray(columns, dtype=np.int64)
    cdef i64[::1] inv = np.ascontiguousarray(inverses, dtype=np.int64)
    cdef i32[::1] pre_v = np.ascontiguousarray(pre, dtype=np.int32)
    cdef Py_ssize_t rows = cols.shape[0]
    cdef i64 pp = p
    basis_np = np.zeros((rows, rows), dtype=np.int64)
    cdef i64[:, ::1] basis = basis_np
    piv_np = np.zeros(rows, dtype=np.int64)
    cdef i64[::1] piv = piv_np
    vec_np = np.empty(rows, dtype=np.int64)
    cdef i64[::1] vec = vec_np
    cdef Py_ssize_t nb = 0, i, r, j, pivot
    cdef i64 f, scale, x
    for i in range(pre_v.shape[0]):
        for r in range(rows):
            vec[r] = cols[r, pre_v[i]]
        for j in range(nb):
            f = vec[piv[j]]
            if f:
                for r in range(rows):
                    x = (vec[r] - f * basis[j, r]) % pp
                    if x < 0:
                        x += pp
                    vec[r] = x
        pivot = -1
        for r in range(rows):
            if vec[r]:
                pivot = r
                break
        if pivot < 0:
            continue  # contracted sets are independent; defensive skip
        scale = inv[vec[pivot]]
        for r in range(rows):
            basis[nb, r] = (vec[r] * scale) % pp
        piv[nb] = pivot
        nb += 1
    return basis_np[:nb].copy(), piv_np[:nb].copy()


def linear_chain(columns, p, inverses, pre, orders, offsets):
    pre_basis, pre_piv = _linear_pre_basis(columns, p, inverses, pre)
    cdef i64[:, ::1] cols = np.ascontiguousarray(columns, dtype=np.int64)
    cdef i64[::1] inv = np.ascontiguousarray(inverses, dtype=np.int64)
    cdef i64[:, ::1] pbas = pre_basis
    cdef i64[::1] ppiv = pre_piv
    cdef i32[::1] ord_v = np.ascontiguousarray(orders, dtype=np.int32)
    cdef i64[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef Py_ssize_t rows = cols.shape[0]
    cdef Py_ssize_t npre = pbas.shape[0]
    cdef Py_ssize_t nchains = off.shape[0] - 1
    cdef i64 pp = p
    out_np = np.zeros(nchains, dtype=np.int32)
    cdef i32[::1] out = out_np
    cap = rows + 1
    basis_np = np.zeros((npre + cap, rows), dtype=np.int64)
    cdef i64[:, ::1] basis = basis_np
    piv_np = np.zeros(npre + cap, dtype=np.int64)
    cdef i64[::1] piv = piv_np
    vec_np = np.empty(rows, dtype=np.int64)
    cdef i64[::1] vec = vec_np
    cdef Py_ssize_t c, i, j, r, nb, pivot
    cdef i64 f, scale, x
    cdef i32 el
    for j in range(npre):
        for r in range(rows):
            basis[j, r] = pbas[j, r]
        piv[j] = ppiv[j]
    for c in range(nchains):
        nb = npre
        for i in range(off[c], off[c + 1]):
            el = ord_v[i]
            for r in range(rows):
                vec[r] = cols[r, el]
            for j in range(nb):
                f = vec[piv[j]]
                if f:
                    for r in range(rows):
                        x = (vec[r] - f * basis[j, r]) % pp
                        if x < 0:
                            x += pp
                        vec[r] = x
            pivot = -1
            for r in range(rows):
                if vec[r]:
                    pivot = r
                    break
            if pivot < 0:
                out[c] = <i32>(i - off[c] + 1)
                break
            scale = inv[vec[pivot]]
            for r in range(rows):
                basis[nb, r] = (vec[r] * scale) % pp
            piv[nb] = pivot
            nb += 1
    return out_np


def linear_circuit(columns, p, inverses, pre, orders, offsets):
    pre_basis, pre_piv = _linear_pre_basis(columns, p, inverses, pre)
    cdef i64[:, ::1] cols = np.ascontiguousarray(columns, dtype=np.int64)
    cdef i64[::1] inv = np.ascontiguousarray(inverses, dtype=np.int64)
    cdef i64[:, ::1] pbas = pre_basis
    cdef i64[::1] ppiv = pre_piv
    cdef i32[::1] ord_v = np.ascontiguousarray(orders, dtype=np.int32)
    cdef i64[::1] off = np.ascontiguousarray(offsets, dtype=np.int64)
    cdef Py_ssize_t rows = cols.shape[0]
    cdef Py_ssize_t npre = pbas.shape[0]
    cdef Py_ssize_t nchains = off.shape[0] - 1
    cdef i64 pp = p
    t_np = np.zeros(nchains, dtype=np.int32)
    cdef i32[::1] t_arr = t_np
    flat_np = np.empty(ord_v.shape[0] + nchains, dtype=np.int32)
    cdef i32[::1] flat = flat_np
    counts_np = np.zeros(nchains, dtype=np.int64)
    cdef i64[::1] cnt = counts_np
    cdef Py_ssize_t cap = rows + 1
    basis_np = np.zeros((npre + cap, rows), dtype=np.int64)
    cdef i64[:, ::1] basis = basis_np
    piv_np = np.zeros(npre + cap, dtype=np.int64)
    cdef i64[::1] piv = piv_np
    # combo[j][i]: coefficient of tracked insert i in tracked basis vector j
    combo_np = np.zeros((cap, cap), dtype=np.int64)
    cdef i64[:, ::1] combo = combo_np
    vec_np = np.empty(rows, dtype=np.int64)
    cdef i64[::1] vec = vec_np
    lam_np = np.empty(cap, dtype=np.int64)
    cdef i64[::1] lam = lam_np
    cdef Py_ssize_t c, i, j, r, nb, ntracked, pivot, pos = 0, start
    cdef i64 f, scale, x
    cdef i32 el
    for j in range(npre):
        for r in range(rows):
            basis[j, r] = pbas[j, r]
        piv[j] = ppiv[j]
    for c in range(nchains):
        nb = npre
        ntracked = 0
        start = off[c]
        for i in range(start, off[c + 1]):
            el = ord_v[i]
            for r in range(rows):
                vec[r] = cols[r, el]
            for j in range(ntracked):
                lam[j] = 0
            for j in range(nb):
                f = vec[piv[j]]
                if f:
                    for r in range(rows):
                        x = (vec[r] - f * basis[j, r]) % pp
                        if x < 0:
                            x += pp
                        vec[r] = x
                    if j >= npre:
                        # tracked basis vector: fold into lam
                        for r in range(ntracked):
                            x = (lam[r] - f * combo[j - npre, r]) % pp
                            if x < 0:
                                x += pp
                            lam[r] = x
            pivot = -1
            for r in range(rows):
                if vec[r]:
                    pivot = r
                    break
            if pivot < 0:
                t_arr[c] = <i32>(i - start + 1)
                for j in range(ntracked):
                    if lam[j]:
                        flat[pos] = ord_v[start + j]
                        pos += 1
                        cnt[c] += 1
                flat[pos] = el
                pos += 1
                cnt[c] += 1
                break
            scale = inv[vec[pivot]]
            for r in range(rows):
                basis[nb, r] = (vec[r] * scale) % pp
            for r in range(ntracked):
                combo[ntracked, r] = (lam[r] * scale) % pp
            combo[ntracked, ntracked] = scale
            piv[nb] = pivot
            nb += 1
            ntracked += 1
    return t_np, flat_np[:pos].copy(), counts_np


def linear_one_added(columns, p, inverses, pre, bases, boff, cands, coff):
    pre_basis, pre_piv = _linear_pre_basis(columns, p, inverses, pre)
    cdef i64[:, ::1] cols = np.ascontiguousarray(columns, dtype=np.int64)
    cdef i64[::1] inv = np.ascontiguousarray(inverses, dtype=np.int64)
    cdef i64[:, ::1] pbas = pre_basis
    cdef i64[::1] ppiv = pre_piv
    cdef i32[::1] bas = np.ascontiguousarray(bases, dtype=np.int32)
    cdef i64[::1] bo = np.ascontiguousarray(boff, dtype=np.int64)
    cdef i32[::1] cnd = np.ascontiguousarray(cands, dtype=np.int32)
    cdef i64[::1] co = np.ascontiguousarray(coff, dtype=np.int64)
    cdef Py_ssize_t rows = cols.shape[0]
    cdef Py_ssize_t npre = pbas.shape[0]
    cdef i64 pp = p
    out_np = np.zeros(cnd.shape[0], dtype=np.uint8)
    cdef u8[::1] out = out_np
    cdef Py_ssize_t cap = rows + 1
    basis_np = np.zeros((npre + cap, rows), dtype=np.int64)
    cdef i64[:, ::1] basis = basis_np
    piv_np = np.zeros(npre + cap, dtype=np.int64)
    cdef i64[::1] piv = piv_np
    vec_np = np.empty(rows, dtype=np.int64)
    cdef i64[::1] vec = vec_np
    cdef Py_ssize_t k, i, j, r, nb, pivot
    cdef i64 f, scale, x
    cdef i32 el
    cdef bint ok
    for j in range(npre):
        for r in range(rows):
            basis[j, r] = pbas[j, r]
        piv[j] = ppiv[j]
    for k in range(bo.shape[0] - 1):
        nb = npre
        ok = True
        for i in range(bo[k], bo[k + 1]):
            el = bas[i]
            for r in range(rows):
                vec[r] = cols[r, el]
            for j in range(nb):
                f = vec[piv[j]]
                if f:
                    for r in range(rows):
                        x = (vec[r] - f * basis[j, r]) % pp
                        if x < 0:
                            x += pp
                        vec[r] = x
            pivot = -1
            for r in range(rows):
                if vec[r]:
                    pivot = r
                    break
            if pivot < 0:
                ok = False
                break
            scale = inv[vec[pivot]]
            for r in range(rows):
                basis[nb, r] = (vec[r] * scale) % pp
            piv[nb] = pivot
            nb += 1
        if ok:
            for i in range(co[k], co[k + 1]):
                el = cnd[i]
                for r in range(rows):
                    vec[r] = cols[r, el]
                for j in range(nb):
                    f = vec[piv[j]]
                    if f:
                        for r in range(rows):
                            x = (vec[r] - f * basis[j, r]) % pp
                            if x < 0:
                                x += pp
                            vec[r] = x
                for r in range(rows):
                    if vec[r]:
                        out[i] = 1
                        break
    return out_np


def linear_greedy(columns, p, inverses, pre, order):
    cdef i64[:, ::1] cols = np.ascontiguousarray(columns, dtype=np.int64)
    cdef i64[::1] inv = np.ascontiguousarray(inverses, dtype=np.int64)
    cdef i32[::1] ord_v = np.ascontiguousarray(order, dtype=np.int32)
    pre_basis, pre_piv = _linear_pre_basis(columns, p, inverses, pre)
    cdef i64[:, ::1] pbas = pre_basis
    cdef i64[::1] ppiv = pre_piv
    cdef Py_ssize_t rows = cols.shape[0]
    cdef Py_ssize_t npre = pbas.shape[0]
    cdef i64 pp = p
    basis_np = np.zeros((rows + 1, rows), dtype=np.int64)
    cdef i64[:, ::1] basis = basis_np
    piv_np = np.zeros(rows + 1, dtype=np.int64)
    cdef i64[::1] piv = piv_np
    vec_np = np.empty(rows, dtype=np.int64)
    cdef i64[::1] vec = vec_np
    kept_np = np.empty(ord_v.shape[0], dtype=np.int32)
    cdef i32[::1] kept = kept_np
    cdef Py_ssize_t i, j, r, nb = 0, nkept = 0, pivot
    cdef i64 f, scale, x
    cdef i32 el
    for j in range(npre):
        for r in range(rows):
            basis[j, r] = pbas[j, r]
        piv[j] = ppiv[j]
        nb += 1
    for i in range(ord_v.shape[0]):
        el = ord_v[i]
        for r in range(rows):
            vec[r] = cols[r, el]
        for j in range(nb):
            f = vec[piv[j]]
            if f:
                for r in range(rows):
                    x = (vec[r] - f * basis[j, r]) % pp
                    if x < 0:
                        x += pp
                    vec[r] = x
        pivot = -1
        for r in range(rows):
            if vec[r]:
                pivot = r
                break
        if pivot < 0:
            continue
        scale = inv[vec[pivot]]
        for r in range(rows):
            basis[nb, r] = (vec[r] * scale) % pp
        piv[nb] = pivot
        nb += 1
        kept[nkept] = el
        nkept += 1
    return kept_np[:nkept].copy()
