"""Pure-Python evaluation kernels.

Reference implementations of the per-family batch evaluators.  The
compiled extension (``_speedups``) mirrors these exactly; equivalence is
enforced by tests.  Conventions shared by both backends:

* chains: ``orders``/``offsets`` form a CSR layout of element-id rows; the
  result per chain is the 1-based length of the first dependent prefix,
  or 0 when every prefix (with the preload appended) stays independent.
* circuits: additionally returns the members of the first circuit per
  chain, restricted to chain elements (the preload is quotient context).
* one_added: per (base, candidates) pair, 1 iff base + candidate is
  independent; a dependent base makes every answer 0.
* greedy: scans one order and keeps each element that preserves
  independence; returns the kept ids.

``pre`` is always the array of contracted element ids of the view.
"""

from __future__ import annotations

import numpy as np


# ---------------------------------------------------------------- partition


def _part_counts(part_id, budgets, pre):
    counts = np.zeros(len(budgets), dtype=np.int64)
    for e in pre:
        counts[part_id[e]] += 1
    return counts


def partition_chain(part_id, budgets, pre, orders, offsets):
    nchains = len(offsets) - 1
    base = _part_counts(part_id, budgets, pre)
    out = np.zeros(nchains, dtype=np.int32)
    for c in range(nchains):
        counts = base.copy()
        for j, e in enumerate(orders[offsets[c] : offsets[c + 1]]):
            pid = part_id[e]
            counts[pid] += 1
            if counts[pid] > budgets[pid]:
                out[c] = j + 1
                break
    return out


def partition_circuit(part_id, budgets, pre, orders, offsets):
    t_arr = partition_chain(part_id, budgets, pre, orders, offsets)
    flat: list[int] = []
    counts = np.zeros(len(t_arr), dtype=np.int64)
    for c, t in enumerate(t_arr):
        if t == 0:
            continue
        chunk = orders[offsets[c] : offsets[c] + t]
        pid = part_id[chunk[t - 1]]
        members = [int(e) for e in chunk if part_id[e] == pid]
        flat.extend(members)
        counts[c] = len(members)
    return t_arr, np.array(flat, dtype=np.int32), counts


def partition_one_added(part_id, budgets, pre, bases, boff, cands, coff):
    base0 = _part_counts(part_id, budgets, pre)
    out = np.zeros(len(cands), dtype=np.uint8)
    for k in range(len(boff) - 1):
        counts = base0.copy()
        ok = True
        for e in bases[boff[k] : boff[k + 1]]:
            pid = part_id[e]
            counts[pid] += 1
            if counts[pid] > budgets[pid]:
                ok = False
                break
        for j in range(coff[k], coff[k + 1]):
            if ok:
                pid = part_id[cands[j]]
                out[j] = 1 if counts[pid] + 1 <= budgets[pid] else 0
    return out


def partition_greedy(part_id, budgets, pre, order):
    counts = _part_counts(part_id, budgets, pre)
    kept = []
    for e in order:
        pid = part_id[e]
        if counts[pid] + 1 <= budgets[pid]:
            counts[pid] += 1
            kept.append(int(e))
    return np.array(kept, dtype=np.int32)


# ------------------------------------------------------------------ graphic


class _UnionFind:
    def __init__(self, nv):
        self.parent = np.arange(nv, dtype=np.int32)

    def copy(self):
        uf = _UnionFind.__new__(_UnionFind)
        uf.parent = self.parent.copy()
        return uf

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def _graphic_pre_uf(eu, ev, nv, pre):
    uf = _UnionFind(nv)
    for e in pre:
        uf.union(eu[e], ev[e])
    return uf


def graphic_chain(eu, ev, nv, pre, orders, offsets):
    nchains = len(offsets) - 1
    base = _graphic_pre_uf(eu, ev, nv, pre)
    out = np.zeros(nchains, dtype=np.int32)
    for c in range(nchains):
        uf = base.copy()
        for j, e in enumerate(orders[offsets[c] : offsets[c + 1]]):
            if not uf.union(eu[e], ev[e]):
                out[c] = j + 1
                break
    return out


def _graphic_circuit_members(eu, ev, nv, pre, chunk, t):
    """Chain elements on the cycle closed by chunk[t-1] in the prefix forest."""
    closing = chunk[t - 1]
    adj: dict[int, list[tuple[int, int, bool]]] = {}
    for e in pre:
        adj.setdefault(int(eu[e]), []).append((int(ev[e]), int(e), False))
        adj.setdefault(int(ev[e]), []).append((int(eu[e]), int(e), False))
    for e in chunk[: t - 1]:
        adj.setdefault(int(eu[e]), []).append((int(ev[e]), int(e), True))
        adj.setdefault(int(ev[e]), []).append((int(eu[e]), int(e), True))
    src, dst = int(eu[closing]), int(ev[closing])
    if src == dst:
        return [int(closing)]
    # BFS through the forest from src to dst; the path is unique.
    prev: dict[int, tuple[int, int, bool]] = {src: (-1, -1, False)}
    queue = [src]
    while queue:
        nxt = []
        for v in queue:
            for w, e, is_chain in adj.get(v, ()):
                if w not in prev:
                    prev[w] = (v, e, is_chain)
                    nxt.append(w)
        if dst in prev:
            break
        queue = nxt
    members = [int(closing)]
    v = dst
    while v != src:
        pv, e, is_chain = prev[v]
        if is_chain:
            members.append(e)
        v = pv
    return members


def graphic_circuit(eu, ev, nv, pre, orders, offsets):
    t_arr = graphic_chain(eu, ev, nv, pre, orders, offsets)
    flat: list[int] = []
    counts = np.zeros(len(t_arr), dtype=np.int64)
    for c, t in enumerate(t_arr):
        if t == 0:
            continue
        chunk = orders[offsets[c] : offsets[c] + t]
        members = _graphic_circuit_members(eu, ev, nv, pre, chunk, t)
        flat.extend(int(m) for m in members)
        counts[c] = len(members)
    return t_arr, np.array(flat, dtype=np.int32), counts


def graphic_one_added(eu, ev, nv, pre, bases, boff, cands, coff):
    base0 = _graphic_pre_uf(eu, ev, nv, pre)
    out = np.zeros(len(cands), dtype=np.uint8)
    for k in range(len(boff) - 1):
        uf = base0.copy()
        ok = True
        for e in bases[boff[k] : boff[k + 1]]:
            if not uf.union(eu[e], ev[e]):
                ok = False
                break
        for j in range(coff[k], coff[k + 1]):
            if ok:
                e = cands[j]
                out[j] = 1 if uf.find(eu[e]) != uf.find(ev[e]) else 0
    return out


def graphic_greedy(eu, ev, nv, pre, order):
    uf = _graphic_pre_uf(eu, ev, nv, pre)
    kept = []
    for e in order:
        if uf.union(eu[e], ev[e]):
            kept.append(int(e))
    return np.array(kept, dtype=np.int32)


# ------------------------------------------------------------------- linear


class _Eliminator:
    """Incremental GF(p) elimination with optional combination tracking."""

    def __init__(self, columns, p, inverses, pre, track=False):
        self.cols = columns
        self.p = int(p)
        self.inv = inverses
        self.track = track
        self.basis: list[np.ndarray] = []
        self.pivots: list[int] = []
        self.combos: list[np.ndarray | None] = []
        self.tracked = 0
        for e in pre:
            self.insert(int(e), tracked=False)

    def _reduce(self, vec, lam=None):
        p = self.p
        for b, piv, combo in zip(self.basis, self.pivots, self.combos):
            f = int(vec[piv])
            if f:
                vec = (vec - f * b) % p
                if lam is not None and combo is not None:
                    lam = (lam - f * combo) % p
        return vec, lam

    def insert(self, e, tracked=True):
        """Returns (independent, lam) where lam covers tracked insertions."""
        p = self.p
        vec = self.cols[:, e].copy()
        lam = np.zeros(self.tracked, dtype=np.int64) if (self.track and tracked) else None
        vec, lam = self._reduce(vec, lam)
        nz = np.nonzero(vec)[0]
        if len(nz) == 0:
            return False, lam
        piv = int(nz[0])
        scale = int(self.inv[vec[piv]])
        vec = (vec * scale) % p
        if self.track:
            if tracked:
                # basis vector = scale * (col_e + sum_j lam[j] * col_j)
                combo = np.zeros(self.tracked + 1, dtype=np.int64)
                combo[self.tracked] = 1
                if lam is not None:
                    combo[: self.tracked] = lam
                combo = (combo * scale) % p
                # widen existing combos to the new tracked length
                self.combos = [
                    None if c is None else np.concatenate([c, np.zeros(1, dtype=np.int64)])
                    for c in self.combos
                ]
                self.combos.append(combo)
                self.tracked += 1
            else:
                self.combos.append(None)
        else:
            self.combos.append(None)
        self.basis.append(vec)
        self.pivots.append(piv)
        return True, None

    def probe(self, e):
        """Independence of basis + column e, without mutating state."""
        vec, _ = self._reduce(self.cols[:, e].copy())
        return bool(np.any(vec))


def linear_chain(columns, p, inverses, pre, orders, offsets):
    nchains = len(offsets) - 1
    out = np.zeros(nchains, dtype=np.int32)
    for c in range(nchains):
        elim = _Eliminator(columns, p, inverses, pre)
        for j, e in enumerate(orders[offsets[c] : offsets[c + 1]]):
            ok, _ = elim.insert(int(e), tracked=False)
            if not ok:
                out[c] = j + 1
                break
    return out


def linear_circuit(columns, p, inverses, pre, orders, offsets):
    nchains = len(offsets) - 1
    t_arr = np.zeros(nchains, dtype=np.int32)
    flat: list[int] = []
    counts = np.zeros(nchains, dtype=np.int64)
    for c in range(nchains):
        chunk = orders[offsets[c] : offsets[c + 1]]
        elim = _Eliminator(columns, p, inverses, pre, track=True)
        for j, e in enumerate(chunk):
            ok, lam = elim.insert(int(e))
            if not ok:
                t_arr[c] = j + 1
                members = [int(chunk[i]) for i in np.nonzero(lam)[0]]
                members.append(int(e))
                flat.extend(members)
                counts[c] = len(members)
                break
    return t_arr, np.array(flat, dtype=np.int32), counts


def linear_one_added(columns, p, inverses, pre, bases, boff, cands, coff):
    out = np.zeros(len(cands), dtype=np.uint8)
    for k in range(len(boff) - 1):
        elim = _Eliminator(columns, p, inverses, pre)
        ok = True
        for e in bases[boff[k] : boff[k + 1]]:
            good, _ = elim.insert(int(e), tracked=False)
            if not good:
                ok = False
                break
        for j in range(coff[k], coff[k + 1]):
            if ok:
                out[j] = 1 if elim.probe(int(cands[j])) else 0
    return out


def linear_greedy(columns, p, inverses, pre, order):
    elim = _Eliminator(columns, p, inverses, pre)
    kept = []
    for e in order:
        ok, _ = elim.insert(int(e), tracked=False)
        if ok:
            kept.append(int(e))
    return np.array(kept, dtype=np.int32)
