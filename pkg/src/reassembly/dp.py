"""Exact shortest-path over the state-merged decision DAG.

Row probabilities do not depend on the path prefix, so partial assignments
that occupy the same positions can be merged into one state. A forward
pass over (layer, occupied-mask) states finds the same optimum as the
materialized tree in O(f * 2^p * 9) regardless of tree size.

Ties are broken exactly as in the tree: among equal-cost paths the
lexicographically smallest code sequence wins. Sequences are packed into a
uint64 (4 bits per code, first layer in the highest nibble), so integer
order equals lexicographic order; this caps the fast path at 16 layers,
which covers a full 3x3 puzzle with 8 extra fragments.
"""

from __future__ import annotations

import numpy as np

from .core import OUTSIDER_CODE, PROB_FLOOR
from .errors import DomainError
from .graph import _POPCOUNT, PlannedLayers, _bit

MAX_FAST_LAYERS = 16

_MASKS = np.arange(256, dtype=np.int64)


def _check_depth(f: int):
    if f > MAX_FAST_LAYERS:
        raise DomainError(
            f"{f} fragments exceed the {MAX_FAST_LAYERS}-layer fast solver; use the graph engine"
        )


def solve_planned(plan: PlannedLayers) -> tuple[float, np.ndarray] | None:
    """Optimal (cost, codes) for a planned layer stack, or None if infeasible."""
    _check_depth(plan.f)
    best = np.full(256, np.inf)
    pref = np.zeros(256, dtype=np.uint64)
    best[0] = 0.0
    for k in range(plan.f):
        nxt = np.full(256, np.inf)
        npref = np.zeros(256, dtype=np.uint64)
        for code in plan.surviving[k]:
            w = plan.weight_of(k, code)
            if code == OUTSIDER_CODE:
                if plan.allow_empties:
                    src = _MASKS
                else:
                    src = np.nonzero(_POPCOUNT + (plan.f - k - 1) >= plan.p)[0]
                tgt = src
            else:
                src = np.nonzero((_MASKS & _bit(code)) == 0)[0]
                tgt = src | _bit(code)
            cand = best[src] + w
            candp = (pref[src] << np.uint64(4)) | np.uint64(code)
            upd = (cand < nxt[tgt]) | ((cand == nxt[tgt]) & (candp < npref[tgt]))
            upd &= np.isfinite(cand)
            nxt[tgt] = np.where(upd, cand, nxt[tgt])
            npref[tgt] = np.where(upd, candp, npref[tgt])
        best, pref = nxt, npref

    if plan.allow_empties:
        states = np.nonzero(np.isfinite(best))[0]
    else:
        states = np.array([plan.avail_mask]) if np.isfinite(best[plan.avail_mask]) else np.empty(0, np.int64)
    if len(states) == 0:
        return None
    costs = best[states]
    ties = states[costs == costs.min()]
    state = ties[np.argmin(pref[ties])]
    return float(best[state]), _unpack_codes(int(pref[state]), plan.f)


def _unpack_codes(packed: int, f: int) -> np.ndarray:
    codes = np.empty(f, dtype=np.int8)
    for k in range(f - 1, -1, -1):
        codes[k] = packed & 0xF
        packed >>= 4
    return codes


def effective_probs(probs: np.ndarray, allow_outsiders: bool) -> np.ndarray:
    """Batched version of the outsider-mode normalization in plan_layers."""
    eff = np.array(probs, dtype=np.float64)
    if not allow_outsiders:
        lat = eff[..., :8]
        sums = lat.sum(axis=-1, keepdims=True)
        uniform = np.full_like(lat, 1.0 / 8.0)
        eff[..., :8] = np.where(sums > 0.0, lat / np.where(sums > 0.0, sums, 1.0), uniform)
        eff[..., 8] = 0.0
    return eff


def solve_batch(
    probs: np.ndarray,
    theta: float = 0.0,
    allow_outsiders: bool = True,
    allow_empties: bool = True,
    chunk: int = 10_000,
) -> tuple[np.ndarray, np.ndarray]:
    """Solve many same-shape instances at once over all 8 positions.

    ``probs`` is (B, f, 9) with rows in processing order. Returns
    (costs (B,), codes (B, f)); infeasible instances get cost=inf. Matches
    solve_planned exactly for the identity row order.
    """
    probs = np.asarray(probs, dtype=np.float64)
    B, f, _ = probs.shape
    _check_depth(f)
    costs = np.empty(B)
    codes = np.empty((B, f), dtype=np.int8)
    for lo in range(0, B, chunk):
        hi = min(lo + chunk, B)
        costs[lo:hi], codes[lo:hi] = _solve_chunk(
            probs[lo:hi], theta, allow_outsiders, allow_empties
        )
    return costs, codes


def _solve_chunk(probs, theta, allow_outsiders, allow_empties):
    B, f, _ = probs.shape
    eff = effective_probs(probs, allow_outsiders)
    weights = -np.log(np.maximum(eff, PROB_FLOOR))
    elig = eff >= theta
    if not allow_outsiders:
        elig[..., 8] = False
        # Rescue rows whose every lateral edge fell under theta.
        dead = ~elig[..., :8].any(axis=-1)
        if dead.any():
            b, k = np.nonzero(dead)
            elig[b, k, np.argmax(eff[b, k, :8], axis=-1)] = True

    # Mask-major layout: fancy indexing then touches contiguous rows.
    best = np.full((256, B), np.inf)
    pref = np.zeros((256, B), dtype=np.uint64)
    best[0] = 0.0
    nxt = np.empty_like(best)
    npref = np.empty_like(pref)
    codes = list(range(1, 9)) + ([OUTSIDER_CODE] if allow_outsiders else [])
    moves = []
    for code in codes:
        if code == OUTSIDER_CODE:
            src = _MASKS
            tgt = src
        else:
            src = np.nonzero((_MASKS & _bit(code)) == 0)[0]
            tgt = src | _bit(code)
        moves.append((code, 8 if code == OUTSIDER_CODE else code - 1, src, tgt))

    four = np.uint64(4)
    for k in range(f):
        nxt.fill(np.inf)
        npref.fill(0)
        for code, col, src, tgt in moves:
            if code == OUTSIDER_CODE and not allow_empties:
                src = tgt = np.nonzero(_POPCOUNT + (f - k - 1) >= 8)[0]
            # Only masks with <= k placed positions are reachable at layer k.
            reach = _POPCOUNT[src] <= k
            if not reach.all():
                src, tgt = src[reach], tgt[reach]
            cand = best[src] + weights[:, k, col]
            candp = (pref[src] << four) | np.uint64(code)
            cur = nxt[tgt]
            upd = cand < cur
            ties = cand == cur
            if ties.any():
                np.logical_or(upd, ties & (candp < npref[tgt]), out=upd)
            upd &= np.isfinite(cand)
            upd &= elig[:, k, col]
            np.copyto(cur, cand, where=upd)
            nxt[tgt] = cur
            curp = npref[tgt]
            np.copyto(curp, candp, where=upd)
            npref[tgt] = curp
        best, nxt = nxt, best
        pref, npref = npref, pref

    if not allow_empties:
        keep = np.full((256, 1), np.inf)
        keep[255] = 0.0
        best = best + keep

    # Lexicographic (cost, packed-prefix) argmin per instance.
    min_cost = best.min(axis=0)
    is_min = best == min_cost
    pref_masked = np.where(is_min, pref, np.uint64(0xFFFFFFFFFFFFFFFF))
    state = np.argmin(pref_masked, axis=0)
    packed = pref[state, np.arange(B)]
    out_codes = np.empty((B, f), dtype=np.int8)
    for k in range(f - 1, -1, -1):
        out_codes[:, k] = (packed & np.uint64(0xF)).astype(np.int8)
        packed = packed >> four
    return min_cost, out_codes
