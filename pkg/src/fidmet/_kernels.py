"""Numba-compiled inner loops: exact enumeration counters and Monte Carlo chains.

All randomness comes from an inline PCG32 generator seeded through splitmix64,
so results are bit-identical for a given seed across platforms and thread
counts. Kernels are nogil so sweep drivers can run them from a thread pool.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint32, uint64

_MASK64 = uint64(0xFFFFFFFFFFFFFFFF)


@njit(inline="always")
def _splitmix64(z):
    z = (z + uint64(0x9E3779B97F4A7C15)) & _MASK64
    z = ((z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)) & _MASK64
    z = ((z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)) & _MASK64
    return z ^ (z >> uint64(31))


@njit(inline="always")
def _pcg32(state, inc):
    old = state
    state = (old * uint64(6364136223846793005) + inc) & _MASK64
    xorshifted = uint32(((old >> uint64(18)) ^ old) >> uint64(27))
    rot = uint32(old >> uint64(59))
    out = uint32((xorshifted >> rot) | (xorshifted << ((-rot) & uint32(31))))
    return out, state


@njit(inline="always")
def _rand_u01(state, inc):
    out, state = _pcg32(state, inc)
    return np.float64(out) * (1.0 / 4294967296.0), state


@njit(inline="always")
def _rand_below(n, state, inc):
    # unbiased bounded draw; threshold (-n) mod n avoids the modulo bias
    t = uint32((-uint32(n)) % uint32(n))
    while True:
        out, state = _pcg32(state, inc)
        if out >= t:
            return uint32(out % uint32(n)), state


@njit(inline="always")
def _seed_stream(seed):
    state = _splitmix64(uint64(seed))
    inc = _splitmix64(uint64(seed) + uint64(1)) | uint64(1)
    return state, inc


@njit(cache=True, nogil=True)
def pcg32_raw_stream(state, inc, n):
    """Raw generator outputs for a given state/increment (test hook)."""
    out = np.empty(n, dtype=np.uint64)
    s = uint64(state)
    i = uint64(inc)
    for k in range(n):
        o, s = _pcg32(s, i)
        out[k] = o
    return out


@njit(cache=True, nogil=True)
def seeded_stream(seed, n):
    """Generator outputs as the MC kernels would see them for ``seed``."""
    out = np.empty(n, dtype=np.uint64)
    s, inc = _seed_stream(uint64(seed))
    for k in range(n):
        o, s = _pcg32(s, inc)
        out[k] = o
    return out


@njit(cache=True, nogil=True)
def cut_histogram(n_bits, shift, bond_a, bond_b):
    """Histogram of the bond cut over all masks (k << shift), k < 2^n_bits.

    A mask assigns one bit per site; the cut of a mask is the number of bonds
    whose endpoint bits differ. shift=1 keeps bit 0 (site 0) fixed at zero,
    which enumerates canonical representatives; shift=0 enumerates everything.
    """
    n_masks = np.int64(1) << n_bits
    nb = bond_a.shape[0]
    hist = np.zeros(nb + 1, dtype=np.int64)
    for k in range(n_masks):
        m = k << shift
        cut = 0
        for j in range(nb):
            cut += ((m >> bond_a[j]) ^ (m >> bond_b[j])) & 1
        hist[cut] += 1
    return hist


@njit(inline="always")
def _grow_cluster(spins, nbr, stack, p_add, s0, state, inc):
    # flip-as-you-grow single cluster; returns cluster size
    old = spins[s0]
    spins[s0] = -old
    stack[0] = s0
    top = 1
    size = 1
    while top > 0:
        top -= 1
        cur = stack[top]
        for k in range(4):
            nb = nbr[cur, k]
            if spins[nb] == old:
                r, state = _rand_u01(state, inc)
                if r < p_add:
                    spins[nb] = -old
                    stack[top] = nb
                    top += 1
                    size += 1
    return size, state


@njit(cache=True, nogil=True)
def wolff_energy_series(L, beta, n_therm, n_sweeps, seed):
    """Ferromagnetic-Ising energies, one value per measurement sweep.

    Thermalization batches single-cluster updates until >= L^2 spins have
    flipped per batch, while recording the mean cluster size. Measurement
    sweeps then use a fixed number of clusters (frozen from the calibration):
    a state-dependent batch size during measurement would bias the sample
    toward configurations reached by large clusters.
    """
    N = L * L
    nbr = np.empty((N, 4), dtype=np.int64)
    for r in range(L):
        for c in range(L):
            s = r * L + c
            nbr[s, 0] = r * L + (c + 1) % L
            nbr[s, 1] = r * L + (c - 1) % L
            nbr[s, 2] = ((r + 1) % L) * L + c
            nbr[s, 3] = ((r - 1) % L) * L + c
    spins = np.ones(N, dtype=np.int8)
    stack = np.empty(N, dtype=np.int64)
    state, inc = _seed_stream(uint64(seed))
    p_add = 1.0 - np.exp(-2.0 * beta)

    total_clusters = np.int64(0)
    total_flips = np.int64(0)
    for _ in range(n_therm):
        flipped = 0
        while flipped < N:
            s0, state = _rand_below(N, state, inc)
            size, state = _grow_cluster(spins, nbr, stack, p_add, np.int64(s0), state, inc)
            flipped += size
            total_clusters += 1
        total_flips += flipped
    k_per_sweep = max(np.int64(1), np.int64(round(N * total_clusters / total_flips)))

    energies = np.empty(n_sweeps, dtype=np.float64)
    for sweep in range(n_sweeps):
        for _ in range(k_per_sweep):
            s0, state = _rand_below(N, state, inc)
            _, state = _grow_cluster(spins, nbr, stack, p_add, np.int64(s0), state, inc)
        e = np.int64(0)
        for s in range(N):
            e -= spins[s] * (spins[nbr[s, 0]] + spins[nbr[s, 2]])
        energies[sweep] = e
    return energies


@njit(cache=True, nogil=True)
def metropolis_energy_series(L, beta, n_therm, n_sweeps, seed):
    """Single-site Metropolis energies, one value per sweep of L^2 updates."""
    N = L * L
    spins = np.ones(N, dtype=np.int8)
    state, inc = _seed_stream(uint64(seed))
    energies = np.empty(n_sweeps, dtype=np.float64)
    for sweep in range(n_therm + n_sweeps):
        for _ in range(N):
            i, state = _rand_below(N, state, inc)
            r = i // L
            c = i % L
            nb = (
                spins[r * L + (c + 1) % L]
                + spins[r * L + (c - 1) % L]
                + spins[((r + 1) % L) * L + c]
                + spins[((r - 1) % L) * L + c]
            )
            d_e = 2.0 * spins[i] * nb
            u, state = _rand_u01(state, inc)
            if d_e <= 0.0 or u < np.exp(-beta * d_e):
                spins[i] = -spins[i]
        if sweep >= n_therm:
            e = np.int64(0)
            for r in range(L):
                for c in range(L):
                    s = r * L + c
                    e -= spins[s] * (spins[r * L + (c + 1) % L] + spins[((r + 1) % L) * L + c])
            energies[sweep - n_therm] = e
    return energies


@njit(inline="always")
def _site_code(rev, L, s):
    # 4-bit in-arrow code of a site: W + 2E + 4S + 8N, given reversal bits
    # on the reference orientation (horizontal arrows along +column,
    # vertical arrows along -row)
    N2 = L * L
    r = s // L
    c = s % L
    left_h = r * L + (c - 1) % L
    up_v = N2 + ((r - 1) % L) * L + c
    code = 0
    if rev[left_h] == 0:
        code += 1
    if rev[s] == 1:
        code += 2
    if rev[N2 + s] == 0:
        code += 4
    if rev[up_v] == 1:
        code += 8
    return code


@njit(inline="always")
def _cd_of_code(code):
    # returns (is_c, is_d); c vertices have both horizontal or both vertical
    # arrows pointing in, d vertices have all four in or all four out
    is_c = 1 if code == 3 or code == 12 else 0
    is_d = 1 if code == 0 or code == 15 else 0
    return is_c, is_d


@njit(cache=True, nogil=True)
def vertex_mc_series(L, u, v, n_therm, n_sweeps, seed):
    """Markov chain over valid arrow configurations.

    Moves: reversal of the 4 bonds of a face (L^2 of them), or of all
    horizontal bonds in one row / all vertical bonds in one column (the two
    winding families, 2L moves). Each sweep draws L^2 + 2L + 1 slots, one
    of which is a lazy no-op, with Metropolis acceptance u^dn_c * v^dn_d.
    Returns the (n_c, n_d) series, one pair per sweep.

    The lazy slot is load-bearing: every relation among the move generators
    has even length, so configurations reachable in an even number of applied
    moves form a proper subgroup. At u = v = 1 nothing is ever rejected, and
    an even fixed proposal count per sweep would pin the recorded samples to
    that half of the space.
    """
    N2 = L * L
    n_bonds = 2 * N2
    rev = np.zeros(n_bonds, dtype=np.int8)
    state, inc = _seed_stream(uint64(seed))

    move_bonds = np.empty(2 * L, dtype=np.int64)
    move_sites = np.empty(2 * L, dtype=np.int64)
    n_c = 0
    n_d = 0
    for s in range(N2):
        is_c, is_d = _cd_of_code(_site_code(rev, L, s))
        n_c += is_c
        n_d += is_d

    n_moves = N2 + 2 * L
    per_sweep = n_moves + 1
    nc_series = np.empty(n_sweeps, dtype=np.int64)
    nd_series = np.empty(n_sweeps, dtype=np.int64)
    for sweep in range(n_therm + n_sweeps):
        for _ in range(per_sweep):
            m, state = _rand_below(n_moves + 1, state, inc)
            if m == n_moves:
                continue
            if m < N2:
                # face move: bonds of the plaquette anchored at site m
                r = m // L
                c = m % L
                down = ((r + 1) % L) * L + c
                right = r * L + (c + 1) % L
                downright = ((r + 1) % L) * L + (c + 1) % L
                nb_move = 4
                move_bonds[0] = m
                move_bonds[1] = down
                move_bonds[2] = N2 + m
                move_bonds[3] = N2 + right
                move_sites[0] = m
                move_sites[1] = right
                move_sites[2] = down
                move_sites[3] = downright
                ns_move = 4
            elif m < N2 + L:
                row = m - N2
                nb_move = L
                ns_move = L
                for c in range(L):
                    move_bonds[c] = row * L + c
                    move_sites[c] = row * L + c
            else:
                col = m - N2 - L
                nb_move = L
                ns_move = L
                for r in range(L):
                    move_bonds[r] = N2 + r * L + col
                    move_sites[r] = r * L + col

            dc = 0
            dd = 0
            for j in range(ns_move):
                is_c, is_d = _cd_of_code(_site_code(rev, L, move_sites[j]))
                dc -= is_c
                dd -= is_d
            for j in range(nb_move):
                rev[move_bonds[j]] ^= 1
            for j in range(ns_move):
                is_c, is_d = _cd_of_code(_site_code(rev, L, move_sites[j]))
                dc += is_c
                dd += is_d

            ratio = u**dc * v**dd
            accept = True
            if ratio < 1.0:
                rnd, state = _rand_u01(state, inc)
                accept = rnd < ratio
            if accept:
                n_c += dc
                n_d += dd
            else:
                for j in range(nb_move):
                    rev[move_bonds[j]] ^= 1
        if sweep >= n_therm:
            nc_series[sweep - n_therm] = n_c
            nd_series[sweep - n_therm] = n_d
    return nc_series, nd_series
