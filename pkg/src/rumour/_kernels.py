"""numba kernels for batch Monte Carlo.

Ports of ``rumour.rng`` plus per-trial loops of the simulators. Every kernel
takes a contiguous trial range ``[start, start + count)`` so callers can split
work across threads; kernels release the GIL.
"""

import numpy as np
from numba import njit

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_TWO_M52 = 2.0**-52

_OPTS = dict(cache=True, nogil=True)


@njit(**_OPTS)
def mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(**_OPTS)
def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@njit(**_OPTS)
def seed_state(seed, trial, s):
    key = mix64(seed ^ np.uint64(trial))
    state = key
    for i in range(4):
        state = state + _GAMMA
        s[i] = mix64(state)


@njit(**_OPTS)
def next_raw(s):
    result = _rotl(s[0] + s[3], 23) + s[0]
    t = s[1] << np.uint64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


@njit(**_OPTS)
def next_uniform(s):
    x = next_raw(s)
    return (np.float64(x >> np.uint64(12)) + 0.5) * _TWO_M52


@njit(**_OPTS)
def uniforms(seed, trial, count):
    s = np.empty(4, dtype=np.uint64)
    seed_state(seed, trial, s)
    out = np.empty(count)
    for i in range(count):
        out[i] = next_uniform(s)
    return out


@njit(**_OPTS)
def raw_stream(seed, trial, count):
    s = np.empty(4, dtype=np.uint64)
    seed_state(seed, trial, s)
    out = np.empty(count, dtype=np.uint64)
    for i in range(count):
        out[i] = next_raw(s)
    return out


@njit(**_OPTS)
def _draw(cdf, row, u):
    # smallest k with cdf[row, k] >= u; row length is the cap
    return np.searchsorted(cdf[row], u)


@njit(**_OPTS)
def firework_batch(cdf, row_of, pos, horizon, seed, start, count):
    """Generation-by-generation firework; activated set is always an index prefix.

    Returns (survived, rightmost, extinction_generation, activated_count).
    """
    survived = np.zeros(count, dtype=np.bool_)
    rightmost = np.zeros(count, dtype=np.int64)
    ext_gen = np.full(count, -1, dtype=np.int64)
    activated = np.zeros(count, dtype=np.int64)
    s = np.empty(4, dtype=np.uint64)
    for t in range(count):
        seed_state(seed, start + t, s)
        gen_start = 0
        end = 0
        gen = 0
        while True:
            reach = -np.inf
            for j in range(gen_start, end + 1):
                r = _draw(cdf, row_of[j], next_uniform(s))
                if pos[j] + r > reach:
                    reach = pos[j] + r
            new_end = end
            while new_end < horizon and pos[new_end + 1] <= reach:
                new_end += 1
            if new_end >= horizon:
                survived[t] = True
                end = horizon
                break
            if new_end == end:
                ext_gen[t] = gen
                break
            gen_start = end + 1
            end = new_end
            gen += 1
        rightmost[t] = end
        activated[t] = end + 1
    return survived, rightmost, ext_gen, activated


@njit(**_OPTS)
def firework_frontier_batch(cdf, row_of, pos, horizon, seed, start, count):
    """One-pass frontier recursion ``M <- max(M, u_i + R_i)``; returns rightmost index."""
    rightmost = np.zeros(count, dtype=np.int64)
    s = np.empty(4, dtype=np.uint64)
    for t in range(count):
        seed_state(seed, start + t, s)
        reach = pos[0] + _draw(cdf, row_of[0], next_uniform(s))
        i = 1
        while i <= horizon and pos[i] <= reach:
            if i == horizon:
                break
            r = pos[i] + _draw(cdf, row_of[i], next_uniform(s))
            if r > reach:
                reach = r
            i += 1
        if i > horizon or (i == horizon and pos[i] <= reach):
            rightmost[t] = horizon
        else:
            rightmost[t] = i - 1
    return rightmost


@njit(**_OPTS)
def reverse_batch(cdf, row_of, horizon, gen_cap, seed, start, count):
    """Reverse firework on vertices 0..horizon.

    Activation time of k is 1 + min activation time over active vertices in
    [k - R_k, k); a monotonic stack answers that suffix-range minimum.
    Returns (survived, rightmost, extinction_generation, activated_count, capped).
    """
    big = np.int64(1) << np.int64(62)
    survived = np.zeros(count, dtype=np.bool_)
    rightmost = np.zeros(count, dtype=np.int64)
    ext_gen = np.full(count, -1, dtype=np.int64)
    activated = np.zeros(count, dtype=np.int64)
    capped = np.zeros(count, dtype=np.bool_)
    times = np.empty(horizon + 1, dtype=np.int64)
    st_idx = np.empty(horizon + 1, dtype=np.int64)
    st_time = np.empty(horizon + 1, dtype=np.int64)
    s = np.empty(4, dtype=np.uint64)
    for t in range(count):
        seed_state(seed, start + t, s)
        next_uniform(s)  # slot 0 belongs to the origin
        times[0] = 0
        st_idx[0] = 0
        st_time[0] = 0
        top = 1
        max_time = 0
        for k in range(1, horizon + 1):
            r = _draw(cdf, row_of[k], next_uniform(s))
            if r > k:
                r = k
            tk = big
            if r >= 1:
                p = np.searchsorted(st_idx[:top], k - r)
                if p < top:
                    tk = st_time[p] + 1
            times[k] = tk
            if tk < big:
                while top > 0 and st_time[top - 1] >= tk:
                    top -= 1
                st_idx[top] = k
                st_time[top] = tk
                top += 1
                if tk > max_time:
                    max_time = tk
        if times[horizon] <= gen_cap:
            survived[t] = True
            stop = times[horizon]
        elif max_time + 1 <= gen_cap:
            ext_gen[t] = max_time + 1
            stop = max_time
        else:
            capped[t] = True
            stop = gen_cap
        n_act = 0
        right = 0
        for k in range(horizon + 1):
            if times[k] <= stop:
                n_act += 1
                right = k
        activated[t] = n_act
        rightmost[t] = right
    return survived, rightmost, ext_gen, activated, capped


@njit(**_OPTS)
def renewal_batch(cdf, row_of, pos, n_max, seed, start, count):
    """Indicators of B_n = {u_n > u_x + R_x for all x < n}, n = 1..n_max.

    Radii of vertices 0..n_max-1 are all drawn (diagnostic full sampling).
    """
    out = np.zeros((count, n_max), dtype=np.bool_)
    s = np.empty(4, dtype=np.uint64)
    for t in range(count):
        seed_state(seed, start + t, s)
        reach = -np.inf
        for n in range(1, n_max + 1):
            x = n - 1
            r = pos[x] + _draw(cdf, row_of[x], next_uniform(s))
            if r > reach:
                reach = r
            out[t, n - 1] = pos[n] > reach
    return out
