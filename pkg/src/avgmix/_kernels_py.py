"""Pure-Python fallback for the trajectory-stepping kernel.

Must be bit-identical to the compiled version: both advance via the first
index of the cumulative row strictly above the uniform draw."""

from bisect import bisect_right


def run_chunk(cum, state, u, out):
    n = cum.shape[1]
    rows = [row for row in cum]
    st = int(state)
    for i in range(len(u)):
        j = bisect_right(rows[st], u[i])
        if j >= n:
            j = n - 1
        st = j
        out[i] = j
    return st
