"""Independent dense elimination used as an oracle against the sparse engine.

Deliberately written as textbook row reduction on dense lists with a
selectable pivot rule, sharing no code with nccalc.exact.
"""

from fractions import Fraction


def dense_rank(rows, rule="first"):
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    used = [False] * nrows
    for col in range(ncols):
        cand = [i for i in range(nrows) if not used[i] and m[i][col] != 0]
        if not cand:
            continue
        pick = cand[0] if rule == "first" else cand[-1]
        used[pick] = True
        rank += 1
        pv = m[pick][col]
        m[pick] = [v / pv for v in m[pick]]
        for i in range(nrows):
            if i != pick and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[pick])]
    return rank


def dense_kernel_dim(rows, ncols, rule="last"):
    return ncols - dense_rank(rows, rule=rule) if rows else ncols
