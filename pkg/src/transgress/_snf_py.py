"""Pure-Python sparse Smith elimination kernel.

The compiled twin lives in ``_snf_ext.pyx``; both must produce identical
pivot sequences and operation logs.
"""


def _row_addmul(rows, colidx, k, i, q):
    # row_k += q * row_i
    rk = rows[k]
    for c, v in rows[i].items():
        nv = rk.get(c, 0) + q * v
        if nv:
            if c not in rk:
                colidx[c].add(k)
            rk[c] = nv
        elif c in rk:
            del rk[c]
            colidx[c].discard(k)


def _col_addmul(rows, colidx, l, j, q):
    # col_l += q * col_j
    for r in list(colidx[j]):
        row = rows[r]
        nv = row.get(l, 0) + q * row[j]
        if nv:
            if l not in row:
                colidx[l].add(r)
            row[l] = nv
        elif l in row:
            del row[l]
            colidx[l].discard(r)


def _global_pivot(rows, active_rows):
    best = None
    best_abs = 0
    for r in active_rows:
        row = rows[r]
        if not row:
            continue
        for c, v in row.items():
            a = v if v > 0 else -v
            if best is None or a < best_abs or (a == best_abs and (r, c) < best):
                best = (r, c)
                best_abs = a
        if best_abs == 1:
            break
    return best


def _local_pivot(rows, colidx, i, j):
    best = None
    best_abs = 0
    for c, v in rows[i].items():
        a = abs(v)
        if best is None or a < best_abs or (a == best_abs and (i, c) < best):
            best, best_abs = (i, c), a
    for r in colidx[j]:
        a = abs(rows[r][j])
        if a < best_abs or (a == best_abs and (r, j) < best):
            best, best_abs = (r, j), a
    return best


def eliminate(rows, ncols):
    """Reduce ``rows`` (list of ``{col: int}``) to diagonal form in place.

    Returns ``(pivots, rowops, colops)``.  ``pivots`` is a list of
    ``(row, col, d)`` with ``d > 0`` forming a divisibility chain.
    ``rowops`` entries are ``(k, i, q)`` meaning ``row_k += q*row_i`` or
    ``(i, None, -1)`` meaning ``row_i = -row_i``; ``colops`` entries are
    ``(l, j, q)`` meaning ``col_l += q*col_j``.
    """
    nrows = len(rows)
    colidx = [set() for _ in range(ncols)]
    for r, row in enumerate(rows):
        for c in row:
            colidx[c].add(r)
    active = [r for r in range(nrows) if rows[r]]
    pivots = []
    rowops = []
    colops = []
    while True:
        active = [r for r in active if rows[r]]
        piv = _global_pivot(rows, active)
        if piv is None:
            break
        i, j = piv
        while True:
            p = rows[i][j]
            dirty = False
            for k in sorted(colidx[j]):
                if k == i:
                    continue
                q = -(rows[k][j] // p)
                _row_addmul(rows, colidx, k, i, q)
                rowops.append((k, i, q))
                if j in rows[k]:
                    dirty = True
            for l in sorted(rows[i]):
                if l == j:
                    continue
                q = -(rows[i][l] // p)
                _col_addmul(rows, colidx, l, j, q)
                colops.append((l, j, q))
                if l in rows[i]:
                    dirty = True
            if dirty:
                i, j = _local_pivot(rows, colidx, i, j)
                continue
            if p == 1 or p == -1:
                break
            bad = None
            for r in active:
                if r == i:
                    continue
                for c, v in rows[r].items():
                    if v % p:
                        bad = r
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            _row_addmul(rows, colidx, i, bad, 1)
            rowops.append((i, bad, 1))
        p = rows[i][j]
        if p < 0:
            rows[i][j] = -p
            rowops.append((i, None, -1))
            p = -p
        pivots.append((i, j, p))
        del rows[i][j]
        colidx[j].discard(i)
        active.remove(i)
    return pivots, rowops, colops
