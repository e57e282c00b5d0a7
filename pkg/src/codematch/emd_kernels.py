"""Network simplex kernel for the balanced transportation problem.

Operates on integer supplies/demands so basic flows stay exactly
integral (no floating-point infeasibility). Compiled with numba when
enabled; the pure-Python path runs the identical code.

Pivoting: Dantzig rule (most negative reduced cost) with a deterministic
leaving-arc tie-break; switches to Bland's rule after a stall budget to
rule out cycling on degenerate instances.
"""

import numpy as np

from .accel import jit_kernel


@jit_kernel
def _northwest_corner(supply, demand, basis_row, basis_col, flow):
    """Initial basic feasible solution; fills exactly m+n-1 basis cells."""
    m = supply.shape[0]
    n = demand.shape[0]
    s = supply.copy()
    d = demand.copy()
    i = 0
    j = 0
    b = 0
    while True:
        basis_row[b] = i
        basis_col[b] = j
        t = min(s[i], d[j])
        flow[b] = t
        s[i] -= t
        d[j] -= t
        b += 1
        if i == m - 1 and j == n - 1:
            break
        if i == m - 1:
            j += 1
        elif j == n - 1:
            i += 1
        elif s[i] == 0:
            i += 1
        else:
            j += 1
    return b


@jit_kernel
def _solve_kernel(supply, demand, cost):
    """Exact min-cost transportation plan for integer supply/demand.

    Returns the m x n flow matrix (int64). Assumes balanced totals and
    non-negative finite costs.
    """
    m = supply.shape[0]
    n = demand.shape[0]
    nn = m + n
    nb = nn - 1  # basis size

    basis_row = np.empty(nb, dtype=np.int64)
    basis_col = np.empty(nb, dtype=np.int64)
    bflow = np.empty(nb, dtype=np.int64)
    _northwest_corner(supply, demand, basis_row, basis_col, bflow)

    # tree bookkeeping, rebuilt from the basis each pivot
    parent = np.empty(nn, dtype=np.int64)
    parent_cell = np.empty(nn, dtype=np.int64)
    depth = np.empty(nn, dtype=np.int64)
    pi = np.empty(nn, dtype=np.float64)
    # adjacency as linked lists over 2*(nn-1) arc slots
    head = np.empty(nn, dtype=np.int64)
    nxt = np.empty(2 * nb, dtype=np.int64)
    to = np.empty(2 * nb, dtype=np.int64)
    cell_of = np.empty(2 * nb, dtype=np.int64)
    stack = np.empty(nn, dtype=np.int64)
    path_cell = np.empty(nn, dtype=np.int64)
    path_sign = np.empty(nn, dtype=np.int64)

    cmax = 0.0
    for i in range(m):
        for j in range(n):
            if cost[i, j] > cmax:
                cmax = cost[i, j]
    eps = 1e-12 * (1.0 + cmax)

    bland_after = 100 * nn * nn + 10000
    it = 0
    while True:
        it += 1
        # rebuild adjacency
        for v in range(nn):
            head[v] = -1
        slot = 0
        for b in range(nb):
            u = basis_row[b]
            v = m + basis_col[b]
            to[slot] = v
            cell_of[slot] = b
            nxt[slot] = head[u]
            head[u] = slot
            slot += 1
            to[slot] = u
            cell_of[slot] = b
            nxt[slot] = head[v]
            head[v] = slot
            slot += 1

        # DFS from node 0: parents, depths, potentials
        # convention: pi[sink] - pi[source] = cost on basic cells
        for v in range(nn):
            depth[v] = -1
        parent[0] = -1
        parent_cell[0] = -1
        depth[0] = 0
        pi[0] = 0.0
        top = 0
        stack[top] = 0
        top += 1
        while top > 0:
            top -= 1
            v = stack[top]
            e = head[v]
            while e != -1:
                w = to[e]
                if depth[w] == -1:
                    b = cell_of[e]
                    depth[w] = depth[v] + 1
                    parent[w] = v
                    parent_cell[w] = b
                    if w >= m:
                        pi[w] = pi[v] + cost[basis_row[b], basis_col[b]]
                    else:
                        pi[w] = pi[v] - cost[basis_row[b], basis_col[b]]
                    stack[top] = w
                    top += 1
                e = nxt[e]

        # pricing
        ei = -1
        ej = -1
        best = -eps
        if it <= bland_after:
            for i in range(m):
                for j in range(n):
                    rc = cost[i, j] - pi[m + j] + pi[i]
                    if rc < best:
                        best = rc
                        ei = i
                        ej = j
        else:
            done = False
            for i in range(m):
                for j in range(n):
                    rc = cost[i, j] - pi[m + j] + pi[i]
                    if rc < best:
                        ei = i
                        ej = j
                        done = True
                        break
                if done:
                    break
        if ei == -1:
            break

        # cycle: path from source ei to sink m+ej through the tree;
        # cells along the path alternate -, +, -, ... starting at -
        a = ei
        bnode = m + ej
        la = 0
        while depth[a] > depth[bnode]:
            path_cell[la] = parent_cell[a]
            path_sign[la] = -1 if la % 2 == 0 else 1
            la += 1
            a = parent[a]
        # collect b-side into temporary region at the tail
        lb = 0
        while depth[bnode] > depth[a]:
            stack[lb] = parent_cell[bnode]
            lb += 1
            bnode = parent[bnode]
        while a != bnode:
            path_cell[la] = parent_cell[a]
            path_sign[la] = -1 if la % 2 == 0 else 1
            la += 1
            a = parent[a]
            stack[lb] = parent_cell[bnode]
            lb += 1
            bnode = parent[bnode]
        total = la + lb
        if total < 2:
            # entering cell is already basic: reduced cost was float
            # noise on a true zero; we are at optimality
            break
        for t in range(lb):
            path_cell[la + t] = stack[lb - 1 - t]
            idx = la + t
            path_sign[idx] = -1 if idx % 2 == 0 else 1

        # ratio test over the decreasing cells
        theta = np.int64(0)
        leave = -1
        first = True
        for t in range(total):
            if path_sign[t] == -1:
                f = bflow[path_cell[t]]
                if first or f < theta:
                    theta = f
                    leave = path_cell[t]
                    first = False

        # pivot
        for t in range(total):
            bflow[path_cell[t]] += path_sign[t] * theta
        basis_row[leave] = ei
        basis_col[leave] = ej
        bflow[leave] = theta

    out = np.zeros((m, n), dtype=np.int64)
    for b in range(nb):
        out[basis_row[b], basis_col[b]] += bflow[b]
    return out
