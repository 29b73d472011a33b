"""Pure-Python kernels.

Reference implementation of the hot loops; ``_ckernels.pyx`` mirrors it
line for line.  Both must produce bit-identical output: same multiplication
order, no reassociation.

Layout conventions (shared with the Cython module):

* graphs are in CSR form, ``ptr[i]:ptr[i+1]`` slices ``idx``;
* a CPT for node ``i`` is a flat row-major block starting at ``cpt_ptr[i]``
  whose leading axes are the parents (first parent slowest) and whose last
  axis is the node's own state;
* joint configurations run in C order over the variables (variable 0 slowest).
"""

from __future__ import annotations


def longest_path_levels(n, succ_ptr, succ_idx):
    """Longest-path-from-root level of every node, via Kahn's algorithm.

    Returns ``(levels, complete)``; ``complete`` is False when a cycle kept
    some nodes from ever reaching in-degree zero.
    """
    indeg = [0] * n
    for k in range(succ_ptr[n]):
        indeg[succ_idx[k]] += 1
    level = [0] * n
    stack = [i for i in range(n) if indeg[i] == 0]
    seen = 0
    while stack:
        u = stack.pop()
        seen += 1
        nxt = level[u] + 1
        for k in range(succ_ptr[u], succ_ptr[u + 1]):
            v = succ_idx[k]
            if level[v] < nxt:
                level[v] = nxt
            indeg[v] -= 1
            if indeg[v] == 0:
                stack.append(v)
    return level, seen == n


def joint_product(cards, par_ptr, par_idx, cpt_ptr, cpt_vals):
    n = len(cards)
    total = 1
    for c in cards:
        total *= c
    out = [0.0] * total
    if n == 0:
        if total:
            out[0] = 1.0
        return out

    # per node: list of (parent index, stride within the CPT block)
    strides = []
    for i in range(n):
        ps = par_idx[par_ptr[i] : par_ptr[i + 1]]
        mult = cards[i]
        pairs = []
        for p in reversed(ps):
            pairs.append((p, mult))
            mult *= cards[p]
        strides.append(pairs)

    state = [0] * n
    for k in range(total):
        prob = 1.0
        for i in range(n):
            off = cpt_ptr[i] + state[i]
            for p, m in strides[i]:
                off += state[p] * m
            prob *= cpt_vals[off]
        out[k] = prob
        # odometer, last variable fastest
        j = n - 1
        while j >= 0:
            state[j] += 1
            if state[j] < cards[j]:
                break
            state[j] = 0
            j -= 1
    return out
