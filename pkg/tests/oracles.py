"""Brute-force order oracles that read only the stored cover pairs."""


def closure(p):
    """Strict order as a set of pairs, by DFS over the stored covers."""
    up = {x: [] for x in p.elements}
    for lo, hi in p.edges:
        up[p.elements[lo]].append(p.elements[hi])
    less = set()
    for x in p.elements:
        stack = list(up[x])
        while stack:
            y = stack.pop()
            if (x, y) not in less:
                less.add((x, y))
                stack.extend(up[y])
    return less


def preserves_order(p, g, less=None):
    less = closure(p) if less is None else less
    if len(g) != p.n or set(g) != set(p.elements) or set(g.values()) != set(p.elements):
        return False
    return all(((g[a], g[b]) in less) == ((a, b) in less) for a in p.elements for b in p.elements)


def saturated_chain_lengths(p, bottom, b):
    """Lengths of every saturated chain from bottom to b."""
    below = {}
    for lo, hi in p.edges:
        below.setdefault(p.elements[hi], []).append(p.elements[lo])
    if b == bottom:
        return {1}
    return {n + 1 for a in below.get(b, []) for n in saturated_chain_lengths(p, bottom, a)}


def up_sets(p, less):
    ups = {x: {x} for x in p.elements}
    for a, b in less:
        ups[a].add(b)
    return ups


def brute_join(p, m, ups):
    """The unique upper bound of m lying below every other upper bound, or None."""
    bounds = set(p.elements)
    for x in m:
        bounds &= ups[x]
    least = [u for u in bounds if ups[u] >= bounds]
    return least[0] if len(least) == 1 else None
