"""Independent naive-loop oracles.

Everything here recomputes quantities from the raw color matrix with plain
Python loops and breadth-first search, deliberately sharing no code with the
optimized library paths it cross-checks.
"""

from collections import Counter, deque


def as_lists(matrix) -> list:
    return [[int(c) for c in row] for row in matrix.cells]


def walk_count(cells, u, v, j, k) -> int:
    return sum(1 for w in range(len(cells)) if cells[u][w] == j and cells[w][v] == k)


def structure_constants(cells):
    """Full triple-loop recount; returns (tensor dict, None) or (None, witness)."""
    n = len(cells)
    reps = {}
    for u in range(n):
        for v in range(n):
            i = cells[u][v]
            hist = Counter((cells[u][w], cells[w][v]) for w in range(n))
            if i not in reps:
                reps[i] = (hist, (u, v))
            elif reps[i][0] != hist:
                return None, (i, reps[i][1], (u, v))
    return {i: dict(h) for i, (h, _) in reps.items()}, None


def distinguishing(cells, u, v) -> int:
    return sum(1 for w in range(len(cells)) if cells[w][u] != cells[w][v])


def distinguishing_values(cells, color) -> set:
    n = len(cells)
    return {
        distinguishing(cells, u, v)
        for u in range(n)
        for v in range(n)
        if cells[u][v] == color
    }


def bfs_distances(cells, color, source) -> list:
    n = len(cells)
    dist = [-1] * n
    dist[source] = 0
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in range(n):
            if cells[x][y] == color and dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def sphere_sizes(cells, color, source) -> tuple:
    dist = bfs_distances(cells, color, source)
    ecc = max(dist)
    return tuple(sum(1 for d in dist if d == k) for k in range(ecc + 1))


def distance_table(cells, color, source) -> dict:
    """Pair color -> distance in the chosen constituent, from one source."""
    dist = bfs_distances(cells, color, source)
    table = {}
    for v, d in enumerate(dist):
        c = cells[source][v]
        if c in table and table[c] != d:
            raise AssertionError(f"distance not determined by color {c}")
        table[c] = d
    return table


def residual_neighbors(cells, dominant, u) -> set:
    diag = cells[u][u]
    return {
        v for v in range(len(cells))
        if v != u and cells[u][v] not in (diag, dominant)
    }


def mu_values(cells, dominant) -> set:
    n = len(cells)
    out = set()
    for u in range(n):
        for v in range(n):
            if cells[u][v] == dominant:
                out.add(len(residual_neighbors(cells, dominant, u)
                            & residual_neighbors(cells, dominant, v)))
    return out


def lambda_values(cells, dominant, color) -> set:
    n = len(cells)
    out = set()
    for u in range(n):
        for v in range(n):
            if cells[u][v] == color:
                member = {w for w in range(n) if cells[u][w] == color}
                out.add(len(member & residual_neighbors(cells, dominant, v)))
    return out


def good_triples(cells, dominant, i, j, u, v, z_pool=None):
    """Quadruple loop over (w, x, y); returns (claw patterns at u, good count).

    `z_pool` overrides the candidate set for the blocking vertex z; by
    default it is everything (the color test on c(v,z) filters it).
    """
    n = len(cells)
    if z_pool is None:
        z_pool = range(n)
    q = 0
    good = 0
    for w in range(n):
        if cells[u][w] != i:
            continue
        for x in range(n):
            if cells[w][x] != j or cells[u][x] != dominant:
                continue
            for y in range(n):
                if cells[w][y] != j or cells[u][y] != dominant:
                    continue
                if cells[x][y] != dominant:
                    continue
                q += 1
                blocked = any(
                    cells[v][z] == i and cells[z][x] == j and cells[z][y] == j
                    for z in z_pool
                )
                if not blocked:
                    good += 1
    return q, good
