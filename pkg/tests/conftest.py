import numpy as np
import pytest

from immersions.tournament import Tournament


def circulant(m: int) -> np.ndarray:
    adj = np.zeros((m, m), dtype=bool)
    for i in range(m):
        for d in range(1, (m - 1) // 2 + 1):
            adj[i, (i + d) % m] = True
    if m % 2 == 0:
        # even order: orient the antipodal pairs upward
        for i in range(m // 2):
            adj[i, i + m // 2] = True
    return adj


def layered_failure_instance(alpha: int = 11, beta: int = 3, zeta: int = 3) -> tuple[Tournament, dict]:
    """Branch pair x=0, y=1 that cannot be joined within 3 edges.

    x -> A, B -> y, y -> x, B -> A, A -> Z, Z -> B, Z -> x, y -> A, y -> Z,
    B -> x; inside each part a regular circulant.
    """
    n = 2 + alpha + beta + zeta
    A = list(range(2, 2 + alpha))
    B = list(range(2 + alpha, 2 + alpha + beta))
    Z = list(range(2 + alpha + beta, n))
    adj = np.zeros((n, n), dtype=bool)

    def orient(src, dst):
        for u in src:
            for v in dst:
                adj[u, v] = True

    orient([0], A)
    orient(B, [1])
    orient([1], [0])
    orient(B, A)
    orient(A, Z)
    orient(Z, B)
    orient(Z, [0])
    orient([1], A)
    orient([1], Z)
    orient(B, [0])
    for part, m in ((A, alpha), (B, beta), (Z, zeta)):
        adj[np.ix_(part, part)] = circulant(m)
    return Tournament(adj), {"A": A, "B": B, "Z": Z}


@pytest.fixture
def failure_instance():
    return layered_failure_instance()
