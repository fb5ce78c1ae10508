import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import cohere as ch


def cycle_graph(n):
    return ch.GraphInput.from_pairs(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n):
    return ch.GraphInput.from_pairs(
        n, [(a, b) for a in range(n) for b in range(a + 1, n)]
    )


def path_graph(n):
    return ch.GraphInput.from_pairs(n, [(i, i + 1) for i in range(n - 1)])


def shrikhande_graph():
    """Z4 x Z4 with differences {(1,0),(0,1),(1,1)} and negatives: the
    16-vertex parameter twin of the 4x4 rook's graph."""
    diffs = {(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)}
    edges = set()
    for a in range(16):
        for b in range(a + 1, 16):
            d = ((b // 4 - a // 4) % 4, (b % 4 - a % 4) % 4)
            if d in diffs:
                edges.add((a, b))
    return ch.GraphInput.from_pairs(16, edges)


def paley_graph(q):
    squares = {(x * x) % q for x in range(1, q)}
    edges = {(a, b) for a in range(q) for b in range(a + 1, q) if (b - a) % q in squares}
    return ch.GraphInput.from_pairs(q, edges)


@pytest.fixture(scope="session")
def c5():
    return ch.from_graph(cycle_graph(5))


@pytest.fixture(scope="session")
def p3():
    return ch.from_graph(path_graph(3))


@pytest.fixture(scope="session")
def t5():
    return ch.triangular(5)


@pytest.fixture(scope="session")
def petersen(t5):
    return ch.complement_configuration(t5)


@pytest.fixture(scope="session")
def shrikhande():
    return ch.from_graph(shrikhande_graph())


def family_corpus():
    """The standard desk-scale corpus, as (name, Configuration) pairs."""
    members = []
    for m in range(5, 13):
        members.append((f"T({m})", ch.triangular(m)))
    for m in range(3, 11):
        members.append((f"L2({m})", ch.lattice(m)))
    for m in range(6, 11):
        members.append((f"J({m},3)", ch.johnson(m, 3)))
    for m in range(3, 7):
        members.append((f"H(3,{m})", ch.hamming(3, m)))
    return members


@pytest.fixture(scope="session")
def corpus():
    return family_corpus()


@pytest.fixture(scope="session")
def corpus_pcc(corpus):
    out = []
    for name, cfg in corpus:
        cfg.ensure_constants()
        if cfg.check_homogeneous() and cfg.check_primitive():
            out.append((name, cfg))
    return out
