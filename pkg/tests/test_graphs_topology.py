import itertools
import time

import numpy as np

from artigen.core import ConnectivityGraph, SemanticLabel
from artigen.graphs import canonical_form, graph_topology_accuracy

LABELS = list(SemanticLabel)


def tree(nodes, parents):
    return ConnectivityGraph(nodes, parents)


def brute_force_isomorphic(g1: ConnectivityGraph,
                           g2: ConnectivityGraph) -> bool:
    """Recursive matching over all child permutations; the oracle."""
    if len(g1) != len(g2):
        return False

    def match(a: int, b: int) -> bool:
        if g1.label_of(a) is not g2.label_of(b):
            return False
        ca, cb = g1.children_of(a), g2.children_of(b)
        if len(ca) != len(cb):
            return False
        return any(all(match(x, y) for x, y in zip(ca, perm))
                   for perm in itertools.permutations(cb))

    return match(g1.roots()[0], g2.roots()[0])


def random_tree(rng, n: int) -> ConnectivityGraph:
    ids = list(rng.permutation(100)[:n])
    labels = [SemanticLabel.BASE] + [LABELS[rng.integers(len(LABELS))]
                                     for _ in range(n - 1)]
    parents = {}
    for i in range(1, n):
        parents[int(ids[i])] = int(ids[rng.integers(0, i)])
    return tree(list(zip(map(int, ids), labels)), parents)


def relabel_ids(g: ConnectivityGraph, rng) -> ConnectivityGraph:
    old = g.ids()
    new = list(rng.permutation(1000)[:len(old)])
    m = dict(zip(old, map(int, new)))
    return tree([(m[i], l) for i, l in g.nodes],
                {m[c]: m[p] for c, p in g.parent_of.items()})


def test_identical_trees():
    g = tree([(0, SemanticLabel.BASE), (1, SemanticLabel.DOOR)], {1: 0})
    assert graph_topology_accuracy(g, g) == 1


def test_label_mismatch():
    g1 = tree([(0, SemanticLabel.BASE), (1, SemanticLabel.DOOR)], {1: 0})
    g2 = tree([(0, SemanticLabel.BASE), (1, SemanticLabel.DRAWER)], {1: 0})
    assert graph_topology_accuracy(g1, g2) == 0


def test_children_are_unordered():
    g1 = tree([(0, SemanticLabel.BASE), (1, SemanticLabel.DOOR),
               (2, SemanticLabel.DRAWER)], {1: 0, 2: 0})
    g2 = tree([(0, SemanticLabel.BASE), (1, SemanticLabel.DRAWER),
               (2, SemanticLabel.DOOR)], {1: 0, 2: 0})
    assert graph_topology_accuracy(g1, g2) == 1


def test_ids_carry_no_meaning():
    rng = np.random.default_rng(0)
    for _ in range(50):
        g = random_tree(rng, int(rng.integers(1, 11)))
        assert graph_topology_accuracy(g, relabel_ids(g, rng)) == 1


def test_structure_differences_detected():
    # chain Base-Door-Handle vs star Base-(Door, Handle)
    chain = tree([(0, SemanticLabel.BASE), (1, SemanticLabel.DOOR),
                  (2, SemanticLabel.HANDLE)], {1: 0, 2: 1})
    star = tree([(0, SemanticLabel.BASE), (1, SemanticLabel.DOOR),
                 (2, SemanticLabel.HANDLE)], {1: 0, 2: 0})
    assert graph_topology_accuracy(chain, star) == 0


def test_canonical_equals_brute_force_on_200_trees():
    rng = np.random.default_rng(7)
    start = time.monotonic()
    for _ in range(200):
        g1 = random_tree(rng, int(rng.integers(1, 11)))
        if rng.uniform() < 0.5:
            g2 = relabel_ids(g1, rng)
        else:
            g2 = random_tree(rng, int(rng.integers(1, 11)))
        fast = graph_topology_accuracy(g1, g2)
        assert fast == int(brute_force_isomorphic(g1, g2))
        assert fast == graph_topology_accuracy(g2, g1)  # symmetric
        assert graph_topology_accuracy(g1, g1) == 1     # reflexive
    assert time.monotonic() - start < 10.0


def test_canonical_form_is_order_invariant():
    g1 = tree([(0, SemanticLabel.BASE), (5, SemanticLabel.DOOR),
               (3, SemanticLabel.DOOR), (7, SemanticLabel.HANDLE)],
              {5: 0, 3: 0, 7: 3})
    g2 = tree([(10, SemanticLabel.BASE), (2, SemanticLabel.DOOR),
               (4, SemanticLabel.DOOR), (6, SemanticLabel.HANDLE)],
              {2: 10, 4: 10, 6: 2})
    assert canonical_form(g1) == canonical_form(g2)
