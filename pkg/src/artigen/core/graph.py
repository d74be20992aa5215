"""Validation and adjacency encoding of part connectivity graphs."""
from __future__ import annotations

import numpy as np

from ..errors import (
    CycleDetected,
    DanglingParent,
    DisconnectedNode,
    MultipleRoots,
    RootNotBase,
    TooManyParts,
)
from .types import ConnectivityGraph, SemanticLabel


def validate_graph(g: ConnectivityGraph) -> None:
    """Raise unless ``g`` is a single-rooted, connected, acyclic tree
    whose root is labeled ``base`` and whose parent references all resolve.
    """
    ids = [i for i, _ in g.nodes]
    id_set = set(ids)
    if len(id_set) != len(ids):
        raise DanglingParent(f"duplicate node ids in graph: {sorted(ids)}")

    for child, parent in g.parent_of.items():
        if child not in id_set:
            raise DanglingParent(f"edge references unknown child {child}")
        if parent not in id_set:
            raise DanglingParent(f"node {child} references unknown parent {parent}")

    roots = [i for i in ids if i not in g.parent_of]
    if len(roots) > 1:
        raise MultipleRoots(f"graph has {len(roots)} roots: {sorted(roots)}")
    if len(roots) == 0:
        # every node has a parent => there must be a cycle
        raise CycleDetected("every node has a parent; the graph contains a cycle")
    root = roots[0]
    if g.label_of(root) is not SemanticLabel.BASE:
        raise RootNotBase(f"root node {root} is labeled {g.label_of(root).value!r}")

    # walk each node up to the root; revisiting a node on one walk is a cycle
    for start in ids:
        seen = set()
        node = start
        while node in g.parent_of:
            if node in seen:
                raise CycleDetected(f"cycle reachable from node {start}")
            seen.add(node)
            node = g.parent_of[node]
        if node != root:
            raise DisconnectedNode(f"node {start} does not reach the root")


def adjacency_matrix(g: ConnectivityGraph, n_max: int) -> np.ndarray:
    """Binary symmetric adjacency with self-loops, padded to ``n_max``.

    Rows/columns follow ascending part-id order; entries beyond the node
    count stay zero. Self-loops are included so attention tokens can always
    attend to themselves.
    """
    validate_graph(g)
    ids = g.ids()
    n = len(ids)
    if n > n_max:
        raise TooManyParts(f"{n} parts exceed capacity {n_max}")
    index = {pid: k for k, pid in enumerate(ids)}
    a = np.zeros((n_max, n_max), dtype=np.int64)
    for k in range(n):
        a[k, k] = 1
    for child, parent in g.parent_of.items():
        i, j = index[parent], index[child]
        a[i, j] = 1
        a[j, i] = 1
    return a
