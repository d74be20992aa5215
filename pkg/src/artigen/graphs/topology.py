"""Rooted labeled-tree isomorphism for connectivity-graph scoring.

Two graphs count as the same topology when their rooted trees are isomorphic
with matching semantic labels; children are unordered and node ids carry no
meaning.
"""
from __future__ import annotations

from ..core import ConnectivityGraph


def canonical_form(g: ConnectivityGraph) -> tuple:
    """Order-invariant canonical encoding of a rooted labeled tree.

    Built bottom-up: each node encodes as (label, sorted child encodings), so
    two trees are isomorphic iff their root encodings compare equal.
    """
    roots = g.roots()
    if len(roots) != 1:
        raise ValueError(f"graph must have exactly one root, got {roots}")

    def encode(node: int) -> tuple:
        children = tuple(sorted(encode(c) for c in g.children_of(node)))
        return (g.label_of(node).value, children)

    return encode(roots[0])


def graph_topology_accuracy(pred: ConnectivityGraph,
                            gt: ConnectivityGraph) -> int:
    """1 iff pred and gt are isomorphic as labeled rooted trees, else 0."""
    return int(canonical_form(pred) == canonical_form(gt))
