"""Directed configuration-model multigraphs built by uniform stub matching."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .degree_model import DegreeSequence
from .rng import make_rng


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    """Immutable multigraph in CSR form.

    Out-neighbours of node ``u`` are ``out_nbrs[out_ptr[u]:out_ptr[u + 1]]``.
    Self-loops and repeated edges are kept.  ``in_deg``/``out_deg`` are the
    class labels the graph was built from.
    """

    out_ptr: np.ndarray
    out_nbrs: np.ndarray
    in_deg: np.ndarray
    out_deg: np.ndarray

    @property
    def n(self) -> int:
        return len(self.in_deg)

    @property
    def m(self) -> int:
        return len(self.out_nbrs)

    def out_adj(self, u: int) -> np.ndarray:
        return self.out_nbrs[self.out_ptr[u] : self.out_ptr[u + 1]]

    def class_of(self, u: int) -> tuple[int, int]:
        return int(self.in_deg[u]), int(self.out_deg[u])

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Source and destination arrays, sources in ascending order."""
        src = np.repeat(np.arange(self.n), np.diff(self.out_ptr))
        return src, self.out_nbrs

    def counted_in_degrees(self) -> np.ndarray:
        return np.bincount(self.out_nbrs, minlength=self.n)

    def self_loop_count(self) -> int:
        src, dst = self.edges()
        return int(np.count_nonzero(src == dst))

    def write_edge_list(self, path) -> None:
        """Debug dump: header ``N M`` then one ``src dst`` line per edge."""
        src, dst = self.edges()
        with open(Path(path), "w") as fh:
            fh.write(f"{self.n} {self.m}\n")
            for s, d in zip(src.tolist(), dst.tolist()):
                fh.write(f"{s} {d}\n")


def build_configuration_graph(seq: DegreeSequence, seed) -> DirectedGraph:
    """Pair every out-stub with an in-stub uniformly at random.

    In-stubs are laid out in node order; the out-stub array (also in node
    order) is shuffled once with the seeded generator and zipped against it.
    """
    if not seq.is_balanced:
        raise ValueError(
            f"unbalanced sequence: {int(seq.in_deg.sum())} in-stubs vs "
            f"{int(seq.out_deg.sum())} out-stubs; balance first"
        )
    rng = make_rng(seed)
    nodes = np.arange(seq.n)
    in_stubs = np.repeat(nodes, seq.in_deg)
    out_stubs = np.repeat(nodes, seq.out_deg)
    out_stubs = out_stubs[rng.permutation(len(out_stubs))]
    # group by source; stable so each node's neighbour order is reproducible
    order = np.argsort(out_stubs, kind="stable")
    out_nbrs = in_stubs[order]
    out_ptr = np.zeros(seq.n + 1, dtype=np.int64)
    np.cumsum(seq.out_deg, out=out_ptr[1:])
    out_nbrs.setflags(write=False)
    out_ptr.setflags(write=False)
    return DirectedGraph(out_ptr, out_nbrs, seq.in_deg, seq.out_deg)


def degree_census(g: DirectedGraph) -> dict[tuple[int, int], int]:
    """Node count per ``(k, l)`` class."""
    return dict(sorted(Counter(zip(g.in_deg.tolist(), g.out_deg.tolist())).items()))
