"""Phenomenological noise on decoding graphs.

Every edge flips independently with probability p: space edges are data
errors, time edges are measurement errors.  The final round of a graph is
implicitly perfect (no time edges extend past it).  Defects are the vertices
with an odd number of flipped incident edges; the true logical observable of
a patch is the flip parity across its west cut.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import DecodingGraph, Layout, Seam


@dataclass(frozen=True)
class NoiseParams:
    p: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {self.p}")


@dataclass
class ErrorSample:
    flipped_edges: set
    defects: set
    true_logical: dict


def derived_rng(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for (seed, trial, epoch, ...) paths."""
    return np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFF, *path]))


class EdgeTable:
    """Materialised edge slice of a graph, for vectorised sampling.

    Covers rounds [r0, r1) (defaults to the whole graph).  Sampling returns
    sparse results, so per-trial cost scales with the flip count.
    """

    def __init__(self, graph: DecodingGraph, r0: int = 0, r1: int | None = None):
        self.graph = graph
        r1 = graph.rounds if r1 is None else r1
        self.ekeys = list(graph.edges_in_rounds(r0, r1))
        vids = sorted(set(graph.vertices_in_rounds(r0, min(r1 + 1, graph.rounds))))
        self._vid_arr = np.asarray(vids, dtype=np.int64)
        index = {v: i for i, v in enumerate(vids)}
        n = len(vids)
        self._n = n
        u_idx = np.empty(len(self.ekeys), dtype=np.int64)
        v_idx = np.empty(len(self.ekeys), dtype=np.int64)
        cut = np.full(len(self.ekeys), -1, dtype=np.int64)
        for i, ek in enumerate(self.ekeys):
            u, v = ek
            u_idx[i] = index[u]
            v_idx[i] = index.get(v, n) if v >= 0 else n
            cp = graph.cut_patch(ek)
            if cp is not None:
                cut[i] = cp
        self._u = u_idx
        self._v = v_idx
        self._cut = cut
        self.n_edges = len(self.ekeys)

    def sample_flips(self, p: float, rng: np.random.Generator) -> np.ndarray:
        return np.flatnonzero(rng.random(self.n_edges) < p)

    def defects_of(self, flips: np.ndarray) -> list:
        counts = np.bincount(self._u[flips], minlength=self._n + 1)
        counts += np.bincount(self._v[flips], minlength=self._n + 1)
        return self._vid_arr[(counts[: self._n] & 1).nonzero()[0]].tolist()

    def logical_of(self, flips: np.ndarray) -> dict:
        out = {}
        cuts = self._cut[flips]
        for pid in np.unique(cuts[cuts >= 0]):
            out[int(pid)] = int(np.count_nonzero(cuts == pid) & 1)
        return out

    def sample(self, p: float, rng: np.random.Generator) -> ErrorSample:
        flips = self.sample_flips(p, rng)
        truth = {pid: 0 for pid in self.graph.layout.positions}
        truth.update(self.logical_of(flips))
        return ErrorSample(
            flipped_edges={self.ekeys[i] for i in flips},
            defects=set(self.defects_of(flips)),
            true_logical=truth,
        )


def sample_errors(graph: DecodingGraph, params: NoiseParams, rng=None) -> ErrorSample:
    """One noise sample over the whole graph."""
    if rng is None:
        rng = derived_rng(params.seed)
    return EdgeTable(graph).sample(params.p, rng)


def raw_merge_draws(layout: Layout, epochs: int, prob: float, seed: int) -> list:
    """Per-epoch Bernoulli draws per seam, before conflict resolution."""
    if not 0.0 <= prob <= 1.0:
        raise ValueError(f"merge probability must be in [0, 1], got {prob}")
    rng = derived_rng(seed, 0x5EA3)
    draws = []
    for _ in range(epochs):
        mask = rng.random(len(layout.seams)) < prob
        draws.append({s for s, m in zip(layout.seams, mask) if m})
    return draws

def random_merge_schedule(layout: Layout, epochs: int, prob: float, seed: int) -> list:
    """Random pairwise merge schedule: one frozenset of active seams per epoch.

    A patch joins at most one seam per epoch; when draws conflict the
    lexicographically smallest seam wins.
    """
    schedule = []
    for drawn in raw_merge_draws(layout, epochs, prob, seed):
        used = set()
        active = []
        for s in sorted(drawn):
            if s.patch_a not in used and s.patch_b not in used:
                active.append(s)
                used.update((s.patch_a, s.patch_b))
        schedule.append(frozenset(active))
    return schedule


def apply_merge_schedule(graph: DecodingGraph, schedule: list) -> DecodingGraph:
    d = graph.d
    for e, seams in enumerate(schedule):
        for s in sorted(seams):
            graph.merge(s, e * d, (e + 1) * d)
    return graph
