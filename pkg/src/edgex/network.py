"""Edge-labeled networks built from interaction data.

An interaction is a finite ordered multiset of vertex identifiers; a network
is a sequence of interactions whose vertex labels carry no meaning.  Every
:class:`EdgeLabeledNetwork` is stored in canonical form: vertices are the
integers ``1..v`` numbered in order of first appearance, so two interaction
processes that differ only by a renaming of vertices give equal networks.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, groupby
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, InvalidInputError

Interaction = Tuple[int, ...]


@dataclass(frozen=True)
class NetworkStats:
    """Sufficient statistics of an edge-labeled network.

    ``M`` maps arity to edge count, ``N`` maps degree to vertex count and
    ``d`` is the degree distribution ``N_k / v`` (``None`` when ``v == 0``).
    """

    v: int
    e: int
    m: int
    M: Dict[int, int]
    N: Dict[int, int]
    d: Optional[Dict[int, float]]
    m_avg: Optional[float]

    @classmethod
    def from_degrees(cls, degrees: Iterable[int], arities: Iterable[int]) -> "NetworkStats":
        N = Counter(int(x) for x in degrees if x > 0)
        M = Counter(int(k) for k in arities)
        v = sum(N.values())
        e = sum(M.values())
        m = sum(k * c for k, c in M.items())
        d = {k: N[k] / v for k in sorted(N)} if v else None
        return cls(
            v=v,
            e=e,
            m=m,
            M=dict(sorted(M.items())),
            N=dict(sorted(N.items())),
            d=d,
            m_avg=m / e if e else None,
        )

    def degree_array(self, kmax: Optional[int] = None) -> np.ndarray:
        """Dense ``d_1..d_kmax`` as an array (zeros where no vertex has that degree)."""
        if self.d is None:
            raise DomainError("degree distribution is undefined for an empty network")
        kmax = kmax or max(self.N)
        out = np.zeros(kmax)
        for k, p in self.d.items():
            if k <= kmax:
                out[k - 1] = p
        return out


@dataclass(frozen=True)
class GrowthTrace:
    """Checkpoints ``(n, v, e, m)`` along one trajectory, ``n`` strictly increasing."""

    n: Tuple[int, ...]
    v: Tuple[int, ...]
    e: Tuple[int, ...]
    m: Tuple[int, ...]

    def __post_init__(self):
        if not (len(self.n) == len(self.v) == len(self.e) == len(self.m)):
            raise InvalidInputError("trace columns differ in length")
        if any(b <= a for a, b in zip(self.n, self.n[1:])):
            raise InvalidInputError("trace steps must be strictly increasing")
        for col in (self.v, self.e, self.m):
            if any(b < a for a, b in zip(col, col[1:])):
                raise InvalidInputError("trace counts must be nondecreasing")

    def __len__(self):
        return len(self.n)

    def rows(self):
        return list(zip(self.n, self.v, self.e, self.m))


def geometric_checkpoints(n: int, ratio: float = 1.5) -> List[int]:
    """Steps ``ceil(ratio**i)`` up to ``n``, always including ``n`` itself."""
    points = set()
    x = 1.0
    while x <= n:
        points.add(int(np.ceil(x - 1e-9)))
        x *= ratio
    points.add(n)
    return sorted(p for p in points if 1 <= p <= n)


@dataclass(frozen=True)
class EdgeLabeledNetwork:
    """Canonical representative of an edge-labeled network.

    Build instances with :func:`canonicalize`; the constructor trusts its input.
    Edges are tuples of vertex ids; when ``directed`` is false each edge is
    sorted ascending.
    """

    edges: Tuple[Interaction, ...]
    directed: bool = True

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def degrees(self) -> np.ndarray:
        """Degree of vertex ``i`` at index ``i - 1``."""
        if not self.edges:
            return np.zeros(0, dtype=np.int64)
        flat = np.fromiter((x for edge in self.edges for x in edge), dtype=np.int64)
        return np.bincount(flat - 1)

    @property
    def n_vertices(self) -> int:
        return len(self.degrees)

    @cached_property
    def stats(self) -> NetworkStats:
        return NetworkStats.from_degrees(self.degrees.tolist(), (len(e) for e in self.edges))


def _canonical_directed(raw: Sequence[Sequence[Hashable]]) -> List[Interaction]:
    label: Dict[Hashable, int] = {}
    out = []
    for edge in raw:
        row = []
        for x in edge:
            y = label.get(x)
            if y is None:
                y = label[x] = len(label) + 1
            row.append(y)
        out.append(tuple(row))
    return out


class _Block:
    """Vertices that are still interchangeable, sharing a set of labels."""

    __slots__ = ("members", "labels")

    def __init__(self, members, labels):
        self.members = members
        self.labels = labels


def _canonical_undirected(raw: Sequence[Sequence[Hashable]]) -> List[Interaction]:
    # Greedy lexicographic minimum over first-appearance labelings.  Vertices
    # introduced together with equal multiplicity stay in a block until a later
    # edge tells them apart; present members then take the block's smallest
    # labels, higher multiplicity first.
    label: Dict[Hashable, int] = {}
    block_of: Dict[Hashable, _Block] = {}
    next_label = 1

    def settle(members, labels):
        if len(members) == 1:
            label[members[0]] = labels[0]
            block_of.pop(members[0], None)
            return
        b = _Block(members, labels)
        for x in members:
            block_of[x] = b

    for edge in raw:
        mult = Counter(edge)
        touched: Dict[int, Tuple[_Block, list]] = {}
        fresh = []
        for x in mult:
            if x in label:
                continue
            b = block_of.get(x)
            if b is None:
                fresh.append(x)
            else:
                touched.setdefault(id(b), (b, []))[1].append(x)
        for b, present in touched.values():
            present.sort(key=lambda x: -mult[x])
            pos = 0
            for _, grp in groupby(present, key=mult.__getitem__):
                grp = list(grp)
                settle(grp, b.labels[pos:pos + len(grp)])
                pos += len(grp)
            if pos < len(b.members):
                seen = set(present)
                settle([x for x in b.members if x not in seen], b.labels[pos:])
        fresh.sort(key=lambda x: -mult[x])
        for _, grp in groupby(fresh, key=mult.__getitem__):
            grp = list(grp)
            settle(grp, list(range(next_label, next_label + len(grp))))
            next_label += len(grp)

    # leftover blocks never got separated: any assignment gives the same edges
    for x, b in list(block_of.items()):
        if x in label:
            continue
        for y, lab in zip(b.members, b.labels):
            label[y] = lab
    return [tuple(sorted(label[x] for x in edge)) for edge in raw]


def canonicalize(raw: Iterable[Sequence[Hashable]], directed: bool = True) -> EdgeLabeledNetwork:
    """Canonical edge-labeled network of an interaction process.

    Vertex identifiers may be any hashable values.  Directed edges are scanned
    left to right and vertices numbered by first appearance.  Undirected edges
    are treated as multisets: the result is the lexicographically smallest
    first-appearance labeling with each edge sorted, which does not depend on
    the identifiers used in ``raw``.
    """
    raw = [tuple(edge) for edge in raw]
    for i, edge in enumerate(raw, 1):
        if not edge:
            raise InvalidInputError(f"interaction {i} is empty")
    edges = _canonical_directed(raw) if directed else _canonical_undirected(raw)
    return EdgeLabeledNetwork(tuple(edges), directed)


def is_canonical(net: EdgeLabeledNetwork) -> bool:
    """Check first-appearance numbering (and sorted edges when undirected)."""
    seen = 0
    for edge in net.edges:
        if not edge:
            return False
        if not net.directed and list(edge) != sorted(edge):
            return False
        for x in edge:
            if x > seen + 1 or x < 1:
                return False
            seen = max(seen, x)
    return True


def relabel_edges(net: EdgeLabeledNetwork, sigma: Sequence[int]) -> EdgeLabeledNetwork:
    """Move edge ``i`` to position ``sigma[i-1]`` (1-based permutation) and re-canonicalize."""
    n = len(net.edges)
    sigma = list(sigma)
    if sorted(sigma) != list(range(1, n + 1)):
        raise InvalidInputError(f"not a permutation of 1..{n}: {sigma}")
    out: List[Optional[Interaction]] = [None] * n
    for i, target in enumerate(sigma):
        out[target - 1] = net.edges[i]
    return canonicalize(out, net.directed)


def restrict(net: EdgeLabeledNetwork, keep: Iterable[int]) -> EdgeLabeledNetwork:
    """Sub-network of the edges whose (1-based) labels are in ``keep``, order preserved."""
    keep = set(keep)
    bad = [i for i in keep if not 1 <= i <= len(net.edges)]
    if bad:
        raise InvalidInputError(f"edge labels out of range: {sorted(bad)[:5]}")
    return canonicalize((e for i, e in enumerate(net.edges, 1) if i in keep), net.directed)


def prefix(net: EdgeLabeledNetwork, n: int) -> EdgeLabeledNetwork:
    """``restrict(net, 1..n)``; a prefix of a canonical directed network is already canonical."""
    if net.directed:
        return EdgeLabeledNetwork(net.edges[:n], True)
    return canonicalize(net.edges[:n], False)


def stats(net: EdgeLabeledNetwork) -> NetworkStats:
    return net.stats


def sparsity_statistic(s: NetworkStats) -> float:
    """``e / v ** m_avg``; tends to zero along a sparse sequence."""
    if s.v == 0:
        raise DomainError("sparsity statistic undefined for a network without vertices")
    return s.e / float(s.v) ** s.m_avg


def to_simple_graph(net: EdgeLabeledNetwork) -> set:
    """Pairs ``(u, w)``, ``u < w``, that share at least one edge."""
    pairs = set()
    for edge in net.edges:
        for u, w in combinations(sorted(set(edge)), 2):
            pairs.add((u, w))
    return pairs


def _key(edge: Interaction, directed: bool) -> Interaction:
    return edge if directed else tuple(sorted(edge))


def to_multiplicity(net: EdgeLabeledNetwork) -> Dict[Interaction, int]:
    """Number of edges equal to each multiset (hypergraph with multiplicities)."""
    return dict(Counter(_key(e, net.directed) for e in net.edges))


@dataclass(frozen=True)
class Projection:
    """Result of thresholding edge multiplicities.

    ``network`` keeps one copy of every multiset seen more than ``cutoff``
    times (in order of first occurrence) and drops vertices left isolated;
    ``v_with_isolated`` counts the original vertex set.
    """

    cutoff: int
    indicator: Dict[Interaction, int]
    network: EdgeLabeledNetwork
    stats: NetworkStats
    v_with_isolated: int


def project(net: EdgeLabeledNetwork, cutoff: int = 0) -> Projection:
    if cutoff < 0 or int(cutoff) != cutoff:
        raise InvalidInputError("cutoff must be a nonnegative integer")
    counts = to_multiplicity(net)
    retained = [A for A, c in counts.items() if c > cutoff]
    indicator = {A: 1 for A in retained}
    projected = canonicalize(retained, net.directed)
    return Projection(int(cutoff), indicator, projected, projected.stats, net.stats.v)


def degree_bound(net: EdgeLabeledNetwork) -> int:
    """``sum_k min(k, v) N_k``, which bounds the edge count after standard projection of a binary network."""
    s = net.stats
    return sum(min(k, s.v) * c for k, c in s.N.items())
