"""Generative models for edge-exchangeable networks.

All samplers draw from a ``numpy.random.Generator`` backed by PCG64, so a
given ``(seed, parameters, n)`` reproduces the same network on every run of
the same package version.
"""
from __future__ import annotations

import logging
import math
import warnings
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats as sps

from .errors import DomainError, InvalidInputError, RegimeError, SamplerError, UnsupportedError
from .network import (
    EdgeLabeledNetwork,
    GrowthTrace,
    Interaction,
    canonicalize,
    geometric_checkpoints,
)

log = logging.getLogger(__name__)

RNG_NAME = "PCG64"
SeedLike = Union[None, int, np.random.SeedSequence, np.random.Generator]


def make_rng(seed: SeedLike = None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def spawn_seeds(master: Optional[int], count: int) -> List[np.random.SeedSequence]:
    """Independent child seeds for replicate ``i`` of ``count`` (SeedSequence spawning)."""
    return np.random.SeedSequence(master).spawn(count)


def _uniforms(rng: np.random.Generator, block: int = 64) -> Iterator[float]:
    # blocks double so short runs stay cheap and long runs amortize the numpy call
    while True:
        yield from rng.random(block).tolist()
        block = min(2 * block, 1 << 16)


@dataclass(frozen=True)
class AritySpec:
    """Distribution of the number of roles (arity) in an interaction."""

    probs: Mapping[int, float]

    def __post_init__(self):
        clean = {}
        for k, p in self.probs.items():
            if int(k) != k or k < 1:
                raise InvalidInputError(f"arity must be a positive integer, got {k!r}")
            if p < 0:
                raise InvalidInputError(f"negative probability for arity {k}")
            if p > 0:
                clean[int(k)] = float(p)
        if not clean:
            raise InvalidInputError("arity distribution has no mass")
        total = math.fsum(clean.values())
        if abs(total - 1.0) > 1e-12:
            raise InvalidInputError(f"arity probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "probs", dict(sorted(clean.items())))

    @classmethod
    def point(cls, k: int) -> "AritySpec":
        return cls({k: 1.0})

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> "AritySpec":
        total = sum(counts.values())
        if total <= 0:
            raise InvalidInputError("cannot build an arity distribution from zero counts")
        probs = {k: c / total for k, c in counts.items() if c > 0}
        # absorb rounding so the 1e-12 sum check is met exactly
        top = max(probs, key=probs.get)
        probs[top] = 1.0 - math.fsum(p for k, p in probs.items() if k != top)
        return cls(probs)

    @classmethod
    def parse(cls, text: str, tolerance: float = 1e-6) -> "AritySpec":
        """Parse ``"k:prob,k:prob"``; renormalize if off by less than ``tolerance``."""
        probs: Dict[int, float] = {}
        try:
            for item in text.split(","):
                k, p = item.split(":")
                probs[int(k)] = probs.get(int(k), 0.0) + float(p)
        except ValueError:
            raise InvalidInputError(f"cannot parse arity distribution {text!r}; expected k:prob,...")
        total = math.fsum(probs.values())
        if abs(total - 1.0) > tolerance:
            raise InvalidInputError(f"arity probabilities sum to {total}, not 1")
        if abs(total - 1.0) > 1e-12:
            warnings.warn(f"arity probabilities sum to {total}; renormalizing", stacklevel=2)
            probs = {k: p / total for k, p in probs.items()}
            top = max(probs, key=probs.get)
            probs[top] = 1.0 - math.fsum(p for k, p in probs.items() if k != top)
        return cls(probs)

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(self.probs)

    @property
    def mean(self) -> float:
        return math.fsum(k * p for k, p in self.probs.items())

    def __getitem__(self, k: int) -> float:
        return self.probs.get(k, 0.0)

    def sample(self, rng: np.random.Generator, size: int) -> List[int]:
        if len(self.probs) == 1:
            return [self.support[0]] * size
        ks = np.array(self.support)
        p = np.array(list(self.probs.values()))
        return ks[rng.choice(len(ks), size=size, p=p / p.sum())].tolist()

    def to_string(self) -> str:
        return ",".join(f"{k}:{p!r}" for k, p in self.probs.items())


@dataclass(frozen=True)
class HollywoodParams:
    """``(alpha, theta, nu)`` in one of the two Hollywood regimes.

    Infinite population: ``0 < alpha < 1`` and ``theta > -alpha``.
    Finite population of ``k`` vertices: ``alpha < 0`` and ``theta = -k * alpha``.
    When ``k`` is omitted it is inferred from ``theta / -alpha`` for negative alpha.
    """

    alpha: float
    theta: float
    nu: AritySpec
    k: Optional[int] = None

    def __post_init__(self):
        a, t = float(self.alpha), float(self.theta)
        if not (math.isfinite(a) and math.isfinite(t)):
            raise RegimeError("alpha and theta must be finite")
        if self.k is None:
            if 0 < a < 1:
                if not t > -a:
                    raise RegimeError(f"infinite regime needs theta > -alpha (got theta={t}, alpha={a})")
            elif a < 0:
                ratio = t / -a
                k = round(ratio)
                if k < 1 or abs(ratio - k) > 1e-9 * max(1.0, abs(ratio)):
                    raise RegimeError(f"finite regime needs theta = -k*alpha for integer k >= 1 (theta/-alpha = {ratio})")
                object.__setattr__(self, "k", int(k))
                object.__setattr__(self, "theta", -k * a)
            else:
                raise RegimeError(f"alpha={a} is in neither regime (need 0<alpha<1 or alpha<0)")
        else:
            if int(self.k) != self.k or self.k < 1:
                raise RegimeError(f"finite population size must be a positive integer, got {self.k!r}")
            if not a < 0:
                raise RegimeError(f"finite regime needs alpha < 0 (got {a})")
            if abs(t + self.k * a) > 1e-9 * max(1.0, abs(t)):
                raise RegimeError(f"finite regime needs theta = -k*alpha = {-self.k * a} (got {t})")
            object.__setattr__(self, "k", int(self.k))
            object.__setattr__(self, "theta", -self.k * a)
        object.__setattr__(self, "alpha", a)

    @classmethod
    def finite(cls, alpha: float, k: int, nu: AritySpec) -> "HollywoodParams":
        return cls(alpha, -k * alpha, nu, k)

    @property
    def regime(self) -> str:
        return "finite" if self.k is not None else "infinite"

    def describe(self) -> str:
        parts = [f"alpha={self.alpha!r}", f"theta={self.theta!r}", f"regime={self.regime}"]
        if self.k is not None:
            parts.append(f"k={self.k}")
        parts.append(f"nu={self.nu.to_string()}")
        return ",".join(parts)


class UrnState:
    """Occupancy of the Hollywood urn: role counts per vertex and the role list."""

    __slots__ = ("counts", "roles", "n")

    def __init__(self):
        self.counts: List[int] = []
        self.roles: List[int] = []
        self.n = 0

    @classmethod
    def from_network(cls, net: EdgeLabeledNetwork) -> "UrnState":
        state = cls()
        state.counts = net.degrees.tolist()
        state.roles = [x for edge in net.edges for x in edge]
        state.n = len(net.edges)
        return state

    @property
    def V(self) -> int:
        return len(self.counts)

    @property
    def m(self) -> int:
        return len(self.roles)

    def draw_edge(self, k: int, alpha: float, theta: float, u: Iterator[float]) -> Interaction:
        counts, roles = self.counts, self.roles
        edge = []
        for _ in range(k):
            m = len(roles)
            V = len(counts)
            if m == 0:
                x = 0
            else:
                r = next(u) * (theta + m) - (theta + alpha * V)
                if r < 0:
                    x = 0
                elif alpha < 0:
                    # weight D(i) - alpha splits into D(i) (a uniform past role) and
                    # -alpha per vertex (a uniform vertex)
                    if r < m:
                        x = roles[int(r)]
                    else:
                        x = min(int((r - m) / -alpha), V - 1) + 1
                else:
                    # uniform past role, kept with probability (D(i) - alpha) / D(i)
                    while True:
                        x = roles[int(next(u) * m)]
                        c = counts[x - 1]
                        if next(u) * c < c - alpha:
                            break
            if x == 0:
                counts.append(0)
                x = V + 1
            counts[x - 1] += 1
            roles.append(x)
            edge.append(x)
        self.n += 1
        return tuple(edge)

    def undo_edge(self, edge: Interaction) -> None:
        for x in reversed(edge):
            self.roles.pop()
            self.counts[x - 1] -= 1
            if self.counts[x - 1] == 0:
                self.counts.pop()
        self.n -= 1


def _check_state(state: UrnState, params: HollywoodParams) -> None:
    if params.k is not None and state.V > params.k:
        raise RegimeError(f"network has {state.V} vertices but the finite regime allows k={params.k}")


def _grow(state, params, n, rng, checkpoints=None):
    arities = params.nu.sample(rng, n)
    u = _uniforms(rng)
    draw = state.draw_edge
    a, t = params.alpha, params.theta
    edges = []
    rows = []
    marks = set(checkpoints or ())
    for k in arities:
        edges.append(draw(k, a, t, u))
        if state.n in marks:
            rows.append((state.n, state.V, state.n, state.m))
    return edges, rows


def hollywood_simulate(
    params: HollywoodParams,
    n: int,
    seed: SeedLike = None,
    *,
    trace: bool = False,
    directed: bool = True,
):
    """Simulate ``n`` interactions of the Hollywood process.

    Returns the network, or ``(network, GrowthTrace)`` when ``trace`` is set;
    the trace holds ``(n, v, e, m)`` at geometric checkpoints.
    """
    if n < 1:
        raise InvalidInputError("n must be at least 1")
    rng = make_rng(seed)
    state = UrnState()
    edges, rows = _grow(state, params, n, rng, geometric_checkpoints(n) if trace else None)
    net = EdgeLabeledNetwork(tuple(edges), True) if directed else canonicalize(edges, False)
    if trace:
        return net, GrowthTrace(*map(tuple, zip(*rows)))
    return net


def hollywood_extend(
    net: EdgeLabeledNetwork,
    params: HollywoodParams,
    extra: int,
    seed: SeedLike = None,
) -> EdgeLabeledNetwork:
    """Continue the Hollywood process from an observed network by ``extra`` interactions."""
    if extra < 0:
        raise InvalidInputError("extra must be nonnegative")
    if extra == 0:
        return net
    state = UrnState.from_network(net)
    _check_state(state, params)
    edges, _ = _grow(state, params, extra, make_rng(seed))
    if net.directed:
        return EdgeLabeledNetwork(net.edges + tuple(edges), True)
    return canonicalize(net.edges + tuple(edges), False)


def next_interactions(
    net: EdgeLabeledNetwork,
    params: HollywoodParams,
    size: int,
    seed: SeedLike = None,
) -> List[Interaction]:
    """``size`` independent draws of interaction ``n + 1`` given ``net``.

    Vertex ids above ``v(net)`` in a draw are previously unseen vertices.
    """
    state = UrnState.from_network(net)
    _check_state(state, params)
    rng = make_rng(seed)
    arities = params.nu.sample(rng, size)
    u = _uniforms(rng)
    out = []
    for k in arities:
        edge = state.draw_edge(k, params.alpha, params.theta, u)
        out.append(edge)
        state.undo_edge(edge)
    return out


@dataclass(frozen=True)
class VertexComponentsSpec:
    """Vertex weights ``W`` and arity law for the vertex-components model.

    ``source`` is ``"gem"`` (stick fractions Beta(1 - alpha, theta + j*alpha)),
    ``"dirichlet"`` (symmetric Dirichlet with ``k`` coordinates, size-biased) or
    ``"explicit"`` (fixed weights taken in order of vertex arrival).
    """

    source: str
    nu: AritySpec
    alpha: float = 0.0
    theta: float = 0.0
    k: Optional[int] = None
    weights: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.source == "gem":
            if not (0 < self.alpha < 1 and self.theta > -self.alpha):
                raise RegimeError("GEM weights need 0 < alpha < 1 and theta > -alpha")
        elif self.source == "dirichlet":
            if self.k is None or self.k < 1 or not self.alpha > 0:
                raise RegimeError("symmetric Dirichlet needs k >= 1 and concentration > 0")
        elif self.source == "explicit":
            w = tuple(float(x) for x in self.weights)
            if any(x < 0 for x in w) or math.fsum(w) > 1 + 1e-12:
                raise InvalidInputError("explicit weights must be nonnegative and sum to at most 1")
            object.__setattr__(self, "weights", w)
        else:
            raise InvalidInputError(f"unknown weight source {self.source!r}")

    @classmethod
    def gem(cls, alpha: float, theta: float, nu: AritySpec) -> "VertexComponentsSpec":
        return cls("gem", nu, alpha=alpha, theta=theta)

    @classmethod
    def dirichlet(cls, k: int, concentration: float, nu: AritySpec) -> "VertexComponentsSpec":
        return cls("dirichlet", nu, alpha=concentration, k=k)

    @classmethod
    def explicit(cls, weights: Sequence[float], nu: AritySpec) -> "VertexComponentsSpec":
        return cls("explicit", nu, weights=tuple(weights))

    def stick_beta(self, j: int) -> Optional[Tuple[float, float]]:
        """Beta parameters of the ``j``-th stick fraction; ``None`` means the fraction is 1."""
        if self.source == "gem":
            return 1.0 - self.alpha, self.theta + j * self.alpha
        if self.source == "dirichlet":
            if j >= self.k:
                return None
            # size-biased order of Dirichlet(c, ..., c)
            return 1.0 + self.alpha, (self.k - j) * self.alpha
        raise DomainError("explicit weights have no stick density")

    def max_vertices(self) -> Optional[int]:
        if self.source == "dirichlet":
            return self.k
        if self.source == "explicit":
            return len(self.weights)
        return None


def stick_breaking_simulate(
    spec: VertexComponentsSpec,
    n: int,
    seed: SeedLike = None,
) -> Tuple[EdgeLabeledNetwork, np.ndarray]:
    """Simulate the vertex-components model, drawing weights as vertices arrive.

    Returns the network and the realized weights ``W_1..W_v`` in order of arrival.
    """
    if n < 1:
        raise InvalidInputError("n must be at least 1")
    rng = make_rng(seed)
    arities = spec.nu.sample(rng, n)
    u = _uniforms(rng)
    cap = spec.max_vertices()
    W: List[float] = []
    cum: List[float] = []
    S = 0.0
    edges = []
    for k in arities:
        edge = []
        for _ in range(k):
            x = next(u)
            if x >= S:
                V = len(W)
                if cap is not None and V >= cap:
                    if 1.0 - S > 1e-12:
                        raise SamplerError(f"explicit weights exhausted after {V} vertices")
                    x *= S
                else:
                    if spec.source == "explicit":
                        w = spec.weights[V]
                    else:
                        ab = spec.stick_beta(V + 1)
                        frac = 1.0 if ab is None else rng.beta(*ab)
                        w = frac * (1.0 - S)
                    W.append(w)
                    S += w
                    cum.append(S)
                    edge.append(V + 1)
                    continue
            edge.append(min(bisect_right(cum, x), len(W) - 1) + 1)
        edges.append(tuple(edge))
    return EdgeLabeledNetwork(tuple(edges), True), np.array(W)


def joint_log_density(
    net: EdgeLabeledNetwork,
    weights: Sequence[float],
    spec: VertexComponentsSpec,
) -> float:
    """Log joint density of the network and its vertex weights.

    The density is taken with respect to the stick fractions
    ``w_j / (1 - w_1 - ... - w_{j-1})``: the product over vertices of
    ``(1 - sum_{i<j} w_i) * phi_j(fraction_j) * w_j ** (D(j) - 1)``, times the
    arity factor ``prod_k nu_k ** M_k``.
    """
    w = np.asarray(weights, dtype=float)
    deg = net.degrees
    if len(w) != len(deg):
        raise DomainError(f"need {len(deg)} weights, got {len(w)}")
    if np.any((w <= 0) | (w >= 1)) and not (len(w) == 1 and spec.source == "dirichlet" and spec.k == 1):
        raise DomainError("weights must lie in (0, 1)")
    s = net.stats
    out = 0.0
    for k, c in s.M.items():
        if spec.nu[k] == 0:
            return -math.inf
        out += c * math.log(spec.nu[k])
    used = 0.0
    for j, (wj, dj) in enumerate(zip(w, deg), 1):
        rest = 1.0 - used
        if rest <= 0:
            raise DomainError(f"partial weight sum reaches 1 before vertex {j}")
        frac = wj / rest
        ab = spec.stick_beta(j)
        if ab is None:
            if abs(frac - 1.0) > 1e-9:
                raise DomainError(f"weight {j} must take the remaining stick {rest}")
        else:
            if not 0 < frac < 1:
                raise DomainError(f"stick fraction {frac} of vertex {j} outside (0, 1)")
            out += sps.beta.logpdf(frac, *ab)
        out += math.log(rest) + (dj - 1) * math.log(wj)
        used += wj
    return out


@dataclass(frozen=True)
class FiniteF:
    """Probability masses on unordered pairs for the binary edge-exchangeable construction.

    Keys ``(i, j)`` with ``1 <= i <= j`` are ordinary pairs.  ``(0, i)`` joins
    vertex ``i`` to a fresh vertex, ``(0, 0)`` is a loop at a fresh vertex and
    ``(-1, 0)`` joins two fresh vertices; fresh vertices never recur.
    """

    masses: Mapping[Tuple[int, int], float]

    def __post_init__(self):
        clean = {}
        for key, p in self.masses.items():
            i, j = sorted(key)
            if i < -1 or (i == -1 and j != 0):
                raise InvalidInputError(f"invalid pair {key}")
            if p < 0:
                raise InvalidInputError(f"negative mass at {key}")
            if p > 0:
                clean[(i, j)] = clean.get((i, j), 0.0) + float(p)
        total = math.fsum(clean.values())
        if abs(total - 1.0) > 1e-12:
            raise InvalidInputError(f"masses sum to {total!r}, not 1")
        object.__setattr__(self, "masses", dict(sorted(clean.items())))

    def incidence(self, i: int) -> float:
        """Total mass of pairs involving ``i``, including ``(0, i)``."""
        return math.fsum(p for (a, b), p in self.masses.items() if i in (a, b) and a != -1)


def finite_f_simulate(f: FiniteF, n: int, seed: SeedLike = None) -> EdgeLabeledNetwork:
    """Binary network from i.i.d. pair draws, realizing blips as never-repeating vertices."""
    if n < 1:
        raise InvalidInputError("n must be at least 1")
    rng = make_rng(seed)
    keys = list(f.masses)
    p = np.array([f.masses[k] for k in keys])
    draws = rng.choice(len(keys), size=n, p=p / p.sum()).tolist()
    z = 0
    raw = []
    for idx in draws:
        i, j = keys[idx]
        if i >= 1:
            raw.append((i, j))
        elif i == -1:
            raw.append((z - 1, z - 2))
            z -= 2
        elif j == 0:
            z -= 1
            raw.append((z, z))
        else:
            z -= 1
            raw.append((z, j))
    return canonicalize(raw, directed=False)


@dataclass(frozen=True)
class Signature:
    """Empirical pair frequencies of a binary network, with blip residuals.

    A vertex *recurs* when it appears in at least two edges.  ``pairs`` counts
    edges whose vertices all recur, ``singles[i]`` edges joining recurring
    ``i`` to a non-recurring vertex, ``loops`` and ``links`` the loops and
    non-loop edges on non-recurring vertices.
    """

    n: int
    pairs: Dict[Tuple[int, int], int] = field(default_factory=dict)
    singles: Dict[int, int] = field(default_factory=dict)
    loops: int = 0
    links: int = 0

    def masses(self) -> Dict[Tuple[int, int], Fraction]:
        out = {k: Fraction(c, self.n) for k, c in sorted(self.pairs.items())}
        out.update({(0, i): Fraction(c, self.n) for i, c in sorted(self.singles.items())})
        if self.loops:
            out[(0, 0)] = Fraction(self.loops, self.n)
        if self.links:
            out[(-1, 0)] = Fraction(self.links, self.n)
        return out

    def total(self) -> Fraction:
        return sum(self.masses().values(), Fraction(0))

    def incidence(self, i: int) -> Fraction:
        c = sum(v for k, v in self.pairs.items() if i in k) + self.singles.get(i, 0)
        return Fraction(c, self.n)


def signature_estimate(net: EdgeLabeledNetwork) -> Signature:
    if not net.edges:
        raise InvalidInputError("signature needs at least one edge")
    if any(len(e) != 2 for e in net.edges):
        raise UnsupportedError("signature is defined for binary networks only")
    appearances = Counter(x for e in net.edges for x in set(e))
    pairs: Counter = Counter()
    singles: Counter = Counter()
    loops = links = 0
    for e in net.edges:
        i, j = sorted(e)
        ri, rj = appearances[i] > 1, appearances[j] > 1
        if ri and rj:
            pairs[(i, j)] += 1
        elif ri or rj:
            singles[i if ri else j] += 1
        elif i == j:
            loops += 1
        else:
            links += 1
    return Signature(len(net.edges), dict(pairs), dict(singles), loops, links)
