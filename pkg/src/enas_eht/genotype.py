"""Combination encoding of architectures and exact state-space counting.

A genotype is a binary edge vector (one bit per possible edge of an
upper-triangular adjacency matrix on ``v`` nodes) concatenated with a
categorical operation vector (one value in ``[0, L]`` per internal node).
All counting routines return exact Python integers; population-space sizes
overflow machine words already at ``v = 7``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

__all__ = [
    "SearchSpaceParams",
    "Genotype",
    "DistanceProfile",
    "derive_params",
    "hamming",
    "distance_profile",
    "count_solutions_at_distance",
    "solution_space_size",
    "count_population_class",
    "count_population_subspace",
    "population_space_size",
    "decode_to_graph",
    "encode_from_graph",
    "format_genotype",
    "parse_genotype",
    "enumerate_genotypes",
    "genotype_to_index",
    "index_to_genotype",
    "multichoose",
]


@dataclass(frozen=True)
class SearchSpaceParams:
    """Geometry of the architecture space for ``v`` nodes and ``L+1`` op types.

    n1 = v(v-1)/2 edge slots, n2 = v-2 op slots, n = n1 + n2 is the genotype
    length and Q = n1 + L*n2 the weighted length used by offspring-fair
    one-slot mutation.
    """

    v: int
    L: int
    n1: int
    n2: int
    n: int
    Q: int


@dataclass(frozen=True)
class Genotype:
    """One architecture: edge bits of length n1 and op values of length n2."""

    edges: tuple[int, ...]
    ops: tuple[int, ...]

    def validate(self, p: SearchSpaceParams) -> None:
        if len(self.edges) != p.n1:
            raise ValueError(f"edge part has {len(self.edges)} slots, expected {p.n1}")
        if len(self.ops) != p.n2:
            raise ValueError(f"op part has {len(self.ops)} slots, expected {p.n2}")
        if any(b not in (0, 1) for b in self.edges):
            raise ValueError("edge slots must be 0 or 1")
        if any(o < 0 or o > p.L for o in self.ops):
            raise ValueError(f"op slots must lie in [0, {p.L}]")


@dataclass(frozen=True)
class DistanceProfile:
    """Hamming mismatches against the optimum, split by genotype part."""

    d1: int
    d2: int

    @property
    def d(self) -> int:
        return self.d1 + self.d2


def derive_params(v: int, L: int) -> SearchSpaceParams:
    """Derive the slot counts for a space with ``v`` nodes and op range [0, L]."""
    if v < 3:
        raise ValueError(f"v must be >= 3 (got {v}): no internal nodes otherwise")
    if L < 1:
        raise ValueError(f"L must be >= 1 (got {L}): no alternative operations otherwise")
    n1 = v * (v - 1) // 2
    n2 = v - 2
    return SearchSpaceParams(v=v, L=L, n1=n1, n2=n2, n=n1 + n2, Q=n1 + L * n2)


def hamming(a: Genotype, b: Genotype) -> int:
    """Number of slots (over all n positions) where the two genotypes differ."""
    if len(a.edges) != len(b.edges) or len(a.ops) != len(b.ops):
        raise ValueError("genotypes come from different search spaces")
    return sum(x != y for x, y in zip(a.edges, b.edges)) + sum(
        x != y for x, y in zip(a.ops, b.ops)
    )


def distance_profile(x: Genotype, opt: Genotype) -> DistanceProfile:
    """Split the Hamming distance of ``x`` to ``opt`` into edge/op mismatches."""
    if len(x.edges) != len(opt.edges) or len(x.ops) != len(opt.ops):
        raise ValueError("genotypes come from different search spaces")
    d1 = sum(a != b for a, b in zip(x.edges, opt.edges))
    d2 = sum(a != b for a, b in zip(x.ops, opt.ops))
    return DistanceProfile(d1=d1, d2=d2)


def count_solutions_at_distance(p: SearchSpaceParams, d: int) -> int:
    """C(d): how many genotypes sit at Hamming distance exactly d from a fixed one.

    Sums L^d2 * binom(n1, d1) * binom(n2, d2) over the feasible splits
    d1 in [max(0, d - n2), min(d, n1)], d2 = d - d1.
    """
    if d < 0 or d > p.n:
        raise ValueError(f"distance {d} outside [0, {p.n}]")
    total = 0
    for d1 in range(max(0, d - p.n2), min(d, p.n1) + 1):
        d2 = d - d1
        total += p.L**d2 * math.comb(p.n1, d1) * math.comb(p.n2, d2)
    return total


def solution_space_size(p: SearchSpaceParams) -> int:
    """|S| = 2^n1 * (L+1)^n2, exactly."""
    return 2**p.n1 * (p.L + 1) ** p.n2


def multichoose(m: int, k: int) -> int:
    """Number of k-multisets from m distinguishable items."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return 1
    if m <= 0:
        return 0
    return math.comb(m + k - 1, k)


def count_population_class(p: SearchSpaceParams, lam: int, i: int, gamma: int) -> int:
    """|chi_i^gamma|: populations with min distance i attained by exactly gamma members.

    Multiset-coefficient form: gamma members drawn (with repetition) from the
    C(i) solutions at distance i, the remaining lam-gamma from all solutions
    strictly farther than i.
    """
    if not 1 <= i <= p.n:
        raise ValueError(f"i={i} outside [1, {p.n}]")
    if not 1 <= gamma <= lam:
        raise ValueError(f"gamma={gamma} outside [1, {lam}]")
    at_i = count_solutions_at_distance(p, i)
    beyond = sum(count_solutions_at_distance(p, j) for j in range(i + 1, p.n + 1))
    return multichoose(at_i, gamma) * multichoose(beyond, lam - gamma)


def count_population_subspace(p: SearchSpaceParams, lam: int, i: int) -> int:
    """|chi_i| = sum over gamma of |chi_i^gamma|."""
    return sum(count_population_class(p, lam, i, g) for g in range(1, lam + 1))


def population_space_size(p: SearchSpaceParams, lam: int) -> int:
    """|chi|: number of lam-multisets of solutions."""
    return multichoose(solution_space_size(p), lam)


def _edge_slot_pairs(v: int) -> list[tuple[int, int]]:
    # Row-major upper-triangular order: (0,1), (0,2), ..., (0,v-1), (1,2), ...
    return [(i, j) for i in range(v) for j in range(i + 1, v)]


def decode_to_graph(x: Genotype, p: SearchSpaceParams) -> tuple[np.ndarray, tuple[int, ...]]:
    """Expand a genotype to its v-by-v upper-triangular adjacency matrix and op labels."""
    x.validate(p)
    adj = np.zeros((p.v, p.v), dtype=np.uint8)
    for bit, (i, j) in zip(x.edges, _edge_slot_pairs(p.v)):
        adj[i, j] = bit
    return adj, x.ops


def encode_from_graph(adj: np.ndarray, ops: tuple[int, ...], p: SearchSpaceParams) -> Genotype:
    """Inverse of :func:`decode_to_graph`."""
    edges = tuple(int(adj[i, j]) for i, j in _edge_slot_pairs(p.v))
    g = Genotype(edges=edges, ops=tuple(int(o) for o in ops))
    g.validate(p)
    return g


def format_genotype(x: Genotype) -> str:
    """Text form ``<edges-bits>:<ops-digits>`` (op digits in base L+1, L <= 9)."""
    if any(o > 9 for o in x.ops):
        raise ValueError("text form supports op values up to 9 only")
    return "".join(str(b) for b in x.edges) + ":" + "".join(str(o) for o in x.ops)


def parse_genotype(text: str, p: SearchSpaceParams) -> Genotype:
    """Parse the ``<edges-bits>:<ops-digits>`` text form and validate it."""
    head, sep, tail = text.strip().partition(":")
    if not sep:
        raise ValueError(f"missing ':' separator in genotype text {text!r}")
    if not all(c in "01" for c in head):
        raise ValueError(f"edge part must be bits: {head!r}")
    if not tail.isdigit() and p.n2 > 0:
        raise ValueError(f"op part must be digits: {tail!r}")
    g = Genotype(edges=tuple(int(c) for c in head), ops=tuple(int(c) for c in tail))
    g.validate(p)
    return g


def enumerate_genotypes(p: SearchSpaceParams) -> Iterator[Genotype]:
    """Yield every genotype of the space (use only when |S| is small)."""
    for edges in itertools.product((0, 1), repeat=p.n1):
        for ops in itertools.product(range(p.L + 1), repeat=p.n2):
            yield Genotype(edges=edges, ops=ops)


def genotype_to_index(x: Genotype, p: SearchSpaceParams) -> int:
    """Bijective integer index: edge bits (slot k -> 2^k) mixed-radixed with ops."""
    e = 0
    for k, b in enumerate(x.edges):
        e |= b << k
    o = 0
    base = p.L + 1
    for k, val in enumerate(x.ops):
        o += val * base**k
    return e * base**p.n2 + o


def index_to_genotype(idx: int, p: SearchSpaceParams) -> Genotype:
    """Inverse of :func:`genotype_to_index`."""
    base = p.L + 1
    e, rem = divmod(idx, base**p.n2)
    edges = tuple((e >> k) & 1 for k in range(p.n1))
    ops = []
    for _ in range(p.n2):
        rem, r = divmod(rem, base)
        ops.append(r)
    return Genotype(edges=edges, ops=tuple(ops))
