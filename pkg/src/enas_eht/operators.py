"""Population initialization, the four mutation operators, and truncation selection.

Genotypes move through the hot paths as int8 rows of length n (edge bits first,
then op values), so every operator has a batch form working on an (m, n) array
plus a thin scalar wrapper on :class:`~enas_eht.genotype.Genotype`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .genotype import Genotype, SearchSpaceParams

__all__ = [
    "Population",
    "MutationOp",
    "SeedLike",
    "make_rng",
    "genotype_to_array",
    "array_to_genotype",
    "init_population",
    "init_population_array",
    "mutate_batch",
    "mutate1",
    "mutate2",
    "mutate3",
    "mutate4",
    "mutate",
    "truncation_select",
]

SeedLike = Union[int, Sequence[int], np.random.SeedSequence, np.random.Generator]


def make_rng(seed: SeedLike) -> np.random.Generator:
    """Build a Generator from an int, a label sequence, a SeedSequence, or pass one through."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    if isinstance(seed, int):
        return np.random.default_rng(np.random.SeedSequence(seed))
    return np.random.default_rng(np.random.SeedSequence(list(seed)))


@dataclass(frozen=True)
class Population:
    """Unordered, repeatable multiset of genotypes (stored in a fixed order)."""

    members: tuple[Genotype, ...]

    @property
    def lam(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class MutationOp:
    """One of the four mutation strategies; q is meaningful only for kind 'q_bit'."""

    kind: str  # one_bit_bit_fair | one_bit_offspring_fair | q_bit | bitwise
    q: int = 0

    _KINDS = ("one_bit_bit_fair", "one_bit_offspring_fair", "q_bit", "bitwise")
    _CODES = {"m1": "one_bit_bit_fair", "m2": "one_bit_offspring_fair", "m3": "q_bit", "m4": "bitwise"}

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown mutation kind {self.kind!r}")
        if self.kind == "q_bit" and self.q < 1:
            raise ValueError("q_bit mutation requires q >= 1")

    @classmethod
    def from_code(cls, code: str, q: int = 0) -> "MutationOp":
        if code not in cls._CODES:
            raise ValueError(f"unknown operator code {code!r} (expected m1/m2/m3/m4)")
        return cls(kind=cls._CODES[code], q=q)

    @property
    def code(self) -> str:
        return {v: k for k, v in self._CODES.items()}[self.kind]


def genotype_to_array(x: Genotype) -> np.ndarray:
    return np.array(x.edges + x.ops, dtype=np.int8)


def array_to_genotype(row: np.ndarray, p: SearchSpaceParams) -> Genotype:
    vals = tuple(int(v) for v in row)
    return Genotype(edges=vals[: p.n1], ops=vals[p.n1 :])


def init_population_array(p: SearchSpaceParams, lam: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform population as an (lam, n) int8 array."""
    if lam < 1:
        raise ValueError("lambda must be >= 1")
    out = np.empty((lam, p.n), dtype=np.int8)
    out[:, : p.n1] = rng.integers(0, 2, size=(lam, p.n1), dtype=np.int8)
    out[:, p.n1 :] = rng.integers(0, p.L + 1, size=(lam, p.n2), dtype=np.int8)
    return out


def init_population(p: SearchSpaceParams, lam: int, seed: SeedLike) -> Population:
    arr = init_population_array(p, lam, make_rng(seed))
    return Population(members=tuple(array_to_genotype(row, p) for row in arr))


def _resample_ops(cur: np.ndarray, L: int, rng: np.random.Generator) -> np.ndarray:
    # uniform draw from [0, L] \ {cur}: draw t in [0, L-1] and skip over cur
    t = rng.integers(0, L, size=cur.shape)
    return (t + (t >= cur)).astype(np.int8)


def _m1_batch(x: np.ndarray, p: SearchSpaceParams, rng: np.random.Generator) -> np.ndarray:
    m = x.shape[0]
    rows = np.arange(m)
    r = rng.integers(0, p.n, size=m)
    cur = x[rows, r]
    alt = _resample_ops(cur, p.L, rng)
    y = x.copy()
    y[rows, r] = np.where(r < p.n1, 1 - cur, alt)
    return y


def _m2_batch(x: np.ndarray, p: SearchSpaceParams, rng: np.random.Generator) -> np.ndarray:
    m = x.shape[0]
    rows = np.arange(m)
    r = rng.integers(0, p.Q, size=m)
    is_edge = r < p.n1
    rr = np.where(is_edge, 0, r - p.n1)
    slot = np.where(is_edge, r, p.n1 + rr // p.L)
    k = (rr % p.L).astype(np.int8)
    cur = x[rows, slot]
    alt = (k + (k >= cur)).astype(np.int8)
    y = x.copy()
    y[rows, slot] = np.where(is_edge, 1 - cur, alt)
    return y


def _apply_mask(x: np.ndarray, mask: np.ndarray, p: SearchSpaceParams, rng: np.random.Generator) -> np.ndarray:
    y = x.copy()
    y[:, : p.n1] = x[:, : p.n1] ^ mask[:, : p.n1].astype(np.int8)
    cur = x[:, p.n1 :]
    alt = _resample_ops(cur, p.L, rng)
    y[:, p.n1 :] = np.where(mask[:, p.n1 :], alt, cur)
    return y


def _m3_batch(x: np.ndarray, p: SearchSpaceParams, q: int, rng: np.random.Generator) -> np.ndarray:
    if not 1 <= q <= p.n:
        raise ValueError(f"q={q} outside [1, {p.n}]")
    m = x.shape[0]
    keys = rng.random((m, p.n))
    chosen = np.argpartition(keys, q - 1, axis=1)[:, :q]
    mask = np.zeros((m, p.n), dtype=bool)
    np.put_along_axis(mask, chosen, True, axis=1)
    return _apply_mask(x, mask, p, rng)


def _m4_batch(x: np.ndarray, p: SearchSpaceParams, rng: np.random.Generator) -> np.ndarray:
    mask = rng.random(x.shape) < 1.0 / p.n
    return _apply_mask(x, mask, p, rng)


def mutate_batch(x: np.ndarray, p: SearchSpaceParams, op: MutationOp, rng: np.random.Generator) -> np.ndarray:
    """Mutate every row of x once with the given operator."""
    if op.kind == "one_bit_bit_fair":
        return _m1_batch(x, p, rng)
    if op.kind == "one_bit_offspring_fair":
        return _m2_batch(x, p, rng)
    if op.kind == "q_bit":
        return _m3_batch(x, p, op.q, rng)
    return _m4_batch(x, p, rng)


def _scalar(x: Genotype, p: SearchSpaceParams, op: MutationOp, seed: SeedLike) -> Genotype:
    x.validate(p)
    arr = genotype_to_array(x)[None, :]
    return array_to_genotype(mutate_batch(arr, p, op, make_rng(seed))[0], p)


def mutate1(x: Genotype, p: SearchSpaceParams, seed: SeedLike) -> Genotype:
    """Bit-based fair one-slot mutation: slot uniform on the n positions."""
    return _scalar(x, p, MutationOp.from_code("m1"), seed)


def mutate2(x: Genotype, p: SearchSpaceParams, seed: SeedLike) -> Genotype:
    """Offspring-based fair one-slot mutation: each of the Q distinct offspring at 1/Q."""
    return _scalar(x, p, MutationOp.from_code("m2"), seed)


def mutate3(x: Genotype, p: SearchSpaceParams, q: int, seed: SeedLike) -> Genotype:
    """q-bit mutation: a uniform q-subset of slots, each changed as in mutate1."""
    return _scalar(x, p, MutationOp.from_code("m3", q=q), seed)


def mutate4(x: Genotype, p: SearchSpaceParams, seed: SeedLike) -> Genotype:
    """Bitwise mutation: each slot changed independently with probability 1/n."""
    return _scalar(x, p, MutationOp.from_code("m4"), seed)


def mutate(x: Genotype, p: SearchSpaceParams, op: MutationOp, seed: SeedLike) -> Genotype:
    return _scalar(x, p, op, seed)


def truncation_select(
    parents: Population,
    offspring: Population,
    fitness: Union[Mapping[Genotype, float], Callable[[Genotype], float]],
    seed: SeedLike,
) -> Population:
    """Keep the lam best of the combined 2*lam multiset (elitist).

    Ties at the cut rank are broken uniformly at random (seeded).
    """
    if parents.lam != offspring.lam:
        raise ValueError("parent and offspring populations must have equal size")
    combined = parents.members + offspring.members
    if callable(fitness):
        values = [float(fitness(g)) for g in combined]
    else:
        try:
            values = [float(fitness[g]) for g in combined]
        except KeyError as exc:
            raise ValueError(f"fitness missing for member {exc.args[0]!r}") from exc
    rng = make_rng(seed)
    tie = rng.random(len(combined))
    order = sorted(range(len(combined)), key=lambda i: (-values[i], tie[i]))
    keep = order[: parents.lam]
    return Population(members=tuple(combined[i] for i in keep))
