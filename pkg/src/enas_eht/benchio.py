"""Fitness landscapes: the distance surrogate, tabular benchmarks, and file IO.

Benchmark file format: UTF-8 lines ``<edges-bits>:<ops-digits>,<fitness>``,
``#`` comment lines ignored, optional first header line ``v=<int>,L=<int>``.
Tie detection parses the fitness text exactly as written.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .genotype import (
    Genotype,
    SearchSpaceParams,
    derive_params,
    format_genotype,
    hamming,
    parse_genotype,
    solution_space_size,
)
from .operators import genotype_to_array

__all__ = [
    "FitnessLandscape",
    "DistanceLandscape",
    "TabularBenchmark",
    "TabularLandscape",
    "distance_landscape",
    "load_tabular_benchmark",
    "generate_synthetic_table",
    "generate_ops_ball_table",
    "BenchmarkFormatError",
]


class BenchmarkFormatError(ValueError):
    """Malformed, duplicated, or tied-optimum benchmark content."""


class FitnessLandscape:
    """Interface: evaluate genotypes, expose the unique optimum and the params."""

    def params(self) -> SearchSpaceParams:
        raise NotImplementedError

    def optimum(self) -> Genotype:
        raise NotImplementedError

    def evaluate(self, x: Genotype) -> float:
        return float(self.evaluate_batch(genotype_to_array(x)[None, :])[0])

    def evaluate_batch(self, rows: np.ndarray) -> np.ndarray:
        """Fitness of each (member, slot) row; vectorized hot path."""
        raise NotImplementedError


class DistanceLandscape(FitnessLandscape):
    """f(x) = n - hamming(x, target); the target is the unique optimum."""

    def __init__(self, p: SearchSpaceParams, target: Genotype):
        target.validate(p)
        self._p = p
        self._target = target
        self._target_row = genotype_to_array(target)

    def params(self) -> SearchSpaceParams:
        return self._p

    def optimum(self) -> Genotype:
        return self._target

    def evaluate(self, x: Genotype) -> float:
        return float(self._p.n - hamming(x, self._target))

    def evaluate_batch(self, rows: np.ndarray) -> np.ndarray:
        return (self._p.n - (rows != self._target_row).sum(axis=1)).astype(float)


def distance_landscape(p: SearchSpaceParams, target: Genotype) -> DistanceLandscape:
    return DistanceLandscape(p, target)


def _radix_weights(p: SearchSpaceParams) -> np.ndarray:
    """Per-slot weights mapping a genotype row to its integer index (int64)."""
    base = p.L + 1
    w = np.empty(p.n, dtype=np.int64)
    w[p.n1 :] = [base**k for k in range(p.n2)]
    w[: p.n1] = [(1 << k) * base**p.n2 for k in range(p.n1)]
    return w


@dataclass(frozen=True)
class TabularBenchmark:
    """Sorted integer-index view of a genotype -> fitness table."""

    params_: SearchSpaceParams
    indices: np.ndarray  # sorted int64 genotype indices
    fitness: np.ndarray  # float fitness aligned with indices
    optimum_pos: int
    floor: float

    @property
    def record_count(self) -> int:
        return int(self.indices.size)


class TabularLandscape(FitnessLandscape):
    """Lookup landscape; genotypes absent from the table get the floor fitness."""

    def __init__(self, bench: TabularBenchmark):
        self._b = bench
        self._weights = _radix_weights(bench.params_)
        p = bench.params_
        opt_idx = int(bench.indices[bench.optimum_pos])
        from .genotype import index_to_genotype

        self._optimum = index_to_genotype(opt_idx, p)

    def params(self) -> SearchSpaceParams:
        return self._b.params_

    def optimum(self) -> Genotype:
        return self._optimum

    def evaluate_batch(self, rows: np.ndarray) -> np.ndarray:
        idx = rows.astype(np.int64) @ self._weights
        pos = np.searchsorted(self._b.indices, idx)
        pos_c = np.clip(pos, 0, self._b.indices.size - 1)
        hit = self._b.indices[pos_c] == idx
        out = np.full(idx.shape, self._b.floor)
        out[hit] = self._b.fitness[pos_c[hit]]
        return out


def _parse_header(line: str) -> Optional[tuple[int, int]]:
    parts = line.strip().split(",")
    if len(parts) == 2 and parts[0].startswith("v=") and parts[1].startswith("L="):
        return int(parts[0][2:]), int(parts[1][2:])
    return None


def _content_lines(fh):
    """Yield (line number, stripped text) for non-comment, non-blank lines."""
    for ln, line in enumerate(fh, start=1):
        line = line.strip()
        if line and not line.startswith("#"):
            yield ln, line


def _infer_space(path: str) -> SearchSpaceParams:
    """Space from the ``v=..,L=..`` header, else from the record texts
    (v from the slot counts, L from the largest op digit)."""
    first_geno: Optional[str] = None
    max_op = 1
    with open(path, "r", encoding="utf-8") as fh:
        lines = _content_lines(fh)
        for _, line in lines:
            if "=" in line:
                header = _parse_header(line)
                if header is not None:
                    return derive_params(*header)
            first_geno = line.rpartition(",")[0]
            break
        if first_geno is None:
            raise BenchmarkFormatError(f"{path}: no records")
        for c in first_geno.partition(":")[2]:
            max_op = max(max_op, int(c)) if c.isdigit() else max_op
        for _, line in lines:
            for c in line.rpartition(",")[0].partition(":")[2]:
                if c.isdigit():
                    max_op = max(max_op, int(c))
    head, _, tail = first_geno.partition(":")
    v = len(tail) + 2
    p = derive_params(v, max_op)
    if p.n1 != len(head):
        raise BenchmarkFormatError(f"{path}: edge part length {len(head)} inconsistent with v={v}")
    return p


def load_tabular_benchmark(path: str, p: Optional[SearchSpaceParams] = None) -> tuple[TabularBenchmark, TabularLandscape]:
    """Parse a benchmark file, enforce a unique optimum, and build the landscape.

    Params come from (in order): the explicit argument, the ``v=..,L=..``
    header, or inference from the records.  Single streaming pass with flat
    arrays, so multi-million-record tables load without per-record objects;
    exact (text-level) fitness comparison is applied lazily, only where the
    running maximum is contested.
    """
    import array

    if p is None:
        p = _infer_space(path)
    from .genotype import genotype_to_index

    base = p.L + 1
    edge_chars = frozenset("01")
    op_chars = frozenset(str(i) for i in range(base))
    pow_ops = base**p.n2
    indices = array.array("q")
    fits = array.array("d")
    line_nos = array.array("q")
    best_float: Optional[float] = None
    best_text = ""
    best_idx = -1
    tie_lines: list[int] = []
    with open(path, "r", encoding="utf-8") as fh:
        first = True
        for ln, line in _content_lines(fh):
            if first:
                first = False
                if "=" in line and _parse_header(line) is not None:
                    continue
            geno_text, sep, fit_text = line.rpartition(",")
            if not sep or not geno_text:
                raise BenchmarkFormatError(f"{path}:{ln}: expected '<genotype>,<fitness>'")
            head, colon, tail = geno_text.partition(":")
            if (
                colon
                and len(head) == p.n1
                and len(tail) == p.n2
                and set(head) <= edge_chars
                and set(tail) <= op_chars
            ):
                idx = int(head[::-1], 2) * pow_ops + int(tail[::-1], base)
            else:
                try:
                    g = parse_genotype(geno_text, p)
                except ValueError as exc:
                    raise BenchmarkFormatError(f"{path}:{ln}: {exc}") from exc
                idx = genotype_to_index(g, p)
            try:
                fit = float(fit_text)
                if not math.isfinite(fit):
                    raise ValueError
            except ValueError as exc:
                raise BenchmarkFormatError(f"{path}:{ln}: bad fitness {fit_text!r}") from exc
            indices.append(idx)
            fits.append(fit)
            line_nos.append(ln)
            if best_float is None or fit > best_float:
                # float order is monotone in the exact order, so a strictly
                # larger float is a strictly larger exact value
                best_float, best_text, best_idx, tie_lines = fit, fit_text, idx, [ln]
            elif fit == best_float and fit_text != best_text:
                exact, best_exact = Fraction(fit_text), Fraction(best_text)
                if exact > best_exact:
                    best_text, best_idx, tie_lines = fit_text, idx, [ln]
                elif exact == best_exact:
                    tie_lines.append(ln)
            elif fit == best_float:
                tie_lines.append(ln)
    if not indices:
        raise BenchmarkFormatError(f"{path}: no records")

    idx_arr = np.frombuffer(indices, dtype=np.int64)
    order = np.argsort(idx_arr, kind="stable")
    sorted_idx = idx_arr[order]
    dup = np.flatnonzero(sorted_idx[1:] == sorted_idx[:-1])
    if dup.size:
        i = int(dup[0])
        lns = np.frombuffer(line_nos, dtype=np.int64)
        a, b = int(lns[order[i]]), int(lns[order[i + 1]])
        raise BenchmarkFormatError(f"{path}: duplicate genotype at lines {a} and {b}")
    if len(tie_lines) > 1:
        lines = ", ".join(str(ln) for ln in tie_lines[:5])
        raise BenchmarkFormatError(f"{path}: tied maximum fitness at lines {lines} (TiedOptimum)")

    fitness = np.frombuffer(fits, dtype=float)[order]
    bench = TabularBenchmark(
        params_=p,
        indices=sorted_idx,
        fitness=fitness,
        optimum_pos=int(np.searchsorted(sorted_idx, best_idx)),
        floor=float(fitness.min()) - 1.0,
    )
    return bench, TabularLandscape(bench)


def _write_table(path: str, p: SearchSpaceParams, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# synthetic tabular benchmark\n")
        fh.write(f"v={p.v},L={p.L}\n")
        for text, fit in rows:
            fh.write(f"{text},{fit!r}\n")


def generate_synthetic_table(p: SearchSpaceParams, seed: int, shape: str, path: str) -> None:
    """Write a full-coverage synthetic table; |S| must be at most 1e7.

    shape 'distance-correlated': fitness = n - distance(target) + small jitter,
    with the target forced strictly best.  shape 'random': distinct uniforms.
    """
    from .genotype import enumerate_genotypes
    from .operators import make_rng

    size = solution_space_size(p)
    if size > 10**7:
        raise ValueError(f"solution space size {size} exceeds 1e7; full table refused")
    if shape not in ("distance-correlated", "random"):
        raise ValueError(f"unknown table shape {shape!r}")
    rng = make_rng([seed, 90210])
    genos = list(enumerate_genotypes(p))
    if shape == "random":
        vals = rng.permutation(size).astype(float) / size
        rows = [(format_genotype(g), float(v)) for g, v in zip(genos, vals)]
    else:
        target = genos[int(rng.integers(0, size))]
        jitter = (rng.random(size) - 0.5) * 0.2
        rows = []
        for g, j in zip(genos, jitter):
            d = hamming(g, target)
            fit = float(p.n) + 0.5 if d == 0 else float(p.n - d) + float(j)
            rows.append((format_genotype(g), fit))
    _write_table(path, p, rows)


def generate_ops_ball_table(p: SearchSpaceParams, seed: int, path: str) -> Genotype:
    """Distance-correlated partial table around a random hidden target.

    Records cover the full edge enumeration at every op vector within one op
    change of the target's ((1 + n2*L) * 2^n1 records), so a random initial
    population almost always contains members with real fitness and the op
    part carries a gradient toward the target's op vector.  Genotypes outside
    the ball fall to the loader's floor fitness.  Returns the target.
    """
    from .operators import make_rng

    if p.n1 > 24:
        raise ValueError(f"2^{p.n1} edge patterns exceed the practical table size")
    rng = make_rng([seed, 90211])
    target_edges = tuple(int(b) for b in rng.integers(0, 2, size=p.n1))
    target_ops = tuple(int(o) for o in rng.integers(0, p.L + 1, size=p.n2))
    target = Genotype(edges=target_edges, ops=target_ops)
    tgt = np.array(target_edges, dtype=np.uint8)
    size = 1 << p.n1
    # enumerate edge patterns by integer; bit k of e is edge slot k
    codes = np.arange(size, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(p.n1)) & 1).astype(np.uint8)
    edge_dist = (bits != tgt).sum(axis=1)
    edge_texts = [f"{e:0{p.n1}b}"[::-1] for e in range(size)]
    ball = [(target_ops, 0)]
    for k in range(p.n2):
        for o in range(p.L + 1):
            if o != target_ops[k]:
                ball.append((target_ops[:k] + (o,) + target_ops[k + 1 :], 1))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# synthetic distance-correlated benchmark (op-vector ball, radius 1)\n")
        fh.write(f"v={p.v},L={p.L}\n")
        for ops_vec, d_ops in ball:
            ops_text = "".join(str(o) for o in ops_vec)
            jitter = (rng.random(size) - 0.5) * 0.2
            fits = (p.n - (edge_dist + d_ops)).astype(float) + jitter
            if d_ops == 0:
                fits[edge_dist == 0] = p.n + 0.5
            fit_list = fits.tolist()
            chunk = 1 << 16
            for start in range(0, size, chunk):
                stop = min(start + chunk, size)
                fh.write(
                    "\n".join(
                        f"{edge_texts[e]}:{ops_text},{fit_list[e]!r}" for e in range(start, stop)
                    )
                    + "\n"
                )
    return target
