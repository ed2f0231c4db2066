"""Exact probabilities for marked-count laws.

Three independent routes live here:
  * first-passage formulas for left-continuous random walks (the total
    progeny of a branching law equals (1/n) P(S_n = -1));
  * coefficient extraction from the leaf-count functional equation
    C = z*xi0 + sum_j xi_j C^j, solved one coefficient per step;
  * brute-force enumeration of depth-first queues with their product weights.

Rational mode is exact; a float backend based on FFT powering covers the
truncation orders needed for large-size sampling tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .degree_sets import DegreeSet, require_zero
from .offspring import OffspringDist, collapsed_offspring
from .trees import canonical_key, decode

MAX_ENUM_VERTICES = 16


@dataclass(frozen=True)
class WalkPmf:
    """P(S_k = m) over a window of values, for steps distributed like the law minus 1."""

    steps: int
    lo: int
    hi: int
    probs: dict[int, Fraction]

    def prob(self, m: int) -> Fraction:
        if not (self.lo <= m <= self.hi):
            raise ValueError(f"{m} outside window [{self.lo},{self.hi}]")
        return self.probs.get(m, Fraction(0))


def _step_values(dist: OffspringDist, max_value: int) -> list[tuple[int, Fraction]]:
    # step = (child count) - 1, so values run from -1 upward
    if dist.truncated and len(dist.probs) - 1 < max_value + 1:
        raise ValueError("distribution prefix too short for the requested window")
    return [(k - 1, dist.pmf(k)) for k in range(0, max_value + 2) if dist.pmf(k) != 0]


def walk_pmf(dist: OffspringDist, k: int, lo: int, hi: int) -> WalkPmf:
    """Exact pmf of the k-step walk on the window [lo, hi] by dense convolution."""
    if k < 0:
        raise ValueError("step count must be non-negative")
    # a single step larger than hi + k - 1 can never fall back into the window
    steps = _step_values(dist, max(hi + k - 1, -1))
    cur: dict[int, Fraction] = {0: Fraction(1)}
    for j in range(1, k + 1):
        cap = hi + (k - j)  # values above cap cannot fall back into the window
        nxt: dict[int, Fraction] = {}
        for s, pr in cur.items():
            for v, pv in steps:
                s2 = s + v
                if s2 > cap:
                    break
                nxt[s2] = nxt.get(s2, Fraction(0)) + pr * pv
        cur = nxt
    return WalkPmf(k, lo, hi, {m: p for m, p in cur.items() if lo <= m <= hi})


def progeny_pmf(dist: OffspringDist, max_n: int) -> list[Fraction]:
    """Total-progeny law: entry n is (1/n) P(S_n = -1); entry 0 is unused (zero)."""
    steps = _step_values(dist, max(max_n - 2, -1))
    out = [Fraction(0)] * (max_n + 1)
    cur: dict[int, Fraction] = {0: Fraction(1)}
    for n in range(1, max_n + 1):
        cap = max_n - n - 1  # highest value that can still return to -1 in time
        nxt: dict[int, Fraction] = {}
        for s, pr in cur.items():
            for v, pv in steps:
                s2 = s + v
                if s2 > cap:
                    break
                nxt[s2] = nxt.get(s2, Fraction(0)) + pr * pv
        out[n] = nxt.get(-1, Fraction(0)) / n
        cur = nxt
    return out


def leaf_pmf_fixed_point(dist: OffspringDist, max_n: int) -> list[Fraction]:
    """Leaf-count law from its functional equation, one coefficient per step.

    Writing C(z) for the generating function of the number of leaves, the
    root decomposition gives C = z*xi0 + sum_{j>=1} xi_j C^j.  Maintaining the
    powers of C incrementally fixes exactly one new coefficient per outer
    step.  Independent of the walk route above.
    """
    xs = dist.coeffs(max_n)
    xi0, xi1 = xs[0], xs[1]
    if xi1 == 1:
        raise ValueError("degenerate law with all mass on one child")
    bound = dist.support_bound()
    jmax = max_n if bound is None else min(bound, max_n)
    c = [Fraction(0)] * (max_n + 1)
    # pw[j][m] = coefficient of z^m in C(z)^j
    pw = [[Fraction(0)] * (max_n + 1) for _ in range(jmax + 1)]
    if jmax >= 0:
        pw[0][0] = Fraction(1)
    for m in range(1, max_n + 1):
        for j in range(2, min(m, jmax) + 1):
            acc = Fraction(0)
            row = pw[j - 1]
            for k in range(1, m - j + 2):
                if c[k] != 0 and row[m - k] != 0:
                    acc += c[k] * row[m - k]
            pw[j][m] = acc
        total = xi0 if m == 1 else Fraction(0)
        for j in range(2, min(m, jmax) + 1):
            if xs[j] != 0 and pw[j][m] != 0:
                total += xs[j] * pw[j][m]
        c[m] = total / (1 - xi1)
        if jmax >= 1:
            pw[1][m] = c[m]
    return c


def marked_count_pmf(
    dist: OffspringDist, marks: DegreeSet, max_n: int, cross_check: bool | None = None
) -> list[Fraction]:
    """P(marked count = n) for n <= max_n, exact.

    Computed through the collapsed offspring law and the first-passage
    formula.  For the leaf set {0} the independent functional-equation route
    is recomputed and must agree exactly (on by default in that case).
    """
    require_zero(marks)
    zeta = collapsed_offspring(dist, marks, max_n)
    out = progeny_pmf(zeta, max_n)
    is_leaf_set = not marks.cofinite and marks.members == frozenset({0})
    if cross_check is None:
        cross_check = is_leaf_set
    if cross_check and is_leaf_set:
        alt = leaf_pmf_fixed_point(dist, max_n)
        if out != alt:
            raise ArithmeticError("walk route and functional-equation route disagree")
    return out


def forest_leaf_pmf(dist: OffspringDist, n_trees: int, k: int) -> Fraction:
    """P(a forest of n independent trees has exactly k leaves).

    Equals (n/k) P(S_k = -n) for the walk with collapsed-law steps; zero
    whenever k < n since every tree contributes a leaf.
    """
    if k < 1 or n_trees < 1:
        raise ValueError("need at least one tree and one leaf")
    zeta = collapsed_offspring(dist, DegreeSet.of(0), k)
    w = walk_pmf(zeta, k, -n_trees, -n_trees)
    return Fraction(n_trees, k) * w.prob(-n_trees)


def collapsed_coeffs_float(dist: OffspringDist, marks: DegreeSet, order: int) -> np.ndarray:
    """Float collapsed offspring coefficients; same series algebra as the exact
    path but vectorised (the reciprocal becomes a running dot product)."""
    require_zero(marks)
    xs = np.array([float(dist.pmf(k)) for k in range(order + 2)])
    in_marks = np.array([k in marks for k in range(order + 2)])
    marked = np.where(in_marks[: order + 1], xs[: order + 1], 0.0)
    unmarked = np.where(~in_marks[1 : order + 2], xs[1 : order + 2], 0.0)
    # out = marked / (1 - unmarked): (1-u) * out = a gives the recurrence
    out = np.zeros(order + 1)
    inv = 1.0 / (1.0 - unmarked[0])
    out[0] = marked[0] * inv
    for m in range(1, order + 1):
        out[m] = (marked[m] + np.dot(unmarked[1 : m + 1], out[m - 1 :: -1])) * inv
    return np.clip(out, 0.0, None)


def marked_count_pmf_float(dist: OffspringDist, marks: DegreeSet, max_n: int) -> np.ndarray:
    """Float marked-count law via FFT powering; entry n is (1/n)[z^{n-1}] zeta(z)^n."""
    require_zero(marks)
    m = 1 << max(8, (2 * max_n + 2).bit_length())
    coeffs = collapsed_coeffs_float(dist, marks, m - 1)
    f = np.fft.fft(coeffs, m)
    twiddle = np.exp(2j * np.pi * np.arange(m) / m)
    g = f * twiddle
    out = np.zeros(max_n + 1)
    h = f.copy()  # h = f * g^(n-1) after the n-th update
    for n in range(1, max_n + 1):
        out[n] = h.mean().real / n
        h *= g
    np.clip(out, 0.0, None, out=out)
    return out


def enumerate_mass(
    dist: OffspringDist, marks: DegreeSet, n: int, max_vertices: int
) -> tuple[Fraction, dict[str, Fraction]]:
    """Sum of tree weights over all ordered trees with at most `max_vertices`
    vertices and marked count exactly n, plus the mass per unordered shape.

    The weight of a tree is the product of its offspring probabilities.  This
    is the brute-force oracle; it iterates over depth-first queues directly.
    """
    require_zero(marks)
    if max_vertices > MAX_ENUM_VERTICES:
        raise ValueError(f"enumeration capped at {MAX_ENUM_VERTICES} vertices")
    total = Fraction(0)
    by_shape: dict[str, Fraction] = {}
    prefix: list[int] = []

    def walk(used: int, psum: int, marked: int, mass: Fraction) -> None:
        nonlocal total
        for deg in dist.support_iter(max_vertices - used - psum - 1):
            x = deg - 1
            w = mass * dist.pmf(deg)
            hit = marked + (1 if deg in marks else 0)
            if hit > n:
                continue
            prefix.append(x)
            if psum + x == -1:
                if hit == n:
                    total += w
                    key = canonical_key(decode(tuple(prefix)))
                    by_shape[key] = by_shape.get(key, Fraction(0)) + w
            else:
                walk(used + 1, psum + x, hit, w)
            prefix.pop()

    walk(0, 0, 0, Fraction(1))
    return total, by_shape
