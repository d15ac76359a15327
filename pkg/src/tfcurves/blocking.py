"""Exhaustive search over blocking sets of PG(2,q).

A blocking set meets every line; it is minimal when no proper subset is
blocking, equivalently when every one of its points lies on a tangent (a
line meeting the set in that point only).  This module censuses blocking
and minimal blocking sets by size, classifies point sets by how close they
are to a small (< 2q points) blocking set, verifies the affine blocking
floor of 2q-1 by branch and bound, runs the greedy line-covering procedure,
and evaluates the binomial-ratio and exponential ceilings on the number of
minimal blocking sets of each size.

All searches run over bit-indexed subsets in deterministic lexicographic
order, so censuses are reproducible and parallel partitions merge by plain
addition.
"""

from __future__ import annotations

import csv
import enum
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .plane import AffinePlane, LineSet, Plane, PointSet

# Euler's number bracketed by rationals; ceilings use the upper bracket so
# that "census < ceiling" is a rigorous exact-arithmetic claim.
E_UPPER = Fraction(2_718_281_829, 10**9)

DEFAULT_SUBSET_BUDGET = comb(21, 8)  # q=4, k_max=2q: the largest default census


class BudgetExceeded(RuntimeError):
    """Raised when a search would exceed its configured subset budget."""


class UniquenessViolation(RuntimeError):
    """A blocking set of size <= 2q with two minimal blocking subsets.

    This would contradict a proven statement at this q, so it is reported
    loudly instead of being silently tolerated.
    """


# ---------------------------------------------------------------------------
# minimality
# ---------------------------------------------------------------------------

def is_minimal_blocking(s: PointSet) -> bool:
    """Blocking, and every point has a tangent line."""
    plane = s.plane
    bits = s.bits
    if not plane.is_blocking_mask(bits):
        return False
    return _all_points_tangent(plane, bits)


def _all_points_tangent(plane: Plane, bits: int) -> bool:
    rest = bits
    while rest:
        low = rest & -rest
        rest ^= low
        p = low.bit_length() - 1
        if not _has_tangent(plane, bits, p):
            return False
    return True


def _has_tangent(plane: Plane, bits: int, p: int) -> bool:
    low = 1 << p
    for ell in plane.lines_through[p]:
        if plane.line_masks[ell] & bits == low:
            return True
    return False


def tangent_count(plane: Plane, bits: int, p: int) -> int:
    low = 1 << p
    n = 0
    for ell in plane.lines_through[p]:
        if plane.line_masks[ell] & bits == low:
            n += 1
    return n


def critical_tangent_count(s: PointSet, p: int) -> int:
    """Tangents at a critical point of a blocking set.

    Requires s blocking, p in s, and s minus p not blocking; the returned
    count is checked against the floor 2q+1-|S| implied by the affine
    blocking bound.
    """
    plane = s.plane
    if not s.contains(p):
        raise ValueError("p must belong to s")
    if not plane.is_blocking_mask(s.bits):
        raise ValueError("s must be blocking")
    if plane.is_blocking_mask(s.bits & ~(1 << p)):
        raise ValueError("s minus p must fail to block")
    n = tangent_count(plane, s.bits, p)
    floor = 2 * plane.q + 1 - s.size()
    if n < floor:
        raise AssertionError(
            f"critical point has {n} tangents < floor {floor}")
    return n


# ---------------------------------------------------------------------------
# census
# ---------------------------------------------------------------------------

@dataclass
class CensusTable:
    """Counts of blocking / minimal blocking sets by size.

    rows maps k to (number of blocking sets of size k, number of minimal
    blocking sets of size k).  wall_time is informational only and is never
    serialized, keeping censuses byte-identical across runs.
    """

    q: int
    k_max: int
    rows: dict[int, tuple[int, int]]
    method: str
    wall_time: float = 0.0

    def blocking(self, k: int) -> int:
        return self.rows.get(k, (0, 0))[0]

    def minimal(self, k: int) -> int:
        return self.rows.get(k, (0, 0))[1]

    def to_rows(self) -> list[dict]:
        return [
            {"q": self.q, "k": k, "blocking_count": b,
             "minimal_count": m, "method": self.method}
            for k, (b, m) in sorted(self.rows.items())
        ]


def census_blocking(plane: Plane, k_max: int, *,
                    budget: int = DEFAULT_SUBSET_BUDGET,
                    threads: int = 1) -> CensusTable:
    """Exact counts of blocking and minimal blocking sets of size <= k_max.

    Lexicographic subset enumeration with prefix pruning: a prefix is
    abandoned once the unblocked lines outnumber (remaining picks)*(q+1),
    since a new point blocks at most q+1 new lines.  Partitioning by first
    point makes parallel runs merge by addition, independent of the worker
    count.  Refuses (rather than truncates) when C(n, k_max) exceeds the
    budget.
    """
    n = plane.n_points
    if comb(n, k_max) > budget:
        raise BudgetExceeded(
            f"census over C({n},{k_max}) = {comb(n, k_max)} subsets exceeds "
            f"budget {budget}; raise the budget to force the search")
    start = time.perf_counter()

    def worker(first: int) -> dict[int, list[int]]:
        local: dict[int, list[int]] = {}
        _census_dfs(plane, (1 << first), first + 1, k_max, local)
        return local

    rows: dict[int, list[int]] = {k: [0, 0] for k in range(k_max + 1)}
    if plane.is_blocking_mask(0):  # vacuously false for any q >= 2
        rows[0] = [1, 0]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for local in pool.map(worker, range(n)):
                for k, (b, m) in local.items():
                    rows[k][0] += b
                    rows[k][1] += m
    else:
        for first in range(n):
            local = worker(first)
            for k, (b, m) in local.items():
                rows[k][0] += b
                rows[k][1] += m
    table = CensusTable(
        q=plane.q, k_max=k_max,
        rows={k: (b, m) for k, (b, m) in rows.items()},
        method="exhaustive",
        wall_time=time.perf_counter() - start)
    for k in range(min(plane.q, k_max) + 1):
        if table.blocking(k) != 0:
            raise AssertionError(f"blocking set smaller than a line at k={k}")
    return table


def _census_dfs(plane: Plane, bits: int, next_point: int, k_max: int,
                rows: dict[int, list[int]]) -> None:
    size = bits.bit_count()
    unblocked = plane.missed_count(bits)
    if unblocked == 0:
        row = rows.setdefault(size, [0, 0])
        row[0] += 1
        if _all_points_tangent(plane, bits):
            row[1] += 1
    if size == k_max:
        return
    # prune: each new point blocks at most q+1 new lines
    if unblocked > (k_max - size) * (plane.q + 1):
        return
    for p in range(next_point, plane.n_points):
        _census_dfs(plane, bits | (1 << p), p + 1, k_max, rows)


def collect_blocking_sets(plane: Plane, k_max: int, *,
                          budget: int = DEFAULT_SUBSET_BUDGET) -> list[int]:
    """Bitmasks of every blocking set of size <= k_max, lexicographic order."""
    n = plane.n_points
    if comb(n, k_max) > budget:
        raise BudgetExceeded(f"C({n},{k_max}) exceeds budget {budget}")
    out: list[int] = []

    def dfs(bits: int, next_point: int) -> None:
        size = bits.bit_count()
        unblocked = plane.missed_count(bits)
        if unblocked == 0:
            out.append(bits)
        if size == k_max:
            return
        if unblocked > (k_max - size) * (plane.q + 1):
            return
        for p in range(next_point, n):
            dfs(bits | (1 << p), p + 1)

    dfs(0, 0)
    return out


# ---------------------------------------------------------------------------
# minimal blocking subsets
# ---------------------------------------------------------------------------

def min_blocking_subset_size(s: PointSet) -> int | None:
    """Size of the smallest blocking subset of s, or None if s not blocking."""
    plane = s.plane
    if not plane.is_blocking_mask(s.bits):
        return None
    ids = s.ids()
    for k in range(plane.q + 1, len(ids) + 1):
        if _exists_blocking_subset(plane, ids, k):
            return k
    raise AssertionError("unreachable: s itself is blocking")


def _exists_blocking_subset(plane: Plane, ids: list[int], k: int) -> bool:
    qp1 = plane.q + 1

    def dfs(bits: int, start: int, picks_left: int) -> bool:
        unblocked = plane.missed_count(bits)
        if unblocked == 0:
            return True
        if picks_left == 0 or unblocked > picks_left * qp1:
            return False
        for i in range(start, len(ids) - picks_left + 1):
            if dfs(bits | (1 << ids[i]), i + 1, picks_left - 1):
                return True
        return False

    return dfs(0, 0, k)


def minimal_blocking_subsets(s: PointSet) -> list[PointSet]:
    """All minimal blocking subsets of s (exhaustive over subsets of s)."""
    plane = s.plane
    ids = s.ids()
    found: list[int] = []

    def dfs(bits: int, start: int) -> None:
        if plane.is_blocking_mask(bits):
            if _all_points_tangent(plane, bits):
                found.append(bits)
            return  # supersets of a blocking set are never minimal
        remaining = len(ids) - start
        if plane.missed_count(bits) > remaining * (plane.q + 1):
            return
        for i in range(start, len(ids)):
            dfs(bits | (1 << ids[i]), i + 1)

    dfs(0, 0)
    return [PointSet(plane, b) for b in found]


def unique_minimal_witness(s: PointSet) -> PointSet:
    """The unique minimal blocking subset of a blocking set of size <= 2q.

    Exhausts all minimal blocking subsets; two or more would falsify a
    proven uniqueness statement at this q and raise UniquenessViolation.
    """
    plane = s.plane
    if s.size() > 2 * plane.q:
        raise ValueError("uniqueness guarantee needs |S| <= 2q")
    if not plane.is_blocking_mask(s.bits):
        raise ValueError("s is not blocking")
    witnesses = minimal_blocking_subsets(s)
    if len(witnesses) != 1:
        raise UniquenessViolation(
            f"blocking set of size {s.size()} <= 2q={2*plane.q} has "
            f"{len(witnesses)} minimal blocking subsets: "
            f"{[w.ids() for w in witnesses]}")
    return witnesses[0]


# ---------------------------------------------------------------------------
# suit classes
# ---------------------------------------------------------------------------

class SuitClass(enum.Flag):
    """How close a point set is to a small (< 2q points) blocking set."""

    NONE = 0
    SPADE = enum.auto()    # itself a blocking set of size < 2q
    CLUB = enum.auto()     # one added point away from one
    DIAMOND = enum.auto()  # no small blocking set within one added point


@dataclass
class SuitReport:
    """Full membership report; classes may overlap."""

    flags: SuitClass
    club_witness: PointSet | None = None

    @property
    def spade(self) -> bool:
        return bool(self.flags & SuitClass.SPADE)

    @property
    def club(self) -> bool:
        return bool(self.flags & SuitClass.CLUB)

    @property
    def diamond(self) -> bool:
        return bool(self.flags & SuitClass.DIAMOND)

    def labels(self) -> str:
        parts = [name for name, on in
                 (("spade", self.spade), ("club", self.club),
                  ("diamond", self.diamond)) if on]
        return "+".join(parts) if parts else "none"


class SmallBlockingIndex:
    """All blocking sets of size < 2q for one plane, cached as bitmasks."""

    def __init__(self, plane: Plane, budget: int = DEFAULT_SUBSET_BUDGET):
        self.plane = plane
        self.masks = collect_blocking_sets(plane, 2 * plane.q - 1,
                                           budget=budget)
        self._arr = None

    def as_array(self):
        import numpy as np
        if self._arr is None:
            if self.plane.n_points > 63:
                raise BudgetExceeded("vectorized suit path needs <= 63 points")
            self._arr = np.array(self.masks, dtype=np.int64)
        return self._arr


_small_index_cache: dict[int, SmallBlockingIndex] = {}


def small_blocking_index(plane: Plane) -> SmallBlockingIndex:
    key = id(plane)
    if key not in _small_index_cache:
        _small_index_cache[key] = SmallBlockingIndex(plane)
    return _small_index_cache[key]


def classify_suit(s: PointSet) -> SuitReport:
    """Spade/club/diamond memberships of s, with a club witness if any."""
    plane = s.plane
    index = small_blocking_index(plane)
    flags = SuitClass.NONE
    if plane.is_blocking_mask(s.bits) and s.size() < 2 * plane.q:
        flags |= SuitClass.SPADE
    club_witness = None
    min_outside = None
    for t in index.masks:
        outside = (t & ~s.bits).bit_count()
        if outside == 1 and club_witness is None:
            club_witness = PointSet(plane, t)
        if min_outside is None or outside < min_outside:
            min_outside = outside
    if club_witness is not None:
        flags |= SuitClass.CLUB
    if min_outside is None or min_outside >= 2:
        flags |= SuitClass.DIAMOND
    return SuitReport(flags=flags, club_witness=club_witness)


def suit_flags_bulk(plane: Plane, masks) -> list[SuitClass]:
    """Vectorized suit classification for many point-set bitmasks."""
    import numpy as np
    index = small_blocking_index(plane).as_array()
    masks = np.asarray(masks, dtype=np.int64)
    out = []
    twoq = 2 * plane.q
    for m in masks:
        outside = np.bitwise_count(np.bitwise_and(index, ~m))
        min_out = int(outside.min()) if outside.size else 99
        flags = SuitClass.NONE
        if min_out >= 2:
            flags |= SuitClass.DIAMOND
        if (outside == 1).any():
            flags |= SuitClass.CLUB
        pm = int(m)
        if pm.bit_count() < twoq and plane.is_blocking_mask(pm):
            flags |= SuitClass.SPADE
        out.append(flags)
    return out


def missed_lines_floor(flags: SuitClass, size: int, q: int) -> int:
    """The proven lower bound on |M_S| for the given suit memberships."""
    if flags & SuitClass.DIAMOND:
        return max(0, 2 * (2 * q - 1 - size))
    if flags & SuitClass.CLUB:
        return max(0, 2 * q - size)
    return 0


# ---------------------------------------------------------------------------
# affine blocking floor (branch and bound)
# ---------------------------------------------------------------------------

def jamison_min_affine(plane: Plane, linf: int,
                       budget_nodes: int = 10_000_000) -> int:
    """Exact minimum size of a blocking set of AG(2,q) = PG(2,q) minus linf.

    Iterative deepening branch and bound: branch on the lowest-ID uncovered
    line, trying each of its q points.  The result must equal 2q-1.
    """
    affine = plane.affine_view(linf)
    q = plane.q
    masks = affine.line_masks
    n_lines = len(masks)
    point_cover = [0] * affine.n_points
    for j, mask in enumerate(masks):
        for k in _mask_ids(mask):
            point_cover[k] |= 1 << j
    full = (1 << n_lines) - 1
    nodes = 0

    def feasible(depth_left: int, covered: int, min_point: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > budget_nodes:
            raise BudgetExceeded("affine branch-and-bound budget exceeded")
        if covered == full:
            return True
        if depth_left == 0:
            return False
        uncovered = (full & ~covered).bit_count()
        if uncovered > depth_left * (q + 1):
            return False
        branch = (full & ~covered)
        line = (branch & -branch).bit_length() - 1
        for k in _mask_ids(masks[line]):
            if feasible(depth_left - 1, covered | point_cover[k], 0):
                return True
        return False

    for size in range(1, 2 * q):
        if feasible(size, 0, 0):
            return size
    return 2 * q - 1 if feasible(2 * q - 1, 0, 0) else 2 * q


def _mask_ids(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


# ---------------------------------------------------------------------------
# greedy completion
# ---------------------------------------------------------------------------

@dataclass
class CompletionTrace:
    """Trace of the greedy line-covering procedure.

    greedy_stages lists (point id, missed lines covered) in pick order;
    after the greedy phase the x still-missed lines share common_point, and
    one non-common point is added on each of them except kept_line.  The
    initial missed count m satisfies m >= max(2, x) * k + x, which is
    asserted on every run.
    """

    start_missed: int
    greedy_stages: list[tuple[int, int]]
    x: int
    common_point: int | None
    kept_line: int | None
    closing_points: list[int]
    added: list[int] = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.greedy_stages)


def greedy_completion(s: PointSet) -> tuple[list[int], CompletionTrace]:
    """Cover missed lines greedily until the remainder is concurrent.

    Repeatedly adds the point lying on the most currently-missed lines
    (ties to the least point ID) until the missed lines share a common
    point; then adds one point (not the common one) on each remaining line
    but one.  The completed set blocks every line except kept_line.
    """
    plane = s.plane
    if plane.is_blocking_mask(s.bits):
        raise ValueError("s is already blocking")
    bits = s.bits
    missed = [ell for ell in range(plane.n_lines)
              if plane.line_masks[ell] & bits == 0]
    m = len(missed)
    stages: list[tuple[int, int]] = []
    added: list[int] = []

    def common_points(lines: list[int]) -> int:
        acc = plane.all_points_mask
        for ell in lines:
            acc &= plane.line_masks[ell]
        return acc

    while missed and common_points(missed) == 0:
        best_p, best_cover = -1, -1
        for p in range(plane.n_points):
            if (bits >> p) & 1:
                continue
            cover = sum(1 for ell in missed
                        if (plane.line_masks[ell] >> p) & 1)
            if cover > best_cover:
                best_p, best_cover = p, cover
        bits |= 1 << best_p
        added.append(best_p)
        stages.append((best_p, best_cover))
        missed = [ell for ell in missed
                  if plane.line_masks[ell] & (1 << best_p) == 0]

    x = len(missed)
    common = common_points(missed)
    common_point = (common & -common).bit_length() - 1 if common else None
    kept_line = missed[-1] if missed else None
    closing: list[int] = []
    for ell in missed[:-1]:
        for p in plane.points_on[ell]:
            if p != common_point and not (bits >> p) & 1:
                closing.append(p)
                bits |= 1 << p
                added.append(p)
                break

    k = len(stages)
    if m < max(2, x) * k + x:
        raise AssertionError(
            f"greedy trace violates m >= max(2,x)k+x: m={m}, k={k}, x={x}")
    still_missed = [ell for ell in range(plane.n_lines)
                    if plane.line_masks[ell] & bits == 0]
    if still_missed != ([kept_line] if kept_line is not None else []):
        raise AssertionError("completion must block all lines but kept_line")
    trace = CompletionTrace(
        start_missed=m, greedy_stages=stages, x=x,
        common_point=common_point, kept_line=kept_line,
        closing_points=closing, added=added)
    return added, trace


# ---------------------------------------------------------------------------
# ceilings on minimal blocking set counts
# ---------------------------------------------------------------------------

def bound_f(k: int, q: int) -> Fraction:
    """Binomial-ratio ceiling C(q^2+q+1, 2k-2q) / C(k, 2k-2q) on B_k."""
    if not q <= k <= 2 * q:
        raise ValueError(f"k={k} outside [q, 2q] for q={q}")
    j = 2 * k - 2 * q
    return Fraction(comb(q * q + q + 1, j), comb(k, j))


def bound_exp(k: int, q: int) -> Fraction:
    """Exponential ceiling ((e/2) q)^(2k-2q), with e's upper rational bracket."""
    if not q + 1 <= k <= 2 * q:
        raise ValueError(f"k={k} outside [q+1, 2q] for q={q}")
    return (E_UPPER / 2 * q) ** (2 * k - 2 * q)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def census_to_csv(table: CensusTable, path: str) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.DictWriter(
            fh, fieldnames=["q", "k", "blocking_count", "minimal_count",
                            "method"])
        writer.writeheader()
        for row in table.to_rows():
            writer.writerow(row)


def bounds_report(table: CensusTable) -> dict:
    """JSON-able comparison of the census against both ceilings."""
    q = table.q
    rows = []
    for k in range(q, min(table.k_max, 2 * q) + 1):
        b_k = table.minimal(k)
        f_k = bound_f(k, q)
        entry = {
            "k": k,
            "minimal_count": b_k,
            "f_bound": f"{f_k.numerator}/{f_k.denominator}",
            "within_f": b_k <= f_k,
        }
        if k >= q + 1:
            e_k = bound_exp(k, q)
            entry["exp_bound"] = f"{e_k.numerator}/{e_k.denominator}"
            entry["within_exp"] = b_k < e_k
        rows.append(entry)
    return {"version": 1, "q": q, "rows": rows}
