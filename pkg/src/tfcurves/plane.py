"""The projective plane PG(2,q) as an immutable incidence structure.

Points are canonical homogeneous triples of field indices: each triple is
scaled so that its first nonzero coordinate (scanning x, then y, then z)
equals 1, and point IDs are assigned by lexicographic order of the canonical
triples.  Lines carry dual triples with the same normalization; incidence is
vanishing of the dot product.

Subsets of points and lines are bit-indexed: a PointSet/LineSet stores a
single Python int whose bit i is the membership of ID i.  All incidence
queries reduce to integer bit operations.

A Plane is immutable after construction and safe to share across concurrent
workers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .gf import FieldSpec, build_field, factor_prime_power

PLANE_CACHE_VERSION = 1


# ---------------------------------------------------------------------------
# point/line subsets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointSet:
    """Bit-indexed subset of the points of a plane."""

    plane: "Plane"
    bits: int

    @staticmethod
    def from_ids(plane: "Plane", ids) -> "PointSet":
        bits = 0
        for i in ids:
            if not 0 <= i < plane.n_points:
                raise ValueError(f"point id {i} out of range")
            bits |= 1 << i
        return PointSet(plane, bits)

    def ids(self) -> list[int]:
        return _bit_ids(self.bits)

    def size(self) -> int:
        return self.bits.bit_count()

    def contains(self, i: int) -> bool:
        return (self.bits >> i) & 1 == 1

    def with_point(self, i: int) -> "PointSet":
        return PointSet(self.plane, self.bits | (1 << i))

    def without_point(self, i: int) -> "PointSet":
        return PointSet(self.plane, self.bits & ~(1 << i))

    def __len__(self) -> int:
        return self.size()


@dataclass(frozen=True)
class LineSet:
    """Bit-indexed subset of the lines of a plane."""

    plane: "Plane"
    bits: int

    def ids(self) -> list[int]:
        return _bit_ids(self.bits)

    def size(self) -> int:
        return self.bits.bit_count()

    def __len__(self) -> int:
        return self.size()


def _bit_ids(bits: int) -> list[int]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return out


# ---------------------------------------------------------------------------
# plane construction
# ---------------------------------------------------------------------------

def _canonical_triples(q: int) -> list[tuple[int, int, int]]:
    # first nonzero coordinate equals 1 scanning x,y,z; lex-sorted as built
    out = [(0, 0, 1)]
    out += [(0, 1, z) for z in range(q)]
    out += [(1, y, z) for y in range(q) for z in range(q)]
    out.sort()
    return out


class Plane:
    """PG(2,q): canonical points and lines plus bit-indexed incidence."""

    __slots__ = (
        "spec", "q", "n_points", "n_lines", "points", "lines",
        "point_id", "line_id", "line_masks", "point_line_masks",
        "points_on", "lines_through", "all_points_mask", "all_lines_mask",
        "_join", "_meet",
    )

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        q = spec.q
        self.q = q
        n = q * q + q + 1
        self.n_points = n
        self.n_lines = n
        self.points = tuple(_canonical_triples(q))
        self.lines = tuple(_canonical_triples(q))
        self.point_id = {t: i for i, t in enumerate(self.points)}
        self.line_id = {t: i for i, t in enumerate(self.lines)}

        line_masks = []
        points_on = []
        for coeffs in self.lines:
            ids = sorted(self.point_id[pt] for pt in self._solve_line(coeffs))
            mask = 0
            for i in ids:
                mask |= 1 << i
            line_masks.append(mask)
            points_on.append(tuple(ids))
        self.line_masks = tuple(line_masks)
        self.points_on = tuple(points_on)

        point_line_masks = [0] * n
        lines_through = [[] for _ in range(n)]
        for ell, ids in enumerate(points_on):
            for i in ids:
                point_line_masks[i] |= 1 << ell
                lines_through[i].append(ell)
        self.point_line_masks = tuple(point_line_masks)
        self.lines_through = tuple(tuple(ls) for ls in lines_through)

        self.all_points_mask = (1 << n) - 1
        self.all_lines_mask = (1 << n) - 1
        self._join = None
        self._meet = None

    # -- coordinate helpers ------------------------------------------------

    def normalize(self, v: tuple[int, int, int]) -> tuple[int, int, int]:
        """Scale so the first nonzero coordinate (x,y,z scan) is 1."""
        gf = self.spec
        for c in v:
            if c != 0:
                if c == 1:
                    return tuple(v)
                s = gf.inv(c)
                return tuple(gf.mul(s, x) for x in v)
        raise ValueError("zero vector has no projective class")

    def _solve_line(self, coeffs: tuple[int, int, int]):
        """The q+1 canonical points on the line a.x + b.y + c.z = 0."""
        gf = self.spec
        a, b, c = coeffs
        if a != 0:
            ia = gf.inv(a)
            u = (gf.neg(gf.mul(ia, b)), 1, 0)
            v = (gf.neg(gf.mul(ia, c)), 0, 1)
        elif b != 0:
            ib = gf.inv(b)
            u = (1, 0, 0)
            v = (0, gf.neg(gf.mul(ib, c)), 1)
        else:
            u = (1, 0, 0)
            v = (0, 1, 0)
        pts = {self.normalize(v)}
        for t in range(self.q):
            w = tuple(gf.add(x, gf.mul(t, y)) for x, y in zip(u, v))
            pts.add(self.normalize(w))
        if len(pts) != self.q + 1:
            raise AssertionError("line does not carry q+1 points")
        return pts

    def _cross(self, u, v) -> tuple[int, int, int]:
        gf = self.spec
        return (
            gf.sub(gf.mul(u[1], v[2]), gf.mul(u[2], v[1])),
            gf.sub(gf.mul(u[2], v[0]), gf.mul(u[0], v[2])),
            gf.sub(gf.mul(u[0], v[1]), gf.mul(u[1], v[0])),
        )

    # -- incidence queries ---------------------------------------------------

    def incident(self, point: int, line: int) -> bool:
        return (self.line_masks[line] >> point) & 1 == 1

    def line_through(self, p: int, q: int) -> int:
        """The unique line through two distinct points."""
        if p == q:
            raise ValueError("line_through requires distinct points")
        coeffs = self.normalize(self._cross(self.points[p], self.points[q]))
        return self.line_id[coeffs]

    def meet(self, l1: int, l2: int) -> int:
        """The unique point on two distinct lines."""
        if l1 == l2:
            raise ValueError("meet requires distinct lines")
        pt = self.normalize(self._cross(self.lines[l1], self.lines[l2]))
        return self.point_id[pt]

    def join_table(self):
        """Dense line_through lookup (built lazily; None on the diagonal)."""
        if self._join is None:
            n = self.n_points
            table = [[0] * n for _ in range(n)]
            for ell, ids in enumerate(self.points_on):
                for p, q in itertools.combinations(ids, 2):
                    table[p][q] = ell
                    table[q][p] = ell
            self._join = table
        return self._join

    def meet_table(self):
        if self._meet is None:
            n = self.n_lines
            table = [[0] * n for _ in range(n)]
            for p, ells in enumerate(self.lines_through):
                for l1, l2 in itertools.combinations(ells, 2):
                    table[l1][l2] = p
                    table[l2][l1] = p
            self._meet = table
        return self._meet

    # -- point sets ----------------------------------------------------------

    def point_set(self, ids=()) -> PointSet:
        return PointSet.from_ids(self, ids)

    def missed_lines(self, s: PointSet) -> LineSet:
        """All lines containing no point of s."""
        bits = 0
        sb = s.bits
        for ell, mask in enumerate(self.line_masks):
            if mask & sb == 0:
                bits |= 1 << ell
        return LineSet(self, bits)

    def missed_count(self, bits: int) -> int:
        n = 0
        for mask in self.line_masks:
            if mask & bits == 0:
                n += 1
        return n

    def is_blocking(self, s: PointSet) -> bool:
        """True iff s meets every line."""
        sb = s.bits
        return all(mask & sb for mask in self.line_masks)

    def is_blocking_mask(self, bits: int) -> bool:
        return all(mask & bits for mask in self.line_masks)

    # -- line parametrization -------------------------------------------------

    def parametrize_line(self, ell: int) -> tuple[int, int]:
        """The two least-ID points (A, B) on the line.

        (s:t) -> s*A + t*B enumerates the q+1 points bijectively when (s:t)
        runs over the canonical parameter classes (0:1), (1:0), (1:1), ...
        """
        ids = self.points_on[ell]
        return ids[0], ids[1]

    def parameter_classes(self) -> list[tuple[int, int]]:
        """Canonical (s:t) representatives in lexicographic order."""
        return [(0, 1)] + [(1, t) for t in range(self.q)]

    def line_point_at(self, a: int, b: int, s: int, t: int) -> int:
        """The point s*A + t*B for points with ids a, b."""
        gf = self.spec
        pa, pb = self.points[a], self.points[b]
        w = tuple(gf.add(gf.mul(s, x), gf.mul(t, y)) for x, y in zip(pa, pb))
        return self.point_id[self.normalize(w)]

    # -- affine restriction ----------------------------------------------------

    def affine_view(self, linf: int) -> "AffinePlane":
        return AffinePlane(self, linf)

    # -- Baer subplanes ---------------------------------------------------------

    def enumerate_baer_subplanes(self) -> list[PointSet]:
        """All subplanes of order sqrt(q), for q = p^2.

        Strategy: any four points in general position generate, by closing
        under joins and meets, the subplane coordinatized by the prime
        subfield, which for q = p^2 is exactly a Baer subplane.  Quadruples
        are scanned in lexicographic order and skipped once covered by an
        already-found subplane, so each subplane's closure runs once.  The
        resulting count is checked against (q^3 + q^(3/2))(q + 1).
        """
        q = self.q
        if self.spec.r % 2 != 0:
            raise ValueError("Baer subplanes require square q")
        if self.spec.r != 2:
            # closure of a quadrangle yields the prime-subfield plane, which
            # is Baer only when r = 2; other even r would need bigger seeds
            raise NotImplementedError(
                "Baer enumeration is implemented for q = p^2 only")
        root = self.spec.p
        target_size = q + root + 1
        expected = (q**3 + q * root) * (q + 1)

        join = self.join_table()
        n = self.n_points
        found: list[int] = []
        covered: set[int] = set()

        def quad_key(a, b, c, d) -> int:
            return ((a * n + b) * n + c) * n + d

        full = self.all_points_mask
        for p1 in range(n):
            for p2 in range(p1 + 1, n):
                l12mask = self.line_masks[join[p1][p2]]
                for p3 in range(p2 + 1, n):
                    if (l12mask >> p3) & 1:
                        continue
                    tri = l12mask | self.line_masks[join[p1][p3]] \
                        | self.line_masks[join[p2][p3]]
                    allowed = full & ~tri & ~((1 << (p3 + 1)) - 1)
                    while allowed:
                        low = allowed & -allowed
                        allowed ^= low
                        p4 = low.bit_length() - 1
                        if quad_key(p1, p2, p3, p4) in covered:
                            continue
                        plane_mask = self._close_quadrangle(p1, p2, p3, p4)
                        if plane_mask.bit_count() != target_size:
                            raise AssertionError(
                                "quadrangle closure is not a Baer subplane")
                        found.append(plane_mask)
                        self._mark_quadrangles(plane_mask, covered, quad_key)
        if len(found) != expected:
            raise AssertionError(
                f"Baer subplane count {len(found)} != expected {expected}")
        return [PointSet(self, m) for m in found]

    def _close_quadrangle(self, p1, p2, p3, p4) -> int:
        join = self.join_table()
        meet = self.meet_table()
        pts = {p1, p2, p3, p4}
        while True:
            lines = set()
            for a, b in itertools.combinations(sorted(pts), 2):
                lines.add(join[a][b])
            new_pts = set(pts)
            for l1, l2 in itertools.combinations(sorted(lines), 2):
                new_pts.add(meet[l1][l2])
            if new_pts == pts:
                break
            pts = new_pts
        mask = 0
        for p in pts:
            mask |= 1 << p
        return mask

    def _mark_quadrangles(self, plane_mask: int, covered: set, quad_key) -> None:
        ids = _bit_ids(plane_mask)
        join = self.join_table()
        masks = self.line_masks
        for a, b, c, d in itertools.combinations(ids, 4):
            # general position: no 3 of the 4 collinear
            lab = masks[join[a][b]]
            if (lab >> c) & 1 or (lab >> d) & 1:
                continue
            if (masks[join[a][c]] >> d) & 1 or (masks[join[b][c]] >> d) & 1:
                continue
            covered.add(quad_key(a, b, c, d))

    # -- axioms -----------------------------------------------------------------

    def check_axioms(self, dual: bool = False) -> None:
        """Exhaustive incidence axioms; raises AssertionError on violation.

        With dual=True the transposed incidence structure is checked
        (points as lines and vice versa), which verifies self-duality.
        """
        q = self.q
        n = self.n_points
        if dual:
            masks = self.point_line_masks
            through = [self.line_masks[i] for i in range(n)]
        else:
            masks = self.line_masks
            through = [self.point_line_masks[i] for i in range(n)]
        if len(masks) != q * q + q + 1:
            raise AssertionError("wrong number of lines")
        for mask in masks:
            if mask.bit_count() != q + 1:
                raise AssertionError("line degree != q+1")
        for mask in through:
            if mask.bit_count() != q + 1:
                raise AssertionError("point degree != q+1")
        for i in range(n):
            for j in range(i + 1, n):
                if (masks[i] & masks[j]).bit_count() != 1:
                    raise AssertionError("two lines must meet in one point")
        for i in range(n):
            for j in range(i + 1, n):
                if (through[i] & through[j]).bit_count() != 1:
                    raise AssertionError("two points must span one line")

    def __repr__(self) -> str:
        return f"Plane(q={self.q})"


# ---------------------------------------------------------------------------
# affine restriction AG(2,q)
# ---------------------------------------------------------------------------

class AffinePlane:
    """AG(2,q): the plane minus a designated line at infinity.

    Affine points are re-indexed 0..q^2-1 (by increasing projective ID);
    each affine line is the restriction of a projective line != linf to its
    q points off linf, stored as a bitmask over the affine indexing.
    """

    __slots__ = ("plane", "linf", "point_ids", "index_of", "line_ids", "line_masks")

    def __init__(self, plane: Plane, linf: int):
        if not 0 <= linf < plane.n_lines:
            raise ValueError("invalid line id")
        self.plane = plane
        self.linf = linf
        inf_mask = plane.line_masks[linf]
        self.point_ids = tuple(i for i in range(plane.n_points)
                               if not (inf_mask >> i) & 1)
        self.index_of = {p: k for k, p in enumerate(self.point_ids)}
        line_ids = []
        line_masks = []
        for ell in range(plane.n_lines):
            if ell == linf:
                continue
            mask = 0
            for p in plane.points_on[ell]:
                k = self.index_of.get(p)
                if k is not None:
                    mask |= 1 << k
            if mask.bit_count() != plane.q:
                raise AssertionError("affine line must have q points")
            line_ids.append(ell)
            line_masks.append(mask)
        self.line_ids = tuple(line_ids)
        self.line_masks = tuple(line_masks)

    @property
    def n_points(self) -> int:
        return len(self.point_ids)

    @property
    def n_lines(self) -> int:
        return len(self.line_masks)


# ---------------------------------------------------------------------------
# construction + cache
# ---------------------------------------------------------------------------

def build_plane(spec_or_q, cache_dir=None) -> Plane:
    """Build PG(2,q) from a FieldSpec or an order q.

    With cache_dir set, a previously saved plane for the same (p, r) is
    loaded instead of rebuilt, and a fresh build is saved for next time.
    """
    if isinstance(spec_or_q, FieldSpec):
        spec = spec_or_q
    else:
        p, r = factor_prime_power(int(spec_or_q))
        spec = build_field(p, r)
    if cache_dir is not None:
        import os
        path = os.path.join(str(cache_dir), f"pg2_{spec.p}_{spec.r}.plane")
        if os.path.exists(path):
            return load_plane(path)
        plane = Plane(spec)
        os.makedirs(str(cache_dir), exist_ok=True)
        save_plane(plane, path)
        return plane
    return Plane(spec)


def save_plane(plane: Plane, path: str) -> None:
    """Dump a plane to a deterministic, platform-independent text format.

    Format (one record per line):
      tfcurves-plane <version>
      field <p> <r> <modulus coeffs, low degree first>
      point <x> <y> <z>     (n_points records, in ID order)
      line <a> <b> <c> <incidence mask as lowercase hex>
    """
    out = [f"tfcurves-plane {PLANE_CACHE_VERSION}",
           "field {} {} {}".format(
               plane.spec.p, plane.spec.r,
               " ".join(str(c) for c in plane.spec.modulus))]
    for x, y, z in plane.points:
        out.append(f"point {x} {y} {z}")
    for (a, b, c), mask in zip(plane.lines, plane.line_masks):
        out.append(f"line {a} {b} {c} {mask:x}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


def load_plane(path: str) -> Plane:
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    header = lines[0].split()
    if header[:1] != ["tfcurves-plane"] or int(header[1]) != PLANE_CACHE_VERSION:
        raise ValueError(f"unsupported plane cache header: {lines[0]!r}")
    field_rec = lines[1].split()
    p, r = int(field_rec[1]), int(field_rec[2])
    modulus = tuple(int(c) for c in field_rec[3:])
    plane = Plane(build_field(p, r))
    if plane.spec.modulus != modulus:
        raise ValueError("cached modulus differs from canonical modulus")
    # verify the dump matches the deterministic rebuild bit for bit
    idx = 2
    for i in range(plane.n_points):
        rec = lines[idx + i].split()
        if tuple(int(v) for v in rec[1:4]) != plane.points[i]:
            raise ValueError(f"cached point {i} differs from canonical build")
    idx += plane.n_points
    for i in range(plane.n_lines):
        rec = lines[idx + i].split()
        if tuple(int(v) for v in rec[1:4]) != plane.lines[i] or \
                int(rec[4], 16) != plane.line_masks[i]:
            raise ValueError(f"cached line {i} differs from canonical build")
    return plane
