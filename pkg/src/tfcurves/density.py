"""Exact rational densities and bounds for non-transverse curve families.

Everything here is closed-form arithmetic over exact rationals: the
per-point/per-line local densities expressed through the zeta product, an
evaluator for expressions already in split form (finite disjoint unions of
products of simple conditions over disjoint supports), and the interval
machinery around the density of transverse-free curves.

Upper-bound formulas involving Euler's number use the rational bracket
2718281828/10^9 < e < 2718281829/10^9 (upper end), and irrational exponents
are rounded in whichever direction enlarges the bound, so every inequality
asserted downstream is rigorous in exact arithmetic.
"""

from __future__ import annotations

import decimal
import enum
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .plane import Plane

E_LOWER = Fraction(2_718_281_828, 10**9)
E_UPPER = Fraction(2_718_281_829, 10**9)


def is_perfect_square(q: int) -> bool:
    s = isqrt(q)
    return s * s == q


def floor_cbrt(n: int) -> int:
    """Exact integer cube root (floor) of a nonnegative integer."""
    if n < 0:
        raise ValueError("negative argument")
    k = round(n ** (1.0 / 3.0))
    while k**3 > n:
        k -= 1
    while (k + 1) ** 3 <= n:
        k += 1
    return k


def prime_powers_upto(limit: int) -> list[int]:
    out = []
    for q in range(2, limit + 1):
        p = 2
        while p * p <= q and q % p:
            p += 1
        if q % p:
            p = q
        m = q
        while m % p == 0:
            m //= p
        if m == 1:
            out.append(q)
    return out


# ---------------------------------------------------------------------------
# intervals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Bounds:
    lower: Fraction
    upper: Fraction

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"empty interval: {self.lower} > {self.upper}")

    def contains(self, x: Fraction) -> bool:
        return self.lower <= x <= self.upper


# ---------------------------------------------------------------------------
# simple sets in split form
# ---------------------------------------------------------------------------

class Support(enum.Enum):
    """The locus a local condition is supported on."""

    POINT = 0
    LINE = 1
    PLANE = 2

    @property
    def dim(self) -> int:
        return self.value


EMPTY_DIM = -1  # dim of the empty scheme in the encoding below


@dataclass(frozen=True)
class SimpleAtom:
    """One simple condition: smoothness of the intersection with an
    X of dimension dim_x at every closed point of the support (elementary),
    or the difference of two such conditions (complementary, dim_y set).

    dim -1 encodes the empty scheme.  multiplicity means a product of that
    many copies of the condition over pairwise-disjoint supports of the same
    kind, e.g. one atom per rational point of a line.  Optional concrete
    point/line ids let the evaluator validate declared disjointness.
    """

    support: Support
    dim_x: int
    dim_y: int | None = None
    multiplicity: int = 1
    point_id: int | None = None
    line_id: int | None = None

    def __post_init__(self):
        if self.dim_x not in (-1, 0, 1, 2):
            raise ValueError("dim_x must be in {-1,0,1,2}")
        if self.dim_y is not None:
            if self.dim_y not in (-1, 0, 1, 2):
                raise ValueError("dim_y must be in {-1,0,1,2}")
            # complementary needs X containing Y, or X empty (plain complement)
            if self.dim_x != EMPTY_DIM and self.dim_y > self.dim_x:
                raise ValueError("complementary atom needs dim_y <= dim_x")
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")


def zeta_density_linear(m: int, dim_x: int, q: int) -> Fraction:
    """Density of the smooth-intersection condition over a linear U of
    dimension m: the partial zeta product prod_{k=0..m} (1 - q^(k-dim_x-1));
    1 when X is empty (the condition is vacuous)."""
    if m not in (0, 1, 2):
        raise ValueError("support dimension must be 0, 1 or 2")
    if dim_x == EMPTY_DIM:
        return Fraction(1)
    if dim_x not in (0, 1, 2):
        raise ValueError("dim_x must be in {-1,0,1,2}")
    out = Fraction(1)
    for k in range(m + 1):
        out *= 1 - Fraction(1, q ** (dim_x + 1 - k))
    return out


def atom_density(atom: SimpleAtom, q: int) -> Fraction:
    m = atom.support.dim
    if atom.dim_y is None:
        d = zeta_density_linear(m, atom.dim_x, q)
    else:
        d = zeta_density_linear(m, atom.dim_x, q) \
            - zeta_density_linear(m, atom.dim_y, q)
        if d < 0:
            raise ValueError(
                "negative complementary density: malformed containment")
    return d**atom.multiplicity


@dataclass(frozen=True)
class SplitExpr:
    """A finite disjoint union of terms, each a product of simple atoms
    over pairwise-disjoint supports."""

    terms: tuple[tuple[SimpleAtom, ...], ...]

    def validate(self, plane: Plane | None = None) -> None:
        """Check declared disjointness where concrete ids are present."""
        for term in self.terms:
            seen_points = set()
            for atom in term:
                if atom.point_id is not None:
                    if atom.point_id in seen_points:
                        raise ValueError("repeated point support in a term")
                    seen_points.add(atom.point_id)
            if plane is not None:
                for atom in term:
                    if atom.line_id is not None:
                        mask = plane.line_masks[atom.line_id]
                        for p in seen_points:
                            if (mask >> p) & 1:
                                raise ValueError(
                                    "point support lies on a line support")
                lines = [a.line_id for a in term if a.line_id is not None]
                if len(lines) > 1:
                    raise ValueError(
                        "two whole lines always meet; supports not disjoint")


def eval_split(expr: SplitExpr, q: int, plane: Plane | None = None) -> Fraction:
    """Density of a split expression: sum over terms of the product of the
    atom densities (independence over disjoint supports)."""
    expr.validate(plane)
    total = Fraction(0)
    for term in expr.terms:
        prod = Fraction(1)
        for atom in term:
            prod *= atom_density(atom, q)
        total += prod
    return total


def lemma_numbers_partition(q: int) -> tuple[Fraction, Fraction, Fraction]:
    """The three local densities at a rational point: off the curve, smooth
    on the curve with a unique tangent line (all q+1 together), singular."""
    off = atom_density(SimpleAtom(Support.POINT, 0), q)
    tangent = (q + 1) * atom_density(SimpleAtom(Support.POINT, 2, 1), q)
    singular = atom_density(SimpleAtom(Support.POINT, EMPTY_DIM, 2), q)
    return off, tangent, singular


# ---------------------------------------------------------------------------
# line-singularity families
# ---------------------------------------------------------------------------

def singular_point_density(q: int) -> Fraction:
    """Density of curves singular at one fixed rational point: q^-3."""
    return Fraction(1, q**3)


def theta_line_density(q: int) -> Fraction:
    """Density of curves singular along all q+1 rational points of a line."""
    return Fraction(1, q ** (3 * (q + 1)))


def theta_pair_density(q: int) -> Fraction:
    """Same for the union of two distinct lines (2q+1 points)."""
    return Fraction(1, q ** (3 * (2 * q + 1)))


def theta_interval(q: int) -> Bounds:
    """Two-term inclusion-exclusion bracket for the density of curves
    singular along (at least) one full line."""
    lead = (q * q + q + 1) * theta_line_density(q)
    return Bounds(lower=lead * (1 - Fraction(1, q ** (3 * q - 2))), upper=lead)


def theta_exact_small_q(plane: Plane) -> Fraction:
    """Full inclusion-exclusion over all 2^(q^2+q+1) - 1 nonempty line sets.

    Exact density of the union of the per-line singularity families; the
    result is checked against the two-term bracket.
    """
    q = plane.q
    if q > 3:
        raise ValueError("full inclusion-exclusion is budgeted for q <= 3")
    n = plane.n_lines
    masks = plane.line_masks
    # or_mask[J] built from J minus its lowest bit: O(1) per subset
    union = [0] * (1 << n)
    top_exp = 3 * plane.n_points
    scale = q**top_exp
    total = 0
    for j in range(1, 1 << n):
        low_idx = (j & -j).bit_length() - 1
        u = union[j & (j - 1)] | masks[low_idx]
        union[j] = u
        term = scale // q ** (3 * u.bit_count())
        total += term if j.bit_count() & 1 else -term
    result = Fraction(total, scale)
    if not theta_interval(q).contains(result):
        raise AssertionError("exact union density escapes its bracket")
    return result


def resurrected_density(q: int) -> Fraction:
    """Limit density of curves tangent to a fixed line somewhere away from
    a fixed point of it: 1/q."""
    return Fraction(1, q)


def old_upper(q: int) -> Fraction:
    """Coarse ceiling 2 q^-(q+1) on the transverse-free density."""
    return Fraction(2, q ** (q + 1))


def smooth_tf_upper(q: int) -> Fraction:
    """Ceiling on the density of smooth transverse-free curves."""
    smooth = zeta_density_linear(2, 2, q)
    factor = 1 - (1 - Fraction(1, q)) / (1 - Fraction(1, q**3))
    return smooth * factor ** (q * q + q + 1)


# ---------------------------------------------------------------------------
# singularity-conditioned bounds
# ---------------------------------------------------------------------------

def sing_density(s: int, q: int) -> Fraction:
    """Density of curves whose rational singular locus is exactly a fixed
    set of s points: q^-3 per point in, 1 - q^-3 per point out."""
    n = q * q + q + 1
    if not 0 <= s <= n:
        raise ValueError("s out of range")
    return Fraction(1, q**3) ** s * (1 - Fraction(1, q**3)) ** (n - s)


def diamond_bound(s: int, m: int, q: int) -> tuple[Fraction, Fraction]:
    """(sharp, weak) ceilings on the density of transverse-free curves with
    rational singular locus a fixed s-point set missing m lines."""
    n = q * q + q + 1
    if not (0 <= s <= n and 0 <= m <= n):
        raise ValueError("s or m out of range")
    base = sing_density(s, q)
    factor = 1 - ((1 - Fraction(1, q)) * (1 - Fraction(1, q**2))
                  / (1 - Fraction(1, q**3)) ** (q + 1))
    sharp = base * factor**m
    weak = Fraction(1, q) ** (3 * s + m)
    if sharp > weak:
        raise AssertionError("sharp diamond bound exceeds its weakening")
    return sharp, weak


def club_bound(s: int, m: int, q: int) -> tuple[Fraction, Fraction]:
    """(sharp, weak) ceilings for the variant that keeps one marked point
    nonsingular (the 'one point short of blocking' configurations)."""
    n = q * q + q + 1
    if not (0 <= s <= n and 0 <= m <= n):
        raise ValueError("s or m out of range")
    base = Fraction(1, q**3) ** s * (1 - Fraction(1, q**3))
    factor = 1 - ((1 - Fraction(1, q)) * (1 - Fraction(1, q**2))
                  / (1 - Fraction(1, q**3)))
    sharp = base * factor**m
    weak = Fraction(1, q) ** (3 * s) * Fraction(q + 1, q**2) ** m
    if sharp > weak:
        raise AssertionError("sharp club bound exceeds its weakening")
    return sharp, weak


# ---------------------------------------------------------------------------
# the headline interval
# ---------------------------------------------------------------------------

def _baer_count(q: int) -> int:
    s = isqrt(q)
    return (q**3 + q * s) * (q + 1)


def omega_upper(q: int, q_is_square: bool | None = None) -> Fraction:
    """Ceiling on the transverse-free density.

    Three terms: the line families with an exponential penalty (the floor
    of q^(2/3) in the penalty exponent only enlarges the term, since the
    penalty base is < 1), the Baer-subplane families when q is a square,
    and the remainder swept up by the diamond counting bound.
    """
    square = is_perfect_square(q) if q_is_square is None else q_is_square
    if square != is_perfect_square(q):
        raise ValueError("q_is_square contradicts q")
    lead = (q * q + q + 1) * Fraction(1, q ** (3 * (q + 1)))
    penalty_base = E_UPPER**2 / (4 * q)
    if penalty_base >= 1:
        raise AssertionError("penalty base must be < 1 for q >= 2")
    penalty = E_UPPER * penalty_base ** floor_cbrt(q * q)
    total = lead * (1 + penalty)
    if square:
        s = isqrt(q)
        total += _baer_count(q) * Fraction(1, q ** (3 * (q + s + 1)))
    total += E_UPPER ** (q + 2) * Fraction(1, q ** (4 * q - 2))
    return total


def omega_lower(q: int, q_is_square: bool | None = None) -> Fraction:
    """Floor on the transverse-free density from the line families and,
    for square q, the Baer-subplane families."""
    square = is_perfect_square(q) if q_is_square is None else q_is_square
    if square != is_perfect_square(q):
        raise ValueError("q_is_square contradicts q")
    total = (q * q + q + 1) * Fraction(1, q ** (3 * (q + 1))) \
        * (1 - Fraction(1, q ** (3 * q - 2)))
    if square:
        s = isqrt(q)
        # exponent 3q - 3 sqrt(q) - 4 is positive for every square q >= 4
        total += _baer_count(q) * Fraction(1, q ** (3 * (q + s + 1))) \
            * (1 - Fraction(1, q ** (3 * q - 3 * s - 4)))
    return total


def omega_interval(q: int) -> Bounds:
    return Bounds(lower=omega_lower(q), upper=omega_upper(q))


def leading_term(q: int) -> Fraction:
    """The exhibited families' density sum: lines, plus Baer when square."""
    lead = (q * q + q + 1) * Fraction(1, q ** (3 * (q + 1)))
    if is_perfect_square(q):
        s = isqrt(q)
        lead += _baer_count(q) * Fraction(1, q ** (3 * (q + s + 1)))
    return lead


def tbs1_report(q: int) -> dict:
    """Leading term, interval, and endpoint/leading ratios for inspection.

    The envelope constants of the asymptotic statement are unspecified, so
    ratios are reported, not asserted; the sanity flag ratio_brackets_one
    records whether the interval contains the leading term.
    """
    lead = leading_term(q)
    iv = omega_interval(q)
    ratio_lower = iv.lower / lead
    ratio_upper = iv.upper / lead
    return {
        "q": q,
        "leading": lead,
        "lower": iv.lower,
        "upper": iv.upper,
        "ratio_lower": ratio_lower,
        "ratio_upper": ratio_upper,
        "ratio_brackets_one": ratio_lower <= 1 <= ratio_upper,
    }


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def rat_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def rat_decimal(x: Fraction, digits: int = 12) -> str:
    """Decimal approximation to the given significant digits (exact scaling
    through the decimal module; no float underflow for tiny values)."""
    if x == 0:
        return "0"
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        d = decimal.Decimal(x.numerator) / decimal.Decimal(x.denominator)
        return format(d, "e")


def rat_json(x: Fraction) -> dict:
    return {"rat": rat_str(x), "dec": rat_decimal(x)}


def bounds_report(q: int, include_exact_theta: bool = False,
                  plane: Plane | None = None) -> dict:
    """The JSON bound report for one q."""
    theta = theta_interval(q)
    report = {
        "version": 1,
        "q": q,
        "theta": {
            "lower": rat_json(theta.lower),
            "upper": rat_json(theta.upper),
        },
        "omega": {
            "lower": rat_json(omega_lower(q)),
            "upper": rat_json(omega_upper(q)),
        },
        "leading": rat_json(leading_term(q)),
        "smooth_tf_upper": rat_json(smooth_tf_upper(q)),
        "old_upper": rat_json(old_upper(q)),
    }
    t = tbs1_report(q)
    report["ratios"] = {
        "lower_over_leading": rat_json(t["ratio_lower"]),
        "upper_over_leading": rat_json(t["ratio_upper"]),
        "brackets_one": t["ratio_brackets_one"],
    }
    if include_exact_theta:
        if plane is None:
            from .plane import build_plane
            plane = build_plane(q)
        report["theta"]["exact"] = rat_json(theta_exact_small_q(plane))
    return report
