"""Arithmetic for the finite fields GF(p^r).

Field elements are dense integer indices in [0, q).  The index encodes the
coordinate vector of the element in the polynomial basis 1, x, ..., x^(r-1),
written in base p with the constant coefficient as the lowest digit.  Index 0
is the additive identity and index 1 the multiplicative identity; for prime
fields the index is simply the residue.

The reducing modulus is the lexicographically least monic irreducible of
degree r over GF(p), coefficients compared low-degree-first, so element
indices are reproducible across runs and platforms.

Multiplication uses discrete log/antilog tables built from a fixed generator
(always available here since q <= 2^20 < 2^16 holds for every table-backed
field); direct polynomial multiplication with reduction is kept as the
correctness oracle and as the fallback for large q.
"""

from __future__ import annotations

import itertools

FIELD_SIZE_CAP = 1 << 20
TABLE_CAP = 1 << 16


# ---------------------------------------------------------------------------
# polynomials over GF(p), represented as lists of ints, low degree first,
# no trailing zeros ([] is the zero polynomial)
# ---------------------------------------------------------------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _poly_rem(a: list[int], b: list[int], p: int) -> list[int]:
    """Remainder of a modulo b; b must be monic and nonzero."""
    a = list(a)
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        lead = a[-1]
        shift = len(a) - 1 - db
        if lead:
            for j, bj in enumerate(b):
                a[shift + j] = (a[shift + j] - lead * bj) % p
        _trim(a)
        if not a:
            break
        if len(a) - 1 - db == shift:  # leading term already zero
            a.pop()
            _trim(a)
    return _trim(a)


def _poly_eval(a: list[int], x: int, p: int) -> int:
    y = 0
    for c in reversed(a):
        y = (y * x + c) % p
    return y


def _is_irreducible(poly: list[int], p: int) -> bool:
    """Irreducibility over GF(p) for a monic poly of degree >= 1.

    Root search settles degrees <= 3; above that, trial division by every
    monic of degree up to deg/2.
    """
    deg = len(poly) - 1
    if deg == 1:
        return True
    if any(_poly_eval(poly, x, p) == 0 for x in range(p)):
        return False
    if deg <= 3:
        return True
    for d in range(2, deg // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            divisor = list(tail) + [1]
            if not _poly_rem(poly, divisor, p):
                return False
    return True


def _least_irreducible(p: int, r: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree r over GF(p)."""
    for tail in itertools.product(range(p), repeat=r):
        candidate = list(tail) + [1]
        if _is_irreducible(candidate, p):
            return tuple(candidate)
    raise AssertionError("no irreducible polynomial found")  # cannot happen


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# ---------------------------------------------------------------------------
# field specification
# ---------------------------------------------------------------------------

class FieldSpec:
    """Immutable description of GF(p^r) with operation tables.

    Instances are safe to share across workers: all attributes are set once
    at construction and every operation is pure.
    """

    __slots__ = ("p", "r", "q", "modulus", "_exp", "_log", "_digits")

    def __init__(self, p: int, r: int):
        if not _is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if not 1 <= r <= 8:
            raise ValueError(f"r = {r} out of range [1, 8]")
        q = p**r
        if q > FIELD_SIZE_CAP:
            raise ValueError(f"q = {q} exceeds the 2^20 cap")
        self.p = p
        self.r = r
        self.q = q
        self.modulus = _least_irreducible(p, r)
        # digit decomposition of every index, cached for small fields
        if q <= TABLE_CAP:
            self._digits = [self._index_digits(i) for i in range(q)]
            self._build_log_tables()
        else:
            self._digits = None
            self._exp = None
            self._log = None

    # -- representation helpers ------------------------------------------------

    def _index_digits(self, a: int) -> tuple[int, ...]:
        digits = []
        for _ in range(self.r):
            a, d = divmod(a, self.p)
            digits.append(d)
        return tuple(digits)

    def digits(self, a: int) -> tuple[int, ...]:
        """Polynomial-basis coordinates of element a, constant term first."""
        if self._digits is not None:
            return self._digits[a]
        return self._index_digits(a)

    def from_digits(self, digits) -> int:
        a = 0
        for d in reversed(digits):
            a = a * self.p + d
        return a

    # -- arithmetic -------------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.r == 1:
            return (a + b) % self.p
        da, db = self.digits(a), self.digits(b)
        return self.from_digits([(x + y) % self.p for x, y in zip(da, db)])

    def neg(self, a: int) -> int:
        if self.p == 2:
            return a
        if self.r == 1:
            return (-a) % self.p
        return self.from_digits([(-x) % self.p for x in self.digits(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._exp is not None:
            return self._exp[self._log[a] + self._log[b]]
        return self._mul_direct(a, b)

    def _mul_direct(self, a: int, b: int) -> int:
        """Oracle path: polynomial product reduced by the modulus."""
        if self.r == 1:
            return (a * b) % self.p
        prod = _poly_mul(list(self.digits(a)), list(self.digits(b)), self.p)
        rem = _poly_rem(prod, list(self.modulus), self.p)
        return self.from_digits(rem + [0] * (self.r - len(rem)))

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        if self._exp is not None:
            return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            a, n = self.inv(a), -n
        result = 1
        base = a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def scalar(self, n: int) -> int:
        """The image of the integer n in the field (n times the identity)."""
        return n % self.p

    # -- log/antilog construction -------------------------------------------------

    def _build_log_tables(self) -> None:
        q = self.q
        factors = _prime_factors(q - 1)
        g = None
        for cand in range(2, q):
            if all(self._pow_direct(cand, (q - 1) // f) != 1 for f in factors):
                g = cand
                break
        if g is None:  # q == 2: the unit group is trivial, generator is 1
            g = 1
        exp = [0] * (2 * (q - 1))
        log = [0] * q
        acc = 1
        for i in range(q - 1):
            exp[i] = acc
            exp[i + q - 1] = acc
            log[acc] = i
            acc = self._mul_direct(acc, g)
        if acc != 1:
            raise AssertionError("generator order mismatch")
        self._exp = exp
        self._log = log

    def _pow_direct(self, a: int, n: int) -> int:
        result = 1
        base = a
        while n:
            if n & 1:
                result = self._mul_direct(result, base)
            base = self._mul_direct(base, base)
            n >>= 1
        return result

    def generator(self) -> int:
        """A fixed multiplicative generator (the one behind the log table)."""
        if self._exp is not None:
            return self._exp[1] if self.q > 2 else 1
        for cand in range(2, self.q):
            if all(self.pow(cand, (self.q - 1) // f) != 1
                   for f in _prime_factors(self.q - 1)):
                return cand
        return 1

    def frobenius(self, a: int, times: int = 1) -> int:
        """Apply a -> a^p the given number of times (repeated p-th powering)."""
        for _ in range(times):
            a = self.pow(a, self.p)
        return a

    def __repr__(self) -> str:
        return f"FieldSpec(p={self.p}, r={self.r}, q={self.q})"


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def build_field(p: int, r: int) -> FieldSpec:
    """Construct GF(p^r) with the canonical (lex-least) modulus."""
    return FieldSpec(p, r)


def field_for_order(q: int) -> FieldSpec:
    """Construct GF(q), factoring q as p^r; rejects non prime powers."""
    p, r = factor_prime_power(q)
    return FieldSpec(p, r)


def factor_prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise ValueError("q must be a prime power")
    p = 2
    while p * p <= q and q % p != 0:
        p += 1
    if q % p != 0:
        p = q  # q itself prime
    r = 0
    m = q
    while m % p == 0:
        m //= p
        r += 1
    if m != 1:
        raise ValueError(f"q = {q} must be a prime power")
    return p, r


class SubfieldEmbedding:
    """The unique subfield of order sqrt(q) inside GF(q), q a square.

    ``sub`` is GF(p^(r/2)) with its own canonical modulus; ``image[a]`` is
    the element of the big field that a maps to.  The image set equals the
    fixed set of the (r/2)-fold Frobenius a -> a^(p^(r/2)).
    """

    __slots__ = ("spec", "sub", "image")

    def __init__(self, spec: FieldSpec, sub: FieldSpec, image: tuple[int, ...]):
        self.spec = spec
        self.sub = sub
        self.image = image

    def __call__(self, a: int) -> int:
        return self.image[a]


def subfield_embedding(spec: FieldSpec) -> SubfieldEmbedding:
    """Embed GF(p^(r/2)) into GF(p^r); requires even r."""
    if spec.r % 2 != 0:
        raise ValueError("subfield of index 2 requires even r")
    p, h = spec.p, spec.r // 2
    sub = FieldSpec(p, h)
    fixed = sorted(a for a in range(spec.q)
                   if spec.frobenius(a, h) == a)
    if len(fixed) != sub.q:
        raise AssertionError("Frobenius fixed set has wrong size")
    if h == 1:
        # prime subfield: k -> 1 + 1 + ... (k times)
        image = [0] * p
        for k in range(1, p):
            image[k] = spec.add(image[k - 1], 1)
        return SubfieldEmbedding(spec, sub, tuple(image))
    # find the least root of sub's modulus inside the fixed set, then map
    # sum c_i x^i -> sum c_i beta^i
    beta = None
    for a in fixed:
        if _eval_over(spec, sub.modulus, a) == 0:
            beta = a
            break
    if beta is None:
        raise AssertionError("subfield modulus has no root in the fixed set")
    image = []
    for a in range(sub.q):
        acc = 0
        power = 1
        for c in sub.digits(a):
            acc = spec.add(acc, spec.mul(spec.scalar(c), power))
            power = spec.mul(power, beta)
        image.append(acc)
    if sorted(image) != fixed:
        raise AssertionError("embedding image differs from the Frobenius fixed set")
    return SubfieldEmbedding(spec, sub, tuple(image))


def _eval_over(spec: FieldSpec, poly, a: int) -> int:
    """Evaluate a GF(p)-coefficient polynomial at an element of GF(p^r)."""
    y = 0
    for c in reversed(poly):
        y = spec.add(spec.mul(y, a), spec.scalar(c))
    return y
