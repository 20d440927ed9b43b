"""Arithmetic in GF(p^m) in the polynomial basis.

Elements are length-``m`` coefficient tuples, lowest degree first. The
"integer code" of an element (or of a monic modulus without its leading 1)
is ``sum(c_i * p**i)``; both the modulus and the generator are chosen as the
smallest valid candidate in that order, so every FieldSpec is reproducible
without external tables.
"""

from dataclasses import dataclass
from itertools import product

from .errors import DivisionByZero, NotPrime, SubfieldMismatch, TooLarge

MAX_FIELD_ORDER = 2**20


def is_prime(p):
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def prime_factors(n):
    """Distinct prime factors of ``n >= 1`` by trial division."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def prime_power_decomposition(q):
    """Return ``(p, m)`` with ``q == p**m`` and ``p`` prime, else ``None``."""
    if q < 2:
        return None
    factors = prime_factors(q)
    if len(factors) != 1:
        return None
    p = factors[0]
    m = 0
    while q % p == 0:
        q //= p
        m += 1
    return p, m


@dataclass(frozen=True)
class FieldElement:
    coefficients: tuple


@dataclass(frozen=True)
class FieldSpec:
    p: int
    m: int
    modulus: tuple  # m+1 coefficients, lowest degree first, monic
    generator: FieldElement

    @property
    def order(self):
        return self.p**self.m

    def element(self, coefficients):
        c = tuple(int(x) % self.p for x in coefficients)
        if len(c) > self.m:
            raise ValueError(f"element of GF({self.p}^{self.m}) has at most {self.m} coefficients")
        return FieldElement(c + (0,) * (self.m - len(c)))

    def from_int(self, code):
        if not 0 <= code < self.order:
            raise ValueError("integer code out of range")
        digits = []
        for _ in range(self.m):
            code, r = divmod(code, self.p)
            digits.append(r)
        return FieldElement(tuple(digits))

    def to_int(self, x):
        return sum(c * self.p**i for i, c in enumerate(x.coefficients))

    @property
    def zero(self):
        return FieldElement((0,) * self.m)

    @property
    def one(self):
        return FieldElement((1,) + (0,) * (self.m - 1))

    def elements(self):
        return (self.from_int(i) for i in range(self.order))


# -- polynomial helpers over GF(p), lists lowest degree first ---------------

def _trim(a):
    while len(a) > 1 and a[-1] == 0:
        a = a[:-1]
    return a


def _poly_mod(a, b, p):
    """Remainder of ``a`` divided by monic-or-not ``b`` over GF(p)."""
    a = list(a)
    b = _trim(list(b))
    db = len(b) - 1
    inv_lead = pow(b[-1], p - 2, p)
    for i in range(len(a) - 1, db - 1, -1):
        coef = a[i] * inv_lead % p
        if coef:
            shift = i - db
            for j, bj in enumerate(b):
                a[shift + j] = (a[shift + j] - coef * bj) % p
    return _trim(a[:db] if db > 0 else [0])


def _is_irreducible(poly, p):
    """Trial division by every monic polynomial of degree 1..deg//2."""
    deg = len(poly) - 1
    for k in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=k):
            if _poly_mod(poly, list(low) + [1], p) == [0]:
                return False
    return True


def _smallest_irreducible(p, m):
    for code in range(p**m):
        low = []
        c = code
        for _ in range(m):
            c, r = divmod(c, p)
            low.append(r)
        poly = low + [1]
        if _is_irreducible(poly, p):
            return tuple(poly)
    raise AssertionError(f"no irreducible polynomial of degree {m} over GF({p})")


# -- field operations ---------------------------------------------------------

def add(spec, a, b):
    p = spec.p
    return FieldElement(tuple((x + y) % p for x, y in zip(a.coefficients, b.coefficients)))


def neg(spec, a):
    return FieldElement(tuple((-x) % spec.p for x in a.coefficients))


def mul(spec, a, b):
    p, m = spec.p, spec.m
    prod = [0] * (2 * m - 1)
    for i, x in enumerate(a.coefficients):
        if x:
            for j, y in enumerate(b.coefficients):
                if y:
                    prod[i + j] += x * y
    mod = spec.modulus
    # modulus is monic: x^m = -(mod[0] + ... + mod[m-1] x^{m-1})
    for k in range(2 * m - 2, m - 1, -1):
        c = prod[k] % p
        if c:
            base = k - m
            for j in range(m):
                prod[base + j] -= c * mod[j]
        prod[k] = 0
    return FieldElement(tuple(c % p for c in prod[:m]))


def power(spec, a, e):
    if e < 0:
        return power(spec, inv(spec, a), -e)
    result = spec.one
    base = a
    while e:
        if e & 1:
            result = mul(spec, result, base)
        base = mul(spec, base, base)
        e >>= 1
    return result


def inv(spec, a):
    if not any(a.coefficients):
        raise DivisionByZero("zero has no multiplicative inverse")
    return power(spec, a, spec.order - 2)


def multiplicative_order(spec, a):
    if not any(a.coefficients):
        raise DivisionByZero("zero has no multiplicative order")
    n = spec.order - 1
    order = n
    for r in prime_factors(n):
        while order % r == 0 and power(spec, a, order // r) == spec.one:
            order //= r
    return order


_OPS = {"add": (add, 2), "mul": (mul, 2), "inv": (inv, 1), "pow": (power, 2)}


def field_arith(spec, op, *operands):
    """Dispatch ``op`` in {add, mul, inv, pow}; ``pow`` takes (element, int)."""
    try:
        fn, arity = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown field operation {op!r}") from None
    if len(operands) != arity:
        raise TypeError(f"{op} takes {arity} operand(s), got {len(operands)}")
    return fn(spec, *operands)


def make_field(p, m):
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if m < 1:
        raise ValueError("extension degree must be positive")
    if p**m > MAX_FIELD_ORDER:
        raise TooLarge(f"GF({p}^{m}) exceeds the supported order {MAX_FIELD_ORDER}")
    modulus = _smallest_irreducible(p, m)
    provisional = FieldSpec(p, m, modulus, FieldElement((1,) + (0,) * (m - 1)))
    n = p**m - 1
    for code in range(1, p**m):
        g = provisional.from_int(code)
        if multiplicative_order(provisional, g) == n:
            return FieldSpec(p, m, modulus, g)
    raise AssertionError("finite field without a primitive element")


def relative_trace(spec_big, q, x):
    """Trace from GF(q^3) down to GF(q): ``x + x^q + x^(q^2)``."""
    pm = prime_power_decomposition(q)
    if pm is None or pm[0] != spec_big.p or 3 * pm[1] != spec_big.m:
        raise SubfieldMismatch(f"GF({spec_big.p}^{spec_big.m}) is not GF({q}^3)")
    xq = power(spec_big, x, q)
    xqq = power(spec_big, xq, q)
    return add(spec_big, add(spec_big, x, xq), xqq)


def in_subfield(spec, q, y):
    """Frobenius fixed-point test: ``y^q == y``."""
    return power(spec, y, q) == y
