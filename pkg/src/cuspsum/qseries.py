"""q-expansions of level-1 cusp forms and Eisenstein series.

Delta is built from the Jacobi triple product
``eta(q)^3 = q^{1/8} sum_j (-1)^j (2j+1) q^{j(j+1)/2}`` as ``q * P(q)^8``:
seven sparse-times-dense multiplications, carried out modulo a handful of
31-bit primes and recombined by CRT.  That gives exact integers, and the
float path is those integers rounded once, so both paths agree to half an
ulp.  The other one-dimensional cusp spaces are ``Delta * E_{k-12}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

from .complexfn import BERNOULLI
from .errors import (
    PreconditionError,
    ResourceLimitError,
    TruncationMismatchError,
    UnsupportedWeightError,
)

EXACT_LIMIT = 100_000
FLOAT_LIMIT = 3_000_000
DIRECT_LIMIT = 30_000
# Above this the exact Delta*E_k product is skipped and floats go through FFT.
EXACT_PRODUCT_LIMIT = 100_000

EISENSTEIN_WEIGHTS = (4, 6, 8, 10, 14)
EIGENFORM_WEIGHTS = (12, 16, 18, 20, 22, 26)

_PRIMES = (2147483647, 2147483629, 2147483587, 2147483579, 2147483563, 2147483549)
_EPS = 2.0**-52


@dataclass(frozen=True)
class SparseSeries:
    """Integer power series with few nonzero terms, exponents increasing."""

    terms: tuple[tuple[int, int], ...]

    def __post_init__(self):
        exps = [e for e, _ in self.terms]
        if any(b <= a for a, b in zip(exps, exps[1:])):
            raise ValueError("exponents must be strictly increasing")

    @property
    def n_max(self) -> int:
        return self.terms[-1][0] if self.terms else 0

    def dense(self, n: int, exact: bool = True) -> np.ndarray:
        out = np.zeros(n + 1, dtype=object if exact else float)
        if exact:
            out[:] = 0
        for e, c in self.terms:
            if e <= n:
                out[e] = c
        return out


@dataclass(frozen=True)
class QExpansion:
    """Truncated q-expansion ``constant + sum_{n=1}^{N} a(n) q^n``.

    ``coeffs[n-1]`` holds a(n).  Exact expansions store Python ints in an
    object array; float expansions store float64.  ``rel_roundoff`` bounds
    the per-coefficient error relative to |a(n)| (0 for exact data, 2^-53
    for exact integers rounded once).  ``abs_roundoff`` is an absolute
    per-coefficient bound, used by FFT products where the error does not
    scale with each coefficient.
    """

    weight: int
    coeffs: np.ndarray
    form_id: str
    constant: Union[int, float, Fraction] = 0
    rel_roundoff: float = 0.0
    abs_roundoff: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.coeffs.setflags(write=False)

    @property
    def n_max(self) -> int:
        return len(self.coeffs)

    @property
    def exact(self) -> bool:
        return self.coeffs.dtype == object

    def a(self, n: int):
        if n == 0:
            return self.constant
        if n < 0:
            return 0
        return self.coeffs[n - 1]

    def series(self) -> np.ndarray:
        """Coefficients indexed from q^0."""
        out = np.empty(self.n_max + 1, dtype=self.coeffs.dtype)
        out[0] = self.constant
        out[1:] = self.coeffs
        return out

    def error_bounds(self) -> np.ndarray:
        """Per-coefficient absolute error bound for a(1..N)."""
        if self.exact:
            return np.zeros(self.n_max)
        profile = self.meta.get("error_profile")
        base = self.abs_roundoff if profile is None else np.asarray(profile)[: self.n_max]
        return base + self.rel_roundoff * np.abs(self.coeffs)

    def truncate(self, n: int) -> "QExpansion":
        if n > self.n_max:
            raise TruncationMismatchError(
                f"{self.form_id} has only {self.n_max} coefficients, {n} requested"
            )
        return replace(self, coeffs=self.coeffs[:n].copy())

    def to_float(self) -> "QExpansion":
        if not self.exact:
            return self
        return replace(
            self,
            coeffs=np.array([float(c) for c in self.coeffs], dtype=float),
            constant=float(self.constant),
            rel_roundoff=2.0**-53,
        )

    def scale(self, c) -> "QExpansion":
        return replace(
            self,
            coeffs=self.coeffs * c,
            constant=self.constant * c,
            form_id=f"{c}*{self.form_id}",
            abs_roundoff=self.abs_roundoff * abs(c),
        )

    def __neg__(self):
        return self.scale(-1)

    def __add__(self, other: "QExpansion") -> "QExpansion":
        if not isinstance(other, QExpansion):
            return NotImplemented
        n = min(self.n_max, other.n_max)
        return QExpansion(
            weight=self.weight,
            coeffs=self.coeffs[:n] + other.coeffs[:n],
            form_id=f"({self.form_id}+{other.form_id})",
            constant=self.constant + other.constant,
            rel_roundoff=max(self.rel_roundoff, other.rel_roundoff),
            abs_roundoff=self.abs_roundoff + other.abs_roundoff,
        )

    @classmethod
    def from_series(cls, series, weight: int = 0, form_id: str = "series", **kw):
        """Build from a full coefficient list starting at q^0."""
        arr = np.asarray(series)
        if arr.dtype.kind in "iu" or arr.dtype == object:
            coeffs = np.empty(len(arr) - 1, dtype=object)
            coeffs[:] = [int(x) for x in arr[1:]]
            const = int(arr[0])
        else:
            coeffs = arr[1:].astype(float)
            const = float(arr[0])
        return cls(weight=weight, coeffs=coeffs, form_id=form_id, constant=const, **kw)


def zero_form(weight: int, n: int, exact: bool = False) -> QExpansion:
    if exact:
        coeffs = np.zeros(n, dtype=object)
        coeffs[:] = 0
    else:
        coeffs = np.zeros(n)
    return QExpansion(weight=weight, coeffs=coeffs, form_id="zero")


# -- arithmetic helpers ------------------------------------------------------


def divisor_count(n: int) -> np.ndarray:
    """d(m) for m = 0..n (index 0 unused, set to 0)."""
    # Pair each divisor k <= sqrt(m) with m / k.
    d = np.zeros(n + 1, dtype=np.int64)
    for k in range(1, math.isqrt(n) + 1):
        d[k * k::k] += 2
        d[k * k] -= 1
    return d


def divisor_sigma(power: int, n: int, exact: bool = True) -> np.ndarray:
    """sigma_power(m) for m = 0..n by a divisor sieve."""
    if exact:
        sig = np.zeros(n + 1, dtype=object)
        sig[:] = 0
        for k in range(1, n + 1):
            sig[k::k] += k**power
    else:
        sig = np.zeros(n + 1)
        for k in range(1, n + 1):
            sig[k::k] += float(k) ** power
    return sig


# -- sparse eta^3 and Delta --------------------------------------------------


def eta_cubed(n: int) -> SparseSeries:
    """``sum_j (-1)^j (2j+1) q^{j(j+1)/2}`` truncated at exponent ``n``."""
    if n < 1:
        raise PreconditionError("N must be >= 1")
    terms = []
    j = 0
    while j * (j + 1) // 2 <= n:
        terms.append((j * (j + 1) // 2, (-1) ** j * (2 * j + 1)))
        j += 1
    return SparseSeries(tuple(terms))


def _ladder_mod(p: int, exps: np.ndarray, coefs: np.ndarray, length: int, power: int):
    base = np.zeros(length, dtype=np.int64)
    base[exps] = np.remainder(coefs, p)
    acc = base
    # |sum| <= #terms * max|c| * p < 2^63 for length <= 3e6, so reduce once
    # per multiplication.
    for _ in range(power - 1):
        out = np.zeros(length, dtype=np.int64)
        for e, c in zip(exps.tolist(), coefs.tolist()):
            out[e:] += c * acc[: length - e]
        np.remainder(out, p, out=out)
        acc = out
    return acc


def crt_signed(residues: list[np.ndarray], primes: tuple[int, ...]) -> np.ndarray:
    """Garner recombination into signed Python ints (object array)."""
    k = len(primes)
    digits = []
    for i in range(k):
        x = residues[i].astype(np.int64) % primes[i]
        for j in range(i):
            inv = pow(primes[j], -1, primes[i])
            x = ((x - digits[j]) % primes[i]) * inv % primes[i]
        digits.append(x)
    value = digits[-1].astype(object)
    for i in range(k - 2, -1, -1):
        value = value * primes[i] + digits[i].astype(object)
    modulus = math.prod(primes)
    value[value > modulus // 2] -= modulus
    return value


def _primes_for_bound(bound: int) -> tuple[int, ...]:
    k = 2
    while math.prod(_PRIMES[:k]) <= 2 * bound:
        k += 1
        if k > len(_PRIMES):
            raise ResourceLimitError("coefficient bound exceeds CRT capacity")
    return _PRIMES[:k]


@lru_cache(maxsize=4)
def _delta_exact(n: int) -> np.ndarray:
    # tau(m) for m = 1..n; |tau(m)| <= d(m) m^{11/2} <= 2 m^6.
    eta = eta_cubed(n - 1)
    exps = np.array([e for e, _ in eta.terms], dtype=np.int64)
    coefs = np.array([c for _, c in eta.terms], dtype=np.int64)
    primes = _primes_for_bound(2 * n**6)
    residues = [_ladder_mod(p, exps, coefs, n, 8) for p in primes]
    return crt_signed(residues, primes)


def delta_qexp(n: int, exact: bool = False) -> QExpansion:
    """Ramanujan Delta to ``q^n``."""
    if n < 1:
        raise PreconditionError("N must be >= 1")
    if exact and n > EXACT_LIMIT:
        raise ResourceLimitError(f"exact path limited to N <= {EXACT_LIMIT}")
    if n > FLOAT_LIMIT:
        raise ResourceLimitError(f"coefficient generation limited to N <= {FLOAT_LIMIT}")
    tau = _delta_exact(n)
    form = QExpansion(weight=12, coeffs=tau.copy(), form_id="delta")
    return form if exact else form.to_float()


# -- Eisenstein series and eigenforms ---------------------------------------


def eisenstein(k: int, n: int, exact: bool = False) -> QExpansion:
    """Normalized E_k with constant term 1, coefficients ``-2k/B_k sigma_{k-1}``."""
    if k not in EISENSTEIN_WEIGHTS:
        raise UnsupportedWeightError(f"unsupported weight {k} for Eisenstein series")
    factor = Fraction(-2 * k) / BERNOULLI[k]
    if factor.denominator != 1:
        raise UnsupportedWeightError(f"E_{k} does not have integral coefficients")
    factor = int(factor)
    sig = divisor_sigma(k - 1, n, exact=exact)[1:]
    coeffs = sig * factor
    return QExpansion(
        weight=k,
        coeffs=coeffs,
        form_id=f"E{k}",
        constant=1 if exact else 1.0,
        rel_roundoff=0.0 if exact else 64 * _EPS,
    )


@lru_cache(maxsize=8)
def _eigenform_cached(k: int, n: int, exact: bool) -> QExpansion:
    if k == 12:
        return delta_qexp(n, exact=exact)
    delta = delta_qexp(n, exact=exact or n <= EXACT_PRODUCT_LIMIT)
    eis = eisenstein(k - 12, n, exact=delta.exact)
    prod = multiply(delta, eis, n)
    form = replace(prod, weight=k, form_id=f"delta*E{k - 12}")
    return form if exact else form.to_float()


def eigenform(k: int, n: int, exact: bool = False) -> QExpansion:
    """Normalized Hecke eigenform spanning S_k(SL_2(Z)) for one-dimensional k."""
    if k not in EIGENFORM_WEIGHTS:
        raise UnsupportedWeightError(
            f"unsupported weight {k}: cusp space must be one-dimensional"
        )
    if exact and n > EXACT_LIMIT:
        raise ResourceLimitError(f"exact path limited to N <= {EXACT_LIMIT}")
    return _eigenform_cached(k, n, exact)


# -- products ----------------------------------------------------------------


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


def fft(x: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Iterative radix-2 Cooley-Tukey; ``len(x)`` must be a power of two."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[0]
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    x = x[rev]
    sign = 1.0 if inverse else -1.0
    m = 2
    while m <= n:
        half = m // 2
        w = np.exp(sign * 2j * np.pi * np.arange(half) / m)
        blocks = x.reshape(-1, m)
        top = blocks[:, :half]
        bot = blocks[:, half:] * w
        x = np.concatenate([top + bot, top - bot], axis=1).reshape(n)
        m *= 2
    return x / n if inverse else x


def fft_convolve(a: np.ndarray, b: np.ndarray, n_out: int) -> tuple[np.ndarray, float]:
    """Linear convolution of two real sequences, truncated to ``n_out`` terms.

    Both inputs are packed into one complex transform.  Returns the result
    and an absolute roundoff estimate.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    size = _next_pow2(2 * max(len(a), len(b), n_out))
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return np.zeros(n_out), 0.0
    # Unpacking loses the smaller spectrum at eps * (larger norm), so
    # balance the norms with an exact power-of-two scale first.
    shift = round(math.log2(na / nb))
    z = np.zeros(size, dtype=complex)
    z[: len(a)] += np.ldexp(a, -shift)
    z[: len(b)] += 1j * b
    zf = fft(z)
    zr = np.conj(np.roll(zf[::-1], 1))  # conj(Z_{-k})
    af = 0.5 * (zf + zr)
    bf = -0.5j * (zf - zr)
    c = np.ldexp(fft(af * bf, inverse=True).real[:n_out], shift)
    est = 5.0 * _EPS * math.log2(size) * na * nb
    return c, est


def graded_convolve(a: np.ndarray, b: np.ndarray, n_out: int,
                    rel_in: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """FFT convolution whose error tracks the local coefficient size.

    A single transform spreads roundoff of size eps * |a| |b| over every
    output index, which swamps the small low-order coefficients of a
    polynomially growing series.  Splitting ``a`` and ``b`` into dyadic
    blocks and pairing each block with the prefix of the other factor below
    it confines each error to the indices that block can reach.  Returns the
    truncated product and a per-index error bound (including the inputs'
    relative error ``rel_in``, via Cauchy-Schwarz on each block pair).
    """
    a = np.asarray(a, dtype=float)[:n_out]
    b = np.asarray(b, dtype=float)[:n_out]
    out = np.zeros(n_out)
    err = np.zeros(n_out)

    def add(x, y, offset):
        length = n_out - offset
        if length <= 0 or not x.any() or not y.any():
            return
        if min(len(x), len(y)) <= 64:
            part = np.convolve(x, y)[:length]
            est = _EPS * min(len(x), len(y)) * float(np.max(np.abs(x)) * np.max(np.abs(y)))
        else:
            part, est = fft_convolve(x, y, min(length, len(x) + len(y) - 1))
        est += 2 * rel_in * float(np.linalg.norm(x) * np.linalg.norm(y))
        out[offset:offset + len(part)] += part
        err[offset:offset + len(part)] += est + _EPS * np.abs(part)

    lo = 0
    hi = 1
    while lo < n_out:
        hi = min(hi, n_out)
        # block [lo, hi) of a against b[0:hi), then a[0:lo) against block of b
        add(a[lo:hi], b[:hi], lo)
        if lo:
            add(a[:lo], b[lo:hi], lo)
        lo, hi = hi, 2 * hi
    return out, err


def _kronecker_product(a: np.ndarray, b: np.ndarray, n_out: int) -> np.ndarray:
    """Exact integer product via packing into one big integer."""
    la, lb = len(a), len(b)
    ma = max((abs(int(x)) for x in a), default=0)
    mb = max((abs(int(x)) for x in b), default=0)
    bound = max(min(la, lb) * ma * mb, ma, mb)
    slot = bound.bit_length() + 2
    nbytes = (slot + 7) // 8
    slot = 8 * nbytes
    half = 1 << (slot - 1)

    def pack(arr):
        pos = bytearray(nbytes * len(arr))
        neg = bytearray(nbytes * len(arr))
        for i, v in enumerate(arr):
            v = int(v)
            if v > 0:
                pos[i * nbytes:(i + 1) * nbytes] = v.to_bytes(nbytes, "little")
            elif v < 0:
                neg[i * nbytes:(i + 1) * nbytes] = (-v).to_bytes(nbytes, "little")
        return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")

    prod = pack(a) * pack(b)
    count = la + lb - 1
    offset = int.from_bytes((half.to_bytes(nbytes, "little")) * count, "little")
    raw = (prod + offset).to_bytes(nbytes * count + 1, "little")
    out = np.empty(min(n_out, count), dtype=object)
    for i in range(len(out)):
        out[i] = int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half
    if n_out > count:
        out = np.concatenate([out, np.zeros(n_out - count, dtype=object)])
        out[count:] = 0
    return out


def _sparse_times_dense(sp: SparseSeries, dense: np.ndarray, length: int) -> np.ndarray:
    out = np.zeros(length, dtype=dense.dtype)
    if dense.dtype == object:
        out[:] = 0
    for e, c in sp.terms:
        if e >= length:
            break
        out[e:] += c * dense[: length - e]
    return out


def multiply(f, g: QExpansion, n: int, method: str = "auto") -> QExpansion:
    """Truncated Cauchy product of ``f`` and ``g`` through ``q^n``.

    ``f`` may be a :class:`SparseSeries`.  Exact inputs give exact output
    regardless of ``method``.
    """
    if method not in ("auto", "direct", "fft", "sparse"):
        raise ValueError(f"unknown method {method!r}")
    if g.n_max < n or (isinstance(f, QExpansion) and f.n_max < n):
        raise TruncationMismatchError("factor truncation below requested N")
    gs = g.series()[: n + 1]
    length = n + 1
    profile = None

    if isinstance(f, SparseSeries):
        out = _sparse_times_dense(f, gs, length)
        used = "sparse"
        abs_err = 0.0
        form_id = f"sparse*{g.form_id}"
        weight = g.weight
        rel = g.rel_roundoff
    else:
        fs = f.series()[: n + 1]
        form_id = f"{f.form_id}*{g.form_id}"
        weight = f.weight + g.weight
        rel = max(f.rel_roundoff, g.rel_roundoff)
        abs_err = 0.0
        if f.exact and g.exact:
            out = _kronecker_product(fs, gs, length)
            used = "exact"
        else:
            fs = fs.astype(float)
            gs = gs.astype(float)
            used = method
            if method == "auto":
                used = "direct" if n <= DIRECT_LIMIT else "fft"
            if used == "sparse":
                raise ValueError("sparse method needs a SparseSeries factor")
            if used == "direct":
                out = np.convolve(fs, gs)[:length]
                mag = np.convolve(np.abs(fs), np.abs(gs))[:length]
                profile = (_EPS * length + 2 * rel) * mag
            else:
                out, profile = graded_convolve(fs, gs, length, rel)
            # Cancellation makes error relative to |c(n)| meaningless; the
            # per-coefficient bound lives in the profile.
            rel = 0.0
            abs_err = float(np.max(profile))
    prod = QExpansion.from_series(out, weight=weight, form_id=form_id)
    meta = {"method": used}
    if profile is not None:
        meta["error_profile"] = profile[1:]
    return replace(prod, rel_roundoff=rel, abs_roundoff=abs_err, meta=meta)


# -- Hecke relations ---------------------------------------------------------


def _factor(n: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def hecke_verify(f: QExpansion, k: int, bound: int, exhaustive: bool = False) -> list:
    """Violations of the Hecke relations among a(1..bound).

    By default each composite non-prime-power ``n`` is checked once through
    its split ``p^e * r`` with ``p`` the smallest prime factor, which
    determines multiplicativity by induction.  ``exhaustive=True`` checks
    every coprime pair ``2 <= m < n'`` with ``m n' <= bound`` instead.
    Prime powers are checked through
    ``a(p) a(p^r) = a(p^{r+1}) + p^{k-1} a(p^{r-1})``.
    Returns tuples ``(m, n)`` and ``("prime_power", p, r)``.
    """
    if not f.exact:
        raise PreconditionError("Hecke verification needs exact coefficients")
    if bound > f.n_max:
        raise TruncationMismatchError(f"bound {bound} exceeds N = {f.n_max}")
    a = f.a
    violations: list = []
    if exhaustive:
        for m in range(2, bound + 1):
            if m * (m + 1) > bound:
                break
            for n2 in range(m + 1, bound // m + 1):
                if math.gcd(m, n2) == 1 and a(m) * a(n2) != a(m * n2):
                    violations.append((m, n2))
    else:
        for n in range(6, bound + 1):
            fac = _factor(n)
            if len(fac) < 2:
                continue
            p, e = fac[0]
            pe = p**e
            if a(pe) * a(n // pe) != a(n):
                violations.append((pe, n // pe))
    p = 2
    while p * p <= bound:
        if all(p % q for q in range(2, int(math.isqrt(p)) + 1)):
            r = 1
            while p ** (r + 1) <= bound:
                lhs = a(p) * a(p**r)
                rhs = a(p ** (r + 1)) + p ** (k - 1) * a(p ** (r - 1))
                if lhs != rhs:
                    violations.append(("prime_power", p, r))
                r += 1
        p += 1
    return violations
