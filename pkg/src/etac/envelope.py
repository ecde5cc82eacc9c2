"""Envelope classes, their analytic companions, and source samplers.

An envelope f maps positive integers to (0, 1] with 1 < sum f < infinity.
Derived objects: the envelope distribution F(k) = max(0, 1 - sum_{j>k} f(j)),
its smoothed survival extension, the quantile U(t) = Fbar^{-1}(1/t), and the
exact threshold m(t) solving Fbar(x) = x/t.  Power-family tail sums go
through the Hurwitz zeta function, which doubles as the smooth real-argument
continuation; the test suite checks it against partial sums with an integral
remainder bracket.  The only non-analytic stretch is the single integer
interval where the survival drops below 1; it is bridged by a monotone
cubic Hermite in log space with slopes clamped for monotonicity.

``SourceModel`` wraps a concrete sampling distribution: an explicit head
table for inverse-CDF draws plus an exact analytic tail handler, so heavy
tails are sampled without truncation bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import zeta as _hurwitz_zeta

__all__ = [
    "PowerEnvelope",
    "GeometricEnvelope",
    "parse_envelope",
    "SourceModel",
    "BayesConstruction",
    "zipf_source",
    "geometric_source",
    "fixed_source",
]

_HEAD_TABLE_LIMIT = 1_000_000
_BISECT_STEPS = 120


def _bisect_decreasing(fn, lo: float, hi: float) -> float:
    """Root of a decreasing fn with fn(lo) >= 0 >= fn(hi)."""
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if fn(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class _EnvelopeBase:
    """Shared numerics; subclasses supply f, raw tail sums, and derivatives."""

    # -- subclass surface -------------------------------------------------
    def f(self, j):
        raise NotImplementedError

    def _clamp_end(self) -> int:
        """Largest j with the min(1, .) clamp active (0 if none)."""
        raise NotImplementedError

    def _tail_formula(self, x: float) -> float:
        """sum_{j > x} of the unclamped tail, valid for x >= clamp end."""
        raise NotImplementedError

    def _tail_formula_dlog(self, x: float) -> float:
        """d/dx log of _tail_formula at x."""
        raise NotImplementedError

    # -- derived ----------------------------------------------------------
    def tail_sum(self, k: int) -> float:
        """S(k) = sum_{j>k} f(j), exact at integers (may exceed 1)."""
        if k < 0:
            raise ValueError("k must be >= 0")
        jstar = self._clamp_end()
        if k >= jstar:
            return self._tail_formula(float(k))
        return float(jstar - k) + self._tail_formula(float(jstar))

    @cached_property
    def k0(self) -> int:
        """Largest k with sum_{j>=k} f(j) >= 1: the envelope pmf's atom."""
        k = 1
        while self.tail_sum(k) >= 1.0:
            k += 1
        return k  # S(k0-1) >= 1 > S(k0)

    @cached_property
    def _bridge(self) -> tuple[float, float]:
        """(log S(k0), clamped right slope) for the Hermite bridge."""
        s = self.tail_sum(self.k0)
        y1 = math.log(s)
        m1 = self._tail_formula_dlog(float(self.k0))
        # Fritsch-Carlson: keep the cubic monotone on the interval
        if m1 < 3.0 * y1:
            m1 = 3.0 * y1
        if m1 > 0.0:
            m1 = 0.0
        return y1, m1

    def tail(self, x: float) -> float:
        """Smoothed survival Fbar_c(x); equals min(1, S(x)) at integers."""
        if x < 0:
            raise ValueError("x must be >= 0")
        k0 = self.k0
        if x <= k0 - 1:
            return 1.0
        if x >= k0:
            return min(1.0, self._tail_formula(float(x)))
        y1, m1 = self._bridge
        s = x - (k0 - 1)
        s2 = s * s
        s3 = s2 * s
        h01 = -2.0 * s3 + 3.0 * s2
        h11 = s3 - s2
        return math.exp(y1 * h01 + m1 * h11)

    def cdf(self, k: int) -> float:
        """Envelope distribution F(k) = 1 - tail(k), clipped at 0."""
        return max(0.0, 1.0 - self.tail(float(k)))

    def quantile_u(self, t: float) -> float:
        """U(t) = Fbar_c^{-1}(1/t) for t > 1."""
        if t <= 1.0:
            raise ValueError("quantile is defined for t > 1")
        target = 1.0 / t
        hi = float(self.k0) + 1.0
        while self.tail(hi) > target:
            hi *= 2.0
        return _bisect_decreasing(lambda x: self.tail(x) - target, 0.0, hi)

    def exact_threshold_m(self, t: float) -> float:
        """Root of Fbar_c(x) = x/t; unique since the difference decreases."""
        if t <= 0.0:
            raise ValueError("t must be positive")
        return _bisect_decreasing(lambda x: self.tail(x) - x / t, 0.0, float(t))

    # -- sources ----------------------------------------------------------
    def envelope_source(self, head_limit: int = _HEAD_TABLE_LIMIT) -> "SourceModel":
        """The envelope distribution itself: atom F(k0) at k0, f beyond."""
        k0 = self.k0
        values = np.arange(k0, head_limit + 1, dtype=np.int64)
        pmf = np.asarray(self.f(values.astype(np.float64)), dtype=np.float64)
        pmf[0] = 1.0 - self.tail_sum(k0)
        return SourceModel(
            values,
            pmf,
            tail=_EnvelopeTail(self),
            provenance=f"envelope-distribution({self.config_str()})",
        )

    def bayes_construction(self) -> "BayesConstruction":
        return BayesConstruction(self)

    def config_str(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class PowerEnvelope(_EnvelopeBase):
    """f(j) = min(1, c * j^-alpha), alpha > 1; heavy tailed, gamma = 1/(alpha-1)."""

    alpha: float
    c: float = 1.0

    def __post_init__(self):
        if self.alpha <= 1.0:
            raise ValueError("alpha must exceed 1 for a summable envelope")
        if self.c <= 0.0:
            raise ValueError("c must be positive")
        if self.tail_sum(0) <= 1.0:
            raise ValueError("envelope must have total mass > 1")

    @property
    def gamma(self) -> float:
        return 1.0 / (self.alpha - 1.0)

    def f(self, j):
        return np.minimum(1.0, self.c * np.asarray(j, dtype=np.float64) ** (-self.alpha))

    def _clamp_end(self) -> int:
        return int(math.floor(self.c ** (1.0 / self.alpha)))

    def _tail_formula(self, x: float) -> float:
        return self.c * float(_hurwitz_zeta(self.alpha, x + 1.0))

    def _tail_formula_dlog(self, x: float) -> float:
        # d/da zeta(s, a) = -s * zeta(s+1, a)
        num = -self.alpha * float(_hurwitz_zeta(self.alpha + 1.0, x + 1.0))
        return num / float(_hurwitz_zeta(self.alpha, x + 1.0))

    def config_str(self) -> str:
        return f"power:alpha={self.alpha:g},c={self.c:g}"


@dataclass(frozen=True)
class GeometricEnvelope(_EnvelopeBase):
    """f(j) = min(1, c * q^j), 0 < q < 1; light tailed, gamma = 0."""

    q: float
    c: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.q < 1.0:
            raise ValueError("q must lie in (0, 1)")
        if self.c <= 0.0:
            raise ValueError("c must be positive")
        if self.tail_sum(0) <= 1.0:
            raise ValueError("envelope must have total mass > 1")

    @property
    def gamma(self) -> float:
        return 0.0

    def f(self, j):
        return np.minimum(1.0, self.c * self.q ** np.asarray(j, dtype=np.float64))

    def _clamp_end(self) -> int:
        if self.c <= 1.0:
            return 0
        return int(math.floor(math.log(self.c) / math.log(1.0 / self.q)))

    def _tail_formula(self, x: float) -> float:
        return self.c * self.q ** (x + 1.0) / (1.0 - self.q)

    def _tail_formula_dlog(self, x: float) -> float:
        return math.log(self.q)

    def config_str(self) -> str:
        return f"geometric:q={self.q:g},c={self.c:g}"


def parse_envelope(text: str):
    """Parse 'power:alpha=2[,c=1]' or 'geometric:q=0.8[,c=1]'."""
    try:
        family, _, params = text.partition(":")
        kv = {}
        if params:
            for item in params.split(","):
                key, _, val = item.partition("=")
                kv[key.strip()] = float(val)
        if family == "power":
            return PowerEnvelope(alpha=kv.pop("alpha"), c=kv.pop("c", 1.0), **kv)
        if family == "geometric":
            return GeometricEnvelope(q=kv.pop("q"), c=kv.pop("c", 1.0), **kv)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"bad envelope spec {text!r}: {exc}") from None
    raise ValueError(f"unknown envelope family in {text!r}")


# --------------------------------------------------------------------------
# source models


class _EnvelopeTail:
    """Exact inverse-CDF handler for draws beyond an envelope head table."""

    def __init__(self, env: _EnvelopeBase):
        self.env = env

    def survival(self, k: float) -> float:
        return self.env._tail_formula(float(k))

    def inverse(self, s: float) -> int:
        """Smallest integer k with S(k) <= s (s below the table survival)."""
        env = self.env
        lo = env.k0  # S(lo) > s by caller contract
        hi = lo + 1
        while env._tail_formula(float(hi)) > s:
            lo = hi
            hi *= 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if env._tail_formula(float(mid)) > s:
                lo = mid
            else:
                hi = mid
        return hi

    def log2_pmf(self, j) -> float:
        return float(np.log2(self.env.f(j)))


class SourceModel:
    """Sampling distribution: head table plus optional exact analytic tail."""

    def __init__(self, values, pmf, tail=None, provenance: str = "custom"):
        values = np.asarray(values, dtype=np.int64)
        pmf = np.asarray(pmf, dtype=np.float64)
        if values.ndim != 1 or values.shape != pmf.shape:
            raise ValueError("values and pmf must be aligned 1-d arrays")
        if len(values) == 0:
            raise ValueError("support must be nonempty")
        if np.any(np.diff(values) <= 0):
            raise ValueError("values must be strictly increasing")
        if np.any(pmf < 0):
            raise ValueError("probabilities must be non-negative")
        self.values = values
        self.pmf = pmf
        self.cdf = np.cumsum(pmf)
        self.tail = tail
        self.provenance = provenance
        total = math.fsum(pmf) + (tail.survival(values[-1]) if tail is not None else 0.0)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"total mass {total} is not 1")

    def head_mass(self) -> float:
        return float(self.cdf[-1])

    def probability(self, j: int) -> float:
        idx = np.searchsorted(self.values, j)
        if idx < len(self.values) and self.values[idx] == j:
            return float(self.pmf[idx])
        if self.tail is not None and j > self.values[-1]:
            return float(2.0 ** self.tail.log2_pmf(j))
        return 0.0

    def survival(self, k: int) -> float:
        """P(X > k)."""
        if k < self.values[0]:
            return 1.0
        if k >= self.values[-1]:
            return self.tail.survival(k) if self.tail is not None else 0.0
        idx = np.searchsorted(self.values, k, side="right")
        return float(1.0 - self.cdf[idx - 1])

    def m_prime(self, n: int) -> int:
        """Smallest k >= 1 with survival(k) <= k/n."""
        lo, hi = 0, 1
        while self.survival(hi) > hi / n:
            lo = hi
            hi *= 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.survival(mid) > mid / n:
                lo = mid
            else:
                hi = mid
        return hi

    def sample(self, n: int, seed) -> np.ndarray:
        """n i.i.d. draws by inverse CDF; deterministic in (seed, n)."""
        if n < 0:
            raise ValueError("n must be >= 0")
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        u = rng.random(n)
        out = self.values[np.minimum(np.searchsorted(self.cdf, u, side="right"), len(self.values) - 1)]
        if self.tail is not None:
            head = self.cdf[-1]
            beyond = np.nonzero(u >= head)[0]
            for i in beyond:
                out[i] = self.tail.inverse(1.0 - u[i])
        return out

    def log2_pmf(self, symbols) -> np.ndarray:
        symbols = np.asarray(symbols, dtype=np.int64)
        idx = np.searchsorted(self.values, symbols)
        idx_c = np.minimum(idx, len(self.values) - 1)
        hit = self.values[idx_c] == symbols
        out = np.empty(len(symbols), dtype=np.float64)
        out[hit] = np.log2(self.pmf[idx_c[hit]])
        misses = np.nonzero(~hit)[0]
        for i in misses:
            j = int(symbols[i])
            if self.tail is None or j <= int(self.values[-1]):
                raise ValueError(f"symbol {j} outside the model support")
            out[i] = self.tail.log2_pmf(j)
        return out

    def neg_log2_likelihood(self, symbols) -> float:
        return float(-np.sum(self.log2_pmf(symbols)))


# --------------------------------------------------------------------------
# worst-case construction


class BayesConstruction:
    """Two-point-block dithering of an envelope's tail.

    Keeps f(j)/Z below j0, then splits the alphabet beyond j0 into blocks of
    two, putting the smaller of the two envelope values on one side of each
    block (the side is a fair coin per block).  The probability multiset is
    the same for every dither; its reindexed form g drives the analytics.
    """

    def __init__(self, env: _EnvelopeBase, head_blocks: int = (_HEAD_TABLE_LIMIT // 2)):
        self.env = env
        # smallest j0 with head mass >= 1 and a proper normalizer; the rest
        # check also keeps the paired blocks past any clamped (f = 1) zone
        j0 = 2
        while True:
            head = self._head_mass(j0)
            if head >= 1.0:
                rest = self._block_tail_mass_from(j0, -1)
                if rest < 1.0 and head / (1.0 - rest) >= 1.0:
                    break
            j0 += 1
        self.j0 = j0
        self.z = self._head_mass(j0) / (1.0 - self._block_tail_mass_from(j0, -1))
        self._head_blocks = head_blocks

    def _head_mass(self, j0: int) -> float:
        if j0 <= 1:
            return 0.0
        js = np.arange(1, j0, dtype=np.float64)
        return float(np.sum(self.env.f(js)))

    def _block_tail_mass_from(self, j0: int, k: int) -> float:
        """sum_{k' > k} min(f(j0+2k'), f(j0+2k'+1)).

        Beyond the clamp the envelope strictly decreases, so the minimum is
        the odd-offset member and the sum is an exact stride-2 tail.
        """
        env = self.env
        start = j0 + 2 * (k + 1) + 1  # first odd-offset argument
        if isinstance(env, PowerEnvelope):
            return env.c * 2.0**-env.alpha * float(_hurwitz_zeta(env.alpha, start / 2.0))
        if isinstance(env, GeometricEnvelope):
            return env.c * env.q**start / (1.0 - env.q**2)
        raise NotImplementedError

    def _block_tail_mass(self, k: int) -> float:
        return self._block_tail_mass_from(self.j0, k)

    def block_mass(self, k: int) -> float:
        f = self.env.f
        return float(min(f(self.j0 + 2 * k), f(self.j0 + 2 * k + 1)))

    def block_mass_at(self, j: int) -> float:
        k = (j - self.j0) // 2
        return self.block_mass(k)

    def position(self, k: int, theta_k: int = 0) -> int:
        return self.j0 + 2 * k + theta_k

    def g_model(self) -> SourceModel:
        """Reindexed multiset distribution: f/Z below j0, block minima after."""
        j0, z = self.j0, self.z
        ks = np.arange(self._head_blocks, dtype=np.float64)
        mins = np.minimum(self.env.f(j0 + 2 * ks), self.env.f(j0 + 2 * ks + 1))
        values = np.arange(1, j0 + self._head_blocks, dtype=np.int64)
        pmf = np.concatenate([np.asarray(self.env.f(np.arange(1, j0))) / z, mins])
        return SourceModel(values, pmf, tail=_GTail(self), provenance="bayes-reindexed-g")

    def p_theta_model(self, seed) -> SourceModel:
        """One dithered source; the dither bits are fixed by the seed."""
        theta = _ThetaBits(seed)
        j0, z = self.j0, self.z
        ks = np.arange(self._head_blocks)
        mins = np.minimum(
            self.env.f((j0 + 2 * ks).astype(np.float64)),
            self.env.f((j0 + 2 * ks + 1).astype(np.float64)),
        )
        positions = j0 + 2 * ks + theta.bits(self._head_blocks)
        values = np.concatenate([np.arange(1, j0, dtype=np.int64), positions.astype(np.int64)])
        pmf = np.concatenate([np.asarray(self.env.f(np.arange(1, j0))) / z, mins])
        model = SourceModel(
            values, pmf, tail=_BayesThetaTail(self, theta), provenance=f"bayes-worst-case(seed={seed})"
        )
        return model


class _GTail:
    """Tail handler for the reindexed g (block index k maps to value j0+k)."""

    def __init__(self, bc: BayesConstruction):
        self.bc = bc

    def survival(self, k: float) -> float:
        return self.bc._block_tail_mass(int(k) - self.bc.j0)

    def inverse(self, s: float) -> int:
        bc = self.bc
        lo = bc._head_blocks - 1
        hi = lo + 1
        while bc._block_tail_mass(hi) > s:
            lo = hi
            hi *= 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if bc._block_tail_mass(mid) > s:
                lo = mid
            else:
                hi = mid
        return bc.j0 + hi

    def log2_pmf(self, j) -> float:
        return math.log2(self.bc.block_mass(j - self.bc.j0))


class _BayesThetaTail:
    def __init__(self, bc: BayesConstruction, theta: "_ThetaBits"):
        self.bc = bc
        self.theta = theta

    def survival(self, k: float) -> float:
        return self.bc._block_tail_mass(self.bc._head_blocks - 1)

    def inverse(self, s: float) -> int:
        bc = self.bc
        lo = bc._head_blocks - 1
        hi = lo + 1
        while bc._block_tail_mass(hi) > s:
            lo = hi
            hi *= 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if bc._block_tail_mass(mid) > s:
                lo = mid
            else:
                hi = mid
        return bc.position(hi, int(self.theta.bit(hi)))

    def log2_pmf(self, j) -> float:
        k = (j - self.bc.j0) // 2
        if self.bc.position(k, int(self.theta.bit(k))) != j:
            raise ValueError(f"symbol {j} is on the zero side of its block")
        return math.log2(self.bc.block_mass(k))


class _ThetaBits:
    """Lazily extended fair dither bits, deterministic in the seed."""

    def __init__(self, seed):
        self._rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        self._bits = np.zeros(0, dtype=np.int64)

    def _extend(self, upto: int) -> None:
        if upto > len(self._bits):
            grow = max(upto - len(self._bits), len(self._bits), 1024)
            fresh = self._rng.integers(0, 2, size=grow, dtype=np.int64)
            self._bits = np.concatenate([self._bits, fresh])

    def bits(self, count: int) -> np.ndarray:
        self._extend(count)
        return self._bits[:count]

    def bit(self, k: int) -> int:
        self._extend(k + 1)
        return int(self._bits[k])


# --------------------------------------------------------------------------
# plain sources used by the experiments and the test corpus


def zipf_source(alpha: float, head_limit: int = _HEAD_TABLE_LIMIT) -> SourceModel:
    """P(j) proportional to j^-alpha over all positive integers."""
    if alpha <= 1.0:
        raise ValueError("zipf exponent must exceed 1")
    norm = float(_hurwitz_zeta(alpha, 1.0))
    values = np.arange(1, head_limit + 1, dtype=np.int64)
    pmf = values.astype(np.float64) ** (-alpha) / norm

    class _ZipfTail:
        def survival(self, k):
            return float(_hurwitz_zeta(alpha, float(k) + 1.0)) / norm

        def inverse(self, s):
            lo, hi = head_limit, head_limit + 1
            while self.survival(hi) > s:
                lo = hi
                hi *= 2
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if self.survival(mid) > s:
                    lo = mid
                else:
                    hi = mid
            return hi

        def log2_pmf(self, j):
            return -alpha * math.log2(j) - math.log2(norm)

    return SourceModel(values, pmf, tail=_ZipfTail(), provenance=f"zipf(alpha={alpha:g})")


def geometric_source(q: float) -> SourceModel:
    """P(j) = (1-q) q^(j-1) on j >= 1."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    head = max(64, int(math.ceil(math.log(1e-18) / math.log(q))))
    values = np.arange(1, head + 1, dtype=np.int64)
    pmf = (1.0 - q) * q ** (values.astype(np.float64) - 1.0)

    class _GeomTail:
        def survival(self, k):
            return q ** float(k)

        def inverse(self, s):
            return max(head + 1, 1 + int(math.floor(math.log(s) / math.log(q))))

        def log2_pmf(self, j):
            return math.log2(1.0 - q) + (j - 1.0) * math.log2(q)

    return SourceModel(values, pmf, tail=_GeomTail(), provenance=f"geometric(q={q:g})")


def fixed_source(j: int = 1) -> SourceModel:
    """Deterministic source: always emits j."""
    return SourceModel([j], [1.0], provenance=f"fixed({j})")
