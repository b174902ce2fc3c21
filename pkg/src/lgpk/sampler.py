"""Randomness and samplers for the objects key generation needs.

A seeded RngHandle expands its seed through SHAKE-256 in counter mode, so the
whole sample transcript is reproducible bit-for-bit; unseeded handles read OS
entropy. Everything above the handle (primes, invertible matrices, nilpotent
matrices, non-commuting pairs) draws only through it.
"""

from __future__ import annotations

import hashlib
import os

from .bitstrings import BitStr
from .errors import ParameterError, SamplingError
from .matfield import (
    FieldMatrix,
    GroupElement,
    NilpotentMatrix,
    commutes,
    det,
    is_probable_prime,
    mat_inv,
    mat_mul,
)

_DOMAIN = b"lgpk.rng.v1"
_BLOCK = 136  # SHAKE-256 rate in bytes; one squeeze per counter step


def _sieve(limit: int) -> list[int]:
    flags = bytearray([1]) * limit
    flags[0:2] = b"\x00\x00"
    for i in range(2, int(limit ** 0.5) + 1):
        if flags[i]:
            flags[i * i::i] = b"\x00" * len(flags[i * i::i])
    return [i for i in range(limit) if flags[i]]


_SMALL_PRIMES = _sieve(1024)


class RngHandle:
    """Uniform byte source: OS entropy, or a deterministic SHAKE-256 stream.

    Same seed, same byte sequence — the contract every KAT depends on. A
    handle is single-consumer; give each thread its own.
    """

    def __init__(self, seed: bytes | None = None):
        if seed is not None and not isinstance(seed, bytes):
            raise ParameterError("seed must be bytes or None")
        self._seed = seed
        self._counter = 0
        self._buf = b""

    @property
    def deterministic(self) -> bool:
        return self._seed is not None

    def take(self, nbytes: int) -> bytes:
        if nbytes < 0:
            raise ParameterError("cannot take a negative number of bytes")
        if self._seed is None:
            return os.urandom(nbytes)
        while len(self._buf) < nbytes:
            block = hashlib.shake_256(
                _DOMAIN + self._seed + self._counter.to_bytes(8, "big")
            ).digest(_BLOCK)
            self._counter += 1
            self._buf += block
        out, self._buf = self._buf[:nbytes], self._buf[nbytes:]
        return out

    def randbits(self, k: int) -> int:
        """Uniform integer in [0, 2^k)."""
        if k < 0:
            raise ParameterError("bit count must be non-negative")
        if k == 0:
            return 0
        raw = int.from_bytes(self.take((k + 7) // 8), "big")
        return raw & ((1 << k) - 1)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by rejection sampling."""
        if bound < 1:
            raise ParameterError("bound must be positive")
        if bound == 1:
            return 0
        k = bound.bit_length()
        while True:
            v = self.randbits(k)
            if v < bound:
                return v

    def bitstr(self, nbits: int) -> BitStr:
        return BitStr.from_int(self.randbits(nbits), nbits)


def sample_prime(bits: int, rng: RngHandle) -> int:
    """Probable prime of exactly `bits` bits (top bit forced, odd).

    Candidates failing trial division by small primes are skipped before the
    Miller-Rabin check (64 rounds).
    """
    if bits < 3:
        raise ParameterError("prime bit length must be >= 3")
    while True:
        cand = rng.randbits(bits) | (1 << (bits - 1)) | 1
        if any(cand % q == 0 and cand != q for q in _SMALL_PRIMES):
            continue
        if is_probable_prime(cand):
            return cand


def sample_matrix(n: int, p: int, rng: RngHandle) -> FieldMatrix:
    """Uniformly random n x n matrix over Z_p."""
    return FieldMatrix(
        n, p, tuple(tuple(rng.below(p) for _ in range(n)) for _ in range(n))
    )


def sample_invertible(n: int, p: int, rng: RngHandle) -> GroupElement:
    """Uniform element of GL_n(p) by rejection: redraw until the determinant
    is nonzero. Acceptance probability is prod_{k=1..n}(1 - p^-k), close to 1
    for any p of cryptographic size."""
    if n < 1:
        raise ParameterError("dimension must be >= 1")
    while True:
        a = sample_matrix(n, p, rng)
        if det(a) != 0:
            return GroupElement(a)


def sample_nilpotent(n: int, p: int, rng: RngHandle) -> NilpotentMatrix:
    """Random nilpotent matrix of index >= 2: a nonzero strictly
    upper-triangular matrix conjugated into general position.

    Every nilpotent matrix over a field is similar to a strictly triangular
    one, so the construction reaches the whole nilpotent cone; conjugation
    hides the triangular shape. Index 1 (the zero matrix) is excluded because
    it would make the exponential trivial.
    """
    if n < 2:
        raise ParameterError("nilpotent sampling needs n >= 2")
    while True:
        upper = tuple(
            tuple(rng.below(p) if j > i else 0 for j in range(n)) for i in range(n)
        )
        if any(any(row) for row in upper):
            break
    q = sample_invertible(n, p, rng)
    base = mat_mul(mat_mul(q.mat, FieldMatrix(n, p, upper)), mat_inv(q.mat).mat)
    return NilpotentMatrix.from_matrix(base)


def sample_noncommuting_pair(
    n: int, p: int, rng: RngHandle, max_tries: int = 1000
) -> tuple[NilpotentMatrix, NilpotentMatrix]:
    """Two independent nilpotent samples with S != T and S·T != T·S.

    Commuting draws are vanishingly rare, so rejection terminates almost
    immediately; the try budget exists only to turn a broken RngHandle into a
    clean error instead of a hang.
    """
    for _ in range(max_tries):
        s = sample_nilpotent(n, p, rng)
        t = sample_nilpotent(n, p, rng)
        if s.base != t.base and not commutes(s.base, t.base):
            return s, t
    raise SamplingError(f"no non-commuting pair found in {max_tries} tries")
