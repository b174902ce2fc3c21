"""Key generation, encryption, and decryption.

The public key carries two non-commuting nilpotent generators and the product
of two secret exponentials of them; a ciphertext sandwiches that product
between fresh exponentials whose scalars are derived by hashing (seed,
message). Decryption strips the sandwich with the stored secret factors,
then re-encrypts and compares before releasing the message, so any tampering
collapses to a single opaque rejection.

Ops of interest (exponential-map evaluations and group multiplications) can
be tallied through an optional OpCounter; encryption performs exactly 2 and
3, decryption exactly 2 and 5.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .bitstrings import BitStr
from .errors import EncodingError, KeyMismatchError, ParameterError
from .hashsuite import HashSuiteConfig, h1, h2, h3
from .matfield import (
    GroupElement,
    NilpotentMatrix,
    ParameterSet,
    commutes,
    exp_scaled,
    group_mul,
)
from .sampler import RngHandle, sample_noncommuting_pair

FINGERPRINT_BYTES = 32


@dataclass
class OpCounter:
    """Tally of group-level operations performed by a single scheme call."""

    exp_maps: int = 0
    group_mults: int = 0

    def count_exp(self):
        self.exp_maps += 1

    def count_mul(self):
        self.group_mults += 1


@dataclass(frozen=True)
class PublicKey:
    """Parameters, the two nilpotent generators, and the published product
    key_product = exp(left_secret * left_gen) * exp(right_secret * right_gen)."""

    params: ParameterSet
    left_gen: NilpotentMatrix
    right_gen: NilpotentMatrix
    key_product: GroupElement
    hash_cfg: HashSuiteConfig

    def __post_init__(self):
        n, p = self.params.n, self.params.p
        named = (
            ("left generator", self.left_gen.base),
            ("right generator", self.right_gen.base),
            ("key product", self.key_product.mat),
        )
        for name, m in named:
            if m.n != n or m.p != p:
                raise ParameterError(f"{name} does not match the parameter set")
        if self.left_gen.base == self.right_gen.base:
            raise ParameterError("generators must be distinct")
        if commutes(self.left_gen.base, self.right_gen.base):
            raise ParameterError("generators must not commute")
        cfg = self.hash_cfg
        expected = (self.params.kappa2, self.params.kappa3, self.params.kappa4, self.params.msg_len)
        if (cfg.kappa2, cfg.kappa3, cfg.kappa4, cfg.msg_len) != expected:
            raise ParameterError("hash configuration disagrees with the parameter set")


@dataclass(frozen=True)
class PrivateKey:
    """The two secret exponential factors whose product is the pk's
    key_product, plus a fingerprint binding this key to that pk.

    The scalar exponents themselves are never stored.
    """

    left_factor: GroupElement
    right_factor: GroupElement
    pk_fingerprint: bytes

    def __post_init__(self):
        a, b = self.left_factor.mat, self.right_factor.mat
        if a.n != b.n or a.p != b.p:
            raise ParameterError("secret factors live in different groups")
        if len(self.pk_fingerprint) != FINGERPRINT_BYTES:
            raise ParameterError(f"fingerprint must be {FINGERPRINT_BYTES} bytes")


@dataclass(frozen=True)
class Ciphertext:
    """sealed_seed: seed xor hash of the sandwiched product; rand_product:
    product of the two randomizer exponentials; masked_msg: message xor
    seed-derived pad."""

    sealed_seed: BitStr
    rand_product: GroupElement
    masked_msg: BitStr


def keygen(params: ParameterSet, rng: RngHandle) -> tuple[PublicKey, PrivateKey]:
    """Sample generators and secret scalars, publish the product, keep the factors.

    The scalars are dropped before returning (best effort: Python offers no
    memory scrubbing); only their exponential images survive in the private key.
    """
    left_gen, right_gen = sample_noncommuting_pair(params.n, params.p, rng)
    left_secret = rng.randbits(params.kappa3)
    right_secret = rng.randbits(params.kappa4)
    left_factor = exp_scaled(left_secret, left_gen)
    right_factor = exp_scaled(right_secret, right_gen)
    del left_secret, right_secret
    key_product = group_mul(left_factor, right_factor)
    cfg = HashSuiteConfig(params.kappa2, params.kappa3, params.kappa4, params.msg_len)
    pk = PublicKey(params, left_gen, right_gen, key_product, cfg)
    from .codec import pk_fingerprint  # deferred: codec imports this module's types

    sk = PrivateKey(left_factor, right_factor, pk_fingerprint(pk))
    return pk, sk


def encrypt(
    pk: PublicKey, m: BitStr, rng: RngHandle, ops: Optional[OpCounter] = None
) -> Ciphertext:
    """Encrypt an msg_len-bit message: 2 exponential maps, 3 group multiplications."""
    ops = ops if ops is not None else OpCounter()
    cfg = pk.hash_cfg
    if m.nbits != cfg.msg_len:
        raise EncodingError(f"message must be {cfg.msg_len} bits, got {m.nbits}")
    seed = rng.bitstr(cfg.kappa2)
    r_left, r_right = (r.to_int() for r in h1(cfg, seed, m))
    left_rand = exp_scaled(r_left, pk.left_gen)
    ops.count_exp()
    right_rand = exp_scaled(r_right, pk.right_gen)
    ops.count_exp()
    inner = group_mul(left_rand, pk.key_product)
    ops.count_mul()
    sandwich = group_mul(inner, right_rand)
    ops.count_mul()
    rand_product = group_mul(left_rand, right_rand)
    ops.count_mul()
    sealed_seed = h2(cfg, sandwich) ^ seed
    masked_msg = h3(cfg, seed) ^ m
    return Ciphertext(sealed_seed, rand_product, masked_msg)


def decrypt(
    sk: PrivateKey, pk: PublicKey, ct: Ciphertext, ops: Optional[OpCounter] = None
) -> Optional[BitStr]:
    """Recover the message, or None if the ciphertext fails the re-encryption check.

    2 exponential maps and 5 group multiplications: two multiplications to
    strip the sandwich, then a full re-encryption (2 exp, 3 mul) whose output
    must reproduce the ciphertext bit for bit. Malformed and tampered inputs
    are indistinguishable: both yield the same opaque None.
    """
    from .codec import pk_fingerprint  # deferred: codec imports this module's types

    if sk.pk_fingerprint != pk_fingerprint(pk):
        raise KeyMismatchError("private key is not bound to this public key")
    ops = ops if ops is not None else OpCounter()
    cfg = pk.hash_cfg
    if ct.sealed_seed.nbits != cfg.kappa2 or ct.masked_msg.nbits != cfg.msg_len:
        return None
    cm = ct.rand_product.mat
    if cm.n != pk.params.n or cm.p != pk.params.p:
        return None
    inner = group_mul(sk.left_factor, ct.rand_product)
    ops.count_mul()
    sandwich = group_mul(inner, sk.right_factor)
    ops.count_mul()
    seed = ct.sealed_seed ^ h2(cfg, sandwich)
    m = ct.masked_msg ^ h3(cfg, seed)
    r_left, r_right = (r.to_int() for r in h1(cfg, seed, m))
    left_rand = exp_scaled(r_left, pk.left_gen)
    ops.count_exp()
    right_rand = exp_scaled(r_right, pk.right_gen)
    ops.count_exp()
    re_inner = group_mul(left_rand, pk.key_product)
    ops.count_mul()
    re_sandwich = group_mul(re_inner, right_rand)
    ops.count_mul()
    re_product = group_mul(left_rand, right_rand)
    ops.count_mul()
    # comparisons are bitwise on the canonical representations
    seed_ok = (h2(cfg, re_sandwich) ^ seed) == ct.sealed_seed
    product_ok = re_product.mat == cm
    if seed_ok and product_ok:
        return m
    return None
