import pytest

from lgpk.bitstrings import BitStr
from lgpk.codec import pk_fingerprint
from lgpk.errors import EncodingError, KeyMismatchError, NotInvertibleError
from lgpk.hashsuite import HashSuiteConfig, h1
from lgpk.matfield import (
    FieldMatrix,
    GroupElement,
    NilpotentMatrix,
    ParameterSet,
    exp_scaled,
    group_mul,
    mat_mul,
)
from lgpk.sampler import RngHandle
from lgpk.scheme import Ciphertext, OpCounter, PrivateKey, PublicKey, decrypt, encrypt, keygen

SEED = b"\x07" * 32

TOY = ParameterSet(kappa1=8, n=2, p=251, kappa2=64, kappa3=8, kappa4=8, msg_len=128)
TINY = ParameterSet(kappa1=3, n=2, p=7, kappa2=16, kappa3=3, kappa4=3, msg_len=16)


def toy_keypair(seed=SEED, params=TOY):
    return keygen(params, RngHandle(seed))


def test_keygen_secret_factors_multiply_to_key_product():
    pk, sk = toy_keypair()
    assert group_mul(sk.left_factor, sk.right_factor).mat == pk.key_product.mat


def test_keygen_deterministic_under_seed():
    assert toy_keypair() == toy_keypair()
    pk1, _ = toy_keypair(seed=b"\x01" * 32)
    pk2, _ = toy_keypair(seed=b"\x02" * 32)
    assert pk1 != pk2


def test_keygen_binds_sk_to_pk():
    pk, sk = toy_keypair()
    assert sk.pk_fingerprint == pk_fingerprint(pk)


def test_round_trip():
    pk, sk = toy_keypair()
    rng = RngHandle(b"\x21" * 32)
    for _ in range(50):
        m = rng.bitstr(TOY.msg_len)
        ct = encrypt(pk, m, rng)
        assert decrypt(sk, pk, ct) == m


def test_round_trip_tiny_field():
    pk, sk = keygen(TINY, RngHandle(SEED))
    rng = RngHandle(b"\x22" * 32)
    for _ in range(20):
        m = rng.bitstr(TINY.msg_len)
        assert decrypt(sk, pk, encrypt(pk, m, rng)) == m


def test_encrypt_rejects_wrong_message_length():
    pk, _ = toy_keypair()
    with pytest.raises(EncodingError):
        encrypt(pk, BitStr.from_int(0, TOY.msg_len - 1), RngHandle(SEED))


def test_encrypt_operation_counts():
    pk, _ = toy_keypair()
    ops = OpCounter()
    encrypt(pk, BitStr.from_int(5, TOY.msg_len), RngHandle(SEED), ops)
    assert (ops.exp_maps, ops.group_mults) == (2, 3)


def test_decrypt_operation_counts():
    pk, sk = toy_keypair()
    ct = encrypt(pk, BitStr.from_int(5, TOY.msg_len), RngHandle(SEED))
    ops = OpCounter()
    decrypt(sk, pk, ct, ops)
    assert (ops.exp_maps, ops.group_mults) == (2, 5)


def test_encryption_is_randomized():
    pk, _ = toy_keypair()
    m = BitStr.from_int(1234, TOY.msg_len)
    seen = set()
    rng = RngHandle(b"\x33" * 32)
    for _ in range(100):
        ct = encrypt(pk, m, rng)
        key = (ct.sealed_seed.hex(), ct.rand_product.mat.rows, ct.masked_msg.hex())
        assert key not in seen
        seen.add(key)


def test_correctness_identity_at_group_level():
    # exp(r_l L) · key_product · exp(r_r R) equals
    # left_factor · rand_product · right_factor for honest randomness
    for seed in (b"\x01" * 32, b"\x02" * 32, b"\x03" * 32):
        pk, sk = toy_keypair(seed=seed)
        rng = RngHandle(seed + b"!")
        m = rng.bitstr(TOY.msg_len)
        sigma = rng.bitstr(TOY.kappa2)
        r_left, r_right = (r.to_int() for r in h1(pk.hash_cfg, sigma, m))
        left_rand = exp_scaled(r_left, pk.left_gen)
        right_rand = exp_scaled(r_right, pk.right_gen)
        lhs = mat_mul(mat_mul(left_rand.mat, pk.key_product.mat), right_rand.mat)
        rand_product = mat_mul(left_rand.mat, right_rand.mat)
        rhs = mat_mul(mat_mul(sk.left_factor.mat, rand_product), sk.right_factor.mat)
        assert lhs == rhs


def test_toy_closed_form_of_rand_product():
    """With shift-matrix generators the randomizer product has a known shape."""
    p = 7
    upper = NilpotentMatrix(FieldMatrix(2, p, ((0, 1), (0, 0))), 2)
    lower = NilpotentMatrix(FieldMatrix(2, p, ((0, 0), (1, 0))), 2)
    left_factor = GroupElement(FieldMatrix(2, p, ((1, 2), (0, 1))))   # exp(2*upper)
    right_factor = GroupElement(FieldMatrix(2, p, ((1, 0), (3, 1))))  # exp(3*lower)
    key_product = group_mul(left_factor, right_factor)
    cfg = HashSuiteConfig(TINY.kappa2, TINY.kappa3, TINY.kappa4, TINY.msg_len)
    pk = PublicKey(TINY, upper, lower, key_product, cfg)
    sk = PrivateKey(left_factor, right_factor, pk_fingerprint(pk))

    rng = RngHandle(SEED)
    m = BitStr.from_int(0xBEEF, 16)
    ct = encrypt(pk, m, rng)

    replay = RngHandle(SEED)
    sigma = replay.bitstr(TINY.kappa2)
    r_left, r_right = (r.to_int() % p for r in h1(cfg, sigma, m))
    expected = ((1 + r_left * r_right) % p, r_left), (r_right, 1)
    assert ct.rand_product.mat.rows == expected
    assert decrypt(sk, pk, ct) == m


def test_decrypt_rejects_seed_bit_flip():
    pk, sk = toy_keypair()
    ct = encrypt(pk, BitStr.from_int(77, TOY.msg_len), RngHandle(SEED))
    flipped = ct.sealed_seed ^ BitStr.from_int(1 << 13, TOY.kappa2)
    assert decrypt(sk, pk, Ciphertext(flipped, ct.rand_product, ct.masked_msg)) is None


def test_decrypt_rejects_message_bit_flip():
    pk, sk = toy_keypair()
    ct = encrypt(pk, BitStr.from_int(77, TOY.msg_len), RngHandle(SEED))
    flipped = ct.masked_msg ^ BitStr.from_int(1, TOY.msg_len)
    assert decrypt(sk, pk, Ciphertext(ct.sealed_seed, ct.rand_product, flipped)) is None


def test_decrypt_rejects_rand_product_perturbation():
    pk, sk = toy_keypair()
    ct = encrypt(pk, BitStr.from_int(77, TOY.msg_len), RngHandle(SEED))
    p = TOY.p
    rows = [list(r) for r in ct.rand_product.mat.rows]
    for delta in range(1, p):
        rows[0][1] = (ct.rand_product.mat.rows[0][1] + delta) % p
        try:
            perturbed = GroupElement(FieldMatrix(2, p, tuple(tuple(r) for r in rows)))
        except NotInvertibleError:
            continue
        assert decrypt(sk, pk, Ciphertext(ct.sealed_seed, perturbed, ct.masked_msg)) is None


def test_decrypt_with_foreign_key_raises():
    pk, _ = toy_keypair(seed=b"\x01" * 32)
    _, sk2 = toy_keypair(seed=b"\x02" * 32)
    ct = encrypt(pk, BitStr.from_int(1, TOY.msg_len), RngHandle(SEED))
    with pytest.raises(KeyMismatchError):
        decrypt(sk2, pk, ct)


def test_decrypt_returns_none_on_shape_mismatch():
    pk, sk = toy_keypair()
    ct = encrypt(pk, BitStr.from_int(1, TOY.msg_len), RngHandle(SEED))
    short_seed = BitStr.from_int(0, TOY.kappa2 - 8)
    assert decrypt(sk, pk, Ciphertext(short_seed, ct.rand_product, ct.masked_msg)) is None
    other_group = GroupElement(FieldMatrix(2, 7, ((1, 0), (0, 1))))
    assert decrypt(sk, pk, Ciphertext(ct.sealed_seed, other_group, ct.masked_msg)) is None
