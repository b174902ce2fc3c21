import pytest

from lgpk.cryptanalysis import (
    BRUTE_PAIR_BUDGET,
    SWEEP_CSV_HEADER,
    NafInstance,
    NaiInstance,
    hardness_sweep,
    naf_bruteforce,
    naf_mitm,
    nai_via_naf,
    sweep_csv,
)
from lgpk.errors import BudgetRefusal, ParameterError
from lgpk.matfield import (
    FieldMatrix,
    GroupElement,
    NilpotentMatrix,
    canonical_bytes,
    det,
    exp_scaled,
    group_mul,
    identity,
    mat_mul,
)
from lgpk.sampler import RngHandle, sample_noncommuting_pair

SEED = b"\x99" * 32


def shift_pair(p):
    upper = NilpotentMatrix(FieldMatrix(2, p, ((0, 1), (0, 0))), 2)
    lower = NilpotentMatrix(FieldMatrix(2, p, ((0, 0), (1, 0))), 2)
    return upper, lower


def planted(left, right, x, y, bound_left, bound_right):
    target = group_mul(exp_scaled(x, left), exp_scaled(y, right))
    return NafInstance(left, right, target, bound_left, bound_right)


def test_instance_validation():
    upper, lower = shift_pair(7)
    with pytest.raises(ParameterError):
        NafInstance(upper, lower, GroupElement(identity(2, 7)), 0, 5)
    with pytest.raises(ParameterError):  # commuting generators
        NafInstance(upper, upper, GroupElement(identity(2, 7)), 5, 5)
    with pytest.raises(ParameterError):  # modulus mismatch
        NafInstance(upper, lower, GroupElement(identity(2, 11)), 5, 5)


def test_bruteforce_known_toy_instance():
    # with shift generators the product is [[1+xy, x], [y, 1]] mod 7
    upper, lower = shift_pair(7)
    target = GroupElement(FieldMatrix(2, 7, ((2, 3), (5, 1))))
    sol = naf_bruteforce(NafInstance(upper, lower, target, 7, 7))
    assert (sol.left_scalar, sol.right_scalar) == (3, 5)
    assert mat_mul(sol.left_image.mat, sol.right_image.mat) == target.mat


def test_bruteforce_identity_target():
    upper, lower = shift_pair(7)
    sol = naf_bruteforce(NafInstance(upper, lower, GroupElement(identity(2, 7)), 7, 7))
    assert (sol.left_scalar, sol.right_scalar) == (0, 0)
    assert sol.ops == 1


def test_bruteforce_ops_counts_pairs_tried():
    upper, lower = shift_pair(7)
    sol = naf_bruteforce(planted(upper, lower, 3, 5, 7, 7))
    assert sol.ops == 3 * 7 + 5 + 1


def test_solvers_agree_on_random_instances():
    rng = RngHandle(SEED)
    primes = (7, 11, 13, 17, 19, 23, 29, 31)
    for i in range(100):
        p = primes[i % len(primes)]
        n = 2 if i % 2 else 3
        left, right = sample_noncommuting_pair(n, p, rng)
        x, y = rng.below(p), rng.below(p)
        inst = planted(left, right, x, y, p, p)
        brute = naf_bruteforce(inst)
        mitm = naf_mitm(inst)
        assert brute is not None and mitm is not None
        assert (brute.left_scalar, brute.right_scalar) == (x, y)
        assert (mitm.left_scalar, mitm.right_scalar) == (x, y)
        assert brute.left_image == mitm.left_image
        assert brute.right_image == mitm.right_image
        assert mat_mul(brute.left_image.mat, brute.right_image.mat) == inst.target.mat


def test_mitm_ops_linear_bound():
    upper, lower = shift_pair(251)
    sol = naf_mitm(planted(upper, lower, 200, 13, 251, 251))
    assert sol.ops <= 251 + 251
    assert sol.ops == 251 + 200 + 1  # full table, then probes up to the hit


def test_smallest_scalars_win_when_bounds_exceed_modulus():
    # scalars act mod p, so (x, y) and (x+p, y+p) produce the same target;
    # both solvers must report the smallest representatives
    upper, lower = shift_pair(5)
    inst = planted(upper, lower, 1, 2, 10, 10)
    for solver in (naf_bruteforce, naf_mitm):
        sol = solver(inst)
        assert (sol.left_scalar, sol.right_scalar) == (1, 2)


def image_census(left, right, p):
    seen = set()
    for x in range(p):
        for y in range(p):
            g = mat_mul(exp_scaled(x, left).mat, exp_scaled(y, right).mat)
            seen.add(canonical_bytes(g))
    return seen


def test_not_found_outside_image_set():
    p = 5
    upper, lower = shift_pair(p)
    census = image_census(upper, lower, p)
    assert len(census) == p * p  # the factoring map is injective here
    outsider = None
    for bits in range(p ** 4):
        rows = ((bits % 5, bits // 5 % 5), (bits // 25 % 5, bits // 125 % 5))
        m = FieldMatrix(2, p, rows)
        if det(m) != 0 and canonical_bytes(m) not in census:
            outsider = GroupElement(m)
            break
    assert outsider is not None
    inst = NafInstance(upper, lower, outsider, p, p)
    assert naf_bruteforce(inst) is None
    assert naf_mitm(inst) is None


def test_bruteforce_budget_refusal():
    upper, lower = shift_pair(7)
    inst = NafInstance(upper, lower, GroupElement(identity(2, 7)), 1 << 17, 1 << 17)
    with pytest.raises(BudgetRefusal) as exc:
        naf_bruteforce(inst)
    assert str(1 << 34) in str(exc.value)  # the refusal states its arithmetic
    assert naf_bruteforce(planted(upper, lower, 1, 1, 7, 7), pair_budget=49) is not None
    with pytest.raises(BudgetRefusal):
        naf_bruteforce(planted(upper, lower, 1, 1, 7, 8), pair_budget=49)


def test_mitm_budget_refusal():
    upper, lower = shift_pair(7)
    inst = NafInstance(upper, lower, GroupElement(identity(2, 7)), 4, 1 << 23)
    with pytest.raises(BudgetRefusal):
        naf_mitm(inst)
    assert naf_mitm(planted(upper, lower, 1, 1, 7, 7), table_budget=7) is not None


def test_nai_known_toy_instance():
    # (a,b,c,d) = (1,2,3,4): the answer is exp(4*L)*exp(6*R) = [[4,4],[6,1]] mod 7
    upper, lower = shift_pair(7)
    inst = NaiInstance(
        upper,
        lower,
        group_mul(exp_scaled(1, upper), exp_scaled(2, lower)),
        group_mul(exp_scaled(3, upper), exp_scaled(4, lower)),
        7,
        7,
    )
    for solver in (naf_bruteforce, naf_mitm):
        out = nai_via_naf(inst, solver)
        assert out.mat.rows == ((4, 4), (6, 1))


def test_nai_identity_insertion():
    upper, lower = shift_pair(7)
    delta_one = group_mul(exp_scaled(2, upper), exp_scaled(3, lower))
    inst = NaiInstance(upper, lower, delta_one, GroupElement(identity(2, 7)), 7, 7)
    assert nai_via_naf(inst, naf_bruteforce).mat == delta_one.mat


def test_nai_fails_when_factoring_fails():
    p = 5
    upper, lower = shift_pair(p)
    delta_one = group_mul(exp_scaled(1, upper), exp_scaled(1, lower))
    inst = NaiInstance(upper, lower, delta_one, delta_one, 2, 1)  # y=1 out of bounds
    assert nai_via_naf(inst, naf_bruteforce) is None


def test_sweep_grid_shape_and_success():
    rows = hardness_sweep(2, [8, 10], [4, 6, 8], RngHandle(SEED))
    assert len(rows) == 2 * 3 * 2
    assert all(row.found == "yes" for row in rows)
    assert all(row.ops > 0 for row in rows)


def test_sweep_costs_monotone_along_both_axes():
    rows = hardness_sweep(2, [8, 12, 16], [4, 8, 12], RngHandle(SEED))
    by_key = {(r.solver, r.p_bits, r.bound_bits): r.ops for r in rows}
    for solver in ("brute", "mitm"):
        for p_bits in (8, 12, 16):
            ops = [by_key[(solver, p_bits, b)] for b in (4, 8, 12)]
            assert ops == sorted(ops)
        for b in (4, 8, 12):
            ops = [by_key[(solver, p_bits, b)] for p_bits in (8, 12, 16)]
            assert ops == sorted(ops)


def test_sweep_records_refusals():
    rows = hardness_sweep(
        2, [16], [8, 16], RngHandle(SEED), pair_budget=1 << 10, table_budget=1 << 10
    )
    brute = {r.bound_bits: r for r in rows if r.solver == "brute"}
    mitm = {r.bound_bits: r for r in rows if r.solver == "mitm"}
    assert brute[8].found == "yes"  # 2^8 pairs within 2^10
    assert brute[16].found == "refused"
    assert mitm[8].found == "yes" and mitm[16].found == "yes"  # tables of 2^4, 2^8


def test_sweep_validates_grid():
    with pytest.raises(ParameterError):
        hardness_sweep(2, [8], [7], RngHandle(SEED))  # odd bound_bits
    with pytest.raises(ParameterError):
        hardness_sweep(2, [8], [16], RngHandle(SEED))  # 2^8 scalars in 8-bit prime


def test_sweep_csv_format():
    rows = hardness_sweep(2, [8], [4], RngHandle(SEED))
    text = sweep_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == SWEEP_CSV_HEADER
    assert len(lines) == 3
    first = lines[1].split(",")
    assert first[0] == "2" and first[1] == "8" and first[2] == "4"
    assert first[3] in ("brute", "mitm") and first[6] == "yes"


def test_sweep_deterministic_given_seed():
    a = hardness_sweep(2, [8], [4, 6], RngHandle(SEED))
    b = hardness_sweep(2, [8], [4, 6], RngHandle(SEED))
    assert [(r.solver, r.ops, r.found) for r in a] == [(r.solver, r.ops, r.found) for r in b]
