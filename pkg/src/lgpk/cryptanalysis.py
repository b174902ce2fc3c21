"""Attack oracles for the two search problems the scheme leans on.

Factoring: given a product exp(x*L)*exp(y*R) of exponentials of known
non-commuting nilpotent generators, recover the scalar pair. The brute-force
solver scans the full (x, y) grid; the meet-in-the-middle solver tabulates
the right factor's image set and probes with left-inverses, trading memory
for a linear-time scan. Insertion: given two such products, produce the
product with component-wise summed scalars; solved here by factoring both
inputs and re-exponentiating.

Both solvers refuse instances whose cost exceeds an explicit budget instead
of grinding forever — at production parameters the refusal arithmetic *is*
the point. `hardness_sweep` turns that into measured scaling curves over a
(prime size x search bound) grid.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .errors import BudgetRefusal, ParameterError
from .matfield import (
    GroupElement,
    NilpotentMatrix,
    canonical_bytes,
    commutes,
    exp_scaled,
    group_mul,
    identity,
    mat_exp,
    mat_mul,
    mat_neg,
)
from .sampler import RngHandle, sample_noncommuting_pair, sample_prime

BRUTE_PAIR_BUDGET = 1 << 32
MITM_TABLE_BUDGET = 1 << 22

SWEEP_CSV_HEADER = "n,p_bits,bound_bits,solver,ops,millis,found"


@dataclass(frozen=True)
class NafInstance:
    """A factoring instance: recover (x, y) with exp(x*left)*exp(y*right) = target,
    searching x in [0, bound_left) and y in [0, bound_right)."""

    left_gen: NilpotentMatrix
    right_gen: NilpotentMatrix
    target: GroupElement
    bound_left: int
    bound_right: int

    def __post_init__(self):
        if self.bound_left < 1 or self.bound_right < 1:
            raise ParameterError("search bounds must be >= 1")
        a, b, t = self.left_gen.base, self.right_gen.base, self.target.mat
        if not (a.n == b.n == t.n and a.p == b.p == t.p):
            raise ParameterError("generators and target must share dimension and modulus")
        if commutes(a, b):
            raise ParameterError("generators must not commute")


@dataclass(frozen=True)
class NaiInstance:
    """An insertion instance: from exp(a*L)exp(b*R) and exp(c*L)exp(d*R),
    produce exp((a+c)*L)exp((b+d)*R)."""

    left_gen: NilpotentMatrix
    right_gen: NilpotentMatrix
    product_one: GroupElement
    product_two: GroupElement
    bound_left: int
    bound_right: int

    def naf_instances(self) -> tuple[NafInstance, NafInstance]:
        return (
            NafInstance(self.left_gen, self.right_gen, self.product_one,
                        self.bound_left, self.bound_right),
            NafInstance(self.left_gen, self.right_gen, self.product_two,
                        self.bound_left, self.bound_right),
        )


@dataclass(frozen=True)
class NafSolution:
    left_scalar: int
    right_scalar: int
    left_image: GroupElement
    right_image: GroupElement
    ops: int


def naf_bruteforce(
    inst: NafInstance, pair_budget: int = BRUTE_PAIR_BUDGET
) -> Optional[NafSolution]:
    """Exhaustive scan of the (x, y) grid, x-major, so the smallest x (and for
    it the smallest y) wins. `ops` reports the number of pairs tried.

    Each step multiplies the running product by a precomputed one-step
    exponential instead of re-evaluating the series, using that
    exp((x+1)*L) = exp(x*L)*exp(L).
    """
    total = inst.bound_left * inst.bound_right
    if total > pair_budget:
        raise BudgetRefusal(
            f"brute force needs {inst.bound_left} * {inst.bound_right} = {total} "
            f"pair trials, over the budget of {pair_budget}"
        )
    step_left = mat_exp(inst.left_gen).mat
    step_right = mat_exp(inst.right_gen).mat
    target = inst.target.mat
    n, p = target.n, target.p
    ops = 0
    left = identity(n, p)
    for x in range(inst.bound_left):
        cur = left
        for y in range(inst.bound_right):
            ops += 1
            if cur == target:
                return NafSolution(
                    x, y, exp_scaled(x, inst.left_gen), exp_scaled(y, inst.right_gen), ops
                )
            cur = mat_mul(cur, step_right)
        left = mat_mul(left, step_left)
    return None


def naf_mitm(
    inst: NafInstance, table_budget: int = MITM_TABLE_BUDGET
) -> Optional[NafSolution]:
    """Meet-in-the-middle: tabulate exp(y*R) for all y, then probe
    exp(x*L)^-1 * target for each x. Cost is bound_left + bound_right group
    operations instead of their product; `ops` counts table entries built
    plus probes made. Ties resolve to the smallest x, then the smallest y.
    """
    if inst.bound_right > table_budget:
        raise BudgetRefusal(
            f"meet-in-the-middle table needs {inst.bound_right} entries, "
            f"over the budget of {table_budget}"
        )
    n, p = inst.target.mat.n, inst.target.mat.p
    step_right = mat_exp(inst.right_gen).mat
    ops = 0
    table: dict[bytes, int] = {}
    cur = identity(n, p)
    for y in range(inst.bound_right):
        ops += 1
        table.setdefault(canonical_bytes(cur), y)
        cur = mat_mul(cur, step_right)
    # exp(L)^-1 = exp(-L): negation stays nilpotent with the same index
    step_left_inv = mat_exp(
        NilpotentMatrix(mat_neg(inst.left_gen.base), inst.left_gen.index)
    ).mat
    inv = identity(n, p)
    for x in range(inst.bound_left):
        ops += 1
        y = table.get(canonical_bytes(mat_mul(inv, inst.target.mat)))
        if y is not None:
            return NafSolution(
                x, y, exp_scaled(x, inst.left_gen), exp_scaled(y, inst.right_gen), ops
            )
        inv = mat_mul(inv, step_left_inv)
    return None


NafSolver = Callable[[NafInstance], Optional[NafSolution]]


def nai_via_naf(inst: NaiInstance, naf_solver: NafSolver) -> Optional[GroupElement]:
    """Solve insertion by factoring both products and re-exponentiating the
    scalar sums: exp((a+c)*L)*exp((b+d)*R). None if either factoring fails."""
    one, two = inst.naf_instances()
    sol_one = naf_solver(one)
    if sol_one is None:
        return None
    sol_two = naf_solver(two)
    if sol_two is None:
        return None
    return group_mul(
        exp_scaled(sol_one.left_scalar + sol_two.left_scalar, inst.left_gen),
        exp_scaled(sol_one.right_scalar + sol_two.right_scalar, inst.right_gen),
    )


@dataclass(frozen=True)
class SweepRow:
    n: int
    p_bits: int
    bound_bits: int
    solver: str
    ops: int
    millis: float
    found: str

    def csv(self) -> str:
        return (
            f"{self.n},{self.p_bits},{self.bound_bits},{self.solver},"
            f"{self.ops},{self.millis:.3f},{self.found}"
        )


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    return "\n".join([SWEEP_CSV_HEADER] + [row.csv() for row in rows]) + "\n"


def hardness_sweep(
    n: int,
    p_bits_list: Sequence[int],
    bound_bits_list: Sequence[int],
    rng: RngHandle,
    solvers: Sequence[str] = ("brute", "mitm"),
    pair_budget: int = BRUTE_PAIR_BUDGET,
    table_budget: int = MITM_TABLE_BUDGET,
) -> list[SweepRow]:
    """Plant one instance per grid cell and measure both solvers on it.

    bound_bits is the total size of the searched pair, split evenly:
    bound_left = bound_right = 2^(bound_bits/2). One master scalar pair is
    drawn up front and each cell's plant is its top slice, so measured op
    counts are non-decreasing along both grid axes; over-budget cells are
    recorded as refused rather than run.
    """
    for b in bound_bits_list:
        if b < 2 or b % 2:
            raise ParameterError(f"bound_bits must be even and >= 2, got {b}")
    s_max = max(b // 2 for b in bound_bits_list)
    for p_bits in p_bits_list:
        if s_max > p_bits - 1:
            raise ParameterError(
                f"bound of 2^{s_max} per scalar cannot be planted faithfully "
                f"inside a {p_bits}-bit prime"
            )
    x_master = rng.randbits(s_max)
    y_master = rng.randbits(s_max)
    rows = []
    for p_bits in p_bits_list:
        p = sample_prime(p_bits, rng)
        left_gen, right_gen = sample_noncommuting_pair(n, p, rng)
        for bound_bits in bound_bits_list:
            s = bound_bits // 2
            x = x_master >> (s_max - s)
            y = y_master >> (s_max - s)
            target = group_mul(exp_scaled(x, left_gen), exp_scaled(y, right_gen))
            inst = NafInstance(left_gen, right_gen, target, 1 << s, 1 << s)
            for name in solvers:
                start = time.perf_counter()
                try:
                    if name == "brute":
                        sol = naf_bruteforce(inst, pair_budget)
                    elif name == "mitm":
                        sol = naf_mitm(inst, table_budget)
                    else:
                        raise ParameterError(f"unknown solver {name!r}")
                except BudgetRefusal:
                    rows.append(SweepRow(n, p_bits, bound_bits, name, 0, 0.0, "refused"))
                    continue
                millis = (time.perf_counter() - start) * 1000.0
                if sol is not None and (sol.left_scalar, sol.right_scalar) == (x, y):
                    found = "yes"
                else:
                    found = "no"
                rows.append(SweepRow(
                    n, p_bits, bound_bits, name, sol.ops if sol else 0, millis, found
                ))
    return rows
