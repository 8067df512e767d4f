"""Acceptance suite.

Each test certifies one acceptance criterion at its stated tolerance
(everything here is exact arithmetic, so tolerances are equalities) and
prints one summary line.  The heavy sweeps are shared through session
fixtures so the whole suite stays inside the desk-scale budget.
"""

from fractions import Fraction
from itertools import product

import pytest

from rgroups import (
    EngineRejection,
    certify,
    decide_gps,
    decide_ps_unramified,
    delta_1,
    param_from_coords,
    product_formula_count,
    translate_datum,
    trivial_twist_oracle,
    weyl_order,
    conjecture_predict,
)
from rgroups.charlat import eval_on_coroot, is_wall
from rgroups.criterion import type_a_blocks, _ray_block_pair
from rgroups.levi import _two_term_decomposable

from conftest import get_context, get_system
from ps_bruteforce import BruteForcePS

DESK_SYSTEMS = [
    ("A", 1), ("A", 2), ("A", 3), ("A", 4), ("A", 5),
    ("B", 2), ("B", 3), ("B", 4), ("B", 5),
    ("C", 2), ("C", 3), ("C", 4), ("C", 5),
    ("D", 3), ("D", 4), ("D", 5),
    ("F", 4), ("G", 2),
]

GRID_TYPES = [("A", 2), ("B", 2), ("G", 2)]
GRID_Q = ["-2", "-1", "-1/2", "0", "1/2", "1", "2"]
GRID_T = ["0", "1/2", "1/3"]


def fw(ctx, q, t):
    return param_from_coords(
        ctx.rs, ctx.theta, [str(x) for x in q], [str(x) for x in t],
        basis="fundamental-weight",
    )


@pytest.fixture(scope="session")
def certification_sweep():
    """Full certification of every Levi subset of every desk system."""
    results = {}
    for family, rank in DESK_SYSTEMS:
        rs, weyl = get_system(family, rank)
        assert len(weyl) == weyl_order(family, rank) <= 51840
        per_theta = []
        for mask in range(2**rank):
            theta = tuple(i for i in range(rank) if mask >> i & 1)
            per_theta.append(certify(rs, weyl, theta))
        results[(family, rank)] = per_theta
    return results


@pytest.fixture(scope="session")
def grid_sweep():
    """decide-ps, degenerate decide-gps and the brute-force evaluator over
    the full unramified grid of the three rank-two types."""
    sweeps = {}
    pairs = [(q, t) for q in GRID_Q for t in GRID_T]
    for family, rank in GRID_TYPES:
        ctx = get_context(family, rank, ())
        brute = BruteForcePS(ctx.rs, ctx.weyl)
        points = []
        for p1, p2 in product(pairs, repeat=rank):
            q = [p1[0], p2[0]]
            t = [p1[1], p2[1]]
            lam = fw(ctx, q, t)
            ps = decide_ps_unramified(ctx, lam)
            gps = decide_gps(ctx, lam)
            bv, br, bw = brute.evaluate(
                [Fraction(x) for x in q], [Fraction(x) for x in t]
            )
            points.append(
                {
                    "q": q,
                    "t": t,
                    "lam": lam,
                    "ps": ps,
                    "gps": gps,
                    "brute": (bv, br, bw),
                    "unitary": all(Fraction(x) == 0 for x in q),
                }
            )
        sweeps[(family, rank)] = (ctx, points)
    return sweeps


def _failures_matching(results, keywords):
    hits = []
    for key, cases in results.items():
        for case in cases:
            for failure in case.failures:
                if any(k in failure for k in keywords):
                    hits.append((key, case.theta, failure))
    return hits


def test_criterion_01_semidirect_certification(certification_sweep):
    cases = sum(len(v) for v in certification_sweep.values())
    decomposition_failures = _failures_matching(
        certification_sweep,
        [
            "identity missing", "inverse", "minimal", "intersect",
            "order product", "factorization", "pair count",
        ],
    )
    assert decomposition_failures == []
    assert cases == sum(2**rank for _, rank in DESK_SYSTEMS)
    print(
        f"\nACCEPTANCE 01 semidirect decomposition: PASS "
        f"({cases} Levi subsets over {len(DESK_SYSTEMS)} systems)"
    )


def test_criterion_02_subsystem_certification(certification_sweep):
    stability_failures = _failures_matching(
        certification_sweep,
        ["phi0 not stable", "conjugation identity", "base ray", "longest-element"],
    )
    assert stability_failures == []
    checked = sum(
        1 for cases in certification_sweep.values() for c in cases if c.phi0_size
    )
    print(
        f"\nACCEPTANCE 02 reflection subsystem stability: PASS "
        f"({checked} subsets with nonempty reflection set)"
    )


def test_criterion_03_rank_one_quadratic_fixture():
    ctx = get_context("A", 1, ())
    lam = fw(ctx, ["0"], ["1/2"])

    ps = decide_ps_unramified(ctx, lam)
    assert ps.verdict == "reducible"
    assert ps.r.order == 2
    assert ps.phi0_sigma == []

    gps = decide_gps(ctx, lam)
    assert gps.verdict == "reducible"
    assert gps.r.order == 1
    assert gps.phi0_sigma == [[1]]
    assert gps.stab.order == 2 and gps.w0.order == 2
    print(
        "\nACCEPTANCE 03 rank-one quadratic fixture: PASS "
        "(R order 2 with empty value-trivial set / R order 1 with full fixed set)"
    )


def test_criterion_04_brute_force_agreement(grid_sweep):
    total = 0
    for (family, rank), (ctx, points) in grid_sweep.items():
        assert len(points) >= 400
        for point in points:
            bv, br, _bw = point["brute"]
            assert point["ps"].verdict == bv, (family, point["q"], point["t"])
            assert point["ps"].r.order == br, (family, point["q"], point["t"])
            assert point["gps"].verdict == bv, (family, point["q"], point["t"])
            total += 1
    print(
        f"\nACCEPTANCE 04 brute-force agreement: PASS "
        f"({total} grid points, exact verdict and R-order equality)"
    )


def test_criterion_05_regular_datum_path(grid_sweep):
    regular = 0
    for (_family, _rank), (ctx, points) in grid_sweep.items():
        for point in points:
            report = point["gps"]
            if report.stab.order != 1:
                continue
            regular += 1
            flags = report._corank_by_ray
            expected = "irreducible" if all(flags.values()) else "reducible"
            assert report.verdict == expected
            assert report.shortcuts["regular"] == {"applies": True, "verdict": expected}
    assert regular > 0
    print(f"\nACCEPTANCE 05 regular-datum path: PASS ({regular} regular grid points)")


def test_criterion_06_unitary_datum_path(grid_sweep):
    unitary = 0
    for (_family, _rank), (ctx, points) in grid_sweep.items():
        for point in points:
            if not point["unitary"]:
                continue
            unitary += 1
            report = point["gps"]
            r_prime_trivial = report.r_prime.order == 1
            assert (report.verdict == "irreducible") == r_prime_trivial
            assert report.shortcuts["unitary"]["applies"]
            # exact splitting bookkeeping of the classical R-group
            assert report.r_prime.order == report.r0.order * report.r.order
            assert report.w0_prime.order * report.r_prime.order == report.stab.order
    assert unitary == 9 * len(grid_sweep)
    print(f"\nACCEPTANCE 06 unitary-datum path: PASS ({unitary} unitary grid points)")


def test_criterion_07_identity_value_subsystem(grid_sweep):
    asserted_points = 0
    for (_family, _rank), (ctx, points) in grid_sweep.items():
        for point in points:
            report = point["gps"]
            rays, group, base = delta_1(ctx, point["lam"].q_only())
            # reflection-closed
            for r in rays:
                perm = ctx.rd.rayperm(ctx.rd.reflection_of[r])
                for other in rays:
                    assert abs(perm[other]) - 1 in rays
            # base consists of indecomposables
            for b in base:
                assert not _two_term_decomposable(ctx.rd, b, sorted(rays))
            if report.delta1["asserted"]:
                asserted_points += 1
                assert report.delta1["contains_stabilizer"]
    assert asserted_points > 0
    print(
        f"\nACCEPTANCE 07 identity-value subsystem: PASS "
        f"(closure and base everywhere; containment at {asserted_points} trivial-twist points)"
    )


def test_criterion_08_translation_invariance(certification_sweep):
    fixtures = []
    for (family, rank), cases in certification_sweep.items():
        for case in cases:
            if case.complement_words:
                fixtures.append((family, rank, case.theta))
    assert fixtures, "search found no nontrivial complements at desk scale"

    translations = 0
    for family, rank, theta in fixtures:
        ctx = get_context(family, rank, theta)
        w1s = [w for w in ctx.dec.complement if not w.is_identity()]
        free = [i for i in range(rank) if i not in ctx.theta]
        grid = product(["0", "1", "-1"], repeat=len(free))
        for combo in grid:
            coords = ["0"] * rank
            for i, v in zip(free, combo):
                coords[i] = v
            nu = fw(ctx, coords, ["0"] * rank)
            corank = {
                r: not is_wall(eval_on_coroot(ctx.rd, nu, ctx.rd.rays[r]))
                for r in ctx.rd.phi0
            }
            oracle = trivial_twist_oracle(ctx, mu_zero=dict(corank), corank_irred=corank)
            base = decide_gps(ctx, nu, oracle)
            for w1 in w1s:
                nu_t, oracle_t = translate_datum(ctx, w1, nu, oracle)
                assert decide_gps(ctx, nu_t, oracle_t).verdict == base.verdict
                translations += 1
    print(
        f"\nACCEPTANCE 08 complement translation invariance: PASS "
        f"({len(fixtures)} fixtures, {translations} translated data)"
    )


def test_criterion_09_product_formula():
    # two orthogonal blocks, counts 2 and 3
    ctx3 = get_context("A", 3, ())
    lam = fw(ctx3, ["1", "1/3", "1"], ["0", "0", "0"])
    report = decide_gps(ctx3, lam)
    assert product_formula_count(ctx3, [[0], [2]], [2, 3], report) == 6

    # three orthogonal blocks, counts 1, 2, 3
    ctx5 = get_context("A", 5, ())
    lam5 = fw(ctx5, ["1", "1/3", "1", "1/4", "1"], ["0"] * 5)
    report5 = decide_gps(ctx5, lam5)
    assert product_formula_count(ctx5, [[0], [2], [4]], [1, 2, 3], report5) == 6

    # a block-crossing reducibility root is rejected
    lam_cross = fw(ctx3, ["1/2", "1/2", "1/4"], ["0", "0", "0"])
    report_cross = decide_gps(ctx3, lam_cross)
    with pytest.raises(EngineRejection):
        product_formula_count(ctx3, [[0], [2]], [2, 2], report_cross)
    print("\nACCEPTANCE 09 product formula: PASS (2x3 = 6, 1x2x3 = 6, crossing rejected)")


def test_criterion_10_type_a_triviality():
    grids = {1: ["-1", "0", "1", "2"], 2: ["-1", "0", "1", "2"],
             3: ["-1", "0", "1"], 4: ["0", "1"], 5: ["0", "1"]}
    points = 0
    for rank in range(1, 6):
        rs, weyl = get_system("A", rank)
        for mask in range(2**rank):
            theta = tuple(i for i in range(rank) if mask >> i & 1)
            ctx = get_context("A", rank, theta)
            blocks = type_a_blocks(ctx)
            free = [i for i in range(rank) if i not in theta]
            predictor_checked = False
            for combo in product(grids[rank], repeat=len(free)):
                coords = ["0"] * rank
                for i, v in zip(free, combo):
                    coords[i] = v
                nu = fw(ctx, coords, ["0"] * rank)
                corank = {
                    r: not is_wall(eval_on_coroot(ctx.rd, nu, ctx.rd.rays[r]))
                    for r in ctx.rd.phi0
                }
                oracle = trivial_twist_oracle(
                    ctx, mu_zero={r: True for r in ctx.rd.phi0}, corank_irred=corank
                )
                report = decide_gps(ctx, nu, oracle)
                assert report.r.order == 1, (rank, theta, combo)
                conjunction = all(corank.values())
                assert (report.verdict == "irreducible") == conjunction

                # pairwise predictor over all relative roots: flags off the
                # reflection-carrying rays are irreducible (distinct block sizes)
                all_flags = {}
                for ray in ctx.rd.rays:
                    if ray.index in ctx.rd.phi0:
                        all_flags[ray.index] = corank[ray.index]
                    else:
                        all_flags[ray.index] = True
                assert all(all_flags.values()) == conjunction
                if not predictor_checked:
                    pairwise = {
                        _ray_block_pair(ctx, ray, blocks): all_flags[ray.index]
                        for ray in ctx.rd.rays
                    }
                    prediction = conjecture_predict(ctx, nu, oracle, pairwise=pairwise)
                    assert prediction.applies
                    assert prediction.predicted == report.verdict
                    predictor_checked = True
                points += 1
    print(f"\nACCEPTANCE 10 type-A triviality: PASS ({points} grid data)")
