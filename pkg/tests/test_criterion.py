from itertools import product

import pytest

from rgroups import (
    EngineRejection,
    decide_gps,
    decide_ps_unramified,
    delta_1,
    explicit_oracle,
    knapp_stein_ladder,
    param_from_coords,
    phi_sigma_nu_0,
    product_formula_count,
    r_group,
    stabilizer_sigma_nu,
    translate_datum,
    trivial_param,
    trivial_twist_oracle,
    conjecture_predict,
)
from rgroups.criterion import unramified_oracle


def fw(ctx, q, t):
    return param_from_coords(
        ctx.rs, ctx.theta, [str(x) for x in q], [str(x) for x in t], basis="fundamental-weight"
    )


def test_stabilizer_with_minimal_oracle(context):
    ctx = context("A", 2, ())
    oracle = explicit_oracle(((ctx.weyl.identity, trivial_param(ctx.rs, ())),))
    nu = fw(ctx, [0, 0], [0, 0])
    assert stabilizer_sigma_nu(ctx, nu, oracle) == (ctx.weyl.identity,)


def test_stabilizer_quadratic_sl2(context):
    ctx = context("A", 1, ())
    lam = fw(ctx, [0], ["1/2"])
    nu, oracle = unramified_oracle(ctx, lam)
    assert len(stabilizer_sigma_nu(ctx, nu, oracle)) == 2


def test_stabilizer_block_swap(context):
    ctx = context("A", 3, (0, 2))
    oracle = trivial_twist_oracle(ctx)  # every relative element fixes sigma
    nu = trivial_param(ctx.rs, ctx.theta)
    assert len(stabilizer_sigma_nu(ctx, nu, oracle)) == 2


def test_phi_sigma_nu_0_contrast(context):
    # quadratic point: the datum-fixed rays differ from the value-trivial ones
    ctx = context("A", 1, ())
    lam = fw(ctx, [0], ["1/2"])
    nu, oracle = unramified_oracle(ctx, lam)
    stab = stabilizer_sigma_nu(ctx, nu, oracle)
    assert phi_sigma_nu_0(ctx, stab) == frozenset({0})
    assert phi_sigma_nu_0(ctx, (ctx.weyl.identity,)) == frozenset()


def test_r_group_both_readings_sl2(context):
    ctx = context("A", 1, ())
    lam = fw(ctx, [0], ["1/2"])
    nu, oracle = unramified_oracle(ctx, lam)
    stab = stabilizer_sigma_nu(ctx, nu, oracle)
    # datum-fixed reading: the reflection accounts for the full stabilizer
    small, comp = r_group(ctx, stab, frozenset({0}))
    assert len(small) == 2 and len(comp) == 1
    # value-trivial reading: nothing to generate, complement is everything
    small2, comp2 = r_group(ctx, stab, frozenset())
    assert len(small2) == 1 and len(comp2) == 2


def test_delta_1_examples(context):
    ctx = context("A", 1, ())
    zero = trivial_param(ctx.rs, ())
    rays, group, base = delta_1(ctx, zero)
    assert rays == frozenset({0}) and len(group) == 2 and base == (0,)

    quadratic = fw(ctx, [0], ["1/2"])
    rays, group, base = delta_1(ctx, quadratic)
    assert rays == frozenset() and len(group) == 1 and base == ()

    ctx2 = context("A", 2, ())
    mixed = fw(ctx2, [0, 1], [0, 0])
    rays, group, base = delta_1(ctx2, mixed)
    alpha1 = next(r.index for r in ctx2.rd.rays if r.direction == (1, 0))
    assert rays == frozenset({alpha1})
    assert base == (alpha1,)


def test_knapp_stein_ladder_cases(context):
    ctx = context("A", 1, ())
    lam = fw(ctx, [0], ["1/2"])
    nu, oracle = unramified_oracle(ctx, lam)
    stab = stabilizer_sigma_nu(ctx, nu, oracle)
    phi0 = phi_sigma_nu_0(ctx, stab)
    small, comp = r_group(ctx, stab, phi0)

    # quadratic: mu vanishing fails, classical R-group survives
    w0p, rp, r0 = knapp_stein_ladder(ctx, stab, phi0, {0: False}, small, comp)
    assert len(w0p) == 1 and len(rp) == 2 and len(r0) == 2 and len(comp) == 1

    # all mu true: ladder collapses onto the modified data
    w0p, rp, r0 = knapp_stein_ladder(ctx, stab, phi0, {0: True}, small, comp)
    assert len(w0p) == len(small) and len(rp) == len(comp) and len(r0) == 1

    # all mu false: nothing splits off
    w0p, rp, r0 = knapp_stein_ladder(ctx, stab, phi0, {0: False}, small, comp)
    assert len(w0p) == 1 and len(rp) == len(stab)


def test_decide_gps_block_swap_fixture(context):
    ctx = context("A", 3, (0, 2))
    nu = trivial_param(ctx.rs, ctx.theta)
    oracle = trivial_twist_oracle(ctx, mu_zero={0: True}, corank_irred={0: True})
    report = decide_gps(ctx, nu, oracle)
    assert report.stab.order == 2
    assert report.r.order == 1
    assert report.verdict == "irreducible"
    assert report.shortcuts["unitary"]["applies"]

    bad = trivial_twist_oracle(ctx, mu_zero={0: False}, corank_irred={0: False})
    report = decide_gps(ctx, nu, bad)
    assert report.verdict == "reducible"
    assert report.reasons[0]["clause"] == "corank-one-reducible"


def test_decide_gps_missing_flags_rejected(context):
    ctx = context("A", 3, (0, 2))
    nu = trivial_param(ctx.rs, ctx.theta)
    oracle = trivial_twist_oracle(ctx, mu_zero={0: True}, corank_irred=None)
    with pytest.raises(EngineRejection, match="corank_irred"):
        decide_gps(ctx, nu, oracle)


def test_decide_gps_requires_oracle_for_proper_levi(context):
    ctx = context("A", 3, (0, 2))
    with pytest.raises(EngineRejection, match="oracle"):
        decide_gps(ctx, trivial_param(ctx.rs, ctx.theta))


def test_decide_gps_rejects_torsion_exponent_with_explicit_oracle(context):
    ctx = context("A", 3, (0, 2))
    nu = fw(ctx, [0, 0, 0], [0, "1/2", 0])
    oracle = trivial_twist_oracle(ctx, mu_zero={0: True}, corank_irred={0: True})
    with pytest.raises(EngineRejection, match="real"):
        decide_gps(ctx, nu, oracle)


def test_decide_ps_sl2_points(context):
    ctx = context("A", 1, ())
    assert decide_ps_unramified(ctx, fw(ctx, [0], [0])).verdict == "irreducible"

    wall = decide_ps_unramified(ctx, fw(ctx, [1], [0]))
    assert wall.verdict == "reducible"
    assert wall.reasons[0]["clause"] == "wall"

    quad = decide_ps_unramified(ctx, fw(ctx, [0], ["1/2"]))
    assert quad.verdict == "reducible"
    assert quad.r.order == 2


def test_regular_shortcut_paths(context):
    ctx = context("A", 1, ())
    report = decide_gps(ctx, fw(ctx, ["1/3"], [0]))
    assert report.stab.order == 1
    assert report.shortcuts["regular"] == {"applies": True, "verdict": "irreducible"}

    wall = decide_gps(ctx, fw(ctx, [1], [0]))
    assert wall.shortcuts["regular"] == {"applies": True, "verdict": "reducible"}

    quad = decide_gps(ctx, fw(ctx, [0], ["1/2"]))
    assert quad.shortcuts["regular"] == {"applies": False}


def test_unitary_shortcut_paths(context):
    ctx = context("A", 1, ())
    quad = decide_gps(ctx, fw(ctx, [0], ["1/2"]))
    assert quad.shortcuts["unitary"]["applies"]
    assert quad.shortcuts["unitary"]["verdict"] == "reducible"

    nonunitary = decide_gps(ctx, fw(ctx, [1], [0]))
    assert nonunitary.shortcuts["unitary"] == {"applies": False}


def test_unitary_oracle_inconsistency_rejected(context):
    ctx = context("A", 3, (0, 2))
    nu = trivial_param(ctx.rs, ctx.theta)
    oracle = trivial_twist_oracle(ctx, mu_zero={0: True}, corank_irred={0: False})
    with pytest.raises(EngineRejection, match="unitary"):
        decide_gps(ctx, nu, oracle)


def test_orbit_constancy_enforced(context):
    ctx = context("A", 2, ())
    nu = trivial_param(ctx.rs, ())
    rays = list(range(len(ctx.rd.rays)))
    flags = {r: (r != 0) for r in rays}
    oracle = trivial_twist_oracle(ctx, mu_zero={r: True for r in rays}, corank_irred=flags)
    with pytest.raises(EngineRejection, match="orbit"):
        decide_gps(ctx, nu, oracle)


def test_oracle_pair_closure_validation(context):
    ctx = context("A", 2, ())
    triv = trivial_param(ctx.rs, ())
    s1 = ctx.weyl.generators[0]
    s2 = ctx.weyl.generators[1]
    pairs = ((ctx.weyl.identity, triv), (s1, triv), (s2, triv))
    oracle = explicit_oracle(
        pairs,
        mu_zero={r: True for r in range(3)},
        corank_irred={r: True for r in range(3)},
    )
    with pytest.raises(EngineRejection, match="closed"):
        decide_gps(ctx, trivial_param(ctx.rs, ()), oracle)


def test_ps_gps_consistency_small_grid(context):
    ctx = context("A", 2, ())
    values = ["-1", "0", "1"]
    torsions = ["0", "1/2"]
    coords = list(product(values, torsions))
    for p1 in coords:
        for p2 in coords:
            lam = fw(ctx, [p1[0], p2[0]], [p1[1], p2[1]])
            ps = decide_ps_unramified(ctx, lam)
            gps = decide_gps(ctx, lam)
            assert ps.verdict == gps.verdict, (p1, p2)


def test_ps_gps_consistency_rank_three(context):
    ctx = context("B", 3, ())
    coords = [("0", "0"), ("1", "0"), ("0", "1/2"), ("-1/2", "1/3")]
    for c1, c2, c3 in product(coords, repeat=3):
        lam = fw(ctx, [c1[0], c2[0], c3[0]], [c1[1], c2[1], c3[1]])
        assert decide_ps_unramified(ctx, lam).verdict == decide_gps(ctx, lam).verdict


def test_translation_invariance_full_wm(context):
    ctx = context("A", 3, (0, 2))
    nu = fw(ctx, [0, "1/2", 0], [0, 0, 0])
    oracle = trivial_twist_oracle(ctx, mu_zero={0: True}, corank_irred={0: True})
    base = decide_gps(ctx, nu, oracle)
    for w in ctx.wm.reps:
        nu_t, oracle_t = translate_datum(ctx, w, nu, oracle)
        assert decide_gps(ctx, nu_t, oracle_t).verdict == base.verdict


def test_product_formula_single_block(context):
    ctx = context("A", 2, ())
    report = decide_gps(ctx, fw(ctx, ["1/3", "1/5"], [0, 0]))
    assert report.verdict == "irreducible"
    assert product_formula_count(ctx, [[0, 1]], [5], report) == 5


def test_product_formula_two_blocks(context):
    ctx = context("A", 3, ())
    lam = fw(ctx, ["1", "1/3", "1"], [0, 0, 0])
    report = decide_gps(ctx, lam)
    assert report.verdict == "reducible"
    assert product_formula_count(ctx, [[0], [2]], [2, 3], report) == 6


def test_product_formula_rejects_crossing(context):
    ctx = context("A", 3, ())
    lam = fw(ctx, ["1/2", "1/2", "1/4"], [0, 0, 0])
    report = decide_gps(ctx, lam)
    ray_dirs = [item["direction"] for item in report.corank if not item["irreducible"]]
    assert [1, 1, 0] in ray_dirs  # the crossing wall
    with pytest.raises(EngineRejection, match="crosses"):
        product_formula_count(ctx, [[0], [2]], [2, 2], report)


def test_product_formula_rejects_non_orthogonal_blocks(context):
    ctx = context("A", 2, ())
    report = decide_gps(ctx, fw(ctx, ["1/3", "1/5"], [0, 0]))
    with pytest.raises(EngineRejection, match="orthogonal"):
        product_formula_count(ctx, [[0], [1]], [1, 1], report)


def test_predict_pairwise_gl_mode(context):
    ctx = context("A", 5, (0, 2, 4))  # three blocks of size two
    nu = trivial_param(ctx.rs, ctx.theta)
    oracle = trivial_twist_oracle(ctx)
    pairs_true = {frozenset(p): True for p in [(0, 1), (0, 2), (1, 2)]}
    prediction = conjecture_predict(ctx, nu, oracle, pairwise=pairs_true)
    assert prediction.applies and prediction.predicted == "irreducible"

    pairs_mixed = dict(pairs_true)
    pairs_mixed[frozenset((0, 2))] = False
    prediction = conjecture_predict(ctx, nu, oracle, pairwise=pairs_mixed)
    assert prediction.predicted == "reducible"


def test_predict_abstains_on_nontrivial_support_r_group(context):
    ctx = context("B", 2, ())
    triv = trivial_param(ctx.rs, ())
    minus_one = ctx.weyl.element_from_word([0, 1, 0, 1])
    assert not minus_one.is_identity()
    oracle = explicit_oracle(((ctx.weyl.identity, triv), (minus_one, triv)))
    prediction = conjecture_predict(
        ctx, triv, oracle, corank_all={r: True for r in range(len(ctx.rd.rays))}
    )
    assert not prediction.applies
    assert prediction.r_sigma_order == 2


def test_predict_regular_support_matches_decide(context):
    ctx = context("A", 2, ())
    triv = trivial_param(ctx.rs, ())
    rays = range(len(ctx.rd.rays))
    for flip in (None, 0):
        flags = {r: (r != flip) for r in rays}
        oracle = explicit_oracle(
            ((ctx.weyl.identity, triv),),
            mu_zero={r: flags[r] for r in rays},
            corank_irred=dict(flags),
        )
        nu = fw(ctx, ["1/3", "1/7"], [0, 0])  # regular exponent
        report = decide_gps(ctx, nu, oracle)
        prediction = conjecture_predict(ctx, nu, oracle, corank_all=dict(flags))
        assert prediction.applies
        assert prediction.predicted == report.verdict
