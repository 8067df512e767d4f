"""Stabilizers, modified R-groups and irreducibility verdicts.

The decision pipeline, for an induction datum (sigma, nu) on a standard
Levi:

1. the stabilizer of the datum inside the relative Weyl group, computed
   from twisted stabilizer pairs (w, chi) meaning w.sigma = sigma * chi;
2. the reflection-carrying rays fixed by the datum, the subgroup they
   generate, and the positivity-preserving complement -- the modified
   R-group;
3. the Knapp-Stein ladder: the subgroup generated by reflections with
   vanishing rank-one Plancherel measure, its complement (the classical
   R-group), and the quotient piece sitting between the two;
4. the verdict: irreducible exactly when the modified R-group is trivial
   and every co-rank-one induction over a reflection-carrying ray is
   irreducible.

For unramified principal-series data everything is computed internally:
the torsion component of the character plays the role of sigma (every
Weyl element moves it by an unramified twist), the exponent component is
the real parameter, and the rank-one flags come from the exact rank-one
criterion (a wall value q^{+/-1}, or a fixed point whose value is a
nontrivial character with no exponent).

Since the intrinsic coroot normalization of a relative root is a
convention, every report carries the raw pairing values so a verdict can
be re-derived under another normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .charlat import (
    UnramifiedParam,
    eval_on_coroot,
    is_trivial_character,
    is_wall,
    param_add,
    same_character,
    stabilizer as char_stabilizer,
    weyl_act,
)
from .errors import EngineRejection, InvariantViolation
from .levi import LeviContext, split_off_reflections
from .rootsys import WeylElement

POSITIVITY_NOTE = (
    "complements are taken against the positivity inherited from the ambient "
    "positive relative roots"
)


def _sorted_elements(elems):
    return tuple(sorted(set(elems), key=lambda w: (len(w.word), w.word)))


# -- sigma oracles ----------------------------------------------------------


class SigmaOracle:
    """Combinatorial shadow of the inducing supercuspidal: twisted
    stabilizer pairs plus rank-one flags keyed by ray index.

    kind 'explicit'   -- user-supplied pairs and flags
    kind 'split'      -- unramified principal-series datum; the torsion part
                         of the character acts as sigma, twists and flags are
                         computed on demand
    kind 'trivial'    -- trivial twists on a stated support (defaults to all
                         of W_M), flags supplied or defaulted
    """

    def __init__(self, kind, *, pairs=None, lam=None, support=None,
                 mu_zero=None, corank_irred=None):
        self.kind = kind
        self.pairs = pairs
        self.lam = lam
        self.support = support
        self.mu_zero = mu_zero
        self.corank_irred = corank_irred

    # -- stabilizers -------------------------------------------------------

    def datum_stabilizer(self, ctx: LeviContext, nu: UnramifiedParam) -> tuple:
        if self.kind == "split":
            return char_stabilizer(self.lam, ctx.wm.reps)
        if self.kind == "trivial":
            support = self.support if self.support is not None else ctx.wm.reps
            return _sorted_elements(
                w for w in support if same_character(weyl_act(w, nu), nu)
            )
        hits = []
        for w, chi in self.pairs:
            if same_character(param_add(chi, weyl_act(w, nu)), nu):
                hits.append(w)
        return _sorted_elements(hits)

    def sigma_stabilizer(self, ctx: LeviContext) -> tuple:
        """Elements fixing sigma itself (trivial twist)."""
        if self.kind == "split":
            torsion = self.lam.torsion_only()
            return char_stabilizer(torsion, ctx.wm.reps)
        if self.kind == "trivial":
            return self.support if self.support is not None else ctx.wm.reps
        return _sorted_elements(
            w for w, chi in self.pairs if is_trivial_character(chi)
        )

    def all_twists_trivial(self, ctx: LeviContext) -> bool:
        if self.kind == "trivial":
            return True
        if self.kind == "split":
            torsion = self.lam.torsion_only()
            return all(
                same_character(weyl_act(w, torsion), torsion) for w in ctx.wm.reps
            )
        return all(is_trivial_character(chi) for _, chi in self.pairs)

    # -- flag maps -----------------------------------------------------------

    def values(self, ctx: LeviContext):
        """Raw pairing table of the full character against every ray
        (split mode only)."""
        return {
            r: eval_on_coroot(ctx.rd, self.lam, ctx.rd.rays[r])
            for r in range(len(ctx.rd.rays))
        }

    def corank_map(self, ctx: LeviContext, phi0_sigma) -> dict:
        """Irreducibility flags for the co-rank-one inductions over every
        reflection-carrying ray."""
        domain = sorted(ctx.rd.phi0)
        if self.kind == "split":
            vals = self.values(ctx)
            out = {}
            for r in domain:
                v = vals[r]
                fixed = r in phi0_sigma
                out[r] = not is_wall(v) and not (fixed and not v.is_trivial())
            return out
        if not domain:
            return {}
        if self.corank_irred is None:
            raise EngineRejection(
                "oracle must supply corank_irred flags on every reflection-carrying ray"
            )
        missing = [r for r in domain if r not in self.corank_irred]
        if missing:
            dirs = [list(ctx.rd.rays[r].direction) for r in missing]
            raise EngineRejection(f"corank_irred flags missing for rays {dirs}")
        return {r: bool(self.corank_irred[r]) for r in domain}

    def mu_map(self, ctx: LeviContext, phi0_sigma) -> dict:
        """Plancherel-zero flags on the fixed reflection-carrying rays."""
        domain = sorted(phi0_sigma)
        if self.kind == "split":
            vals = self.values(ctx)
            return {r: vals[r].torsion == 0 for r in domain}
        if not domain:
            return {}
        if self.mu_zero is None:
            raise EngineRejection("oracle must supply mu_zero flags on the fixed rays")
        missing = [r for r in domain if r not in self.mu_zero]
        if missing:
            dirs = [list(ctx.rd.rays[r].direction) for r in missing]
            raise EngineRejection(f"mu_zero flags missing for rays {dirs}")
        return {r: bool(self.mu_zero[r]) for r in domain}

    # -- validation ----------------------------------------------------------

    def validate_pairs(self, ctx: LeviContext) -> None:
        """Twisted-subgroup closure of explicit stabilizer pairs."""
        if self.kind != "explicit":
            return
        rep_set = {w.perm for w in ctx.wm.reps}
        for w, _ in self.pairs:
            if w.perm not in rep_set:
                raise EngineRejection(
                    f"stabilizer pair element {list(w.word)} is not in the relative Weyl group"
                )
        if not any(
            w.is_identity() and is_trivial_character(chi) for w, chi in self.pairs
        ):
            raise EngineRejection("stabilizer pairs must contain (identity, trivial)")
        entries = [(w, chi) for w, chi in self.pairs]

        def has(target, twist):
            return any(
                w.perm == target.perm and same_character(chi, twist)
                for w, chi in entries
            )

        for w1, chi1 in entries:
            inv = ctx.weyl.inv(w1)
            inv_twist = weyl_act(inv, chi1)
            inv_twist = UnramifiedParam(
                chi1.rs,
                chi1.theta,
                tuple(-x for x in inv_twist.q_part),
                tuple(-x for x in inv_twist.t_part),
            )
            if not has(inv, inv_twist):
                raise EngineRejection(
                    f"stabilizer pairs are not inverse-closed at {list(w1.word)}"
                )
            for w2, chi2 in entries:
                product = ctx.weyl.mult(w1, w2)
                twist = param_add(chi1, weyl_act(w1, chi2))
                if not has(product, twist):
                    raise EngineRejection(
                        "stabilizer pairs are not closed under composition at "
                        f"({list(w1.word)}, {list(w2.word)})"
                    )


def unramified_oracle(ctx: LeviContext, lam: UnramifiedParam):
    """Canonical oracle for an unramified principal-series datum: the real
    exponent is the parameter, the torsion twist plays sigma."""
    return lam.q_only(), SigmaOracle("split", lam=lam)


def trivial_twist_oracle(ctx: LeviContext, support=None, mu_zero=None, corank_irred=None):
    return SigmaOracle(
        "trivial", support=support, mu_zero=mu_zero, corank_irred=corank_irred
    )


def explicit_oracle(pairs, mu_zero=None, corank_irred=None):
    return SigmaOracle("explicit", pairs=tuple(pairs), mu_zero=mu_zero,
                       corank_irred=corank_irred)


# -- core operations ---------------------------------------------------------


def stabilizer_sigma_nu(ctx: LeviContext, nu: UnramifiedParam, oracle: SigmaOracle) -> tuple:
    return oracle.datum_stabilizer(ctx, nu)


def phi_sigma_nu_0(ctx: LeviContext, stab) -> frozenset:
    stab_perms = {w.perm for w in stab}
    return frozenset(
        r for r in ctx.rd.phi0 if ctx.rd.reflection_of[r].perm in stab_perms
    )


def _check_orbit_constancy(ctx, stab, flags, label):
    for w in stab:
        perm = ctx.rd.rayperm(w)
        for r, value in flags.items():
            target = abs(perm[r]) - 1
            if target in flags and flags[target] != value:
                raise EngineRejection(
                    f"{label} flags are not constant on stabilizer orbits "
                    f"(rays {r} and {target} under {list(w.word)})"
                )


def _complement(ctx, group_elems, subset):
    """Members of ``group_elems`` keeping the positive rays of ``subset``
    positive (and inside the subset)."""
    subset = sorted(subset)
    member = set(subset)
    out = []
    for w in group_elems:
        perm = ctx.rd.rayperm(w)
        ok = True
        for r in subset:
            signed = perm[r]
            if abs(signed) - 1 not in member:
                raise InvariantViolation(
                    "stabilizer fails to preserve its reflection-carrying rays"
                )
            if signed < 0:
                ok = False
        if ok:
            out.append(w)
    return tuple(out)


def _verify_splitting(ctx, group_elems, small, comp, subset, label):
    small_set = frozenset(w.perm for w in small)
    comp_set = frozenset(w.perm for w in comp)
    if small_set & comp_set != {ctx.weyl.identity.perm}:
        raise InvariantViolation(f"{label}: factors intersect nontrivially")
    if len(group_elems) != len(small) * len(comp):
        raise InvariantViolation(
            f"{label}: |G| = {len(group_elems)} != {len(small)} * {len(comp)}"
        )
    reflections = {r: ctx.rd.reflection_of[r] for r in subset}
    for w in group_elems:
        w0, w1 = split_off_reflections(ctx.rd, ctx.weyl, w, sorted(subset), reflections)
        if w0.perm not in small_set or w1.perm not in comp_set:
            raise InvariantViolation(f"{label}: factorization escaped the factors")


def r_group(ctx: LeviContext, stab, phi0):
    """Reflection subgroup of the stabilizer and its positivity-preserving
    complement, with the factorization verified outright."""
    refl = [ctx.rd.reflection_of[r] for r in sorted(phi0)]
    small = ctx.weyl.closure(refl) if refl else (ctx.weyl.identity,)
    stab_set = {w.perm for w in stab}
    for w in small:
        if w.perm not in stab_set:
            raise InvariantViolation("reflection subgroup escaped the stabilizer")
    comp = _complement(ctx, stab, phi0)
    _verify_splitting(ctx, stab, small, comp, phi0, "stabilizer splitting")
    return small, comp


def delta_1(ctx: LeviContext, nu: UnramifiedParam):
    """Reflection-carrying rays where the exponent pairs to the identity
    value, the group they generate, and its base."""
    rays = frozenset(
        r
        for r in ctx.rd.phi0
        if eval_on_coroot(ctx.rd, nu, ctx.rd.rays[r]).is_trivial()
    )
    refl = [ctx.rd.reflection_of[r] for r in sorted(rays)]
    group = ctx.weyl.closure(refl) if refl else (ctx.weyl.identity,)
    base = ctx.rd.simple_rays(rays) if rays else ()
    return rays, group, base


def knapp_stein_ladder(ctx: LeviContext, stab, phi0, mu_map, small, comp):
    """Classical R-group data sitting above the modified one.

    Returns (W0', R', R0) where W0' is generated by the reflections with
    vanishing rank-one Plancherel measure, R' is its positivity-preserving
    complement in the stabilizer, and R0 = W0 ∩ R' realizes W0/W0'.
    """
    mu_true = sorted(r for r in phi0 if mu_map[r])
    refl = [ctx.rd.reflection_of[r] for r in mu_true]
    w0_prime = ctx.weyl.closure(refl) if refl else (ctx.weyl.identity,)
    r_prime = _complement(ctx, stab, mu_true)
    _verify_splitting(ctx, stab, w0_prime, r_prime, mu_true, "Knapp-Stein splitting")
    small_set = {w.perm for w in small}
    r_prime_set = {w.perm for w in r_prime}
    r0 = tuple(w for w in r_prime if w.perm in small_set)
    comp_set = {w.perm for w in comp}
    if not comp_set <= r_prime_set:
        raise InvariantViolation("modified complement escaped the classical one")
    if len(r0) * len(w0_prime) != len(small):
        raise InvariantViolation("R0 does not realize W0 / W0'")
    if len(r_prime) != len(r0) * len(comp):
        raise InvariantViolation("R' = R0 x R order bookkeeping failed")
    if {w.perm for w in r0} & comp_set != {ctx.weyl.identity.perm}:
        raise InvariantViolation("R0 and R intersect nontrivially")
    r0_set = {w.perm for w in r0}
    for w in r_prime:
        w_inv = ctx.weyl.inv(w)
        for u in r0:
            conj = ctx.weyl.mult(ctx.weyl.mult(w, u), w_inv)
            if conj.perm not in r0_set:
                raise InvariantViolation("R0 is not normal in R'")
            if conj.perm not in r_prime_set:
                raise InvariantViolation("R' is not conjugation-stable")
    return w0_prime, r_prime, r0


# -- reports -----------------------------------------------------------------


@dataclass
class SubgroupSummary:
    order: int
    words: list

    def to_dict(self):
        return {"order": self.order, "words": self.words}


def _summary(elems, cap=64) -> SubgroupSummary:
    words = [[i + 1 for i in w.word] for w in elems[:cap]]
    return SubgroupSummary(order=len(elems), words=words)


@dataclass
class CriterionReport:
    mode: str
    family: str
    rank: int
    theta: list
    relative: dict
    values: list
    phi0_sigma: list
    stab: SubgroupSummary
    w0: SubgroupSummary
    r: SubgroupSummary
    verdict: str
    reasons: list
    delta1: dict | None = None
    w0_prime: SubgroupSummary | None = None
    r_prime: SubgroupSummary | None = None
    r0: SubgroupSummary | None = None
    corank: list | None = None
    mu: list | None = None
    walls: list | None = None
    shortcuts: dict | None = None
    orbit_note: dict | None = None
    positivity_choice: str = POSITIVITY_NOTE
    _ctx: LeviContext = field(default=None, repr=False)
    _stab_elements: tuple = field(default=None, repr=False)
    _r_elements: tuple = field(default=None, repr=False)
    _r_prime_elements: tuple = field(default=None, repr=False)
    _corank_by_ray: dict = field(default=None, repr=False)
    _mu_by_ray: dict = field(default=None, repr=False)
    _phi0_sigma_set: frozenset = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "family": self.family,
            "rank": self.rank,
            "theta": self.theta,
            "relative": self.relative,
            "values": self.values,
            "phi0_sigma": self.phi0_sigma,
            "stabilizer": self.stab.to_dict(),
            "w0": self.w0.to_dict(),
            "r_modified": self.r.to_dict(),
            "verdict": self.verdict,
            "reasons": self.reasons,
            "positivity_choice": self.positivity_choice,
        }
        if self.delta1 is not None:
            out["delta1"] = self.delta1
        if self.w0_prime is not None:
            out["w0_prime"] = self.w0_prime.to_dict()
            out["r_knapp_stein"] = self.r_prime.to_dict()
            out["r0"] = self.r0.to_dict()
        if self.corank is not None:
            out["corank_one"] = self.corank
        if self.mu is not None:
            out["mu_zero"] = self.mu
        if self.walls is not None:
            out["walls"] = self.walls
        if self.shortcuts is not None:
            out["shortcuts"] = self.shortcuts
        if self.orbit_note is not None:
            out["orbit_note"] = self.orbit_note
        return out


def _relative_summary(ctx: LeviContext) -> dict:
    rd, dec = ctx.rd, ctx.dec
    return {
        "relative_roots": len(rd.rays),
        "directions": [list(r.direction) for r in rd.rays],
        "fiber_sizes": [len(r.fiber) for r in rd.rays],
        "phi0": [list(rd.rays[r].direction) for r in sorted(rd.phi0)],
        "delta0": [list(rd.rays[r].direction) for r in rd.delta0],
        "wm_order": len(ctx.wm.reps),
        "w0m_order": len(dec.small),
        "w1m_order": len(dec.complement),
    }


def _value_table(ctx: LeviContext, lam: UnramifiedParam) -> list:
    out = []
    for ray in ctx.rd.rays:
        v = eval_on_coroot(ctx.rd, lam, ray)
        out.append({"direction": list(ray.direction), **v.as_strings()})
    return out


def _orbit_note(ctx: LeviContext) -> dict:
    nontrivial = [w for w in ctx.dec.complement if not w.is_identity()]
    return {
        "w1_words": [[i + 1 for i in w.word] for w in nontrivial],
        "note": (
            "translating the inducing datum by any of these elements yields an "
            "equivalent induction; verdicts are invariant under them"
        ),
    }


# -- the decision procedures --------------------------------------------------


def decide_gps(ctx: LeviContext, nu: UnramifiedParam, oracle: SigmaOracle | None = None) -> CriterionReport:
    """Irreducibility of a generalized principal series from its
    combinatorial datum: trivial modified R-group plus irreducible
    co-rank-one inductions."""
    rd = ctx.rd
    lam_full = None
    if oracle is None:
        if ctx.theta:
            raise EngineRejection(
                "a sigma oracle is required for a proper Levi subset; only the "
                "principal-series case is decided oracle-free"
            )
        lam_full = nu
        nu, oracle = unramified_oracle(ctx, nu)
    elif oracle.kind == "split":
        lam_full = oracle.lam
        nu = oracle.lam.q_only()
    else:
        if not is_trivial_character(nu.torsion_only()):
            raise EngineRejection(
                "with an explicit sigma oracle the inducing exponent must be real; "
                "fold torsion twists into the oracle's stabilizer pairs"
            )
        oracle.validate_pairs(ctx)

    stab = oracle.datum_stabilizer(ctx, nu)
    phi0_sigma = phi_sigma_nu_0(ctx, stab)
    corank = oracle.corank_map(ctx, phi0_sigma)
    mu_map = oracle.mu_map(ctx, phi0_sigma)
    _check_orbit_constancy(ctx, stab, corank, "corank_irred")
    _check_orbit_constancy(ctx, stab, mu_map, "mu_zero")

    small, comp = r_group(ctx, stab, phi0_sigma)
    d1_rays, d1_group, d1_base = delta_1(ctx, nu)
    w0_prime, r_prime, r0 = knapp_stein_ladder(
        ctx, stab, phi0_sigma, mu_map, small, comp
    )

    bad_rays = sorted(r for r in rd.phi0 if not corank[r])
    verdict = "irreducible" if len(comp) == 1 and not bad_rays else "reducible"
    reasons = []
    if len(comp) > 1:
        reasons.append({"clause": "modified-r-group-nontrivial", "order": len(comp)})
    if bad_rays:
        reasons.append(
            {
                "clause": "corank-one-reducible",
                "directions": [list(rd.rays[r].direction) for r in bad_rays],
            }
        )
    if not reasons:
        reasons.append({"clause": "irreducible"})

    d1_set = {w.perm for w in d1_group}
    contains = all(w.perm in d1_set for w in stab)
    asserted = oracle.all_twists_trivial(ctx) and not ctx.theta
    if asserted and not contains:
        raise InvariantViolation(
            "stabilizer escaped the group generated by the identity-value rays"
        )
    delta1_info = {
        "rays": [list(rd.rays[r].direction) for r in sorted(d1_rays)],
        "base": [list(rd.rays[r].direction) for r in d1_base],
        "group_order": len(d1_group),
        "contains_stabilizer": contains,
        "asserted": asserted,
    }

    report = CriterionReport(
        mode="decide-gps",
        family=ctx.rs.cartan.family,
        rank=ctx.rs.rank,
        theta=sorted(i + 1 for i in ctx.theta),
        relative=_relative_summary(ctx),
        values=_value_table(ctx, lam_full) if lam_full is not None else _value_table(ctx, nu),
        phi0_sigma=[list(rd.rays[r].direction) for r in sorted(phi0_sigma)],
        stab=_summary(stab),
        w0=_summary(small),
        r=_summary(comp),
        verdict=verdict,
        reasons=reasons,
        delta1=delta1_info,
        w0_prime=_summary(w0_prime),
        r_prime=_summary(r_prime),
        r0=_summary(r0),
        corank=[
            {
                "direction": list(rd.rays[r].direction),
                "irreducible": corank[r],
                "source": "internal" if oracle.kind == "split" else "oracle",
            }
            for r in sorted(rd.phi0)
        ],
        mu=[
            {"direction": list(rd.rays[r].direction), "mu_zero": mu_map[r]}
            for r in sorted(phi0_sigma)
        ],
        walls=(
            [
                list(rd.rays[r].direction)
                for r in range(len(rd.rays))
                if is_wall(eval_on_coroot(rd, lam_full, rd.rays[r]))
            ]
            if lam_full is not None
            else None
        ),
        orbit_note=_orbit_note(ctx),
        _ctx=ctx,
        _stab_elements=stab,
        _r_elements=comp,
        _r_prime_elements=r_prime,
        _corank_by_ray=corank,
        _mu_by_ray=mu_map,
        _phi0_sigma_set=phi0_sigma,
    )
    report.shortcuts = {
        "regular": regular_shortcut(report),
        "unitary": unitary_shortcut(report, nu),
    }
    return report


def decide_ps_unramified(ctx: LeviContext, lam: UnramifiedParam) -> CriterionReport:
    """Exact principal-series criterion: no wall value anywhere and a
    trivial complement to the reflection part of the character stabilizer."""
    if ctx.theta:
        raise EngineRejection("the principal-series path needs the full torus Levi")
    rd, weyl = ctx.rd, ctx.weyl

    values = {
        r: eval_on_coroot(rd, lam, rd.rays[r]) for r in range(len(rd.rays))
    }
    phi_lambda0 = frozenset(r for r, v in values.items() if v.is_trivial())
    stab = char_stabilizer(lam, weyl.elements)
    small, comp = r_group(ctx, stab, phi_lambda0)
    walls = sorted(r for r, v in values.items() if is_wall(v))

    verdict = "irreducible" if len(comp) == 1 and not walls else "reducible"
    reasons = []
    if walls:
        reasons.append(
            {
                "clause": "wall",
                "directions": [list(rd.rays[r].direction) for r in walls],
            }
        )
    if len(comp) > 1:
        reasons.append({"clause": "r-group-nontrivial", "order": len(comp)})
    if not reasons:
        reasons.append({"clause": "irreducible"})

    return CriterionReport(
        mode="decide-ps",
        family=ctx.rs.cartan.family,
        rank=ctx.rs.rank,
        theta=[],
        relative=_relative_summary(ctx),
        values=_value_table(ctx, lam),
        phi0_sigma=[list(rd.rays[r].direction) for r in sorted(phi_lambda0)],
        stab=_summary(stab),
        w0=_summary(small),
        r=_summary(comp),
        verdict=verdict,
        reasons=reasons,
        walls=[list(rd.rays[r].direction) for r in walls],
        orbit_note=_orbit_note(ctx),
        _ctx=ctx,
        _stab_elements=stab,
        _r_elements=comp,
        _phi0_sigma_set=phi_lambda0,
    )


def regular_shortcut(report: CriterionReport) -> dict:
    """For a regular datum (trivial stabilizer) the verdict must equal the
    conjunction of the co-rank-one flags; disagreement is an internal
    inconsistency, not a data error."""
    if report.stab.order != 1:
        return {"applies": False}
    flags = report._corank_by_ray or {}
    expected = "irreducible" if all(flags.values()) else "reducible"
    if report.verdict != expected:
        raise InvariantViolation(
            "regular shortcut disagrees with the computed verdict"
        )
    return {"applies": True, "verdict": expected}


def unitary_shortcut(report: CriterionReport, nu: UnramifiedParam) -> dict:
    """For a unitary datum the verdict is equivalent to triviality of the
    classical R-group.  Requires the two oracle flag families to agree on
    the fixed rays, and co-rank-one irreducibility off them."""
    if not nu.is_unitary():
        return {"applies": False}
    ctx = report._ctx
    flags = report._corank_by_ray
    mu_map = report._mu_by_ray
    for r in sorted(report._phi0_sigma_set):
        if flags[r] != mu_map[r]:
            raise EngineRejection(
                "unitary datum: corank_irred and mu_zero disagree on ray "
                f"{list(ctx.rd.rays[r].direction)}"
            )
    for r in sorted(ctx.rd.phi0 - report._phi0_sigma_set):
        if not flags[r]:
            raise EngineRejection(
                "unitary datum: a co-rank-one induction with unfixed datum "
                f"cannot be reducible (ray {list(ctx.rd.rays[r].direction)})"
            )
    r_prime_trivial = report.r_prime.order == 1
    expected = "irreducible" if r_prime_trivial else "reducible"
    if report.verdict != expected:
        raise InvariantViolation("unitary shortcut disagrees with the verdict")
    return {"applies": True, "verdict": expected, "r_knapp_stein_trivial": r_prime_trivial}


# -- counting and prediction ---------------------------------------------------


def _root_support(rs, idx):
    return frozenset(j for j, c in enumerate(rs.roots[idx]) if c)


def product_formula_count(ctx: LeviContext, blocks, factor_counts, report: CriterionReport) -> int:
    """Multiply per-block constituent counts after verifying that every
    source of reducibility is confined to a single block."""
    rs = ctx.rs
    blocks = [tuple(sorted(b)) for b in blocks]
    if len(factor_counts) != len(blocks):
        raise EngineRejection("factor_counts must match the number of blocks")
    if any((not isinstance(c, int)) or c < 1 for c in factor_counts):
        raise EngineRejection("factor counts must be positive integers")
    seen = set()
    for b in blocks:
        for i in b:
            if not 0 <= i < rs.rank:
                raise EngineRejection(f"block index {i + 1} out of range")
            if i in seen:
                raise EngineRejection(f"blocks overlap at index {i + 1}")
            seen.add(i)
    if not ctx.theta <= seen:
        raise EngineRejection("blocks must cover the Levi subset")
    for x in range(len(blocks)):
        for y in range(x + 1, len(blocks)):
            for i in blocks[x]:
                for j in blocks[y]:
                    if rs.cartan.matrix[i][j] != 0:
                        raise EngineRejection(
                            f"blocks are not mutually orthogonal: edge between "
                            f"alpha_{i + 1} and alpha_{j + 1}"
                        )

    def block_of(support):
        hits = [k for k, b in enumerate(blocks) if support <= set(b)]
        return hits[0] if hits else None

    flags = report._corank_by_ray
    for r in sorted(ctx.rd.phi0):
        if flags[r]:
            continue
        support = frozenset().union(
            *(_root_support(rs, i) for i in ctx.rd.rays[r].fiber)
        )
        if block_of(support) is None:
            raise EngineRejection(
                "decomposition hypothesis fails: reducible co-rank-one ray "
                f"{list(ctx.rd.rays[r].direction)} crosses the blocks"
            )
    for w in report._r_elements:
        if w.is_identity():
            continue
        moved = frozenset().union(
            *(
                _root_support(rs, i)
                for i in range(len(rs.roots))
                if w.perm[i] != i
            )
        )
        if block_of(moved) is None:
            raise EngineRejection(
                "decomposition hypothesis fails: modified R-group element "
                f"{list(w.word)} crosses the blocks"
            )
    total = 1
    for c in factor_counts:
        total *= c
    return total


def type_a_blocks(ctx: LeviContext) -> list:
    """Block partition of the linear group behind a type-A Levi subset."""
    if ctx.rs.cartan.family != "A":
        raise EngineRejection("block structure is only defined for family A")
    blocks = []
    current = [0]
    for i in range(ctx.rs.rank):
        if i in ctx.theta:
            current.append(i + 1)
        else:
            blocks.append(tuple(current))
            current = [i + 1]
    blocks.append(tuple(current))
    return blocks


def _ray_block_pair(ctx, ray, blocks):
    coords = ctx.rs.roots[ray.fiber[0]]
    lo = min(j for j, c in enumerate(coords) if c)
    hi = max(j for j, c in enumerate(coords) if c)
    member = {}
    for k, b in enumerate(blocks):
        for pos in b:
            member[pos] = k
    return frozenset((member[lo], member[hi + 1]))


@dataclass
class PredictReport:
    applies: bool
    reason: str
    predicted: str | None = None
    flags: list | None = None
    r_sigma_order: int | None = None

    def to_dict(self):
        out = {"applies": self.applies, "reason": self.reason}
        if self.predicted is not None:
            out["predicted_verdict"] = self.predicted
        if self.flags is not None:
            out["corank_one"] = self.flags
        if self.r_sigma_order is not None:
            out["r_sigma_order"] = self.r_sigma_order
        return out


def conjecture_predict(
    ctx: LeviContext,
    nu: UnramifiedParam,
    oracle: SigmaOracle,
    pairwise: dict | None = None,
    corank_all: dict | None = None,
) -> PredictReport:
    """Predicted verdict for general parabolic induction: when the modified
    R-group of the supercuspidal support is trivial, irreducibility should
    equal the co-rank-one conjunction over all relative roots (not only the
    reflection-carrying ones)."""
    sigma_stab = oracle.sigma_stabilizer(ctx)
    phi0_sigma = phi_sigma_nu_0(ctx, sigma_stab)
    small, comp = r_group(ctx, sigma_stab, phi0_sigma)
    if len(comp) != 1:
        return PredictReport(
            applies=False,
            reason=f"modified R-group of the support has order {len(comp)}",
            r_sigma_order=len(comp),
        )
    rd = ctx.rd
    if pairwise is not None:
        blocks = type_a_blocks(ctx)
        flags = {}
        for r, ray in enumerate(rd.rays):
            pair = _ray_block_pair(ctx, ray, blocks)
            if pair not in pairwise:
                raise EngineRejection(
                    f"pairwise matrix missing blocks {sorted(pair)}"
                )
            flags[r] = bool(pairwise[pair])
    else:
        if corank_all is None:
            raise EngineRejection(
                "prediction needs co-rank-one flags over every relative root"
            )
        missing = [r for r in range(len(rd.rays)) if r not in corank_all]
        if missing:
            raise EngineRejection(
                f"co-rank-one flags missing for rays "
                f"{[list(rd.rays[r].direction) for r in missing]}"
            )
        flags = {r: bool(corank_all[r]) for r in range(len(rd.rays))}
    predicted = "irreducible" if all(flags.values()) else "reducible"
    return PredictReport(
        applies=True,
        reason="modified R-group of the support is trivial",
        predicted=predicted,
        flags=[
            {"direction": list(rd.rays[r].direction), "irreducible": flags[r]}
            for r in range(len(rd.rays))
        ],
        r_sigma_order=1,
    )


# -- datum translation (orbit identification) ---------------------------------


def translate_datum(ctx: LeviContext, w1: WeylElement, nu: UnramifiedParam, oracle: SigmaOracle):
    """Transport an induction datum by a Levi-normalizing element; the
    translated datum induces an equivalent representation, so verdicts must
    agree.  Used both for reporting and for verification sweeps."""
    nu_t = weyl_act(w1, nu)
    perm = ctx.rd.rayperm(w1)

    def move_flags(flags):
        if flags is None:
            return None
        return {abs(perm[r]) - 1: v for r, v in flags.items()}

    if oracle.kind == "split":
        return nu_t, SigmaOracle("split", lam=weyl_act(w1, oracle.lam))
    if oracle.kind == "trivial":
        support = oracle.support
        if support is not None:
            w1_inv = ctx.weyl.inv(w1)
            support = _sorted_elements(
                ctx.weyl.mult(ctx.weyl.mult(w1, w), w1_inv) for w in support
            )
        return nu_t, SigmaOracle(
            "trivial",
            support=support,
            mu_zero=move_flags(oracle.mu_zero),
            corank_irred=move_flags(oracle.corank_irred),
        )
    w1_inv = ctx.weyl.inv(w1)
    pairs = tuple(
        (ctx.weyl.mult(ctx.weyl.mult(w1, w), w1_inv), weyl_act(w1, chi))
        for w, chi in oracle.pairs
    )
    return nu_t, SigmaOracle(
        "explicit",
        pairs=pairs,
        mu_zero=move_flags(oracle.mu_zero),
        corank_irred=move_flags(oracle.corank_irred),
    )
