import itertools

import pytest

from conformal_kernel.algebra import GenFamily, LinearRule, eval_op, pair, const_lp
from conformal_kernel.cohomology import (
    AnsatzBounds,
    Cochain,
    bilinear_cochain,
    canon_vars,
    check_action_module_laws,
    check_complex_identities,
    cochain_basis,
    cochain_dtilde,
    cochain_zero_on,
    coboundary_solve,
    d_ce,
    d_ce_degree0,
    d_h,
    d_total,
    hochschild_module_action,
    is_cocycle,
    linear_cochain,
    random_cochain,
    random_gen_tuples,
    zero_cochain,
)
from conformal_kernel.constructors import (
    OrdinaryAlgebra,
    adjoint_module,
    from_derivation,
    ord_table,
)
from conformal_kernel.symcore import DPoly, GenIndex, LambdaPoly, ModElement, Q, gen


def xg(m):
    return gen("x", m)


@pytest.fixture(scope="module")
def setup():
    def prod(g1, g2):
        return ModElement.of(xg(g1.params[0] + g2.params[0]))

    ordx = OrdinaryAlgebra("polyx", [GenFamily("x", 1, lo=0)], product=prod, bracket=ord_table({}))
    D = LinearRule(lambda g: ModElement.of(xg(g.params[0] - 1), DPoly.const(g.params[0]))
                   if g.params[0] >= 1 else ModElement.zero())
    P = from_derivation(ordx, D, window=2)
    V = adjoint_module(P)
    return P, V


def tuples_for(slots, count=3, seed=5):
    return random_gen_tuples(slots, count, seed)


class TestDifferentialBasics:
    def test_zero_cochain_maps_to_zero(self, setup):
        P, V = setup
        for m, n in [(0, 2), (2, 0), (2, 1)]:
            z = zero_cochain(m, n)
            assert cochain_zero_on(d_ce(P, V, z), tuples_for(m + n + 1))
            g1 = z if n else z.retag(m - 1, 1)
            assert cochain_zero_on(d_h(P, V, g1), tuples_for(m + n + 1))

    def test_one_cochain_dce_formula(self, setup):
        # d phi (a_L b) = a_L phi(b) - b_{-L-D} phi(a) - phi([a_L b])
        P, V = setup
        phi = linear_cochain(lambda g: ModElement.of(xg(g.params[0]), DPoly.d_power(1)))
        dphi = d_ce(P, V, phi)
        a = ModElement.of(xg(2))
        b = ModElement.of(xg(1))
        t1 = eval_op(P.bracket, a, phi.value((xg(1),)).coefficient(()), "c1")
        t2 = eval_op(P.bracket, b, phi.value((xg(2),)).coefficient(()), "w")
        t2 = t2.align(("c1", "w")).subst_linear("w", {"c1": -1}, d_coeff=-1)
        br = eval_op(P.bracket, a, b, "c1")
        t3 = LambdaPoly.zero(("c1",))
        for (e,), me in br.terms.items():
            acc = ModElement.zero()
            for g, p in me.terms.items():
                acc = acc + ModElement.of(xg(g.params[0]), DPoly.d_power(1)).dmul(p)
            t3 = t3 + LambdaPoly.of(("c1",), acc, (e,))
        assert dphi.value((xg(2), xg(1))) == t1 - t2 - t3

    def test_degree0_rule(self, setup):
        # v -> (a -> a_{-D} v), flagged as the reconstructed degree-0 rule
        P, V = setup
        v = ModElement.of(xg(1))
        c = d_ce_degree0(V, v)
        got = c.value((xg(2),))
        want = eval_op(P.bracket, ModElement.of(xg(2)), v, "w").subst_dagger(())
        assert got == want.align(())

    def test_dh_of_hom_is_product_defect(self, setup):
        P, V = setup
        phi = linear_cochain(lambda g: ModElement.of(xg(g.params[0])))
        d = d_h(P, V, phi)
        # identity map: a o phi(b) - phi(a o b) + phi(a) o b = a o b
        got = d.value((xg(1), xg(1)))
        want = eval_op(P.product, ModElement.of(xg(1)), ModElement.of(xg(1)), "c1")
        assert got == want


class TestComplexIdentities:
    def test_suite_passes(self, setup):
        P, V = setup
        reports = check_complex_identities(P, V, samples=6, seed=3, max_degree=4,
                                           tuples_per_sample=1)
        assert all(r.status == "pass" for r in reports)
        names = {r.name for r in reports}
        assert "square_dh_dce_bottom_row" in names
        assert "d_total_squared_zero" in names

    def test_corrupted_module_breaks_square(self, setup):
        P, V = setup
        bad_lie = P.bracket.override(
            (xg(1), xg(1)), P.bracket.entry(xg(1), xg(1)).scale(2))
        badV = type(V)("bad", V.families, left=V.left, right=V.right, lie=bad_lie,
                       kind="poisson_module")
        gamma = random_cochain(2, 0, seed=9)
        lhs = d_h(P, badV, d_ce(P, badV, gamma))
        rhs = d_ce(P, badV, d_h(P, badV, gamma))
        diffs = [lhs.value(t) - rhs.value(t) for t in tuples_for(4, 6, seed=11)]
        assert any(not d.is_zero() for d in diffs)


class TestSymmetry:
    def test_lie_cochain_dagger_skew(self, setup):
        gamma = random_cochain(2, 0, seed=21)
        v = gamma.value((xg(1), xg(2)))
        w = gamma.value((xg(2), xg(1))).rename_context(("u",)).subst_dagger(("c1",))
        assert v == w.scale(-1)

    def test_mixed_cochain_plain_skew(self, setup):
        gamma = random_cochain(2, 1, seed=22)
        v = gamma.value((xg(1), xg(2), xg(1)))
        w = gamma.value((xg(2), xg(1), xg(1)))
        w = w.rename_context(("u1", "u2")).align(("u1", "u2", "c1", "c2"))
        w = w.subst_many({"u1": ({"c2": 1}, 0), "u2": ({"c1": 1}, 0)})
        assert v == w.scale(-1)

    def test_dce_image_is_symmetric(self, setup):
        P, V = setup
        phi = random_cochain(2, 0, seed=23)
        img = d_ce(P, V, phi)  # (3,0)
        v = img.value((xg(0), xg(1), xg(2)))
        w = img.value((xg(1), xg(0), xg(2)))
        w = w.rename_context(("u1", "u2")).align(("u1", "u2", "c1", "c2"))
        w = w.subst_many({"u1": ({"c2": 1}, 0), "u2": ({"c1": 1}, 0)})
        assert v == w.scale(-1)


class TestModuleAction:
    def test_zero_cases(self, setup):
        P, V = setup
        gamma = random_cochain(0, 2, seed=31)
        act = hochschild_module_action(P, V, ModElement.zero(), gamma, "·L")
        assert cochain_zero_on(act, tuples_for(2))
        z = zero_cochain(0, 2)
        act = hochschild_module_action(P, V, ModElement.of(xg(1)), z, "·L")
        assert cochain_zero_on(act, tuples_for(2))

    def test_module_laws(self, setup):
        P, V = setup
        reports = {r.name: r for r in check_action_module_laws(P, V, samples=8, seed=2, n=2)}
        assert reports["action_sesquilinearity"].status == "pass"
        assert reports["action_bracket_law"].status == "pass"
        # the bare D-compatibility law carries a structural defect; the
        # engine verifies the identity with the defect term included exactly
        assert reports["action_dtilde_bare_law"].status == "fail"
        assert reports["action_dtilde_with_defect_term"].status == "pass"


class TestCocycleAndSolve:
    def test_structure_pair_is_two_cocycle(self, setup):
        # the algebra's own (product, bracket) pair: d of (varpi, omega) = 0
        P, V = setup
        varpi = bilinear_cochain(P.product)
        omega = bilinear_cochain(P.bracket).retag(2, 0)
        rep = is_cocycle(P, V, {(0, 2): varpi, (2, 0): omega},
                         lambda s: tuples_for(s, 4, seed=13))
        assert rep.status == "pass"

    def test_roundtrip_degree1(self, setup):
        P, V = setup
        bounds = AnsatzBounds(d_deg=1, l_deg=1, param_deg=1)
        target_rule = lambda g: ModElement.of(xg(g.params[0]), DPoly.d_power(1, g.params[0]))
        N = linear_cochain(target_rule)
        image = d_total(P, V, {(1, 0): N})
        sol = coboundary_solve(P, V, image, bounds, lambda s: tuples_for(s, 5, seed=17))
        assert sol is not None
        # image of the solution equals the image of N on fresh tuples
        img2 = d_total(P, V, sol)
        for key in image:
            for t in tuples_for(key[0] + key[1], 4, seed=23):
                assert image[key].value(t) == img2[key].value(t)

    def test_zero_target_solves_to_zero_image(self, setup):
        P, V = setup
        bounds = AnsatzBounds(d_deg=1, l_deg=1, param_deg=1)
        target = {(0, 2): zero_cochain(0, 2), (2, 0): zero_cochain(2, 0)}
        sol = coboundary_solve(P, V, target, bounds, lambda s: tuples_for(s, 4, seed=29))
        assert sol is not None
        img = d_total(P, V, sol)
        for key, coch in img.items():
            assert cochain_zero_on(coch, tuples_for(coch.slots, 4, seed=31))

    def test_h1_membership(self, setup):
        # gamma(a) = a_{-D} v is a cocycle and a coboundary; the solver finds v
        P, V = setup
        v = ModElement.of(xg(1))
        gamma = d_ce_degree0(V, v)
        image = d_total(P, V, {(1, 0): gamma})
        for key, coch in image.items():
            assert cochain_zero_on(coch, tuples_for(coch.slots, 4, seed=37))


class TestDegreeZeroSolve:
    def test_b1_membership_decided(self, setup):
        # gamma(a) = a_{-D} v lies in the coboundaries; the solver recovers
        # a witness v whose image reproduces gamma exactly
        P, V = setup
        v = ModElement.of(xg(2), DPoly.d_power(1)) + ModElement.of(xg(1))
        gamma = d_ce_degree0(V, v)
        sol = coboundary_solve(P, V, {(1, 0): gamma}, AnsatzBounds(d_deg=2, l_deg=0),
                               lambda s: tuples_for(s, 6, seed=41))
        assert sol is not None and (0, 0) in sol
        back = d_ce_degree0(V, sol[(0, 0)])
        for t in tuples_for(1, 6, seed=43):
            assert back.value(t) == gamma.value(t)

    def test_non_coboundary_rejected(self, setup):
        # the identity map is a cocycle for the product but not of the form
        # a -> a_{-D} v within the ansatz
        P, V = setup
        gamma = linear_cochain(lambda g: ModElement.of(g))
        sol = coboundary_solve(P, V, {(1, 0): gamma}, AnsatzBounds(d_deg=2, l_deg=0),
                               lambda s: tuples_for(s, 6, seed=47))
        assert sol is None
