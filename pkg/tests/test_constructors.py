import itertools
from fractions import Fraction as Q

import pytest

from conformal_kernel.algebra import (
    RULE_VAR,
    ConformalAlgebra,
    GenFamily,
    LinearRule,
    PreconditionFailed,
    StructureRule,
    check_associativity,
    check_poisson,
    eval_op,
    suite_passes,
)
from conformal_kernel.constructors import (
    OrdinaryAlgebra,
    adjoint_module,
    check_derivation,
    check_gd,
    check_module,
    check_pgd,
    current_algebra,
    direct_sum,
    from_derivation,
    ord_table,
    pgd_from_derivation,
    quadratic_from_pgd,
    semidirect_product,
)
from conformal_kernel.symcore import DPoly, GenIndex, LambdaPoly, ModElement, gen


def xg(m):
    return gen("x", m)


def poly_ordinary(hi=None, truncate=None):
    """Q[x] (or Q[x]/(x^truncate)) with the multiplication table on monomials."""
    def prod(g1, g2):
        m = g1.params[0] + g2.params[0]
        if truncate is not None and m >= truncate:
            return ModElement.zero()
        return ModElement.of(xg(m))

    fam = GenFamily("x", 1, lo=0, hi=hi)
    return OrdinaryAlgebra("polyx", [fam], product=prod, bracket=ord_table({}))


def ddx():
    return LinearRule(lambda g: ModElement.of(xg(g.params[0] - 1), DPoly.const(g.params[0]))
                      if g.params[0] >= 1 else ModElement.zero())


def expected_poly_bracket(m, n):
    tgt = m + n - 1
    if tgt < 0:
        return LambdaPoly.zero(("L",))
    return (
        LambdaPoly.of(("L",), ModElement.of(xg(tgt), DPoly.d_power(1, m)), (0,))
        + LambdaPoly.of(("L",), ModElement.of(xg(tgt), DPoly.const(m + n)), (1,))
    )


class TestCurrentAlgebra:
    def test_abelian_passes(self):
        ord_ = OrdinaryAlgebra("ab", [GenFamily("e", 0)], product=ord_table({}), bracket=ord_table({}))
        alg = current_algebra(ord_)
        assert suite_passes(check_poisson(alg, window=1))

    def test_truncated_polynomials_pass(self):
        ord_ = poly_ordinary(hi=2, truncate=3)
        alg = current_algebra(ord_)
        assert suite_passes(check_poisson(alg, window=2))

    def test_nonassociative_product_fails(self):
        e = gen("e")
        # e o e = e, but perturbed so that (e o e) o e != e o (e o e)
        tbl = {(e, e): ModElement.of(e, DPoly.const(2))}
        f = gen("f")
        tbl[(e, f)] = ModElement.of(f)
        tbl[(f, e)] = ModElement.zero()
        tbl[(f, f)] = ModElement.of(e)
        ord_ = OrdinaryAlgebra("bad", [GenFamily("e", 0), GenFamily("f", 0)],
                               product=ord_table(tbl), bracket=ord_table({}))
        alg = current_algebra(ord_, kind="noncommutative_poisson")
        assert check_associativity(alg, window=0).status == "fail"


class TestGDPGD:
    def test_zero_star_zero_bracket(self):
        ord_ = OrdinaryAlgebra("triv", [GenFamily("e", 0)], product=ord_table({}),
                               bracket=ord_table({}), star=ord_table({}))
        assert suite_passes(check_gd(ord_, window=0))
        assert suite_passes(check_pgd(ord_, window=0))

    def test_poly_derivation_star_passes(self):
        ord_ = pgd_from_derivation(poly_ordinary(), ddx())
        assert suite_passes(check_pgd(ord_, window=3))

    def test_commutative_star_with_bracket_fails(self):
        # star = the plain product, bracket [u,w] = u: GD compatibility breaks
        e1, e2 = gen("u"), gen("w")
        prod = ord_table({(e1, e1): ModElement.of(e1), (e1, e2): ModElement.of(e2),
                          (e2, e1): ModElement.of(e2)})
        br = ord_table({(e1, e2): ModElement.of(e1), (e2, e1): ModElement.of(e1).scale(-1)})
        ord_ = OrdinaryAlgebra("cs", [GenFamily("u", 0), GenFamily("w", 0)],
                               product=prod, bracket=br, star=prod)
        reports = {r.name: r for r in check_gd(ord_, window=0)}
        assert reports["lie_jacobi"].status == "pass"
        assert reports["gd_compatibility"].status == "fail"


class TestQuadratic:
    def test_poly_family_gives_derivation_bracket(self):
        alg = quadratic_from_pgd(pgd_from_derivation(poly_ordinary(), ddx()), window=3)
        for m, n in itertools.product(range(4), repeat=2):
            got = eval_op(alg.bracket, ModElement.of(xg(m)), ModElement.of(xg(n)), "L")
            assert got == expected_poly_bracket(m, n)
        assert suite_passes(check_poisson(alg, window=3))

    def test_zero_pgd_gives_current(self):
        ord_ = OrdinaryAlgebra("triv", [GenFamily("e", 0)], product=ord_table({}),
                               bracket=ord_table({}), star=ord_table({}))
        alg = quadratic_from_pgd(ord_, window=0)
        assert alg.bracket.entry(gen("e"), gen("e")).is_zero()

    def test_precondition_enforced(self):
        e1, e2 = gen("u"), gen("w")
        prod = ord_table({(e1, e1): ModElement.of(e1), (e1, e2): ModElement.of(e2),
                          (e2, e1): ModElement.of(e2)})
        br = ord_table({(e1, e2): ModElement.of(e1), (e2, e1): ModElement.of(e1).scale(-1)})
        ord_ = OrdinaryAlgebra("cs", [GenFamily("u", 0), GenFamily("w", 0)],
                               product=prod, bracket=br, star=prod)
        with pytest.raises(PreconditionFailed):
            quadratic_from_pgd(ord_, window=0)


class TestFromDerivation:
    def test_zero_derivation_gives_current(self):
        alg = from_derivation(poly_ordinary(), LinearRule.zero(), window=2)
        assert alg.bracket.entry(xg(1), xg(1)).is_zero()

    def test_ddx_gives_poly_poisson(self):
        alg = from_derivation(poly_ordinary(), ddx(), window=3)
        got = eval_op(alg.bracket, ModElement.of(xg(1)), ModElement.of(xg(1)), "L")
        assert got == expected_poly_bracket(1, 1)

    def test_two_variable_constant_fields(self):
        # Q[x1,x2] windowed by total degree, D = del_1 + 2 del_2
        def prod(g1, g2):
            p = tuple(a + b for a, b in zip(g1.params, g2.params))
            if sum(p) > 3:
                return None
            return ModElement.of(gen("x", *p))

        def dfn(g):
            i, j = g.params
            out = ModElement.zero()
            if i >= 1:
                out = out + ModElement.of(gen("x", i - 1, j), DPoly.const(i))
            if j >= 1:
                out = out + ModElement.of(gen("x", i, j - 1), DPoly.const(2 * j))
            return out

        ord_ = OrdinaryAlgebra("poly2", [GenFamily("x", 2, lo=0, hi=3)],
                               product=prod, bracket=ord_table({}))
        alg = from_derivation(ord_, LinearRule(dfn), window=2)
        reports = check_poisson(alg, window=2)
        assert all(r.status != "fail" for r in reports)
        assert any(r.escaped > 0 for r in reports)  # honest window bookkeeping

    def test_non_derivation_rejected(self):
        bad = LinearRule(lambda g: ModElement.of(xg(g.params[0] + 1)))  # mult by x
        with pytest.raises(PreconditionFailed):
            from_derivation(poly_ordinary(), bad, window=2)


class TestDirectSum:
    def test_sum_of_two_poly_poisson_passes(self):
        a1 = from_derivation(poly_ordinary(), ddx(), window=2)
        a2 = from_derivation(poly_ordinary(), ddx(), window=2)
        s = direct_sum(a1, a2)
        assert suite_passes(check_poisson(s, window=2))

    def test_sum_with_zero_algebra(self):
        a1 = from_derivation(poly_ordinary(), ddx(), window=2)
        zero = current_algebra(OrdinaryAlgebra("z", [GenFamily("e", 0)],
                                               product=ord_table({}), bracket=ord_table({})))
        s = direct_sum(a1, zero)
        assert suite_passes(check_poisson(s, window=2))

    def test_corrupted_summand_localized(self):
        a1 = from_derivation(poly_ordinary(), ddx(), window=2)
        bad_rule = a1.bracket.override(
            (xg(1), xg(1)), a1.bracket.entry(xg(1), xg(1)).scale(3))
        a2 = ConformalAlgebra("bad", a1.families, product=a1.product, bracket=bad_rule,
                              kind="poisson")
        s = direct_sum(a1, a2)
        reports = check_poisson(s, window=2)
        fails = [r for r in reports if r.status == "fail"]
        assert fails
        for r in fails:
            for t, _ in r.witnesses:
                assert all(e.terms and all(g.family.startswith("2.") for g in e.terms)
                           for e in t)


class TestModules:
    def test_adjoint_module_passes(self):
        alg = from_derivation(poly_ordinary(), ddx(), window=3)
        mod = adjoint_module(alg)
        assert suite_passes(check_module(alg, mod, window=2))

    def test_zero_actions_trivial_module(self):
        alg = from_derivation(poly_ordinary(), ddx(), window=2)
        mod = adjoint_module(alg)
        zmod = type(mod)("triv", [GenFamily("t", 0)],
                         left=StructureRule.zero("left"),
                         right=StructureRule.zero("right"),
                         lie=StructureRule.zero("lie"), kind="poisson_module")
        assert suite_passes(check_module(alg, zmod, window=2))

    def test_flipped_sign_fails_lie_axiom(self):
        alg = from_derivation(poly_ordinary(), ddx(), window=2)
        mod = adjoint_module(alg)
        flipped = type(mod)("bad", mod.families, left=mod.left, right=mod.right,
                            lie=StructureRule("lie", lambda g1, g2: (
                                None if mod.lie.entry(g1, g2) is None
                                else mod.lie.entry(g1, g2).scale(-1))),
                            kind="poisson_module")
        reports = {r.name: r for r in check_module(alg, flipped, window=2)}
        assert reports["module_lie"].status == "fail"


class TestSemidirect:
    def test_trivial_module_is_direct_sum_like(self):
        alg = from_derivation(poly_ordinary(), ddx(), window=2)
        zmod = adjoint_module(alg)
        zmod = type(zmod)("triv", [GenFamily("t", 0)],
                          left=StructureRule.zero("left"),
                          right=StructureRule.zero("right"),
                          lie=StructureRule.zero("lie"), kind="poisson_module")
        s = semidirect_product(alg, zmod, window=2)
        assert suite_passes(check_poisson(s, window=2))

    def test_adjoint_semidirect_passes(self):
        alg = from_derivation(poly_ordinary(), ddx(), window=2)
        s = semidirect_product(alg, adjoint_module(alg), window=2)
        reports = check_poisson(s, window=2)
        assert all(r.status != "fail" for r in reports)

    def test_broken_module_rejected_and_correspondence(self):
        alg = from_derivation(poly_ordinary(), ddx(), window=2)
        mod = adjoint_module(alg)
        bad = type(mod)("bad", mod.families, left=mod.left, right=mod.right,
                        lie=StructureRule("lie", lambda g1, g2: (
                            None if mod.lie.entry(g1, g2) is None
                            else mod.lie.entry(g1, g2).scale(-1))),
                        kind="poisson_module")
        with pytest.raises(PreconditionFailed):
            semidirect_product(alg, bad, window=2)
        s = semidirect_product(alg, bad, window=2, precheck=False)
        reports = {r.name: r for r in check_poisson(s, window=2)}
        assert reports["jacobi"].status == "fail"
