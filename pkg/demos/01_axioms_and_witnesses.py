"""Walkthrough: building a Poisson conformal algebra and sweeping its axioms.

The polynomial family x[m] carries the current product x[m] o x[n] = x[m+n]
and the bracket induced by the derivation d/dx.  We build it twice, from a
manifest and from ordinary algebra data, then corrupt one structure constant
and watch the exact witnesses come out.

Run:  python3 demos/01_axioms_and_witnesses.py
"""

from conformal_kernel import (
    ConformalAlgebra,
    GenFamily,
    LinearRule,
    ModElement,
    OrdinaryAlgebra,
    check_poisson,
    eval_op,
    from_derivation,
    gen,
    parse_file,
    suite_passes,
)
from conformal_kernel.constructors import ord_table
from conformal_kernel.report import render_poly
from conformal_kernel.symcore import DPoly


def main():
    # route 1: the shipped manifest
    alg = parse_file("demos/ex2_17.alg").algebra()
    print("== axiom sweep on the manifest algebra (window 4)")
    for rep in check_poisson(alg, window=4):
        print(f"  {rep.name:<16} {rep.status}  ({rep.coverage()})")

    # route 2: the same algebra from ordinary data: Q[x] with D = d/dx
    def prod(g1, g2):
        return ModElement.of(gen("x", g1.params[0] + g2.params[0]))

    ordinary = OrdinaryAlgebra("polyx", [GenFamily("x", 1, lo=0)],
                               product=prod, bracket=ord_table({}))
    ddx = LinearRule(lambda g: ModElement.of(gen("x", g.params[0] - 1),
                                             DPoly.const(g.params[0]))
                     if g.params[0] >= 1 else ModElement.zero())
    built = from_derivation(ordinary, ddx, window=3)
    same = all(
        built.bracket.entry(gen("x", m), gen("x", n)) == alg.bracket.entry(gen("x", m), gen("x", n))
        for m in range(5) for n in range(5)
    )
    print(f"\nderivation construction reproduces the manifest bracket: {same}")

    v = eval_op(alg.bracket, ModElement.of(gen("x", 1)), ModElement.of(gen("x", 1)), "L")
    print(f"[x[1] L x[1]] = {render_poly(v)}")

    # corrupt a single structure constant and watch the suite object
    bad_rule = alg.bracket.override(
        (gen("x", 1), gen("x", 1)),
        alg.bracket.entry(gen("x", 1), gen("x", 1)).scale(2))
    corrupted = ConformalAlgebra("corrupted", alg.families, product=alg.product,
                                 bracket=bad_rule, kind="poisson")
    print("\n== after doubling the [x[1] x[1]] entry")
    for rep in check_poisson(corrupted, window=2):
        print(f"  {rep.name:<16} {rep.status}")
        for t, residual in rep.witnesses[:1]:
            print(f"      witness {t}: {render_poly(residual)}")
    assert not suite_passes(check_poisson(corrupted, window=2))


if __name__ == "__main__":
    main()
