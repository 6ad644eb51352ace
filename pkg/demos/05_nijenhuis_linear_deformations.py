"""Walkthrough: Nijenhuis operators and the linear deformations they induce.

Multiplication by x commutes with D and satisfies both deformed-square
identities on the polynomial algebra, so it deforms the structure into
another Poisson conformal algebra, is a homomorphism from the deformed
structure to the original, and the induced perturbation pair is a trivial
linear deformation (all five triviality equations hold).

Run:  python3 demos/05_nijenhuis_linear_deformations.py
"""

from conformal_kernel import (
    LinearRule,
    check_poisson,
    gen,
    linear_deformation_check,
    nijenhuis_check,
    nijenhuis_deform,
    parse_file,
    trivial_deformation_check,
)
from conformal_kernel.deform import nijenhuis_homomorphism_check
from conformal_kernel.report import render_poly


def main():
    man = parse_file("demos/ex2_17.alg")
    P = man.algebra()
    N = man.nijenhuis()  # x[p] -> x[p+1]

    print("== Nijenhuis identities")
    for rep in nijenhuis_check(P, N, window=3):
        print(f"  {rep.name:<20} {rep.status}")

    deformed = nijenhuis_deform(P, N, window=2)
    print("\ndeformed bracket on (x[1], x[2]):",
          render_poly(deformed.bracket.entry(gen("x", 1), gen("x", 2))))

    print("\n== deformed structure passes the Poisson suite")
    for rep in check_poisson(deformed, window=2):
        print(f"  {rep.name:<16} {rep.status}")

    rep = nijenhuis_homomorphism_check(P, deformed, N, window=2)
    print(f"\nN is a homomorphism deformed -> original: {rep.status}")

    print("\n== induced pair as a linear deformation of P")
    for rep in linear_deformation_check(P, deformed.product, deformed.bracket, window=2):
        print(f"  {rep.name:<24} {rep.status}")
    rep = trivial_deformation_check(P, deformed.product, deformed.bracket, N, window=2)
    print(f"  {rep.name:<24} {rep.status}")

    print("\n== scalar Nijenhuis maps c*Id, c in {1, 2, -3}")
    for c in (1, 2, -3):
        ok = all(r.status == "pass" for r in nijenhuis_check(P, LinearRule.scalar(c), window=2))
        print(f"  c = {c:>2}: {'pass' if ok else 'fail'}")


if __name__ == "__main__":
    main()
