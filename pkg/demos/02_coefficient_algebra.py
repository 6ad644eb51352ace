"""Walkthrough: the coefficient algebra on mode symbols (x[k])_m.

Modes multiply by binomial convolution of the n-th products, with the
rewrite (D a)_n -> -n a_{n-1}.  For the polynomial family the bracket
collapses to a single closed form, which the engine compares against its
transposed rival and flags the mismatch.

Run:  python3 demos/02_coefficient_algebra.py
"""

from conformal_kernel import (
    CoeffAlgebra,
    CoeffElement,
    ModeWindow,
    binomial_identity_check,
    check_coeff_poisson,
    closed_form_comparison,
    coeff_derivation_check,
    gen,
    parse_file,
)


def main():
    alg = parse_file("demos/ex2_17.alg").algebra()
    ca = CoeffAlgebra(alg)

    print("== sample mode brackets [(x[k])_m, (x[l])_n]")
    for (k, m, l, n) in [(1, 2, 1, -1), (2, 1, 1, 3), (0, 2, 3, 0)]:
        got = ca.bracket(CoeffElement.of(gen("x", k), m), CoeffElement.of(gen("x", l), n))
        print(f"  [(x[{k}])_{m}, (x[{l}])_{n}] = {got}   (l*m - k*n = {l*m - k*n})")

    window = ModeWindow(-3, 3, 5)
    print("\n== ordinary Poisson suite of the coefficient algebra")
    for rep in check_coeff_poisson(alg, window):
        print(f"  {rep.name:<22} {rep.status}  ({rep.coverage()})")

    rep = coeff_derivation_check(alg, ModeWindow(-2, 2, 3))
    print(f"  {rep.name:<22} {rep.status}")

    rep = closed_form_comparison(alg, window)
    print(f"\n== closed-form comparison\n  {rep.notes[0]}")

    rep = binomial_identity_check(8, 8)
    print(f"\n== binomial convolution lemma, exhaustive 0..8: {rep.status} "
          f"({rep.checked} instances)")


if __name__ == "__main__":
    main()
