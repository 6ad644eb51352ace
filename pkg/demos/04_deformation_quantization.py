"""Walkthrough: order-by-order deformation of the current product.

The manifest ships the series mu_k(x^p, x^q) = C(q,k) L^k x^{p+q-k}; the
engine checks the truncated associativity through both code paths, computes
the obstruction of the order-1 truncation, recovers an order-2 extension by
exact linear algebra, and extracts the semi-classical bracket, which is
precisely the derivation bracket of the base manifest.

Run:  python3 demos/04_deformation_quantization.py
"""

from conformal_kernel import (
    AnsatzBounds,
    check_n_deformation,
    extend_deformation,
    gen,
    infinitesimal_is_cocycle,
    parse_file,
    semiclassical_limit,
)
from conformal_kernel.deform import obstruction, obstruction_is_cocycle
from conformal_kernel.report import render_poly


def main():
    man = parse_file("demos/ex2_17.alg")
    ds = man.deformation()
    print(f"series order: {ds.order}")

    rep = check_n_deformation(ds, window=3)
    print(f"order-by-order associativity: {rep.status}  [{rep.notes[0]}]")

    ds1 = ds.truncate(1)
    print(f"order-1 cocycle condition:    {infinitesimal_is_cocycle(ds1, window=3).status}")

    theta = obstruction(ds1)
    t = (gen("x", 1), gen("x", 2), gen("x", 1))
    print(f"obstruction value on {t}: {render_poly(theta.value(t))}")
    print(f"obstruction is a 3-cocycle:   {obstruction_is_cocycle(ds1, window=2).status}")

    ext = extend_deformation(ds1, AnsatzBounds(d_deg=2, l_deg=2), window=3)
    print(f"extension within D-deg 2, L-deg 2 ansatz: "
          f"{'recovered' if ext is not None else 'none'}")
    if ext is not None:
        print(f"  recovered order-2 term on (x[1], x[2]): "
              f"{render_poly(ext.mu(2).entry(gen('x', 1), gen('x', 2)))}")

    limit, reports = semiclassical_limit(ds, window=3)
    print("\nsemi-classical limit suite:")
    for r in reports:
        print(f"  {r.name:<16} {r.status}")
    base = man.algebra()
    same = all(limit.bracket.entry(gen("x", m), gen("x", n))
               == base.bracket.entry(gen("x", m), gen("x", n))
               for m in range(5) for n in range(5))
    print(f"limit bracket equals the manifest bracket: {same}")


if __name__ == "__main__":
    main()
