"""Builders that turn ordinary algebraic data into conformal algebras, plus
conformal modules, their axiom checkers, and semidirect products.

Ordinary (non-conformal) algebras are presented the same way as conformal
ones (tables on generator pairs) except that values are plain module
elements with constant coefficients (no D, no spectral variables).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

from .algebra import (
    RULE_VAR,
    CheckReport,
    ConformalAlgebra,
    GenFamily,
    KIND_NC_POISSON,
    KIND_POISSON,
    LinearRule,
    PreconditionFailed,
    StructureRule,
    WindowEscape,
    const_lp,
    pair,
    run_tuple_check,
    suite_fails,
    suite_passes,
    window_generators,
)
from .symcore import DPoly, GenIndex, LambdaPoly, ModElement, Q

OrdRule = Callable[[GenIndex, GenIndex], ModElement | None]

L, M = "L", "M"


# ---------------------------------------------------------------------------
# ordinary algebras
# ---------------------------------------------------------------------------

@dataclass
class OrdinaryAlgebra:
    """Finite-basis (or windowed-family) ordinary algebra data.

    Any of the operations may be absent; checkers demand what they need.
    Values must be D-free module elements.
    """

    name: str
    families: list[GenFamily]
    product: OrdRule | None = None
    bracket: OrdRule | None = None
    star: OrdRule | None = None
    derivation: LinearRule | None = None

    def generators(self, window: int) -> list[GenIndex]:
        return window_generators(self.families, window)


def ord_table(table: dict[tuple[GenIndex, GenIndex], ModElement], total: bool = True) -> OrdRule:
    def fn(g1, g2):
        v = table.get((g1, g2))
        if v is None:
            return ModElement.zero() if total else None
        return v
    return fn


def ord_apply(rule: OrdRule, u: ModElement, v: ModElement) -> ModElement:
    """Bilinear extension of an ordinary table (no sesquilinearity involved)."""
    out = ModElement.zero()
    for g1, p1 in u.terms.items():
        c1 = _const_of(p1)
        for g2, p2 in v.terms.items():
            c2 = _const_of(p2)
            w = rule(g1, g2)
            if w is None:
                raise WindowEscape(("ordinary", g1, g2))
            out = out + w.scale(c1 * c2)
    return out


def _const_of(p: DPoly) -> Q:
    if p.degree > 0:
        raise ValueError("ordinary algebra element has a D-dependent coefficient")
    return p.coeffs[0] if p.coeffs else Q(0)


def _gens_m(ord_: OrdinaryAlgebra, window: int) -> list[ModElement]:
    return [ModElement.of(g) for g in ord_.generators(window)]


# ordinary axiom sweeps -------------------------------------------------------

def _ord_check(name, tuples, residual, notes=()):
    return run_tuple_check(name, tuples, residual, notes)


def check_ordinary_associativity(ord_: OrdinaryAlgebra, window: int) -> CheckReport:
    gens = _gens_m(ord_, window)
    f = ord_.product
    return _ord_check(
        "ord_associativity",
        itertools.product(gens, repeat=3),
        lambda a, b, c: _as_lp(ord_apply(f, ord_apply(f, a, b), c) - ord_apply(f, a, ord_apply(f, b, c))),
    )


def _as_lp(me: ModElement) -> LambdaPoly:
    return const_lp(me)


def check_ordinary_poisson(ord_: OrdinaryAlgebra, window: int, commutative: bool = True) -> list[CheckReport]:
    gens = _gens_m(ord_, window)
    prod, br = ord_.product, ord_.bracket
    reports = [check_ordinary_associativity(ord_, window)]
    if commutative:
        reports.append(_ord_check(
            "ord_commutativity",
            itertools.product(gens, repeat=2),
            lambda a, b: _as_lp(ord_apply(prod, a, b) - ord_apply(prod, b, a)),
        ))
    reports.append(_ord_check(
        "ord_antisymmetry",
        itertools.product(gens, repeat=2),
        lambda a, b: _as_lp(ord_apply(br, a, b) + ord_apply(br, b, a)),
    ))
    reports.append(_ord_check(
        "ord_jacobi",
        itertools.product(gens, repeat=3),
        lambda a, b, c: _as_lp(
            ord_apply(br, a, ord_apply(br, b, c))
            - ord_apply(br, ord_apply(br, a, b), c)
            - ord_apply(br, b, ord_apply(br, a, c))
        ),
    ))
    reports.append(_ord_check(
        "ord_leibniz",
        itertools.product(gens, repeat=3),
        lambda a, b, c: _as_lp(
            ord_apply(br, a, ord_apply(prod, b, c))
            - ord_apply(prod, ord_apply(br, a, b), c)
            - ord_apply(prod, b, ord_apply(br, a, c))
        ),
    ))
    return reports


def check_gd(ord_: OrdinaryAlgebra, window: int = 3) -> list[CheckReport]:
    """Novikov + Lie + Gel'fand-Dorfman compatibility."""
    gens = _gens_m(ord_, window)
    star, br = ord_.star, ord_.bracket
    reports = [
        _ord_check(
            "novikov_right_commute",
            itertools.product(gens, repeat=3),
            lambda a, b, c: _as_lp(
                ord_apply(star, ord_apply(star, a, b), c) - ord_apply(star, ord_apply(star, a, c), b)
            ),
        ),
        _ord_check(
            "novikov_left_symmetry",
            itertools.product(gens, repeat=3),
            lambda a, b, c: _as_lp(
                ord_apply(star, ord_apply(star, a, b), c) - ord_apply(star, a, ord_apply(star, b, c))
                - ord_apply(star, ord_apply(star, b, a), c) + ord_apply(star, b, ord_apply(star, a, c))
            ),
        ),
        _ord_check(
            "lie_antisymmetry",
            itertools.product(gens, repeat=2),
            lambda a, b: _as_lp(ord_apply(br, a, b) + ord_apply(br, b, a)),
        ),
        _ord_check(
            "lie_jacobi",
            itertools.product(gens, repeat=3),
            lambda a, b, c: _as_lp(
                ord_apply(br, a, ord_apply(br, b, c))
                - ord_apply(br, ord_apply(br, a, b), c)
                - ord_apply(br, b, ord_apply(br, a, c))
            ),
        ),
        _ord_check(
            "gd_compatibility",
            itertools.product(gens, repeat=3),
            lambda a, b, c: _as_lp(
                ord_apply(br, ord_apply(star, a, b), c)
                + ord_apply(star, ord_apply(br, a, b), c)
                - ord_apply(star, a, ord_apply(br, b, c))
                - ord_apply(br, ord_apply(star, a, c), b)
                - ord_apply(star, ord_apply(br, a, c), b)
            ),
        ),
    ]
    return reports


def check_pgd(ord_: OrdinaryAlgebra, window: int = 3, commutative: bool = True) -> list[CheckReport]:
    """GD + ordinary Poisson + the two product/star compatibility laws."""
    gens = _gens_m(ord_, window)
    star, prod = ord_.star, ord_.product
    reports = check_gd(ord_, window) + check_ordinary_poisson(ord_, window, commutative)
    reports.append(_ord_check(
        "pgd_right_compat",  # (b o c) * a = b o (c * a) = (b * a) o c
        itertools.product(gens, repeat=3),
        lambda a, b, c: _pgd_right(star, prod, a, b, c),
    ))
    reports.append(_ord_check(
        "pgd_left_derivation",  # a * (b o c) = (a*b) o c + b o (a*c)
        itertools.product(gens, repeat=3),
        lambda a, b, c: _as_lp(
            ord_apply(star, a, ord_apply(prod, b, c))
            - ord_apply(prod, ord_apply(star, a, b), c)
            - ord_apply(prod, b, ord_apply(star, a, c))
        ),
    ))
    return reports


def _pgd_right(star, prod, a, b, c) -> LambdaPoly:
    # residual packs both equalities of (b o c)*a = b o (c*a) = (b*a) o c
    lhs = ord_apply(star, ord_apply(prod, b, c), a)
    r1 = lhs - ord_apply(prod, b, ord_apply(star, c, a))
    r2 = lhs - ord_apply(prod, ord_apply(star, b, a), c)
    return _as_lp(r1).align(("·r",)) + LambdaPoly.of(("·r",), r2, (1,))


def check_derivation(ord_: OrdinaryAlgebra, D: LinearRule, window: int = 3) -> list[CheckReport]:
    gens = _gens_m(ord_, window)
    reports = []
    if ord_.product is not None:
        prod = ord_.product
        reports.append(_ord_check(
            "derivation_on_product",
            itertools.product(gens, repeat=2),
            lambda a, b: _as_lp(
                D.apply(ord_apply(prod, a, b))
                - ord_apply(prod, D.apply(a), b) - ord_apply(prod, a, D.apply(b))
            ),
        ))
    if ord_.bracket is not None:
        br = ord_.bracket
        reports.append(_ord_check(
            "derivation_on_bracket",
            itertools.product(gens, repeat=2),
            lambda a, b: _as_lp(
                D.apply(ord_apply(br, a, b))
                - ord_apply(br, D.apply(a), b) - ord_apply(br, a, D.apply(b))
            ),
        ))
    return reports


# ---------------------------------------------------------------------------
# conformal algebras from ordinary data
# ---------------------------------------------------------------------------

def current_algebra(ord_: OrdinaryAlgebra, kind: str = KIND_POISSON) -> ConformalAlgebra:
    """P = Q[D] (x) A with lambda-independent structure rules."""
    prod = ord_.product or ord_table({})
    br = ord_.bracket or ord_table({})

    def pfn(g1, g2):
        v = prod(g1, g2)
        return None if v is None else LambdaPoly.of((RULE_VAR,), v)

    def bfn(g1, g2):
        v = br(g1, g2)
        return None if v is None else LambdaPoly.of((RULE_VAR,), v)

    return ConformalAlgebra(
        f"current({ord_.name})", list(ord_.families),
        product=StructureRule("product", pfn),
        bracket=StructureRule("bracket", bfn),
        kind=kind,
    )


def quadratic_from_pgd(ord_: OrdinaryAlgebra, window: int = 3, kind: str = KIND_POISSON,
                       precheck: bool = True) -> ConformalAlgebra:
    """Current product plus quadratic bracket D(b*a) + L(a*b + b*a) + [b,a]."""
    if precheck:
        reports = check_pgd(ord_, window, commutative=(kind == KIND_POISSON))
        if suite_fails(reports):
            raise PreconditionFailed("PGD axioms fail", reports)
    star = ord_.star
    br = ord_.bracket or ord_table({})
    prod = ord_.product

    def bfn(g1, g2):
        ba = star(g2, g1)
        ab = star(g1, g2)
        lie = br(g2, g1)
        if ba is None or ab is None or lie is None:
            return None
        out = LambdaPoly.of((RULE_VAR,), ba.d_apply(1) + lie, (0,))
        return out + LambdaPoly.of((RULE_VAR,), ab + ba, (1,))

    def pfn(g1, g2):
        v = prod(g1, g2)
        return None if v is None else LambdaPoly.of((RULE_VAR,), v)

    return ConformalAlgebra(
        f"quadratic({ord_.name})", list(ord_.families),
        product=StructureRule("product", pfn),
        bracket=StructureRule("bracket", bfn),
        kind=kind,
    )


def pgd_from_derivation(ord_: OrdinaryAlgebra, D: LinearRule) -> OrdinaryAlgebra:
    """Attach the Novikov product a*b = a o D(b) to a Poisson algebra."""
    prod = ord_.product

    def star(g1, g2):
        db = D.entry(g2)
        return ord_apply(prod, ModElement.of(g1), db)

    return OrdinaryAlgebra(f"{ord_.name}*D", list(ord_.families),
                           product=ord_.product, bracket=ord_.bracket or ord_table({}),
                           star=star, derivation=D)


def from_derivation(ord_: OrdinaryAlgebra, D: LinearRule, window: int = 3,
                    kind: str = KIND_POISSON) -> ConformalAlgebra:
    """Quadratic Poisson conformal algebra of a Poisson algebra with derivation."""
    reports = check_derivation(ord_, D, window)
    if suite_fails(reports):
        raise PreconditionFailed("D is not a derivation", reports)
    pgd = pgd_from_derivation(ord_, D)
    return quadratic_from_pgd(pgd, window, kind, precheck=False)


def direct_sum(p1: ConformalAlgebra, p2: ConformalAlgebra,
               prefixes: tuple[str, str] = ("1.", "2.")) -> ConformalAlgebra:
    """Componentwise structure on the disjoint union; cross terms vanish."""
    def remap(families, prefix):
        return [GenFamily(prefix + f.name, f.arity, f.lo, f.hi) for f in families]

    def side_of(g: GenIndex):
        for i, pre in enumerate(prefixes):
            if g.family.startswith(pre):
                return i, GenIndex(g.family[len(pre):], g.params)
        raise ValueError(f"generator {g} belongs to neither summand")

    def lift(rule_pair, kindname):
        def fn(g1, g2):
            s1, b1 = side_of(g1)
            s2, b2 = side_of(g2)
            if s1 != s2:
                return LambdaPoly.zero((RULE_VAR,))
            v = rule_pair[s1].entry(b1, b2)
            if v is None:
                return None
            return v.apply_mod(
                lambda me: ModElement({GenIndex(prefixes[s1] + g.family, g.params): p
                                       for g, p in me.terms.items()})
            )
        return StructureRule(kindname, fn)

    kind = p1.kind if p1.kind == p2.kind else KIND_NC_POISSON
    return ConformalAlgebra(
        f"({p1.name})(+)({p2.name})",
        remap(p1.families, prefixes[0]) + remap(p2.families, prefixes[1]),
        product=lift((p1.product, p2.product), "product"),
        bracket=lift((p1.bracket, p2.bracket), "bracket"),
        kind=kind,
    )


# ---------------------------------------------------------------------------
# conformal modules
# ---------------------------------------------------------------------------

ASSOC_MODULE = "assoc_module"
LIE_MODULE = "lie_module"
POISSON_MODULE = "poisson_module"


@dataclass
class ConformalModule:
    """Module data over a conformal algebra.

    ``left``  : (a, v) -> a o_L v        (A x V -> V[L])
    ``right`` : (v, a) -> v o_L a        (V x A -> V[L])
    ``lie``   : (a, v) -> a_L v          (A x V -> V[L])
    """

    name: str
    families: list[GenFamily]
    left: StructureRule | None = None
    right: StructureRule | None = None
    lie: StructureRule | None = None
    kind: str = POISSON_MODULE

    def generators(self, window: int) -> list[GenIndex]:
        return window_generators(self.families, window)


def adjoint_module(alg: ConformalAlgebra) -> ConformalModule:
    """(A; L, R, ad): left/right lambda-multiplication and the adjoint action."""
    kind = POISSON_MODULE
    if alg.bracket is None:
        kind = ASSOC_MODULE
    elif alg.product is None:
        kind = LIE_MODULE
    return ConformalModule(
        f"adjoint({alg.name})", list(alg.families),
        left=alg.product, right=alg.product, lie=alg.bracket, kind=kind,
    )


def _dagger_pair(rule: StructureRule, U: LambdaPoly, W: LambdaPoly, out_var: str) -> LambdaPoly:
    """U op_{-out_var - D} W: pair on a fresh variable, then dagger it."""
    ctx = U.context
    tmp = "·dg"
    res = pair(rule, U, W, tmp)
    res = res.align(ctx + (out_var, tmp))
    return res.subst_linear(tmp, {out_var: -1}, d_coeff=-1)


def check_module(alg: ConformalAlgebra, mod: ConformalModule, window: int = 3) -> list[CheckReport]:
    """Verify the module axiom set matching the declared kind on the window."""
    agens = [ModElement.of(g) for g in alg.generators(window)]
    vgens = [ModElement.of(g) for g in mod.generators(window)]
    reports: list[CheckReport] = []
    sum_LM = {L: 1, M: 1}

    def lp2(x):
        return const_lp(x)

    if mod.kind in (ASSOC_MODULE, POISSON_MODULE):
        prod, lft, rgt = alg.product, mod.left, mod.right

        def assoc_left(a, b, v):
            lhs = pair(lft, pair(prod, lp2(a), lp2(b), L), lp2(v).align((L,)), "·t")
            lhs = lhs.align((L, M, "·t")).subst_linear("·t", sum_LM)
            rhs = pair(lft, lp2(a).align((M,)), pair(lft, lp2(b), lp2(v), M), L).align((L, M))
            return lhs - rhs

        def assoc_right(v, b, a):
            lhs = pair(rgt, pair(rgt, lp2(v), lp2(b), L), lp2(a).align((L,)), "·t")
            lhs = lhs.align((L, M, "·t")).subst_linear("·t", sum_LM)
            rhs = pair(rgt, lp2(v).align((M,)), pair(prod, lp2(b), lp2(a), M), L).align((L, M))
            return lhs - rhs

        def assoc_mixed(a, v, b):
            lhs = pair(rgt, pair(lft, lp2(a), lp2(v), L), lp2(b).align((L,)), "·t")
            lhs = lhs.align((L, M, "·t")).subst_linear("·t", sum_LM)
            rhs = pair(lft, lp2(a).align((M,)), pair(rgt, lp2(v), lp2(b), M), L).align((L, M))
            return lhs - rhs

        reports.append(run_tuple_check(
            "module_assoc_left", itertools.product(agens, agens, vgens), assoc_left))
        reports.append(run_tuple_check(
            "module_assoc_right", itertools.product(vgens, agens, agens), assoc_right))
        reports.append(run_tuple_check(
            "module_assoc_mixed", itertools.product(agens, vgens, agens), assoc_mixed))

    if mod.kind in (LIE_MODULE, POISSON_MODULE):
        br, lie = alg.bracket, mod.lie

        def lie_axiom(a, b, v):
            lhs = pair(lie, pair(br, lp2(a), lp2(b), L), lp2(v).align((L,)), "·t")
            lhs = lhs.align((L, M, "·t")).subst_linear("·t", sum_LM)
            t1 = pair(lie, lp2(a).align((M,)), pair(lie, lp2(b), lp2(v), M), L).align((L, M))
            t2 = pair(lie, lp2(b).align((L,)), pair(lie, lp2(a), lp2(v), L), M).align((L, M))
            return lhs - t1 + t2

        reports.append(run_tuple_check(
            "module_lie", itertools.product(agens, agens, vgens), lie_axiom))

    if mod.kind == POISSON_MODULE:
        prod, br = alg.product, alg.bracket
        lft, rgt, lie = mod.left, mod.right, mod.lie

        def poisson1(a, b, v):
            # [a_L b] o_{L+M} v = a_L (b o_M v) - b o_M (a_L v)
            lhs = pair(lft, pair(br, lp2(a), lp2(b), L), lp2(v).align((L,)), "·t")
            lhs = lhs.align((L, M, "·t")).subst_linear("·t", sum_LM)
            t1 = pair(lie, lp2(a).align((M,)), pair(lft, lp2(b), lp2(v), M), L).align((L, M))
            t2 = pair(lft, lp2(b).align((L,)), pair(lie, lp2(a), lp2(v), L), M).align((L, M))
            return lhs - t1 + t2

        def poisson2(v, a, b):
            # v o_M [a_L b] = a_L (v o_M b) - (a_L v) o_{L+M} b
            lhs = pair(rgt, lp2(v).align((L,)), pair(br, lp2(a), lp2(b), L), M).align((L, M))
            t1 = pair(lie, lp2(a).align((M,)), pair(rgt, lp2(v), lp2(b), M), L).align((L, M))
            t2 = pair(rgt, pair(lie, lp2(a), lp2(v), L), lp2(b).align((L,)), "·t")
            t2 = t2.align((L, M, "·t")).subst_linear("·t", sum_LM)
            return lhs - t1 + t2

        def poisson3(a, b, v):
            # (a o_L b)_{-M-D} v = a o_L (b_{-M-D} v) + (a_{-M-D} v) o_{L+M} b
            lhs = _dagger_pair(lie, pair(prod, lp2(a), lp2(b), L), lp2(v).align((L,)), M)
            lhs = lhs.align((L, M))
            t1 = pair(lft, lp2(a).align((M,)), _dagger_pair(lie, lp2(b), lp2(v), M), L).align((L, M))
            t2 = pair(rgt, _dagger_pair(lie, lp2(a), lp2(v), M), lp2(b).align((M,)), "·t")
            t2 = t2.align((L, M, "·t")).subst_linear("·t", sum_LM)
            return lhs - t1 - t2

        reports.append(run_tuple_check(
            "module_poisson_bracket_left", itertools.product(agens, agens, vgens), poisson1))
        reports.append(run_tuple_check(
            "module_poisson_bracket_right", itertools.product(vgens, agens, agens), poisson2))
        reports.append(run_tuple_check(
            "module_poisson_product_action", itertools.product(agens, agens, vgens), poisson3))

    return reports


def semidirect_product(alg: ConformalAlgebra, mod: ConformalModule,
                       window: int = 3, prefix: str = "v.",
                       precheck: bool = True) -> ConformalAlgebra:
    """Algebra on A (+) V with (a+u) o (b+v) = a o b + a o v + u o b and
    [(a+u)_L (b+v)] = [a_L b] + a_L v - b_{-L-D} u."""
    if precheck:
        reports = check_module(alg, mod, window)
        if suite_fails(reports):
            raise PreconditionFailed("module axioms fail", reports)

    vfams = [GenFamily(prefix + f.name, f.arity, f.lo, f.hi) for f in mod.families]

    def tag(me: ModElement) -> ModElement:
        return ModElement({GenIndex(prefix + g.family, g.params): p for g, p in me.terms.items()})

    def split(g: GenIndex):
        if g.family.startswith(prefix):
            return True, GenIndex(g.family[len(prefix):], g.params)
        return False, g

    def lift_value(v: LambdaPoly | None, in_v: bool) -> LambdaPoly | None:
        if v is None:
            return None
        return v.apply_mod(tag) if in_v else v

    def pfn(g1, g2):
        v1, b1 = split(g1)
        v2, b2 = split(g2)
        if v1 and v2:
            return LambdaPoly.zero((RULE_VAR,))
        if not v1 and not v2:
            return lift_value(alg.product.entry(b1, b2), False)
        if not v1:  # a o v : left action
            return lift_value(mod.left.entry(b1, b2), True)
        return lift_value(mod.right.entry(b1, b2), True)  # u o b : right action

    def bfn(g1, g2):
        v1, b1 = split(g1)
        v2, b2 = split(g2)
        if v1 and v2:
            return LambdaPoly.zero((RULE_VAR,))
        if not v1 and not v2:
            return lift_value(alg.bracket.entry(b1, b2), False)
        if not v1:  # [a_L v] = a_L v
            return lift_value(mod.lie.entry(b1, b2), True)
        # [u_L b] = -b_{-L-D} u
        e = mod.lie.entry(b2, b1)
        if e is None:
            return None
        e = e.rename_context(("·w",)).subst_dagger((RULE_VAR,)).scale(-1)
        return e.apply_mod(tag)

    return ConformalAlgebra(
        f"{alg.name}|x{mod.name}", list(alg.families) + vfams,
        product=StructureRule("product", pfn),
        bracket=StructureRule("bracket", bfn),
        kind=KIND_NC_POISSON,
    )
