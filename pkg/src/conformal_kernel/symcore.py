"""Exact symbolic kernel: rational scalars, polynomials in the formal
derivation symbol D (written ``∂`` in math sources), free-module elements
over Q[D], and polynomials in named spectral variables with module-valued
coefficients.

Everything here is an immutable value in normal form: zero coefficients are
never stored, so structural equality is semantic equality.  All arithmetic
is exact (``fractions.Fraction``); there are no floats anywhere.

The two substitution calculi that the rest of the engine is built on live
here as well:

* ``subst_sum``     -- replace a spectral variable by a sum of variables
                       (the ``lambda+mu`` shifts),
* ``subst_dagger``  -- replace a spectral variable by ``-(sum of vars) - D``
                       where each D-power acts on the module coefficient
                       from the left (the dagger substitution).

Both are instances of the general ``subst_linear`` below.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb, factorial
from typing import Callable, Iterable, Iterator, NamedTuple

Q = Fraction

ZERO = 0
ONE = 1


def qify(x):
    """Coerce to an exact rational scalar; integral values stay plain ints
    (same arithmetic, much faster), floats are rejected."""
    if isinstance(x, int):
        return x
    if isinstance(x, Q):
        return int(x) if x.denominator == 1 else x
    raise TypeError(f"non-rational scalar: {x!r}")


def gen_binom(m: int, j: int):
    """Generalized binomial C(m, j) = m(m-1)...(m-j+1)/j! for any integer m."""
    if j < 0:
        return 0
    num = 1
    for t in range(j):
        num *= m - t
    return qify(Q(num, factorial(j)))


# ---------------------------------------------------------------------------
# polynomials in D
# ---------------------------------------------------------------------------

class DPoly:
    """Univariate polynomial in the derivation symbol D over Q.

    Coefficients are stored densely (index = power of D) with the trailing
    zeros stripped, so two equal polynomials are structurally identical.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [qify(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Q, ...] = tuple(cs)

    # -- constructors
    @staticmethod
    def zero() -> "DPoly":
        return DPoly()

    @staticmethod
    def const(c) -> "DPoly":
        return DPoly((qify(c),))

    @staticmethod
    def d_power(k: int, c=ONE) -> "DPoly":
        """c * D^k"""
        return DPoly((ZERO,) * k + (qify(c),))

    # -- queries
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __iter__(self) -> Iterator[tuple[int, Q]]:
        for k, c in enumerate(self.coeffs):
            if c != 0:
                yield k, c

    # -- arithmetic
    def __add__(self, other: "DPoly") -> "DPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return DPoly(out)

    def __neg__(self) -> "DPoly":
        return DPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "DPoly") -> "DPoly":
        return self + (-other)

    def __mul__(self, other: "DPoly") -> "DPoly":
        if self.is_zero() or other.is_zero():
            return DPoly()
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b != 0:
                    out[i + j] += a * b
        return DPoly(out)

    def scale(self, c) -> "DPoly":
        c = qify(c)
        if c == 0:
            return DPoly()
        if c == 1:
            return self
        return DPoly(tuple(c * a for a in self.coeffs))

    def shift(self, k: int) -> "DPoly":
        """Multiply by D^k."""
        if self.is_zero() or k == 0:
            return self
        return DPoly((ZERO,) * k + self.coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, DPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k, c in self:
            if k == 0:
                parts.append(str(c))
            else:
                head = "" if c == 1 else ("-" if c == -1 else f"{c}*")
                parts.append(f"{head}D" + (f"^{k}" if k > 1 else ""))
        return " + ".join(parts).replace("+ -", "- ")


DP_ZERO = DPoly()
DP_ONE = DPoly.const(1)


# ---------------------------------------------------------------------------
# generators and free-module elements
# ---------------------------------------------------------------------------

class GenIndex(NamedTuple):
    """A basis generator: a family name plus an integer parameter tuple.

    Concrete generators are families of arity 0 (empty parameter tuple);
    parameterized families (e.g. the monomials ``x[m]``) carry parameters.
    """

    family: str
    params: tuple[int, ...] = ()

    def __repr__(self) -> str:
        if not self.params:
            return self.family
        return f"{self.family}[{','.join(str(p) for p in self.params)}]"


def gen(family: str, *params: int) -> GenIndex:
    return GenIndex(family, tuple(params))


class ModElement:
    """Element of a free Q[D]-module: a finite map generator -> DPoly.

    Normal form: no zero DPoly is ever stored.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[GenIndex, DPoly] | None = None, _trusted=False):
        if terms is None:
            self.terms: dict[GenIndex, DPoly] = {}
        elif _trusted:
            self.terms = terms
        else:
            self.terms = {g: p for g, p in terms.items() if not p.is_zero()}

    @staticmethod
    def zero() -> "ModElement":
        return ModElement()

    @staticmethod
    def of(g: GenIndex, coeff: DPoly = DP_ONE) -> "ModElement":
        if coeff.is_zero():
            return ModElement()
        return ModElement({g: coeff}, _trusted=True)

    def is_zero(self) -> bool:
        return not self.terms

    def items(self) -> list[tuple[GenIndex, DPoly]]:
        return sorted(self.terms.items())

    def __add__(self, other: "ModElement") -> "ModElement":
        out = dict(self.terms)
        for g, p in other.terms.items():
            s = out.get(g)
            s = p if s is None else s + p
            if s.is_zero():
                out.pop(g, None)
            else:
                out[g] = s
        return ModElement(out, _trusted=True)

    def __neg__(self) -> "ModElement":
        return ModElement({g: -p for g, p in self.terms.items()}, _trusted=True)

    def __sub__(self, other: "ModElement") -> "ModElement":
        return self + (-other)

    def scale(self, c) -> "ModElement":
        c = qify(c)
        if c == 0:
            return ModElement()
        if c == 1:
            return self
        return ModElement({g: p.scale(c) for g, p in self.terms.items()}, _trusted=True)

    def dmul(self, dp: DPoly) -> "ModElement":
        """Apply a polynomial in D to this element (left action of Q[D])."""
        if dp.is_zero():
            return ModElement()
        return ModElement({g: dp * p for g, p in self.terms.items()})

    def d_apply(self, power: int) -> "ModElement":
        """Multiply every coefficient by D^power."""
        if power == 0:
            return self
        return ModElement({g: p.shift(power) for g, p in self.terms.items()}, _trusted=True)

    def __eq__(self, other) -> bool:
        return isinstance(other, ModElement) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.terms.items())))

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        return " + ".join(f"({p})·{g}" for g, p in self.items()).replace("+ -", "- ")


def d_apply(e: ModElement, power: int) -> ModElement:
    """Module-level alias for the Q[D]-action e -> D^power e."""
    return e.d_apply(power)


# ---------------------------------------------------------------------------
# spectral-variable polynomials
# ---------------------------------------------------------------------------

class SpectralVar(NamedTuple):
    """A named spectral variable at a fixed position of an ordered context."""

    name: str
    index: int


class LambdaPoly:
    """Polynomial in an ordered context of spectral variables with
    ModElement coefficients; an element of A[lambda_1, ..., lambda_k].

    ``terms`` maps dense exponent vectors (one slot per context variable)
    to nonzero ModElements.  The reserved symbol D never appears as a
    context variable: D-content lives inside the coefficients.
    """

    __slots__ = ("context", "terms")

    def __init__(self, context: tuple[str, ...], terms: dict[tuple[int, ...], ModElement] | None = None,
                 _trusted=False):
        if len(set(context)) != len(context):
            raise ValueError(f"duplicate spectral variables in context {context}")
        self.context = tuple(context)
        if terms is None:
            self.terms: dict[tuple[int, ...], ModElement] = {}
        elif _trusted:
            self.terms = terms
        else:
            self.terms = {e: m for e, m in terms.items() if not m.is_zero()}

    # -- constructors
    @staticmethod
    def zero(context: tuple[str, ...] = ()) -> "LambdaPoly":
        return LambdaPoly(context)

    @staticmethod
    def of(context: tuple[str, ...], me: ModElement, exp: tuple[int, ...] | None = None) -> "LambdaPoly":
        if exp is None:
            exp = (0,) * len(context)
        if me.is_zero():
            return LambdaPoly(context)
        return LambdaPoly(context, {tuple(exp): me}, _trusted=True)

    # -- queries
    def is_zero(self) -> bool:
        return not self.terms

    def items(self) -> list[tuple[tuple[int, ...], ModElement]]:
        return sorted(self.terms.items())

    def coefficient(self, exp: tuple[int, ...]) -> ModElement:
        return self.terms.get(tuple(exp), ModElement.zero())

    def var_index(self, name: str) -> int:
        return self.context.index(name)

    # -- arithmetic
    def _require_same_context(self, other: "LambdaPoly"):
        if self.context != other.context:
            raise ValueError(f"context mismatch: {self.context} vs {other.context}")

    def __add__(self, other: "LambdaPoly") -> "LambdaPoly":
        self._require_same_context(other)
        out = dict(self.terms)
        for e, m in other.terms.items():
            s = out.get(e)
            s = m if s is None else s + m
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
        return LambdaPoly(self.context, out, _trusted=True)

    def __neg__(self) -> "LambdaPoly":
        return LambdaPoly(self.context, {e: -m for e, m in self.terms.items()}, _trusted=True)

    def __sub__(self, other: "LambdaPoly") -> "LambdaPoly":
        return self + (-other)

    def scale(self, c) -> "LambdaPoly":
        c = qify(c)
        if c == 0:
            return LambdaPoly(self.context)
        if c == 1:
            return self
        return LambdaPoly(self.context, {e: m.scale(c) for e, m in self.terms.items()}, _trusted=True)

    def dmul(self, dp: DPoly) -> "LambdaPoly":
        return LambdaPoly(self.context, {e: m.dmul(dp) for e, m in self.terms.items()})

    def mul_monomial(self, exp: tuple[int, ...]) -> "LambdaPoly":
        if all(k == 0 for k in exp):
            return self
        return LambdaPoly(
            self.context,
            {tuple(a + b for a, b in zip(e, exp)): m for e, m in self.terms.items()},
            _trusted=True,
        )

    def mul_var(self, name: str, power: int = 1) -> "LambdaPoly":
        exp = [0] * len(self.context)
        exp[self.var_index(name)] = power
        return self.mul_monomial(tuple(exp))

    def apply_mod(self, f: Callable[[ModElement], ModElement]) -> "LambdaPoly":
        """Map a linear function over every coefficient."""
        return LambdaPoly(self.context, {e: f(m) for e, m in self.terms.items()})

    # -- context management
    def rename_context(self, new_context: tuple[str, ...]) -> "LambdaPoly":
        """Positional rename; the exponent vectors are untouched."""
        if len(new_context) != len(self.context):
            raise ValueError("rename must preserve context length")
        return LambdaPoly(tuple(new_context), self.terms, _trusted=True)

    def align(self, new_context: tuple[str, ...]) -> "LambdaPoly":
        """Embed into a larger context (every current variable must occur)."""
        if tuple(new_context) == self.context:
            return self
        pos = []
        for name in self.context:
            try:
                pos.append(new_context.index(name))
            except ValueError:
                raise ValueError(f"variable {name} missing from target context {new_context}")
        n = len(new_context)
        out: dict[tuple[int, ...], ModElement] = {}
        for e, m in self.terms.items():
            ne = [0] * n
            for i, k in enumerate(e):
                ne[pos[i]] = k
            out[tuple(ne)] = m
        return LambdaPoly(tuple(new_context), out, _trusted=True)

    # -- substitution calculus
    def subst_linear(self, var: str, var_coeffs: dict[str, Q], d_coeff: Q = ZERO) -> "LambdaPoly":
        """Replace ``var`` by the linear form ``sum(c_v * v) + d_coeff * D``.

        Every target variable must already be present in the context; D-powers
        act on the module coefficients from the left.  The substituted
        variable is removed from the context of the result.
        """
        i = self.var_index(var)
        new_ctx = self.context[:i] + self.context[i + 1:]
        names = sorted(var_coeffs)
        tgt_pos = [new_ctx.index(name) for name in names]  # raises if absent
        cvals = [var_coeffs[name] for name in names]
        acc = Accumulator(new_ctx)
        for e, m in self.terms.items():
            k = e[i]
            base = e[:i] + e[i + 1:]
            if k == 0:
                acc.add_lp(LambdaPoly.of((), m), mono=base)
                continue
            for mult, split in _multinomial_expansion(k, len(names) + 1):
                kd = split[-1]
                if kd and d_coeff == 0:
                    continue
                coeff = mult
                for cv, kv in zip(cvals, split):
                    if kv:
                        coeff *= cv if kv == 1 else cv ** kv
                if kd:
                    coeff *= d_coeff if kd == 1 else d_coeff ** kd
                if coeff == 0:
                    continue
                ne = list(base)
                for pos, kv in zip(tgt_pos, split):
                    if kv:
                        ne[pos] += kv
                for g, p in m.terms.items():
                    acc.add_dpoly(tuple(ne), g, p.coeffs, coeff, kd)
        return acc.build()

    def subst_many(self, subs: dict[str, tuple[dict[str, Q], Q]]) -> "LambdaPoly":
        """Simultaneously replace several variables by linear forms in the
        remaining ones; one traversal of the polynomial.  ``subs`` maps each
        substituted variable to (target coefficients, D coefficient)."""
        specs = []
        keep = []
        new_ctx = tuple(v for v in self.context if v not in subs)
        for i, v in enumerate(self.context):
            if v in subs:
                var_coeffs, d_coeff = subs[v]
                names = sorted(var_coeffs)
                specs.append((i, [new_ctx.index(n) for n in names],
                              [var_coeffs[n] for n in names], d_coeff))
            else:
                keep.append(i)
        acc = Accumulator(new_ctx)
        for e, m in self.terms.items():
            base = [e[i] for i in keep]
            parts = []
            dead = False
            for (i, tpos, cvals, dco) in specs:
                k = e[i]
                opts = []
                for mult, split in _multinomial_expansion(k, len(cvals) + 1):
                    kd = split[-1]
                    if kd and dco == 0:
                        continue
                    coeff = mult
                    for cv, kv in zip(cvals, split):
                        if kv:
                            coeff *= cv if kv == 1 else cv ** kv
                    if kd:
                        coeff *= dco if kd == 1 else dco ** kd
                    if coeff:
                        opts.append((coeff, kd, tpos, split[:-1]))
                if not opts:
                    dead = True
                    break
                parts.append(opts)
            if dead:
                continue
            for combo in itertools.product(*parts):
                coeff = 1
                kd = 0
                ne = base[:]
                for (c, kdi, tpos, split) in combo:
                    coeff *= c
                    kd += kdi
                    for pos, kv in zip(tpos, split):
                        if kv:
                            ne[pos] += kv
                for g, p in m.terms.items():
                    acc.add_dpoly(tuple(ne), g, p.coeffs, coeff, kd)
        return acc.build()

    def subst_sum(self, targets: tuple[str, ...]) -> "LambdaPoly":
        """Single-variable polynomial: nu^k -> (sum targets)^k."""
        (nu,) = self.context
        if not targets:
            raise ValueError("subst_sum requires a nonempty target list")
        return self.align((nu,) + tuple(targets)).subst_linear(nu, {t: ONE for t in targets})

    def subst_dagger(self, minus_vars: tuple[str, ...]) -> "LambdaPoly":
        """Single-variable polynomial: nu^k -> (-(sum minus_vars) - D)^k."""
        (nu,) = self.context
        return self.align((nu,) + tuple(minus_vars)).subst_linear(
            nu, {v: -ONE for v in minus_vars}, d_coeff=-ONE
        )

    def extract_nth(self) -> list[tuple[int, ModElement]]:
        """n-th products of a single-variable polynomial: pairs (n, n! * [nu^n])."""
        if len(self.context) != 1:
            raise ValueError("extract_nth needs a single-variable context")
        out = []
        for (k,), m in sorted(self.terms.items()):
            out.append((k, m.scale(factorial(k))))
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LambdaPoly)
            and self.context == other.context
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.context, tuple(sorted(self.terms.items()))))

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for e, m in self.items():
            mono = "".join(
                f"{v}" + (f"^{k}" if k > 1 else "")
                for v, k in zip(self.context, e) if k
            )
            parts.append(f"{mono}·({m})" if mono else f"({m})")
        return " + ".join(parts)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of `parts` nonnegative ints summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


_EXPANSION_CACHE: dict[tuple[int, int], list[tuple[int, tuple[int, ...]]]] = {}


def _multinomial_expansion(k: int, parts: int) -> list[tuple[int, tuple[int, ...]]]:
    """Cached [(multinomial coefficient, split)] for (x_1+..+x_parts)^k."""
    key = (k, parts)
    got = _EXPANSION_CACHE.get(key)
    if got is None:
        got = []
        for split in _compositions(k, parts):
            c = factorial(k)
            for part in split:
                c //= factorial(part)
            got.append((c, split))
        _EXPANSION_CACHE[key] = got
    return got


class Accumulator:
    """Mutable builder of a LambdaPoly: dict exp -> dict gen -> dense coeff list."""

    __slots__ = ("context", "data")

    def __init__(self, context: tuple[str, ...]):
        self.context = tuple(context)
        self.data: dict[tuple[int, ...], dict[GenIndex, list]] = {}

    def add_dpoly(self, exp: tuple[int, ...], g: GenIndex, coeffs, scale=ONE, dshift: int = 0):
        """Add scale * D^dshift * (poly with `coeffs`) * g at monomial `exp`."""
        bucket = self.data.setdefault(exp, {})
        cur = bucket.get(g)
        if cur is None:
            cur = []
            bucket[g] = cur
        need = dshift + len(coeffs)
        if len(cur) < need:
            cur.extend([ZERO] * (need - len(cur)))
        if scale == 1:
            for i, c in enumerate(coeffs):
                if c:
                    cur[dshift + i] += c
        else:
            for i, c in enumerate(coeffs):
                if c:
                    cur[dshift + i] += scale * c

    def add_lp(self, lp: "LambdaPoly", scale=ONE, mono: tuple[int, ...] | None = None,
               dshift: int = 0, positions: list[int] | None = None):
        """Add scale * monomial * D^dshift * lp, with lp's exponents embedded
        through `positions` (indices into this accumulator's context)."""
        base = list(mono) if mono is not None else [0] * len(self.context)
        for exp, me in lp.terms.items():
            cur = base[:]
            if positions is None:
                for i, e in enumerate(exp):
                    cur[i] += e
            else:
                for pos, e in zip(positions, exp):
                    cur[pos] += e
            key = tuple(cur)
            for g, p in me.terms.items():
                self.add_dpoly(key, g, p.coeffs, scale, dshift)

    def build(self) -> "LambdaPoly":
        terms: dict[tuple[int, ...], ModElement] = {}
        for exp, bucket in self.data.items():
            mods = {}
            for g, coeffs in bucket.items():
                p = DPoly(coeffs)
                if not p.is_zero():
                    mods[g] = p
            if mods:
                terms[exp] = ModElement(mods, _trusted=True)
        return LambdaPoly(self.context, terms, _trusted=True)


def assemble_from_nth(context_var: str, pairs: Iterable[tuple[int, ModElement]]) -> LambdaPoly:
    """Inverse of extract_nth: sum_n (nu^n / n!) * a_(n)b."""
    out = LambdaPoly.zero((context_var,))
    for n, m in pairs:
        out = out + LambdaPoly.of((context_var,), m.scale(Q(1, factorial(n))), (n,))
    return out


def shifted_action(value: LambdaPoly, var: str, power: int) -> LambdaPoly:
    """Apply the operator (D + var)^power to a LambdaPoly containing `var`.

    Realizes the second sesquilinearity rule a_lambda(D b) = (D+lambda) a_lambda b.
    """
    if power == 0:
        return value
    acc = Accumulator(value.context)
    vi = value.var_index(var)
    mono = [0] * len(value.context)
    for j in range(power + 1):
        mono[vi] = power - j
        acc.add_lp(value, comb(power, j), tuple(mono), dshift=j)
    return acc.build()


def multi_shifted_action(value: LambdaPoly, vars: tuple[str, ...], power: int) -> LambdaPoly:
    """Apply (D + v_1 + ... + v_k)^power; used for the final cochain slot."""
    if power == 0:
        return value
    acc = Accumulator(value.context)
    idx = [value.var_index(v) for v in vars]
    for mult, split in _multinomial_expansion(power, len(vars) + 1):
        kd = split[-1]
        exp = [0] * len(value.context)
        for pos, kv in zip(idx, split):
            exp[pos] = kv
        acc.add_lp(value, mult, tuple(exp), dshift=kd)
    return acc.build()
