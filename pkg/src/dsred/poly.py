"""Differential polynomials over Q.

A :class:`DiffPoly` is a polynomial in the variables ``u_i^{(n)}`` with
``∂ u_i^{(n)} = u_i^{(n+1)}``.  Internally a variable is the integer key
``i << SHIFT | n`` and a monomial is a sorted tuple of ``(key, exponent)``
pairs, so the variable order is lexicographic on ``(gen_index, der_order)``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

from .rational import Q, ZERO, ONE, to_q, q_str, q_short

SHIFT = 16
_MASK = (1 << SHIFT) - 1


def var_key(gen: int, order: int = 0) -> int:
    if gen < 0 or order < 0:
        raise ValueError("generator index and derivative order must be non-negative")
    return (gen << SHIFT) | order


def key_gen(key: int) -> int:
    return key >> SHIFT


def key_order(key: int) -> int:
    return key & _MASK


@lru_cache(maxsize=1 << 20)
def _mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        ka, ea = a[i]
        kb, eb = b[j]
        if ka == kb:
            out.append((ka, ea + eb))
            i += 1
            j += 1
        elif ka < kb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    if i < la:
        out.extend(a[i:])
    if j < lb:
        out.extend(b[j:])
    return tuple(out)


@lru_cache(maxsize=1 << 18)
def _mono_deriv(m: tuple) -> tuple:
    """Total derivative of a monomial as a tuple of ``(coeff, monomial)``."""
    res = {}
    for idx, (k, e) in enumerate(m):
        d = dict(m)
        if e == 1:
            del d[k]
        else:
            d[k] = e - 1
        d[k + 1] = d.get(k + 1, 0) + 1
        mono = tuple(sorted(d.items()))
        res[mono] = res.get(mono, 0) + e
    return tuple((c, mono) for mono, c in res.items())


def _mono_sort_key(m: tuple):
    deg = sum(e for _, e in m)
    return (deg, m)


class DiffPoly:
    """Immutable element of the differential polynomial algebra.

    The zero polynomial has no terms; constants are stored on the empty
    monomial.  Equality of values is equality of their term dictionaries.
    """

    __slots__ = ("_t", "_h")

    def __init__(self, terms: Mapping | None = None):
        self._t = dict(terms) if terms else {}
        self._h = None

    @classmethod
    def _raw(cls, terms: dict) -> "DiffPoly":
        p = cls.__new__(cls)
        p._t = terms
        p._h = None
        return p

    # ------------------------------------------------------------------ constructors
    @classmethod
    def zero(cls) -> "DiffPoly":
        return cls._raw({})

    @classmethod
    def one(cls) -> "DiffPoly":
        return cls._raw({(): ONE})

    @classmethod
    def const(cls, c) -> "DiffPoly":
        c = to_q(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def gen(cls, i: int, n: int = 0) -> "DiffPoly":
        return cls._raw({((var_key(i, n), 1),): ONE})

    @classmethod
    def from_terms(cls, items: Iterable) -> "DiffPoly":
        """Build from ``(coeff, [(gen, order, exp), ...])`` pairs."""
        acc = {}
        for c, vs in items:
            c = to_q(c)
            d = {}
            for g, n, p in vs:
                if p < 0:
                    raise ValueError("negative exponent")
                if p:
                    k = var_key(g, n)
                    d[k] = d.get(k, 0) + p
            mono = tuple(sorted(d.items()))
            acc[mono] = acc.get(mono, ZERO) + c
        return cls._raw({m: c for m, c in acc.items() if c})

    # ------------------------------------------------------------------ basics
    def __bool__(self) -> bool:
        return bool(self._t)

    def __len__(self) -> int:
        return len(self._t)

    def __hash__(self) -> int:
        if self._h is None:
            self._h = hash(frozenset(self._t.items()))
        return self._h

    def __eq__(self, other) -> bool:
        if isinstance(other, DiffPoly):
            return self._t == other._t
        if _is_scalar(other):
            c = to_q(other)
            if not c:
                return not self._t
            return len(self._t) == 1 and self._t.get(()) == c
        return NotImplemented

    def items(self):
        return self._t.items()

    def terms(self) -> list:
        """Terms in canonical order: ``[(coeff, ((gen, order, exp), ...)), ...]``."""
        out = []
        for m in sorted(self._t, key=_mono_sort_key):
            out.append((self._t[m], tuple((key_gen(k), key_order(k), e) for k, e in m)))
        return out

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and () in self._t)

    def constant_term(self):
        return self._t.get((), ZERO)

    def gens(self) -> set:
        return {key_gen(k) for m in self._t for k, _ in m}

    def variables(self) -> set:
        """Set of ``(gen, order)`` pairs occurring."""
        return {(key_gen(k), key_order(k)) for m in self._t for k, _ in m}

    def degree(self) -> int:
        """Polynomial degree (``-1`` for zero)."""
        if not self._t:
            return -1
        return max(sum(e for _, e in m) for m in self._t)

    def homogeneous_part(self, deg: int) -> "DiffPoly":
        return DiffPoly._raw({m: c for m, c in self._t.items() if sum(e for _, e in m) == deg})

    def degree_in(self, gens: set) -> set:
        """Set of total degrees in the given generators over all monomials."""
        return {sum(e for k, e in m if key_gen(k) in gens) for m in self._t}

    def part_of_degree_in(self, gens: set, deg: int) -> "DiffPoly":
        return DiffPoly._raw(
            {m: c for m, c in self._t.items() if sum(e for k, e in m if key_gen(k) in gens) == deg}
        )

    # ------------------------------------------------------------------ arithmetic
    def _coerce(self, other):
        if isinstance(other, DiffPoly):
            return other
        if _is_scalar(other):
            return DiffPoly.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o._t:
            return self
        if not self._t:
            return o
        if len(o._t) > len(self._t):
            big, small = o._t, self._t
        else:
            big, small = self._t, o._t
        res = dict(big)
        for m, c in small.items():
            v = res.get(m)
            if v is None:
                res[m] = c
            else:
                v = v + c
                if v:
                    res[m] = v
                else:
                    del res[m]
        return DiffPoly._raw(res)

    __radd__ = __add__

    def __neg__(self):
        return DiffPoly._raw({m: -c for m, c in self._t.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o._t:
            return self
        res = dict(self._t)
        for m, c in o._t.items():
            v = res.get(m)
            if v is None:
                res[m] = -c
            else:
                v = v - c
                if v:
                    res[m] = v
                else:
                    del res[m]
        return DiffPoly._raw(res)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def scale(self, c) -> "DiffPoly":
        c = to_q(c)
        if not c:
            return DiffPoly.zero()
        if c == 1:
            return self
        return DiffPoly._raw({m: v * c for m, v in self._t.items()})

    def __mul__(self, other):
        if _is_scalar(other):
            return self.scale(other)
        if not isinstance(other, DiffPoly):
            return NotImplemented
        a, b = self._t, other._t
        if not a or not b:
            return DiffPoly.zero()
        if len(a) == 1 and () in a:
            return other.scale(a[()])
        if len(b) == 1 and () in b:
            return self.scale(b[()])
        res = {}
        mul = _mono_mul
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = mul(m1, m2)
                v = res.get(m)
                res[m] = c1 * c2 if v is None else v + c1 * c2
        return DiffPoly._raw({m: c for m, c in res.items() if c})

    def __rmul__(self, other):
        if _is_scalar(other):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if _is_scalar(other):
            return self.scale(ONE / to_q(other))
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = DiffPoly.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # ------------------------------------------------------------------ derivations
    def deriv(self, times: int = 1) -> "DiffPoly":
        """Total derivative ``∂^times``."""
        p = self
        for _ in range(times):
            res = {}
            for m, c in p._t.items():
                if not m:
                    continue
                for e, mono in _mono_deriv(m):
                    v = res.get(mono)
                    res[mono] = c * e if v is None else v + c * e
            p = DiffPoly._raw({m: c for m, c in res.items() if c})
        return p

    def partial(self, gen: int, order: int = 0) -> "DiffPoly":
        """Partial derivative with respect to ``u_gen^{(order)}``."""
        key = var_key(gen, order)
        res = {}
        for m, c in self._t.items():
            for idx, (k, e) in enumerate(m):
                if k == key:
                    if e == 1:
                        mono = m[:idx] + m[idx + 1:]
                    else:
                        mono = m[:idx] + ((k, e - 1),) + m[idx + 1:]
                    v = res.get(mono)
                    res[mono] = c * e if v is None else v + c * e
                    break
        return DiffPoly._raw({m: c for m, c in res.items() if c})

    def partials(self) -> dict:
        """All nonzero partial derivatives, keyed by ``(gen, order)``."""
        acc = {}
        for m, c in self._t.items():
            for idx, (k, e) in enumerate(m):
                if e == 1:
                    mono = m[:idx] + m[idx + 1:]
                else:
                    mono = m[:idx] + ((k, e - 1),) + m[idx + 1:]
                d = acc.setdefault(k, {})
                v = d.get(mono)
                d[mono] = c * e if v is None else v + c * e
        out = {}
        for k, d in acc.items():
            d = {m: c for m, c in d.items() if c}
            if d:
                out[(key_gen(k), key_order(k))] = DiffPoly._raw(d)
        return out

    def variational(self, gen: int) -> "DiffPoly":
        """Variational derivative ``Σ_n (-∂)^n ∂p/∂u_gen^{(n)}``."""
        res = DiffPoly.zero()
        for (g, n), part in self.partials().items():
            if g != gen:
                continue
            term = part.deriv(n)
            res = res - term if n % 2 else res + term
        return res

    def order(self):
        """Differential order: the largest derivative order present, None for constants."""
        orders = [key_order(k) for m in self._t for k, _ in m]
        return max(orders) if orders else None

    def order_in(self, gen: int):
        orders = [key_order(k) for m in self._t for k, _ in m if key_gen(k) == gen]
        return max(orders) if orders else None

    def subs(self, images) -> "DiffPoly":
        """Differential substitution ``u_i^{(m)} ↦ ∂^m images[i]``.

        ``images`` is a sequence or mapping indexed by generator; every
        generator occurring in ``self`` must have an image.
        """
        cache = {}

        def image(key):
            if key in cache:
                return cache[key]
            g, n = key_gen(key), key_order(key)
            try:
                base = images[g]
            except (IndexError, KeyError):
                base = None
            if base is None:
                raise KeyError(f"no image given for generator {g}")
            if not isinstance(base, DiffPoly):
                base = DiffPoly.const(base)
            val = base if n == 0 else image(key - 1).deriv()
            cache[key] = val
            return val

        res = DiffPoly.zero()
        for m, c in self._t.items():
            term = DiffPoly.const(c)
            for k, e in m:
                term = term * (image(k) ** e)
            res = res + term
        return res

    def map_coefficients(self, fn) -> "DiffPoly":
        return DiffPoly._raw({m: v for m, c in self._t.items() if (v := fn(c))})

    # ------------------------------------------------------------------ output
    def to_json(self) -> list:
        out = []
        for c, vs in self.terms():
            out.append({"c": q_str(c), "vars": [{"i": g, "n": n, "p": e} for g, n, e in vs]})
        return out

    @classmethod
    def from_json(cls, data) -> "DiffPoly":
        if not isinstance(data, list):
            raise ValueError("a differential polynomial is a JSON array of monomials")
        items = []
        for mono in data:
            try:
                c = mono["c"]
                vs = [(int(v["i"]), int(v["n"]), int(v["p"])) for v in mono.get("vars", [])]
            except (KeyError, TypeError) as exc:
                raise ValueError(f"malformed monomial {mono!r}") from exc
            items.append((c, vs))
        return cls.from_terms(items)

    def format(self, names: Sequence[str] | None = None) -> str:
        """Plain-text rendering, e.g. ``1/4 h^2 + 1/2 h' + f``."""
        if not self._t:
            return "0"
        pieces = []
        for c, vs in self.terms():
            body = " ".join(_text_factor(_name(names, g), n, e) for g, n, e in vs)
            pieces.append(_join_coeff(c, body, q_short))
        return _join_signed(pieces)

    def latex(self, names: Sequence[str] | None = None) -> str:
        if not self._t:
            return "0"
        pieces = []
        for c, vs in self.terms():
            body = " ".join(_latex_factor(_name(names, g, latex=True), n, e) for g, n, e in vs)
            pieces.append(_join_coeff(c, body, _latex_q))
        return _join_signed(pieces)

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"DiffPoly({self.format()})"


_SCALAR_TYPES = (int, Fraction, type(ONE))


def _is_scalar(x) -> bool:
    return isinstance(x, _SCALAR_TYPES)


def _name(names, g, latex=False):
    if names is not None and g < len(names):
        return names[g]
    return f"u_{{{g + 1}}}" if latex else f"u{g + 1}"


def _text_factor(name, n, e):
    if n == 0:
        s = name
    elif n <= 3:
        s = name + "'" * n
    else:
        s = f"{name}^({n})"
    if e != 1:
        s = f"({s})^{e}" if n > 3 else f"{s}^{e}"
    return s


def _latex_factor(name, n, e):
    s = name if n == 0 else f"{name}^{{({n})}}"
    if e != 1:
        s = f"({s})^{{{e}}}" if n else f"{name}^{{{e}}}"
    return s


def _latex_q(c):
    c = to_q(c)
    if c.denominator == 1:
        return str(int(c.numerator))
    sign = "-" if c < 0 else ""
    return f"{sign}\\frac{{{abs(int(c.numerator))}}}{{{int(c.denominator)}}}"


def _join_coeff(c, body, fmt):
    if not body:
        return fmt(c)
    if c == 1:
        return body
    if c == -1:
        return "-" + body
    return f"{fmt(c)} {body}"


def _join_signed(pieces):
    out = pieces[0]
    for p in pieces[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


# ---------------------------------------------------------------------- free functions

def total_derivative(p: DiffPoly) -> DiffPoly:
    return p.deriv()


def partial_derivative(p: DiffPoly, gen: int, order: int = 0) -> DiffPoly:
    return p.partial(gen, order)


def variational_derivative(p: DiffPoly, gen: int) -> DiffPoly:
    return p.variational(gen)


def substitute(p: DiffPoly, images) -> DiffPoly:
    return p.subs(images)


def differential_order(p: DiffPoly):
    return p.order()


def functional_eq(f: DiffPoly, g: DiffPoly) -> bool:
    """True iff ``f - g`` lies in ∂V (zero constant term, zero Euler operator)."""
    d = f - g
    if d.constant_term():
        return False
    return all(not d.variational(i) for i in d.gens())


def is_total_derivative(p: DiffPoly) -> bool:
    return functional_eq(p, DiffPoly.zero())


def normalize_functional(p: DiffPoly) -> DiffPoly:
    """A representative of ``p + ∂V`` with exact-derivative monomials stripped.

    Greedy reduction: a monomial whose top variable ``u_g^{(n)}`` (largest in
    the order ``(der_order, gen)``) occurs to the first power, with every other
    variable at most ``u_g^{(n-1)}``, is the leading monomial of ``∂N`` for
    ``N`` obtained by lowering the top variable; it is replaced by the
    remaining terms of ``-∂N``.  Always the largest reducible monomial is
    treated first, so the process terminates.
    """
    terms = dict(p._t)

    def rank_key(k):
        return (key_order(k), key_gen(k))

    def monokey(m):
        return sorted((rank_key(k) for k, e in m for _ in range(e)), reverse=True)

    def reducible(m):
        if not m:
            return None
        top = max((k for k, _ in m), key=rank_key)
        n = key_order(top)
        e_top = dict(m)[top]
        if n == 0 or e_top != 1:
            return None
        bound = (n - 1, key_gen(top))
        for k, _ in m:
            if k != top and rank_key(k) > bound:
                return None
        return top

    while True:
        cands = [(monokey(m), m) for m in terms if reducible(m) is not None]
        if not cands:
            break
        _, m = max(cands)
        c = terms[m]
        top = reducible(m)
        d = dict(m)
        del d[top]
        low = top - 1
        k_low = d.get(low, 0)
        d[low] = k_low + 1
        n_mono = tuple(sorted(d.items()))
        # ∂N has M with coefficient k_low + 1.
        dn = DiffPoly._raw({n_mono: ONE}).deriv()
        factor = c / (k_low + 1)
        for mono, v in dn._t.items():
            nv = terms.get(mono, ZERO) - factor * v
            if nv:
                terms[mono] = nv
            else:
                terms.pop(mono, None)
    return DiffPoly._raw(terms)


class LocalFunctional:
    """An element of V/∂V, held through a representative."""

    __slots__ = ("rep",)

    def __init__(self, rep: DiffPoly):
        self.rep = rep

    def __eq__(self, other) -> bool:
        if isinstance(other, LocalFunctional):
            return functional_eq(self.rep, other.rep)
        if isinstance(other, DiffPoly):
            return functional_eq(self.rep, other)
        return NotImplemented

    def __hash__(self):  # equality is modulo ∂V, so no useful hash
        raise TypeError("LocalFunctional is unhashable")

    def __add__(self, other):
        return LocalFunctional(self.rep + (other.rep if isinstance(other, LocalFunctional) else other))

    def __sub__(self, other):
        return LocalFunctional(self.rep - (other.rep if isinstance(other, LocalFunctional) else other))

    def is_zero(self) -> bool:
        return is_total_derivative(self.rep)

    def normalized(self) -> DiffPoly:
        return normalize_functional(self.rep)

    def variational(self, gen: int) -> DiffPoly:
        return self.rep.variational(gen)

    def format(self, names=None) -> str:
        return "∫ " + self.normalized().format(names)

    def __repr__(self):
        return f"LocalFunctional({self.normalized().format()})"


# ---------------------------------------------------------------------- λ-polynomials

class LambdaPoly:
    """Polynomial in ``nvars`` formal indeterminates with DiffPoly coefficients.

    Keys are exponent tuples of length ``nvars`` (``(k,)`` for λ^k, ``(a, b)``
    for λ^a μ^b).
    """

    __slots__ = ("nvars", "_t")

    def __init__(self, terms: Mapping | None = None, nvars: int = 1):
        self.nvars = nvars
        self._t = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def zero(cls, nvars: int = 1) -> "LambdaPoly":
        return cls({}, nvars)

    @classmethod
    def constant(cls, p: DiffPoly, nvars: int = 1) -> "LambdaPoly":
        return cls({(0,) * nvars: p}, nvars)

    @classmethod
    def monomial(cls, exps: tuple, p: DiffPoly | None = None) -> "LambdaPoly":
        return cls({tuple(exps): p if p is not None else DiffPoly.one()}, len(exps))

    def __bool__(self):
        return bool(self._t)

    def __eq__(self, other):
        if isinstance(other, LambdaPoly):
            return self.nvars == other.nvars and self._t == other._t
        if isinstance(other, DiffPoly) or _is_scalar(other):
            o = other if isinstance(other, DiffPoly) else DiffPoly.const(other)
            return self._t == ({(0,) * self.nvars: o} if o else {})
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self._t.items())))

    def items(self):
        return self._t.items()

    def coeff(self, *exps) -> DiffPoly:
        if len(exps) == 1 and isinstance(exps[0], tuple):
            exps = exps[0]
        return self._t.get(tuple(exps), DiffPoly.zero())

    def degree(self) -> int:
        return max((sum(k) for k in self._t), default=-1)

    def __add__(self, other):
        res = dict(self._t)
        for k, v in other._t.items():
            res[k] = res[k] + v if k in res else v
        return LambdaPoly(res, self.nvars)

    def __sub__(self, other):
        res = dict(self._t)
        for k, v in other._t.items():
            res[k] = res[k] - v if k in res else -v
        return LambdaPoly(res, self.nvars)

    def __neg__(self):
        return LambdaPoly({k: -v for k, v in self._t.items()}, self.nvars)

    def __mul__(self, other):
        """Multiply coefficients by a DiffPoly or scalar."""
        if isinstance(other, LambdaPoly):
            res = {}
            for k1, v1 in self._t.items():
                for k2, v2 in other._t.items():
                    k = tuple(a + b for a, b in zip(k1, k2))
                    res[k] = res[k] + v1 * v2 if k in res else v1 * v2
            return LambdaPoly(res, self.nvars)
        return LambdaPoly({k: v * other for k, v in self._t.items()}, self.nvars)

    __rmul__ = __mul__

    def shift(self, exps: tuple) -> "LambdaPoly":
        """Multiply by the monomial λ^exps."""
        return LambdaPoly({tuple(a + b for a, b in zip(k, exps)): v for k, v in self._t.items()}, self.nvars)

    def deriv(self) -> "LambdaPoly":
        """∂ applied to every coefficient."""
        return LambdaPoly({k: v.deriv() for k, v in self._t.items()}, self.nvars)

    def map(self, fn) -> "LambdaPoly":
        return LambdaPoly({k: fn(v) for k, v in self._t.items()}, self.nvars)

    def at_zero(self) -> DiffPoly:
        return self.coeff((0,) * self.nvars)

    def apply_at_d(self, h: DiffPoly) -> DiffPoly:
        """Evaluate a one-variable λ-polynomial at λ = ∂ acting on ``h``: Σ c_k ∂^k h."""
        assert self.nvars == 1
        res = DiffPoly.zero()
        for (k,), c in self._t.items():
            res = res + c * h.deriv(k)
        return res

    def to_json(self) -> list:
        return [{"exp": list(k), "coeff": v.to_json()} for k, v in sorted(self._t.items())]

    @classmethod
    def from_json(cls, data, nvars: int = 1) -> "LambdaPoly":
        if not isinstance(data, list):
            raise ValueError("a λ-polynomial is a JSON array of terms")
        terms = {}
        for t in data:
            exp = t["exp"]
            exp = tuple(exp) if isinstance(exp, list) else (int(exp),)
            if len(exp) != nvars:
                raise ValueError("λ-exponent length does not match the number of indeterminates")
            c = DiffPoly.from_json(t["coeff"])
            terms[exp] = terms[exp] + c if exp in terms else c
        return cls(terms, nvars)

    def format(self, names=None, symbols=("λ", "μ")) -> str:
        if not self._t:
            return "0"
        pieces = []
        for k in sorted(self._t, key=lambda k: (-sum(k), tuple(-x for x in k))):
            c = self._t[k]
            lam = " ".join(
                (symbols[i] if e == 1 else f"{symbols[i]}^{e}") for i, e in enumerate(k) if e
            )
            body = c.format(names)
            if not lam:
                pieces.append(body)
            elif c.is_constant():
                cc = c.constant_term()
                pieces.append(_join_coeff(cc, lam, q_short))
            else:
                if len(c) > 1:
                    body = f"({body})"
                pieces.append(f"{body} {lam}")
        return _join_signed(pieces)

    def latex(self, names=None, symbols=("\\lambda", "\\mu")) -> str:
        if not self._t:
            return "0"
        pieces = []
        for k in sorted(self._t, key=lambda k: (-sum(k), tuple(-x for x in k))):
            c = self._t[k]
            lam = " ".join(
                (symbols[i] if e == 1 else f"{symbols[i]}^{{{e}}}") for i, e in enumerate(k) if e
            )
            if not lam:
                pieces.append(c.latex(names))
            elif c.is_constant():
                pieces.append(_join_coeff(c.constant_term(), lam, _latex_q))
            else:
                body = c.latex(names)
                if len(c) > 1:
                    body = f"\\left({body}\\right)"
                pieces.append(f"{body} {lam}")
        return _join_signed(pieces)

    def __repr__(self):
        return f"LambdaPoly({self.format()})"


def lambda_plus_d_power(p: DiffPoly, n: int) -> LambdaPoly:
    """``(λ+∂)^n p = Σ_t C(n,t) λ^{n-t} ∂^t p`` as a one-variable LambdaPoly."""
    terms = {}
    d = p
    for t in range(n + 1):
        if t:
            d = d.deriv()
        if d:
            terms[(n - t,)] = d * comb(n, t)
    return LambdaPoly(terms, 1)
