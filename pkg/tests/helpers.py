"""Shared hypothesis strategies and small oracles for the test suites."""

from hypothesis import strategies as st

from dsred.poly import DiffPoly, LambdaPoly
from dsred.rational import Q

small_q = st.builds(Q, st.integers(-4, 4), st.integers(1, 3))
nonzero_q = small_q.filter(bool)


def monomials(ngen: int, max_order: int = 2, max_vars: int = 3):
    var = st.tuples(st.integers(0, ngen - 1), st.integers(0, max_order), st.integers(1, 2))
    return st.lists(var, max_size=max_vars)


def diffpolys(ngen: int, max_order: int = 2, max_terms: int = 3, max_vars: int = 3):
    """Random differential polynomials in ``ngen`` generators."""
    term = st.tuples(small_q, monomials(ngen, max_order, max_vars))
    return st.lists(term, max_size=max_terms).map(DiffPoly.from_terms)


def lambda_times_plus_d(p: LambdaPoly, h: DiffPoly) -> LambdaPoly:
    """Replace λ by λ + ∂ with ∂ acting on h: Σ_k c_k (λ+∂)^k h."""
    from math import comb
    out = LambdaPoly.zero(1)
    for (k,), c in p.items():
        for i in range(k + 1):
            coeff = c * h.deriv(i) * comb(k, i)
            if coeff:
                out = out + LambdaPoly({(k - i,): coeff}, 1)
    return out
