"""Machine-checked nonnegativity certificates for the decay-bound inequalities.

Each certificate states that a rational function of consecutive knot gaps is
nonnegative whenever all gaps are nonnegative.  The engine builds the function
with factored denominators (multipoly.FactoredRational), then checks

  1. every denominator factor has exclusively nonnegative coefficients and is
     nonzero, hence positive on the open positive orthant, and
  2. the cleared numerator has exclusively nonnegative coefficients.

Both conditions together certify nonnegativity for all positive gap values
(and, by continuity, on the closed orthant wherever the function extends).
The check is purely syntactic on exact integer coefficients; no polynomial
GCD, factorization, or floating point is involved.

Gap variables: a certificate anchored at index ``a`` uses x_r = t_{a+r} -
t_{a+r-1}, and every knot bracket becomes the linear form

    (l e)_{a+p} = x_{p+e+1} + ... + x_{p+l}.

Certified inequalities (public names):

  offdiag        a_{n,n+1} a_{n-1,n} - 2 a_{n,n} a_{n-1,n+1} >= 0
  phi_step       the induction step propagating the diagonal bound phi
  psi_a          (6/5)(20)_n/(30)_n - psi_n a_{n-1,n} >= 0
  theta_product  87/100 - ((30)_n/(20)_n)((30)_{n+1}/(20)_{n+1})
                 phi_n M_n phi_{n+1} M_{n+1} >= 0
  psi_from_phi   (32) - ((21)(32)/(31))(1 + (32)/(6(31))) >= 0

plus the internal ``tp_minor`` (a 2x2 total-positivity minor) which justifies
substituting the upper bound phi_s for b_{s,s}^s inside theta_product: the
substitution enlarges theta_s = b_{s,s}^s M_s only when M_s >= 0.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import ArithmeticFailure, InputError
from .multipoly import FactoredRational, MultiPoly
from .scalars import format_scalar


class GapBasis:
    """Linear forms of knot brackets over ``nvars`` consecutive gap variables."""

    def __init__(self, nvars: int):
        if not isinstance(nvars, int) or nvars < 1:
            raise InputError(f"nvars must be a positive integer, got {nvars!r}")
        self.nvars = nvars

    def gap(self, r: int) -> MultiPoly:
        return MultiPoly.variable(self.nvars, r)

    def bracket(self, ell: int, en: int, p: int) -> MultiPoly:
        """(ell en)_{anchor+p} = sum of gaps x_{p+en+1} .. x_{p+ell}."""
        if ell < en:
            raise InputError(f"bracket ({ell},{en}) has ell < en")
        lo, hi = p + en + 1, p + ell
        if ell > en and not (1 <= lo and hi <= self.nvars):
            raise InputError(
                f"bracket ({ell},{en}) at offset {p} needs gaps {lo}..{hi}, "
                f"have 1..{self.nvars}")
        total = MultiPoly.zero(self.nvars)
        for r in range(lo, hi + 1):
            total = total + self.gap(r)
        return total

    def linear_form(self, coeffs: dict) -> MultiPoly:
        """sum coeffs[r] * x_r (1-based variable indices)."""
        return MultiPoly(self.nvars, {
            tuple(1 if j == r - 1 else 0 for j in range(self.nvars)): c
            for r, c in coeffs.items()})


# ---------------------------------------------------------------------------
# Symbolic Gram entries and bound functions (order 3)


def gram_diag_sym(basis: GapBasis, p: int) -> FactoredRational:
    """a_{a+p,a+p} = (30)/5 - (30)(21)^2/(15(20)(31)), brackets at a+p."""
    t30 = basis.bracket(3, 0, p)
    t21 = basis.bracket(2, 1, p)
    t20 = basis.bracket(2, 0, p)
    t31 = basis.bracket(3, 1, p)
    return (FactoredRational(Fraction(1, 5), t30)
            - FactoredRational(Fraction(1, 15), t30 * t21 * t21,
                               {t20: 1, t31: 1}))


def gram_off1_sym(basis: GapBasis, p: int) -> FactoredRational:
    """a_{a+p,a+p+1} = (31)/10 + (21)^2(10)/(30(20)(31)) + (32)^2(43)/(30(31)(42))."""
    t31 = basis.bracket(3, 1, p)
    t21 = basis.bracket(2, 1, p)
    t10 = basis.bracket(1, 0, p)
    t20 = basis.bracket(2, 0, p)
    t32 = basis.bracket(3, 2, p)
    t43 = basis.bracket(4, 3, p)
    t42 = basis.bracket(4, 2, p)
    return (FactoredRational(Fraction(1, 10), t31)
            + FactoredRational(Fraction(1, 30), t21 * t21 * t10, {t20: 1, t31: 1})
            + FactoredRational(Fraction(1, 30), t32 * t32 * t43, {t31: 1, t42: 1}))


def gram_off2_sym(basis: GapBasis, p: int) -> FactoredRational:
    """a_{a+p,a+p+2} = (32)^3/(30(31)(42))."""
    t32 = basis.bracket(3, 2, p)
    t31 = basis.bracket(3, 1, p)
    t42 = basis.bracket(4, 2, p)
    return FactoredRational(Fraction(1, 30), t32 ** 3, {t31: 1, t42: 1})


def phi_inv_sym(basis: GapBasis, p: int) -> FactoredRational:
    """1/phi at index a+p as a factored rational (mirrors decay.phi_inv)."""
    b10 = basis.bracket(1, 0, p)
    b21 = basis.bracket(2, 1, p)
    b32 = basis.bracket(3, 2, p)
    b20 = basis.bracket(2, 0, p)
    b31 = basis.bracket(3, 1, p)
    b0m1 = basis.bracket(0, -1, p)
    b1m1 = basis.bracket(1, -1, p)
    return (FactoredRational(Fraction(1, 9), b10)
            + FactoredRational(Fraction(1, 12), b21)
            + FactoredRational(Fraction(1, 5), b32)
            - FactoredRational(Fraction(1, 30), b21 * b32, {b31: 1})
            - FactoredRational(Fraction(1, 180), b21 * b32 * b32, {b31: 2})
            + FactoredRational(Fraction(2, 27), b10 * b21 * b32, {b20: 1, b31: 1})
            + FactoredRational(Fraction(5, 108), b0m1 * b10, {b1m1: 1})
            + FactoredRational(Fraction(2, 73), b0m1 * b0m1 * b10, {b1m1: 2}))


def psi_inv_sym(basis: GapBasis, p: int) -> FactoredRational:
    """1/psi at index a+p: (10)/9 + (21)/12 + (32)/6."""
    return (FactoredRational(Fraction(1, 9), basis.bracket(1, 0, p))
            + FactoredRational(Fraction(1, 12), basis.bracket(2, 1, p))
            + FactoredRational(Fraction(1, 6), basis.bracket(3, 2, p)))


def minor_factor_sym(basis: GapBasis, p: int) -> FactoredRational:
    """M at index a+p+2: a_{s-1,s} - a_{s-2,s} a_{s-1,s-1}/a_{s-2,s-1},
    where s = a+p+2, expressed through entry offsets p..p+2."""
    a12 = gram_off1_sym(basis, p + 1)   # a_{s-1,s}
    a02 = gram_off2_sym(basis, p)       # a_{s-2,s}
    a11 = gram_diag_sym(basis, p + 1)   # a_{s-1,s-1}
    a01 = gram_off1_sym(basis, p)       # a_{s-2,s-1}
    return a12 - a02 * a11 / a01


# ---------------------------------------------------------------------------
# Certificates


@dataclass(frozen=True)
class Certificate:
    """Result of one nonnegativity check.

    ``witness`` is None on success, else (monomial exponents, coefficient) of
    the graded-lex-first negative coefficient; ``where`` says whether the
    offender sits in the numerator or a denominator factor.
    """

    name: str
    success: bool
    den_terms: int
    num_terms: int
    max_total_degree: int
    witness: tuple | None
    where: str = "numerator"
    prerequisites: tuple = ()


def _nonneg_witness(poly: MultiPoly, sign: int):
    """Graded-lex-first (exponents, effective coefficient) with effective
    coefficient sign*coeff < 0, or None."""
    for exps, coeff in poly.sorted_terms():
        if sign * coeff < 0:
            return (exps, sign * coeff)
    return None


def certify_nonneg(fr: FactoredRational, name: str) -> Certificate:
    """Certify fr >= 0 on the positive orthant by coefficient inspection."""
    den = fr.denominator_expanded()
    num_terms = len(fr.num.terms)
    den_terms = len(den.terms)
    degree = max(fr.num.total_degree(), den.total_degree())
    for factor, _ in fr._sorted_factors():
        bad = _nonneg_witness(factor, 1)
        if bad is not None:
            return Certificate(name, False, den_terms, num_terms, degree,
                               bad, where="denominator")
    if fr.is_zero():
        return Certificate(name, True, den_terms, 0, degree, None)
    sign = 1 if fr.scalar > 0 else -1
    bad = _nonneg_witness(fr.num, sign)
    if bad is not None:
        return Certificate(name, False, den_terms, num_terms, degree, bad)
    return Certificate(name, True, den_terms, num_terms, degree, None)


def _expect_den(fr: FactoredRational, expected: dict, name: str,
                allow_divisor: bool = False) -> None:
    """Assert the factored denominator matches the stated product shape.

    With ``allow_divisor`` the actual denominator may divide the stated one
    (subset factors, exponents no larger); otherwise it must match exactly.
    A mismatch is an engine defect, not a mathematical failure, so it raises.
    """
    actual = dict(fr.den_factors)
    if allow_divisor:
        ok = all(f in expected and e <= expected[f] for f, e in actual.items())
    else:
        ok = actual == expected
    if not ok:
        raise ArithmeticFailure(
            f"certificate {name}: denominator shape mismatch",
            context={"actual": {repr(f): e for f, e in actual.items()},
                     "expected": {repr(f): e for f, e in expected.items()}})


def _build_offdiag() -> FactoredRational:
    """a_{n,n+1} a_{n-1,n} - 2 a_{n,n} a_{n-1,n+1}; gaps anchored at n-1."""
    basis = GapBasis(5)
    p = (gram_off1_sym(basis, 1) * gram_off1_sym(basis, 0)
         - 2 * gram_diag_sym(basis, 1) * gram_off2_sym(basis, 0))
    expected = {basis.bracket(1, -1, 1): 1, basis.bracket(2, 0, 1): 2,
                basis.bracket(3, 1, 1): 2, basis.bracket(4, 2, 1): 1}
    _expect_den(p, expected, "offdiag")
    return p


def _build_tp_minor() -> FactoredRational:
    """The 2x2 minor a_{n-1,n} a_{n,n+1} - a_{n-1,n+1} a_{n,n}; anchor n-1."""
    basis = GapBasis(5)
    return (gram_off1_sym(basis, 0) * gram_off1_sym(basis, 1)
            - gram_off2_sym(basis, 0) * gram_diag_sym(basis, 1))


def _build_psi_a() -> FactoredRational:
    """(6/5)(20)_n/(30)_n - psi_n a_{n-1,n}; gaps anchored at n-1."""
    basis = GapBasis(4)
    t20 = basis.bracket(2, 0, 1)
    t30 = basis.bracket(3, 0, 1)
    lead = FactoredRational(Fraction(6, 5), t20, {t30: 1})
    p = lead - gram_off1_sym(basis, 0) / psi_inv_sym(basis, 1)
    expected = {basis.bracket(2, 0, 0): 1, t20: 1, basis.bracket(4, 2, 0): 1,
                t30: 1, basis.linear_form({2: 4, 3: 3, 4: 6}): 1}
    _expect_den(p, expected, "psi_a")
    return p


def _build_psi_from_phi() -> FactoredRational:
    """(32) - ((21)(32)/(31))(1 + (32)/(6(31))) with x1=(21), x2=(32)."""
    basis = GapBasis(2)
    x1, x2 = basis.gap(1), basis.gap(2)
    t31 = x1 + x2
    return (FactoredRational.from_poly(x2)
            - FactoredRational(1, x1 * x2, {t31: 1})
            - FactoredRational(Fraction(1, 6), x1 * x2 * x2, {t31: 2}))


def _build_phi_step() -> FactoredRational:
    """Induction step for the diagonal bound phi; gaps anchored at n-2.

    With F_s := 1/phi_s (phi_inv_sym), the step inequality multiplied by the
    positive quantity F_n F_{n-1}^2 a_{n-1,n} reads

        F_n F_{n-1}^2 a_{n-1,n} a_{n+1,n+1}
      - F_{n-1}^2 a_{n,n+1} (a_{n-1,n} a_{n,n+1} - 2 a_{n,n} a_{n-1,n+1})
      - 2 F_n F_{n-1}^2 a_{n,n+1} a_{n-1,n+1}
      - F_n F_{n-1} a_{n-1,n} a_{n-1,n+1}^2
      - a_{n-1,n}^3 a_{n-1,n+1}^2
      - F_n F_{n-1}^2 F_{n+1} a_{n-1,n}  >= 0,

    every inverse bound function having been cancelled against its
    reciprocal beforehand, so the factored denominator is a pure product of
    bracket linear forms.
    """
    basis = GapBasis(6)
    F1 = phi_inv_sym(basis, 1)   # at n-1
    F2 = phi_inv_sym(basis, 2)   # at n
    F3 = phi_inv_sym(basis, 3)   # at n+1
    a12 = gram_off1_sym(basis, 1)   # a_{n-1,n}
    a23 = gram_off1_sym(basis, 2)   # a_{n,n+1}
    a13 = gram_off2_sym(basis, 1)   # a_{n-1,n+1}
    a22 = gram_diag_sym(basis, 2)   # a_{n,n}
    a33 = gram_diag_sym(basis, 3)   # a_{n+1,n+1}
    F1sq = F1 * F1
    p = (F2 * F1sq * a12 * a33
         - F1sq * a23 * (a12 * a23 - 2 * a22 * a13)
         - 2 * F2 * F1sq * a23 * a13
         - F2 * F1 * a12 * a13 * a13
         - a12 * a12 * a12 * a13 * a13
         - F2 * F1sq * F3 * a12)
    bound = {basis.bracket(1, -1, 1): 4, basis.bracket(2, 0, 1): 5,
             basis.bracket(3, 1, 1): 8, basis.bracket(4, 2, 1): 5,
             basis.bracket(5, 3, 1): 2}
    _expect_den(p, bound, "phi_step", allow_divisor=True)
    return p


def _build_theta_product() -> FactoredRational:
    """87/100 - ((30)_n/(20)_n)((30)_{n+1}/(20)_{n+1}) th_n th_{n+1},
    th_s = phi_s M_s; gaps anchored at n-2.

    phi_s = 1/phi_inv brings the (all-nonnegative) numerator polynomial of
    phi_inv into the denominator, and M_s divides by a_{s-2,s-1}; both are
    legitimate because certify_nonneg checks every denominator factor
    coefficient-wise rather than assuming a product of brackets.
    """
    basis = GapBasis(6)
    th_n = minor_factor_sym(basis, 0) / phi_inv_sym(basis, 2)
    th_n1 = minor_factor_sym(basis, 1) / phi_inv_sym(basis, 3)
    t30_n = basis.bracket(3, 0, 2)
    t20_n = basis.bracket(2, 0, 2)
    t30_n1 = basis.bracket(3, 0, 3)
    t20_n1 = basis.bracket(2, 0, 3)
    ratio = FactoredRational(1, t30_n * t30_n1, {t20_n: 1, t20_n1: 1})
    return FactoredRational.from_scalar(6, Fraction(87, 100)) - ratio * th_n * th_n1


_BUILDERS = {
    "offdiag": _build_offdiag,
    "phi_step": _build_phi_step,
    "psi_a": _build_psi_a,
    "theta_product": _build_theta_product,
    "psi_from_phi": _build_psi_from_phi,
    "tp_minor": _build_tp_minor,
}

INEQUALITY_NAMES = ("offdiag", "phi_step", "psi_a", "theta_product",
                    "psi_from_phi")


def build_inequality(name: str) -> FactoredRational:
    """The certificate expression for one of the named inequalities."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise InputError(f"unknown inequality {name!r}; "
                         f"expected one of {sorted(_BUILDERS)}") from None
    return builder()


def certify_inequality(name: str) -> Certificate:
    """Build and certify a named inequality.

    theta_product first certifies the internal tp_minor inequality (recorded
    in ``prerequisites``): the minor's nonnegativity is what makes the
    phi-for-b substitution inside theta sound.
    """
    prereqs = ()
    if name == "theta_product":
        minor_cert = certify_inequality("tp_minor")
        prereqs = (minor_cert,)
        if not minor_cert.success:
            return Certificate(name, False, 0, 0, -1, minor_cert.witness,
                               where="prerequisite", prerequisites=prereqs)
    cert = certify_nonneg(build_inequality(name), name)
    if prereqs:
        cert = Certificate(cert.name, cert.success, cert.den_terms,
                           cert.num_terms, cert.max_total_degree,
                           cert.witness, cert.where, prereqs)
    return cert


def gaps_for(ks, anchor: int, nvars: int) -> tuple:
    """Concrete gap values (t_{anchor+1}-t_{anchor}, ...) from a knot
    sequence, for evaluating certificate expressions at real partitions."""
    return tuple(ks.knot(anchor + r) - ks.knot(anchor + r - 1)
                 for r in range(1, nvars + 1))


def spot_check(fr: FactoredRational, npoints: int, seed: int) -> int:
    """Evaluate fr at random positive rational points; InputError on a
    negative value.  Returns the number of points checked (the independent
    numeric cross-route for a certificate)."""
    rng = random.Random(seed)
    checked = 0
    for _ in range(npoints):
        point = tuple(Fraction(rng.randint(1, 60), rng.randint(1, 60))
                      for _ in range(fr.nvars))
        value = fr(point)
        if value < 0:
            raise InputError(f"spot check failed: value {value} at {point}")
        checked += 1
    return checked


def certificate_to_json(cert: Certificate) -> dict:
    witness = None
    if cert.witness is not None:
        exps, coeff = cert.witness
        witness = {"monomial": list(exps), "coeff": format_scalar(Fraction(coeff))}
    return {
        "name": cert.name,
        "success": cert.success,
        "den_terms": cert.den_terms,
        "num_terms": cert.num_terms,
        "max_total_degree": cert.max_total_degree,
        "witness": witness,
    }
