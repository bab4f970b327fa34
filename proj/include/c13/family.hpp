/**
 * @file family.hpp
 * @brief The one-parameter family E_t of curves with a 13-torsion point over
 *        the quadratic field Q(sqrt(d)) determined by the squarefree part of
 *        the sextic D(t); builders for the standard and the inverted (z = 1/t)
 *        models, the explicit rational j-formula, and the bad-prime support.
 */
#ifndef C13_FAMILY_HPP
#define C13_FAMILY_HPP

#include <set>
#include <vector>

#include "c13/curve.hpp"

namespace c13 {

struct DegenerateParameter : Error {
    DegenerateParameter() : Error("degenerate parameter t in {0, 1}") {}
};
struct RationalPoint : Error {
    RationalPoint()
        : Error("sextic value is a rational square (d = 1); no such curve "
                "exists over a quadratic field") {}
};

namespace detail {

inline Rat eval_poly(const std::vector<long>& coeffs_high_to_low, const Rat& t) {
    Rat r = 0;
    for (long c : coeffs_high_to_low) r = r * t + c;
    return r;
}

}  // namespace detail

/// Value of the sextic under the square root, with its squarefree split.
struct SexticData {
    Rat t;
    Rat D;   // t^6 - 2t^5 + t^4 - 2t^3 + 6t^2 - 4t + 1
    Int d;   // squarefree part
    Rat m;   // D = d * m^2, m > 0
};

inline SexticData sextic(const Rat& t) {
    SexticData out;
    out.t = t;
    out.D = detail::eval_poly({1, -2, 1, -2, 6, -4, 1}, t);
    auto [d, m] = squarefree_split(out.D);
    out.d = d;
    out.m = m;
    return out;
}

struct FamilyCurve {
    Rat t;
    QuadraticField field;
    QuadNum s;  // chosen square root of D(t): the positive multiple of sqrt(d)
    WeierstrassModel model;
    Point marked_point;  // (0, 0), of order 13
};

namespace detail {

inline void check_parameter(const Rat& t) {
    if (t == 0 || t == 1) throw DegenerateParameter();
}

inline std::pair<QuadraticField, QuadNum> field_and_s(const Rat& t) {
    SexticData sd = sextic(t);
    if (sd.d == 1) throw RationalPoint();
    QuadraticField K(sd.d);
    return {K, QuadNum(Rat(0), sd.m, K)};
}

}  // namespace detail

/// E_t in Tate normal form y^2 + a*x*y + c*y = x^3 + b*x^2 with (0,0) of
/// order 13.
inline FamilyCurve build(const Rat& t) {
    detail::check_parameter(t);
    auto [K, s] = detail::field_and_s(t);
    Rat half(1, 2);
    Rat tm1 = t - 1;
    Rat a_s = tm1 * tm1 * (t * t + t - 1);
    Rat a_rat = detail::eval_poly({-1, 2, 3, -2, -5, 9, -5, 1}, t);
    QuadNum a = (s * a_s + QuadNum(a_rat, K)) * half;
    Rat b_s = detail::eval_poly({1, 2, 0, -5, 4, -1}, t);
    Rat b_rat = detail::eval_poly({-1, -1, 4, 2, 1, -13, 14, -6, 1}, t);
    Rat b_scale = t * tm1 * tm1 * half;
    QuadNum b = (s * b_s + QuadNum(b_rat, K)) * b_scale;
    Rat t5 = t * t * t * t * t;
    QuadNum c = b * t5;

    FamilyCurve fc;
    fc.t = t;
    fc.field = K;
    fc.s = s;
    QuadNum zero(Rat(0), K);
    fc.model = {a, b, c, zero, zero};
    fc.marked_point = Point::affine(zero, zero);
    if (invariants(fc.model).delta.is_zero()) throw SingularModel();
    return fc;
}

/// The alternative model of E_t in the variable z = 1/t; integral at the
/// primes where v(t) < 0.  Same j as build(t).
inline FamilyCurve build_inverted(const Rat& t) {
    detail::check_parameter(t);
    auto [K, s] = detail::field_and_s(t);
    Rat z = 1 / t;
    Rat half(1, 2);
    Rat zm1 = z - 1;

    Rat a1_s = detail::eval_poly({1, -3, 2, 1, -1, 0, 0, 0}, z);
    Rat a1_rat = detail::eval_poly({-1, 5, -9, 5, 2, -3, -2, 1}, z);
    QuadNum a1 = (s * a1_s + QuadNum(a1_rat, K)) * half;

    Rat br_s = detail::eval_poly({1, -4, 5, 0, -2, -1, 0, 0, 0}, z);
    Rat br_rat = detail::eval_poly({-1, 6, -14, 13, -1, -2, -4, 1, 1}, z);
    QuadNum bracket = s * br_s + QuadNum(br_rat, K);
    Rat z3 = z * z * z;
    Rat z8 = z3 * z3 * z * z;
    QuadNum a2 = bracket * (z8 * zm1 * zm1 * half);
    QuadNum a3 = bracket * (z3 * zm1 * zm1 * half);

    FamilyCurve fc;
    fc.t = t;
    fc.field = K;
    fc.s = s;
    QuadNum zero(Rat(0), K);
    fc.model = {a1, a2, a3, zero, zero};
    fc.marked_point = Point::affine(zero, zero);
    if (invariants(fc.model).delta.is_zero()) throw SingularModel();
    return fc;
}

/// The explicit rational j(E_t).
inline Rat j_formula(const Rat& t) {
    detail::check_parameter(t);
    Rat cubic = detail::eval_poly({1, -4, 1, 1}, t);
    if (cubic == 0) throw Error("j_formula: zero denominator");
    Rat quad = t * t - t + 1;
    Rat big = detail::eval_poly(
        {1, -9, 29, -40, 22, -16, 40, -22, -23, 25, -4, -3, 1}, t);
    Rat num = quad * quad * quad * big * big * big;
    Rat tp = t, tm1 = t - 1;
    Rat t13 = 1, tm113 = 1;
    for (int i = 0; i < 13; ++i) {
        t13 *= tp;
        tm113 *= tm1;
    }
    return num / (t13 * tm113 * cubic);
}

/// Rational primes that can lie below a bad prime of the minimal model:
/// {13} plus the support of t, t-1 and of the cubic t^3 - 4t^2 + t + 1.
inline std::vector<Int> bad_support(const Rat& t,
                                    const FactorBudget& budget = {}) {
    detail::check_parameter(t);
    std::set<Int> primes{13};
    auto absorb = [&](const Int& n) {
        Factorization f = factor(n, budget);
        if (!f.complete())
            throw IncompleteFactorization("bad_support: budget exhausted");
        for (const auto& [p, e] : f.factors) primes.insert(p);
    };
    const Int r = t.get_num(), q = t.get_den();
    absorb(r);
    absorb(q);
    absorb(r - q);
    absorb(r * r * r - 4 * r * r * q + r * q * q + q * q * q);
    return {primes.begin(), primes.end()};
}

}  // namespace c13

#endif  // C13_FAMILY_HPP
