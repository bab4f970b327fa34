/**
 * @file curve.hpp
 * @brief Long Weierstrass models over a quadratic field: standard invariants,
 *        coordinate changes, and the chord-tangent group law (enough to
 *        certify torsion orders of marked points).
 */
#ifndef C13_CURVE_HPP
#define C13_CURVE_HPP

#include <optional>

#include "c13/quadfield.hpp"

namespace c13 {

struct SingularModel : Error {
    SingularModel() : Error("singular model: discriminant is zero") {}
};
struct OffCurvePoint : Error {
    OffCurvePoint() : Error("point does not satisfy the curve equation") {}
};

/// y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6 over K.
struct WeierstrassModel {
    QuadNum a1, a2, a3, a4, a6;

    const QuadraticField& field() const { return a1.field(); }
};

struct Invariants {
    QuadNum b2, b4, b6, b8, c4, c6, delta;
};

inline Invariants invariants(const WeierstrassModel& m) {
    Invariants I;
    const auto& [a1, a2, a3, a4, a6] = m;
    Rat two(2), three(3), four(4), eight(8), nine(9);
    I.b2 = a1 * a1 + four * a2;
    I.b4 = two * a4 + a1 * a3;
    I.b6 = a3 * a3 + four * a6;
    I.b8 = a1 * a1 * a6 + four * a2 * a6 - a1 * a3 * a4 + a2 * (a3 * a3) -
           a4 * a4;
    I.c4 = I.b2 * I.b2 - Rat(24) * I.b4;
    I.c6 = -(I.b2 * I.b2 * I.b2) + Rat(36) * I.b2 * I.b4 - Rat(216) * I.b6;
    I.delta = -(I.b2 * I.b2 * I.b8) - eight * (I.b4 * I.b4 * I.b4) -
              Rat(27) * (I.b6 * I.b6) + nine * I.b2 * I.b4 * I.b6;
    return I;
}

inline QuadNum j_invariant(const WeierstrassModel& m) {
    Invariants I = invariants(m);
    if (I.delta.is_zero()) throw SingularModel();
    return (I.c4 * I.c4 * I.c4) / I.delta;
}

/// Change of coordinates x = u^2 x' + r, y = u^3 y' + u^2 s x' + t.
/// Scales the discriminant by u^-12 and preserves j.
inline WeierstrassModel transform(const WeierstrassModel& m, const QuadNum& u,
                                  const QuadNum& r, const QuadNum& s,
                                  const QuadNum& t) {
    if (u.is_zero()) throw Error("transform: u = 0");
    const auto& [a1, a2, a3, a4, a6] = m;
    Rat two(2), three(3);
    QuadNum u2 = u * u;
    QuadNum u3 = u2 * u;
    WeierstrassModel out;
    out.a1 = (a1 + two * s) / u;
    out.a2 = (a2 - s * a1 + three * r - s * s) / u2;
    out.a3 = (a3 + r * a1 + two * t) / u3;
    out.a4 = (a4 - s * a3 + two * (r * a2) - (t + r * s) * a1 + three * (r * r) -
              two * (s * t)) /
             (u2 * u2);
    out.a6 = (a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t -
              r * t * a1) /
             (u3 * u3);
    return out;
}

/// Affine point or the point at infinity.
struct Point {
    bool infinity = true;
    QuadNum x, y;

    static Point at_infinity() { return {}; }
    static Point affine(QuadNum x, QuadNum y) {
        return {false, std::move(x), std::move(y)};
    }
    bool operator==(const Point& o) const {
        if (infinity || o.infinity) return infinity == o.infinity;
        return x == o.x && y == o.y;
    }
};

inline bool on_curve(const WeierstrassModel& m, const Point& P) {
    if (P.infinity) return true;
    QuadNum lhs = P.y * P.y + m.a1 * P.x * P.y + m.a3 * P.y;
    QuadNum rhs = P.x * P.x * P.x + m.a2 * (P.x * P.x) + m.a4 * P.x + m.a6;
    return lhs == rhs;
}

inline Point negate(const WeierstrassModel& m, const Point& P) {
    if (P.infinity) return P;
    return Point::affine(P.x, -P.y - m.a1 * P.x - m.a3);
}

inline Point add(const WeierstrassModel& m, const Point& P, const Point& Q) {
    if (P.infinity) return Q;
    if (Q.infinity) return P;
    if (!on_curve(m, P) || !on_curve(m, Q)) throw OffCurvePoint();
    Rat two(2), three(3);
    QuadNum lambda, nu;
    if (P.x == Q.x) {
        if (P.y != Q.y || (P == negate(m, P))) return Point::at_infinity();
        QuadNum den = two * P.y + m.a1 * P.x + m.a3;
        lambda = (three * (P.x * P.x) + two * (m.a2 * P.x) + m.a4 -
                  m.a1 * P.y) /
                 den;
    } else {
        lambda = (Q.y - P.y) / (Q.x - P.x);
    }
    nu = P.y - lambda * P.x;
    QuadNum x3 = lambda * lambda + m.a1 * lambda - m.a2 - P.x - Q.x;
    QuadNum y3 = -(lambda + m.a1) * x3 - nu - m.a3;
    return Point::affine(x3, y3);
}

inline Point smul(const WeierstrassModel& m, Int n, Point P) {
    if (n < 0) {
        P = negate(m, P);
        n = -n;
    }
    Point acc = Point::at_infinity();
    while (n > 0) {
        if (mpz_odd_p(n.get_mpz_t())) acc = add(m, acc, P);
        n >>= 1;
        if (n > 0) P = add(m, P, P);
    }
    return acc;
}

/// Least n <= bound with n*P = infinity, or nullopt.
inline std::optional<long> point_order(const WeierstrassModel& m,
                                       const Point& P, long bound) {
    Point acc = Point::at_infinity();
    for (long n = 1; n <= bound; ++n) {
        acc = add(m, acc, P);
        if (acc.infinity) return n;
    }
    return std::nullopt;
}

}  // namespace c13

#endif  // C13_CURVE_HPP
