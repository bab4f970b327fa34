/**
 * @file residue.hpp
 * @brief Residue fields F_p and F_p^2 of primes of a quadratic field:
 *        element arithmetic in a fixed basis {1, w}, square tests, and root
 *        finding for the quadratics/cubics in Tate's algorithm.
 *
 * Degree-2 fields use a generator w with w^2 = A*w + B.  For odd p this is
 * w = sqrt(d) (A = 0, B = d mod p); for p = 2 (d = 5 mod 8) it is
 * w = (1+sqrt(d))/2 with minimal polynomial w^2 + w + 1 (A = B = 1).
 */
#ifndef C13_RESIDUE_HPP
#define C13_RESIDUE_HPP

#include <algorithm>
#include <cassert>
#include <vector>

#include "c13/exactnum.hpp"

namespace c13 {

struct ResidueElem {
    Int u = 0, v = 0;  // u + v*w; v = 0 in degree-1 fields
    bool operator==(const ResidueElem&) const = default;
};

class ResidueField {
public:
    ResidueField() = default;
    ResidueField(Int p_, int degree_, Int A_ = 0, Int B_ = 0)
        : p(std::move(p_)), degree(degree_), A(std::move(A_)), B(std::move(B_)) {
        A = mod(A);
        B = mod(B);
    }

    Int p = 2;
    int degree = 1;
    Int A = 0, B = 0;  // w^2 = A*w + B (degree 2 only)

    Int q() const { return degree == 1 ? p : p * p; }
    bool char2() const { return p == 2; }

    Int mod(const Int& x) const {
        Int r = x % p;
        if (r < 0) r += p;
        return r;
    }

    ResidueElem make(const Int& u, const Int& v = 0) const {
        assert(degree == 2 || v % p == 0);
        return {mod(u), mod(v)};
    }
    ResidueElem zero() const { return {0, 0}; }
    ResidueElem one() const { return {1, 0}; }

    bool is_zero(const ResidueElem& x) const { return x.u == 0 && x.v == 0; }

    ResidueElem add(const ResidueElem& x, const ResidueElem& y) const {
        return {mod(x.u + y.u), mod(x.v + y.v)};
    }
    ResidueElem sub(const ResidueElem& x, const ResidueElem& y) const {
        return {mod(x.u - y.u), mod(x.v - y.v)};
    }
    ResidueElem neg(const ResidueElem& x) const {
        return {mod(-x.u), mod(-x.v)};
    }
    ResidueElem mul(const ResidueElem& x, const ResidueElem& y) const {
        if (degree == 1) return {x.u * y.u % p, 0};
        Int vv = x.v * y.v;
        return {mod(x.u * y.u + B * vv), mod(x.u * y.v + x.v * y.u + A * vv)};
    }
    ResidueElem mul_int(const ResidueElem& x, const Int& c) const {
        return {mod(x.u * c), mod(x.v * c)};
    }

    /// x^p, the Frobenius; in degree 2 also the inverse of Frobenius.
    ResidueElem frobenius(const ResidueElem& x) const {
        if (degree == 1) return x;
        return {mod(x.u + A * x.v), mod(-x.v)};
    }

    /// Field norm down to F_p.
    Int norm(const ResidueElem& x) const {
        if (degree == 1) return x.u;
        return mod(x.u * x.u + A * x.u * x.v - B * x.v * x.v);
    }

    ResidueElem inv(const ResidueElem& x) const {
        if (is_zero(x)) throw Error("residue inverse of zero");
        if (degree == 1) {
            Int r;
            mpz_invert(r.get_mpz_t(), x.u.get_mpz_t(), p.get_mpz_t());
            return {r, 0};
        }
        Int n = norm(x);
        Int ninv;
        mpz_invert(ninv.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
        return mul_int(frobenius(x), ninv);
    }
    ResidueElem div(const ResidueElem& x, const ResidueElem& y) const {
        return mul(x, inv(y));
    }

    ResidueElem pow(ResidueElem x, Int e) const {
        ResidueElem r = one();
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t())) r = mul(r, x);
            x = mul(x, x);
            e >>= 1;
        }
        return r;
    }

    /// Unique p-th root (Frobenius is bijective on finite fields).
    ResidueElem pth_root(const ResidueElem& x) const {
        return degree == 1 ? x : frobenius(x);
    }

    bool is_square(const ResidueElem& x) const {
        if (char2() || is_zero(x)) return true;
        return kronecker(norm(x), p) == 1;
    }

    /// Square root; canonical choice in F_p is min(r, p-r), in F_p^2 the
    /// branch with canonical first coordinate.  Throws NoRootError.
    ResidueElem sqrt(const ResidueElem& x) const {
        if (is_zero(x)) return zero();
        if (char2()) {
            // q in {2,4}: squaring is bijective, sqrt = x^(q/2)
            return pth_root(x);
        }
        if (degree == 1) return {sqrt_mod_prime(x.u, p), 0};
        if (!is_square(x)) throw NoRootError("residue sqrt: non-residue");
        // w^2 = B, A = 0 here (odd p, inert basis)
        assert(A == 0);
        if (x.v == 0) {
            if (kronecker(x.u, p) >= 0)
                return {sqrt_mod_prime(x.u, p), 0};
            Int t = mod(x.u * invert_mod(B));
            return {0, sqrt_mod_prime(t, p)};  // (r*w)^2 = r^2 B = u
        }
        Int n0 = sqrt_mod_prime(mod(x.u * x.u - B * x.v * x.v), p);
        Int inv2 = invert_mod(Int(2));
        Int h = mod((x.u + n0) * inv2);
        if (h == 0 || kronecker(h, p) != 1) h = mod((x.u - n0) * inv2);
        Int a = sqrt_mod_prime(h, p);
        Int b = mod(x.v * invert_mod(mod(2 * a)));
        return {a, b};
    }

    std::vector<ResidueElem> all_elements() const {
        std::vector<ResidueElem> out;
        for (Int u = 0; u < p; ++u) {
            if (degree == 1) {
                out.push_back({u, 0});
            } else {
                for (Int v = 0; v < p; ++v) out.push_back({u, v});
            }
        }
        return out;
    }

    Int invert_mod(const Int& x) const {
        Int r;
        if (mpz_invert(r.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t()) == 0)
            throw Error("residue: not invertible");
        return r;
    }

    bool operator==(const ResidueField& o) const {
        return p == o.p && degree == o.degree && A == o.A && B == o.B;
    }
};

// ---------------------------------------------------------------------------
// polynomials over a residue field (degree <= 4 workloads)

using Poly = std::vector<ResidueElem>;  // coefficients, low to high

namespace respoly {

inline void trim(const ResidueField& f, Poly& a) {
    while (!a.empty() && f.is_zero(a.back())) a.pop_back();
}
inline int deg(const Poly& a) { return static_cast<int>(a.size()) - 1; }

inline ResidueElem eval(const ResidueField& f, const Poly& a,
                        const ResidueElem& x) {
    ResidueElem r = f.zero();
    for (auto it = a.rbegin(); it != a.rend(); ++it)
        r = f.add(f.mul(r, x), *it);
    return r;
}

inline Poly mul(const ResidueField& f, const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly c(a.size() + b.size() - 1, f.zero());
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            c[i + j] = f.add(c[i + j], f.mul(a[i], b[j]));
    trim(f, c);
    return c;
}

inline Poly rem(const ResidueField& f, Poly a, const Poly& b) {
    trim(f, a);
    ResidueElem lead_inv = f.inv(b.back());
    while (deg(a) >= deg(b)) {
        ResidueElem c = f.mul(a.back(), lead_inv);
        size_t shift = a.size() - b.size();
        for (size_t i = 0; i < b.size(); ++i)
            a[shift + i] = f.sub(a[shift + i], f.mul(c, b[i]));
        trim(f, a);
    }
    return a;
}

inline Poly gcd(const ResidueField& f, Poly a, Poly b) {
    trim(f, a);
    trim(f, b);
    while (!b.empty()) {
        Poly r = rem(f, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {  // monic normalization
        ResidueElem li = f.inv(a.back());
        for (auto& c : a) c = f.mul(c, li);
    }
    return a;
}

/// X^e modulo m, by binary exponentiation.
inline Poly x_pow_mod(const ResidueField& f, const Int& e, const Poly& m) {
    Poly r{f.one()};
    Poly base{f.zero(), f.one()};  // X
    base = rem(f, base, m);
    Int k = e;
    size_t bits = mpz_sizeinbase(k.get_mpz_t(), 2);
    for (size_t i = bits; i-- > 0;) {
        r = rem(f, mul(f, r, r), m);
        if (mpz_tstbit(k.get_mpz_t(), i)) r = rem(f, mul(f, r, base), m);
    }
    return r;
}

/// gcd(P, X^q - X): the product of the distinct k-rational root factors.
inline Poly rational_root_part(const ResidueField& f, const Poly& P) {
    Poly xq = x_pow_mod(f, f.q(), P);
    // xq - X
    Poly diff = xq;
    if (diff.size() < 2) diff.resize(2, f.zero());
    diff[1] = f.sub(diff[1], f.one());
    trim(f, diff);
    return gcd(f, P, diff);
}

}  // namespace respoly

// ---------------------------------------------------------------------------
// structured analysis of quadratics and cubics (Tate's algorithm fodder)

struct QuadraticInfo {
    bool separable = true;
    int rational_roots = 0;     // 0 or 2 when separable
    ResidueElem double_root{};  // set when !separable
};

/// a*X^2 + b*X + c with a != 0.
inline QuadraticInfo analyze_quadratic(const ResidueField& f,
                                       const ResidueElem& a,
                                       const ResidueElem& b,
                                       const ResidueElem& c) {
    QuadraticInfo out;
    if (f.char2()) {
        ResidueElem bn = f.div(b, a);
        if (f.is_zero(bn)) {
            out.separable = false;
            out.double_root = f.sqrt(f.div(c, a));  // (X - r)^2, r^2 = -c/a = c/a
            return out;
        }
        out.separable = true;
        out.rational_roots = 0;
        for (const auto& x : f.all_elements()) {
            ResidueElem val =
                f.add(f.add(f.mul(f.mul(a, x), x), f.mul(b, x)), c);
            if (f.is_zero(val)) ++out.rational_roots;
        }
        return out;
    }
    ResidueElem disc = f.sub(f.mul(b, b), f.mul_int(f.mul(a, c), 4));
    if (f.is_zero(disc)) {
        out.separable = false;
        out.double_root = f.div(f.neg(b), f.mul_int(a, 2));
        return out;
    }
    out.separable = true;
    out.rational_roots = f.is_square(disc) ? 2 : 0;
    return out;
}

struct CubicInfo {
    enum Kind { Separable, Double, Triple } kind = Separable;
    int rational_roots = 0;     // Separable only: 0, 1 or 3
    ResidueElem double_root{};  // Double
    ResidueElem simple_root{};  // Double
    ResidueElem triple_root{};  // Triple
};

/// Monic T^3 + A2*T^2 + A1*T + A0 over any finite field here.
inline CubicInfo analyze_cubic(const ResidueField& f, const ResidueElem& A2,
                               const ResidueElem& A1, const ResidueElem& A0) {
    CubicInfo out;
    auto P = [&](const ResidueElem& t) {
        return f.add(f.add(f.mul(f.mul(t, t), t), f.mul(A2, f.mul(t, t))),
                     f.add(f.mul(A1, t), A0));
    };
    auto count_rational = [&]() {
        Poly poly{A0, A1, A2, f.one()};
        Poly g = respoly::rational_root_part(f, poly);
        return respoly::deg(g);
    };

    if (f.char2()) {
        // P' = T^2 + A1 = (T + sqrt(A1))^2
        ResidueElem r = f.sqrt(A1);
        if (!f.is_zero(P(r))) {
            out.kind = CubicInfo::Separable;
            out.rational_roots = count_rational();
            return out;
        }
        // r is a root of multiplicity >= 2; third root is A2 (sum of roots)
        ResidueElem beta = A2;
        if (beta == r) {
            out.kind = CubicInfo::Triple;
            out.triple_root = r;
        } else {
            out.kind = CubicInfo::Double;
            out.double_root = r;
            out.simple_root = beta;
        }
        return out;
    }
    if (f.p == 3) {
        if (f.is_zero(A2)) {
            if (!f.is_zero(A1)) {  // P' = A1, nonzero constant
                out.kind = CubicInfo::Separable;
                out.rational_roots = count_rational();
                return out;
            }
            out.kind = CubicInfo::Triple;  // T^3 + A0 = (T + cbrt(A0))^3
            out.triple_root = f.neg(f.pth_root(A0));
            return out;
        }
        // P' = -A2*T + A1 has the single critical point
        ResidueElem r = f.div(A1, A2);
        if (!f.is_zero(P(r))) {
            out.kind = CubicInfo::Separable;
            out.rational_roots = count_rational();
            return out;
        }
        out.kind = CubicInfo::Double;  // P'' = 2*A2 != 0, never triple
        out.double_root = r;
        out.simple_root = f.sub(r, A2);  // beta = -A2 - 2r = r - A2 (char 3)
        return out;
    }
    // char >= 5
    ResidueElem A2sq = f.mul(A2, A2);
    ResidueElem disc = f.sub(
        f.add(f.mul_int(f.mul(f.mul(A2, A1), A0), 18),
              f.mul(A2sq, f.mul(A1, A1))),
        f.add(f.add(f.mul_int(f.mul(A2sq, f.mul(A2, A0)), 4),
                    f.mul_int(f.mul(f.mul(A1, A1), A1), 4)),
              f.mul_int(f.mul(A0, A0), 27)));
    if (!f.is_zero(disc)) {
        out.kind = CubicInfo::Separable;
        out.rational_roots = count_rational();
        return out;
    }
    ResidueElem delta = f.sub(A2sq, f.mul_int(A1, 3));  // (alpha - beta)^2 scale
    if (f.is_zero(delta)) {
        out.kind = CubicInfo::Triple;
        out.triple_root = f.div(f.neg(A2), f.make(3));
        return out;
    }
    out.kind = CubicInfo::Double;
    out.double_root = f.div(f.sub(f.mul_int(A0, 9), f.mul(A2, A1)),
                            f.mul_int(delta, 2));
    out.simple_root = f.sub(f.neg(A2), f.mul_int(out.double_root, 2));
    return out;
}

// ---------------------------------------------------------------------------
// explicit root multisets (public helpers)

/// Roots in k of a*X^2 + b*X + c (a != 0), with multiplicity.
inline std::vector<ResidueElem> roots_quadratic(const ResidueField& f,
                                                const ResidueElem& a,
                                                const ResidueElem& b,
                                                const ResidueElem& c) {
    std::vector<ResidueElem> roots;
    if (f.char2()) {
        for (const auto& x : f.all_elements()) {
            ResidueElem val =
                f.add(f.add(f.mul(f.mul(a, x), x), f.mul(b, x)), c);
            if (f.is_zero(val)) roots.push_back(x);
        }
        if (roots.size() == 1) roots.push_back(roots[0]);  // double root
        return roots;
    }
    ResidueElem disc = f.sub(f.mul(b, b), f.mul_int(f.mul(a, c), 4));
    if (f.is_zero(disc)) {
        ResidueElem r = f.div(f.neg(b), f.mul_int(a, 2));
        return {r, r};
    }
    if (!f.is_square(disc)) return {};
    ResidueElem s = f.sqrt(disc);
    ResidueElem inv2a = f.inv(f.mul_int(a, 2));
    roots.push_back(f.mul(f.add(f.neg(b), s), inv2a));
    roots.push_back(f.mul(f.sub(f.neg(b), s), inv2a));
    return roots;
}

namespace detail {

/// One k-rational root of a monic split polynomial g (deg >= 1, all roots in
/// k, distinct).  Deterministic Cantor-Zassenhaus scan for odd q.
inline ResidueElem find_root_split(const ResidueField& f, Poly g) {
    respoly::trim(f, g);
    while (respoly::deg(g) > 1) {
        if (respoly::deg(g) == 2) {
            auto rs = roots_quadratic(f, g[2], g[1], g[0]);
            return rs.at(0);
        }
        bool shrunk = false;
        Int half = (f.q() - 1) / 2;
        for (long trial = 0; trial < 4096; ++trial) {
            ResidueElem delta =
                f.degree == 1 ? f.make(trial)
                              : f.make(trial % 64, 1 + trial / 64);
            // h = gcd(g, (X + delta)^((q-1)/2) - 1)
            Poly shifted{delta, f.one()};
            Poly pw{f.one()};
            Int e = half;
            Poly base = respoly::rem(f, shifted, g);
            size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
            for (size_t i = bits; i-- > 0;) {
                pw = respoly::rem(f, respoly::mul(f, pw, pw), g);
                if (mpz_tstbit(e.get_mpz_t(), i))
                    pw = respoly::rem(f, respoly::mul(f, pw, base), g);
            }
            if (pw.empty()) {  // X = -delta is a root
                return f.neg(delta);
            }
            pw[0] = f.sub(pw[0], f.one());
            Poly h = respoly::gcd(f, g, pw);
            if (respoly::deg(h) >= 1 && respoly::deg(h) < respoly::deg(g)) {
                g = std::move(h);
                shrunk = true;
                break;
            }
        }
        if (!shrunk) throw Error("find_root_split: no splitting element");
    }
    return f.neg(g[0]);  // monic linear
}

}  // namespace detail

/// Roots in k of monic T^3 + A2 T^2 + A1 T + A0, with multiplicity.
inline std::vector<ResidueElem> roots_cubic(const ResidueField& f,
                                            const ResidueElem& A2,
                                            const ResidueElem& A1,
                                            const ResidueElem& A0) {
    std::vector<ResidueElem> roots;
    if (f.char2()) {
        for (const auto& x : f.all_elements()) {
            ResidueElem x2 = f.mul(x, x);
            ResidueElem val = f.add(f.add(f.mul(x2, x), f.mul(A2, x2)),
                                    f.add(f.mul(A1, x), A0));
            if (!f.is_zero(val)) continue;
            // multiplicity by synthetic division
            roots.push_back(x);
        }
        // expand multiplicities
        std::vector<ResidueElem> out;
        for (const auto& r : roots) {
            Poly p{A0, A1, A2, f.one()};
            int mult = 0;
            while (!p.empty() && f.is_zero(respoly::eval(f, p, r))) {
                // divide by (T - r)
                Poly quot(p.size() - 1, f.zero());
                ResidueElem carry = f.zero();
                for (size_t i = p.size(); i-- > 1;) {
                    carry = f.add(p[i], f.mul(carry, r));
                    quot[i - 1] = carry;
                }
                p = quot;
                ++mult;
            }
            for (int i = 0; i < mult; ++i) out.push_back(r);
        }
        return out;
    }
    CubicInfo info = analyze_cubic(f, A2, A1, A0);
    switch (info.kind) {
        case CubicInfo::Triple:
            return {info.triple_root, info.triple_root, info.triple_root};
        case CubicInfo::Double: {
            roots = {info.double_root, info.double_root, info.simple_root};
            return roots;
        }
        case CubicInfo::Separable: {
            Poly poly{A0, A1, A2, f.one()};
            Poly g = respoly::rational_root_part(f, poly);
            int n = respoly::deg(g);
            if (n == 0) return {};
            if (n == 1) return {f.neg(g[0])};
            if (n == 2) return roots_quadratic(f, g[2], g[1], g[0]);
            // fully split, distinct roots
            ResidueElem r1 = detail::find_root_split(f, g);
            // deflate
            Poly quot(3, f.zero());
            ResidueElem carry = f.zero();
            Poly p{A0, A1, A2, f.one()};
            for (size_t i = p.size(); i-- > 1;) {
                carry = f.add(p[i], f.mul(carry, r1));
                quot[i - 1] = carry;
            }
            auto rest = roots_quadratic(f, quot[2], quot[1], quot[0]);
            rest.push_back(r1);
            return rest;
        }
    }
    return roots;
}

}  // namespace c13

#endif  // C13_RESIDUE_HPP
