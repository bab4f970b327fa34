/**
 * @file exactnum.hpp
 * @brief Exact integer/rational arithmetic and elementary number theory on
 *        top of GMP: factorization, squarefree decomposition, Kronecker
 *        symbol, square roots modulo prime powers, p-adic valuations.
 */
#ifndef C13_EXACTNUM_HPP
#define C13_EXACTNUM_HPP

#include <gmpxx.h>

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace c13 {

using Int = mpz_class;
using Rat = mpq_class;

/// Valuation of zero: distinguished +infinity marker.
inline constexpr long kValInf = std::numeric_limits<long>::max();

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroInputError : Error {
    ZeroInputError() : Error("zero input") {}
};
struct NoRootError : Error {
    using Error::Error;
};
struct IncompleteFactorization : Error {
    using Error::Error;
};

inline Rat make_rat(const Int& num, const Int& den) {
    if (den == 0) throw Error("make_rat: zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

inline Rat parse_rat(const std::string& s) {
    Rat q;
    if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0)
        throw Error("parse_rat: cannot parse '" + s + "'");
    q.canonicalize();
    if (q.get_den() == 0) throw Error("parse_rat: zero denominator");
    return q;
}

inline std::string rat_str(const Rat& q) { return q.get_str(); }

// ---------------------------------------------------------------------------
// valuations

/// Exponent of the prime p in n (n != 0).
inline long vp_int(const Int& n, const Int& p) {
    if (n == 0) return kValInf;
    Int tmp;
    return static_cast<long>(
        mpz_remove(tmp.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

/// p-adic valuation of a rational; vp(0) = +infinity marker.
inline long vp(const Rat& q, const Int& p) {
    if (q == 0) return kValInf;
    return vp_int(q.get_num(), p) - vp_int(q.get_den(), p);
}

// ---------------------------------------------------------------------------
// primality

namespace detail {

inline bool mr_witness(const Int& n, const Int& a) {
    // returns true when a proves n composite
    Int nm1 = n - 1;
    unsigned long s = static_cast<unsigned long>(vp_int(nm1, 2));
    Int d = nm1 >> s;
    Int x;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == nm1) return false;
    for (unsigned long i = 1; i < s; ++i) {
        x = x * x % n;
        if (x == nm1) return false;
    }
    return true;
}

}  // namespace detail

/// Deterministic Miller-Rabin below 3.317e24 (first 13 prime bases), 64
/// probabilistic rounds above.
inline bool is_prime(const Int& n) {
    if (n < 2) return false;
    static const unsigned long small[] = {2,  3,  5,  7,  11, 13, 17,
                                          19, 23, 29, 31, 37, 41};
    for (unsigned long p : small) {
        if (n == p) return true;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
    }
    static const Int det_bound("3317044064679887385961981");
    if (n < det_bound) {
        for (unsigned long a : small)
            if (detail::mr_witness(n, Int(a))) return false;
        return true;
    }
    return mpz_probab_prime_p(n.get_mpz_t(), 64) != 0;
}

// ---------------------------------------------------------------------------
// factorization

struct Factorization {
    int sign = 1;
    std::vector<std::pair<Int, unsigned long>> factors;  // (prime, exponent)
    std::optional<Int> cofactor;  // composite-or-unknown leftover, > 1

    bool complete() const { return !cofactor.has_value(); }

    Int value() const {
        Int v = sign;
        for (const auto& [p, e] : factors) {
            Int pe;
            mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e);
            v *= pe;
        }
        if (cofactor) v *= *cofactor;
        return v;
    }
};

struct FactorBudget {
    unsigned long trial_bound = 1'000'000;
    unsigned long rho_iters = 4'000'000;  // per factor() call, all rho attempts
};

namespace detail {

/// Brent's cycle variant of Pollard rho; deterministic parameters.
/// Returns a nontrivial divisor, or 0 when the budget runs out.
inline Int rho_brent(const Int& n, unsigned long& iters_left) {
    for (unsigned long c = 1; c <= 16; ++c) {
        Int y = 2, g = 1, q = 1, x = 0, ys = 0;
        unsigned long r = 1;
        const unsigned long batch = 128;
        while (g == 1) {
            x = y;
            for (unsigned long i = 0; i < r; ++i) y = (y * y + c) % n;
            unsigned long k = 0;
            while (k < r && g == 1) {
                ys = y;
                unsigned long lim = std::min(batch, r - k);
                if (iters_left < lim) return 0;
                iters_left -= lim;
                for (unsigned long i = 0; i < lim; ++i) {
                    y = (y * y + c) % n;
                    q = q * abs(x - y) % n;
                }
                g = gcd(q, n);
                k += lim;
            }
            r *= 2;
        }
        if (g == n) {
            // batched gcd overshot; replay one step at a time
            g = 1;
            while (g == 1) {
                ys = (ys * ys + c) % n;
                g = gcd(abs(x - ys), n);
            }
        }
        if (g != n) return g;
        // cycle degenerated for this c; retry with the next increment
    }
    return 0;
}

inline void add_factor(Factorization& f, const Int& p, unsigned long mult) {
    for (auto& [q, e] : f.factors)
        if (q == p) {
            e += mult;
            return;
        }
    f.factors.emplace_back(p, mult);
}

inline void split(Factorization& f, Int m, unsigned long mult,
                  unsigned long& iters_left) {
    if (m == 1) return;
    if (is_prime(m)) {
        add_factor(f, m, mult);
        return;
    }
    // perfect powers show up naturally here (e.g. 12th powers in
    // discriminant norms), and cracking them first keeps rho inputs small
    if (mpz_perfect_power_p(m.get_mpz_t())) {
        for (unsigned long e = 2; e <= mpz_sizeinbase(m.get_mpz_t(), 2); ++e) {
            Int root;
            if (mpz_root(root.get_mpz_t(), m.get_mpz_t(), e) != 0) {
                split(f, root, mult * e, iters_left);
                return;
            }
        }
    }
    Int g = rho_brent(m, iters_left);
    if (g == 0) {
        if (f.cofactor) {
            Int pw;
            mpz_pow_ui(pw.get_mpz_t(), m.get_mpz_t(), mult);
            *f.cofactor *= pw;
        } else {
            Int pw;
            mpz_pow_ui(pw.get_mpz_t(), m.get_mpz_t(), mult);
            f.cofactor = pw;
        }
        return;
    }
    split(f, g, mult, iters_left);
    split(f, m / g, mult, iters_left);
}

}  // namespace detail

/// Trial division up to budget.trial_bound, then Pollard-Brent rho with an
/// iteration budget; leftovers land in Factorization::cofactor.
inline Factorization factor(const Int& n, const FactorBudget& budget = {}) {
    if (n == 0) throw ZeroInputError();
    Factorization f;
    Int m = n;
    if (m < 0) {
        f.sign = -1;
        m = -m;
    }
    if (m == 1) return f;

    unsigned long e2 = static_cast<unsigned long>(vp_int(m, 2));
    if (e2 > 0) {
        f.factors.emplace_back(2, e2);
        m >>= e2;
    }
    Int limit;
    mpz_sqrt(limit.get_mpz_t(), m.get_mpz_t());
    for (unsigned long d = 3; d <= budget.trial_bound && m > 1; d += 2) {
        if (limit < d) break;
        if (mpz_divisible_ui_p(m.get_mpz_t(), d)) {
            unsigned long e = 0;
            do {
                mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), d);
                ++e;
            } while (mpz_divisible_ui_p(m.get_mpz_t(), d));
            f.factors.emplace_back(d, e);
            mpz_sqrt(limit.get_mpz_t(), m.get_mpz_t());
        }
    }
    if (m > 1) {
        if (limit <= budget.trial_bound) {
            // m is below the square of the trial bound, hence prime
            detail::add_factor(f, m, 1);
        } else {
            unsigned long iters = budget.rho_iters;
            detail::split(f, m, 1, iters);
        }
    }
    std::sort(f.factors.begin(), f.factors.end());
    return f;
}

// ---------------------------------------------------------------------------
// squarefree decomposition

/// q = d * m^2 with d squarefree, m > 0; d = 1 iff q is a rational square.
inline std::pair<Int, Rat> squarefree_split(const Rat& q,
                                            const FactorBudget& budget = {}) {
    if (q == 0) throw ZeroInputError();
    Factorization fn = factor(Int(q.get_num()), budget);
    Factorization fd = factor(Int(q.get_den()), budget);
    if (!fn.complete() || !fd.complete())
        throw IncompleteFactorization("squarefree_split: budget exhausted");
    Int d = fn.sign;
    Rat m = 1;
    for (const auto& [p, e] : fn.factors) {
        if (e & 1) d *= p;
        Int pe;
        mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), e / 2);
        m *= pe;
    }
    for (const auto& [p, e] : fd.factors) {
        // exponent in q is -e; floor(-e/2) = -(e+1)/2
        if (e & 1) d *= p;
        Int pe;
        mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), (e + 1) / 2);
        m /= pe;
    }
    return {d, m};
}

// ---------------------------------------------------------------------------
// Kronecker symbol

inline int kronecker(const Int& a, const Int& n) {
    if (n == 0) throw ZeroInputError();
    return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

// ---------------------------------------------------------------------------
// square roots modulo prime powers

/// Tonelli-Shanks modulo an odd prime; returns the canonical root
/// min(r, p - r). Throws NoRootError for non-residues.
inline Int sqrt_mod_prime(const Int& a0, const Int& p) {
    Int a = a0 % p;
    if (a < 0) a += p;
    if (a == 0) return 0;
    if (kronecker(a, p) != 1) throw NoRootError("sqrt_mod_prime: non-residue");
    Int r;
    if (p % 4 == 3) {
        Int e = (p + 1) / 4;
        mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    } else {
        Int q = p - 1;
        unsigned long s = static_cast<unsigned long>(vp_int(q, 2));
        q >>= s;
        Int z = 2;
        while (kronecker(z, p) != -1) ++z;
        Int c, t, b;
        mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
        mpz_powm(t.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
        Int e = (q + 1) / 2;
        mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
        unsigned long m = s;
        while (t != 1) {
            Int t2 = t;
            unsigned long i = 0;
            while (t2 != 1) {
                t2 = t2 * t2 % p;
                ++i;
            }
            Int b2 = c;
            for (unsigned long j = 0; j + i + 1 < m; ++j) b2 = b2 * b2 % p;
            r = r * b2 % p;
            c = b2 * b2 % p;
            t = t * c % p;
            m = i;
        }
    }
    Int other = p - r;
    return r < other ? r : other;
}

namespace detail {

inline Int pow_int(const Int& b, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

/// Canonical 2-adic square root of an odd d = 1 (mod 8), to precision 2^k.
/// The canonical branch is the 2-adic root congruent to 1 mod 4; the chain
/// is consistent across k (reduction of the mod-2^{k+1} value).
inline Int sqrt_2adic(const Int& d, unsigned long k) {
    if (k <= 2) return 1;
    // build a root modulo 2^{k+1}, then normalize sign and reduce
    Int beta = 1;
    for (unsigned long i = 3; i <= k; ++i) {
        Int mod = pow_int(2, i + 1);
        if ((beta * beta - d) % mod != 0) beta += pow_int(2, i - 1);
    }
    if (beta % 4 != 1) beta = pow_int(2, k + 1) - beta;
    return beta % pow_int(2, k);
}

/// Hensel lift of the canonical odd-p root to precision p^k.
inline Int lift_odd(const Int& d, const Int& p, unsigned long k) {
    Int r = sqrt_mod_prime(d, p);
    Int mod = p;
    unsigned long prec = 1;
    while (prec < k) {
        unsigned long next = std::min(2 * prec, k);
        Int nmod = pow_int(p, next);
        Int f = (r * r - d) % nmod;
        Int inv;
        Int two_r = 2 * r % nmod;
        if (mpz_invert(inv.get_mpz_t(), two_r.get_mpz_t(), nmod.get_mpz_t()) == 0)
            throw Error("lift_odd: derivative not invertible");
        r = (r - f * inv) % nmod;
        if (r < 0) r += nmod;
        prec = next;
        mod = nmod;
    }
    return r % mod;
}

}  // namespace detail

/// Canonical alpha with alpha^2 = d (mod p^k), 0 <= alpha < p^k.  The root
/// chain is consistent across precisions: the result mod p^k equals the
/// reduction of the result for k+1.
inline Int sqrt_mod_prime_power(const Int& d, const Int& p, unsigned long k) {
    if (k == 0) return 0;
    if (d == 0) return 0;
    long e0 = vp_int(d, p);
    if (e0 & 1) throw NoRootError("sqrt_mod_prime_power: odd valuation");
    unsigned long j = static_cast<unsigned long>(e0 / 2);
    Int dprime = d / detail::pow_int(p, 2 * j);
    unsigned long kprime = k > j ? k - j : 1;
    Int beta;
    if (p == 2) {
        Int dm8 = dprime % 8;
        if (dm8 < 0) dm8 += 8;
        if (dm8 != 1)
            throw NoRootError("sqrt_mod_prime_power: no 2-adic root");
        beta = detail::sqrt_2adic(dprime, kprime);
    } else {
        beta = detail::lift_odd(dprime, p, kprime);
    }
    return detail::pow_int(p, j) * beta % detail::pow_int(p, k);
}

}  // namespace c13

#endif  // C13_EXACTNUM_HPP
