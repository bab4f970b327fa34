/**
 * @file quadfield.hpp
 * @brief Arithmetic in quadratic fields K = Q(sqrt(d)): elements x + y*sqrt(d),
 *        conjugation/norm/trace, splitting of rational primes, normalized
 *        valuations at primes of K, and residue maps into F_p / F_p^2.
 *
 * Split-prime valuations embed sqrt(d) through the canonical Hensel root of
 * d mod p^k with escalating precision; the canonical branch (branch 0) is the
 * one sending sqrt(d) to the canonical root, branch 1 to its negative.
 */
#ifndef C13_QUADFIELD_HPP
#define C13_QUADFIELD_HPP

#include <memory>
#include <mutex>
#include <vector>

#include "c13/exactnum.hpp"
#include "c13/residue.hpp"

namespace c13 {

struct FieldMismatch : Error {
    FieldMismatch() : Error("elements of different quadratic fields") {}
};
struct NegativeValuation : Error {
    NegativeValuation() : Error("residue of an element with negative valuation") {}
};

/// K = Q(sqrt(d)); d must be squarefree and != 0, 1 (caller's contract).
struct QuadraticField {
    Int d = 0;
    Int disc = 0;

    QuadraticField() = default;
    explicit QuadraticField(Int d_) : d(std::move(d_)) {
        if (d == 0 || d == 1) throw Error("QuadraticField: d must not be 0 or 1");
        Int dm4 = d % 4;
        if (dm4 < 0) dm4 += 4;
        disc = (dm4 == 1) ? d : 4 * d;
    }
    bool operator==(const QuadraticField& o) const { return d == o.d; }
    bool operator!=(const QuadraticField& o) const { return d != o.d; }
};

/// Element x + y*sqrt(d) of K.
class QuadNum {
public:
    QuadNum() = default;
    QuadNum(Rat x, Rat y, QuadraticField field)
        : x_(std::move(x)), y_(std::move(y)), F_(std::move(field)) {}
    /// Rational embedded in K.
    QuadNum(Rat x, QuadraticField field)
        : x_(std::move(x)), y_(0), F_(std::move(field)) {}

    static QuadNum sqrt_d(const QuadraticField& field) {
        return QuadNum(Rat(0), Rat(1), field);
    }

    const Rat& x() const { return x_; }
    const Rat& y() const { return y_; }
    const QuadraticField& field() const { return F_; }

    bool is_zero() const { return x_ == 0 && y_ == 0; }
    bool is_rational() const { return y_ == 0; }

    QuadNum conj() const { return QuadNum(x_, -y_, F_); }
    Rat norm() const { return x_ * x_ - F_.d * y_ * y_; }
    Rat trace() const { return 2 * x_; }

    friend QuadNum operator+(const QuadNum& a, const QuadNum& b) {
        a.check(b);
        return QuadNum(a.x_ + b.x_, a.y_ + b.y_, a.F_);
    }
    friend QuadNum operator-(const QuadNum& a, const QuadNum& b) {
        a.check(b);
        return QuadNum(a.x_ - b.x_, a.y_ - b.y_, a.F_);
    }
    QuadNum operator-() const { return QuadNum(-x_, -y_, F_); }
    friend QuadNum operator*(const QuadNum& a, const QuadNum& b) {
        a.check(b);
        return QuadNum(a.x_ * b.x_ + a.F_.d * a.y_ * b.y_,
                       a.x_ * b.y_ + a.y_ * b.x_, a.F_);
    }
    friend QuadNum operator/(const QuadNum& a, const QuadNum& b) {
        a.check(b);
        if (b.is_zero()) throw Error("QuadNum division by zero");
        Rat n = b.norm();
        QuadNum num = a * b.conj();
        return QuadNum(num.x_ / n, num.y_ / n, a.F_);
    }
    friend QuadNum operator*(const QuadNum& a, const Rat& c) {
        return QuadNum(a.x_ * c, a.y_ * c, a.F_);
    }
    friend QuadNum operator*(const Rat& c, const QuadNum& a) { return a * c; }
    friend QuadNum operator/(const QuadNum& a, const Rat& c) {
        return QuadNum(a.x_ / c, a.y_ / c, a.F_);
    }
    bool operator==(const QuadNum& o) const {
        return F_ == o.F_ && x_ == o.x_ && y_ == o.y_;
    }

    std::string str() const {
        if (y_ == 0) return x_.get_str();
        std::string s = x_ == 0 ? "" : x_.get_str();
        std::string ys = y_.get_str();
        if (!s.empty() && ys[0] != '-') s += "+";
        return s + ys + "*sqrt(" + F_.d.get_str() + ")";
    }

private:
    void check(const QuadNum& o) const {
        if (F_ != o.F_) throw FieldMismatch();
    }

    Rat x_{0}, y_{0};
    QuadraticField F_;
};

enum class SplitKind { Split, Inert, Ramified };

inline const char* split_kind_name(SplitKind k) {
    switch (k) {
        case SplitKind::Split: return "split";
        case SplitKind::Inert: return "inert";
        case SplitKind::Ramified: return "ramified";
    }
    return "?";
}

namespace detail {

/// Growing cache of the canonical Hensel root of d mod p^k for one split p.
struct HenselCache {
    std::mutex mu;
    unsigned long k = 0;
    Int root = 0;
};

}  // namespace detail

/// A prime v of K above the rational prime p.
class KPrime {
public:
    KPrime(QuadraticField field, Int p, SplitKind kind, int branch)
        : F_(std::move(field)), p_(std::move(p)), kind_(kind), branch_(branch) {
        if (kind == SplitKind::Split)
            cache_ = std::make_shared<detail::HenselCache>();
    }

    const QuadraticField& field() const { return F_; }
    const Int& p() const { return p_; }
    SplitKind kind() const { return kind_; }
    int branch() const { return branch_; }
    int ram_index() const { return kind_ == SplitKind::Ramified ? 2 : 1; }
    int res_degree() const { return kind_ == SplitKind::Inert ? 2 : 1; }

    /// Embedding image of sqrt(d) modulo p^k for this branch.
    Int embedding_root(unsigned long k) const {
        Int alpha;
        {
            std::scoped_lock lock(cache_->mu);
            if (cache_->k < k) {
                cache_->k = std::max(k, 2 * cache_->k);
                cache_->root = sqrt_mod_prime_power(F_.d, p_, cache_->k);
            }
            alpha = cache_->root % detail::pow_int(p_, k);
        }
        if (branch_ == 1) {
            alpha = (detail::pow_int(p_, k) - alpha) % detail::pow_int(p_, k);
        }
        return alpha;
    }

    KPrime conjugate() const {
        if (kind_ != SplitKind::Split) return *this;
        KPrime o = *this;
        o.branch_ = 1 - branch_;
        return o;  // shares the cache; only the branch flips
    }

    ResidueField residue_field() const {
        if (kind_ != SplitKind::Inert) return ResidueField(p_, 1);
        if (p_ == 2) return ResidueField(p_, 2, 1, 1);  // w^2 + w + 1 = 0
        Int dbar = F_.d % p_;
        if (dbar < 0) dbar += p_;
        return ResidueField(p_, 2, 0, dbar);  // w = sqrt(d)
    }

    bool operator==(const KPrime& o) const {
        return F_ == o.F_ && p_ == o.p_ && kind_ == o.kind_ &&
               branch_ == o.branch_;
    }

private:
    QuadraticField F_;
    Int p_;
    SplitKind kind_;
    int branch_ = 0;
    std::shared_ptr<detail::HenselCache> cache_;
};

/// Decomposition of a rational prime in K.  Split primes come back as the
/// canonical branch first.
inline std::vector<KPrime> primes_above(const QuadraticField& K, const Int& p) {
    if (!is_prime(p)) throw Error("primes_above: composite p");
    if (mpz_divisible_p(K.disc.get_mpz_t(), p.get_mpz_t()))
        return {KPrime(K, p, SplitKind::Ramified, 0)};
    if (p == 2) {
        Int dm8 = K.d % 8;
        if (dm8 < 0) dm8 += 8;
        if (dm8 == 1)
            return {KPrime(K, p, SplitKind::Split, 0),
                    KPrime(K, p, SplitKind::Split, 1)};
        return {KPrime(K, p, SplitKind::Inert, 0)};
    }
    int sym = kronecker(K.d, p);
    if (sym == 1)
        return {KPrime(K, p, SplitKind::Split, 0),
                KPrime(K, p, SplitKind::Split, 1)};
    return {KPrime(K, p, SplitKind::Inert, 0)};
}

inline QuadNum uniformizer(const KPrime& v) {
    const QuadraticField& K = v.field();
    if (v.kind() != SplitKind::Ramified) return QuadNum(Rat(v.p()), K);
    Int dm4 = K.d % 4;
    if (dm4 < 0) dm4 += 4;
    if (v.p() == 2 && dm4 == 3)
        return QuadNum(Rat(1), Rat(1), K);  // 1 + sqrt(d)
    return QuadNum::sqrt_d(K);              // p | d
}

inline KPrime conjugate_prime(const KPrime& v) { return v.conjugate(); }

namespace detail {

/// q mod m for a rational with denominator coprime to m.
inline Int rat_mod(const Rat& q, const Int& m) {
    Int den = q.get_den() % m;
    Int inv;
    if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), m.get_mpz_t()) == 0)
        throw Error("rat_mod: denominator not invertible");
    Int r = q.get_num() % m * inv % m;
    if (r < 0) r += m;
    return r;
}

}  // namespace detail

/// Normalized valuation at v: val(uniformizer) = 1, val(p) = ram_index.
inline long val(const QuadNum& z, const KPrime& v) {
    if (z.is_zero()) return kValInf;
    const Int& p = v.p();
    switch (v.kind()) {
        case SplitKind::Inert: {
            long n = vp(z.norm(), p);
            return n / 2;  // always even for inert primes
        }
        case SplitKind::Ramified:
            return vp(z.norm(), p);
        case SplitKind::Split: {
            if (z.y() == 0) return vp(z.x(), p);
            if (z.x() == 0) return vp(z.y(), p);
            long e0 = std::min(vp(z.x(), p), vp(z.y(), p));
            Rat xs = z.x(), ys = z.y();
            if (e0 != 0) {
                Rat scale = e0 > 0
                                ? Rat(1, detail::pow_int(p, (unsigned long)e0))
                                : Rat(detail::pow_int(p, (unsigned long)(-e0)), 1);
                xs *= scale;
                ys *= scale;
            }
            for (unsigned long k = 8;; k *= 2) {
                Int pk = detail::pow_int(p, k);
                Int alpha = v.embedding_root(k);
                Int w = (detail::rat_mod(xs, pk) + detail::rat_mod(ys, pk) * alpha) % pk;
                if (w != 0) {
                    long vw = vp_int(w, p);
                    if (vw < static_cast<long>(k)) return e0 + vw;
                }
                if (k > 4096)
                    throw Error("val: split-prime precision escalation failed");
            }
        }
    }
    throw Error("val: unreachable");
}

/// Image of z in the residue field k_v (requires val(z, v) >= 0).
inline ResidueElem residue(const QuadNum& z, const KPrime& v) {
    const Int& p = v.p();
    ResidueField f = v.residue_field();
    if (z.is_zero()) return f.zero();
    switch (v.kind()) {
        case SplitKind::Inert: {
            if (val(z, v) < 0) throw NegativeValuation();
            if (p == 2) {
                // basis {1, w}, w = (1 + sqrt(d))/2:  z = (x - y) + 2y * w
                return f.make(detail::rat_mod(z.x() - z.y(), p),
                              detail::rat_mod(2 * z.y(), p));
            }
            return f.make(detail::rat_mod(z.x(), p),
                          detail::rat_mod(z.y(), p));
        }
        case SplitKind::Ramified: {
            if (val(z, v) < 0) throw NegativeValuation();
            Int dm4 = v.field().d % 4;
            if (dm4 < 0) dm4 += 4;
            if (p == 2 && dm4 == 3)  // sqrt(d) = -1 = 1 mod (1 + sqrt(d))
                return f.make(detail::rat_mod(z.x() + z.y(), p));
            return f.make(detail::rat_mod(z.x(), p));  // sqrt(d) = 0
        }
        case SplitKind::Split: {
            long e0 = 0;
            if (z.x() != 0) e0 = std::min(e0, vp(z.x(), p));
            if (z.y() != 0) e0 = std::min(e0, vp(z.y(), p));
            Rat xs = z.x(), ys = z.y();
            if (e0 < 0) {
                Rat scale(detail::pow_int(p, (unsigned long)(-e0)), 1);
                xs *= scale;
                ys *= scale;
            }
            unsigned long k = static_cast<unsigned long>(-e0) + 2;
            Int pk = detail::pow_int(p, k);
            Int alpha = v.embedding_root(k);
            Int w = (detail::rat_mod(xs, pk) + detail::rat_mod(ys, pk) * alpha) % pk;
            Int shift = detail::pow_int(p, (unsigned long)(-e0));
            if (!mpz_divisible_p(w.get_mpz_t(), shift.get_mpz_t()))
                throw NegativeValuation();
            return f.make(w / shift % p);
        }
    }
    throw Error("residue: unreachable");
}

/// A lift of a residue element back into K with val >= 0.
inline QuadNum lift(const ResidueElem& r, const KPrime& v) {
    const QuadraticField& K = v.field();
    if (v.kind() != SplitKind::Inert) return QuadNum(Rat(r.u), K);
    if (v.p() == 2)  // u + v*(1 + sqrt(d))/2
        return QuadNum(Rat(r.u) + Rat(r.v, 2), Rat(r.v, 2), K);
    return QuadNum(Rat(r.u), Rat(r.v), K);
}

}  // namespace c13

#endif  // C13_QUADFIELD_HPP
