/**
 * @file localred.hpp
 * @brief Tate's algorithm at a prime v of a quadratic field K: Kodaira type,
 *        minimal-discriminant valuation, split/nonsplit classification and
 *        Tamagawa number c_v, plus aggregation into the global product c_E.
 *
 * The algorithm runs in full generality for every residue characteristic
 * (2 and 3 included) using residue-field root counting; the split test for
 * type I_n uses the tangent quadratic T^2 + a1*T - a2 at the node, valid in
 * every characteristic.  Non-minimal models are handled by the final rescale
 * step and a restart.
 */
#ifndef C13_LOCALRED_HPP
#define C13_LOCALRED_HPP

#include <functional>
#include <sstream>

#include "c13/family.hpp"

namespace c13 {

enum class KodairaType { I0, In, II, III, IV, I0star, Instar, IVstar, IIIstar, IIstar };
enum class Reduction { Good, SplitMult, NonsplitMult, Additive };

inline std::string kodaira_name(KodairaType t, long n) {
    switch (t) {
        case KodairaType::I0: return "I0";
        case KodairaType::In: return "I" + std::to_string(n);
        case KodairaType::II: return "II";
        case KodairaType::III: return "III";
        case KodairaType::IV: return "IV";
        case KodairaType::I0star: return "I0*";
        case KodairaType::Instar: return "I" + std::to_string(n) + "*";
        case KodairaType::IVstar: return "IV*";
        case KodairaType::IIIstar: return "III*";
        case KodairaType::IIstar: return "II*";
    }
    return "?";
}

inline const char* reduction_name(Reduction r) {
    switch (r) {
        case Reduction::Good: return "good";
        case Reduction::SplitMult: return "split multiplicative";
        case Reduction::NonsplitMult: return "nonsplit multiplicative";
        case Reduction::Additive: return "additive";
    }
    return "?";
}

struct LocalData {
    KPrime prime;
    KodairaType kodaira = KodairaType::I0;
    long n = 0;  // index for I_n / I_n*
    long v_delta_min = 0;
    long c = 1;
    Reduction reduction = Reduction::Good;
    WeierstrassModel minimal_model;
};

/// Scale by u = p^-k so that every coefficient is integral at v; j unchanged.
inline WeierstrassModel integralize(const WeierstrassModel& M, const KPrime& v) {
    long e = v.ram_index();
    long need = 0;
    auto consider = [&](const QuadNum& a, long i) {
        if (a.is_zero()) return;
        long w = val(a, v);
        if (w < 0) need = std::max(need, (-w + i * e - 1) / (i * e));
    };
    consider(M.a1, 1);
    consider(M.a2, 2);
    consider(M.a3, 3);
    consider(M.a4, 4);
    consider(M.a6, 6);
    if (need == 0) return M;
    Rat pk(1, detail::pow_int(v.p(), static_cast<unsigned long>(need)));
    QuadNum u(pk, M.field());
    QuadNum zero(Rat(0), M.field());
    return transform(M, u, zero, zero, zero);
}

namespace detail {

struct TateCtx {
    const KPrime& v;
    ResidueField k;
    QuadNum pi;
    std::vector<QuadNum> pipow;  // pi^j cache

    explicit TateCtx(const KPrime& v_)
        : v(v_), k(v_.residue_field()), pi(uniformizer(v_)) {
        pipow.push_back(QuadNum(Rat(1), v.field()));
        pipow.push_back(pi);
    }
    const QuadNum& pip(long j) {
        while (static_cast<long>(pipow.size()) <= j)
            pipow.push_back(pipow.back() * pi);
        return pipow[static_cast<size_t>(j)];
    }
    /// residue of z / pi^j; throws if not integral (exponent bookkeeping bug)
    ResidueElem rq(const QuadNum& z, long j) {
        return residue(j == 0 ? z : z / pip(j), v);
    }
    QuadNum up(const ResidueElem& r) const { return lift(r, v); }
};

}  // namespace detail

/// Tate's algorithm.  The model must have nonzero discriminant; it is
/// integralized at v first.
inline LocalData tate(const WeierstrassModel& M0, const KPrime& v) {
    WeierstrassModel M = integralize(M0, v);
    const QuadraticField& K = M.field();
    detail::TateCtx ctx(v);
    ResidueField& k = ctx.k;
    const bool char2 = (k.p == 2);
    QuadNum zero(Rat(0), K), one(Rat(1), K);
    const long val_two = char2 ? val(QuadNum(Rat(2), K), v) : 0;

    auto result = [&](KodairaType t, long n, long vdelta, long c,
                      Reduction red) {
        return LocalData{v, t, n, vdelta, c, red, M};
    };

    long initial_vdelta = val(invariants(M).delta, v);
    if (initial_vdelta == kValInf) throw SingularModel();
    long max_restarts = initial_vdelta / 12 + 2;

    for (long restart = 0; restart <= max_restarts; ++restart) {
        Invariants I = invariants(M);
        long n = val(I.delta, v);
        if (n == 0) return result(KodairaType::I0, 0, 0, 1, Reduction::Good);

        // ---- move the singular point of the reduction to (0, 0)
        ResidueElem r1 = ctx.rq(M.a1, 0), r2 = ctx.rq(M.a2, 0),
                    r3 = ctx.rq(M.a3, 0), r4 = ctx.rq(M.a4, 0),
                    r6 = ctx.rq(M.a6, 0);
        ResidueElem x0, y0;
        if (char2) {
            if (!k.is_zero(r1)) {
                x0 = k.div(r3, r1);
                y0 = k.div(k.add(k.mul(x0, x0), r4), r1);
            } else {
                // a1 = a3 = 0 in k: y^2 = cubic, cusp along x^2 = a4
                x0 = k.sqrt(r4);
                ResidueElem rhs = k.add(
                    k.add(k.mul(k.mul(x0, x0), x0), k.mul(r2, k.mul(x0, x0))),
                    k.add(k.mul(r4, x0), r6));
                y0 = k.sqrt(rhs);
            }
        } else {
            ResidueElem inv2 = k.inv(k.make(2));
            ResidueElem inv4 = k.mul(inv2, inv2);
            ResidueElem b2r = k.add(k.mul(r1, r1), k.mul_int(r2, 4));
            ResidueElem b4r = k.add(k.mul_int(r4, 2), k.mul(r1, r3));
            ResidueElem b6r = k.add(k.mul(r3, r3), k.mul_int(r6, 4));
            CubicInfo ci = analyze_cubic(k, k.mul(b2r, inv4), k.mul(b4r, inv2),
                                         k.mul(b6r, inv4));
            if (ci.kind == CubicInfo::Separable)
                throw Error("tate: singular reduction without multiple root");
            x0 = ci.kind == CubicInfo::Double ? ci.double_root : ci.triple_root;
            y0 = k.neg(k.mul(k.add(k.mul(r1, x0), r3), inv2));
        }
        M = transform(M, one, ctx.up(x0), zero, ctx.up(y0));
        I = invariants(M);

        // ---- multiplicative: node with tangent quadratic T^2 + a1 T - a2
        if (val(I.b2, v) == 0) {
            QuadraticInfo q = analyze_quadratic(k, k.one(), ctx.rq(M.a1, 0),
                                                k.neg(ctx.rq(M.a2, 0)));
            bool split = q.rational_roots > 0;
            long c = split ? n : (n % 2 == 0 ? 2 : 1);
            return result(KodairaType::In, n, n, c,
                          split ? Reduction::SplitMult
                                : Reduction::NonsplitMult);
        }

        if (val(M.a6, v) < 2)
            return result(KodairaType::II, 0, n, 1, Reduction::Additive);
        if (val(I.b8, v) < 3)
            return result(KodairaType::III, 0, n, 2, Reduction::Additive);
        if (val(I.b6, v) < 3) {
            QuadraticInfo q = analyze_quadratic(k, k.one(), ctx.rq(M.a3, 1),
                                                k.neg(ctx.rq(M.a6, 2)));
            return result(KodairaType::IV, 0, n, 1 + q.rational_roots,
                          Reduction::Additive);
        }

        // ---- normalize to val(a1), val(a2) >= 1, val(a3), val(a4) >= 2,
        //      val(a6) >= 3
        QuadNum s6 = char2 ? ctx.up(k.sqrt(ctx.rq(M.a2, 0)))
                           : M.a1 * Rat(-1, 2);
        M = transform(M, one, zero, s6, zero);
        QuadNum t6 = zero;
        if (!char2) {
            t6 = M.a3 * Rat(-1, 2);
        } else if (val_two == 1) {
            I = invariants(M);
            t6 = M.a3 * Rat(-1, 2);
            if (val(I.b6, v) == 4) {
                ResidueElem tau =
                    k.sqrt(ctx.rq(I.b6 * Rat(1, 16), 0));
                t6 = t6 + QuadNum(Rat(2), K) * ctx.up(tau);
            }
        } else {  // ramified above 2
            ResidueElem tau = k.sqrt(ctx.rq(M.a6, 2));
            t6 = ctx.pip(1) * ctx.up(tau);
        }
        M = transform(M, one, zero, zero, t6);

        CubicInfo P = analyze_cubic(k, ctx.rq(M.a2, 1), ctx.rq(M.a4, 2),
                                    ctx.rq(M.a6, 3));
        if (P.kind == CubicInfo::Separable)
            return result(KodairaType::I0star, 0, n, 1 + P.rational_roots,
                          Reduction::Additive);

        if (P.kind == CubicInfo::Double) {
            // I_m* for some m >= 1; walk the two alternating quadratics
            M = transform(M, one, ctx.pip(1) * ctx.up(P.double_root), zero,
                          zero);
            long idx = 1, ix = 2, iy = 2;
            while (true) {
                QuadraticInfo qy =
                    analyze_quadratic(k, k.one(), ctx.rq(M.a3, iy),
                                      k.neg(ctx.rq(M.a6, ix + iy)));
                if (qy.separable)
                    return result(KodairaType::Instar, idx, n,
                                  2 + qy.rational_roots, Reduction::Additive);
                M = transform(M, one, zero, zero,
                              ctx.pip(iy) * ctx.up(qy.double_root));
                ++idx;
                ++iy;
                QuadraticInfo qx =
                    analyze_quadratic(k, ctx.rq(M.a2, 1), ctx.rq(M.a4, 1 + ix),
                                      ctx.rq(M.a6, ix + iy));
                if (qx.separable)
                    return result(KodairaType::Instar, idx, n,
                                  2 + qx.rational_roots, Reduction::Additive);
                M = transform(M, one, ctx.pip(ix) * ctx.up(qx.double_root),
                              zero, zero);
                ++idx;
                ++ix;
            }
        }

        // ---- triple root
        M = transform(M, one, ctx.pip(1) * ctx.up(P.triple_root), zero, zero);
        QuadraticInfo q8 = analyze_quadratic(k, k.one(), ctx.rq(M.a3, 2),
                                             k.neg(ctx.rq(M.a6, 4)));
        if (q8.separable)
            return result(KodairaType::IVstar, 0, n, 1 + q8.rational_roots,
                          Reduction::Additive);
        M = transform(M, one, zero, zero,
                      ctx.pip(2) * ctx.up(q8.double_root));
        if (val(M.a4, v) < 4)
            return result(KodairaType::IIIstar, 0, n, 2, Reduction::Additive);
        if (val(M.a6, v) < 6)
            return result(KodairaType::IIstar, 0, n, 1, Reduction::Additive);

        // non-minimal: rescale by the uniformizer and rerun
        M = transform(M, ctx.pip(1), zero, zero, zero);
    }
    throw Error("tate: restart bound exceeded");
}

/// Per-local consistency required by the classification; returns a
/// description of the first violation, or empty.
inline std::string verify_local(const LocalData& ld) {
    switch (ld.reduction) {
        case Reduction::Good:
            if (ld.kodaira != KodairaType::I0 || ld.v_delta_min != 0 ||
                ld.c != 1)
                return "good reduction must be I0 with c = 1";
            break;
        case Reduction::SplitMult:
            if (ld.c != ld.v_delta_min)
                return "split I_n must have c = v(delta_min)";
            break;
        case Reduction::NonsplitMult:
            if (ld.c != (ld.v_delta_min % 2 == 0 ? 2 : 1))
                return "nonsplit I_n c rule violated";
            break;
        case Reduction::Additive:
            if (ld.c > 4) return "additive c must be <= 4";
            break;
    }
    Invariants I = invariants(ld.minimal_model);
    long vc4 = val(I.c4, ld.prime);
    long vd = val(I.delta, ld.prime);
    if (vd != ld.v_delta_min) return "v(delta) of minimal model mismatch";
    bool mult = ld.reduction == Reduction::SplitMult ||
                ld.reduction == Reduction::NonsplitMult;
    if (mult != (vc4 == 0 && vd > 0))
        return "multiplicative <=> v(c4) = 0 and v(delta) > 0 violated";
    if (ld.reduction == Reduction::Additive && !(vc4 > 0 && vd > 0))
        return "additive => v(c4) > 0 and v(delta) > 0 violated";
    if (mult) {
        QuadNum j = (I.c4 * I.c4 * I.c4) / I.delta;
        if (val(j, ld.prime) != -ld.v_delta_min)
            return "v(j) = -v(delta_min) violated at multiplicative prime";
    }
    return {};
}

// ---------------------------------------------------------------------------
// global aggregation

struct GlobalTamagawa {
    std::vector<LocalData> locals;  // sorted by (p, branch)
    Int c_E = 1;
    long v13 = 0;
};

inline GlobalTamagawa tamagawa(const FamilyCurve& fc,
                               const FactorBudget& budget = {}) {
    GlobalTamagawa g;
    for (const Int& p : bad_support(fc.t, budget)) {
        for (const KPrime& v : primes_above(fc.field, p)) {
            LocalData ld = tate(fc.model, v);
            std::string bad = verify_local(ld);
            if (!bad.empty())
                throw Error("local data inconsistent at p=" + p.get_str() +
                            ": " + bad);
            g.c_E *= ld.c;
            g.locals.push_back(std::move(ld));
        }
    }
    g.v13 = vp_int(g.c_E, 13);
    return g;
}

// ---------------------------------------------------------------------------
// paper-law checks

/// Reduction law at 13: multiplicative reduction at a prime over 13 happens
/// exactly for t = 0, 1 (mod 13) or v13(t) < 0, and then 13 splits in K.
struct ThirteenRuleReport {
    Rat t;
    bool predicate = false;      // t = 0,1 (mod 13) or v13(t) < 0
    bool multiplicative = false; // observed at some prime over 13
    bool splits = false;         // 13 splits in K
    bool agree = false;
    std::vector<std::string> kinds;  // observed reduction at each v | 13
};

inline ThirteenRuleReport check_13_rule(const Rat& t) {
    ThirteenRuleReport rep;
    rep.t = t;
    Int thirteen = 13;
    long v13t = vp(t, thirteen);
    if (v13t < 0) {
        rep.predicate = true;
    } else {
        Int tm = detail::rat_mod(t, thirteen);
        rep.predicate = (tm == 0 || tm == 1);
    }
    FamilyCurve fc = build(t);
    auto above = primes_above(fc.field, thirteen);
    rep.splits = above.size() == 2;
    for (const KPrime& v : above) {
        LocalData ld = tate(fc.model, v);
        rep.kinds.push_back(std::string(reduction_name(ld.reduction)));
        if (ld.reduction == Reduction::SplitMult ||
            ld.reduction == Reduction::NonsplitMult)
            rep.multiplicative = true;
    }
    rep.agree = (rep.predicate == rep.multiplicative) &&
                (!rep.multiplicative || rep.splits);
    return rep;
}

/// Galois symmetry of Tamagawa numbers: every local with 13 | c sits at a
/// split prime and matches its conjugate branch exactly; other split pairs
/// are reported without being asserted.
struct ConjSymmetryReport {
    bool ok = true;
    std::vector<std::string> violations;
    // (p, c at branch 0, c at branch 1) for every split pair seen
    std::vector<std::tuple<Int, long, long>> pairs;
};

inline ConjSymmetryReport conj_symmetry(const GlobalTamagawa& g) {
    ConjSymmetryReport rep;
    for (const LocalData& ld : g.locals) {
        if (ld.prime.kind() != SplitKind::Split || ld.prime.branch() != 0)
            continue;
        const LocalData* other = nullptr;
        for (const LocalData& o : g.locals)
            if (o.prime.p() == ld.prime.p() && o.prime.branch() == 1) {
                other = &o;
                break;
            }
        if (!other) continue;
        rep.pairs.emplace_back(ld.prime.p(), ld.c, other->c);
    }
    for (const LocalData& ld : g.locals) {
        if (ld.c % 13 != 0) continue;
        if (ld.prime.kind() != SplitKind::Split) {
            rep.ok = false;
            rep.violations.push_back("13 | c at a non-split prime p=" +
                                     ld.prime.p().get_str());
            continue;
        }
        for (const LocalData& o : g.locals)
            if (o.prime.p() == ld.prime.p() &&
                o.prime.branch() != ld.prime.branch() && o.c != ld.c) {
                rep.ok = false;
                rep.violations.push_back(
                    "conjugate Tamagawa mismatch at p=" + ld.prime.p().get_str() +
                    ": " + std::to_string(ld.c) + " vs " + std::to_string(o.c));
            }
    }
    return rep;
}

}  // namespace c13

#endif  // C13_LOCALRED_HPP
