/**
 * @file survey.hpp
 * @brief Sweep engine and verification reports: enumerate parameters by
 *        height, compute per-curve Tamagawa records, persist them as JSONL,
 *        and check the parity / uniqueness / reduction laws over the output.
 *
 * Record schema (schema_version 1): one JSON object per line with keys
 * t, d, disc, j, c_E, v13, locals, flags, timing.  Integers above 2^53 are
 * serialized as decimal strings (c_E always is).
 */
#ifndef C13_SURVEY_HPP
#define C13_SURVEY_HPP

#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "json.hpp"

#include "c13/localred.hpp"

namespace c13 {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// parameter enumeration

/// Height of r/q in lowest terms: max(|r|, q).
inline Int height(const Rat& t) {
    Int r = abs(Int(t.get_num()));
    Int q = t.get_den();
    return r > q ? r : q;
}

/// All t with height <= H, t not in {0, 1}, ordered by (height, numerator,
/// denominator).
inline std::vector<Rat> enumerate_t(long H) {
    if (H < 1) throw Error("enumerate_t: H must be >= 1");
    std::vector<Rat> out;
    for (long h = 1; h <= H; ++h) {
        std::vector<Rat> level;
        for (long r = -h; r <= h; ++r) {
            if (r == 0) continue;
            for (long q = 1; q <= h; ++q) {
                if (std::max(std::abs(r), q) != h) continue;
                if (std::gcd(std::abs(r), q) != 1) continue;
                Rat t(r, q);
                t.canonicalize();
                if (t == 0 || t == 1) continue;
                level.push_back(t);
            }
        }
        // already generated in (r, q) lexicographic order
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// survey records

struct LocalRow {
    Int p;
    int branch = 0;
    std::string kind;     // split | inert | ramified
    std::string kodaira;  // I0, I13, IV*, ...
    long v_delta = 0;
    bool split = false;   // split multiplicative
    long c = 1;
};

struct SurveyRecord {
    std::string t;
    Int d = 0, disc = 0;
    std::string j;
    std::string c_E = "1";
    long v13 = 0;
    std::vector<LocalRow> locals;
    std::string flags = "ok";
    std::optional<double> timing;  // seconds; absent (null) by default
};

namespace detail {

inline ordered_json int_json(const Int& n) {
    static const Int lim = Int(1) << 53;
    if (abs(n) <= lim) return ordered_json(n.get_si());
    return ordered_json(n.get_str());
}

inline Int int_from_json(const ordered_json& j) {
    if (j.is_string()) return Int(j.get<std::string>());
    return Int(j.get<long long>());
}

}  // namespace detail

inline ordered_json to_json(const SurveyRecord& r) {
    ordered_json j;
    j["schema_version"] = 1;
    j["t"] = r.t;
    j["d"] = detail::int_json(r.d);
    j["disc"] = detail::int_json(r.disc);
    j["j"] = r.j;
    j["c_E"] = r.c_E;
    j["v13"] = r.v13;
    ordered_json locs = ordered_json::array();
    for (const LocalRow& l : r.locals) {
        ordered_json o;
        o["p"] = detail::int_json(l.p);
        o["branch"] = l.branch;
        o["kind"] = l.kind;
        o["kodaira"] = l.kodaira;
        o["v_delta"] = l.v_delta;
        o["split"] = l.split;
        o["c"] = l.c;
        locs.push_back(std::move(o));
    }
    j["locals"] = std::move(locs);
    j["flags"] = r.flags;
    if (r.timing)
        j["timing"] = *r.timing;
    else
        j["timing"] = nullptr;
    return j;
}

inline SurveyRecord record_from_json(const ordered_json& j) {
    SurveyRecord r;
    r.t = j.at("t").get<std::string>();
    r.d = detail::int_from_json(j.at("d"));
    r.disc = detail::int_from_json(j.at("disc"));
    r.j = j.at("j").get<std::string>();
    r.c_E = j.at("c_E").get<std::string>();
    r.v13 = j.at("v13").get<long>();
    for (const auto& o : j.at("locals")) {
        LocalRow l;
        l.p = detail::int_from_json(o.at("p"));
        l.branch = o.at("branch").get<int>();
        l.kind = o.at("kind").get<std::string>();
        l.kodaira = o.at("kodaira").get<std::string>();
        l.v_delta = o.at("v_delta").get<long>();
        l.split = o.at("split").get<bool>();
        l.c = o.at("c").get<long>();
        r.locals.push_back(std::move(l));
    }
    r.flags = j.at("flags").get<std::string>();
    if (j.contains("timing") && !j.at("timing").is_null())
        r.timing = j.at("timing").get<double>();
    return r;
}

// ---------------------------------------------------------------------------
// structural checks (asserted for every swept curve)

/// First violated structural invariant, or empty.  These are the computable
/// shadows of the theorems; a sweep must never see a violation.
inline std::string structural_check(const FamilyCurve& fc,
                                    const GlobalTamagawa& g) {
    SexticData sd = sextic(fc.t);
    if (fc.s * fc.s != QuadNum(sd.D, fc.field)) return "s^2 != D(t)";
    if (sd.d == 1 || sd.d == 13) return "d in {1, 13}";
    if (!on_curve(fc.model, fc.marked_point)) return "(0,0) not on model";
    auto ord = point_order(fc.model, fc.marked_point, 20);
    if (!ord || *ord != 13) return "(0,0) does not have order 13";
    auto above2 = primes_above(fc.field, 2);
    if (above2.size() != 2) return "2 does not split in K";

    Invariants I = invariants(fc.model);
    QuadNum four(Rat(4), fc.field);
    if (four * I.b8 != I.b2 * I.b6 - I.b4 * I.b4) return "4b8 != b2b6 - b4^2";
    if (QuadNum(Rat(1728), fc.field) * I.delta !=
        I.c4 * I.c4 * I.c4 - I.c6 * I.c6)
        return "1728*delta != c4^3 - c6^2";
    QuadNum j = j_invariant(fc.model);
    if (!j.is_rational()) return "j not rational";
    if (j.x() != j_formula(fc.t)) return "model j != j-formula";

    if (g.v13 < 2 || g.v13 % 2 != 0) return "v13 not even and >= 2";
    return {};
}

namespace detail {

inline std::set<Int> t_support_primes(const Rat& t) {
    std::set<Int> s;
    for (const Rat& q : {t, t - 1}) {
        for (const Int& n : {Int(q.get_num()), Int(q.get_den())}) {
            if (n == 1 || n == -1) continue;
            for (const auto& [p, e] : factor(n).factors) s.insert(p);
        }
    }
    return s;
}

}  // namespace detail

/// Checks depending on local data: the I_{13m} law away from 13, conjugate
/// symmetry, and the quantitative v13 bound.
inline std::string local_law_check(const FamilyCurve& fc,
                                   const GlobalTamagawa& g) {
    Int thirteen = 13;
    for (const LocalData& ld : g.locals) {
        if (ld.prime.p() == 13) continue;
        QuadNum t_K(fc.t, fc.field);
        QuadNum tm1_K(fc.t - 1, fc.field);
        long vt = val(t_K, ld.prime);
        long vt1 = val(tm1_K, ld.prime);
        long m = 0;
        if (vt != 0)
            m = std::abs(vt);
        else if (vt1 > 0)
            m = vt1;
        if (m == 0) continue;
        if (ld.kodaira != KodairaType::In || ld.n != 13 * m ||
            ld.reduction != Reduction::SplitMult || ld.c != 13 * m)
            return "I_{13m} law violated at p=" + ld.prime.p().get_str() +
                   " (expected split I_" + std::to_string(13 * m) + ", got " +
                   kodaira_name(ld.kodaira, ld.n) + ", c=" +
                   std::to_string(ld.c) + ")";
        if (ld.prime.kind() != SplitKind::Split)
            return "I_{13m} at non-split prime p=" + ld.prime.p().get_str();
    }
    ConjSymmetryReport cs = conj_symmetry(g);
    if (!cs.ok) return cs.violations.front();
    long support_count = static_cast<long>(detail::t_support_primes(fc.t).size());
    if (g.v13 < 2 * support_count)
        return "v13 < 2 * #{p : vp(t) != 0 or vp(t-1) != 0}";
    return {};
}

// ---------------------------------------------------------------------------
// the bad-support oracle (criterion: no bad prime outside bad_support)

struct SupportOracleReport {
    bool ok = true;        // no bad prime of the minimal model outside support
    bool complete = true;  // every prime of norm(delta) accounted for
    std::vector<Int> outside_good;  // primes outside support verified good
    std::string detail;
};

/// Factors norm(delta) of the built model (budgeted) and confirms that every
/// prime outside bad_support(t) has good reduction at all places above it.
/// An unfactored cofactor coprime to norm(c4) is provably good: such a prime
/// would force multiplicative reduction and hence divide the (small, fully
/// factored) denominator of j.
inline SupportOracleReport support_oracle(const FamilyCurve& fc,
                                          const FactorBudget& budget = {}) {
    SupportOracleReport rep;
    Invariants I = invariants(fc.model);
    Rat nd = I.delta.norm();
    Rat nc4 = I.c4.norm();
    std::vector<Int> support = bad_support(fc.t);
    std::set<Int> supp(support.begin(), support.end());

    auto examine = [&](const Int& p) {
        if (supp.count(p)) return;
        for (const KPrime& v : primes_above(fc.field, p)) {
            LocalData ld = tate(fc.model, v);
            if (ld.reduction != Reduction::Good) {
                rep.ok = false;
                rep.detail = "bad reduction outside support at p=" + p.get_str();
                return;
            }
        }
        rep.outside_good.push_back(p);
    };

    for (const Int& n : {Int(nd.get_num()), Int(nd.get_den())}) {
        Factorization f = factor(n, budget);
        for (const auto& [p, e] : f.factors) examine(p);
        if (f.cofactor) {
            Int C = *f.cofactor;
            Int g = gcd(C, Int(nc4.get_num()));
            if (g == 1) {
                // all primes of C have v(c4) = 0 everywhere above them, so a
                // bad one would be multiplicative with p | den(j) -- but
                // den(j) is supported on small, already-examined primes.
                continue;
            }
            // try to make progress through the gcd split
            for (const Int& piece : {g, C / g}) {
                if (piece == 1) continue;
                Factorization pf = factor(piece, budget);
                for (const auto& [p, e] : pf.factors) examine(p);
                if (pf.cofactor) {
                    rep.complete = false;
                    rep.detail = "unfactored cofactor sharing c4 support";
                }
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// record computation

struct RunConfig {
    long max_height = 2;
    int jobs = 1;
    std::string out_path;
    bool resume = false;
    unsigned long factor_budget = FactorBudget{}.rho_iters;
    bool oracle_mode = false;
    bool timings = false;
};

inline SurveyRecord compute_record(const Rat& t, const RunConfig& cfg) {
    SurveyRecord rec;
    rec.t = rat_str(t);
    auto started = std::chrono::steady_clock::now();
    FactorBudget budget{FactorBudget{}.trial_bound, cfg.factor_budget};
    try {
        FamilyCurve fc = build(t);
        GlobalTamagawa g = tamagawa(fc, budget);
        rec.d = fc.field.d;
        rec.disc = fc.field.disc;
        rec.j = rat_str(j_formula(t));
        rec.c_E = g.c_E.get_str();
        rec.v13 = g.v13;
        for (const LocalData& ld : g.locals) {
            bool keep = ld.c > 1 || ld.prime.p() == 2 || ld.prime.p() == 13;
            if (!keep) continue;
            LocalRow row;
            row.p = ld.prime.p();
            row.branch = ld.prime.branch();
            row.kind = split_kind_name(ld.prime.kind());
            row.kodaira = kodaira_name(ld.kodaira, ld.n);
            row.v_delta = ld.v_delta_min;
            row.split = ld.reduction == Reduction::SplitMult;
            row.c = ld.c;
            rec.locals.push_back(std::move(row));
        }
        std::string bad = structural_check(fc, g);
        if (bad.empty()) bad = local_law_check(fc, g);
        if (bad.empty() && cfg.oracle_mode) {
            SupportOracleReport orep = support_oracle(fc, budget);
            if (!orep.ok) bad = "support oracle: " + orep.detail;
            else if (!orep.complete) bad = "support oracle incomplete: " + orep.detail;
        }
        rec.flags = bad.empty() ? "ok" : "error:" + bad;
    } catch (const DegenerateParameter&) {
        rec.flags = "degenerate";
    } catch (const RationalPoint&) {
        rec.flags = "rational-point";
    } catch (const Error& e) {
        rec.flags = std::string("error:") + e.what();
    }
    if (cfg.timings) {
        auto elapsed = std::chrono::steady_clock::now() - started;
        rec.timing = std::chrono::duration<double>(elapsed).count();
    }
    return rec;
}

// ---------------------------------------------------------------------------
// sweeps

inline std::vector<SurveyRecord> load_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::vector<SurveyRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(record_from_json(ordered_json::parse(line)));
    }
    return out;
}

struct SweepResult {
    std::vector<SurveyRecord> records;  // the newly computed ones, in order
    long skipped = 0;                   // already present (resume)
};

/// One record per enumerated t, deterministic content and order independent
/// of the worker count.  With resume, parameters already present in out_path
/// are skipped and new records appended in enumeration order.
inline SweepResult sweep(const RunConfig& cfg) {
    std::vector<Rat> params = enumerate_t(cfg.max_height);
    std::set<std::string> done;
    if (cfg.resume && !cfg.out_path.empty()) {
        std::ifstream probe(cfg.out_path);
        if (probe.good()) {
            for (const SurveyRecord& r : load_records(cfg.out_path))
                done.insert(r.t);
        }
    }
    std::vector<Rat> todo;
    for (const Rat& t : params)
        if (!done.count(rat_str(t))) todo.push_back(t);

    std::vector<SurveyRecord> results(todo.size());
    std::atomic<size_t> next{0};
    int jobs = std::max(1, cfg.jobs);
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= todo.size()) return;
            results[i] = compute_record(todo[i], cfg);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    if (!cfg.out_path.empty()) {
        std::ofstream out(cfg.out_path,
                          cfg.resume ? std::ios::app : std::ios::trunc);
        if (!out) throw Error("cannot write " + cfg.out_path);
        for (const SurveyRecord& r : results) out << to_json(r).dump() << "\n";
    }
    return {std::move(results), static_cast<long>(done.size())};
}

// ---------------------------------------------------------------------------
// verification over records

struct ParityReport {
    long total = 0;
    long checked = 0;  // ok-flagged records
    std::vector<std::string> violations;
    bool pass() const { return violations.empty(); }
};

/// Theorem check: v13 is even and >= 2 for every ok record.
inline ParityReport verify_parity(const std::vector<SurveyRecord>& records) {
    ParityReport rep;
    rep.total = static_cast<long>(records.size());
    for (const SurveyRecord& r : records) {
        if (r.flags != "ok") {
            if (r.flags.rfind("error:", 0) == 0)
                rep.violations.push_back("t=" + r.t + ": " + r.flags);
            continue;
        }
        ++rep.checked;
        if (r.v13 < 2 || r.v13 % 2 != 0)
            rep.violations.push_back("t=" + r.t + ": v13=" +
                                     std::to_string(r.v13));
    }
    return rep;
}

struct UniquenessReport {
    long total = 0;
    std::vector<std::string> v13_2_params;  // t with v13 = 2
    std::vector<std::string> violations;
    // deduplication report: (d, j) -> parameters sharing that curve
    std::map<std::pair<std::string, std::string>, std::vector<std::string>>
        dedup;
    bool pass() const { return violations.empty(); }
};

/// Theorem check: v13 = 2 only for the distinguished curve (its j comes from
/// the t = 2 member), everything else has v13 >= 4.
inline UniquenessReport verify_unique_v13_2(
    const std::vector<SurveyRecord>& records) {
    UniquenessReport rep;
    rep.total = static_cast<long>(records.size());
    std::string j2 = rat_str(j_formula(Rat(2)));
    for (const SurveyRecord& r : records) {
        if (r.flags != "ok") continue;
        rep.dedup[{r.d.get_str(), r.j}].push_back(r.t);
        if (r.v13 == 2) {
            rep.v13_2_params.push_back(r.t);
            if (r.j != j2)
                rep.violations.push_back("t=" + r.t +
                                         ": v13=2 but j differs from E_2");
        } else if (r.v13 < 4) {
            rep.violations.push_back("t=" + r.t + ": v13=" +
                                     std::to_string(r.v13) + " not in {2, >=4}");
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// the v13 = 4 candidate search

struct SearchEntry {
    std::string family;   // e.g. "mersenne p=3", "fermat k=1", "{1,8,9}"
    Int a = 0, b = 0, cval = 0;  // the set {a, b, c}
    bool condition1 = true;      // rs(r-s) has exactly 2 prime divisors
    std::vector<std::pair<std::string, long>> results;  // (t, v13)
    std::vector<std::string> condition2_failures;       // t with v13 != 4
};

namespace detail {

inline void search_family(SearchEntry& entry, const RunConfig& cfg) {
    std::vector<Int> elems{entry.a, entry.b, entry.cval};
    std::set<Int> target(elems.begin(), elems.end());
    // condition 1: the product of the set elements has exactly 2 prime factors
    std::set<Int> prime_divs;
    for (const Int& e : elems)
        for (const auto& [p, ex] : factor(e).factors) prime_divs.insert(p);
    entry.condition1 = prime_divs.size() == 2;

    std::set<std::string> seen;
    std::vector<Rat> candidates;
    for (const Int& ra : elems)
        for (int sign : {1, -1})
            for (const Int& s : elems) {
                Int r = sign * ra;
                if (gcd(abs(r), s) != 1) continue;
                std::set<Int> got{abs(r), s, abs(r - s)};
                if (got != target) continue;
                Rat t = make_rat(r, s);
                if (t == 0 || t == 1) continue;
                if (seen.insert(rat_str(t)).second) candidates.push_back(t);
            }
    for (const Rat& t : candidates) {
        SurveyRecord rec = compute_record(t, cfg);
        long v13 = rec.flags == "ok" ? rec.v13 : -1;
        entry.results.emplace_back(rec.t, v13);
        if (v13 != 4) entry.condition2_failures.push_back(rec.t);
    }
}

}  // namespace detail

/// Candidate families from the heuristic search for v13 = 4: Mersenne sets
/// {1, 2^p - 1, 2^p}, Fermat sets {1, 2^k, 2^k + 1}, and {1, 8, 9}.
/// Condition-2 failures (v13 != 4) are reported, never asserted away.
inline std::vector<SearchEntry> search_v13_4(const std::vector<long>& mersenne,
                                             const std::vector<long>& fermat,
                                             bool special189,
                                             const RunConfig& cfg = {}) {
    std::vector<SearchEntry> out;
    for (long p : mersenne) {
        SearchEntry e;
        Int pw = detail::pow_int(2, static_cast<unsigned long>(p));
        e.family = "mersenne p=" + std::to_string(p);
        e.a = 1;
        e.b = pw - 1;
        e.cval = pw;
        detail::search_family(e, cfg);
        out.push_back(std::move(e));
    }
    for (long k : fermat) {
        SearchEntry e;
        Int pw = detail::pow_int(2, static_cast<unsigned long>(k));
        e.family = "fermat k=" + std::to_string(k);
        e.a = 1;
        e.b = pw;
        e.cval = pw + 1;
        detail::search_family(e, cfg);
        out.push_back(std::move(e));
    }
    if (special189) {
        SearchEntry e;
        e.family = "{1,8,9}";
        e.a = 1;
        e.b = 8;
        e.cval = 9;
        detail::search_family(e, cfg);
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace c13

#endif  // C13_SURVEY_HPP
