#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fp.hpp"

// Monomial layer for the dual Steenrod algebra at an odd prime p:
//
//   A_* = F_p[t_1, t_2, ...] (x) E[tau_0, tau_1, ...]
//
// with |t_n| = 2(p^n - 1) and |tau_n| = 2(p^n - 1) + 1. The diagonal is taken
// in the BP-aligned form (generators are the conjugates of the classical
// Milnor ones), so the polynomial part matches the reduction of the BP_*BP
// diagonal and the exterior generators emit their polynomial terms on the
// right:
//
//   D(t_n)   = sum_{i+j=n} t_i (x) t_j^{p^i}
//   D(tau_n) = 1 (x) tau_n + sum_{i+j=n} tau_i (x) t_j^{p^i}
//
// Both conventions give the same Ext groups; this one keeps the tau_i -> v_i
// dictionary index-aligned with the Hazewinkel tables in bp.hpp, and a test
// cross-checks D(t_n) against the mod-I reduction of the BP diagonal.

namespace sseq {

// tau-part as a bitmask (bit i = tau_i), t-part as exponents of t_1, t_2, ...
// with trailing zeros trimmed so equal monomials compare equal.
struct SteenrodMonomial {
    uint32_t E = 0;
    std::vector<uint32_t> R;

    void trim() {
        while (!R.empty() && R.back() == 0) R.pop_back();
    }
    bool is_unit() const { return E == 0 && R.empty(); }
    uint32_t tau_count() const { return static_cast<uint32_t>(std::popcount(E)); }
    bool is_polynomial() const { return E == 0; }
    // Singleton exterior letter tau_i with no polynomial part.
    std::optional<uint32_t> single_tau() const {
        if (!R.empty() || std::popcount(E) != 1) return std::nullopt;
        return static_cast<uint32_t>(std::countr_zero(E));
    }
    bool operator==(const SteenrodMonomial& o) const { return E == o.E && R == o.R; }
    bool operator!=(const SteenrodMonomial& o) const { return !(*this == o); }
};

inline SteenrodMonomial tau_gen(uint32_t i) { return {1u << i, {}}; }
inline SteenrodMonomial t_gen(uint32_t n, uint32_t exp = 1) {
    SteenrodMonomial m;
    if (n == 0) throw InputError("t_0 is the unit, not a generator");
    if (exp > 0) {
        m.R.assign(n, 0);
        m.R[n - 1] = exp;
    }
    return m;
}

inline uint64_t pow_u64(uint64_t b, uint32_t e) {
    uint64_t r = 1;
    for (uint32_t i = 0; i < e; ++i) r *= b;
    return r;
}

// Internal degree; at odd p every t-exponent contributes evenly, every tau
// contributes its odd degree once.
inline uint32_t degree(const SteenrodMonomial& m, uint32_t p) {
    uint64_t d = 0;
    for (size_t i = 0; i < m.R.size(); ++i)
        d += static_cast<uint64_t>(m.R[i]) * 2 * (pow_u64(p, static_cast<uint32_t>(i + 1)) - 1);
    for (uint32_t i = 0; i < 32; ++i)
        if (m.E & (1u << i)) d += 2 * (pow_u64(p, i) - 1) + 1;
    if (d > UINT32_MAX) throw TruncationError("monomial degree overflows the window arithmetic");
    return static_cast<uint32_t>(d);
}

// Motivic weight: t_n carries p^n - 1, tau_n carries p^n - 1; equivalently
// (degree - tau_count) / 2. Always integral.
inline uint32_t motivic_weight(const SteenrodMonomial& m, uint32_t p) {
    return (degree(m, p) - m.tau_count()) / 2;
}

// Canonical order: degree, then exterior index sequence lexicographically,
// then exponent sequence lexicographically. Total and p-dependent only via
// the degree component.
struct MonoOrder {
    uint32_t p;
    bool operator()(const SteenrodMonomial& a, const SteenrodMonomial& b) const {
        uint32_t da = degree(a, p), db = degree(b, p);
        if (da != db) return da < db;
        return less_same_degree(a, b);
    }
    static bool less_same_degree(const SteenrodMonomial& a, const SteenrodMonomial& b) {
        if (a.E != b.E) {
            // Lexicographic on ascending index sequences; empty set first.
            uint32_t ea = a.E, eb = b.E;
            while (ea && eb) {
                uint32_t ia = std::countr_zero(ea), ib = std::countr_zero(eb);
                if (ia != ib) return ia < ib;
                ea &= ea - 1;
                eb &= eb - 1;
            }
            return ea == 0;
        }
        size_t n = std::max(a.R.size(), b.R.size());
        for (size_t i = 0; i < n; ++i) {
            uint32_t ra = i < a.R.size() ? a.R[i] : 0;
            uint32_t rb = i < b.R.size() ? b.R[i] : 0;
            if (ra != rb) return ra < rb;
        }
        return false;
    }
};

// Product in A_*. Returns nullopt when an exterior generator repeats; the
// sign is the Koszul count of exterior transpositions needed to interleave
// the two tau sequences.
inline std::optional<std::pair<int, SteenrodMonomial>> mul(const SteenrodMonomial& a,
                                                           const SteenrodMonomial& b) {
    if (a.E & b.E) return std::nullopt;
    int inversions = 0;
    uint32_t eb = b.E;
    while (eb) {
        uint32_t j = std::countr_zero(eb);
        // taus of a with index greater than j must hop over tau_j.
        uint32_t higher = a.E >> (j + 1);
        inversions += std::popcount(higher);
        eb &= eb - 1;
    }
    SteenrodMonomial out;
    out.E = a.E | b.E;
    out.R.assign(std::max(a.R.size(), b.R.size()), 0);
    for (size_t i = 0; i < a.R.size(); ++i) out.R[i] += a.R[i];
    for (size_t i = 0; i < b.R.size(); ++i) out.R[i] += b.R[i];
    out.trim();
    return std::make_pair(inversions % 2 == 0 ? 1 : -1, out);
}

inline std::string to_string(const SteenrodMonomial& m) {
    if (m.is_unit()) return "1";
    std::ostringstream os;
    bool first = true;
    for (uint32_t i = 0; i < 32; ++i) {
        if (m.E & (1u << i)) {
            if (!first) os << ' ';
            os << "tau" << i;
            first = false;
        }
    }
    for (size_t i = 0; i < m.R.size(); ++i) {
        if (m.R[i] == 0) continue;
        if (!first) os << ' ';
        os << 't' << (i + 1);
        if (m.R[i] > 1) os << '^' << m.R[i];
        first = false;
    }
    return os.str();
}

// Sparse sum of left (x) right tensor terms with mod-p coefficients, kept
// sorted by (left, right) so assembly is canonical.
class Tensor2 {
  public:
    using Term = std::tuple<SteenrodMonomial, SteenrodMonomial, uint32_t>;

    explicit Tensor2(uint32_t p) : p_(p) {}
    uint32_t prime() const { return p_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add(const SteenrodMonomial& l, const SteenrodMonomial& r, int64_t coeff) {
        int64_t cc = coeff % static_cast<int64_t>(p_);
        if (cc < 0) cc += p_;
        if (cc == 0) return;
        MonoOrder ord{p_};
        auto key_less = [&](const Term& t) {
            const auto& [tl, tr, c] = t;
            (void)c;
            if (tl != l) return ord(tl, l);
            return ord(tr, r);
        };
        size_t lo = 0, hi = terms_.size();
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            if (key_less(terms_[mid])) lo = mid + 1;
            else hi = mid;
        }
        if (lo < terms_.size() && std::get<0>(terms_[lo]) == l && std::get<1>(terms_[lo]) == r) {
            uint32_t s = (std::get<2>(terms_[lo]) + static_cast<uint32_t>(cc)) % p_;
            if (s == 0) terms_.erase(terms_.begin() + static_cast<ptrdiff_t>(lo));
            else std::get<2>(terms_[lo]) = s;
        } else {
            terms_.insert(terms_.begin() + static_cast<ptrdiff_t>(lo), Term{l, r, static_cast<uint32_t>(cc)});
        }
    }

    void add_scaled(const Tensor2& o, int64_t coeff) {
        for (const auto& [l, r, c] : o.terms_) add(l, r, coeff * c);
    }

    // Graded product: (a (x) b)(c (x) d) = (-1)^{|b||c|} ac (x) bd with parity
    // given by tau counts; vanishing exterior squares drop out inside mul().
    Tensor2 operator*(const Tensor2& o) const {
        Tensor2 out(p_);
        for (const auto& [al, ar, ac] : terms_) {
            for (const auto& [bl, br, bc] : o.terms_) {
                auto l = mul(al, bl);
                if (!l) continue;
                auto r = mul(ar, br);
                if (!r) continue;
                int koszul = (ar.tau_count() * bl.tau_count()) % 2 == 0 ? 1 : -1;
                int64_t c = static_cast<int64_t>(ac) * bc * l->first * r->first * koszul;
                out.add(l->second, r->second, c);
            }
        }
        return out;
    }

    Tensor2 pow(uint32_t e) const {
        Tensor2 out(p_);
        out.add({}, {}, 1);
        for (uint32_t i = 0; i < e; ++i) out = out * *this;
        return out;
    }

    bool operator==(const Tensor2& o) const { return p_ == o.p_ && terms_ == o.terms_; }

  private:
    uint32_t p_;
    std::vector<Term> terms_;
};

// Structure tables for one (p, t_max) window: monomial bases by degree for the
// full algebra and its polynomial quotient, and reduced diagonals for every
// monomial in range. Construction is eager and deterministic.
class SteenrodTables {
  public:
    SteenrodTables(uint32_t p, uint32_t t_max) : p_(p), t_max_(t_max) {
        if (!is_odd_prime(p)) throw InputError("SteenrodTables: p must be an odd prime");
        // Generators in range.
        for (uint32_t n = 1;; ++n) {
            uint64_t d = 2 * (pow_u64(p, n) - 1);
            if (d > t_max || d == 0) break;
            t_degs_.push_back(static_cast<uint32_t>(d));
        }
        for (uint32_t i = 0;; ++i) {
            uint64_t d = 2 * (pow_u64(p, i) - 1) + 1;
            if (d > t_max) break;
            tau_degs_.push_back(static_cast<uint32_t>(d));
        }
        build_monomials();
        build_coproducts();
    }

    uint32_t prime() const { return p_; }
    uint32_t t_max() const { return t_max_; }
    uint32_t num_t_generators() const { return static_cast<uint32_t>(t_degs_.size()); }
    uint32_t num_tau_generators() const { return static_cast<uint32_t>(tau_degs_.size()); }

    // Monomial bases in canonical order. Degree 0 holds only the unit.
    const std::vector<SteenrodMonomial>& monomials(uint32_t deg) const {
        check_degree(deg);
        return a_monos_[deg];
    }
    const std::vector<SteenrodMonomial>& polynomial_monomials(uint32_t deg) const {
        check_degree(deg);
        return p_monos_[deg];
    }

    // Reduced diagonal: D(m) - m (x) 1 - 1 (x) m. Defined for every monomial
    // of degree <= t_max.
    const Tensor2& reduced_coproduct(const SteenrodMonomial& m) const {
        auto it = coproducts_.find(m);
        if (it == coproducts_.end())
            throw TruncationError("reduced_coproduct: monomial outside tables: " + to_string(m));
        return it->second;
    }

    uint32_t counit(const SteenrodMonomial& m) const { return m.is_unit() ? 1 : 0; }

    // Full diagonal, assembled from the reduced one; mostly for tests/audits.
    Tensor2 full_coproduct(const SteenrodMonomial& m) const {
        Tensor2 t = reduced_coproduct(m);
        t.add(m, SteenrodMonomial{}, 1);
        if (!m.is_unit()) t.add(SteenrodMonomial{}, m, 1);
        return t;
    }

  private:
    void check_degree(uint32_t deg) const {
        if (deg > t_max_) throw TruncationError("degree " + std::to_string(deg) + " exceeds table window t_max=" + std::to_string(t_max_));
    }

    void build_monomials() {
        a_monos_.assign(t_max_ + 1, {});
        p_monos_.assign(t_max_ + 1, {});
        // Enumerate polynomial parts recursively, then sprinkle tau subsets.
        std::vector<SteenrodMonomial> polys;
        SteenrodMonomial cur;
        enumerate_poly(0, 0, cur, polys);
        MonoOrder ord{p_};
        for (const auto& m : polys) {
            uint32_t d = degree(m, p_);
            p_monos_[d].push_back(m);
        }
        for (const auto& m : polys) {
            uint32_t base = degree(m, p_);
            uint32_t ntau = static_cast<uint32_t>(tau_degs_.size());
            for (uint32_t mask = 0; mask < (1u << ntau); ++mask) {
                uint64_t d = base;
                for (uint32_t i = 0; i < ntau; ++i)
                    if (mask & (1u << i)) d += tau_degs_[i];
                if (d > t_max_) continue;
                SteenrodMonomial a = m;
                a.E = mask;
                a_monos_[static_cast<uint32_t>(d)].push_back(a);
            }
        }
        for (auto& bucket : a_monos_) std::sort(bucket.begin(), bucket.end(), ord);
        for (auto& bucket : p_monos_) std::sort(bucket.begin(), bucket.end(), ord);
    }

    void enumerate_poly(uint32_t gen, uint32_t deg_so_far, SteenrodMonomial& cur,
                        std::vector<SteenrodMonomial>& out) {
        if (gen == t_degs_.size()) {
            SteenrodMonomial m = cur;
            m.trim();
            out.push_back(m);
            return;
        }
        uint32_t gd = t_degs_[gen];
        for (uint32_t e = 0;; ++e) {
            uint64_t d = deg_so_far + static_cast<uint64_t>(e) * gd;
            if (d > t_max_) break;
            if (cur.R.size() <= gen) cur.R.resize(gen + 1, 0);
            cur.R[gen] = e;
            enumerate_poly(gen + 1, static_cast<uint32_t>(d), cur, out);
        }
        cur.R[gen] = 0;
    }

    Tensor2 generator_coproduct_t(uint32_t n) const {
        // D(t_n) = sum_{i+j=n} t_i (x) t_j^{p^i}; ends included.
        Tensor2 out(p_);
        for (uint32_t i = 0; i <= n; ++i) {
            uint32_t j = n - i;
            SteenrodMonomial l = i == 0 ? SteenrodMonomial{} : t_gen(i);
            uint32_t exp = static_cast<uint32_t>(pow_u64(p_, i));
            SteenrodMonomial r = j == 0 ? SteenrodMonomial{} : t_gen(j, exp);
            out.add(l, r, 1);
        }
        return out;
    }

    Tensor2 generator_coproduct_tau(uint32_t n) const {
        // D(tau_n) = 1 (x) tau_n + sum_{i+j=n} tau_i (x) t_j^{p^i}.
        Tensor2 out(p_);
        out.add(SteenrodMonomial{}, tau_gen(n), 1);
        for (uint32_t i = 0; i <= n; ++i) {
            uint32_t j = n - i;
            uint32_t exp = static_cast<uint32_t>(pow_u64(p_, i));
            SteenrodMonomial r = j == 0 ? SteenrodMonomial{} : t_gen(j, exp);
            out.add(tau_gen(i), r, 1);
        }
        return out;
    }

    void build_coproducts() {
        MonoOrder ord{p_};
        (void)ord;
        for (uint32_t d = 0; d <= t_max_; ++d) {
            for (const auto& m : a_monos_[d]) {
                Tensor2 full(p_);
                full.add({}, {}, 1);
                for (uint32_t i = 0; i < 32; ++i)
                    if (m.E & (1u << i)) full = full * generator_coproduct_tau(i);
                for (size_t g = 0; g < m.R.size(); ++g)
                    if (m.R[g] > 0) full = full * generator_coproduct_t(static_cast<uint32_t>(g + 1)).pow(m.R[g]);
                // Strip the primitive ends to store the reduced diagonal.
                Tensor2 red(p_);
                for (const auto& [l, r, c] : full.terms()) {
                    if (l.is_unit() && r == m) continue;
                    if (r.is_unit() && l == m) continue;
                    red.add(l, r, c);
                }
                coproducts_.emplace(m, std::move(red));
            }
        }
    }

    struct MonoKeyLess {
        bool operator()(const SteenrodMonomial& a, const SteenrodMonomial& b) const {
            if (a.E != b.E) return a.E < b.E;
            return a.R < b.R;
        }
    };

    uint32_t p_;
    uint32_t t_max_;
    std::vector<uint32_t> t_degs_;
    std::vector<uint32_t> tau_degs_;
    std::vector<std::vector<SteenrodMonomial>> a_monos_;
    std::vector<std::vector<SteenrodMonomial>> p_monos_;
    std::map<SteenrodMonomial, Tensor2, MonoKeyLess> coproducts_;
};

// A motivic monomial: a power of the degree-(0,-1) class tau times a base
// monomial. Only the bidegree bookkeeping lives here; the transfer layer owns
// the maps that interpret it.
struct MotivicMonomial {
    uint32_t tau_power = 0;
    SteenrodMonomial base;

    // (internal degree, motivic weight)
    std::pair<uint32_t, int64_t> bidegree(uint32_t p) const {
        return {degree(base, p),
                static_cast<int64_t>(motivic_weight(base, p)) - static_cast<int64_t>(tau_power)};
    }
};

} // namespace sseq
