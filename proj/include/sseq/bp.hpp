#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fp.hpp"
#include "steenrod.hpp"

// Structure constants for the Hopf algebroid (BP_*, BP_*BP) in Hazewinkel
// generators, computed from the logarithm recursions in exact p-local
// arithmetic and then checked for p-integrality:
//
//   p m_n      = sum_{0 <= i < n} m_i v_{n-i}^{p^i}           (m_0 = 1)
//   eta_R(m_n) = sum_{i+j=n} m_i t_j^{p^i}
//   D(t_n)     = sum_{i+j+k=n} m_i t_j^{p^i} (x) t_k^{p^{i+j}}
//                  - sum_{0 < i <= n} m_i D(t_{n-i})^{p^i}
//
// eta_R(v_n) follows from inverting the first recursion. Coefficients stay in
// Z_(p) once assembled; any non-integral output is a hard audit failure, not
// a rounding concern.
//
// t-monomials reuse SteenrodMonomial with an empty exterior part so degrees,
// orders and printing agree with the mod-p layer.

namespace sseq {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline uint32_t p_valuation(const Integer& n, uint32_t p) {
    if (n == 0) throw InputError("p_valuation of zero integer");
    Integer m = n;
    uint32_t v = 0;
    while (m % p == 0) {
        m /= p;
        ++v;
    }
    return v;
}

inline bool is_p_integral(const Rational& r, uint32_t p) {
    return boost::multiprecision::denominator(r) % p != 0;
}

// Reduce a p-integral rational mod p^N.
inline TruncatedInteger reduce_mod_pn(const Rational& r, uint32_t p, uint32_t precision) {
    if (!is_p_integral(r, p)) throw AuditError("bp-integrality", "rational with p in denominator");
    Integer num = boost::multiprecision::numerator(r);
    Integer den = boost::multiprecision::denominator(r);
    Integer pn = 1;
    for (uint32_t i = 0; i < precision; ++i) pn *= p;
    Integer n = num % pn;
    if (n < 0) n += pn;
    Integer d = den % pn;
    if (d < 0) d += pn;
    // Invert the denominator with the extended Euclid over cpp_int; gcd(d, pn)
    // is 1 because d is prime to p.
    Integer r0 = pn, r1 = d, s0 = 0, s1 = 1;
    while (r1 != 0) {
        Integer q = r0 / r1;
        Integer r2 = r0 - q * r1;
        Integer s2 = s0 - q * s1;
        r0 = r1; r1 = r2;
        s0 = s1; s1 = s2;
    }
    Integer inv = s0 % pn;
    if (inv < 0) inv += pn;
    Integer val = (n * inv) % pn;
    return TruncatedInteger(static_cast<int64_t>(val), p, precision);
}

// Monomial in the v generators, with an explicit v_0 slot used only by the
// associated-graded layer (integrally v_0 = p lives in the coefficient).
struct VMonomial {
    uint32_t v0 = 0;
    std::vector<uint32_t> alpha;

    void trim() {
        while (!alpha.empty() && alpha.back() == 0) alpha.pop_back();
    }
    // I-adic weight: v_0 and every v_i count once per exponent.
    uint32_t weight() const {
        uint32_t w = v0;
        for (uint32_t a : alpha) w += a;
        return w;
    }
    // Internal degree; v_0 is degree 0.
    uint32_t degree(uint32_t p) const {
        uint64_t d = 0;
        for (size_t i = 0; i < alpha.size(); ++i)
            d += static_cast<uint64_t>(alpha[i]) * 2 * (pow_u64(p, static_cast<uint32_t>(i + 1)) - 1);
        if (d > UINT32_MAX) throw TruncationError("v-monomial degree overflow");
        return static_cast<uint32_t>(d);
    }
    bool is_unit() const { return v0 == 0 && alpha.empty(); }
    bool operator==(const VMonomial& o) const { return v0 == o.v0 && alpha == o.alpha; }
    bool operator!=(const VMonomial& o) const { return !(*this == o); }
    bool operator<(const VMonomial& o) const {
        if (v0 != o.v0) return v0 < o.v0;
        return alpha < o.alpha;
    }
};

inline VMonomial v_gen(uint32_t n, uint32_t exp = 1) {
    VMonomial m;
    if (n == 0) {
        m.v0 = exp;
        return m;
    }
    if (exp > 0) {
        m.alpha.assign(n, 0);
        m.alpha[n - 1] = exp;
    }
    return m;
}

inline VMonomial mul(const VMonomial& a, const VMonomial& b) {
    VMonomial out;
    out.v0 = a.v0 + b.v0;
    out.alpha.assign(std::max(a.alpha.size(), b.alpha.size()), 0);
    for (size_t i = 0; i < a.alpha.size(); ++i) out.alpha[i] += a.alpha[i];
    for (size_t i = 0; i < b.alpha.size(); ++i) out.alpha[i] += b.alpha[i];
    out.trim();
    return out;
}

inline std::string to_string(const VMonomial& m) {
    if (m.is_unit()) return "1";
    std::ostringstream os;
    bool first = true;
    if (m.v0 > 0) {
        os << "v0";
        if (m.v0 > 1) os << '^' << m.v0;
        first = false;
    }
    for (size_t i = 0; i < m.alpha.size(); ++i) {
        if (m.alpha[i] == 0) continue;
        if (!first) os << ' ';
        os << 'v' << (i + 1);
        if (m.alpha[i] > 1) os << '^' << m.alpha[i];
        first = false;
    }
    return os.str();
}

// t-monomials: SteenrodMonomial restricted to its polynomial part.
inline SteenrodMonomial t_monomial(std::vector<uint32_t> exps) {
    SteenrodMonomial m;
    m.R = std::move(exps);
    m.trim();
    return m;
}

namespace detail {
struct VTKey {
    std::vector<uint32_t> alpha; // v-exponents, trimmed, no v_0 slot
    std::vector<uint32_t> t;     // t-exponents, trimmed
    bool operator<(const VTKey& o) const { return std::tie(alpha, t) < std::tie(o.alpha, o.t); }
    bool operator==(const VTKey& o) const { return alpha == o.alpha && t == o.t; }
};
struct VTTKey {
    std::vector<uint32_t> alpha;
    std::vector<uint32_t> tl;
    std::vector<uint32_t> tr;
    bool operator<(const VTTKey& o) const {
        return std::tie(alpha, tl, tr) < std::tie(o.alpha, o.tl, o.tr);
    }
    bool operator==(const VTTKey& o) const { return alpha == o.alpha && tl == o.tl && tr == o.tr; }
};
inline std::vector<uint32_t> add_exps(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    std::vector<uint32_t> out(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    while (!out.empty() && out.back() == 0) out.pop_back();
    return out;
}
} // namespace detail

// Polynomial in v's and t's over Q (v_0 never appears; powers of p stay in
// the coefficients).
class VTPoly {
  public:
    using Term = std::pair<detail::VTKey, Rational>;

    VTPoly() = default;
    static VTPoly unit() {
        VTPoly r;
        r.terms_[{}] = 1;
        return r;
    }
    static VTPoly single(std::vector<uint32_t> alpha, std::vector<uint32_t> t, Rational c) {
        VTPoly r;
        detail::VTKey k{std::move(alpha), std::move(t)};
        while (!k.alpha.empty() && k.alpha.back() == 0) k.alpha.pop_back();
        while (!k.t.empty() && k.t.back() == 0) k.t.pop_back();
        if (c != 0) r.terms_[k] = std::move(c);
        return r;
    }

    const std::map<detail::VTKey, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add(const detail::VTKey& k, const Rational& c) {
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            if (c != 0) terms_[k] = c;
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }
    VTPoly& operator+=(const VTPoly& o) {
        for (const auto& [k, c] : o.terms_) add(k, c);
        return *this;
    }
    VTPoly& operator-=(const VTPoly& o) {
        for (const auto& [k, c] : o.terms_) add(k, -c);
        return *this;
    }
    VTPoly operator*(const VTPoly& o) const {
        VTPoly out;
        for (const auto& [ka, ca] : terms_)
            for (const auto& [kb, cb] : o.terms_)
                out.add({detail::add_exps(ka.alpha, kb.alpha), detail::add_exps(ka.t, kb.t)}, ca * cb);
        return out;
    }
    VTPoly& operator*=(const Rational& c) {
        if (c == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [k, v] : terms_) v *= c;
        return *this;
    }
    VTPoly pow(uint32_t e) const {
        VTPoly out = unit();
        for (uint32_t i = 0; i < e; ++i) out = out * *this;
        return out;
    }
    bool operator==(const VTPoly& o) const { return terms_ == o.terms_; }

    bool p_integral(uint32_t p) const {
        for (const auto& [k, c] : terms_)
            if (!is_p_integral(c, p)) return false;
        return true;
    }

  private:
    std::map<detail::VTKey, Rational> terms_;
};

// Element of Gamma (x) Gamma with all v's pushed into the left factor's
// coefficient; both tensor legs are then pure t-monomials.
class VTTensor {
  public:
    VTTensor() = default;
    static VTTensor unit() {
        VTTensor r;
        r.terms_[{}] = 1;
        return r;
    }

    const std::map<detail::VTTKey, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add(const detail::VTTKey& key, const Rational& c) {
        detail::VTTKey k = key;
        while (!k.alpha.empty() && k.alpha.back() == 0) k.alpha.pop_back();
        while (!k.tl.empty() && k.tl.back() == 0) k.tl.pop_back();
        while (!k.tr.empty() && k.tr.back() == 0) k.tr.pop_back();
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            if (c != 0) terms_[k] = c;
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }
    VTTensor& operator+=(const VTTensor& o) {
        for (const auto& [k, c] : o.terms_) add(k, c);
        return *this;
    }
    VTTensor& operator-=(const VTTensor& o) {
        for (const auto& [k, c] : o.terms_) add(k, -c);
        return *this;
    }
    VTTensor operator*(const VTTensor& o) const {
        VTTensor out;
        for (const auto& [ka, ca] : terms_)
            for (const auto& [kb, cb] : o.terms_)
                out.add({detail::add_exps(ka.alpha, kb.alpha), detail::add_exps(ka.tl, kb.tl),
                         detail::add_exps(ka.tr, kb.tr)},
                        ca * cb);
        return out;
    }
    VTTensor pow(uint32_t e) const {
        VTTensor out = unit();
        for (uint32_t i = 0; i < e; ++i) out = out * *this;
        return out;
    }
    bool operator==(const VTTensor& o) const { return terms_ == o.terms_; }
    bool p_integral(uint32_t p) const {
        for (const auto& [k, c] : terms_)
            if (!is_p_integral(c, p)) return false;
        return true;
    }

  private:
    std::map<detail::VTTKey, Rational> terms_;
};

// One term of a graded coaction: new first letter, target coefficient
// monomial, unit coefficient mod p.
struct GrCoactionTerm {
    SteenrodMonomial letter;
    VMonomial target;
    uint32_t coeff;
};

class BPTables {
  public:
    BPTables(uint32_t p, uint32_t t_max) : p_(p), t_max_(t_max) {
        if (!is_odd_prime(p)) throw InputError("BPTables: p must be an odd prime");
        uint32_t n = 0;
        while (2 * (pow_u64(p, n + 1) - 1) <= t_max) ++n;
        n_max_ = n;
        build();
    }

    uint32_t prime() const { return p_; }
    uint32_t t_max() const { return t_max_; }
    // Number of v_n / t_n generators (n >= 1) inside the degree window.
    uint32_t num_generators() const { return n_max_; }

    // m_n as a rational polynomial in v's.
    const VTPoly& log_coefficient(uint32_t n) const {
        if (n == 0 || n > n_max_) throw InputError("log_coefficient index out of range");
        return m_[n - 1];
    }
    // eta_R(v_n) expanded in v's and t's; p-integral by construction.
    const VTPoly& eta_r(uint32_t n) const {
        if (n == 0 || n > n_max_) throw InputError("eta_r index out of range");
        return eta_v_[n - 1];
    }
    // Full diagonal of t_n in the pushed-left normal form.
    const VTTensor& diagonal(uint32_t n) const {
        if (n == 0 || n > n_max_) throw InputError("diagonal index out of range");
        return delta_t_[n - 1];
    }

    // eta_R on a product of v generators (no v_0 slot; powers of p belong to
    // the numeric coefficient).
    const VTPoly& eta_r_monomial(const VMonomial& m) const {
        if (m.v0 != 0) throw InputError("eta_r_monomial: v_0 slot must be empty integrally");
        if (m.alpha.size() > n_max_) throw TruncationError("eta_r_monomial: generator outside window");
        auto it = eta_cache_.find(m.alpha);
        if (it != eta_cache_.end()) return it->second;
        VTPoly r = VTPoly::unit();
        for (size_t i = 0; i < m.alpha.size(); ++i)
            if (m.alpha[i] > 0) r = r * eta_v_[i].pow(m.alpha[i]);
        return eta_cache_.emplace(m.alpha, std::move(r)).first->second;
    }

    // Full diagonal of a t-monomial, multiplicatively.
    const VTTensor& diagonal_monomial(const SteenrodMonomial& t) const {
        if (!t.is_polynomial()) throw InputError("diagonal_monomial: polynomial letters only");
        if (t.R.size() > n_max_) throw TruncationError("diagonal_monomial: generator outside window");
        auto it = delta_cache_.find(t.R);
        if (it != delta_cache_.end()) return it->second;
        VTTensor r = VTTensor::unit();
        for (size_t i = 0; i < t.R.size(); ++i)
            if (t.R[i] > 0) r = r * delta_t_[i].pow(t.R[i]);
        return delta_cache_.emplace(t.R, std::move(r)).first->second;
    }

    // Reduced diagonal: both primitive ends stripped (each appears exactly
    // once, with coefficient 1, in the pushed-left normal form).
    VTTensor reduced_diagonal_monomial(const SteenrodMonomial& t) const {
        VTTensor out = diagonal_monomial(t);
        if (t.is_unit()) return VTTensor();
        out.add({{}, t.R, {}}, -1);
        out.add({{}, {}, t.R}, -1);
        return out;
    }

    // Associated-graded coaction on the weight-w line through m: the terms of
    // eta_R(v^alpha) p^{v0} of I-adic weight exactly m.weight(), split as
    // (new letter, coefficient v-monomial with explicit v_0 slot, unit).
    // Terms of higher weight belong to deeper layers and are dropped here;
    // weight can never fall.
    std::vector<GrCoactionTerm> gr_coaction(const VMonomial& m) const {
        VMonomial base;
        base.alpha = m.alpha;
        base.trim();
        const VTPoly& eta = eta_r_monomial(base);
        uint32_t w = m.weight();
        std::vector<GrCoactionTerm> out;
        for (const auto& [k, c] : eta.terms()) {
            if (k.t.empty()) continue; // the eta_L part; not a coaction letter
            Integer num = boost::multiprecision::numerator(c);
            Integer den = boost::multiprecision::denominator(c);
            if (den % p_ == 0) throw AuditError("bp-integrality", "eta_R coefficient not p-local");
            uint32_t val = p_valuation(num, p_);
            uint32_t alpha_weight = 0;
            for (uint32_t a : k.alpha) alpha_weight += a;
            uint32_t term_weight = m.v0 + val + alpha_weight;
            if (term_weight < w)
                throw AuditError("filtration", "eta_R dropped I-adic weight");
            if (term_weight > w) continue;
            // Unit part of the coefficient mod p.
            Integer unit_num = num;
            for (uint32_t i = 0; i < val; ++i) unit_num /= p_;
            Integer un = unit_num % p_;
            if (un < 0) un += p_;
            Integer ud = den % p_;
            if (ud < 0) ud += p_;
            uint32_t u = static_cast<uint32_t>(un) * detail::inverse_mod(static_cast<uint32_t>(ud), p_) % p_;
            VMonomial target;
            target.v0 = m.v0 + val;
            target.alpha = k.alpha;
            out.push_back({t_monomial(k.t), target, u});
        }
        return out;
    }

    // Basis of the weight-k layer in internal degrees <= max_degree, ordered
    // by (degree, v_0 exponent, remaining exponents).
    std::vector<VMonomial> weight_basis(uint32_t k, uint32_t max_degree) const {
        std::vector<VMonomial> out;
        std::vector<uint32_t> alpha(n_max_, 0);
        enumerate_weight(0, k, 0, max_degree, alpha, out);
        std::sort(out.begin(), out.end(), [&](const VMonomial& a, const VMonomial& b) {
            uint32_t da = a.degree(p_), db = b.degree(p_);
            if (da != db) return da < db;
            if (a.v0 != b.v0) return a.v0 < b.v0;
            return a.alpha < b.alpha;
        });
        return out;
    }

  private:
    void enumerate_weight(uint32_t gen, uint32_t weight_left, uint32_t deg_so_far,
                          uint32_t max_degree, std::vector<uint32_t>& alpha,
                          std::vector<VMonomial>& out) const {
        if (gen == n_max_) {
            // Remaining weight goes to v_0, which costs no degree.
            VMonomial m;
            m.v0 = weight_left;
            m.alpha = alpha;
            m.trim();
            out.push_back(m);
            return;
        }
        uint32_t gd = static_cast<uint32_t>(2 * (pow_u64(p_, gen + 1) - 1));
        for (uint32_t e = 0; e <= weight_left; ++e) {
            uint64_t d = deg_so_far + static_cast<uint64_t>(e) * gd;
            if (d > max_degree) break;
            alpha[gen] = e;
            enumerate_weight(gen + 1, weight_left - e, static_cast<uint32_t>(d), max_degree, alpha, out);
        }
        alpha[gen] = 0;
    }

    void build() {
        // m_n by the p-typical log recursion, in Q[v].
        for (uint32_t n = 1; n <= n_max_; ++n) {
            VTPoly acc = VTPoly::single(v_gen(n).alpha, {}, 1);
            for (uint32_t i = 1; i < n; ++i) {
                VTPoly vpow = VTPoly::single(v_gen(n - i).alpha, {}, 1).pow(pow_u32(p_, i));
                acc += m_[i - 1] * vpow;
            }
            acc *= Rational(1, p_);
            m_.push_back(std::move(acc));
        }
        // eta_R(m_n) = sum m_i t_j^{p^i} as a rational v,t-polynomial.
        auto eta_m = [&](uint32_t n) {
            VTPoly acc;
            for (uint32_t i = 0; i <= n; ++i) {
                uint32_t j = n - i;
                VTPoly mi = i == 0 ? VTPoly::unit() : m_[i - 1];
                VTPoly tj = j == 0 ? VTPoly::unit()
                                   : VTPoly::single({}, t_gen(j, pow_u32(p_, i)).R, 1);
                acc += mi * tj;
            }
            return acc;
        };
        // eta_R(v_n) = p eta_R(m_n) - sum_{0<i<n} eta_R(m_i) eta_R(v_{n-i})^{p^i}.
        for (uint32_t n = 1; n <= n_max_; ++n) {
            VTPoly acc = eta_m(n);
            acc *= Rational(p_);
            for (uint32_t i = 1; i < n; ++i) {
                VTPoly part = eta_m(i) * eta_v_[n - i - 1].pow(pow_u32(p_, i));
                acc -= part;
            }
            if (!acc.p_integral(p_))
                throw AuditError("bp-integrality", "eta_R(v_" + std::to_string(n) + ") not integral");
            eta_v_.push_back(std::move(acc));
        }
        // D(t_n) by the log-compatibility recursion, pushed-left normal form.
        for (uint32_t n = 1; n <= n_max_; ++n) {
            VTTensor acc;
            for (uint32_t i = 0; i <= n; ++i) {
                VTPoly mi = i == 0 ? VTPoly::unit() : m_[i - 1];
                for (uint32_t j = 0; i + j <= n; ++j) {
                    uint32_t k = n - i - j;
                    std::vector<uint32_t> tl = j == 0 ? std::vector<uint32_t>{}
                                                      : t_gen(j, pow_u32(p_, i)).R;
                    std::vector<uint32_t> tr = k == 0 ? std::vector<uint32_t>{}
                                                      : t_gen(k, pow_u32(p_, i + j)).R;
                    for (const auto& [km, cm] : mi.terms())
                        acc.add({km.alpha, detail::add_exps(km.t, tl), tr}, cm);
                }
            }
            for (uint32_t i = 1; i <= n; ++i) {
                VTTensor dpow = (n - i == 0 ? VTTensor::unit() : delta_t_[n - i - 1]).pow(pow_u32(p_, i));
                for (const auto& [km, cm] : m_[i - 1].terms())
                    for (const auto& [kd, cd] : dpow.terms())
                        acc.add({detail::add_exps(km.alpha, kd.alpha), kd.tl, kd.tr}, -cm * cd);
            }
            if (!acc.p_integral(p_))
                throw AuditError("bp-integrality", "D(t_" + std::to_string(n) + ") not integral");
            delta_t_.push_back(std::move(acc));
        }
    }

    static uint32_t pow_u32(uint32_t b, uint32_t e) {
        uint64_t r = pow_u64(b, e);
        if (r > UINT32_MAX) throw TruncationError("exponent overflow in BP tables");
        return static_cast<uint32_t>(r);
    }

    uint32_t p_;
    uint32_t t_max_;
    uint32_t n_max_ = 0;
    std::vector<VTPoly> m_;
    std::vector<VTPoly> eta_v_;
    std::vector<VTTensor> delta_t_;
    mutable std::map<std::vector<uint32_t>, VTPoly> eta_cache_;
    mutable std::map<std::vector<uint32_t>, VTTensor> delta_cache_;
};

} // namespace sseq
