#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

// Exact scalar arithmetic for the workbench: the prime field F_p for an odd
// prime p, and truncated p-typical integers Z/p^N used by the integral cobar
// complex. Everything is a value type; nothing here allocates.

namespace sseq {

// User-facing misconfiguration: bad prime, window out of range, malformed file.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// A named consistency check failed (decomposition audit, d^2, cache integrity).
struct AuditError : std::runtime_error {
    std::string check;
    AuditError(std::string check_, const std::string& msg)
        : std::runtime_error("[" + check_ + "] " + msg), check(std::move(check_)) {}
};

// A value's p-adic valuation reached the working precision, so a computation
// that needed to peel its leading weight component cannot certify the result.
struct PrecisionError : std::runtime_error {
    explicit PrecisionError(const std::string& msg) : std::runtime_error(msg) {}
};

// A request stepped outside the truncation window the tables were built for.
struct TruncationError : std::runtime_error {
    explicit TruncationError(const std::string& msg) : std::runtime_error(msg) {}
};

inline bool is_odd_prime(uint32_t p) {
    if (p < 3 || p % 2 == 0) return false;
    for (uint32_t d = 3; d * d <= p; d += 2)
        if (p % d == 0) return false;
    return true;
}

namespace detail {
// Modular inverse by extended Euclid; m need not be prime (used for Z/p^N units).
inline uint64_t inverse_mod(uint64_t a, uint64_t m) {
    int64_t t = 0, newt = 1;
    int64_t r = static_cast<int64_t>(m), newr = static_cast<int64_t>(a % m);
    while (newr != 0) {
        int64_t q = r / newr;
        t -= q * newt; std::swap(t, newt);
        r -= q * newr; std::swap(r, newr);
    }
    if (r != 1) throw InputError("inverse_mod: element is not a unit");
    return static_cast<uint64_t>(t < 0 ? t + static_cast<int64_t>(m) : t);
}
} // namespace detail

// An element of F_p. The prime travels with the value; mixing primes is a bug
// and throws rather than silently coercing.
class FpScalar {
  public:
    FpScalar() : v_(0), p_(3) {}
    FpScalar(int64_t value, uint32_t p) : p_(p) {
        if (!is_odd_prime(p)) throw InputError("FpScalar: p must be an odd prime, got " + std::to_string(p));
        int64_t r = value % static_cast<int64_t>(p);
        v_ = static_cast<uint32_t>(r < 0 ? r + p : r);
    }

    uint32_t value() const { return v_; }
    uint32_t prime() const { return p_; }
    bool is_zero() const { return v_ == 0; }

    FpScalar operator+(FpScalar o) const { match(o); return make((v_ + o.v_) % p_); }
    FpScalar operator-(FpScalar o) const { match(o); return make((v_ + p_ - o.v_) % p_); }
    FpScalar operator*(FpScalar o) const {
        match(o);
        return make(static_cast<uint32_t>((static_cast<uint64_t>(v_) * o.v_) % p_));
    }
    FpScalar operator-() const { return make(v_ == 0 ? 0 : p_ - v_); }
    FpScalar inv() const {
        if (v_ == 0) throw InputError("FpScalar: inverse of zero");
        return make(static_cast<uint32_t>(detail::inverse_mod(v_, p_)));
    }
    bool operator==(const FpScalar& o) const { return p_ == o.p_ && v_ == o.v_; }
    bool operator!=(const FpScalar& o) const { return !(*this == o); }

  private:
    FpScalar make(uint32_t raw) const { FpScalar s; s.v_ = raw; s.p_ = p_; return s; }
    void match(const FpScalar& o) const {
        if (p_ != o.p_) throw InputError("FpScalar: mixed primes");
    }
    uint32_t v_;
    uint32_t p_;
};

// An element of Z/p^N together with its p-adic valuation bookkeeping. N is
// small (default k_max + r_max + 2), so the value fits comfortably in 64 bits.
class TruncatedInteger {
  public:
    TruncatedInteger() : v_(0), p_(3), n_(1), pn_(3) {}
    TruncatedInteger(int64_t value, uint32_t p, uint32_t precision) : p_(p), n_(precision) {
        if (!is_odd_prime(p)) throw InputError("TruncatedInteger: p must be an odd prime");
        if (precision == 0 || precision > 36) throw InputError("TruncatedInteger: precision out of range");
        pn_ = 1;
        for (uint32_t i = 0; i < precision; ++i) {
            if (pn_ > UINT64_MAX / p) throw InputError("TruncatedInteger: p^N overflows 64 bits");
            pn_ *= p;
        }
        int64_t m = static_cast<int64_t>(pn_);
        int64_t r = value % m;
        v_ = static_cast<uint64_t>(r < 0 ? r + m : r);
    }

    uint64_t value() const { return v_; }
    uint32_t prime() const { return p_; }
    uint32_t precision() const { return n_; }
    uint64_t modulus() const { return pn_; }
    bool is_zero() const { return v_ == 0; }

    // p-adic valuation. A stored zero only certifies valuation >= N; callers
    // that need the exact valuation must consult valuation_exhausted().
    uint32_t p_valuation() const {
        if (v_ == 0) return n_;
        uint32_t k = 0;
        uint64_t x = v_;
        while (x % p_ == 0) { x /= p_; ++k; }
        return k;
    }
    bool valuation_exhausted() const { return v_ == 0; }

    // The mod-p unit digit of v / p^k, for peeling the weight-k component.
    // Requires p_valuation() >= k; a zero value trips the precision guard.
    uint32_t unit_digit(uint32_t k) const {
        if (v_ == 0) throw PrecisionError("unit_digit: valuation reached precision N=" + std::to_string(n_));
        uint64_t x = v_;
        for (uint32_t i = 0; i < k; ++i) {
            if (x % p_ != 0) throw InputError("unit_digit: valuation below requested weight");
            x /= p_;
        }
        return static_cast<uint32_t>(x % p_);
    }

    TruncatedInteger operator+(const TruncatedInteger& o) const { match(o); return make((v_ + o.v_) % pn_); }
    TruncatedInteger operator-(const TruncatedInteger& o) const { match(o); return make((v_ + pn_ - o.v_) % pn_); }
    TruncatedInteger operator*(const TruncatedInteger& o) const {
        match(o);
        return make(static_cast<uint64_t>((static_cast<unsigned __int128>(v_) * o.v_) % pn_));
    }
    TruncatedInteger operator-() const { return make(v_ == 0 ? 0 : pn_ - v_); }
    bool operator==(const TruncatedInteger& o) const { return p_ == o.p_ && n_ == o.n_ && v_ == o.v_; }
    bool operator!=(const TruncatedInteger& o) const { return !(*this == o); }

  private:
    TruncatedInteger make(uint64_t raw) const { TruncatedInteger t(*this); t.v_ = raw; return t; }
    void match(const TruncatedInteger& o) const {
        if (p_ != o.p_ || n_ != o.n_) throw InputError("TruncatedInteger: mixed moduli");
    }
    uint64_t v_;
    uint32_t p_;
    uint32_t n_;
    uint64_t pn_;
};

// Free-standing spelling used throughout the engine code.
inline uint32_t p_valuation(const TruncatedInteger& x) { return x.p_valuation(); }

} // namespace sseq
