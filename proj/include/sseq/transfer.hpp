#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sseq/algnov.hpp"
#include "sseq/cess.hpp"

// Motivic bookkeeping and the transfer engine. The graded pages and the
// classical Adams pages meet in the motivic indexing: a regrading identifies
// graded slots (S,T,K) with motivic positions (s,t,u), differentials line up
// page by page under it, and inside an explicit range the graded differential
// on a detecting class forces a classical differential on the detected class.
// Everything here is exact index arithmetic plus record assembly over the
// complexes built elsewhere; the one hypothesis the engine cannot check
// (survival of the classical class to the stated page) travels as an explicit
// assumption on the record instead of being silently presumed.

namespace sseq {

// Position on the motivic pages: homological degree, internal degree, motivic
// weight. Signed because tau multiplication lowers the weight without bound.
struct MotivicTridegree {
    int64_t s = 0;
    int64_t t = 0;
    int64_t u = 0;
    bool operator==(const MotivicTridegree&) const = default;
};

// Weight of the motivic lift of a classical class detected in layer k: half
// of t-k. The congruence that makes layers possible also makes t-k even, so
// an odd difference means the detection upstream is broken, not the input.
inline uint32_t motivic_weight(uint32_t t, uint32_t k) {
    if (k > t) throw InputError("motivic_weight: layer exceeds the internal degree");
    if ((t - k) % 2 != 0)
        throw AuditError("weight-parity", "t-k = " + std::to_string(t - k) + " is odd");
    return (t - k) / 2;
}

// Integer affine self-map of index space, used to state the regrading and the
// page shifts symbolically. Composition and equality are exact, so an identity
// of maps checked once holds for every index at the same time.
struct AffineMap3 {
    std::array<std::array<int64_t, 3>, 3> linear{};
    std::array<int64_t, 3> shift{};

    static AffineMap3 identity() {
        AffineMap3 m;
        for (size_t i = 0; i < 3; ++i) m.linear[i][i] = 1;
        return m;
    }

    std::array<int64_t, 3> apply(const std::array<int64_t, 3>& v) const {
        std::array<int64_t, 3> out = shift;
        for (size_t i = 0; i < 3; ++i)
            for (size_t j = 0; j < 3; ++j) out[i] += linear[i][j] * v[j];
        return out;
    }

    // Composition x -> this(inner(x)).
    AffineMap3 after(const AffineMap3& inner) const {
        AffineMap3 out;
        out.shift = apply(inner.shift);
        for (size_t i = 0; i < 3; ++i)
            for (size_t j = 0; j < 3; ++j) {
                int64_t acc = 0;
                for (size_t k = 0; k < 3; ++k) acc += linear[i][k] * inner.linear[k][j];
                out.linear[i][j] = acc;
            }
        return out;
    }

    bool operator==(const AffineMap3&) const = default;
};

// The regrading is affine only after halving the graded internal degree
// (weight parity makes every populated T even), so the symbolic charts work
// in coordinates (S, T/2, K) on the graded side and (s, t, u) on the motivic
// side.
inline AffineMap3 index_chart() {
    AffineMap3 m;
    m.linear = {{{1, 0, 1}, {0, 2, 1}, {0, 1, 0}}};
    return m;
}

inline AffineMap3 index_chart_inverse() {
    AffineMap3 m;
    m.linear = {{{1, -1, 2}, {0, 0, 1}, {0, 1, -2}}};
    return m;
}

// Source-to-target index shift of the page-r differential on the graded side,
// in chart coordinates: (S, T/2, K) -> (S+1, T/2, K+r-1).
inline AffineMap3 graded_shift(int64_t r) {
    AffineMap3 m = AffineMap3::identity();
    m.shift = {1, 0, r - 1};
    return m;
}

// Same shift on the motivic side: (s, t, u) -> (s+r, t+r-1, u).
inline AffineMap3 classical_shift(int64_t r) {
    AffineMap3 m = AffineMap3::identity();
    m.shift = {r, r - 1, 0};
    return m;
}

// Runtime form of the regrading on actual slots. T must be even; the inverse
// direction additionally needs the motivic position to come from a slot.
inline MotivicTridegree kappa_index(const PageSlot& slot) {
    if (slot.t % 2 != 0)
        throw InputError("kappa_index: odd internal degree t=" + std::to_string(slot.t));
    return MotivicTridegree{static_cast<int64_t>(slot.s) + slot.k,
                            static_cast<int64_t>(slot.t) + slot.k,
                            static_cast<int64_t>(slot.t) / 2};
}

inline PageSlot kappa_inverse(const MotivicTridegree& idx) {
    if (idx.s < 0 || idx.t < 0 || idx.u < 0)
        throw InputError("kappa_inverse: negative index");
    if (idx.t < 2 * idx.u) throw InputError("kappa_inverse: weight exceeds half the degree");
    if (idx.s + 2 * idx.u < idx.t)
        throw InputError("kappa_inverse: index is not in the image of the regrading");
    return PageSlot{static_cast<uint32_t>(idx.s + 2 * idx.u - idx.t),
                    static_cast<uint32_t>(2 * idx.u), static_cast<uint32_t>(idx.t - 2 * idx.u)};
}

// A motivic page class: tau^n times the motivic lift of a classical class.
// The motivic page is the classical one base-changed along a polynomial tau
// line, so the classical class with its detection data is the whole content;
// tau multiplication only lowers the weight.
struct MotivicClass {
    uint32_t tau_power = 0;
    DetectionRecord base;

    MotivicTridegree index() const {
        return MotivicTridegree{static_cast<int64_t>(base.adams_s()),
                                static_cast<int64_t>(base.adams_t()),
                                static_cast<int64_t>(base.weight) - tau_power};
    }
};

// Image of a motivic class on the tau-quotient page, named through the
// regrading by the graded class that detects it.
struct QuotientClass {
    PageSlot slot;
    std::vector<uint32_t> coords;
    MotivicTridegree index;
};

// Setting tau to zero kills every positive tau power and sends a lift to the
// graded class detecting it.
inline std::optional<QuotientClass> psi_reduce(const MotivicClass& c) {
    if (c.tau_power > 0) return std::nullopt;
    PageSlot slot{c.base.s, c.base.t, c.base.k};
    return QuotientClass{slot, c.base.value, kappa_index(slot)};
}

// A classical slice class: bidegree plus a representing cochain.
struct AdamsClassRef {
    uint32_t s = 0;
    uint32_t t = 0;
    SparseVector rep;
};

// Inverting tau forgets the tau power and returns the classical class.
inline AdamsClassRef phi_invert(const MotivicClass& c) {
    return AdamsClassRef{c.base.adams_s(), c.base.adams_t(), c.base.adams_class};
}

// Verdict of the range guards at (s, k, r). The transfer statements hold when
// s < 2p-2 and r+k <= 2p-2, with s and k read off the detecting class; the
// nonpermanence statement needs only the first inequality. Outside its range
// the engine refuses rather than extrapolates: the guarded region is exactly
// where tau-torsion of exponent one forces the comparison, and the first
// failing page r = 2p-1-k is realized by an actual counterexample family.
enum class Verdict { InRange, OutOfRange };

struct GuardVerdict {
    uint32_t s = 0;
    uint32_t k = 0;
    uint32_t r = 0;
    uint32_t p = 0;
    Verdict verdict = Verdict::OutOfRange;
    std::vector<std::string> reasons;

    bool in_range() const { return verdict == Verdict::InRange; }
};

inline GuardVerdict range_guard(uint32_t s, uint32_t k, uint32_t r, uint32_t p) {
    if (!is_odd_prime(p)) throw InputError("range_guard needs an odd prime");
    GuardVerdict g{s, k, r, p, Verdict::InRange, {}};
    uint32_t bound = 2 * p - 2;
    if (s >= bound) {
        g.verdict = Verdict::OutOfRange;
        g.reasons.push_back("s = " + std::to_string(s) + " is not below " + std::to_string(bound));
    }
    if (r + k > bound) {
        g.verdict = Verdict::OutOfRange;
        g.reasons.push_back("r + k = " + std::to_string(r + k) + " exceeds " +
                            std::to_string(bound));
    }
    return g;
}

// Relaxed guard for the nonpermanence statement, which survives arbitrarily
// late pages as long as the detecting class sits in a low enough degree.
inline GuardVerdict nonpermanence_guard(uint32_t s, uint32_t k, uint32_t r, uint32_t p) {
    if (!is_odd_prime(p)) throw InputError("nonpermanence_guard needs an odd prime");
    GuardVerdict g{s, k, r, p, Verdict::InRange, {}};
    uint32_t bound = 2 * p - 2;
    if (s >= bound) {
        g.verdict = Verdict::OutOfRange;
        g.reasons.push_back("s = " + std::to_string(s) + " is not below " + std::to_string(bound));
    }
    return g;
}

// What a transfer record asserts about the classical Adams pages.
enum class TransferStatement {
    Differential,        // d_r of the detected class is detected by the stated value
    LeadingTermVanishes, // the value is zero: only the stated leading term is asserted to vanish
    Nonpermanence,       // the detected class supports a nonzero differential on some page <= r
    Refusal,             // guard out of range; nothing is asserted
};

// A certified classical statement produced from a graded differential, or the
// refusal to produce one. Degree bookkeeping: the classical source sits at
// (s+k, t+k), the asserted differential lands at (s+k+r, t+k+r-1), and the
// detecting value lives at graded slot (s+1, t, k+r-1). The assumptions list
// carries exactly the hypotheses the engine cannot check from its own data.
struct TransferRecord {
    std::string tag; // "secondary", "higher_page", or "nonpermanence"
    TransferStatement statement = TransferStatement::Refusal;
    DetectionRecord detection;
    DifferentialRecord source;
    GuardVerdict guard;
    uint32_t adams_r = 0;
    uint32_t target_s = 0;
    uint32_t target_t = 0;
    PageSlot detecting_slot;
    SparseVector detecting_class;
    std::vector<std::string> assumptions;
};

namespace detail {

inline SparseVector coords_to_vector(const std::vector<uint32_t>& coords, uint32_t p) {
    SparseVector v(p);
    for (size_t i = 0; i < coords.size(); ++i)
        if (coords[i]) v.add_term(static_cast<uint32_t>(i), coords[i]);
    return v;
}

// The differential must start exactly at the detecting class; a mismatch is
// caller confusion, not a mathematical finding.
inline void check_source_match(const DetectionRecord& detection, const DifferentialRecord& diff,
                               uint32_t p) {
    if (diff.page < 2) throw InputError("transfer: pages start at 2");
    PageSlot expect{detection.s, detection.t, detection.k};
    if (!(diff.source == expect))
        throw InputError("transfer: differential starts at (" + std::to_string(diff.source.s) +
                         "," + std::to_string(diff.source.t) + "," + std::to_string(diff.source.k) +
                         "), detection sits at (" + std::to_string(expect.s) + "," +
                         std::to_string(expect.t) + "," + std::to_string(expect.k) + ")");
    PageSlot target{detection.s + 1, detection.t, detection.k + diff.page - 1};
    if (!(diff.target == target))
        throw InputError("transfer: differential target is off the page grid");
    if (!(diff.source_class == coords_to_vector(detection.value, p)))
        throw InputError("transfer: differential source class differs from the detecting class");
}

} // namespace detail

// Produce the classical differential statement for a graded page-r
// differential on a detected class. In range, the record asserts that the
// classical class supports a page-r differential whose target is detected by
// the recorded value; a zero value only asserts that the leading term at the
// stated layer vanishes, which is strictly weaker than naming the target.
// Out of range, the record is a refusal that preserves the bookkeeping.
inline TransferRecord transfer(const DetectionRecord& detection, const DifferentialRecord& diff) {
    uint32_t p = detection.adams_class.prime();
    detail::check_source_match(detection, diff, p);
    uint32_t r = diff.page;

    TransferRecord rec;
    rec.tag = (r == 2) ? "secondary" : "higher_page";
    rec.detection = detection;
    rec.source = diff;
    rec.guard = range_guard(detection.s, detection.k, r, p);
    rec.adams_r = r;
    rec.target_s = detection.adams_s() + r;
    rec.target_t = detection.adams_t() + r - 1;
    rec.detecting_slot = diff.target;
    rec.detecting_class = diff.value;
    if (!rec.guard.in_range()) {
        rec.statement = TransferStatement::Refusal;
        return rec;
    }
    rec.statement = diff.value.is_zero() ? TransferStatement::LeadingTermVanishes
                                         : TransferStatement::Differential;
    if (r > 2)
        rec.assumptions.push_back("the classical class survives to page " + std::to_string(r));
    return rec;
}

// Produce the nonpermanence certificate: if the detecting class supports its
// first nonzero graded differential on page r and the degree guard holds, the
// detected classical class cannot survive past page r. No target is named.
// The first-nonzero hypothesis holds for every record the page driver emits,
// since a class must survive to page r before it can differentiate there.
inline TransferRecord nonpermanence(const DetectionRecord& detection,
                                    const DifferentialRecord& first_nonzero) {
    uint32_t p = detection.adams_class.prime();
    detail::check_source_match(detection, first_nonzero, p);
    if (first_nonzero.value.is_zero())
        throw InputError("nonpermanence needs a nonzero graded differential");
    uint32_t r = first_nonzero.page;

    TransferRecord rec;
    rec.tag = "nonpermanence";
    rec.detection = detection;
    rec.source = first_nonzero;
    rec.guard = nonpermanence_guard(detection.s, detection.k, r, p);
    rec.adams_r = r;
    rec.target_s = detection.adams_s() + r;
    rec.target_t = detection.adams_t() + r - 1;
    rec.detecting_slot = first_nonzero.target;
    rec.detecting_class = first_nonzero.value;
    rec.statement =
        rec.guard.in_range() ? TransferStatement::Nonpermanence : TransferStatement::Refusal;
    return rec;
}

} // namespace sseq
