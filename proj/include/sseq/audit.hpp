#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "sseq/cess.hpp"
#include "sseq/cobar.hpp"
#include "sseq/steenrod.hpp"
#include "sseq/transfer.hpp"

// Named self-checks shared by the command line and the acceptance run. Each
// suite walks a window, throws AuditError with a stable check name on the
// first violation, and reports how many individual facts it confirmed, so a
// passing audit is a positive statement and not just the absence of a crash.

namespace sseq {

struct AuditEntry {
    std::string check;
    std::string scope;
    uint64_t checks = 0;
};

namespace detail {

struct MonoLess {
    bool operator()(const SteenrodMonomial& a, const SteenrodMonomial& b) const {
        if (a.E != b.E) return a.E < b.E;
        return a.R < b.R;
    }
};

using MonoTriple = std::tuple<SteenrodMonomial, SteenrodMonomial, SteenrodMonomial>;

struct MonoTripleLess {
    bool operator()(const MonoTriple& a, const MonoTriple& b) const {
        MonoLess less;
        if (!(std::get<0>(a) == std::get<0>(b))) return less(std::get<0>(a), std::get<0>(b));
        if (!(std::get<1>(a) == std::get<1>(b))) return less(std::get<1>(a), std::get<1>(b));
        return less(std::get<2>(a), std::get<2>(b));
    }
};

// Expand (D (x) 1)D(m) and (1 (x) D)D(m) as triple-tensor sums. The identity
// factor is even, so no sign enters either nesting.
inline std::map<MonoTriple, uint32_t, MonoTripleLess> nest_coproduct(const SteenrodTables& tab,
                                                                     const SteenrodMonomial& m,
                                                                     bool left) {
    std::map<MonoTriple, uint32_t, MonoTripleLess> out;
    Tensor2 d = tab.full_coproduct(m);
    for (const auto& [l, r, c] : d.terms()) {
        Tensor2 inner = tab.full_coproduct(left ? l : r);
        for (const auto& [a, b, c2] : inner.terms()) {
            MonoTriple key = left ? MonoTriple{a, b, r} : MonoTriple{l, a, b};
            uint32_t& slot = out[key];
            slot = (slot + c * c2) % tab.prime();
            if (slot == 0) out.erase(key);
        }
    }
    return out;
}

} // namespace detail

// Coassociativity and counit laws for every monomial in the window. The
// cobar differential is built from this coproduct, so these two laws are what
// d.d = 0 ultimately rests on.
inline AuditEntry audit_coproduct(const SteenrodTables& tab, uint32_t t_max) {
    AuditEntry entry{"coproduct", "p=" + std::to_string(tab.prime()) +
                                      " degrees<=" + std::to_string(t_max)};
    for (uint32_t d = 0; d <= t_max; ++d) {
        for (const auto& m : tab.monomials(d)) {
            if (!(detail::nest_coproduct(tab, m, true) == detail::nest_coproduct(tab, m, false)))
                throw AuditError("coproduct", "coassociativity fails on " + to_string(m));
            Tensor2 full = tab.full_coproduct(m);
            uint32_t lc = 0, rc = 0;
            for (const auto& [l, r, c] : full.terms()) {
                if (l.is_unit()) {
                    if (!(r == m))
                        throw AuditError("coproduct", "left counit term wrong on " + to_string(m));
                    lc = (lc + c) % tab.prime();
                }
                if (r.is_unit()) {
                    if (!(l == m))
                        throw AuditError("coproduct", "right counit term wrong on " + to_string(m));
                    rc = (rc + c) % tab.prime();
                }
            }
            if (lc != 1 || rc != 1)
                throw AuditError("coproduct", "counit law fails on " + to_string(m));
            entry.checks += 1;
        }
    }
    return entry;
}

// d.d = 0 on every basis element of every slice in the window.
inline AuditEntry audit_d_squared(AdamsCobar& cobar, uint32_t s_max, uint32_t t_max) {
    AuditEntry entry{"d-squared", "p=" + std::to_string(cobar.prime()) + " s<=" +
                                      std::to_string(s_max) + " t<=" + std::to_string(t_max)};
    for (uint32_t s = 0; s <= s_max; ++s) {
        for (uint32_t t = 0; t <= t_max; ++t) {
            const auto& rows = cobar.differential_rows(s, t);
            for (size_t i = 0; i < rows.size(); ++i) {
                SparseVector dd = cobar.apply_differential(s + 1, t, rows[i]);
                if (!dd.entries().empty())
                    throw AuditError("d-squared", "d.d nonzero on element " + std::to_string(i) +
                                                      " of slice (" + std::to_string(s) + "," +
                                                      std::to_string(t) + ")");
                entry.checks += 1;
            }
        }
    }
    return entry;
}

inline AuditEntry audit_d_squared(NovikovCobar& cobar, uint32_t s_max, uint32_t t_max,
                                  uint32_t k_max) {
    AuditEntry entry{"d-squared-graded",
                     "p=" + std::to_string(cobar.prime()) + " s<=" + std::to_string(s_max) +
                         " t<=" + std::to_string(t_max) + " k<=" + std::to_string(k_max)};
    for (uint32_t s = 0; s <= s_max; ++s) {
        for (uint32_t t = 0; t <= t_max; ++t) {
            for (uint32_t k = 0; k <= k_max; ++k) {
                const auto& rows = cobar.differential_rows(s, t, k);
                for (size_t i = 0; i < rows.size(); ++i) {
                    SparseVector dd = cobar.apply_differential(s + 1, t, k, rows[i]);
                    if (!dd.entries().empty())
                        throw AuditError("d-squared-graded",
                                         "d.d nonzero on element " + std::to_string(i) +
                                             " of slice (" + std::to_string(s) + "," +
                                             std::to_string(t) + "," + std::to_string(k) + ")");
                    entry.checks += 1;
                }
            }
        }
    }
    return entry;
}

// Layer-by-layer decomposition of every bidegree in the window; delegates the
// slice arithmetic to the splitting and counts the slices it survived.
inline AuditEntry audit_decomposition(Splitting& split, uint32_t s_max, uint32_t t_max) {
    AuditEntry entry{"decomposition",
                     "s<=" + std::to_string(s_max) + " t<=" + std::to_string(t_max)};
    for (uint32_t s = 0; s <= s_max; ++s) {
        for (uint32_t t = 0; t <= t_max; ++t) {
            split.audit_slice(s, t);
            entry.checks += 1;
        }
    }
    return entry;
}

// Every detection record in the window satisfies the weight formula, sits on
// a congruence-permitted layer, and names a nonzero first-page class.
inline AuditEntry audit_weight_formula(Splitting& split, uint32_t s_max, uint32_t t_max) {
    AuditEntry entry{"weight-formula",
                     "s<=" + std::to_string(s_max) + " t<=" + std::to_string(t_max)};
    for (uint32_t s = 0; s <= s_max; ++s) {
        for (uint32_t t = 0; t <= t_max; ++t) {
            for (const auto& rec : split.detect_slice(s, t)) {
                if (rec.adams_t() < rec.k || (rec.adams_t() - rec.k) % 2 != 0 ||
                    rec.weight != (rec.adams_t() - rec.k) / 2)
                    throw AuditError("weight-formula",
                                     "weight wrong at (" + std::to_string(s) + "," +
                                         std::to_string(t) + ") layer " + std::to_string(rec.k));
                if (rec.weight != motivic_weight(rec.adams_t(), rec.k))
                    throw AuditError("weight-formula",
                                     "weight disagrees with the graded formula at (" +
                                         std::to_string(s) + "," + std::to_string(t) + ")");
                bool zero = true;
                for (uint32_t c : rec.value) zero = zero && c == 0;
                if (zero)
                    throw AuditError("weight-formula", "detection with zero value at (" +
                                                           std::to_string(s) + "," +
                                                           std::to_string(t) + ")");
                entry.checks += 1;
            }
        }
    }
    return entry;
}

// The index regrading: chart-coordinate inverses compose to the identity, the
// page shifts intertwine symbolically for pages 2 through 6, and the slot
// maps round-trip on an exhaustive box.
inline AuditEntry audit_regrading(uint32_t s_max = 6, uint32_t u_max = 8, uint32_t k_max = 6) {
    AuditEntry entry{"regrading", "s<=" + std::to_string(s_max) + " u<=" + std::to_string(u_max) +
                                      " k<=" + std::to_string(k_max) + " pages 2..6"};
    if (!(index_chart_inverse().after(index_chart()) == AffineMap3::identity()) ||
        !(index_chart().after(index_chart_inverse()) == AffineMap3::identity()))
        throw AuditError("regrading", "chart coordinates do not invert");
    entry.checks += 2;
    for (int64_t r = 2; r <= 6; ++r) {
        if (!(index_chart().after(graded_shift(r)) == classical_shift(r).after(index_chart())))
            throw AuditError("regrading",
                             "page shifts fail to intertwine at r=" + std::to_string(r));
        entry.checks += 1;
    }
    for (uint32_t s = 0; s <= s_max; ++s) {
        for (uint32_t u = 0; u <= u_max; ++u) {
            for (uint32_t k = 0; k <= k_max; ++k) {
                PageSlot slot{s, 2 * u, k};
                MotivicTridegree m = kappa_index(slot);
                if (!(kappa_inverse(m) == slot))
                    throw AuditError("regrading", "slot round-trip fails at " + to_string(slot));
                for (uint32_t r = 2; r <= 6; ++r) {
                    PageSlot shifted{s + 1, 2 * u, k + r - 1};
                    MotivicTridegree lhs = kappa_index(shifted);
                    MotivicTridegree rhs{m.s + static_cast<int64_t>(r),
                                         m.t + static_cast<int64_t>(r) - 1, m.u};
                    if (!(lhs == rhs))
                        throw AuditError("regrading", "slot-level intertwining fails at " +
                                                          to_string(slot) + " r=" +
                                                          std::to_string(r));
                }
                entry.checks += 1;
            }
        }
    }
    return entry;
}

// Range guards: the counterexample family stays refused at every filtration,
// acceptance is monotone in page and layer, and the survival guard never
// refuses anything the full guard accepts.
inline AuditEntry audit_guards(uint32_t p, uint32_t s_max = 16) {
    AuditEntry entry{"guards", "p=" + std::to_string(p) + " s<=" + std::to_string(s_max)};
    uint32_t bound = 2 * p - 2;
    for (uint32_t s = 0; s <= s_max; ++s) {
        if (range_guard(s, 0, bound + 1, p).in_range())
            throw AuditError("guards", "page " + std::to_string(bound + 1) +
                                           " accepted at s=" + std::to_string(s));
        entry.checks += 1;
        for (uint32_t r = 2; r <= bound; ++r) {
            for (uint32_t k = 0; k <= bound; ++k) {
                GuardVerdict g = range_guard(s, k, r, p);
                bool expect = s < bound && r + k <= bound;
                if (g.in_range() != expect)
                    throw AuditError("guards", "verdict wrong at s=" + std::to_string(s) +
                                                   " k=" + std::to_string(k) +
                                                   " r=" + std::to_string(r));
                if (r + 1 + k <= 2 * p - 1 && range_guard(s, k, r + 1, p).in_range() &&
                    !g.in_range())
                    throw AuditError("guards", "acceptance not monotone in the page at s=" +
                                                   std::to_string(s));
                if (g.in_range() && !nonpermanence_guard(s, k, r, p).in_range())
                    throw AuditError("guards", "survival guard refuses an accepted case at s=" +
                                                   std::to_string(s));
                entry.checks += 1;
            }
        }
    }
    return entry;
}

} // namespace sseq
