#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cobar.hpp"

// Page driver for the weight-graded spectral sequence of the I-adic
// filtration. Indexing follows the re-graded convention: the first page is
// E_2 = H(gr complex) and d_r moves (s,t,k) to (s+1,t,k+r-1).
//
// A differential is evaluated by the zig-zag: lift a page class to an
// integral cochain, take the honest differential, and walk the weight ladder
// upward. At each intermediate weight j the graded component must die in the
// page-(j-k+1) sense, which is a linear solve against the weight-j coboundary
// rows plus the graded differentials of stored witnesses from earlier pages
// (the Leray correction terms). The first weight that refuses to die is the
// differential; a cochain that dies exactly, to the working precision, is a
// permanence certificate.

namespace sseq {

struct PageWindow {
    uint32_t s_max = 0;
    uint32_t t_max = 0;
    uint32_t k_max = 0;
    uint32_t r_max = 2;
};

struct PageSlot {
    uint32_t s = 0;
    uint32_t t = 0;
    uint32_t k = 0;
    bool operator==(const PageSlot& o) const { return s == o.s && t == o.t && k == o.k; }
    bool operator<(const PageSlot& o) const {
        return std::tie(s, t, k) < std::tie(o.s, o.t, o.k);
    }
};

inline std::string to_string(const PageSlot& x) {
    return "(" + std::to_string(x.s) + "," + std::to_string(x.t) + "," + std::to_string(x.k) + ")";
}

// One certified nonzero differential. Classes are stored in first-page
// coordinates of their slot; the integral witness pair is kept by the driver
// and can be re-verified at any time.
struct DifferentialRecord {
    uint32_t page = 2;
    PageSlot source;
    PageSlot target;
    SparseVector source_class;
    SparseVector value;
    size_t witness = 0;
};

// A class whose corrected integral lift has an exactly vanishing differential
// at the working precision. That certifies d_r = 0 for every page the
// precision covers, namely r <= through_page.
struct PermanenceRecord {
    PageSlot slot;
    SparseVector source_class;
    uint32_t through_page = 0;
    size_t witness = 0;
};

class NovikovPages {
  public:
    struct Witness {
        IntegralCobar::Cochain lift;
        IntegralCobar::Cochain boundary;
    };

    NovikovPages(const SteenrodTables& st, const BPTables& bp, PageWindow window,
                 uint32_t precision = 0)
        : st_(st), bp_(bp), window_(window),
          precision_(precision ? precision : window.k_max + window.r_max + 2),
          nov_(st, bp), integral_(st, bp, precision_) {
        if (window.r_max < 2) throw InputError("page window ends before the first page");
        if (window.t_max > st.t_max())
            throw TruncationError("page window exceeds the coproduct table window");
        // Every page differential reads gr at weight k+r-1 <= k_max+r_max-1.
        if (precision_ <= window.k_max + window.r_max - 1)
            throw PrecisionError("precision " + std::to_string(precision_) +
                                 " cannot resolve weight " +
                                 std::to_string(window.k_max + window.r_max - 1));
    }

    uint32_t prime() const { return st_.prime(); }
    uint32_t precision() const { return precision_; }
    const PageWindow& window() const { return window_; }
    NovikovCobar& complex() { return nov_; }
    IntegralCobar& integral() { return integral_; }

    // Run every page in the window, then sweep survivors for permanence
    // certificates. Idempotent.
    void run() {
        if (ran_) return;
        ran_ = true;
        for (uint32_t s = 0; s <= window_.s_max; ++s)
            for (uint32_t t = 0; t <= window_.t_max; ++t)
                for (uint32_t k = 0; k <= window_.k_max; ++k)
                    init_slot({s, t, k});
        for (uint32_t r = 2; r <= window_.r_max; ++r) run_page(r);
        for (const auto& entry : states_) {
            dims_[std::make_tuple(entry.first, window_.r_max + 1)] =
                static_cast<uint32_t>(page_reps(entry.first).size());
        }
        sweep_permanence();
    }

    const std::vector<DifferentialRecord>& differentials() const { return records_; }
    const std::vector<PermanenceRecord>& permanence() const { return permanence_; }
    const Witness& witness(size_t i) const { return witnesses_.at(i); }

    // Dimension of E_r at a slot; r = r_max+1 is the final survivor count.
    uint32_t page_dimension(PageSlot slot, uint32_t r) const {
        auto it = dims_.find(std::make_tuple(slot, r));
        if (it == dims_.end()) throw InputError("page dimension outside the computed window");
        return it->second;
    }

    // The gr vector for a class given in first-page coordinates.
    SparseVector class_vector(PageSlot slot, const SparseVector& coords) {
        const auto& reps = nov_.e2_basis(slot.s, slot.t, slot.k);
        SparseVector out(prime());
        for (const auto& [i, c] : coords.entries()) {
            if (i >= reps.size()) throw InputError("class coordinate outside the page basis");
            out.axpy(c, reps[i]);
        }
        return out;
    }

  private:
    struct SlotState {
        std::vector<SparseVector> survivors; // page coords spanning Z_r
        std::vector<SparseVector> hit;       // page coords spanning B_r
    };

    struct PoolEntry {
        uint32_t source_k = 0;
        uint32_t target_weight = 0;
        size_t witness = 0;
    };

    void init_slot(PageSlot slot) {
        uint32_t dim = nov_.e2_dimension(slot.s, slot.t, slot.k);
        SlotState st;
        for (uint32_t i = 0; i < dim; ++i) {
            SparseVector v(prime());
            v.add_term(i, 1);
            st.survivors.push_back(std::move(v));
        }
        states_.emplace(slot, std::move(st));
    }

    std::vector<SparseVector> page_reps(PageSlot slot) {
        const SlotState& st = states_.at(slot);
        return subquotient_basis(st.survivors, st.hit, prime());
    }

    // Walk outcome: either the first weight whose graded component refuses to
    // die (with its component), or the corrected boundary's final state.
    struct WalkResult {
        std::optional<uint32_t> stuck_weight;
        SparseVector stuck_component;
        IntegralCobar::Cochain lift;
        IntegralCobar::Cochain boundary;
    };

    // Correct the lift of `z` so its differential vanishes through weight
    // `j_stop - 1`. Solvability at weight j uses the weight-j coboundaries
    // plus witnesses from pages before `page` only.
    WalkResult walk(PageSlot slot, const SparseVector& z, uint32_t j_stop) {
        WalkResult res{std::nullopt, SparseVector(prime()), integral_.lift(slot.s, slot.t, slot.k, z, nov_),
                       integral_.zero(slot.s + 1, slot.t)};
        res.boundary = integral_.differential(res.lift);
        for (uint32_t j = slot.k + 1; j < j_stop; ++j) {
            if (integral_.min_weight(res.boundary) >= precision_) break; // exactly zero
            if (integral_.min_weight(res.boundary) > j) continue;
            SparseVector g = integral_.gr_component(res.boundary, j, nov_);
            if (g.is_zero()) continue;

            // Assemble the span that must absorb g: coboundary rows from
            // (s,t,j) and graded leading terms of usable witnesses.
            std::vector<SparseVector> rows;
            std::vector<std::pair<bool, size_t>> origin; // (is_basis_row, index)
            const auto& drows = nov_.differential_rows(slot.s, slot.t, j);
            for (size_t i = 0; i < drows.size(); ++i) {
                rows.push_back(drows[i]);
                origin.emplace_back(true, i);
            }
            auto pit = pool_.find(std::make_pair(slot.s, slot.t));
            if (pit != pool_.end()) {
                for (const auto& e : pit->second) {
                    if (e.source_k <= slot.k || e.target_weight != j) continue;
                    rows.push_back(integral_.gr_component(witnesses_[e.witness].boundary, j, nov_));
                    origin.emplace_back(false, e.witness);
                }
            }
            auto sol = solve_in_span(rows, g, nov_.dimension(slot.s + 1, slot.t, j), prime());
            if (!sol) {
                res.stuck_weight = j;
                res.stuck_component = std::move(g);
                return res;
            }
            for (size_t i = 0; i < rows.size(); ++i) {
                uint32_t c = sol->at(static_cast<uint32_t>(i));
                if (c == 0) continue;
                int64_t neg = -static_cast<int64_t>(c);
                if (origin[i].first) {
                    SparseVector unit(prime());
                    unit.add_term(static_cast<uint32_t>(origin[i].second), c);
                    auto corr = integral_.lift(slot.s, slot.t, j, unit, nov_);
                    integral_.accumulate(res.lift, corr, -1);
                } else {
                    integral_.accumulate(res.lift, witnesses_[origin[i].second].lift, neg);
                }
            }
            res.boundary = integral_.differential(res.lift);
            if (integral_.min_weight(res.boundary) <= j)
                throw AuditError("page-correction", "weight-" + std::to_string(j) +
                                                        " component survived its correction");
        }
        return res;
    }

    void run_page(uint32_t r) {
        struct Update {
            PageSlot slot;
            std::vector<SparseVector> new_survivors;
            std::vector<std::pair<PageSlot, SparseVector>> images;
        };
        std::vector<Update> updates;

        for (const auto& entry : states_) {
            const PageSlot& slot = entry.first;
            auto reps = page_reps(slot);
            dims_[std::make_tuple(slot, r)] = static_cast<uint32_t>(reps.size());
            if (reps.empty()) continue;

            PageSlot target{slot.s + 1, slot.t, slot.k + r - 1};
            std::vector<SparseVector> values; // first-page coords at target
            for (const auto& x : reps) {
                SparseVector z = class_vector(slot, x);
                WalkResult w = walk(slot, z, slot.k + r - 1);
                if (w.stuck_weight)
                    throw AuditError("page-survival",
                                     "class at " + to_string(slot) + " stuck at weight " +
                                         std::to_string(*w.stuck_weight) + " on page " +
                                         std::to_string(r));
                SparseVector g(prime());
                if (integral_.min_weight(w.boundary) == slot.k + r - 1)
                    g = integral_.gr_component(w.boundary, slot.k + r - 1, nov_);
                SparseVector v(prime());
                if (!g.is_zero()) {
                    auto coords = nov_.class_coordinates(target.s, target.t, target.k, g);
                    if (!coords)
                        throw AuditError("page-structure",
                                         "differential value is not a graded cocycle class");
                    for (size_t i = 0; i < coords->size(); ++i)
                        if ((*coords)[i]) v.add_term(static_cast<uint32_t>(i), (*coords)[i]);
                }
                if (!v.is_zero()) {
                    size_t wit = witnesses_.size();
                    witnesses_.push_back(Witness{w.lift, w.boundary});
                    pool_[std::make_pair(slot.s, slot.t)].push_back(
                        PoolEntry{slot.k, slot.k + r - 1, wit});
                    records_.push_back(DifferentialRecord{r, slot, target, x, v, wit});
                    // The value must be a surviving class at the target.
                    if (states_.count(target)) {
                        EchelonSpan span(prime());
                        for (const auto& zv : states_.at(target).survivors) span.insert(zv);
                        if (!span.contains(v))
                            throw AuditError("page-structure",
                                             "differential value died before its page");
                    }
                }
                values.push_back(std::move(v));
            }

            // Kernel of the induced map on this page: reduce values modulo
            // classes already hit at the target, then solve.
            Update up{slot, {}, {}};
            EchelonSpan hit_span(prime());
            if (states_.count(target))
                for (const auto& b : states_.at(target).hit) hit_span.insert(b);
            std::vector<SparseVector> reduced;
            uint32_t target_dim = nov_.e2_dimension(target.s, target.t, target.k);
            for (const auto& v : values) reduced.push_back(hit_span.reduce(v));
            SparseMatrix m = AdamsCobar::transpose(reduced, static_cast<uint32_t>(reduced.size()),
                                                   target_dim, prime());
            std::vector<SparseVector> combos = kernel_basis(m);
            up.new_survivors = states_.at(slot).hit;
            for (const auto& c : combos) {
                SparseVector nz(prime());
                for (const auto& [i, ci] : c.entries()) nz.axpy(ci, reps[i]);
                if (!nz.is_zero()) up.new_survivors.push_back(std::move(nz));
            }
            for (size_t i = 0; i < values.size(); ++i)
                if (!values[i].is_zero()) up.images.emplace_back(target, values[i]);
            updates.push_back(std::move(up));
        }

        // Pages update in lockstep: kernels and images both belong to page r.
        for (auto& up : updates) {
            states_.at(up.slot).survivors = std::move(up.new_survivors);
            for (auto& [target, v] : up.images) {
                auto it = states_.find(target);
                if (it == states_.end()) continue; // beyond the slot window
                it->second.hit.push_back(std::move(v));
            }
        }
    }

    // After the last page, certify survivors whose corrected boundaries
    // vanish exactly. Correction failures beyond the computed pages are left
    // unclaimed; the witness pool cannot rule a later killer in or out.
    void sweep_permanence() {
        for (const auto& entry : states_) {
            const PageSlot& slot = entry.first;
            for (const auto& x : page_reps(slot)) {
                SparseVector z = class_vector(slot, x);
                WalkResult w = walk(slot, z, precision_);
                if (w.stuck_weight) continue;
                if (integral_.min_weight(w.boundary) < precision_) continue;
                size_t wit = witnesses_.size();
                witnesses_.push_back(Witness{w.lift, w.boundary});
                permanence_.push_back(
                    PermanenceRecord{slot, x, precision_ - slot.k, wit});
            }
        }
    }

    const SteenrodTables& st_;
    const BPTables& bp_;
    PageWindow window_;
    uint32_t precision_;
    NovikovCobar nov_;
    IntegralCobar integral_;
    bool ran_ = false;

    std::map<PageSlot, SlotState> states_;
    std::map<std::tuple<PageSlot, uint32_t>, uint32_t> dims_;
    std::map<std::pair<uint32_t, uint32_t>, std::vector<PoolEntry>> pool_;
    std::vector<Witness> witnesses_;
    std::vector<DifferentialRecord> records_;
    std::vector<PermanenceRecord> permanence_;
};

} // namespace sseq
