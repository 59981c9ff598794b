#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "fp.hpp"

// Deterministic sparse linear algebra over F_p. Reduction uses first-nonzero
// pivoting in column order and normalizes every leading entry to 1, so the
// reduced forms, kernel bases and subquotient representatives are canonical:
// the same input always yields bit-identical output, and the choices are
// documented here rather than left to container iteration order.

namespace sseq {

// Sorted (index, residue) pairs; residues are nonzero and reduced mod p.
class SparseVector {
  public:
    SparseVector() : p_(3) {}
    explicit SparseVector(uint32_t p) : p_(p) {}

    uint32_t prime() const { return p_; }
    bool is_zero() const { return ent_.empty(); }
    size_t term_count() const { return ent_.size(); }
    const std::vector<std::pair<uint32_t, uint32_t>>& entries() const { return ent_; }

    uint32_t at(uint32_t idx) const {
        auto it = std::lower_bound(ent_.begin(), ent_.end(), idx,
                                   [](const auto& e, uint32_t i) { return e.first < i; });
        return (it != ent_.end() && it->first == idx) ? it->second : 0;
    }

    // First nonzero position, or nullopt for the zero vector.
    std::optional<uint32_t> leading_index() const {
        if (ent_.empty()) return std::nullopt;
        return ent_.front().first;
    }

    void add_term(uint32_t idx, int64_t coeff) {
        uint32_t c = reduce(coeff);
        if (c == 0) return;
        auto it = std::lower_bound(ent_.begin(), ent_.end(), idx,
                                   [](const auto& e, uint32_t i) { return e.first < i; });
        if (it != ent_.end() && it->first == idx) {
            uint32_t s = (it->second + c) % p_;
            if (s == 0) ent_.erase(it);
            else it->second = s;
        } else {
            ent_.insert(it, {idx, c});
        }
    }

    // this += scale * other, single merge pass.
    void axpy(uint32_t scale, const SparseVector& other) {
        if (scale % p_ == 0 || other.ent_.empty()) return;
        std::vector<std::pair<uint32_t, uint32_t>> out;
        out.reserve(ent_.size() + other.ent_.size());
        size_t i = 0, j = 0;
        while (i < ent_.size() || j < other.ent_.size()) {
            if (j == other.ent_.size() || (i < ent_.size() && ent_[i].first < other.ent_[j].first)) {
                out.push_back(ent_[i++]);
            } else if (i == ent_.size() || other.ent_[j].first < ent_[i].first) {
                uint32_t c = static_cast<uint32_t>((static_cast<uint64_t>(scale) * other.ent_[j].second) % p_);
                if (c != 0) out.push_back({other.ent_[j].first, c});
                ++j;
            } else {
                uint64_t c = ent_[i].second + static_cast<uint64_t>(scale) * other.ent_[j].second;
                uint32_t r = static_cast<uint32_t>(c % p_);
                if (r != 0) out.push_back({ent_[i].first, r});
                ++i; ++j;
            }
        }
        ent_ = std::move(out);
    }

    void scale(uint32_t c) {
        c %= p_;
        if (c == 0) { ent_.clear(); return; }
        if (c == 1) return;
        for (auto& e : ent_) e.second = static_cast<uint32_t>((static_cast<uint64_t>(e.second) * c) % p_);
    }

    // Scale so the leading entry becomes 1.
    void normalize() {
        if (ent_.empty()) return;
        scale(static_cast<uint32_t>(detail::inverse_mod(ent_.front().second, p_)));
    }

    bool operator==(const SparseVector& o) const { return p_ == o.p_ && ent_ == o.ent_; }

  private:
    uint32_t reduce(int64_t c) const {
        int64_t r = c % static_cast<int64_t>(p_);
        return static_cast<uint32_t>(r < 0 ? r + p_ : r);
    }
    uint32_t p_;
    std::vector<std::pair<uint32_t, uint32_t>> ent_;
};

// Row-sparse matrix over F_p with an explicit column count (rows may be fewer
// than entries suggest; empty rows are legal and preserved).
class SparseMatrix {
  public:
    SparseMatrix() : p_(3), ncols_(0) {}
    SparseMatrix(uint32_t p, uint32_t ncols) : p_(p), ncols_(ncols) {}

    uint32_t prime() const { return p_; }
    uint32_t ncols() const { return ncols_; }
    size_t nrows() const { return rows_.size(); }
    const SparseVector& row(size_t i) const { return rows_[i]; }
    const std::vector<SparseVector>& rows() const { return rows_; }

    void add_row(SparseVector v) {
        if (v.prime() != p_) throw InputError("SparseMatrix: row prime mismatch");
        rows_.push_back(std::move(v));
    }

    // In-place reduced row echelon form. Column sweep left to right; among the
    // not-yet-used rows the first (lowest index) with a nonzero entry in the
    // current column becomes the pivot; pivots are scaled to 1 and eliminated
    // from every other row. Returns the pivot columns in ascending order.
    std::vector<uint32_t> rref() {
        std::vector<uint32_t> pivots;
        size_t next = 0;
        for (uint32_t col = 0; col < ncols_ && next < rows_.size(); ++col) {
            size_t sel = rows_.size();
            for (size_t r = next; r < rows_.size(); ++r) {
                if (rows_[r].at(col) != 0) { sel = r; break; }
            }
            if (sel == rows_.size()) continue;
            std::swap(rows_[next], rows_[sel]);
            rows_[next].scale(static_cast<uint32_t>(detail::inverse_mod(rows_[next].at(col), p_)));
            for (size_t r = 0; r < rows_.size(); ++r) {
                if (r == next) continue;
                uint32_t c = rows_[r].at(col);
                if (c != 0) rows_[r].axpy(p_ - c, rows_[next]);
            }
            pivots.push_back(col);
            ++next;
        }
        // Drop the zero rows that collected at the bottom.
        rows_.resize(next);
        return pivots;
    }

    size_t rank() const {
        SparseMatrix copy = *this;
        return copy.rref().size();
    }

    bool operator==(const SparseMatrix& o) const {
        return p_ == o.p_ && ncols_ == o.ncols_ && rows_ == o.rows_;
    }

  private:
    uint32_t p_;
    uint32_t ncols_;
    std::vector<SparseVector> rows_;
};

// Kernel of the linear map "row vector x |-> x placed against columns", i.e.
// solutions of A x = 0 where rows of A are the constraints. One basis vector
// per pivot-free column, in ascending column order, each normalized so its
// first nonzero entry is 1.
inline std::vector<SparseVector> kernel_basis(const SparseMatrix& a) {
    SparseMatrix r = a;
    std::vector<uint32_t> pivots = r.rref();
    std::vector<bool> is_pivot(a.ncols(), false);
    for (uint32_t c : pivots) is_pivot[c] = true;

    std::vector<SparseVector> basis;
    for (uint32_t free = 0; free < a.ncols(); ++free) {
        if (is_pivot[free]) continue;
        SparseVector v(a.prime());
        v.add_term(free, 1);
        for (size_t i = 0; i < pivots.size(); ++i) {
            uint32_t c = r.row(i).at(free);
            if (c != 0) v.add_term(pivots[i], -static_cast<int64_t>(c));
        }
        v.normalize();
        basis.push_back(std::move(v));
    }
    return basis;
}

// Echelon accumulator for membership tests and reduction against a growing
// span. Rows are kept reduced with leading 1s, indexed by leading position.
class EchelonSpan {
  public:
    explicit EchelonSpan(uint32_t p) : p_(p) {}

    // Fully reduce v against the span; the remainder (possibly zero) is returned.
    SparseVector reduce(SparseVector v) const {
        while (auto lead = v.leading_index()) {
            auto it = std::lower_bound(lead_.begin(), lead_.end(), *lead);
            if (it == lead_.end() || *it != *lead) break;
            size_t pos = static_cast<size_t>(it - lead_.begin());
            v.axpy(p_ - v.at(*lead), rows_[pos]);
        }
        // Clear any further entries that match deeper leads.
        bool changed = true;
        while (changed && !v.is_zero()) {
            changed = false;
            for (size_t i = 0; i < lead_.size(); ++i) {
                uint32_t c = v.at(lead_[i]);
                if (c != 0) { v.axpy(p_ - c, rows_[i]); changed = true; }
            }
        }
        return v;
    }

    bool contains(const SparseVector& v) const { return reduce(v).is_zero(); }

    // Insert (reducing first); returns false if v was already in the span.
    bool insert(SparseVector v) {
        v = reduce(std::move(v));
        if (v.is_zero()) return false;
        v.normalize();
        uint32_t lead = *v.leading_index();
        // Keep existing rows reduced against the newcomer.
        for (size_t i = 0; i < rows_.size(); ++i) {
            uint32_t c = rows_[i].at(lead);
            if (c != 0) rows_[i].axpy(p_ - c, v);
        }
        auto it = std::lower_bound(lead_.begin(), lead_.end(), lead);
        size_t pos = static_cast<size_t>(it - lead_.begin());
        lead_.insert(it, lead);
        rows_.insert(rows_.begin() + static_cast<ptrdiff_t>(pos), std::move(v));
        return true;
    }

    size_t dim() const { return rows_.size(); }
    const std::vector<SparseVector>& rows() const { return rows_; }

  private:
    uint32_t p_;
    std::vector<uint32_t> lead_;     // leading indices, ascending
    std::vector<SparseVector> rows_; // parallel to lead_
};

// Representatives of span(cycles) / span(boundaries). Precondition: every
// boundary lies in the span of the cycles (the complexes guarantee it; a
// violation means a broken differential and is reported as an audit failure).
// Representatives are chosen greedily in the given cycle order, reduced
// against the echelonized boundaries and the previously chosen ones, and
// normalized to leading coefficient 1.
inline std::vector<SparseVector> subquotient_basis(const std::vector<SparseVector>& cycles,
                                                   const std::vector<SparseVector>& boundaries,
                                                   uint32_t p) {
    EchelonSpan cycle_span(p);
    for (const auto& z : cycles) cycle_span.insert(z);
    for (const auto& b : boundaries) {
        if (!cycle_span.contains(b))
            throw AuditError("subquotient-containment", "boundary escapes the cycle span");
    }
    EchelonSpan used(p);
    for (const auto& b : boundaries) used.insert(b);
    std::vector<SparseVector> reps;
    for (const auto& z : cycles) {
        SparseVector r = used.reduce(z);
        if (r.is_zero()) continue;
        r.normalize();
        used.insert(r);
        reps.push_back(std::move(r));
    }
    return reps;
}

// Particular solution x of sum_i x_i * rows[i] = target, i.e. target expressed
// in the row span; free coordinates are set to zero. nullopt if inconsistent.
// Deterministic: echelonizes [rows | e_i] bookkeeping columns.
inline std::optional<SparseVector> solve_in_span(const std::vector<SparseVector>& rows,
                                                 const SparseVector& target,
                                                 uint32_t ncols, uint32_t p) {
    // Augment each row with a tracking unit vector to recover coefficients.
    uint32_t aug = ncols;
    SparseMatrix m(p, ncols + static_cast<uint32_t>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        SparseVector r = rows[i];
        if (r.prime() != p) throw InputError("solve_in_span: prime mismatch");
        r.add_term(aug + static_cast<uint32_t>(i), 1);
        m.add_row(std::move(r));
    }
    // Echelonize only over the first ncols columns: emulate by running rref on
    // a matrix whose tracked columns are beyond every real column.
    std::vector<uint32_t> pivots;
    {
        // Manual sweep: same policy as SparseMatrix::rref but stopping the
        // column scan at ncols so tracking columns never become pivots.
        std::vector<SparseVector> rs;
        for (size_t i = 0; i < m.nrows(); ++i) rs.push_back(m.row(i));
        size_t next = 0;
        for (uint32_t col = 0; col < ncols && next < rs.size(); ++col) {
            size_t sel = rs.size();
            for (size_t r = next; r < rs.size(); ++r)
                if (rs[r].at(col) != 0) { sel = r; break; }
            if (sel == rs.size()) continue;
            std::swap(rs[next], rs[sel]);
            rs[next].scale(static_cast<uint32_t>(detail::inverse_mod(rs[next].at(col), p)));
            for (size_t r = 0; r < rs.size(); ++r) {
                if (r == next) continue;
                uint32_t c = rs[r].at(col);
                if (c != 0) rs[r].axpy(p - c, rs[next]);
            }
            pivots.push_back(col);
            ++next;
        }
        // Reduce the target by pivot rows; whatever remains must be zero.
        SparseVector rem = target;
        SparseVector coeffs(p);
        for (size_t i = 0; i < pivots.size(); ++i) {
            uint32_t c = rem.at(pivots[i]);
            if (c == 0) continue;
            rem.axpy(p - c, rs[i]);
            // rs[i] carries tracking entries telling how it was assembled.
            for (const auto& e : rs[i].entries()) {
                if (e.first >= aug)
                    coeffs.add_term(e.first - aug, static_cast<int64_t>(static_cast<uint64_t>(c) * e.second % p));
            }
        }
        // rem may still hold tracking-column residue from the pivot rows; only
        // the real columns decide consistency.
        for (const auto& e : rem.entries())
            if (e.first < ncols) return std::nullopt;
        return coeffs;
    }
}

} // namespace sseq
