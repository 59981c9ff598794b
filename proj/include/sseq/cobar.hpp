#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "bp.hpp"
#include "fp.hpp"
#include "sparse.hpp"
#include "steenrod.hpp"

// Reduced cobar complexes in three flavors sharing one convention:
//
//   d(c [a_1|...|a_s]) = [coaction of c | a_1 | ... | a_s]
//                        + sum_i (-1)^i c [a_1|...|D-bar(a_i)|...|a_s]
//
// The coefficient's reduced coaction inserts a letter at the front with sign
// +1 and letter i splits with sign (-1)^i; no internal-degree signs enter the
// differential (d^2 = 0 needs only coassociativity, which the suites check
// exhaustively). Koszul signs live entirely in the monomial products used by
// the coproduct tables.
//
// Flavors:
//   AdamsCobar    mod p over the full dual Steenrod algebra, trivial
//                 coefficients. The differential preserves the total tau
//                 count, so every slice splits into tau layers.
//   NovikovCobar  the weight-k layer of the I-adic associated graded: pure
//                 polynomial letters with coefficients in the weight-k line
//                 spanned by v_0^e v^alpha.
//   IntegralCobar p-typical cobar cochains mod p^N in the pushed-left normal
//                 form: letters are pure t-monomials and all v's sit in the
//                 front coefficient; the weight-k part of a cochain is
//                 literally a NovikovCobar vector.

namespace sseq {

using Word = std::vector<SteenrodMonomial>;

inline uint32_t word_degree(const Word& w, uint32_t p) {
    uint32_t d = 0;
    for (const auto& a : w) d += degree(a, p);
    return d;
}

inline uint32_t word_tau_count(const Word& w) {
    uint32_t k = 0;
    for (const auto& a : w) k += a.tau_count();
    return k;
}

inline std::string to_string(const Word& w) {
    if (w.empty()) return "[]";
    std::string out = "[";
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) out += '|';
        out += to_string(w[i]);
    }
    out += ']';
    return out;
}

// Letterwise canonical order; words of equal length only ever meet words of
// the same length here, but shorter-prefix-first keeps it a total order.
struct WordLess {
    uint32_t p = 3;
    bool operator()(const Word& a, const Word& b) const {
        MonoOrder ord{p};
        size_t n = std::min(a.size(), b.size());
        for (size_t i = 0; i < n; ++i) {
            if (a[i] != b[i]) return ord(a[i], b[i]);
        }
        return a.size() < b.size();
    }
};

namespace detail {

// Words of fixed length with letter degrees >= min_deg summing to t, letters
// drawn per degree from a bucket callback, in lexicographic canonical order.
template <typename Buckets>
void enumerate_words(uint32_t slots, uint32_t t, uint32_t min_deg, const Buckets& bucket,
                     Word& cur, std::vector<Word>& out) {
    if (slots == 0) {
        if (t == 0) out.push_back(cur);
        return;
    }
    if (t < min_deg * slots) return;
    uint32_t avail = t - min_deg * (slots - 1);
    for (uint32_t d = min_deg; d <= avail; ++d) {
        for (const auto& letter : bucket(d)) {
            cur.push_back(letter);
            enumerate_words(slots - 1, t - d, min_deg, bucket, cur, out);
            cur.pop_back();
        }
    }
}

} // namespace detail

// Shared slice scaffolding: basis enumeration, differential rows, kernels,
// boundaries and subquotient representatives, cached per slice key.
template <typename Key>
struct SliceHomology {
    std::map<Key, std::vector<SparseVector>> diff_rows;
    std::map<Key, std::vector<SparseVector>> cocycles;
    std::map<Key, std::vector<SparseVector>> ext;
};

class AdamsCobar {
  public:
    explicit AdamsCobar(const SteenrodTables& tables) : tab_(tables), p_(tables.prime()) {}

    uint32_t prime() const { return p_; }
    const SteenrodTables& tables() const { return tab_; }

    const std::vector<Word>& words(uint32_t s, uint32_t t) { return slice(s, t).words; }
    uint32_t dimension(uint32_t s, uint32_t t) {
        return static_cast<uint32_t>(slice(s, t).words.size());
    }
    size_t word_index(uint32_t s, uint32_t t, const Word& w) {
        const Slice& sl = slice(s, t);
        auto it = sl.index.find(w);
        if (it == sl.index.end()) throw InputError("word not in slice basis: " + to_string(w));
        return it->second;
    }

    // Image of each basis word under d: (s,t) -> (s+1,t), in codomain
    // coordinates. Row i belongs to basis word i.
    const std::vector<SparseVector>& differential_rows(uint32_t s, uint32_t t) {
        auto key = std::make_pair(s, t);
        auto it = diff_.find(key);
        if (it != diff_.end()) return it->second;
        const Slice& dom = slice(s, t);
        const Slice& cod = slice(s + 1, t);
        std::vector<SparseVector> rows;
        rows.reserve(dom.words.size());
        for (const auto& w : dom.words) {
            SparseVector img(p_);
            for (size_t i = 0; i < w.size(); ++i) {
                int sign = (i % 2 == 0) ? -1 : 1; // letter i is the (i+1)-st
                for (const auto& [l, r, c] : tab_.reduced_coproduct(w[i]).terms()) {
                    Word next;
                    next.reserve(w.size() + 1);
                    next.insert(next.end(), w.begin(), w.begin() + static_cast<ptrdiff_t>(i));
                    next.push_back(l);
                    next.push_back(r);
                    next.insert(next.end(), w.begin() + static_cast<ptrdiff_t>(i + 1), w.end());
                    auto jt = cod.index.find(next);
                    if (jt == cod.index.end())
                        throw AuditError("cobar-closure", "coproduct left the slice basis");
                    img.add_term(static_cast<uint32_t>(jt->second), sign * static_cast<int64_t>(c));
                }
            }
            rows.push_back(std::move(img));
        }
        return diff_.emplace(key, std::move(rows)).first->second;
    }

    SparseVector apply_differential(uint32_t s, uint32_t t, const SparseVector& x) {
        const auto& rows = differential_rows(s, t);
        SparseVector out(p_);
        for (const auto& [i, c] : x.entries()) {
            if (i >= rows.size()) throw InputError("cochain index outside slice");
            out.axpy(c, rows[i]);
        }
        return out;
    }

    const std::vector<SparseVector>& cocycle_basis(uint32_t s, uint32_t t) {
        auto key = std::make_pair(s, t);
        auto it = cocycles_.find(key);
        if (it != cocycles_.end()) return it->second;
        SparseMatrix m = transpose(differential_rows(s, t), dimension(s, t), dimension(s + 1, t));
        return cocycles_.emplace(key, kernel_basis(m)).first->second;
    }

    std::vector<SparseVector> boundary_basis(uint32_t s, uint32_t t) {
        std::vector<SparseVector> out;
        if (s == 0) return out;
        for (const auto& r : differential_rows(s - 1, t))
            if (!r.is_zero()) out.push_back(r);
        return out;
    }

    const std::vector<SparseVector>& ext_basis(uint32_t s, uint32_t t) {
        auto key = std::make_pair(s, t);
        auto it = ext_.find(key);
        if (it != ext_.end()) return it->second;
        auto reps = subquotient_basis(cocycle_basis(s, t), boundary_basis(s, t), p_);
        return ext_.emplace(key, std::move(reps)).first->second;
    }

    uint32_t ext_dimension(uint32_t s, uint32_t t) {
        return static_cast<uint32_t>(ext_basis(s, t).size());
    }

    // Distinct tau counts among basis words, ascending.
    std::vector<uint32_t> tau_layers(uint32_t s, uint32_t t) {
        std::vector<uint32_t> out;
        for (const auto& w : slice(s, t).words) {
            uint32_t k = word_tau_count(w);
            if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<uint32_t> tau_indices(uint32_t s, uint32_t t, uint32_t k) {
        std::vector<uint32_t> out;
        const Slice& sl = slice(s, t);
        for (size_t i = 0; i < sl.words.size(); ++i)
            if (word_tau_count(sl.words[i]) == k) out.push_back(static_cast<uint32_t>(i));
        return out;
    }

    // Dimension of the homology of the tau-count-k subcomplex in (s,t). The
    // differential preserves the layer, so this is an honest subcomplex.
    uint32_t tau_homology_dimension(uint32_t s, uint32_t t, uint32_t k) {
        uint32_t dim_k = static_cast<uint32_t>(tau_indices(s, t, k).size());
        if (dim_k == 0) return 0;
        uint32_t rank_out = layer_rank(s, t, k);
        uint32_t rank_in = s == 0 ? 0 : layer_rank(s - 1, t, k);
        return dim_k - rank_out - rank_in;
    }

    // Smallest tau layer in which the cocycle's component survives to a
    // nonzero homology class. Lower components can always be peeled off by a
    // coboundary because the differential never mixes layers.
    uint32_t ce_filtration(uint32_t s, uint32_t t, const SparseVector& z) {
        if (z.is_zero()) throw InputError("ce_filtration of the zero cochain");
        if (!apply_differential(s, t, z).is_zero())
            throw InputError("ce_filtration requires a cocycle");
        EchelonSpan bdry(p_);
        for (const auto& b : boundary_basis(s, t)) bdry.insert(b);
        for (uint32_t k : tau_layers(s, t)) {
            SparseVector comp = layer_component(s, t, k, z);
            if (comp.is_zero()) continue;
            if (!bdry.contains(comp)) return k;
        }
        throw InputError("ce_filtration of a coboundary");
    }

    SparseVector layer_component(uint32_t s, uint32_t t, uint32_t k, const SparseVector& z) {
        const Slice& sl = slice(s, t);
        SparseVector out(p_);
        for (const auto& [i, c] : z.entries())
            if (word_tau_count(sl.words[i]) == k) out.add_term(i, c);
        return out;
    }

    static SparseMatrix transpose(const std::vector<SparseVector>& rows, uint32_t dom,
                                  uint32_t cod, uint32_t p) {
        SparseMatrix m(p, dom);
        std::vector<SparseVector> cols(cod, SparseVector(p));
        for (size_t i = 0; i < rows.size(); ++i)
            for (const auto& [j, c] : rows[i].entries())
                cols[j].add_term(static_cast<uint32_t>(i), c);
        for (auto& r : cols) m.add_row(std::move(r));
        return m;
    }

  private:
    SparseMatrix transpose(const std::vector<SparseVector>& rows, uint32_t dom, uint32_t cod) {
        return transpose(rows, dom, cod, p_);
    }

    struct Slice {
        std::vector<Word> words;
        std::map<Word, size_t, WordLess> index;
    };

    const Slice& slice(uint32_t s, uint32_t t) {
        if (t > tab_.t_max())
            throw TruncationError("cobar slice t=" + std::to_string(t) + " outside table window");
        auto key = std::make_pair(s, t);
        auto it = slices_.find(key);
        if (it != slices_.end()) return it->second;
        Slice sl{{}, std::map<Word, size_t, WordLess>(WordLess{p_})};
        if (s == 0) {
            if (t == 0) sl.words.push_back({});
        } else {
            Word cur;
            detail::enumerate_words(
                s, t, 1, [&](uint32_t d) -> const std::vector<SteenrodMonomial>& { return tab_.monomials(d); },
                cur, sl.words);
        }
        for (size_t i = 0; i < sl.words.size(); ++i) sl.index.emplace(sl.words[i], i);
        return slices_.emplace(key, std::move(sl)).first->second;
    }

    // Rank of the layer-k part of d: (s,t) -> (s+1,t).
    uint32_t layer_rank(uint32_t s, uint32_t t, uint32_t k) {
        auto dom = tau_indices(s, t, k);
        if (dom.empty()) return 0;
        // Reindex codomain entries by layer; transpose restricted columns.
        auto cod = tau_indices(s + 1, t, k);
        std::map<uint32_t, uint32_t> cod_pos;
        for (size_t i = 0; i < cod.size(); ++i) cod_pos[cod[i]] = static_cast<uint32_t>(i);
        std::vector<SparseVector> cols(cod.size(), SparseVector(p_));
        const auto& rows = differential_rows(s, t);
        for (size_t di = 0; di < dom.size(); ++di) {
            for (const auto& [j, c] : rows[dom[di]].entries()) {
                auto it = cod_pos.find(j);
                if (it == cod_pos.end())
                    throw AuditError("tau-split", "differential left its tau layer");
                cols[it->second].add_term(static_cast<uint32_t>(di), c);
            }
        }
        SparseMatrix mt(p_, static_cast<uint32_t>(dom.size()));
        for (auto& r : cols) mt.add_row(std::move(r));
        return static_cast<uint32_t>(mt.rank());
    }

    const SteenrodTables& tab_;
    uint32_t p_;
    std::map<std::pair<uint32_t, uint32_t>, Slice> slices_;
    std::map<std::pair<uint32_t, uint32_t>, std::vector<SparseVector>> diff_;
    std::map<std::pair<uint32_t, uint32_t>, std::vector<SparseVector>> cocycles_;
    std::map<std::pair<uint32_t, uint32_t>, std::vector<SparseVector>> ext_;
};

// Basis element of the weight-k graded complex: a v_0^e v^alpha coefficient
// and a word of pure t-letters.
struct NovElem {
    VMonomial coeff;
    Word word;
    bool operator==(const NovElem& o) const { return coeff == o.coeff && word == o.word; }
};

inline std::string to_string(const NovElem& e) {
    return to_string(e.coeff) + " " + to_string(e.word);
}

class NovikovCobar {
  public:
    NovikovCobar(const SteenrodTables& st, const BPTables& bp)
        : st_(st), bp_(bp), p_(st.prime()) {
        if (bp.prime() != p_) throw InputError("NovikovCobar: table primes differ");
    }

    uint32_t prime() const { return p_; }
    const SteenrodTables& steenrod_tables() const { return st_; }
    const BPTables& bp_tables() const { return bp_; }

    const std::vector<NovElem>& basis(uint32_t s, uint32_t t, uint32_t k) {
        return slice(s, t, k).elems;
    }
    uint32_t dimension(uint32_t s, uint32_t t, uint32_t k) {
        return static_cast<uint32_t>(slice(s, t, k).elems.size());
    }
    size_t elem_index(uint32_t s, uint32_t t, uint32_t k, const VMonomial& coeff, const Word& w) {
        const Slice& sl = slice(s, t, k);
        auto it = sl.index.find(std::make_pair(coeff, w));
        if (it == sl.index.end())
            throw InputError("element not in graded slice basis: " + to_string(NovElem{coeff, w}));
        return it->second;
    }

    const std::vector<SparseVector>& differential_rows(uint32_t s, uint32_t t, uint32_t k) {
        auto key = std::make_tuple(s, t, k);
        auto it = diff_.find(key);
        if (it != diff_.end()) return it->second;
        const Slice& dom = slice(s, t, k);
        const Slice& cod = slice(s + 1, t, k);
        std::vector<SparseVector> rows;
        rows.reserve(dom.elems.size());
        for (const auto& e : dom.elems) {
            SparseVector img(p_);
            // Coefficient coaction inserts the new first letter, sign +1.
            for (const auto& term : bp_.gr_coaction(e.coeff)) {
                Word next;
                next.reserve(e.word.size() + 1);
                next.push_back(term.letter);
                next.insert(next.end(), e.word.begin(), e.word.end());
                add_elem(img, cod, term.target, next, term.coeff);
            }
            // Letter splits with sign (-1)^i.
            for (size_t i = 0; i < e.word.size(); ++i) {
                int sign = (i % 2 == 0) ? -1 : 1;
                for (const auto& [l, r, c] : st_.reduced_coproduct(e.word[i]).terms()) {
                    Word next;
                    next.reserve(e.word.size() + 1);
                    next.insert(next.end(), e.word.begin(), e.word.begin() + static_cast<ptrdiff_t>(i));
                    next.push_back(l);
                    next.push_back(r);
                    next.insert(next.end(), e.word.begin() + static_cast<ptrdiff_t>(i + 1), e.word.end());
                    add_elem(img, cod, e.coeff, next, sign * static_cast<int64_t>(c));
                }
            }
            rows.push_back(std::move(img));
        }
        return diff_.emplace(key, std::move(rows)).first->second;
    }

    SparseVector apply_differential(uint32_t s, uint32_t t, uint32_t k, const SparseVector& x) {
        const auto& rows = differential_rows(s, t, k);
        SparseVector out(p_);
        for (const auto& [i, c] : x.entries()) {
            if (i >= rows.size()) throw InputError("cochain index outside graded slice");
            out.axpy(c, rows[i]);
        }
        return out;
    }

    const std::vector<SparseVector>& cocycle_basis(uint32_t s, uint32_t t, uint32_t k) {
        auto key = std::make_tuple(s, t, k);
        auto it = cocycles_.find(key);
        if (it != cocycles_.end()) return it->second;
        SparseMatrix m = AdamsCobar::transpose(differential_rows(s, t, k), dimension(s, t, k),
                                               dimension(s + 1, t, k), p_);
        return cocycles_.emplace(key, kernel_basis(m)).first->second;
    }

    std::vector<SparseVector> boundary_basis(uint32_t s, uint32_t t, uint32_t k) {
        std::vector<SparseVector> out;
        if (s == 0) return out;
        for (const auto& r : differential_rows(s - 1, t, k))
            if (!r.is_zero()) out.push_back(r);
        return out;
    }

    // Representatives of the re-indexed first page: Ext over the polynomial
    // quotient with coefficients in the weight-k line.
    const std::vector<SparseVector>& e2_basis(uint32_t s, uint32_t t, uint32_t k) {
        auto key = std::make_tuple(s, t, k);
        auto it = e2_.find(key);
        if (it != e2_.end()) return it->second;
        auto reps = subquotient_basis(cocycle_basis(s, t, k), boundary_basis(s, t, k), p_);
        return e2_.emplace(key, std::move(reps)).first->second;
    }

    uint32_t e2_dimension(uint32_t s, uint32_t t, uint32_t k) {
        return static_cast<uint32_t>(e2_basis(s, t, k).size());
    }

    // Coordinates of a cocycle's class in the e2 basis, or nullopt when the
    // input is not in the cocycle span (a non-cocycle, typically).
    std::optional<std::vector<uint32_t>> class_coordinates(uint32_t s, uint32_t t, uint32_t k,
                                                           const SparseVector& z) {
        const auto& reps = e2_basis(s, t, k);
        std::vector<SparseVector> rows = reps;
        for (auto& b : boundary_basis(s, t, k)) rows.push_back(std::move(b));
        auto sol = solve_in_span(rows, z, dimension(s, t, k), p_);
        if (!sol) return std::nullopt;
        std::vector<uint32_t> out(reps.size(), 0);
        for (size_t i = 0; i < reps.size(); ++i) out[i] = sol->at(static_cast<uint32_t>(i));
        return out;
    }

  private:
    using WordKey = std::vector<SteenrodMonomial>;

    struct PairLess {
        uint32_t p = 3;
        bool operator()(const std::pair<VMonomial, Word>& a,
                        const std::pair<VMonomial, Word>& b) const {
            if (!(a.first == b.first)) return a.first < b.first;
            return WordLess{p}(a.second, b.second);
        }
    };

    struct Slice {
        std::vector<NovElem> elems;
        std::map<std::pair<VMonomial, Word>, size_t, PairLess> index;
    };

    void add_elem(SparseVector& img, const Slice& cod, const VMonomial& coeff, const Word& w,
                  int64_t c) {
        auto it = cod.index.find(std::make_pair(coeff, w));
        if (it == cod.index.end())
            throw AuditError("cobar-closure", "graded differential left the slice basis");
        img.add_term(static_cast<uint32_t>(it->second), c);
    }

    const Slice& slice(uint32_t s, uint32_t t, uint32_t k) {
        if (t > st_.t_max())
            throw TruncationError("graded slice t=" + std::to_string(t) + " outside table window");
        auto key = std::make_tuple(s, t, k);
        auto it = slices_.find(key);
        if (it != slices_.end()) return it->second;
        Slice sl{{}, std::map<std::pair<VMonomial, Word>, size_t, PairLess>(PairLess{p_})};
        uint32_t q = 2 * (p_ - 1);
        for (const auto& v : bp_.weight_basis(k, t)) {
            uint32_t vd = v.degree(p_);
            if (vd > t) continue;
            uint32_t rem = t - vd;
            std::vector<Word> ws;
            if (s == 0) {
                if (rem == 0) ws.push_back({});
            } else {
                Word cur;
                detail::enumerate_words(
                    s, rem, q,
                    [&](uint32_t d) -> const std::vector<SteenrodMonomial>& {
                        return st_.polynomial_monomials(d);
                    },
                    cur, ws);
            }
            for (auto& w : ws) sl.elems.push_back({v, std::move(w)});
        }
        for (size_t i = 0; i < sl.elems.size(); ++i)
            sl.index.emplace(std::make_pair(sl.elems[i].coeff, sl.elems[i].word), i);
        return slices_.emplace(key, std::move(sl)).first->second;
    }

    const SteenrodTables& st_;
    const BPTables& bp_;
    uint32_t p_;
    std::map<std::tuple<uint32_t, uint32_t, uint32_t>, Slice> slices_;
    std::map<std::tuple<uint32_t, uint32_t, uint32_t>, std::vector<SparseVector>> diff_;
    std::map<std::tuple<uint32_t, uint32_t, uint32_t>, std::vector<SparseVector>> cocycles_;
    std::map<std::tuple<uint32_t, uint32_t, uint32_t>, std::vector<SparseVector>> e2_;
};

// Integral cochains mod p^N in the pushed-left normal form. These are never
// organized into matrices; the engine only evaluates differentials, adds, and
// extracts graded components.
class IntegralCobar {
  public:
    IntegralCobar(const SteenrodTables& st, const BPTables& bp, uint32_t precision)
        : st_(st), bp_(bp), p_(st.prime()), n_(precision) {
        if (bp.prime() != p_) throw InputError("IntegralCobar: table primes differ");
        if (precision == 0) throw InputError("IntegralCobar: precision must be positive");
    }

    uint32_t prime() const { return p_; }
    uint32_t precision() const { return n_; }

    // Coefficient: a v-polynomial with truncated integer coefficients. The
    // v_0 slot of each key stays empty; powers of p live in the numbers.
    using Coefficient = std::map<VMonomial, TruncatedInteger>;

    struct Cochain {
        uint32_t s = 0;
        uint32_t t = 0;
        std::map<Word, Coefficient, WordLess> terms;

        bool is_zero() const { return terms.empty(); }
    };

    Cochain zero(uint32_t s, uint32_t t) const {
        return Cochain{s, t, std::map<Word, Coefficient, WordLess>(WordLess{p_})};
    }

    void add_term(Cochain& c, const Word& w, const VMonomial& alpha, const TruncatedInteger& x) const {
        if (alpha.v0 != 0) throw InputError("integral coefficients keep powers of p numeric");
        if (x.value() == 0) return;
        auto& coeff = c.terms.try_emplace(w, Coefficient{}).first->second;
        auto it = coeff.find(alpha);
        if (it == coeff.end()) {
            coeff.emplace(alpha, x);
        } else {
            TruncatedInteger sum = it->second + x;
            if (sum.value() == 0) coeff.erase(it);
            else it->second = sum;
        }
        if (coeff.empty()) c.terms.erase(w);
    }

    void accumulate(Cochain& into, const Cochain& other, int64_t scale) const {
        if (into.s != other.s || into.t != other.t)
            throw InputError("integral cochain degree mismatch");
        TruncatedInteger sc(scale, p_, n_);
        for (const auto& [w, coeff] : other.terms)
            for (const auto& [alpha, x] : coeff) add_term(into, w, alpha, x * sc);
    }

    // Lift a graded vector: v_0^e v^alpha [w] becomes p^e v^alpha [w].
    Cochain lift(uint32_t s, uint32_t t, uint32_t k, const SparseVector& x, NovikovCobar& nov) const {
        Cochain out = zero(s, t);
        const auto& basis = nov.basis(s, t, k);
        for (const auto& [i, c] : x.entries()) {
            const NovElem& e = basis[i];
            int64_t val = c;
            for (uint32_t j = 0; j < e.coeff.v0; ++j) val *= p_;
            VMonomial alpha;
            alpha.alpha = e.coeff.alpha;
            alpha.trim();
            add_term(out, e.word, alpha, TruncatedInteger(val, p_, n_));
        }
        return out;
    }

    Cochain differential(const Cochain& c) const {
        Cochain out = zero(c.s + 1, c.t);
        for (const auto& [w, coeff] : c.terms) {
            for (const auto& [alpha, x] : coeff) {
                // Front insertion from the coefficient's right-unit expansion.
                const VTPoly& eta = bp_.eta_r_monomial(alpha);
                for (const auto& [key, rc] : eta.terms()) {
                    if (key.t.empty()) continue; // the identity part of eta_R
                    Word next;
                    next.reserve(w.size() + 1);
                    next.push_back(t_monomial(key.t));
                    next.insert(next.end(), w.begin(), w.end());
                    VMonomial a2;
                    a2.alpha = key.alpha;
                    a2.trim();
                    add_term(out, next, a2, x * reduce_mod_pn(rc, p_, n_));
                }
                // Letter splits; the split's v-coefficient is pushed to the
                // front through the preceding letters.
                for (size_t i = 0; i < w.size(); ++i) {
                    int sign = (i % 2 == 0) ? -1 : 1;
                    VTTensor red = bp_.reduced_diagonal_monomial(w[i]);
                    for (const auto& [key, rc] : red.terms()) {
                        if (key.tl.empty() || key.tr.empty())
                            throw AuditError("cobar-letter", "reduced diagonal produced a unit letter");
                        TruncatedInteger base = x * reduce_mod_pn(rc, p_, n_);
                        if (sign < 0) base = -base;
                        VMonomial beta;
                        beta.alpha = key.alpha;
                        beta.trim();
                        Word prefix(w.begin(), w.begin() + static_cast<ptrdiff_t>(i));
                        for (auto& pushed : push_left(prefix, beta, base)) {
                            Word next;
                            next.reserve(w.size() + 1);
                            next.insert(next.end(), pushed.prefix.begin(), pushed.prefix.end());
                            next.push_back(t_monomial(key.tl));
                            next.push_back(t_monomial(key.tr));
                            next.insert(next.end(), w.begin() + static_cast<ptrdiff_t>(i + 1), w.end());
                            // The term keeps the coefficient it came in with.
                            add_term(out, next, mul(alpha, pushed.coeff), pushed.mult);
                        }
                    }
                }
            }
        }
        return out;
    }

    // Minimum I-adic weight over stored terms: valuation of the number plus
    // the v-exponent total. Zero cochain reports the precision ceiling.
    uint32_t min_weight(const Cochain& c) const {
        uint32_t best = n_;
        for (const auto& [w, coeff] : c.terms) {
            for (const auto& [alpha, x] : coeff) {
                uint32_t wt = x.p_valuation() + alpha.weight();
                if (wt < best) best = wt;
            }
        }
        return best;
    }

    // The weight-k part as a graded vector; terms below weight k are a
    // contract violation and terms above belong to deeper layers.
    SparseVector gr_component(const Cochain& c, uint32_t k, NovikovCobar& nov) const {
        if (k >= n_)
            throw PrecisionError("gr weight " + std::to_string(k) + " needs precision beyond N=" +
                                 std::to_string(n_));
        SparseVector out(p_);
        for (const auto& [w, coeff] : c.terms) {
            for (const auto& [alpha, x] : coeff) {
                uint32_t val = x.p_valuation();
                uint32_t wt = val + alpha.weight();
                if (wt < k)
                    throw AuditError("gr-extraction", "term of weight " + std::to_string(wt) +
                                                          " below requested layer " + std::to_string(k));
                if (wt != k) continue;
                VMonomial target;
                target.v0 = val;
                target.alpha = alpha.alpha;
                size_t idx = nov.elem_index(c.s, c.t, k, target, w);
                out.add_term(static_cast<uint32_t>(idx), x.unit_digit(val));
            }
        }
        return out;
    }

  private:
    struct Pushed {
        Word prefix;
        VMonomial coeff;
        TruncatedInteger mult;
    };

    // Move v^beta from just right of `prefix` to the front coefficient slot.
    // Crossing a letter trades the coefficient for its right-unit image and
    // merges the emitted t-part into that letter.
    std::vector<Pushed> push_left(const Word& prefix, const VMonomial& beta,
                                  const TruncatedInteger& mult) const {
        std::vector<Pushed> out;
        if (beta.alpha.empty() || prefix.empty()) {
            out.push_back(Pushed{prefix, beta, mult});
            return out;
        }
        Word rest(prefix.begin(), prefix.end() - 1);
        const SteenrodMonomial& last = prefix.back();
        const VTPoly& eta = bp_.eta_r_monomial(beta);
        for (const auto& [key, rc] : eta.terms()) {
            SteenrodMonomial merged = last;
            if (!key.t.empty()) {
                auto prod = mul(merged, t_monomial(key.t));
                merged = prod->second; // polynomial letters cannot vanish
            }
            VMonomial next;
            next.alpha = key.alpha;
            next.trim();
            TruncatedInteger m2 = mult * reduce_mod_pn(rc, p_, n_);
            if (m2.value() == 0) continue;
            for (auto& sub : push_left(rest, next, m2)) {
                sub.prefix.push_back(merged);
                out.push_back(std::move(sub));
            }
        }
        return out;
    }

    const SteenrodTables& st_;
    const BPTables& bp_;
    uint32_t p_;
    uint32_t n_;
};

// Dictionary between tau-leading Adams words and graded elements: a word
// whose first k letters are singleton taus and whose tail is polynomial maps
// to the v-monomial of those indices on the tail word. No sign is attached;
// within a fixed slice the implied normalization is a single global unit.
inline bool is_tau_leading(const Word& w, uint32_t k) {
    if (w.size() < k) return false;
    for (uint32_t i = 0; i < k; ++i)
        if (!w[i].single_tau().has_value()) return false;
    for (size_t i = k; i < w.size(); ++i)
        if (!w[i].is_polynomial()) return false;
    return true;
}

inline std::pair<VMonomial, Word> tau_dictionary(const Word& w, uint32_t k) {
    if (!is_tau_leading(w, k)) throw InputError("dictionary needs a tau-leading word");
    VMonomial v;
    for (uint32_t i = 0; i < k; ++i) {
        uint32_t idx = *w[i].single_tau();
        v = mul(v, v_gen(idx));
    }
    Word tail(w.begin() + k, w.end());
    return {v, tail};
}

// A word is tau-split when every letter is either a singleton tau or purely
// polynomial and exactly k of them are taus, wherever they sit. Tau-leading
// words are the special case with every tau in front. Letters mixing a tau
// with a polynomial factor disqualify the word; the dictionary has nothing
// sensible to send them to.
inline bool is_tau_split(const Word& w, uint32_t k) {
    uint32_t taus = 0;
    for (const auto& m : w) {
        if (m.single_tau().has_value()) ++taus;
        else if (!m.is_polynomial()) return false;
    }
    return taus == k;
}

// Signed dictionary on tau-split words: strip the tau letters into a
// v-monomial and keep the polynomial letters in their original order. The
// sign counts the polynomial letters standing left of each tau, so
// tau-leading words keep the unsigned value. That choice makes splitting a
// polynomial letter commute with the graded differential, which is what the
// transport solve needs from the enlarged support; the tau-coaction terms it
// cannot reconcile are exactly what the closedness constraint watches.
inline std::tuple<int, VMonomial, Word> tau_split_dictionary(const Word& w, uint32_t k) {
    if (!is_tau_split(w, k)) throw InputError("dictionary needs a tau-split word");
    VMonomial v;
    Word tail;
    uint32_t polys_passed = 0;
    uint32_t swaps = 0;
    for (const auto& m : w) {
        if (auto idx = m.single_tau()) {
            v = mul(v, v_gen(*idx));
            swaps += polys_passed;
        } else {
            tail.push_back(m);
            ++polys_passed;
        }
    }
    return {swaps % 2 == 0 ? 1 : -1, v, std::move(tail)};
}

// Result of transporting an Adams class into the graded complex: the tau
// layer it is detected in, the cohomologous tau-leading representative, and
// the graded cocycle it maps to. All three certificates are re-verified at
// construction time.
struct TransportResult {
    uint32_t filtration = 0;
    SparseVector adams_representative;
    SparseVector graded_cocycle;
};

// Find a representative of [z] whose detecting tau layer is supported on
// dictionary words and whose dictionary image is a graded cocycle. There is
// no formulaic chain map doing this (mixed letters break every naive
// projection), so it is set up as one joint linear solve. Tau-leading support
// is tried first; some deep classes have no tau-leading representative at
// all, and those fall back to the full tau-split support. Infeasibility on
// both is an audit failure, not a silent fallback.
inline TransportResult leading_term(AdamsCobar& adams, NovikovCobar& nov, uint32_t s, uint32_t t,
                                    const SparseVector& z) {
    uint32_t p = adams.prime();
    uint32_t k = adams.ce_filtration(s, t, z);
    if (k > s)
        throw AuditError("transport-layer",
                         "detecting layer exceeds homological degree; broken layer homology");
    const auto& words = adams.words(s, t);
    uint32_t nov_s = s - k;
    uint32_t nov_t = t - k;
    uint32_t nov_cod = nov.dimension(nov_s + 1, nov_t, k);

    // The strict phase wants a representative carried by tau-leading words
    // alone, so every other word of layer <= k is forced to vanish. The loose
    // phase only forces layers below k to vanish: the projection reads the
    // tau-split part of layer k and ignores mixed letters, which some deep
    // classes cannot shed. Lists stay in ascending index order so the solves
    // are deterministic.
    std::vector<uint32_t> leading, split_only;
    std::vector<uint32_t> zero_strict; // layers < k plus non-leading layer k
    std::vector<uint32_t> zero_loose;  // layers < k only
    for (uint32_t i = 0; i < words.size(); ++i) {
        uint32_t wk = word_tau_count(words[i]);
        if (wk < k) {
            zero_strict.push_back(i);
            zero_loose.push_back(i);
        } else if (wk == k) {
            if (is_tau_leading(words[i], k)) {
                leading.push_back(i);
            } else {
                zero_strict.push_back(i);
                if (is_tau_split(words[i], k)) split_only.push_back(i);
            }
        }
    }

    auto image = [&](const SparseVector& y, const std::vector<uint32_t>& dict_rows) {
        SparseVector img(p);
        for (uint32_t i : dict_rows) {
            uint32_t c = y.at(i);
            if (!c) continue;
            auto [sign, v, tail] = tau_split_dictionary(words[i], k);
            int64_t coef = sign > 0 ? static_cast<int64_t>(c) : -static_cast<int64_t>(c);
            img.add_term(static_cast<uint32_t>(nov.elem_index(nov_s, nov_t, k, v, tail)), coef);
        }
        return img;
    };

    // One solve phase: force zero_rows to vanish and the dictionary image of
    // dict_rows to be closed. Rows are phi(d w_j) for w_j in layers <= k of
    // (s-1,t); corrections from higher layers cannot touch any constraint.
    auto attempt = [&](const std::vector<uint32_t>& dict_rows,
                       const std::vector<uint32_t>& zero_rows) -> std::optional<SparseVector> {
        uint32_t n_constraints = static_cast<uint32_t>(zero_rows.size()) + nov_cod;
        auto phi = [&](const SparseVector& y) {
            SparseVector out(p);
            for (size_t r = 0; r < zero_rows.size(); ++r) {
                uint32_t c = y.at(zero_rows[r]);
                if (c) out.add_term(static_cast<uint32_t>(r), c);
            }
            SparseVector closed = nov.apply_differential(nov_s, nov_t, k, image(y, dict_rows));
            for (const auto& [j, c] : closed.entries())
                out.add_term(static_cast<uint32_t>(zero_rows.size()) + j, c);
            return out;
        };
        std::vector<SparseVector> rows;
        std::vector<uint32_t> var_index;
        if (s > 0) {
            const auto& prev = adams.words(s - 1, t);
            const auto& drows = adams.differential_rows(s - 1, t);
            for (uint32_t j = 0; j < prev.size(); ++j) {
                if (word_tau_count(prev[j]) > k) continue;
                rows.push_back(phi(drows[j]));
                var_index.push_back(j);
            }
        }
        auto sol = solve_in_span(rows, phi(z), n_constraints, p);
        if (!sol) return std::nullopt;
        SparseVector rep = z;
        if (s > 0) {
            const auto& drows = adams.differential_rows(s - 1, t);
            for (size_t i = 0; i < rows.size(); ++i) {
                uint32_t c = sol->at(static_cast<uint32_t>(i));
                if (c) rep.axpy(p - c, drows[var_index[i]]);
            }
        }
        // Reject solutions whose image dies in graded cohomology: the layer-k
        // part of any admissible representative is a nonzero layer class, so
        // a boundary image means this support was too small to see it.
        if (nov_s > 0) {
            const auto& bnd = nov.differential_rows(nov_s - 1, nov_t, k);
            if (solve_in_span(bnd, image(rep, dict_rows), nov.dimension(nov_s, nov_t, k), p))
                return std::nullopt;
        }
        return rep;
    };

    std::vector<uint32_t> dict_rows = leading;
    const std::vector<uint32_t>* zero_used = &zero_strict;
    auto rep = attempt(leading, zero_strict);
    if (!rep) {
        dict_rows.insert(dict_rows.end(), split_only.begin(), split_only.end());
        std::sort(dict_rows.begin(), dict_rows.end());
        zero_used = &zero_loose;
        rep = attempt(dict_rows, zero_loose);
    }
    if (!rep)
        throw AuditError("transport-infeasible",
                         "no tau-split representative with closed dictionary image");

    // Certify every claim the result makes.
    SparseVector img = image(*rep, dict_rows);
    for (uint32_t i : *zero_used)
        if (rep->at(i) != 0) throw AuditError("transport-support", "representative escapes support");
    if (img.is_zero())
        throw AuditError("transport-degenerate", "dictionary image of a nonzero class vanished");
    if (!nov.apply_differential(nov_s, nov_t, k, img).is_zero())
        throw AuditError("transport-cocycle", "dictionary image is not closed");
    if (!adams.apply_differential(s, t, *rep).is_zero())
        throw AuditError("transport-cocycle", "representative is not closed");

    return TransportResult{k, std::move(*rep), std::move(img)};
}

} // namespace sseq
