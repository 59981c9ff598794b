#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "sseq/cobar.hpp"

// Splitting of the mod-p Ext slice by tau count, and the detection map that
// names each Adams class by a graded class on the weight pages. The tau count
// of a word is congruent to its internal degree mod q = 2(p-1), so each slice
// breaks into finitely many layers; the decomposition audit checks that the
// layer dimensions computed on the A_*-side (tau subcomplexes of the mod-p
// cobar complex) add up to the slice dimension computed on the P_*-side
// (weight pages of the graded cobar complex). The two sides share no linear
// algebra, so agreement cross-validates the whole stack.

namespace sseq {

// Layer indices that can carry homology in Adams bidegree (s,t): congruent to
// t mod q, and at most min(s,t). Words with more tau letters than s exist
// (single letters can hold several taus), but their layers are exact; the
// audit below checks that instead of assuming it.
inline std::vector<uint32_t> c_set(uint32_t s, uint32_t t, uint32_t p) {
    if (!is_odd_prime(p)) throw InputError("c_set needs an odd prime");
    uint32_t q = 2 * (p - 1);
    std::vector<uint32_t> out;
    for (uint32_t i = t % q; i <= s && i <= t; i += q) out.push_back(i);
    return out;
}

// One Adams class named by its leading graded class. The Adams class lives at
// bidegree (s+k, t+k); the detecting class lives on the weight-k page at
// (s, t, k). The weight field is the motivic weight of any tau-leading
// representative word, (adams t - k)/2 = t/2; it is recomputed and checked by
// consumers, so it is stored rather than derived on demand.
struct DetectionRecord {
    uint32_t s = 0;
    uint32_t t = 0;
    uint32_t k = 0;
    SparseVector adams_class;
    std::vector<uint32_t> value;
    uint32_t weight = 0;

    uint32_t adams_s() const { return s + k; }
    uint32_t adams_t() const { return t + k; }
};

// The decomposition audit and the detection map over a pair of complexes.
// Holds references: callers own the complexes and may share them with the
// page driver. All methods are queries; the underlying complexes cache their
// slices, so repeated audits are cheap.
class Splitting {
  public:
    Splitting(AdamsCobar& adams, NovikovCobar& graded)
        : adams_(adams), graded_(graded), p_(adams.prime()) {
        if (graded.prime() != p_) throw InputError("Splitting: complex primes differ");
    }

    uint32_t prime() const { return p_; }

    // Per-layer dimensions of the graded pages under (s,t): i maps to
    // dim e2(s-i, t-i, i), with zero summands dropped. The total over the
    // layer set must equal the mod-p Ext dimension; a mismatch means one of
    // the two cobar complexes is wrong, which no caller can recover from.
    std::map<uint32_t, uint32_t> decompose(uint32_t s, uint32_t t) {
        std::map<uint32_t, uint32_t> dims;
        uint32_t total = 0;
        for (uint32_t i : c_set(s, t, p_)) {
            uint32_t d = graded_.e2_dimension(s - i, t - i, i);
            if (d > 0) dims[i] = d;
            total += d;
        }
        uint32_t ext = adams_.ext_dimension(s, t);
        if (total != ext)
            throw AuditError("decomposition",
                             "layer total " + std::to_string(total) + " != ext dimension " +
                                 std::to_string(ext) + " at (" + std::to_string(s) + "," +
                                 std::to_string(t) + ")");
        return dims;
    }

    // Layer-by-layer refinement of decompose: each tau subcomplex of the
    // Adams slice must have the homology of the weight page it corresponds
    // to, and layers outside the congruence window must be exact. Checks
    // every layer that appears on either side.
    void audit_slice(uint32_t s, uint32_t t) {
        decompose(s, t);
        uint32_t q = 2 * (p_ - 1);
        std::vector<uint32_t> cs = c_set(s, t, p_);
        std::vector<uint32_t> layers = adams_.tau_layers(s, t);
        for (uint32_t k : layers) {
            if (k % q != t % q)
                throw AuditError("decomposition", "tau layer " + std::to_string(k) +
                                                      " breaks the degree congruence at (" +
                                                      std::to_string(s) + "," + std::to_string(t) +
                                                      ")");
        }
        std::vector<uint32_t> all = layers;
        all.insert(all.end(), cs.begin(), cs.end());
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        for (uint32_t k : all) {
            bool has_words = std::binary_search(layers.begin(), layers.end(), k);
            bool in_set = std::binary_search(cs.begin(), cs.end(), k);
            uint32_t lhs = has_words ? adams_.tau_homology_dimension(s, t, k) : 0;
            uint32_t rhs = in_set ? graded_.e2_dimension(s - k, t - k, k) : 0;
            if (lhs != rhs)
                throw AuditError("decomposition",
                                 "layer " + std::to_string(k) + " at (" + std::to_string(s) + "," +
                                     std::to_string(t) + "): tau homology " + std::to_string(lhs) +
                                     " != page dimension " + std::to_string(rhs));
        }
    }

    // Runs the slice audit over the whole rectangle. Throwing on first
    // failure is deliberate: a single mismatch poisons every later
    // conclusion, so there is nothing useful to report past it.
    void audit_window(uint32_t s_max, uint32_t t_max) {
        for (uint32_t t = 0; t <= t_max; ++t)
            for (uint32_t s = 0; s <= s_max; ++s) audit_slice(s, t);
    }

    // Name a nonzero Adams class at (s,t) by its leading graded class: find
    // the detecting layer k, move the class to a tau-leading representative,
    // and read off coordinates on the weight-k page. The image class is
    // nonzero by construction (a vanishing image would mean the detecting
    // layer was wrong); both failure modes are audit failures, not results.
    DetectionRecord detect(uint32_t s, uint32_t t, const SparseVector& z) {
        TransportResult tr = leading_term(adams_, graded_, s, t, z);
        uint32_t k = tr.filtration;
        std::vector<uint32_t> cs = c_set(s, t, p_);
        if (!std::binary_search(cs.begin(), cs.end(), k))
            throw AuditError("detection", "layer " + std::to_string(k) +
                                              " escapes the congruence set at (" +
                                              std::to_string(s) + "," + std::to_string(t) + ")");
        auto coords = graded_.class_coordinates(s - k, t - k, k, tr.graded_cocycle);
        if (!coords)
            throw AuditError("detection", "transported image is not a page class");
        bool nonzero = false;
        for (uint32_t c : *coords) nonzero = nonzero || c != 0;
        if (!nonzero)
            throw AuditError("detection", "transported image class vanished");
        if ((t - k) % 2 != 0)
            throw AuditError("detection", "odd weight degree t-k at (" + std::to_string(s) + "," +
                                              std::to_string(t) + "), layer " + std::to_string(k));
        DetectionRecord rec;
        rec.s = s - k;
        rec.t = t - k;
        rec.k = k;
        rec.adams_class = z;
        rec.value = std::move(*coords);
        rec.weight = (t - k) / 2;
        return rec;
    }

    // Detection records for every basis class of the slice, in basis order.
    std::vector<DetectionRecord> detect_slice(uint32_t s, uint32_t t) {
        std::vector<DetectionRecord> out;
        const auto& basis = adams_.ext_basis(s, t);
        out.reserve(basis.size());
        for (const auto& rep : basis) out.push_back(detect(s, t, rep));
        return out;
    }

  private:
    AdamsCobar& adams_;
    NovikovCobar& graded_;
    uint32_t p_;
};

} // namespace sseq
