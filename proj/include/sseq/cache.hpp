#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "sseq/chart.hpp"
#include "sseq/cobar.hpp"
#include "sseq/config.hpp"

// On-disk slice store. One file per computed cobar slice (basis, differential
// rows, subquotient representatives), in a plain text format with an fnv64
// checksum trailer. Files are keyed by prime and generator convention, so a
// store can be shared between runs with different windows; a rerun either
// gets a bit-exact copy of what it would have computed or a named integrity
// failure, never a silently stale answer.

namespace sseq {

// Letters serialize as "E" or "E:r1,r2" (exterior bitmask, then polynomial
// exponents when present); words join letters with '|' and the empty word is
// "-", which no letter can start with. All normal forms keep trailing zeros
// trimmed, so decoding reproduces the exact in-memory value.
inline std::string encode_letter(const SteenrodMonomial& m) {
    std::string out = std::to_string(m.E);
    if (!m.R.empty()) {
        out.push_back(':');
        for (size_t i = 0; i < m.R.size(); ++i) {
            if (i) out.push_back(',');
            out += std::to_string(m.R[i]);
        }
    }
    return out;
}

inline SteenrodMonomial decode_letter(const std::string& s) {
    SteenrodMonomial m;
    auto colon = s.find(':');
    m.E = detail::parse_u32(s.substr(0, colon));
    if (colon != std::string::npos)
        for (const auto& part : detail::split(s.substr(colon + 1), ','))
            m.R.push_back(detail::parse_u32(part));
    m.trim();
    return m;
}

inline std::string encode_word(const Word& w) {
    if (w.empty()) return "-";
    std::string out;
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) out.push_back('|');
        out += encode_letter(w[i]);
    }
    return out;
}

inline Word decode_word(const std::string& s) {
    if (s == "-") return {};
    Word w;
    for (const auto& part : detail::split(s, '|')) w.push_back(decode_letter(part));
    return w;
}

inline std::string encode_vmono(const VMonomial& m) {
    std::string out = std::to_string(m.v0);
    if (!m.alpha.empty()) {
        out.push_back('.');
        for (size_t i = 0; i < m.alpha.size(); ++i) {
            if (i) out.push_back(',');
            out += std::to_string(m.alpha[i]);
        }
    }
    return out;
}

inline VMonomial decode_vmono(const std::string& s) {
    VMonomial m;
    auto dot = s.find('.');
    m.v0 = detail::parse_u32(s.substr(0, dot));
    if (dot != std::string::npos)
        for (const auto& part : detail::split(s.substr(dot + 1), ','))
            m.alpha.push_back(detail::parse_u32(part));
    m.trim();
    return m;
}

struct AdamsSliceData {
    uint32_t s = 0;
    uint32_t t = 0;
    std::vector<Word> words;
    std::vector<SparseVector> rows;
    std::vector<SparseVector> reps;

    bool operator==(const AdamsSliceData&) const = default;
};

struct GradedSliceData {
    uint32_t s = 0;
    uint32_t t = 0;
    uint32_t k = 0;
    std::vector<NovElem> elems;
    std::vector<SparseVector> rows;
    std::vector<SparseVector> reps;

    bool operator==(const GradedSliceData&) const = default;
};

class SliceCache {
  public:
    SliceCache(std::string root, const WorkbenchConfig& cfg) : p_(cfg.prime) {
        if (root.empty()) throw InputError("cache root directory must not be empty");
        cfg.validate();
        // Slice contents depend only on the prime and the generator
        // convention, not on the window, so the directory key hashes just
        // those and runs with different windows share their slices.
        std::string key = "p=" + std::to_string(p_) +
                          ";generators=" + WorkbenchConfig::generator_tag();
        dir_ = std::filesystem::path(root) / ("sseq-" + hex64(fnv1a(key)));
        key_hash_ = hex64(fnv1a(key));
    }

    const std::filesystem::path& directory() const { return dir_; }

    std::filesystem::path adams_path(uint32_t s, uint32_t t) const {
        return dir_ / ("adams-s" + std::to_string(s) + "-t" + std::to_string(t) + ".rec");
    }

    std::filesystem::path graded_path(uint32_t s, uint32_t t, uint32_t k) const {
        return dir_ / ("graded-s" + std::to_string(s) + "-t" + std::to_string(t) + "-k" +
                       std::to_string(k) + ".rec");
    }

    static AdamsSliceData snapshot(AdamsCobar& cobar, uint32_t s, uint32_t t) {
        AdamsSliceData d;
        d.s = s;
        d.t = t;
        d.words = cobar.words(s, t);
        d.rows = cobar.differential_rows(s, t);
        d.reps = cobar.ext_basis(s, t);
        return d;
    }

    static GradedSliceData snapshot(NovikovCobar& cobar, uint32_t s, uint32_t t, uint32_t k) {
        GradedSliceData d;
        d.s = s;
        d.t = t;
        d.k = k;
        d.elems = cobar.basis(s, t, k);
        d.rows = cobar.differential_rows(s, t, k);
        d.reps = cobar.e2_basis(s, t, k);
        return d;
    }

    void store(const AdamsSliceData& d) const {
        std::string body = header("adams", d.s, d.t, std::nullopt);
        for (const auto& w : d.words) body += "w " + encode_word(w) + "\n";
        append_vectors(body, 'r', d.rows);
        append_vectors(body, 'e', d.reps);
        write_file(adams_path(d.s, d.t), body);
    }

    void store(const GradedSliceData& d) const {
        std::string body = header("graded", d.s, d.t, d.k);
        for (const auto& e : d.elems)
            body += "b " + encode_vmono(e.coeff) + " " + encode_word(e.word) + "\n";
        append_vectors(body, 'r', d.rows);
        append_vectors(body, 'e', d.reps);
        write_file(graded_path(d.s, d.t, d.k), body);
    }

    std::optional<AdamsSliceData> load_adams(uint32_t s, uint32_t t) const {
        auto lines = read_checked(adams_path(s, t), "adams", s, t, std::nullopt);
        if (!lines) return std::nullopt;
        AdamsSliceData d;
        d.s = s;
        d.t = t;
        for (const auto& line : *lines) {
            if (line.rfind("w ", 0) == 0)
                d.words.push_back(decode_word(line.substr(2)));
            else if (line.rfind("r ", 0) == 0)
                d.rows.push_back(decode_cached_vector(line.substr(2)));
            else if (line.rfind("e ", 0) == 0)
                d.reps.push_back(decode_cached_vector(line.substr(2)));
            else
                throw AuditError("cache-integrity", "unknown record line '" + line + "'");
        }
        if (d.rows.size() != d.words.size())
            throw AuditError("cache-integrity", "row count does not match basis size in " +
                                                    adams_path(s, t).string());
        return d;
    }

    std::optional<GradedSliceData> load_graded(uint32_t s, uint32_t t, uint32_t k) const {
        auto lines = read_checked(graded_path(s, t, k), "graded", s, t, k);
        if (!lines) return std::nullopt;
        GradedSliceData d;
        d.s = s;
        d.t = t;
        d.k = k;
        for (const auto& line : *lines) {
            if (line.rfind("b ", 0) == 0) {
                auto sp = line.find(' ', 2);
                if (sp == std::string::npos)
                    throw AuditError("cache-integrity", "bad basis line '" + line + "'");
                NovElem e;
                e.coeff = decode_vmono(line.substr(2, sp - 2));
                e.word = decode_word(line.substr(sp + 1));
                d.elems.push_back(std::move(e));
            } else if (line.rfind("r ", 0) == 0) {
                d.rows.push_back(decode_cached_vector(line.substr(2)));
            } else if (line.rfind("e ", 0) == 0) {
                d.reps.push_back(decode_cached_vector(line.substr(2)));
            } else {
                throw AuditError("cache-integrity", "unknown record line '" + line + "'");
            }
        }
        if (d.rows.size() != d.elems.size())
            throw AuditError("cache-integrity", "row count does not match basis size in " +
                                                    graded_path(s, t, k).string());
        return d;
    }

    // Load-or-build. On a hit the cached copy is returned as stored; on a
    // miss the slice is computed, stored, and returned.
    AdamsSliceData fetch(AdamsCobar& cobar, uint32_t s, uint32_t t) const {
        if (auto hit = load_adams(s, t)) return *hit;
        AdamsSliceData d = snapshot(cobar, s, t);
        store(d);
        return d;
    }

    GradedSliceData fetch(NovikovCobar& cobar, uint32_t s, uint32_t t, uint32_t k) const {
        if (auto hit = load_graded(s, t, k)) return *hit;
        GradedSliceData d = snapshot(cobar, s, t, k);
        store(d);
        return d;
    }

    // Compare a stored slice against a fresh computation. Returns false when
    // the file is absent; throws when present but different.
    bool verify(AdamsCobar& cobar, uint32_t s, uint32_t t) const {
        auto cached = load_adams(s, t);
        if (!cached) return false;
        if (!(*cached == snapshot(cobar, s, t)))
            throw AuditError("cache-consistency",
                             "stored slice differs from fresh computation at " +
                                 adams_path(s, t).string());
        return true;
    }

    bool verify(NovikovCobar& cobar, uint32_t s, uint32_t t, uint32_t k) const {
        auto cached = load_graded(s, t, k);
        if (!cached) return false;
        if (!(*cached == snapshot(cobar, s, t, k)))
            throw AuditError("cache-consistency",
                             "stored slice differs from fresh computation at " +
                                 graded_path(s, t, k).string());
        return true;
    }

  private:
    std::string header(const char* kind, uint32_t s, uint32_t t,
                       std::optional<uint32_t> k) const {
        std::string h = std::string("#sseq-cache v1 kind=") + kind +
                        " p=" + std::to_string(p_) + " s=" + std::to_string(s) +
                        " t=" + std::to_string(t);
        if (k) h += " k=" + std::to_string(*k);
        h += " config=" + key_hash_ + "\n";
        return h;
    }

    static void append_vectors(std::string& body, char tag,
                               const std::vector<SparseVector>& vs) {
        for (const auto& v : vs) {
            std::string enc = encode_vector(v);
            body += tag;
            body += ' ';
            body += enc.empty() ? "-" : enc;
            body += '\n';
        }
    }

    SparseVector decode_cached_vector(const std::string& s) const {
        try {
            return decode_vector(s == "-" ? "" : s, p_);
        } catch (const InputError& e) {
            throw AuditError("cache-integrity", e.what());
        }
    }

    void write_file(const std::filesystem::path& path, const std::string& body) const {
        std::filesystem::create_directories(dir_);
        std::string full = body + "#checksum " + hex64(fnv1a(body)) + "\n";
        // Write to a sibling and rename so a crash never leaves a torn file
        // that a later run would read as corruption.
        std::filesystem::path tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw InputError("cache file not writable: " + tmp.string());
            out << full;
        }
        std::filesystem::rename(tmp, path);
    }

    std::optional<std::vector<std::string>> read_checked(const std::filesystem::path& path,
                                                         const std::string& kind, uint32_t s,
                                                         uint32_t t,
                                                         std::optional<uint32_t> k) const {
        std::ifstream in(path, std::ios::binary);
        if (!in) return std::nullopt;
        std::string full((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        auto fail = [&](const std::string& why) -> void {
            throw AuditError("cache-integrity", path.string() + ": " + why);
        };
        auto mark = full.rfind("#checksum ");
        if (mark == std::string::npos || (mark != 0 && full[mark - 1] != '\n'))
            fail("missing checksum trailer");
        std::string body = full.substr(0, mark);
        std::string trailer = full.substr(mark);
        if (trailer.size() < 11 || trailer.back() != '\n') fail("truncated checksum trailer");
        std::string stated = trailer.substr(10, trailer.size() - 11);
        if (stated != hex64(fnv1a(body))) fail("checksum mismatch");

        std::vector<std::string> lines;
        std::string cur;
        for (char c : body) {
            if (c == '\n') {
                lines.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (!cur.empty()) fail("missing final newline");
        if (lines.empty()) fail("empty file");
        std::string want = "#sseq-cache v1 kind=" + kind + " p=" + std::to_string(p_) +
                           " s=" + std::to_string(s) + " t=" + std::to_string(t);
        if (k) want += " k=" + std::to_string(*k);
        want += " config=" + key_hash_;
        if (lines.front() != want) fail("header does not match the requested slice");
        lines.erase(lines.begin());
        return lines;
    }

    uint32_t p_;
    std::filesystem::path dir_;
    std::string key_hash_;
};

} // namespace sseq
