#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <string>

#include "sseq/fp.hpp"

// Run configuration for the workbench. A config names everything that can
// change a computed byte: the prime, the window, the working precision, and
// the generator convention baked into the tables. Its canonical string (and
// the hash derived from it) keys every cache entry and stamps every
// interchange file, so artifacts from mismatched configurations cannot be
// silently mixed.

namespace sseq {

struct WorkbenchConfig {
    uint32_t prime = 3;
    uint32_t s_max = 8;
    uint32_t t_max = 26;
    uint32_t k_max = 6;
    uint32_t r_max = 2;
    // 0 means derive the default k_max + r_max + 2; an explicit value below
    // that is accepted with a warning by the CLI, refused nowhere.
    uint32_t precision = 0;
    std::string cache_dir;
    std::string format = "tsv"; // or "json-lines"

    uint32_t effective_precision() const {
        return precision != 0 ? precision : k_max + r_max + 2;
    }

    void validate() const {
        if (!is_odd_prime(prime))
            throw InputError("config: prime " + std::to_string(prime) + " is not an odd prime");
        if (r_max < 2) throw InputError("config: r_max must be at least 2");
        if (format != "tsv" && format != "json-lines")
            throw InputError("config: format must be tsv or json-lines, got " + format);
    }

    // The generator convention is part of the identity of every number the
    // workbench produces; a different choice of polynomial generators would
    // change coproducts, witnesses, and charts wholesale.
    static const char* generator_tag() { return "hazewinkel"; }

    std::string canonical_string() const {
        return "p=" + std::to_string(prime) + ";smax=" + std::to_string(s_max) +
               ";tmax=" + std::to_string(t_max) + ";kmax=" + std::to_string(k_max) +
               ";rmax=" + std::to_string(r_max) +
               ";precision=" + std::to_string(effective_precision()) +
               ";generators=" + generator_tag();
    }
};

// FNV-1a, the usual 64-bit parameters. Used for config keys and cache
// integrity lines; not cryptographic and not meant to be.
inline uint64_t fnv1a(const std::string& data) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

inline std::string config_hash(const WorkbenchConfig& cfg) {
    return hex64(fnv1a(cfg.canonical_string()));
}

// Environment default for the cache directory; lowest precedence, applied
// only when nothing else set one.
inline void apply_environment(WorkbenchConfig& cfg) {
    if (!cfg.cache_dir.empty()) return;
    if (const char* dir = std::getenv("SSEQ_CACHE_DIR")) cfg.cache_dir = dir;
}

} // namespace sseq
