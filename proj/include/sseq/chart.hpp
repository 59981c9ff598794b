#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sseq/algnov.hpp"
#include "sseq/cess.hpp"
#include "sseq/config.hpp"
#include "sseq/transfer.hpp"

// Chart interchange: the line-delimited record format every command reads and
// writes, plus the SVG renderer. One record is one fact (a class, a
// differential, a detection, a transfer statement, an audit result); a file
// is a one-line version/config header followed by records. Both encodings
// (tab-separated and json-lines) are deterministic functions of the record
// list, so identical runs produce identical bytes and a loaded file re-emits
// itself unchanged.

namespace sseq {

struct ChartRecord {
    std::string kind; // class | differential | detection | transfer | audit
    std::string seq;  // adams | algnov | cess | ctau
    std::vector<int64_t> degree;
    std::vector<std::string> names;
    std::map<std::string, std::string> payload;

    bool operator==(const ChartRecord&) const = default;
};

namespace detail {

inline bool known_kind(const std::string& k) {
    return k == "class" || k == "differential" || k == "detection" || k == "transfer" ||
           k == "audit";
}

inline bool known_seq(const std::string& s) {
    return s == "adams" || s == "algnov" || s == "cess" || s == "ctau";
}

inline void check_record(const ChartRecord& r) {
    if (!known_kind(r.kind)) throw InputError("chart record kind unknown: " + r.kind);
    if (!known_seq(r.seq)) throw InputError("chart record sequence tag unknown: " + r.seq);
    for (const auto& n : r.names)
        if (n.empty() || n.find_first_of("\t\n,") != std::string::npos)
            throw InputError("chart record name unencodable: " + n);
    for (const auto& [k, v] : r.payload) {
        if (k.empty() || k.find_first_of("\t\n;=") != std::string::npos)
            throw InputError("chart payload key unencodable: " + k);
        if (v.find_first_of("\t\n;") != std::string::npos)
            throw InputError("chart payload value unencodable: " + v);
    }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline int64_t parse_int(const std::string& s) {
    size_t used = 0;
    int64_t v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        throw InputError("chart file: bad integer '" + s + "'");
    }
    if (used != s.size()) throw InputError("chart file: bad integer '" + s + "'");
    return v;
}

inline uint32_t parse_u32(const std::string& s) {
    int64_t v = parse_int(s);
    if (v < 0 || v > 0xffffffffll) throw InputError("chart file: value out of range '" + s + "'");
    return static_cast<uint32_t>(v);
}

} // namespace detail

// Sparse coordinate vectors travel as "index:coeff" pairs joined by commas;
// the zero vector is the empty string.
inline std::string encode_vector(const SparseVector& v) {
    std::string out;
    for (const auto& [i, c] : v.entries()) {
        if (!out.empty()) out.push_back(',');
        out += std::to_string(i) + ":" + std::to_string(c);
    }
    return out;
}

inline SparseVector decode_vector(const std::string& s, uint32_t p) {
    SparseVector v(p);
    if (s.empty()) return v;
    for (const auto& part : detail::split(s, ',')) {
        auto bits = detail::split(part, ':');
        if (bits.size() != 2) throw InputError("chart file: bad vector entry '" + part + "'");
        v.add_term(detail::parse_u32(bits[0]), detail::parse_int(bits[1]));
    }
    return v;
}

// Dense coordinate lists (page-class values) travel as comma-joined digits.
inline std::string encode_coords(const std::vector<uint32_t>& coords) {
    std::string out;
    for (size_t i = 0; i < coords.size(); ++i) {
        if (i) out.push_back(',');
        out += std::to_string(coords[i]);
    }
    return out;
}

inline std::vector<uint32_t> decode_coords(const std::string& s) {
    std::vector<uint32_t> out;
    if (s.empty()) return out;
    for (const auto& part : detail::split(s, ',')) out.push_back(detail::parse_u32(part));
    return out;
}

inline std::string encode_slot(const PageSlot& slot) {
    return std::to_string(slot.s) + "," + std::to_string(slot.t) + "," + std::to_string(slot.k);
}

inline PageSlot decode_slot(const std::string& s) {
    auto parts = detail::split(s, ',');
    if (parts.size() != 3) throw InputError("chart file: bad slot '" + s + "'");
    return PageSlot{detail::parse_u32(parts[0]), detail::parse_u32(parts[1]),
                    detail::parse_u32(parts[2])};
}

// Record names sit in a comma-separated column, so degrees inside a name use
// colons instead.
inline std::string name_slot(const PageSlot& slot) {
    return std::to_string(slot.s) + ":" + std::to_string(slot.t) + ":" + std::to_string(slot.k);
}

inline std::string name_bidegree(uint32_t s, uint32_t t) {
    return std::to_string(s) + ":" + std::to_string(t);
}

// A chart file: the generating configuration plus the records, in order.
struct ChartDocument {
    WorkbenchConfig config;
    std::vector<ChartRecord> records;

    void write(std::ostream& os) const {
        config.validate();
        if (config.format == "tsv")
            write_tsv(os);
        else
            write_jsonl(os);
    }

    static ChartDocument read(std::istream& is) {
        std::string first;
        if (!std::getline(is, first)) throw InputError("chart file: empty input");
        if (first.rfind("#sseq-chart ", 0) == 0) return read_tsv(first, is);
        if (!first.empty() && first.front() == '{') return read_jsonl(first, is);
        throw InputError("chart file: unrecognized header");
    }

  private:
    static constexpr const char* list_sentinel = "-";

    void write_tsv(std::ostream& os) const {
        os << "#sseq-chart v1 format=tsv prime=" << config.prime << " smax=" << config.s_max
           << " tmax=" << config.t_max << " kmax=" << config.k_max << " rmax=" << config.r_max
           << " precision=" << config.effective_precision()
           << " generators=" << WorkbenchConfig::generator_tag() << "\n";
        for (const auto& r : records) {
            detail::check_record(r);
            os << r.kind << '\t' << r.seq << '\t';
            if (r.degree.empty()) {
                os << list_sentinel;
            } else {
                for (size_t i = 0; i < r.degree.size(); ++i)
                    os << (i ? "," : "") << r.degree[i];
            }
            os << '\t';
            if (r.names.empty()) {
                os << list_sentinel;
            } else {
                for (size_t i = 0; i < r.names.size(); ++i) os << (i ? "," : "") << r.names[i];
            }
            os << '\t';
            if (r.payload.empty()) {
                os << list_sentinel;
            } else {
                bool sep = false;
                for (const auto& [k, v] : r.payload) {
                    if (sep) os << ';';
                    os << k << '=' << v;
                    sep = true;
                }
            }
            os << '\n';
        }
    }

    void write_jsonl(std::ostream& os) const {
        nlohmann::json head;
        head["sseq_chart"] = "v1";
        head["format"] = "json-lines";
        head["prime"] = config.prime;
        head["smax"] = config.s_max;
        head["tmax"] = config.t_max;
        head["kmax"] = config.k_max;
        head["rmax"] = config.r_max;
        head["precision"] = config.effective_precision();
        head["generators"] = WorkbenchConfig::generator_tag();
        os << head.dump() << "\n";
        for (const auto& r : records) {
            detail::check_record(r);
            nlohmann::json j;
            j["kind"] = r.kind;
            j["seq"] = r.seq;
            j["degree"] = r.degree;
            j["names"] = r.names;
            j["payload"] = r.payload;
            os << j.dump() << "\n";
        }
    }

    static void apply_header_pair(ChartDocument& doc, const std::string& key,
                                  const std::string& val) {
        if (key == "format") {
            doc.config.format = val;
        } else if (key == "prime") {
            doc.config.prime = detail::parse_u32(val);
        } else if (key == "smax") {
            doc.config.s_max = detail::parse_u32(val);
        } else if (key == "tmax") {
            doc.config.t_max = detail::parse_u32(val);
        } else if (key == "kmax") {
            doc.config.k_max = detail::parse_u32(val);
        } else if (key == "rmax") {
            doc.config.r_max = detail::parse_u32(val);
        } else if (key == "precision") {
            doc.config.precision = detail::parse_u32(val);
        } else if (key == "generators") {
            if (val != WorkbenchConfig::generator_tag())
                throw InputError("chart file built with generator convention '" + val +
                                 "', this build uses '" + WorkbenchConfig::generator_tag() + "'");
        } else {
            throw InputError("chart header: unknown field '" + key + "'");
        }
    }

    static ChartDocument read_tsv(const std::string& header, std::istream& is) {
        ChartDocument doc;
        auto tokens = detail::split(header, ' ');
        if (tokens.size() < 2 || tokens[1] != "v1")
            throw InputError("chart file: unsupported version");
        for (size_t i = 2; i < tokens.size(); ++i) {
            auto eq = tokens[i].find('=');
            if (eq == std::string::npos)
                throw InputError("chart header: bad token '" + tokens[i] + "'");
            apply_header_pair(doc, tokens[i].substr(0, eq), tokens[i].substr(eq + 1));
        }
        if (doc.config.format != "tsv") throw InputError("chart header: format tag mismatch");
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) throw InputError("chart file: blank record line");
            auto fields = detail::split(line, '\t');
            if (fields.size() != 5)
                throw InputError("chart file: expected 5 fields, got " +
                                 std::to_string(fields.size()));
            ChartRecord r;
            r.kind = fields[0];
            r.seq = fields[1];
            if (fields[2] != list_sentinel)
                for (const auto& d : detail::split(fields[2], ','))
                    r.degree.push_back(detail::parse_int(d));
            if (fields[3] != list_sentinel) r.names = detail::split(fields[3], ',');
            if (fields[4] != list_sentinel) {
                for (const auto& kv : detail::split(fields[4], ';')) {
                    auto eq = kv.find('=');
                    if (eq == std::string::npos)
                        throw InputError("chart file: bad payload entry '" + kv + "'");
                    r.payload[kv.substr(0, eq)] = kv.substr(eq + 1);
                }
            }
            detail::check_record(r);
            doc.records.push_back(std::move(r));
        }
        return doc;
    }

    static ChartDocument read_jsonl(const std::string& header, std::istream& is) {
        ChartDocument doc;
        nlohmann::json head;
        try {
            head = nlohmann::json::parse(header);
        } catch (const nlohmann::json::exception& e) {
            throw InputError(std::string("chart file: bad json header: ") + e.what());
        }
        if (!head.contains("sseq_chart") || head["sseq_chart"] != "v1")
            throw InputError("chart file: unsupported version");
        for (const auto& [key, val] : head.items()) {
            if (key == "sseq_chart") continue;
            apply_header_pair(doc, key,
                              val.is_string() ? val.get<std::string>() : val.dump());
        }
        if (doc.config.format != "json-lines")
            throw InputError("chart header: format tag mismatch");
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) throw InputError("chart file: blank record line");
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                throw InputError(std::string("chart file: bad json record: ") + e.what());
            }
            ChartRecord r;
            r.kind = j.at("kind").get<std::string>();
            r.seq = j.at("seq").get<std::string>();
            r.degree = j.at("degree").get<std::vector<int64_t>>();
            r.names = j.at("names").get<std::vector<std::string>>();
            r.payload = j.at("payload").get<std::map<std::string, std::string>>();
            detail::check_record(r);
            doc.records.push_back(std::move(r));
        }
        return doc;
    }
};

// Builders from engine records. Degree fields follow the owning sequence:
// adams records carry (s,t), graded records (s,t,k).

inline ChartRecord chart_from_differential(const DifferentialRecord& d) {
    ChartRecord r;
    r.kind = "differential";
    r.seq = "algnov";
    r.degree = {d.source.s, d.source.t, d.source.k};
    r.names = {"d" + std::to_string(d.page) + "(" + name_slot(d.source) + ")"};
    r.payload["page"] = std::to_string(d.page);
    r.payload["target"] = encode_slot(d.target);
    r.payload["source_class"] = encode_vector(d.source_class);
    r.payload["value"] = encode_vector(d.value);
    r.payload["witness"] = std::to_string(d.witness);
    return r;
}

inline DifferentialRecord differential_from_chart(const ChartRecord& r, uint32_t p) {
    if (r.kind != "differential" || r.seq != "algnov")
        throw InputError("expected a graded differential record");
    if (r.degree.size() != 3) throw InputError("graded differential record needs (s,t,k)");
    DifferentialRecord d;
    d.source = PageSlot{static_cast<uint32_t>(r.degree[0]), static_cast<uint32_t>(r.degree[1]),
                        static_cast<uint32_t>(r.degree[2])};
    d.page = detail::parse_u32(r.payload.at("page"));
    d.target = decode_slot(r.payload.at("target"));
    d.source_class = decode_vector(r.payload.at("source_class"), p);
    d.value = decode_vector(r.payload.at("value"), p);
    d.witness = detail::parse_u32(r.payload.at("witness"));
    return d;
}

inline ChartRecord chart_from_permanence(const PermanenceRecord& rec) {
    ChartRecord r;
    r.kind = "class";
    r.seq = "algnov";
    r.degree = {rec.slot.s, rec.slot.t, rec.slot.k};
    r.names = {"permanent(" + name_slot(rec.slot) + ")"};
    r.payload["source_class"] = encode_vector(rec.source_class);
    r.payload["permanent_through"] = std::to_string(rec.through_page);
    r.payload["witness"] = std::to_string(rec.witness);
    return r;
}

inline ChartRecord chart_from_detection(const DetectionRecord& rec) {
    ChartRecord r;
    r.kind = "detection";
    r.seq = "cess";
    r.degree = {rec.adams_s(), rec.adams_t()};
    r.names = {"detect(" + name_bidegree(rec.adams_s(), rec.adams_t()) + ")@" +
               std::to_string(rec.k)};
    r.payload["layer"] = std::to_string(rec.k);
    r.payload["slot"] = encode_slot(PageSlot{rec.s, rec.t, rec.k});
    r.payload["value"] = encode_coords(rec.value);
    r.payload["weight"] = std::to_string(rec.weight);
    r.payload["adams_class"] = encode_vector(rec.adams_class);
    return r;
}

inline const char* statement_name(TransferStatement s) {
    switch (s) {
        case TransferStatement::Differential: return "differential";
        case TransferStatement::LeadingTermVanishes: return "leading-term-vanishes";
        case TransferStatement::Nonpermanence: return "nonpermanence";
        case TransferStatement::Refusal: return "refusal";
    }
    return "refusal";
}

inline std::string join_list(const std::vector<std::string>& parts) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += "|";
        out += parts[i];
    }
    return out;
}

inline ChartRecord chart_from_transfer(const TransferRecord& rec) {
    ChartRecord r;
    r.kind = "transfer";
    r.seq = "adams";
    r.degree = {rec.detection.adams_s(), rec.detection.adams_t()};
    r.names = {std::string(statement_name(rec.statement)) + "(" +
               name_bidegree(rec.detection.adams_s(), rec.detection.adams_t()) + ")"};
    r.payload["tag"] = rec.tag;
    r.payload["statement"] = statement_name(rec.statement);
    r.payload["page"] = std::to_string(rec.adams_r);
    r.payload["target"] = std::to_string(rec.target_s) + "," + std::to_string(rec.target_t);
    r.payload["detecting_slot"] = encode_slot(rec.detecting_slot);
    r.payload["detecting_class"] = encode_vector(rec.detecting_class);
    r.payload["guard"] = rec.guard.in_range() ? "in-range" : "out-of-range";
    r.payload["guard_reasons"] = join_list(rec.guard.reasons);
    r.payload["assumptions"] = join_list(rec.assumptions);
    return r;
}

inline ChartRecord chart_audit_entry(const std::string& check, const std::string& scope,
                                     uint64_t checks) {
    ChartRecord r;
    r.kind = "audit";
    r.seq = "adams";
    r.names = {check};
    r.payload["scope"] = scope;
    r.payload["checks"] = std::to_string(checks);
    r.payload["status"] = "pass";
    return r;
}

// SVG rendering. Conventions: stem t-s on the x axis, filtration s on the y
// axis, one dot per class record, differential and transfer arrows with the
// page printed at the midpoint. Graded records color by weight, since the
// third grading has no axis to live on. Output is a deterministic function of
// the record list.
struct SvgOptions {
    int64_t stem_lo = 0;
    int64_t stem_hi = -1; // below stem_lo means derive from the records
};

namespace detail {

struct SvgDot {
    int64_t stem = 0;
    int64_t fil = 0;
    std::string color;
    std::string label; // annotation for the third grading
    std::string title;
};

struct SvgArrow {
    int64_t stem_from = 0, fil_from = 0;
    int64_t stem_to = 0, fil_to = 0;
    std::string color;
    std::string label;
};

inline const char* weight_color(int64_t k) {
    static const char* palette[] = {"#1f6feb", "#9a3fb5", "#bf5b17", "#2f8f4e",
                                    "#c23b76", "#7a6a1f", "#3b7f8f"};
    return palette[static_cast<size_t>(k % 7)];
}

} // namespace detail

inline std::string emit_svg(const ChartDocument& doc, const SvgOptions& opt = {}) {
    std::vector<detail::SvgDot> dots;
    std::vector<detail::SvgArrow> arrows;

    for (const auto& r : doc.records) {
        if (r.kind == "class" || r.kind == "detection") {
            if (r.degree.size() < 2) continue;
            detail::SvgDot d;
            int64_t s = r.degree[0], t = r.degree[1];
            d.stem = t - s;
            d.fil = s;
            d.color = "#24292f";
            if (r.seq == "algnov" && r.degree.size() == 3) {
                d.color = detail::weight_color(r.degree[2]);
                d.label = "k" + std::to_string(r.degree[2]);
            } else if (r.seq == "ctau" && r.degree.size() == 3) {
                d.label = "u" + std::to_string(r.degree[2]);
            }
            if (!r.names.empty()) d.title = r.names[0];
            if (r.payload.count("permanent_through"))
                d.title += " permanent through page " + r.payload.at("permanent_through");
            dots.push_back(std::move(d));
        } else if (r.kind == "differential" && r.degree.size() == 3) {
            detail::SvgArrow a;
            int64_t s = r.degree[0], t = r.degree[1];
            a.stem_from = t - s;
            a.fil_from = s;
            a.stem_to = a.stem_from - 1;
            a.fil_to = s + 1;
            a.color = "#a40e26";
            a.label = "r" + (r.payload.count("page") ? r.payload.at("page") : "");
            arrows.push_back(std::move(a));
        } else if (r.kind == "transfer" && r.degree.size() == 2 &&
                   r.payload.count("statement") &&
                   r.payload.at("statement") == std::string("differential")) {
            detail::SvgArrow a;
            int64_t s = r.degree[0], t = r.degree[1];
            int64_t page = detail::parse_int(r.payload.at("page"));
            a.stem_from = t - s;
            a.fil_from = s;
            a.stem_to = a.stem_from - 1;
            a.fil_to = s + page;
            a.color = "#a40e26";
            a.label = "r" + std::to_string(page);
            arrows.push_back(std::move(a));
        }
    }

    int64_t stem_lo = opt.stem_lo, stem_hi = opt.stem_hi;
    int64_t fil_hi = 4;
    if (stem_hi < stem_lo) {
        stem_hi = stem_lo;
        for (const auto& d : dots) stem_hi = std::max(stem_hi, d.stem);
        for (const auto& a : arrows) stem_hi = std::max(stem_hi, a.stem_from);
    }
    for (const auto& d : dots) fil_hi = std::max(fil_hi, d.fil);
    for (const auto& a : arrows) fil_hi = std::max(fil_hi, a.fil_to);

    const int64_t cell = 48, margin = 56;
    const int64_t width = margin * 2 + (stem_hi - stem_lo + 1) * cell;
    const int64_t height = margin * 2 + (fil_hi + 1) * cell;
    auto X = [&](int64_t stem) { return margin + (stem - stem_lo) * cell + cell / 2; };
    auto Y = [&](int64_t fil) { return height - margin - fil * cell - cell / 2; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<defs><marker id=\"tip\" markerWidth=\"8\" markerHeight=\"8\" refX=\"6\" refY=\"3\" "
          "orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 z\" fill=\"#a40e26\"/></marker></defs>\n";
    os << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";

    // Grid and axis labels.
    for (int64_t stem = stem_lo; stem <= stem_hi; ++stem) {
        os << "<line x1=\"" << X(stem) << "\" y1=\"" << (height - margin) << "\" x2=\"" << X(stem)
           << "\" y2=\"" << margin << "\" stroke=\"#eceef0\"/>\n";
        os << "<text x=\"" << X(stem) << "\" y=\"" << (height - margin / 3)
           << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#57606a\">" << stem
           << "</text>\n";
    }
    for (int64_t fil = 0; fil <= fil_hi; ++fil) {
        os << "<line x1=\"" << margin << "\" y1=\"" << Y(fil) << "\" x2=\"" << (width - margin)
           << "\" y2=\"" << Y(fil) << "\" stroke=\"#eceef0\"/>\n";
        os << "<text x=\"" << (margin / 2) << "\" y=\"" << (Y(fil) + 4)
           << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#57606a\">" << fil
           << "</text>\n";
    }

    for (const auto& a : arrows) {
        os << "<line x1=\"" << X(a.stem_from) << "\" y1=\"" << Y(a.fil_from) << "\" x2=\""
           << X(a.stem_to) << "\" y2=\"" << Y(a.fil_to) << "\" stroke=\"" << a.color
           << "\" stroke-width=\"1.5\" marker-end=\"url(#tip)\"/>\n";
        os << "<text x=\"" << ((X(a.stem_from) + X(a.stem_to)) / 2 + 6) << "\" y=\""
           << ((Y(a.fil_from) + Y(a.fil_to)) / 2) << "\" font-size=\"11\" fill=\"" << a.color
           << "\">" << a.label << "</text>\n";
    }

    // Dots last so they sit on top of arrow tails; stack same-position
    // classes side by side in record order.
    std::map<std::pair<int64_t, int64_t>, int64_t> seen;
    for (const auto& d : dots) {
        int64_t offset = seen[{d.stem, d.fil}]++;
        int64_t cx = X(d.stem) + offset * 10;
        os << "<circle cx=\"" << cx << "\" cy=\"" << Y(d.fil) << "\" r=\"4\" fill=\"" << d.color
           << "\">";
        if (!d.title.empty()) os << "<title>" << d.title << "</title>";
        os << "</circle>\n";
        if (!d.label.empty())
            os << "<text x=\"" << (cx + 6) << "\" y=\"" << (Y(d.fil) - 6)
               << "\" font-size=\"10\" fill=\"" << d.color << "\">" << d.label << "</text>\n";
    }

    os << "</svg>\n";
    return os.str();
}

// JSON config file: flat object, every key optional, unknown keys refused so
// typos fail loudly instead of silently running the default.
inline void merge_config_file(WorkbenchConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("config file not readable: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw InputError("config file " + path + ": expected an object");
    for (const auto& [key, val] : j.items()) {
        try {
            if (key == "prime")
                cfg.prime = val.get<uint32_t>();
            else if (key == "smax")
                cfg.s_max = val.get<uint32_t>();
            else if (key == "tmax")
                cfg.t_max = val.get<uint32_t>();
            else if (key == "kmax")
                cfg.k_max = val.get<uint32_t>();
            else if (key == "rmax")
                cfg.r_max = val.get<uint32_t>();
            else if (key == "precision")
                cfg.precision = val.get<uint32_t>();
            else if (key == "cache_dir")
                cfg.cache_dir = val.get<std::string>();
            else if (key == "format")
                cfg.format = val.get<std::string>();
            else
                throw InputError("config file " + path + ": unknown key '" + key + "'");
        } catch (const nlohmann::json::exception& e) {
            throw InputError("config file " + path + ", key '" + key + "': " + e.what());
        }
    }
}

} // namespace sseq
