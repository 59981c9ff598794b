#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include <sseq/audit.hpp>
#include <sseq/cache.hpp>
#include <sseq/chart.hpp>

// Command line driver. Every subcommand writes one chart document (or SVG) to
// --out or stdout; diagnostics go to stderr. Settings resolve as flags over
// config file over environment over defaults. Exit codes: 0 success, 1 bad
// input, 2 a failed audit, 3 precision or table window exhausted.

using namespace sseq;

namespace {

struct Options {
    WorkbenchConfig cfg;
    std::string out_path;
    std::optional<std::pair<int64_t, int64_t>> stems;
};

std::pair<int64_t, int64_t> parse_stems(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos)
        throw InputError("--stems wants lo:hi, got '" + s + "'");
    int64_t lo = detail::parse_int(s.substr(0, colon));
    int64_t hi = detail::parse_int(s.substr(colon + 1));
    if (lo > hi) throw InputError("--stems range is empty: " + s);
    return {lo, hi};
}

void write_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("output not writable: " + out_path);
    out << text;
}

void write_document(const ChartDocument& doc, const std::string& out_path) {
    if (out_path.empty()) {
        doc.write(std::cout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("output not writable: " + out_path);
    doc.write(out);
}

ChartDocument read_document(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("input not readable: " + path);
    return ChartDocument::read(in);
}

bool stem_selected(const Options& opt, const ChartRecord& r) {
    if (!opt.stems || r.degree.size() < 2) return true;
    int64_t stem = r.degree[1] - r.degree[0];
    return stem >= opt.stems->first && stem <= opt.stems->second;
}

void push(ChartDocument& doc, const Options& opt, ChartRecord r) {
    if (stem_selected(opt, r)) doc.records.push_back(std::move(r));
}

// First-page classes of one of the two complexes, slice by slice, through
// the cache when one is configured.
int cmd_ext(const Options& opt, const std::string& which) {
    const WorkbenchConfig& cfg = opt.cfg;
    SteenrodTables st(cfg.prime, cfg.t_max);
    std::optional<SliceCache> cache;
    if (!cfg.cache_dir.empty()) cache.emplace(cfg.cache_dir, cfg);
    ChartDocument doc;
    doc.config = cfg;

    if (which == "adams") {
        AdamsCobar cobar(st);
        for (uint32_t s = 0; s <= cfg.s_max; ++s) {
            for (uint32_t t = 0; t <= cfg.t_max; ++t) {
                AdamsSliceData data =
                    cache ? cache->fetch(cobar, s, t) : SliceCache::snapshot(cobar, s, t);
                for (size_t i = 0; i < data.reps.size(); ++i) {
                    ChartRecord r;
                    r.kind = "class";
                    r.seq = "adams";
                    r.degree = {s, t};
                    r.names = {"adams(" + name_bidegree(s, t) + ")#" + std::to_string(i)};
                    r.payload["index"] = std::to_string(i);
                    r.payload["rep"] = encode_vector(data.reps[i]);
                    push(doc, opt, std::move(r));
                }
            }
        }
    } else if (which == "algnov") {
        BPTables bp(cfg.prime, cfg.t_max);
        NovikovCobar cobar(st, bp);
        for (uint32_t s = 0; s <= cfg.s_max; ++s) {
            for (uint32_t t = 0; t <= cfg.t_max; ++t) {
                for (uint32_t k = 0; k <= cfg.k_max; ++k) {
                    GradedSliceData data = cache ? cache->fetch(cobar, s, t, k)
                                                 : SliceCache::snapshot(cobar, s, t, k);
                    for (size_t i = 0; i < data.reps.size(); ++i) {
                        ChartRecord r;
                        r.kind = "class";
                        r.seq = "algnov";
                        r.degree = {s, t, k};
                        r.names = {"algnov(" + name_slot(PageSlot{s, t, k}) + ")#" +
                                   std::to_string(i)};
                        r.payload["index"] = std::to_string(i);
                        r.payload["rep"] = encode_vector(data.reps[i]);
                        push(doc, opt, std::move(r));
                    }
                }
            }
        }
    } else {
        throw InputError("ext computes 'adams' or 'algnov' tables, not '" + which + "'");
    }

    write_document(doc, opt.out_path);
    return 0;
}

// Run the graded pages over the window and emit everything they certify:
// first-page classes, nonzero differentials, permanence certificates.
int cmd_algnov(const Options& opt) {
    const WorkbenchConfig& cfg = opt.cfg;
    SteenrodTables st(cfg.prime, cfg.t_max);
    BPTables bp(cfg.prime, cfg.t_max);
    NovikovPages pages(st, bp, PageWindow{cfg.s_max, cfg.t_max, cfg.k_max, cfg.r_max},
                       cfg.precision);
    pages.run();

    ChartDocument doc;
    doc.config = cfg;
    NovikovCobar& complex = pages.complex();
    for (uint32_t s = 0; s <= cfg.s_max; ++s) {
        for (uint32_t t = 0; t <= cfg.t_max; ++t) {
            for (uint32_t k = 0; k <= cfg.k_max; ++k) {
                const auto& reps = complex.e2_basis(s, t, k);
                for (size_t i = 0; i < reps.size(); ++i) {
                    ChartRecord r;
                    r.kind = "class";
                    r.seq = "algnov";
                    r.degree = {s, t, k};
                    r.names = {"algnov(" + name_slot(PageSlot{s, t, k}) + ")#" +
                               std::to_string(i)};
                    r.payload["index"] = std::to_string(i);
                    r.payload["rep"] = encode_vector(reps[i]);
                    push(doc, opt, std::move(r));
                }
            }
        }
    }
    for (const auto& d : pages.differentials()) push(doc, opt, chart_from_differential(d));
    for (const auto& rec : pages.permanence()) push(doc, opt, chart_from_permanence(rec));

    write_document(doc, opt.out_path);
    return 0;
}

// Read a graded chart, rebuild the splitting it came from, and turn each
// differential record into a classical statement (or a refusal) with its
// guard spelled out.
int cmd_transfer(const Options& opt, const std::string& in_path) {
    ChartDocument in = read_document(in_path);
    WorkbenchConfig ecfg = in.config;
    ecfg.validate();

    SteenrodTables st(ecfg.prime, ecfg.t_max);
    BPTables bp(ecfg.prime, ecfg.t_max);
    AdamsCobar adams(st);
    NovikovCobar graded(st, bp);
    Splitting split(adams, graded);

    ChartDocument doc;
    doc.config = ecfg;
    doc.config.format = opt.cfg.format;

    for (const auto& rec : in.records) {
        if (rec.kind != "differential") continue;
        DifferentialRecord d = differential_from_chart(rec, ecfg.prime);
        uint32_t S = d.source.s + d.source.k;
        uint32_t T = d.source.t + d.source.k;
        const DetectionRecord* match = nullptr;
        auto detections = split.detect_slice(S, T);
        for (const auto& det : detections) {
            if (det.k != d.source.k) continue;
            if (detail::coords_to_vector(det.value, ecfg.prime) == d.source_class) {
                match = &det;
                break;
            }
        }
        // The layer decomposition is onto, so a graded class from the same
        // window always has a detecting classical class; a miss means the
        // input does not belong to this window.
        if (!match)
            throw AuditError("transfer-matching",
                             "no classical class detects the graded source at " +
                                 to_string(d.source));
        TransferRecord tr = transfer(*match, d);
        push(doc, opt, chart_from_transfer(tr));
        // When the full guard refuses but the value is a genuine nonzero
        // class, the weaker no-survival certificate may still apply.
        if (tr.statement == TransferStatement::Refusal && !d.value.entries().empty()) {
            TransferRecord np = nonpermanence(*match, d);
            if (np.statement == TransferStatement::Nonpermanence)
                push(doc, opt, chart_from_transfer(np));
        }
    }

    write_document(doc, opt.out_path);
    return 0;
}

// Run every self-check suite over the configured window; include the cache
// consistency sweep when a cache is configured.
int cmd_audit(const Options& opt) {
    const WorkbenchConfig& cfg = opt.cfg;
    SteenrodTables st(cfg.prime, cfg.t_max);
    BPTables bp(cfg.prime, cfg.t_max);
    AdamsCobar adams(st);
    NovikovCobar graded(st, bp);
    Splitting split(adams, graded);

    std::vector<AuditEntry> entries;
    entries.push_back(audit_coproduct(st, cfg.t_max));
    entries.push_back(audit_d_squared(adams, cfg.s_max, cfg.t_max));
    entries.push_back(audit_d_squared(graded, cfg.s_max, cfg.t_max, cfg.k_max));
    entries.push_back(audit_decomposition(split, cfg.s_max, cfg.t_max));
    entries.push_back(audit_weight_formula(split, cfg.s_max, cfg.t_max));
    entries.push_back(audit_regrading());
    entries.push_back(audit_guards(cfg.prime));

    if (!cfg.cache_dir.empty()) {
        SliceCache cache(cfg.cache_dir, cfg);
        AuditEntry entry{"cache-consistency", "stored slices vs fresh computation"};
        for (uint32_t s = 0; s <= cfg.s_max; ++s)
            for (uint32_t t = 0; t <= cfg.t_max; ++t)
                if (cache.verify(adams, s, t)) entry.checks += 1;
        for (uint32_t s = 0; s <= cfg.s_max; ++s)
            for (uint32_t t = 0; t <= cfg.t_max; ++t)
                for (uint32_t k = 0; k <= cfg.k_max; ++k)
                    if (cache.verify(graded, s, t, k)) entry.checks += 1;
        entries.push_back(entry);
    }

    ChartDocument doc;
    doc.config = cfg;
    for (const auto& e : entries) {
        std::cerr << "[ok] " << e.check << ": " << e.checks << " facts (" << e.scope << ")\n";
        doc.records.push_back(chart_audit_entry(e.check, e.scope, e.checks));
    }
    write_document(doc, opt.out_path);
    return 0;
}

int cmd_chart(const Options& opt, const std::string& in_path) {
    ChartDocument in = read_document(in_path);
    SvgOptions so;
    if (opt.stems) {
        so.stem_lo = opt.stems->first;
        so.stem_hi = opt.stems->second;
    }
    write_text(emit_svg(in, so), opt.out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral sequence workbench"};
    app.require_subcommand(1);

    uint32_t prime = 0, smax = 0, tmax = 0, kmax = 0, rmax = 0, precision = 0;
    std::string cache_dir, format, out_path, config_path, stems;
    app.add_option("--prime", prime, "odd prime");
    app.add_option("--smax", smax, "filtration bound");
    app.add_option("--tmax", tmax, "internal degree bound");
    app.add_option("--kmax", kmax, "weight bound");
    app.add_option("--rmax", rmax, "last page to run");
    app.add_option("--precision", precision, "coefficient precision (0 derives a default)");
    app.add_option("--cache-dir", cache_dir, "slice store root");
    app.add_option("--format", format, "tsv or json-lines");
    app.add_option("--out", out_path, "output path (stdout when absent)");
    app.add_option("--config", config_path, "json settings file");
    app.add_option("--stems", stems, "restrict emitted records to stems lo:hi");

    auto* ext = app.add_subcommand("ext", "first-page classes over the window");
    std::string which = "adams";
    ext->add_option("--which", which, "adams or algnov");
    ext->fallthrough();

    auto* algnov = app.add_subcommand(
        "algnov", "graded pages: classes, differentials, permanence certificates");
    algnov->fallthrough();

    auto* transfer_cmd =
        app.add_subcommand("transfer", "turn graded differentials into classical statements");
    std::string transfer_in;
    transfer_cmd->add_option("--in", transfer_in, "input chart file")->required();
    transfer_cmd->fallthrough();

    auto* audit_cmd = app.add_subcommand("audit", "run the self-check suites");
    audit_cmd->fallthrough();

    auto* chart_cmd = app.add_subcommand("chart", "render a chart file to svg");
    std::string chart_in;
    chart_cmd->add_option("--in", chart_in, "input chart file")->required();
    chart_cmd->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        Options opt;
        apply_environment(opt.cfg);
        if (app.count("--config")) merge_config_file(opt.cfg, config_path);
        if (app.count("--prime")) opt.cfg.prime = prime;
        if (app.count("--smax")) opt.cfg.s_max = smax;
        if (app.count("--tmax")) opt.cfg.t_max = tmax;
        if (app.count("--kmax")) opt.cfg.k_max = kmax;
        if (app.count("--rmax")) opt.cfg.r_max = rmax;
        if (app.count("--precision")) opt.cfg.precision = precision;
        if (app.count("--cache-dir")) opt.cfg.cache_dir = cache_dir;
        if (app.count("--format")) opt.cfg.format = format;
        opt.cfg.validate();
        if (opt.cfg.precision != 0 &&
            opt.cfg.precision < opt.cfg.k_max + opt.cfg.r_max + 2)
            std::cerr << "warning: precision " << opt.cfg.precision
                      << " is below the derived default "
                      << opt.cfg.k_max + opt.cfg.r_max + 2 << "\n";
        opt.out_path = out_path;
        if (app.count("--stems")) opt.stems = parse_stems(stems);

        if (ext->parsed()) return cmd_ext(opt, which);
        if (algnov->parsed()) return cmd_algnov(opt);
        if (transfer_cmd->parsed()) return cmd_transfer(opt, transfer_in);
        if (audit_cmd->parsed()) return cmd_audit(opt);
        return cmd_chart(opt, chart_in);
    } catch (const AuditError& e) {
        std::cerr << "audit failure: " << e.what() << "\n";
        return 2;
    } catch (const PrecisionError& e) {
        std::cerr << "precision: " << e.what() << "\n";
        return 3;
    } catch (const TruncationError& e) {
        std::cerr << "truncation: " << e.what() << "\n";
        return 3;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
