#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sseq/cache.hpp>
#include <sseq/chart.hpp>

using namespace sseq;

namespace {

ChartDocument sample_document(const std::string& format) {
    ChartDocument doc;
    doc.config.prime = 3;
    doc.config.s_max = 3;
    doc.config.t_max = 14;
    doc.config.k_max = 3;
    doc.config.format = format;

    ChartRecord cls;
    cls.kind = "class";
    cls.seq = "adams";
    cls.degree = {1, 4};
    cls.names = {"adams(1:4)#0"};
    cls.payload["index"] = "0";
    cls.payload["rep"] = "0:1";
    doc.records.push_back(cls);

    ChartRecord diff;
    diff.kind = "differential";
    diff.seq = "algnov";
    diff.degree = {1, 12, 0};
    diff.names = {"d2(1:12:0)"};
    diff.payload["page"] = "2";
    diff.payload["target"] = "2,12,1";
    diff.payload["source_class"] = "0:1";
    diff.payload["value"] = "0:2";
    diff.payload["witness"] = "0";
    doc.records.push_back(diff);

    ChartRecord audit;
    audit.kind = "audit";
    audit.seq = "adams";
    audit.names = {"d-squared"};
    audit.payload["scope"] = "s<=3 t<=14";
    audit.payload["checks"] = "212";
    audit.payload["status"] = "pass";
    doc.records.push_back(audit);

    return doc;
}

std::string render(const ChartDocument& doc) {
    std::ostringstream os;
    doc.write(os);
    return os.str();
}

ChartDocument parse(const std::string& text) {
    std::istringstream is(text);
    return ChartDocument::read(is);
}

std::filesystem::path fresh_dir(const std::string& leaf) {
    auto dir = std::filesystem::temp_directory_path() / leaf;
    std::filesystem::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("chart files re-emit themselves byte for byte") {
    for (const std::string format : {"tsv", "json-lines"}) {
        ChartDocument doc = sample_document(format);
        std::string once = render(doc);
        ChartDocument back = parse(once);
        CHECK(back.records == doc.records);
        CHECK(back.config.prime == doc.config.prime);
        CHECK(back.config.t_max == doc.config.t_max);
        CHECK(back.config.format == format);
        CHECK(render(back) == once);
    }

    // The two encodings carry the same records.
    ChartDocument tsv = parse(render(sample_document("tsv")));
    ChartDocument jsonl = parse(render(sample_document("json-lines")));
    CHECK(tsv.records == jsonl.records);
}

TEST_CASE("chart parsing is strict about shape") {
    std::string good = render(sample_document("tsv"));

    CHECK_THROWS_AS(parse(""), InputError);
    CHECK_THROWS_AS(parse("#sseq-chart v2 format=tsv\n"), InputError);
    CHECK_THROWS_AS(parse("#sseq-chart v1 format=tsv wat=1\n"), InputError);
    CHECK_THROWS_AS(parse("#sseq-chart v1 format=json-lines\n"), InputError);
    CHECK_THROWS_AS(parse("plain text\n"), InputError);

    std::string header = good.substr(0, good.find('\n') + 1);
    CHECK_THROWS_AS(parse(header + "class\tadams\t1,4\n"), InputError);
    CHECK_THROWS_AS(parse(header + "blob\tadams\t1,4\tx\t-\n"), InputError);
    CHECK_THROWS_AS(parse(header + "class\telliptic\t1,4\tx\t-\n"), InputError);
    CHECK_THROWS_AS(parse(header + "class\tadams\t1,zap\tx\t-\n"), InputError);
    CHECK_THROWS_AS(parse(header + "class\tadams\t1,4\tx\tnoequals\n"), InputError);
    CHECK_THROWS_AS(parse(header + "\n"), InputError);

    CHECK_THROWS_AS(parse("{\"sseq_chart\":\"v1\",\"format\":\"json-lines\"}\nnot json\n"),
                    InputError);
    CHECK_THROWS_AS(parse("{\"format\":\"json-lines\"}\n"), InputError);

    // A generator-convention mismatch is refused up front.
    CHECK_THROWS_AS(parse("#sseq-chart v1 format=tsv generators=milnor\n"), InputError);

    // Unencodable records are refused at write time.
    ChartDocument doc = sample_document("tsv");
    doc.records[0].names = {"has,comma"};
    CHECK_THROWS_AS(render(doc), InputError);
    doc = sample_document("tsv");
    doc.records[0].payload["bad;key"] = "1";
    CHECK_THROWS_AS(render(doc), InputError);
    doc = sample_document("tsv");
    doc.records[0].kind = "sketch";
    CHECK_THROWS_AS(render(doc), InputError);
}

TEST_CASE("engine records survive the chart encoding") {
    DifferentialRecord d;
    d.page = 2;
    d.source = PageSlot{1, 12, 0};
    d.target = PageSlot{2, 12, 1};
    d.source_class = SparseVector(3);
    d.source_class.add_term(0, 1);
    d.value = SparseVector(3);
    d.value.add_term(0, 2);
    d.witness = 7;

    ChartRecord enc = chart_from_differential(d);
    CHECK(enc.kind == "differential");
    CHECK((enc.degree == std::vector<int64_t>{1, 12, 0}));
    CHECK(enc.names == std::vector<std::string>{"d2(1:12:0)"});
    DifferentialRecord back = differential_from_chart(enc, 3);
    CHECK(back.page == d.page);
    CHECK(back.source == d.source);
    CHECK(back.target == d.target);
    CHECK(back.source_class == d.source_class);
    CHECK(back.value == d.value);
    CHECK(back.witness == d.witness);

    PermanenceRecord perm;
    perm.slot = PageSlot{1, 4, 0};
    perm.source_class = d.source_class;
    perm.through_page = 7;
    perm.witness = 3;
    ChartRecord pe = chart_from_permanence(perm);
    CHECK(pe.kind == "class");
    CHECK(pe.payload.at("permanent_through") == "7");
    CHECK(pe.names == std::vector<std::string>{"permanent(1:4:0)"});

    DetectionRecord det;
    det.s = 2;
    det.t = 12;
    det.k = 1;
    det.adams_class = SparseVector(3);
    det.adams_class.add_term(4, 1);
    det.value = {2};
    det.weight = 6;
    ChartRecord de = chart_from_detection(det);
    CHECK(de.kind == "detection");
    CHECK((de.degree == std::vector<int64_t>{3, 13}));
    CHECK(de.payload.at("slot") == "2,12,1");
    CHECK(de.payload.at("weight") == "6");
    CHECK(de.payload.at("value") == "2");

    TransferRecord tr;
    tr.tag = "secondary";
    tr.statement = TransferStatement::Differential;
    tr.detection = det;
    tr.guard = range_guard(2, 1, 2, 3);
    tr.adams_r = 2;
    tr.target_s = 5;
    tr.target_t = 14;
    tr.detecting_slot = PageSlot{3, 12, 2};
    tr.detecting_class = d.value;
    ChartRecord te = chart_from_transfer(tr);
    CHECK(te.kind == "transfer");
    CHECK(te.seq == "adams");
    CHECK((te.degree == std::vector<int64_t>{3, 13}));
    CHECK(te.payload.at("statement") == "differential");
    CHECK(te.payload.at("guard") == "in-range");
    CHECK(te.payload.at("target") == "5,14");
    CHECK(te.payload.at("detecting_slot") == "3,12,2");

    // Encoded records embed in a document and round-trip bytewise.
    ChartDocument doc;
    doc.config.format = "tsv";
    doc.records = {enc, pe, de, te};
    std::string text = render(doc);
    CHECK(parse(text).records == doc.records);
    CHECK(render(parse(text)) == text);
}

TEST_CASE("vector and coordinate codecs invert") {
    SparseVector v(5);
    v.add_term(2, 3);
    v.add_term(9, 4);
    CHECK(encode_vector(v) == "2:3,9:4");
    CHECK(decode_vector("2:3,9:4", 5) == v);
    CHECK(decode_vector("", 5) == SparseVector(5));
    CHECK(encode_vector(SparseVector(5)).empty());
    CHECK_THROWS_AS(decode_vector("2:", 5), InputError);
    CHECK_THROWS_AS(decode_vector("nope", 5), InputError);

    CHECK(encode_coords({1, 0, 2}) == "1,0,2");
    CHECK((decode_coords("1,0,2") == std::vector<uint32_t>{1, 0, 2}));
    CHECK(decode_coords("").empty());

    CHECK(encode_slot(PageSlot{2, 12, 1}) == "2,12,1");
    CHECK((decode_slot("2,12,1") == PageSlot{2, 12, 1}));
    CHECK_THROWS_AS(decode_slot("2,12"), InputError);
}

TEST_CASE("svg rendering places classes and differentials on the grid") {
    ChartDocument doc;
    doc.config.format = "tsv";

    ChartRecord cls;
    cls.kind = "class";
    cls.seq = "adams";
    cls.degree = {1, 4};
    cls.names = {"adams(1:4)#0"};
    doc.records.push_back(cls);

    std::string svg = emit_svg(doc);
    // Stem 3, filtration 1: x = 56 + 3*48 + 24, y = 352 - 56 - 48 - 24.
    CHECK(svg.find("<circle cx=\"224\" cy=\"224\"") != std::string::npos);
    CHECK(svg.find("<title>adams(1:4)#0</title>") != std::string::npos);
    CHECK(svg.find("marker-end") == std::string::npos);

    ChartRecord tr;
    tr.kind = "transfer";
    tr.seq = "adams";
    tr.degree = {1, 12};
    tr.names = {"differential(1:12)"};
    tr.payload["statement"] = "differential";
    tr.payload["page"] = "2";
    doc.records = {tr};
    svg = emit_svg(doc);
    // Source stem 11 filtration 1, target stem 10 filtration 3.
    CHECK(svg.find("x1=\"608\" y1=\"224\" x2=\"560\" y2=\"128\"") != std::string::npos);
    CHECK(svg.find(">r2</text>") != std::string::npos);

    // Refusals draw no arrow.
    tr.payload["statement"] = "refusal";
    doc.records = {tr};
    CHECK(emit_svg(doc).find("marker-end") == std::string::npos);

    // A graded differential spans one filtration step whatever the page.
    ChartRecord gd;
    gd.kind = "differential";
    gd.seq = "algnov";
    gd.degree = {1, 12, 0};
    gd.names = {"d2(1:12:0)"};
    gd.payload["page"] = "2";
    doc.records = {gd};
    svg = emit_svg(doc);
    CHECK(svg.find("x1=\"608\" y1=\"224\" x2=\"560\" y2=\"176\"") != std::string::npos);

    // Graded classes are colored and annotated by weight.
    ChartRecord gc;
    gc.kind = "class";
    gc.seq = "algnov";
    gc.degree = {2, 12, 1};
    gc.names = {"algnov(2:12:1)#0"};
    doc.records = {gc};
    svg = emit_svg(doc);
    CHECK(svg.find(">k1</text>") != std::string::npos);

    // The empty chart is still a grid.
    doc.records.clear();
    svg = emit_svg(doc);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("<circle") == std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);

    // Same output for the same input, forced stem window respected.
    CHECK(emit_svg(doc) == svg);
    SvgOptions so;
    so.stem_lo = 0;
    so.stem_hi = 13;
    std::string wide = emit_svg(doc, so);
    CHECK(wide.find(">13</text>") != std::string::npos);
}

TEST_CASE("slice cache stores and reloads exactly what was computed") {
    auto root = fresh_dir("sseq-test-store");
    WorkbenchConfig cfg;
    SliceCache cache(root.string(), cfg);

    SteenrodTables st(3, 14);
    BPTables bp(3, 14);
    AdamsCobar adams(st);
    NovikovCobar graded(st, bp);

    for (uint32_t s = 0; s <= 3; ++s) {
        for (uint32_t t = 0; t <= 14; ++t) {
            AdamsSliceData fresh = SliceCache::snapshot(adams, s, t);
            cache.store(fresh);
            auto loaded = cache.load_adams(s, t);
            REQUIRE(loaded.has_value());
            CHECK(*loaded == fresh);
            CHECK(cache.verify(adams, s, t));
        }
    }
    for (uint32_t k = 0; k <= 2; ++k) {
        GradedSliceData fresh = SliceCache::snapshot(graded, 2, 12, k);
        cache.store(fresh);
        auto loaded = cache.load_graded(2, 12, k);
        REQUIRE(loaded.has_value());
        CHECK(*loaded == fresh);
        CHECK(cache.verify(graded, 2, 12, k));
    }

    // Absent slices are a miss, not an error.
    CHECK_FALSE(cache.load_adams(9, 9).has_value());
    CHECK_FALSE(cache.verify(adams, 9, 9));

    // fetch computes on a miss and serves the stored copy on a hit.
    CHECK_FALSE(cache.load_adams(4, 14).has_value());
    AdamsSliceData first = cache.fetch(adams, 4, 14);
    CHECK(cache.load_adams(4, 14).has_value());
    CHECK(cache.fetch(adams, 4, 14) == first);

    std::filesystem::remove_all(root);
}

TEST_CASE("slice cache refuses corruption with a named check") {
    auto root = fresh_dir("sseq-test-corrupt");
    WorkbenchConfig cfg;
    SliceCache cache(root.string(), cfg);
    SteenrodTables st(3, 10);
    AdamsCobar adams(st);
    cache.store(SliceCache::snapshot(adams, 2, 9));

    auto path = cache.adams_path(2, 9);
    REQUIRE(std::filesystem::exists(path));

    // Flip one byte: the checksum no longer matches.
    auto mangle = [&](const std::string& from, const std::string& to) {
        std::ifstream in(path, std::ios::binary);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        in.close();
        auto at = text.find(from);
        REQUIRE(at != std::string::npos);
        text.replace(at, from.size(), to);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << text;
    };
    mangle("e ", "e  ");
    try {
        cache.load_adams(2, 9);
        FAIL("corrupted file loaded");
    } catch (const AuditError& e) {
        CHECK(e.check == "cache-integrity");
    }

    // A stale-but-well-formed file is caught by the consistency sweep: keep
    // the format valid, change a representative, recompute the checksum.
    cache.store(SliceCache::snapshot(adams, 2, 9));
    {
        std::ifstream in(path, std::ios::binary);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        in.close();
        auto mark = text.rfind("#checksum ");
        std::string body = text.substr(0, mark);
        auto at = body.find("e 2:1");
        REQUIRE(at != std::string::npos);
        body.replace(at, 5, "e 2:2");
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << body << "#checksum " << hex64(fnv1a(body)) << "\n";
    }
    CHECK(cache.load_adams(2, 9).has_value());
    try {
        cache.verify(adams, 2, 9);
        FAIL("stale file verified");
    } catch (const AuditError& e) {
        CHECK(e.check == "cache-consistency");
    }

    // Truncation loses the trailer.
    cache.store(SliceCache::snapshot(adams, 2, 9));
    {
        auto size = std::filesystem::file_size(path);
        std::filesystem::resize_file(path, size - 3);
    }
    CHECK_THROWS_AS(cache.load_adams(2, 9), AuditError);

    // A file copied under the wrong slice name fails the header check.
    cache.store(SliceCache::snapshot(adams, 2, 9));
    std::filesystem::copy_file(path, cache.adams_path(2, 10),
                               std::filesystem::copy_options::overwrite_existing);
    CHECK_THROWS_AS(cache.load_adams(2, 10), AuditError);

    std::filesystem::remove_all(root);
}

TEST_CASE("word and monomial codecs are exact") {
    Word w = {tau_gen(0), t_gen(1), mul(tau_gen(1), t_gen(2))->second};
    CHECK(decode_word(encode_word(w)) == w);
    CHECK(encode_word(Word{}) == "-");
    CHECK(decode_word("-").empty());
    CHECK(encode_word(Word{tau_gen(0)}) == "1");
    CHECK((decode_word("1") == Word{SteenrodMonomial{1, {}}}));

    VMonomial m = v_gen(1, 2);
    m.v0 = 3;
    CHECK(decode_vmono(encode_vmono(m)) == m);
    CHECK(encode_vmono(VMonomial{}) == "0");
    CHECK(decode_vmono("0") == VMonomial{});
}

TEST_CASE("configuration hashing and precedence") {
    WorkbenchConfig cfg;
    CHECK(cfg.prime == 3);
    CHECK(cfg.format == "tsv");
    CHECK(cfg.effective_precision() == cfg.k_max + cfg.r_max + 2);
    cfg.precision = 4;
    CHECK(cfg.effective_precision() == 4);
    cfg.precision = 0;

    // The canonical string pins every knob that affects computed values.
    CHECK(cfg.canonical_string() ==
          "p=3;smax=8;tmax=26;kmax=6;rmax=2;precision=10;generators=hazewinkel");
    CHECK(config_hash(cfg) == hex64(fnv1a(cfg.canonical_string())));
    WorkbenchConfig other = cfg;
    other.t_max = 27;
    CHECK(config_hash(other) != config_hash(cfg));

    // fnv64 spot values, frozen against the reference constants.
    CHECK(fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
    CHECK(hex64(0xcbf29ce484222325ull) == "cbf29ce484222325");

    WorkbenchConfig bad;
    bad.prime = 4;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = WorkbenchConfig{};
    bad.r_max = 1;
    CHECK_THROWS_AS(bad.validate(), InputError);
    bad = WorkbenchConfig{};
    bad.format = "xml";
    CHECK_THROWS_AS(bad.validate(), InputError);

    // Environment supplies the cache directory only when nothing else has.
    setenv("SSEQ_CACHE_DIR", "/tmp/envcache", 1);
    WorkbenchConfig env;
    apply_environment(env);
    CHECK(env.cache_dir == "/tmp/envcache");
    env.cache_dir = "explicit";
    apply_environment(env);
    CHECK(env.cache_dir == "explicit");
    unsetenv("SSEQ_CACHE_DIR");

    // Config files merge field by field and refuse unknown keys.
    auto dir = fresh_dir("sseq-test-config");
    std::filesystem::create_directories(dir);
    auto file = dir / "wb.json";
    {
        std::ofstream out(file);
        out << "{\"prime\": 5, \"tmax\": 12, \"format\": \"json-lines\"}\n";
    }
    WorkbenchConfig merged;
    merge_config_file(merged, file.string());
    CHECK(merged.prime == 5);
    CHECK(merged.t_max == 12);
    CHECK(merged.s_max == 8);
    CHECK(merged.format == "json-lines");
    {
        std::ofstream out(file);
        out << "{\"primes\": 5}\n";
    }
    CHECK_THROWS_AS(merge_config_file(merged, file.string()), InputError);
    {
        std::ofstream out(file);
        out << "{\"prime\": \"three\"}\n";
    }
    CHECK_THROWS_AS(merge_config_file(merged, file.string()), InputError);
    CHECK_THROWS_AS(merge_config_file(merged, (dir / "absent.json").string()), InputError);
    std::filesystem::remove_all(dir);
}
