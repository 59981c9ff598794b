#include <catch2/catch_amalgamated.hpp>

#include <sseq/algnov.hpp>

using namespace sseq;

namespace {

SparseVector vec(uint32_t p, std::initializer_list<std::pair<uint32_t, int64_t>> terms) {
    SparseVector v(p);
    for (const auto& [i, c] : terms) v.add_term(i, c);
    return v;
}

const DifferentialRecord* find_differential(const NovikovPages& pages, PageSlot source,
                                            uint32_t page) {
    for (const auto& r : pages.differentials())
        if (r.page == page && r.source == source) return &r;
    return nullptr;
}

const PermanenceRecord* find_permanence(const NovikovPages& pages, PageSlot slot) {
    for (const auto& r : pages.permanence())
        if (r.slot == slot) return &r;
    return nullptr;
}

} // namespace

TEST_CASE("the first differential maps [t_1^3] onto the v_0 b_0 line") {
    SteenrodTables st(3, 14);
    BPTables bp(3, 14);
    NovikovPages pages(st, bp, PageWindow{3, 14, 3, 3});
    pages.run();

    const PageSlot h1{1, 12, 0};
    const PageSlot vb0{2, 12, 1};
    const DifferentialRecord* rec = find_differential(pages, h1, 2);
    REQUIRE(rec != nullptr);
    CHECK(rec->target == vb0);
    CHECK(rec->source_class == vec(3, {{0, 1}}));
    // In page-one coordinates at (2,12,1) the single generator is
    // v_0[t_1^2|t_1] + 2 v_1[t_1|t_1], and v_0 b_0 equals that class; the
    // differential hits twice it.
    CHECK(rec->value == vec(3, {{0, 2}}));

    // The witness re-verifies: an integral pair with d(lift) = boundary,
    // leading weight 1, whose weight-0 layer is the source class.
    auto& ic = pages.integral();
    auto& nov = pages.complex();
    const auto& wit = pages.witness(rec->witness);
    CHECK(ic.differential(wit.lift).terms == wit.boundary.terms);
    CHECK(ic.min_weight(wit.boundary) == 1);
    CHECK(ic.gr_component(wit.lift, 0, nov) == vec(3, {{0, 1}}));
    CHECK(ic.gr_component(wit.boundary, 1, nov) == vec(3, {{0, 2}, {1, 2}}));

    // Source and target both leave the page.
    CHECK(pages.page_dimension(h1, 2) == 1);
    CHECK(pages.page_dimension(vb0, 2) == 1);
    CHECK(pages.page_dimension(h1, 3) == 0);
    CHECK(pages.page_dimension(vb0, 3) == 0);

    // b_0 itself sits one weight lower and survives.
    const PageSlot b0{2, 12, 0};
    CHECK(pages.page_dimension(b0, 2) == 1);
    CHECK(pages.page_dimension(b0, 3) == 1);
    CHECK(pages.page_dimension(b0, 4) == 1);
}

TEST_CASE("permanence certificates for the low-stem survivors") {
    SteenrodTables st(3, 14);
    BPTables bp(3, 14);
    NovikovPages pages(st, bp, PageWindow{2, 14, 2, 3});
    pages.run();
    uint32_t n = pages.precision();

    struct Expected {
        PageSlot slot;
        const char* name;
    };
    const Expected expected[] = {
        {{0, 0, 0}, "unit"},
        {{0, 0, 1}, "v_0"},
        {{0, 0, 2}, "v_0^2"},
        {{1, 4, 0}, "[t_1]"},
        {{1, 8, 1}, "v_0[t_1^2] + 2v_1[t_1]"},
        {{1, 12, 1}, "v_0[t_1^3], the divided alpha slot"},
        {{2, 12, 0}, "[t_1|t_1^2] + [t_1^2|t_1]"},
    };
    auto& ic = pages.integral();
    auto& nov = pages.complex();
    for (const auto& e : expected) {
        INFO(e.name);
        const PermanenceRecord* rec = find_permanence(pages, e.slot);
        REQUIRE(rec != nullptr);
        CHECK(rec->through_page == n - e.slot.k);
        const auto& wit = pages.witness(rec->witness);
        // The certificate is an exactly vanishing corrected boundary whose
        // leading layer is the certified class.
        CHECK(ic.min_weight(wit.boundary) >= n);
        CHECK(ic.differential(wit.lift).terms == wit.boundary.terms);
        CHECK(ic.gr_component(wit.lift, e.slot.k, nov) ==
              pages.class_vector(e.slot, rec->source_class));
    }

    // h_1 supported a differential, so it must not be certified.
    CHECK(find_permanence(pages, PageSlot{1, 12, 0}) == nullptr);
}

TEST_CASE("records stay inside the page structure") {
    SteenrodTables st(3, 14);
    BPTables bp(3, 14);
    NovikovPages pages(st, bp, PageWindow{3, 14, 3, 4});
    pages.run();
    auto& nov = pages.complex();
    auto& ic = pages.integral();

    for (const auto& rec : pages.differentials()) {
        CHECK(rec.page >= 2);
        CHECK(rec.page <= 4);
        CHECK(rec.target.s == rec.source.s + 1);
        CHECK(rec.target.t == rec.source.t);
        CHECK(rec.target.k == rec.source.k + rec.page - 1);
        CHECK(!rec.source_class.is_zero());
        CHECK(!rec.value.is_zero());
        // A nonzero differential needs a nonzero target page to land on.
        CHECK(nov.e2_dimension(rec.target.s, rec.target.t, rec.target.k) > 0);
        // Witness pair re-verification. The recorded value is the class of
        // the boundary's leading layer, so compare after reduction.
        const auto& wit = pages.witness(rec.witness);
        CHECK(ic.differential(wit.lift).terms == wit.boundary.terms);
        CHECK(ic.min_weight(wit.boundary) == rec.target.k);
        SparseVector g = ic.gr_component(wit.boundary, rec.target.k, nov);
        auto coords = nov.class_coordinates(rec.target.s, rec.target.t, rec.target.k, g);
        REQUIRE(coords.has_value());
        SparseVector cv(3);
        for (size_t i = 0; i < coords->size(); ++i)
            if ((*coords)[i]) cv.add_term(static_cast<uint32_t>(i), (*coords)[i]);
        CHECK(cv == rec.value);
    }

    for (const auto& rec : pages.permanence()) {
        CHECK(!rec.source_class.is_zero());
        CHECK(rec.through_page + rec.slot.k == pages.precision());
    }
}

TEST_CASE("window and precision guards") {
    SteenrodTables st(3, 14);
    BPTables bp(3, 14);
    CHECK_THROWS_AS(NovikovPages(st, bp, PageWindow{1, 8, 1, 1}), InputError);
    CHECK_THROWS_AS(NovikovPages(st, bp, PageWindow{1, 20, 1, 2}), TruncationError);
    // k_max + r_max - 1 = 4 is out of reach at precision 3.
    CHECK_THROWS_AS(NovikovPages(st, bp, PageWindow{1, 8, 2, 3}, 3), PrecisionError);
    // Sufficient explicit precision is accepted.
    NovikovPages ok(st, bp, PageWindow{1, 8, 2, 3}, 5);
    ok.run();
    CHECK(ok.precision() == 5);
}

TEST_CASE("page dimensions follow the Pascal walk of the v_0 tower") {
    // In internal degree 0 every slot (0,0,k) carries exactly v_0^k and
    // nothing ever differentiates into or out of the column.
    SteenrodTables st(3, 8);
    BPTables bp(3, 8);
    NovikovPages pages(st, bp, PageWindow{1, 8, 3, 3});
    pages.run();
    for (uint32_t k = 0; k <= 3; ++k) {
        const PageSlot slot{0, 0, k};
        CHECK(pages.page_dimension(slot, 2) == 1);
        CHECK(pages.page_dimension(slot, 3) == 1);
        CHECK(pages.page_dimension(slot, 4) == 1);
        CHECK(find_permanence(pages, slot) != nullptr);
    }
    CHECK_THROWS_AS(pages.page_dimension(PageSlot{0, 9, 0}, 2), InputError);
}
