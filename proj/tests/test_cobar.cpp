#include <catch2/catch_amalgamated.hpp>

#include <sseq/cobar.hpp>

using namespace sseq;

namespace {

SparseVector vec(uint32_t p, std::initializer_list<std::pair<uint32_t, int64_t>> terms) {
    SparseVector v(p);
    for (const auto& [i, c] : terms) v.add_term(i, c);
    return v;
}

uint64_t int_coeff(const IntegralCobar::Cochain& c, const Word& w, const VMonomial& alpha) {
    auto it = c.terms.find(w);
    if (it == c.terms.end()) return 0;
    VMonomial a = alpha;
    a.trim();
    auto jt = it->second.find(a);
    return jt == it->second.end() ? 0 : jt->second.value();
}

// Dense Gaussian elimination, independent of the sparse toolkit.
uint32_t dense_rank(std::vector<std::vector<uint32_t>> m, uint32_t p) {
    auto inv = [&](uint32_t a) {
        uint32_t r = 1, b = a % p, e = p - 2;
        while (e) {
            if (e & 1) r = r * b % p;
            b = b * b % p;
            e >>= 1;
        }
        return r;
    };
    uint32_t rank = 0;
    size_t rows = m.size();
    size_t cols = rows ? m[0].size() : 0;
    size_t rr = 0;
    for (size_t c = 0; c < cols && rr < rows; ++c) {
        size_t pivot = rows;
        for (size_t r = rr; r < rows; ++r)
            if (m[r][c] != 0) { pivot = r; break; }
        if (pivot == rows) continue;
        std::swap(m[rr], m[pivot]);
        uint32_t f = inv(m[rr][c]);
        for (size_t j = 0; j < cols; ++j) m[rr][j] = m[rr][j] * f % p;
        for (size_t r = 0; r < rows; ++r) {
            if (r == rr || m[r][c] == 0) continue;
            uint32_t g = m[r][c];
            for (size_t j = 0; j < cols; ++j)
                m[r][j] = (m[r][j] + (p - g) * m[rr][j]) % p;
        }
        ++rr;
        ++rank;
    }
    return rank;
}

// Dense differential matrix (codomain x domain) assembled directly from the
// coproduct tables, bypassing the engine's row construction.
std::vector<std::vector<uint32_t>> dense_differential(AdamsCobar& cobar, const SteenrodTables& tab,
                                                      uint32_t s, uint32_t t) {
    const auto& dom = cobar.words(s, t);
    const auto& cod = cobar.words(s + 1, t);
    std::vector<std::vector<uint32_t>> m(cod.size(), std::vector<uint32_t>(dom.size(), 0));
    uint32_t p = tab.prime();
    for (size_t i = 0; i < dom.size(); ++i) {
        const Word& w = dom[i];
        for (size_t pos = 0; pos < w.size(); ++pos) {
            int64_t sign = (pos % 2 == 0) ? p - 1 : 1;
            for (const auto& [l, r, c] : tab.reduced_coproduct(w[pos]).terms()) {
                Word next(w.begin(), w.begin() + static_cast<ptrdiff_t>(pos));
                next.push_back(l);
                next.push_back(r);
                next.insert(next.end(), w.begin() + static_cast<ptrdiff_t>(pos + 1), w.end());
                size_t j = cobar.word_index(s + 1, t, next);
                m[j][i] = static_cast<uint32_t>((m[j][i] + sign * c) % p);
            }
        }
    }
    return m;
}

} // namespace

TEST_CASE("Adams slice bases at p=3, frozen") {
    SteenrodTables tab(3, 16);
    AdamsCobar cobar(tab);

    CHECK(cobar.dimension(0, 0) == 1);
    CHECK(cobar.words(0, 0)[0].empty());
    CHECK(cobar.dimension(0, 4) == 0);
    CHECK(cobar.dimension(1, 1) == 1);
    CHECK(cobar.words(1, 1)[0] == Word{tau_gen(0)});
    CHECK(cobar.dimension(1, 4) == 1);
    CHECK(cobar.dimension(1, 5) == 2);
    CHECK(cobar.dimension(1, 12) == 1);
    CHECK(cobar.words(1, 12)[0] == Word{t_gen(1, 3)});

    // (2,12): [t_1|t_1^2], [tau_0 tau_1|tau_0 tau_1], [t_1^2|t_1], in order.
    REQUIRE(cobar.dimension(2, 12) == 3);
    auto m01 = mul(tau_gen(0), tau_gen(1))->second;
    CHECK((cobar.words(2, 12)[0] == Word{t_gen(1), t_gen(1, 2)}));
    CHECK(cobar.words(2, 12)[1] == (Word{m01, m01}));
    CHECK((cobar.words(2, 12)[2] == Word{t_gen(1, 2), t_gen(1)}));

    CHECK_THROWS_AS(cobar.dimension(1, 17), TruncationError);
}

TEST_CASE("Adams Ext dimensions and representatives at p=3, frozen") {
    SteenrodTables tab(3, 14);
    AdamsCobar cobar(tab);

    CHECK(cobar.ext_dimension(0, 0) == 1);
    CHECK(cobar.ext_dimension(1, 1) == 1);   // [tau_0]
    CHECK(cobar.ext_dimension(1, 4) == 1);   // [t_1]
    CHECK(cobar.ext_dimension(1, 5) == 0);
    CHECK(cobar.ext_dimension(2, 8) == 0);   // square of [t_1] dies
    CHECK(cobar.ext_dimension(2, 5) == 0);   // [tau_0]*[t_1] dies
    CHECK(cobar.ext_dimension(2, 2) == 1);   // [tau_0|tau_0]
    CHECK(cobar.ext_dimension(3, 3) == 1);
    CHECK(cobar.ext_dimension(1, 12) == 1);  // [t_1^3]
    CHECK(cobar.ext_dimension(2, 12) == 1);
    CHECK(cobar.ext_dimension(2, 9) == 1);
    CHECK(cobar.ext_dimension(3, 13) == 1);

    // The (2,12) representative is [t_1|t_1^2] + [t_1^2|t_1].
    const auto& reps = cobar.ext_basis(2, 12);
    REQUIRE(reps.size() == 1);
    CHECK(reps[0] == vec(3, {{0, 1}, {2, 1}}));

    // Every representative is a cocycle not in the boundary span.
    for (uint32_t s = 0; s <= 3; ++s) {
        for (uint32_t t = 0; t <= 14; ++t) {
            EchelonSpan bdry(3);
            for (const auto& b : cobar.boundary_basis(s, t)) bdry.insert(b);
            for (const auto& r : cobar.ext_basis(s, t)) {
                CHECK(cobar.apply_differential(s, t, r).is_zero());
                CHECK(!bdry.contains(r));
            }
        }
    }
}

TEST_CASE("Adams differential squares to zero over a window") {
    SteenrodTables tab(3, 16);
    AdamsCobar cobar(tab);
    for (uint32_t s = 0; s <= 3; ++s) {
        for (uint32_t t = 0; t <= 16; ++t) {
            const auto& rows = cobar.differential_rows(s, t);
            for (const auto& r : rows) CHECK(cobar.apply_differential(s + 1, t, r).is_zero());
        }
    }
}

TEST_CASE("tau layers split the Adams complex") {
    SteenrodTables tab(3, 14);
    AdamsCobar cobar(tab);

    CHECK(cobar.tau_homology_dimension(2, 12, 0) == 1);
    CHECK(cobar.tau_homology_dimension(2, 12, 4) == 0);
    CHECK(cobar.tau_homology_dimension(1, 1, 1) == 1);
    CHECK(cobar.tau_homology_dimension(2, 9, 1) == 1);

    // Layer dimensions add up to the full Ext dimension.
    for (uint32_t s = 0; s <= 3; ++s) {
        for (uint32_t t = 0; t <= 14; ++t) {
            uint32_t total = 0;
            for (uint32_t k : cobar.tau_layers(s, t)) total += cobar.tau_homology_dimension(s, t, k);
            CHECK(total == cobar.ext_dimension(s, t));
        }
    }
}

TEST_CASE("detection layer of frozen classes") {
    SteenrodTables tab(3, 14);
    AdamsCobar cobar(tab);

    CHECK(cobar.ce_filtration(0, 0, cobar.ext_basis(0, 0)[0]) == 0);
    CHECK(cobar.ce_filtration(1, 1, cobar.ext_basis(1, 1)[0]) == 1);
    CHECK(cobar.ce_filtration(1, 4, cobar.ext_basis(1, 4)[0]) == 0);
    CHECK(cobar.ce_filtration(2, 12, cobar.ext_basis(2, 12)[0]) == 0);
    CHECK(cobar.ce_filtration(2, 9, cobar.ext_basis(2, 9)[0]) == 1);
    CHECK(cobar.ce_filtration(3, 13, cobar.ext_basis(3, 13)[0]) == 1);

    // A coboundary has no detecting layer; the zero vector is rejected.
    SparseVector bdry = cobar.differential_rows(1, 5)[0];
    REQUIRE(!bdry.is_zero());
    CHECK_THROWS_AS(cobar.ce_filtration(2, 5, bdry), InputError);
    CHECK_THROWS_AS(cobar.ce_filtration(1, 4, SparseVector(3)), InputError);
}

TEST_CASE("graded slice bases and first page at p=3, frozen") {
    SteenrodTables st(3, 16);
    BPTables bp(3, 16);
    NovikovCobar nov(st, bp);

    // (2,12,1): v_0[t_1|t_1^2], v_0[t_1^2|t_1], v_1[t_1|t_1].
    REQUIRE(nov.dimension(2, 12, 1) == 3);
    const auto& b = nov.basis(2, 12, 1);
    CHECK(b[0].coeff == v_gen(0, 1));
    CHECK((b[0].word == Word{t_gen(1), t_gen(1, 2)}));
    CHECK(b[1].coeff == v_gen(0, 1));
    CHECK((b[1].word == Word{t_gen(1, 2), t_gen(1)}));
    CHECK(b[2].coeff == v_gen(1));
    CHECK((b[2].word == Word{t_gen(1), t_gen(1)}));

    // Its first page is one-dimensional: v_0[t_1^2|t_1] + 2 v_1[t_1|t_1].
    const auto& e2 = nov.e2_basis(2, 12, 1);
    REQUIRE(e2.size() == 1);
    CHECK(e2[0] == vec(3, {{1, 1}, {2, 2}}));

    // (1,8,1): v_0[t_1^2] + 2 v_1[t_1] spans the page.
    REQUIRE(nov.dimension(1, 8, 1) == 2);
    const auto& a2 = nov.e2_basis(1, 8, 1);
    REQUIRE(a2.size() == 1);
    CHECK(a2[0] == vec(3, {{0, 1}, {1, 2}}));

    CHECK(nov.e2_dimension(1, 4, 0) == 1);
    CHECK(nov.e2_dimension(1, 12, 0) == 1);
    CHECK(nov.e2_dimension(2, 12, 0) == 1);
    CHECK(nov.e2_dimension(0, 0, 1) == 1); // v_0
    CHECK(nov.e2_dimension(0, 0, 2) == 1); // v_0^2
    CHECK(nov.e2_dimension(1, 5, 0) == 0); // odd degree carries nothing

    // v_1 is not invariant: its coaction drops a v_0 t_1 term of the same
    // weight, so neither v_1 in s=0 nor the v_0[t_1] it kills in s=1 reaches
    // the page. This mirrors p alpha_1 = 0 one flight down.
    REQUIRE(nov.dimension(0, 4, 1) == 1);
    CHECK((nov.basis(0, 4, 1)[0] == NovElem{v_gen(1), {}}));
    REQUIRE(nov.dimension(1, 4, 1) == 1);
    CHECK((nov.basis(1, 4, 1)[0] == NovElem{v_gen(0, 1), {t_gen(1)}}));
    CHECK(nov.differential_rows(0, 4, 1)[0] == vec(3, {{0, 1}}));
    CHECK(nov.e2_dimension(0, 4, 1) == 0);
    CHECK(nov.e2_dimension(1, 4, 1) == 0);

    // class_coordinates reduces through boundaries.
    SparseVector z = nov.differential_rows(1, 12, 1)[1]; // d(v_1[t_1^2])
    REQUIRE(!z.is_zero());
    auto coords = nov.class_coordinates(2, 12, 1, z);
    REQUIRE(coords.has_value());
    CHECK((*coords)[0] == 0);
    auto bad = nov.class_coordinates(2, 12, 1, vec(3, {{0, 1}}));
    CHECK(!bad.has_value()); // v_0[t_1|t_1^2] alone is not a cocycle
}

TEST_CASE("graded differential squares to zero over a window") {
    SteenrodTables st(3, 16);
    BPTables bp(3, 16);
    NovikovCobar nov(st, bp);
    for (uint32_t k = 0; k <= 3; ++k)
        for (uint32_t s = 0; s <= 2; ++s)
            for (uint32_t t = 0; t <= 16; ++t)
                for (const auto& r : nov.differential_rows(s, t, k))
                    CHECK(nov.apply_differential(s + 1, t, k, r).is_zero());
}

TEST_CASE("integral cochains: frozen differentials at p=3") {
    SteenrodTables st(3, 20);
    BPTables bp(3, 20);
    NovikovCobar nov(st, bp);
    IntegralCobar ic(st, bp, 4);

    // The symmetric lift of the (2,12) class is an exact integral cocycle.
    auto b0 = ic.zero(2, 12);
    ic.add_term(b0, {t_gen(1), t_gen(1, 2)}, {}, TruncatedInteger(1, 3, 4));
    ic.add_term(b0, {t_gen(1, 2), t_gen(1)}, {}, TruncatedInteger(1, 3, 4));
    CHECK(ic.differential(b0).is_zero());

    // d[t_1^3] = -3[t_1|t_1^2] - 3[t_1^2|t_1]: weight 1, graded part
    // 2 v_0[t_1|t_1^2] + 2 v_0[t_1^2|t_1].
    auto h1 = ic.zero(1, 12);
    ic.add_term(h1, {t_gen(1, 3)}, {}, TruncatedInteger(1, 3, 4));
    auto dh1 = ic.differential(h1);
    CHECK(int_coeff(dh1, {t_gen(1), t_gen(1, 2)}, {}) == 81 - 3);
    CHECK(int_coeff(dh1, {t_gen(1, 2), t_gen(1)}, {}) == 81 - 3);
    CHECK(ic.min_weight(dh1) == 1);
    CHECK(ic.gr_component(dh1, 1, nov) == vec(3, {{0, 2}, {1, 2}}));
    CHECK_THROWS_AS(ic.gr_component(dh1, 2, nov), AuditError);
    CHECK_THROWS_AS(ic.gr_component(dh1, 4, nov), PrecisionError);

    // d[t_1|t_2] exercises the pushed-left normal form: the diagonal of t_2
    // leaves -v_1 in the middle slot and crossing t_1 emits 3 t_1^2.
    auto x = ic.zero(2, 20);
    ic.add_term(x, {t_gen(1), t_gen(2)}, {}, TruncatedInteger(1, 3, 4));
    auto dx = ic.differential(x);
    CHECK(int_coeff(dx, {t_gen(1), t_gen(1), t_gen(1, 3)}, {}) == 1);
    CHECK(int_coeff(dx, {t_gen(1), t_gen(1, 2), t_gen(1)}, v_gen(1)) == 81 - 1);
    CHECK(int_coeff(dx, {t_gen(1), t_gen(1), t_gen(1, 2)}, v_gen(1)) == 81 - 1);
    CHECK(int_coeff(dx, {t_gen(1, 2), t_gen(1, 2), t_gen(1)}, {}) == 81 - 3);
    CHECK(int_coeff(dx, {t_gen(1, 2), t_gen(1), t_gen(1, 2)}, {}) == 81 - 3);
    size_t nterms = 0;
    for (const auto& [w, coeff] : dx.terms) nterms += coeff.size();
    CHECK(nterms == 5);

    // Lifting and the graded part are mutually inverse on the layer.
    auto lifted = ic.lift(2, 12, 1, vec(3, {{0, 1}, {2, 2}}), nov);
    CHECK(int_coeff(lifted, {t_gen(1), t_gen(1, 2)}, {}) == 3);
    CHECK(int_coeff(lifted, {t_gen(1), t_gen(1)}, v_gen(1)) == 2);
    CHECK(ic.gr_component(lifted, 1, nov) == vec(3, {{0, 1}, {2, 2}}));
}

TEST_CASE("integral differential squares to zero and respects the grading") {
    SteenrodTables st(3, 16);
    BPTables bp(3, 16);
    IntegralCobar ic(st, bp, 5);

    std::vector<VMonomial> coeffs = {VMonomial{}, v_gen(1), v_gen(2), v_gen(1, 2)};
    for (uint32_t s = 0; s <= 2; ++s) {
        for (uint32_t t = 0; t <= 16; ++t) {
            for (const auto& v : coeffs) {
                uint32_t vd = v.degree(3);
                if (vd > t) continue;
                std::vector<Word> words;
                if (s == 0) {
                    if (t == vd) words.push_back({});
                } else {
                    Word cur;
                    sseq::detail::enumerate_words(
                        s, t - vd, 4,
                        [&](uint32_t d) -> const std::vector<SteenrodMonomial>& {
                            return st.polynomial_monomials(d);
                        },
                        cur, words);
                }
                for (const auto& w : words) {
                    auto c = ic.zero(s, t);
                    ic.add_term(c, w, v, TruncatedInteger(1, 3, 5));
                    auto dc = ic.differential(c);
                    CHECK(ic.differential(dc).is_zero());
                    // Weight can only go up from the coefficient's weight.
                    if (!dc.is_zero()) CHECK(ic.min_weight(dc) >= v.weight());
                }
            }
        }
    }
}

TEST_CASE("graded part of the integral differential matches the graded differential") {
    SteenrodTables st(3, 16);
    BPTables bp(3, 16);
    NovikovCobar nov(st, bp);
    IntegralCobar ic(st, bp, 5);

    for (uint32_t k = 0; k <= 2; ++k) {
        for (uint32_t s = 0; s <= 2; ++s) {
            for (uint32_t t = 0; t <= 16; ++t) {
                uint32_t dim = nov.dimension(s, t, k);
                for (uint32_t i = 0; i < dim; ++i) {
                    SparseVector unit = vec(3, {{i, 1}});
                    auto lifted = ic.lift(s, t, k, unit, nov);
                    auto d_int = ic.differential(lifted);
                    SparseVector d_gr = nov.apply_differential(s, t, k, unit);
                    if (!d_int.is_zero()) CHECK(ic.min_weight(d_int) >= k);
                    SparseVector extracted = d_int.is_zero() ? SparseVector(3)
                                                             : ic.gr_component(d_int, k, nov);
                    CHECK(extracted == d_gr);
                }
            }
        }
    }
}

TEST_CASE("dictionary between tau-leading words and graded elements") {
    CHECK(is_tau_leading({tau_gen(0), t_gen(1)}, 1));
    CHECK(!is_tau_leading({t_gen(1), tau_gen(0)}, 1));
    CHECK(is_tau_leading({t_gen(1), t_gen(1)}, 0));
    CHECK(!is_tau_leading({tau_gen(0)}, 0)); // tail must be polynomial
    CHECK(is_tau_leading({tau_gen(1), tau_gen(0), t_gen(1, 2)}, 2));
    CHECK(!is_tau_leading({mul(tau_gen(0), t_gen(1))->second, t_gen(1)}, 1));

    auto [v, tail] = tau_dictionary({tau_gen(1), tau_gen(0), t_gen(1, 2)}, 2);
    CHECK(v == mul(v_gen(0, 1), v_gen(1)));
    CHECK(tail == Word{t_gen(1, 2)});
    CHECK_THROWS_AS(tau_dictionary({t_gen(1)}, 1), InputError);
}

TEST_CASE("leading-term transport of frozen classes at p=3") {
    SteenrodTables st(3, 14);
    BPTables bp(3, 14);
    AdamsCobar adams(st);
    NovikovCobar nov(st, bp);

    // Unit class.
    auto unit = leading_term(adams, nov, 0, 0, adams.ext_basis(0, 0)[0]);
    CHECK(unit.filtration == 0);
    CHECK(unit.graded_cocycle == vec(3, {{0, 1}}));

    // [tau_0] lands on v_0 in weight 1.
    auto a0 = leading_term(adams, nov, 1, 1, adams.ext_basis(1, 1)[0]);
    CHECK(a0.filtration == 1);
    REQUIRE(nov.basis(0, 0, 1).size() == 1);
    CHECK(nov.basis(0, 0, 1)[0].coeff == v_gen(0, 1));
    CHECK(a0.graded_cocycle == vec(3, {{0, 1}}));

    // [tau_0|tau_0] lands on v_0^2 in weight 2.
    auto a0sq = leading_term(adams, nov, 2, 2, adams.ext_basis(2, 2)[0]);
    CHECK(a0sq.filtration == 2);
    CHECK(a0sq.graded_cocycle == vec(3, {{0, 1}}));

    // [t_1] stays in weight 0.
    auto h0 = leading_term(adams, nov, 1, 4, adams.ext_basis(1, 4)[0]);
    CHECK(h0.filtration == 0);
    CHECK(h0.graded_cocycle == vec(3, {{0, 1}}));

    // The weight-1 class in (2,9) maps to the v_0[t_1^2] + 2 v_1[t_1] line.
    auto alpha2 = leading_term(adams, nov, 2, 9, adams.ext_basis(2, 9)[0]);
    CHECK(alpha2.filtration == 1);
    auto coords = nov.class_coordinates(1, 8, 1, alpha2.graded_cocycle);
    REQUIRE(coords.has_value());
    CHECK((*coords)[0] != 0);

    // The (3,13) class detects through weight 1 onto the (2,12,1) page line.
    auto a0b0 = leading_term(adams, nov, 3, 13, adams.ext_basis(3, 13)[0]);
    CHECK(a0b0.filtration == 1);
    auto coords2 = nov.class_coordinates(2, 12, 1, a0b0.graded_cocycle);
    REQUIRE(coords2.has_value());
    CHECK((*coords2)[0] != 0);

    // (1,12): [t_1^3] is already polynomial, weight 0.
    auto h1 = leading_term(adams, nov, 1, 12, adams.ext_basis(1, 12)[0]);
    CHECK(h1.filtration == 0);
    CHECK(nov.basis(1, 12, 0)[h1.graded_cocycle.leading_index().value()].word ==
          Word{t_gen(1, 3)});
}

TEST_CASE("Ext dimensions agree with a dense oracle through t=10") {
    SteenrodTables tab(3, 10);
    AdamsCobar cobar(tab);
    for (uint32_t s = 0; s <= 4; ++s) {
        for (uint32_t t = 0; t <= 10; ++t) {
            auto out = dense_differential(cobar, tab, s, t);
            uint32_t rank_out = dense_rank(out, 3);
            uint32_t rank_in = 0;
            if (s > 0) rank_in = dense_rank(dense_differential(cobar, tab, s - 1, t), 3);
            uint32_t dim = cobar.dimension(s, t);
            uint32_t expect = dim - rank_out - rank_in;
            CHECK(cobar.ext_dimension(s, t) == expect);
        }
    }
}
