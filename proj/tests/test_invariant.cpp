#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "so/invariant.hpp"

using namespace so;

namespace {

CharPolyData gl(uint64_t p, int N, const std::vector<Int>& coeffs) {
    return CharPolyData::make_gl(p, N, coeffs);
}

} // namespace

TEST_CASE("newton polygon frozen examples") {
    // x^2 + 2 over Q_2: single segment of slope 1/2.
    auto s1 = newton_polygon(gl(2, 4, {0, 2}));
    REQUIRE(s1.size() == 1);
    CHECK(s1[0] == NewtonSegment{1, 2, 2});

    // x^2 + 2x + 4: the point (1,1) lies on the hull, so two unit segments.
    auto s2 = newton_polygon(gl(2, 6, {2, 4}));
    REQUIRE(s2.size() == 2);
    CHECK(s2[0] == NewtonSegment{1, 1, 1});
    CHECK(s2[1] == NewtonSegment{1, 1, 1});

    // x^3 + 4: single segment of slope 2/3.
    auto s3 = newton_polygon(gl(2, 5, {0, 0, 4}));
    REQUIRE(s3.size() == 1);
    CHECK(s3[0] == NewtonSegment{2, 3, 3});

    // (x - 3)(x - 9) = x^2 - 12x + 27: slopes reported ascending.
    auto s4 = newton_polygon(gl(3, 4, {-12, 27}));
    REQUIRE(s4.size() == 2);
    CHECK(s4[0] == NewtonSegment{1, 1, 1});
    CHECK(s4[1] == NewtonSegment{2, 1, 1});

    // sp rank 2: chi = x^4 + x^2 + 3 has a level part and a slope-1/2 part.
    auto s5 = newton_polygon(CharPolyData::make_sp(3, 3, {1, 3}));
    REQUIRE(s5.size() == 2);
    CHECK(s5[0] == NewtonSegment{0, 1, 2});
    CHECK(s5[1] == NewtonSegment{1, 2, 2});
}

TEST_CASE("newton polygon precision policing") {
    // Constant term saturated at working precision: x^2 + x + 4 at N=2, p=2.
    // The discriminant -15 is a unit, so construction itself succeeds.
    auto chi = gl(2, 2, {1, 4});
    CHECK_THROWS_AS(newton_polygon(chi), precision_error);
}

TEST_CASE("discriminant valuations") {
    CHECK(discriminant_val(gl(2, 4, {0, 2})) == 3);    // x^2+2: ord(-8)
    CHECK(discriminant_val(gl(5, 4, {0, -5})) == 1);   // x^2-5: ord(20)
    CHECK(discriminant_val(gl(2, 5, {0, 0, 4})) == 4); // x^3+4: ord(-432)
    CHECK(discriminant_val(gl(3, 4, {0, -18})) == 2);  // x^2-18: ord(72)
    // Saturation fails construction with a doubled-precision hint.
    try {
        gl(2, 2, {0, 2});
        CHECK(false);
    } catch (const precision_error& e) {
        CHECK(e.suggested_N == 4);
    }
}

TEST_CASE("translation to canonical form") {
    // x^2 + 2: constant order 1 is coprime to n, no iteration.
    auto t1 = translate_to_canonical(gl(2, 4, {0, 2}));
    CHECK(t1.a == 0);
    CHECK(t1.d_gamma == 1);

    // x^2 + 2x + 4 at N=6: d_gamma = 2 regardless of the starting translate.
    auto chi = gl(2, 6, {2, 4});
    CHECK(translate_to_canonical(chi).d_gamma == 2);
    for (Int start : {Int(-1), Int(2), Int(5)}) {
        CHECK(translate_to_canonical(chi, start).d_gamma == 2);
    }

    // x^3 + 4: order 2 not divisible by 3, stops immediately.
    auto t3 = translate_to_canonical(gl(2, 5, {0, 0, 4}));
    CHECK(t3.a == 0);
    CHECK(t3.d_gamma == 2);

    // Reducible inputs are rejected.
    CHECK_THROWS_AS(translate_to_canonical(gl(3, 4, {0, -1})), domain_error);   // x^2-1
    CHECK_THROWS_AS(translate_to_canonical(gl(3, 4, {-12, 27})), domain_error); // two slopes
}

TEST_CASE("translated polynomial is the shift of the original") {
    auto chi = gl(2, 6, {2, 4});
    auto tr = translate_to_canonical(chi, Int(-1));
    // The iteration walks -1 back to the stable translate a = 0.
    CHECK(tr.a == 0);
    // chi_a lists (c_1, ..., c_n) of chi(x+a); its last entry is chi(a).
    Int val = tr.a * tr.a + 2 * tr.a + 4;
    Int mod = 64;
    Int expect = ((val % mod) + mod) % mod;
    CHECK(Int(tr.chi_a.back().value()) == expect);
}

TEST_CASE("classification and Serre invariants") {
    auto r1 = classify_and_serre(gl(2, 4, {0, 2}));
    CHECK(r1.ramification == Ramification::totally_ramified);
    CHECK(r1.d_gamma == 1);
    CHECK(r1.serre == 0);
    CHECK(r1.res_deg == 1);
    CHECK(r1.d_bar == 1);
    CHECK(r1.disc_val == 3);

    // x^2 - 18 = x^2 - 2*9 with 2 a non-residue mod 3: unramified, d = 2.
    auto r2 = classify_and_serre(gl(3, 4, {0, -18}));
    CHECK(r2.ramification == Ramification::unramified);
    CHECK(r2.d_gamma == 2);
    CHECK(r2.serre == 1);
    CHECK(r2.res_deg == 2);
    CHECK(r2.d_bar == 2);

    // x^3 + 4: d = 2, S = (2-1)(3-1)/2 = 1.
    auto r3 = classify_and_serre(gl(2, 5, {0, 0, 4}));
    CHECK(r3.ramification == Ramification::totally_ramified);
    CHECK(r3.d_gamma == 2);
    CHECK(r3.serre == 1);

    // Depth zero unramified: x^2 + x + 1 is irreducible mod 2.
    auto r4 = classify_and_serre(gl(2, 3, {1, 1}));
    CHECK(r4.ramification == Ramification::unramified);
    CHECK(r4.d_gamma == 0);
    CHECK(r4.serre == 0);
    CHECK(r4.d_bar == 0);

    // x^2 + x + 1 over Q_3 generates the ramified Q_3(sqrt(-3)); the
    // reduction is (x-1)^2, so one translation step is needed.
    auto r5 = classify_and_serre(gl(3, 4, {1, 1}));
    CHECK(r5.ramification == Ramification::totally_ramified);
    CHECK(r5.d_gamma == 1);
    CHECK(r5.serre == 0);
    CHECK(r5.disc_val == 1);
}

TEST_CASE("serre-discriminant consistency") {
    // ord(disc chi) = ord(field disc) + 2 S(gamma).
    struct Case {
        uint64_t p;
        std::vector<Int> coeffs;
        int field_disc;
    };
    const std::vector<Case> cases = {
        {3, {0, -18}, 0},  // unramified quadratic
        {3, {0, -3}, 1},   // Eisenstein x^2 - 3
        {3, {0, -6}, 1},   // x^2 - 6
        {5, {0, -5}, 1},   // x^2 - 5
        {3, {1, 1}, 1},    // ramified quadratic after translation
        {2, {0, 0, 4}, 2}, // tame cubic: field disc ord e - 1 = 2
    };
    for (const auto& c : cases) {
        auto rep = classify_and_serre(CharPolyData::make_gl(c.p, 8, c.coeffs));
        CHECK(rep.disc_val == c.field_disc + 2 * rep.serre);
    }
}

TEST_CASE("translation bound property") {
    // (n-1) * d_gamma <= ord(disc).
    const std::vector<std::pair<uint64_t, std::vector<Int>>> cases = {
        {2, {0, 2}},   {2, {2, 4}},    {2, {0, 0, 4}},
        {3, {0, -18}}, {2, {0, 0, 2}}, {5, {0, -5}},
    };
    for (const auto& [p, coeffs] : cases) {
        auto chi = CharPolyData::make_gl(p, 8, coeffs);
        auto tr = translate_to_canonical(chi);
        int n = chi.n();
        CHECK((n - 1) * tr.d_gamma <= discriminant_val(chi));
    }
}

TEST_CASE("precision retry wrapper") {
    // x^2 + 2 needs N >= 4 to certify ord(disc) = 3; start at 1.
    auto rep = classify_with_retry(2, {0, 2}, 1);
    CHECK(rep.d_gamma == 1);
    CHECK(rep.serre == 0);
    CHECK(rep.disc_val == 3);
}

TEST_CASE("non-prime degree requires an external serre invariant") {
    // x^4 + 2 is Eisenstein with disc order 11, so N = 12 certifies it.
    auto chi = gl(2, 12, {0, 0, 0, 2});
    CHECK_THROWS_AS(classify_and_serre(chi), domain_error);
    auto rep = classify_and_serre(chi, 3);
    CHECK(rep.serre == 3);
    CHECK(rep.ramification == Ramification::totally_ramified);
    CHECK(rep.d_gamma == 1);
    CHECK(rep.d_bar == 1);
}

TEST_CASE("hensel split frozen examples") {
    // x^2 - 3x + 2 over Z/16 at fbar = x + 1: roots 1 and 2.
    auto [f1, g1] = hensel_split(gl(2, 4, {-3, 2}), {1, 1});
    REQUIRE(f1.size() == 2);
    REQUIRE(g1.size() == 2);
    CHECK(f1[0].value() == 15);
    CHECK(f1[1].value() == 1);
    CHECK(g1[0].value() == 14);
    CHECK(g1[1].value() == 1);

    // x^3 - x over Z/27 at fbar = x: (x, x^2 - 1).
    auto [f2, g2] = hensel_split(gl(3, 3, {0, -1, 0}), {0, 1});
    REQUIRE(f2.size() == 2);
    CHECK(f2[0].value() == 0);
    REQUIRE(g2.size() == 3);
    CHECK(g2[0].value() == 26);
    CHECK(g2[1].value() == 0);
    CHECK(g2[2].value() == 1);

    // x^2 + x + 3 over Z/125, lifting the reduction root 1: roots 91 and 33.
    auto [f3, g3] = hensel_split(gl(5, 3, {1, 3}), {4, 1});
    CHECK(f3[0].value() == 125 - 91);
    CHECK(g3[0].value() == 125 - 33);
    CHECK((f3[0] * g3[0]).value() == 3);
    CHECK((f3[0] + g3[0]).value() == 1);
}

TEST_CASE("hensel split rejects bad factorizations") {
    // x^2 + x + 6 reduces to x^2 + x + 1 mod 5; x - 1 is not a factor.
    CHECK_THROWS_AS(hensel_split(gl(5, 3, {1, 6}), {4, 1}), domain_error);
    // x^2 + 2x + 4 reduces to x^2 mod 2: the cofactor of x is not coprime.
    CHECK_THROWS_AS(hensel_split(gl(2, 3, {2, 4}), {0, 1}), domain_error);
    // x^2 - 2x + 4 reduces to (x-1)^2 mod 3.
    CHECK_THROWS_AS(hensel_split(gl(3, 4, {-2, 4}), {2, 1}), domain_error);
    // Degree bounds: the factor must be proper.
    CHECK_THROWS_AS(hensel_split(gl(5, 3, {1, 3}), {1}), domain_error);
    CHECK_THROWS_AS(hensel_split(gl(5, 3, {1, 3}), {3, 1, 1}), domain_error);
}

TEST_CASE("hensel split of a ramified times linear product") {
    // chi = (x^2 + 2)(x - 1) = x^3 - x^2 + 2x - 2 over Z/64; the reduction
    // x^2 (x + 1) splits at fbar = x + 1.
    auto chi = gl(2, 6, {-1, 2, -2});
    auto [f, g] = hensel_split(chi, {1, 1});
    REQUIRE(f.size() == 2);
    REQUIRE(g.size() == 3);
    CHECK(f[0].value() == 63); // f = x - 1
    CHECK(g[0].value() == 2);  // g = x^2 + 2
    CHECK(g[1].value() == 0);
    // disc(chi) = disc(f) * disc(g) * Res(f, g)^2 and the resultant of a
    // coprime split is a unit: ord 3 = 0 + 3 + 0.
    CHECK(discriminant_val(chi) == 3);
    CHECK(discriminant_val(gl(2, 6, {0, 2})) == 3);
}

TEST_CASE("sigma descend for u") {
    // chi = x^2 + p: psi = x^2 + eps * p for odd p with non-residue eps.
    for (uint64_t p : {3ull, 5ull}) {
        uint64_t eps = least_non_residue(p);
        auto chi = CharPolyData::make_u(p, 4, {{0, 0}, {Int(p), 0}});
        auto psi = sigma_descend(chi);
        CHECK(psi.algebra() == Algebra::gl);
        CHECK(psi.base_coeffs()[0].value() == 0);
        CHECK(psi.base_coeffs()[1].value() == eps * p);
    }

    // Anti-hermitian trace c_1 = 2t: psi_1 = 2 eps = 4, psi_2 = eps * 1 = 2.
    {
        auto chi = CharPolyData::make_u(3, 4, {{0, 2}, {1, 0}});
        auto psi = sigma_descend(chi);
        CHECK(psi.base_coeffs()[0].value() == 4);
        CHECK(psi.base_coeffs()[1].value() == 2);
    }

    // Symmetry violations are rejected at construction.
    CHECK_THROWS_AS(CharPolyData::make_u(3, 4, {{1, 0}, {1, 0}}), domain_error);
    CHECK_THROWS_AS(CharPolyData::make_u(3, 4, {{0, 1}, {0, 1}}), domain_error);
}

TEST_CASE("sigma descend for sp") {
    // chi = x^4 + x^2 + 3 descends to psi = y^2 + y + 3.
    auto chi = CharPolyData::make_sp(3, 6, {1, 3});
    CHECK(chi.degree() == 4);
    CHECK(chi.n() == 2);
    auto psi = sigma_descend(chi);
    CHECK(psi.algebra() == Algebra::gl);
    CHECK(psi.n() == 2);
    CHECK(psi.base_coeffs()[0].value() == 1);
    CHECK(psi.base_coeffs()[1].value() == 3);
    CHECK_THROWS_AS(sigma_descend(psi), domain_error); // gl input rejected
}

TEST_CASE("trace zero unit") {
    for (uint64_t p : {3ull, 5ull, 7ull}) {
        auto alpha = trace_zero_unit(p, 3);
        auto s = alpha.sigma();
        CHECK((alpha + s).is_zero());
        CHECK(!(alpha * s).is_zero());
    }
    auto alpha2 = trace_zero_unit(2, 3);
    CHECK((alpha2 + alpha2.sigma()).is_zero());
    CHECK(!(alpha2 * alpha2.sigma()).is_zero());
}

TEST_CASE("json instance parsing") {
    auto chi = parse_instance_json(
        R"({"p": 2, "N": 4, "algebra": "gl", "n": 2, "coeffs": ["0", "2"]})");
    CHECK(chi.algebra() == Algebra::gl);
    CHECK(chi.n() == 2);
    CHECK(chi.precision() == 4);
    CHECK(chi.base_coeffs()[1].value() == 2);

    auto chiu = parse_instance_json(
        R"({"p": 3, "N": 4, "algebra": "u", "n": 2, "coeffs": [["0", "2"], ["3", "0"]]})");
    CHECK(chiu.algebra() == Algebra::u);
    CHECK(chiu.ext_coeffs()[0].b().value() == 2);

    auto chisp = parse_instance_json(
        R"({"p": 3, "N": 6, "algebra": "sp", "n": 2, "coeffs": ["1", "3"]})");
    CHECK(chisp.algebra() == Algebra::sp);
    CHECK(chisp.degree() == 4);

    CHECK_THROWS_AS(
        parse_instance_json(
            R"({"p": 2, "N": 4, "algebra": "gl", "n": 3, "coeffs": ["0", "2"]})"),
        domain_error);
    CHECK_THROWS_AS(parse_instance_json("not json"), domain_error);
}
