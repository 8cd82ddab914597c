#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "so/counting.hpp"
#include "so/oracle.hpp"
#include "so/qsym.hpp"
#include "so/ring.hpp"

#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

using namespace so;

namespace {

Rational rat(long long num, long long den) { return Rational(num) / Rational(den); }

long long kappa_expect(const FiberShape& fs, uint64_t q) {
    return fiber_count_kappa(fs).eval(Rational(q)).convert_to<long long>();
}

long long poly_at(const QPoly& p, uint64_t q) {
    return p.eval(Rational(q)).convert_to<long long>();
}

std::string serialize_basis(const GlSublattice& s) {
    std::ostringstream os;
    for (const auto& row : s.basis) {
        for (const auto& e : row) os << e << ",";
        os << ";";
    }
    return os.str();
}

std::string serialize_basis(const FormSublattice& s) {
    std::ostringstream os;
    for (const auto& row : s.basis) {
        for (const auto& e : row) os << e.first << "+" << e.second << "t,";
        os << ";";
    }
    return os.str();
}

} // namespace

TEST_CASE("fiber counts over a 2x2 matrix carrier") {
    // chi = x^2 + 2 at p = 2: the volume drops once and then stabilizes.
    {
        auto e1 = count_fiber(2, 1, Algebra::gl, 2, {0, 2});
        CHECK(e1.raw_count == 4);
        CHECK(e1.volume == Rational(1));
        CHECK(!e1.stabilized);
        CHECK(e1.p == 2);
        CHECK(e1.N == 1);
        CHECK(e1.n == 2);
        CHECK(e1.algebra == Algebra::gl);

        auto e2 = count_fiber(2, 2, Algebra::gl, 2, {0, 2});
        CHECK(e2.raw_count == 12);
        CHECK(e2.volume == rat(3, 4));
        CHECK(!e2.stabilized);

        auto e3 = count_fiber(2, 3, Algebra::gl, 2, {0, 2});
        CHECK(e3.raw_count == 48);
        CHECK(e3.volume == rat(3, 4));
        CHECK(e3.stabilized);
    }
    // chi = x^2 - 1 at p = 3 splits; the volume is already exact at N = 1
    // but stabilization needs the N = 2 confirmation.
    {
        auto e1 = count_fiber(3, 1, Algebra::gl, 2, {0, -1});
        CHECK(e1.raw_count == 12);
        CHECK(e1.volume == rat(4, 3));
        CHECK(!e1.stabilized);

        auto e2 = count_fiber(3, 2, Algebra::gl, 2, {0, -1});
        CHECK(e2.raw_count == 108);
        CHECK(e2.volume == rat(4, 3));
        CHECK(e2.stabilized);
    }
}

TEST_CASE("stratum filters split a 2x2 fiber by cokernel type") {
    // chi = x^2 - 9 at p = 3, N = 3: the fiber splits into the scalar-like
    // part (type (1,1)) and the corank-one part (type (2)), and the refined
    // rank separates the same two sets.
    std::vector<Int> chi = {0, -9};
    auto whole = count_fiber(3, 3, Algebra::gl, 2, chi);
    CHECK(whole.raw_count == 972);
    CHECK(whole.volume == rat(4, 3));
    CHECK(!whole.stabilized);

    StratumFilter t2;
    t2.type = std::vector<int>{2};
    StratumFilter t11;
    t11.type = std::vector<int>{1, 1};
    StratumFilter r1;
    r1.refined_rank = 1;
    StratumFilter r0;
    r0.refined_rank = 0;

    auto c_t2 = count_fiber(3, 3, Algebra::gl, 2, chi, t2);
    auto c_t11 = count_fiber(3, 3, Algebra::gl, 2, chi, t11);
    auto c_r1 = count_fiber(3, 3, Algebra::gl, 2, chi, r1);
    auto c_r0 = count_fiber(3, 3, Algebra::gl, 2, chi, r0);
    CHECK(c_t2.raw_count == 648);
    CHECK(c_t11.raw_count == 324);
    CHECK(c_r1.raw_count == 648);
    CHECK(c_r0.raw_count == 324);
    CHECK(c_t2.raw_count + c_t11.raw_count == whole.raw_count);

    // Filters are conjunctive.
    StratumFilter both;
    both.type = std::vector<int>{2};
    both.refined_rank = 1;
    CHECK(count_fiber(3, 3, Algebra::gl, 2, chi, both).raw_count == 648);
    StratumFilter clash;
    clash.type = std::vector<int>{2};
    clash.refined_rank = 0;
    CHECK(count_fiber(3, 3, Algebra::gl, 2, chi, clash).raw_count == 0);
}

TEST_CASE("fiber counts over a 3x3 matrix carrier") {
    // chi = x^3 + 2 at p = 2 (Eisenstein): volume 21/32 from N = 2 on.
    auto e2 = count_fiber(2, 2, Algebra::gl, 3, {0, 0, 2});
    CHECK(e2.raw_count == 2688);
    CHECK(e2.volume == rat(21, 32));
    CHECK(!e2.stabilized);

    auto e3 = count_fiber(2, 3, Algebra::gl, 3, {0, 0, 2});
    CHECK(e3.raw_count == 172032);
    CHECK(e3.volume == rat(21, 32));
    CHECK(e3.stabilized);
}

TEST_CASE("fast and reference enumerations agree") {
    auto f_gl = count_fiber(2, 2, Algebra::gl, 2, {0, 2});
    auto n_gl = count_fiber_naive(2, 2, Algebra::gl, 2, {0, 2});
    CHECK(f_gl.raw_count == n_gl.raw_count);
    CHECK(f_gl.volume == n_gl.volume);

    std::vector<std::pair<Int, Int>> uc = {{0, 0}, {2, 0}};
    auto f_u = count_fiber(2, 2, 2, uc);
    auto n_u = count_fiber_naive(2, 2, 2, uc);
    CHECK(f_u.raw_count == 12);
    CHECK(n_u.raw_count == 12);

    auto f_sp = count_fiber(3, 1, Algebra::sp, 2, {0, -1});
    auto n_sp = count_fiber_naive(3, 1, Algebra::sp, 2, {0, -1});
    CHECK(f_sp.raw_count == n_sp.raw_count);
}

TEST_CASE("reference enumeration matches a direct matrix tally") {
    // Tally characteristic polynomials of every 2x2 matrix over Z/4 with the
    // division-free routine on truncated scalars, then compare the per-target
    // counts with the reference fiber enumeration.
    std::map<std::pair<uint64_t, uint64_t>, long long> tally;
    for (uint64_t a = 0; a < 4; ++a)
        for (uint64_t b = 0; b < 4; ++b)
            for (uint64_t c = 0; c < 4; ++c)
                for (uint64_t d = 0; d < 4; ++d) {
                    Mat<TruncatedInt> X(2, TruncatedInt::zero(2, 2));
                    X.at(0, 0) = TruncatedInt(2, 2, Int(a));
                    X.at(0, 1) = TruncatedInt(2, 2, Int(b));
                    X.at(1, 0) = TruncatedInt(2, 2, Int(c));
                    X.at(1, 1) = TruncatedInt(2, 2, Int(d));
                    auto cs = char_poly(X);
                    ++tally[{cs[0].value(), cs[1].value()}];
                }
    long long total = 0;
    for (uint64_t c1 = 0; c1 < 4; ++c1)
        for (uint64_t c2 = 0; c2 < 4; ++c2) {
            auto it = tally.find({c1, c2});
            long long want = it == tally.end() ? 0 : it->second;
            auto est = count_fiber_naive(2, 2, Algebra::gl, 2, {Int(c1), Int(c2)});
            CHECK(est.raw_count == want);
            total += est.raw_count;
        }
    CHECK(total == 256);
}

TEST_CASE("fiber counts over anti-hermitian carriers") {
    // chi = x^2 - 3 at p = 3.
    std::vector<std::pair<Int, Int>> c3 = {{0, 0}, {-3, 0}};
    auto e1 = count_fiber(3, 1, 2, c3);
    CHECK(e1.raw_count == 9);
    CHECK(e1.volume == Rational(1));
    auto e2 = count_fiber(3, 2, 2, c3);
    CHECK(e2.raw_count == 72);
    CHECK(e2.volume == rat(8, 9));
    CHECK(!e2.stabilized);
    auto e3 = count_fiber(3, 3, 2, c3);
    CHECK(e3.raw_count == 648);
    CHECK(e3.volume == rat(8, 9));
    CHECK(e3.stabilized);

    // chi = x^2 at p = 3, lowest precision.
    std::vector<std::pair<Int, Int>> c0 = {{0, 0}, {0, 0}};
    auto z1 = count_fiber(3, 1, 2, c0);
    CHECK(z1.raw_count == 9);
    CHECK(z1.volume == Rational(1));

    // Rank 3: chi = x^3 + 1 at p = 2, N = 1, against the reference path.
    std::vector<std::pair<Int, Int>> cu3 = {{0, 0}, {0, 0}, {1, 0}};
    auto u3f = count_fiber(2, 1, 3, cu3);
    auto u3n = count_fiber_naive(2, 1, 3, cu3);
    CHECK(u3f.raw_count == 72);
    CHECK(u3n.raw_count == 72);
    CHECK(u3f.volume == rat(9, 8));
}

TEST_CASE("anti-hermitian strata by Jordan type of the image lattice") {
    // chi = x^2 + 2 at p = 2, N = 3: all of the fiber sits over Jordan type
    // (1, 1); the degenerate type (0, 2) carries nothing.
    std::vector<std::pair<Int, Int>> c = {{0, 0}, {2, 0}};
    auto whole = count_fiber(2, 3, 2, c);
    CHECK(whole.raw_count == 48);
    CHECK(whole.volume == rat(3, 4));
    CHECK(whole.stabilized);

    StratumFilter j11;
    j11.jordan = JordanType(1, 1, JordanType::Flavor::hermitian);
    CHECK(count_fiber(2, 3, 2, c, j11).raw_count == 48);

    StratumFilter j02;
    j02.jordan = JordanType(0, 2, JordanType::Flavor::hermitian);
    CHECK(count_fiber(2, 3, 2, c, j02).raw_count == 0);

    StratumFilter t1;
    t1.type = std::vector<int>{1};
    CHECK(count_fiber(2, 3, 2, c, t1).raw_count == 48);
}

TEST_CASE("fiber counts over symplectic carriers") {
    // Size 2: chi = x^2 - 1 at p = 3.
    auto e1 = count_fiber(3, 1, Algebra::sp, 2, {0, -1});
    CHECK(e1.raw_count == 12);
    CHECK(e1.volume == rat(4, 3));
    CHECK(!e1.stabilized);
    auto e2 = count_fiber(3, 2, Algebra::sp, 2, {0, -1});
    CHECK(e2.raw_count == 108);
    CHECK(e2.volume == rat(4, 3));
    CHECK(e2.stabilized);

    // Size 4: chi = x^4 + x^2 + 2 via even coefficients, p = 2, N = 2.
    std::vector<Int> c4 = {0, 1, 0, 2};
    auto s4 = count_fiber(2, 2, Algebra::sp, 4, c4);
    CHECK(s4.raw_count == 76800);
    CHECK(s4.volume == rat(75, 64));
    CHECK(!s4.stabilized);

    StratumFilter j11;
    j11.jordan = JordanType(1, 1, JordanType::Flavor::symplectic);
    CHECK(count_fiber(2, 2, Algebra::sp, 4, c4, j11).raw_count == 76800);
    StratumFilter t1;
    t1.type = std::vector<int>{1};
    CHECK(count_fiber(2, 2, Algebra::sp, 4, c4, t1).raw_count == 76800);
}

TEST_CASE("base-ring unitary coefficients route through the pair overload") {
    auto via_enum = count_fiber(3, 1, Algebra::u, 2, {0, -3});
    std::vector<std::pair<Int, Int>> pairs = {{0, 0}, {-3, 0}};
    auto via_pairs = count_fiber(3, 1, 2, pairs);
    CHECK(via_enum.raw_count == via_pairs.raw_count);
    CHECK(via_enum.volume == via_pairs.volume);
    CHECK(via_enum.algebra == Algebra::u);
}

TEST_CASE("stabilization scan stops at the first repeated volume") {
    auto scan = stabilization_scan(2, 1, 5, Algebra::gl, 2, {0, 2});
    REQUIRE(scan.size() == 3);
    CHECK(scan[0].N == 1);
    CHECK(scan[1].N == 2);
    CHECK(scan[2].N == 3);
    CHECK(scan[0].volume == Rational(1));
    CHECK(scan[1].volume == rat(3, 4));
    CHECK(scan[2].volume == rat(3, 4));
    CHECK(!scan[0].stabilized);
    CHECK(!scan[1].stabilized);
    CHECK(scan[2].stabilized);

    std::vector<std::pair<Int, Int>> uc = {{0, 0}, {-3, 0}};
    auto uscan = stabilization_scan(3, 1, 5, 2, uc);
    REQUIRE(uscan.size() == 3);
    CHECK(uscan[2].volume == rat(8, 9));
    CHECK(uscan[2].stabilized);

    CHECK_THROWS_AS(stabilization_scan(2, 0, 3, Algebra::gl, 2, {0, 2}), domain_error);
    CHECK_THROWS_AS(stabilization_scan(2, 3, 2, Algebra::gl, 2, {0, 2}), domain_error);
}

TEST_CASE("input validation for fiber counts") {
    CHECK_THROWS_AS(count_fiber(4, 1, Algebra::gl, 2, {0, 1}), domain_error);
    CHECK_THROWS_AS(count_fiber(1, 1, Algebra::gl, 2, {0, 1}), domain_error);
    CHECK_THROWS_AS(count_fiber(2, 0, Algebra::gl, 2, {0, 1}), domain_error);
    CHECK_THROWS_AS(count_fiber(2, 1, Algebra::gl, 0, {}), domain_error);
    CHECK_THROWS_AS(
        count_fiber(2, 1, Algebra::gl, 9, std::vector<Int>(9, 0)), domain_error);
    CHECK_THROWS_AS(count_fiber(2, 1, Algebra::gl, 2, {1}), domain_error);

    // sp needs an even size and vanishing odd-degree coefficients.
    CHECK_THROWS_AS(count_fiber(3, 1, Algebra::sp, 3, {0, 0, 1}), domain_error);
    CHECK_THROWS_AS(count_fiber(3, 1, Algebra::sp, 2, {1, -1}), domain_error);

    // u coefficients must sit on the anti-hermitian symmetry line.
    std::vector<std::pair<Int, Int>> bad = {{1, 0}, {0, 0}};
    CHECK_THROWS_AS(count_fiber(3, 1, 2, bad), domain_error);

    // Jordan restrictions need a form; the flavor must match the carrier.
    StratumFilter jh;
    jh.jordan = JordanType(1, 1, JordanType::Flavor::hermitian);
    CHECK_THROWS_AS(count_fiber(2, 1, Algebra::gl, 2, {0, 1}, jh), domain_error);
    CHECK_THROWS_AS(count_fiber(3, 1, Algebra::sp, 2, {0, -1}, jh), domain_error);
    StratumFilter js;
    js.jordan = JordanType(1, 1, JordanType::Flavor::symplectic);
    std::vector<std::pair<Int, Int>> uc = {{0, 0}, {-3, 0}};
    CHECK_THROWS_AS(count_fiber(3, 1, 2, uc, js), domain_error);
}

TEST_CASE("uncertified elementary divisors raise a precision hint") {
    // Every point of the x^2 fiber at N = 1 has a saturated pivot, so asking
    // for its cokernel type cannot be certified; the retry hint is N + 1.
    std::vector<std::pair<Int, Int>> c0 = {{0, 0}, {0, 0}};
    StratumFilter t1;
    t1.type = std::vector<int>{1};
    try {
        count_fiber(2, 1, 2, c0, t1);
        FAIL("expected a precision error");
    } catch (const precision_error& e) {
        CHECK(e.suggested_N == 2);
    }
}

TEST_CASE("node budgets gate enumeration before it starts") {
    // 3x3 over Z/27 needs 3^24 nodes, over the default budget of 2^30.
    CHECK_THROWS_AS(count_fiber(3, 3, Algebra::gl, 3, {0, 0, 2}), budget_error);

    // Explicit budgets: the 2x2 fast path at p = 2, N = 3 visits 2^9 nodes.
    CHECK_THROWS_AS(
        count_fiber(2, 3, Algebra::gl, 2, {0, 2}, {}, 100), budget_error);
    CHECK(count_fiber(2, 3, Algebra::gl, 2, {0, 2}, {}, 1000).raw_count == 48);
    CHECK_THROWS_AS(count_fiber(2, 3, Algebra::gl, 2, {0, 2}, {}, 0), domain_error);
    CHECK_THROWS_AS(count_fiber(2, 3, Algebra::gl, 2, {0, 2}, {}, -7), domain_error);

    // The environment variable fills in only when no budget is passed.
    setenv("SO_BUDGET", "100", 1);
    CHECK_THROWS_AS(count_fiber(2, 3, Algebra::gl, 2, {0, 2}), budget_error);
    CHECK(count_fiber(2, 3, Algebra::gl, 2, {0, 2}, {}, 1000).raw_count == 48);
    unsetenv("SO_BUDGET");
    CHECK(count_fiber(2, 3, Algebra::gl, 2, {0, 2}).raw_count == 48);
}

TEST_CASE("sublattice enumeration matches the closed-form counts") {
    // Totals and per-type splits against the lattice-counting polynomials.
    struct Row {
        uint64_t p;
        int n, K;
        long long total;
    };
    for (const Row& r : {Row{2, 2, 1, 3}, Row{2, 2, 2, 7}, Row{3, 2, 2, 13},
                         Row{2, 3, 1, 7}, Row{2, 3, 2, 35}, Row{3, 2, 3, 40}}) {
        auto subs = enumerate_sublattices(r.p, r.n, r.K);
        CHECK(static_cast<long long>(subs.size()) == r.total);

        std::map<std::vector<int>, long long> by_type;
        std::set<std::string> distinct;
        for (const auto& s : subs) {
            ++by_type[s.type];
            distinct.insert(serialize_basis(s));
            int sum = 0;
            for (int e : s.type) {
                CHECK(e > 0);
                sum += e;
            }
            CHECK(sum == r.K);
        }
        CHECK(static_cast<long long>(distinct.size()) == r.total);
        for (const auto& [parts, cnt] : by_type)
            CHECK(cnt == poly_at(c_type(parts, r.n), r.p));
    }

    // Specific splits.
    {
        auto subs = enumerate_sublattices(2, 2, 2);
        std::map<std::vector<int>, long long> by_type;
        for (const auto& s : subs) ++by_type[s.type];
        CHECK(by_type[{1, 1}] == 1);
        CHECK(by_type[{2}] == 6);
    }
    {
        auto subs = enumerate_sublattices(3, 2, 3);
        std::map<std::vector<int>, long long> by_type;
        for (const auto& s : subs) ++by_type[s.type];
        CHECK(by_type[{1, 2}] == 4);
        CHECK(by_type[{3}] == 36);
    }

    // Hermite-form structure: upper triangular, p-power diagonal, entries to
    // the right of the diagonal reduced below it.
    for (const auto& s : enumerate_sublattices(2, 2, 2)) {
        CHECK(s.basis[1][0] == 0);
        Int prod = s.basis[0][0] * s.basis[1][1];
        CHECK(prod == 4);
        for (int i = 0; i < 2; ++i)
            for (int j = i + 1; j < 2; ++j) {
                CHECK(s.basis[i][j] >= 0);
                CHECK(s.basis[i][j] < s.basis[i][i]);
            }
    }

    // Colength zero is the lattice itself.
    auto trivial = enumerate_sublattices(2, 3, 0);
    REQUIRE(trivial.size() == 1);
    CHECK(trivial[0].type.empty());

    CHECK_THROWS_AS(enumerate_sublattices(2, 5, 1), domain_error);
    CHECK_THROWS_AS(enumerate_sublattices(2, 2, -1), domain_error);
    CHECK_THROWS_AS(enumerate_sublattices(6, 2, 1), domain_error);
}

TEST_CASE("form-compatible sublattices split by Jordan type") {
    using JT = std::pair<int, int>;

    // Hermitian flavor: totals match the type-(d) count over the quadratic
    // residue extension, and the Jordan split matches the per-type counts.
    struct HRow {
        uint64_t p;
        int n, d;
        long long total;
    };
    for (const HRow& r :
         {HRow{2, 2, 1, 5}, HRow{2, 3, 1, 21}, HRow{2, 2, 2, 20}, HRow{3, 2, 1, 10}}) {
        auto subs = enumerate_sublattices(SabFlavor::hermitian, r.p, r.n, r.d);
        CHECK(static_cast<long long>(subs.size()) == r.total);
        CHECK(r.total ==
              poly_at(c_type({r.d}, r.n), r.p * r.p));

        std::map<JT, long long> by_jt;
        std::set<std::string> distinct;
        for (const auto& s : subs) {
            ++by_jt[{s.jt.a, s.jt.b}];
            distinct.insert(serialize_basis(s));
            CHECK(s.jt.flavor == JordanType::Flavor::hermitian);
            CHECK(s.jt.a + s.jt.b == 2 * r.d);
        }
        CHECK(static_cast<long long>(distinct.size()) == r.total);
        // The per-type counting polynomials cover l >= 1; the degenerate
        // class (0, 2d) is the complement inside the total.
        long long nondegenerate = 0;
        for (const auto& [jt, cnt] : by_jt) {
            if (jt.first == 0) continue;
            CHECK(cnt == poly_at(s_ab_count(SabFlavor::hermitian, jt.first, r.d, r.n), r.p));
            nondegenerate += cnt;
        }
        CHECK(by_jt[{0, 2 * r.d}] == r.total - nondegenerate);
    }

    // Frozen split for the smallest hermitian instance.
    {
        auto subs = enumerate_sublattices(SabFlavor::hermitian, 2, 2, 1);
        std::map<JT, long long> by_jt;
        std::map<int, long long> by_pivot;
        for (const auto& s : subs) {
            ++by_jt[{s.jt.a, s.jt.b}];
            ++by_pivot[s.pivot];
        }
        CHECK(by_jt[{1, 1}] == 3);
        CHECK(by_jt[{0, 2}] == 2);
        CHECK(by_pivot[1] == 1);
        CHECK(by_pivot[2] == 4);

        // The pivot row is exactly p^d times the pivot basis vector.
        for (const auto& s : subs) {
            const auto& prow = s.basis[s.pivot - 1];
            for (int j = 0; j < 2; ++j) {
                if (j == s.pivot - 1) {
                    CHECK(prow[j].first == 2);
                    CHECK(prow[j].second == 0);
                } else {
                    CHECK(prow[j].first == 0);
                    CHECK(prow[j].second == 0);
                }
            }
        }
    }

    // Symplectic flavor: the Jordan type is forced to (d, d).
    struct SRow {
        uint64_t p;
        int n, d;
        long long total;
    };
    for (const SRow& r : {SRow{2, 1, 1, 3}, SRow{2, 2, 1, 15}, SRow{3, 1, 2, 12}}) {
        auto subs = enumerate_sublattices(SabFlavor::symplectic, r.p, r.n, r.d);
        CHECK(static_cast<long long>(subs.size()) == r.total);
        CHECK(r.total == poly_at(c_type({r.d}, 2 * r.n), r.p));
        CHECK(r.total ==
              poly_at(s_ab_count(SabFlavor::symplectic, r.d, r.d, r.n), r.p));
        for (const auto& s : subs) {
            CHECK(s.jt.flavor == JordanType::Flavor::symplectic);
            CHECK(s.jt.a == r.d);
            CHECK(s.jt.b == r.d);
        }
    }

    CHECK_THROWS_AS(enumerate_sublattices(SabFlavor::hermitian, 2, 5, 1), domain_error);
    CHECK_THROWS_AS(enumerate_sublattices(SabFlavor::hermitian, 2, 1, 1), domain_error);
    CHECK_THROWS_AS(enumerate_sublattices(SabFlavor::symplectic, 2, 3, 1), domain_error);
    CHECK_THROWS_AS(enumerate_sublattices(SabFlavor::hermitian, 2, 2, 0), domain_error);
    CHECK_THROWS_AS(enumerate_sublattices(SabFlavor::hermitian, 4, 2, 1), domain_error);
}

TEST_CASE("residue fibers of the smooth stratum models match the closed forms") {
    for (uint64_t q : {2ull, 3ull}) {
        for (int n = 2; n <= 4; ++n)
            CHECK(enumerate_kappa_fiber(q, KappaShape::gl_type_k1(n)) ==
                  kappa_expect(FiberShape::gl_type_k1(n), q));

        CHECK(enumerate_kappa_fiber(q, KappaShape::gl_refined(1, 2)) ==
              kappa_expect(FiberShape::gl_refined(4, false), q));
        CHECK(enumerate_kappa_fiber(q, KappaShape::gl_refined(1, 1)) ==
              kappa_expect(FiberShape::gl_refined(4, true), q));

        for (auto [cs, l, top] : {std::tuple{1, 0, 1}, std::tuple{1, 1, 2},
                                  std::tuple{2, 1, 1}, std::tuple{3, 0, 0},
                                  std::tuple{4, 1, 2}, std::tuple{4, 2, 2}})
            CHECK(enumerate_kappa_fiber(q, KappaShape::gl3_case(cs, l, top)) ==
                  kappa_expect(FiberShape::gl3_case(cs, l, top), q));

        for (int n = 2; n <= 3; ++n)
            for (bool ge : {false, true})
                CHECK(enumerate_kappa_fiber(q, KappaShape::u_dn(n, ge)) ==
                      kappa_expect(FiberShape::u_dn(n, ge), q));

        for (int n = 1; n <= 2; ++n)
            CHECK(enumerate_kappa_fiber(q, KappaShape::sp_dn(n)) ==
                  kappa_expect(FiberShape::sp_dn(n), q));
    }

    // Anchor a few absolute values at q = 2.
    CHECK(enumerate_kappa_fiber(2, KappaShape::gl_type_k1(2)) == 2);
    CHECK(enumerate_kappa_fiber(2, KappaShape::gl_type_k1(3)) == 24);
    CHECK(enumerate_kappa_fiber(2, KappaShape::gl_type_k1(4)) == 1344);
    CHECK(enumerate_kappa_fiber(2, KappaShape::gl_refined(1, 2)) == 1024);
    CHECK(enumerate_kappa_fiber(2, KappaShape::gl_refined(1, 1)) == 768);
    CHECK(enumerate_kappa_fiber(2, KappaShape::gl3_case(1, 0, 1)) == 16);
    CHECK(enumerate_kappa_fiber(2, KappaShape::gl3_case(1, 1, 2)) == 8);
    CHECK(enumerate_kappa_fiber(2, KappaShape::gl3_case(3, 0, 0)) == 24);
    CHECK(enumerate_kappa_fiber(2, KappaShape::u_dn(2, false)) == 4);
    CHECK(enumerate_kappa_fiber(2, KappaShape::u_dn(2, true)) == 2);
    CHECK(enumerate_kappa_fiber(2, KappaShape::u_dn(3, false)) == 96);
    CHECK(enumerate_kappa_fiber(2, KappaShape::u_dn(3, true)) == 48);
    CHECK(enumerate_kappa_fiber(2, KappaShape::sp_dn(1)) == 2);
    CHECK(enumerate_kappa_fiber(2, KappaShape::sp_dn(2)) == 96);
    CHECK(enumerate_kappa_fiber(3, KappaShape::sp_dn(2)) == 3888);
}

TEST_CASE("stratum model counts ignore representative choices") {
    // Pinned determinant target.
    {
        auto a = KappaShape::gl_type_k1(3);
        auto b = KappaShape::gl_type_k1(3, 2);
        CHECK(enumerate_kappa_fiber(3, a) == enumerate_kappa_fiber(3, b));
    }

    // 3x3 cases: unit target, linear target, and the chart flag.
    {
        auto s = KappaShape::gl3_case(1, 0, 1);
        s.u_target = 2;
        CHECK(enumerate_kappa_fiber(3, s) ==
              enumerate_kappa_fiber(3, KappaShape::gl3_case(1, 0, 1)));
    }
    {
        long long ref = enumerate_kappa_fiber(3, KappaShape::gl3_case(2, 1, 1));
        for (uint64_t t : {1ull, 2ull}) {
            auto s = KappaShape::gl3_case(2, 1, 1);
            s.tau1 = t;
            CHECK(enumerate_kappa_fiber(3, s) == ref);
        }
        auto flip = KappaShape::gl3_case(2, 1, 1);
        flip.e1_includes_x22 = true;
        CHECK(enumerate_kappa_fiber(3, flip) == ref);
    }
    {
        auto s = KappaShape::gl3_case(3, 0, 0);
        s.u_target = 2;
        CHECK(enumerate_kappa_fiber(3, s) ==
              enumerate_kappa_fiber(3, KappaShape::gl3_case(3, 0, 0)));
    }
    {
        // Any rootless cubic target gives the same count.
        long long ref2 = enumerate_kappa_fiber(2, KappaShape::gl3_case(4, 1, 2));
        auto s2 = KappaShape::gl3_case(4, 1, 2);
        s2.cubic = std::array<uint64_t, 3>{1, 0, 1};
        CHECK(enumerate_kappa_fiber(2, s2) == ref2);

        long long ref3 = enumerate_kappa_fiber(3, KappaShape::gl3_case(4, 1, 2));
        auto s3 = KappaShape::gl3_case(4, 1, 2);
        s3.cubic = std::array<uint64_t, 3>{0, 2, 2};
        CHECK(enumerate_kappa_fiber(3, s3) == ref3);
    }

    // Refined shape: the divided c2 residue and the leading unit are free.
    {
        long long ref2 = enumerate_kappa_fiber(2, KappaShape::gl_refined(1, 2));
        auto s2 = KappaShape::gl_refined(1, 2);
        s2.tau1 = 1;
        CHECK(enumerate_kappa_fiber(2, s2) == ref2);

        long long ref3 = enumerate_kappa_fiber(3, KappaShape::gl_refined(1, 1));
        auto s3 = KappaShape::gl_refined(1, 1);
        s3.tau1 = 1;
        s3.u_target = 2;
        CHECK(enumerate_kappa_fiber(3, s3) == ref3);
    }

    // Hermitian distinguished shapes: both symmetry-line targets, the form
    // parameters, and every branch flag.
    {
        long long ref = enumerate_kappa_fiber(3, KappaShape::u_dn(2, false));
        for (uint64_t a : {1ull, 2ull})
            for (uint64_t b : {1ull, 2ull}) {
                auto s = KappaShape::u_dn(2, false);
                s.u1 = {a, 0};
                s.u2 = {0, b};
                CHECK(enumerate_kappa_fiber(3, s) == ref);
            }
        auto d2 = KappaShape::u_dn(2, false);
        d2.delta_2d = true;
        CHECK(enumerate_kappa_fiber(3, d2) == ref);
    }
    {
        long long ref = enumerate_kappa_fiber(3, KappaShape::u_dn(2, true));
        for (bool xi : {false, true})
            for (bool dd : {false, true}) {
                auto s = KappaShape::u_dn(2, true);
                s.delta_xi = xi;
                s.delta_d = dd;
                CHECK(enumerate_kappa_fiber(3, s) == ref);
            }
        auto hb = KappaShape::u_dn(2, true);
        hb.hb = 2;
        CHECK(enumerate_kappa_fiber(3, hb) == ref);
        auto u1 = KappaShape::u_dn(2, true);
        u1.u1 = {2, 0};
        CHECK(enumerate_kappa_fiber(3, u1) == ref);
    }
    {
        auto s = KappaShape::u_dn(3, false);
        s.u1 = {0, 2};
        CHECK(enumerate_kappa_fiber(3, s) ==
              enumerate_kappa_fiber(3, KappaShape::u_dn(3, false)));
        auto h = KappaShape::u_dn(3, false);
        h.hc = 2;
        CHECK(enumerate_kappa_fiber(3, h) ==
              enumerate_kappa_fiber(3, KappaShape::u_dn(3, false)));
        auto g = KappaShape::u_dn(3, true);
        g.hb = 1;
        CHECK(enumerate_kappa_fiber(3, g) ==
              enumerate_kappa_fiber(3, KappaShape::u_dn(3, true)));
    }

    // Symplectic distinguished shapes.
    {
        for (int n = 1; n <= 2; ++n) {
            auto s = KappaShape::sp_dn(n);
            s.u1 = {2, 0};
            CHECK(enumerate_kappa_fiber(3, s) ==
                  enumerate_kappa_fiber(3, KappaShape::sp_dn(n)));
        }
        auto h = KappaShape::sp_dn(2);
        h.hc = 2;
        CHECK(enumerate_kappa_fiber(3, h) ==
              enumerate_kappa_fiber(3, KappaShape::sp_dn(2)));
    }
}

TEST_CASE("the refined shape distinguishes base points by stratum") {
    // Moving the divided c3 residue off zero leaves the stratum: the fiber
    // count changes to the neighboring value (q-1)^2 q^10. The k-pattern
    // itself does not matter beyond the equality split.
    auto off = KappaShape::gl_refined(1, 2);
    off.u2 = {2, 0};
    long long moved = enumerate_kappa_fiber(3, off);
    long long stay = enumerate_kappa_fiber(3, KappaShape::gl_refined(1, 2));
    CHECK(stay == 314928);
    CHECK(moved == 236196);
    CHECK(moved != stay);

    CHECK(enumerate_kappa_fiber(2, KappaShape::gl_refined(1, 3)) ==
          kappa_expect(FiberShape::gl_refined(4, false), 2));
}

TEST_CASE("pruned and reference stratum enumerations agree") {
    for (bool ge : {false, true})
        CHECK(enumerate_kappa_fiber(2, KappaShape::u_dn(3, ge), true) ==
              enumerate_kappa_fiber(2, KappaShape::u_dn(3, ge)));
    CHECK(enumerate_kappa_fiber(2, KappaShape::sp_dn(2), true) ==
          enumerate_kappa_fiber(2, KappaShape::sp_dn(2)));
}

TEST_CASE("stratum shape validation") {
    CHECK_THROWS_AS(KappaShape::gl_type_k1(1), domain_error);
    CHECK_THROWS_AS(KappaShape::gl_type_k1(5), domain_error);
    CHECK_THROWS_AS(KappaShape::gl_refined(0, 1), domain_error);
    CHECK_THROWS_AS(KappaShape::gl_refined(2, 1), domain_error);
    CHECK_THROWS_AS(KappaShape::gl3_case(0, 0, 1), domain_error);
    CHECK_THROWS_AS(KappaShape::gl3_case(5, 0, 1), domain_error);
    CHECK_THROWS_AS(KappaShape::gl3_case(1, 2, 1), domain_error);
    CHECK_THROWS_AS(KappaShape::gl3_case(1, 0, 0), domain_error);
    CHECK_THROWS_AS(KappaShape::gl3_case(3, 1, 1), domain_error);
    CHECK_THROWS_AS(KappaShape::u_dn(1, false), domain_error);
    CHECK_THROWS_AS(KappaShape::u_dn(4, false), domain_error);
    CHECK_THROWS_AS(KappaShape::sp_dn(0), domain_error);
    CHECK_THROWS_AS(KappaShape::sp_dn(3), domain_error);

    // The residue size is restricted to the enumerable fields.
    CHECK_THROWS_AS(enumerate_kappa_fiber(4, KappaShape::gl_type_k1(2)), domain_error);
    CHECK_THROWS_AS(enumerate_kappa_fiber(5, KappaShape::gl_type_k1(2)), domain_error);

    // Unit and symmetry-line target validation happens at enumeration time.
    {
        auto s = KappaShape::gl_type_k1(2, 0);
        CHECK_THROWS_AS(enumerate_kappa_fiber(2, s), domain_error);
    }
    {
        auto s = KappaShape::gl_refined(1, 2);
        s.u_target = 0;
        CHECK_THROWS_AS(enumerate_kappa_fiber(2, s), domain_error);
    }
    {
        auto s = KappaShape::gl3_case(1, 0, 1);
        s.u_target = 0;
        CHECK_THROWS_AS(enumerate_kappa_fiber(2, s), domain_error);
    }
    {
        // x^3 + 1 has the root 1 at q = 2.
        auto s = KappaShape::gl3_case(4, 1, 2);
        s.cubic = std::array<uint64_t, 3>{0, 0, 1};
        CHECK_THROWS_AS(enumerate_kappa_fiber(2, s), domain_error);
    }
    {
        auto s = KappaShape::u_dn(2, false);
        s.u1 = {0, 1}; // off the symmetry line for even rank
        CHECK_THROWS_AS(enumerate_kappa_fiber(3, s), domain_error);
    }
    {
        auto s = KappaShape::u_dn(2, false);
        s.u1 = {0, 0};
        CHECK_THROWS_AS(enumerate_kappa_fiber(3, s), domain_error);
    }
    {
        auto s = KappaShape::u_dn(3, false);
        s.hc = 0;
        CHECK_THROWS_AS(enumerate_kappa_fiber(3, s), domain_error);
    }
    {
        auto s = KappaShape::sp_dn(1);
        s.u1 = {0, 0};
        CHECK_THROWS_AS(enumerate_kappa_fiber(3, s), domain_error);
    }
    {
        auto s = KappaShape::sp_dn(2);
        s.hc = 0;
        CHECK_THROWS_AS(enumerate_kappa_fiber(3, s), domain_error);
    }
}

TEST_CASE("finite group orders by direct enumeration") {
    for (uint64_t q : {2ull, 3ull}) {
        for (int n = 1; n <= 3; ++n) {
            CHECK(enumerate_group(GroupKind::gl, n, q) == poly_at(gl_order(n), q));
            CHECK(enumerate_group(GroupKind::u, n, q) == poly_at(u_order(n), q));
        }
        CHECK(enumerate_group(GroupKind::sp, 2, q) == poly_at(sp_order(1), q));
        CHECK(enumerate_group(GroupKind::sp, 4, q) == poly_at(sp_order(2), q));
        CHECK(enumerate_group(GroupKind::norm_one_torus, 1, q) ==
              static_cast<long long>(q + 1));
    }
    CHECK(enumerate_group(GroupKind::gl, 2, 2) == 6);
    CHECK(enumerate_group(GroupKind::sp, 2, 3) == 24);

    CHECK_THROWS_AS(enumerate_group(GroupKind::gl, 4, 2), domain_error);
    CHECK_THROWS_AS(enumerate_group(GroupKind::u, 0, 2), domain_error);
    CHECK_THROWS_AS(enumerate_group(GroupKind::sp, 3, 2), domain_error);
    CHECK_THROWS_AS(enumerate_group(GroupKind::sp, 6, 2), domain_error);
}

TEST_CASE("torus special fibers by direct enumeration") {
    for (uint64_t q : {2ull, 3ull}) {
        for (auto [n, d] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{2, 2}}) {
            CHECK(enumerate_torus_fiber(TorusCase::split, n, d, q) ==
                  poly_at(torus_count(TorusCase::split, n, d), q));
            CHECK(enumerate_torus_fiber(TorusCase::unramified, n, d, q) ==
                  poly_at(torus_count(TorusCase::unramified, n, d), q));
        }
    }

    // Ramified fibers need odd residue characteristic; the count does not
    // depend on the unramified-part degree.
    CHECK(enumerate_torus_fiber(TorusCase::ramified, 1, 1, 3) ==
          poly_at(torus_count(TorusCase::ramified, 1, 1, true), 3));
    CHECK(enumerate_torus_fiber(TorusCase::ramified, 2, 1, 3) == 18);
    CHECK(enumerate_torus_fiber(TorusCase::ramified, 2, 2, 3) == 18);
    CHECK(enumerate_torus_fiber(TorusCase::ramified, 2, 1, 3) ==
          poly_at(torus_count(TorusCase::ramified, 2, 1, true), 3));

    CHECK_THROWS_AS(enumerate_torus_fiber(TorusCase::ramified, 1, 1, 2), domain_error);
    CHECK_THROWS_AS(enumerate_torus_fiber(TorusCase::split, 3, 1, 2), domain_error);
    CHECK_THROWS_AS(enumerate_torus_fiber(TorusCase::split, 2, 3, 2), domain_error);
    CHECK_THROWS_AS(enumerate_torus_fiber(TorusCase::unramified, 2, 0, 2), domain_error);
}
