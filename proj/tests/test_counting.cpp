#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "so/counting.hpp"

#include <functional>
#include <vector>

using namespace so;

namespace {

Rational at(const QPoly& p, long long q) { return p.eval(Rational(q)); }

// All nondecreasing tuples of positive integers with sum K and length <= n.
std::vector<std::vector<int>> partitions_upto(int K, int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int rem, int minpart) {
        if (rem == 0) {
            out.push_back(cur);
            return;
        }
        if (static_cast<int>(cur.size()) == n) return;
        for (int k = minpart; k <= rem; ++k) {
            cur.push_back(k);
            rec(rem - k, k);
            cur.pop_back();
        }
    };
    rec(K, 1);
    return out;
}

// Total number of index-q^K sublattices of a rank-n lattice, from the zeta
// function of Z^n: sum over e_1+...+e_n = K of q^(sum (i-1) e_i).
QPoly zeta_coefficient(int K, int n) {
    QPoly total(0);
    std::vector<int> e(n, 0);
    std::function<void(int, int)> rec = [&](int i, int rem) {
        if (i == n - 1) {
            e[i] = rem;
            int exp = 0;
            for (int j = 0; j < n; ++j) exp += j * e[j];
            total += QPoly::q_power(exp);
            return;
        }
        for (int v = 0; v <= rem; ++v) {
            e[i] = v;
            rec(i + 1, rem - v);
        }
    };
    rec(0, K);
    return total;
}

} // namespace

TEST_CASE("c_type frozen examples") {
    // Rank 2, single part: (q+1) q^(k-1).
    for (int k = 1; k <= 4; ++k) {
        QPoly expect = (QPoly::q_power(1) + 1) * QPoly::q_power(k - 1);
        CHECK(c_type({k}, 2) == expect);
    }
    CHECK(at(c_type({1}, 2), 2) == 3);

    // Rank 3, distinct parts: (q^2+q+1)(q+1) q^(2 k2 - 3), independent of k1.
    QPoly q2q1 = QPoly::q_power(2) + QPoly::q_power(1) + 1;
    for (int k2 = 2; k2 <= 4; ++k2) {
        for (int k1 = 1; k1 < k2; ++k1) {
            QPoly expect = q2q1 * (QPoly::q_power(1) + 1) * QPoly::q_power(2 * k2 - 3);
            CHECK(c_type({k1, k2}, 3) == expect);
        }
    }
    CHECK(at(c_type({1, 2}, 3), 2) == 42);

    // Rank 3, repeated part and single part share one shape.
    for (int k = 1; k <= 3; ++k) {
        QPoly expect = q2q1 * QPoly::q_power(2 * (k - 1));
        CHECK(c_type({k, k}, 3) == expect);
        CHECK(c_type({k}, 3) == expect);
    }

    // Degenerate shapes.
    CHECK(c_type(std::vector<int>{}, 3) == QPoly(1));
    CHECK(c_type({1, 1}, 2) == QPoly(1));
    CHECK(c_type({2, 2}, 2) == QPoly(1));
    CHECK(c_type({5}, 1) == QPoly(1));
}

TEST_CASE("c_type validation") {
    CHECK_THROWS_AS(c_type({2, 1}, 3), domain_error);
    CHECK_THROWS_AS(c_type({0}, 2), domain_error);
    CHECK_THROWS_AS(c_type({1, 1, 1}, 2), domain_error);
    CHECK_THROWS_AS(LatticeType({1}, -1), domain_error);
    CHECK(LatticeType({1, 2, 2}, 3).colength() == 5);
}

TEST_CASE("c_type sums to the sublattice zeta coefficient") {
    for (int n = 1; n <= 3; ++n) {
        for (int K = 0; K <= 5; ++K) {
            QPoly total(0);
            for (const auto& parts : partitions_upto(K, n)) total += c_type(parts, n);
            CHECK(total == zeta_coefficient(K, n));
        }
    }
}

TEST_CASE("refined subspace counts") {
    CHECK(d_t_count(1, 2) == QPoly::q_power(1) + 1);
    CHECK(d_t_count(0, 5) == QPoly(1));
    CHECK(at(d_t_count(1, 3), 3) == 13);
    CHECK(d_t_count(2, 2) == QPoly(1));
    CHECK_THROWS_AS(d_t_count(3, 2), domain_error);
    CHECK_THROWS_AS(d_t_count(-1, 2), domain_error);
}

TEST_CASE("jordan type lattice counts") {
    // Hermitian, l = d, n = 2: (q+1) q^(d-1).
    for (int d = 1; d <= 3; ++d) {
        QPoly expect = (QPoly::q_power(1) + 1) * QPoly::q_power(d - 1);
        CHECK(s_ab_count(SabFlavor::hermitian, d, d, 2) == expect);
    }
    CHECK(at(s_ab_count(SabFlavor::hermitian, 1, 1, 2), 2) == 3);

    // Hermitian, l = 1, d = 2, n = 2: (q^2-1) q.
    CHECK(s_ab_count(SabFlavor::hermitian, 1, 2, 2) ==
          (QPoly::q_power(2) - 1) * QPoly::q_power(1));
    CHECK(at(s_ab_count(SabFlavor::hermitian, 1, 2, 2), 2) == 6);

    // Symplectic, d = 1, n = 2: (q^4-1)/(q-1), 15 at q = 2.
    CHECK(at(s_ab_count(SabFlavor::symplectic, 1, 1, 2), 2) == 15);

    CHECK_THROWS_AS(s_ab_count(SabFlavor::hermitian, 0, 2, 2), domain_error);
    CHECK_THROWS_AS(s_ab_count(SabFlavor::hermitian, 3, 2, 2), domain_error);
    CHECK_THROWS_AS(s_ab_count(SabFlavor::symplectic, 1, 2, 2), domain_error);
    CHECK_THROWS_AS(s_ab_count(SabFlavor::hermitian, 1, 1, 1), domain_error);
}

TEST_CASE("hermitian jordan sum against the quadratic-extension type count") {
    // For rank 2, summing over l = 1..d gives (q+1) q^(2d-2); the remaining
    // type-(d) sublattices over the quadratic extension carry the degenerate
    // Jordan type (0, 2d) and number (q^2 - q) q^(2d-2).
    for (int d = 1; d <= 4; ++d) {
        QPoly sum(0);
        for (int l = 1; l <= d; ++l) sum += s_ab_count(SabFlavor::hermitian, l, d, 2);
        QPoly expect = (QPoly::q_power(1) + 1) * QPoly::q_power(2 * d - 2);
        CHECK(sum == expect);

        QPoly total = c_type({d}, 2).compose_power(2);
        QPoly deficit = (QPoly::q_power(2) - QPoly::q_power(1)) * QPoly::q_power(2 * d - 2);
        CHECK(total - sum == deficit);
    }

    // Rank 3: the sum stays strictly below the total, by a count that is
    // positive at every prime power.
    for (int d = 1; d <= 3; ++d) {
        QPoly sum(0);
        for (int l = 1; l <= d; ++l) sum += s_ab_count(SabFlavor::hermitian, l, d, 3);
        QPoly deficit = c_type({d}, 3).compose_power(2) - sum;
        for (long long q : {2, 3, 5}) CHECK(deficit.eval(Rational(q)) > 0);
    }
}

TEST_CASE("symplectic jordan count equals the full type count") {
    // Every symplectic type-(d) sublattice of rank 2n has Jordan type (d, d).
    for (int n = 1; n <= 3; ++n) {
        for (int d = 1; d <= 3; ++d) {
            CHECK(s_ab_count(SabFlavor::symplectic, d, d, n) == c_type({d}, 2 * n));
        }
    }
}

TEST_CASE("jordan type validation") {
    CHECK(JordanType(1, 1, JordanType::Flavor::hermitian).d() == 1);
    CHECK(JordanType(0, 2, JordanType::Flavor::hermitian).d() == 1);
    CHECK(JordanType(2, 2, JordanType::Flavor::symplectic).d() == 2);
    CHECK_THROWS_AS(JordanType(2, 1, JordanType::Flavor::hermitian), domain_error);
    CHECK_THROWS_AS(JordanType(1, 2, JordanType::Flavor::hermitian), domain_error);
    CHECK_THROWS_AS(JordanType(1, 2, JordanType::Flavor::symplectic), domain_error);
    CHECK_THROWS_AS(JordanType(0, 0, JordanType::Flavor::symplectic), domain_error);
}

TEST_CASE("torus counts") {
    CHECK(at(torus_count(TorusCase::split, 2, 1), 2) == 2);
    CHECK(torus_count(TorusCase::unramified, 1, 1) == QPoly::q_power(1) + 1);
    CHECK(at(torus_count(TorusCase::ramified, 1, 0, true), 3) == 6);
    CHECK(torus_count(TorusCase::split, 3, 3) == QPoly::q_power(3) - 1);
    CHECK(torus_count(TorusCase::unramified, 2, 2) == QPoly::q_power(2) + 1);
    CHECK_THROWS_AS(torus_count(TorusCase::ramified, 1, 0, false), domain_error);
    CHECK_THROWS_AS(torus_count(TorusCase::split, 3, 2), domain_error);
    CHECK_THROWS_AS(torus_count(TorusCase::split, 2, 0), domain_error);
}

TEST_CASE("regular nilpotent counts") {
    QPoly u2 = regular_nilpotent_count(NilpotentGroup::unitary, 2);
    CHECK(u2 == (QPoly::q_power(1) + 1) * (QPoly::q_power(1) - 1));
    CHECK(at(u2, 2) == 3);

    QPoly sp1 = regular_nilpotent_count(NilpotentGroup::symplectic, 1);
    CHECK(sp1 == QPoly::q_power(2) - 1);
    CHECK(at(sp1, 2) == 3);

    CHECK(regular_nilpotent_count(NilpotentGroup::unitary, 0) == QPoly(1));
    CHECK(regular_nilpotent_count(NilpotentGroup::symplectic, 0) == QPoly(1));

    // Divisions are exact: reconstruct the group orders.
    for (int n = 1; n <= 4; ++n) {
        CHECK(regular_nilpotent_count(NilpotentGroup::unitary, n) *
                  (QPoly::q_power(1) + 1) * QPoly::q_power(n - 1) ==
              u_order(n));
        CHECK(regular_nilpotent_count(NilpotentGroup::symplectic, n) * QPoly::q_power(n) ==
              sp_order(n));
    }
}

TEST_CASE("kappa fiber counts") {
    // Type-(k1) stratum: #GL_(n-1)(kappa) q^(n-1).
    CHECK(fiber_count_kappa(FiberShape::gl_type_k1(2)) ==
          (QPoly::q_power(1) - 1) * QPoly::q_power(1));
    CHECK(fiber_count_kappa(FiberShape::gl_type_k1(3)) == gl_order(2) * QPoly::q_power(2));

    // Rank-3 per-stratum counts.
    QPoly end_count = fiber_count_kappa(FiberShape::gl3_case(1, 0, 2));
    QPoly mid_count = fiber_count_kappa(FiberShape::gl3_case(1, 1, 2));
    QPoly qm1 = QPoly::q_power(1) - 1;
    CHECK(end_count == QPoly::q_power(4) * qm1 * qm1);
    CHECK(mid_count == QPoly::q_power(3) * qm1 * qm1 * qm1);
    CHECK(fiber_count_kappa(FiberShape::gl3_case(2, 2, 2)) == end_count);
    CHECK(fiber_count_kappa(FiberShape::gl3_case(4, 3, 3)) == end_count);
    CHECK(fiber_count_kappa(FiberShape::gl3_case(4, 2, 3)) == mid_count);
    // The end-stratum count restates #GL_2(kappa) minus its depth-one part.
    CHECK(end_count == (gl_order(2) - QPoly::q_power(1) * qm1 * qm1) * QPoly::q_power(2));

    // Case 3 single stratum: (q+1)(q-1)^2 q^3, 24 at q = 2.
    QPoly case3 = fiber_count_kappa(FiberShape::gl3_case(3, 0, 0));
    CHECK(case3 == (QPoly::q_power(1) + 1) * qm1 * qm1 * QPoly::q_power(3));
    CHECK(at(case3, 2) == 24);

    // Refined (n-2, t=1) shape at n = 4.
    CHECK(at(fiber_count_kappa(FiberShape::gl_refined(4, false)), 2) == 1024);
    CHECK(at(fiber_count_kappa(FiberShape::gl_refined(4, true)), 2) == 768);
    CHECK(at(fiber_count_kappa(FiberShape::gl_refined(4, false)), 3) == 314928);
    CHECK(at(fiber_count_kappa(FiberShape::gl_refined(4, true)), 3) == 209952);

    // Hermitian (d_n) shapes.
    CHECK(fiber_count_kappa(FiberShape::u_dn(2, false)) == QPoly::q_power(2));
    CHECK(fiber_count_kappa(FiberShape::u_dn(2, true)) == qm1 * QPoly::q_power(1));
    CHECK(at(fiber_count_kappa(FiberShape::u_dn(2, true)), 2) == 2);
    CHECK(fiber_count_kappa(FiberShape::u_dn(3, false)) ==
          (QPoly::q_power(1) + 1) * QPoly::q_power(5));
    CHECK(fiber_count_kappa(FiberShape::u_dn(3, true)) ==
          (QPoly::q_power(1) + 1) * qm1 * QPoly::q_power(4));

    // Symplectic (d_n) shape: #Sp_(2n-2)(kappa) (q-1) q^(3n-2).
    QPoly sp2 = fiber_count_kappa(FiberShape::sp_dn(2));
    CHECK(sp2 == sp_order(1) * qm1 * QPoly::q_power(4));
    CHECK(at(sp2, 2) == 96);
    CHECK(at(sp2, 3) == 3888);

    CHECK_THROWS_AS(FiberShape::gl_type_k1(1), domain_error);
    CHECK_THROWS_AS(FiberShape::gl_refined(3, false), domain_error);
    CHECK_THROWS_AS(FiberShape::gl3_case(5, 0, 1), domain_error);
    CHECK_THROWS_AS(FiberShape::gl3_case(1, 3, 2), domain_error);
    CHECK_THROWS_AS(FiberShape::gl3_case(3, 1, 1), domain_error);
    CHECK_THROWS_AS(FiberShape::u_dn(1, false), domain_error);
    CHECK_THROWS_AS(FiberShape::sp_dn(0), domain_error);
}
