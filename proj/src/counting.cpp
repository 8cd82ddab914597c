#include "so/counting.hpp"

#include <algorithm>
#include <utility>

namespace so {

namespace {

// All divisions in the closed counts are exact; a failure is a programming
// error surfaced as domain_error rather than silent truncation.
QPoly must_divide(const QPoly& num, const QPoly& den) {
    auto q = num.divided_by(den);
    if (!q) throw domain_error("inexact division in a closed counting formula");
    return *q;
}

QPoly q_plus_1() { return QPoly::q_power(1) + QPoly(1); }
QPoly q_minus_1() { return QPoly::q_power(1) - QPoly(1); }

} // namespace

LatticeType::LatticeType(std::vector<int> parts_, int rank_)
    : parts(std::move(parts_)), rank(rank_) {
    if (rank < 0) throw domain_error("lattice type needs a nonnegative ambient rank");
    if (static_cast<int>(parts.size()) > rank)
        throw domain_error("lattice type has more parts than the ambient rank");
    for (size_t i = 0; i < parts.size(); ++i) {
        if (parts[i] < 1) throw domain_error("lattice type parts must be positive");
        if (i > 0 && parts[i] < parts[i - 1])
            throw domain_error("lattice type parts must be nondecreasing");
    }
}

int LatticeType::colength() const {
    int s = 0;
    for (int k : parts) s += k;
    return s;
}

JordanType::JordanType(int a_, int b_, Flavor flavor_) : a(a_), b(b_), flavor(flavor_) {
    if (flavor == Flavor::symplectic) {
        if (a != b || a < 1) throw domain_error("symplectic Jordan type must be (d, d), d >= 1");
        return;
    }
    if (a < 0 || a > b) throw domain_error("hermitian Jordan type needs 0 <= a <= b");
    if ((a + b) % 2 != 0) throw domain_error("hermitian Jordan type needs a + b even");
    if (b < 1) throw domain_error("hermitian Jordan type must be nonzero");
}

QPoly c_type(const LatticeType& t) {
    const int n = t.rank;
    // Distinct parts r_i with multiplicities m_i, ascending.
    std::vector<std::pair<int, int>> groups;
    for (int k : t.parts) {
        if (!groups.empty() && groups.back().first == k)
            ++groups.back().second;
        else
            groups.emplace_back(k, 1);
    }
    int m = n - static_cast<int>(t.parts.size());
    QPoly c(1);
    int s_prev = m;
    int r_prev = 0;
    for (const auto& [r, mult] : groups) {
        int s_cur = s_prev + mult;
        int exp = ((r - r_prev - 1) * (n - s_prev) + (n - s_cur)) * s_prev;
        c *= grassmannian_count(mult, s_cur) * QPoly::q_power(exp);
        s_prev = s_cur;
        r_prev = r;
    }
    return c;
}

QPoly c_type(const std::vector<int>& parts, int n) { return c_type(LatticeType(parts, n)); }

QPoly d_t_count(int t, int m) {
    if (t < 0 || m < 0 || t > m) throw domain_error("refined subspace count needs 0 <= t <= m");
    return grassmannian_count(t, m);
}

QPoly s_ab_count(SabFlavor flavor, int l, int d, int n) {
    if (d < 1) throw domain_error("Jordan-type lattice counts need d >= 1");
    if (flavor == SabFlavor::symplectic) {
        if (n < 1) throw domain_error("symplectic Jordan-type counts need rank n >= 1");
        if (l != d) throw domain_error("symplectic type-(d) lattices all have l = d");
        QPoly head = must_divide(QPoly::q_power(2 * n) - QPoly(1), q_minus_1());
        return head * QPoly::q_power((2 * n - 1) * (d - 1));
    }
    if (n < 2) throw domain_error("hermitian Jordan-type counts need rank n >= 2");
    if (l < 1 || l > d) throw domain_error("hermitian Jordan-type counts need 1 <= l <= d");
    // (q^n - (-1)^n)(q^(n-1) - (-1)^(n-1)).
    QPoly head = (QPoly::q_power(n) - QPoly(n % 2 == 0 ? 1 : -1)) *
                 (QPoly::q_power(n - 1) - QPoly(n % 2 == 0 ? -1 : 1));
    if (l == d) {
        QPoly q2m1 = QPoly::q_power(2) - QPoly(1);
        return must_divide(head, q2m1) * QPoly::q_power((d - 1) * (2 * n - 3));
    }
    return must_divide(head, q_plus_1()) * QPoly::q_power(2 * (d - 1) * (n - 1) - l);
}

QPoly torus_count(TorusCase c, int n, int d, bool odd_residue_char) {
    if (n < 1) throw domain_error("torus counts need n >= 1");
    if (c == TorusCase::ramified) {
        if (!odd_residue_char)
            throw domain_error("the ramified torus count requires odd residue characteristic");
        return QPoly(2) * QPoly::q_power(n);
    }
    if (d < 1 || d > n || n % d != 0)
        throw domain_error("torus counts need the unramified degree d to divide n");
    if (c == TorusCase::split) return QPoly::q_power(n) - QPoly::q_power(n - d);
    return QPoly::q_power(n) + QPoly::q_power(n - d);
}

QPoly regular_nilpotent_count(NilpotentGroup g, int n) {
    if (n < 0) throw domain_error("nilpotent counts need n >= 0");
    if (n == 0) return QPoly(1);
    if (g == NilpotentGroup::unitary)
        return must_divide(u_order(n), q_plus_1() * QPoly::q_power(n - 1));
    return must_divide(sp_order(n), QPoly::q_power(n));
}

FiberShape FiberShape::gl_type_k1(int n) {
    if (n < 2) throw domain_error("the type-(k1) fiber shape needs rank n >= 2");
    FiberShape s{};
    s.kind = Kind::gl_type_k1;
    s.n = n;
    return s;
}

FiberShape FiberShape::gl_refined(int n, bool equal_parts) {
    if (n < 4) throw domain_error("the refined (n-2, t=1) fiber shape needs rank n >= 4");
    FiberShape s{};
    s.kind = Kind::gl_refined;
    s.n = n;
    s.equal_parts = equal_parts;
    return s;
}

FiberShape FiberShape::gl3_case(int case_no, int l, int top) {
    if (case_no < 1 || case_no > 4) throw domain_error("rank-3 refined cases are numbered 1..4");
    if (case_no == 3) {
        if (l != 0 || top != 0)
            throw domain_error("case 3 has a single stratum: l = top = 0");
    } else {
        if (top < 1) throw domain_error("cases 1, 2, 4 have strata l = 0..top with top >= 1");
        if (l < 0 || l > top) throw domain_error("stratum index out of range");
    }
    FiberShape s{};
    s.kind = Kind::gl3_case;
    s.n = 3;
    s.case_no = case_no;
    s.l = l;
    s.top = top;
    return s;
}

FiberShape FiberShape::u_dn(int n, bool lower_ge) {
    if (n < 2) throw domain_error("the hermitian (d_n) fiber shape needs rank n >= 2");
    FiberShape s{};
    s.kind = Kind::u_dn;
    s.n = n;
    s.lower_ge = lower_ge;
    return s;
}

FiberShape FiberShape::sp_dn(int n) {
    if (n < 1) throw domain_error("the symplectic (d_n) fiber shape needs rank n >= 1");
    FiberShape s{};
    s.kind = Kind::sp_dn;
    s.n = n;
    return s;
}

QPoly fiber_count_kappa(const FiberShape& shape) {
    switch (shape.kind) {
    case FiberShape::Kind::gl_type_k1:
        return gl_order(shape.n - 1) * QPoly::q_power(shape.n - 1);
    case FiberShape::Kind::gl_refined: {
        QPoly head = must_divide(gl_order(shape.n - 3), q_minus_1() * QPoly::q_power(shape.n - 4));
        QPoly cube = q_minus_1() * q_minus_1() * q_minus_1();
        if (shape.equal_parts)
            return head * cube * q_plus_1() * QPoly::q_power(6 * shape.n - 16);
        return head * QPoly(2) * cube * QPoly::q_power(6 * shape.n - 15);
    }
    case FiberShape::Kind::gl3_case: {
        QPoly sq = q_minus_1() * q_minus_1();
        if (shape.case_no == 3) return q_plus_1() * sq * QPoly::q_power(3);
        if (shape.l == 0 || shape.l == shape.top) return QPoly::q_power(4) * sq;
        return QPoly::q_power(3) * sq * q_minus_1();
    }
    case FiberShape::Kind::u_dn: {
        QPoly head = u_order(shape.n - 2);
        if (shape.lower_ge) return head * q_minus_1() * QPoly::q_power(3 * shape.n - 5);
        return head * QPoly::q_power(3 * shape.n - 4);
    }
    case FiberShape::Kind::sp_dn:
        return sp_order(shape.n - 1) * q_minus_1() * QPoly::q_power(3 * shape.n - 2);
    }
    throw domain_error("unknown fiber shape");
}

} // namespace so
