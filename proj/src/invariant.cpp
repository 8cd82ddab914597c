#include "so/invariant.hpp"

#include "json.hpp"

#include <algorithm>
#include <numeric>

namespace so {

namespace {

// ---------------------------------------------------------------------------
// Exact integers in Z[t]/(t^2 - u0 t - v0), used to evaluate discriminants of
// quadratic-extension polynomials before truncation.
struct ZQuad {
    Int a, b;
    long long u0, v0;
};

ZQuad zq_make(const Int& a, const Int& b, uint64_t p) {
    if (p == 2) return {a, b, -1, -1};
    return {a, b, 0, static_cast<long long>(least_non_residue(p))};
}

ZQuad operator-(const ZQuad& x, const ZQuad& y) { return {x.a - y.a, x.b - y.b, x.u0, x.v0}; }
ZQuad operator*(const ZQuad& x, const ZQuad& y) {
    Int bd = x.b * y.b;
    return {x.a * y.a + bd * x.v0, x.a * y.b + x.b * y.a + bd * x.u0, x.u0, x.v0};
}
bool zq_is_zero(const ZQuad& x) { return x.a == 0 && x.b == 0; }

// Exact division in the quadratic order (used by fraction-free elimination,
// where all divisions are exact by construction).
ZQuad zq_div(const ZQuad& x, const ZQuad& y) {
    // Multiply by the conjugate a + b(u0 - t), divide by the norm.
    ZQuad ybar{y.a + y.b * y.u0, -y.b, y.u0, y.v0};
    ZQuad num = x * ybar;
    Int nrm = (y * ybar).a;
    if (nrm == 0) throw domain_error("division by zero in quadratic order");
    if (num.a % nrm != 0 || num.b % nrm != 0)
        throw domain_error("inexact division in quadratic order");
    return {num.a / nrm, num.b / nrm, x.u0, x.v0};
}

Int int_div(const Int& x, const Int& y) {
    if (x % y != 0) throw domain_error("inexact integer division");
    return x / y;
}

// Fraction-free (Bareiss) determinant over an integral domain.
template <class T, class IsZero, class Div>
T bareiss_det(std::vector<std::vector<T>> m, const T& one, IsZero is_zero, Div div) {
    const size_t n = m.size();
    T prev = one;
    int sign = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (is_zero(m[k][k])) {
            size_t piv = k + 1;
            while (piv < n && is_zero(m[piv][k])) ++piv;
            if (piv == n) return m[0][0] - m[0][0]; // zero of the ring
            std::swap(m[k], m[piv]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i) {
            for (size_t j = k + 1; j < n; ++j)
                m[i][j] = div(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev);
            m[i][k] = m[i][k] - m[i][k];
        }
        prev = m[k][k];
    }
    T det = m[n - 1][n - 1];
    if (sign < 0) det = (det - det) - det;
    return det;
}

template <class T>
std::vector<std::vector<T>> sylvester(const std::vector<T>& f, const std::vector<T>& g, const T& zero) {
    // f, g descending coefficient vectors; matrix size (deg f + deg g).
    const size_t df = f.size() - 1, dg = g.size() - 1;
    const size_t n = df + dg;
    std::vector<std::vector<T>> m(n, std::vector<T>(n, zero));
    for (size_t r = 0; r < dg; ++r)
        for (size_t c = 0; c <= df; ++c) m[r][r + c] = f[c];
    for (size_t r = 0; r < df; ++r)
        for (size_t c = 0; c <= dg; ++c) m[dg + r][r + c] = g[c];
    return m;
}

int ord_with_cutoff(Int x, uint64_t p, int N) {
    if (x < 0) x = -x;
    if (x == 0) return N;
    int v = 0;
    while (v < N && x % p == 0) {
        x /= p;
        ++v;
    }
    return v;
}

// ord of the discriminant of a monic integer polynomial (ascending coeffs),
// saturated at N.
int disc_ord_int(const std::vector<Int>& asc, uint64_t p, int N) {
    const size_t d = asc.size() - 1;
    if (d == 1) return 0; // linear: disc = 1
    std::vector<Int> f(asc.rbegin(), asc.rend()); // descending
    std::vector<Int> fp(d);                       // derivative, descending
    for (size_t i = 0; i < d; ++i) fp[i] = f[i] * Int(d - i);
    auto m = sylvester(f, fp, Int(0));
    Int res = bareiss_det(std::move(m), Int(1), [](const Int& x) { return x == 0; }, int_div);
    return ord_with_cutoff(res, p, N);
}

int disc_ord_quad(const std::vector<ZQuad>& asc, uint64_t p, int N) {
    const size_t d = asc.size() - 1;
    if (d == 1) return 0;
    std::vector<ZQuad> f(asc.rbegin(), asc.rend());
    std::vector<ZQuad> fp(d, asc[0]);
    for (size_t i = 0; i < d; ++i) {
        fp[i] = f[i] * zq_make(Int(d - i), Int(0), p);
    }
    auto m = sylvester(f, fp, zq_make(Int(0), Int(0), p));
    ZQuad res = bareiss_det(std::move(m), zq_make(Int(1), Int(0), p), zq_is_zero, zq_div);
    return std::min(ord_with_cutoff(res.a, p, N), ord_with_cutoff(res.b, p, N));
}

// ---------------------------------------------------------------------------
// Residue field polynomial helpers: coefficient vectors ascending, mod p.

uint64_t fp_mulmod(uint64_t a, uint64_t b, uint64_t p) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(a) * b) % p);
}

uint64_t fp_powmod(uint64_t a, uint64_t e, uint64_t p) {
    uint64_t r = 1 % p;
    a %= p;
    while (e) {
        if (e & 1) r = fp_mulmod(r, a, p);
        a = fp_mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

using FpPoly = std::vector<uint64_t>;

void fp_trim(FpPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

FpPoly fp_mul(const FpPoly& a, const FpPoly& b, uint64_t p) {
    if (a.empty() || b.empty()) return {};
    FpPoly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + fp_mulmod(a[i], b[j], p)) % p;
    return r;
}

FpPoly fp_sub(FpPoly a, const FpPoly& b, uint64_t p) {
    if (a.size() < b.size()) a.resize(b.size(), 0);
    for (size_t i = 0; i < b.size(); ++i) a[i] = (a[i] + p - b[i]) % p;
    fp_trim(a);
    return a;
}

std::pair<FpPoly, FpPoly> fp_divmod(FpPoly num, const FpPoly& den, uint64_t p) {
    if (den.empty()) throw domain_error("residue polynomial division by zero");
    fp_trim(num);
    uint64_t lead_inv = fp_powmod(den.back(), p - 2, p);
    if (den.back() == 1) lead_inv = 1;
    FpPoly quo;
    while (num.size() >= den.size()) {
        uint64_t c = fp_mulmod(num.back(), lead_inv, p);
        size_t sh = num.size() - den.size();
        if (quo.size() < sh + 1) quo.resize(sh + 1, 0);
        quo[sh] = c;
        for (size_t i = 0; i < den.size(); ++i)
            num[sh + i] = (num[sh + i] + p - fp_mulmod(c, den[i], p)) % p;
        fp_trim(num);
        if (!num.empty() && num.size() >= den.size() + sh + 1)
            throw domain_error("residue polynomial division failed to reduce");
    }
    return {quo, num};
}

FpPoly fp_gcd(FpPoly a, FpPoly b, uint64_t p) {
    fp_trim(a);
    fp_trim(b);
    while (!b.empty()) {
        FpPoly r = fp_divmod(a, b, p).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty() && a.back() != 1) {
        uint64_t inv = fp_powmod(a.back(), p - 2, p);
        for (auto& c : a) c = fp_mulmod(c, inv, p);
    }
    return a;
}

// s*a + t*b = gcd(a, b) (monic gcd).
std::pair<FpPoly, FpPoly> fp_ext_euclid(const FpPoly& a, const FpPoly& b, uint64_t p) {
    FpPoly r0 = a, r1 = b, s0 = {1}, s1 = {}, t0 = {}, t1 = {1};
    fp_trim(r0);
    fp_trim(r1);
    while (!r1.empty()) {
        auto [q, r2] = fp_divmod(r0, r1, p);
        FpPoly s2 = fp_sub(s0, fp_mul(q, s1, p), p);
        FpPoly t2 = fp_sub(t0, fp_mul(q, t1, p), p);
        r0 = std::move(r1);
        r1 = std::move(r2);
        s0 = std::move(s1);
        s1 = std::move(s2);
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (r0.empty()) throw domain_error("extended euclid on zero polynomials");
    uint64_t inv = fp_powmod(r0.back(), p - 2, p);
    for (auto& c : s0) c = fp_mulmod(c, inv, p);
    for (auto& c : t0) c = fp_mulmod(c, inv, p);
    return {s0, t0};
}

FpPoly fp_mulmod_poly(const FpPoly& a, const FpPoly& b, const FpPoly& mod, uint64_t p) {
    return fp_divmod(fp_mul(a, b, p), mod, p).second;
}

// x^(p^k) mod f, by square-and-multiply on the exponent.
FpPoly fp_frobenius_power(const FpPoly& f, uint64_t p, int k) {
    Int e = 1;
    for (int i = 0; i < k; ++i) e *= p;
    FpPoly base = fp_divmod({0, 1}, f, p).second;
    FpPoly acc = {1};
    // Iterate over bits of e from the top.
    std::vector<int> bits;
    Int tmp = e;
    while (tmp > 0) {
        bits.push_back(static_cast<int>(tmp % 2));
        tmp /= 2;
    }
    for (auto it = bits.rbegin(); it != bits.rend(); ++it) {
        acc = fp_mulmod_poly(acc, acc, f, p);
        if (*it) acc = fp_mulmod_poly(acc, base, f, p);
    }
    return acc;
}

bool fp_is_irreducible(const FpPoly& f, uint64_t p) {
    FpPoly g = f;
    fp_trim(g);
    if (g.size() < 2) return false;
    const int d = static_cast<int>(g.size()) - 1;
    if (d == 1) return true;
    // Squarefree and no factor of degree <= d/2: gcd(f, x^(p^i) - x) trivial.
    FpPoly deriv(g.size() - 1, 0);
    for (size_t i = 1; i < g.size(); ++i) deriv[i - 1] = fp_mulmod(g[i], i % p, p);
    fp_trim(deriv);
    if (deriv.empty()) return false; // p-th power
    if (fp_gcd(g, deriv, p).size() > 1) return false;
    for (int i = 1; i <= d / 2; ++i) {
        FpPoly xp = fp_frobenius_power(g, p, i);
        FpPoly diff = fp_sub(xp, {0, 1}, p);
        if (fp_gcd(g, diff, p).size() > 1) return false;
    }
    return true;
}

std::vector<uint64_t> fp_roots(const FpPoly& f, uint64_t p) {
    if (p > 2000000) throw domain_error("prime too large for residue root search");
    std::vector<uint64_t> roots;
    for (uint64_t r = 0; r < p; ++r) {
        uint64_t acc = 0;
        for (auto it = f.rbegin(); it != f.rend(); ++it) acc = (fp_mulmod(acc, r, p) + *it) % p;
        if (acc == 0) roots.push_back(r);
    }
    return roots;
}

// ---------------------------------------------------------------------------
// Truncated-ring polynomial helpers: ascending coefficient vectors.

using TPoly = std::vector<TruncatedInt>;

void tp_trim(TPoly& f) {
    while (!f.empty() && f.back().is_zero()) f.pop_back();
}

TPoly tp_mul(const TPoly& a, const TPoly& b) {
    if (a.empty() || b.empty()) return {};
    TPoly r(a.size() + b.size() - 1, TruncatedInt::constant(a[0], 0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    tp_trim(r);
    return r;
}

TPoly tp_sub(TPoly a, const TPoly& b) {
    if (b.empty()) return a;
    const TruncatedInt zero = TruncatedInt::constant(b[0], 0);
    if (a.size() < b.size()) a.resize(b.size(), zero);
    for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    tp_trim(a);
    return a;
}

// Division by a monic polynomial (exact over Z/p^N since no unit inversions
// beyond the monic lead are needed).
std::pair<TPoly, TPoly> tp_divmod_monic(TPoly num, const TPoly& den) {
    if (den.empty() || !(den.back().value() == 1)) throw domain_error("divisor must be monic");
    tp_trim(num);
    if (num.size() < den.size()) return {{}, num};
    const TruncatedInt zero = TruncatedInt::constant(den[0], 0);
    TPoly quo(num.size() - den.size() + 1, zero);
    while (num.size() >= den.size()) {
        TruncatedInt c = num.back();
        size_t sh = num.size() - den.size();
        quo[sh] = c;
        for (size_t i = 0; i < den.size(); ++i) num[sh + i] -= c * den[i];
        // The leading term cancels exactly.
        num.pop_back();
        tp_trim(num);
    }
    return {quo, num};
}

FpPoly tp_reduce_mod_p(const TPoly& f) {
    FpPoly r(f.size());
    for (size_t i = 0; i < f.size(); ++i) r[i] = f[i].value() % f[i].p();
    fp_trim(r);
    return r;
}

// Taylor shift: coefficients of f(x + a), ascending.
TPoly tp_shift(TPoly f, const TruncatedInt& a) {
    const size_t n = f.size();
    for (size_t i = 0; i + 1 < n; ++i)
        for (size_t j = n - 1; j >= i + 1; --j) f[j - 1] += a * f[j];
    return f;
}

std::vector<Int> lift_full_poly(const CharPolyData& chi) {
    std::vector<Int> asc;
    for (const auto& c : chi.full_poly()) asc.push_back(Int(c.value()));
    return asc;
}

} // namespace

// ---------------------------------------------------------------------------

CharPolyData CharPolyData::make_gl(uint64_t p, int N, const std::vector<Int>& coeffs) {
    if (coeffs.empty()) throw domain_error("at least one coefficient required");
    CharPolyData d;
    d.algebra_ = Algebra::gl;
    d.n_ = static_cast<int>(coeffs.size());
    d.p_ = p;
    d.N_ = N;
    for (const auto& c : coeffs) d.base_.emplace_back(p, N, c);
    if (discriminant_val(d) >= N)
        throw precision_error("discriminant valuation saturated; separability uncertified", 2 * N);
    return d;
}

CharPolyData CharPolyData::make_sp(uint64_t p, int N, const std::vector<Int>& even_coeffs) {
    if (even_coeffs.empty()) throw domain_error("at least one coefficient required");
    CharPolyData d;
    d.algebra_ = Algebra::sp;
    d.n_ = static_cast<int>(even_coeffs.size());
    d.p_ = p;
    d.N_ = N;
    for (const auto& c : even_coeffs) d.base_.emplace_back(p, N, c);
    if (discriminant_val(d) >= N)
        throw precision_error("discriminant valuation saturated; separability uncertified", 2 * N);
    return d;
}

CharPolyData CharPolyData::make_u(uint64_t p, int N, const std::vector<std::pair<Int, Int>>& coeffs) {
    if (coeffs.empty()) throw domain_error("at least one coefficient required");
    CharPolyData d;
    d.algebra_ = Algebra::u;
    d.n_ = static_cast<int>(coeffs.size());
    d.p_ = p;
    d.N_ = N;
    for (const auto& [a, b] : coeffs) d.ext_.push_back(QuadExtElem::make(p, N, a, b));
    for (int i = 1; i <= d.n_; ++i) {
        const QuadExtElem& c = d.ext_[i - 1];
        QuadExtElem s = c.sigma();
        QuadExtElem test = i % 2 == 1 ? c + s : c - s; // c_i + (-1)^(i+1) sigma(c_i)
        if (!test.is_zero())
            throw domain_error("u coefficients must satisfy the anti-hermitian symmetry");
    }
    if (discriminant_val(d) >= N)
        throw precision_error("discriminant valuation saturated; separability uncertified", 2 * N);
    return d;
}

const std::vector<TruncatedInt>& CharPolyData::base_coeffs() const {
    if (algebra_ == Algebra::u) throw domain_error("u flavor stores extension coefficients");
    return base_;
}

const std::vector<QuadExtElem>& CharPolyData::ext_coeffs() const {
    if (algebra_ != Algebra::u) throw domain_error("base flavor stores base coefficients");
    return ext_;
}

std::vector<TruncatedInt> CharPolyData::full_poly() const {
    if (algebra_ == Algebra::u) throw domain_error("u flavor has extension coefficients");
    const TruncatedInt one = TruncatedInt::one(p_, N_);
    const TruncatedInt zero = TruncatedInt::zero(p_, N_);
    if (algebra_ == Algebra::sp) {
        // x^(2n) + c_1 x^(2n-2) + ... + c_n: odd positions are structural zeros.
        std::vector<TruncatedInt> asc(2 * static_cast<size_t>(n_) + 1, zero);
        for (int k = 0; k < n_; ++k) asc[2 * k] = base_[n_ - 1 - k];
        asc[2 * static_cast<size_t>(n_)] = one;
        return asc;
    }
    std::vector<TruncatedInt> asc;
    for (int i = n_; i >= 1; --i) asc.push_back(base_[i - 1]);
    asc.push_back(one);
    return asc;
}

int discriminant_val(const CharPolyData& chi) {
    const uint64_t p = chi.p();
    const int N = chi.precision();
    if (chi.algebra() == Algebra::u) {
        std::vector<ZQuad> asc;
        for (int i = chi.n(); i >= 1; --i) {
            const QuadExtElem& c = chi.ext_coeffs()[i - 1];
            asc.push_back(zq_make(Int(c.a().value()), Int(c.b().value()), p));
        }
        asc.push_back(zq_make(Int(1), Int(0), p));
        return disc_ord_quad(asc, p, N);
    }
    return disc_ord_int(lift_full_poly(chi), p, N);
}

std::vector<NewtonSegment> newton_polygon(const CharPolyData& chi) {
    const int N = chi.precision();
    const int deg = chi.degree();
    // Points (deg - i, ord c_i) for stored coefficients, plus the monic (deg, 0).
    struct Pt {
        long long x, y;
        bool saturated;
    };
    std::vector<Pt> pts;
    auto add_coeff = [&](int position_from_top, int v) {
        // position_from_top = i for coefficient of x^(deg-i).
        pts.push_back({deg - position_from_top, v, v >= N});
    };
    if (chi.algebra() == Algebra::u) {
        for (int i = 1; i <= chi.n(); ++i) add_coeff(i, chi.ext_coeffs()[i - 1].val());
    } else if (chi.algebra() == Algebra::sp) {
        for (int i = 1; i <= chi.n(); ++i) add_coeff(2 * i, chi.base_coeffs()[i - 1].val());
    } else {
        for (int i = 1; i <= chi.n(); ++i) add_coeff(i, chi.base_coeffs()[i - 1].val());
    }
    // Constant term must be certified.
    if (pts.back().x != 0) throw domain_error("missing constant term");
    if (pts.back().saturated)
        throw precision_error("constant term valuation saturated", N + 1);
    pts.push_back({deg, 0, false});
    std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) { return a.x < b.x; });

    // Lower hull keeping collinear points: pop the middle point only when it
    // lies strictly above the chord, i.e. slopes would decrease.
    std::vector<Pt> hull;
    for (const auto& pt : pts) {
        if (pt.saturated) continue;
        while (hull.size() >= 2) {
            const Pt& a = hull[hull.size() - 2];
            const Pt& b = hull[hull.size() - 1];
            // slope(a,b) > slope(b,pt) <=> (b.y-a.y)(pt.x-b.x) > (pt.y-b.y)(b.x-a.x)
            if ((b.y - a.y) * (pt.x - b.x) > (pt.y - b.y) * (b.x - a.x))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(pt);
    }
    // A saturated point must lie strictly above the certified hull.
    auto hull_y_num_den = [&](long long x) -> std::pair<long long, long long> {
        for (size_t i = 0; i + 1 < hull.size(); ++i) {
            if (hull[i].x <= x && x <= hull[i + 1].x) {
                long long dx = hull[i + 1].x - hull[i].x;
                long long num = hull[i].y * dx + (hull[i + 1].y - hull[i].y) * (x - hull[i].x);
                return {num, dx};
            }
        }
        return {hull.back().y, 1};
    };
    for (const auto& pt : pts) {
        if (!pt.saturated) continue;
        auto [num, den] = hull_y_num_den(pt.x);
        if (static_cast<long long>(N) * den <= num) {
            int needed = static_cast<int>(num / den) + 1;
            throw precision_error("saturated coefficient valuation may touch the Newton polygon",
                                  needed + 1);
        }
    }
    // Walk right-to-left so reported slopes (root valuations) are nondecreasing.
    std::vector<NewtonSegment> segs;
    for (size_t i = hull.size() - 1; i >= 1; --i) {
        long long dx = hull[i].x - hull[i - 1].x;
        long long dy = hull[i - 1].y - hull[i].y; // nonnegative
        long long g = std::gcd(dx, dy);
        if (g == 0) g = 1;
        segs.push_back({dy / g, dx / g, static_cast<int>(dx)});
    }
    return segs;
}

TranslationResult translate_to_canonical(const CharPolyData& chi, const Int& start) {
    if (chi.algebra() != Algebra::gl) throw domain_error("translation requires gl flavor");
    const int n = chi.n();
    const uint64_t p = chi.p();
    const int N = chi.precision();

    // Necessary irreducibility conditions: one Newton slope, reduction a power
    // of one irreducible.
    auto segs = newton_polygon(chi);
    for (size_t i = 1; i < segs.size(); ++i)
        if (segs[i].slope_num * segs[0].slope_den != segs[0].slope_num * segs[i].slope_den)
            throw domain_error("Newton polygon has several slopes; polynomial is reducible");

    TPoly base = chi.full_poly();
    FpPoly red = tp_reduce_mod_p(base);
    if (static_cast<int>(red.size()) != n + 1)
        throw domain_error("reduction lost degree"); // cannot happen for monic input
    Int a = start % Int(pow_u64(p, N));
    if (a < 0) a += Int(pow_u64(p, N));

    {
        // Verify the reduction of chi(x + a) is irreducible or a power of one
        // linear factor.
        TPoly shifted = tp_shift(base, TruncatedInt(p, N, a));
        FpPoly rbar = tp_reduce_mod_p(shifted);
        if (!fp_is_irreducible(rbar, p)) {
            auto roots = fp_roots(rbar, p);
            bool linear_power = false;
            for (uint64_t r : roots) {
                // Compare with (x - r)^n.
                FpPoly pw = {1};
                FpPoly lin = {(p - r) % p, 1};
                for (int i = 0; i < n; ++i) pw = fp_mul(pw, lin, p);
                if (pw == rbar) {
                    linear_power = true;
                    break;
                }
            }
            if (!linear_power)
                throw domain_error("reduction is not a power of one irreducible; input reducible");
        }
    }

    for (int iter = 0; iter <= N + 1; ++iter) {
        TPoly shifted = tp_shift(base, TruncatedInt(p, N, a));
        const TruncatedInt& c0 = shifted[0];
        int d_a = c0.val();
        if (!c0.val_certified())
            throw precision_error("constant-term order saturated during translation", 2 * N);
        if (d_a % n != 0) {
            std::vector<TruncatedInt> cvec(shifted.rbegin() + 1, shifted.rend());
            return {a, d_a, cvec};
        }
        const int t = d_a / n;
        // Depressed reduction: coefficient of x^j is shifted[j] / p^(t(n-j)) mod p.
        FpPoly depressed(n + 1, 0);
        bool violates = false;
        for (int j = 0; j <= n; ++j) {
            uint64_t need = pow_u64(p, t * (n - j));
            if (shifted[j].value() % need != 0) {
                violates = true;
                break;
            }
            depressed[j] = (shifted[j].value() / need) % p;
        }
        if (violates)
            throw domain_error("coefficient order below the Newton polygon; input reducible");
        if (fp_is_irreducible(depressed, p)) {
            std::vector<TruncatedInt> cvec(shifted.rbegin() + 1, shifted.rend());
            return {a, d_a, cvec};
        }
        auto roots = fp_roots(depressed, p);
        if (roots.empty())
            throw domain_error("depressed reduction reducible without roots; input reducible");
        // Smallest root in the fixed ordering of the residue field; 0 cannot
        // occur since the depressed constant term is a unit.
        uint64_t r = roots.front();
        a += Int(pow_u64(p, t)) * r;
        a %= Int(pow_u64(p, N));
    }
    throw precision_error("translation failed to stabilize within the precision budget", 2 * N);
}

InvariantReport classify_and_serre(const CharPolyData& chi, std::optional<long long> external_serre) {
    if (chi.algebra() != Algebra::gl)
        throw domain_error("classification requires gl flavor; descend u/sp input first");
    const int n = chi.n();
    bool prime_n = n >= 2;
    for (int f = 2; f * f <= n; ++f)
        if (n % f == 0) prime_n = false;
    TranslationResult tr = translate_to_canonical(chi);
    const int d = tr.d_gamma;
    InvariantReport rep{};
    rep.d_gamma = d;
    rep.disc_val = discriminant_val(chi);
    rep.d_bar = d;
    if (d % n == 0) {
        rep.ramification = Ramification::unramified;
        rep.res_deg = n;
    } else {
        rep.ramification = Ramification::totally_ramified;
        rep.res_deg = 1;
        if (!prime_n && std::gcd(d % n, n) != 1)
            throw domain_error("ramification class undetermined for non-prime n");
    }
    if (prime_n) {
        if (d % n == 0)
            rep.serre = static_cast<long long>(n) * (n - 1) / 2 * (d / n);
        else
            rep.serre = static_cast<long long>(d - 1) * (n - 1) / 2;
        if (external_serre && *external_serre != rep.serre)
            throw domain_error("external Serre invariant contradicts the computed value");
    } else {
        if (!external_serre)
            throw domain_error("non-prime n requires an external Serre invariant");
        rep.serre = *external_serre;
    }
    return rep;
}

InvariantReport classify_with_retry(uint64_t p, const std::vector<Int>& coeffs, int N0) {
    int N = std::max(N0, 1);
    for (;;) {
        uint64_t bound = 1;
        bool fits = true;
        for (int i = 0; i < N; ++i) {
            if (bound > (uint64_t(1) << 62) / p) {
                fits = false;
                break;
            }
            bound *= p;
        }
        if (!fits)
            throw precision_error("required precision exceeds the word-size cap", N);
        try {
            return classify_and_serre(CharPolyData::make_gl(p, N, coeffs));
        } catch (const precision_error& e) {
            int next = std::max(2 * N, e.suggested_N);
            if (next <= N) next = N + 1;
            N = next;
        }
    }
}

std::pair<std::vector<TruncatedInt>, std::vector<TruncatedInt>>
hensel_split(const CharPolyData& chi, const std::vector<uint64_t>& fbar_in) {
    if (chi.algebra() == Algebra::u) throw domain_error("hensel_split runs over the base ring");
    const uint64_t p = chi.p();
    const int N = chi.precision();
    TPoly full = chi.full_poly();
    FpPoly red = tp_reduce_mod_p(full);

    FpPoly fbar = fbar_in;
    for (auto& c : fbar) c %= p;
    fp_trim(fbar);
    if (fbar.size() < 2 || fbar.size() > red.size() - 1)
        throw domain_error("target factor degree out of range");
    if (fbar.back() != 1) throw domain_error("target factor must be monic");
    auto [gbar, rem] = fp_divmod(red, fbar, p);
    if (!rem.empty()) throw domain_error("target is not a factor of the reduction");
    if (fp_gcd(fbar, gbar, p).size() > 1)
        throw domain_error("factorization of the reduction is not coprime");

    auto [sbar, tbar] = fp_ext_euclid(fbar, gbar, p); // s*fbar + t*gbar = 1

    auto lift = [&](const FpPoly& f) {
        TPoly r;
        for (uint64_t c : f) r.emplace_back(p, N, c);
        tp_trim(r);
        return r;
    };
    TPoly f = lift(fbar), g = lift(gbar), s = lift(sbar), t = lift(tbar);
    const TruncatedInt one = TruncatedInt::one(p, N);

    for (int iter = 0; iter <= N + 2; ++iter) {
        TPoly e = tp_sub(full, tp_mul(f, g));
        if (e.empty()) {
            // Factors recovered exactly at precision N.
            return {f, g};
        }
        // Quadratic step: df = (t*e) mod f; dg = (e - df*g) quo f.
        TPoly df = tp_divmod_monic(tp_mul(t, e), f).second;
        auto [dg, resid] = tp_divmod_monic(tp_sub(e, tp_mul(df, g)), f);
        (void)resid; // valuation doubles each round; absorbed next iteration
        f = [&] {
            TPoly r = f;
            const TruncatedInt zero = TruncatedInt::zero(p, N);
            if (r.size() < df.size()) r.resize(df.size(), zero);
            for (size_t i = 0; i < df.size(); ++i) r[i] += df[i];
            return r;
        }();
        g = [&] {
            TPoly r = g;
            const TruncatedInt zero = TruncatedInt::zero(p, N);
            if (r.size() < dg.size()) r.resize(dg.size(), zero);
            for (size_t i = 0; i < dg.size(); ++i) r[i] += dg[i];
            return r;
        }();
        // Refresh the Bezout pair the same way: bez = s*f + t*g - 1.
        TPoly bez = tp_sub(tp_mul(s, f), tp_sub({one}, tp_mul(t, g)));
        if (!bez.empty()) {
            TPoly dt = tp_divmod_monic(tp_mul(t, bez), f).second;
            auto [ds, r2] = tp_divmod_monic(tp_sub(bez, tp_mul(dt, g)), f);
            (void)r2;
            s = tp_sub(s, ds);
            t = tp_sub(t, dt);
        }
    }
    throw precision_error("hensel iteration failed to converge", 2 * N);
}

QuadExtElem trace_zero_unit(uint64_t p, int N) {
    if (p == 2) return QuadExtElem::make(2, N, 1, 2);
    return QuadExtElem::make(p, N, 0, 1);
}

CharPolyData sigma_descend(const CharPolyData& chi) {
    const uint64_t p = chi.p();
    const int N = chi.precision();
    if (chi.algebra() == Algebra::u) {
        QuadExtElem alpha = trace_zero_unit(p, N);
        std::vector<Int> coeffs;
        QuadExtElem apow = QuadExtElem::one(p, N);
        for (int i = 1; i <= chi.n(); ++i) {
            apow *= alpha;
            QuadExtElem v = chi.ext_coeffs()[i - 1] * apow;
            if (!v.b().is_zero())
                throw domain_error("descended coefficient failed to land in the base ring");
            coeffs.push_back(Int(v.a().value()));
        }
        return CharPolyData::make_gl(p, N, coeffs);
    }
    if (chi.algebra() == Algebra::sp) {
        std::vector<Int> coeffs;
        for (const auto& c : chi.base_coeffs()) coeffs.push_back(Int(c.value()));
        return CharPolyData::make_gl(p, N, coeffs);
    }
    throw domain_error("sigma_descend applies to u and sp flavors");
}

CharPolyData parse_instance_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw domain_error("instance is not valid JSON");
    if (!j.is_object() || !j.contains("p") || !j.contains("N") || !j.contains("algebra") ||
        !j.contains("coeffs"))
        throw domain_error("instance needs p, N, algebra, and coeffs fields");
    uint64_t p = j.at("p").get<uint64_t>();
    int N = j.at("N").get<int>();
    std::string alg = j.at("algebra").get<std::string>();
    const auto& arr = j.at("coeffs");
    if (j.contains("n") && j.at("n").get<size_t>() != arr.size())
        throw domain_error("declared n disagrees with the coefficient count");
    if (alg == "u") {
        std::vector<std::pair<Int, Int>> coeffs;
        for (const auto& c : arr) {
            if (!c.is_array() || c.size() != 2)
                throw domain_error("u coefficients must be [a, b] string pairs");
            coeffs.emplace_back(Int(c[0].get<std::string>()), Int(c[1].get<std::string>()));
        }
        return CharPolyData::make_u(p, N, coeffs);
    }
    std::vector<Int> coeffs;
    for (const auto& c : arr) coeffs.emplace_back(c.get<std::string>());
    if (alg == "gl") return CharPolyData::make_gl(p, N, coeffs);
    if (alg == "sp") return CharPolyData::make_sp(p, N, coeffs);
    throw domain_error("algebra must be gl, u, or sp");
}

} // namespace so
