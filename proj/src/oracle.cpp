#include "so/oracle.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <exception>
#include <thread>

namespace so {

namespace {

// ---------------------------------------------------------------------------
// Scalar arithmetic on raw uint64 values. The enumeration loops run hot, so
// they avoid the checked TruncatedInt/QuadExtElem types; moduli are validated
// to stay below 2^31, keeping every product inside uint64.

bool is_small_prime(uint64_t p) {
    if (p < 2) return false;
    for (uint64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

uint64_t pow_u64_checked(uint64_t base, int exp) {
    uint64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > (uint64_t(1) << 31) / base)
            throw domain_error("modulus p^N exceeds the supported range");
        r *= base;
    }
    return r;
}

int val_u64(uint64_t v, uint64_t p, int N) {
    if (v == 0) return N;
    int c = 0;
    while (v % p == 0 && c < N) {
        v /= p;
        ++c;
    }
    return c;
}

uint64_t inv_mod_u64(uint64_t a, uint64_t mod) {
    // Extended Euclid; a is a unit mod p^N.
    int64_t t = 0, nt = 1;
    int64_t r = static_cast<int64_t>(mod), nr = static_cast<int64_t>(a % mod);
    while (nr != 0) {
        int64_t qq = r / nr;
        int64_t tmp = t - qq * nt;
        t = nt;
        nt = tmp;
        tmp = r - qq * nr;
        r = nr;
        nr = tmp;
    }
    if (r != 1) throw domain_error("inverse of a non-unit");
    if (t < 0) t += static_cast<int64_t>(mod);
    return static_cast<uint64_t>(t);
}

struct BaseRing {
    uint64_t p = 2;
    int N = 1;
    uint64_t mod = 2;
    using S = uint64_t;
    S zero() const { return 0; }
    S one() const { return 1 % mod; }
    S from(uint64_t v) const { return v % mod; }
    S add(S x, S y) const {
        S s = x + y;
        return s >= mod ? s - mod : s;
    }
    S sub(S x, S y) const { return x >= y ? x - y : x + mod - y; }
    S neg(S x) const { return x ? mod - x : 0; }
    S mul(S x, S y) const { return (x * y) % mod; }
    bool eq(S x, S y) const { return x == y; }
};

/// a + b*t with t^2 = qu*t + qv, matching the quadratic extension convention:
/// t^2 = eps (least non-residue) for odd p, t^2 = -t - 1 for p = 2.
struct QS {
    uint64_t a = 0, b = 0;
    bool operator==(const QS&) const = default;
};

struct QuadRing {
    uint64_t p = 2;
    int N = 1;
    uint64_t mod = 2;
    uint64_t qu = 0, qv = 0;
    using S = QS;

    static QuadRing make(uint64_t p, int N) {
        QuadRing r;
        r.p = p;
        r.N = N;
        r.mod = pow_u64_checked(p, N);
        if (p == 2) {
            r.qu = r.mod - 1;
            r.qv = r.mod - 1;
        } else {
            r.qu = 0;
            r.qv = least_non_residue(p) % r.mod;
        }
        return r;
    }

    S zero() const { return {0, 0}; }
    S one() const { return {1 % mod, 0}; }
    S from(uint64_t v) const { return {v % mod, 0}; }
    S make_pair(uint64_t a, uint64_t b) const { return {a % mod, b % mod}; }
    S add(S x, S y) const { return {badd(x.a, y.a), badd(x.b, y.b)}; }
    S sub(S x, S y) const { return {bsub(x.a, y.a), bsub(x.b, y.b)}; }
    S neg(S x) const { return {bneg(x.a), bneg(x.b)}; }
    S mul(S x, S y) const {
        uint64_t bb = bmul(x.b, y.b);
        uint64_t a = badd(bmul(x.a, y.a), bmul(qv, bb));
        uint64_t b = badd(badd(bmul(x.a, y.b), bmul(x.b, y.a)), bmul(qu, bb));
        return {a, b};
    }
    bool eq(S x, S y) const { return x == y; }
    S sigma(S x) const { return {badd(x.a, bmul(qu, x.b)), bneg(x.b)}; }
    uint64_t norm(S x) const { return mul(x, sigma(x)).a; }
    int val(S x) const { return std::min(val_u64(x.a, p, N), val_u64(x.b, p, N)); }
    S shift_down(S x, int k) const {
        uint64_t d = 1;
        for (int i = 0; i < k; ++i) d *= p;
        return {x.a / d, x.b / d};
    }
    S inverse(S x) const {
        uint64_t ninv = inv_mod_u64(norm(x), mod);
        S s = sigma(x);
        return {bmul(s.a, ninv), bmul(s.b, ninv)};
    }

private:
    uint64_t badd(uint64_t x, uint64_t y) const {
        uint64_t s = x + y;
        return s >= mod ? s - mod : s;
    }
    uint64_t bsub(uint64_t x, uint64_t y) const { return x >= y ? x - y : x + mod - y; }
    uint64_t bneg(uint64_t x) const { return x ? mod - x : 0; }
    uint64_t bmul(uint64_t x, uint64_t y) const { return (x * y) % mod; }
};

// Division-free characteristic polynomial on a flat n x n array; out receives
// (c_1, ..., c_n) with det(xI - M) = x^n + c_1 x^(n-1) + ... + c_n.
constexpr int kMaxN = 8;

template <class R>
void char_poly_flat(const R& rg, const typename R::S* M, int n, typename R::S* out) {
    using S = typename R::S;
    std::array<S, kMaxN + 2> C{}, C2{}, t{};
    std::array<S, kMaxN + 1> w{}, w2{};
    C[0] = rg.one();
    C[1] = rg.neg(M[0]);
    int csize = 2;
    for (int r = 1; r < n; ++r) {
        t[0] = rg.one();
        t[1] = rg.neg(M[r * n + r]);
        for (int i = 0; i < r; ++i) w[i] = M[i * n + r];
        for (int k = 2; k <= r + 1; ++k) {
            S dot = rg.zero();
            for (int i = 0; i < r; ++i) dot = rg.add(dot, rg.mul(M[r * n + i], w[i]));
            t[k] = rg.neg(dot);
            if (k <= r) {
                for (int i = 0; i < r; ++i) {
                    S acc = rg.zero();
                    for (int j = 0; j < r; ++j) acc = rg.add(acc, rg.mul(M[i * n + j], w[j]));
                    w2[i] = acc;
                }
                for (int i = 0; i < r; ++i) w[i] = w2[i];
            }
        }
        for (int i = 0; i <= csize; ++i) {
            S acc = rg.zero();
            for (int k = 0; k <= i && k <= r + 1; ++k)
                if (i - k < csize) acc = rg.add(acc, rg.mul(t[k], C[i - k]));
            C2[i] = acc;
        }
        ++csize;
        for (int i = 0; i < csize; ++i) C[i] = C2[i];
    }
    for (int i = 0; i < n; ++i) out[i] = C[i + 1];
}

// ---------------------------------------------------------------------------
// Stratum classification of one matching matrix, at full precision.

int ring_val(const BaseRing& rg, uint64_t v);
int ring_val(const QuadRing& rg, QS v);
bool ring_is_zero(const BaseRing&, uint64_t v);
bool ring_is_zero(const QuadRing&, QS v);
uint64_t ring_shift_down(const BaseRing& rg, uint64_t v, int k);
QS ring_shift_down(const QuadRing& rg, QS v, int k);
uint64_t ring_inverse(const BaseRing& rg, uint64_t v);
QS ring_inverse(const QuadRing& rg, QS v);

template <class R>
std::vector<int> elementary_exponents(const R& rg, std::vector<typename R::S> A, int n) {
    std::vector<int> ex;
    for (int r = 0; r < n; ++r) {
        int bi = -1, bj = -1, bv = rg.N;
        for (int i = r; i < n; ++i)
            for (int j = r; j < n; ++j) {
                int v = ring_val(rg, A[i * n + j]);
                if (v < bv) {
                    bv = v;
                    bi = i;
                    bj = j;
                }
            }
        if (bi < 0)
            throw precision_error("elementary divisor is not certified at this precision",
                                  rg.N + 1);
        for (int j = 0; j < n; ++j) std::swap(A[r * n + j], A[bi * n + j]);
        for (int i = 0; i < n; ++i) std::swap(A[i * n + r], A[i * n + bj]);
        ex.push_back(bv);
        auto piv_unit = ring_shift_down(rg, A[r * n + r], bv);
        auto uinv = ring_inverse(rg, piv_unit);
        for (int i = r + 1; i < n; ++i) {
            auto e = A[i * n + r];
            if (ring_is_zero(rg, e)) continue;
            auto m = rg.mul(ring_shift_down(rg, e, bv), uinv);
            for (int j = r; j < n; ++j)
                A[i * n + j] = rg.sub(A[i * n + j], rg.mul(m, A[r * n + j]));
        }
        for (int j = r + 1; j < n; ++j) {
            auto e = A[r * n + j];
            if (ring_is_zero(rg, e)) continue;
            auto m = rg.mul(ring_shift_down(rg, e, bv), uinv);
            for (int i = r; i < n; ++i)
                A[i * n + j] = rg.sub(A[i * n + j], rg.mul(m, A[i * n + r]));
        }
    }
    return ex;
}

int ring_val(const BaseRing& rg, uint64_t v) { return val_u64(v, rg.p, rg.N); }
int ring_val(const QuadRing& rg, QS v) { return rg.val(v); }
bool ring_is_zero(const BaseRing&, uint64_t v) { return v == 0; }
bool ring_is_zero(const QuadRing&, QS v) { return v.a == 0 && v.b == 0; }
uint64_t ring_shift_down(const BaseRing& rg, uint64_t v, int k) {
    uint64_t d = 1;
    for (int i = 0; i < k; ++i) d *= rg.p;
    return v / d;
}
QS ring_shift_down(const QuadRing& rg, QS v, int k) { return rg.shift_down(v, k); }
uint64_t ring_inverse(const BaseRing& rg, uint64_t v) { return inv_mod_u64(v, rg.mod); }
QS ring_inverse(const QuadRing& rg, QS v) { return rg.inverse(v); }

int rank_mod_p_impl(const BaseRing& rg1, std::vector<uint64_t> A, int n) {
    int rank = 0;
    for (int col = 0; col < n && rank < n; ++col) {
        int piv = -1;
        for (int i = rank; i < n; ++i)
            if (A[i * n + col] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        for (int j = 0; j < n; ++j) std::swap(A[rank * n + j], A[piv * n + j]);
        uint64_t inv = inv_mod_u64(A[rank * n + col], rg1.mod);
        for (int i = rank + 1; i < n; ++i) {
            uint64_t f = rg1.mul(A[i * n + col], inv);
            for (int j = col; j < n; ++j)
                A[i * n + j] = rg1.sub(A[i * n + j], rg1.mul(f, A[rank * n + j]));
        }
        ++rank;
    }
    return rank;
}

int rank_mod_p_impl(const QuadRing& rg1, std::vector<QS> A, int n) {
    int rank = 0;
    for (int col = 0; col < n && rank < n; ++col) {
        int piv = -1;
        for (int i = rank; i < n; ++i)
            if (!(A[i * n + col] == rg1.zero())) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        for (int j = 0; j < n; ++j) std::swap(A[rank * n + j], A[piv * n + j]);
        QS inv = rg1.inverse(A[rank * n + col]);
        for (int i = rank + 1; i < n; ++i) {
            QS f = rg1.mul(A[i * n + col], inv);
            for (int j = col; j < n; ++j)
                A[i * n + j] = rg1.sub(A[i * n + j], rg1.mul(f, A[rank * n + j]));
        }
        ++rank;
    }
    return rank;
}

/// Checks one matching leaf against the requested stratum data.
template <class R>
struct LeafClassifier {
    R rg;       // full-precision ring
    R rg1;      // residue ring (N = 1)
    Algebra alg = Algebra::gl;
    int n = 0;
    int half = 0; // sp only
    StratumFilter filter;

    bool accept(const typename R::S* ent) const {
        using S = typename R::S;
        if (filter.type) {
            std::vector<S> A(ent, ent + n * n);
            auto ex = elementary_exponents(rg, A, n);
            std::vector<int> parts;
            for (int e : ex)
                if (e > 0) parts.push_back(e);
            std::sort(parts.begin(), parts.end());
            if (parts != *filter.type) return false;
        }
        if (filter.refined_rank) {
            std::vector<S> A(n * n);
            for (int i = 0; i < n * n; ++i) A[i] = reduce1(ent[i]);
            std::vector<S> A2(n * n, rg1.zero());
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k)
                    for (int j = 0; j < n; ++j)
                        A2[i * n + j] =
                            rg1.add(A2[i * n + j], rg1.mul(A[i * n + k], A[k * n + j]));
            int t = rank_mod_p_impl(rg1, A, n) - rank_mod_p_impl(rg1, A2, n);
            if (t != *filter.refined_rank) return false;
        }
        if (filter.jordan) {
            auto ex = gram_exponents(ent);
            std::sort(ex.begin(), ex.end());
            for (int i = 0; i + 2 < n; ++i)
                if (ex[i] != 0) return false;
            if (ex[n - 2] != filter.jordan->a || ex[n - 1] != filter.jordan->b) return false;
        }
        return true;
    }

    typename R::S reduce1(typename R::S v) const;
    std::vector<int> gram_exponents(const typename R::S* ent) const;
};

template <>
uint64_t LeafClassifier<BaseRing>::reduce1(uint64_t v) const {
    return v % rg1.mod;
}
template <>
QS LeafClassifier<QuadRing>::reduce1(QS v) const {
    return {v.a % rg1.mod, v.b % rg1.mod};
}

template <>
std::vector<int> LeafClassifier<BaseRing>::gram_exponents(const uint64_t* ent) const {
    // Alternating Gram of the column span: G = tX J X for the standard form.
    std::vector<uint64_t> G(n * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            uint64_t acc = 0;
            for (int k = 0; k < half; ++k) {
                acc = rg.add(acc, rg.mul(ent[k * n + i], ent[(half + k) * n + j]));
                acc = rg.sub(acc, rg.mul(ent[(half + k) * n + i], ent[k * n + j]));
            }
            G[i * n + j] = acc;
        }
    return elementary_exponents(rg, G, n);
}

template <>
std::vector<int> LeafClassifier<QuadRing>::gram_exponents(const QS* ent) const {
    // Hermitian Gram of the column span: G = sigma(tX) X for the identity form.
    std::vector<QS> G(n * n, rg.zero());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            QS acc = rg.zero();
            for (int k = 0; k < n; ++k)
                acc = rg.add(acc, rg.mul(rg.sigma(ent[k * n + i]), ent[k * n + j]));
            G[i * n + j] = acc;
        }
    return elementary_exponents(rg, G, n);
}

// ---------------------------------------------------------------------------
// Fiber enumeration carriers: a digit vector of uniform radix p^N drives the
// matrix entries; the fast path solves the final diagonal digit from the
// trace coefficient instead of enumerating it.

struct GlCarrier {
    using Ring = BaseRing;
    BaseRing rg;
    int n = 0;
    bool fast = false;
    uint64_t c1 = 0; // target for the solved digit
    std::array<uint64_t, kMaxN * kMaxN> ent{};

    int digit_count() const { return n * n - (fast ? 1 : 0); }
    void set_digit(int k, uint64_t v) { ent[k] = v; }
    void finalize() {
        if (!fast) return;
        uint64_t s = 0;
        for (int i = 0; i + 1 < n; ++i) s = rg.add(s, ent[i * n + i]);
        ent[n * n - 1] = rg.sub(rg.neg(c1), s);
    }
};

struct UCarrier {
    using Ring = QuadRing;
    QuadRing rg;
    int n = 0;
    bool fast = false;
    QS alpha{};
    uint64_t s_target = 0; // -c1 / alpha, a base value
    struct OffMap {
        int i, j;
        bool b_part;
    };
    std::vector<OffMap> off; // digit index - diag_digits() -> off-diagonal slot
    std::array<QS, kMaxN * kMaxN> ent{};
    std::array<uint64_t, kMaxN> tdiag{};

    int diag_digits() const { return n - (fast ? 1 : 0); }
    int digit_count() const { return diag_digits() + n * (n - 1); }
    void set_digit(int k, uint64_t v) {
        if (k < diag_digits()) {
            tdiag[k] = v;
            ent[k * n + k] = rg.mul(alpha, rg.from(v));
            return;
        }
        const OffMap& m = off[k - diag_digits()];
        QS& e = ent[m.i * n + m.j];
        if (m.b_part)
            e.b = v;
        else
            e.a = v;
        ent[m.j * n + m.i] = rg.neg(rg.sigma(e));
    }
    void finalize() {
        if (!fast) return;
        uint64_t s = 0;
        for (int i = 0; i + 1 < n; ++i) {
            s += tdiag[i];
            if (s >= rg.mod) s -= rg.mod;
        }
        uint64_t t = s_target >= s ? s_target - s : s_target + rg.mod - s;
        tdiag[n - 1] = t;
        ent[(n - 1) * n + (n - 1)] = rg.mul(alpha, rg.from(t));
    }
};

struct SpCarrier {
    using Ring = BaseRing;
    BaseRing rg;
    int n = 0; // matrix size, even
    int w = 0;
    struct SlotMap {
        int idx1, idx2; // second entry written as value (sym) or negated (anti)
        bool negate;
    };
    std::vector<SlotMap> slots;
    std::array<uint64_t, kMaxN * kMaxN> ent{};

    int digit_count() const { return w * (2 * w + 1); }
    void set_digit(int k, uint64_t v) {
        const SlotMap& m = slots[k];
        ent[m.idx1] = v;
        ent[m.idx2] = m.negate ? rg.neg(v) : v;
    }
    void finalize() {}
};

/// Enumerates the whole digit space of a carrier, counting leaves whose
/// characteristic polynomial equals the target, restricted by the classifier.
/// Threaded over a leading block of digits; the count is deterministic.
template <class C>
long long enumerate_carrier(const C& proto,
                            const std::vector<typename C::Ring::S>& target,
                            const LeafClassifier<typename C::Ring>* cls) {
    using S = typename C::Ring::S;
    const int nd = proto.digit_count();
    const uint64_t R = proto.rg.mod;
    const int n = proto.n;

    // Leaf loop shared by every task.
    auto run_block = [&](C& c, const std::vector<int>& free_digits) -> long long {
        long long cnt = 0;
        std::vector<uint64_t> odo(free_digits.size(), 0);
        for (int d : free_digits) c.set_digit(d, 0);
        std::array<S, kMaxN> coeffs{};
        for (;;) {
            c.finalize();
            char_poly_flat(c.rg, c.ent.data(), n, coeffs.data());
            bool match = true;
            for (int i = 0; i < n; ++i)
                if (!c.rg.eq(coeffs[i], target[i])) {
                    match = false;
                    break;
                }
            if (match && (!cls || cls->accept(c.ent.data()))) ++cnt;
            int k = static_cast<int>(free_digits.size()) - 1;
            while (k >= 0) {
                if (++odo[k] < R) {
                    c.set_digit(free_digits[k], odo[k]);
                    break;
                }
                odo[k] = 0;
                c.set_digit(free_digits[k], 0);
                --k;
            }
            if (k < 0) break;
        }
        return cnt;
    };

    if (nd == 0) {
        C c = proto;
        return run_block(c, {});
    }

    // Lead digits become parallel tasks once the space is big enough.
    unsigned hw = std::thread::hardware_concurrency();
    int threads = static_cast<int>(std::min<unsigned>(hw ? hw : 1, 8));
    int lead = 0;
    uint64_t tasks = 1;
    double total = 1;
    for (int i = 0; i < nd; ++i) total *= static_cast<double>(R);
    if (threads > 1 && total > (1 << 16)) {
        while (lead < nd - 1 && tasks < static_cast<uint64_t>(threads) * 4) {
            tasks *= R;
            ++lead;
        }
    }
    std::vector<int> tail;
    for (int i = lead; i < nd; ++i) tail.push_back(i);

    if (lead == 0) {
        C c = proto;
        return run_block(c, tail);
    }

    std::vector<long long> sums(threads, 0);
    std::vector<std::exception_ptr> errs(threads);
    auto worker = [&](int tid) {
        try {
            C c = proto;
            long long acc = 0;
            for (uint64_t task = tid; task < tasks; task += threads) {
                uint64_t v = task;
                for (int i = lead - 1; i >= 0; --i) {
                    c.set_digit(i, v % R);
                    v /= R;
                }
                acc += run_block(c, tail);
            }
            sums[tid] = acc;
        } catch (...) {
            errs[tid] = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    long long total_cnt = 0;
    for (long long s : sums) total_cnt += s;
    return total_cnt;
}

long long resolve_budget(const std::optional<long long>& budget) {
    if (budget) {
        if (*budget < 1) throw domain_error("budget must be positive");
        return *budget;
    }
    if (const char* env = std::getenv("SO_BUDGET")) {
        char* end = nullptr;
        long long v = std::strtoll(env, &end, 10);
        if (end != env && v > 0) return v;
    }
    return 1ll << 30;
}

void check_budget(uint64_t p, int N, int digits, const std::optional<long long>& budget) {
    long long limit = resolve_budget(budget);
    Int leaves = 1;
    for (int i = 0; i < N * digits; ++i) {
        leaves *= p;
        if (leaves > limit)
            throw budget_error("fiber enumeration needs " + leaves.str() +
                               "+ nodes, over the budget of " + std::to_string(limit));
    }
}

int fiber_dimension(Algebra alg, int n) {
    return alg == Algebra::sp ? n * n / 2 : n * (n - 1);
}

void validate_common(uint64_t p, int N, int n) {
    if (!is_small_prime(p)) throw domain_error("p must be prime");
    if (N < 1) throw domain_error("precision N must be at least 1");
    if (n < 1 || n > kMaxN) throw domain_error("matrix size out of range");
}

uint64_t reduce_int(const Int& v, uint64_t mod) {
    Int r = v % Int(mod);
    if (r < 0) r += mod;
    return static_cast<uint64_t>(r);
}

long long count_once_gl_sp(uint64_t p, int N, Algebra alg, int n,
                           const std::vector<Int>& coeffs, const StratumFilter& filter,
                           bool fast, const std::optional<long long>& budget) {
    BaseRing rg{p, N, pow_u64_checked(p, N)};
    std::vector<uint64_t> target(n);
    for (int i = 0; i < n; ++i) target[i] = reduce_int(coeffs[i], rg.mod);

    std::optional<LeafClassifier<BaseRing>> cls;
    if (!filter.empty()) {
        if (filter.jordan) {
            if (alg != Algebra::sp)
                throw domain_error("a Jordan-type restriction needs the u or sp carrier");
            if (filter.jordan->flavor != JordanType::Flavor::symplectic)
                throw domain_error("Jordan flavor must match the algebra");
        }
        cls.emplace();
        cls->rg = rg;
        cls->rg1 = BaseRing{p, 1, p};
        cls->alg = alg;
        cls->n = n;
        cls->half = n / 2;
        cls->filter = filter;
    }

    if (alg == Algebra::gl) {
        GlCarrier proto;
        proto.rg = rg;
        proto.n = n;
        proto.fast = fast;
        proto.c1 = target[0];
        check_budget(p, N, proto.digit_count(), budget);
        return enumerate_carrier(proto, target, cls ? &*cls : nullptr);
    }

    // sp: n even, odd coefficients vanish, carrier [[A, B], [C, -tA]].
    if (n % 2 != 0) throw domain_error("sp needs an even matrix size");
    for (int i = 0; i < n; i += 2)
        if (target[i] != 0)
            throw domain_error("sp characteristic coefficients of odd degree must vanish");
    SpCarrier proto;
    proto.rg = rg;
    proto.n = n;
    proto.w = n / 2;
    int w = proto.w;
    for (int i = 0; i < w; ++i)
        for (int j = 0; j < w; ++j)
            proto.slots.push_back({i * n + j, (w + j) * n + (w + i), true});
    for (int i = 0; i < w; ++i)
        for (int j = i; j < w; ++j)
            proto.slots.push_back({i * n + (w + j), j * n + (w + i), false});
    for (int i = 0; i < w; ++i)
        for (int j = i; j < w; ++j)
            proto.slots.push_back({(w + i) * n + j, (w + j) * n + i, false});
    check_budget(p, N, proto.digit_count(), budget);
    return enumerate_carrier(proto, target, cls ? &*cls : nullptr);
}

long long count_once_u(uint64_t p, int N, int n,
                       const std::vector<std::pair<Int, Int>>& coeffs,
                       const StratumFilter& filter, bool fast,
                       const std::optional<long long>& budget) {
    QuadRing rg = QuadRing::make(p, N);
    std::vector<QS> target(n);
    for (int i = 0; i < n; ++i)
        target[i] = rg.make_pair(reduce_int(coeffs[i].first, rg.mod),
                                 reduce_int(coeffs[i].second, rg.mod));
    // Anti-hermitian symmetry sigma(c_i) = (-1)^i c_i.
    for (int i = 0; i < n; ++i) {
        QS want = (i % 2 == 0) ? rg.neg(target[i]) : target[i];
        if (!(rg.sigma(target[i]) == want))
            throw domain_error("u coefficients must satisfy the anti-hermitian symmetry");
    }

    QuadExtElem az = trace_zero_unit(p, N);
    QS alpha = rg.make_pair(az.a().value(), az.b().value());
    // c_1 lies on the alpha-line, so -c_1 / alpha is a base value.
    QS srel = rg.mul(rg.neg(target[0]), rg.inverse(alpha));
    if (srel.b != 0) throw domain_error("u trace coefficient is off the trace-zero line");

    std::optional<LeafClassifier<QuadRing>> cls;
    if (!filter.empty()) {
        if (filter.jordan && filter.jordan->flavor != JordanType::Flavor::hermitian)
            throw domain_error("Jordan flavor must match the algebra");
        cls.emplace();
        cls->rg = rg;
        cls->rg1 = QuadRing::make(p, 1);
        cls->alg = Algebra::u;
        cls->n = n;
        cls->filter = filter;
    }

    UCarrier proto;
    proto.rg = rg;
    proto.n = n;
    proto.fast = fast;
    proto.alpha = alpha;
    proto.s_target = srel.a;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            proto.off.push_back({i, j, false});
            proto.off.push_back({i, j, true});
        }
    check_budget(p, N, proto.digit_count(), budget);
    return enumerate_carrier(proto, target, cls ? &*cls : nullptr);
}

template <class CountFn>
VolumeEstimate build_estimate(uint64_t p, int N, Algebra alg, int n, CountFn&& count_at) {
    VolumeEstimate est;
    est.p = p;
    est.N = N;
    est.n = n;
    est.algebra = alg;
    est.raw_count = count_at(N);
    int dim = fiber_dimension(alg, n);
    Int den = 1;
    for (int i = 0; i < N * dim; ++i) den *= p;
    est.volume = Rational(Int(est.raw_count), den);
    est.stabilized = false;
    if (N > 1) {
        try {
            long long prev = count_at(N - 1);
            Int pden = 1;
            for (int i = 0; i < (N - 1) * dim; ++i) pden *= p;
            est.stabilized = Rational(Int(prev), pden) == est.volume;
        } catch (const precision_error&) {
            est.stabilized = false;
        }
    }
    return est;
}

} // namespace

VolumeEstimate count_fiber(uint64_t p, int N, Algebra alg, int n,
                           const std::vector<Int>& coeffs, const StratumFilter& filter,
                           std::optional<long long> budget) {
    validate_common(p, N, n);
    if (static_cast<int>(coeffs.size()) != n)
        throw domain_error("need exactly n characteristic coefficients");
    if (alg == Algebra::u) {
        std::vector<std::pair<Int, Int>> pairs;
        for (const Int& c : coeffs) pairs.emplace_back(c, Int(0));
        return count_fiber(p, N, n, pairs, filter, budget);
    }
    return build_estimate(p, N, alg, n, [&](int M) {
        return count_once_gl_sp(p, M, alg, n, coeffs, filter, true, budget);
    });
}

VolumeEstimate count_fiber(uint64_t p, int N, int n,
                           const std::vector<std::pair<Int, Int>>& coeffs,
                           const StratumFilter& filter, std::optional<long long> budget) {
    validate_common(p, N, n);
    if (static_cast<int>(coeffs.size()) != n)
        throw domain_error("need exactly n characteristic coefficients");
    return build_estimate(p, N, Algebra::u, n, [&](int M) {
        return count_once_u(p, M, n, coeffs, filter, true, budget);
    });
}

VolumeEstimate count_fiber_naive(uint64_t p, int N, Algebra alg, int n,
                                 const std::vector<Int>& coeffs,
                                 const StratumFilter& filter,
                                 std::optional<long long> budget) {
    validate_common(p, N, n);
    if (static_cast<int>(coeffs.size()) != n)
        throw domain_error("need exactly n characteristic coefficients");
    if (alg == Algebra::u) {
        std::vector<std::pair<Int, Int>> pairs;
        for (const Int& c : coeffs) pairs.emplace_back(c, Int(0));
        return count_fiber_naive(p, N, n, pairs, filter, budget);
    }
    return build_estimate(p, N, alg, n, [&](int M) {
        return count_once_gl_sp(p, M, alg, n, coeffs, filter, false, budget);
    });
}

VolumeEstimate count_fiber_naive(uint64_t p, int N, int n,
                                 const std::vector<std::pair<Int, Int>>& coeffs,
                                 const StratumFilter& filter,
                                 std::optional<long long> budget) {
    validate_common(p, N, n);
    if (static_cast<int>(coeffs.size()) != n)
        throw domain_error("need exactly n characteristic coefficients");
    return build_estimate(p, N, Algebra::u, n, [&](int M) {
        return count_once_u(p, M, n, coeffs, filter, false, budget);
    });
}

std::vector<VolumeEstimate> stabilization_scan(uint64_t p, int N_lo, int N_hi, Algebra alg,
                                               int n, const std::vector<Int>& coeffs,
                                               const StratumFilter& filter,
                                               std::optional<long long> budget) {
    if (N_lo < 1 || N_hi < N_lo) throw domain_error("need 1 <= N_lo <= N_hi");
    std::vector<VolumeEstimate> out;
    for (int N = N_lo; N <= N_hi; ++N) {
        out.push_back(count_fiber(p, N, alg, n, coeffs, filter, budget));
        if (out.back().stabilized) break;
    }
    return out;
}

std::vector<VolumeEstimate> stabilization_scan(uint64_t p, int N_lo, int N_hi, int n,
                                               const std::vector<std::pair<Int, Int>>& coeffs,
                                               const StratumFilter& filter,
                                               std::optional<long long> budget) {
    if (N_lo < 1 || N_hi < N_lo) throw domain_error("need 1 <= N_lo <= N_hi");
    std::vector<VolumeEstimate> out;
    for (int N = N_lo; N <= N_hi; ++N) {
        out.push_back(count_fiber(p, N, n, coeffs, filter, budget));
        if (out.back().stabilized) break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sublattice enumeration.

namespace {

std::vector<int> integer_snf_type(std::vector<std::vector<Int>> A, uint64_t p) {
    const int n = static_cast<int>(A.size());
    std::vector<Int> divisors;
    for (int r = 0; r < n; ++r) {
        for (;;) {
            int bi = -1, bj = -1;
            Int best = 0;
            for (int i = r; i < n; ++i)
                for (int j = r; j < n; ++j) {
                    Int a = abs(A[i][j]);
                    if (a != 0 && (bi < 0 || a < best)) {
                        best = a;
                        bi = i;
                        bj = j;
                    }
                }
            if (bi < 0) throw domain_error("sublattice basis is singular");
            std::swap(A[r], A[bi]);
            for (int i = 0; i < n; ++i) std::swap(A[i][r], A[i][bj]);
            bool clean = true;
            for (int i = r + 1; i < n; ++i) {
                Int q = A[i][r] / A[r][r];
                if (q != 0)
                    for (int j = r; j < n; ++j) A[i][j] -= q * A[r][j];
                if (A[i][r] != 0) clean = false;
            }
            for (int j = r + 1; j < n; ++j) {
                Int q = A[r][j] / A[r][r];
                if (q != 0)
                    for (int i = r; i < n; ++i) A[i][j] -= q * A[i][r];
                if (A[r][j] != 0) clean = false;
            }
            if (clean) break;
        }
        divisors.push_back(abs(A[r][r]));
    }
    std::vector<int> parts;
    for (Int d : divisors) {
        int e = 0;
        while (d % p == 0) {
            d /= p;
            ++e;
        }
        if (d != 1) throw domain_error("elementary divisor is not a power of p");
        if (e > 0) parts.push_back(e);
    }
    std::sort(parts.begin(), parts.end());
    return parts;
}

void hnf_rows_rec(uint64_t p, int n, int row, int rem, std::vector<int>& diag,
                  std::vector<GlSublattice>& out) {
    if (row == n) {
        if (rem != 0) return;
        // Entries right of the diagonal run mod p^{a_i} for row i.
        std::vector<Int> pk(n);
        for (int i = 0; i < n; ++i) {
            Int v = 1;
            for (int e = 0; e < diag[i]; ++e) v *= p;
            pk[i] = v;
        }
        std::vector<std::vector<Int>> basis(n, std::vector<Int>(n, 0));
        for (int i = 0; i < n; ++i) basis[i][i] = pk[i];
        std::vector<std::pair<int, int>> free_slots;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (pk[i] > 1) free_slots.emplace_back(i, j);
        std::vector<Int> odo(free_slots.size(), 0);
        for (;;) {
            for (size_t s = 0; s < free_slots.size(); ++s)
                basis[free_slots[s].first][free_slots[s].second] = odo[s];
            GlSublattice sub;
            sub.basis = basis;
            sub.type = integer_snf_type(basis, p);
            out.push_back(std::move(sub));
            int k = static_cast<int>(free_slots.size()) - 1;
            while (k >= 0) {
                odo[k] += 1;
                if (odo[k] < pk[free_slots[k].first]) break;
                odo[k] = 0;
                --k;
            }
            if (k < 0) break;
        }
        return;
    }
    for (int a = 0; a <= rem; ++a) {
        diag[row] = a;
        hnf_rows_rec(p, n, row + 1, rem - a, diag, out);
    }
    diag[row] = 0;
}

} // namespace

std::vector<GlSublattice> enumerate_sublattices(uint64_t p, int n, int colength) {
    if (!is_small_prime(p)) throw domain_error("p must be prime");
    if (n < 1 || n > 4) throw domain_error("rank out of the enumeration range");
    if (colength < 0) throw domain_error("colength must be nonnegative");
    std::vector<GlSublattice> out;
    std::vector<int> diag(n, 0);
    hnf_rows_rec(p, n, 0, colength, diag, out);
    return out;
}

std::vector<FormSublattice> enumerate_sublattices(SabFlavor flavor, uint64_t p, int n, int d) {
    if (!is_small_prime(p)) throw domain_error("p must be prime");
    if (d < 1) throw domain_error("type depth d must be at least 1");
    const bool herm = flavor == SabFlavor::hermitian;
    const int rank = herm ? n : 2 * n;
    if (herm && (n < 2 || n > 4)) throw domain_error("rank out of the enumeration range");
    if (!herm && (n < 1 || n > 2)) throw domain_error("rank out of the enumeration range");

    const int N = d + 2; // enough precision to certify the Jordan jump
    const uint64_t pd = pow_u64_checked(p, d);
    const uint64_t pd1 = pow_u64_checked(p, d - 1);
    Int pdN = 1;
    for (int i = 0; i < d; ++i) pdN *= p;

    std::vector<FormSublattice> out;
    for (int k = 1; k <= rank; ++k) {
        // Coefficient a_i runs mod p^d for i < k, mod p^{d-1} for i > k;
        // each coefficient is a pair (x, y) for u, a single value for sp.
        std::vector<uint64_t> radix;
        for (int i = 1; i <= rank; ++i) {
            if (i == k) continue;
            uint64_t m = i < k ? pd : pd1;
            radix.push_back(m);
            if (herm) radix.push_back(m);
        }
        std::vector<uint64_t> odo(radix.size(), 0);
        for (;;) {
            FormSublattice sub;
            sub.pivot = k;
            int pos = 0;
            std::vector<std::pair<Int, Int>> cs;
            for (int i = 1; i <= rank; ++i) {
                if (i == k) continue;
                uint64_t x = odo[pos++];
                uint64_t y = herm ? odo[pos++] : 0;
                cs.emplace_back(Int(x), Int(y));
            }
            sub.coeffs = cs;
            sub.basis.assign(rank, std::vector<std::pair<Int, Int>>(
                                       rank, {Int(0), Int(0)}));
            int ci = 0;
            for (int i = 1; i <= rank; ++i) {
                if (i == k) {
                    sub.basis[i - 1][k - 1] = {pdN, Int(0)};
                    continue;
                }
                auto [x, y] = cs[ci++];
                sub.basis[i - 1][i - 1] = {Int(1), Int(0)};
                if (i < k)
                    sub.basis[i - 1][k - 1] = {x, y};
                else
                    sub.basis[i - 1][k - 1] = {Int(p) * x, Int(p) * y};
            }
            if (herm) {
                // Jordan jump: l = min(ord(1 + sum N(a_i) + p^2 sum N(a_j)), d).
                TruncatedInt expr = TruncatedInt::one(p, N);
                ci = 0;
                for (int i = 1; i <= rank; ++i) {
                    if (i == k) continue;
                    auto [x, y] = cs[ci++];
                    QuadExtElem a = QuadExtElem::make(p, N, x, y);
                    TruncatedInt nm = a.norm();
                    if (i > k) nm = nm * TruncatedInt(p, N, Int(p) * Int(p));
                    expr += nm;
                }
                int l = std::min(expr.val(), d);
                sub.jt = JordanType(l, 2 * d - l, JordanType::Flavor::hermitian);
            } else {
                sub.jt = JordanType(d, d, JordanType::Flavor::symplectic);
            }
            out.push_back(std::move(sub));
            int t = static_cast<int>(radix.size()) - 1;
            while (t >= 0) {
                if (++odo[t] < radix[t]) break;
                odo[t] = 0;
                --t;
            }
            if (t < 0) break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Residue-field shape enumeration.

namespace {

void validate_kappa_q(uint64_t q) {
    if (q != 2 && q != 3) throw domain_error("residue size must be 2 or 3");
}

uint64_t det2(const BaseRing& rg, uint64_t a, uint64_t b, uint64_t c, uint64_t d) {
    return rg.sub(rg.mul(a, d), rg.mul(b, c));
}

uint64_t det3(const BaseRing& rg, const uint64_t* m) {
    uint64_t r = rg.mul(m[0], det2(rg, m[4], m[5], m[7], m[8]));
    r = rg.sub(r, rg.mul(m[1], det2(rg, m[3], m[5], m[6], m[8])));
    return rg.add(r, rg.mul(m[2], det2(rg, m[3], m[4], m[6], m[7])));
}

uint64_t det4(const BaseRing& rg, const uint64_t* m) {
    uint64_t acc = 0;
    for (int j = 0; j < 4; ++j) {
        uint64_t sub[9];
        int pos = 0;
        for (int i = 1; i < 4; ++i)
            for (int jj = 0; jj < 4; ++jj)
                if (jj != j) sub[pos++] = m[i * 4 + jj];
        uint64_t term = rg.mul(m[j], det3(rg, sub));
        acc = (j % 2 == 0) ? rg.add(acc, term) : rg.sub(acc, term);
    }
    return acc;
}

QS qdet2(const QuadRing& rg, QS a, QS b, QS c, QS d) {
    return rg.sub(rg.mul(a, d), rg.mul(b, c));
}

long long count_gl_type_k1(uint64_t q, const KappaShape& shape) {
    BaseRing rg{q, 1, q};
    const int n = shape.n;
    const int s = n - 1;
    uint64_t u = shape.u_target % q;
    if (u == 0) throw domain_error("determinant target must be a unit");

    // Surviving corner blocks: nilpotent of corank one.
    std::vector<std::array<uint64_t, kMaxN * kMaxN>> blocks;
    uint64_t total = 1;
    for (int i = 0; i < s * s; ++i) total *= q;
    std::array<uint64_t, kMaxN * kMaxN> x{};
    std::array<uint64_t, kMaxN> cp{};
    for (uint64_t idx = 0; idx < total; ++idx) {
        uint64_t v = idx;
        for (int i = 0; i < s * s; ++i) {
            x[(i / s) * s + (i % s)] = v % q;
            v /= q;
        }
        char_poly_flat(rg, x.data(), s, cp.data());
        bool nil = true;
        for (int i = 0; i < s; ++i)
            if (cp[i] != 0) {
                nil = false;
                break;
            }
        if (!nil) continue;
        std::vector<uint64_t> flat(x.begin(), x.begin() + s * s);
        if (rank_mod_p_impl(rg, flat, s) != s - 1) continue;
        blocks.push_back(x);
    }

    long long cnt = 0;
    uint64_t outer = 1;
    for (int i = 0; i < 2 * s + 1; ++i) outer *= q;
    std::array<uint64_t, 16> m{};
    for (const auto& blk : blocks) {
        for (uint64_t idx = 0; idx < outer; ++idx) {
            uint64_t v = idx;
            for (int i = 0; i < s; ++i)
                for (int j = 0; j < s; ++j) m[i * n + j] = blk[i * s + j];
            for (int i = 0; i < s; ++i) {
                m[i * n + s] = v % q;
                v /= q;
            }
            for (int j = 0; j < s; ++j) {
                m[s * n + j] = v % q;
                v /= q;
            }
            m[s * n + s] = v % q;
            uint64_t det = 0;
            if (n == 2)
                det = det2(rg, m[0], m[1], m[2], m[3]);
            else if (n == 3)
                det = det3(rg, m.data());
            else
                det = det4(rg, m.data());
            if (det == u) ++cnt;
        }
    }
    return cnt;
}

long long count_gl_refined(uint64_t q, const KappaShape& shape) {
    const int k1 = shape.k1, k2 = shape.k2;
    const int K = k1 + k2 + 1;
    BaseRing rg{q, K, pow_u64_checked(q, K)};
    BaseRing rk{q, 1, q};
    const uint64_t pk1 = pow_u64_checked(q, k1) % rg.mod;
    const uint64_t pk2 = pow_u64_checked(q, k2) % rg.mod;
    uint64_t c3div = pow_u64_checked(q, k1);
    uint64_t c4div = pow_u64_checked(q, k1 + k2);
    // Divided-coefficient targets of the fiber point: c2/p, c3/p^k1, and the
    // unit c4/p^(k1+k2). The count must not depend on them.
    uint64_t t2 = shape.tau1 % q;
    uint64_t t3 = shape.u2 ? shape.u2->first % q : 0;
    uint64_t t4 = shape.u_target % q;
    if (t4 == 0) throw domain_error("leading divided coefficient must be a unit");

    // Outer pair set: x12 (nonzero by the inner-rank condition, given that the
    // residue trace forces x22 = 0) and the pair (x31, x23), not both zero.
    struct Task {
        uint64_t x12, x31, x23;
    };
    std::vector<Task> tasks;
    for (uint64_t x12 = 1; x12 < q; ++x12)
        for (uint64_t x31 = 0; x31 < q; ++x31)
            for (uint64_t x23 = 0; x23 < q; ++x23) {
                if (x31 == 0 && x23 == 0) continue;
                tasks.push_back({x12, x31, x23});
            }

    uint64_t inner_total = 1;
    for (int i = 0; i < 12; ++i) inner_total *= q;

    auto run_task = [&](const Task& tk) -> long long {
        long long cnt = 0;
        // Residue variables in visit order: x11 x13 x14 x21 x24 x32 x33 x34
        // x41 x42 x43 x44 (x22 = 0, outer three fixed).
        for (uint64_t idx = 0; idx < inner_total; ++idx) {
            uint64_t v = idx;
            uint64_t r[16];
            uint64_t x11 = v % q; v /= q;
            uint64_t x13 = v % q; v /= q;
            uint64_t x14 = v % q; v /= q;
            uint64_t x21 = v % q; v /= q;
            uint64_t x24 = v % q; v /= q;
            uint64_t x32 = v % q; v /= q;
            uint64_t x33 = v % q; v /= q;
            uint64_t x34 = v % q; v /= q;
            uint64_t x41 = v % q; v /= q;
            uint64_t x42 = v % q; v /= q;
            uint64_t x43 = v % q; v /= q;
            uint64_t x44 = v % q;
            r[0] = x11; r[1] = tk.x12; r[2] = x13; r[3] = x14;
            r[4] = x21; r[5] = 0; r[6] = tk.x23; r[7] = x24;
            r[8] = tk.x31; r[9] = x32; r[10] = x33; r[11] = x34;
            r[12] = x41; r[13] = x42; r[14] = x43; r[15] = x44;

            // Scaled integer lift mod p^K: rows 1..2 have first entry p*x,
            // row 3 scaled p^{k1}, row 4 scaled p^{k2}.
            uint64_t M[16];
            M[0] = rg.mul(q % rg.mod, r[0]); M[1] = r[1]; M[2] = r[2]; M[3] = r[3];
            M[4] = rg.mul(q % rg.mod, r[4]); M[5] = r[5]; M[6] = r[6]; M[7] = r[7];
            for (int j = 0; j < 4; ++j) M[8 + j] = rg.mul(pk1, r[8 + j]);
            for (int j = 0; j < 4; ++j) M[12 + j] = rg.mul(pk2, r[12 + j]);
            uint64_t cp[4];
            char_poly_flat(rg, M, 4, cp);
            if (cp[0] % q != 0) continue;
            if (cp[1] % q != 0 || (cp[1] / q) % q != t2) continue;
            if (cp[2] % c3div != 0 || (cp[2] / c3div) % q != t3) continue;
            if (cp[3] % c4div != 0 || (cp[3] / c4div) % q != t4) continue;

            // Open residue conditions: det of the column-cleared matrix, the
            // corank-one inner block, and the smooth-chart condition.
            uint64_t mp[16];
            for (int i = 0; i < 16; ++i) mp[i] = r[i] % q;
            mp[0] = 0;
            mp[4] = 0;
            if (det4(rk, mp) == 0) continue;
            ++cnt;
        }
        return cnt;
    };

    unsigned hw = std::thread::hardware_concurrency();
    int threads = static_cast<int>(std::min<unsigned>(hw ? hw : 1, 8));
    if (threads <= 1 || tasks.size() <= 1) {
        long long cnt = 0;
        for (const Task& tk : tasks) cnt += run_task(tk);
        return cnt;
    }
    std::vector<long long> sums(threads, 0);
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t]() {
            long long acc = 0;
            for (size_t i = t; i < tasks.size(); i += threads) acc += run_task(tasks[i]);
            sums[t] = acc;
        });
    for (auto& th : pool) th.join();
    long long cnt = 0;
    for (long long s : sums) cnt += s;
    return cnt;
}

long long count_gl3_case(uint64_t q, const KappaShape& shape) {
    BaseRing rg{q, 1, q};
    const int cs = shape.case_no, l = shape.l, top = shape.top;
    uint64_t u = shape.u_target % q;
    if (cs != 4 && u == 0) throw domain_error("stratum target must be a unit");
    uint64_t t1 = 0, t2 = 0, t3 = 0;
    if (cs == 2) t1 = shape.tau1 % q;
    if (cs == 4) {
        std::array<uint64_t, 3> cb = shape.cubic
                                         ? *shape.cubic
                                         : (q == 2 ? std::array<uint64_t, 3>{0, 1, 1}
                                                   : std::array<uint64_t, 3>{0, 2, 1});
        t1 = cb[0] % q;
        t2 = cb[1] % q;
        t3 = cb[2] % q;
        for (uint64_t x = 0; x < q; ++x) {
            uint64_t fx = rg.add(rg.add(rg.mul(rg.mul(x, x), x), rg.mul(t1, rg.mul(x, x))),
                                 rg.add(rg.mul(t2, x), t3));
            if (fx == 0)
                throw domain_error("cubic target for this stratum must be irreducible");
        }
    }

    long long cnt = 0;
    uint64_t total = 1;
    for (int i = 0; i < 9; ++i) total *= q;
    for (uint64_t idx = 0; idx < total; ++idx) {
        uint64_t v = idx;
        uint64_t x11 = v % q; v /= q;
        uint64_t x12 = v % q; v /= q;
        uint64_t x13 = v % q; v /= q;
        uint64_t x21 = v % q; v /= q;
        uint64_t x22 = v % q; v /= q;
        uint64_t x23 = v % q; v /= q;
        uint64_t x31 = v % q; v /= q;
        uint64_t x32 = v % q; v /= q;
        uint64_t x33 = v % q;

        bool ok = true;
        if (cs == 1) {
            ok = rg.add(x11, x22) == 0 &&
                 rg.sub(rg.mul(x11, x22), rg.mul(x12, x21)) == 0;
        } else if (cs == 2) {
            uint64_t e1 = rg.neg(rg.add(x11, shape.e1_includes_x22 ? x22 : 0));
            ok = e1 == t1 && rg.add(rg.mul(x21, x12), rg.mul(x31, x13)) == 0;
        } else if (cs == 3) {
            ok = x11 == 0 && rg.add(rg.mul(x12, x21), rg.mul(x13, x31)) == 0;
        } else {
            uint64_t e1 = rg.neg(rg.add(x11, x22));
            uint64_t e2 = rg.sub(rg.sub(rg.mul(x11, x22), rg.mul(x12, x21)),
                                 rg.mul(x31, x13));
            ok = e1 == t1 && e2 == t2;
        }
        if (!ok) continue;

        if (cs == 3) {
            uint64_t m[9] = {0, x12, x13, x21, x22, x23, x31, x32, x33};
            if (rg.neg(det3(rg, m)) != u) continue;
            ++cnt;
            continue;
        }

        // E3, split by the stratum position within 0..top.
        uint64_t e3;
        uint64_t tgt = cs == 4 ? t3 : u;
        if (cs == 4 && l > 0 && l < top) {
            e3 = rg.mul(rg.mul(x13, x22), x31);
        } else if (l < top) {
            uint64_t z21 = l == 0 ? x21 : 0;
            e3 = rg.neg(rg.mul(x13, det2(rg, z21, x22, x31, x32)));
        } else {
            e3 = rg.neg(rg.mul(x31, det2(rg, x12, x13, x22, x23)));
        }
        if (e3 != tgt) continue;

        uint64_t m[9] = {0,   l == top ? x12 : 0, x13, l == 0 ? x21 : 0, x22,
                         x23, x31, x32, x33};
        if (det3(rg, m) == 0) continue;
        ++cnt;
    }
    return cnt;
}

struct UDnParams {
    QuadRing rg;
    QS u1{}, u2{}, hc{}, hb{};
    bool lower_ge = false;
    bool delta_2d = false, delta_xi = false, delta_d = false;
};

/// Membership in A_j = { z : sigma(z) = (-1)^j z }.
bool in_A(const QuadRing& rg, int j, QS z) {
    QS want = (j % 2 == 0) ? z : rg.neg(z);
    return rg.sigma(z) == want;
}

QS default_A_unit(const QuadRing& rg, int j) {
    if (j % 2 == 0) return rg.one();
    if (rg.p == 2) return rg.one(); // trace-zero line is the prime field
    return rg.make_pair(0, 1);
}

UDnParams resolve_u_dn(uint64_t q, const KappaShape& shape) {
    UDnParams P;
    P.rg = QuadRing::make(q, 1);
    P.lower_ge = shape.lower_ge;
    P.delta_2d = shape.delta_2d;
    P.delta_xi = shape.delta_xi;
    P.delta_d = shape.delta_d;
    const int n = shape.n;
    P.u1 = shape.u1 ? P.rg.make_pair(shape.u1->first, shape.u1->second)
                    : default_A_unit(P.rg, n);
    P.u2 = shape.u2 ? P.rg.make_pair(shape.u2->first, shape.u2->second)
                    : default_A_unit(P.rg, n - 1);
    if (!in_A(P.rg, n, P.u1) || (P.u1 == P.rg.zero()))
        throw domain_error("first target must be a nonzero element of the symmetry line");
    bool need_u2 = !shape.lower_ge || shape.delta_d;
    if (need_u2 && (!in_A(P.rg, n - 1, P.u2) || P.u2 == P.rg.zero()))
        throw domain_error("second target must be a nonzero element of the symmetry line");
    P.hc = P.rg.from(shape.hc % q);
    if (P.hc == P.rg.zero()) throw domain_error("form scalar must be a unit");
    P.hb = P.rg.from(shape.hb % q);
    return P;
}

long long count_u_dn_2(uint64_t q, const KappaShape& shape) {
    UDnParams P = resolve_u_dn(q, shape);
    const QuadRing& rg = P.rg;
    long long cnt = 0;
    uint64_t Q2 = q * q;
    auto unpack = [&](uint64_t i) { return rg.make_pair(i % q, (i / q) % q); };
    for (uint64_t i11 = 0; i11 < Q2; ++i11)
        for (uint64_t i13 = 0; i13 < Q2; ++i13)
            for (uint64_t i31 = 0; i31 < Q2; ++i31)
                for (uint64_t i33 = 0; i33 < Q2; ++i33) {
                    QS x11 = unpack(i11), x13 = unpack(i13);
                    QS x31 = unpack(i31), x33 = unpack(i33);
                    if (!(rg.add(x13, rg.sigma(x13)) == rg.zero())) continue; // (3)
                    if (!(rg.mul(x31, x13) == P.u1)) continue;                // (7)
                    if (!P.lower_ge) {
                        if (!(rg.add(rg.sigma(x11), x13) == rg.zero())) continue; // (6)
                        if (!(x11 == P.u2)) continue;                             // (9)
                        QS lhs = rg.add(x31, rg.sigma(x31));
                        if (P.delta_2d) lhs = rg.add(lhs, rg.add(x11, rg.sigma(x11)));
                        if (!(lhs == rg.zero())) continue; // (4)
                    } else {
                        if (!(rg.add(x31, rg.sigma(x31)) == rg.zero())) continue; // (4')
                        QS e6 = rg.add(rg.sigma(x11), x33);
                        if (P.delta_xi) e6 = rg.add(e6, x13);
                        e6 = rg.add(e6, rg.mul(P.hb, rg.sigma(x31)));
                        if (!(e6 == rg.zero())) continue; // (6')
                        QS rhs = P.delta_d ? P.u2 : rg.zero();
                        if (!(rg.add(x11, x33) == rhs)) continue; // (9')
                    }
                    ++cnt;
                }
    return cnt;
}

long long count_u_dn_3(uint64_t q, const KappaShape& shape, bool unpruned) {
    UDnParams P = resolve_u_dn(q, shape);
    const QuadRing& rg = P.rg;
    const QS c = P.hc;
    uint64_t Q2 = q * q;
    auto unpack = [&](uint64_t i) { return rg.make_pair(i % q, (i / q) % q); };

    // One lambda per scheme equation, evaluated as soon as its variables are
    // fixed (pruned path) or all at the leaf (reference path).
    auto eq1 = [&](QS x22) { // h22 X22 + sigma(tX22) h22 = 0
        return rg.add(rg.mul(c, x22), rg.mul(rg.sigma(x22), c)) == rg.zero();
    };
    auto eq8 = [&](QS x22) { return x22 == rg.zero(); }; // char poly of X22 is x
    auto eq2 = [&](QS x12, QS x23) {
        return rg.add(rg.sigma(x12), rg.mul(c, x23)) == rg.zero();
    };
    auto eq3 = [&](QS x13) { return rg.add(x13, rg.sigma(x13)) == rg.zero(); };
    auto eq5 = [&](QS x12, QS x21) {
        return rg.add(x12, rg.mul(c, rg.sigma(x21))) == rg.zero();
    };
    auto eq6 = [&](QS x11, QS x13) {
        return rg.add(rg.sigma(x11), x13) == rg.zero();
    };
    auto eq4 = [&](QS x11, QS x31) {
        QS lhs = rg.add(x31, rg.sigma(x31));
        if (P.delta_2d) lhs = rg.add(lhs, rg.add(x11, rg.sigma(x11)));
        return lhs == rg.zero();
    };
    auto eq7 = [&](QS x12, QS x13, QS x22, QS x23, QS x31) {
        return rg.mul(x31, qdet2(rg, x12, x13, x22, x23)) == P.u1;
    };
    auto eq9 = [&](QS x11, QS x12, QS x21, QS x22) {
        return qdet2(rg, x11, x12, x21, x22) == P.u2;
    };
    auto eq4p = [&](QS x31) { return rg.add(x31, rg.sigma(x31)) == rg.zero(); };
    auto eq5p = [&](QS x12, QS x21, QS x32) {
        QS lhs = rg.add(x32, rg.mul(rg.sigma(x21), c));
        if (P.delta_xi) lhs = rg.add(lhs, x12);
        return lhs == rg.zero();
    };
    auto eq6p = [&](QS x11, QS x13, QS x31, QS x33) {
        QS lhs = rg.add(rg.add(rg.sigma(x11), x33), rg.mul(P.hb, rg.sigma(x31)));
        if (P.delta_xi) lhs = rg.add(lhs, x13);
        return lhs == rg.zero();
    };
    auto eq9p = [&](QS x11, QS x12, QS x13, QS x21, QS x22, QS x23, QS x31, QS x32,
                    QS x33) {
        QS lhs = rg.add(qdet2(rg, x11, x12, x21, x22), qdet2(rg, x22, x23, x32, x33));
        lhs = rg.sub(lhs, rg.mul(x31, x13)); // (-1)^(n-2) X31 * minor term, n = 3
        QS rhs = P.delta_d ? P.u2 : rg.zero();
        return lhs == rhs;
    };

    long long cnt = 0;
    if (unpruned) {
        for (uint64_t a = 0; a < Q2; ++a)
            for (uint64_t b = 0; b < Q2; ++b)
                for (uint64_t cc = 0; cc < Q2; ++cc)
                    for (uint64_t d = 0; d < Q2; ++d)
                        for (uint64_t e = 0; e < Q2; ++e)
                            for (uint64_t f = 0; f < Q2; ++f)
                                for (uint64_t g = 0; g < Q2; ++g)
                                    for (uint64_t h = 0; h < Q2; ++h)
                                        for (uint64_t i = 0; i < Q2; ++i) {
                                            QS x11 = unpack(a), x12 = unpack(b),
                                               x13 = unpack(cc), x21 = unpack(d),
                                               x22 = unpack(e), x23 = unpack(f),
                                               x31 = unpack(g), x32 = unpack(h),
                                               x33 = unpack(i);
                                            if (!eq1(x22) || !eq8(x22)) continue;
                                            if (!eq2(x12, x23)) continue;
                                            if (!eq3(x13)) continue;
                                            if (!P.lower_ge) {
                                                if (!eq5(x12, x21)) continue;
                                                if (!eq6(x11, x13)) continue;
                                                if (!eq9(x11, x12, x21, x22)) continue;
                                                if (!eq4(x11, x31)) continue;
                                                if (!eq7(x12, x13, x22, x23, x31))
                                                    continue;
                                            } else {
                                                if (!eq4p(x31)) continue;
                                                if (!eq5p(x12, x21, x32)) continue;
                                                if (!eq6p(x11, x13, x31, x33)) continue;
                                                if (!eq7(x12, x13, x22, x23, x31))
                                                    continue;
                                                if (!eq9p(x11, x12, x13, x21, x22, x23,
                                                          x31, x32, x33))
                                                    continue;
                                            }
                                            ++cnt;
                                        }
        return cnt;
    }

    for (uint64_t e = 0; e < Q2; ++e) {
        QS x22 = unpack(e);
        if (!eq1(x22) || !eq8(x22)) continue;
        for (uint64_t b = 0; b < Q2; ++b) {
            QS x12 = unpack(b);
            for (uint64_t f = 0; f < Q2; ++f) {
                QS x23 = unpack(f);
                if (!eq2(x12, x23)) continue;
                for (uint64_t d = 0; d < Q2; ++d) {
                    QS x21 = unpack(d);
                    if (!P.lower_ge && !eq5(x12, x21)) continue;
                    for (uint64_t cc = 0; cc < Q2; ++cc) {
                        QS x13 = unpack(cc);
                        if (!eq3(x13)) continue;
                        for (uint64_t a = 0; a < Q2; ++a) {
                            QS x11 = unpack(a);
                            if (!P.lower_ge) {
                                if (!eq6(x11, x13)) continue;
                                if (!eq9(x11, x12, x21, x22)) continue;
                            }
                            for (uint64_t g = 0; g < Q2; ++g) {
                                QS x31 = unpack(g);
                                if (!eq7(x12, x13, x22, x23, x31)) continue;
                                if (!P.lower_ge) {
                                    if (!eq4(x11, x31)) continue;
                                    cnt += static_cast<long long>(Q2) * Q2; // x32, x33 free
                                    continue;
                                }
                                if (!eq4p(x31)) continue;
                                for (uint64_t h = 0; h < Q2; ++h) {
                                    QS x32 = unpack(h);
                                    if (!eq5p(x12, x21, x32)) continue;
                                    for (uint64_t i = 0; i < Q2; ++i) {
                                        QS x33 = unpack(i);
                                        if (!eq6p(x11, x13, x31, x33)) continue;
                                        if (!eq9p(x11, x12, x13, x21, x22, x23, x31,
                                                  x32, x33))
                                            continue;
                                        ++cnt;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    return cnt;
}

long long count_sp_dn(uint64_t q, const KappaShape& shape, bool unpruned) {
    BaseRing rg{q, 1, q};
    uint64_t u1 = shape.u1 ? shape.u1->first % q : 1;
    if (u1 == 0) throw domain_error("first target must be a unit");
    uint64_t c = shape.hc % q;
    if (c == 0) throw domain_error("form scalar must be a unit");
    const int half = shape.n;

    if (half == 1) {
        long long cnt = 0;
        for (uint64_t x11 = 0; x11 < q; ++x11)
            for (uint64_t x13 = 0; x13 < q; ++x13)
                for (uint64_t x31 = 0; x31 < q; ++x31)
                    for (uint64_t x33 = 0; x33 < q; ++x33) {
                        if (rg.add(x33, x11) != 0) continue;   // (6'')
                        if (rg.mul(x31, x13) != u1) continue;  // (7)
                        ++cnt;
                    }
        return cnt;
    }

    // half == 2: middle block of size m = 2 with form [[0, -c], [c, 0]].
    const uint64_t h01 = rg.neg(c), h10 = c;
    auto eq1 = [&](const uint64_t* x22) {
        // h22 X22 + tX22 h22 = 0 entrywise, with X22 = [[a, b], [d, e]].
        uint64_t a = x22[0], b = x22[1], d = x22[2], e = x22[3];
        uint64_t L[4] = {rg.mul(h01, d), rg.mul(h01, e), rg.mul(h10, a), rg.mul(h10, b)};
        uint64_t T[4] = {rg.mul(d, h10), rg.mul(a, h01), rg.mul(e, h10), rg.mul(b, h01)};
        for (int i = 0; i < 4; ++i)
            if (rg.add(L[i], T[i]) != 0) return false;
        return true;
    };
    auto eq8 = [&](const uint64_t* x22) {
        uint64_t tr = rg.add(x22[0], x22[3]);
        uint64_t det = det2(rg, x22[0], x22[1], x22[2], x22[3]);
        return tr == 0 && det == 0;
    };
    auto eq2 = [&](const uint64_t* x12, const uint64_t* x23) {
        // tX12 + h22 X23 = 0.
        if (rg.add(x12[0], rg.mul(h01, x23[1])) != 0) return false;
        if (rg.add(x12[1], rg.mul(h10, x23[0])) != 0) return false;
        return true;
    };
    auto eq5 = [&](const uint64_t* x21, const uint64_t* x32) {
        // X32 + tX21 h22 = 0.
        if (rg.add(x32[0], rg.mul(x21[1], h10)) != 0) return false;
        if (rg.add(x32[1], rg.mul(x21[0], h01)) != 0) return false;
        return true;
    };
    auto eq7 = [&](const uint64_t* x12, uint64_t x13, const uint64_t* x22,
                   const uint64_t* x23, uint64_t x31) {
        uint64_t m[9] = {x12[0], x12[1], x13,    x22[0], x22[1],
                         x23[0], x22[2], x22[3], x23[1]};
        return rg.mul(x31, det3(rg, m)) == u1;
    };

    long long cnt = 0;
    uint64_t x22[4], x12[2], x23[2], x21[2], x32[2];
    for (uint64_t a = 0; a < q; ++a)
        for (uint64_t b = 0; b < q; ++b)
            for (uint64_t d = 0; d < q; ++d)
                for (uint64_t e = 0; e < q; ++e) {
                    x22[0] = a; x22[1] = b; x22[2] = d; x22[3] = e;
                    if (!unpruned && (!eq1(x22) || !eq8(x22))) continue;
                    for (x12[0] = 0; x12[0] < q; ++x12[0])
                        for (x12[1] = 0; x12[1] < q; ++x12[1])
                            for (x23[0] = 0; x23[0] < q; ++x23[0])
                                for (x23[1] = 0; x23[1] < q; ++x23[1]) {
                                    if (!unpruned && !eq2(x12, x23)) continue;
                                    for (uint64_t x13 = 0; x13 < q; ++x13)
                                        for (uint64_t x31 = 0; x31 < q; ++x31) {
                                            if (!unpruned &&
                                                !eq7(x12, x13, x22, x23, x31))
                                                continue;
                                            for (x21[0] = 0; x21[0] < q; ++x21[0])
                                                for (x21[1] = 0; x21[1] < q; ++x21[1])
                                                    for (x32[0] = 0; x32[0] < q;
                                                         ++x32[0])
                                                        for (x32[1] = 0; x32[1] < q;
                                                             ++x32[1]) {
                                                            if (!unpruned &&
                                                                !eq5(x21, x32))
                                                                continue;
                                                            for (uint64_t x11 = 0;
                                                                 x11 < q; ++x11)
                                                                for (uint64_t x33 = 0;
                                                                     x33 < q; ++x33) {
                                                                    bool ok =
                                                                        rg.add(x33,
                                                                               x11) ==
                                                                        0;
                                                                    if (unpruned)
                                                                        ok = ok &&
                                                                             eq1(x22) &&
                                                                             eq8(x22) &&
                                                                             eq2(x12,
                                                                                 x23) &&
                                                                             eq5(x21,
                                                                                 x32) &&
                                                                             eq7(x12,
                                                                                 x13,
                                                                                 x22,
                                                                                 x23,
                                                                                 x31);
                                                                    if (ok) ++cnt;
                                                                }
                                                        }
                                        }
                                }
                }
    return cnt;
}

} // namespace

KappaShape KappaShape::gl_type_k1(int n, uint64_t det_target) {
    if (n < 2 || n > 4) throw domain_error("pinned-determinant shape needs 2 <= n <= 4");
    KappaShape s;
    s.kind = Kind::gl_type_k1;
    s.n = n;
    s.u_target = det_target;
    return s;
}

KappaShape KappaShape::gl_refined(int k1, int k2) {
    if (k1 < 1 || k2 < k1) throw domain_error("refined shape needs 1 <= k1 <= k2");
    KappaShape s;
    s.kind = Kind::gl_refined;
    s.n = 4;
    s.k1 = k1;
    s.k2 = k2;
    return s;
}

KappaShape KappaShape::gl3_case(int case_no, int l, int top) {
    if (case_no < 1 || case_no > 4) throw domain_error("case number must be 1..4");
    if (case_no == 3) {
        if (l != 0 || top != 0) throw domain_error("the equal-type case has a single stratum");
    } else {
        if (top < 1 || l < 0 || l > top)
            throw domain_error("stratum index must lie in 0..top with top >= 1");
    }
    KappaShape s;
    s.kind = Kind::gl3_case;
    s.n = 3;
    s.case_no = case_no;
    s.l = l;
    s.top = top;
    return s;
}

KappaShape KappaShape::u_dn(int n, bool lower_ge) {
    if (n < 2 || n > 3) throw domain_error("hermitian distinguished shape needs n in {2, 3}");
    KappaShape s;
    s.kind = Kind::u_dn;
    s.n = n;
    s.lower_ge = lower_ge;
    return s;
}

KappaShape KappaShape::sp_dn(int n) {
    if (n < 1 || n > 2) throw domain_error("alternating distinguished shape needs n in {1, 2}");
    KappaShape s;
    s.kind = Kind::sp_dn;
    s.n = n;
    return s;
}

long long enumerate_kappa_fiber(uint64_t q, const KappaShape& shape, bool unpruned) {
    validate_kappa_q(q);
    switch (shape.kind) {
        case KappaShape::Kind::gl_type_k1:
            return count_gl_type_k1(q, shape);
        case KappaShape::Kind::gl_refined:
            return count_gl_refined(q, shape);
        case KappaShape::Kind::gl3_case:
            return count_gl3_case(q, shape);
        case KappaShape::Kind::u_dn:
            // n = 2 has no pruning split worth keeping; it is one flat loop.
            return shape.n == 2 ? count_u_dn_2(q, shape)
                                : count_u_dn_3(q, shape, unpruned);
        case KappaShape::Kind::sp_dn:
            return count_sp_dn(q, shape, unpruned);
    }
    throw domain_error("unknown shape kind");
}

// ---------------------------------------------------------------------------
// Group orders and torus special fibers by direct enumeration.

namespace {

/// Columns are built left to right; partial frames are rejected as soon as a
/// pairing or independence condition fails.
template <class Vec, class CandidateFn, class CheckFn>
long long enumerate_frames(int n, uint64_t candidates, CandidateFn&& decode,
                           CheckFn&& check, std::vector<Vec>& frame, int col) {
    if (col == n) return 1;
    long long cnt = 0;
    for (uint64_t idx = 0; idx < candidates; ++idx) {
        frame[col] = decode(idx);
        if (!check(frame, col)) continue;
        cnt += enumerate_frames<Vec>(n, candidates, decode, check, frame, col + 1);
    }
    return cnt;
}

long long enumerate_gl_order(int n, uint64_t q) {
    BaseRing rg{q, 1, q};
    using Vec = std::array<uint64_t, 4>;
    std::vector<Vec> frame(n);
    uint64_t cand = 1;
    for (int i = 0; i < n; ++i) cand *= q;
    auto decode = [&](uint64_t idx) {
        Vec v{};
        for (int i = 0; i < n; ++i) {
            v[i] = idx % q;
            idx /= q;
        }
        return v;
    };
    auto check = [&](const std::vector<Vec>& f, int col) {
        // Independence of the first col+1 columns.
        std::vector<uint64_t> m((col + 1) * n);
        for (int j = 0; j <= col; ++j)
            for (int i = 0; i < n; ++i) m[j * n + i] = f[j][i];
        // Rank over the residue field via Gauss on a (col+1) x n matrix.
        int rows = col + 1, rank = 0;
        for (int cc = 0; cc < n && rank < rows; ++cc) {
            int piv = -1;
            for (int r = rank; r < rows; ++r)
                if (m[r * n + cc] != 0) {
                    piv = r;
                    break;
                }
            if (piv < 0) continue;
            for (int j = 0; j < n; ++j) std::swap(m[rank * n + j], m[piv * n + j]);
            uint64_t inv = inv_mod_u64(m[rank * n + cc], q);
            for (int r = rank + 1; r < rows; ++r) {
                uint64_t fmul = rg.mul(m[r * n + cc], inv);
                for (int j = cc; j < n; ++j)
                    m[r * n + j] = rg.sub(m[r * n + j], rg.mul(fmul, m[rank * n + j]));
            }
            ++rank;
        }
        return rank == rows;
    };
    return enumerate_frames<Vec>(n, cand, decode, check, frame, 0);
}

long long enumerate_u_order(int n, uint64_t q) {
    QuadRing rg = QuadRing::make(q, 1);
    using Vec = std::array<QS, 4>;
    std::vector<Vec> frame(n);
    uint64_t cand = 1;
    for (int i = 0; i < n; ++i) cand *= q * q;
    auto decode = [&](uint64_t idx) {
        Vec v{};
        for (int i = 0; i < n; ++i) {
            v[i] = rg.make_pair(idx % q, (idx / q) % q);
            idx /= q * q;
        }
        return v;
    };
    auto herm = [&](const Vec& x, const Vec& y) {
        QS acc = rg.zero();
        for (int k = 0; k < n; ++k) acc = rg.add(acc, rg.mul(rg.sigma(x[k]), y[k]));
        return acc;
    };
    auto check = [&](const std::vector<Vec>& f, int col) {
        for (int i = 0; i < col; ++i)
            if (!(herm(f[i], f[col]) == rg.zero())) return false;
        return herm(f[col], f[col]) == rg.one();
    };
    return enumerate_frames<Vec>(n, cand, decode, check, frame, 0);
}

long long enumerate_sp_order(int n, uint64_t q) {
    BaseRing rg{q, 1, q};
    const int w = n / 2;
    using Vec = std::array<uint64_t, 4>;
    std::vector<Vec> frame(n);
    uint64_t cand = 1;
    for (int i = 0; i < n; ++i) cand *= q;
    auto decode = [&](uint64_t idx) {
        Vec v{};
        for (int i = 0; i < n; ++i) {
            v[i] = idx % q;
            idx /= q;
        }
        return v;
    };
    auto pair_form = [&](const Vec& x, const Vec& y) {
        uint64_t acc = 0;
        for (int k = 0; k < w; ++k) {
            acc = rg.add(acc, rg.mul(x[k], y[w + k]));
            acc = rg.sub(acc, rg.mul(x[w + k], y[k]));
        }
        return acc;
    };
    auto target = [&](int i, int j) -> uint64_t {
        if (i < w && j == i + w) return 1;
        if (i >= w && j == i - w) return rg.neg(1);
        return 0;
    };
    auto check = [&](const std::vector<Vec>& f, int col) {
        for (int i = 0; i <= col; ++i)
            if (pair_form(f[i], f[col]) != target(i, col)) return false;
        return true;
    };
    return enumerate_frames<Vec>(n, cand, decode, check, frame, 0);
}

/// F_{q^k} with table arithmetic; elements are indices 0..q^k - 1 whose base-q
/// digits are the coefficients of the residue polynomial.
struct SmallField {
    uint64_t q = 2;
    int k = 1;
    uint64_t Q = 2;
    std::vector<int> mul_t, add_t;
    std::vector<int> frob_t;

    static std::vector<int> digits(uint64_t v, uint64_t q, int k) {
        std::vector<int> d(k);
        for (int i = 0; i < k; ++i) {
            d[i] = static_cast<int>(v % q);
            v /= q;
        }
        return d;
    }

    static SmallField make(uint64_t q, int k) {
        SmallField F;
        F.q = q;
        F.k = k;
        F.Q = 1;
        for (int i = 0; i < k; ++i) F.Q *= q;
        std::vector<int> mod = find_irreducible(q, k);
        F.add_t.assign(F.Q * F.Q, 0);
        F.mul_t.assign(F.Q * F.Q, 0);
        for (uint64_t a = 0; a < F.Q; ++a)
            for (uint64_t b = 0; b < F.Q; ++b) {
                auto da = digits(a, q, k), db = digits(b, q, k);
                uint64_t s = 0, mul = 1;
                for (int i = 0; i < k; ++i) {
                    s += ((da[i] + db[i]) % q) * mul;
                    mul *= q;
                }
                F.add_t[a * F.Q + b] = static_cast<int>(s);
                // Polynomial product reduced mod the defining polynomial.
                std::vector<int> prod(2 * k - 1, 0);
                for (int i = 0; i < k; ++i)
                    for (int j = 0; j < k; ++j)
                        prod[i + j] = (prod[i + j] + da[i] * db[j]) % static_cast<int>(q);
                for (int d = 2 * k - 2; d >= k; --d) {
                    int c = prod[d];
                    if (c == 0) continue;
                    prod[d] = 0;
                    for (int i = 0; i < k; ++i)
                        prod[d - k + i] =
                            (prod[d - k + i] + c * (static_cast<int>(q) - mod[i])) %
                            static_cast<int>(q);
                }
                uint64_t r = 0;
                mul = 1;
                for (int i = 0; i < k; ++i) {
                    r += static_cast<uint64_t>(prod[i]) * mul;
                    mul *= q;
                }
                F.mul_t[a * F.Q + b] = static_cast<int>(r);
            }
        F.frob_t.assign(F.Q, 0);
        for (uint64_t a = 0; a < F.Q; ++a) {
            uint64_t r = a;
            for (uint64_t e = 1; e < q; ++e) r = F.mul_t[r * F.Q + a];
            F.frob_t[a] = static_cast<int>(r);
        }
        return F;
    }

    int add(int a, int b) const { return add_t[static_cast<uint64_t>(a) * Q + b]; }
    int mul(int a, int b) const { return mul_t[static_cast<uint64_t>(a) * Q + b]; }
    int frob(int a, int times) const {
        int r = a;
        for (int i = 0; i < times; ++i) r = frob_t[r];
        return r;
    }
    int neg(int a) const {
        auto d = digits(a, q, k);
        uint64_t r = 0, mul = 1;
        for (int i = 0; i < k; ++i) {
            r += ((q - d[i]) % q) * mul;
            mul *= q;
        }
        return static_cast<int>(r);
    }

private:
    // Low coefficients (c_0 .. c_{k-1}) of a monic irreducible degree-k poly.
    static std::vector<int> find_irreducible(uint64_t q, int k) {
        if (k == 1) return {0};
        auto has_root = [&](const std::vector<int>& f) {
            for (uint64_t x = 0; x < q; ++x) {
                uint64_t acc = 1 % q, s = 0;
                for (int i = 0; i < k; ++i) {
                    s = (s + f[i] * acc) % q;
                    acc = (acc * x) % q;
                }
                s = (s + acc) % q; // monic leading term
                if (s == 0) return true;
            }
            return false;
        };
        auto divisible_by = [&](const std::vector<int>& f, const std::vector<int>& g,
                                int dg) {
            // Remainder of monic f (degree k) by monic g (degree dg).
            std::vector<int> r(f);
            r.push_back(1); // monic
            for (int d = k; d >= dg; --d) {
                int c = r[d];
                if (c == 0) continue;
                r[d] = 0;
                for (int i = 0; i < dg; ++i)
                    r[d - dg + i] =
                        (r[d - dg + i] + c * (static_cast<int>(q) - g[i])) %
                        static_cast<int>(q);
            }
            for (int i = 0; i < dg; ++i)
                if (r[i] != 0) return false;
            return true;
        };
        std::vector<std::vector<int>> quads;
        if (k == 4) {
            for (uint64_t c0 = 0; c0 < q; ++c0)
                for (uint64_t c1 = 0; c1 < q; ++c1) {
                    std::vector<int> g = {static_cast<int>(c0), static_cast<int>(c1)};
                    bool root = false;
                    for (uint64_t x = 0; x < q; ++x)
                        if ((c0 + c1 * x + x * x) % q == 0) root = true;
                    if (!root) quads.push_back(g);
                }
        }
        uint64_t total = 1;
        for (int i = 0; i < k; ++i) total *= q;
        for (uint64_t idx = 0; idx < total; ++idx) {
            std::vector<int> f(k);
            uint64_t v = idx;
            for (int i = 0; i < k; ++i) {
                f[i] = static_cast<int>(v % q);
                v /= q;
            }
            if (has_root(f)) continue;
            if (k == 4) {
                bool bad = false;
                for (const auto& g : quads)
                    if (divisible_by(f, g, 2)) {
                        bad = true;
                        break;
                    }
                if (bad) continue;
            }
            return f;
        }
        throw domain_error("no irreducible polynomial found");
    }
};

// Truncated polynomial ring K[u]/u^e with coefficients in a SmallField.
struct TruncPoly {
    std::array<int, 4> c{};
};

TruncPoly tp_mul(const SmallField& F, int e, const TruncPoly& x, const TruncPoly& y) {
    TruncPoly r;
    for (int i = 0; i < e; ++i)
        for (int j = 0; i + j < e; ++j)
            r.c[i + j] = F.add(r.c[i + j], F.mul(x.c[i], y.c[j]));
    return r;
}

} // namespace

long long enumerate_group(GroupKind kind, int n, uint64_t q) {
    validate_kappa_q(q);
    switch (kind) {
        case GroupKind::gl:
            if (n < 1 || n > 3) throw domain_error("group rank out of the enumeration range");
            return enumerate_gl_order(n, q);
        case GroupKind::u:
            if (n < 1 || n > 3) throw domain_error("group rank out of the enumeration range");
            return enumerate_u_order(n, q);
        case GroupKind::sp:
            if (n < 2 || n > 4 || n % 2 != 0)
                throw domain_error("symplectic rank must be 2 or 4");
            return enumerate_sp_order(n, q);
        case GroupKind::norm_one_torus: {
            QuadRing rg = QuadRing::make(q, 1);
            long long cnt = 0;
            for (uint64_t a = 0; a < q; ++a)
                for (uint64_t b = 0; b < q; ++b) {
                    QS z = rg.make_pair(a, b);
                    if (rg.mul(z, rg.sigma(z)) == rg.one()) ++cnt;
                }
            return cnt;
        }
    }
    throw domain_error("unknown group kind");
}

long long enumerate_torus_fiber(TorusCase c, int n, int d, uint64_t q) {
    validate_kappa_q(q);
    if (n < 1 || n > 2) throw domain_error("torus degree out of the enumeration range");
    if (c == TorusCase::ramified && q == 2)
        throw domain_error("the ramified case needs odd residue characteristic");
    if (d < 1 || d > n || n % d != 0) throw domain_error("need d dividing n");
    const int e = n / d;

    if (c == TorusCase::split) {
        SmallField F = SmallField::make(q, d);
        long long cnt = 0;
        uint64_t total = 1;
        for (int i = 0; i < e; ++i) total *= F.Q;
        for (uint64_t idx = 0; idx < total; ++idx) {
            uint64_t v = idx;
            int c0 = static_cast<int>(v % F.Q);
            if (c0 != 0) ++cnt;
        }
        return cnt;
    }

    if (c == TorusCase::unramified) {
        SmallField F = SmallField::make(q, 2 * d);
        long long cnt = 0;
        uint64_t total = 1;
        for (int i = 0; i < e; ++i) total *= F.Q;
        for (uint64_t idx = 0; idx < total; ++idx) {
            TruncPoly z;
            uint64_t v = idx;
            for (int i = 0; i < e; ++i) {
                z.c[i] = static_cast<int>(v % F.Q);
                v /= F.Q;
            }
            TruncPoly zs;
            for (int i = 0; i < e; ++i) zs.c[i] = F.frob(z.c[i], d);
            TruncPoly prod = tp_mul(F, e, z, zs);
            bool one = prod.c[0] == 1;
            for (int i = 1; i < e; ++i) one = one && prod.c[i] == 0;
            if (one) ++cnt;
        }
        return cnt;
    }

    // Ramified: elements a(w) + v b(w) with v^2 = w; the norm is a^2 - w b^2.
    SmallField F = SmallField::make(q, d);
    long long cnt = 0;
    uint64_t total = 1;
    for (int i = 0; i < e; ++i) total *= F.Q;
    for (uint64_t ia = 0; ia < total; ++ia)
        for (uint64_t ib = 0; ib < total; ++ib) {
            TruncPoly a, b;
            uint64_t v = ia;
            for (int i = 0; i < e; ++i) {
                a.c[i] = static_cast<int>(v % F.Q);
                v /= F.Q;
            }
            v = ib;
            for (int i = 0; i < e; ++i) {
                b.c[i] = static_cast<int>(v % F.Q);
                v /= F.Q;
            }
            TruncPoly a2 = tp_mul(F, e, a, a);
            TruncPoly b2 = tp_mul(F, e, b, b);
            TruncPoly wb2;
            for (int i = 1; i < e; ++i) wb2.c[i] = b2.c[i - 1];
            bool one = true;
            for (int i = 0; i < e; ++i) {
                int lhs = F.add(a2.c[i], F.neg(wb2.c[i]));
                int want = i == 0 ? 1 : 0;
                if (lhs != want) {
                    one = false;
                    break;
                }
            }
            if (one) ++cnt;
        }
    return cnt;
}

} // namespace so
