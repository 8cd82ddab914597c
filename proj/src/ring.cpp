#include "so/ring.hpp"

namespace so {

namespace {

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<__uint128_t>(a) * b) % m);
}

uint64_t powmod(uint64_t a, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

bool is_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t s : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % s == 0) return n == s;
    }
    uint64_t d = n - 1;
    int r = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++r;
    }
    for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 0; i < r - 1; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

} // namespace

uint64_t pow_u64(uint64_t base, int exp) {
    uint64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > (uint64_t(1) << 62) / base) throw domain_error("p^N exceeds the 2^62 word bound");
        r *= base;
    }
    return r;
}

uint64_t least_non_residue(uint64_t p) {
    if (p == 2) throw domain_error("no quadratic non-residue setup for p = 2");
    for (uint64_t a = 2; a < p; ++a)
        if (powmod(a, (p - 1) / 2, p) != 1) return a;
    throw domain_error("no non-residue found; p is not an odd prime");
}

TruncatedInt::TruncatedInt(uint64_t p, int N, const Int& value) : p_(p), N_(N) {
    if (!is_prime(p)) throw domain_error("p must be prime");
    if (N < 1) throw domain_error("precision N must be >= 1");
    mod_ = pow_u64(p, N);
    Int v = value % Int(mod_);
    if (v < 0) v += Int(mod_);
    v_ = static_cast<uint64_t>(v);
}

void TruncatedInt::check_compatible(const TruncatedInt& o) const {
    if (p_ != o.p_) throw domain_error("mixed primes in truncated arithmetic");
    if (N_ != o.N_) throw domain_error("mixed precisions in truncated arithmetic");
}

TruncatedInt TruncatedInt::operator-() const {
    TruncatedInt r = *this;
    r.v_ = v_ == 0 ? 0 : mod_ - v_;
    return r;
}

TruncatedInt& TruncatedInt::operator+=(const TruncatedInt& o) {
    check_compatible(o);
    v_ += o.v_;
    if (v_ >= mod_) v_ -= mod_;
    return *this;
}

TruncatedInt& TruncatedInt::operator-=(const TruncatedInt& o) {
    check_compatible(o);
    v_ = v_ >= o.v_ ? v_ - o.v_ : v_ + mod_ - o.v_;
    return *this;
}

TruncatedInt& TruncatedInt::operator*=(const TruncatedInt& o) {
    check_compatible(o);
    v_ = mulmod(v_, o.v_, mod_);
    return *this;
}

bool TruncatedInt::operator==(const TruncatedInt& o) const {
    check_compatible(o);
    return v_ == o.v_;
}

int TruncatedInt::val() const {
    if (v_ == 0) return N_;
    int v = 0;
    uint64_t x = v_;
    while (x % p_ == 0) {
        x /= p_;
        ++v;
    }
    return v;
}

TruncatedInt TruncatedInt::inverse() const {
    if (!is_unit()) throw domain_error("inverse of a non-unit truncated integer");
    TruncatedInt r = *this;
    // Euler: phi(p^N) = p^(N-1)(p-1).
    uint64_t phi = (mod_ / p_) * (p_ - 1);
    r.v_ = powmod(v_, phi - 1, mod_);
    return r;
}

TruncatedInt TruncatedInt::shift_down(int k) const {
    if (k < 0) throw domain_error("shift_down requires k >= 0");
    if (k == 0) return *this;
    if (N_ - k < 1)
        throw precision_error("division by p^k leaves no certified digits", N_ + k);
    uint64_t pk = pow_u64(p_, k);
    if (v_ % pk != 0) throw domain_error("value not divisible by p^k");
    return {p_, N_ - k, Int(v_ / pk)};
}

TruncatedInt TruncatedInt::shift_up(int k) const {
    if (k < 0) throw domain_error("shift_up requires k >= 0");
    TruncatedInt r = *this;
    for (int i = 0; i < k; ++i) r.v_ = mulmod(r.v_, p_, mod_);
    return r;
}

TruncatedInt TruncatedInt::reduce(int M) const {
    if (M < 1 || M > N_) throw domain_error("reduction precision out of range");
    return {p_, M, Int(v_)};
}

namespace {

// Coefficients (u, v) of the fixed modulus t^2 - u t - v for the unramified
// quadratic extension: t^2 = eps for odd p, t^2 + t + 1 = 0 for p = 2.
std::pair<int64_t, int64_t> quad_modulus(uint64_t p) {
    if (p == 2) return {-1, -1};
    static thread_local uint64_t cached_p = 0;
    static thread_local int64_t cached_eps = 0;
    if (cached_p != p) {
        cached_eps = static_cast<int64_t>(least_non_residue(p));
        cached_p = p;
    }
    return {0, cached_eps};
}

} // namespace

QuadExtElem::QuadExtElem(TruncatedInt a, TruncatedInt b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.p() != b_.p() || a_.precision() != b_.precision())
        throw domain_error("quadratic extension parts disagree on ring parameters");
}

QuadExtElem QuadExtElem::operator-() const { return {-a_, -b_}; }

QuadExtElem& QuadExtElem::operator+=(const QuadExtElem& o) {
    a_ += o.a_;
    b_ += o.b_;
    return *this;
}

QuadExtElem& QuadExtElem::operator-=(const QuadExtElem& o) {
    a_ -= o.a_;
    b_ -= o.b_;
    return *this;
}

QuadExtElem& QuadExtElem::operator*=(const QuadExtElem& o) {
    auto [u, v] = quad_modulus(p());
    TruncatedInt tu = TruncatedInt::constant(a_, u), tv = TruncatedInt::constant(a_, v);
    TruncatedInt bd = b_ * o.b_;
    TruncatedInt na = a_ * o.a_ + bd * tv;
    TruncatedInt nb = a_ * o.b_ + b_ * o.a_ + bd * tu;
    a_ = na;
    b_ = nb;
    return *this;
}

QuadExtElem QuadExtElem::sigma() const {
    auto [u, v] = quad_modulus(p());
    (void)v;
    TruncatedInt tu = TruncatedInt::constant(a_, u);
    return {a_ + b_ * tu, -b_};
}

TruncatedInt QuadExtElem::norm() const {
    QuadExtElem n = *this * sigma();
    return n.a();
}

TruncatedInt QuadExtElem::trace() const {
    QuadExtElem t = *this + sigma();
    return t.a();
}

QuadExtElem QuadExtElem::inverse() const {
    if (!is_unit()) throw domain_error("inverse of a non-unit quadratic extension element");
    TruncatedInt ninv = norm().inverse();
    QuadExtElem s = sigma();
    return {s.a() * ninv, s.b() * ninv};
}

Mat<TruncatedInt> sigma(const Mat<TruncatedInt>& X) { return X; }

Mat<QuadExtElem> sigma(const Mat<QuadExtElem>& X) {
    Mat<QuadExtElem> r = X;
    for (int i = 0; i < X.n(); ++i)
        for (int j = 0; j < X.n(); ++j) r.at(i, j) = X.at(i, j).sigma();
    return r;
}

Mat<TruncatedInt> symplectic_form(int two_n, uint64_t p, int N) {
    if (two_n < 2 || two_n % 2 != 0) throw domain_error("symplectic form needs even dimension");
    int n = two_n / 2;
    Mat<TruncatedInt> J(two_n, TruncatedInt::zero(p, N));
    for (int i = 0; i < n; ++i) {
        J.at(i, n + i) = TruncatedInt::one(p, N);
        J.at(n + i, i) = -TruncatedInt::one(p, N);
    }
    return J;
}

bool is_in_algebra(const Mat<TruncatedInt>& X, Algebra alg) {
    switch (alg) {
    case Algebra::gl:
        return true;
    case Algebra::u:
        throw domain_error("u flavor requires quadratic extension entries");
    case Algebra::sp: {
        const auto& x00 = X.at(0, 0);
        Mat<TruncatedInt> J = symplectic_form(X.n(), x00.p(), x00.precision());
        Mat<TruncatedInt> lhs = J * X + X.transpose() * J;
        return lhs == Mat<TruncatedInt>(X.n(), TruncatedInt::zero(x00.p(), x00.precision()));
    }
    }
    throw domain_error("unknown algebra flavor");
}

bool is_in_algebra(const Mat<QuadExtElem>& X, Algebra alg) {
    switch (alg) {
    case Algebra::gl:
        return true;
    case Algebra::u: {
        // Gram matrix is the identity: condition is X + sigma(tX) = 0.
        Mat<QuadExtElem> lhs = X + sigma(X.transpose());
        return lhs == Mat<QuadExtElem>(X.n(), QuadExtElem::zero(X.at(0, 0).p(), X.at(0, 0).precision()));
    }
    case Algebra::sp:
        throw domain_error("sp flavor is defined over the base ring");
    }
    throw domain_error("unknown algebra flavor");
}

template <class S>
Mat<S> inverse(const Mat<S>& g) {
    const int n = g.n();
    Mat<S> a = g;
    Mat<S> inv = Mat<S>::identity(n, g.at(0, 0));
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int row = col; row < n; ++row)
            if (a.at(row, col).is_unit()) {
                pivot = row;
                break;
            }
        if (pivot < 0) throw domain_error("matrix is not invertible over the truncated ring");
        if (pivot != col)
            for (int j = 0; j < n; ++j) {
                std::swap(a.at(pivot, j), a.at(col, j));
                std::swap(inv.at(pivot, j), inv.at(col, j));
            }
        S piv_inv = a.at(col, col).inverse();
        for (int j = 0; j < n; ++j) {
            a.at(col, j) *= piv_inv;
            inv.at(col, j) *= piv_inv;
        }
        for (int row = 0; row < n; ++row) {
            if (row == col || a.at(row, col).is_zero()) continue;
            S f = a.at(row, col);
            for (int j = 0; j < n; ++j) {
                a.at(row, j) -= f * a.at(col, j);
                inv.at(row, j) -= f * inv.at(col, j);
            }
        }
    }
    return inv;
}

template Mat<TruncatedInt> inverse(const Mat<TruncatedInt>&);
template Mat<QuadExtElem> inverse(const Mat<QuadExtElem>&);

} // namespace so
