#pragma once

#include "so/common.hpp"

#include <cstdint>
#include <vector>

namespace so {

/// Element of Z/p^N viewed as a p-adic integer known to precision N.
/// Invariants: p prime >= 2, N >= 1, p^N <= 2^62, value in [0, p^N).
/// Operations never mix precisions or primes; doing so is a hard error.
class TruncatedInt {
public:
    TruncatedInt(uint64_t p, int N, const Int& value);
    static TruncatedInt zero(uint64_t p, int N) { return {p, N, 0}; }
    static TruncatedInt one(uint64_t p, int N) { return {p, N, 1}; }
    static TruncatedInt constant(const TruncatedInt& like, long long v) {
        return {like.p_, like.N_, Int(v)};
    }

    uint64_t p() const { return p_; }
    int precision() const { return N_; }
    uint64_t value() const { return v_; }
    uint64_t modulus() const { return mod_; }

    TruncatedInt operator-() const;
    TruncatedInt& operator+=(const TruncatedInt& o);
    TruncatedInt& operator-=(const TruncatedInt& o);
    TruncatedInt& operator*=(const TruncatedInt& o);
    friend TruncatedInt operator+(TruncatedInt a, const TruncatedInt& b) { return a += b; }
    friend TruncatedInt operator-(TruncatedInt a, const TruncatedInt& b) { return a -= b; }
    friend TruncatedInt operator*(TruncatedInt a, const TruncatedInt& b) { return a *= b; }
    bool operator==(const TruncatedInt& o) const;
    bool operator!=(const TruncatedInt& o) const { return !(*this == o); }
    bool is_zero() const { return v_ == 0; }

    /// p-adic valuation, saturated at N: a return of N means ">= N" and is not
    /// a certified exact valuation.
    int val() const;
    bool val_certified() const { return val() < N_; }
    bool is_unit() const { return v_ % p_ != 0; }
    TruncatedInt inverse() const;

    /// Exact division by p^k; the result is only known to precision N - k.
    TruncatedInt shift_down(int k) const;
    /// Multiplication by p^k at the same precision (top digits are lost).
    TruncatedInt shift_up(int k) const;
    /// Image in Z/p^M for M <= N.
    TruncatedInt reduce(int M) const;

private:
    void check_compatible(const TruncatedInt& o) const;
    uint64_t p_;
    int N_;
    uint64_t mod_; // p^N
    uint64_t v_;
};

uint64_t pow_u64(uint64_t base, int exp); // overflow-checked

/// Least quadratic non-residue mod an odd prime.
uint64_t least_non_residue(uint64_t p);

/// Element a + b*t of the unramified quadratic extension of Z/p^N, where t is
/// a root of x^2 - u*x - v chosen so the reduction mod p is irreducible:
/// t^2 = eps (least non-residue) for odd p, and t^2 + t + 1 = 0 for p = 2.
class QuadExtElem {
public:
    QuadExtElem(TruncatedInt a, TruncatedInt b);
    static QuadExtElem make(uint64_t p, int N, const Int& a, const Int& b) {
        return {TruncatedInt(p, N, a), TruncatedInt(p, N, b)};
    }
    static QuadExtElem zero(uint64_t p, int N) { return make(p, N, 0, 0); }
    static QuadExtElem one(uint64_t p, int N) { return make(p, N, 1, 0); }
    static QuadExtElem constant(const QuadExtElem& like, long long v) {
        return {TruncatedInt::constant(like.a_, v), TruncatedInt::constant(like.a_, 0)};
    }

    const TruncatedInt& a() const { return a_; }
    const TruncatedInt& b() const { return b_; }
    uint64_t p() const { return a_.p(); }
    int precision() const { return a_.precision(); }
    bool in_base() const { return b_.is_zero(); }

    QuadExtElem operator-() const;
    QuadExtElem& operator+=(const QuadExtElem& o);
    QuadExtElem& operator-=(const QuadExtElem& o);
    QuadExtElem& operator*=(const QuadExtElem& o);
    friend QuadExtElem operator+(QuadExtElem x, const QuadExtElem& y) { return x += y; }
    friend QuadExtElem operator-(QuadExtElem x, const QuadExtElem& y) { return x -= y; }
    friend QuadExtElem operator*(QuadExtElem x, const QuadExtElem& y) { return x *= y; }
    bool operator==(const QuadExtElem& o) const { return a_ == o.a_ && b_ == o.b_; }
    bool operator!=(const QuadExtElem& o) const { return !(*this == o); }
    bool is_zero() const { return a_.is_zero() && b_.is_zero(); }

    /// Galois conjugate over the base ring.
    QuadExtElem sigma() const;
    TruncatedInt norm() const;  // x * sigma(x), lands in the base
    TruncatedInt trace() const; // x + sigma(x), lands in the base

    int val() const { return std::min(a_.val(), b_.val()); }
    bool is_unit() const { return a_.is_unit() || b_.is_unit(); }
    QuadExtElem inverse() const;
    QuadExtElem shift_down(int k) const { return {a_.shift_down(k), b_.shift_down(k)}; }
    QuadExtElem reduce(int M) const { return {a_.reduce(M), b_.reduce(M)}; }

private:
    TruncatedInt a_, b_;
};

enum class Algebra { gl, u, sp };

/// Square matrix over a truncated scalar ring S (TruncatedInt or QuadExtElem).
template <class S>
class Mat {
public:
    Mat(int n, const S& fill) : n_(n), d_(static_cast<size_t>(n) * n, fill) {
        if (n < 1) throw domain_error("matrix dimension must be positive");
    }
    static Mat identity(int n, const S& like) {
        Mat m(n, S::constant(like, 0));
        for (int i = 0; i < n; ++i) m.at(i, i) = S::constant(like, 1);
        return m;
    }

    int n() const { return n_; }
    S& at(int i, int j) { return d_[static_cast<size_t>(i) * n_ + j]; }
    const S& at(int i, int j) const { return d_[static_cast<size_t>(i) * n_ + j]; }

    Mat operator-() const {
        Mat r = *this;
        for (auto& x : r.d_) x = -x;
        return r;
    }
    Mat& operator+=(const Mat& o) {
        check_dim(o);
        for (size_t i = 0; i < d_.size(); ++i) d_[i] += o.d_[i];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        check_dim(o);
        for (size_t i = 0; i < d_.size(); ++i) d_[i] -= o.d_[i];
        return *this;
    }
    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(const Mat& a, const Mat& b) {
        a.check_dim(b);
        Mat r(a.n_, S::constant(a.d_[0], 0));
        for (int i = 0; i < a.n_; ++i)
            for (int k = 0; k < a.n_; ++k)
                for (int j = 0; j < a.n_; ++j) r.at(i, j) += a.at(i, k) * b.at(k, j);
        return r;
    }
    bool operator==(const Mat& o) const { return n_ == o.n_ && d_ == o.d_; }
    bool operator!=(const Mat& o) const { return !(*this == o); }

    Mat transpose() const {
        Mat r = *this;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) r.at(i, j) = at(j, i);
        return r;
    }

    Mat reduce(int M) const {
        Mat r = *this;
        for (auto& x : r.d_) x = x.reduce(M);
        return r;
    }

private:
    void check_dim(const Mat& o) const {
        if (n_ != o.n_) throw domain_error("matrix dimension mismatch");
    }
    int n_;
    std::vector<S> d_;
};

/// Characteristic polynomial coefficients (c_1, ..., c_n) of det(xI - X) =
/// x^n + c_1 x^{n-1} + ... + c_n, computed division-free (Berkowitz), so valid
/// over Z/p^N at any prime including 2.
template <class S>
std::vector<S> char_poly(const Mat<S>& X) {
    const int n = X.n();
    const S zero = S::constant(X.at(0, 0), 0);
    const S one = S::constant(X.at(0, 0), 1);
    // C holds det(xI - M_r) for the leading r x r principal submatrix.
    std::vector<S> C = {one, -X.at(0, 0)};
    for (int r = 1; r < n; ++r) {
        // Toeplitz coefficients t_k for the Berkowitz extension step.
        std::vector<S> t(static_cast<size_t>(r) + 2, zero);
        t[0] = one;
        t[1] = -X.at(r, r);
        std::vector<S> w(static_cast<size_t>(r), zero); // M^j * column, iteratively
        for (int i = 0; i < r; ++i) w[i] = X.at(i, r);
        for (int k = 2; k <= r + 1; ++k) {
            S dot = zero;
            for (int i = 0; i < r; ++i) dot += X.at(r, i) * w[i];
            t[k] = -dot;
            if (k <= r) {
                std::vector<S> w2(static_cast<size_t>(r), zero);
                for (int i = 0; i < r; ++i)
                    for (int j = 0; j < r; ++j) w2[i] += X.at(i, j) * w[j];
                w = std::move(w2);
            }
        }
        std::vector<S> C2(C.size() + 1, zero);
        for (size_t i = 0; i < C2.size(); ++i)
            for (size_t k = 0; k <= i && k < t.size(); ++k)
                if (i - k < C.size()) C2[i] += t[k] * C[i - k];
        C = std::move(C2);
    }
    return {C.begin() + 1, C.end()};
}

/// Apply sigma entrywise; the identity on base-ring matrices.
Mat<TruncatedInt> sigma(const Mat<TruncatedInt>& X);
Mat<QuadExtElem> sigma(const Mat<QuadExtElem>& X);

/// The symplectic Gram matrix [[0, I_n], [-I_n, 0]] of size 2n.
Mat<TruncatedInt> symplectic_form(int two_n, uint64_t p, int N);

/// Flavor membership: gl is unconstrained; u checks X + sigma(tX) = 0 against
/// the identity Gram matrix; sp checks J X + tX J = 0.
bool is_in_algebra(const Mat<TruncatedInt>& X, Algebra alg);
bool is_in_algebra(const Mat<QuadExtElem>& X, Algebra alg);

/// Inverse of a matrix with unit determinant over the truncated ring.
template <class S>
Mat<S> inverse(const Mat<S>& g);

/// g X g^-1.
template <class S>
Mat<S> conjugate(const Mat<S>& g, const Mat<S>& X) {
    return g * X * inverse(g);
}

} // namespace so
