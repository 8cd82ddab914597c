#pragma once

#include "so/common.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace so {

/// Laurent polynomial in the formal cardinality q with integer coefficients,
/// stored sparsely as exponent -> coefficient. Invariant: no zero coefficients.
class QPoly {
public:
    QPoly() = default;
    QPoly(long long c);                 // NOLINT: implicit constant lift
    QPoly(const Int& c);                // NOLINT: implicit constant lift
    static QPoly q_power(int e);        // q^e, e may be negative
    static QPoly monomial(const Int& c, int e);

    bool is_zero() const { return terms_.empty(); }
    bool is_one() const;
    /// Degree of the highest term; calling on zero is a domain error.
    int degree() const;
    /// Exponent of the lowest term; calling on zero is a domain error.
    int low_degree() const;
    Int coeff(int e) const;
    const std::map<int, Int>& terms() const { return terms_; }

    QPoly operator-() const;
    QPoly& operator+=(const QPoly& o);
    QPoly& operator-=(const QPoly& o);
    QPoly& operator*=(const QPoly& o);
    friend QPoly operator+(QPoly a, const QPoly& b) { return a += b; }
    friend QPoly operator-(QPoly a, const QPoly& b) { return a -= b; }
    friend QPoly operator*(QPoly a, const QPoly& b) { return a *= b; }
    bool operator==(const QPoly& o) const { return terms_ == o.terms_; }
    bool operator!=(const QPoly& o) const { return !(*this == o); }

    /// Exact quotient, or nullopt if the division leaves a remainder.
    std::optional<QPoly> divided_by(const QPoly& d) const;

    /// Substitute q -> q^k (k >= 1), e.g. to move a count from F_q to F_{q^k}.
    QPoly compose_power(int k) const;

    Rational eval(const Rational& q) const;

    void set_coeff(int e, const Int& c);

private:
    std::map<int, Int> terms_;
};

/// Rational function in q, kept in lowest terms: numerator and denominator are
/// ordinary (non-Laurent) coprime polynomials, denominator has positive leading
/// coefficient, and the coefficient pair is primitive.
class QRat {
public:
    QRat() : num_(0), den_(1) {}
    QRat(long long c) : num_(c), den_(1) {}       // NOLINT
    QRat(const Int& c) : num_(c), den_(1) {}      // NOLINT
    QRat(const QPoly& p) : num_(p), den_(1) { normalize(); }  // NOLINT
    QRat(QPoly num, QPoly den);

    const QPoly& num() const { return num_; }
    const QPoly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }

    QRat operator-() const;
    QRat& operator+=(const QRat& o);
    QRat& operator-=(const QRat& o);
    QRat& operator*=(const QRat& o);
    QRat& operator/=(const QRat& o);
    friend QRat operator+(QRat a, const QRat& b) { return a += b; }
    friend QRat operator-(QRat a, const QRat& b) { return a -= b; }
    friend QRat operator*(QRat a, const QRat& b) { return a *= b; }
    friend QRat operator/(QRat a, const QRat& b) { return a /= b; }
    /// Equality by cross multiplication of the stored fractions.
    bool operator==(const QRat& o) const;
    bool operator!=(const QRat& o) const { return !(*this == o); }

    QRat compose_power(int k) const;

    /// Evaluate at a prime power; the denominator must not vanish there.
    Rational eval(const Rational& q) const;

private:
    void normalize();
    QPoly num_, den_;
};

/// #GL_n(F_q) as a polynomial in q.
QPoly gl_order(int n);
/// #U_n(F_q) (quasi-split unitary group over F_{q^2}) as a polynomial in q.
QPoly u_order(int n);
/// #Sp_{2n}(F_q) as a polynomial in q.
QPoly sp_order(int n);
/// Gaussian binomial: number of k-dimensional subspaces of F_q^n.
QPoly grassmannian_count(int k, int n);

std::string render(const QPoly& p);
std::string render(const QRat& r);
/// Inverse of render; accepts integer/q/^/*//+- expressions with parentheses.
QPoly parse_qpoly(const std::string& text);
QRat parse_qrat(const std::string& text);

std::string render_rational(const Rational& v);

} // namespace so
