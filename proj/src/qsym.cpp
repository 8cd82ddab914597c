#include "so/qsym.hpp"

#include <cctype>
#include <sstream>

namespace so {

QPoly::QPoly(long long c) {
    if (c != 0) terms_[0] = c;
}

QPoly::QPoly(const Int& c) {
    if (c != 0) terms_[0] = c;
}

QPoly QPoly::q_power(int e) {
    QPoly p;
    p.terms_[e] = 1;
    return p;
}

QPoly QPoly::monomial(const Int& c, int e) {
    QPoly p;
    if (c != 0) p.terms_[e] = c;
    return p;
}

bool QPoly::is_one() const {
    return terms_.size() == 1 && terms_.begin()->first == 0 && terms_.begin()->second == 1;
}

int QPoly::degree() const {
    if (terms_.empty()) throw domain_error("degree of zero polynomial");
    return terms_.rbegin()->first;
}

int QPoly::low_degree() const {
    if (terms_.empty()) throw domain_error("low degree of zero polynomial");
    return terms_.begin()->first;
}

Int QPoly::coeff(int e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Int(0) : it->second;
}

void QPoly::set_coeff(int e, const Int& c) {
    if (c == 0)
        terms_.erase(e);
    else
        terms_[e] = c;
}

QPoly QPoly::operator-() const {
    QPoly r;
    for (const auto& [e, c] : terms_) r.terms_[e] = -c;
    return r;
}

QPoly& QPoly::operator+=(const QPoly& o) {
    for (const auto& [e, c] : o.terms_) {
        Int s = coeff(e) + c;
        set_coeff(e, s);
    }
    return *this;
}

QPoly& QPoly::operator-=(const QPoly& o) {
    for (const auto& [e, c] : o.terms_) {
        Int s = coeff(e) - c;
        set_coeff(e, s);
    }
    return *this;
}

QPoly& QPoly::operator*=(const QPoly& o) {
    std::map<int, Int> prod;
    for (const auto& [e1, c1] : terms_)
        for (const auto& [e2, c2] : o.terms_) prod[e1 + e2] += c1 * c2;
    terms_.clear();
    for (auto& [e, c] : prod)
        if (c != 0) terms_[e] = std::move(c);
    return *this;
}

std::optional<QPoly> QPoly::divided_by(const QPoly& d) const {
    if (d.is_zero()) throw domain_error("division by zero polynomial");
    if (is_zero()) return QPoly();
    // Reduce to ordinary polynomials; the exponent shift carries the Laurent part.
    int shift = low_degree() - d.low_degree();
    QPoly rem, div;
    for (const auto& [e, c] : terms_) rem.terms_[e - low_degree()] = c;
    for (const auto& [e, c] : d.terms_) div.terms_[e - d.low_degree()] = c;
    QPoly quot;
    const Int& dl = div.terms_.rbegin()->second;
    const int dd = div.degree();
    while (!rem.is_zero() && rem.degree() >= dd) {
        const Int& rl = rem.terms_.rbegin()->second;
        if (rl % dl != 0) return std::nullopt;
        Int qc = rl / dl;
        int qe = rem.degree() - dd;
        quot.terms_[qe] = qc;
        rem -= QPoly::monomial(qc, qe) * div;
    }
    if (!rem.is_zero()) return std::nullopt;
    QPoly out;
    for (const auto& [e, c] : quot.terms_) out.terms_[e + shift] = c;
    return out;
}

QPoly QPoly::compose_power(int k) const {
    if (k < 1) throw domain_error("compose_power requires k >= 1");
    QPoly r;
    for (const auto& [e, c] : terms_) r.terms_[e * k] = c;
    return r;
}

Rational QPoly::eval(const Rational& q) const {
    if (q == 0 && !terms_.empty() && low_degree() < 0)
        throw domain_error("Laurent polynomial evaluated at 0");
    Rational acc = 0;
    for (const auto& [e, c] : terms_) {
        Rational t = c;
        Rational base = e >= 0 ? q : Rational(1) / q;
        for (int i = 0; i < (e >= 0 ? e : -e); ++i) t *= base;
        acc += t;
    }
    return acc;
}

namespace {

Int content(const QPoly& p) {
    Int g = 0;
    for (const auto& [e, c] : p.terms()) g = boost::multiprecision::gcd(g, c);
    return g == 0 ? Int(1) : g;
}

QPoly divide_content(const QPoly& p, const Int& g) {
    QPoly r;
    for (const auto& [e, c] : p.terms()) r.set_coeff(e, c / g);
    return r;
}

QPoly primitive_part(const QPoly& p) {
    if (p.is_zero()) return p;
    Int g = content(p);
    if (p.terms().rbegin()->second < 0) g = -g;
    return divide_content(p, g);
}

// Pseudo-remainder of ordinary polynomials: lc(b)^(da-db+1) * a mod b.
QPoly pseudo_rem(QPoly a, const QPoly& b) {
    const Int& bl = b.terms().rbegin()->second;
    const int db = b.degree();
    int steps = a.is_zero() ? 0 : a.degree() - db + 1;
    for (int i = 0; i < steps; ++i) {
        if (a.is_zero() || a.degree() < db) {
            QPoly scaled;
            for (const auto& [e, c] : a.terms()) scaled.set_coeff(e, c * bl);
            a = scaled;
            continue;
        }
        Int al = a.terms().rbegin()->second;
        int sh = a.degree() - db;
        QPoly scaled;
        for (const auto& [e, c] : a.terms()) scaled.set_coeff(e, c * bl);
        a = scaled - QPoly::monomial(al, sh) * b;
    }
    return a;
}

// GCD of ordinary integer polynomials via the primitive remainder sequence.
QPoly poly_gcd(QPoly a, QPoly b) {
    if (a.is_zero()) return primitive_part(b);
    if (b.is_zero()) return primitive_part(a);
    a = primitive_part(a);
    b = primitive_part(b);
    if (a.degree() < b.degree()) std::swap(a, b);
    while (!b.is_zero()) {
        QPoly r = primitive_part(pseudo_rem(a, b));
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

} // namespace

QRat::QRat(QPoly num, QPoly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw domain_error("zero denominator");
    normalize();
}

void QRat::normalize() {
    if (den_.is_zero()) throw domain_error("zero denominator");
    if (num_.is_zero()) {
        den_ = QPoly(1);
        return;
    }
    // Clear Laurent shifts so both parts are ordinary polynomials.
    int m = std::min(num_.low_degree(), den_.low_degree());
    if (m != 0) {
        QPoly n2, d2;
        for (const auto& [e, c] : num_.terms()) n2.set_coeff(e - m, c);
        for (const auto& [e, c] : den_.terms()) d2.set_coeff(e - m, c);
        num_ = std::move(n2);
        den_ = std::move(d2);
    }
    QPoly g = poly_gcd(num_, den_);
    if (!g.is_one()) {
        num_ = *num_.divided_by(g);
        den_ = *den_.divided_by(g);
    }
    Int cn = content(num_), cd = content(den_);
    Int cg = boost::multiprecision::gcd(cn, cd);
    if (den_.terms().rbegin()->second < 0) cg = -cg;
    if (cg != 1) {
        num_ = divide_content(num_, cg);
        den_ = divide_content(den_, cg);
    }
}

QRat QRat::operator-() const {
    QRat r = *this;
    r.num_ = -r.num_;
    return r;
}

QRat& QRat::operator+=(const QRat& o) {
    num_ = num_ * o.den_ + o.num_ * den_;
    den_ *= o.den_;
    normalize();
    return *this;
}

QRat& QRat::operator-=(const QRat& o) {
    num_ = num_ * o.den_ - o.num_ * den_;
    den_ *= o.den_;
    normalize();
    return *this;
}

QRat& QRat::operator*=(const QRat& o) {
    num_ *= o.num_;
    den_ *= o.den_;
    normalize();
    return *this;
}

QRat& QRat::operator/=(const QRat& o) {
    if (o.num_.is_zero()) throw domain_error("division by zero rational function");
    num_ *= o.den_;
    den_ *= o.num_;
    normalize();
    return *this;
}

bool QRat::operator==(const QRat& o) const {
    return num_ * o.den_ == o.num_ * den_;
}

QRat QRat::compose_power(int k) const {
    return QRat(num_.compose_power(k), den_.compose_power(k));
}

Rational QRat::eval(const Rational& q) const {
    Rational d = den_.eval(q);
    if (d == 0) throw domain_error("denominator vanishes at evaluation point");
    return num_.eval(q) / d;
}

QPoly gl_order(int n) {
    if (n < 0) throw domain_error("gl_order requires n >= 0");
    QPoly r = QPoly::q_power(n * (n - 1) / 2);
    for (int i = 1; i <= n; ++i) r *= QPoly::q_power(i) - QPoly(1);
    return r;
}

QPoly u_order(int n) {
    if (n < 0) throw domain_error("u_order requires n >= 0");
    QPoly r = QPoly::q_power(n * (n - 1) / 2);
    for (int i = 1; i <= n; ++i) {
        QPoly f = QPoly::q_power(i) - QPoly(i % 2 == 0 ? 1 : -1);
        r *= f;
    }
    return r;
}

QPoly sp_order(int n) {
    if (n < 0) throw domain_error("sp_order requires n >= 0");
    QPoly r = QPoly::q_power(n * n);
    for (int i = 1; i <= n; ++i) r *= QPoly::q_power(2 * i) - QPoly(1);
    return r;
}

QPoly grassmannian_count(int k, int n) {
    if (n < 0) throw domain_error("grassmannian_count requires n >= 0");
    if (k < 0 || k > n) return QPoly();
    QPoly r(1);
    for (int i = 1; i <= k; ++i) {
        QPoly numf = QPoly::q_power(n - i + 1) - QPoly(1);
        QPoly denf = QPoly::q_power(i) - QPoly(1);
        auto quot = (r * numf).divided_by(denf);
        r = *quot; // Gaussian binomials are polynomials, division is exact
    }
    return r;
}

std::string render(const QPoly& p) {
    if (p.is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const auto& [e, c] = *it;
        Int a = c < 0 ? Int(-c) : c;
        if (first) {
            if (c < 0) out << "-";
            first = false;
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        if (e == 0) {
            out << a.str();
        } else {
            if (a != 1) out << a.str() << "*";
            out << "q";
            if (e != 1) out << "^" << e;
        }
    }
    return out.str();
}

namespace {

std::string render_operand(const QPoly& p, bool rhs_of_div) {
    if (p.terms().size() > 1) return "(" + render(p) + ")";
    if (rhs_of_div && !p.is_zero()) {
        // A term like 4*q would rebind as (x/4)*q on the right of '/'.
        const auto& [e, c] = *p.terms().begin();
        if (e != 0 && c != 1 && c != -1) return "(" + render(p) + ")";
    }
    return render(p);
}

} // namespace

std::string render(const QRat& r) {
    if (r.den().is_one()) return render(r.num());
    return render_operand(r.num(), false) + " / " + render_operand(r.den(), true);
}

std::string render_rational(const Rational& v) {
    std::ostringstream out;
    out << boost::multiprecision::numerator(v).str();
    if (boost::multiprecision::denominator(v) != 1)
        out << "/" << boost::multiprecision::denominator(v).str();
    return out.str();
}

namespace {

/// Recursive descent parser over QRat.
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-'* primary ('^' sint)?
///   primary := uint | 'q' | '(' expr ')'
class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    QRat run() {
        QRat r = expr();
        skip();
        if (pos_ != s_.size()) throw domain_error("unexpected trailing input in expression: " + s_);
        return r;
    }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    QRat expr() {
        QRat r = term();
        for (;;) {
            if (eat('+'))
                r += term();
            else if (eat('-'))
                r -= term();
            else
                return r;
        }
    }

    QRat term() {
        QRat r = factor();
        for (;;) {
            if (eat('*'))
                r *= factor();
            else if (eat('/'))
                r /= factor();
            else
                return r;
        }
    }

    QRat factor() {
        int sign = 1;
        while (eat('-')) sign = -sign;
        QRat base = primary();
        if (eat('^')) {
            long long e = integer();
            QRat p(1);
            QRat b = e >= 0 ? base : QRat(1) / base;
            for (long long i = 0; i < (e >= 0 ? e : -e); ++i) p *= b;
            base = p;
        }
        return sign < 0 ? -base : base;
    }

    QRat primary() {
        char c = peek();
        if (c == '(') {
            eat('(');
            QRat r = expr();
            if (!eat(')')) throw domain_error("missing ')' in expression");
            return r;
        }
        if (c == 'q') {
            ++pos_;
            return QRat(QPoly::q_power(1));
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Int v = 0;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                v = v * 10 + (s_[pos_] - '0');
                ++pos_;
            }
            return QRat(v);
        }
        throw domain_error(std::string("unexpected character '") + c + "' in expression");
    }

    long long integer() {
        skip();
        int sign = 1;
        while (eat('-')) sign = -sign;
        skip();
        if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
            throw domain_error("expected integer exponent");
        long long v = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            v = v * 10 + (s_[pos_] - '0');
            ++pos_;
        }
        return sign * v;
    }

    const std::string& s_;
    size_t pos_ = 0;
};

} // namespace

QRat parse_qrat(const std::string& text) {
    return Parser(text).run();
}

QPoly parse_qpoly(const std::string& text) {
    QRat r = parse_qrat(text);
    auto quot = r.num().divided_by(r.den());
    if (!quot) throw domain_error("expression is not a Laurent polynomial: " + text);
    return *quot;
}

} // namespace so
