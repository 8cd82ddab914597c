#include "so/formula.hpp"

#include "so/counting.hpp"

#include <algorithm>
#include <sstream>

namespace so {

namespace {

QPoly qp(int e) { return QPoly::q_power(e); }

int checked_exp(long long e, const char* what) {
    if (e < -100000 || e > 100000) throw domain_error(std::string(what) + " is out of the supported exponent range");
    return static_cast<int>(e);
}

// q^e for a signed exponent, as a rational function.
QRat qpow(long long e) { return QRat(qp(checked_exp(e, "exponent"))); }

OrbitalValue make_value(Measure m, QRat v, std::string formula, bool tame) {
    OrbitalValue out;
    out.measure = m;
    out.symbolic = std::move(v);
    out.formula = std::move(formula);
    out.assumes_tame_char = tame;
    return out;
}

OrbitalPair make_pair(QRat geom, QRat dmu, const std::string& formula, bool geom_tame, bool dmu_tame) {
    return {make_value(Measure::geometric, std::move(geom), formula, geom_tame),
            make_value(Measure::dmu, std::move(dmu), formula, dmu_tame)};
}

void require_nonnegative(long long S) {
    if (S < 0) throw domain_error("the Serre invariant of a closed-form instance is nonnegative");
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

} // namespace

std::string to_string(Measure m) { return m == Measure::geometric ? "geometric" : "dmu"; }

std::string OrbitalValue::to_json(const Rational& q) const {
    std::ostringstream os;
    os << "{\"measure\":\"" << to_string(measure) << "\""
       << ",\"formula\":\"" << json_escape(formula) << "\""
       << ",\"assumes_tame_char\":" << (assumes_tame_char ? "true" : "false")
       << ",\"symbolic\":{\"num\":\"" << json_escape(render(symbolic.num()))
       << "\",\"den\":\"" << json_escape(render(symbolic.den())) << "\"}"
       << ",\"q\":\"" << render_rational(q) << "\""
       << ",\"value\":\"" << render_rational(value_at(q)) << "\"}";
    return os.str();
}

OrbitalPair so_gl1() {
    return make_pair(QRat(1), QRat(1), "gl1.point", false, false);
}

OrbitalPair so_gl2(bool elliptic, Ramification ram, long long S) {
    require_nonnegative(S);
    int s = checked_exp(S, "Serre invariant");
    QRat a(qp(1) + 1, qp(1)); // (q+1)/q
    if (!elliptic) {
        return make_pair(a, QRat(qp(s)), "gl2.hyperbolic", false, true);
    }
    if (ram == Ramification::unramified) {
        QRat geom = a - QRat(2, qp(s + 1));
        QRat dmu = QRat(1) + QRat((qp(1) + 1) * (qp(s) - 1), qp(1) - 1);
        return make_pair(geom, dmu, "gl2.elliptic.unramified", false, true);
    }
    if (ram == Ramification::totally_ramified) {
        QRat geom = a - QRat(qp(1) + 1, qp(s + 2));
        QRat dmu = QRat(qp(s + 1) - 1, qp(1) - 1);
        return make_pair(geom, dmu, "gl2.elliptic.ramified", false, true);
    }
    throw domain_error("an elliptic gl2 instance is unramified or totally ramified");
}

namespace {

// (q+1)(q^2+q+1)/q^3, the split-torus mass all gl3 values approach.
QRat gl3_leading() { return QRat((qp(1) + 1) * (qp(2) + qp(1) + 1), qp(3)); }

} // namespace

OrbitalPair so_gl3_unramified(int d_prime) {
    if (d_prime < 0) throw domain_error("the unramified gl3 closed form needs d' >= 0");
    QPoly c = qp(2) + qp(1) + 1;
    QRat geom = gl3_leading() - QRat(QPoly(3) * c, qp(d_prime + 3)) + QRat(3, qp(3 * d_prime + 3));
    QRat inner = QRat(qp(3 * d_prime)) - QRat(QPoly(3) * (qp(2 * d_prime) - 1), qp(1) + 1) - 1;
    QRat dmu = QRat(c, (qp(1) - 1) * (qp(1) - 1)) * inner + 1;
    return make_pair(geom, dmu, "gl3.elliptic.unramified", false, true);
}

OrbitalPair so_gl3_ramified(long long S) {
    require_nonnegative(S);
    if (S % 3 == 2) throw domain_error("a totally ramified elliptic gl3 instance has S = 0 or 1 mod 3");
    int d_prime = checked_exp(S / 3, "Serre invariant");
    QPoly c = qp(2) + qp(1) + 1;
    QRat front(qp(2), (qp(1) - 1) * (qp(1) - 1));
    if (S % 3 == 0) {
        QRat geom = gl3_leading() - QRat((2 * qp(1) + 1) * c, qp(d_prime + 4)) + QRat(c, qp(3 * d_prime + 5));
        QRat inner = QRat(qp(3 * d_prime)) -
                     QRat((2 * qp(1) + 1) * (qp(2 * d_prime) - 1), qp(1) * (qp(1) + 1)) - 1;
        return make_pair(geom, front * inner + 1, "gl3.elliptic.ramified.s0mod3", false, true);
    }
    QRat geom = gl3_leading() - QRat((qp(1) + 2) * c, qp(d_prime + 4)) + QRat(c, qp(3 * d_prime + 6));
    QRat inner = QRat(qp(3 * d_prime + 1)) -
                 QRat((qp(1) + 2) * (qp(2 * d_prime) - 1), qp(1) + 1) - QRat(qp(1));
    QRat dmu = front * inner + QRat(qp(1) + 1);
    return make_pair(geom, dmu, "gl3.elliptic.ramified.s1mod3", false, true);
}

OrbitalPair so_gl3_quadratic(Ramification quad_ram, long long S, long long S_prime) {
    require_nonnegative(S_prime);
    if (S < S_prime) throw domain_error("the full Serre invariant dominates the quadratic factor's");
    int sp_ = checked_exp(S_prime, "Serre invariant");
    int gap = checked_exp(S - S_prime, "Serre invariant gap");
    QPoly c = qp(2) + qp(1) + 1;
    if (quad_ram == Ramification::unramified) {
        QRat geom = gl3_leading() - QRat(QPoly(2) * c, qp(sp_ + 3));
        QRat dmu = QRat(qp(gap)) * (QRat(1) + QRat((qp(1) + 1) * (qp(sp_) - 1), qp(1) - 1));
        return make_pair(geom, dmu, "gl3.quadratic.unramified", false, true);
    }
    if (quad_ram == Ramification::totally_ramified) {
        QRat geom = gl3_leading() - QRat((qp(1) + 1) * c, qp(sp_ + 4));
        QRat dmu = QRat(qp(gap)) * QRat(qp(sp_ + 1) - 1, qp(1) - 1);
        return make_pair(geom, dmu, "gl3.quadratic.ramified", false, true);
    }
    throw domain_error("the quadratic factor is unramified or totally ramified");
}

OrbitalPair so_gl3_hyperbolic(long long S) {
    require_nonnegative(S);
    return make_pair(gl3_leading(), QRat(qp(checked_exp(S, "Serre invariant"))), "gl3.hyperbolic", false, true);
}

OrbitalPair so_u2(Ramification ram, long long S) {
    require_nonnegative(S);
    int s = checked_exp(S, "Serre invariant");
    if (ram == Ramification::unramified) {
        return make_pair(QRat(qp(1) + 1, qp(1)), QRat(qp(s)), "u2.unramified", true, true);
    }
    if (ram == Ramification::totally_ramified) {
        QRat geom((qp(1) + 1) * (qp(s + 1) - 1), qp(s + 2));
        QRat dmu(qp(s + 1) - 1, qp(1) - 1);
        return make_pair(geom, dmu, "u2.ramified", true, true);
    }
    throw domain_error("an elliptic u2 instance is unramified or totally ramified");
}

QRat so_type_k1_stratum(int n, int k1) {
    if (n < 2) throw domain_error("the single-divisor stratum mass needs n >= 2");
    if (k1 < 1) throw domain_error("the single-divisor stratum has k1 >= 1");
    return QRat(gl_order(n), (qp(1) - 1) * qp(n * n - 1));
}

QRat so_gl3_stratum(int k1, int k2, int d, int case_tag) {
    if (d < 1) throw domain_error("stratum values need a positive constant-term valuation");
    if (k1 < 0 || k1 > k2) throw domain_error("stratum indices are ordered 0 <= k1 <= k2");
    if (k1 + k2 != d) throw domain_error("stratum indices must sum to the constant-term valuation");
    int t = (d + 2) / 3;
    int s = d / 3;
    QPoly B = (qp(3) - 1) * (qp(2) - 1);
    switch (case_tag) {
    case 1:
        if (!(0 < k1 && k1 < k2 && k1 < t))
            throw domain_error("case 1 needs 0 < k1 < k2 and k1 below the ceiling third");
        break;
    case 2:
        if (!(k1 < k2 && k1 > s))
            throw domain_error("case 2 needs k1 < k2 and k1 above the floor third");
        break;
    case 3:
        if (k1 != k2) throw domain_error("case 3 is the balanced stratum k1 = k2");
        return QRat(B * qp(k1), qp(5 + d));
    case 4:
        if (!(d == 3 * t && k1 == t))
            throw domain_error("case 4 is the boundary stratum k1 = d/3 of a divisible valuation");
        break;
    default:
        throw domain_error("stratum case tags run from 1 to 4");
    }
    QPoly w;
    if (case_tag == 2) {
        long long m = d - 2LL * k1;
        w = QPoly(m + 1) * qp(1) - QPoly(m - 1);
    } else {
        w = QPoly(k1 + 1) * qp(1) - QPoly(k1 - 1);
    }
    return QRat(B * qp(k2) * w, qp(6 + d));
}

namespace {

std::string type_label(const std::vector<int>& parts) {
    std::vector<int> nz;
    for (int a : parts)
        if (a != 0) nz.push_back(a);
    if (nz.empty()) return "(0)";
    std::ostringstream os;
    os << '(';
    for (size_t i = 0; i < nz.size(); ++i) {
        if (i) os << ',';
        os << nz[i];
    }
    os << ')';
    return os.str();
}

int gl3_inner_case(int k1, int l) {
    if (l % 3 == 0 && k1 == l / 3) return 4;
    if (k1 < (l + 2) / 3) return 1;
    return 2;
}

} // namespace

std::vector<StratumRow> gl2_stratum_rows(int d) {
    if (d < 1) throw domain_error("the gl2 stratification needs d >= 1");
    std::vector<StratumRow> rows;
    for (int k1 = 0; 2 * k1 <= d; ++k1) {
        if (k1 == 0) {
            rows.push_back({type_label({d}), so_type_k1_stratum(2, d)});
        } else if (2 * k1 < d) {
            rows.push_back({type_label({k1, d - k1}), QRat(qp(-k1)) * QRat(qp(2) - 1, qp(2))});
        } else {
            rows.push_back({type_label({k1, k1}), QRat(qp(-k1)) * QRat(qp(1) - 1, qp(1))});
        }
    }
    return rows;
}

std::vector<StratumRow> gl3_stratum_rows(int d) {
    if (d < 1) throw domain_error("the gl3 stratification needs d >= 1");
    std::vector<StratumRow> rows;
    for (int s = 0; 3 * s <= d; ++s) {
        int l = d - 3 * s;
        QRat scale(qp(-3 * s));
        if (l == 0) {
            rows.push_back({type_label({s, s, s}), scale * QRat((qp(1) - 1) * (qp(2) - 1), qp(3))});
            continue;
        }
        rows.push_back({type_label({s, s, l + s}), scale * QRat((qp(3) - 1) * (qp(2) - 1), qp(5))});
        for (int k1 = 1; 2 * k1 <= l; ++k1) {
            int k2 = l - k1;
            int tag = (k1 == k2) ? 3 : gl3_inner_case(k1, l);
            rows.push_back({type_label({s, k1 + s, k2 + s}), scale * so_gl3_stratum(k1, k2, l, tag)});
        }
    }
    return rows;
}

std::vector<StratumRow> u2_stratum_rows(long long S) {
    require_nonnegative(S);
    int s = checked_exp(S, "Serre invariant");
    std::vector<StratumRow> rows;
    for (int k1 = 0; k1 <= s; ++k1) {
        std::ostringstream os;
        os << "k1=" << k1;
        rows.push_back({os.str(), QRat(qp(2) - 1, qp(k1 + 2))});
    }
    return rows;
}

DnStratumValue so_dn_stratum(Algebra g, int n, int d_n, int d_n_minus_1) {
    if (g == Algebra::gl) throw domain_error("the top-coefficient stratum values cover u and sp only");
    if (d_n < 1 || d_n_minus_1 < 1)
        throw domain_error("nilpotent reduction needs positive coefficient valuations");
    DnStratumValue out;
    if (g == Algebra::u) {
        if (n < 2) throw domain_error("the unitary top-coefficient stratum needs n >= 2");
        int m = n - 2;
        if (d_n_minus_1 < d_n) {
            out.jordan_type = {d_n_minus_1, 2 * d_n - d_n_minus_1};
            out.per_lattice = QRat(u_order(m), qp(m * m + (2 * n - 2) * d_n - d_n_minus_1));
        } else {
            out.jordan_type = {d_n, d_n};
            out.per_lattice = QRat(u_order(m) * (qp(1) - 1), qp(m * m + (2 * n - 3) * d_n + 1));
        }
        out.lattice_count = s_ab_count(SabFlavor::hermitian, out.jordan_type.first, d_n, n);
    } else {
        if (n < 1) throw domain_error("the symplectic top-coefficient stratum needs n >= 1");
        out.jordan_type = {d_n, d_n};
        out.per_lattice =
            QRat(sp_order(n - 1) * (qp(1) - 1), qp(2 * n * n - 3 * n + 2 + (2 * n - 1) * d_n));
        out.lattice_count = s_ab_count(SabFlavor::symplectic, d_n, d_n, n);
    }
    out.total = QRat(out.lattice_count) * out.per_lattice;
    return out;
}

QRat so_dn_total(Algebra g, int n) {
    if (g == Algebra::u) {
        if (n < 1) throw domain_error("the unitary stratum total needs n >= 1");
        return QRat(u_order(n) * qp(1), (qp(1) + 1) * qp(n * n));
    }
    if (g == Algebra::sp) {
        if (n < 1) throw domain_error("the symplectic stratum total needs n >= 1");
        return QRat(sp_order(n), qp(n * (2 * n + 1)));
    }
    throw domain_error("the top-coefficient stratum totals cover u and sp only");
}

ScaleReduction scale_reduction(const CharPolyData& chi, int k) {
    if (k < 0) throw domain_error("scale reduction needs k >= 0");
    if (k == 0) return {chi, QRat(1)};
    int n = chi.n();
    int N = chi.precision();
    bool sp_flavor = chi.algebra() == Algebra::sp;
    int step = sp_flavor ? 2 * k : k; // power of pi divided from c_i per index
    int drop = step * n;
    if (drop >= N)
        throw precision_error("scale reduction exhausts the working precision", drop + 1);
    int NN = N - drop;
    if (chi.algebra() == Algebra::u) {
        std::vector<std::pair<Int, Int>> coeffs;
        const auto& ext = chi.ext_coeffs();
        for (int i = 1; i <= n; ++i) {
            const QuadExtElem& c = ext[i - 1];
            if (c.val() < step * i)
                throw domain_error("scale reduction needs every coefficient valuation to clear the divided power");
            QuadExtElem d = c.shift_down(step * i).reduce(NN);
            coeffs.emplace_back(Int(d.a().value()), Int(d.b().value()));
        }
        CharPolyData reduced = CharPolyData::make_u(chi.p(), NN, coeffs);
        return {reduced, QRat(qp(-k * n * (n - 1) / 2))};
    }
    std::vector<Int> coeffs;
    for (int i = 1; i <= n; ++i) {
        const TruncatedInt& c = chi.base_coeffs()[i - 1];
        if (c.val() < step * i)
            throw domain_error("scale reduction needs every coefficient valuation to clear the divided power");
        coeffs.emplace_back(c.shift_down(step * i).reduce(NN).value());
    }
    if (sp_flavor) {
        CharPolyData reduced = CharPolyData::make_sp(chi.p(), NN, coeffs);
        return {reduced, QRat(qp(-k * n * n))};
    }
    CharPolyData reduced = CharPolyData::make_gl(chi.p(), NN, coeffs);
    return {reduced, QRat(qp(-k * n * (n - 1) / 2))};
}

namespace {

QRat conversion_factor(const InvariantReport& inv, const std::vector<FactorData>& factors,
                       Algebra algebra) {
    if (factors.empty()) throw domain_error("measure conversion needs the factor data");
    int n = 0;
    for (const auto& f : factors) {
        if (f.degree < 1) throw domain_error("factor degrees are positive");
        n += f.degree;
    }
    if (algebra == Algebra::gl) {
        long long E;
        if (factors.size() == 1) {
            E = inv.serre;
        } else {
            long long field_sum = 0;
            for (const auto& f : factors) {
                if (!f.field_disc_val)
                    throw domain_error("measure conversion needs every factor's field discriminant valuation");
                field_sum += *f.field_disc_val;
            }
            long long diff = inv.disc_val - field_sum;
            if (diff < 0 || diff % 2 != 0)
                throw domain_error("discriminant bookkeeping is inconsistent with the factor fields");
            E = diff / 2;
        }
        QRat torus(1);
        for (const auto& f : factors) {
            int fi = f.res_deg * f.r;
            if (fi < 1) throw domain_error("residue degrees are positive");
            torus *= QRat(qp(fi) - 1, qp(fi));
        }
        return qpow(-E) * QRat(gl_order(n), qp(n * n)) / torus;
    }
    if (algebra == Algebra::u) {
        bool any_split = false, any_field = false;
        for (const auto& f : factors) (f.split ? any_split : any_field) = true;
        if (any_split && any_field)
            throw domain_error("mixed unitary factorizations are not supported by the conversion");
        int nu = any_split ? 2 * n : n;
        QRat base = qpow(-inv.serre) * QRat(u_order(nu), qp(nu * nu));
        if (any_split) {
            QRat torus(1);
            for (const auto& f : factors) {
                int fi = f.res_deg * f.r;
                torus *= QRat(qp(2 * fi) - 1, qp(2 * fi));
            }
            return base / torus;
        }
        if (factors.size() != 1)
            throw domain_error("the field-case unitary conversion takes a single factor");
        int d = factors[0].res_deg;
        return base / QRat(qp(d) + 1, qp(d));
    }
    if (factors.size() != 1)
        throw domain_error("the symplectic conversion takes the descended polynomial as a single factor");
    int d = factors[0].res_deg;
    long long s_psi = factors[0].serre;
    QRat base = qpow(-(inv.serre - s_psi)) * QRat(sp_order(n), qp(n * (2 * n + 1)));
    if (inv.ramification == Ramification::unramified) return base / QRat(qp(d) + 1, qp(d));
    if (inv.ramification == Ramification::totally_ramified) return base / QRat(2);
    throw domain_error("the symplectic conversion needs an unramified or totally ramified fixed field");
}

} // namespace

OrbitalValue measure_convert(const OrbitalValue& value, Measure target,
                             const InvariantReport& inv,
                             const std::vector<FactorData>& factors,
                             Algebra algebra, bool acknowledge_tame_char) {
    if (!acknowledge_tame_char)
        throw domain_error("measure conversion relies on the tame hypothesis; the caller must acknowledge it");
    OrbitalValue out = value;
    out.assumes_tame_char = true;
    if (value.measure == target) return out;
    QRat factor = conversion_factor(inv, factors, algebra);
    out.measure = target;
    out.symbolic = target == Measure::geometric ? value.symbolic * factor : value.symbolic / factor;
    return out;
}

QRat parabolic_descent(const std::vector<FactorData>& factors, Algebra g) {
    if (factors.empty()) throw domain_error("parabolic descent needs the factor data");
    int n = 0;
    int nonsplit = 0;
    QRat den(1);
    for (const auto& f : factors) {
        if (f.degree < 1) throw domain_error("factor degrees are positive");
        if (g == Algebra::gl) {
            n += f.degree;
            den *= QRat(gl_order(f.degree), qp(f.degree * f.degree));
        } else if (g == Algebra::u) {
            if (f.split) {
                n += 2 * f.degree;
                den *= QRat(gl_order(f.degree).compose_power(2), qp(2 * f.degree * f.degree));
            } else {
                ++nonsplit;
                n += f.degree;
                den *= QRat(u_order(f.degree), qp(f.degree * f.degree));
            }
        } else {
            if (f.split) {
                n += f.degree;
                den *= QRat(gl_order(f.degree), qp(f.degree * f.degree));
            } else {
                ++nonsplit;
                n += f.degree;
                den *= QRat(sp_order(f.degree), qp(f.degree * (2 * f.degree + 1)));
            }
        }
    }
    if (g != Algebra::gl && nonsplit > 1)
        throw domain_error("a Levi subgroup keeps at most one non-split block");
    QRat num = g == Algebra::gl  ? QRat(gl_order(n), qp(n * n))
               : g == Algebra::u ? QRat(u_order(n), qp(n * n))
                                 : QRat(sp_order(n), qp(n * (2 * n + 1)));
    return num / den;
}

int epsilon_tail(int d_bar) { return d_bar % 2 == 0 ? 1 : 2; }

QPoly bound_series(int d_bar) {
    if (d_bar <= 1) return QPoly(1);
    int h = d_bar / 2;
    QPoly out(1);
    for (int j = 1; j < h; ++j) out += QPoly(2) * qp(-j);
    out += QPoly(epsilon_tail(d_bar)) * qp(-h);
    return out;
}

QRat nprime_geometric(int d_bar) {
    return QRat(qp(1), qp(1) - 1) * QRat(bound_series(d_bar));
}

QRat nprime_dmu(long long S_R, int r, int d_bar) {
    if (r < 1) throw domain_error("the residue multiplicity r is positive");
    int s = checked_exp(S_R, "Serre invariant");
    QPoly sum;
    for (int j = 0; j < r; ++j) sum += qp(s - j);
    return QRat(sum) * QRat(bound_series(d_bar));
}

BoundPair lower_bound(Algebra g, const std::vector<FactorData>& factors, const BoundExtras& extra) {
    if (factors.empty()) throw domain_error("the lower bound needs the factor data");
    if (extra.l < 1 || extra.d < 1)
        throw domain_error("the residue degrees l and d are positive");
    BoundPair out{QRat(1), QRat(1)};
    if (g == Algebra::gl) {
        int n = 0;
        QRat geo(1), dmu(1);
        for (const auto& f : factors) {
            if (f.degree < 1 || f.res_deg < 1) throw domain_error("factor degrees are positive");
            n += f.degree;
            geo *= nprime_geometric(f.d_bar).compose_power(f.res_deg);
            dmu *= nprime_dmu(f.serre, f.r, f.d_bar).compose_power(f.res_deg);
        }
        out.geometric = QRat(gl_order(n), qp(n * n)) * geo;
        out.dmu = qpow(extra.rho) * dmu;
        return out;
    }
    if (g == Algebra::u) {
        int n = 0;
        QRat geo(1), dmu(1);
        for (const auto& f : factors) {
            if (f.degree < 1 || f.res_deg < 1) throw domain_error("factor degrees are positive");
            n += f.split ? 2 * f.degree : f.degree;
            if (!f.split) continue;
            geo *= nprime_geometric(f.d_bar).compose_power(2 * f.res_deg);
            dmu *= nprime_dmu(f.serre, f.r, f.d_bar).compose_power(2 * f.res_deg);
        }
        out.geometric = QRat(u_order(n) * qp(extra.l), (qp(extra.l) + 1) * qp(n * n)) * geo;
        out.dmu = qpow(extra.rho) *
                  QRat((qp(extra.d) + 1) * qp(extra.l), qp(extra.d) * (qp(extra.l) + 1)) * dmu;
        return out;
    }
    int n = 0;
    QRat geo(1), dmu(1);
    for (const auto& f : factors) {
        if (f.degree < 1 || f.res_deg < 1) throw domain_error("factor degrees are positive");
        n += f.degree;
        if (!f.split) continue;
        geo *= nprime_geometric(f.d_bar).compose_power(f.res_deg);
        dmu *= nprime_dmu(f.serre, f.r, f.d_bar).compose_power(f.res_deg);
    }
    out.geometric = QRat(sp_order(n), qp(n * (2 * n + 1))) * geo;
    QRat mid = extra.ramified ? QRat(2) : QRat(qp(extra.d) + 1, qp(extra.d));
    out.dmu = qpow(extra.rho - extra.s_psi) * mid * dmu;
    return out;
}

namespace {

// Visit every partition of m into parts <= cap, reporting (#parts, #ones).
template <typename F>
void walk_partitions(int m, int cap, int parts, int ones, F&& visit) {
    if (m == 0) {
        visit(parts, ones);
        return;
    }
    for (int part = std::min(m, cap); part >= 1; --part)
        walk_partitions(m - part, part, parts + 1, ones + (part == 1 ? 1 : 0), visit);
}

} // namespace

std::pair<QPoly, QPoly> yun_bounds(long long S_R, int r) {
    if (S_R < 0) throw domain_error("the comparison bounds need S_R >= 0");
    if (r < 1) throw domain_error("the residue multiplicity r is positive");
    int s = checked_exp(S_R, "Serre invariant");
    if (s > 64) throw domain_error("the comparison bounds enumerate partitions; S_R is capped at 64");
    QPoly N;
    if (r <= s) {
        for (int j = 0; j < r; ++j) N += qp(s - j);
        N += QPoly(r);
    } else {
        for (int e = 1; e <= s; ++e) N += qp(e);
        N += QPoly(s + 1);
    }
    QPoly M;
    for (int m = 0; m <= s; ++m) {
        walk_partitions(m, m == 0 ? 1 : m, 0, 0, [&](int parts, int ones) {
            if (m <= s && ones < r) M += qp(s - parts);
            if (m >= s - r && m < s) M += qp(m - parts);
        });
    }
    return {N, M};
}

int alpha_expansion_coefficient(int d_bar) {
    if (d_bar <= 1) return 0;
    return d_bar == 2 ? 1 : 2;
}

Rational expansion_coefficient(const QRat& f, int order) {
    if (f.is_zero()) return Rational(0);
    const QPoly& num = f.num();
    const QPoly& den = f.den();
    int dn = num.degree();
    int dd = den.degree();
    int v = dd - dn; // the expansion starts at q^(-v)
    if (order < v) return Rational(0);
    int terms = order - v + 1;
    std::vector<Rational> a(terms), b(terms), c(terms);
    for (int i = 0; i < terms; ++i) {
        a[i] = Rational(num.coeff(dn - i));
        b[i] = Rational(den.coeff(dd - i));
    }
    for (int i = 0; i < terms; ++i) {
        Rational acc = a[i];
        for (int j = 1; j <= i; ++j) acc -= b[j] * c[i - j];
        c[i] = acc / b[0];
    }
    return c[terms - 1];
}

} // namespace so
