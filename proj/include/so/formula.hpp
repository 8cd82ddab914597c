#pragma once

#include "so/invariant.hpp"
#include "so/qsym.hpp"

#include <string>
#include <utility>
#include <vector>

namespace so {

/// The two volume normalizations a stable orbital integral is reported in.
/// geometric: quotient measure transported from the group and its Chevalley
/// base; dmu: the Weyl-discriminant-weighted measure. The two are related by
/// an exact rational factor (measure_convert) built from the discriminant,
/// the group mass, and the centralizer torus mass.
enum class Measure { geometric, dmu };

/// One exactly evaluated orbital integral: a rational function of the residue
/// cardinality q, tagged with the measure it is normalized in and a content
/// label naming the closed form that produced it. Values whose derivation
/// needs the tame hypothesis (residue characteristic large relative to the
/// rank, or characteristic zero) carry assumes_tame_char = true.
struct OrbitalValue {
    Measure measure = Measure::geometric;
    QRat symbolic;
    std::string formula;
    bool assumes_tame_char = false;

    Rational value_at(const Rational& q) const { return symbolic.eval(q); }
    /// {"measure":..., "formula":..., "assumes_tame_char":...,
    ///  "symbolic":{"num":..., "den":...}, "q":..., "value":"a/b"}
    std::string to_json(const Rational& q) const;
};

/// The same instance in both normalizations.
struct OrbitalPair {
    OrbitalValue geometric;
    OrbitalValue dmu;
};

/// Per-factor data of the characteristic polynomial factorization over the
/// base field, as consumed by measure conversion, parabolic descent, and the
/// bound formulas. Conventions: degree = deg chi_i; res_deg = d_i, the degree
/// of the residue field of the factor ring R_i over kappa; r = the degree of
/// the residue field of the factor field over that of R_i (so the residue
/// degree of F_i/F is d_i * r); serre = S_{R_i}, the R_i-length of the
/// integral closure (the Serre invariant of the factor over o is d_i * S_{R_i});
/// d_bar = the depth parameter of the factor (the canonical constant-term
/// valuation of its R_i-reduction); split = the factor contributes a split
/// (base-field, or in the unitary case base-E) torus block.
struct FactorData {
    int degree = 1;
    int res_deg = 1;
    int r = 1;
    long long serre = 0;
    int d_bar = 1;
    bool split = false;
    std::optional<int> field_disc_val;
};

/// One stratum row of a lattice stratification: the label lists the nonzero
/// elementary divisors of the image sublattice, value is the product
/// c_type x per-stratum volume, i.e. the total mass the stratum contributes.
struct StratumRow {
    std::string label;
    QRat value;
};

// --- closed forms ---------------------------------------------------------

/// Rank one: the fiber is a point; both measures give 1.
OrbitalPair so_gl1();

/// gl2 closed forms. Elliptic instances are selected by the ramification of
/// the quadratic extension and their Serre invariant S >= 0:
///   unramified: geometric (q+1)/q - 2/q^(S+1),   dmu 1 + (q+1)(q^S-1)/(q-1)
///   ramified:   geometric (q+1)/q - (q+1)/q^(S+2), dmu (q^(S+1)-1)/(q-1)
/// Hyperbolic (split) instances ignore ram: geometric (q+1)/q, dmu q^S.
/// Ramification::composite is rejected for elliptic instances.
OrbitalPair so_gl2(bool elliptic, Ramification ram, long long S);

/// gl3, elliptic with unramified cubic extension; S = 3 d', d_gamma = 3 d'.
/// geometric (q+1)(q^2+q+1)/q^3 - 3(q^2+q+1)/q^(d'+3) + 3/q^(3d'+3).
OrbitalPair so_gl3_unramified(int d_prime);

/// gl3, elliptic totally ramified; the residue of S mod 3 selects the case
/// (S = 3d' for d_gamma = 3d'+1, S = 3d'+1 for d_gamma = 3d'+2); S congruent
/// to 2 mod 3 does not occur and is rejected.
OrbitalPair so_gl3_ramified(long long S);

/// gl3 with chi = (irreducible quadratic) x (linear). quad_ram names the
/// ramification of the quadratic extension, S_prime its Serre invariant, and
/// S the Serre invariant of the full instance (S >= S_prime; the geometric
/// value depends on S_prime only, the dmu value carries q^(S - S_prime)).
OrbitalPair so_gl3_quadratic(Ramification quad_ram, long long S, long long S_prime);

/// gl3 split into three linear factors: geometric (q+1)(q^2+q+1)/q^3, dmu q^S.
OrbitalPair so_gl3_hyperbolic(long long S);

/// u2 closed forms (tame hypothesis):
///   unramified: geometric (q+1)/q, dmu q^S
///   ramified:   geometric (q+1)(q^(S+1)-1)/q^(S+2), dmu (q^(S+1)-1)/(q-1)
OrbitalPair so_u2(Ramification ram, long long S);

// --- per-stratum values ---------------------------------------------------

/// Mass of the single-divisor stratum of type (k1): c_(k1) x SO_(k1) =
/// #GL_n(kappa) / ((q-1) q^(n^2-1)), independent of k1 >= 1. n >= 2.
QRat so_type_k1_stratum(int n, int k1);

/// Mass of the (k1,k2) stratum of an elliptic gl3 instance of canonical
/// constant-term valuation d = k1 + k2. With t = ceil(d/3), s = floor(d/3):
///   case 1 (0 < k1 < k2, k1 < t):  B q^k2 ((k1+1)q - (k1-1)) / q^(6+d)
///   case 2 (k1 < k2, k1 > s):      B q^k2 ((d-2k1+1)q - (d-2k1-1)) / q^(6+d)
///   case 3 (k1 = k2 = d/2):        B q^k1 / q^(5+d)
///   case 4 (k1 = t, d = 3t):       the case 1 expression at k1 = t
/// where B = (q^3-1)(q^2-1). Preconditions are enforced per case.
QRat so_gl3_stratum(int k1, int k2, int d, int case_tag);

/// Full stratification of an elliptic gl2 instance with constant-term
/// valuation d: rows (k1, d-k1) for 0 <= k1 <= d/2, summing to the so_gl2
/// closed form (unramified for even d, ramified for odd d).
std::vector<StratumRow> gl2_stratum_rows(int d);

/// Full stratification of an elliptic gl3 instance with canonical
/// constant-term valuation d, across all depression levels: rows (k1+s, k2+s)
/// for k1+k2 = d-3s weighted by q^(-3s), summing to the so_gl3 closed form
/// for d's residue class (unramified for d = 3d', ramified otherwise).
std::vector<StratumRow> gl3_stratum_rows(int d);

/// Stratification of a ramified elliptic u2 instance with Serre invariant S:
/// rows k1 = 0..S of mass q^(-k1) (q^2-1)/q^2, summing to the so_u2 value.
std::vector<StratumRow> u2_stratum_rows(long long S);

/// The single-lattice and total masses of the (d_n)-stratum for u_n / sp_2n
/// with nilpotent reduction. d_n = ord of the top coefficient, d_n_minus_1 =
/// ord of the next one (both >= 1); for u the comparison d_n_minus_1 < d_n
/// selects which Jordan-type family of lattices carries the mass, for sp the
/// family is always (d_n, d_n). total = lattice_count x per_lattice and is
/// independent of d_n and d_n_minus_1 (equal to so_dn_total).
struct DnStratumValue {
    std::pair<int, int> jordan_type;
    QRat per_lattice;
    QPoly lattice_count;
    QRat total;
};
DnStratumValue so_dn_stratum(Algebra g, int n, int d_n, int d_n_minus_1);

/// The fixed total the (d_n)-stratum sums to:
/// u: #U_n(kappa) / ((1+q^(-1)) q^(n^2)); sp: #Sp_2n(kappa) / q^(n(2n+1)).
QRat so_dn_total(Algebra g, int n);

// --- reductions and conversions -------------------------------------------

/// Divide out a common power of the uniformizer: c_i -> c_i / pi^(ik) for
/// gl/u (c_i -> c_i / pi^(2ik) for sp, whose stored coefficients have even
/// x-degree), with the orbital integral over the scaled lattice pairs picking
/// up the returned multiplier q^(-k n(n-1)/2) (gl/u) or q^(-k n^2) (sp).
/// Preconditions: every valuation must certifiably clear the divided power;
/// the reduced polynomial is re-certified at its lower precision.
struct ScaleReduction {
    CharPolyData reduced;
    QRat multiplier;
};
ScaleReduction scale_reduction(const CharPolyData& chi, int k);

/// Convert an orbital value between the two measures. The conversion factor
/// (geometric = factor x dmu) is assembled from the report and factor data:
///   gl: q^(-E) #GL_n(kappa) q^(-n^2) / prod_i (1 - q^(-f_i)), f_i = d_i r_i,
///       E = inv.serre for a single factor, otherwise
///       E = (inv.disc_val - sum field_disc_val_i)/2 (each factor must carry
///       its field discriminant valuation or a domain error is raised);
///   u:  single non-split factor: q^(-S) #U_n(kappa) q^(-n^2) / (1 + q^(-d)),
///       d = factors[0].res_deg; split factors: torus factors (1 - q^(-2 f_i));
///   sp: q^(-S + S_psi) #Sp_2n(kappa) q^(-n(2n+1)) / (1 + q^(-d)) when
///       inv.ramification is unramified, ... / 2 when totally ramified, with
///       S_psi = factors[0].serre and d = factors[0].res_deg.
/// The conversion is only valid under the tame hypothesis; callers must pass
/// acknowledge_tame_char = true, and the result is flagged accordingly.
OrbitalValue measure_convert(const OrbitalValue& value, Measure target,
                             const InvariantReport& inv,
                             const std::vector<FactorData>& factors,
                             Algebra algebra, bool acknowledge_tame_char);

/// Geometric-measure descent multiplier along a factorization into Levi
/// blocks: #G(kappa) q^(-dim G) / prod_i #G_i(kappa) q^(-dim G_i).
/// gl: blocks GL_(n_i); u: split factors are GL_(n_i) over the quadratic
/// residue extension (counted at q^2) and at most one non-split factor stays
/// unitary; sp: split factors are GL_(n_i), a non-split factor stays
/// symplectic of its degree.
QRat parabolic_descent(const std::vector<FactorData>& factors, Algebra g);

// --- bounds ---------------------------------------------------------------

/// Tail coefficient of the depth series: 1 for even depth, 2 for odd.
int epsilon_tail(int d_bar);

/// The depth series in the block variable x := q^(res deg):
/// depth <= 1: 1; otherwise
/// 1 + 2x^(-1) + ... + 2x^(-(floor(depth/2)-1)) + epsilon_tail x^(-floor(depth/2)).
QPoly bound_series(int d_bar);

/// Per-factor lower-bound functions, in the block variable (compose_power
/// moves them to x = q^res_deg):
///   geometric: N'(x) = x/(x-1) x bound_series(d_bar)
///   dmu:       N'_dmu(x) = (x^S_R + ... + x^(S_R - r + 1)) x bound_series(d_bar)
QRat nprime_geometric(int d_bar);
QRat nprime_dmu(long long S_R, int r, int d_bar);

/// Extra scalars the assembled bounds need beyond per-factor data.
/// rho = S(gamma) - sum_i S(gamma_i) (0 for a single factor); l = degree of
/// the irreducible factor of the twisted reduction (u); d = inertial degree
/// of the fixed field (u/sp); s_psi = Serre invariant of the descended
/// polynomial (sp); ramified = the fixed field is ramified (sp).
struct BoundExtras {
    long long rho = 0;
    int l = 1;
    int d = 1;
    long long s_psi = 0;
    bool ramified = false;
};

/// Assembled lower bounds for both measures:
///   gl: geometric #GL_n(kappa)/q^(n^2) x prod_i N'(q^(d_i)),
///       dmu q^rho x prod_i N'_dmu(q^(d_i));
///   u:  geometric #U_n(kappa)/((1+q^(-l)) q^(n^2)) x prod_split N'(q^(2 d_i)),
///       dmu q^rho (1+q^(-d))/(1+q^(-l)) x prod_split N'_dmu(q^(2 d_i));
///   sp: geometric #Sp_2n(kappa)/q^(n(2n+1)) x prod_split N'(q^(d_i)),
///       dmu q^(rho - s_psi) x (1+q^(-d)) [unramified] or 2 [ramified]
///           x prod_split N'_dmu(q^(d_i)).
/// The depth-one convention makes the single-factor depth-1 bound exact.
struct BoundPair {
    QRat geometric;
    QRat dmu;
};
BoundPair lower_bound(Algebra g, const std::vector<FactorData>& factors,
                      const BoundExtras& extra = {});

/// Comparison bounds in the block variable, by partition enumeration:
///   N(x) = x^S_R + ... + x^(S_R-r+1) + r                  (r <= S_R)
///          x^S_R + ... + x + (S_R + 1)                    (r > S_R)
///   M(x) = sum over partitions lam with |lam| <= S_R and fewer than r parts
///          equal to 1 of x^(S_R - #parts), plus sum over partitions with
///          S_R - r <= |lam| < S_R of x^(|lam| - #parts).
/// The dmu value is squeezed: q^rho prod N <= SO_dmu <= q^rho prod M.
std::pair<QPoly, QPoly> yun_bounds(long long S_R, int r);

// --- expansion evidence ---------------------------------------------------

/// Conjectured coefficient of q^(-d_i) in the normalized large-q expansion:
/// 0 for depth 0 or 1, 1 for depth 2, 2 for depth >= 3.
int alpha_expansion_coefficient(int d_bar);

/// Coefficient of q^(-order) in the expansion of f at q = infinity.
Rational expansion_coefficient(const QRat& f, int order);

std::string to_string(Measure m);

} // namespace so
