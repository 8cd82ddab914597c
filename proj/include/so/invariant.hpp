#pragma once

#include "so/ring.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace so {

/// A characteristic polynomial captured exactly to working precision N.
/// gl: chi = x^n + c_1 x^(n-1) + ... + c_n with base-ring coefficients.
/// u:  same shape with coefficients in the quadratic extension, subject to
///     the anti-hermitian symmetry c_i + (-1)^(i+1) sigma(c_i) = 0.
/// sp: chi(x) = x^(2n) + c_1 x^(2n-2) + ... + c_n, stored via its even-part
///     coefficients (c_1, ..., c_n).
/// Construction certifies separability: the discriminant valuation must be
/// certified below N, otherwise a precision_error is raised.
class CharPolyData {
public:
    static CharPolyData make_gl(uint64_t p, int N, const std::vector<Int>& coeffs);
    static CharPolyData make_sp(uint64_t p, int N, const std::vector<Int>& even_coeffs);
    static CharPolyData make_u(uint64_t p, int N, const std::vector<std::pair<Int, Int>>& coeffs);

    Algebra algebra() const { return algebra_; }
    int n() const { return n_; }
    uint64_t p() const { return p_; }
    int precision() const { return N_; }
    /// Degree of chi as a polynomial in x (2n for sp, n otherwise).
    int degree() const { return algebra_ == Algebra::sp ? 2 * n_ : n_; }

    /// (c_1, ..., c_n); base-ring flavors only.
    const std::vector<TruncatedInt>& base_coeffs() const;
    /// (c_1, ..., c_n); u flavor only.
    const std::vector<QuadExtElem>& ext_coeffs() const;

    /// Full ascending coefficient vector (constant first, monic lead last) of
    /// chi as a base-ring polynomial in x; base-ring flavors only.
    std::vector<TruncatedInt> full_poly() const;

private:
    CharPolyData() = default;
    Algebra algebra_ = Algebra::gl;
    int n_ = 0;
    uint64_t p_ = 2;
    int N_ = 1;
    std::vector<TruncatedInt> base_;
    std::vector<QuadExtElem> ext_;
};

struct NewtonSegment {
    long long slope_num; // slope as a nonnegative fraction in lowest terms
    long long slope_den;
    int length; // horizontal extent
    bool operator==(const NewtonSegment& o) const {
        return slope_num == o.slope_num && slope_den == o.slope_den && length == o.length;
    }
};

/// Segments of the lower Newton polygon, split at every lattice point of the
/// input that lies on the hull, listed with slopes nondecreasing. Slopes are
/// reported as root valuations (nonnegative fractions).
std::vector<NewtonSegment> newton_polygon(const CharPolyData& chi);

/// ord of the discriminant of chi, certified below the working precision.
int discriminant_val(const CharPolyData& chi);

struct TranslationResult {
    Int a;                             // translation amount
    int d_gamma;                       // stabilized ord(chi(x+a) constant term)
    std::vector<TruncatedInt> chi_a;   // (c_1, ..., c_n) of chi(x+a)
};

/// Iteratively translate chi (gl flavor, n prime) until the constant-term
/// order stabilizes: while d_a = n*t and the depressed reduction has a root in
/// the residue field, absorb the smallest lift of that root into a.
TranslationResult translate_to_canonical(const CharPolyData& chi, const Int& start = Int(0));

enum class Ramification { unramified, totally_ramified, composite };

struct InvariantReport {
    int d_gamma;
    Ramification ramification;
    int res_deg;        // residue degree of F_chi / F
    long long serre;    // S(gamma)
    int disc_val;       // ord of the discriminant
    int d_bar;          // stratification depth parameter
};

/// Classification and Serre invariant for irreducible gl-flavor chi. For prime
/// n the Serre invariant is computed by the closed case formulas; for
/// non-prime n it must be supplied externally.
InvariantReport classify_and_serre(const CharPolyData& chi,
                                   std::optional<long long> external_serre = std::nullopt);

/// Wrapper that retries classify_and_serre with doubled precision (starting
/// from N0) whenever a precision_error is raised, up to the word-size cap.
InvariantReport classify_with_retry(uint64_t p, const std::vector<Int>& coeffs, int N0);

/// Lift a coprime factorization of the reduction to precision N by quadratic
/// Hensel iteration. fbar holds the ascending mod-p coefficients of the monic
/// target factor. Returns ascending monic (f, g) with f*g = chi mod p^N.
std::pair<std::vector<TruncatedInt>, std::vector<TruncatedInt>>
hensel_split(const CharPolyData& chi, const std::vector<uint64_t>& fbar);

/// Descend a u- or sp-flavor polynomial to a base-ring (gl-style) polynomial:
/// u: psi(x) = alpha^n chi(x/alpha) for the fixed trace-zero unit alpha;
/// sp: psi with psi(x^2) = chi(x).
CharPolyData sigma_descend(const CharPolyData& chi);

/// The fixed trace-zero unit alpha of the quadratic extension (alpha = t for
/// odd p, alpha = 1 + 2t for p = 2).
QuadExtElem trace_zero_unit(uint64_t p, int N);

/// Parse {"p":..., "N":..., "algebra":"gl|u|sp", "n":..., "coeffs":[...]}
/// where coefficients are decimal strings, or ["a","b"] pairs for u.
CharPolyData parse_instance_json(const std::string& text);

} // namespace so
