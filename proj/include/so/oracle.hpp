#pragma once

#include "so/common.hpp"
#include "so/counting.hpp"
#include "so/invariant.hpp"
#include "so/ring.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace so {

// Brute-force enumeration backends. Everything in this header counts finite
// sets by visiting them, so that the closed-form counting and formula layers
// can be checked against an independent computation. All counts are exact.

/// Result of counting the characteristic-polynomial fiber over Z/p^N.
/// volume = raw_count / q^(N * dim), where dim is the fiber dimension of the
/// coefficient map: n^2 - n for gl and u (matrix size n), n^2/2 for sp
/// (matrix size n, even). stabilized means the same computation at precision
/// N - 1 yields an equal volume; it is always false at N = 1.
struct VolumeEstimate {
    uint64_t p = 0;
    int N = 0;
    int n = 0;
    Algebra algebra = Algebra::gl;
    long long raw_count = 0;
    Rational volume;
    bool stabilized = false;
};

/// Conjunctive restriction of a fiber count to one stratum.
///
/// type: elementary-divisor exponents of the cokernel of X acting on the
///   standard lattice (positive parts, nondecreasing). Requires the exponents
///   to be certified below the working precision; a saturated pivot raises
///   precision_error.
/// refined_rank: corank of the map induced by X-bar on its own image,
///   i.e. rank(X-bar) - rank(X-bar^2) over the residue field.
/// jordan: Jordan type of the image lattice X(L) with respect to the standard
///   hermitian (u) or alternating (sp) form on L; u and sp only. The listed
///   pair covers the nontrivial two-dimensional part; the remaining n - 2
///   Jordan exponents must be 0.
struct StratumFilter {
    std::optional<std::vector<int>> type;
    std::optional<int> refined_rank;
    std::optional<JordanType> jordan;

    bool empty() const { return !type && !refined_rank && !jordan; }
};

/// Count X over Z/p^N with char_poly(X) congruent to the given coefficients
/// (c_1, ..., c_n), optionally restricted by filter. For gl the carrier is all
/// of M_n; for sp (n even) it is the standard symplectic Lie algebra, and the
/// odd coefficients must vanish mod p^N. The node budget guards the carrier
/// size before enumeration starts (budget_error beyond it); when absent it
/// defaults to 2^30, overridable via the SO_BUDGET environment variable.
VolumeEstimate count_fiber(uint64_t p, int N, Algebra alg, int n,
                           const std::vector<Int>& coeffs,
                           const StratumFilter& filter = {},
                           std::optional<long long> budget = std::nullopt);

/// u-flavor overload: coefficients are (a, b) pairs meaning a + b*t over the
/// unramified quadratic extension, subject to the anti-hermitian symmetry
/// sigma(c_i) = (-1)^i c_i. The carrier is the anti-hermitian matrices for the
/// identity Gram matrix.
VolumeEstimate count_fiber(uint64_t p, int N, int n,
                           const std::vector<std::pair<Int, Int>>& coeffs,
                           const StratumFilter& filter = {},
                           std::optional<long long> budget = std::nullopt);

/// Reference path: identical contract to count_fiber but enumerates every
/// carrier coordinate with no solved-variable shortcut and no threading.
/// Slower by a factor p^N; kept for equality tests against the fast path.
VolumeEstimate count_fiber_naive(uint64_t p, int N, Algebra alg, int n,
                                 const std::vector<Int>& coeffs,
                                 const StratumFilter& filter = {},
                                 std::optional<long long> budget = std::nullopt);
VolumeEstimate count_fiber_naive(uint64_t p, int N, int n,
                                 const std::vector<std::pair<Int, Int>>& coeffs,
                                 const StratumFilter& filter = {},
                                 std::optional<long long> budget = std::nullopt);

/// Run count_fiber for N = N_lo, N_lo+1, ... and stop after the first estimate
/// whose volume equals its predecessor's (stabilized = true), or after N_hi.
/// Returns the estimates in order of N.
std::vector<VolumeEstimate> stabilization_scan(uint64_t p, int N_lo, int N_hi,
                                               Algebra alg, int n,
                                               const std::vector<Int>& coeffs,
                                               const StratumFilter& filter = {},
                                               std::optional<long long> budget = std::nullopt);
std::vector<VolumeEstimate> stabilization_scan(uint64_t p, int N_lo, int N_hi, int n,
                                               const std::vector<std::pair<Int, Int>>& coeffs,
                                               const StratumFilter& filter = {},
                                               std::optional<long long> budget = std::nullopt);

/// One full-rank sublattice of o^n, given by the rows of a Hermite-form basis
/// matrix, together with its elementary-divisor type.
struct GlSublattice {
    std::vector<std::vector<Int>> basis; // rows span the sublattice
    std::vector<int> type;               // positive exponents, nondecreasing
};

/// All sublattices of o^n of colength K, each listed exactly once via the
/// row-style Hermite normal form: upper triangular, diagonal p^{a_i}, entries
/// to the right of the diagonal reduced mod p^{a_i}.
std::vector<GlSublattice> enumerate_sublattices(uint64_t p, int n, int colength);

/// One sublattice of type (d) inside a rank-m lattice carrying the standard
/// hermitian (u) or alternating (sp) form; m = n for u over o_E, m = 2n for
/// sp over o. The pivot-and-coefficients parameterization lists each such
/// sublattice exactly once; jt is the Jordan type of the restricted form
/// (nontrivial part; the other m - 2 Jordan exponents are 0).
struct FormSublattice {
    int pivot = 1;                                  // 1-based pivot index
    std::vector<std::pair<Int, Int>> coeffs;        // attached coefficients (b = 0 for sp)
    std::vector<std::vector<std::pair<Int, Int>>> basis; // rows, entries a + b*t
    JordanType jt{0, 2, JordanType::Flavor::hermitian};
};

std::vector<FormSublattice> enumerate_sublattices(SabFlavor flavor, uint64_t p, int n, int d);

/// Special-fiber shape of one smoothed stratum model, enumerated pointwise
/// over the residue field. Factories mirror FiberShape; the extra knobs fix
/// the free targets and representative choices the point count must not
/// depend on (property-tested, not assumed).
struct KappaShape {
    enum class Kind { gl_type_k1, gl_refined, gl3_case, u_dn, sp_dn };

    Kind kind = Kind::gl_type_k1;
    int n = 2;            // gl_type_k1: matrix size; u_dn: rank; sp_dn: half rank
    int case_no = 1;      // gl3_case
    int l = 0;            // gl3_case stratum index
    int top = 1;          // gl3_case last stratum index
    int k1 = 1, k2 = 2;   // gl_refined type
    bool lower_ge = false;    // u_dn: d_{n-1} >= d_n branch
    bool delta_2d = false;    // u_dn <-branch: 2 d_{n-1} == d_n
    bool delta_xi = false;    // u_dn >=-branch: xi == d_n
    bool delta_d = false;     // u_dn >=-branch: d_{n-1} == d_n
    bool e1_includes_x22 = false; // gl3 case 2: k1 == t
    uint64_t u_target = 1;    // pinned determinant / E3 unit / leading divided coefficient
    uint64_t tau1 = 0;        // gl3 case 2 linear target; gl_refined divided c2 target
    uint64_t hc = 1;          // middle-block form scalar
    uint64_t hb = 0;          // corner form parameter (u_dn >=-branch)
    std::optional<std::array<uint64_t, 3>> cubic; // gl3 case 4 targets
    std::optional<std::pair<uint64_t, uint64_t>> u1; // u_dn/sp_dn det target
    std::optional<std::pair<uint64_t, uint64_t>> u2; // u_dn second target; gl_refined divided c3 target (first slot)

    /// Nilpotent-corner shape with pinned determinant, any n in 2..4.
    static KappaShape gl_type_k1(int n, uint64_t det_target = 1);
    /// Corank-one refined shape for the (k1, k2) pair, matrix size 4.
    static KappaShape gl_refined(int k1, int k2);
    /// One of the four 3x3 stratum schemes; validation as in FiberShape.
    static KappaShape gl3_case(int case_no, int l, int top);
    /// Distinguished-stratum shape, hermitian flavor, n in {2, 3}.
    static KappaShape u_dn(int n, bool lower_ge);
    /// Distinguished-stratum shape, alternating flavor, half rank n in {1, 2}.
    static KappaShape sp_dn(int n);
};

/// Number of residue-field points of the shape. unpruned selects the
/// leaf-checked reference enumeration (identical result, no early rejection).
long long enumerate_kappa_fiber(uint64_t q, const KappaShape& shape, bool unpruned = false);

enum class GroupKind { gl, u, sp, norm_one_torus };

/// Order of the finite group by direct enumeration: GL_n(F_q), the unitary
/// group of the identity hermitian form on F_{q^2}^n, Sp_n(F_q) for n even
/// (standard alternating form), or the norm-one torus of F_{q^2}/F_q
/// (n ignored). Columns are enumerated with early rejection, so the visit
/// count stays near the group order.
long long enumerate_group(GroupKind kind, int n, uint64_t q);

/// Residue-field point count of the standard integral model of a norm-one
/// induced torus: parameters as in torus_count (n = degree, d = its maximal
/// unramified part), realized concretely in truncated polynomial rings.
/// The ramified case requires odd q.
long long enumerate_torus_fiber(TorusCase c, int n, int d, uint64_t q);

} // namespace so
