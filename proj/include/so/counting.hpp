#pragma once

#include "so/common.hpp"
#include "so/qsym.hpp"

#include <vector>

namespace so {

/// Sublattice type: the nondecreasing elementary-divisor exponents of M in L,
/// together with the ambient rank. The empty tuple is M = L.
struct LatticeType {
    std::vector<int> parts;
    int rank;

    LatticeType(std::vector<int> parts_, int rank_);

    /// Sum of the parts (the index of M in L is q to this).
    int colength() const;
};

/// Jordan type of a lattice with its divided form. The hermitian flavor
/// carries a pair (a, b) with 0 <= a <= b and a + b even (a = 0 is the
/// degenerate class whose stratum carries no mass); the symplectic flavor
/// forces a = b.
struct JordanType {
    enum class Flavor { hermitian, symplectic };

    int a;
    int b;
    Flavor flavor;

    JordanType(int a_, int b_, Flavor flavor_);

    /// The type depth d with (a, b) = (a, 2d - a).
    int d() const { return (a + b) / 2; }
};

/// Number of sublattices of a rank-n lattice having the given type: the
/// product over distinct parts r_i (multiplicity m_i, running dimension s_i)
/// of #Gr(m_i, s_i) * q^(((r_i - r_(i-1) - 1)(n - s_(i-1)) + (n - s_i)) s_(i-1)).
QPoly c_type(const LatticeType& t);
QPoly c_type(const std::vector<int>& parts, int n);

/// Number of t-dimensional subspaces refining a fixed stratum layer of
/// multiplicity m: #Gr(t, m).
QPoly d_t_count(int t, int m);

/// Lattice counts by Jordan type. The hermitian flavor counts type-(d)
/// sublattices of a rank-n hermitian lattice with Jordan type (l, 2d - l);
/// the symplectic flavor counts type-(d) sublattices of a rank-2n symplectic
/// lattice (all of Jordan type (d, d), so l = d is forced).
enum class SabFlavor { hermitian, symplectic };
QPoly s_ab_count(SabFlavor flavor, int l, int d, int n);

/// Residue point count of the special fiber of the standard model of a
/// norm-one torus: n is the degree of the defining extension, d the degree of
/// its maximal unramified subextension. The ramified case is only valid in
/// odd residue characteristic and the caller must assert that.
enum class TorusCase { split, unramified, ramified };
QPoly torus_count(TorusCase c, int n, int d, bool odd_residue_char = false);

/// Number of regular nilpotent elements in the residue Lie algebra:
/// #U_n(kappa)/((q+1) q^(n-1)) or #Sp_2n(kappa)/q^n; n = 0 gives 1.
enum class NilpotentGroup { unitary, symplectic };
QPoly regular_nilpotent_count(NilpotentGroup g, int n);

/// Shapes of the residue-field fibers of the smoothened strata.
struct FiberShape {
    enum class Kind { gl_type_k1, gl_refined, gl3_case, u_dn, sp_dn };

    Kind kind;
    int n = 0;
    bool equal_parts = false; // gl_refined: k1 == k2
    bool lower_ge = false;    // u_dn: the d_(n-1) >= d_n branch
    int case_no = 0;          // gl3_case: 1..4
    int l = 0;                // gl3_case: stratum index, 0..top
    int top = 0;              // gl3_case: index of the last stratum

    /// Type-(k1) stratum fiber for rank n >= 2: #GL_(n-1)(kappa) * q^(n-1).
    static FiberShape gl_type_k1(int n);
    /// Refined (n-2, t=1) stratum fiber for rank n >= 4, split by whether the
    /// two type parts coincide.
    static FiberShape gl_refined(int n, bool equal_parts);
    /// Rank-3 refined stratum fiber, by case (1-4) and stratum index l; cases
    /// 1, 2, 4 run l = 0..top, case 3 has the single stratum l = top = 0.
    static FiberShape gl3_case(int case_no, int l, int top);
    /// Hermitian (d_n)-type fiber for rank n >= 2, split by the order
    /// relation between d_(n-1) and d_n.
    static FiberShape u_dn(int n, bool lower_ge);
    /// Symplectic (d_n)-type fiber for rank n >= 1.
    static FiberShape sp_dn(int n);
};

QPoly fiber_count_kappa(const FiberShape& shape);

} // namespace so
