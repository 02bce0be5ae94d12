#pragma once

#include <dgavg/dg_space.hpp>
#include <dgavg/mesh.hpp>
#include <dgavg/sparse.hpp>

#include <vector>

namespace dgavg {

class Mollifier;

enum class PenaltyKind { classical, overpenalized };
enum class HChoice { global, per_face };

struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::classical;
  double sigma0 = 10.0;  // classical prefactor of 1 / diam(f)
  double s = 1.6;        // overpenalized exponent
  HChoice h_choice = HChoice::global;
};

/// Leading constant c_d of the overpenalized coefficient c_d h^{-s}:
/// 16 / (3 pi^2) for d = 2 and 3 / 5 for d = 3.
double overpenalty_constant(int d);

/// Throws ConfigError for sigma0 <= 0, or s <= 1.5 when overpenalized
/// (coercivity of the averaged form requires s > 3/2).
void validate(const PenaltySpec& spec);

/// Multiplier of (⟦u⟧, ⟦v⟧)_f. Classical: sigma0 / diam(f). Overpenalized:
/// c_d h^{-s} with h the global mesh size, or diam(f) under per_face.
/// Throws std::invalid_argument for d outside {2, 3} or classical with d = 3.
double penalty_coefficient(const PenaltySpec& spec, const Face& face, double h_global, int d = 2);

struct AssemblyOptions {
  int threads = 1;
};

/// Lower-triangle pattern of element-diagonal blocks plus face-neighbour
/// couplings.
SymSparseMatrix dg_pattern(const BrokenSpace& space);

/// (grad_h u, grad_h v) - sum_f ({grad_h u}, ⟦v⟧)_f + ({grad_h v}, ⟦u⟧)_f
///   + sum_f sigma_f (⟦u⟧, ⟦v⟧)_f over interior and boundary faces.
SymSparseMatrix assemble_sipg(const BrokenSpace& space, const PenaltySpec& spec,
                              const AssemblyOptions& options = {});
/// SIPG with the overpenalized coefficient; throws ConfigError for s <= 1.5.
SymSparseMatrix assemble_oipg(const BrokenSpace& space, double s, const AssemblyOptions& options = {},
                              HChoice h_choice = HChoice::global);

enum class RhsMode {
  plain,     // (g, v)
  averaged,  // (eta_h * g_0, v)
};

/// `mollifier` is required for the averaged mode.
std::vector<double> assemble_rhs(const BrokenSpace& space, const ScalarField& g, RhsMode mode,
                                 const Mollifier* mollifier = nullptr,
                                 const AssemblyOptions& options = {});

}  // namespace dgavg
