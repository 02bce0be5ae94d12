#pragma once

#include <dgavg/dg_space.hpp>
#include <dgavg/mollifier.hpp>
#include <dgavg/sparse.hpp>

#include <functional>

namespace dgavg {

struct AEtaOptions {
  /// Target accuracy relative to the largest matrix entry.
  double rel_tol = 1e-9;
  /// Initial background cells per mesh-size length (at least 4).
  int background_resolution = 4;
  int threads = 1;
  /// Refusal threshold for the estimated number of integrand evaluations.
  double max_evaluations = 2e8;
  int max_cells_per_seed = 4000;
};

struct AEtaReport {
  double max_asymmetry = 0.0;    // before symmetrization
  double error_estimate = 0.0;   // summed quadrature error estimates
  double evaluations = 0.0;      // integrand evaluations
  bool converged = true;         // every adaptive run met its tolerance
  std::size_t unconverged_runs = 0;
  std::size_t seeds = 0;         // background cells
};

/// Pattern coupling all dofs whose elements lie within 2 h^s of each other.
SymSparseMatrix a_eta_pattern(const BrokenSpace& space, const Mollifier& m);

/// Entries ∫_{Ω_h} grad(eta_h * phi_i) · grad(eta_h * phi_j), by adaptive
/// quadrature of the sphere-boundary gradient over a background mesh of
/// Ω_h cut along every line at distance h^s from a face line. Throws
/// BudgetError when the estimated cost exceeds the budget.
SymSparseMatrix assemble_a_eta_direct(const BrokenSpace& space, const Mollifier& m,
                                      const AEtaOptions& options = {}, AEtaReport* report = nullptr);

/// The four terms of the expanded averaged form, stored separately.
struct AEtaTerms {
  SymSparseMatrix volume;  // (eta * grad_h u, eta * grad_h v)
  SymSparseMatrix cross;   // -(eta*eta*grad_h u, ⟦v⟧)_F - (eta*eta*grad_h v, ⟦u⟧)_F
  SymSparseMatrix jump;    // (eta * ⟦u⟧, eta * ⟦v⟧)

  SymSparseMatrix sum() const;
};

/// Expanded form: volume term as sum_T ∫_T grad_h u · (eta*eta*grad_h v)
/// (kernel symmetry), cross terms by
/// face quadrature of eta*eta*grad_h, jump term as the face-pair double
/// integral ∫_f ∫_g (eta*eta)(y - z) ⟦u⟧(y) · ⟦v⟧(z).
AEtaTerms assemble_a_eta_terms(const BrokenSpace& space, const Mollifier& m,
                               const AEtaOptions& options = {}, AEtaReport* report = nullptr);
SymSparseMatrix assemble_a_eta_expanded(const BrokenSpace& space, const Mollifier& m,
                                        const AEtaOptions& options = {},
                                        AEtaReport* report = nullptr);

/// Jump term by 2D quadrature of products of sum_f eta * ⟦phi⟧_f over the
/// background mesh (the tube realization; used as a cross-check).
SymSparseMatrix assemble_jump_term_tube(const BrokenSpace& space, const Mollifier& m,
                                        const AEtaOptions& options = {},
                                        AEtaReport* report = nullptr);

/// Volume term as a Gram matrix of eta * grad_h phi over the background
/// mesh of Ω_h (cross-check of the element-wise realization).
SymSparseMatrix assemble_volume_term_background(const BrokenSpace& space, const Mollifier& m,
                                               const AEtaOptions& options = {},
                                               AEtaReport* report = nullptr);

/// a_eta(u, v) for fixed functions by the direct integrand.
double a_eta_value_direct(const Mollifier& m, const DgFunction& u, const DgFunction& v,
                          const AEtaOptions& options = {}, AEtaReport* report = nullptr);

/// sigma_{s,h} sum_f (⟦u⟧, ⟦v⟧)_f, the closed-form approximation of the jump term.
SymSparseMatrix assemble_jump_penalty(const BrokenSpace& space, double sigma);

}  // namespace dgavg
