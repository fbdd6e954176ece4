#pragma once

#include "emprint/catalog.hpp"
#include "emprint/numerics.hpp"
#include "emprint/rbm.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace emprint {

/// Per-iteration node-selection objective.
enum class SelectionCriterion {
  Classic,    ///< argmax_t |r_j(t)|, the residual of interpolating e_j
  MinKappa,   ///< argmin_t cond_2(V_j(T_1..T_{j-1}, t))
  MinLambda,  ///< argmin_t ||V_j(T_1..T_{j-1}, t)^{-1}||_2
};

/// "classic", "kappa", "lambda".
std::string_view to_string(SelectionCriterion c) noexcept;
SelectionCriterion parse_criterion(std::string_view name);

enum class FirstNodeRule {
  /// T_1 = argmax_t |e_1(t)| for every criterion.
  MaxModulus,
  /// Apply the criterion's own objective to the 1x1 V-matrix as well.
  ApplyCriterion,
};

struct EimOptions {
  FirstNodeRule first_node = FirstNodeRule::MaxModulus;
  /// Worker threads for the candidate scans of the variant criteria; 0 uses
  /// the hardware concurrency. Results do not depend on this value.
  unsigned threads = 0;
};

/// Diagnostics of the j-node prefix V_j.
struct StepRecord {
  Complex det_v;
  double kappa = 0.0;
  double lambda = 0.0;
  /// |r_j(T_j)| with r_j = e_j - I_{j-1}[e_j]; r_1 = e_1.
  double residual_at_node = 0.0;
};

/// n-node interpolant I_n[h](t) = sum_i B_i(t) h(T_i) on a reduced basis.
class EmpiricalInterpolant {
public:
  /// Assembles V, B and per-step records for a given node sequence.
  static EmpiricalInterpolant from_nodes(const ReducedBasis& rb, std::vector<std::size_t> nodes,
                                         SelectionCriterion criterion);

  const TimeGrid& grid() const noexcept { return grid_; }
  /// The n basis rows the interpolant was built on.
  const ComplexMatrix& basis() const noexcept { return basis_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  SelectionCriterion criterion() const noexcept { return criterion_; }
  const std::vector<std::size_t>& node_indices() const noexcept { return nodes_; }
  /// (V)_{ij} = e_j(T_i).
  const ComplexMatrix& v_matrix() const noexcept { return v_; }
  /// Row i holds the cardinal function B_i on the grid.
  const ComplexMatrix& b_matrix() const noexcept { return b_; }
  const std::vector<StepRecord>& per_step() const noexcept { return per_step_; }

  /// Interpolant on the first m nodes and basis elements.
  EmpiricalInterpolant prefix(std::size_t m) const;

private:
  EmpiricalInterpolant(TimeGrid grid, ComplexMatrix basis, std::vector<std::size_t> nodes,
                       SelectionCriterion criterion);

  TimeGrid grid_;
  ComplexMatrix basis_;
  std::vector<std::size_t> nodes_;
  SelectionCriterion criterion_;
  ComplexMatrix v_;
  ComplexMatrix b_;
  std::vector<StepRecord> per_step_;
};

/// V_j(T_1..T_{j-1}, t): the j x j matrix on `nodes` followed by `candidate`.
ComplexMatrix v_matrix_with_candidate(const ComplexMatrix& basis,
                                      std::span<const std::size_t> nodes, std::size_t candidate);

/// r(t) = e_j(t) - I_{j-1}[e_j](t) over the grid, for the first j-1 = nodes.size()
/// elements, computed by solving the (j-1)-node interpolation system.
std::vector<Complex> interpolation_residual(const ComplexMatrix& basis,
                                            std::span<const std::size_t> nodes);

EmpiricalInterpolant build_interpolant(const ReducedBasis& rb, SelectionCriterion criterion,
                                       std::size_t n, const EimOptions& opts = {});

std::vector<Complex> interpolate(const EmpiricalInterpolant& itp,
                                 std::span<const Complex> node_values);

std::vector<Complex> interpolate_function(const EmpiricalInterpolant& itp,
                                          std::span<const Complex> h);

/// Residual-vs-determinant comparison for one EIM step j >= 2.
struct TheoremStep {
  std::size_t j = 0;
  /// max_t |r_j(t) - det ratio(t)| / max_t |r_j(t)|.
  double max_rel_discrepancy = 0.0;
  Complex residual_at_node;
  Complex det_ratio_at_node;
  /// Largest modulus of either side at the earlier nodes T_1..T_{j-1}.
  double max_at_previous_nodes = 0.0;
};

struct TheoremReport {
  std::vector<std::size_t> nodes;
  std::vector<TheoremStep> steps;
  double max_discrepancy() const noexcept;
};

/// Runs the classic loop for n nodes and compares, at every grid point, the
/// interpolation residual with det V_j(T_1..T_{j-1}, t) / det V_{j-1}.
TheoremReport verify_theorem(const ReducedBasis& rb, std::size_t n);

/// JSON with node_indices, criterion and per_step; optionally embeds the
/// V- and B-matrices as CSV text blocks.
std::string interpolant_to_json(const EmpiricalInterpolant& itp, bool embed_matrices);

/// "re:im" per entry, one matrix row per line.
std::string matrix_to_csv(const ComplexMatrix& m);

}  // namespace emprint
