#pragma once

#include "emprint/catalog.hpp"
#include "emprint/eim.hpp"
#include "emprint/rbm.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace emprint {

/// Squared errors at or below this floor are treated as zero in ratios.
inline constexpr double kErrorFloorSq = 1e-28;

struct DiagnosticsEntry {
  std::size_t n = 0;
  double kappa = 0.0;
  double lambda = 0.0;
  /// max_k ||h_k - I_n h_k||_d^2
  double max_interp_err_sq = 0.0;
  /// max_k ||h_k - P_n h_k||_d^2
  double max_proj_err_sq = 0.0;
  std::vector<std::size_t> nodes;
};

struct DiagnosticsReport {
  SelectionCriterion criterion = SelectionCriterion::Classic;
  std::string dataset_id;
  TimeGrid grid{0.0, 1.0, 2};
  std::vector<DiagnosticsEntry> per_n;
};

/// In-sample comparison: for every criterion and every n <= rb.size(),
/// interpolation and projection errors over all training rows.
std::map<SelectionCriterion, DiagnosticsReport> run_comparison(
    const ReducedBasis& rb, const TrainingSet& ts, std::span<const SelectionCriterion> criteria,
    const std::string& dataset_id = "dataset", const EimOptions& opts = {});

/// Per-n sigma~_a / sigma~_b (unsquared). Both below the floor gives 1; a
/// zero denominator with a nonzero numerator gives infinity.
std::vector<double> error_ratio_curve(const DiagnosticsReport& a, const DiagnosticsReport& b);

struct IdentityCheck {
  /// max over prefixes m of |kappa_m - ||V_m|| Lambda_m| / kappa_m.
  double kappa_identity_residual = 0.0;
  /// Largest singular value of the explicit interpolation operator.
  std::optional<double> operator_norm;
  /// ||V_n^{-1}||.
  double inverse_norm = 0.0;
  /// |operator_norm - inverse_norm| / inverse_norm, when evaluated.
  std::optional<double> operator_norm_residual;
  std::string note;
};

/// Grids above this size skip the explicit-operator check.
inline constexpr std::size_t kOperatorCheckMaxSamples = 5000;

IdentityCheck identity_checks(const EmpiricalInterpolant& itp);

/// L x n matrix whose column i is B_i: the nonzero columns of the L x L
/// operator h -> sum_i B_i h(T_i).
ComplexMatrix interpolation_operator(const EmpiricalInterpolant& itp);

std::string report_to_json(const DiagnosticsReport& report);

/// Writes report_<criterion>.json plus kappa.csv, lambda.csv, errors.csv and
/// nodes.csv into `out_dir`.
void write_comparison(const std::map<SelectionCriterion, DiagnosticsReport>& reports,
                      const std::filesystem::path& out_dir);

std::string kappa_csv(const std::map<SelectionCriterion, DiagnosticsReport>& reports);
std::string lambda_csv(const std::map<SelectionCriterion, DiagnosticsReport>& reports);
std::string errors_csv(const std::map<SelectionCriterion, DiagnosticsReport>& reports);
std::string nodes_csv(const std::map<SelectionCriterion, DiagnosticsReport>& reports);

}  // namespace emprint
