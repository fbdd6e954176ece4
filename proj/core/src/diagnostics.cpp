#include "emprint/diagnostics.hpp"

#include "emprint/error.hpp"
#include "emprint/text_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace emprint {

std::map<SelectionCriterion, DiagnosticsReport> run_comparison(
    const ReducedBasis& rb, const TrainingSet& ts, std::span<const SelectionCriterion> criteria,
    const std::string& dataset_id, const EimOptions& opts) {
  if (!(rb.grid() == ts.grid()))
    throw Error(ErrorCode::GridMismatch, "basis and training set live on different grids");
  const std::size_t n_max = rb.size();

  std::vector<double> proj(n_max, 0.0);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    for (std::size_t n = 1; n <= n_max; ++n)
      proj[n - 1] = std::max(proj[n - 1], projection_error_sq(rb, ts.waveform(k), n));
  }

  std::map<SelectionCriterion, DiagnosticsReport> out;
  for (const auto criterion : criteria) {
    if (out.contains(criterion)) continue;
    const auto full = build_interpolant(rb, criterion, n_max, opts);
    DiagnosticsReport report;
    report.criterion = criterion;
    report.dataset_id = dataset_id;
    report.grid = rb.grid();
    for (std::size_t n = 1; n <= n_max; ++n) {
      // Nested nodes: the n-node build is the n-prefix of the full build.
      const auto itp = full.prefix(n);
      double worst = 0.0;
      for (std::size_t k = 0; k < ts.size(); ++k) {
        const auto h = ts.waveform(k);
        auto diff = interpolate_function(itp, h);
        for (std::size_t t = 0; t < diff.size(); ++t) diff[t] = h[t] - diff[t];
        worst = std::max(worst, discrete_norm_sq(diff, ts.grid()));
      }
      const auto& step = full.per_step()[n - 1];
      report.per_n.push_back({n, step.kappa, step.lambda, worst, proj[n - 1], itp.node_indices()});
    }
    out.emplace(criterion, std::move(report));
  }
  return out;
}

std::vector<double> error_ratio_curve(const DiagnosticsReport& a, const DiagnosticsReport& b) {
  if (a.per_n.size() != b.per_n.size()) {
    throw Error(ErrorCode::LengthMismatch, "reports cover " + std::to_string(a.per_n.size()) +
                                               " and " + std::to_string(b.per_n.size()) +
                                               " orders");
  }
  std::vector<double> ratios;
  ratios.reserve(a.per_n.size());
  for (std::size_t i = 0; i < a.per_n.size(); ++i) {
    const double num = a.per_n[i].max_interp_err_sq;
    const double den = b.per_n[i].max_interp_err_sq;
    if (num <= kErrorFloorSq && den <= kErrorFloorSq)
      ratios.push_back(1.0);
    else if (den == 0.0)
      ratios.push_back(kInfinity);
    else
      ratios.push_back(std::sqrt(num / den));
  }
  return ratios;
}

ComplexMatrix interpolation_operator(const EmpiricalInterpolant& itp) {
  return itp.b_matrix().transpose();
}

IdentityCheck identity_checks(const EmpiricalInterpolant& itp) {
  IdentityCheck check;
  const auto& v = itp.v_matrix();
  for (std::size_t m = 1; m <= itp.size(); ++m) {
    const auto vm = v.leading_block(m);
    const double kappa = condition_number_2(vm);
    const double product = two_norm(vm) * inverse_two_norm(vm);
    if (!std::isfinite(kappa)) {
      check.kappa_identity_residual = kInfinity;
      continue;
    }
    check.kappa_identity_residual =
        std::max(check.kappa_identity_residual, std::abs(kappa - product) / kappa);
  }
  check.inverse_norm = inverse_two_norm(v);
  if (itp.grid().size() > kOperatorCheckMaxSamples) {
    check.note = "operator-norm check skipped: L=" + std::to_string(itp.grid().size()) +
                 " exceeds " + std::to_string(kOperatorCheckMaxSamples);
    return check;
  }
  check.operator_norm = two_norm(interpolation_operator(itp));
  check.operator_norm_residual =
      std::abs(*check.operator_norm - check.inverse_norm) / check.inverse_norm;
  return check;
}

namespace {

nlohmann::ordered_json real_or_inf(double v) {
  if (std::isfinite(v)) return v;
  return "inf";
}

std::string csv_value(double v) { return text::format_double(v); }

std::string join_nodes(const std::vector<std::size_t>& nodes) {
  std::string s;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0) s += ' ';
    s += std::to_string(nodes[i]);
  }
  return s;
}

template <class Pick>
std::string per_criterion_csv(const std::map<SelectionCriterion, DiagnosticsReport>& reports,
                              Pick pick) {
  std::string out = "n";
  std::size_t rows = 0;
  for (const auto& [c, r] : reports) {
    out += ',';
    out += to_string(c);
    rows = std::max(rows, r.per_n.size());
  }
  out += '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    out += std::to_string(i + 1);
    for (const auto& [c, r] : reports) {
      out += ',';
      if (i < r.per_n.size()) out += csv_value(pick(r.per_n[i]));
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string kappa_csv(const std::map<SelectionCriterion, DiagnosticsReport>& reports) {
  return per_criterion_csv(reports, [](const DiagnosticsEntry& e) { return e.kappa; });
}

std::string lambda_csv(const std::map<SelectionCriterion, DiagnosticsReport>& reports) {
  return per_criterion_csv(reports, [](const DiagnosticsEntry& e) { return e.lambda; });
}

std::string errors_csv(const std::map<SelectionCriterion, DiagnosticsReport>& reports) {
  std::string out = "n,sigma_sq";
  std::size_t rows = 0;
  for (const auto& [c, r] : reports) {
    out += ",sigma_tilde_sq_";
    out += to_string(c);
    rows = std::max(rows, r.per_n.size());
  }
  out += '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    out += std::to_string(i + 1) + ',';
    out += csv_value(reports.begin()->second.per_n[i].max_proj_err_sq);
    for (const auto& [c, r] : reports) {
      out += ',';
      out += csv_value(r.per_n[i].max_interp_err_sq);
    }
    out += '\n';
  }
  return out;
}

std::string nodes_csv(const std::map<SelectionCriterion, DiagnosticsReport>& reports) {
  std::string out = "criterion,n,nodes\n";
  for (const auto& [c, r] : reports) {
    for (const auto& e : r.per_n) {
      out += std::string(to_string(c)) + ',' + std::to_string(e.n) + ',' + join_nodes(e.nodes) +
             '\n';
    }
  }
  return out;
}

std::string report_to_json(const DiagnosticsReport& report) {
  nlohmann::ordered_json j;
  j["format"] = "emprint-report v1";
  j["criterion"] = std::string(to_string(report.criterion));
  j["dataset_id"] = report.dataset_id;
  j["grid"] = {{"L", report.grid.size()},
               {"t_start", report.grid.t_start()},
               {"t_end", report.grid.t_end()},
               {"dt", report.grid.dt()}};
  j["basis_convention"] = "euclidean-orthonormal rows; errors in the dt-weighted discrete norm";
  auto rows = nlohmann::ordered_json::array();
  for (const auto& e : report.per_n) {
    rows.push_back({{"n", e.n},
                    {"kappa", real_or_inf(e.kappa)},
                    {"lambda", real_or_inf(e.lambda)},
                    {"max_interp_err_sq", e.max_interp_err_sq},
                    {"max_proj_err_sq", e.max_proj_err_sq},
                    {"nodes", e.nodes}});
  }
  j["per_n"] = std::move(rows);
  return j.dump(2) + "\n";
}

void write_comparison(const std::map<SelectionCriterion, DiagnosticsReport>& reports,
                      const std::filesystem::path& out_dir) {
  if (reports.empty()) throw Error(ErrorCode::InvalidArgument, "no reports to write");
  for (const auto& [c, r] : reports) {
    text::write_file_atomic(out_dir / ("report_" + std::string(to_string(c)) + ".json"),
                            report_to_json(r));
  }
  text::write_file_atomic(out_dir / "kappa.csv", kappa_csv(reports));
  text::write_file_atomic(out_dir / "lambda.csv", lambda_csv(reports));
  text::write_file_atomic(out_dir / "errors.csv", errors_csv(reports));
  text::write_file_atomic(out_dir / "nodes.csv", nodes_csv(reports));
}

}  // namespace emprint
