#include "emprint/eim.hpp"

#include "emprint/error.hpp"
#include "emprint/text_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace emprint {

std::string_view to_string(SelectionCriterion c) noexcept {
  switch (c) {
    case SelectionCriterion::Classic: return "classic";
    case SelectionCriterion::MinKappa: return "kappa";
    case SelectionCriterion::MinLambda: return "lambda";
  }
  return "unknown";
}

SelectionCriterion parse_criterion(std::string_view name) {
  for (auto c : {SelectionCriterion::Classic, SelectionCriterion::MinKappa,
                 SelectionCriterion::MinLambda}) {
    if (to_string(c) == name) return c;
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown criterion '" + std::string(name) + "' (expected classic, kappa or lambda)");
}

namespace {

// Relative slack under which two objective values count as tied.
constexpr double kTieSlack = 1e-14;

ComplexMatrix square_v_matrix(const ComplexMatrix& basis, std::span<const std::size_t> nodes) {
  const std::size_t n = nodes.size();
  ComplexMatrix v(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) v(i, j) = basis(j, nodes[i]);
  return v;
}

LuFactorization factor_or_singular(const ComplexMatrix& v) {
  try {
    return lu_factor(v);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ExactlySingular) throw;
    throw Error(ErrorCode::SingularVMatrix,
                "V-matrix of order " + std::to_string(v.rows()) + " is exactly singular");
  }
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count / 64, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
}

// Index-ordered scans so the lowest index wins ties on every platform.
std::size_t argmax_unchosen(std::span<const double> values, const std::vector<bool>& chosen) {
  std::size_t best = values.size();
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (chosen[t]) continue;
    if (best == values.size() || values[t] > values[best] * (1.0 + kTieSlack)) best = t;
  }
  return best;
}

std::size_t argmin_finite_unchosen(std::span<const double> values, const std::vector<bool>& chosen) {
  std::size_t best = values.size();
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (chosen[t] || !std::isfinite(values[t])) continue;
    if (best == values.size() || values[t] < values[best] * (1.0 - kTieSlack)) best = t;
  }
  return best;
}

std::vector<double> variant_objective(const ComplexMatrix& basis, std::span<const std::size_t> nodes,
                                      const std::vector<bool>& chosen,
                                      SelectionCriterion criterion, unsigned threads) {
  const std::size_t l = basis.cols();
  std::vector<double> objective(l, kInfinity);
  parallel_for(l, threads, [&](std::size_t t) {
    if (chosen[t]) return;
    const auto c = conditioning(v_matrix_with_candidate(basis, nodes, t));
    objective[t] = criterion == SelectionCriterion::MinKappa ? c.kappa : c.inverse_norm;
  });
  return objective;
}

}  // namespace

ComplexMatrix v_matrix_with_candidate(const ComplexMatrix& basis,
                                      std::span<const std::size_t> nodes, std::size_t candidate) {
  const std::size_t j = nodes.size() + 1;
  ComplexMatrix v(j, j);
  for (std::size_t i = 0; i < j; ++i) {
    const std::size_t t = i + 1 < j ? nodes[i] : candidate;
    for (std::size_t c = 0; c < j; ++c) v(i, c) = basis(c, t);
  }
  return v;
}

std::vector<Complex> interpolation_residual(const ComplexMatrix& basis,
                                            std::span<const std::size_t> nodes) {
  const std::size_t m = nodes.size();
  if (m >= basis.rows())
    throw Error(ErrorCode::BadTruncation, "residual needs basis element " + std::to_string(m + 1));
  const auto target = basis.row(m);
  std::vector<Complex> r(target.begin(), target.end());
  if (m == 0) return r;

  const auto lu = factor_or_singular(square_v_matrix(basis, nodes));
  std::vector<Complex> rhs(m);
  for (std::size_t i = 0; i < m; ++i) rhs[i] = target[nodes[i]];
  const auto coeffs = solve(lu, rhs);
  for (std::size_t i = 0; i < m; ++i) {
    const auto e = basis.row(i);
    for (std::size_t t = 0; t < r.size(); ++t) r[t] -= coeffs[i] * e[t];
  }
  return r;
}

EmpiricalInterpolant::EmpiricalInterpolant(TimeGrid grid, ComplexMatrix basis,
                                           std::vector<std::size_t> nodes,
                                           SelectionCriterion criterion)
    : grid_(grid), basis_(std::move(basis)), nodes_(std::move(nodes)), criterion_(criterion) {}

EmpiricalInterpolant EmpiricalInterpolant::from_nodes(const ReducedBasis& rb,
                                                      std::vector<std::size_t> nodes,
                                                      SelectionCriterion criterion) {
  const std::size_t n = nodes.size();
  if (n < 1 || n > rb.size()) {
    throw Error(ErrorCode::BadTruncation, std::to_string(n) + " nodes for a basis of " +
                                              std::to_string(rb.size()));
  }
  auto sorted = nodes;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.back() >= rb.grid().size())
    throw Error(ErrorCode::InvalidArgument, "node index outside the time grid");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(ErrorCode::SingularVMatrix, "node indices are not pairwise distinct");

  EmpiricalInterpolant itp(rb.grid(), rb.basis().top_rows(n), std::move(nodes), criterion);
  const ComplexMatrix& basis = itp.basis_;
  itp.v_ = square_v_matrix(basis, itp.nodes_);

  itp.per_step_.reserve(n);
  for (std::size_t j = 1; j <= n; ++j) {
    const std::span<const std::size_t> prefix(itp.nodes_.data(), j);
    const auto vj = itp.v_.leading_block(j);
    StepRecord rec;
    rec.det_v = determinant(vj);
    const auto c = conditioning(vj);
    rec.kappa = c.kappa;
    rec.lambda = c.inverse_norm;
    const auto r = interpolation_residual(basis, prefix.first(j - 1));
    rec.residual_at_node = std::abs(r[prefix[j - 1]]);
    itp.per_step_.push_back(rec);
  }

  // B = (V^T)^{-1} E, i.e. B_i(t) = sum_j (V^{-1})_{ji} e_j(t).
  const auto lu_t = factor_or_singular(itp.v_.transpose());
  itp.b_ = solve(lu_t, basis);
  return itp;
}

EmpiricalInterpolant EmpiricalInterpolant::prefix(std::size_t m) const {
  if (m < 1 || m > size())
    throw Error(ErrorCode::BadTruncation, "prefix of order " + std::to_string(m));
  const ReducedBasis rb(grid_, basis_.top_rows(m), {}, {}, 0.0);
  return from_nodes(rb, {nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(m)},
                    criterion_);
}

EmpiricalInterpolant build_interpolant(const ReducedBasis& rb, SelectionCriterion criterion,
                                       std::size_t n, const EimOptions& opts) {
  if (n < 1 || n > rb.size()) {
    throw Error(ErrorCode::BadTruncation, "interpolant order " + std::to_string(n) +
                                              " outside 1.." + std::to_string(rb.size()));
  }
  const std::size_t l = rb.grid().size();
  if (n > l) {
    throw Error(ErrorCode::NoAdmissibleNode,
                "cannot place " + std::to_string(n) + " nodes on " + std::to_string(l) + " samples");
  }
  const ComplexMatrix& basis = rb.basis();
  std::vector<std::size_t> nodes;
  nodes.reserve(n);
  std::vector<bool> chosen(l, false);
  std::vector<double> score(l);

  auto pick = [&](std::size_t t) {
    nodes.push_back(t);
    chosen[t] = true;
  };

  const bool variant = criterion != SelectionCriterion::Classic;
  for (std::size_t j = 1; j <= n; ++j) {
    if (variant && (j > 1 || opts.first_node == FirstNodeRule::ApplyCriterion)) {
      score = variant_objective(basis, nodes, chosen, criterion, opts.threads);
      const std::size_t best = argmin_finite_unchosen(score, chosen);
      if (best == l) {
        throw Error(ErrorCode::SingularVMatrix,
                    "every candidate for node " + std::to_string(j) + " gives a singular V-matrix");
      }
      pick(best);
      continue;
    }
    // Step j of the classic loop; j = 1 reduces to argmax |e_1|.
    const auto r = interpolation_residual(basis, nodes);
    double scale = 0.0;
    for (std::size_t t = 0; t < l; ++t) {
      score[t] = std::abs(r[t]);
      scale = std::max(scale, std::abs(basis(j - 1, t)));
    }
    const std::size_t best = argmax_unchosen(score, chosen);
    if (best == l) throw Error(ErrorCode::NoAdmissibleNode, "all grid indices are exhausted");
    if (!(score[best] > 1e-14 * scale)) {
      throw Error(ErrorCode::SingularVMatrix,
                  "residual of basis element " + std::to_string(j) +
                      " vanishes on the grid; the basis is not linearly independent");
    }
    pick(best);
  }
  return EmpiricalInterpolant::from_nodes(rb, std::move(nodes), criterion);
}

std::vector<Complex> interpolate(const EmpiricalInterpolant& itp,
                                 std::span<const Complex> node_values) {
  if (node_values.size() != itp.size()) {
    throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(itp.size()) +
                                               " node values, got " +
                                               std::to_string(node_values.size()));
  }
  const auto& b = itp.b_matrix();
  std::vector<Complex> out(b.cols());
  for (std::size_t i = 0; i < itp.size(); ++i) {
    const Complex v = node_values[i];
    const auto bi = b.row(i);
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += v * bi[t];
  }
  return out;
}

std::vector<Complex> interpolate_function(const EmpiricalInterpolant& itp,
                                          std::span<const Complex> h) {
  if (h.size() != itp.grid().size())
    throw Error(ErrorCode::LengthMismatch, "waveform length does not match the time grid");
  std::vector<Complex> values(itp.size());
  for (std::size_t i = 0; i < itp.size(); ++i) values[i] = h[itp.node_indices()[i]];
  return interpolate(itp, values);
}

double TheoremReport::max_discrepancy() const noexcept {
  double m = 0.0;
  for (const auto& s : steps) m = std::max(m, s.max_rel_discrepancy);
  return m;
}

TheoremReport verify_theorem(const ReducedBasis& rb, std::size_t n) {
  const auto itp = build_interpolant(rb, SelectionCriterion::Classic, n);
  const ComplexMatrix& basis = itp.basis();
  const auto& nodes = itp.node_indices();
  const std::size_t l = rb.grid().size();

  TheoremReport report;
  report.nodes = nodes;
  for (std::size_t j = 2; j <= n; ++j) {
    const std::span<const std::size_t> prev(nodes.data(), j - 1);
    const auto residual = interpolation_residual(basis, prev);
    const Complex det_prev = determinant(square_v_matrix(basis, prev));
    if (det_prev == Complex{}) {
      throw Error(ErrorCode::SingularVMatrix,
                  "det V_" + std::to_string(j - 1) + " vanishes at step " + std::to_string(j));
    }

    TheoremStep step;
    step.j = j;
    double scale = 0.0;
    double worst = 0.0;
    for (std::size_t t = 0; t < l; ++t) {
      const Complex ratio = determinant(v_matrix_with_candidate(basis, prev, t)) / det_prev;
      scale = std::max(scale, std::abs(residual[t]));
      worst = std::max(worst, std::abs(residual[t] - ratio));
      if (t == nodes[j - 1]) {
        step.residual_at_node = residual[t];
        step.det_ratio_at_node = ratio;
      }
      if (std::find(prev.begin(), prev.end(), t) != prev.end())
        step.max_at_previous_nodes =
            std::max({step.max_at_previous_nodes, std::abs(residual[t]), std::abs(ratio)});
    }
    step.max_rel_discrepancy = scale > 0.0 ? worst / scale : kInfinity;
    report.steps.push_back(step);
  }
  return report;
}

std::string matrix_to_csv(const ComplexMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += text::format_double(m(i, j).real());
      out += ':';
      out += text::format_double(m(i, j).imag());
    }
    out += '\n';
  }
  return out;
}

namespace {

nlohmann::ordered_json real_or_inf(double v) {
  if (std::isfinite(v)) return v;
  return "inf";
}

}  // namespace

std::string interpolant_to_json(const EmpiricalInterpolant& itp, bool embed_matrices) {
  nlohmann::ordered_json j;
  j["format"] = "emprint-interpolant v1";
  j["criterion"] = std::string(to_string(itp.criterion()));
  j["n"] = itp.size();
  j["grid"] = {{"L", itp.grid().size()},
               {"t_start", itp.grid().t_start()},
               {"t_end", itp.grid().t_end()},
               {"dt", itp.grid().dt()}};
  j["node_indices"] = itp.node_indices();
  auto steps = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < itp.per_step().size(); ++k) {
    const auto& s = itp.per_step()[k];
    steps.push_back({{"j", k + 1},
                     {"det_v", {{"re", s.det_v.real()}, {"im", s.det_v.imag()}}},
                     {"kappa", real_or_inf(s.kappa)},
                     {"lambda", real_or_inf(s.lambda)},
                     {"residual_at_node", s.residual_at_node}});
  }
  j["per_step"] = std::move(steps);
  if (embed_matrices) {
    j["v_matrix_csv"] = matrix_to_csv(itp.v_matrix());
    j["b_matrix_csv"] = matrix_to_csv(itp.b_matrix());
  }
  return j.dump(2) + "\n";
}

}  // namespace emprint
