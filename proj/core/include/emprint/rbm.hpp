#pragma once

#include "emprint/catalog.hpp"
#include "emprint/numerics.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace emprint {

/// Greedy reduced basis. Rows of `basis()` are orthonormal in the plain
/// Euclidean sense; the weighted norm (factor dt) is applied only when
/// measuring errors. With a uniform weight both projections coincide.
class ReducedBasis {
public:
  ReducedBasis(TimeGrid grid, ComplexMatrix basis, std::vector<double> greedy_errors,
               std::vector<std::size_t> greedy_params, double tol);

  const TimeGrid& grid() const noexcept { return grid_; }
  const ComplexMatrix& basis() const noexcept { return basis_; }
  std::span<const Complex> element(std::size_t i) const noexcept { return basis_.row(i); }
  std::size_t size() const noexcept { return basis_.rows(); }

  /// greedy_errors()[m-1] is max_k ||h_k - P_m h_k||_d^2.
  const std::vector<double>& greedy_errors() const noexcept { return greedy_errors_; }
  /// Training-row index that seeded each basis element.
  const std::vector<std::size_t>& greedy_params() const noexcept { return greedy_params_; }
  double tol() const noexcept { return tol_; }

  /// First `n` elements with their greedy history.
  ReducedBasis truncated(std::size_t n) const;

private:
  TimeGrid grid_;
  ComplexMatrix basis_;
  std::vector<double> greedy_errors_;
  std::vector<std::size_t> greedy_params_;
  double tol_;
};

inline constexpr double kDefaultGreedyTol = 1e-12;

/// Strong greedy over the training set. Stops once the squared greedy error
/// drops to `tol` or the basis reaches `n_max` elements.
ReducedBasis build_reduced_basis(const TrainingSet& ts, double tol, std::size_t n_max);

/// Euclidean orthogonal projection onto the first `n` elements.
std::vector<Complex> project(const ReducedBasis& rb, std::span<const Complex> h, std::size_t n);

/// ||h - P_n h||_d^2.
double projection_error_sq(const ReducedBasis& rb, std::span<const Complex> h, std::size_t n);

// Basis CSV uses the training header with d=0 and kind=basis; each row holds
// L re:im pairs. The greedy history is a separate "n,sigma_sq,training_index"
// CSV.
std::string format_basis_csv(const ReducedBasis& rb);
std::string format_greedy_errors_csv(const ReducedBasis& rb);
void save_basis(const ReducedBasis& rb, const std::filesystem::path& basis_csv,
                const std::filesystem::path& errors_csv);
/// `errors_csv` may be empty, in which case the greedy history is left blank.
ReducedBasis load_basis(const std::filesystem::path& basis_csv,
                        const std::filesystem::path& errors_csv = {});
ReducedBasis parse_basis_csv(std::string_view basis_text, std::string_view errors_text = {});

}  // namespace emprint
