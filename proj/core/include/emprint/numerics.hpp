#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

namespace emprint {

using Complex = std::complex<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Dense row-major complex matrix. Entries must be finite.
class ComplexMatrix {
public:
  ComplexMatrix() = default;

  /// Zero-filled rows x cols matrix.
  ComplexMatrix(std::size_t rows, std::size_t cols);

  /// Takes ownership of row-major `entries`; throws on size mismatch or
  /// non-finite entries.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }
  bool is_square() const noexcept { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }

  std::span<Complex> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const Complex> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<const Complex> data() const noexcept { return data_; }

  ComplexMatrix transpose() const;
  ComplexMatrix adjoint() const;

  /// First `n` rows as a new matrix.
  ComplexMatrix top_rows(std::size_t n) const;
  /// Leading n x n block.
  ComplexMatrix leading_block(std::size_t n) const;

  double frobenius_norm() const noexcept;

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
  friend ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

std::vector<Complex> operator*(const ComplexMatrix& a, std::span<const Complex> x);

/// P*A = L*U with partial pivoting. L (unit diagonal) and U share `factors`.
struct LuFactorization {
  ComplexMatrix factors;
  /// pivots[k] is the row swapped with row k at elimination step k.
  std::vector<std::size_t> pivots;
  int sign = 1;

  std::size_t size() const noexcept { return factors.rows(); }
  ComplexMatrix lower() const;
  ComplexMatrix upper() const;
  /// Applies the recorded row interchanges to `m` (computes P*m).
  ComplexMatrix permute(const ComplexMatrix& m) const;
};

/// Throws ErrorCode::ExactlySingular when a pivot is exactly zero.
LuFactorization lu_factor(const ComplexMatrix& m);

/// sign * prod(diag U); exactly singular input gives 0.
Complex determinant(const ComplexMatrix& m);

std::vector<Complex> solve(const LuFactorization& f, std::span<const Complex> rhs);
ComplexMatrix solve(const LuFactorization& f, const ComplexMatrix& rhs);

struct SvdOptions {
  /// Cap on one-sided Jacobi sweeps; 0 selects 10 * max(rows, cols) * 100.
  std::size_t max_sweeps = 0;
};

/// Singular values in descending order (one-sided Jacobi).
std::vector<double> singular_values(const ComplexMatrix& m, SvdOptions opts = {});

double two_norm(const ComplexMatrix& m, SvdOptions opts = {});

/// sigma_max / sigma_min, or kInfinity when sigma_min <= sigma_max * 1e-300.
double condition_number_2(const ComplexMatrix& m, SvdOptions opts = {});

/// 1 / sigma_min, or kInfinity under the same singularity guard.
double inverse_two_norm(const ComplexMatrix& m, SvdOptions opts = {});

/// Both conditioning quantities from a single decomposition.
struct Conditioning {
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  double kappa = kInfinity;
  double inverse_norm = kInfinity;
};
Conditioning conditioning(const ComplexMatrix& m, SvdOptions opts = {});

}  // namespace emprint
