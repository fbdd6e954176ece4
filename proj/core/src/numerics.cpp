#include "emprint/numerics.hpp"

#include "emprint/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace emprint {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ExactlySingular: return "ExactlySingular";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownFamily: return "UnknownFamily";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptyTraining: return "EmptyTraining";
    case ErrorCode::DegenerateResidual: return "DegenerateResidual";
    case ErrorCode::BadTruncation: return "BadTruncation";
    case ErrorCode::NoAdmissibleNode: return "NoAdmissibleNode";
    case ErrorCode::SingularVMatrix: return "SingularVMatrix";
  }
  return "Unknown";
}

namespace {

bool is_finite(const Complex& z) noexcept {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

void require_square(const ComplexMatrix& m, const char* op) {
  if (!m.is_square() || m.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(op) + " requires a non-empty square matrix, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

// In-place partial-pivoting elimination. Returns false on an exactly zero
// pivot; `f` is then incomplete and only usable for reporting det = 0.
bool factor_in_place(LuFactorization& f) {
  ComplexMatrix& a = f.factors;
  const std::size_t n = a.rows();
  f.pivots.assign(n, 0);
  f.sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    f.pivots[k] = p;
    if (best == 0.0) return false;
    if (p != k) {
      std::swap_ranges(a.row(k).begin(), a.row(k).end(), a.row(p).begin());
      f.sign = -f.sign;
    }
    const Complex pivot = a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex l = a(i, k) / pivot;
      a(i, k) = l;
      if (l == Complex{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
    }
  }
  return true;
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::LengthMismatch, "matrix storage has " + std::to_string(data_.size()) +
                                               " entries, expected " +
                                               std::to_string(rows_ * cols_));
  }
  for (std::size_t k = 0; k < data_.size(); ++k) {
    if (!is_finite(data_[k])) {
      throw Error(ErrorCode::NonFiniteSample, "non-finite matrix entry at (" +
                                                  std::to_string(k / cols_) + ", " +
                                                  std::to_string(k % cols_) + ")");
    }
  }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::LengthMismatch, "ragged initializer list");
    for (const auto& z : r) {
      if (!is_finite(z)) throw Error(ErrorCode::NonFiniteSample, "non-finite matrix entry");
      data_.push_back(z);
    }
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = std::conj((*this)(i, j));
  return t;
}

ComplexMatrix ComplexMatrix::top_rows(std::size_t n) const {
  if (n > rows_) throw Error(ErrorCode::BadTruncation, "top_rows beyond matrix height");
  ComplexMatrix t(n, cols_);
  std::copy_n(data_.begin(), n * cols_, t.data_.begin());
  return t;
}

ComplexMatrix ComplexMatrix::leading_block(std::size_t n) const {
  if (n > rows_ || n > cols_) throw Error(ErrorCode::BadTruncation, "leading block too large");
  ComplexMatrix t(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t(i, j) = (*this)(i, j);
  return t;
}

double ComplexMatrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw Error(ErrorCode::LengthMismatch, "matrix product shapes");
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::LengthMismatch, "matrix difference shapes");
  ComplexMatrix c = a;
  for (std::size_t k = 0; k < c.data_.size(); ++k) c.data_[k] -= b.data_[k];
  return c;
}

std::vector<Complex> operator*(const ComplexMatrix& a, std::span<const Complex> x) {
  if (a.cols() != x.size()) throw Error(ErrorCode::LengthMismatch, "matrix-vector shapes");
  std::vector<Complex> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex s{};
    const auto r = a.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

ComplexMatrix LuFactorization::lower() const {
  const std::size_t n = size();
  ComplexMatrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) l(i, j) = factors(i, j);
    l(i, i) = 1.0;
  }
  return l;
}

ComplexMatrix LuFactorization::upper() const {
  const std::size_t n = size();
  ComplexMatrix u(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) u(i, j) = factors(i, j);
  return u;
}

ComplexMatrix LuFactorization::permute(const ComplexMatrix& m) const {
  ComplexMatrix out = m;
  for (std::size_t k = 0; k < pivots.size(); ++k) {
    if (pivots[k] != k)
      std::swap_ranges(out.row(k).begin(), out.row(k).end(), out.row(pivots[k]).begin());
  }
  return out;
}

LuFactorization lu_factor(const ComplexMatrix& m) {
  require_square(m, "lu_factor");
  LuFactorization f{m, {}, 1};
  if (!factor_in_place(f)) {
    throw Error(ErrorCode::ExactlySingular, "zero pivot in LU factorization of " +
                                                std::to_string(m.rows()) + "x" +
                                                std::to_string(m.cols()) + " matrix");
  }
  return f;
}

Complex determinant(const ComplexMatrix& m) {
  require_square(m, "determinant");
  LuFactorization f{m, {}, 1};
  if (!factor_in_place(f)) return Complex{};
  Complex det = static_cast<double>(f.sign);
  for (std::size_t i = 0; i < f.size(); ++i) det *= f.factors(i, i);
  return det;
}

std::vector<Complex> solve(const LuFactorization& f, std::span<const Complex> rhs) {
  const std::size_t n = f.size();
  if (rhs.size() != n) throw Error(ErrorCode::LengthMismatch, "rhs length does not match system");
  std::vector<Complex> x(rhs.begin(), rhs.end());
  for (std::size_t k = 0; k < n; ++k)
    if (f.pivots[k] != k) std::swap(x[k], x[f.pivots[k]]);
  for (std::size_t i = 0; i < n; ++i) {
    Complex s = x[i];
    for (std::size_t j = 0; j < i; ++j) s -= f.factors(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    Complex s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= f.factors(i, j) * x[j];
    x[i] = s / f.factors(i, i);
  }
  return x;
}

ComplexMatrix solve(const LuFactorization& f, const ComplexMatrix& rhs) {
  const std::size_t n = f.size();
  if (rhs.rows() != n) throw Error(ErrorCode::LengthMismatch, "rhs rows do not match system");
  ComplexMatrix x = f.permute(rhs);
  const std::size_t m = rhs.cols();
  // Row-oriented sweeps keep the inner loop contiguous for wide right-hand sides.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const Complex l = f.factors(i, j);
      if (l == Complex{}) continue;
      for (std::size_t c = 0; c < m; ++c) x(i, c) -= l * x(j, c);
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex u = f.factors(i, j);
      if (u == Complex{}) continue;
      for (std::size_t c = 0; c < m; ++c) x(i, c) -= u * x(j, c);
    }
    const Complex d = f.factors(i, i);
    for (std::size_t c = 0; c < m; ++c) x(i, c) /= d;
  }
  return x;
}

std::vector<double> singular_values(const ComplexMatrix& m, SvdOptions opts) {
  if (m.empty()) return {};
  // Work on columns of a tall matrix; the adjoint has the same singular values.
  const bool wide = m.cols() > m.rows();
  const std::size_t rows = wide ? m.cols() : m.rows();
  const std::size_t cols = wide ? m.rows() : m.cols();

  // Column-major copy so each column is contiguous.
  std::vector<Complex> a(rows * cols);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (wide)
        a[i * rows + j] = std::conj(m(i, j));
      else
        a[j * rows + i] = m(i, j);
    }
  }
  auto col = [&](std::size_t j) { return a.data() + j * rows; };

  const std::size_t cap =
      opts.max_sweeps != 0 ? opts.max_sweeps : 10 * std::max(m.rows(), m.cols()) * 100;
  // Rotation threshold as in LAPACK's xGESVJ; eps alone can cycle forever.
  const double tol = std::sqrt(static_cast<double>(rows)) * std::numeric_limits<double>::epsilon();

  std::vector<double> sq(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += std::norm(col(j)[i]);
    sq[j] = s;
  }

  bool converged = cols < 2;
  for (std::size_t sweep = 0; sweep < cap && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        Complex* ap = col(p);
        Complex* aq = col(q);
        Complex gamma{};
        for (std::size_t i = 0; i < rows; ++i) gamma += std::conj(ap[i]) * aq[i];
        const double g = std::abs(gamma);
        const double alpha = sq[p];
        const double beta = sq[q];
        if (g == 0.0 || g <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        // Rotate (a_p, e^{-i phi} a_q), which have a real positive inner product.
        const Complex phase = std::conj(gamma) / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (std::size_t i = 0; i < rows; ++i) {
          const Complex x = ap[i];
          const Complex y = phase * aq[i];
          ap[i] = c * x - s * y;
          aq[i] = s * x + c * y;
        }
        // Recompute column norms rather than updating them to avoid drift.
        double np = 0.0;
        double nq = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
          np += std::norm(ap[i]);
          nq += std::norm(aq[i]);
        }
        sq[p] = np;
        sq[q] = nq;
      }
    }
    converged = !rotated;
  }
  if (!converged) {
    throw Error(ErrorCode::ConvergenceFailure,
                "one-sided Jacobi did not converge within " + std::to_string(cap) + " sweeps");
  }

  std::vector<double> sv(cols);
  for (std::size_t j = 0; j < cols; ++j) sv[j] = std::sqrt(sq[j]);
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

double two_norm(const ComplexMatrix& m, SvdOptions opts) {
  const auto sv = singular_values(m, opts);
  return sv.empty() ? 0.0 : sv.front();
}

Conditioning conditioning(const ComplexMatrix& m, SvdOptions opts) {
  require_square(m, "conditioning");
  const auto sv = singular_values(m, opts);
  Conditioning c;
  c.sigma_max = sv.front();
  c.sigma_min = sv.back();
  if (c.sigma_max == 0.0 || c.sigma_min <= c.sigma_max * 1e-300) return c;
  c.kappa = c.sigma_max / c.sigma_min;
  c.inverse_norm = 1.0 / c.sigma_min;
  return c;
}

double condition_number_2(const ComplexMatrix& m, SvdOptions opts) {
  return conditioning(m, opts).kappa;
}

double inverse_two_norm(const ComplexMatrix& m, SvdOptions opts) {
  return conditioning(m, opts).inverse_norm;
}

}  // namespace emprint
