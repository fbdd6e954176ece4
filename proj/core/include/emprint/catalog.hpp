#pragma once

#include "emprint/numerics.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace emprint {

/// Uniform time grid t_i = t_start + i * dt, i = 0..L-1.
class TimeGrid {
public:
  TimeGrid(double t_start, double t_end, std::size_t n_samples);

  double t_start() const noexcept { return t_start_; }
  double t_end() const noexcept { return t_end_; }
  std::size_t size() const noexcept { return n_samples_; }
  double dt() const noexcept { return dt_; }
  double at(std::size_t i) const noexcept { return t_start_ + static_cast<double>(i) * dt_; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
  double t_start_;
  double t_end_;
  std::size_t n_samples_;
  double dt_;
};

using ParamVector = std::vector<double>;

/// K waveforms sampled on a shared grid; row k of `samples` is h(params[k], .).
class TrainingSet {
public:
  TrainingSet(TimeGrid grid, std::vector<ParamVector> params, ComplexMatrix samples);

  const TimeGrid& grid() const noexcept { return grid_; }
  const std::vector<ParamVector>& params() const noexcept { return params_; }
  const ComplexMatrix& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.rows(); }
  std::size_t param_dim() const noexcept { return params_.front().size(); }
  std::span<const Complex> waveform(std::size_t k) const noexcept { return samples_.row(k); }

private:
  TimeGrid grid_;
  std::vector<ParamVector> params_;
  ComplexMatrix samples_;
};

/// Weighted inner product sum conj(f_i) g_i dt; conjugate-linear in `f`.
Complex discrete_inner(std::span<const Complex> f, std::span<const Complex> g,
                       const TimeGrid& grid);
double discrete_norm(std::span<const Complex> f, const TimeGrid& grid);
double discrete_norm_sq(std::span<const Complex> f, const TimeGrid& grid);

enum class Family { DampedChirp, GaussianPacket, PolyFourier };

std::string_view to_string(Family f) noexcept;
/// Throws ErrorCode::UnknownFamily naming the offending identifier.
Family parse_family(std::string_view name);
std::size_t family_param_dim(Family f) noexcept;
std::vector<std::pair<double, double>> default_param_range(Family f);
TimeGrid default_grid(Family f, std::size_t n_samples);

/// h(params, t) for a built-in family.
Complex evaluate_family(Family f, std::span<const double> params, double t);

enum class Sampling { Equispaced, Random };

struct FamilySpec {
  Family family = Family::DampedChirp;
  std::vector<std::pair<double, double>> param_range;
  /// For d > 1 the tensor grid uses m points per dimension, m the smallest
  /// integer with m^d >= n_params, so the set holds m^d waveforms.
  std::size_t n_params = 1;
  TimeGrid grid{0.0, 1.0, 2};
  Sampling sampling = Sampling::Equispaced;
  std::uint64_t seed = 0;
};

TrainingSet generate_family(const FamilySpec& spec);

// Training CSV:
//   # emprint-training v1, L=<int>, t_start=<float>, t_end=<float>, d=<int>
//   <d params>,<re:im> x L
void save_training_csv(const TrainingSet& ts, const std::filesystem::path& path);
TrainingSet load_training_csv(const std::filesystem::path& path);
TrainingSet parse_training_csv(std::string_view text);
std::string format_training_csv(const TrainingSet& ts);

}  // namespace emprint
