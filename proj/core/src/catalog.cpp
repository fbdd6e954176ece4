#include "emprint/catalog.hpp"

#include "emprint/error.hpp"
#include "emprint/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace emprint {

TimeGrid::TimeGrid(double t_start, double t_end, std::size_t n_samples)
    : t_start_(t_start), t_end_(t_end), n_samples_(n_samples), dt_(0.0) {
  if (!std::isfinite(t_start) || !std::isfinite(t_end))
    throw Error(ErrorCode::InvalidRange, "time grid bounds must be finite");
  if (n_samples < 2) throw Error(ErrorCode::InvalidRange, "time grid needs at least 2 samples");
  dt_ = (t_end - t_start) / static_cast<double>(n_samples - 1);
  if (!(dt_ > 0.0)) throw Error(ErrorCode::InvalidRange, "time grid requires t_end > t_start");
}

TrainingSet::TrainingSet(TimeGrid grid, std::vector<ParamVector> params, ComplexMatrix samples)
    : grid_(grid), params_(std::move(params)), samples_(std::move(samples)) {
  if (samples_.rows() == 0) throw Error(ErrorCode::EmptyTraining, "training set has no waveforms");
  if (samples_.cols() != grid_.size()) {
    throw Error(ErrorCode::GridMismatch, "waveforms have " + std::to_string(samples_.cols()) +
                                             " samples but the grid has " +
                                             std::to_string(grid_.size()));
  }
  if (params_.size() != samples_.rows())
    throw Error(ErrorCode::LengthMismatch, "one parameter vector per waveform is required");
  const std::size_t d = params_.front().size();
  if (d == 0) throw Error(ErrorCode::InvalidArgument, "parameter vectors must be non-empty");
  for (const auto& p : params_) {
    if (p.size() != d) throw Error(ErrorCode::LengthMismatch, "parameter vectors differ in length");
  }
  for (std::size_t k = 0; k < samples_.rows(); ++k) {
    for (std::size_t i = 0; i < samples_.cols(); ++i) {
      const Complex z = samples_(k, i);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw Error(ErrorCode::NonFiniteSample, "waveform " + std::to_string(k) + ", sample " +
                                                    std::to_string(i) + " is not finite");
      }
    }
  }
  std::vector<const ParamVector*> sorted;
  sorted.reserve(params_.size());
  for (const auto& p : params_) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return *a < *b; });
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    if (*sorted[k] == *sorted[k - 1])
      throw Error(ErrorCode::InvalidArgument, "training parameters must be pairwise distinct");
  }
}

Complex discrete_inner(std::span<const Complex> f, std::span<const Complex> g,
                       const TimeGrid& grid) {
  if (f.size() != g.size() || f.size() != grid.size()) {
    throw Error(ErrorCode::LengthMismatch, "inner product of lengths " + std::to_string(f.size()) +
                                               " and " + std::to_string(g.size()) +
                                               " on a grid of " + std::to_string(grid.size()));
  }
  Complex s{};
  for (std::size_t i = 0; i < f.size(); ++i) s += std::conj(f[i]) * g[i];
  return s * grid.dt();
}

double discrete_norm_sq(std::span<const Complex> f, const TimeGrid& grid) {
  if (f.size() != grid.size())
    throw Error(ErrorCode::LengthMismatch, "waveform length does not match grid");
  double s = 0.0;
  for (const auto& z : f) s += std::norm(z);
  return s * grid.dt();
}

double discrete_norm(std::span<const Complex> f, const TimeGrid& grid) {
  return std::sqrt(discrete_norm_sq(f, grid));
}

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::DampedChirp: return "damped_chirp";
    case Family::GaussianPacket: return "gaussian_packet";
    case Family::PolyFourier: return "poly_fourier";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (auto f : {Family::DampedChirp, Family::GaussianPacket, Family::PolyFourier}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorCode::UnknownFamily, "unknown family '" + std::string(name) + "'");
}

std::size_t family_param_dim(Family f) noexcept { return f == Family::GaussianPacket ? 2 : 1; }

std::vector<std::pair<double, double>> default_param_range(Family f) {
  switch (f) {
    case Family::DampedChirp: return {{1.0, 5.0}};
    case Family::GaussianPacket: return {{0.25, 0.75}, {0.1, 0.3}};
    case Family::PolyFourier: return {{-4.0, 4.0}};
  }
  return {};
}

TimeGrid default_grid(Family f, std::size_t n_samples) {
  // A longer window gives the chirp enough phase variation to need ~15 elements.
  return f == Family::DampedChirp ? TimeGrid(0.0, 6.0, n_samples) : TimeGrid(0.0, 1.0, n_samples);
}

Complex evaluate_family(Family f, std::span<const double> p, double t) {
  using namespace std::complex_literals;
  switch (f) {
    case Family::DampedChirp: {
      const double lambda = p[0];
      return std::exp(1i * (lambda * t + 0.1 * lambda * t * t)) / (1.0 + lambda * t * t);
    }
    case Family::GaussianPacket: {
      const double center = p[0];
      const double width = p[1];
      const double d = t - center;
      return std::exp(-d * d / (2.0 * width * width)) * std::exp(1i * (20.0 * t * center));
    }
    case Family::PolyFourier: {
      const double lambda = p[0];
      Complex sum{};
      double coeff = 1.0;  // lambda^m / m!
      for (int m = 0; m <= 9; ++m) {
        if (m > 0) coeff *= lambda / m;
        sum += coeff * std::exp(1i * (m * std::numbers::pi * t));
      }
      return sum;
    }
  }
  return {};
}

namespace {

std::vector<ParamVector> equispaced_params(const std::vector<std::pair<double, double>>& range,
                                           std::size_t k) {
  const std::size_t d = range.size();
  auto power = [d](std::size_t base) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < d; ++i) r *= base;
    return r;
  };
  std::size_t m = 1;
  while (power(m) < k) ++m;
  const std::size_t total = power(m);

  auto axis = [&](std::size_t dim, std::size_t i) {
    const auto [lo, hi] = range[dim];
    if (m == 1) return lo;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1);
  };

  std::vector<ParamVector> out;
  out.reserve(total);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t n = 0; n < total; ++n) {
    ParamVector p(d);
    for (std::size_t dim = 0; dim < d; ++dim) p[dim] = axis(dim, idx[dim]);
    out.push_back(std::move(p));
    // Last dimension varies fastest.
    for (std::size_t dim = d; dim-- > 0;) {
      if (++idx[dim] < m) break;
      idx[dim] = 0;
    }
  }
  return out;
}

std::vector<ParamVector> random_params(const std::vector<std::pair<double, double>>& range,
                                       std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // Explicit 53-bit mapping keeps draws identical across standard libraries.
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<ParamVector> out(k, ParamVector(range.size()));
  for (auto& p : out) {
    for (std::size_t dim = 0; dim < range.size(); ++dim) {
      const auto [lo, hi] = range[dim];
      p[dim] = lo + (hi - lo) * unit();
    }
  }
  return out;
}

}  // namespace

TrainingSet generate_family(const FamilySpec& spec) {
  const std::size_t d = family_param_dim(spec.family);
  auto range = spec.param_range.empty() ? default_param_range(spec.family) : spec.param_range;
  if (range.size() != d) {
    throw Error(ErrorCode::InvalidRange, std::string(to_string(spec.family)) + " takes " +
                                             std::to_string(d) + " parameter range(s), got " +
                                             std::to_string(range.size()));
  }
  for (const auto& [lo, hi] : range) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
      throw Error(ErrorCode::InvalidRange, "parameter range requires finite lo < hi");
  }
  if (spec.family == Family::GaussianPacket && !(range[1].first > 0.0))
    throw Error(ErrorCode::InvalidRange, "gaussian_packet width range must be positive");
  if (spec.n_params == 0) throw Error(ErrorCode::InvalidRange, "n_params must be at least 1");

  auto params = spec.sampling == Sampling::Equispaced
                    ? equispaced_params(range, spec.n_params)
                    : random_params(range, spec.n_params, spec.seed);

  const TimeGrid& grid = spec.grid;
  ComplexMatrix samples(params.size(), grid.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (std::size_t i = 0; i < grid.size(); ++i)
      samples(k, i) = evaluate_family(spec.family, params[k], grid.at(i));
  }
  return TrainingSet(grid, std::move(params), std::move(samples));
}

std::string format_training_csv(const TrainingSet& ts) {
  const auto& g = ts.grid();
  std::string out = "# emprint-training v1, L=" + std::to_string(g.size()) +
                    ", t_start=" + text::format_double(g.t_start()) +
                    ", t_end=" + text::format_double(g.t_end()) +
                    ", d=" + std::to_string(ts.param_dim()) + "\n";
  for (std::size_t k = 0; k < ts.size(); ++k) {
    bool first = true;
    for (double p : ts.params()[k]) {
      if (!first) out += ',';
      out += text::format_double(p);
      first = false;
    }
    for (const auto& z : ts.waveform(k)) {
      out += ',';
      out += text::format_double(z.real());
      out += ':';
      out += text::format_double(z.imag());
    }
    out += '\n';
  }
  return out;
}

void save_training_csv(const TrainingSet& ts, const std::filesystem::path& path) {
  text::write_file_atomic(path, format_training_csv(ts));
}

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

long long header_int(const text::Header& h, std::string_view key, std::size_t line) {
  const auto it = h.fields.find(key);
  if (it == h.fields.end()) parse_fail(line, "header is missing '" + std::string(key) + "'");
  const auto v = text::parse_int(it->second);
  if (!v) parse_fail(line, "header field '" + std::string(key) + "' is not an integer");
  return *v;
}

double header_double(const text::Header& h, std::string_view key, std::size_t line) {
  const auto it = h.fields.find(key);
  if (it == h.fields.end()) parse_fail(line, "header is missing '" + std::string(key) + "'");
  const auto v = text::parse_double(it->second);
  if (!v) parse_fail(line, "header field '" + std::string(key) + "' is not a number");
  return *v;
}

}  // namespace

TrainingSet parse_training_csv(std::string_view text_in) {
  const auto lines = text::split(text_in, '\n');
  const auto header = text::parse_header(lines.front());
  if (!header || header->tag != "emprint-training")
    parse_fail(1, "expected '# emprint-training v1, L=..., t_start=..., t_end=..., d=...'");
  if (const auto kind = header->fields.find("kind");
      kind != header->fields.end() && kind->second != "training")
    parse_fail(1, "file kind '" + kind->second + "' is not a training set");

  const long long l = header_int(*header, "L", 1);
  const long long d = header_int(*header, "d", 1);
  if (l < 2) parse_fail(1, "L must be at least 2");
  if (d < 1) parse_fail(1, "d must be at least 1");
  const TimeGrid grid(header_double(*header, "t_start", 1), header_double(*header, "t_end", 1),
                      static_cast<std::size_t>(l));
  const std::size_t dim = static_cast<std::size_t>(d);

  std::vector<ParamVector> params;
  std::vector<Complex> data;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const std::size_t line_no = n + 1;
    const auto line = text::trim(lines[n]);
    if (line.empty()) continue;
    const auto fields = text::split(line, ',');
    if (fields.size() != dim + grid.size()) {
      throw Error(ErrorCode::GridMismatch,
                  "line " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                      " parameters and " + std::to_string(grid.size()) + " samples, got " +
                      std::to_string(fields.size()) + " fields");
    }
    const std::size_t row = params.size();
    ParamVector p(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      const auto v = text::parse_double(fields[j]);
      if (!v) parse_fail(line_no, "bad parameter '" + std::string(fields[j]) + "'");
      if (!std::isfinite(*v)) parse_fail(line_no, "non-finite parameter");
      p[j] = *v;
    }
    params.push_back(std::move(p));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto field = fields[dim + i];
      const auto colon = field.find(':');
      if (colon == std::string_view::npos)
        parse_fail(line_no, "sample " + std::to_string(i) + " is not of the form re:im");
      const auto re = text::parse_double(field.substr(0, colon));
      const auto im = text::parse_double(field.substr(colon + 1));
      if (!re || !im) parse_fail(line_no, "sample " + std::to_string(i) + " is not numeric");
      if (!std::isfinite(*re) || !std::isfinite(*im)) {
        throw Error(ErrorCode::NonFiniteSample, "row " + std::to_string(row) + " (line " +
                                                    std::to_string(line_no) + "), column " +
                                                    std::to_string(i) + " is not finite");
      }
      data.emplace_back(*re, *im);
    }
  }
  if (params.empty()) throw Error(ErrorCode::EmptyTraining, "training file has no waveforms");
  const std::size_t k = params.size();
  return TrainingSet(grid, std::move(params), ComplexMatrix(k, grid.size(), std::move(data)));
}

TrainingSet load_training_csv(const std::filesystem::path& path) {
  return parse_training_csv(text::read_file(path));
}

}  // namespace emprint
