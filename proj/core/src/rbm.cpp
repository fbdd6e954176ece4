#include "emprint/rbm.hpp"

#include "emprint/error.hpp"
#include "emprint/text_io.hpp"

#include <cmath>
#include <string>

namespace emprint {

ReducedBasis::ReducedBasis(TimeGrid grid, ComplexMatrix basis, std::vector<double> greedy_errors,
                           std::vector<std::size_t> greedy_params, double tol)
    : grid_(grid),
      basis_(std::move(basis)),
      greedy_errors_(std::move(greedy_errors)),
      greedy_params_(std::move(greedy_params)),
      tol_(tol) {
  if (basis_.rows() == 0) throw Error(ErrorCode::InvalidArgument, "reduced basis is empty");
  if (basis_.cols() != grid_.size())
    throw Error(ErrorCode::GridMismatch, "basis rows do not match the time grid");
  if (!greedy_errors_.empty() && greedy_errors_.size() != basis_.rows())
    throw Error(ErrorCode::LengthMismatch, "one greedy error per basis element is required");
  if (greedy_params_.size() != greedy_errors_.size())
    throw Error(ErrorCode::LengthMismatch, "greedy errors and greedy params differ in length");
}

ReducedBasis ReducedBasis::truncated(std::size_t n) const {
  if (n < 1 || n > size())
    throw Error(ErrorCode::BadTruncation, "cannot truncate a basis of " + std::to_string(size()) +
                                              " to " + std::to_string(n));
  auto errors = greedy_errors_;
  auto params = greedy_params_;
  if (!errors.empty()) {
    errors.resize(n);
    params.resize(n);
  }
  return ReducedBasis(grid_, basis_.top_rows(n), std::move(errors), std::move(params), tol_);
}

namespace {

Complex euclid_inner(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double euclid_norm(std::span<const Complex> a) {
  double s = 0.0;
  for (const auto& z : a) s += std::norm(z);
  return std::sqrt(s);
}

// v <- v - <e, v> e for every stored row e, in order.
void mgs_pass(std::vector<Complex>& v, const std::vector<std::vector<Complex>>& rows) {
  for (const auto& e : rows) {
    const Complex c = euclid_inner(e, v);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * e[i];
  }
}

}  // namespace

ReducedBasis build_reduced_basis(const TrainingSet& ts, double tol, std::size_t n_max) {
  if (ts.size() == 0) throw Error(ErrorCode::EmptyTraining, "training set has no waveforms");
  if (n_max == 0) throw Error(ErrorCode::InvalidArgument, "n_max must be at least 1");
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be nonnegative");

  const TimeGrid& grid = ts.grid();
  const std::size_t k_count = ts.size();
  const std::size_t l = grid.size();

  // Running residuals h_k - P_m h_k, one per training row.
  std::vector<std::vector<Complex>> residuals(k_count);
  std::vector<double> err(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto w = ts.waveform(k);
    residuals[k].assign(w.begin(), w.end());
    err[k] = discrete_norm_sq(w, grid);
  }
  auto argmax = [&] {
    std::size_t best = 0;
    for (std::size_t k = 1; k < k_count; ++k)
      if (err[k] > err[best]) best = k;
    return best;
  };

  std::size_t selected = argmax();
  const double seed_norm = euclid_norm(ts.waveform(selected));

  std::vector<std::vector<Complex>> rows;
  std::vector<double> greedy_errors;
  std::vector<std::size_t> greedy_params;
  while (true) {
    const auto w = ts.waveform(selected);
    std::vector<Complex> v(w.begin(), w.end());
    mgs_pass(v, rows);
    mgs_pass(v, rows);
    const double nv = euclid_norm(v);
    if (!(nv > 1e-14 * seed_norm)) {
      throw Error(ErrorCode::DegenerateResidual,
                  "step " + std::to_string(rows.size() + 1) + ": residual of training row " +
                      std::to_string(selected) + " has norm " + text::format_double(nv) +
                      " before reaching tolerance");
    }
    for (auto& z : v) z /= nv;

    for (std::size_t k = 0; k < k_count; ++k) {
      auto& r = residuals[k];
      const Complex c = euclid_inner(v, r);
      for (std::size_t i = 0; i < l; ++i) r[i] -= c * v[i];
      err[k] = discrete_norm_sq(r, grid);
    }
    rows.push_back(std::move(v));
    greedy_params.push_back(selected);
    selected = argmax();
    greedy_errors.push_back(err[selected]);

    if (err[selected] <= tol || rows.size() >= n_max) break;
  }

  ComplexMatrix basis(rows.size(), l);
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i].begin(), rows[i].end(), basis.row(i).begin());
  return ReducedBasis(grid, std::move(basis), std::move(greedy_errors), std::move(greedy_params),
                      tol);
}

std::vector<Complex> project(const ReducedBasis& rb, std::span<const Complex> h, std::size_t n) {
  if (n < 1 || n > rb.size()) {
    throw Error(ErrorCode::BadTruncation, "projection order " + std::to_string(n) +
                                              " outside 1.." + std::to_string(rb.size()));
  }
  if (h.size() != rb.grid().size())
    throw Error(ErrorCode::LengthMismatch, "waveform length does not match basis");
  std::vector<Complex> out(h.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto e = rb.element(i);
    const Complex c = euclid_inner(e, h);
    for (std::size_t t = 0; t < h.size(); ++t) out[t] += c * e[t];
  }
  return out;
}

double projection_error_sq(const ReducedBasis& rb, std::span<const Complex> h, std::size_t n) {
  auto p = project(rb, h, n);
  for (std::size_t t = 0; t < h.size(); ++t) p[t] = h[t] - p[t];
  return discrete_norm_sq(p, rb.grid());
}

std::string format_basis_csv(const ReducedBasis& rb) {
  const auto& g = rb.grid();
  std::string out = "# emprint-training v1, L=" + std::to_string(g.size()) +
                    ", t_start=" + text::format_double(g.t_start()) +
                    ", t_end=" + text::format_double(g.t_end()) +
                    ", d=0, kind=basis, tol=" + text::format_double(rb.tol()) + "\n";
  for (std::size_t i = 0; i < rb.size(); ++i) {
    bool first = true;
    for (const auto& z : rb.element(i)) {
      if (!first) out += ',';
      first = false;
      out += text::format_double(z.real());
      out += ':';
      out += text::format_double(z.imag());
    }
    out += '\n';
  }
  return out;
}

std::string format_greedy_errors_csv(const ReducedBasis& rb) {
  std::string out = "n,sigma_sq,training_index\n";
  for (std::size_t m = 0; m < rb.greedy_errors().size(); ++m) {
    out += std::to_string(m + 1) + ',' + text::format_double(rb.greedy_errors()[m]) + ',' +
           std::to_string(rb.greedy_params()[m]) + '\n';
  }
  return out;
}

void save_basis(const ReducedBasis& rb, const std::filesystem::path& basis_csv,
                const std::filesystem::path& errors_csv) {
  text::write_file_atomic(basis_csv, format_basis_csv(rb));
  text::write_file_atomic(errors_csv, format_greedy_errors_csv(rb));
}

namespace {

[[noreturn]] void parse_fail(std::string_view file, std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::ParseError,
              std::string(file) + " line " + std::to_string(line) + ": " + msg);
}

}  // namespace

ReducedBasis parse_basis_csv(std::string_view basis_text, std::string_view errors_text) {
  const auto lines = text::split(basis_text, '\n');
  const auto header = text::parse_header(lines.front());
  if (!header || header->tag != "emprint-training")
    parse_fail("basis", 1, "missing '# emprint-training v1' header");
  auto field = [&](std::string_view key) -> std::string_view {
    const auto it = header->fields.find(key);
    if (it == header->fields.end()) parse_fail("basis", 1, "header lacks '" + std::string(key) + "'");
    return it->second;
  };
  if (field("kind") != "basis") parse_fail("basis", 1, "file kind is not 'basis'");
  const auto l = text::parse_int(field("L"));
  const auto t0 = text::parse_double(field("t_start"));
  const auto t1 = text::parse_double(field("t_end"));
  const auto tol = text::parse_double(field("tol"));
  if (!l || !t0 || !t1 || !tol || *l < 2) parse_fail("basis", 1, "malformed header values");
  const TimeGrid grid(*t0, *t1, static_cast<std::size_t>(*l));

  std::vector<Complex> data;
  std::size_t rows = 0;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const auto line = text::trim(lines[n]);
    if (line.empty()) continue;
    const auto fields = text::split(line, ',');
    if (fields.size() != grid.size()) {
      throw Error(ErrorCode::GridMismatch, "basis line " + std::to_string(n + 1) + ": expected " +
                                               std::to_string(grid.size()) + " samples");
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto colon = fields[i].find(':');
      if (colon == std::string_view::npos) parse_fail("basis", n + 1, "sample is not re:im");
      const auto re = text::parse_double(fields[i].substr(0, colon));
      const auto im = text::parse_double(fields[i].substr(colon + 1));
      if (!re || !im) parse_fail("basis", n + 1, "sample is not numeric");
      if (!std::isfinite(*re) || !std::isfinite(*im)) {
        throw Error(ErrorCode::NonFiniteSample, "basis row " + std::to_string(rows) +
                                                    ", column " + std::to_string(i) +
                                                    " is not finite");
      }
      data.emplace_back(*re, *im);
    }
    ++rows;
  }

  std::vector<double> errors;
  std::vector<std::size_t> params;
  if (!text::trim(errors_text).empty()) {
    const auto elines = text::split(errors_text, '\n');
    if (text::trim(elines.front()) != "n,sigma_sq,training_index")
      parse_fail("greedy errors", 1, "unexpected header");
    for (std::size_t n = 1; n < elines.size(); ++n) {
      const auto line = text::trim(elines[n]);
      if (line.empty()) continue;
      const auto f = text::split(line, ',');
      if (f.size() != 3) parse_fail("greedy errors", n + 1, "expected n,sigma_sq,training_index");
      const auto idx = text::parse_int(f[0]);
      const auto sq = text::parse_double(f[1]);
      const auto tr = text::parse_int(f[2]);
      if (!idx || !sq || !tr || *idx != static_cast<long long>(errors.size() + 1) || *tr < 0)
        parse_fail("greedy errors", n + 1, "expected n,sigma_sq,training_index");
      errors.push_back(*sq);
      params.push_back(static_cast<std::size_t>(*tr));
    }
  }
  return ReducedBasis(grid, ComplexMatrix(rows, grid.size(), std::move(data)), std::move(errors),
                      std::move(params), *tol);
}

ReducedBasis load_basis(const std::filesystem::path& basis_csv,
                        const std::filesystem::path& errors_csv) {
  const std::string basis_text = text::read_file(basis_csv);
  const std::string errors_text = errors_csv.empty() ? std::string{} : text::read_file(errors_csv);
  return parse_basis_csv(basis_text, errors_text);
}

}  // namespace emprint
