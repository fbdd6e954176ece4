#include "commands.hpp"

#include "emprint/catalog.hpp"
#include "emprint/diagnostics.hpp"
#include "emprint/eim.hpp"
#include "emprint/error.hpp"
#include "emprint/rbm.hpp"
#include "emprint/text_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>

namespace emprint::cli {

namespace fs = std::filesystem;

namespace {

// Failure whose exit code is fixed by the command rather than the error kind.
struct CommandFailure : std::runtime_error {
  CommandFailure(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

struct RunConfig {
  std::string input;
  std::string basis;
  std::string greedy_errors;
  std::string out_dir = ".";
  double tol = kDefaultGreedyTol;
  std::size_t n_max = 100;
  std::vector<std::string> criteria{"classic", "kappa", "lambda"};
  std::uint64_t seed = 0;
  bool first_node_variant = false;

  // generate
  std::string family;
  std::size_t k = 101;
  std::size_t l = 1001;
  std::optional<double> t_start;
  std::optional<double> t_end;
  std::vector<std::string> ranges;
  std::string sampling = "equispaced";
  std::string output = "training.csv";

  // eim / verify-theorem
  std::size_t n = 0;
  bool embed_matrices = false;

  // compare
  std::string dataset_id;
};

// Maps library failures onto the documented exit codes.
int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::DegenerateResidual: return kDegenerateBasis;
    case ErrorCode::SingularVMatrix:
    case ErrorCode::NoAdmissibleNode:
    case ErrorCode::BadTruncation:
    case ErrorCode::ExactlySingular:
    case ErrorCode::ConvergenceFailure: return kInterpolantFailure;
    default: return kInputError;
  }
}

EimOptions eim_options(const RunConfig& cfg) {
  EimOptions o;
  o.first_node = cfg.first_node_variant ? FirstNodeRule::ApplyCriterion : FirstNodeRule::MaxModulus;
  return o;
}

std::vector<SelectionCriterion> parse_criteria(const RunConfig& cfg) {
  std::vector<SelectionCriterion> out;
  for (const auto& name : cfg.criteria) {
    const auto c = parse_criterion(text::trim(name));
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no criteria requested");
  return out;
}

fs::path prepare_out_dir(const RunConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw Error(ErrorCode::IoError, "cannot create output directory " + dir.string());
  return dir;
}

TrainingSet require_training(const RunConfig& cfg) {
  if (cfg.input.empty()) throw Error(ErrorCode::InvalidArgument, "--input is required");
  if (!fs::exists(cfg.input)) throw Error(ErrorCode::IoError, "input file not found: " + cfg.input);
  return load_training_csv(cfg.input);
}

// Basis from --basis when given, otherwise built greedily from --input.
ReducedBasis obtain_basis(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.basis.empty()) {
    if (!fs::exists(cfg.basis)) throw Error(ErrorCode::IoError, "basis file not found: " + cfg.basis);
    return load_basis(cfg.basis, cfg.greedy_errors);
  }
  const auto ts = require_training(cfg);
  auto rb = build_reduced_basis(ts, cfg.tol, cfg.n_max);
  out << "basis: " << rb.size() << " elements, sigma^2 = "
      << text::format_double(rb.greedy_errors().back()) << '\n';
  return rb;
}

std::pair<double, double> parse_range(std::string_view s) {
  const auto colon = s.find(':');
  const auto lo = colon == std::string_view::npos ? std::nullopt : text::parse_double(s.substr(0, colon));
  const auto hi = colon == std::string_view::npos ? std::nullopt : text::parse_double(s.substr(colon + 1));
  if (!lo || !hi) throw Error(ErrorCode::InvalidRange, "range '" + std::string(s) + "' is not lo:hi");
  return {*lo, *hi};
}

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.family.empty()) throw Error(ErrorCode::InvalidArgument, "--family is required");
  FamilySpec spec;
  spec.family = parse_family(cfg.family);
  for (const auto& r : cfg.ranges) spec.param_range.push_back(parse_range(r));
  spec.n_params = cfg.k;
  const auto grid = default_grid(spec.family, std::max<std::size_t>(cfg.l, 2));
  spec.grid = TimeGrid(cfg.t_start.value_or(grid.t_start()), cfg.t_end.value_or(grid.t_end()), cfg.l);
  if (cfg.sampling == "equispaced")
    spec.sampling = Sampling::Equispaced;
  else if (cfg.sampling == "random")
    spec.sampling = Sampling::Random;
  else
    throw Error(ErrorCode::InvalidArgument, "unknown sampling '" + cfg.sampling + "'");
  spec.seed = cfg.seed;

  const auto ts = generate_family(spec);
  const auto path = prepare_out_dir(cfg) / cfg.output;
  save_training_csv(ts, path);
  out << "wrote " << ts.size() << " waveforms x " << ts.grid().size() << " samples to "
      << path.string() << '\n';
  return kSuccess;
}

int cmd_basis(const RunConfig& cfg, std::ostream& out) {
  const auto ts = require_training(cfg);
  const auto dir = prepare_out_dir(cfg);
  const auto rb = build_reduced_basis(ts, cfg.tol, cfg.n_max);
  save_basis(rb, dir / "basis.csv", dir / "greedy_errors.csv");
  out << "basis: " << rb.size() << " elements, sigma^2 = "
      << text::format_double(rb.greedy_errors().back()) << '\n';
  return kSuccess;
}

int cmd_eim(const RunConfig& cfg, std::ostream& out) {
  const auto criteria = parse_criteria(cfg);
  const auto dir = prepare_out_dir(cfg);
  const auto rb = obtain_basis(cfg, out);
  const std::size_t n = cfg.n == 0 ? rb.size() : cfg.n;
  for (const auto c : criteria) {
    const auto itp = build_interpolant(rb, c, n, eim_options(cfg));
    const auto path = dir / ("interpolant_" + std::string(to_string(c)) + ".json");
    text::write_file_atomic(path, interpolant_to_json(itp, cfg.embed_matrices));
    out << to_string(c) << ": " << n << " nodes -> " << path.string() << '\n';
  }
  return kSuccess;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
  const auto criteria = parse_criteria(cfg);
  const auto ts = require_training(cfg);
  const auto dir = prepare_out_dir(cfg);
  const auto rb = build_reduced_basis(ts, cfg.tol, cfg.n_max);
  const std::string id =
      cfg.dataset_id.empty() ? fs::path(cfg.input).stem().string() : cfg.dataset_id;
  try {
    const auto reports = run_comparison(rb, ts, criteria, id, eim_options(cfg));
    write_comparison(reports, dir);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoError) throw;
    throw CommandFailure(kInterpolantFailure, e.what());
  }
  out << "compared " << criteria.size() << " criteria over n = 1.." << rb.size() << " in "
      << dir.string() << '\n';
  return kSuccess;
}

int cmd_verify_theorem(const RunConfig& cfg, std::ostream& out) {
  const auto dir = prepare_out_dir(cfg);
  const auto rb = obtain_basis(cfg, out);
  const std::size_t n = cfg.n == 0 ? rb.size() : cfg.n;
  const auto report = verify_theorem(rb, n);

  std::string csv = "j,node,max_rel_discrepancy,residual_at_node_re,residual_at_node_im,"
                    "det_ratio_at_node_re,det_ratio_at_node_im\n";
  for (const auto& s : report.steps) {
    csv += std::to_string(s.j) + ',' + std::to_string(report.nodes[s.j - 1]) + ',' +
           text::format_double(s.max_rel_discrepancy) + ',' +
           text::format_double(s.residual_at_node.real()) + ',' +
           text::format_double(s.residual_at_node.imag()) + ',' +
           text::format_double(s.det_ratio_at_node.real()) + ',' +
           text::format_double(s.det_ratio_at_node.imag()) + '\n';
  }
  text::write_file_atomic(dir / "theorem.csv", csv);

  const double worst = report.max_discrepancy();
  const bool pass = worst <= kTheoremTolerance;
  out << "verify-theorem: n = " << n << ", max relative discrepancy "
      << text::format_double(worst) << (pass ? " (pass)" : " (FAIL)") << '\n';
  return pass ? kSuccess : kVerificationFailed;
}

void add_shared(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--input", cfg.input, "Training CSV");
  sub->add_option("--out-dir", cfg.out_dir, "Output directory")->capture_default_str();
  sub->add_option("--tol", cfg.tol, "Greedy tolerance on the squared error")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--n-max", cfg.n_max, "Maximum basis size")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
  sub->add_option("--criteria", cfg.criteria, "classic,kappa,lambda")->delimiter(',');
  sub->add_option("--seed", cfg.seed, "Seed for random parameter sampling");
  sub->add_flag("--first-node-variant", cfg.first_node_variant,
                "Apply the variant objective to the first node too");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Reduced bases and empirical interpolants for parametrized time series", "emprint"};
  app.set_config("--config", "", "Optional TOML/INI file; command-line flags take precedence");
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Write a synthetic training set");
  add_shared(gen, cfg);
  gen->add_option("--family", cfg.family, "damped_chirp | gaussian_packet | poly_fourier");
  gen->add_option("--k", cfg.k, "Number of parameter samples")->capture_default_str();
  gen->add_option("--l", cfg.l, "Number of time samples")->capture_default_str();
  gen->add_option("--t-start", cfg.t_start, "Grid start (family default if omitted)");
  gen->add_option("--t-end", cfg.t_end, "Grid end (family default if omitted)");
  gen->add_option("--range", cfg.ranges, "Parameter range lo:hi, once per dimension");
  gen->add_option("--sampling", cfg.sampling, "equispaced | random")->capture_default_str();
  gen->add_option("--output", cfg.output, "File name inside --out-dir")->capture_default_str();

  auto* basis = app.add_subcommand("basis", "Build a greedy reduced basis");
  add_shared(basis, cfg);

  auto* eim = app.add_subcommand("eim", "Build empirical interpolants");
  add_shared(eim, cfg);
  eim->add_option("--basis", cfg.basis, "Basis CSV (instead of --input)");
  eim->add_option("--greedy-errors", cfg.greedy_errors, "Greedy error CSV for --basis");
  eim->add_option("--n", cfg.n, "Number of nodes (default: basis size)");
  eim->add_flag("--embed-matrices", cfg.embed_matrices, "Embed V and B as CSV blocks");

  auto* cmp = app.add_subcommand("compare", "Compare node-selection criteria");
  add_shared(cmp, cfg);
  cmp->add_option("--dataset-id", cfg.dataset_id, "Label stored in the reports");

  auto* thm = app.add_subcommand("verify-theorem",
                                 "Check residual = determinant ratio on the classic loop");
  add_shared(thm, cfg);
  thm->add_option("--basis", cfg.basis, "Basis CSV (instead of --input)");
  thm->add_option("--greedy-errors", cfg.greedy_errors, "Greedy error CSV for --basis");
  thm->add_option("--n", cfg.n, "Number of nodes (default: basis size)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }

  try {
    if (*gen) return cmd_generate(cfg, out);
    if (*basis) return cmd_basis(cfg, out);
    if (*eim) return cmd_eim(cfg, out);
    if (*cmp) return cmd_compare(cfg, out);
    if (*thm) return cmd_verify_theorem(cfg, out);
  } catch (const CommandFailure& e) {
    err << "error: " << e.what() << '\n';
    return e.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace emprint::cli
