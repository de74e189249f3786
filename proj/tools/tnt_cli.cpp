// tnt: ternary weight conversion, experiments and self-verification.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tnt/error.hpp"
#include "tnt/experiments.hpp"
#include "tnt/fixtures.hpp"
#include "tnt/model_file.hpp"
#include "tnt/pipeline.hpp"
#include "tnt/verify.hpp"

namespace {

enum Exit : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kInput = 3, kInternal = 4 };

constexpr std::uint64_t kDefaultSeed = 20200305;

int exit_code_for(tnt::ErrorKind kind) {
  using tnt::ErrorKind;
  switch (kind) {
    case ErrorKind::InvalidConfig:
      return kUsage;
    case ErrorKind::ParseError:
    case ErrorKind::UnsupportedDtype:
    case ErrorKind::IoError:
    case ErrorKind::VersionMismatch:
    case ErrorKind::NonFinite:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::EmptyTensor:
      return kInput;
    default:
      return kInternal;
  }
}

std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string fmt5(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5f", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw tnt::Error(tnt::ErrorKind::IoError, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw tnt::Error(tnt::ErrorKind::IoError, "write failed for '" + path + "'");
}

struct QuantizeArgs {
  std::string input;
  std::string output;
  std::string mode = "ternary";
  std::string scalars = "single";
  std::string strategy = "channel";
  std::vector<std::string> skip;
  bool quantize_biases = false;
  int jobs = 1;
  std::string report;
};

int cmd_quantize(const QuantizeArgs& a) {
  tnt::QuantizeConfig config;
  config.mode = tnt::parse_mode(a.mode);
  config.scalars = tnt::parse_scalar_kind(a.scalars);
  config.strategy = tnt::parse_strategy(a.strategy);
  config.skip_layers = {a.skip.begin(), a.skip.end()};
  config.quantize_biases = a.quantize_biases;
  config.jobs = a.jobs;

  const auto container = tnt::load_container(a.input);
  auto [model, report] = tnt::quantize_model(container, config);
  report.file_bytes = tnt::write_quantized(a.output, model);
  std::cout << tnt::report_table(report);

  const auto check = tnt::verify_compression(report);
  std::size_t checked = 0;
  for (const auto& l : check.layers) checked += l.checked ? 1 : 0;
  std::cout << "code-stream compression check (" << checked << " layers): "
            << (check.passed ? "pass" : "n/a or fail") << "\n";
  if (!a.report.empty()) tnt::write_report(a.report, report);
  return kOk;
}

struct CurveArgs {
  std::string dist = "uniform";
  std::size_t dim = 1000000;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
};

int cmd_curve(const CurveArgs& a) {
  if (a.dim == 0) throw tnt::Error(tnt::ErrorKind::InvalidConfig, "--dim must be >= 1");
  const auto res = tnt::curve_experiment(tnt::parse_distribution(a.dist), a.dim, a.seed);
  std::cout << "max_cosine " << shortest(res.max_cosine) << "\nargmax_m " << res.argmax_m
            << "\nsupport_fraction "
            << shortest(static_cast<double>(res.argmax_m) / static_cast<double>(a.dim))
            << "\nunimodal " << (tnt::is_unimodal(res.curve.scores) ? "yes" : "no") << "\n";
  if (!a.out.empty()) write_text(a.out, tnt::curve_csv(res.curve));
  return kOk;
}

struct SweepArgs {
  std::string dist = "uniform";
  std::string mode = "both";
  std::vector<std::size_t> dims = {10, 100, 1000, 10000};
  std::size_t linear_max = 0;
  std::size_t trials = 200;
  std::uint64_t seed = kDefaultSeed;
  int jobs = 1;
  std::string out;
};

int cmd_sweep(const SweepArgs& a) {
  const auto dist = tnt::parse_distribution(a.dist);
  std::vector<tnt::QuantMode> modes;
  if (a.mode == "both") {
    modes = {tnt::QuantMode::Ternary, tnt::QuantMode::Binary};
  } else {
    modes = {tnt::parse_mode(a.mode)};
  }
  std::vector<std::size_t> dims = a.dims;
  if (a.linear_max > 0) {
    dims.clear();
    for (std::size_t d = 1; d <= a.linear_max; ++d) dims.push_back(d);
  }
  tnt::SweepResult all;
  for (auto mode : modes) {
    auto r = tnt::dimension_sweep(dist, mode, dims, a.trials, a.seed, a.jobs);
    std::cout << "mode " << tnt::to_string(mode) << " distribution " << a.dist << " limit "
              << fmt5(tnt::reference_limits(dist, mode)) << "\n";
    for (const auto& s : r.summary) {
      std::cout << "  dim " << s.dimension << " mean " << shortest(s.mean) << " variance "
                << shortest(s.variance) << "\n";
    }
    all.records.insert(all.records.end(), r.records.begin(), r.records.end());
  }
  if (!a.out.empty()) tnt::export_csv(all, a.out);
  return kOk;
}

int cmd_limits() {
  using tnt::Distribution;
  using tnt::QuantMode;
  std::cout << "ternary uniform " << fmt5(tnt::reference_limits(Distribution::UniformSymmetric, QuantMode::Ternary)) << "\n"
            << "ternary normal " << fmt5(tnt::reference_limits(Distribution::StandardNormal, QuantMode::Ternary)) << "\n"
            << "binary uniform " << fmt5(tnt::reference_limits(Distribution::UniformSymmetric, QuantMode::Binary)) << "\n"
            << "binary normal " << fmt5(tnt::reference_limits(Distribution::StandardNormal, QuantMode::Binary)) << "\n";
  return kOk;
}

struct UnimodalArgs {
  std::string dist = "uniform";
  std::size_t dim = 10000;
  std::size_t trials = 100;
  std::uint64_t seed = kDefaultSeed;
};

int cmd_unimodality(const UnimodalArgs& a) {
  if (a.dim == 0) throw tnt::Error(tnt::ErrorKind::InvalidConfig, "--dim must be >= 1");
  const double rate =
      tnt::unimodality_rate(tnt::parse_distribution(a.dist), a.dim, a.trials, a.seed);
  std::cout << "unimodal_fraction " << shortest(rate) << " (" << a.trials
            << " curves, dim " << a.dim << ")\n";
  return kOk;
}

int cmd_verify(const tnt::VerifyOptions& opt) {
  const auto outcome = tnt::run_verify(opt);
  for (const auto& c : outcome.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " [" << c.cases << " cases]\n";
    if (!c.passed) std::cout << "  counterexample: " << c.counterexample << "\n";
  }
  return outcome.passed() ? kOk : kVerifyFailed;
}

struct FixtureArgs {
  std::string arch = "lenet5";
  std::string out;
  std::uint64_t seed = kDefaultSeed;
  std::size_t width_divisor = 8;
  std::size_t rows = 1000;
  std::size_t cols = 1000;
};

int cmd_fixture(const FixtureArgs& a) {
  tnt::FixtureModel m;
  if (a.arch == "lenet5") {
    m = tnt::lenet5_fixture(a.seed);
  } else if (a.arch == "vgg16") {
    m = tnt::vgg16_fixture(a.width_divisor, a.seed);
  } else if (a.arch == "dense") {
    m = tnt::dense_fixture(a.rows, a.cols, a.seed);
  } else {
    throw tnt::Error(tnt::ErrorKind::InvalidConfig, "unknown architecture '" + a.arch + "'");
  }
  tnt::write_fixture(a.out, m);
  std::size_t params = 0;
  for (const auto& t : m.tensors) params += t.values.size();
  std::cout << "wrote " << m.tensors.size() << " tensors, " << params << " parameters to "
            << a.out << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ternary/binary weight conversion by cosine-similarity search"};
  app.require_subcommand(1);

  QuantizeArgs qa;
  if (const char* env = std::getenv("TNT_JOBS")) {
    try {
      qa.jobs = std::stoi(env);
    } catch (const std::exception&) {
      std::cerr << "error: TNT_JOBS must be an integer\n";
      return kUsage;
    }
  }
  auto* quantize = app.add_subcommand("quantize", "Convert a .npy/.npz container to a .tnt file");
  quantize->add_option("--input", qa.input, "Input .npy or .npz file")->required();
  quantize->add_option("--output", qa.output, "Output .tnt file")->required();
  quantize->add_option("--mode", qa.mode, "ternary or binary")
      ->check(CLI::IsMember({"ternary", "binary"}))
      ->capture_default_str();
  quantize->add_option("--scalars", qa.scalars, "none, single or dual")
      ->check(CLI::IsMember({"none", "single", "dual"}))
      ->capture_default_str();
  quantize->add_option("--strategy", qa.strategy, "channel, row or flat")
      ->check(CLI::IsMember({"channel", "row", "flat"}))
      ->capture_default_str();
  quantize->add_option("--skip", qa.skip, "Comma-separated layer names stored unquantized")
      ->delimiter(',');
  quantize->add_flag("--quantize-biases", qa.quantize_biases, "Also quantize 1-dim tensors");
  quantize->add_option("--jobs", qa.jobs, "Worker threads (default: TNT_JOBS or 1)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  quantize->add_option("--report", qa.report, "Write the report as .csv or .json");

  auto* experiment = app.add_subcommand("experiment", "Similarity experiments on random vectors");
  experiment->require_subcommand(1);
  CurveArgs ca;
  auto* curve = experiment->add_subcommand("curve", "Score for every support size M");
  curve->add_option("--dist", ca.dist, "uniform or normal")
      ->check(CLI::IsMember({"uniform", "normal"}))
      ->capture_default_str();
  curve->add_option("--dim", ca.dim, "Vector dimension")->capture_default_str();
  curve->add_option("--seed", ca.seed, "Seed")->capture_default_str();
  curve->add_option("--out", ca.out, "CSV output (m,score)");

  SweepArgs sa;
  auto* sweep = experiment->add_subcommand("sweep", "Best score across dimensions and trials");
  sweep->add_option("--dist", sa.dist, "uniform or normal")
      ->check(CLI::IsMember({"uniform", "normal"}))
      ->capture_default_str();
  sweep->add_option("--mode", sa.mode, "ternary, binary or both")
      ->check(CLI::IsMember({"ternary", "binary", "both"}))
      ->capture_default_str();
  sweep->add_option("--dims", sa.dims, "Comma-separated ascending dimensions")
      ->delimiter(',')
      ->capture_default_str();
  sweep->add_option("--linear-max", sa.linear_max,
                    "Sweep every dimension 1..D instead of --dims (slow for large D)");
  sweep->add_option("--trials", sa.trials, "Trials per dimension")->capture_default_str();
  sweep->add_option("--seed", sa.seed, "Base seed")->capture_default_str();
  sweep->add_option("--jobs", sa.jobs, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep->add_option("--out", sa.out, "CSV output");

  experiment->add_subcommand("limits", "Print the analytic large-N limits");

  UnimodalArgs ua;
  auto* unimodal = experiment->add_subcommand("unimodality", "Fraction of unimodal score curves");
  unimodal->add_option("--dist", ua.dist, "uniform or normal")
      ->check(CLI::IsMember({"uniform", "normal"}))
      ->capture_default_str();
  unimodal->add_option("--dim", ua.dim, "Vector dimension")->capture_default_str();
  unimodal->add_option("--trials", ua.trials, "Number of curves")->capture_default_str();
  unimodal->add_option("--seed", ua.seed, "Base seed")->capture_default_str();

  tnt::VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "Oracle and property self-check");
  verify->add_option("--oracle-trials", vo.oracle_trials, "Trials per dimension")
      ->capture_default_str();
  verify->add_option("--max-dim", vo.max_dim, "Largest brute-force dimension (<= 12)")
      ->capture_default_str();
  verify->add_option("--seed", vo.seed, "Seed")->capture_default_str();

  FixtureArgs fa;
  auto* fixture = app.add_subcommand("fixture", "Write a synthetic Gaussian-initialized model");
  fixture->add_option("--arch", fa.arch, "lenet5, vgg16 or dense")
      ->check(CLI::IsMember({"lenet5", "vgg16", "dense"}))
      ->capture_default_str();
  fixture->add_option("--out", fa.out, "Output .npz")->required();
  fixture->add_option("--seed", fa.seed, "Seed")->capture_default_str();
  fixture->add_option("--width-divisor", fa.width_divisor, "vgg16 width divisor")
      ->capture_default_str();
  fixture->add_option("--rows", fa.rows, "dense rows")->capture_default_str();
  fixture->add_option("--cols", fa.cols, "dense columns")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (quantize->parsed()) return cmd_quantize(qa);
    if (curve->parsed()) return cmd_curve(ca);
    if (sweep->parsed()) return cmd_sweep(sa);
    if (experiment->got_subcommand("limits")) return cmd_limits();
    if (unimodal->parsed()) return cmd_unimodality(ua);
    if (verify->parsed()) return cmd_verify(vo);
    if (fixture->parsed()) return cmd_fixture(fa);
  } catch (const tnt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
