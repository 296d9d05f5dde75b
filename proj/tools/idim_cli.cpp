// Command-line front end: estimate, calibrate, generate, bench.
//
// Exit codes: 0 success, 2 parameter/usage error, 3 input or file error,
// 4 numeric/degenerate-data error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "idim/idim.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitNumeric = 4;

struct EstimateArgs {
  std::string input;
  std::string method = "danco";
  std::size_t k = 0;  // 0 = preset default
  std::size_t k1 = 0, k2 = 0;
  std::size_t max_dim = 0;  // 0 = ambient dimension
  std::uint64_t seed = 0;
  std::string calibration;
  std::size_t n_reps = 1;
  std::string family = "sphere_surface";
  std::size_t delay = 0;
  std::string preset = "synthetic";
  bool verbose = false;
};

idim::CalibrationFamily parse_family(const std::string& name) {
  if (name == "sphere_surface") return idim::CalibrationFamily::sphere_surface;
  if (name == "ball" || name == "unit_ball") return idim::CalibrationFamily::unit_ball;
  throw idim::ParameterError("unknown calibration family '" + name + "'");
}

idim::CalibrationTable obtain_calibration(const EstimateArgs& args, std::size_t n, std::size_t k,
                                          std::size_t max_dim) {
  if (!args.calibration.empty() && std::filesystem::exists(args.calibration)) {
    idim::CalibrationTable table = idim::load_calibration(args.calibration);
    idim::ensure_coherent(table, n, k);
    if (table.max_dim < max_dim)
      throw idim::ParameterError("calibration cache depth " + std::to_string(table.max_dim) +
                                 " < requested max-dim " + std::to_string(max_dim));
    return table;
  }
  if (args.calibration.empty())
    std::cerr << "warning: no calibration cache given; building reference statistics in memory "
                 "(n="
              << n << ", k=" << k << ", max-dim=" << max_dim << ")\n";
  idim::CalibrationTable table =
      idim::build_calibration(max_dim, n, k, args.n_reps, args.seed, parse_family(args.family));
  if (!args.calibration.empty()) {
    idim::save_calibration(table, args.calibration);
    std::cerr << "calibration cache written to " << args.calibration << "\n";
  }
  return table;
}

int run_estimate(const EstimateArgs& args_in) {
  EstimateArgs args = args_in;
  const bool real_preset = args.preset == "real";
  if (args.k == 0) args.k = real_preset ? 5 : 10;
  if (args.k1 == 0) args.k1 = real_preset ? 3 : 6;
  if (args.k2 == 0) args.k2 = real_preset ? 8 : 20;

  idim::LoadReport load_report;
  idim::DataMatrix data = idim::load_table(args.input, {}, &load_report);
  if (args.delay > 0) {
    if (data.ambient_dim() != 1)
      throw idim::ParameterError("--delay expects a single-column input series");
    std::vector<double> series = data.values();
    data = idim::delay_embed(series, args.delay);
  }
  const std::size_t max_dim = args.max_dim ? args.max_dim : data.ambient_dim();

  if (args.verbose) {
    std::cout << "config: method=" << args.method << " input=" << args.input
              << " n=" << data.n_points() << " D=" << data.ambient_dim() << " k=" << args.k
              << " k1=" << args.k1 << " k2=" << args.k2 << " max-dim=" << max_dim
              << " seed=" << args.seed << " n-reps=" << args.n_reps << " family=" << args.family
              << " delay=" << args.delay << " preset=" << args.preset << "\n";
    if (load_report.header_skipped) std::cout << "input: header row skipped\n";
    if (load_report.skipped_lines)
      std::cout << "input: " << load_report.skipped_lines << " blank/comment lines skipped\n";
  }

  idim::EstimateResult result;
  if (args.method == "danco") {
    const idim::CalibrationTable table = obtain_calibration(args, data.n_points(), args.k, max_dim);
    result = idim::estimate_danco(data, args.k, max_dim, table);
  } else if (args.method == "mind_ml") {
    result = idim::estimate_mind_ml(data, args.k, max_dim);
  } else if (args.method == "mle") {
    result = idim::estimate_mle(data, args.k1, args.k2);
  } else if (args.method == "cd") {
    result = idim::estimate_correlation_dim(data);
  } else {
    throw idim::ParameterError("unknown method '" + args.method + "'");
  }

  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  if (args.verbose) {
    if (!result.notes.empty()) std::cout << "notes: " << result.notes << "\n";
    if (!result.kl_profile.empty()) {
      std::cout << "kl profile (d kl_norm kl_vm total):\n";
      for (const auto& p : result.kl_profile)
        std::printf("  %3zu %12.6f %12.6f %12.6f\n", p.d, p.kl_norm, p.kl_vm, p.total);
    }
  }
  if (result.method == "danco" || result.method == "mind_ml")
    std::printf("%s: d = %.0f\n", result.method.c_str(), result.d_hat);
  else
    std::printf("%s: d = %.2f\n", result.method.c_str(), result.d_hat);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"intrinsic dimension estimation via KL matching of neighbor statistics"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = all hardware threads)");

  EstimateArgs est;
  auto* cmd_est = app.add_subcommand("estimate", "estimate the intrinsic dimension of a data table");
  cmd_est->add_option("--input", est.input, "delimited numeric table, one point per row")->required();
  cmd_est->add_option("--method", est.method, "danco | mind_ml | mle | cd (default danco)");
  cmd_est->add_option("--k", est.k, "neighborhood size (default 10; 5 with --preset real)");
  cmd_est->add_option("--k1", est.k1, "mle: first neighborhood size (default 6; 3 real)");
  cmd_est->add_option("--k2", est.k2, "mle: last neighborhood size (default 20; 8 real)");
  cmd_est->add_option("--max-dim", est.max_dim, "candidate ceiling (default: ambient dimension)");
  cmd_est->add_option("--seed", est.seed, "seed for in-memory calibration (default 0)");
  cmd_est->add_option("--calibration", est.calibration,
                      "calibration cache path (loaded if present, else built and saved)");
  cmd_est->add_option("--n-reps", est.n_reps, "calibration repetitions (default 1)");
  cmd_est->add_option("--family", est.family, "calibration family: sphere_surface | ball");
  cmd_est->add_option("--delay", est.delay, "method-of-delays window for a 1-column series");
  cmd_est->add_option("--preset", est.preset, "synthetic | real (Table-2 style defaults)");
  cmd_est->add_flag("--verbose", est.verbose, "print effective config and the KL profile");

  struct {
    std::size_t max_dim = 30, n = 2500, k = 10, n_reps = 1;
    std::uint64_t seed = 0;
    std::string family = "sphere_surface", out;
  } cal;
  auto* cmd_cal = app.add_subcommand("calibrate", "precompute reference statistics");
  cmd_cal->add_option("--max-dim", cal.max_dim, "largest candidate dimension (default 30)");
  cmd_cal->add_option("--n", cal.n, "points per reference sample (default 2500)");
  cmd_cal->add_option("--k", cal.k, "neighborhood size (default 10)");
  cmd_cal->add_option("--n-reps", cal.n_reps, "repetitions to average (default 1)");
  cmd_cal->add_option("--seed", cal.seed, "seed (default 0)");
  cmd_cal->add_option("--family", cal.family, "sphere_surface | ball");
  cmd_cal->add_option("--out", cal.out, "output cache path")->required();

  struct {
    std::string dataset, out;
    std::size_t d = 0, ambient = 0, n = 2500;
    std::uint64_t seed = 0;
  } gen;
  auto* cmd_gen = app.add_subcommand("generate", "write a synthetic manifold sample");
  cmd_gen->add_option("--dataset", gen.dataset,
                      "hypercube|ball|sphere_surface|affine|gaussian|swiss_roll|helix|m13|m14")
      ->required();
  cmd_gen->add_option("--d", gen.d, "intrinsic dimension parameter");
  cmd_gen->add_option("--ambient", gen.ambient, "ambient dimension (affine only)");
  cmd_gen->add_option("--n", gen.n, "points (default 2500)");
  cmd_gen->add_option("--seed", gen.seed, "seed (default 0)");
  cmd_gen->add_option("--out", gen.out, "output table path")->required();

  struct {
    std::string plan = "small", format = "plain", out;
    std::size_t instances = 0;
    std::uint64_t seed = 0;
    bool full_scale = false;
  } ben;
  auto* cmd_ben = app.add_subcommand("bench", "run the synthetic benchmark");
  cmd_ben->add_option("--plan", ben.plan, "small | full (default small)");
  cmd_ben->add_option("--instances", ben.instances, "instances per dataset (default 3 small, 5 full)");
  cmd_ben->add_option("--seed", ben.seed, "seed (default 0)");
  cmd_ben->add_option("--format", ben.format, "plain | delimited");
  cmd_ben->add_option("--out", ben.out, "write the report here instead of stdout");
  cmd_ben->add_flag("--full-scale", ben.full_scale, "20 instances per dataset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    idim::set_max_threads(threads);
    if (cmd_est->parsed()) return run_estimate(est);
    if (cmd_cal->parsed()) {
      const auto table = idim::build_calibration(cal.max_dim, cal.n, cal.k, cal.n_reps, cal.seed,
                                                 parse_family(cal.family));
      idim::save_calibration(table, cal.out);
      std::cout << "calibration " << table.id() << " written to " << cal.out << "\n";
      return kExitOk;
    }
    if (cmd_gen->parsed()) {
      idim::ManifoldSpec spec;
      spec.name = gen.dataset;
      spec.d = gen.d;
      spec.ambient = gen.ambient;
      spec.n_points = gen.n;
      spec.seed = gen.seed;
      const idim::DataMatrix data = idim::generate(spec);
      idim::save_table(data, gen.out);
      std::cout << gen.dataset << " (seed " << gen.seed << "): " << data.n_points() << " x "
                << data.ambient_dim() << " written to " << gen.out << "\n";
      return kExitOk;
    }
    if (cmd_ben->parsed()) {
      idim::BenchPlan plan = ben.plan == "full" ? idim::full_synthetic_plan(5, ben.seed)
                                                : idim::small_synthetic_plan(3, ben.seed);
      if (ben.plan != "full" && ben.plan != "small")
        throw idim::ParameterError("unknown plan '" + ben.plan + "'");
      if (ben.instances) plan.instances = ben.instances;
      if (ben.full_scale) plan.instances = 20;
      const idim::BenchReport report = idim::run_bench(plan);
      const std::string text = idim::render_report(
          report, ben.format == "delimited" ? idim::ReportFormat::delimited
                                            : idim::ReportFormat::plain_table);
      if (ben.out.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(ben.out);
        if (!out) throw idim::IoError("cannot open '" + ben.out + "' for writing");
        out << text;
      }
      return kExitOk;
    }
  } catch (const idim::ParameterError& e) {
    std::cerr << "error: parameter: " << e.what() << "\n";
    return kExitUsage;
  } catch (const idim::IoError& e) {
    std::cerr << "error: input: " << e.what() << "\n";
    return kExitInput;
  } catch (const idim::DegenerateGeometryError& e) {
    std::cerr << "error: numeric: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const idim::DataError& e) {
    std::cerr << "error: input: " << e.what() << "\n";
    return kExitInput;
  } catch (const idim::NumericError& e) {
    std::cerr << "error: numeric: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
