#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "idim/calibration.hpp"
#include "idim/datasets.hpp"
#include "idim/estimators.hpp"
#include "idim/errors.hpp"

namespace idim {

inline constexpr const char* kVersion = "0.1.0";

enum class Method { danco, mind_ml, mle, cd };

struct EstimatorConfig {
  Method method = Method::danco;
  std::size_t k = 10;            // danco / mind_ml
  std::size_t k1 = 6, k2 = 20;   // mle
  CdOptions cd;

  std::string label() const {
    switch (method) {
      case Method::danco: return "danco";
      case Method::mind_ml: return "mind_ml";
      case Method::mle: return "mle";
      case Method::cd: return "cd";
    }
    return "?";
  }
};

struct BenchDataset {
  std::string label;
  ManifoldSpec spec;  // seed field is ignored; instance seeds derive from the plan seed
  double d_true = 0.0;
};

struct BenchPlan {
  std::vector<BenchDataset> datasets;
  std::vector<EstimatorConfig> estimators;
  std::size_t instances = 5;
  std::uint64_t seed = 0;
  CalibrationFamily family = CalibrationFamily::sphere_surface;
  std::vector<std::string> excluded;  // benchmark rows not generated, listed in the report
};

struct BenchCell {
  bool ok = false;
  double mean_d_hat = 0.0;
  std::vector<double> per_instance;
  double wall_ms = 0.0;
  std::string error;
};

struct BenchReport {
  std::vector<std::string> dataset_labels;
  std::vector<double> d_true;
  std::vector<std::string> estimator_labels;
  std::vector<std::vector<BenchCell>> cells;  // [dataset][estimator]
  std::vector<double> mpe;                    // per estimator, over its ok cells
  std::size_t instances = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> excluded;
  std::string version = kVersion;
};

inline std::uint64_t bench_instance_seed(std::uint64_t plan_seed, std::size_t dataset_index,
                                         std::size_t instance) {
  return detail::mix64(detail::mix64(plan_seed) ^
                       ((static_cast<std::uint64_t>(dataset_index) << 32) + instance + 1));
}

/// Runs every (dataset, estimator) cell: generates the instances, estimates,
/// averages across instances. Calibration tables are shared per (n, k) pair
/// across datasets and instances; per-cell failures are recorded in the
/// report instead of aborting the run.
inline BenchReport run_bench(const BenchPlan& plan) {
  if (plan.datasets.empty() || plan.estimators.empty())
    throw ParameterError("run_bench: need at least one dataset and one estimator");
  if (plan.instances < 1) throw ParameterError("run_bench: instances must be >= 1");

  BenchReport report;
  report.instances = plan.instances;
  report.seed = plan.seed;
  report.excluded = plan.excluded;
  for (const auto& ds : plan.datasets) {
    report.dataset_labels.push_back(ds.label);
    report.d_true.push_back(ds.d_true);
  }
  for (const auto& est : plan.estimators) report.estimator_labels.push_back(est.label());

  // One calibration table per (n, k), deep enough for every dataset using it.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> depth;
  for (const auto& est : plan.estimators) {
    if (est.method != Method::danco) continue;
    for (const auto& ds : plan.datasets) {
      auto& need = depth[{ds.spec.n_points, est.k}];
      need = std::max(need, ambient_dim_of(ds.spec));
    }
  }
  std::map<std::pair<std::size_t, std::size_t>, CalibrationTable> tables;
  for (const auto& [key, need] : depth)
    tables.emplace(key, build_calibration(need, key.first, key.second, 1, plan.seed, plan.family));

  report.cells.resize(plan.datasets.size());
  for (std::size_t di = 0; di < plan.datasets.size(); ++di) {
    const auto& ds = plan.datasets[di];
    report.cells[di].resize(plan.estimators.size());
    std::vector<DataMatrix> instances;
    instances.reserve(plan.instances);
    for (std::size_t inst = 0; inst < plan.instances; ++inst) {
      ManifoldSpec spec = ds.spec;
      spec.seed = bench_instance_seed(plan.seed, di, inst);
      instances.push_back(generate(spec));
    }
    for (std::size_t ei = 0; ei < plan.estimators.size(); ++ei) {
      const auto& est = plan.estimators[ei];
      BenchCell& cell = report.cells[di][ei];
      const auto start = std::chrono::steady_clock::now();
      try {
        double sum = 0.0;
        for (const auto& data : instances) {
          EstimateResult r;
          switch (est.method) {
            case Method::danco: {
              const auto& table = tables.at({ds.spec.n_points, est.k});
              r = estimate_danco(data, est.k, std::min<std::size_t>(data.ambient_dim(), table.max_dim),
                                 table);
              break;
            }
            case Method::mind_ml:
              r = estimate_mind_ml(data, est.k, data.ambient_dim());
              break;
            case Method::mle:
              r = estimate_mle(data, est.k1, est.k2);
              break;
            case Method::cd:
              r = estimate_correlation_dim(data, est.cd);
              break;
          }
          cell.per_instance.push_back(r.d_hat);
          sum += r.d_hat;
        }
        cell.mean_d_hat = sum / static_cast<double>(plan.instances);
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
      }
      cell.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                         .count();
    }
  }

  report.mpe.resize(plan.estimators.size(), 0.0);
  for (std::size_t ei = 0; ei < plan.estimators.size(); ++ei) {
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t di = 0; di < plan.datasets.size(); ++di)
      if (report.cells[di][ei].ok) pairs.emplace_back(report.d_true[di], report.cells[di][ei].mean_d_hat);
    report.mpe[ei] = pairs.empty() ? 0.0 : mean_percentage_error(pairs);
  }
  return report;
}

enum class ReportFormat { plain_table, delimited };

/// Plain format: labeled table, two decimals, MPE row last, failures shown as
/// "err". Delimited format: '#'-comment header, then numeric rows
/// (d_true followed by one column per estimator); the MPE row carries 0 in
/// the d_true column so the file loads as a pure numeric table.
inline std::string render_report(const BenchReport& report, ReportFormat format) {
  std::ostringstream os;
  if (format == ReportFormat::delimited) {
    os << "# idim bench v" << report.version << " seed=" << report.seed
       << " instances=" << report.instances << "\n";
    os << "# columns: d_true";
    for (const auto& l : report.estimator_labels) os << ' ' << l;
    os << "\n# rows: datasets";
    for (const auto& l : report.dataset_labels) os << ' ' << l;
    os << "; final row MPE (d_true column = 0)\n";
    if (!report.excluded.empty()) {
      os << "# excluded:";
      for (const auto& l : report.excluded) os << ' ' << l;
      os << "\n";
    }
    os << std::fixed << std::setprecision(2);
    for (std::size_t di = 0; di < report.dataset_labels.size(); ++di) {
      os << report.d_true[di];
      for (std::size_t ei = 0; ei < report.estimator_labels.size(); ++ei) {
        const auto& cell = report.cells[di][ei];
        os << ',';
        if (cell.ok)
          os << cell.mean_d_hat;
        else
          os << "nan";
      }
      os << "\n";
    }
    os << 0.0;
    for (double m : report.mpe) os << ',' << m;
    os << "\n";
    return os.str();
  }

  os << "idim bench v" << report.version << "  seed=" << report.seed
     << "  instances=" << report.instances << "\n";
  os << std::fixed << std::setprecision(2);
  os << std::setw(10) << std::left << "dataset" << std::right << std::setw(7) << "d";
  for (const auto& l : report.estimator_labels) os << std::setw(10) << l;
  os << "\n";
  for (std::size_t di = 0; di < report.dataset_labels.size(); ++di) {
    os << std::setw(10) << std::left << report.dataset_labels[di] << std::right << std::setw(7)
       << report.d_true[di];
    for (std::size_t ei = 0; ei < report.estimator_labels.size(); ++ei) {
      const auto& cell = report.cells[di][ei];
      if (cell.ok)
        os << std::setw(10) << cell.mean_d_hat;
      else
        os << std::setw(10) << "err";
    }
    os << "\n";
  }
  os << std::setw(10) << std::left << "MPE" << std::right << std::setw(7) << "";
  for (double m : report.mpe) os << std::setw(10) << m;
  os << "\n";
  if (!report.excluded.empty()) {
    os << "excluded (no generator implemented):";
    for (const auto& l : report.excluded) os << ' ' << l;
    os << "\n";
  }
  return os.str();
}

/// The full synthetic benchmark suite implemented here, with the standard
/// parameters (N=2500, k=10 for the KL estimators, k in [6,20] for the
/// neighbor-range estimator).
inline BenchPlan full_synthetic_plan(std::size_t instances = 5, std::uint64_t seed = 0) {
  BenchPlan plan;
  plan.instances = instances;
  plan.seed = seed;
  const std::size_t n = 2500;
  auto ds = [&](std::string label, std::string name, std::size_t d, std::size_t ambient,
                double d_true) {
    ManifoldSpec spec;
    spec.name = std::move(name);
    spec.d = d;
    spec.ambient = ambient;
    spec.n_points = n;
    plan.datasets.push_back({std::move(label), spec, d_true});
  };
  ds("M1", "sphere_surface", 10, 0, 10);
  ds("M2", "affine", 3, 5, 3);
  ds("M5", "helix", 0, 0, 2);
  ds("M7", "swiss_roll", 0, 0, 2);
  ds("M8", "affine", 20, 20, 20);
  ds("M9a", "hypercube", 10, 0, 10);
  ds("M9b", "hypercube", 17, 0, 17);
  ds("M9c", "hypercube", 24, 0, 24);
  ds("M9d", "hypercube", 70, 0, 70);
  ds("M11", "gaussian", 20, 0, 20);
  ds("M13", "m13", 18, 0, 18);
  ds("M14", "m14", 24, 0, 24);
  plan.excluded = {"M3", "M4", "M6", "M10", "M12"};

  EstimatorConfig danco;
  danco.method = Method::danco;
  danco.k = 10;
  EstimatorConfig mind;
  mind.method = Method::mind_ml;
  mind.k = 10;
  EstimatorConfig mle;
  mle.method = Method::mle;
  mle.k1 = 6;
  mle.k2 = 20;
  EstimatorConfig cd;
  cd.method = Method::cd;
  plan.estimators = {danco, mind, mle, cd};
  return plan;
}

/// Reduced plan for quick runs: the low-dimensional rows plus one
/// high-dimensional representative.
inline BenchPlan small_synthetic_plan(std::size_t instances = 3, std::uint64_t seed = 0) {
  BenchPlan plan = full_synthetic_plan(instances, seed);
  std::vector<std::string> keep = {"M1", "M2", "M7", "M9a", "M13"};
  std::vector<BenchDataset> kept;
  for (auto& ds : plan.datasets)
    for (const auto& label : keep)
      if (ds.label == label) kept.push_back(ds);
  plan.datasets = std::move(kept);
  return plan;
}

}  // namespace idim
