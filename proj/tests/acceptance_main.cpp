// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs the full pipeline at benchmark scale.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "idim/idim.hpp"
#include "oracles.hpp"

using namespace idim;

namespace {

int g_failures = 0;

class Timer {
public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

void report(int id, const std::string& name, bool pass, const std::string& detail, double secs) {
  std::printf("%s criterion %d: %s (%s) [%.1fs]\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double kl_norm_quadrature(double a, double b, std::size_t k) {
  return oracle::integrate_singular(
      [&](double r) { return oracle::kl_norm_integrand(r, k, a, b); }, 0.0, 1.0, 1e-9);
}

double kl_vm_quadrature(const VonMisesParams& p1, const VonMisesParams& p2) {
  return oracle::integrate(
      [&](double t) {
        const double q1 = vm_pdf(t, p1);
        return q1 * (std::log(q1) - std::log(vm_pdf(t, p2)));
      },
      -std::numbers::pi, std::numbers::pi, 1e-9);
}

void criterion_1() {
  Timer timer;
  double worst = 0.0;
  for (std::size_t k : {5u, 10u, 20u}) {
    for (double a : {1.0, 2.0, 5.0, 10.0, 20.0}) {
      for (double b : {1.0, 2.0, 5.0, 10.0, 20.0}) {
        worst = std::max(worst, std::abs(kl_norms(a, b, k) - kl_norm_quadrature(a, b, k)));
      }
    }
  }
  std::ostringstream detail;
  detail << "max |closed - quadrature| = " << worst;
  report(1, "distance KL closed form vs quadrature", worst <= 1e-6, detail.str(), timer.seconds());
}

void criterion_2() {
  Timer timer;
  const double half_pi = std::numbers::pi / 2.0;
  double worst = 0.0;
  for (double nu1 : {0.0, half_pi, -half_pi}) {
    for (double tau1 : {0.0, 1.0, 5.0, 20.0, 100.0}) {
      for (double nu2 : {0.0, half_pi, -half_pi}) {
        for (double tau2 : {0.0, 1.0, 5.0, 20.0, 100.0}) {
          const VonMisesParams p1{nu1, tau1, false}, p2{nu2, tau2, false};
          worst = std::max(worst, std::abs(kl_von_mises(p1, p2) - kl_vm_quadrature(p1, p2)));
        }
      }
    }
  }
  std::ostringstream detail;
  detail << "max |closed - quadrature| = " << worst;
  report(2, "von Mises KL closed form vs quadrature", worst <= 1e-8, detail.str(), timer.seconds());
}

void criterion_3() {
  Timer timer;
  double tau20 = 0.0, tau100 = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    tau20 += concentration_of_dimension(20, 2000, seed);
    tau100 += concentration_of_dimension(100, 2000, seed);
  }
  tau20 /= 10.0;
  tau100 /= 10.0;
  const bool pass = std::abs(tau20 - 20.0) <= 2.0 && std::abs(tau100 - 100.0) <= 5.0;
  std::ostringstream detail;
  detail << "tau(d=20) = " << tau20 << ", tau(d=100) = " << tau100;
  report(3, "concentration tracks the dimension", pass, detail.str(), timer.seconds());
}

struct SpotCase {
  const char* label;
  ManifoldSpec spec;
  std::size_t max_dim;
  double lo, hi;
};

void criterion_4() {
  Timer timer;
  const std::size_t n = 2500, k = 10, instances = 5;
  const CalibrationTable table = build_calibration(80, n, k, 2, 2012);

  std::vector<SpotCase> cases;
  cases.push_back({"M1", {"sphere_surface", 10, 0, n, 0}, 11, 9.5, 10.5});
  cases.push_back({"M9a", {"hypercube", 10, 0, n, 0}, 11, 9.0, 11.0});
  cases.push_back({"M13", {"m13", 18, 0, n, 0}, 72, 17.0, 19.0});
  cases.push_back({"M9d", {"hypercube", 70, 0, n, 0}, 80, 65.0, 75.0});

  bool pass = true;
  std::ostringstream detail;
  for (const auto& c : cases) {
    double sum = 0.0;
    for (std::size_t inst = 0; inst < instances; ++inst) {
      ManifoldSpec spec = c.spec;
      spec.seed = bench_instance_seed(4242, 0, inst);
      sum += estimate_danco(generate(spec), k, c.max_dim, table).d_hat;
    }
    const double mean = sum / instances;
    const bool ok = mean >= c.lo && mean <= c.hi;
    pass = pass && ok;
    detail << c.label << " mean=" << mean << (ok ? " " : "(out) ");
  }
  report(4, "benchmark spot reproduction", pass, detail.str(), timer.seconds());
}

void criterion_5() {
  Timer timer;
  bool pass = true;
  std::size_t runs = 0, correct = 0;
  std::ostringstream detail;
  for (std::size_t n : {200u, 500u, 1000u, 2000u}) {
    for (std::size_t k : {5u, 10u, 20u, 50u}) {
      if (k >= n - 2) continue;
      const CalibrationTable table = build_calibration(5, n, k, 2, 99);
      for (std::uint64_t run = 0; run < 10; ++run) {
        ManifoldSpec spec{"gaussian", 5, 0, n, detail::mix64(7000 + 16 * run) + n * 131 + k};
        const double d_hat = estimate_danco(generate(spec), k, 5, table).d_hat;
        ++runs;
        if (d_hat == 5.0) {
          ++correct;
        } else {
          pass = false;
          detail << "n=" << n << ",k=" << k << ",run=" << run << "->" << d_hat << " ";
        }
      }
    }
  }
  std::ostringstream head;
  head << correct << "/" << runs << " runs returned 5" << (detail.str().empty() ? "" : "; ")
       << detail.str();
  report(5, "robustness over sample size and neighborhood size", pass, head.str(), timer.seconds());
}

BenchReport criterion_6(bool& pass6, std::string& detail6) {
  const BenchPlan plan = full_synthetic_plan(5, 77);
  BenchReport rep = run_bench(plan);
  double mpe_danco = 0.0, mpe_mind = 0.0, mpe_mle = 0.0;
  for (std::size_t ei = 0; ei < rep.estimator_labels.size(); ++ei) {
    if (rep.estimator_labels[ei] == "danco") mpe_danco = rep.mpe[ei];
    if (rep.estimator_labels[ei] == "mind_ml") mpe_mind = rep.mpe[ei];
    if (rep.estimator_labels[ei] == "mle") mpe_mle = rep.mpe[ei];
  }
  pass6 = mpe_danco <= 5.0 && mpe_danco < mpe_mind && mpe_danco < mpe_mle;
  std::ostringstream detail;
  detail << "MPE danco=" << mpe_danco << "% mind_ml=" << mpe_mind << "% mle=" << mpe_mle << "%";
  detail6 = detail.str();
  return rep;
}

void criterion_7(const BenchReport& rep) {
  Timer timer;
  double mle_m9a = 0.0, cd_m9a = 0.0;
  for (std::size_t di = 0; di < rep.dataset_labels.size(); ++di) {
    if (rep.dataset_labels[di] != "M9a") continue;
    for (std::size_t ei = 0; ei < rep.estimator_labels.size(); ++ei) {
      if (rep.estimator_labels[ei] == "mle" && rep.cells[di][ei].ok)
        mle_m9a = rep.cells[di][ei].mean_d_hat;
      if (rep.estimator_labels[ei] == "cd" && rep.cells[di][ei].ok)
        cd_m9a = rep.cells[di][ei].mean_d_hat;
    }
  }
  const bool pass = mle_m9a >= 7.5 && mle_m9a <= 9.0 && cd_m9a >= 7.0 && cd_m9a <= 9.0;
  std::ostringstream detail;
  detail << "M9a: mle=" << mle_m9a << " cd=" << cd_m9a << " (documented underestimation)";
  report(7, "baseline sanity", pass, detail.str(), timer.seconds());
}

bool knn_equivalence() {
  for (std::uint64_t seed : {4u, 5u}) {
    for (std::size_t n : {50u, 256u, 500u}) {
      for (std::size_t dim : {2u, 9u, 15u}) {
        Rng rng(seed * 71 + n + dim);
        std::vector<double> v(n * dim);
        for (auto& x : v) x = rng.normal();
        DataMatrix data(std::move(v), n, dim);
        const auto a = build_index(data, 8, KnnAlgorithm::kd_tree);
        const auto b = build_index(data, 8, KnnAlgorithm::brute_force);
        if (a.ids != b.ids || a.dist != b.dist) return false;
      }
    }
  }
  return true;
}

bool statistic_invariance() {
  Rng rng(31);
  const auto data = sample_unit_ball(4, 400, rng);
  const auto index = build_index(data, 8);
  const auto rho = rho_statistics(index);
  const auto rotation = oracle::random_rotation(4, rng);
  std::vector<double> offset(4, -7.5);
  const auto moved = oracle::transform(data, rotation, 42.0, offset);
  const auto index2 = build_index(moved, 8);
  const auto rho2 = rho_statistics(index2);
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (std::abs(rho[i] - rho2[i]) > 1e-9) return false;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto a = pairwise_angles(data, index, i);
    const auto b = pairwise_angles(moved, index2, i);
    for (std::size_t j = 0; j < a.angles.size(); ++j)
      if (std::abs(a.angles[j] - b.angles[j]) > 1e-7) return false;
  }
  return true;
}

bool vm_equivariance() {
  Rng rng(8);
  std::vector<double> base(300);
  for (auto& a : base) a = oracle::vm_sample(rng, 1.0, 6.0);
  const auto fit0 = fit_vm(base);
  for (double phi : {0.4, -2.0}) {
    std::vector<double> shifted(base.size());
    for (std::size_t i = 0; i < base.size(); ++i)
      shifted[i] = std::remainder(base[i] + phi, 2.0 * std::numbers::pi);
    const auto fit = fit_vm(shifted);
    if (std::abs(std::remainder(fit.nu - fit0.nu - phi, 2.0 * std::numbers::pi)) > 1e-12)
      return false;
    if (std::abs(fit.tau - fit0.tau) > 1e-12) return false;
  }
  return true;
}

bool pdf_normalizations() {
  for (std::size_t k : {1u, 10u, 20u}) {
    for (double d : {1.0, 7.0, 30.0}) {
      const double mass = oracle::integrate([&](double r) { return norm_pdf(r, k, d); }, 0.0, 1.0);
      if (std::abs(mass - 1.0) > 1e-10) return false;
    }
  }
  for (double tau : {0.0, 10.0, 100.0}) {
    const double mass = oracle::integrate(
        [&](double t) {
          return vm_pdf(t, {0.3, tau, false});
        },
        -std::numbers::pi, std::numbers::pi);
    if (std::abs(mass - 1.0) > 1e-10) return false;
  }
  return true;
}

bool calibration_determinism() {
  const auto a = build_calibration(6, 300, 8, 1, 555);
  const auto b = build_calibration(6, 300, 8, 1, 555);
  for (std::size_t d = 1; d <= 6; ++d) {
    if (a.entry(d).d_check_ml != b.entry(d).d_check_ml) return false;
    if (a.entry(d).mu_nu != b.entry(d).mu_nu) return false;
    if (a.entry(d).mu_tau != b.entry(d).mu_tau) return false;
  }
  return true;
}

bool cache_round_trip() {
  const auto table = build_calibration(5, 220, 6, 1, 9001);
  const std::string path = "/tmp/idim_acceptance_cache.txt";
  save_calibration(table, path);
  const auto loaded = load_calibration(path);
  std::remove(path.c_str());
  if (loaded.entries.size() != table.entries.size()) return false;
  for (std::size_t d = 1; d <= 5; ++d) {
    if (loaded.entry(d).d_check_ml != table.entry(d).d_check_ml) return false;
    if (loaded.entry(d).mu_nu != table.entry(d).mu_nu) return false;
    if (loaded.entry(d).mu_tau != table.entry(d).mu_tau) return false;
  }
  return loaded.seed == table.seed && loaded.family == table.family;
}

bool delay_embedding_counts() {
  std::vector<double> series(50000);
  for (std::size_t i = 0; i < series.size(); ++i) series[i] = std::sin(0.02 * i);
  if (delay_embed(series, 50).n_points() != 1000) return false;
  series.resize(5000);
  return delay_embed(series, 20).n_points() == 250;
}

void criterion_8() {
  Timer timer;
  struct Item {
    const char* name;
    bool ok;
  };
  const Item items[] = {
      {"knn-brute-equivalence", knn_equivalence()},
      {"rho/angle-invariance", statistic_invariance()},
      {"vm-equivariance", vm_equivariance()},
      {"pdf-normalization", pdf_normalizations()},
      {"calibration-determinism", calibration_determinism()},
      {"cache-round-trip", cache_round_trip()},
      {"delay-embedding-counts", delay_embedding_counts()},
  };
  bool pass = true;
  std::ostringstream detail;
  for (const auto& item : items) {
    pass = pass && item.ok;
    detail << item.name << (item.ok ? "=ok " : "=FAIL ");
  }
  report(8, "property suites", pass, detail.str(), timer.seconds());
}

}  // namespace

int main() {
  const Timer total;
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_8();
  criterion_5();
  criterion_4();
  {
    Timer timer;
    bool pass6 = false;
    std::string detail6;
    const BenchReport rep = criterion_6(pass6, detail6);
    report(6, "synthetic-suite MPE and estimator ordering", pass6, detail6, timer.seconds());
    criterion_7(rep);
    std::printf("\nbenchmark table (5 instances, seed 77):\n%s",
                render_report(rep, ReportFormat::plain_table).c_str());
  }
  std::printf("\n%s: %d criterion(s) failed [total %.1fs]\n", g_failures == 0 ? "ALL PASS" : "RESULT",
              g_failures, total.seconds());
  return g_failures;
}
