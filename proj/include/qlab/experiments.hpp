#pragma once

// Experiment runners producing the figure data as rows, plus CSV/SVG output
// and the single-state inspection report.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qlab/channels.hpp"
#include "qlab/measures.hpp"
#include "qlab/potential.hpp"
#include "qlab/states.hpp"
#include "qlab/svg.hpp"

namespace qlab {

struct ExperimentConfig {
  std::string experiment = "fig2";
  double step = 0.05;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  std::size_t d = 2;
  OptimizerConfig optimizer;
  std::filesystem::path out = "results";
  bool svg = false;
  std::size_t jobs = 1;
  bool full = false;
  // inspect only
  std::string family;
  std::optional<double> param;
  std::string state_file;

  void validate() const {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("step must lie in (0, 1]");
    if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
    ancilla_for_rank(d);
    optimizer.validate();
  }
};

struct ResultRow {
  std::string family;
  double parameter = 0.0;
  std::optional<double> discord;
  std::optional<double> potential_discord;
  std::optional<double> mutual_information;
  std::optional<double> eof;
  std::optional<double> entropy;
  std::optional<std::size_t> correlation_rank;
  std::optional<double> global_unitary_discord;
};

inline constexpr const char* kCsvHeader =
    "family,parameter,discord,potential_discord,mutual_information,eof,entropy,correlation_rank,"
    "global_unitary_discord";

inline std::string format_g6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

inline std::string to_csv(std::vector<ResultRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return a.family != b.family ? a.family < b.family : a.parameter < b.parameter;
  });
  std::string out = kCsvHeader;
  out += '\n';
  auto field = [&](const std::optional<double>& v) {
    out += ',';
    if (v) out += format_g6(*v);
  };
  for (const auto& r : rows) {
    out += r.family;
    out += ',';
    out += format_g6(r.parameter);
    field(r.discord);
    field(r.potential_discord);
    field(r.mutual_information);
    field(r.eof);
    field(r.entropy);
    out += ',';
    if (r.correlation_rank) out += std::to_string(*r.correlation_rank);
    field(r.global_unitary_discord);
    out += '\n';
  }
  return out;
}

/// {0, step, 2 step, ...} up to hi, with hi itself always included.
inline std::vector<double> parameter_grid(double step, double hi = 1.0) {
  std::vector<double> g;
  const auto n = static_cast<std::size_t>(std::floor(hi / step + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) g.push_back(static_cast<double>(k) * step);
  if (g.back() < hi - 1e-9) g.push_back(hi);
  return g;
}

/// Runs tasks on `jobs` threads; results are stored by index, so the output
/// does not depend on scheduling. The first exception is rethrown.
template <class T>
std::vector<T> parallel_map(const std::vector<std::function<T()>>& tasks, std::size_t jobs) {
  std::vector<std::optional<T>> slots(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        slots[i] = tasks[i]();
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = tasks.size();
      }
    }
  };
  const std::size_t n = std::min(std::max<std::size_t>(jobs, 1), std::max<std::size_t>(tasks.size(), 1));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  std::vector<T> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Independent generator for sample `index` of stream `stream`.
inline Rng sample_rng(std::uint64_t seed, std::uint32_t stream, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), stream,
                    static_cast<std::uint32_t>(index)};
  return Rng(seq);
}

/// Two-qubit state of random rank 1..4 from the Hilbert-Schmidt ensemble.
inline DensityMatrix random_two_qubit_state(Rng& rng) {
  std::uniform_int_distribution<std::size_t> rank(1, 4);
  return random_density({2, 2}, rank(rng), rng);
}

/// Diagonal in a random product basis with uniformly drawn weights.
inline DensityMatrix random_cc_state(Rng& rng) {
  const auto u = kron(random_unitary(2, rng), random_unitary(2, rng));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double w[4];
  double total = 0.0;
  for (double& x : w) total += (x = unit(rng));
  for (double& x : w) x /= total;
  return DensityMatrix(detail::symmetrized(conjugate_by(u, ComplexMatrix::diagonal(w))), {2, 2});
}

namespace detail {

inline ResultRow qd_pd_row(std::string family, double parameter, const DensityMatrix& rho,
                           const ExperimentConfig& cfg) {
  ResultRow r;
  r.family = std::move(family);
  r.parameter = parameter;
  const auto qd = discord(rho);
  r.discord = qd.discord;
  r.mutual_information = qd.mutual_information;
  r.potential_discord = potential_discord(rho, cfg.d, cfg.optimizer).value;
  return r;
}

inline ResultRow global_row(std::string family, double parameter, const DensityMatrix& rho,
                            const ExperimentConfig& cfg) {
  ResultRow r;
  r.family = std::move(family);
  r.parameter = parameter;
  const auto g = max_discord_global_unitary(rho, cfg.optimizer);
  r.entropy = g.entropy;
  r.discord = g.original_discord;
  r.global_unitary_discord = g.potential.value;
  return r;
}

}  // namespace detail

/// Discord and PD for the CC, isotropic and Werner families.
inline std::vector<ResultRow> run_fig2(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::function<ResultRow()>> tasks;
  for (Family f : {Family::cc, Family::isotropic, Family::werner})
    for (double eta : parameter_grid(cfg.step))
      tasks.push_back([f, eta, &cfg] {
        return detail::qd_pd_row(std::string(family_name(f)), eta,
                                 make_family_point(f, eta).state, cfg);
      });
  return parallel_map(tasks, cfg.jobs);
}

/// (QD, PD) scatter for random states and random CC states, with the mixture
/// and isotropic families as envelope curves.
inline std::vector<ResultRow> run_fig3(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::function<ResultRow()>> tasks;
  for (std::size_t i = 0; i < cfg.samples; ++i)
    tasks.push_back([i, &cfg] {
      auto rng = sample_rng(cfg.seed, 3, i);
      return detail::qd_pd_row("random", static_cast<double>(i), random_two_qubit_state(rng), cfg);
    });
  const std::size_t n_cc = std::max<std::size_t>(1, cfg.samples / 10);
  for (std::size_t i = 0; i < n_cc; ++i)
    tasks.push_back([i, &cfg] {
      auto rng = sample_rng(cfg.seed, 30, i);
      return detail::qd_pd_row("cc_random", static_cast<double>(i), random_cc_state(rng), cfg);
    });
  for (Family f : {Family::mixture, Family::isotropic})
    for (double p : parameter_grid(cfg.step))
      tasks.push_back([f, p, &cfg] {
        return detail::qd_pd_row(std::string(family_name(f)), p, make_family_point(f, p).state, cfg);
      });
  return parallel_map(tasks, cfg.jobs);
}

/// EoF, discord and PD along the mixture family.
inline std::vector<ResultRow> run_fig4(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::function<ResultRow()>> tasks;
  for (double g : parameter_grid(cfg.step))
    tasks.push_back([g, &cfg] {
      const auto rho = mixture_family(g);
      auto r = detail::qd_pd_row("mixture", g, rho, cfg);
      r.eof = entanglement_of_formation(rho);
      return r;
    });
  return parallel_map(tasks, cfg.jobs);
}

/// Discord and PD of the amplitude-damped initial state, against the damping
/// probability p ("ad_p") and against Gamma t in [0, 5] ("ad_time").
inline std::vector<ResultRow> run_fig5(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::function<ResultRow()>> tasks;
  const auto rho0 = ad_initial_state();
  auto damped = [rho0](double p) { return apply_on_a(amplitude_damping(p), rho0); };
  for (double p : parameter_grid(cfg.step))
    tasks.push_back([p, damped, &cfg] { return detail::qd_pd_row("ad_p", p, damped(p), cfg); });
  for (double gt : parameter_grid(5.0 * cfg.step, 5.0))
    tasks.push_back([gt, damped, &cfg] {
      return detail::qd_pd_row("ad_time", gt, damped(damping_probability(gt)), cfg);
    });
  return parallel_map(tasks, cfg.jobs);
}

/// Maximal discord under global unitaries against the input entropy for
/// random states and pseudo-pure states, with the isotropic curve.
inline std::vector<ResultRow> run_fig6(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::function<ResultRow()>> tasks;
  for (std::size_t i = 0; i < cfg.samples; ++i)
    tasks.push_back([i, &cfg] {
      auto rng = sample_rng(cfg.seed, 6, i);
      return detail::global_row("random", static_cast<double>(i), random_two_qubit_state(rng), cfg);
    });
  const auto grid = parameter_grid(cfg.step);
  for (std::size_t k = 0; k < grid.size(); ++k)
    tasks.push_back([k, a = grid[k], &cfg] {
      auto rng = sample_rng(cfg.seed, 60, k);
      return detail::global_row("pseudo_pure", a, pseudo_pure(a, random_pure_ket(4, rng)), cfg);
    });
  for (double a : grid)
    tasks.push_back([a] {
      const auto rho = isotropic(a);
      ResultRow r;
      r.family = "isotropic";
      r.parameter = a;
      r.entropy = von_neumann_entropy(rho);
      r.discord = discord(rho).discord;
      return r;
    });
  return parallel_map(tasks, cfg.jobs);
}

inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment == "fig2") return run_fig2(cfg);
  if (cfg.experiment == "fig3") return run_fig3(cfg);
  if (cfg.experiment == "fig4") return run_fig4(cfg);
  if (cfg.experiment == "fig5") return run_fig5(cfg);
  if (cfg.experiment == "fig6") return run_fig6(cfg);
  throw std::invalid_argument("unknown experiment '" + cfg.experiment + "'");
}

// ---------------------------------------------------------------------------
// Plots

inline svg::Plot plot_for(const std::string& experiment, const std::vector<ResultRow>& rows) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  svg::Plot plot;
  std::vector<std::string> families;
  for (const auto& r : rows)
    if (std::find(families.begin(), families.end(), r.family) == families.end())
      families.push_back(r.family);
  std::sort(families.begin(), families.end());

  auto add = [&](const std::string& label, bool line, auto x_of, auto y_of, const std::string& family) {
    svg::Series s;
    s.label = label;
    s.line = line;
    s.color = palette[plot.series.size() % 6];
    for (const auto& r : rows) {
      if (r.family != family) continue;
      const auto x = x_of(r);
      const auto y = y_of(r);
      if (x && y) s.points.emplace_back(*x, *y);
    }
    std::sort(s.points.begin(), s.points.end());
    plot.series.push_back(std::move(s));
  };
  auto param = [](const ResultRow& r) { return std::optional<double>(r.parameter); };
  auto qd = [](const ResultRow& r) { return r.discord; };
  auto pd = [](const ResultRow& r) { return r.potential_discord; };

  if (experiment == "fig3") {
    plot = {"PD against QD", "QD", "PD", {}};
    for (const auto& f : families) add(f, f == "mixture" || f == "isotropic", qd, pd, f);
  } else if (experiment == "fig6") {
    plot = {"Maximal discord under global unitaries", "S", "max QD", {}};
    auto entropy = [](const ResultRow& r) { return r.entropy; };
    for (const auto& f : families) {
      if (f == "isotropic") {
        add(f, true, entropy, qd, f);
      } else {
        add(f, false, entropy, [](const ResultRow& r) { return r.global_unitary_discord; }, f);
      }
    }
  } else {
    plot.title = experiment == "fig4" ? "Mixture family" : experiment == "fig5" ? "Amplitude damping" : "QD and PD";
    plot.x_label = experiment == "fig5" ? "p or Gamma t" : "parameter";
    plot.y_label = "bits";
    for (const auto& f : families) {
      add(f + " QD", true, param, qd, f);
      add(f + " PD", true, param, pd, f);
      if (experiment == "fig4") add(f + " EoF", true, param, [](const ResultRow& r) { return r.eof; }, f);
    }
  }
  return plot;
}

/// Writes <out>/<experiment>.csv (and .svg when requested); returns the CSV path.
inline std::filesystem::path write_outputs(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  const auto csv_path = cfg.out / (cfg.experiment + ".csv");
  {
    std::ofstream f(csv_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write to output directory " + cfg.out.string());
    f << to_csv(rows);
  }
  if (cfg.svg) {
    std::ofstream f(cfg.out / (cfg.experiment + ".svg"), std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write to output directory " + cfg.out.string());
    f << svg::render(plot_for(cfg.experiment, rows));
  }
  return csv_path;
}

// ---------------------------------------------------------------------------
// Inspection

inline std::string inspect_report(const DensityMatrix& rho, const ExperimentConfig& cfg) {
  std::ostringstream os;
  auto line = [&](const std::string& name, const std::string& value) {
    os << name;
    for (std::size_t k = name.size(); k < 22; ++k) os << ' ';
    os << value << '\n';
  };
  const auto g = [](double x) { return format_g6(std::abs(x) < 5e-13 ? 0.0 : x); };
  const auto bip = rho.as_bipartite();
  const bool qubits = bip.dim_a() == 2 && bip.dim_b() == 2;
  const bool qubit_a = bip.dim_a() == 2;

  line("dims", std::to_string(bip.dim_a()) + " x " + std::to_string(bip.dim_b()));
  line("S(AB)", g(von_neumann_entropy(rho)));
  line("S(A)", g(entropy_of(rho.reduced_a())));
  line("S(B)", g(entropy_of(rho.reduced_b())));
  line("I(A:B)", g(mutual_information(rho)));
  if (qubit_a) {
    const auto qd = discord(rho);
    line("QD", g(qd.discord));
    line("  basis theta, phi", g(qd.optimal_basis.theta) + ", " + g(qd.optimal_basis.phi));
    line("classical corr.", g(qd.classical_correlations));
  } else {
    line("QD", "n/a (A is not a qubit)");
  }
  if (qubits) line("EoF", g(entanglement_of_formation(rho)));
  const auto cr = correlation_rank(rho);
  line("correlation rank L", std::to_string(cr.rank) + (cr.witnessed ? " (witnessed)" : " (not witnessed)"));
  if (qubit_a) {
    line("PD(d=" + std::to_string(cfg.d) + ")", g(potential_discord(bip, cfg.d, cfg.optimizer).value));
    if (qubits) line("mPQ (d=4)", g(max_potential_discord(bip, cfg.optimizer).value));
  }
  line("product", is_product(bip) ? "yes" : "no");
  if (qubits) line("classically corr.", is_classically_correlated(bip) ? "yes" : "no");
  return os.str();
}

}  // namespace qlab
