#include "qlab/experiments.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace qlab;

namespace {

ExperimentConfig small_config(const std::string& experiment) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  cfg.step = 0.5;
  cfg.samples = 4;
  cfg.optimizer.restarts = 3;
  cfg.optimizer.max_evals = 300;
  return cfg;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream s(text);
  for (std::string line; std::getline(s, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(ParameterGrid, IncludesEndpoints) {
  EXPECT_EQ(parameter_grid(0.5), (std::vector<double>{0.0, 0.5, 1.0}));
  const auto g = parameter_grid(0.3);
  EXPECT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g.back(), 1.0);
  EXPECT_EQ(parameter_grid(0.1).size(), 11u);
  EXPECT_DOUBLE_EQ(parameter_grid(0.25, 5.0).back(), 5.0);
}

TEST(ExperimentConfig, Validation) {
  ExperimentConfig cfg;
  cfg.samples = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.samples = 1;
  cfg.step = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.step = 1.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.step = 1.0;
  cfg.d = 3;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Csv, HeaderFormattingAndEmptyFields) {
  ResultRow a;
  a.family = "werner";
  a.parameter = 0.5;
  a.discord = 1.0 / 3.0;
  ResultRow b;
  b.family = "cc";
  b.parameter = 1.0;
  b.correlation_rank = 2;
  ResultRow c = b;
  c.parameter = 0.25;
  const auto lines = lines_of(to_csv({a, b, c}));
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], kCsvHeader);
  EXPECT_EQ(lines[1], "cc,0.25,,,,,,2,");
  EXPECT_EQ(lines[2], "cc,1,,,,,,2,");
  EXPECT_EQ(lines[3], "werner,0.5,0.333333,,,,,,");
  EXPECT_EQ(to_csv({a}).find('\r'), std::string::npos);
}

TEST(ParallelMap, MatchesSerialOrder) {
  std::vector<std::function<int()>> tasks;
  for (int i = 0; i < 50; ++i) tasks.push_back([i] { return i * i; });
  EXPECT_EQ(parallel_map(tasks, 1), parallel_map(tasks, 4));
  std::vector<std::function<int()>> failing{[] { return 1; },
                                            []() -> int { throw InvariantViolation("boom"); }};
  EXPECT_THROW(parallel_map(failing, 2), InvariantViolation);
}

TEST(Fig2, FamiliesAndColumns) {
  const auto rows = run_fig2(small_config("fig2"));
  ASSERT_EQ(rows.size(), 9u);
  for (const auto& r : rows) {
    ASSERT_TRUE(r.discord && r.potential_discord);
    EXPECT_FALSE(r.eof);
    EXPECT_GE(*r.potential_discord, *r.discord - 1e-6);
    if (r.family == "cc") {
      EXPECT_NEAR(*r.discord, 0.0, 1e-6);
    }
    if (r.family == "isotropic" || r.family == "werner") {
      EXPECT_NEAR(*r.potential_discord, *r.discord, 0.01);
    }
  }
}

TEST(Fig3, ReproducibleAndParallelIndependent) {
  auto cfg = small_config("fig3");
  const auto serial = to_csv(run_fig3(cfg));
  EXPECT_EQ(serial, to_csv(run_fig3(cfg)));
  cfg.jobs = 3;
  EXPECT_EQ(serial, to_csv(run_fig3(cfg)));
  cfg.seed = 1;
  EXPECT_NE(serial, to_csv(run_fig3(cfg)));
}

TEST(Fig3, ScatterRespectsOrderRelation) {
  const auto rows = run_fig3(small_config("fig3"));
  std::size_t random = 0, cc = 0;
  for (const auto& r : rows) {
    EXPECT_GE(*r.potential_discord, *r.discord - 1e-6);
    EXPECT_LE(*r.potential_discord, *r.mutual_information + 1e-6);
    random += r.family == "random";
    cc += r.family == "cc_random";
    if (r.family == "cc_random") {
      EXPECT_NEAR(*r.discord, 0.0, 1e-6);
    }
  }
  EXPECT_EQ(random, 4u);
  EXPECT_EQ(cc, 1u);
}

TEST(Fig4, EndpointsAndEof) {
  const auto rows = run_fig4(small_config("fig4"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(*rows[0].eof, 0.0, 1e-9);
  EXPECT_NEAR(*rows[0].discord, 0.0, 1e-6);
  EXPECT_GT(*rows[1].eof, 0.0);
  EXPECT_NEAR(*rows[2].eof, 1.0, 1e-3);
  EXPECT_NEAR(*rows[2].discord, 1.0, 1e-3);
  EXPECT_NEAR(*rows[2].potential_discord, 1.0, 1e-3);
}

TEST(Fig5, DampingEndpoints) {
  auto cfg = small_config("fig5");
  cfg.step = 0.25;
  const auto rows = run_fig5(cfg);
  ASSERT_EQ(rows.size(), 10u);
  for (const auto& r : rows) {
    if (r.family == "ad_p" && r.parameter == 1.0) {
      EXPECT_NEAR(*r.discord, 0.0, 1e-6);
      EXPECT_NEAR(*r.potential_discord, 0.0, 1e-6);
    }
    if (r.parameter == 0.0) {
      EXPECT_NEAR(*r.discord, 0.0, 1e-6);
    }
  }
}

TEST(Fig6, EntropyAndIsotropicCurve) {
  auto cfg = small_config("fig6");
  cfg.samples = 2;
  const auto rows = run_fig6(cfg);
  for (const auto& r : rows) {
    ASSERT_TRUE(r.entropy);
    if (r.family == "isotropic") {
      EXPECT_FALSE(r.global_unitary_discord);
      if (r.parameter == 0.0) {
        EXPECT_NEAR(*r.entropy, 2.0, 1e-9);
        EXPECT_NEAR(*r.discord, 0.0, 1e-9);
      }
    } else {
      ASSERT_TRUE(r.global_unitary_discord);
      EXPECT_GE(*r.global_unitary_discord, *r.discord - 1e-6);
    }
    if (r.family == "pseudo_pure" && r.parameter == 0.0) {
      EXPECT_NEAR(*r.global_unitary_discord, 0.0, 1e-6);
    }
  }
}

TEST(Outputs, SvgDoesNotChangeCsv) {
  auto cfg = small_config("fig4");
  cfg.out = std::filesystem::temp_directory_path() / "qlab_outputs_test";
  std::filesystem::remove_all(cfg.out);
  const auto rows = run_fig4(cfg);
  const auto plain = read_file(write_outputs(cfg, rows));
  cfg.svg = true;
  const auto with_svg = read_file(write_outputs(cfg, rows));
  EXPECT_EQ(plain, with_svg);
  const auto svg_text = read_file(cfg.out / "fig4.svg");
  EXPECT_EQ(svg_text.rfind("<svg", 0), 0u);
  EXPECT_NE(svg_text.find("polyline"), std::string::npos);
  std::filesystem::remove_all(cfg.out);
}

TEST(Outputs, UnwritableDirectoryIsReported) {
  auto cfg = small_config("fig4");
  cfg.out = "/proc/qlab-cannot-write-here";
  EXPECT_THROW(write_outputs(cfg, {}), std::invalid_argument);
}

TEST(Inspect, ReportsProductState) {
  ExperimentConfig cfg;
  cfg.optimizer.restarts = 2;
  cfg.optimizer.max_evals = 200;
  Rng rng(3);
  const auto prod = product_state(random_density({2}, 2, rng), random_density({2}, 2, rng));
  const auto report = inspect_report(parse_state(format_state(prod)), cfg);
  EXPECT_NE(report.find("product               yes"), std::string::npos) << report;
  EXPECT_NE(report.find("I(A:B)                0\n"), std::string::npos) << report;
  EXPECT_NE(report.find("QD                    0\n"), std::string::npos) << report;
  EXPECT_NE(report.find("correlation rank L    1"), std::string::npos) << report;
}
