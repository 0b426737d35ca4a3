#include "infoval/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "infoval/serialization.hpp"

namespace infoval {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string mean_scores_csv(const std::vector<MeanScoreRow>& rows) {
  std::ostringstream out;
  out << kMeanScoreColumns << '\n';
  for (const auto& r : rows) {
    out << r.h << ',' << fmt(r.alpha) << ',' << r.n << ',' << fmt(r.m_f) << ',' << fmt(r.m_g)
        << ',' << fmt(r.diff) << ',' << fmt(r.rel_diff) << ',' << fmt(r.sigma_hat) << ','
        << fmt(r.t_stat) << ',' << fmt(r.p_value) << '\n';
  }
  return out.str();
}

std::string power_csv(const std::vector<PowerCell>& cells) {
  std::ostringstream out;
  out << kPowerColumns << '\n';
  for (const auto& c : cells) {
    out << c.h << ',' << fmt(c.alpha) << ',' << c.n << ',' << fmt(c.level) << ',' << fmt(c.power)
        << ',' << c.replications << ',' << c.failures << ',' << c.boundary_fits << ','
        << c.total_fits << ',' << (c.flagged ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string backtests_csv(const std::vector<BacktestRow>& rows) {
  std::ostringstream out;
  out << kBacktestColumns << '\n';
  for (const auto& b : rows) {
    const auto& r = b.report;
    out << b.h << ',' << fmt(b.alpha) << ',' << b.method << ',' << r.n << ','
        << fmt(r.empirical_rate) << ',' << fmt(r.coverage_z) << ',' << fmt(r.coverage_p) << ','
        << fmt(r.independence_lr) << ',' << fmt(r.independence_p) << '\n';
  }
  return out.str();
}

std::string mixture_csv(const MixtureReport& report) {
  std::ostringstream out;
  out << kMixtureColumns << '\n';
  auto line = [&](const char* name, const ComparisonStats& c) {
    out << name << ',' << fmt(c.m_f) << ',' << fmt(c.m_g) << ',' << fmt(c.diff) << ','
        << fmt(c.se) << '\n';
  };
  line("quantile", report.quantile_score);
  line("log", report.log_score);
  return out.str();
}

std::vector<std::filesystem::path> write_report(const ExperimentReport& report,
                                                const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const char* name, const std::string& text) {
    const auto path = dir / name;
    write_text(path, text);
    written.push_back(path);
  };
  emit("report.json", to_json(report).dump(2) + "\n");
  if (!report.rows.empty()) emit("mean_scores.csv", mean_scores_csv(report.rows));
  if (!report.power.empty()) emit("power.csv", power_csv(report.power));
  if (!report.backtests.empty()) emit("backtests.csv", backtests_csv(report.backtests));
  if (report.mixture) emit("mixture.csv", mixture_csv(*report.mixture));
  return written;
}

}  // namespace infoval
