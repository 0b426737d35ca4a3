#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "infoval/experiments.hpp"

namespace infoval {

// Fixed CSV layouts.
inline constexpr const char* kMeanScoreColumns =
    "h,alpha,n,m_F,m_G,diff,rel_diff,sigma_hat,t_stat,p_value";
inline constexpr const char* kPowerColumns =
    "h,alpha,n,level,power,replications,failures,boundary_fits,total_fits,flagged";
inline constexpr const char* kBacktestColumns =
    "h,alpha,method,n,empirical_rate,coverage_z,coverage_p,independence_lr,independence_p";
inline constexpr const char* kMixtureColumns =
    "score,m_F,m_G,diff,se";

std::string mean_scores_csv(const std::vector<MeanScoreRow>& rows);
std::string power_csv(const std::vector<PowerCell>& cells);
std::string backtests_csv(const std::vector<BacktestRow>& rows);
std::string mixture_csv(const MixtureReport& report);

/// Writes report.json plus one CSV per non-empty table into `dir`. Returns the
/// files written.
std::vector<std::filesystem::path> write_report(const ExperimentReport& report,
                                                const std::filesystem::path& dir);

}  // namespace infoval
