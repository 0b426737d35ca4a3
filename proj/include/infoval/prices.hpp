#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "infoval/dcc.hpp"

namespace infoval {

/// Date-indexed price columns, ascending by ISO-8601 date.
struct PriceTable {
  std::vector<std::string> dates;
  std::vector<std::string> names;
  /// columns[j][i] is the price of asset j on dates[i].
  std::vector<std::vector<double>> columns;
  /// Rows dropped for missing or NaN prices, with their 1-based line numbers.
  std::size_t skipped_rows = 0;
  std::vector<std::size_t> skipped_lines;
  std::string source;

  std::size_t size() const noexcept { return dates.size(); }
  std::size_t assets() const noexcept { return columns.size(); }
};

/// Returns indexed by the later date of each pair of consecutive prices.
struct ReturnSeries {
  std::vector<std::string> dates;
  std::vector<std::vector<double>> columns;
  std::string frequency = "daily";

  std::size_t size() const noexcept { return dates.size(); }
};

/// Reads `date,price[,price2]` with a header row. Rows with empty or NaN
/// prices are skipped and counted; malformed rows raise DataError naming
/// their line numbers.
PriceTable load_prices_csv(const std::filesystem::path& path);

/// Inner join on dates. Throws DataError when no dates are shared.
PriceTable align_prices(const PriceTable& a, const PriceTable& b);

/// log S_t - log S_{t-1}; prices must be positive.
std::vector<double> to_log_returns(std::span<const double> prices);
/// (S_t - S_{t-1}) / S_{t-1}.
std::vector<double> to_relative_returns(std::span<const double> prices);

ReturnSeries to_log_returns(const PriceTable& prices);
ReturnSeries to_relative_returns(const PriceTable& prices);

/// Two-column return series as a matrix.
ReturnMatrix as_matrix(const ReturnSeries& returns);

/// Writes `date,<names...>` with full round-trip precision.
void write_prices_csv(const std::filesystem::path& path, const PriceTable& table);

/// Synthetic business-day-free calendar: consecutive days from 2000-01-03.
std::vector<std::string> synthetic_dates(std::size_t count);

/// Prices S_t = s0 * exp(cumulative log return), one more entry than `log_returns`.
std::vector<double> prices_from_log_returns(std::span<const double> log_returns, double s0 = 100.0);

}  // namespace infoval
