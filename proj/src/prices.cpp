#include "infoval/prices.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "infoval/errors.hpp"

namespace infoval {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\"");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool valid_iso_date(const std::string& s) {
  int y = 0;
  unsigned m = 0, d = 0;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  auto parse = [&](std::size_t pos, std::size_t len, auto& out) {
    auto res = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return res.ec == std::errc() && res.ptr == s.data() + pos + len;
  };
  if (!parse(0, 4, y) || !parse(5, 2, m) || !parse(8, 2, d)) return false;
  return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                     std::chrono::day{d}}
      .ok();
}

bool is_missing(const std::string& s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return lower.empty() || lower == "na" || lower == "nan" || lower == "null" || lower == "n/a";
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

std::string describe_lines(const std::vector<std::size_t>& lines) {
  std::string out;
  const std::size_t shown = std::min<std::size_t>(lines.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) out += ", ";
    out += std::to_string(lines[i]);
  }
  if (lines.size() > shown) out += ", ...";
  return out;
}

}  // namespace

PriceTable load_prices_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open price file " + path.string());

  PriceTable table;
  table.source = path.string();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  const auto header = split_row(line);
  if (header.size() < 2 || header.size() > 3) {
    throw DataError(path.string() + ": header must be date,price[,price2]");
  }
  const std::size_t assets = header.size() - 1;
  table.names.assign(header.begin() + 1, header.end());
  table.columns.assign(assets, {});

  struct Row {
    std::string date;
    std::vector<double> prices;
  };
  std::vector<Row> rows;
  std::vector<std::size_t> bad_lines;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_row(line);
    if (fields.size() != header.size() || !valid_iso_date(fields[0])) {
      bad_lines.push_back(line_no);
      continue;
    }
    Row row{fields[0], {}};
    bool missing = false, malformed = false;
    for (std::size_t j = 1; j < fields.size(); ++j) {
      double v = 0.0;
      if (is_missing(fields[j])) {
        missing = true;
      } else if (!parse_double(fields[j], v)) {
        malformed = true;
      } else if (!std::isfinite(v)) {
        missing = true;
      }
      row.prices.push_back(v);
    }
    if (malformed) {
      bad_lines.push_back(line_no);
    } else if (missing) {
      ++table.skipped_rows;
      table.skipped_lines.push_back(line_no);
    } else {
      rows.push_back(std::move(row));
    }
  }
  if (!bad_lines.empty()) {
    throw DataError(path.string() + ": unparseable rows at lines " + describe_lines(bad_lines));
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].date == rows[i - 1].date) {
      throw DataError(path.string() + ": duplicate date " + rows[i].date);
    }
  }
  for (auto& r : rows) {
    table.dates.push_back(std::move(r.date));
    for (std::size_t j = 0; j < assets; ++j) table.columns[j].push_back(r.prices[j]);
  }
  return table;
}

PriceTable align_prices(const PriceTable& a, const PriceTable& b) {
  std::map<std::string, std::size_t> index_b;
  for (std::size_t i = 0; i < b.size(); ++i) index_b.emplace(b.dates[i], i);

  PriceTable out;
  out.source = a.source + "+" + b.source;
  out.names = a.names;
  out.names.insert(out.names.end(), b.names.begin(), b.names.end());
  out.columns.assign(a.assets() + b.assets(), {});
  out.skipped_rows = a.skipped_rows + b.skipped_rows;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto it = index_b.find(a.dates[i]);
    if (it == index_b.end()) continue;
    out.dates.push_back(a.dates[i]);
    for (std::size_t j = 0; j < a.assets(); ++j) out.columns[j].push_back(a.columns[j][i]);
    for (std::size_t j = 0; j < b.assets(); ++j) {
      out.columns[a.assets() + j].push_back(b.columns[j][it->second]);
    }
  }
  if (out.dates.empty()) {
    throw DataError("no common dates between " + a.source + " and " + b.source);
  }
  return out;
}

std::vector<double> to_log_returns(std::span<const double> prices) {
  if (prices.size() < 2) throw std::invalid_argument("need at least two prices for returns");
  std::vector<double> out(prices.size() - 1);
  for (std::size_t i = 0; i < prices.size(); ++i) {
    if (!(prices[i] > 0.0)) throw std::invalid_argument("log-returns need positive prices");
  }
  for (std::size_t i = 1; i < prices.size(); ++i) {
    out[i - 1] = std::log(prices[i]) - std::log(prices[i - 1]);
  }
  return out;
}

std::vector<double> to_relative_returns(std::span<const double> prices) {
  if (prices.size() < 2) throw std::invalid_argument("need at least two prices for returns");
  std::vector<double> out(prices.size() - 1);
  for (std::size_t i = 0; i < prices.size(); ++i) {
    if (!(prices[i] > 0.0)) throw std::invalid_argument("relative returns need positive prices");
  }
  for (std::size_t i = 1; i < prices.size(); ++i) {
    out[i - 1] = (prices[i] - prices[i - 1]) / prices[i - 1];
  }
  return out;
}

namespace {

template <class Fn>
ReturnSeries convert(const PriceTable& prices, Fn fn) {
  ReturnSeries out;
  if (prices.size() < 2) throw DataError(prices.source + ": need at least two price rows");
  out.dates.assign(prices.dates.begin() + 1, prices.dates.end());
  for (const auto& col : prices.columns) {
    try {
      out.columns.push_back(fn(col));
    } catch (const std::invalid_argument& e) {
      throw DataError(prices.source + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

ReturnSeries to_log_returns(const PriceTable& prices) {
  return convert(prices, [](const std::vector<double>& c) { return to_log_returns(c); });
}

ReturnSeries to_relative_returns(const PriceTable& prices) {
  return convert(prices, [](const std::vector<double>& c) { return to_relative_returns(c); });
}

ReturnMatrix as_matrix(const ReturnSeries& returns) {
  if (returns.columns.size() != 2) throw std::invalid_argument("expected two return columns");
  ReturnMatrix m(static_cast<Eigen::Index>(returns.size()), 2);
  for (std::size_t i = 0; i < returns.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = returns.columns[0][i];
    m(static_cast<Eigen::Index>(i), 1) = returns.columns[1][i];
  }
  return m;
}

void write_prices_csv(const std::filesystem::path& path, const PriceTable& table) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "date";
  for (const auto& n : table.names) out << ',' << n;
  out << '\n';
  char buf[64];
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.dates[i];
    for (const auto& col : table.columns) {
      std::snprintf(buf, sizeof buf, "%.17g", col[i]);
      out << ',' << buf;
    }
    out << '\n';
  }
}

std::vector<std::string> synthetic_dates(std::size_t count) {
  using namespace std::chrono;
  std::vector<std::string> out;
  out.reserve(count);
  sys_days day = year{2000} / January / 3;
  char buf[16];
  for (std::size_t i = 0; i < count; ++i, day += days{1}) {
    const year_month_day ymd{day};
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    out.emplace_back(buf);
  }
  return out;
}

std::vector<double> prices_from_log_returns(std::span<const double> log_returns, double s0) {
  std::vector<double> out(log_returns.size() + 1);
  out[0] = s0;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < log_returns.size(); ++i) {
    cumulative += log_returns[i];
    out[i + 1] = s0 * std::exp(cumulative);
  }
  return out;
}

}  // namespace infoval
