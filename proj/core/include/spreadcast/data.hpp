#pragma once

#include "spreadcast/linalg.hpp"

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spreadcast::data {

/// Calendar month. Ordered, and steps by whole months.
class YearMonth {
 public:
  constexpr YearMonth() = default;
  YearMonth(int year, int month);

  /// Accepts YYYY-MM or YYYY-MM-DD. Returns nullopt on anything else.
  static std::optional<YearMonth> parse(std::string_view text);

  int year() const noexcept { return year_; }
  int month() const noexcept { return month_; }

  /// Months since year 0, used for gap arithmetic.
  long serial() const noexcept { return static_cast<long>(year_) * 12 + (month_ - 1); }
  static YearMonth from_serial(long serial);

  YearMonth plus_months(long months) const { return from_serial(serial() + months); }
  YearMonth next() const { return plus_months(1); }

  std::string to_string() const;  // YYYY-MM

  friend constexpr auto operator<=>(const YearMonth&, const YearMonth&) = default;

 private:
  int year_ = 1970;
  int month_ = 1;
};

/// Missing cells are quiet NaN. Ingestion rejects "nan" text, so a NaN in
/// a table always means "missing".
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) noexcept { return v != v; }

/// Monthly table of named series. Dates are strictly increasing and
/// contiguous (one row per calendar month), every column has one cell per
/// date, and column names are unique.
class SeriesTable {
 public:
  SeriesTable() = default;
  SeriesTable(std::vector<YearMonth> dates, std::vector<std::string> names,
              std::vector<std::vector<double>> columns);

  std::size_t rows() const noexcept { return dates_.size(); }
  std::size_t cols() const noexcept { return names_.size(); }

  const std::vector<YearMonth>& dates() const noexcept { return dates_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<double>& column(std::size_t j) const { return columns_.at(j); }
  const std::vector<std::vector<double>>& columns() const noexcept { return columns_; }

  std::optional<std::size_t> find(std::string_view name) const;
  const std::vector<double>& column(std::string_view name) const;

  std::size_t missing_count() const;

  friend bool operator==(const SeriesTable& a, const SeriesTable& b);

 private:
  std::vector<YearMonth> dates_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
};

/// Feature matrix plus target, free of missing values, ordered by date.
class Dataset {
 public:
  Dataset(std::vector<YearMonth> dates, Matrix features, std::vector<std::string> feature_names,
          Vector target, std::string target_name = "target");

  Index rows() const noexcept { return features_.rows(); }
  Index cols() const noexcept { return features_.cols(); }

  const std::vector<YearMonth>& dates() const noexcept { return dates_; }
  const Matrix& features() const noexcept { return features_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const Vector& target() const noexcept { return target_; }
  const std::string& target_name() const noexcept { return target_name_; }

  /// Rows [begin, end).
  Dataset slice(Index begin, Index end) const;

  /// Keeps the named feature columns in the given order.
  Dataset select(const std::vector<std::string>& names) const;

  std::optional<Index> find_feature(std::string_view name) const;

  /// Converts back to a table with the target as the last column.
  SeriesTable to_table() const;

  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  std::vector<YearMonth> dates_;
  Matrix features_;
  std::vector<std::string> feature_names_;
  Vector target_;
  std::string target_name_;
};

/// Chronological train/test boundary: floor(train_fraction * n), clamped to
/// [1, n-1].
class SplitSpec {
 public:
  explicit SplitSpec(double train_fraction = 0.7);

  double train_fraction() const noexcept { return train_fraction_; }
  Index boundary(Index n) const;

 private:
  double train_fraction_;
};

// Ingestion ---------------------------------------------------------------

/// Reads a comma-delimited file with a header row. Rows are collapsed to one
/// per month (the latest dated non-missing observation of each column wins)
/// and month gaps are filled with missing rows.
SeriesTable ingest_csv(const std::filesystem::path& path, std::string_view date_column);
SeriesTable ingest_csv(std::istream& in, std::string_view date_column,
                       std::string_view source_name = "<stream>");

/// Writes date (YYYY-MM) plus every column; missing cells as NA. Values use
/// the shortest representation that parses back to the same double.
void write_csv(const SeriesTable& table, std::ostream& out, std::string_view date_column = "date");
void write_csv(const SeriesTable& table, const std::filesystem::path& path,
               std::string_view date_column = "date");

// Transformations ---------------------------------------------------------

/// Outer join on month. Column order follows the input order.
SeriesTable merge(const std::vector<SeriesTable>& tables);

/// Appends d_<name> = first difference for every column not in `exclude`.
SeriesTable add_differences(const SeriesTable& table, const std::vector<std::string>& exclude = {});

/// Forward-fills gaps, then drops the leading rows that are still missing.
SeriesTable fill_missing(const SeriesTable& table);

/// Rows [begin, end) of a table.
SeriesTable slice(const SeriesTable& table, std::size_t begin, std::size_t end);

Dataset to_dataset(const SeriesTable& table, std::string_view target_column);

std::pair<Dataset, Dataset> chronological_split(const Dataset& ds, const SplitSpec& spec);

}  // namespace spreadcast::data
