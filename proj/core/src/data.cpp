#include "spreadcast/data.hpp"

#include "spreadcast/csv.hpp"
#include "spreadcast/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace spreadcast::data {
namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

struct ParsedDate {
  YearMonth month;
  int day = 0;
};

std::optional<ParsedDate> parse_date(std::string_view text) {
  if (text.size() != 7 && text.size() != 10) return std::nullopt;
  if (text[4] != '-') return std::nullopt;
  int year = 0;
  int month = 0;
  if (!parse_int(text.substr(0, 4), year) || !parse_int(text.substr(5, 2), month)) return std::nullopt;
  if (month < 1 || month > 12) return std::nullopt;
  int day = 0;
  if (text.size() == 10) {
    if (text[7] != '-' || !parse_int(text.substr(8, 2), day) || day < 1 || day > 31) return std::nullopt;
  }
  return ParsedDate{YearMonth(year, month), day};
}

void check_unique(const std::vector<std::string>& names, std::string_view context) {
  std::set<std::string_view> seen;
  for (const auto& n : names) {
    require(seen.insert(n).second, ErrorKind::InvalidArgument,
            "duplicate column name '" + n + "' in " + std::string(context));
  }
}

std::vector<YearMonth> month_range(YearMonth first, YearMonth last) {
  std::vector<YearMonth> out;
  for (long s = first.serial(); s <= last.serial(); ++s) out.push_back(YearMonth::from_serial(s));
  return out;
}

}  // namespace

// YearMonth ---------------------------------------------------------------

YearMonth::YearMonth(int year, int month) : year_(year), month_(month) {
  require(month >= 1 && month <= 12, ErrorKind::InvalidArgument,
          "month out of range: " + std::to_string(month));
}

std::optional<YearMonth> YearMonth::parse(std::string_view text) {
  const auto d = parse_date(text);
  if (!d) return std::nullopt;
  return d->month;
}

YearMonth YearMonth::from_serial(long serial) {
  long year = serial / 12;
  long month = serial % 12;
  if (month < 0) {
    month += 12;
    --year;
  }
  return YearMonth(static_cast<int>(year), static_cast<int>(month) + 1);
}

std::string YearMonth::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year_, month_);
  return buf;
}

// SeriesTable -------------------------------------------------------------

SeriesTable::SeriesTable(std::vector<YearMonth> dates, std::vector<std::string> names,
                         std::vector<std::vector<double>> columns)
    : dates_(std::move(dates)), names_(std::move(names)), columns_(std::move(columns)) {
  require(names_.size() == columns_.size(), ErrorKind::DimensionMismatch,
          "series table: name count does not match column count");
  check_unique(names_, "series table");
  for (std::size_t i = 1; i < dates_.size(); ++i) {
    require(dates_[i].serial() == dates_[i - 1].serial() + 1, ErrorKind::InvalidArgument,
            "series table: dates must be consecutive months (" + dates_[i - 1].to_string() +
                " followed by " + dates_[i].to_string() + ")");
  }
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    require(columns_[j].size() == dates_.size(), ErrorKind::DimensionMismatch,
            "series table: column '" + names_[j] + "' has wrong length");
  }
}

std::optional<std::size_t> SeriesTable::find(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

const std::vector<double>& SeriesTable::column(std::string_view name) const {
  const auto j = find(name);
  require(j.has_value(), ErrorKind::InvalidArgument, "no column named '" + std::string(name) + "'");
  return columns_[*j];
}

std::size_t SeriesTable::missing_count() const {
  std::size_t count = 0;
  for (const auto& col : columns_) count += std::count_if(col.begin(), col.end(), is_missing);
  return count;
}

bool operator==(const SeriesTable& a, const SeriesTable& b) {
  if (a.dates_ != b.dates_ || a.names_ != b.names_) return false;
  for (std::size_t j = 0; j < a.columns_.size(); ++j) {
    for (std::size_t i = 0; i < a.dates_.size(); ++i) {
      const double x = a.columns_[j][i];
      const double y = b.columns_[j][i];
      if (is_missing(x) != is_missing(y)) return false;
      if (!is_missing(x) && x != y) return false;
    }
  }
  return true;
}

// Dataset -----------------------------------------------------------------

Dataset::Dataset(std::vector<YearMonth> dates, Matrix features, std::vector<std::string> feature_names,
                 Vector target, std::string target_name)
    : dates_(std::move(dates)),
      features_(std::move(features)),
      feature_names_(std::move(feature_names)),
      target_(std::move(target)),
      target_name_(std::move(target_name)) {
  const Index n = features_.rows();
  require(n >= 1, ErrorKind::InvalidArgument, "dataset needs at least one row");
  require(features_.cols() >= 1, ErrorKind::InvalidArgument, "dataset needs at least one feature");
  require(static_cast<Index>(dates_.size()) == n && target_.size() == n, ErrorKind::DimensionMismatch,
          "dataset: dates, features and target disagree on row count");
  require(static_cast<Index>(feature_names_.size()) == features_.cols(), ErrorKind::DimensionMismatch,
          "dataset: feature name count does not match column count");
  check_unique(feature_names_, "dataset");
  require(features_.allFinite() && target_.allFinite(), ErrorKind::MissingValues,
          "dataset contains missing or non-finite values");
  for (std::size_t i = 1; i < dates_.size(); ++i) {
    require(dates_[i - 1] < dates_[i], ErrorKind::InvalidArgument, "dataset rows are not ordered by date");
  }
}

Dataset Dataset::slice(Index begin, Index end) const {
  require(0 <= begin && begin < end && end <= rows(), ErrorKind::InvalidArgument,
          "dataset slice [" + std::to_string(begin) + ", " + std::to_string(end) + ") out of range");
  return Dataset({dates_.begin() + begin, dates_.begin() + end}, features_.middleRows(begin, end - begin),
                 feature_names_, target_.segment(begin, end - begin), target_name_);
}

Dataset Dataset::select(const std::vector<std::string>& names) const {
  Matrix x(rows(), static_cast<Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto src = find_feature(names[j]);
    require(src.has_value(), ErrorKind::InvalidArgument, "no feature named '" + names[j] + "'");
    x.col(static_cast<Index>(j)) = features_.col(*src);
  }
  return Dataset(dates_, std::move(x), names, target_, target_name_);
}

std::optional<Index> Dataset::find_feature(std::string_view name) const {
  const auto it = std::find(feature_names_.begin(), feature_names_.end(), name);
  if (it == feature_names_.end()) return std::nullopt;
  return static_cast<Index>(it - feature_names_.begin());
}

SeriesTable Dataset::to_table() const {
  std::vector<std::string> names = feature_names_;
  names.push_back(target_name_);
  std::vector<std::vector<double>> columns;
  for (Index j = 0; j < cols(); ++j) {
    const auto c = features_.col(j);
    columns.emplace_back(c.data(), c.data() + c.size());
  }
  columns.emplace_back(target_.data(), target_.data() + target_.size());
  return SeriesTable(dates_, std::move(names), std::move(columns));
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.dates_ == b.dates_ && a.feature_names_ == b.feature_names_ && a.target_name_ == b.target_name_ &&
         a.features_.rows() == b.features_.rows() && a.features_.cols() == b.features_.cols() &&
         a.features_ == b.features_ && a.target_ == b.target_;
}

// SplitSpec ---------------------------------------------------------------

SplitSpec::SplitSpec(double train_fraction) : train_fraction_(train_fraction) {
  require(train_fraction > 0.0 && train_fraction < 1.0, ErrorKind::InvalidArgument,
          "train fraction must lie strictly between 0 and 1");
}

Index SplitSpec::boundary(Index n) const {
  require(n >= 2, ErrorKind::InvalidArgument, "a chronological split needs at least 2 rows");
  // The small offset keeps products such as 0.7 * 120 from flooring to 83.
  const auto raw = static_cast<Index>(std::floor(train_fraction_ * static_cast<double>(n) + 1e-9));
  return std::clamp<Index>(raw, 1, n - 1);
}

// Ingestion ---------------------------------------------------------------

SeriesTable ingest_csv(std::istream& in, std::string_view date_column, std::string_view source_name) {
  const std::string source(source_name);
  std::string line;
  require(csv::read_line(in, line, true), ErrorKind::Parse, source + ": empty file (no header row)");
  const auto header = csv::split_line(line);
  check_unique(header, source);

  const auto date_it = std::find(header.begin(), header.end(), date_column);
  require(date_it != header.end(), ErrorKind::InvalidArgument,
          source + ": date column '" + std::string(date_column) + "' not found");
  const auto date_idx = static_cast<std::size_t>(date_it - header.begin());

  std::vector<std::string> names;
  std::vector<std::size_t> field_of;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j == date_idx) continue;
    require(!header[j].empty(), ErrorKind::Parse, source + ": empty column name in header");
    names.push_back(header[j]);
    field_of.push_back(j);
  }

  struct Row {
    ParsedDate date;
    std::size_t order;
    std::vector<double> values;
  };
  std::vector<Row> rows;
  std::size_t line_no = 1;
  while (csv::read_line(in, line)) {
    ++line_no;
    const auto fields = csv::split_line(line);
    const std::string where = source + ":" + std::to_string(line_no);
    require(fields.size() == header.size(), ErrorKind::Parse,
            where + ": expected " + std::to_string(header.size()) + " fields, found " +
                std::to_string(fields.size()));
    const auto date = parse_date(fields[date_idx]);
    require(date.has_value(), ErrorKind::Parse, where + ": unparseable date '" + fields[date_idx] + "'");
    Row row{*date, rows.size(), {}};
    row.values.reserve(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
      const auto& cell = fields[field_of[j]];
      if (cell.empty() || cell == "NA") {
        row.values.push_back(kMissing);
        continue;
      }
      const auto v = csv::parse_number(cell);
      require(v.has_value(), ErrorKind::Parse,
              where + ": column '" + names[j] + "' has non-numeric value '" + cell + "'");
      row.values.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorKind::Parse, source + ": no data rows");

  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.date.month != b.date.month) return a.date.month < b.date.month;
    return a.date.day < b.date.day;
  });

  const auto dates = month_range(rows.front().date.month, rows.back().date.month);
  std::vector<std::vector<double>> columns(names.size(), std::vector<double>(dates.size(), kMissing));
  const long first = dates.front().serial();
  for (const auto& row : rows) {
    const auto i = static_cast<std::size_t>(row.date.month.serial() - first);
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (!is_missing(row.values[j])) columns[j][i] = row.values[j];
    }
  }
  return SeriesTable(dates, std::move(names), std::move(columns));
}

SeriesTable ingest_csv(const std::filesystem::path& path, std::string_view date_column) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::Io, "cannot read '" + path.string() + "'");
  return ingest_csv(in, date_column, path.string());
}

void write_csv(const SeriesTable& table, std::ostream& out, std::string_view date_column) {
  out << csv::escape(date_column);
  for (const auto& name : table.names()) out << ',' << csv::escape(name);
  out << '\n';
  for (std::size_t i = 0; i < table.rows(); ++i) {
    out << table.dates()[i].to_string();
    for (std::size_t j = 0; j < table.cols(); ++j) {
      const double v = table.column(j)[i];
      out << ',' << (is_missing(v) ? std::string("NA") : csv::format_number(v));
    }
    out << '\n';
  }
}

void write_csv(const SeriesTable& table, const std::filesystem::path& path, std::string_view date_column) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorKind::Io, "cannot write '" + path.string() + "'");
  write_csv(table, out, date_column);
  out.flush();
  require(out.good(), ErrorKind::Io, "failed writing '" + path.string() + "'");
}

// Transformations ---------------------------------------------------------

SeriesTable merge(const std::vector<SeriesTable>& tables) {
  require(!tables.empty(), ErrorKind::InvalidArgument, "merge needs at least one table");
  std::vector<std::string> names;
  std::optional<YearMonth> lo;
  std::optional<YearMonth> hi;
  for (const auto& t : tables) {
    names.insert(names.end(), t.names().begin(), t.names().end());
    if (t.rows() == 0) continue;
    if (!lo || t.dates().front() < *lo) lo = t.dates().front();
    if (!hi || *hi < t.dates().back()) hi = t.dates().back();
  }
  {
    std::set<std::string_view> seen;
    for (const auto& n : names) {
      require(seen.insert(n).second, ErrorKind::InvalidArgument,
              "merge: column '" + n + "' appears in more than one table");
    }
  }
  if (!lo) return SeriesTable({}, names, std::vector<std::vector<double>>(names.size()));

  const auto dates = month_range(*lo, *hi);
  std::vector<std::vector<double>> columns;
  for (const auto& t : tables) {
    for (std::size_t j = 0; j < t.cols(); ++j) {
      std::vector<double> col(dates.size(), kMissing);
      for (std::size_t i = 0; i < t.rows(); ++i) {
        col[static_cast<std::size_t>(t.dates()[i].serial() - lo->serial())] = t.column(j)[i];
      }
      columns.push_back(std::move(col));
    }
  }
  return SeriesTable(dates, std::move(names), std::move(columns));
}

SeriesTable add_differences(const SeriesTable& table, const std::vector<std::string>& exclude) {
  require(table.rows() >= 2, ErrorKind::InvalidArgument, "differencing needs at least 2 rows");
  auto names = table.names();
  auto columns = table.columns();
  for (std::size_t j = 0; j < table.cols(); ++j) {
    if (std::find(exclude.begin(), exclude.end(), table.names()[j]) != exclude.end()) continue;
    const auto& src = table.column(j);
    std::vector<double> diff(src.size(), kMissing);
    for (std::size_t i = 1; i < src.size(); ++i) diff[i] = src[i] - src[i - 1];  // NaN propagates
    names.push_back("d_" + table.names()[j]);
    columns.push_back(std::move(diff));
  }
  return SeriesTable(table.dates(), std::move(names), std::move(columns));
}

SeriesTable fill_missing(const SeriesTable& table) {
  auto columns = table.columns();
  std::size_t first_complete = 0;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    auto& col = columns[j];
    const auto first = std::find_if(col.begin(), col.end(), [](double v) { return !is_missing(v); });
    require(first != col.end(), ErrorKind::MissingValues,
            "column '" + table.names()[j] + "' has no observed values");
    first_complete = std::max(first_complete, static_cast<std::size_t>(first - col.begin()));
    for (auto it = first + 1; it != col.end(); ++it) {
      if (is_missing(*it)) *it = *(it - 1);
    }
  }
  std::vector<YearMonth> dates(table.dates().begin() + static_cast<std::ptrdiff_t>(first_complete),
                               table.dates().end());
  for (auto& col : columns) col.erase(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(first_complete));
  return SeriesTable(std::move(dates), table.names(), std::move(columns));
}

SeriesTable slice(const SeriesTable& table, std::size_t begin, std::size_t end) {
  require(begin <= end && end <= table.rows(), ErrorKind::InvalidArgument, "table slice out of range");
  std::vector<YearMonth> dates(table.dates().begin() + static_cast<std::ptrdiff_t>(begin),
                               table.dates().begin() + static_cast<std::ptrdiff_t>(end));
  std::vector<std::vector<double>> columns;
  for (const auto& col : table.columns()) {
    columns.emplace_back(col.begin() + static_cast<std::ptrdiff_t>(begin),
                         col.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return SeriesTable(std::move(dates), table.names(), std::move(columns));
}

Dataset to_dataset(const SeriesTable& table, std::string_view target_column) {
  const auto target_idx = table.find(target_column);
  require(target_idx.has_value(), ErrorKind::InvalidArgument,
          "target column '" + std::string(target_column) + "' not found");
  require(table.missing_count() == 0, ErrorKind::MissingValues,
          "table still contains missing values; run fill_missing first");
  require(table.rows() >= 2, ErrorKind::InvalidArgument, "a dataset needs at least 2 rows");

  const auto n = static_cast<Index>(table.rows());
  std::vector<std::string> names;
  Matrix x(n, static_cast<Index>(table.cols()) - 1);
  Index out = 0;
  for (std::size_t j = 0; j < table.cols(); ++j) {
    if (j == *target_idx) continue;
    names.push_back(table.names()[j]);
    x.col(out++) = Eigen::Map<const Vector>(table.column(j).data(), n);
  }
  const Vector y = Eigen::Map<const Vector>(table.column(*target_idx).data(), n);
  return Dataset(table.dates(), std::move(x), std::move(names), y, std::string(target_column));
}

std::pair<Dataset, Dataset> chronological_split(const Dataset& ds, const SplitSpec& spec) {
  const Index b = spec.boundary(ds.rows());
  return {ds.slice(0, b), ds.slice(b, ds.rows())};
}

}  // namespace spreadcast::data
