#include "spreadcast/data.hpp"
#include "spreadcast/error.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

using namespace spreadcast;
using data::SeriesTable;
using data::YearMonth;

namespace {

SeriesTable ingest(const std::string& text, std::string_view date_column = "date") {
  std::istringstream in(text);
  return data::ingest_csv(in, date_column, "test.csv");
}

SeriesTable months(int first_month, int count, const std::string& name, std::vector<double> values) {
  std::vector<YearMonth> dates;
  for (int i = 0; i < count; ++i) dates.push_back(YearMonth(2008, first_month).plus_months(i));
  return SeriesTable(std::move(dates), {name}, {std::move(values)});
}

std::string error_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(YearMonth, ParsesBothDateForms) {
  EXPECT_EQ(YearMonth::parse("2008-02"), YearMonth(2008, 2));
  EXPECT_EQ(YearMonth::parse("2008-02-29"), YearMonth(2008, 2));
  EXPECT_FALSE(YearMonth::parse("2008-13").has_value());
  EXPECT_FALSE(YearMonth::parse("08-01").has_value());
  EXPECT_FALSE(YearMonth::parse("2008/01").has_value());
  EXPECT_EQ(YearMonth(2008, 12).next(), YearMonth(2009, 1));
  EXPECT_EQ(YearMonth(2009, 1).plus_months(-1).to_string(), "2008-12");
}

TEST(Ingest, MonthlyRows) {
  const auto t = ingest("date,CPI\n2008-01,211.4\n2008-02,212.0\n");
  ASSERT_EQ(t.rows(), 2u);
  ASSERT_EQ(t.cols(), 1u);
  EXPECT_EQ(t.dates()[0], YearMonth(2008, 1));
  EXPECT_DOUBLE_EQ(t.column("CPI")[1], 212.0);
}

TEST(Ingest, DailyRowsCollapseToLastObservation) {
  std::string text = "date,VIX\n";
  for (int day = 2; day <= 31; ++day) text += "2008-01-" + std::string(day < 10 ? "0" : "") + std::to_string(day) + "," + std::to_string(day) + "\n";
  const auto t = ingest(text);
  ASSERT_EQ(t.rows(), 1u);
  EXPECT_EQ(t.dates()[0], YearMonth(2008, 1));
  EXPECT_DOUBLE_EQ(t.column("VIX")[0], 31.0);
}

TEST(Ingest, UnsortedDailyRowsUseTheLatestDate) {
  const auto t = ingest("date,a\n2008-01-31,3\n2008-01-02,1\n2008-01-15,2\n");
  EXPECT_DOUBLE_EQ(t.column("a")[0], 3.0);
}

TEST(Ingest, MissingCellsAreKept) {
  const auto t = ingest("date,a,b\n2008-01,1,\n2008-02,NA,2\n2008-03,3,3\n");
  EXPECT_TRUE(data::is_missing(t.column("b")[0]));
  EXPECT_TRUE(data::is_missing(t.column("a")[1]));
  EXPECT_EQ(t.missing_count(), 2u);
}

TEST(Ingest, GapMonthsBecomeMissingRows) {
  const auto t = ingest("date,a\n2008-01,1\n2008-04,4\n");
  ASSERT_EQ(t.rows(), 4u);
  EXPECT_TRUE(data::is_missing(t.column("a")[1]));
  EXPECT_TRUE(data::is_missing(t.column("a")[2]));
}

TEST(Ingest, Errors) {
  EXPECT_NE(error_message([] { ingest("when,a\n2008-01,1\n"); }).find("date"), std::string::npos);
  EXPECT_NE(error_message([] { ingest("date,a\n2008-1x,1\n"); }).find("test.csv"), std::string::npos);
  EXPECT_THROW(ingest("date,a,a\n2008-01,1,2\n"), Error);
  EXPECT_THROW(ingest("date,a\n"), Error);
  EXPECT_THROW(ingest("date,a\n2008-01,1,000\n"), Error);
  EXPECT_THROW(ingest("date,a\n2008-01,\"1,000\"\n"), Error);
  EXPECT_THROW(ingest("date,a\n2008-01,nan\n"), Error);
  EXPECT_THROW(data::ingest_csv(std::filesystem::path("/nonexistent/x.csv"), "date"), Error);
}

TEST(Merge, OuterJoinOnMonth) {
  const auto a = months(1, 6, "a", {1, 2, 3, 4, 5, 6});
  const auto b = months(4, 6, "b", {4, 5, 6, 7, 8, 9});
  const auto m = data::merge({a, b});
  ASSERT_EQ(m.rows(), 9u);
  EXPECT_EQ(m.dates().front(), YearMonth(2008, 1));
  EXPECT_EQ(m.dates().back(), YearMonth(2008, 9));
  EXPECT_TRUE(data::is_missing(m.column("b")[0]));
  EXPECT_TRUE(data::is_missing(m.column("a")[8]));
  EXPECT_DOUBLE_EQ(m.column("b")[3], 4.0);
  EXPECT_EQ(m.missing_count(), 6u);
}

TEST(Merge, SingleTableIsIdentity) {
  const auto a = months(1, 3, "a", {1, 2, 3});
  EXPECT_EQ(data::merge({a}), a);
}

TEST(Merge, CollidingNamesFail) {
  EXPECT_THROW(data::merge({months(1, 3, "a", {1, 2, 3}), months(2, 3, "a", {1, 2, 3})}), Error);
}

TEST(Merge, OrderInsensitiveUpToColumnOrder) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int start_a = 1 + static_cast<int>(rng.index(6));
    const int start_b = 1 + static_cast<int>(rng.index(6));
    const int len_a = 2 + static_cast<int>(rng.index(8));
    const int len_b = 2 + static_cast<int>(rng.index(8));
    std::vector<double> va(len_a), vb(len_b);
    for (auto& v : va) v = rng.normal();
    for (auto& v : vb) v = rng.index(4) == 0 ? data::kMissing : rng.normal();
    const auto a = months(start_a, len_a, "a", va);
    const auto b = months(start_b, len_b, "b", vb);
    const auto ab = data::merge({a, b});
    const auto ba = data::merge({b, a});
    ASSERT_EQ(ab.dates(), ba.dates());
    for (const auto* name : {"a", "b"}) {
      const auto& x = ab.column(std::string_view(name));
      const auto& y = ba.column(std::string_view(name));
      for (std::size_t i = 0; i < x.size(); ++i) {
        ASSERT_EQ(data::is_missing(x[i]), data::is_missing(y[i]));
        if (!data::is_missing(x[i])) {
          ASSERT_EQ(x[i], y[i]);
        }
      }
    }
  }
}

TEST(Differences, FirstDifference) {
  const auto t = data::add_differences(months(1, 3, "a", {100, 103, 101}));
  ASSERT_EQ(t.cols(), 2u);
  const auto& d = t.column("d_a");
  EXPECT_TRUE(data::is_missing(d[0]));
  EXPECT_DOUBLE_EQ(d[1], 3.0);
  EXPECT_DOUBLE_EQ(d[2], -2.0);
}

TEST(Differences, ConstantColumn) {
  const auto d = data::add_differences(months(1, 3, "c", {5, 5, 5})).column("d_c");
  EXPECT_TRUE(data::is_missing(d[0]));
  EXPECT_EQ(d[1], 0.0);
  EXPECT_EQ(d[2], 0.0);
}

TEST(Differences, ColumnCountDoubles) {
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;
  for (int j = 0; j < 34; ++j) {
    names.push_back("f" + std::to_string(j));
    cols.push_back({1.0, 2.0, 4.0});
  }
  std::vector<YearMonth> dates{{2008, 1}, {2008, 2}, {2008, 3}};
  const auto t = data::add_differences(SeriesTable(dates, names, cols));
  EXPECT_EQ(t.cols(), 68u);
}

TEST(Differences, ExcludedColumnsAndShortTables) {
  const auto t = data::add_differences(data::merge({months(1, 3, "a", {1, 2, 3}), months(1, 3, "SPREAD", {4, 5, 6})}),
                                       {"SPREAD"});
  EXPECT_EQ(t.cols(), 3u);
  EXPECT_FALSE(t.find("d_SPREAD").has_value());
  EXPECT_THROW(data::add_differences(months(1, 1, "a", {1})), Error);
}

TEST(FillMissing, ForwardFill) {
  const auto t = data::fill_missing(months(1, 3, "a", {1, data::kMissing, 3}));
  EXPECT_EQ(t.column("a"), (std::vector<double>{1, 1, 3}));
}

TEST(FillMissing, LeadingGapRowsDropped) {
  const auto t = data::fill_missing(
      data::merge({months(1, 3, "a", {data::kMissing, 2, 3}), months(1, 3, "b", {1, 2, 3})}));
  ASSERT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.dates().front(), YearMonth(2008, 2));
  EXPECT_EQ(t.missing_count(), 0u);
}

TEST(FillMissing, AllMissingColumnFails) {
  EXPECT_THROW(data::fill_missing(months(1, 3, "a", {data::kMissing, data::kMissing, data::kMissing})), Error);
}

TEST(FillMissing, DifferencePipelineRowCount) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + static_cast<int>(rng.index(20));
    const int lead = static_cast<int>(rng.index(3));
    std::vector<double> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = i < lead ? data::kMissing : rng.normal();
      b[i] = rng.normal();
    }
    const auto raw = data::merge({months(1, n, "a", a), months(1, n, "SPREAD", b)});
    const auto filled = data::fill_missing(data::add_differences(raw, {"SPREAD"}));
    const auto ds = data::to_dataset(filled, "SPREAD");
    // Column a starts at `lead`, so d_a starts one row later.
    EXPECT_EQ(ds.rows(), n - (lead + 1));
  }
}

TEST(ToDataset, SplitsTargetFromFeatures) {
  Rng rng(1);
  std::vector<YearMonth> dates;
  for (int i = 0; i < 120; ++i) dates.push_back(YearMonth(2008, 1).plus_months(i));
  std::vector<double> a(120), s(120);
  for (int i = 0; i < 120; ++i) {
    a[i] = rng.normal();
    s[i] = 300 + rng.normal();
  }
  const auto ds = data::to_dataset(SeriesTable(dates, {"SPREAD", "a"}, {s, a}), "SPREAD");
  EXPECT_EQ(ds.rows(), 120);
  EXPECT_EQ(ds.cols(), 1);
  EXPECT_EQ(ds.feature_names(), std::vector<std::string>{"a"});
  EXPECT_EQ(ds.target()[7], s[7]);
}

TEST(ToDataset, MinimalAndErrors) {
  const auto two = data::merge({months(1, 2, "a", {1, 2}), months(1, 2, "y", {3, 4})});
  EXPECT_EQ(data::to_dataset(two, "y").rows(), 2);
  EXPECT_THROW(data::to_dataset(two, "missing"), Error);
  const auto gap = data::merge({months(1, 3, "a", {1, data::kMissing, 2}), months(1, 3, "y", {3, 4, 5})});
  EXPECT_THROW(data::to_dataset(gap, "y"), Error);
}

TEST(Split, SeventyThirtyOnHundredTwentyRows) {
  EXPECT_EQ(data::SplitSpec(0.7).boundary(120), 84);
  EXPECT_EQ(data::SplitSpec(0.5).boundary(10), 5);
  EXPECT_EQ(data::SplitSpec(0.9).boundary(2), 1);
  EXPECT_EQ(data::SplitSpec(0.01).boundary(10), 1);
  EXPECT_THROW(data::SplitSpec(0.0), Error);
  EXPECT_THROW(data::SplitSpec(1.0), Error);
}

TEST(Split, ConcatenationReproducesInput) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.index(50));
    const auto ds = support::make_dataset(support::random_matrix(rng, n, 3), support::random_vector(rng, n));
    const data::SplitSpec spec(rng.uniform(0.05, 0.95));
    const auto [train, test] = data::chronological_split(ds, spec);
    ASSERT_GE(train.rows(), 1);
    ASSERT_GE(test.rows(), 1);
    ASSERT_EQ(train.rows() + test.rows(), n);
    Matrix x(n, 3);
    x << train.features(), test.features();
    Vector y(n);
    y << train.target(), test.target();
    EXPECT_EQ(x, ds.features());
    EXPECT_EQ(y, ds.target());
    EXPECT_LT(train.dates().back(), test.dates().front());
  }
}

TEST(Csv, RoundTripIsExact) {
  Rng rng(3);
  std::vector<YearMonth> dates;
  for (int i = 0; i < 30; ++i) dates.push_back(YearMonth(1999, 11).plus_months(i));
  std::vector<double> a(30), b(30);
  for (int i = 0; i < 30; ++i) {
    a[i] = rng.normal() * std::pow(10.0, rng.uniform(-8, 8));
    b[i] = rng.index(5) == 0 ? data::kMissing : rng.normal();
  }
  const SeriesTable t(dates, {"a", "b, quoted"}, {a, b});
  std::stringstream buf;
  data::write_csv(t, buf);
  const auto back = data::ingest_csv(buf, "date");
  EXPECT_EQ(back, t);
}

TEST(Csv, FileRoundTrip) {
  const auto dir = support::scratch_dir("csv");
  const auto t = months(1, 4, "a", {1.5, data::kMissing, -2.25, 1e-300});
  data::write_csv(t, dir / "t.csv");
  EXPECT_EQ(data::ingest_csv(dir / "t.csv", "date"), t);
}
