#include "spreadcast/backtest.hpp"
#include "spreadcast/csv.hpp"
#include "spreadcast/error.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace spreadcast::eval {

namespace {

constexpr const char* kCsvHeader =
    "method,selection,window,train_rows,test_rows,train_mae,train_mse,train_r2,test_mae,test_mse,test_r2,error";

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

template <typename T>
T parse_integer(const std::string& text, const char* what) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  require(ec == std::errc() && ptr == end, ErrorKind::Parse,
          std::string("report: bad ") + what + " '" + text + "'");
  return value;
}

double parse_real(const std::string& text, const char* what) {
  const auto v = csv::parse_number(text);
  require(v.has_value(), ErrorKind::Parse, std::string("report: bad ") + what + " '" + text + "'");
  return *v;
}

}  // namespace

std::string EvalReport::to_text() const {
  std::ostringstream out;
  out << "target " << meta.target << ", " << meta.rows << " rows, split " << meta.train_rows << "/"
      << meta.test_rows << ", k " << meta.k << ", seed " << meta.seed << ", stacking " << to_string(meta.mode);
  if (meta.mode == stacking::StackingMode::KFold) out << " (" << meta.folds << " folds)";
  out << (meta.whiten ? "" : ", no whitening") << "\n\n";

  const std::size_t name_w = 16;
  const std::size_t num_w = 12;
  out << pad("", name_w, true) << pad("", 11, true) << pad("", 7) << pad("Training Set", num_w * 3)
      << pad("Testing Set", num_w * 3) << '\n';
  out << pad("Learning Method", name_w, true) << pad("Selection", 11, true) << pad("Window", 7);
  for (int i = 0; i < 2; ++i) out << pad("MAE", num_w) << pad("MSE", num_w) << pad("R2", num_w);
  out << '\n' << std::string(name_w + 11 + 7 + 6 * num_w, '-') << '\n';

  for (const auto& r : rows) {
    out << pad(std::string(to_string(r.method)), name_w, true) << pad(r.selection ? "Yes" : "No", 11, true);
    if (!r.ok()) {
      out << pad("-", 7) << "  error: " << r.error << '\n';
      continue;
    }
    out << pad(std::to_string(r.window), 7);
    for (const auto* m : {&*r.train, &*r.test})
      out << pad(fixed(m->mae), num_w) << pad(fixed(m->mse), num_w) << pad(fixed(m->r2), num_w);
    out << '\n';
  }
  return out.str();
}

void EvalReport::to_csv(std::ostream& out) const {
  out << "# target=" << meta.target << '\n'
      << "# rows=" << meta.rows << '\n'
      << "# train_rows=" << meta.train_rows << '\n'
      << "# test_rows=" << meta.test_rows << '\n'
      << "# train_fraction=" << csv::format_number(meta.train_fraction) << '\n'
      << "# k=" << meta.k << '\n'
      << "# seed=" << meta.seed << '\n'
      << "# mode=" << to_string(meta.mode) << '\n'
      << "# folds=" << meta.folds << '\n'
      << "# whiten=" << (meta.whiten ? 1 : 0) << '\n';
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << to_string(r.method) << ',' << (r.selection ? "yes" : "no") << ',' << r.window << ',' << r.train_rows
        << ',' << r.test_rows;
    for (const auto& m : {r.train, r.test}) {
      if (m)
        out << ',' << csv::format_number(m->mae) << ',' << csv::format_number(m->mse) << ','
            << csv::format_number(m->r2);
      else
        out << ",,,";
    }
    out << ',' << csv::escape(r.error) << '\n';
  }
}

EvalReport EvalReport::from_csv(std::istream& in) {
  EvalReport report;
  std::map<std::string, std::string> meta;
  std::string line;
  bool header_seen = false;
  bool first = true;
  while (csv::read_line(in, line, first)) {
    first = false;
    if (!header_seen && line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      require(eq != std::string::npos, ErrorKind::Parse, "report: bad metadata line '" + line + "'");
      meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    if (!header_seen) {
      require(line == kCsvHeader, ErrorKind::Parse, "report: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto f = csv::split_line(line);
    require(f.size() == 12, ErrorKind::Parse, "report: expected 12 fields in '" + line + "'");
    ReportRow r;
    const auto method = parse_method(f[0]);
    require(method.has_value(), ErrorKind::Parse, "report: unknown method '" + f[0] + "'");
    r.method = *method;
    require(f[1] == "yes" || f[1] == "no", ErrorKind::Parse, "report: bad selection '" + f[1] + "'");
    r.selection = f[1] == "yes";
    r.window = parse_integer<int>(f[2], "window");
    r.train_rows = parse_integer<Index>(f[3], "train_rows");
    r.test_rows = parse_integer<Index>(f[4], "test_rows");
    for (int part = 0; part < 2; ++part) {
      const std::size_t base = 5 + static_cast<std::size_t>(part) * 3;
      if (f[base].empty()) continue;
      Metrics m{parse_real(f[base], "mae"), parse_real(f[base + 1], "mse"), parse_real(f[base + 2], "r2")};
      (part == 0 ? r.train : r.test) = m;
    }
    r.error = f[11];
    report.rows.push_back(std::move(r));
  }
  require(header_seen, ErrorKind::Parse, "report: missing header");

  auto get = [&](const char* key) {
    const auto it = meta.find(key);
    require(it != meta.end(), ErrorKind::Parse, std::string("report: missing metadata '") + key + "'");
    return it->second;
  };
  auto& m = report.meta;
  m.target = get("target");
  m.rows = parse_integer<Index>(get("rows"), "rows");
  m.train_rows = parse_integer<Index>(get("train_rows"), "train_rows");
  m.test_rows = parse_integer<Index>(get("test_rows"), "test_rows");
  m.train_fraction = parse_real(get("train_fraction"), "train_fraction");
  m.k = parse_integer<std::size_t>(get("k"), "k");
  m.seed = parse_integer<std::uint64_t>(get("seed"), "seed");
  const auto mode = stacking::parse_mode(get("mode"));
  require(mode.has_value(), ErrorKind::Parse, "report: bad stacking mode");
  m.mode = *mode;
  m.folds = parse_integer<int>(get("folds"), "folds");
  m.whiten = parse_integer<int>(get("whiten"), "whiten") != 0;
  return report;
}

}  // namespace spreadcast::eval
