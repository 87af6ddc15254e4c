#include "spreadcast/serialize.hpp"

#include "spreadcast/error.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>

namespace spreadcast::io {

Writer& Writer::tag(std::string_view word) {
  out_ << word << ' ';
  return *this;
}

Writer& Writer::real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  out_ << buf << ' ';
  return *this;
}

Writer& Writer::real(long double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%La", v);
  out_ << buf << ' ';
  return *this;
}

Writer& Writer::integer(std::int64_t v) {
  out_ << v << ' ';
  return *this;
}

Writer& Writer::text(std::string_view s) {
  out_ << s.size() << ':' << s << ' ';
  return *this;
}

Writer& Writer::vector(const Vector& v) {
  integer(v.size());
  for (Index i = 0; i < v.size(); ++i) real(v[i]);
  return newline();
}

Writer& Writer::matrix(const Matrix& m) {
  integer(m.rows()).integer(m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) real(m(i, j));
  return newline();
}

Writer& Writer::newline() {
  out_ << '\n';
  return *this;
}

std::string Reader::token() {
  std::string t;
  require(static_cast<bool>(in_ >> t), ErrorKind::Format, "model artifact: unexpected end of input");
  return t;
}

void Reader::expect(std::string_view word) {
  const auto t = token();
  require(t == word, ErrorKind::Format,
          "model artifact: expected '" + std::string(word) + "', found '" + t + "'");
}

double Reader::real() {
  const auto t = token();
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  require(end == t.c_str() + t.size() && errno == 0, ErrorKind::Format, "model artifact: bad real '" + t + "'");
  return v;
}

long double Reader::long_real() {
  const auto t = token();
  errno = 0;
  char* end = nullptr;
  const long double v = std::strtold(t.c_str(), &end);
  require(end == t.c_str() + t.size() && errno == 0, ErrorKind::Format, "model artifact: bad real '" + t + "'");
  return v;
}

std::int64_t Reader::integer() {
  const auto t = token();
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  require(end == t.c_str() + t.size() && errno == 0 && !t.empty(), ErrorKind::Format,
          "model artifact: bad integer '" + t + "'");
  return v;
}

std::string Reader::text() {
  std::size_t len = 0;
  require(static_cast<bool>(in_ >> len), ErrorKind::Format, "model artifact: bad string length");
  require(in_.get() == ':', ErrorKind::Format, "model artifact: malformed string");
  std::string s(len, '\0');
  require(static_cast<bool>(in_.read(s.data(), static_cast<std::streamsize>(len))), ErrorKind::Format,
          "model artifact: truncated string");
  return s;
}

Vector Reader::vector() {
  const auto n = integer();
  require(n >= 0, ErrorKind::Format, "model artifact: negative vector size");
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = real();
  return v;
}

Matrix Reader::matrix() {
  const auto r = integer();
  const auto c = integer();
  require(r >= 0 && c >= 0, ErrorKind::Format, "model artifact: negative matrix size");
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = real();
  return m;
}

}  // namespace spreadcast::io
