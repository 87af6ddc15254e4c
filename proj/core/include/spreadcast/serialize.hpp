#pragma once

#include "spreadcast/linalg.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace spreadcast::io {

/// Whitespace-separated token stream used by the model artifacts. Reals are
/// written in hexadecimal floating point so they reload bit-exactly;
/// strings are length-prefixed ("5:hello") so they may contain spaces.
class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  Writer& tag(std::string_view word);
  Writer& real(double v);
  Writer& real(long double v);
  Writer& integer(std::int64_t v);
  Writer& text(std::string_view s);
  Writer& vector(const Vector& v);
  Writer& matrix(const Matrix& m);
  Writer& newline();

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Consumes the next token and fails unless it equals `word`.
  void expect(std::string_view word);
  std::string token();
  double real();
  long double long_real();
  std::int64_t integer();
  std::string text();
  Vector vector();
  Matrix matrix();

 private:
  std::istream& in_;
};

}  // namespace spreadcast::io
