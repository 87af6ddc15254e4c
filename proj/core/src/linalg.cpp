#include "spreadcast/error.hpp"
#include "spreadcast/linalg.hpp"

namespace spreadcast {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::MissingValues: return "missing values";
    case ErrorKind::RankDeficient: return "rank deficient";
    case ErrorKind::Diverged: return "diverged";
    case ErrorKind::Format: return "format error";
  }
  return "error";
}

Matrix take_rows(const Matrix& x, std::span<const Index> rows) {
  Matrix out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = x.row(rows[i]);
  return out;
}

Vector take_rows(const Vector& y, std::span<const Index> rows) {
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Index>(i)] = y[rows[i]];
  return out;
}

bool all_finite(const Matrix& x) { return x.allFinite(); }
bool all_finite(const Vector& x) { return x.allFinite(); }

}  // namespace spreadcast
