#include "paynet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "paynet/types.hpp"

namespace paynet {

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw std::invalid_argument("append_row: width mismatch");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

namespace {

// LU-style elimination on [a | rhs] where rhs has k columns.
void eliminate(Matrix& a, Matrix& rhs) {
  const std::size_t n = a.rows();
  double scale = 0.0;
  for (double v : a.data()) scale = std::max(scale, std::abs(v));
  const double tiny = std::max(scale, 1.0) * 1e-13;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (std::abs(a(pivot, col)) <= tiny) throw DomainError("singular matrix");
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
      for (std::size_t c = 0; c < rhs.cols(); ++c) std::swap(rhs(col, c), rhs(pivot, c));
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      for (std::size_t c = 0; c < rhs.cols(); ++c) rhs(r, c) -= f * rhs(col, c);
    }
  }
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < rhs.cols(); ++c) rhs(r, c) /= a(r, r);
}

}  // namespace

std::vector<double> solve(Matrix a, std::vector<double> b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) throw std::invalid_argument("solve: shape");
  Matrix rhs(b.size(), 1);
  rhs.data() = std::move(b);
  eliminate(a, rhs);
  return rhs.data();
}

Matrix inverse(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse: not square");
  Matrix work = a;
  Matrix id(a.rows(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) id(i, i) = 1.0;
  eliminate(work, id);
  return id;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace paynet
