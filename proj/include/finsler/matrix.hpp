#pragma once

#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "finsler/errors.hpp"

namespace finsler {

// Dense real m x n matrix, row-major. Dimensions may be zero (an n x 0
// kernel basis is a legal value); entries are checked finite at the
// construction points that accept external data.
class RectMatrix {
 public:
  RectMatrix() : rows_(0), cols_(0) {}

  RectMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) throw InvalidInput("RectMatrix: negative dimension");
    data_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  }

  static RectMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw InvalidInput("RectMatrix: empty row list");
    const std::size_t n = rows[0].size();
    if (n == 0) throw InvalidInput("RectMatrix: empty rows");
    RectMatrix m(static_cast<int>(rows.size()), static_cast<int>(n));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != n) throw InvalidInput("RectMatrix: ragged rows");
      for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(rows[i][j])) throw InvalidInput("RectMatrix: non-finite entry");
        m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
      }
    }
    return m;
  }

  static RectMatrix identity(int n) {
    RectMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  RectMatrix transposed() const {
    RectMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double frobenius() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend RectMatrix operator+(const RectMatrix& a, const RectMatrix& b) {
    check_same_shape(a, b, "+");
    RectMatrix r(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = a.data_[k] + b.data_[k];
    return r;
  }
  friend RectMatrix operator-(const RectMatrix& a, const RectMatrix& b) {
    check_same_shape(a, b, "-");
    RectMatrix r(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = a.data_[k] - b.data_[k];
    return r;
  }
  friend RectMatrix operator-(const RectMatrix& a) { return -1.0 * a; }
  friend RectMatrix operator*(double s, const RectMatrix& a) {
    RectMatrix r(a.rows_, a.cols_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = s * a.data_[k];
    return r;
  }
  friend RectMatrix operator*(const RectMatrix& a, double s) { return s * a; }

  friend RectMatrix operator*(const RectMatrix& a, const RectMatrix& b) {
    if (a.cols_ != b.rows_) throw InvalidInput("RectMatrix: incompatible dimensions in product");
    RectMatrix r(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (int j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

  friend bool operator==(const RectMatrix& a, const RectMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  static void check_same_shape(const RectMatrix& a, const RectMatrix& b, const char* op) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
      throw InvalidInput(std::string("RectMatrix: shape mismatch in ") + op);
  }

  int rows_, cols_;
  std::vector<double> data_;
};

// Dense real symmetric n x n matrix; symmetry is enforced on build, so
// entry (i,j) equals entry (j,i) exactly.
class SymMatrix {
 public:
  explicit SymMatrix(int n) : n_(n) {
    if (n <= 0) throw InvalidInput("SymMatrix: dimension must be positive");
    data_.assign(static_cast<std::size_t>(n) * n, 0.0);
  }

  // Requires input symmetric up to 1e-12 relative; stores the exact average.
  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    RectMatrix r = RectMatrix::from_rows(rows);
    if (r.rows() != r.cols()) throw InvalidInput("SymMatrix: not square");
    const double scale = 1.0 + r.max_abs();
    for (int i = 0; i < r.rows(); ++i)
      for (int j = i + 1; j < r.cols(); ++j)
        if (std::abs(r(i, j) - r(j, i)) > 1e-12 * scale)
          throw InvalidInput("SymMatrix: input not symmetric");
    return symmetrized(r);
  }

  // (A + A^T)/2 for deliberate symmetrization of nearly-symmetric data.
  static SymMatrix symmetrized(const RectMatrix& a) {
    if (a.rows() != a.cols()) throw InvalidInput("SymMatrix: not square");
    if (!a.all_finite()) throw InvalidInput("SymMatrix: non-finite entry");
    SymMatrix s(a.rows());
    for (int i = 0; i < a.rows(); ++i) {
      s.set(i, i, a(i, i));
      for (int j = i + 1; j < a.cols(); ++j) s.set(i, j, 0.5 * (a(i, j) + a(j, i)));
    }
    return s;
  }

  static SymMatrix diag(const std::vector<double>& d) {
    SymMatrix s(static_cast<int>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!std::isfinite(d[i])) throw InvalidInput("SymMatrix: non-finite entry");
      s.set(static_cast<int>(i), static_cast<int>(i), d[i]);
    }
    return s;
  }

  static SymMatrix identity(int n) {
    SymMatrix s(n);
    for (int i = 0; i < n; ++i) s.set(i, i, 1.0);
    return s;
  }

  int dim() const { return n_; }

  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * n_ + j]; }

  void set(int i, int j, double v) {
    data_[static_cast<std::size_t>(i) * n_ + j] = v;
    data_[static_cast<std::size_t>(j) * n_ + i] = v;
  }

  RectMatrix to_rect() const {
    RectMatrix r(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) r(i, j) = (*this)(i, j);
    return r;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double frobenius() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
    check_same_dim(a, b);
    SymMatrix r(a.n_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = a.data_[k] + b.data_[k];
    return r;
  }
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
    check_same_dim(a, b);
    SymMatrix r(a.n_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = a.data_[k] - b.data_[k];
    return r;
  }
  friend SymMatrix operator-(const SymMatrix& a) { return -1.0 * a; }
  friend SymMatrix operator*(double s, const SymMatrix& a) {
    SymMatrix r(a.n_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = s * a.data_[k];
    return r;
  }
  friend SymMatrix operator*(const SymMatrix& a, double s) { return s * a; }

  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.n_ == b.n_ && a.data_ == b.data_;
  }

 private:
  static void check_same_dim(const SymMatrix& a, const SymMatrix& b) {
    if (a.n_ != b.n_) throw InvalidInput("SymMatrix: dimension mismatch");
  }

  int n_;
  std::vector<double> data_;
};

// B^T B, assembled symmetric entry by entry.
inline SymMatrix gram(const RectMatrix& b) {
  if (b.rows() <= 0 || b.cols() <= 0) throw InvalidInput("gram: empty matrix");
  SymMatrix n(b.cols());
  for (int i = 0; i < b.cols(); ++i)
    for (int j = i; j < b.cols(); ++j) {
      double s = 0.0;
      for (int k = 0; k < b.rows(); ++k) s += b(k, i) * b(k, j);
      n.set(i, j, s);
    }
  return n;
}

// K^T Q K, symmetrized. K must have at least one column.
inline SymMatrix congruence(const SymMatrix& q, const RectMatrix& k) {
  if (k.rows() != q.dim()) throw InvalidInput("congruence: dimension mismatch");
  if (k.cols() <= 0) throw InvalidInput("congruence: empty basis");
  return SymMatrix::symmetrized(k.transposed() * q.to_rect() * k);
}

// Q - mu * N.
inline SymMatrix shifted(const SymMatrix& q, double mu, const SymMatrix& n) {
  if (q.dim() != n.dim()) throw InvalidInput("shifted: dimension mismatch");
  SymMatrix r(q.dim());
  for (int i = 0; i < q.dim(); ++i)
    for (int j = i; j < q.dim(); ++j) r.set(i, j, q(i, j) - mu * n(i, j));
  return r;
}

inline std::ostream& operator<<(std::ostream& os, const RectMatrix& m) {
  os << "[";
  for (int i = 0; i < m.rows(); ++i) {
    os << (i ? "; " : "");
    for (int j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j);
  }
  return os << "] (" << m.rows() << "x" << m.cols() << ")";
}

inline std::ostream& operator<<(std::ostream& os, const SymMatrix& m) { return os << m.to_rect(); }

}  // namespace finsler
