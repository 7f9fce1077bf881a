#pragma once

// Dense complex matrices for small n, Hermitian / positive definite wrappers,
// the Hermitian eigensolver and the spectral functional calculus.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "meanlab/errors.hpp"

namespace meanlab {

using Complex = std::complex<double>;

inline constexpr double kHermiticityRejectTol = 1e-8;
inline constexpr double kReconTol = 1e-12;
inline constexpr double kJacobiOffTol = 1e-14;
inline constexpr int kJacobiMaxSweeps = 100;

class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n), data_(n * n) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix diagonal(std::span<const double> d) {
    Matrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static Matrix diagonal(std::initializer_list<double> d) {
    return diagonal(std::span<const double>(d.begin(), d.size()));
  }

  // Row-major nested initializer; rows must be square.
  static Matrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
    Matrix m(rows.size());
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != rows.size()) throw DimMismatch("from_rows: matrix must be square");
      std::size_t j = 0;
      for (const auto& v : row) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  std::size_t dim() const noexcept { return n_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  std::span<const Complex> data() const noexcept { return data_; }

  Matrix adjoint() const {
    Matrix r(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  Complex trace() const {
    Complex t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(Complex s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  Matrix& operator/=(double s) {
    for (auto& v : data_) v /= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator-(Matrix a) { return a *= -1.0; }
  friend Matrix operator*(Matrix a, Complex s) { return a *= s; }
  friend Matrix operator*(Complex s, Matrix a) { return a *= s; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }
  friend Matrix operator/(Matrix a, double s) { return a /= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    a.check_same(b);
    const std::size_t n = a.n_;
    Matrix r(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const Complex aik = a(i, k);
        if (aik == Complex(0.0)) continue;
        for (std::size_t j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

 private:
  void check_same(const Matrix& o) const {
    if (o.n_ != n_)
      throw DimMismatch("matrix dimensions differ: " + std::to_string(n_) + " vs " +
                        std::to_string(o.n_));
  }

  std::size_t n_ = 0;
  std::vector<Complex> data_;
};

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

// Gauss-Jordan with partial pivoting; throws SingularError below a relative pivot floor.
inline Matrix inverse(const Matrix& a) {
  const std::size_t n = a.dim();
  Matrix work = a;
  Matrix inv = Matrix::identity(n);
  const double floor = 1e-14 * std::max(1.0, a.max_abs());
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(work(r, col)) > std::abs(work(piv, col))) piv = r;
    if (std::abs(work(piv, col)) <= floor) throw SingularError("inverse: matrix is singular");
    if (piv != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(work(piv, j), work(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    const Complex d = work(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      work(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const Complex f = work(r, col);
      if (f == Complex(0.0)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        work(r, j) -= f * work(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

// n x n complex matrix with A = A*. Construction symmetrizes (M + M*)/2 and
// rejects inputs whose asymmetry exceeds 1e-8 relative to ||M||_F.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  explicit HermitianMatrix(const Matrix& m) : m_(m) {
    if (m.dim() == 0) throw DomainError("HermitianMatrix: dim must be >= 1");
    const Matrix adj = m.adjoint();
    const double asym = (m - adj).frobenius_norm();
    const double scale = m.frobenius_norm();
    if (asym > kHermiticityRejectTol * scale)
      throw NotHermitian("HermitianMatrix: asymmetry " + std::to_string(asym) +
                         " exceeds tolerance relative to norm " + std::to_string(scale));
    m_ = (m + adj) * 0.5;
    for (std::size_t i = 0; i < m_.dim(); ++i) m_(i, i) = m_(i, i).real();
  }

  static HermitianMatrix identity(std::size_t n) { return HermitianMatrix(Matrix::identity(n)); }
  static HermitianMatrix diagonal(std::initializer_list<double> d) {
    return HermitianMatrix(Matrix::diagonal(d));
  }

  std::size_t dim() const noexcept { return m_.dim(); }
  const Matrix& matrix() const noexcept { return m_; }
  operator const Matrix&() const noexcept { return m_; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  double trace() const { return m_.trace().real(); }
  double frobenius_norm() const { return m_.frobenius_norm(); }

  friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
    return HermitianMatrix(a.m_ + b.m_);
  }
  friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
    return HermitianMatrix(a.m_ - b.m_);
  }
  friend HermitianMatrix operator*(double s, const HermitianMatrix& a) {
    return HermitianMatrix(a.m_ * s);
  }
  friend HermitianMatrix operator*(const HermitianMatrix& a, double s) { return s * a; }
  friend HermitianMatrix operator/(const HermitianMatrix& a, double s) {
    return HermitianMatrix(a.m_ / s);
  }

 private:
  Matrix m_;
};

struct Spectrum {
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // unitary, columns are eigenvectors
};

namespace detail {

inline Spectrum eig2(const HermitianMatrix& h) {
  const double a = h(0, 0).real();
  const double d = h(1, 1).real();
  const Complex b = h(0, 1);
  const double mid = 0.5 * (a + d);
  const double half_gap = 0.5 * (a - d);
  const double r = std::hypot(half_gap, std::abs(b));
  Spectrum s{{mid - r, mid + r}, Matrix::identity(2)};
  if (r == 0.0) return s;
  if (b == Complex(0.0)) {
    s.eigenvalues = {std::min(a, d), std::max(a, d)};
    if (a > d) s.eigenvectors = Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
    return s;
  }

  // Eigenvector of the larger eigenvalue; pick the cancellation-free form.
  const double lam = mid + r;
  Complex v0, v1;
  if (a <= d) {
    v0 = b;
    v1 = lam - a;
  } else {
    v0 = lam - d;
    v1 = std::conj(b);
  }
  const double nv = std::sqrt(std::norm(v0) + std::norm(v1));
  if (nv == 0.0) return s;
  v0 /= nv;
  v1 /= nv;
  // Columns: [orthogonal complement | v], eigenvalues ascending.
  s.eigenvectors(0, 0) = -std::conj(v1);
  s.eigenvectors(1, 0) = std::conj(v0);
  s.eigenvectors(0, 1) = v0;
  s.eigenvectors(1, 1) = v1;
  return s;
}

inline double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// Cyclic complex Jacobi. Each rotation J = [[c, s e], [-s conj(e), c]] on (p, q)
// with e = a_pq / |a_pq| annihilates the (p, q) entry of J* A J.
inline Spectrum eig_jacobi(const HermitianMatrix& h) {
  const std::size_t n = h.dim();
  Matrix a = h.matrix();
  Matrix v = Matrix::identity(n);
  const double target = kJacobiOffTol * std::max(a.frobenius_norm(), 1e-300);

  int sweep = 0;
  while (off_diagonal_norm(a) > target) {
    if (++sweep > kJacobiMaxSweeps)
      throw ConvergenceFailure("eig: Jacobi did not converge in " +
                               std::to_string(kJacobiMaxSweeps) + " sweeps");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        const Complex e = apq / mag;
        const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex jpq = s * e;               // J(p, q)
        const Complex jqp = -s * std::conj(e);   // J(q, p)

        // A <- A J (columns p, q), V <- V J.
        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * c + akq * jqp;
          a(k, q) = akp * jpq + akq * c;
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * c + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * c;
        }
        // A <- J* A (rows p, q).
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  Spectrum s{std::vector<double>(n), Matrix(n)};
  for (std::size_t c = 0; c < n; ++c) {
    s.eigenvalues[c] = a(order[c], order[c]).real();
    for (std::size_t r = 0; r < n; ++r) s.eigenvectors(r, c) = v(r, order[c]);
  }
  return s;
}

}  // namespace detail

// Closed form for dim <= 2, cyclic Jacobi otherwise.
inline Spectrum eig(const HermitianMatrix& h) {
  if (h.dim() == 1) return Spectrum{{h(0, 0).real()}, Matrix::identity(1)};
  if (h.dim() == 2) return detail::eig2(h);
  return detail::eig_jacobi(h);
}

inline Matrix reconstruct(const Spectrum& s) {
  const std::size_t n = s.eigenvectors.dim();
  Matrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        acc += s.eigenvectors(i, k) * s.eigenvalues[k] * std::conj(s.eigenvectors(j, k));
      r(i, j) = acc;
    }
  return r;
}

inline double pd_tolerance(const HermitianMatrix& h) {
  return 1e-12 * std::max(1.0, h.frobenius_norm());
}

// Hermitian matrix certified positive definite; keeps its spectrum so that
// the functional calculus does not re-diagonalize.
class PdMatrix {
 public:
  static PdMatrix certify(const HermitianMatrix& h) {
    Spectrum s = eig(h);
    const double tol = pd_tolerance(h);
    if (s.eigenvalues.front() <= tol)
      throw NotPositiveDefinite("matrix is not positive definite: min eigenvalue " +
                                std::to_string(s.eigenvalues.front()));
    return PdMatrix(h, std::move(s));
  }
  static PdMatrix certify(const Matrix& m) { return certify(HermitianMatrix(m)); }

  static PdMatrix identity(std::size_t n) { return certify(HermitianMatrix::identity(n)); }
  static PdMatrix diagonal(std::initializer_list<double> d) {
    return certify(HermitianMatrix::diagonal(d));
  }

  const HermitianMatrix& hermitian() const noexcept { return h_; }
  const Matrix& matrix() const noexcept { return h_.matrix(); }
  operator const HermitianMatrix&() const noexcept { return h_; }
  operator const Matrix&() const noexcept { return h_.matrix(); }
  const Complex& operator()(std::size_t i, std::size_t j) const { return h_(i, j); }

  std::size_t dim() const noexcept { return h_.dim(); }
  double min_eigenvalue() const noexcept { return spectrum_.eigenvalues.front(); }
  double max_eigenvalue() const noexcept { return spectrum_.eigenvalues.back(); }
  const Spectrum& spectrum() const noexcept { return spectrum_; }
  double trace() const { return h_.trace(); }
  double frobenius_norm() const { return h_.frobenius_norm(); }

 private:
  PdMatrix(HermitianMatrix h, Spectrum s) : h_(std::move(h)), spectrum_(std::move(s)) {}

  template <class F>
  friend PdMatrix map_spectrum_pd(const PdMatrix& a, F&& f);

  HermitianMatrix h_;
  Spectrum spectrum_;
};

// Open interval (lo, hi) on which a scalar function is declared.
struct ScalarDomain {
  double lo = 0.0;
  double hi = HUGE_VAL;

  static constexpr ScalarDomain positive() { return {0.0, HUGE_VAL}; }
  static constexpr ScalarDomain real_line() { return {-HUGE_VAL, HUGE_VAL}; }
  bool contains(double x) const { return x > lo && x < hi; }
};

template <class F>
HermitianMatrix func_calc(const Spectrum& s, F&& f, ScalarDomain dom = ScalarDomain::real_line()) {
  Spectrum mapped{s.eigenvalues, s.eigenvectors};
  for (double& l : mapped.eigenvalues) {
    if (!dom.contains(l))
      throw DomainError("func_calc: eigenvalue " + std::to_string(l) +
                        " outside the function's domain");
    l = f(l);
    if (!std::isfinite(l)) throw DomainError("func_calc: function value is not finite");
  }
  return HermitianMatrix(reconstruct(mapped));
}

template <class F>
HermitianMatrix func_calc(const HermitianMatrix& a, F&& f,
                          ScalarDomain dom = ScalarDomain::real_line()) {
  return func_calc(eig(a), std::forward<F>(f), dom);
}

template <class F>
HermitianMatrix func_calc(const PdMatrix& a, F&& f, ScalarDomain dom = ScalarDomain::positive()) {
  return func_calc(a.spectrum(), std::forward<F>(f), dom);
}

// f must map (0, inf) into (0, inf); the image keeps the eigenvectors of a.
template <class F>
PdMatrix map_spectrum_pd(const PdMatrix& a, F&& f) {
  Spectrum mapped{a.spectrum_.eigenvalues, a.spectrum_.eigenvectors};
  for (double& l : mapped.eigenvalues) {
    l = f(l);
    if (!std::isfinite(l)) throw DomainError("spectral map overflowed");
  }
  std::vector<std::size_t> order(mapped.eigenvalues.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return mapped.eigenvalues[i] < mapped.eigenvalues[j];
  });
  Spectrum sorted{std::vector<double>(order.size()), Matrix(order.size())};
  for (std::size_t c = 0; c < order.size(); ++c) {
    sorted.eigenvalues[c] = mapped.eigenvalues[order[c]];
    for (std::size_t r = 0; r < order.size(); ++r)
      sorted.eigenvectors(r, c) = mapped.eigenvectors(r, order[c]);
  }
  HermitianMatrix h(reconstruct(sorted));
  if (sorted.eigenvalues.front() <= pd_tolerance(h))
    throw DomainError("spectral map left the positive definite cone");
  return PdMatrix(std::move(h), std::move(sorted));
}

inline PdMatrix mpow(const PdMatrix& a, double p) {
  if (p == 1.0) return a;
  return map_spectrum_pd(a, [p](double l) { return std::pow(l, p); });
}

inline PdMatrix msqrt(const PdMatrix& a) {
  return map_spectrum_pd(a, [](double l) { return std::sqrt(l); });
}

inline PdMatrix minv(const PdMatrix& a) {
  return map_spectrum_pd(a, [](double l) { return 1.0 / l; });
}

// C A C*; C must be invertible.
inline HermitianMatrix congruence(const Matrix& c, const HermitianMatrix& a) {
  if (c.dim() != a.dim()) throw DimMismatch("congruence: dimension mismatch");
  const HermitianMatrix gram(c.adjoint() * c);
  const double smin2 = eig(gram).eigenvalues.front();
  const double scale = c.frobenius_norm();
  if (smin2 <= 1e-24 * scale * scale) throw SingularError("congruence: C is not invertible");
  return HermitianMatrix(c * a.matrix() * c.adjoint());
}

inline double min_eigenvalue(const HermitianMatrix& h) { return eig(h).eigenvalues.front(); }

inline bool loewner_leq(const HermitianMatrix& a, const HermitianMatrix& b, double tol) {
  if (a.dim() != b.dim()) throw DimMismatch("loewner_leq: dimension mismatch");
  return min_eigenvalue(b - a) >= -tol;
}

struct PauliBasis {
  HermitianMatrix sigma_z;
  HermitianMatrix sigma_x;
  HermitianMatrix u;  // (sigma_z + sigma_x)/sqrt(2); swaps sigma_z and sigma_x under conjugation
};

inline PauliBasis pauli_basis() {
  const HermitianMatrix sz(Matrix::from_rows({{1.0, 0.0}, {0.0, -1.0}}));
  const HermitianMatrix sx(Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}}));
  return {sz, sx, (sz + sx) / std::sqrt(2.0)};
}

}  // namespace meanlab
