#pragma once

// Bernstein-form polynomial algebra on an arbitrary interval [t0, tf].
//
// A BernsteinPoly stores its control points column-wise: coeffs() is a
// dim x (m+1) matrix whose column j is the coefficient c_{j,m}. All
// operations are pure functions returning new values.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace bernloc {

/// Highest supported degree. Binomial coefficients are formed by a
/// floating-point multiplicative recurrence; binom(1000, 500) ~ 2.7e299
/// is still finite in double precision. Density estimates over several
/// hundred samples need degrees well above 100.
inline constexpr int kMaxDegree = 1000;

template <typename Scalar>
Scalar binomial(int m, int j) {
  if (m < 0 || m > kMaxDegree) {
    throw std::domain_error("binomial: degree " + std::to_string(m) +
                            " outside [0, " + std::to_string(kMaxDegree) + "]");
  }
  if (j < 0 || j > m) return Scalar(0);
  j = std::min(j, m - j);
  Scalar c(1);
  for (int i = 1; i <= j; ++i) c = c * Scalar(m - j + i) / Scalar(i);
  return c;
}

template <typename Scalar>
class BernsteinPoly {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BernsteinPoly(Matrix coeffs, Scalar t0, Scalar tf)
      : coeffs_(std::move(coeffs)), t0_(t0), tf_(tf) {
    if (!(tf_ > t0_)) throw std::domain_error("BernsteinPoly: requires tf > t0");
    if (coeffs_.rows() < 1 || coeffs_.cols() < 1) {
      throw std::domain_error("BernsteinPoly: empty coefficient matrix");
    }
    if (coeffs_.cols() - 1 > kMaxDegree) {
      throw std::domain_error("BernsteinPoly: degree exceeds kMaxDegree");
    }
  }

  static BernsteinPoly constant(const Vector& value, int degree, Scalar t0, Scalar tf) {
    return BernsteinPoly(value.replicate(1, degree + 1), t0, tf);
  }

  static BernsteinPoly zero(int dim, int degree, Scalar t0, Scalar tf) {
    return BernsteinPoly(Matrix::Zero(dim, degree + 1), t0, tf);
  }

  /// Scalar-valued polynomial from a row of coefficients.
  static BernsteinPoly scalar(const Vector& coeffs, Scalar t0, Scalar tf) {
    return BernsteinPoly(coeffs.transpose(), t0, tf);
  }

  int degree() const { return static_cast<int>(coeffs_.cols()) - 1; }
  int dim() const { return static_cast<int>(coeffs_.rows()); }
  Scalar t0() const { return t0_; }
  Scalar tf() const { return tf_; }
  Scalar span() const { return tf_ - t0_; }
  const Matrix& coeffs() const { return coeffs_; }
  Vector coeff(int j) const { return coeffs_.col(j); }

  /// Coefficients of a scalar polynomial as a flat vector.
  Vector scalar_coeffs() const {
    if (dim() != 1) throw std::domain_error("scalar_coeffs: polynomial is not scalar-valued");
    return coeffs_.row(0).transpose();
  }

 private:
  Matrix coeffs_;
  Scalar t0_;
  Scalar tf_;
};

using BernsteinPolyd = BernsteinPoly<double>;

namespace detail {

template <typename Scalar>
void check_in_interval(Scalar t, Scalar t0, Scalar tf, const char* who) {
  // Relative slack absorbs round-off from accumulated time stamps.
  const Scalar slack = Scalar(1e-12) * std::max(Scalar(1), std::abs(tf) + std::abs(t0));
  if (!(t >= t0 - slack && t <= tf + slack)) {
    throw std::domain_error(std::string(who) + ": t = " + std::to_string(double(t)) +
                            " outside [" + std::to_string(double(t0)) + ", " +
                            std::to_string(double(tf)) + "]");
  }
}

template <typename Scalar>
void check_same_interval(const BernsteinPoly<Scalar>& f, const BernsteinPoly<Scalar>& g,
                         const char* who) {
  if (f.t0() != g.t0() || f.tf() != g.tf()) {
    throw std::domain_error(std::string(who) + ": interval mismatch");
  }
}

}  // namespace detail

/// b_{j,m}(t) = binom(m,j) (t-t0)^j (tf-t)^(m-j) / (tf-t0)^m.
template <typename Scalar>
Scalar basis(int j, int m, Scalar t, Scalar t0, Scalar tf) {
  if (m < 0 || j < 0 || j > m) {
    throw std::domain_error("basis: index j=" + std::to_string(j) + " invalid for degree " +
                            std::to_string(m));
  }
  if (!(tf > t0)) throw std::domain_error("basis: requires tf > t0");
  detail::check_in_interval(t, t0, tf, "basis");
  const Scalar s = std::clamp((t - t0) / (tf - t0), Scalar(0), Scalar(1));
  return binomial<Scalar>(m, j) * std::pow(s, j) * std::pow(Scalar(1) - s, m - j);
}

/// de Casteljau evaluation.
template <typename Scalar>
typename BernsteinPoly<Scalar>::Vector eval(const BernsteinPoly<Scalar>& p, Scalar t) {
  detail::check_in_interval(t, p.t0(), p.tf(), "eval");
  const Scalar s = std::clamp((t - p.t0()) / p.span(), Scalar(0), Scalar(1));
  const int m = p.degree();
  if (s == Scalar(0)) return p.coeff(0);
  if (s == Scalar(1)) return p.coeff(m);
  typename BernsteinPoly<Scalar>::Matrix work = p.coeffs();
  const Scalar u = Scalar(1) - s;
  for (int k = m; k > 0; --k) {
    for (int i = 0; i < k; ++i) work.col(i) = u * work.col(i) + s * work.col(i + 1);
  }
  return work.col(0);
}

template <typename Scalar>
Scalar eval_scalar(const BernsteinPoly<Scalar>& p, Scalar t) {
  return eval(p, t)(0);
}

/// Differentiation matrix in the same-degree representation: if c holds
/// the m+1 coefficients of a scalar polynomial, entries * c holds the m+1
/// coefficients of its derivative (degree-lowered difference, elevated
/// back by one). Entry (i, j) is the weight of c_j in derivative
/// coefficient i, so every row sums to zero.
template <typename Scalar>
struct DiffMatrix {
  typename BernsteinPoly<Scalar>::Matrix entries;
  Scalar t0;
  Scalar tf;
};

template <typename Scalar>
DiffMatrix<Scalar> diff_matrix(int m, Scalar t0, Scalar tf) {
  using Matrix = typename BernsteinPoly<Scalar>::Matrix;
  if (m < 0 || m > kMaxDegree) throw std::domain_error("diff_matrix: degree out of range");
  if (!(tf > t0)) throw std::domain_error("diff_matrix: requires tf > t0");
  if (m == 0) return {Matrix::Zero(1, 1), t0, tf};

  const Scalar rate = Scalar(m) / (tf - t0);
  Matrix lower = Matrix::Zero(m, m + 1);
  for (int i = 0; i < m; ++i) {
    lower(i, i) = -rate;
    lower(i, i + 1) = rate;
  }
  // Elevation m-1 -> m: a'_k = (k/m) a_{k-1} + (1 - k/m) a_k.
  Matrix elevate = Matrix::Zero(m + 1, m);
  for (int k = 0; k <= m; ++k) {
    const Scalar w = Scalar(k) / Scalar(m);
    if (k > 0) elevate(k, k - 1) = w;
    if (k < m) elevate(k, k) = Scalar(1) - w;
  }
  return {elevate * lower, t0, tf};
}

template <typename Scalar>
BernsteinPoly<Scalar> derivative(const BernsteinPoly<Scalar>& p) {
  if (p.degree() == 0) return BernsteinPoly<Scalar>::zero(p.dim(), 0, p.t0(), p.tf());
  const auto d = diff_matrix<Scalar>(p.degree(), p.t0(), p.tf());
  return BernsteinPoly<Scalar>(p.coeffs() * d.entries.transpose(), p.t0(), p.tf());
}

/// Definite integral over [t0, tf]: w * sum_j c_j with w = (tf - t0)/(m + 1).
template <typename Scalar>
Scalar integral_weight(int m, Scalar t0, Scalar tf) {
  return (tf - t0) / Scalar(m + 1);
}

template <typename Scalar>
typename BernsteinPoly<Scalar>::Vector integrate(const BernsteinPoly<Scalar>& p) {
  return integral_weight(p.degree(), p.t0(), p.tf()) * p.coeffs().rowwise().sum();
}

template <typename Scalar>
BernsteinPoly<Scalar> degree_elevate(const BernsteinPoly<Scalar>& p, int levels) {
  if (levels < 0) throw std::domain_error("degree_elevate: negative level count");
  using Matrix = typename BernsteinPoly<Scalar>::Matrix;
  Matrix c = p.coeffs();
  for (int r = 0; r < levels; ++r) {
    const int m = static_cast<int>(c.cols()) - 1;
    Matrix next(c.rows(), m + 2);
    next.col(0) = c.col(0);
    next.col(m + 1) = c.col(m);
    for (int k = 1; k <= m; ++k) {
      const Scalar w = Scalar(k) / Scalar(m + 1);
      next.col(k) = w * c.col(k - 1) + (Scalar(1) - w) * c.col(k);
    }
    c = std::move(next);
  }
  return BernsteinPoly<Scalar>(std::move(c), p.t0(), p.tf());
}

/// Pointwise sum. Lower-degree operand is elevated first.
template <typename Scalar>
BernsteinPoly<Scalar> sum(const BernsteinPoly<Scalar>& f, const BernsteinPoly<Scalar>& g) {
  detail::check_same_interval(f, g, "sum");
  if (f.dim() != g.dim()) throw std::domain_error("sum: dimension mismatch");
  if (f.degree() < g.degree()) return sum(degree_elevate(f, g.degree() - f.degree()), g);
  if (g.degree() < f.degree()) return sum(f, degree_elevate(g, f.degree() - g.degree()));
  return BernsteinPoly<Scalar>(f.coeffs() + g.coeffs(), f.t0(), f.tf());
}

template <typename Scalar>
BernsteinPoly<Scalar> scale(const BernsteinPoly<Scalar>& f, Scalar a) {
  return BernsteinPoly<Scalar>(a * f.coeffs(), f.t0(), f.tf());
}

/// Pointwise product of degrees m and n, giving degree m+n. Operands must
/// share a dimension (componentwise product) or one must be scalar-valued
/// (broadcast).
template <typename Scalar>
BernsteinPoly<Scalar> product(const BernsteinPoly<Scalar>& f, const BernsteinPoly<Scalar>& g) {
  detail::check_same_interval(f, g, "product");
  if (f.dim() != g.dim() && f.dim() != 1 && g.dim() != 1) {
    throw std::domain_error("product: dimension mismatch");
  }
  const int m = f.degree();
  const int n = g.degree();
  const int dim = std::max(f.dim(), g.dim());
  using Matrix = typename BernsteinPoly<Scalar>::Matrix;
  using Vector = typename BernsteinPoly<Scalar>::Vector;
  Matrix c = Matrix::Zero(dim, m + n + 1);
  auto column = [dim](const Matrix& a, int j) -> Vector {
    return a.rows() == 1 ? Vector(Vector::Constant(dim, a(0, j))) : Vector(a.col(j));
  };
  for (int k = 0; k <= m + n; ++k) {
    const Scalar denom = binomial<Scalar>(m + n, k);
    for (int j = std::max(0, k - n); j <= std::min(m, k); ++j) {
      const Scalar w = binomial<Scalar>(m, j) * binomial<Scalar>(n, k - j) / denom;
      c.col(k) += w * column(f.coeffs(), j).cwiseProduct(column(g.coeffs(), k - j));
    }
  }
  return BernsteinPoly<Scalar>(std::move(c), f.t0(), f.tf());
}

template <typename Scalar>
BernsteinPoly<Scalar> operator+(const BernsteinPoly<Scalar>& f, const BernsteinPoly<Scalar>& g) {
  return sum(f, g);
}

template <typename Scalar>
BernsteinPoly<Scalar> operator-(const BernsteinPoly<Scalar>& f, const BernsteinPoly<Scalar>& g) {
  return sum(f, scale(g, Scalar(-1)));
}

template <typename Scalar>
BernsteinPoly<Scalar> operator*(const BernsteinPoly<Scalar>& f, const BernsteinPoly<Scalar>& g) {
  return product(f, g);
}

template <typename Scalar>
BernsteinPoly<Scalar> operator*(Scalar a, const BernsteinPoly<Scalar>& f) {
  return scale(f, a);
}

/// ||p(t)||^2 as a scalar polynomial of degree 2m.
template <typename Scalar>
BernsteinPoly<Scalar> squared_norm(const BernsteinPoly<Scalar>& p) {
  const auto sq = product(p, p);
  return BernsteinPoly<Scalar>(sq.coeffs().colwise().sum(), p.t0(), p.tf());
}

/// Squared norms of velocity, acceleration and (optionally) the offset
/// from a fixed point, each a scalar polynomial of degree 2m.
template <typename Scalar>
struct SquaredNorms {
  BernsteinPoly<Scalar> velocity;
  BernsteinPoly<Scalar> acceleration;
  std::optional<BernsteinPoly<Scalar>> distance;
};

template <typename Scalar>
SquaredNorms<Scalar> squared_norm_polys(
    const BernsteinPoly<Scalar>& p,
    const std::optional<typename BernsteinPoly<Scalar>::Vector>& point = std::nullopt) {
  const auto vel = derivative(p);
  const auto acc = derivative(vel);
  std::optional<BernsteinPoly<Scalar>> dist;
  if (point) {
    if (point->size() != p.dim()) throw std::domain_error("squared_norm_polys: point dimension");
    dist = squared_norm(p - BernsteinPoly<Scalar>::constant(*point, p.degree(), p.t0(), p.tf()));
  }
  return {squared_norm(vel), squared_norm(acc), std::move(dist)};
}

/// Convex-hull range of a scalar polynomial: min and max coefficient.
template <typename Scalar>
std::pair<Scalar, Scalar> coeff_bounds(const BernsteinPoly<Scalar>& p) {
  if (p.dim() != 1) throw std::domain_error("coeff_bounds: polynomial is not scalar-valued");
  return {p.coeffs().minCoeff(), p.coeffs().maxCoeff()};
}

/// The same curve re-expressed on the sub-interval [a, b] of [t0, tf].
template <typename Scalar>
BernsteinPoly<Scalar> restrict_to(const BernsteinPoly<Scalar>& p, Scalar a, Scalar b) {
  detail::check_in_interval(a, p.t0(), p.tf(), "restrict_to");
  detail::check_in_interval(b, p.t0(), p.tf(), "restrict_to");
  if (!(b > a)) throw std::domain_error("restrict_to: requires b > a");
  using Matrix = typename BernsteinPoly<Scalar>::Matrix;
  const int m = p.degree();

  // Right half at a: the last entry of each de Casteljau level.
  auto split_right = [m](const Matrix& c, Scalar s) {
    Matrix work = c;
    Matrix right(c.rows(), m + 1);
    right.col(m) = work.col(m);
    for (int k = m; k > 0; --k) {
      for (int i = 0; i < k; ++i) work.col(i) = (Scalar(1) - s) * work.col(i) + s * work.col(i + 1);
      right.col(k - 1) = work.col(k - 1);
    }
    return right;
  };
  // Left half at b: the first entry of each level.
  auto split_left = [m](const Matrix& c, Scalar s) {
    Matrix work = c;
    Matrix left(c.rows(), m + 1);
    left.col(0) = work.col(0);
    for (int k = m; k > 0; --k) {
      for (int i = 0; i < k; ++i) work.col(i) = (Scalar(1) - s) * work.col(i) + s * work.col(i + 1);
      left.col(m - k + 1) = work.col(0);
    }
    return left;
  };

  const Scalar sa = std::clamp((a - p.t0()) / p.span(), Scalar(0), Scalar(1));
  const Matrix right = split_right(p.coeffs(), sa);
  const Scalar sb = std::clamp((b - a) / (p.tf() - a), Scalar(0), Scalar(1));
  return BernsteinPoly<Scalar>(split_left(right, sb), a, b);
}

}  // namespace bernloc
