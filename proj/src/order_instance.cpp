#include "fdivkit/order_instance.hpp"

#include <cmath>

#include "fdivkit/generator.hpp"
#include "fdivkit/transport.hpp"

namespace fdivkit {

namespace {

constexpr int kMaxScale = 512;

void check_equal_row_sums(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.cols() < 1) {
    throw ValidationError("order instance matrices must share a positive shape");
  }
  if (a.minCoeff() < 0.0 || b.minCoeff() < 0.0) {
    throw ValidationError("order instance matrices must be nonnegative");
  }
  const Vector ra = a.rowwise().sum();
  const Vector rb = b.rowwise().sum();
  if ((ra - rb).lpNorm<Eigen::Infinity>() > kRowSumTol) {
    throw ValidationError("order instance matrices have mismatched row sums");
  }
}

Quantizer row_projection(int scale) {
  Quantizer q;
  q.num_codes = scale;
  q.assignment.resize(scale * scale);
  for (int i = 0; i < scale; ++i) {
    for (int j = 0; j < scale; ++j) q.assignment[i * scale + j] = i;
  }
  return q;
}

Quantizer column_projection(int scale) {
  Quantizer q;
  q.num_codes = scale;
  q.assignment.resize(scale * scale);
  for (int i = 0; i < scale; ++i) {
    for (int j = 0; j < scale; ++j) q.assignment[i * scale + j] = j;
  }
  return q;
}

OrderInstance build_generator_mode(const Matrix& a, const Matrix& b) {
  const int rows = static_cast<int>(a.rows());  // k - 1
  const int m = static_cast<int>(a.cols());
  const int k = rows + 1;

  const Vector row_sums = a.rowwise().sum();
  const double needed = std::max(row_sums.lpNorm<Eigen::Infinity>(), static_cast<double>(m));
  const int scale = static_cast<int>(std::floor(needed)) + 1;
  if (scale > kMaxScale) throw ValidationError("order instance scale exceeds guard");

  Matrix a_ext = Matrix::Zero(rows, scale);
  Matrix b_ext = Matrix::Zero(rows, scale);
  a_ext.leftCols(m) = a;
  b_ext.leftCols(m) = b;
  a_ext.col(m) = Vector::Constant(rows, static_cast<double>(scale)) - row_sums;
  b_ext.col(m) = Vector::Constant(rows, static_cast<double>(scale)) - b.rowwise().sum();

  Matrix conditionals(k, scale * scale);
  for (int l = 0; l < rows; ++l) {
    const Matrix z = transport_matrix(a_ext.row(l) / scale, b_ext.row(l) / scale);
    for (int i = 0; i < scale; ++i) {
      for (int j = 0; j < scale; ++j) conditionals(l, i * scale + j) = z(i, j);
    }
  }
  conditionals.row(k - 1).setConstant(1.0 / (static_cast<double>(scale) * scale));

  OrderInstance inst;
  inst.mode = OrderInstanceMode::Generator;
  inst.scale = scale;
  inst.a_ext = a_ext;
  inst.b_ext = b_ext;
  inst.q1 = row_projection(scale);
  inst.q2 = column_projection(scale);
  inst.experiment =
      validate_experiment(Vector::Constant(k, 1.0 / k), conditionals);

  // Build-time identity check with the total-variation generator.
  const Generator tv = make_generator("tv", k);
  for (int side = 0; side < 2; ++side) {
    const Quantizer& q = side == 0 ? inst.q1 : inst.q2;
    const Matrix& ext = side == 0 ? a_ext : b_ext;
    double expected = 0.0;
    for (int j = 0; j < scale; ++j) expected += tv.eval(ext.col(j));
    expected /= scale;
    const double actual = f_divergence_quantized(inst.experiment.conditionals, tv, q);
    if (std::abs(actual - expected) > 1e-10) {
      throw std::runtime_error("order instance failed its build-time divergence identity");
    }
  }
  return inst;
}

OrderInstance build_uncertainty_mode(const Matrix& a, const Matrix& b) {
  const int k = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  for (int j = 0; j < m; ++j) {
    if (!is_simplex(a.col(j), 1e-9) || !is_simplex(b.col(j), 1e-9)) {
      throw ValidationError("uncertainty-mode columns must lie in the simplex");
    }
  }

  const Vector v = a.rowwise().sum() / m;
  // Smallest positive integer M0 with (1/k)(1 + 1/M0) - v_l / M0 >= 0.
  const double need = static_cast<double>(k) * v.maxCoeff() - 1.0;
  const int m0 = std::max(1, static_cast<int>(std::ceil(need - 1e-12)));
  Vector v0 = Vector::Constant(k, (1.0 + 1.0 / m0) / k) - v / m0;
  v0 = v0.cwiseMax(0.0);
  v0 /= v0.sum();

  const int scale = (m0 + 1) * m;
  if (scale > kMaxScale) throw ValidationError("order instance scale exceeds guard");

  Matrix a_ext(k, scale);
  Matrix b_ext(k, scale);
  a_ext.leftCols(m) = a;
  b_ext.leftCols(m) = b;
  for (int j = m; j < scale; ++j) {
    a_ext.col(j) = v0;
    b_ext.col(j) = v0;
  }

  const double cell = static_cast<double>(k) * k / (static_cast<double>(scale) * scale);
  Matrix conditionals(k, scale * scale);
  for (int l = 0; l < k; ++l) {
    for (int i = 0; i < scale; ++i) {
      for (int j = 0; j < scale; ++j) {
        conditionals(l, i * scale + j) = cell * a_ext(l, i) * b_ext(l, j);
      }
    }
  }

  OrderInstance inst;
  inst.mode = OrderInstanceMode::Uncertainty;
  inst.scale = scale;
  inst.a_ext = a_ext;
  inst.b_ext = b_ext;
  inst.q1 = row_projection(scale);
  inst.q2 = column_projection(scale);
  inst.experiment =
      validate_experiment(Vector::Constant(k, 1.0 / k), conditionals);

  // Build-time identity: cell posteriors under q1 are the extended columns.
  const Matrix masses = cell_masses(inst.experiment.conditionals, inst.q1);
  for (int i = 0; i < scale; ++i) {
    const Vector joint = inst.experiment.prior.cwiseProduct(masses.col(i));
    const Vector post = joint / joint.sum();
    if ((post - a_ext.col(i)).lpNorm<Eigen::Infinity>() > 1e-10) {
      throw std::runtime_error("order instance failed its build-time posterior identity");
    }
  }
  return inst;
}

}  // namespace

OrderInstance build_order_instance(const Matrix& a, const Matrix& b, OrderInstanceMode mode) {
  check_equal_row_sums(a, b);
  if (mode == OrderInstanceMode::Generator) return build_generator_mode(a, b);
  return build_uncertainty_mode(a, b);
}

}  // namespace fdivkit
