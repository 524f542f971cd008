#include "epsflow/elastic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace epsflow {

namespace {

// Returns the S0 basis matrices used by the manifold coordinates.
void basis_matrices(double B[5][3][3]) {
  double q[5] = {0, 0, 0, 0, 0};
  for (int a = 0; a < 5; ++a) {
    q[a] = 1.0;
    coords_to_matrix(q, B[a]);
    q[a] = 0.0;
  }
}

}  // namespace

PositivityReport check_positivity(double L1, double L2, double L3) {
  PositivityReport rep;
  rep.lhs = {L1 + L2, 2.0 * L1 - L2, 6.0 * L1 + L2 + 10.0 * L3};
  rep.margin = std::min({rep.lhs[0], rep.lhs[1], rep.lhs[2]});
  rep.positive = rep.margin > 0.0;
  return rep;
}

double ldg_density(const double* G, double L1, double L2, double L3) {
  double B[5][3][3];
  basis_matrices(B);
  // dQ[i][k][j] = d_j Q_ik
  double dQ[3][3][3] = {};
  for (int a = 0; a < 5; ++a)
    for (int j = 0; j < 3; ++j) {
      const double g = G[a * 3 + j];
      if (g == 0.0) continue;
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) dQ[i][k][j] += g * B[a][i][k];
    }
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        t1 += dQ[i][k][j] * dQ[i][k][j];
        t2 += dQ[i][k][j] * dQ[i][j][k];
      }
  for (int i = 0; i < 3; ++i) {
    double div_i = 0.0;
    for (int j = 0; j < 3; ++j) div_i += dQ[i][j][j];
    t3 += div_i * div_i;
  }
  return L1 * t1 + L2 * t2 + L3 * t3;
}

std::vector<double> assemble_ldg_form(double L1, double L2, double L3) {
  double B[5][3][3];
  basis_matrices(B);
  std::vector<double> A(15 * 15, 0.0);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      double P[3][3];  // (B_a B_b)_{ml}
      for (int m = 0; m < 3; ++m)
        for (int l = 0; l < 3; ++l) {
          double v = 0.0;
          for (int r = 0; r < 3; ++r) v += B[a][m][r] * B[b][r][l];
          P[m][l] = v;
        }
      for (int m = 0; m < 3; ++m)
        for (int l = 0; l < 3; ++l) {
          double v = L2 * P[l][m] + L3 * P[m][l];
          if (a == b && m == l) v += L1;
          A[static_cast<std::size_t>((a * 3 + m) * 15 + (b * 3 + l))] = v;
        }
    }
  // symmetrize (the assembly is symmetric up to rounding)
  for (int r = 0; r < 15; ++r)
    for (int c = r + 1; c < 15; ++c) {
      const double v = 0.5 * (A[static_cast<std::size_t>(r * 15 + c)] +
                              A[static_cast<std::size_t>(c * 15 + r)]);
      A[static_cast<std::size_t>(r * 15 + c)] = v;
      A[static_cast<std::size_t>(c * 15 + r)] = v;
    }
  return A;
}

void ElasticModel::finalize() {
  const int n = 3 * k_;
  Eigen::MatrixXd A(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) A(r, c) = form_[static_cast<std::size_t>(r * n + c)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  lambda_min_ = es.eigenvalues().minCoeff();
  lambda_max_ = es.eigenvalues().maxCoeff();
  if (lambda_min_ <= 0.0)
    throw InputDomainError("ElasticModel: assembled form is not positive definite");
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      auto& blk = blocks_[static_cast<std::size_t>(i * 3 + j)];
      blk.assign(static_cast<std::size_t>(k_ * k_), 0.0);
      for (int a = 0; a < k_; ++a)
        for (int b = 0; b < k_; ++b)
          blk[static_cast<std::size_t>(a * k_ + b)] =
              form_[static_cast<std::size_t>((a * 3 + i) * n + (b * 3 + j))];
    }
}

ElasticModel ElasticModel::isotropic(int k) {
  if (k != 3 && k != 5) throw InputDomainError("ElasticModel::isotropic: k must be 3 or 5");
  ElasticModel m;
  m.kind_ = ElasticKind::Isotropic;
  m.k_ = k;
  const int n = 3 * k;
  m.form_.assign(static_cast<std::size_t>(n * n), 0.0);
  for (int r = 0; r < n; ++r) m.form_[static_cast<std::size_t>(r * n + r)] = 1.0;
  m.finalize();
  return m;
}

ElasticModel ElasticModel::ldg(double L1, double L2, double L3) {
  const auto rep = check_positivity(L1, L2, L3);
  if (!rep.positive)
    throw InputDomainError("ElasticModel::ldg: elastic constants violate positivity");
  ElasticModel m;
  m.kind_ = ElasticKind::LdG;
  m.k_ = 5;
  m.L1_ = L1;
  m.L2_ = L2;
  m.L3_ = L3;
  m.form_ = assemble_ldg_form(L1, L2, L3);
  m.finalize();
  return m;
}

ElasticModel ElasticModel::general(int k, std::vector<double> form) {
  if (k != 3 && k != 5) throw InputDomainError("ElasticModel::general: k must be 3 or 5");
  const std::size_t n = static_cast<std::size_t>(3 * k);
  if (form.size() != n * n)
    throw InputDomainError("ElasticModel::general: coefficient array must be (3k)x(3k)");
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = r + 1; c < n; ++c)
      if (std::abs(form[r * n + c] - form[c * n + r]) >
          1e-10 * (1.0 + std::abs(form[r * n + c])))
        throw InputDomainError("ElasticModel::general: coefficient array must be symmetric");
  ElasticModel m;
  m.kind_ = ElasticKind::GeneralConstant;
  m.k_ = k;
  m.form_ = std::move(form);
  m.finalize();
  return m;
}

double ElasticModel::density(const double* G) const {
  const int n = 3 * k_;
  double acc = 0.0;
  for (int r = 0; r < n; ++r) {
    if (G[r] == 0.0) continue;
    double row = 0.0;
    const double* Ar = form_.data() + static_cast<std::size_t>(r * n);
    for (int c = 0; c < n; ++c) row += Ar[c] * G[c];
    acc += G[r] * row;
  }
  return acc;
}

void ElasticModel::set_weight(std::function<double(const Vec3&)> w) { weight_ = std::move(w); }

}  // namespace epsflow
