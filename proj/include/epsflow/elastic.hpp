#pragma once

#include <array>
#include <functional>
#include <vector>

#include "epsflow/errors.hpp"
#include "epsflow/manifold.hpp"

namespace epsflow {

enum class ElasticKind { Isotropic, LdG, GeneralConstant };

struct PositivityReport {
  bool positive = false;
  double margin = 0.0;                // min of the three left-hand sides
  std::array<double, 3> lhs{};        // L1+L2, 2L1-L2, 6L1+L2+10L3
};

// Closed-form positivity conditions for the three-constant density.
PositivityReport check_positivity(double L1, double L2, double L3);

// Pointwise three-constant density from a 5x3 coordinate gradient
// (G[alpha*3 + j] = d_j q^alpha), evaluated by reconstructing d_j Q_ik and
// summing the three contractions directly.
double ldg_density(const double* G, double L1, double L2, double L3);

// Quadratic elastic form W on R^{k x 3} with ellipticity bounds cached from
// an eigendecomposition of the assembled (3k)x(3k) symmetric matrix.
class ElasticModel {
 public:
  static ElasticModel isotropic(int k);
  static ElasticModel ldg(double L1, double L2, double L3);
  static ElasticModel general(int k, std::vector<double> form);  // (3k)^2 row-major

  ElasticKind kind() const { return kind_; }
  int dim() const { return k_; }
  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }
  double L1() const { return L1_; }
  double L2() const { return L2_; }
  double L3() const { return L3_; }

  // W(G) with G row-major k x 3.
  double density(const double* G) const;

  // Symmetric form matrix, row-major (3k)x(3k), index (alpha*3+i).
  const std::vector<double>& form() const { return form_; }

  // k x k block A_ij with entries block(i,j)[alpha*k+beta].
  const std::vector<double>& block(int i, int j) const {
    return blocks_[static_cast<std::size_t>(i * 3 + j)];
  }

  // Optional scalar weight a(x); (B1) requires ||1 - a||_C1 <= 1/2.
  void set_weight(std::function<double(const Vec3&)> w);
  bool has_weight() const { return static_cast<bool>(weight_); }
  double weight(const Vec3& x) const { return weight_ ? weight_(x) : 1.0; }

 private:
  ElasticModel() = default;
  void finalize();  // symmetrize, cache blocks and eigen bounds

  ElasticKind kind_ = ElasticKind::Isotropic;
  int k_ = 3;
  double L1_ = 0, L2_ = 0, L3_ = 0;
  double lambda_min_ = 0, lambda_max_ = 0;
  std::vector<double> form_;
  std::array<std::vector<double>, 9> blocks_;
  std::function<double(const Vec3&)> weight_;
};

// Assembles the (3k)x(3k) symmetric matrix of the three-constant form
// (k = 5); exposed so tests can run the eigenvalue-sign oracle on it.
std::vector<double> assemble_ldg_form(double L1, double L2, double L3);

}  // namespace epsflow
