#pragma once

#include "mortcast/types.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <variant>

namespace mortcast {

/// Retain a fixed number of components.
struct FixedK {
  int k = 6;
};

/// Retain the count minimizing consecutive eigenvalue ratios.
struct EigenvalueRatio {
  int kmax = 10;
  double tau = 1e-12;
};

using ComponentSelector = std::variant<FixedK, EigenvalueRatio>;

std::string describe(const ComponentSelector& selector);

/// Principal component decomposition of a panel (rows = years, columns =
/// grid points) under the plain dot product.
struct FpcaModel {
  Vector mu;
  Matrix psi;        // p x K, orthonormal columns
  Vector lambda;     // K retained eigenvalues, non-increasing
  Vector lambda_all; // full spectrum of the covariance, non-increasing
  Matrix scores;     // n x K
  Matrix residuals;  // n x p

  int k() const { return static_cast<int>(psi.cols()); }
  /// mu + scores * psi^T for every year.
  Matrix reconstruction() const;
};

enum class MftsScaling {
  PerAge,  // centre and divide by each age's standard deviation
  Scalar,  // centre per age, divide by one pooled standard deviation
  None     // centre only
};

struct StandardizationRecord {
  Vector center_f, center_m;
  Vector scale_f, scale_m;
};

struct MftsModel {
  FpcaModel stacked;  // grid of 2p: female block first, then male
  StandardizationRecord standardization;
  Eigen::Index p = 0;
};

struct MultilevelModel {
  Vector mu_f, mu_m;
  FpcaModel common;
  FpcaModel resid_f, resid_m;
};

/// Throws DegenerateCovarianceError when the panel has no variance.
FpcaModel fit_ufts(const Matrix& Z, const ComponentSelector& selector);

/// Same decomposition, but a zero-variance panel yields an empty-score model
/// instead of an error. Used where a null component is legitimate.
FpcaModel fit_components(const Matrix& Z, const ComponentSelector& selector,
                         bool allow_degenerate);

int select_k_evr(const Vector& lambda_all, int kmax, double tau = 1e-12);

MftsModel fit_mfts(const Matrix& Zf, const Matrix& Zm, const ComponentSelector& selector,
                   MftsScaling scaling = MftsScaling::PerAge);

MultilevelModel fit_mlfts(const Matrix& Zf, const Matrix& Zm, const ComponentSelector& selector);

/// Covariance with divisor n - 1.
Matrix sample_covariance(const Matrix& Z);

nlohmann::json to_json(const FpcaModel& model);
FpcaModel fpca_from_json(const nlohmann::json& j);

}  // namespace mortcast
