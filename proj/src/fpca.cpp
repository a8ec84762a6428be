#include "mortcast/fpca.hpp"

#include "mortcast/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace mortcast {

std::string describe(const ComponentSelector& selector) {
  if (const auto* fixed = std::get_if<FixedK>(&selector)) return "K=" + std::to_string(fixed->k);
  return "EVR";
}

Matrix FpcaModel::reconstruction() const {
  Matrix out = scores * psi.transpose();
  out.rowwise() += mu.transpose();
  return out;
}

Matrix sample_covariance(const Matrix& Z) {
  const Vector mean = Z.colwise().mean().transpose();
  const Matrix centred = Z.rowwise() - mean.transpose();
  return (centred.transpose() * centred) / static_cast<double>(Z.rows() - 1);
}

int select_k_evr(const Vector& lambda_all, int kmax, double tau) {
  const auto len = static_cast<int>(lambda_all.size());
  if (len < 2) return 1;
  const double lead = lambda_all[0];
  if (!(lead > 0.0)) return 1;
  const int last = std::min(kmax, len - 1);
  int best = 1;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= last; ++k) {
    // lambda_k (1-based) sits at index k - 1.
    if (lambda_all[k - 1] < tau * lead) break;
    const double ratio = lambda_all[k] / lambda_all[k - 1];
    if (ratio < best_ratio) {
      best_ratio = ratio;
      best = k;
    }
  }
  return best;
}

namespace {

int resolve_k(const ComponentSelector& selector, const Vector& lambda_all, Eigen::Index n,
              Eigen::Index p) {
  const int rank_bound = static_cast<int>(std::min<Eigen::Index>(n - 1, p));
  int k = 0;
  if (const auto* fixed = std::get_if<FixedK>(&selector)) {
    if (fixed->k < 1) throw DataError("fixed component count must be at least 1");
    k = fixed->k;
  } else {
    const auto& evr = std::get<EigenvalueRatio>(selector);
    k = select_k_evr(lambda_all, evr.kmax, evr.tau);
  }
  return std::clamp(k, 1, std::max(rank_bound, 1));
}

}  // namespace

FpcaModel fit_components(const Matrix& Z, const ComponentSelector& selector,
                         bool allow_degenerate) {
  const Eigen::Index n = Z.rows();
  const Eigen::Index p = Z.cols();
  if (n < 3) throw DataError("functional PCA needs at least 3 years");
  if (p < 1) throw DataError("functional PCA needs at least one grid point");
  if (!Z.allFinite()) throw DataError("panel contains non-finite values");

  FpcaModel model;
  model.mu = Z.colwise().mean().transpose();
  const Matrix centred = Z.rowwise() - model.mu.transpose();
  const Matrix cov = (centred.transpose() * centred) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigendecomposition failed");
  }
  // Eigen returns ascending order.
  model.lambda_all = solver.eigenvalues().reverse().cwiseMax(0.0);
  const Matrix vectors = solver.eigenvectors().rowwise().reverse();

  const double trace = cov.trace();
  if (!(trace > 0.0)) {
    if (!allow_degenerate) {
      throw DegenerateCovarianceError("panel has zero variance at every grid point");
    }
    model.psi.resize(p, 0);
    model.lambda.resize(0);
    model.scores.resize(n, 0);
    model.residuals = centred;
    return model;
  }

  const int k = resolve_k(selector, model.lambda_all, n, p);
  model.psi = vectors.leftCols(k);
  for (int j = 0; j < k; ++j) {
    Eigen::Index arg = 0;
    model.psi.col(j).cwiseAbs().maxCoeff(&arg);
    if (model.psi(arg, j) < 0.0) model.psi.col(j) *= -1.0;
  }
  model.lambda = model.lambda_all.head(k);
  model.scores = centred * model.psi;
  model.residuals = centred - model.scores * model.psi.transpose();
  return model;
}

FpcaModel fit_ufts(const Matrix& Z, const ComponentSelector& selector) {
  return fit_components(Z, selector, false);
}

MftsModel fit_mfts(const Matrix& Zf, const Matrix& Zm, const ComponentSelector& selector,
                   MftsScaling scaling) {
  if (Zf.rows() != Zm.rows() || Zf.cols() != Zm.cols()) {
    throw DataError("female and male panels must share year and age grids");
  }
  if (Zf.rows() < 3) throw DataError("functional PCA needs at least 3 years");
  const Eigen::Index n = Zf.rows();
  const Eigen::Index p = Zf.cols();

  auto standardize = [&](const Matrix& Z, Vector& center, Vector& scale) {
    center = Z.colwise().mean().transpose();
    const Matrix centred = Z.rowwise() - center.transpose();
    const Vector sd =
        (centred.array().square().colwise().sum() / static_cast<double>(n - 1)).sqrt().transpose();
    switch (scaling) {
      case MftsScaling::PerAge:
        for (Eigen::Index x = 0; x < p; ++x) {
          if (!(sd[x] > 0.0)) throw ZeroVarianceError(static_cast<int>(x));
        }
        scale = sd;
        break;
      case MftsScaling::Scalar: {
        const double pooled = std::sqrt(sd.array().square().mean());
        if (!(pooled > 0.0)) throw ZeroVarianceError(0);
        scale = Vector::Constant(p, pooled);
        break;
      }
      case MftsScaling::None:
        scale = Vector::Ones(p);
        break;
    }
    return Matrix(centred.array().rowwise() / scale.transpose().array());
  };

  MftsModel out;
  out.p = p;
  Matrix stacked(n, 2 * p);
  stacked.leftCols(p) = standardize(Zf, out.standardization.center_f, out.standardization.scale_f);
  stacked.rightCols(p) = standardize(Zm, out.standardization.center_m, out.standardization.scale_m);
  out.stacked = fit_ufts(stacked, selector);
  return out;
}

MultilevelModel fit_mlfts(const Matrix& Zf, const Matrix& Zm, const ComponentSelector& selector) {
  if (Zf.rows() != Zm.rows() || Zf.cols() != Zm.cols()) {
    throw DataError("female and male panels must share year and age grids");
  }
  MultilevelModel out;
  out.mu_f = Zf.colwise().mean().transpose();
  out.mu_m = Zm.colwise().mean().transpose();
  const Matrix cf = Zf.rowwise() - out.mu_f.transpose();
  const Matrix cm = Zm.rowwise() - out.mu_m.transpose();
  if (cf.squaredNorm() == 0.0 && cm.squaredNorm() == 0.0) {
    throw DegenerateCovarianceError("both panels have zero variance at every grid point");
  }
  const Matrix average = 0.5 * (cf + cm);
  out.common = fit_components(average, selector, true);
  const Matrix common_fit = out.common.scores * out.common.psi.transpose();
  out.resid_f = fit_components(cf - common_fit, selector, true);
  out.resid_m = fit_components(cm - common_fit, selector, true);
  return out;
}

namespace {

nlohmann::json matrix_rows(const Matrix& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  }
  return rows;
}

Matrix rows_matrix(const nlohmann::json& j, Eigen::Index cols_if_empty) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : cols_if_empty;
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

std::vector<double> to_vec(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector from_vec(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

nlohmann::json to_json(const FpcaModel& model) {
  nlohmann::json j;
  j["k"] = model.k();
  j["mu"] = to_vec(model.mu);
  auto psi = nlohmann::json::array();
  for (Eigen::Index c = 0; c < model.psi.cols(); ++c) psi.push_back(to_vec(model.psi.col(c)));
  j["psi"] = psi;
  j["lambda"] = to_vec(model.lambda);
  j["lambda_all"] = to_vec(model.lambda_all);
  j["scores"] = matrix_rows(model.scores);
  j["residuals"] = matrix_rows(model.residuals);
  return j;
}

FpcaModel fpca_from_json(const nlohmann::json& j) {
  FpcaModel model;
  model.mu = from_vec(j.at("mu"));
  const auto& psi = j.at("psi");
  model.psi.resize(model.mu.size(), static_cast<Eigen::Index>(psi.size()));
  for (Eigen::Index c = 0; c < model.psi.cols(); ++c) model.psi.col(c) = from_vec(psi[c]);
  model.lambda = from_vec(j.at("lambda"));
  model.lambda_all = from_vec(j.at("lambda_all"));
  model.scores = rows_matrix(j.at("scores"), model.psi.cols());
  model.residuals = rows_matrix(j.at("residuals"), model.mu.size());
  return model;
}

}  // namespace mortcast
