// zslkit/diag-gmm.h

// Copyright 2026  zslkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.


#ifndef ZSLKIT_DIAG_GMM_H_
#define ZSLKIT_DIAG_GMM_H_

#include <cstdint>
#include <vector>

#include "zslkit/zsl-common.h"

namespace zsl {

/// Gaussian mixture with diagonal covariances. Row k of `means` and
/// `variances` holds component k.
struct DiagGmm {
  Vector weights;    // K, positive, sums to one
  Matrix means;      // K x D
  Matrix variances;  // K x D, strictly positive

  int num_components() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(means.cols()); }

  /// Throws DataError unless shapes agree, weights are positive and sum to
  /// one within 1e-12 and variances are positive.
  void Check() const;

  /// log(pi_k N(v; mu_k, Sigma_k)) for every component.
  Vector LogJoint(const Eigen::Ref<const Vector> &v) const;
  double LogLikelihood(const Eigen::Ref<const Vector> &v) const;
  /// Total log-likelihood of the rows of `data`.
  double LogLikelihood(const Matrix &data) const;
};

struct GmmConfig {
  int max_iter = 300;
  /// EM stops once |L_t - L_{t-1}| < tol * |L_{t-1}|.
  double tol = 1e-7;
  /// Per-dimension variance floor, relative to the pool variance of that
  /// dimension (absolute when the pool variance is zero).
  double var_floor = 1e-6;
};

struct GmmFit {
  DiagGmm gmm;
  /// Log-likelihood of the pool under the parameters before each M-step,
  /// followed by the log-likelihood of the returned model.
  std::vector<double> log_likelihood;
  int iterations = 0;
  bool converged = false;
};

/// Fits a K-component diagonal GMM to the rows of `pool` with EM.
/// Means are seeded by k-means++ over the pool, variances start at the pool
/// variance and weights start uniform. For K = 1 the result is the pool mean
/// and biased pool variance.
GmmFit FitDiagGmm(const Matrix &pool, int num_components, const GmmConfig &cfg,
                  uint64_t seed);

/// Posterior responsibility of each component for `v`, computed in log space.
Vector GmmPosteriors(const DiagGmm &gmm, const Eigen::Ref<const Vector> &v);

}  // namespace zsl

#endif  // ZSLKIT_DIAG_GMM_H_
