/* Copyright (c) 2026 The strme Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#include <cmath>
#include <cstdio>

#include "strme/checks.hpp"
#include "strme/kernels.hpp"
#include "strme/lsr1.hpp"
#include "strme/problems.hpp"
#include "strme/rng.hpp"
#include "strme/subproblem.hpp"

namespace strme {
namespace {

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Vector gaussian(std::size_t n, Rng& rng) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (auto& e : v) e = normal(rng);
  return v;
}

CheckResult check_lsr1_trs(Rng& rng) {
  double worst = 0.0;
  bool kkt = true;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + trial % 9;
    Lsr1State state(d, {1.0 + trial % 3, 5, 1e-8});
    for (int p = 0; p < 4; ++p) state.try_update(gaussian(d, rng), gaussian(d, rng));
    const Vector g = gaussian(d, rng);
    const double delta = 0.1 + std::abs(gaussian(1, rng)[0]);
    const Matrix b = state.to_dense();
    const TrsSolution a = lsr1_trs(g, state, delta);
    const TrsSolution o = dense_trs_oracle(g, b, delta);
    worst = std::max(worst, std::abs(a.pred - o.pred) / std::max(1.0, std::abs(o.pred)));
    kkt = kkt && verify_kkt(g, b, delta, a).ok(1e-8);
  }
  return {"lsr1_trs matches dense oracle", worst < 1e-6 && kkt,
          fmt("max model-value gap %.3g", worst)};
}

CheckResult check_compact_sr1(Rng& rng) {
  const std::size_t d = 20;
  Lsr1State state(d, {1.0, 50, 1e-8});
  Matrix dense = Matrix::Identity(d, d);
  double worst = 0.0;
  for (int step = 0; step < 50; ++step) {
    const Vector s = gaussian(d, rng);
    const Vector y = gaussian(d, rng);
    const Vector w = y - dense * s;
    if (w.norm() > 0.0 && std::abs(s.dot(w)) >= 1e-8 * s.norm() * w.norm()) {
      dense += w * w.transpose() / w.dot(s);
    }
    state.try_update(s, y);
    worst = std::max(worst, (state.to_dense() - dense).norm() / dense.norm());
  }
  return {"compact L-SR1 matches dense recursion", worst < 1e-10,
          fmt("max relative error %.3g", worst)};
}

double fd_error(const Problem& p, const Vector& x, const Batch& batch) {
  const Vector g = p.batch_gradient(x, batch);
  Vector fd(x.size());
  Vector xp = x;
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    const double up = p.batch_value(xp, batch);
    xp[i] = x[i] - h;
    const double down = p.batch_value(xp, batch);
    xp[i] = x[i];
    fd[i] = (up - down) / (2.0 * h);
  }
  return (g - fd).norm() / std::max(1.0, g.norm());
}

CheckResult check_gradients(Rng& rng) {
  SparseDataset sd;
  std::normal_distribution<double> normal;
  for (int i = 0; i < 8; ++i) {
    const std::vector<kernels::Index> idx = {0, 2, 3};
    const std::vector<double> val = {normal(rng), normal(rng), normal(rng)};
    sd.add_row(i % 2 ? 1 : -1, idx, val);
  }
  sd.set_dim(5);
  const LogisticProblem logistic(sd, 1e-2);

  DenseDataset dd;
  dd.features = 4;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 4; ++j) dd.x.push_back(normal(rng));
    dd.labels.push_back(i % 2);
  }
  const MlpProblem mlp(dd, MlpArchitecture::tiny(), 1e-3);

  double worst = 0.0;
  for (int t = 0; t < 5; ++t) {
    worst = std::max(worst, fd_error(logistic, gaussian(5, rng), full_batch(logistic)));
    worst = std::max(worst, fd_error(mlp, gaussian(mlp.dim(), rng), full_batch(mlp)));
  }
  return {"gradients match finite differences", worst < 1e-5,
          fmt("max relative error %.3g", worst)};
}

CheckResult check_kernels(Rng& rng) {
  const kernels::Table* fast = kernels::avx2::table();
  if (fast == nullptr || !kernels::isa_supported(kernels::Isa::avx2)) {
    return {"SIMD kernels agree with scalar", true, "avx2 unavailable, skipped"};
  }
  const kernels::Table& ref = kernels::scalar::table();
  const Vector a = gaussian(1003, rng);
  const Vector b = gaussian(1003, rng);
  const double d0 = ref.dot(a.data(), b.data(), 1003);
  const double d1 = fast->dot(a.data(), b.data(), 1003);
  const double err = std::abs(d0 - d1) / std::max(1.0, std::abs(d0));
  return {"SIMD kernels agree with scalar", err < 1e-12,
          fmt("dot relative gap %.3g", err)};
}

}  // namespace

std::vector<CheckResult> run_self_checks(std::uint64_t seed) {
  Rng rng = make_stream(seed, "self-check");
  return {check_lsr1_trs(rng), check_compact_sr1(rng), check_gradients(rng),
          check_kernels(rng)};
}

}  // namespace strme
