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

#pragma once

// Trust-region subproblem solvers: minimize g.d + d.B d / 2 over |d| <= delta.

#include <memory>
#include <string_view>

#include "strme/common.hpp"
#include "strme/lsr1.hpp"
#include "strme/model.hpp"

namespace strme {

enum class TrsStatus { interior, boundary, hard_case, cauchy_fallback };

std::string_view to_string(TrsStatus status);

struct TrsSolution {
  Vector d;
  double pred = 0.0;    // m(0) - m(d)
  double lambda = 0.0;  // boundary multiplier; zero for non-exact solvers
  TrsStatus status = TrsStatus::interior;
  int iterations = 0;
};

struct TheoryConstants {
  double kappa_fcd = 0.5;  // Cauchy decrease constant
  double kappa_bhm = 1e6;  // Hessian bound, diagnostic only

  void validate() const;
};

struct SecularOptions {
  double tolerance = 1e-10;  // relative, on |d(lambda)| against delta
  int max_iterations = 100;
};

/// Minimizer of the model along -g inside the region. Steps to the boundary
/// when the curvature along g is not positive. Throws on g = 0 or delta <= 0.
TrsSolution cauchy_point(const Vector& g, const HessianOperator& b,
                         double delta);

/// Classic dogleg for a positive definite B. When the Cholesky factorization
/// fails the Cauchy step is returned with status cauchy_fallback.
TrsSolution dogleg(const Vector& g, const Matrix& b, double delta);

/// Global minimizer for a compact L-SR1 matrix (orthonormal-basis /
/// secular-equation method), hard case included. Falls back to the Cauchy
/// point if the secular iteration does not converge.
TrsSolution lsr1_trs(const Vector& g, const Lsr1State& state, double delta,
                     const SecularOptions& options = {});

/// Exact solution through a full eigendecomposition of B and a bisection on
/// the secular equation. Reference solver for tests; dimension <= 50.
TrsSolution dense_trs_oracle(const Vector& g, const Matrix& b, double delta);

/// Largest |Bv| over 20 power-iteration steps started from `start`.
double estimate_operator_norm(const HessianOperator& b, const Vector& start,
                              int steps = 20);

/// pred(d) >= (kappa_fcd / 2) |g| min(|g| / |B|, delta).
bool check_cauchy_decrease(const Vector& g, const HessianOperator& b,
                           double delta, const Vector& d,
                           const TheoryConstants& tc);

/// Optimality certificate of an exact TRS solution against a dense B.
struct KktReport {
  double stationarity = 0.0;     // |(B + lambda I) d + g| / max(1, |g|)
  double feasibility = 0.0;      // max(0, |d| - delta) / delta
  double complementarity = 0.0;  // lambda |delta - |d|| / max(1, lambda delta)
  double dual = 0.0;             // max(0, -lambda)
  double curvature = 0.0;        // max(0, -lambda_min(B + lambda I)) / max(1, |B|)

  bool ok(double tol) const;
};

KktReport verify_kkt(const Vector& g, const Matrix& b, double delta,
                     const TrsSolution& sol);

/// Step computation used by the optimization driver.
class TrsSolver {
 public:
  virtual ~TrsSolver() = default;
  virtual TrsSolution solve(const QuadraticModel& model, double delta) const = 0;
  virtual std::string_view name() const = 0;
};

/// Cauchy point on any operator; with B = 0 this is the steepest-descent
/// boundary step.
class CauchySolver final : public TrsSolver {
 public:
  TrsSolution solve(const QuadraticModel& model, double delta) const override;
  std::string_view name() const override { return "cauchy"; }
};

/// Dogleg on a dense Hessian model.
class DoglegSolver final : public TrsSolver {
 public:
  TrsSolution solve(const QuadraticModel& model, double delta) const override;
  std::string_view name() const override { return "dogleg"; }
};

/// Exact L-SR1 solver. With no stored pairs (B = tau0 I) the Cauchy point is
/// already exact and is used directly.
class Lsr1Solver final : public TrsSolver {
 public:
  explicit Lsr1Solver(SecularOptions options = {}) : options_(options) {}
  TrsSolution solve(const QuadraticModel& model, double delta) const override;
  std::string_view name() const override { return "lsr1"; }

 private:
  SecularOptions options_;
};

}  // namespace strme
