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

#include "strme/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "strme/kernels.hpp"
#include "strme/logging.hpp"

namespace strme {
namespace {

constexpr double kHardCaseGradTol = 1e-9;
constexpr double kEigenGroupTol = 1e-10;

void require_trs_inputs(const Vector& g, double delta, const char* who) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(std::string(who) + ": trust-region radius must be positive");
  }
  if (kernels::nrm2(as_span(g)) == 0.0) {
    throw Error(std::string(who) + ": model gradient is zero");
  }
}

void clip_to_radius(Vector& d, double delta) {
  const double n = kernels::nrm2(as_span(d));
  if (n > delta) d *= delta / n;
}

// Spectral form of a model: eigenvalues lam[i] of B and the gradient
// coordinates coef[i] in the matching orthonormal directions. Several
// directions may be lumped into one entry when they share an eigenvalue.
struct Spectrum {
  Vector lam;
  Vector coef;
};

double step_norm_sq(const Spectrum& sp, double lambda) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < sp.lam.size(); ++i) {
    if (sp.coef(i) == 0.0) continue;
    const double t = sp.coef(i) / (sp.lam(i) + lambda);
    s += t * t;
  }
  return s;
}

// d|d|^2/dlambda / (-2)
double step_norm_sq_slope(const Spectrum& sp, double lambda) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < sp.lam.size(); ++i) {
    if (sp.coef(i) == 0.0) continue;
    const double den = sp.lam(i) + lambda;
    s += sp.coef(i) * sp.coef(i) / (den * den * den);
  }
  return s;
}

struct SecularResult {
  double lambda = 0.0;
  TrsStatus status = TrsStatus::interior;
  // Entries of the lowest eigenvalue group whose gradient coordinates are
  // treated as zero in the hard case.
  std::vector<Eigen::Index> null_group;
  double hard_case_extra = 0.0;  // length of the null-direction component
  int iterations = 0;
  bool converged = true;
};

// Safeguarded Newton on phi(lambda) = 1/|d(lambda)| - 1/delta.
SecularResult solve_secular(Spectrum sp, double delta, double gnorm,
                            const SecularOptions& opt) {
  SecularResult out;
  const Eigen::Index n = sp.lam.size();
  const double lam_min = sp.lam.minCoeff();
  const double scale = std::max(1.0, sp.lam.cwiseAbs().maxCoeff());

  if (lam_min > 0.0 && std::sqrt(step_norm_sq(sp, 0.0)) <= delta) {
    out.lambda = 0.0;
    out.status = TrsStatus::interior;
    return out;
  }

  const double lo = std::max(0.0, -lam_min);
  if (lam_min <= 0.0) {
    std::vector<Eigen::Index> group;
    bool orthogonal = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (sp.lam(i) <= lam_min + kEigenGroupTol * scale) {
        group.push_back(i);
        if (std::abs(sp.coef(i)) > kHardCaseGradTol * std::max(1.0, gnorm)) {
          orthogonal = false;
        }
      }
    }
    if (orthogonal) {
      Spectrum rest = sp;
      for (auto i : group) rest.coef(i) = 0.0;
      const double rest_norm = std::sqrt(step_norm_sq(rest, lo));
      if (rest_norm <= delta) {
        out.lambda = lo;
        out.null_group = std::move(group);
        if (lo == 0.0) {
          out.status = TrsStatus::interior;
        } else {
          out.status = TrsStatus::hard_case;
          out.hard_case_extra =
              std::sqrt(std::max(0.0, delta * delta - rest_norm * rest_norm));
        }
        return out;
      }
      sp = rest;
      out.null_group = std::move(group);
    }
  }

  double a = lo;
  double b = lo + gnorm / delta;
  double lambda = b;
  const double inv_delta = 1.0 / delta;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    out.iterations = it;
    const double nsq = step_norm_sq(sp, lambda);
    const double norm = std::sqrt(nsq);
    const double phi = 1.0 / norm - inv_delta;
    if (std::abs(norm - delta) <= opt.tolerance * delta) {
      out.lambda = lambda;
      out.status = TrsStatus::boundary;
      return out;
    }
    if (phi < 0.0) {
      a = lambda;
    } else {
      b = lambda;
    }
    const double dphi = step_norm_sq_slope(sp, lambda) / (nsq * norm);
    double next = lambda - phi / dphi;
    if (!(next > a && next < b) || !std::isfinite(next)) next = 0.5 * (a + b);
    if (next == lambda || b - a <= 4.0 * std::numeric_limits<double>::epsilon() *
                                       std::max(1.0, b)) {
      out.lambda = next;
      out.status = TrsStatus::boundary;
      return out;
    }
    lambda = next;
  }
  out.lambda = lambda;
  out.status = TrsStatus::boundary;
  out.converged = false;
  return out;
}

Vector unit_complement_direction(const Matrix& q) {
  // A unit vector orthogonal to the columns of q.
  const Eigen::Index d = q.rows();
  Vector best;
  double best_norm = -1.0;
  for (Eigen::Index j = 0; j < d && j < q.cols() + 2; ++j) {
    Vector e = Vector::Zero(d);
    e(j) = 1.0;
    Vector v = e - q * (q.transpose() * e);
    v -= q * (q.transpose() * v);
    const double nv = v.norm();
    if (nv > best_norm) {
      best_norm = nv;
      best = v;
    }
    if (nv > 0.5) break;
  }
  return best / best_norm;
}

}  // namespace

std::string_view to_string(TrsStatus status) {
  switch (status) {
    case TrsStatus::interior:
      return "interior";
    case TrsStatus::boundary:
      return "boundary";
    case TrsStatus::hard_case:
      return "hard_case";
    case TrsStatus::cauchy_fallback:
      return "cauchy_fallback";
  }
  return "unknown";
}

void TheoryConstants::validate() const {
  if (!(kappa_fcd > 0.0 && kappa_fcd <= 1.0)) {
    throw ConfigError("kappa_fcd must lie in (0, 1]");
  }
  if (!(kappa_bhm > 0.0)) throw ConfigError("kappa_bhm must be positive");
}

TrsSolution cauchy_point(const Vector& g, const HessianOperator& b,
                         double delta) {
  require_trs_inputs(g, delta, "cauchy_point");
  const double gg = kernels::dot(as_span(g), as_span(g));
  const double gnorm = std::sqrt(gg);
  double gbg = 0.0;
  if (!b.is_zero()) {
    const Vector bg = b.apply(g);
    gbg = kernels::dot(as_span(g), as_span(bg));
  }
  TrsSolution sol;
  if (gbg > 0.0 && (gg / gbg) * gnorm <= delta) {
    sol.d = -(gg / gbg) * g;
    sol.status = TrsStatus::interior;
  } else {
    sol.d = -(delta / gnorm) * g;
    sol.status = TrsStatus::boundary;
  }
  sol.pred = pred_reduction(QuadraticModel{g, b, {}}, sol.d);
  return sol;
}

TrsSolution dogleg(const Vector& g, const Matrix& b, double delta) {
  require_trs_inputs(g, delta, "dogleg");
  require_same_dim(static_cast<std::size_t>(b.rows()),
                   static_cast<std::size_t>(g.size()), "dogleg");
  const QuadraticModel model{g, HessianOperator::dense(b), {}};

  const Eigen::LLT<Matrix> llt(b);
  if (llt.info() != Eigen::Success) {
    TrsSolution sol = cauchy_point(g, model.b, delta);
    sol.status = TrsStatus::cauchy_fallback;
    return sol;
  }

  TrsSolution sol;
  const Vector newton = -llt.solve(g);
  if (newton.norm() <= delta) {
    sol.d = newton;
    sol.status = TrsStatus::interior;
  } else {
    const double gg = g.squaredNorm();
    const double gbg = g.dot(b * g);
    const Vector du = -(gg / gbg) * g;
    const double du_norm = du.norm();
    if (du_norm >= delta) {
      sol.d = -(delta / std::sqrt(gg)) * g;
    } else {
      // |du + t (newton - du)| = delta, t in [0, 1].
      const Vector p = newton - du;
      const double qa = p.squaredNorm();
      const double qb = 2.0 * du.dot(p);
      const double qc = du_norm * du_norm - delta * delta;
      const double disc = std::sqrt(std::max(0.0, qb * qb - 4.0 * qa * qc));
      const double t =
          qb > 0.0 ? (-2.0 * qc) / (qb + disc) : (-qb + disc) / (2.0 * qa);
      sol.d = du + std::clamp(t, 0.0, 1.0) * p;
      clip_to_radius(sol.d, delta);
    }
    sol.status = TrsStatus::boundary;
  }
  sol.pred = pred_reduction(model, sol.d);
  return sol;
}

TrsSolution lsr1_trs(const Vector& g, const Lsr1State& state, double delta,
                     const SecularOptions& options) {
  require_trs_inputs(g, delta, "lsr1_trs");
  require_same_dim(static_cast<std::size_t>(g.size()), state.dim(), "lsr1_trs");
  // Non-owning handle; the model does not outlive this call.
  const std::shared_ptr<const Lsr1State> view(std::shared_ptr<void>(), &state);
  const QuadraticModel model{g, HessianOperator::lsr1(view), {}};

  const Eigen::Index dim = g.size();
  const double tau = state.tau0();
  const double gnorm = g.norm();

  // B = tau I + Q W Q^T with U = Q R, W = R M^{-1} R^T, Q orthonormal.
  Matrix q(dim, 0);
  Vector w_eig(0);
  Matrix w_vec(0, 0);
  if (!state.empty()) {
    const Matrix& u = state.u();
    const Eigen::Index r = std::min(dim, u.cols());
    const Eigen::HouseholderQR<Matrix> qr(u);
    q = qr.householderQ() * Matrix::Identity(dim, r);
    const Matrix rr =
        qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    Matrix minv_rt(u.cols(), r);
    for (Eigen::Index j = 0; j < r; ++j) {
      minv_rt.col(j) = state.solve_core(rr.row(j).transpose());
    }
    Matrix w = rr * minv_rt;
    w = 0.5 * (w + w.transpose()).eval();
    const Eigen::SelfAdjointEigenSolver<Matrix> es(w);
    w_eig = es.eigenvalues();
    w_vec = es.eigenvectors();
  }
  const Eigen::Index r = q.cols();
  const Matrix basis = q * w_vec;  // dim x r, orthonormal
  const Vector g_par = basis.transpose() * g;
  const Vector g_perp = g - basis * g_par;
  const bool has_complement = dim > r;

  Spectrum sp;
  sp.lam.resize(r + (has_complement ? 1 : 0));
  sp.coef.resize(sp.lam.size());
  for (Eigen::Index i = 0; i < r; ++i) {
    sp.lam(i) = tau + w_eig(i);
    sp.coef(i) = g_par(i);
  }
  if (has_complement) {
    sp.lam(r) = tau;
    sp.coef(r) = g_perp.norm();
  }

  const SecularResult res = solve_secular(sp, delta, gnorm, options);
  if (!res.converged) {
    log_warning("lsr1_trs: secular iteration did not converge, using Cauchy point");
    TrsSolution sol = cauchy_point(g, model.b, delta);
    sol.status = TrsStatus::cauchy_fallback;
    sol.iterations = res.iterations;
    return sol;
  }

  auto in_null_group = [&](Eigen::Index i) {
    return std::find(res.null_group.begin(), res.null_group.end(), i) !=
           res.null_group.end();
  };

  Vector coeff = Vector::Zero(r);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (in_null_group(i)) continue;
    coeff(i) = -g_par(i) / (sp.lam(i) + res.lambda);
  }
  Vector d = basis * coeff;
  if (has_complement && !in_null_group(r)) {
    d -= g_perp / (tau + res.lambda);
  }
  if (res.status == TrsStatus::hard_case && res.hard_case_extra > 0.0) {
    const Eigen::Index j = res.null_group.front();
    const Vector z = j < r ? Vector(basis.col(j)) : unit_complement_direction(basis);
    d += res.hard_case_extra * z;
  }
  clip_to_radius(d, delta);

  TrsSolution sol;
  sol.d = std::move(d);
  sol.lambda = res.lambda;
  sol.status = res.status;
  sol.iterations = res.iterations;
  sol.pred = pred_reduction(model, sol.d);
  return sol;
}

TrsSolution dense_trs_oracle(const Vector& g, const Matrix& b, double delta) {
  require_trs_inputs(g, delta, "dense_trs_oracle");
  require_same_dim(static_cast<std::size_t>(b.rows()),
                   static_cast<std::size_t>(g.size()), "dense_trs_oracle");
  const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (b + b.transpose()));
  const Vector& lam = es.eigenvalues();  // ascending
  const Matrix& v = es.eigenvectors();
  const Vector a = v.transpose() * g;
  const Eigen::Index n = lam.size();
  const double gnorm = g.norm();
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());

  auto norm_at = [&](double lambda, bool skip_min) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (skip_min && lam(i) <= lam(0) + kEigenGroupTol * scale) continue;
      const double t = a(i) / (lam(i) + lambda);
      s += t * t;
    }
    return std::sqrt(s);
  };
  auto step_at = [&](double lambda, bool skip_min) {
    Vector c = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (skip_min && lam(i) <= lam(0) + kEigenGroupTol * scale) continue;
      c(i) = -a(i) / (lam(i) + lambda);
    }
    return Vector(v * c);
  };

  const QuadraticModel model{g, HessianOperator::dense(b), {}};
  TrsSolution sol;
  if (lam(0) > 0.0 && norm_at(0.0, false) <= delta) {
    sol.d = step_at(0.0, false);
    sol.status = TrsStatus::interior;
    sol.pred = pred_reduction(model, sol.d);
    return sol;
  }

  const double lo = std::max(0.0, -lam(0));
  bool skip_min = false;
  if (lam(0) <= 0.0) {
    double min_coef = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (lam(i) <= lam(0) + kEigenGroupTol * scale) {
        min_coef = std::max(min_coef, std::abs(a(i)));
      }
    }
    if (min_coef <= kHardCaseGradTol * std::max(1.0, gnorm)) {
      skip_min = true;
      const double rest = norm_at(lo, true);
      if (rest <= delta) {
        sol.d = step_at(lo, true);
        sol.lambda = lo;
        if (lo > 0.0) {
          sol.d += std::sqrt(std::max(0.0, delta * delta - rest * rest)) *
                   v.col(0);
          sol.status = TrsStatus::hard_case;
        } else {
          sol.status = TrsStatus::interior;
        }
        clip_to_radius(sol.d, delta);
        sol.pred = pred_reduction(model, sol.d);
        return sol;
      }
    }
  }

  // Bisection on |d(lambda)| - delta, decreasing in lambda.
  double left = lo;
  double right = lo + gnorm / delta;
  while (norm_at(right, skip_min) > delta) right = lo + 2.0 * (right - lo);
  int it = 0;
  for (; it < 300; ++it) {
    const double mid = 0.5 * (left + right);
    if (mid <= left || mid >= right) break;
    if (norm_at(mid, skip_min) > delta) {
      left = mid;
    } else {
      right = mid;
    }
  }
  sol.lambda = right;
  sol.d = step_at(right, skip_min);
  clip_to_radius(sol.d, delta);
  sol.status = TrsStatus::boundary;
  sol.iterations = it;
  sol.pred = pred_reduction(model, sol.d);
  return sol;
}

double estimate_operator_norm(const HessianOperator& b, const Vector& start,
                              int steps) {
  if (b.is_zero()) return 0.0;
  Vector v = start;
  double nv = v.norm();
  if (nv == 0.0) {
    v = Vector::Ones(start.size());
    nv = v.norm();
  }
  v /= nv;
  double best = 0.0;
  for (int i = 0; i < steps; ++i) {
    Vector bv = b.apply(v);
    const double nb = bv.norm();
    best = std::max(best, nb);
    if (nb == 0.0) break;
    v = bv / nb;
  }
  return best;
}

bool check_cauchy_decrease(const Vector& g, const HessianOperator& b,
                           double delta, const Vector& d,
                           const TheoryConstants& tc) {
  const double gnorm = g.norm();
  const double pred = pred_reduction(QuadraticModel{g, b, {}}, d);
  const double bnorm = estimate_operator_norm(b, g);
  const double reach = bnorm > 0.0 ? std::min(gnorm / bnorm, delta) : delta;
  return pred >= 0.5 * tc.kappa_fcd * gnorm * reach && pred > 0.0;
}

bool KktReport::ok(double tol) const {
  return stationarity <= tol && feasibility <= tol && complementarity <= tol &&
         dual <= tol && curvature <= tol;
}

KktReport verify_kkt(const Vector& g, const Matrix& b, double delta,
                     const TrsSolution& sol) {
  KktReport r;
  const double dn = sol.d.norm();
  const Vector res = b * sol.d + sol.lambda * sol.d + g;
  r.stationarity = res.norm() / std::max(1.0, g.norm());
  r.feasibility = std::max(0.0, dn - delta) / delta;
  r.complementarity =
      sol.lambda * std::abs(delta - dn) / std::max(1.0, sol.lambda * delta);
  r.dual = std::max(0.0, -sol.lambda);
  const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (b + b.transpose()),
                                                 Eigen::EigenvaluesOnly);
  const double bnorm = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  r.curvature = std::max(0.0, -(es.eigenvalues()(0) + sol.lambda)) / bnorm;
  return r;
}

TrsSolution CauchySolver::solve(const QuadraticModel& model,
                                double delta) const {
  return cauchy_point(model.g, model.b, delta);
}

TrsSolution DoglegSolver::solve(const QuadraticModel& model,
                                double delta) const {
  const Matrix* b = model.b.dense_matrix();
  if (b == nullptr) throw Error("dogleg solver needs a dense Hessian model");
  return dogleg(model.g, *b, delta);
}

TrsSolution Lsr1Solver::solve(const QuadraticModel& model,
                              double delta) const {
  const Lsr1State* state = model.b.lsr1_state();
  if (state == nullptr) throw Error("lsr1 solver needs an L-SR1 model");
  if (state->empty()) return cauchy_point(model.g, model.b, delta);
  return lsr1_trs(model.g, *state, delta, options_);
}

}  // namespace strme
