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

#include "doctest.h"
#include "oracles.hpp"
#include "strme/lsr1.hpp"

using namespace strme;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("single pair") {
  Lsr1State state(2);
  CHECK(state.try_update(vec2(1, 0), vec2(2, 0)));
  Matrix expected(2, 2);
  expected << 2, 0, 0, 1;
  CHECK((state.to_dense() - expected).norm() <= 1e-15);
  CHECK((state.apply(vec2(1, 1)) - vec2(2, 1)).norm() <= 1e-15);

  strme::testing::DenseSr1 dense(2, 1.0);
  CHECK(dense.update(vec2(1, 0), vec2(2, 0), 1e-8));
  CHECK((state.to_dense() - dense.matrix()).norm() <= 1e-15);
}

TEST_CASE("skip rule") {
  Lsr1State state(2);
  CHECK_FALSE(state.try_update(vec2(1, 0), vec2(1, 0)));  // w = 0
  CHECK(state.empty());
  CHECK_FALSE(state.try_update(vec2(1, 0), vec2(1, 1)));  // w = (0, 1) is orthogonal to s
  CHECK(state.empty());
  CHECK(state.try_update(vec2(1, 0), vec2(1.5, 1)));
  CHECK(state.size() == 1);
}

TEST_CASE("empty memory") {
  const Lsr1State state(2, {2.0, 5, 1e-8});
  CHECK(state.apply(vec2(1, 1)) == vec2(2, 2));
  CHECK(state.to_dense() == 2.0 * Matrix::Identity(2, 2));
}

TEST_CASE("apply matches to_dense") {
  Rng rng = make_stream(1, "apply");
  Lsr1State state(20);
  for (int p = 0; p < 5; ++p) {
    state.try_update(strme::testing::gaussian_vector(20, rng),
                     strme::testing::gaussian_vector(20, rng));
  }
  REQUIRE(state.size() == 5);
  const Matrix b = state.to_dense();
  for (int t = 0; t < 10; ++t) {
    const Vector v = strme::testing::gaussian_vector(20, rng);
    CHECK((state.apply(v) - b * v).norm() <= 1e-10 * std::max(1.0, (b * v).norm()));
    const Vector u = strme::testing::gaussian_vector(20, rng);
    const double l = u.dot(state.apply(v));
    const double r = v.dot(state.apply(u));
    CHECK(std::abs(l - r) <= 1e-10 * std::max(1.0, std::abs(l)));
  }
  CHECK((b - b.transpose()).norm() <= 1e-12 * b.norm());
  CHECK((state.core() - state.core().transpose()).norm() == 0.0);
}

TEST_CASE("secant equation on the newest pair") {
  Rng rng = make_stream(2, "secant");
  Lsr1State state(8, {1.0, 4, 1e-8});
  for (int p = 0; p < 30; ++p) {
    const Vector s = strme::testing::gaussian_vector(8, rng);
    const Vector y = strme::testing::gaussian_vector(8, rng);
    if (state.try_update(s, y)) {
      CHECK((state.apply(s) - y).norm() <= 1e-8 * std::max(1.0, y.norm()));
      CHECK(std::isfinite(state.core_condition()));
    }
    CHECK(state.size() <= 4);
    CHECK(state.s().cols() == state.y().cols());
  }
}

TEST_CASE("eviction keeps the newest pairs") {
  Rng rng = make_stream(3, "evict");
  Lsr1State state(6, {1.0, 3, 1e-8});
  std::vector<Vector> accepted;
  while (accepted.size() < 5) {
    const Vector s = strme::testing::gaussian_vector(6, rng);
    if (state.try_update(s, strme::testing::gaussian_vector(6, rng))) accepted.push_back(s);
  }
  REQUIRE(state.size() == 3);
  for (int j = 0; j < 3; ++j) CHECK(state.s().col(j) == accepted[2 + j]);
}

TEST_CASE("compact form tracks the dense recursion") {
  Rng rng = make_stream(4, "dense-recursion");
  for (int seq = 0; seq < 10; ++seq) {
    const double tau0 = 0.5 + 0.2 * seq;
    Lsr1State state(20, {tau0, 50, 1e-8});
    strme::testing::DenseSr1 dense(20, tau0);
    for (int step = 0; step < 50; ++step) {
      const Vector s = strme::testing::gaussian_vector(20, rng);
      Vector y = strme::testing::gaussian_vector(20, rng);
      if (step % 7 == 3) {
        Vector w = y;
        w -= (w.dot(s) / s.dot(s)) * s;
        y = dense.matrix() * s + w;
      }
      CHECK(state.try_update(s, y) == dense.update(s, y, 1e-8));
      const Matrix b = dense.matrix();
      CHECK((state.to_dense() - b).norm() <= 1e-10 * b.norm());
    }
  }
}

TEST_CASE("argument checks") {
  Lsr1State state(3);
  CHECK_THROWS_AS(state.try_update(Vector::Ones(2), Vector::Ones(3)), DimensionError);
  CHECK_THROWS_AS(state.try_update(Vector::Ones(3), Vector::Ones(4)), DimensionError);
  CHECK_THROWS_AS(state.apply(Vector::Ones(2)), DimensionError);
  CHECK_THROWS_AS(Lsr1State(3, {0.0, 5, 1e-8}), ConfigError);
  CHECK_THROWS_AS(Lsr1State(3, {1.0, 0, 1e-8}), ConfigError);
  CHECK_THROWS_AS(Lsr1State(3, {1.0, 5, 1.0}), ConfigError);
}
