// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "abhbf/rate.hpp"
#include "abhbf/waterfill.hpp"

using namespace abhbf;

TEST_CASE("waterfill") {
  SECTION("equal gains split evenly") {
    const auto p = waterfill({3.0, 3.0}, 2.0);
    CHECK(p[0] == Catch::Approx(1.0).margin(1e-10));
    CHECK(p[1] == Catch::Approx(1.0).margin(1e-10));
  }

  SECTION("hand value: gains [4, 1], power 2 -> [1.375, 0.625]") {
    const auto p = waterfill({4.0, 1.0}, 2.0);
    CHECK(p[0] == Catch::Approx(1.375).margin(1e-10));
    CHECK(p[1] == Catch::Approx(0.625).margin(1e-10));
  }

  SECTION("zero gain is excluded") {
    const auto p = waterfill({1.0, 0.0}, 1.0);
    CHECK(p[0] == Catch::Approx(1.0).margin(1e-10));
    CHECK(p[1] == 0.0);
  }

  SECTION("weak channels drop out at low power") {
    const auto p = waterfill({100.0, 0.01}, 0.1);
    CHECK(p[0] == Catch::Approx(0.1).margin(1e-10));
    CHECK(p[1] == 0.0);
  }

  SECTION("budget is met across random instances") {
    RandomStream rng(5);
    for (int i = 0; i < 100; ++i) {
      std::vector<double> g(4);
      for (auto& v : g) v = rng.uniform(0.0, 10.0);
      g[i % 4] += 0.1;  // keep at least one positive
      const double total = rng.uniform(0.1, 8.0);
      const auto p = waterfill(g, total);
      double sum = 0.0;
      for (double v : p) sum += v;
      CHECK(sum == Catch::Approx(total).margin(1e-10));
    }
  }

  SECTION("all-zero gains rejected") {
    CHECK_THROWS_AS(waterfill({0.0, 0.0}, 1.0), std::invalid_argument);
  }
}

TEST_CASE("spectral efficiency") {
  SECTION("scalar closed form: h = 1, snr = 1 -> 1 bit/s/Hz") {
    const std::vector<CMatrix> h{CMatrix::Ones(1, 1)};
    const std::vector<CMatrix> b{CMatrix::Ones(1, 1)};
    CHECK(spectral_efficiency(h, b, 1.0, 1) == Catch::Approx(1.0).margin(1e-12));
  }

  SECTION("zero channel carries zero rate") {
    const std::vector<CMatrix> h{CMatrix::Zero(2, 4)};
    const std::vector<CMatrix> b{CMatrix::Zero(4, 2)};
    CHECK(spectral_efficiency(h, b, 10.0, 2) == Catch::Approx(0.0).margin(1e-12));
  }

  SECTION("strictly increasing in snr for a nonzero channel") {
    RandomStream rng(3);
    CMatrix h(2, 3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) h(i, j) = rng.complex_gaussian();
    const std::vector<CMatrix> hs{h};
    CMatrix b = CMatrix::Zero(3, 2);
    b(0, 0) = b(1, 1) = 1.0;
    const std::vector<CMatrix> bs{b};
    double prev = 0.0;
    for (double snr : {0.1, 0.5, 1.0, 5.0, 25.0}) {
      const double r = spectral_efficiency(hs, bs, snr, 2);
      CHECK(r > prev);
      prev = r;
    }
  }

  SECTION("power budget violations are rejected") {
    const std::vector<CMatrix> h{CMatrix::Ones(1, 1)};
    const std::vector<CMatrix> b{2.0 * CMatrix::Ones(1, 1)};  // power 4 > N_D = 1
    CHECK_THROWS_AS(spectral_efficiency(h, b, 1.0, 1), std::invalid_argument);
  }
}

TEST_CASE("OFDM symbol simulation") {
  SECTION("noiseless identity system returns sqrt(rho) d") {
    RandomStream rng(1);
    const CMatrix eye = CMatrix::Identity(2, 2);
    CVector d(2);
    d << Complex{1, 0}, Complex{0, -1};
    const CVector y = simulate_ofdm_symbol(eye, eye, eye, d, 4.0, rng, 0.0);
    CHECK((y - 2.0 * d).norm() < 1e-14);
  }

  SECTION("zero data, noiseless -> zero output") {
    RandomStream rng(1);
    const CMatrix eye = CMatrix::Identity(3, 3);
    const CVector y =
        simulate_ofdm_symbol(eye, eye, eye, CVector::Zero(3), 1.0, rng, 0.0);
    CHECK(y.norm() == 0.0);
  }

  SECTION("noise-only sample covariance is close to sigma^2 I") {
    RandomStream rng(42);
    const CMatrix zero = CMatrix::Zero(2, 2);
    const CMatrix eye = CMatrix::Identity(2, 2);
    const double sigma2 = 0.7;
    const int n = 100000;
    Eigen::Vector2d diag = Eigen::Vector2d::Zero();
    Complex cross{0, 0};
    for (int i = 0; i < n; ++i) {
      const CVector y =
          simulate_ofdm_symbol(zero, eye, eye, CVector::Zero(2), 1.0, rng, sigma2);
      diag[0] += std::norm(y[0]) / n;
      diag[1] += std::norm(y[1]) / n;
      cross += y[0] * std::conj(y[1]) / double(n);
    }
    CHECK(diag[0] == Catch::Approx(sigma2).epsilon(0.05));
    CHECK(diag[1] == Catch::Approx(sigma2).epsilon(0.05));
    CHECK(std::abs(cross) < 0.05 * sigma2);
  }
}
