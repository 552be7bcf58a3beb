#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "gclab/gyro.hpp"

using namespace gclab;

namespace {
const GeoConfig kGeo{deg_to_rad(32.0), 7.292115e-5};
}

TEST_CASE("stationary truth") {
  SECTION("all samples identical") {
    const RateSeries s = stationary_truth(kGeo, {0.1, -0.05, 0.9}, 2.0, 50.0);
    REQUIRE(s.size() == 100);
    for (std::size_t i = 1; i < s.size(); ++i) {
      CHECK(s.p[i] == s.p[0]);
      CHECK(s.q[i] == s.q[0]);
      CHECK(s.r[i] == s.r[0]);
    }
  }
  SECTION("p component matches the projection at latitude 32") {
    const double psi = 0.7;
    const RateSeries s = stationary_truth(kGeo, {0.0, 0.0, psi}, 0.5, 10.0);
    CHECK(s.p[0] ==
          Catch::Approx(kGeo.earth_rate * std::cos(kGeo.latitude) * std::cos(psi)).epsilon(1e-14));
  }
  SECTION("exact sample count") {
    CHECK(stationary_truth(kGeo, {}, 1.0, 100.0).size() == 100);
  }
}

TEST_CASE("measurement model") {
  const RateSeries truth = stationary_truth(kGeo, {0.0, 0.0, 0.3}, 1.0, 100.0);
  SECTION("identity model returns the input exactly") {
    GyroErrorModel m;
    const RateSeries out = measure(truth, m);
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out.p[i] == truth.p[i]);
      CHECK(out.q[i] == truth.q[i]);
      CHECK(out.r[i] == truth.r[i]);
    }
  }
  SECTION("pure bias adds a constant offset") {
    GyroErrorModel m;
    m.bias = {1e-5, 0.0, 0.0};
    const RateSeries out = measure(truth, m);
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out.p[i] == truth.p[i] + 1e-5);
      CHECK(out.q[i] == truth.q[i]);
    }
  }
  SECTION("scale-misalignment matrix is applied") {
    GyroErrorModel m;
    m.scale_misalignment << 1.05, 0.01, 0.0,
                            0.0,  0.98, 0.0,
                            0.0,  0.0,  1.0;
    const RateSeries out = measure(truth, m);
    CHECK(out.p[0] == Catch::Approx(1.05 * truth.p[0] + 0.01 * truth.q[0]).epsilon(1e-15));
    CHECK(out.q[0] == Catch::Approx(0.98 * truth.q[0]).epsilon(1e-15));
  }
  SECTION("noise standard deviation matches density * sqrt(fs) within 1%") {
    GyroErrorModel m;
    m.noise_density.setConstant(5e-5);
    m.seed = 99;
    const double fs = 100.0;
    const RateSeries zeros = RateSeries::zeros(fs, 1000000);
    const RateSeries out = measure(zeros, m);
    const double expect = 5e-5 * std::sqrt(fs);
    for (const auto* axis : {&out.p, &out.q, &out.r}) {
      double sum = 0.0, sum2 = 0.0;
      for (double v : *axis) {
        sum += v;
        sum2 += v * v;
      }
      const double n = static_cast<double>(axis->size());
      const double sd = std::sqrt(sum2 / n - (sum / n) * (sum / n));
      CHECK(sd == Catch::Approx(expect).epsilon(0.01));
    }
  }
  SECTION("mean preserved up to bias within the 4-sigma bound") {
    GyroErrorModel m;
    m.noise_density.setConstant(2e-4);
    m.bias = {1e-5, -2e-5, 3e-5};
    m.seed = 1234;
    const double fs = 100.0;
    const std::size_t n = 200000;
    const RateSeries in = stationary_truth(kGeo, {0.0, 0.0, -1.1}, n / fs, fs);
    const RateSeries out = measure(in, m);
    const double bound = 4.0 * (2e-4 * std::sqrt(fs)) / std::sqrt(static_cast<double>(n));
    const BodyRates mean = mean_rates(out);
    CHECK(std::abs(mean.p - (in.p[0] + m.bias(0))) < bound);
    CHECK(std::abs(mean.q - (in.q[0] + m.bias(1))) < bound);
    CHECK(std::abs(mean.r - (in.r[0] + m.bias(2))) < bound);
  }
  SECTION("same seed reproduces bit-identical output") {
    GyroErrorModel m;
    m.noise_density.setConstant(1e-4);
    m.seed = 777;
    const RateSeries a = measure(truth, m);
    const RateSeries b = measure(truth, m);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.p[i] == b.p[i]);
      CHECK(a.q[i] == b.q[i]);
      CHECK(a.r[i] == b.r[i]);
    }
  }
  SECTION("different seeds differ with the expected scatter") {
    GyroErrorModel m;
    m.noise_density.setConstant(1e-4);
    m.seed = 1;
    const RateSeries a = measure(truth, m);
    m.seed = 2;
    const RateSeries b = measure(truth, m);
    double sum2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a.p[i] - b.p[i];
      sum2 += d * d;
    }
    const double sd = std::sqrt(sum2 / static_cast<double>(a.size()));
    CHECK(sd == Catch::Approx(std::sqrt(2.0) * 1e-4 * 10.0).epsilon(0.2));
  }
  SECTION("white-noise block-average variance decays as 1/K") {
    GyroErrorModel m;
    m.noise_density.setConstant(1e-4);
    m.seed = 4242;
    const std::size_t n = 1000000;
    const RateSeries out = measure(RateSeries::zeros(100.0, n), m);
    const double sigma2 = 1e-4 * 1e-4 * 100.0;
    for (std::size_t k : {10ul, 100ul, 1000ul, 10000ul}) {
      const std::size_t nb = n / k;
      double mean = 0.0;
      std::vector<double> means(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        double acc = 0.0;
        for (std::size_t i = b * k; i < (b + 1) * k; ++i) acc += out.p[i];
        means[b] = acc / static_cast<double>(k);
        mean += means[b];
      }
      mean /= static_cast<double>(nb);
      double var = 0.0;
      for (double v : means) var += (v - mean) * (v - mean);
      var /= static_cast<double>(nb - 1);
      CHECK(var == Catch::Approx(sigma2 / static_cast<double>(k)).epsilon(0.10));
    }
  }
  SECTION("invariants rejected") {
    GyroErrorModel m;
    m.scale_misalignment(0, 0) = 1.2;
    CHECK_THROWS_AS(m.validate(), config_error);
    GyroErrorModel m2;
    m2.noise_density(1) = -1.0;
    CHECK_THROWS_AS(m2.validate(), config_error);
  }
}
