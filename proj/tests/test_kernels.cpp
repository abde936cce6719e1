#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "kernels.hpp"
#include "rng.hpp"

using namespace bimt;

TEST_CASE("weighted_exp_sum scalar matches std::exp reference") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    size_t n = 1 + rng.below(300);
    std::vector<double> w(n), x(n);
    for (size_t i = 0; i < n; ++i) {
      w[i] = rng.uniform(0.0, 3.0);
      x[i] = rng.uniform(0.0, 50.0);
    }
    double t = rng.uniform(0.0, 5.0);
    double ref = 0.0;
    for (size_t i = 0; i < n; ++i) ref += w[i] * std::exp(-t * x[i]);
    double got = kern::detail::weighted_exp_sum_scalar(w.data(), x.data(), n, t);
    CHECK(got == doctest::Approx(ref).epsilon(1e-14));
  }
}

TEST_CASE("avx2 and scalar weighted_exp_sum are equivalent") {
  if (!kern::detail::avx2_available()) return;  // nothing to compare on this host
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    size_t n = 1 + rng.below(1000);
    std::vector<double> w(n), x(n);
    for (size_t i = 0; i < n; ++i) {
      w[i] = rng.uniform(0.0, 2.0);
      x[i] = rng.uniform(0.0, 200.0);
    }
    double t = rng.uniform(0.0, 4.0);
    double a = kern::detail::weighted_exp_sum_scalar(w.data(), x.data(), n, t);
    double b = kern::detail::weighted_exp_sum_avx2(w.data(), x.data(), n, t);
    CHECK(std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(a)) + 1e-300);
  }
}

TEST_CASE("avx2 exp handles underflow and the t=0 edge") {
  if (!kern::detail::avx2_available()) return;
  std::vector<double> w{1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> x{0.0, 1.0, 400.0, 800.0, 1e6};
  double a = kern::detail::weighted_exp_sum_scalar(w.data(), x.data(), w.size(), 1.0);
  double b = kern::detail::weighted_exp_sum_avx2(w.data(), x.data(), w.size(), 1.0);
  CHECK(std::fabs(a - b) <= 1e-12 * a + 1e-300);
  double a0 = kern::detail::weighted_exp_sum_scalar(w.data(), x.data(), w.size(), 0.0);
  double b0 = kern::detail::weighted_exp_sum_avx2(w.data(), x.data(), w.size(), 0.0);
  CHECK(a0 == doctest::Approx(15.0));
  CHECK(b0 == doctest::Approx(15.0));
}

TEST_CASE("four_point_excess backends agree bit for bit") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    size_t n = 1 + rng.below(500);
    std::vector<double> q(6 * n);
    for (auto& v : q) v = rng.uniform(0.0, 10.0);
    double a = kern::detail::four_point_excess_scalar(q.data(), n);
    CHECK(std::isfinite(a));
    if (kern::detail::avx2_available()) {
      double b = kern::detail::four_point_excess_avx2(q.data(), n);
      CHECK(a == b);
    }
  }
}

TEST_CASE("backend selection is forceable") {
  kern::set_backend(kern::Backend::kScalar);
  CHECK(std::string(kern::backend_name()) == "scalar");
  kern::set_backend(kern::Backend::kAuto);
  if (kern::detail::avx2_available())
    CHECK(std::string(kern::backend_name()) == "avx2");
  else
    CHECK(std::string(kern::backend_name()) == "scalar");
}
