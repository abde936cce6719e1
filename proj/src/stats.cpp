#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bimt {

MeanStderr mean_stderr(std::span<const double> xs) {
  MeanStderr out;
  out.n = static_cast<long>(xs.size());
  if (out.n == 0) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / out.n;
  if (out.n < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.se = std::sqrt(ss / (out.n - 1) / out.n);
  return out;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  return d;
}

namespace {

double ks_q(double lambda) {
  // Q_KS(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)
  if (lambda <= 0.0) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double d = ks_statistic(std::move(a), std::move(b));
  double ne = std::sqrt(na * nb / (na + nb));
  return ks_q((ne + 0.12 + 0.11 / ne) * d);
}

namespace {

double gamma_p_series(double a, double x) {
  double ap = a, sum = 1.0 / a, del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_contfrac(a, x);
}

double chi_square_p(double stat, int df) {
  if (df <= 0) throw std::invalid_argument("chi_square_p: df must be positive");
  return gamma_q(0.5 * df, 0.5 * stat);
}

double chi_square_gof_p(std::span<const long> observed, std::span<const double> expected_prob) {
  if (observed.size() != expected_prob.size() || observed.empty())
    throw std::invalid_argument("chi_square_gof_p: size mismatch");
  long total = 0;
  for (long o : observed) total += o;
  // pool cells with expected count < 5 into one
  double stat = 0.0;
  int cells = 0;
  double pooled_exp = 0.0;
  long pooled_obs = 0;
  for (size_t i = 0; i < observed.size(); ++i) {
    double e = expected_prob[i] * total;
    if (e < 5.0) {
      pooled_exp += e;
      pooled_obs += observed[i];
      continue;
    }
    stat += (observed[i] - e) * (observed[i] - e) / e;
    ++cells;
  }
  if (pooled_exp > 0.0) {
    stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  }
  if (cells < 2) return 1.0;
  return chi_square_p(stat, cells - 1);
}

double chi_square_homogeneity_p(std::span<const long> a, std::span<const long> b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("chi_square_homogeneity_p: size mismatch");
  long na = 0, nb = 0;
  for (long x : a) na += x;
  for (long x : b) nb += x;
  if (na == 0 || nb == 0) throw std::invalid_argument("chi_square_homogeneity_p: empty sample");
  double stat = 0.0;
  int cells = 0;
  long pooled_a = 0, pooled_b = 0;  // small cells merged into one
  for (size_t i = 0; i < a.size(); ++i) {
    long col = a[i] + b[i];
    if (col == 0) continue;
    double ea = static_cast<double>(col) * na / (na + nb);
    double eb = static_cast<double>(col) * nb / (na + nb);
    if (ea < 5.0 || eb < 5.0) {
      pooled_a += a[i];
      pooled_b += b[i];
      continue;
    }
    stat += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
    ++cells;
  }
  if (pooled_a + pooled_b > 0) {
    long col = pooled_a + pooled_b;
    double ea = static_cast<double>(col) * na / (na + nb);
    double eb = static_cast<double>(col) * nb / (na + nb);
    stat += (pooled_a - ea) * (pooled_a - ea) / ea + (pooled_b - eb) * (pooled_b - eb) / eb;
    ++cells;
  }
  if (cells < 2) return 1.0;
  return chi_square_p(stat, cells - 1);
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope: bad input");
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace bimt
