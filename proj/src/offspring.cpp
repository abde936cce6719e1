#include "offspring.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bimt {

namespace {

void finalize(OffspringDistribution& d) {
  long double sum = 0.0;
  for (double p : d.pmf) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument("offspring pmf entries must be finite and >= 0");
    sum += p;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("offspring pmf has no mass");
  for (double& p : d.pmf) p = static_cast<double>(p / sum);
  d.cdf.clear();
  d.cdf.reserve(d.pmf.size());
  long double acc = 0.0, mean = 0.0, m2 = 0.0;
  for (size_t k = 0; k < d.pmf.size(); ++k) {
    acc += d.pmf[k];
    d.cdf.push_back(static_cast<double>(acc));
    mean += static_cast<long double>(k) * d.pmf[k];
    m2 += static_cast<long double>(k) * static_cast<long double>(k) * d.pmf[k];
  }
  d.mean = static_cast<double>(mean);
  d.variance = static_cast<double>(m2 - mean * mean);
  d.critical_or_subcritical = d.mean <= 1.0 + 1e-9;
}

}  // namespace

long OffspringDistribution::sample(Rng& rng) const {
  return static_cast<long>(rng.discrete_cdf(cdf));
}

OffspringDistribution OffspringDistribution::poisson(double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("poisson: lambda must be > 0");
  OffspringDistribution d;
  std::ostringstream name;
  name << "poisson:" << lambda;
  d.name = name.str();
  double p = std::exp(-lambda);
  double tail = 1.0;
  for (long k = 0;; ++k) {
    d.pmf.push_back(p);
    tail -= p;
    if (tail < 1e-16 && k > lambda) break;
    if (k > 400) break;
    p *= lambda / static_cast<double>(k + 1);
  }
  d.truncation_mass = std::max(0.0, tail);
  finalize(d);
  return d;
}

OffspringDistribution OffspringDistribution::geometric(double p) {
  if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("geometric: p must be in (0,1)");
  OffspringDistribution d;
  std::ostringstream name;
  name << "geometric:" << p;
  d.name = name.str();
  double mass = 1.0 - p;
  double tail = 1.0;
  for (long k = 0;; ++k) {
    d.pmf.push_back(mass);
    tail -= mass;
    if (tail < 1e-16) break;
    if (k > 4000) break;
    mass *= p;
  }
  d.truncation_mass = std::max(0.0, tail);
  finalize(d);
  return d;
}

OffspringDistribution OffspringDistribution::binary(double p0, double p2) {
  if (!(p0 >= 0.0) || !(p2 >= 0.0) || std::fabs(p0 + p2 - 1.0) > 1e-12)
    throw std::invalid_argument("binary: need p0 + p2 = 1 with both >= 0");
  OffspringDistribution d;
  std::ostringstream name;
  name << "binary:p0=" << p0 << ",p2=" << p2;
  d.name = name.str();
  d.pmf = {p0, 0.0, p2};
  finalize(d);
  return d;
}

OffspringDistribution OffspringDistribution::heavy_tail(double alpha, double C, long k_max) {
  if (!(alpha > 1.0) || !(alpha <= 2.0))
    throw std::invalid_argument("heavy_tail: alpha must be in (1, 2]");
  if (!(C > 0.0)) throw std::invalid_argument("heavy_tail: C must be > 0");
  if (k_max < 2) throw std::invalid_argument("heavy_tail: k_max must be >= 2");
  long double s0 = 0.0, s1 = 0.0;  // sums of k^{-1-alpha} and k^{-alpha} over k >= 2
  double tail_beyond = 0.0;
  for (long k = 2; k <= k_max; ++k) {
    double base = std::pow(static_cast<double>(k), -1.0 - alpha);
    s0 += base;
    s1 += base * static_cast<long double>(k);
  }
  // integral bound on the truncated tail sum_{k > k_max} C k^{-1-alpha}
  tail_beyond = C * std::pow(static_cast<double>(k_max), -alpha) / alpha;
  double eta1 = static_cast<double>(1.0L - C * s1);
  double eta0 = static_cast<double>(C * (s1 - s0));
  if (eta1 < 0.0) {
    std::ostringstream msg;
    msg << "heavy_tail: C too large for a critical pmf; need C <= " << static_cast<double>(1.0L / s1)
        << " at alpha=" << alpha;
    throw std::domain_error(msg.str());
  }
  OffspringDistribution d;
  std::ostringstream name;
  name << "stable:alpha=" << alpha << ",C=" << C;
  d.name = name.str();
  d.pmf.resize(static_cast<size_t>(k_max) + 1, 0.0);
  d.pmf[0] = eta0;
  d.pmf[1] = eta1;
  for (long k = 2; k <= k_max; ++k)
    d.pmf[static_cast<size_t>(k)] = C * std::pow(static_cast<double>(k), -1.0 - alpha);
  d.truncation_mass = tail_beyond;
  finalize(d);
  return d;
}

OffspringDistribution OffspringDistribution::from_table(std::vector<double> pmf,
                                                        std::string name) {
  OffspringDistribution d;
  d.name = std::move(name);
  d.pmf = std::move(pmf);
  finalize(d);
  return d;
}

namespace {

double parse_kv(const std::string& args, const std::string& key, double fallback,
                bool required) {
  std::stringstream ss(args);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) continue;
    if (item.substr(0, eq) == key) return std::stod(item.substr(eq + 1));
  }
  if (required) throw std::invalid_argument("offspring spec missing parameter '" + key + "'");
  return fallback;
}

}  // namespace

OffspringDistribution OffspringDistribution::parse(const std::string& spec) {
  auto colon = spec.find(':');
  std::string family = spec.substr(0, colon);
  std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  try {
    if (family == "poisson") return poisson(args.empty() ? 1.0 : std::stod(args));
    if (family == "geometric") return geometric(args.empty() ? 0.5 : std::stod(args));
    if (family == "binary") {
      if (args.empty()) return binary(0.5, 0.5);
      double p0 = parse_kv(args, "p0", 0.5, false);
      double p2 = parse_kv(args, "p2", 1.0 - p0, false);
      return binary(p0, p2);
    }
    if (family == "stable") {
      double alpha = parse_kv(args, "alpha", 0.0, true);
      double c = parse_kv(args, "C", 0.0, true);
      return heavy_tail(alpha, c);
    }
  } catch (const std::domain_error&) {
    throw;
  } catch (const std::exception& e) {
    throw std::invalid_argument("bad offspring spec '" + spec + "': " + e.what());
  }
  throw std::invalid_argument("unknown offspring family '" + family + "'");
}

}  // namespace bimt
