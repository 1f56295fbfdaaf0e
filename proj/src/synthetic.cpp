#include "futurequant/synthetic.hpp"

#include <cmath>
#include <random>
#include <string>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/tools/roots.hpp>

#include "futurequant/error.hpp"
#include "futurequant/io.hpp"

namespace fq {

std::string_view to_string(SyntheticKind kind) noexcept {
  switch (kind) {
    case SyntheticKind::kGaussianAr1: return "gaussian-ar1";
    case SyntheticKind::kHeteroscedasticAr1: return "heteroscedastic-ar1";
    case SyntheticKind::kRegimeSwitch: return "regime-switch";
  }
  return "?";
}

SyntheticKind parse_synthetic_kind(std::string_view name) {
  for (auto k : {SyntheticKind::kGaussianAr1, SyntheticKind::kHeteroscedasticAr1, SyntheticKind::kRegimeSwitch}) {
    if (to_string(k) == trim(name)) return k;
  }
  throw Error(ErrorCode::kInvalidSpec, "unknown synthetic kind '" + std::string(name) + "'");
}

void SyntheticSpec::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::kInvalidSpec, m); };
  if (!(std::abs(phi) < 1.0)) bad("|phi| must be < 1");
  if (!(sigma0 > 0.0)) bad("sigma0 must be positive");
  if (!(kappa >= 0.0)) bad("kappa must be non-negative");
  if (!(stay_probability >= 0.0 && stay_probability <= 1.0)) bad("stay_probability must lie in [0,1]");
  if (length < 2) bad("length must be >= 2");
  if (!std::isfinite(level) || !std::isfinite(regime_mean0) || !std::isfinite(regime_mean1)) {
    bad("level and regime means must be finite");
  }
}

SyntheticSeries generate(const SyntheticSpec& spec) {
  spec.validate();
  SyntheticSeries s;
  s.spec = spec;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  const double mu[2] = {spec.regime_mean0, spec.regime_mean1};

  double x = 0.0;
  int state = 0;
  for (std::size_t t = 0; t < spec.length; ++t) {
    if (t > 0) {
      const double e = normal(rng);
      switch (spec.kind) {
        case SyntheticKind::kGaussianAr1: x = spec.phi * x + spec.sigma0 * e; break;
        case SyntheticKind::kHeteroscedasticAr1:
          x = spec.phi * x + spec.sigma0 * (1.0 + spec.kappa * std::abs(x)) * e;
          break;
        case SyntheticKind::kRegimeSwitch:
          if (uniform(rng) >= spec.stay_probability) state = 1 - state;
          x = spec.phi * x + mu[state] + spec.sigma0 * e;
          break;
      }
    }
    s.latent.push_back(x);
    s.regime.push_back(state);
    s.prices.push_back(spec.level + x);
  }
  return s;
}

double SyntheticSeries::oracle_quantile(std::size_t t, double beta) const {
  if (t >= latent.size()) throw Error(ErrorCode::kInvalidArgument, "oracle index out of range");
  if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorCode::kInvalidArgument, "beta must lie in (0,1)");
  const boost::math::normal n01;
  const double z = boost::math::quantile(n01, beta);
  const double x = latent[t];
  const double base = spec.level + spec.phi * x;
  switch (spec.kind) {
    case SyntheticKind::kGaussianAr1: return base + spec.sigma0 * z;
    case SyntheticKind::kHeteroscedasticAr1:
      return base + spec.sigma0 * (1.0 + spec.kappa * std::abs(x)) * z;
    case SyntheticKind::kRegimeSwitch: break;
  }
  const double mu[2] = {spec.regime_mean0, spec.regime_mean1};
  const int s = regime[t];
  const double p = spec.stay_probability;
  const double m_stay = base + mu[s];
  const double m_move = base + mu[1 - s];
  auto cdf = [&](double q) {
    return p * boost::math::cdf(n01, (q - m_stay) / spec.sigma0) +
           (1.0 - p) * boost::math::cdf(n01, (q - m_move) / spec.sigma0) - beta;
  };
  const double lo = std::min(m_stay, m_move) + spec.sigma0 * z - 1.0;
  const double hi = std::max(m_stay, m_move) + spec.sigma0 * z + 1.0;
  const auto [a, b] = boost::math::tools::bisect(cdf, lo, hi, boost::math::tools::eps_tolerance<double>(50));
  return 0.5 * (a + b);
}

std::vector<Bar> synthetic_bars(const SyntheticSeries& series, std::chrono::milliseconds interval,
                                Millis start_ms) {
  std::vector<Bar> bars;
  bars.reserve(series.prices.size());
  for (std::size_t t = 0; t < series.prices.size(); ++t) {
    const double open = series.prices[t == 0 ? 0 : t - 1];
    const double close = series.prices[t];
    bars.push_back(Bar{start_ms + static_cast<Millis>(t) * interval.count(), open, std::max(open, close),
                       std::min(open, close), close, t == 0 ? 1 : 2, (close + 0.01) - (close - 0.01)});
  }
  return bars;
}

std::vector<TickRecord> synthetic_ticks(const SyntheticSeries& series, std::chrono::milliseconds interval,
                                        Millis start_ms) {
  if (interval.count() < 2) throw Error(ErrorCode::kInvalidSpec, "tick interval must be >= 2 ms");
  std::vector<TickRecord> ticks;
  std::int64_t volume = 0;
  auto emit = [&](Millis ts, double price) {
    ++volume;
    ticks.push_back(TickRecord{ts / 1000, static_cast<int>(ts % 1000), price, volume, price - 0.01, 5,
                               price + 0.01, 5});
  };
  for (std::size_t t = 0; t < series.prices.size(); ++t) {
    const Millis bar_start = start_ms + static_cast<Millis>(t) * interval.count();
    emit(bar_start, series.prices[t == 0 ? 0 : t - 1]);
    emit(bar_start + interval.count() / 2, series.prices[t]);
  }
  return ticks;
}

}  // namespace fq
