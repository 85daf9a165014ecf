#include "jpegcons/toy.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "jpegcons/error.hpp"

namespace jpegcons::toy {

Eigen::MatrixXd dct_matrix(int n) {
  Eigen::MatrixXd c(n, n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      c(k, i) = (k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n)) *
                std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
  return c;
}

void ToyModel::validate() const {
  if (n < 1 || n > 8 || a < 2 || a > 8 || std::pow(double(a), n) > 4096)
    fail(ErrorKind::InvalidArgument, "toy model needs 1 <= n <= 8, 2 <= a <= 8 and a^n <= 4096");
  if (q.size() != n || (q.array() <= 0).any()) fail(ErrorKind::InvalidArgument, "q needs n positive entries");
  if (prior.size() != states()) fail(ErrorKind::InvalidArgument, "prior needs a^n entries");
  if ((prior.array() < 0).any() || std::abs(prior.sum() - 1.0) > 1e-12)
    fail(ErrorKind::InvalidArgument, "prior must be nonnegative and sum to 1");
}

int ToyModel::states() const {
  int s = 1;
  for (int i = 0; i < n; ++i) s *= a;
  return s;
}

Eigen::VectorXd ToyModel::signal(int index) const {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) {
    x(i) = double(index % a - a / 2);
    index /= a;
  }
  return x;
}

Eigen::VectorXd ToyModel::coefficients(const Eigen::VectorXd& x) const {
  return (dct_matrix(n) * x).cwiseQuotient(q);
}

std::vector<int> ToyModel::degrade(int index) const {
  const Eigen::VectorXd c = coefficients(signal(index));
  Code y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) y[std::size_t(i)] = int(std::round(c(i)));
  return y;
}

namespace {

// Degradation of every signal, computed once.
std::vector<Code> all_codes(const ToyModel& m) {
  std::vector<Code> codes;
  codes.reserve(std::size_t(m.states()));
  for (int i = 0; i < m.states(); ++i) codes.push_back(m.degrade(i));
  return codes;
}

}  // namespace

std::map<Code, double> observation_law(const ToyModel& m) {
  m.validate();
  std::map<Code, double> law;
  const auto codes = all_codes(m);
  for (int i = 0; i < m.states(); ++i)
    if (m.prior(i) > 0) law[codes[std::size_t(i)]] += m.prior(i);
  return law;
}

Distribution enumerate_posterior(const ToyModel& m, const Code& y) {
  m.validate();
  Distribution p = Distribution::Zero(m.states());
  for (int i = 0; i < m.states(); ++i)
    if (m.degrade(i) == y) p(i) = m.prior(i);
  const double z = p.sum();
  if (!(z > 0)) fail(ErrorKind::UnreachableY, "no signal with prior mass degrades to y");
  return p / z;
}

Eigen::VectorXd mmse_estimate(const ToyModel& m, const Code& y) {
  const Distribution p = enumerate_posterior(m, y);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(m.n);
  for (int i = 0; i < m.states(); ++i)
    if (p(i) > 0) mean += p(i) * m.signal(i);
  return mean;
}

double theorem1_bound(const ToyModel& m) {
  double worst = 0.0;
  for (const auto& [y, py] : observation_law(m)) {
    const Eigen::VectorXd c = m.coefficients(mmse_estimate(m, y));
    for (int i = 0; i < m.n; ++i) worst = std::max(worst, std::abs(c(i) - y[std::size_t(i)]));
  }
  return worst;
}

SamplerReport posterior_sampler_checks(const ToyModel& m, const Sampler& sampler) {
  const auto law = observation_law(m);
  const auto codes = all_codes(m);
  SamplerReport r;
  Distribution marginal = Distribution::Zero(m.states());
  for (const auto& [y, py] : law) {
    const Distribution s = sampler(y);
    if (s.size() != m.states() || (s.array() < 0).any() || !s.allFinite() || std::abs(s.sum() - 1.0) > 1e-9)
      fail(ErrorKind::MalformedSampler, "sampler must return a distribution over all signals");
    for (int i = 0; i < m.states(); ++i)
      if (codes[std::size_t(i)] != y) r.inconsistent_mass += py * s(i);
    marginal += py * s;
    r.posterior_deviation =
        std::max(r.posterior_deviation, (s - enumerate_posterior(m, y)).cwiseAbs().maxCoeff());
  }
  r.total_variation = 0.5 * (marginal - m.prior).cwiseAbs().sum();
  const bool consistent = r.inconsistent_mass <= 1e-12, preserving = r.total_variation <= 1e-12;
  r.converse_holds = !(consistent && preserving) || r.posterior_deviation <= 1e-12;
  return r;
}

Sampler posterior_sampler(const ToyModel& m) {
  return [m](const Code& y) { return enumerate_posterior(m, y); };
}

Sampler mmse_snapped_sampler(const ToyModel& m) {
  return [m](const Code& y) {
    const Distribution p = enumerate_posterior(m, y);
    const Eigen::VectorXd mean = mmse_estimate(m, y);
    int best = -1;
    double best_d = INFINITY;
    for (int i = 0; i < m.states(); ++i) {
      if (p(i) <= 0) continue;
      const double d = (m.signal(i) - mean).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    Distribution out = Distribution::Zero(m.states());
    out(best) = 1.0;
    return out;
  };
}

Sampler prior_sampler(const ToyModel& m) {
  return [m](const Code&) { return Distribution(m.prior); };
}

Sampler biased_posterior_sampler(const ToyModel& m) {
  return [m](const Code& y) {
    Distribution p = enumerate_posterior(m, y);
    for (int i = 0; i < m.states(); ++i) {
      if (p(i) > 0 && p(i) < 1) {
        p(i) *= 2;
        break;
      }
    }
    return Distribution(p / p.sum());
  };
}

double fm_identity_check(const ToyModel& m) {
  // Per-y first moment from one pass over the joint law of (X, Y).
  std::map<Code, std::pair<double, Eigen::VectorXd>> acc;
  const auto codes = all_codes(m);
  for (int i = 0; i < m.states(); ++i) {
    if (m.prior(i) <= 0) continue;
    auto [it, fresh] = acc.try_emplace(codes[std::size_t(i)], 0.0, Eigen::VectorXd::Zero(m.n));
    it->second.first += m.prior(i);
    it->second.second += m.prior(i) * m.signal(i);
  }
  double worst = 0.0;
  for (const auto& [y, sums] : acc)
    worst = std::max(worst, (sums.second / sums.first - mmse_estimate(m, y)).cwiseAbs().maxCoeff());
  return worst;
}

double fm_identity_check(const ToyModel& m, const Sampler& sampler) {
  double worst = 0.0;
  for (const auto& [y, py] : observation_law(m)) {
    const Distribution s = sampler(y);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(m.n);
    for (int i = 0; i < m.states(); ++i) mean += s(i) * m.signal(i);
    worst = std::max(worst, (mean - mmse_estimate(m, y)).cwiseAbs().maxCoeff());
  }
  return worst;
}

ToyModel random_model(std::mt19937_64& rng, int n_max, int a_max) {
  std::uniform_int_distribution<int> pick_n(1, n_max), pick_a(2, a_max), coin(0, 3);
  std::uniform_real_distribution<double> u(0.3, 3.0);
  std::exponential_distribution<double> weight(1.0);
  ToyModel m;
  m.n = pick_n(rng);
  m.a = pick_a(rng);
  m.q.resize(m.n);
  // The DC row, and the middle row for even n, are +-1/sqrt(n) on every
  // sample: q = 1/sqrt(n) makes integer coefficients and q = 2/sqrt(n)
  // half-integers, i.e. rounding ties.
  const double unit = 1.0 / std::sqrt(double(m.n));
  for (int i = 0; i < m.n; ++i) {
    const bool tie_row = i == 0 || (m.n % 2 == 0 && i == m.n / 2);
    const int c = coin(rng);
    m.q(i) = tie_row && c == 0 ? 2 * unit : tie_row && c == 1 ? unit : u(rng);
  }
  m.prior.resize(m.states());
  for (int i = 0; i < m.states(); ++i) m.prior(i) = coin(rng) == 0 ? 0.0 : weight(rng);
  if (m.prior.sum() == 0) m.prior(0) = 1.0;
  m.prior /= m.prior.sum();
  return m;
}

std::string format_model(const ToyModel& m) {
  std::ostringstream out;
  out.precision(17);
  out << m.n << ' ' << m.a << '\n';
  for (int i = 0; i < m.n; ++i) out << (i ? " " : "") << m.q(i);
  out << '\n';
  for (int i = 0; i < m.states(); ++i) out << (i ? " " : "") << m.prior(i);
  out << '\n';
  return out.str();
}

ToyModel parse_model(const std::string& text) {
  std::istringstream in(text);
  ToyModel m;
  if (!(in >> m.n >> m.a) || m.n < 1 || m.n > 8 || m.a < 2 || m.a > 8)
    fail(ErrorKind::BadFixture, "toy model header must be 'n a'");
  m.q.resize(m.n);
  for (int i = 0; i < m.n; ++i)
    if (!(in >> m.q(i))) fail(ErrorKind::BadFixture, "toy model q vector is short");
  if (std::pow(double(m.a), m.n) > 4096) fail(ErrorKind::BadFixture, "toy model too large");
  m.prior.resize(m.states());
  for (int i = 0; i < m.states(); ++i)
    if (!(in >> m.prior(i))) fail(ErrorKind::BadFixture, "toy model prior is short");
  std::string extra;
  if (in >> extra) fail(ErrorKind::BadFixture, "trailing data in toy model");
  try {
    m.validate();
  } catch (const Error& e) {
    fail(ErrorKind::BadFixture, e.what());
  }
  return m;
}

}  // namespace jpegcons::toy
