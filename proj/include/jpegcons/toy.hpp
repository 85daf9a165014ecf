#pragma once

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace jpegcons::toy {

// Signals of length n over an alphabet of a level-shifted integers
// {-floor(a/2), ..., a - 1 - floor(a/2)}, degraded by a 1D orthonormal DCT,
// division by q and rounding (half away from zero).
struct ToyModel {
  int n = 0;
  int a = 0;
  Eigen::VectorXd q;
  Eigen::VectorXd prior;  // one entry per signal, index = base-a digits

  void validate() const;
  int states() const;
  Eigen::VectorXd signal(int index) const;
  Eigen::VectorXd coefficients(const Eigen::VectorXd& x) const;  // DCT(x) / q, unrounded
  std::vector<int> degrade(int index) const;
};

using Code = std::vector<int>;
// A distribution over all signals, one per observed y.
using Distribution = Eigen::VectorXd;
using Sampler = std::function<Distribution(const Code& y)>;

Eigen::MatrixXd dct_matrix(int n);

// p(y) for every reachable y with positive probability.
std::map<Code, double> observation_law(const ToyModel& m);

Distribution enumerate_posterior(const ToyModel& m, const Code& y);
Eigen::VectorXd mmse_estimate(const ToyModel& m, const Code& y);

// max over reachable y of |DCT(E[X|y]) / q - y|_inf.
double theorem1_bound(const ToyModel& m);

struct SamplerReport {
  double inconsistent_mass = 0.0;  // sum_y p(y) * mass on x with D(x) != y
  double total_variation = 0.0;    // between sum_y p(y) sampler(y) and the prior
  double posterior_deviation = 0.0;  // max abs difference from the posterior tables
  // False only when the sampler is consistent and marginal-preserving but is
  // not the posterior sampler.
  bool converse_holds = true;
};

SamplerReport posterior_sampler_checks(const ToyModel& m, const Sampler& sampler);

Sampler posterior_sampler(const ToyModel& m);
// Point mass at the consistent signal nearest to E[X|y].
Sampler mmse_snapped_sampler(const ToyModel& m);
// Ignores y and returns the prior.
Sampler prior_sampler(const ToyModel& m);
// Posterior with the mass of its first non-certain state doubled, renormalized.
Sampler biased_posterior_sampler(const ToyModel& m);

// Max abs deviation between the per-y mean of the exact posterior sampler,
// accumulated from the joint law, and mmse_estimate.
double fm_identity_check(const ToyModel& m);
// Same, for the per-y mean of an arbitrary sampler.
double fm_identity_check(const ToyModel& m, const Sampler& sampler);

// n in [1, n_max], a in [2, a_max], random prior (some zeros), q drawn partly
// from values that put DCT coefficients on rounding ties.
ToyModel random_model(std::mt19937_64& rng, int n_max = 4, int a_max = 4);

// "n a", then the q vector, then the prior, whitespace separated.
std::string format_model(const ToyModel& m);
ToyModel parse_model(const std::string& text);

}  // namespace jpegcons::toy
