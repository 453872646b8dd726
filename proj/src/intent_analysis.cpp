#include "mazecoord/intent_analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace mazecoord {

namespace {

void check_discounts(double gamma, double lambda) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::domain_error("gamma must lie in (0, 1)");
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::domain_error("lambda must lie in (0, 1)");
  if (!(lambda < gamma)) throw std::domain_error("lambda must be below gamma");
}

}  // namespace

SkipFollowReturns skip_vs_follow(int m, int n, double gamma, double lambda) {
  check_discounts(gamma, lambda);
  if (m < 1 || n < 1 || n > m) throw std::domain_error("require 1 <= n <= m");

  double follow = 0.0;
  for (int t = 0; t < m; ++t) follow += std::pow(gamma, t) * (std::pow(lambda, m - t - 1) - 1.0);
  double skip = std::pow(gamma, n - 1);
  for (int t = 0; t < n; ++t) skip -= std::pow(gamma, t);

  const double diff = (std::pow(gamma, n) - std::pow(gamma, m + 1)) / (gamma * (1.0 - gamma)) -
                      (std::pow(gamma, m) - std::pow(lambda, m)) / (gamma - lambda);
  return {follow, skip, diff};
}

double skip_threshold(int m, double gamma, double lambda) {
  check_discounts(gamma, lambda);
  if (m < 1) throw std::domain_error("require m >= 1");
  const double arg = std::pow(gamma, m + 1) +
                     gamma * (1.0 - gamma) * (std::pow(gamma, m) - std::pow(lambda, m)) /
                         (gamma - lambda);
  return std::log(arg) / std::log(gamma);
}

}  // namespace mazecoord
