#include "mazecoord/belief.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mazecoord {

void ConfidenceFactors::validate() const {
  if (!(c_minus > 0.0) || !(c_plus > c_minus)) {
    throw std::invalid_argument("confidence factors must satisfy c_plus > c_minus > 0");
  }
}

BeliefTable::BeliefTable(int width, int height) : width_(width), height_(height) {
  const auto n = static_cast<std::size_t>(width) * height * 4;
  alpha_.assign(n, 1.0);
  beta_.assign(n, 1.0);
  mean_.assign(n, 0.5);
}

void BeliefTable::observe(GridPos p, Action a, const ConfidenceFactors& factors) {
  for (Action other : kMoveActions) {
    const std::size_t i = slot(p, other);
    if (other == a) {
      alpha_[i] += factors.c_plus;
    } else {
      beta_[i] += factors.c_minus;
    }
    refresh(i);
  }
}

void BeliefTable::assign(GridPos p, Action a, double alpha, double beta) {
  if (!(alpha >= 1.0) || !(beta >= 1.0)) throw std::invalid_argument("beta parameters must be >= 1");
  const std::size_t i = slot(p, a);
  alpha_[i] = alpha;
  beta_[i] = beta;
  refresh(i);
}

void PartnerHistory::push(GridPos p, Action a) {
  if (!is_move(a)) throw std::invalid_argument("partner history holds movement actions only");
  entries_.emplace_back(p, a);
}

BeliefTable init_belief(int width, int height) { return BeliefTable(width, height); }

void ingest_history(BeliefTable& belief, PartnerHistory& history,
                    const ConfidenceFactors& factors) {
  const auto& entries = history.entries();
  for (std::size_t i = history.cursor(); i < entries.size(); ++i) {
    belief.observe(entries[i].first, entries[i].second, factors);
  }
  history.advance();
}

double posterior_mean(double alpha, double beta, int y, const ConfidenceFactors& factors) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::domain_error("alpha and beta must be positive");
  const double a = alpha + factors.c_plus * y;
  const double b = beta + factors.c_minus * (1 - y);
  return a / (a + b);
}

double constraint_c_plus(double theta, double c_minus) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::domain_error("theta must lie in (0, 1)");
  if (!(c_minus > 0.0)) throw std::domain_error("c_minus must be positive");
  // log1p/log keep precision when (1 - theta)^c_minus is tiny.
  return std::log1p(-std::pow(1.0 - theta, c_minus)) / std::log(theta);
}

char direction_letter(Action a) {
  switch (a) {
    case Action::Right: return 'R';
    case Action::Up: return 'U';
    case Action::Left: return 'L';
    case Action::Down: return 'D';
    case Action::Switch: break;
  }
  throw std::invalid_argument("switch has no direction");
}

nlohmann::json belief_to_json(const BeliefTable& belief) {
  nlohmann::json out = nlohmann::json::object();
  for (int r = 0; r < belief.height(); ++r) {
    for (int c = 0; c < belief.width(); ++c) {
      for (Action a : kMoveActions) {
        const std::string key =
            std::to_string(c) + "," + std::to_string(r) + "," + direction_letter(a);
        out[key] = {{"alpha", belief.alpha({c, r}, a)},
                    {"beta", belief.beta({c, r}, a)},
                    {"mean", belief.mean({c, r}, a)}};
      }
    }
  }
  return out;
}

}  // namespace mazecoord
