#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mazecoord/game.hpp"

namespace mazecoord {

// Weights on positive and negative evidence. Ingestion requires
// c_plus > c_minus > 0.
struct ConfidenceFactors {
  double c_plus = 2.0;
  double c_minus = 0.5;

  void validate() const;
};

// Beta(alpha, beta) over "the partner can make this move" for every
// (cell, movement action). Parameters start at 1 and only grow.
class BeliefTable {
 public:
  BeliefTable() = default;
  BeliefTable(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return alpha_.size(); }

  double alpha(GridPos p, Action a) const { return alpha_[slot(p, a)]; }
  double beta(GridPos p, Action a) const { return beta_[slot(p, a)]; }
  double mean(GridPos p, Action a) const { return mean_[slot(p, a)]; }
  // Flat view indexed by cell_index * 4 + move_index.
  const std::vector<double>& means() const { return mean_; }

  // One observed partner move: alpha += c_plus on (p, a), beta += c_minus on
  // each sibling move at p.
  void observe(GridPos p, Action a, const ConfidenceFactors& factors);

  // Overwrites one entry; both parameters must be at least 1.
  void assign(GridPos p, Action a, double alpha, double beta);

  bool operator==(const BeliefTable&) const = default;

 private:
  std::size_t slot(GridPos p, Action a) const {
    return static_cast<std::size_t>(p.row * width_ + p.col) * 4 + move_index(a);
  }
  void refresh(std::size_t i) { mean_[i] = alpha_[i] / (alpha_[i] + beta_[i]); }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> alpha_;
  std::vector<double> beta_;
  std::vector<double> mean_;
};

// Executed partner moves plus the index of the first entry not yet folded
// into a belief.
class PartnerHistory {
 public:
  void push(GridPos p, Action a);

  const std::vector<std::pair<GridPos, Action>>& entries() const { return entries_; }
  std::size_t cursor() const { return cursor_; }
  std::size_t pending() const { return entries_.size() - cursor_; }
  void advance() { cursor_ = entries_.size(); }

 private:
  std::vector<std::pair<GridPos, Action>> entries_;
  std::size_t cursor_ = 0;
};

BeliefTable init_belief(int width, int height);

// Folds the unprocessed suffix of the history into the table.
void ingest_history(BeliefTable& belief, PartnerHistory& history,
                    const ConfidenceFactors& factors);

// Posterior mean of Beta(alpha, beta) after one weighted Bernoulli
// observation y.
double posterior_mean(double alpha, double beta, int y, const ConfidenceFactors& factors);

// c_plus making theta^c_plus + (1 - theta)^c_minus = 1.
double constraint_c_plus(double theta, double c_minus);

// {"col,row,dir": {"alpha", "beta", "mean"}} with dir in R/U/L/D.
nlohmann::json belief_to_json(const BeliefTable& belief);

char direction_letter(Action a);

}  // namespace mazecoord
