#pragma once

namespace mazecoord {

// Discounted returns of two ways of reaching the last cell of an m-cell
// intent under the discounted bonus: walking every intent cell, or taking an
// n-step shortcut that only collects the final bonus.
struct SkipFollowReturns {
  double follow;
  double skip;
  double diff;  // skip - follow, closed form
};

// Requires 1 <= n <= m and lambda < gamma.
SkipFollowReturns skip_vs_follow(int m, int n, double gamma, double lambda);

// diff(n) > 0 exactly when n is below the returned value.
double skip_threshold(int m, double gamma, double lambda);

}  // namespace mazecoord
