#include "dvs/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dvs {

std::string marginal_method_name(MarginalMethod m) {
  switch (m) {
    case MarginalMethod::Pearson:
      return "pearson";
    case MarginalMethod::Kendall:
      return "kendall";
    case MarginalMethod::Sirs:
      return "sirs";
    case MarginalMethod::Dcor:
      return "dcor";
  }
  return "?";
}

namespace {

void check_column(const DataShard& shard, int j) {
  if (j < 0 || j >= shard.p()) {
    throw ShapeError("marginal: column " + std::to_string(j) +
                     " outside [0, " + std::to_string(shard.p()) + ")");
  }
}

// population moments (1/n)
double pop_var(const Eigen::VectorXd& v) {
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / v.size();
}

// Merge sort on y counting strict inversions; ties are not inversions.
long long count_inversions(std::vector<double>& y, std::vector<double>& tmp,
                           std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  long long inv = count_inversions(y, tmp, lo, mid) +
                  count_inversions(y, tmp, mid, hi);
  std::size_t a = lo, b = mid, out = lo;
  while (a < mid && b < hi) {
    if (y[b] < y[a]) {
      inv += static_cast<long long>(mid - a);
      tmp[out++] = y[b++];
    } else {
      tmp[out++] = y[a++];
    }
  }
  while (a < mid) tmp[out++] = y[a++];
  while (b < hi) tmp[out++] = y[b++];
  std::copy(tmp.begin() + lo, tmp.begin() + hi, y.begin() + lo);
  return inv;
}

long long tie_pairs(const std::vector<double>& sorted) {
  long long t = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const long long g = static_cast<long long>(j - i);
    t += g * (g - 1) / 2;
    i = j;
  }
  return t;
}

}  // namespace

double pearson_utility(const DataShard& shard, int j) {
  check_column(shard, j);
  const Eigen::VectorXd x = shard.X.col(j);
  const Eigen::VectorXd& y = shard.y;
  const double xm = x.mean(), ym = y.mean();
  const double sxx = (x.array() - xm).square().sum();
  const double syy = (y.array() - ym).square().sum();
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  const double sxy = ((x.array() - xm) * (y.array() - ym)).sum();
  return sxy / std::sqrt(sxx * syy);
}

double kendall_utility(const DataShard& shard, int j) {
  check_column(shard, j);
  const int n = shard.n();
  if (n < 2) throw ShapeError("kendall: need n >= 2");

  // Knight's O(n log n) relation: C - D = n0 - n1 - n2 + n3 - 2s with
  // s the strict y-inversions after sorting by (x, y).
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto x = shard.X.col(j);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return x[a] != x[b] ? x[a] < x[b] : shard.y[a] < shard.y[b];
  });

  const long long n0 = static_cast<long long>(n) * (n - 1) / 2;
  long long n1 = 0, n3 = 0;
  {
    int i = 0;
    while (i < n) {
      int k = i + 1;
      while (k < n && x[order[k]] == x[order[i]]) ++k;
      const long long g = k - i;
      n1 += g * (g - 1) / 2;
      int a = i;
      while (a < k) {
        int b = a + 1;
        while (b < k && shard.y[order[b]] == shard.y[order[a]]) ++b;
        const long long h = b - a;
        n3 += h * (h - 1) / 2;
        a = b;
      }
      i = k;
    }
  }

  std::vector<double> ysorted(n), tmp(n);
  for (int i = 0; i < n; ++i) ysorted[i] = shard.y[order[i]];
  const long long swaps = count_inversions(ysorted, tmp, 0, ysorted.size());
  const long long n2 = tie_pairs(ysorted);  // ysorted is now fully sorted

  const long long num = n0 - n1 - n2 + n3 - 2 * swaps;
  return static_cast<double>(num) / static_cast<double>(n0);
}

double sirs_utility(const DataShard& shard, int j) {
  check_column(shard, j);
  const int n = shard.n();
  if (n < 2) throw ShapeError("sirs: need n >= 2");
  Eigen::VectorXd x = shard.X.col(j);
  const double var = pop_var(x);
  if (var == 0.0) return 0.0;
  x = (x.array() - x.mean()) / std::sqrt(var);

  // inner(k) = n^-1 sum_i xt_i 1(y_i < y_k), via prefix sums over y order;
  // equal y values share the prefix below their tie group.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return shard.y[a] < shard.y[b]; });

  double acc = 0.0;
  double prefix = 0.0;
  int i = 0;
  while (i < n) {
    int k = i + 1;
    while (k < n && shard.y[order[k]] == shard.y[order[i]]) ++k;
    const double inner = prefix / n;
    acc += (k - i) * inner * inner;
    for (int a = i; a < k; ++a) prefix += x[order[a]];
    i = k;
  }
  return acc / n;
}

namespace {

// Double-centered distance matrix of a univariate sample.
Eigen::MatrixXd centered_distances(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  Eigen::MatrixXd d(n, n);
  for (int a = 0; a < n; ++a) {
    d(a, a) = 0.0;
    for (int b = a + 1; b < n; ++b) {
      d(a, b) = d(b, a) = std::abs(v[a] - v[b]);
    }
  }
  const Eigen::VectorXd rowm = d.rowwise().mean();
  const double grand = rowm.mean();
  d.colwise() -= rowm;
  d.rowwise() -= rowm.transpose();
  d.array() += grand;
  return d;
}

double dcor_from_centered(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const double n2 = double(A.rows()) * double(A.rows());
  const double cov = (A.array() * B.array()).sum() / n2;
  const double vx = (A.array() * A.array()).sum() / n2;
  const double vy = (B.array() * B.array()).sum() / n2;
  if (vx <= 0.0 || vy <= 0.0) return 0.0;
  const double r2 = cov / std::sqrt(vx * vy);
  return r2 > 0.0 ? std::sqrt(r2) : 0.0;
}

}  // namespace

double dcor_utility(const DataShard& shard, int j) {
  check_column(shard, j);
  if (shard.n() < 2) throw ShapeError("dcor: need n >= 2");
  if (pop_var(shard.X.col(j)) == 0.0 || pop_var(shard.y) == 0.0) return 0.0;
  return dcor_from_centered(centered_distances(shard.X.col(j)),
                            centered_distances(shard.y));
}

double marginal_utility(MarginalMethod m, const DataShard& shard, int j) {
  switch (m) {
    case MarginalMethod::Pearson:
      return pearson_utility(shard, j);
    case MarginalMethod::Kendall:
      return kendall_utility(shard, j);
    case MarginalMethod::Sirs:
      return sirs_utility(shard, j);
    case MarginalMethod::Dcor:
      return dcor_utility(shard, j);
  }
  return 0.0;
}

MarginalSelection aggregate_and_rank(const ClusterSpec& cluster,
                                     MarginalMethod method, int d) {
  const int p = cluster.p();
  if (d < 1 || d > p) {
    throw ConfigError("aggregate_and_rank: d = " + std::to_string(d) +
                      " outside [1, " + std::to_string(p) + "]");
  }

  MarginalSelection out;
  out.utility.method = method;
  out.utility.scores = Eigen::VectorXd::Zero(p);
  std::vector<bool> degenerate(p, false);

  for (int i = 0; i < cluster.m(); ++i) {
    const DataShard& shard = cluster.shard(i);
    Eigen::MatrixXd centered_b;  // reused across columns for dCor
    double yvar = 0.0;
    if (method == MarginalMethod::Dcor) {
      centered_b = centered_distances(shard.y);
      yvar = pop_var(shard.y);
    }
    for (int j = 0; j < p; ++j) {
      const bool degenerate_here = pop_var(shard.X.col(j)) == 0.0;
      if (degenerate_here) degenerate[j] = true;
      double s;
      if (method == MarginalMethod::Dcor) {
        s = (degenerate_here || yvar == 0.0)
                ? 0.0
                : dcor_from_centered(centered_distances(shard.X.col(j)),
                                     centered_b);
      } else {
        s = marginal_utility(method, shard, j);
      }
      out.utility.scores[j] += s;
    }
  }
  out.utility.scores /= cluster.m();

  out.utility.ranking.resize(p);
  std::iota(out.utility.ranking.begin(), out.utility.ranking.end(), 0);
  const auto& sc = out.utility.scores;
  std::sort(out.utility.ranking.begin(), out.utility.ranking.end(),
            [&](int a, int b) {
              const double fa = std::abs(sc[a]);
              const double fb = std::abs(sc[b]);
              return fa != fb ? fa > fb : a < b;
            });

  for (int j = 0; j < p; ++j) {
    if (degenerate[j]) out.utility.degenerate_cols.push_back(j);
  }
  out.selected.assign(out.utility.ranking.begin(),
                      out.utility.ranking.begin() + d);
  std::sort(out.selected.begin(), out.selected.end());
  return out;
}

}  // namespace dvs
