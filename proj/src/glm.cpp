// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "blr/kernels.hpp"
#include "blr/likelihood.hpp"

namespace blr {

std::vector<double> Design::dense() const {
  const std::size_t c = cols();
  std::vector<double> out(n * c, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out[i * c] = 1.0;
    for (std::size_t j = 0; j < columns.size(); ++j) out[i * c + j + 1] = columns[j].get(i) ? 1.0 : 0.0;
  }
  return out;
}

bool Design::has_constant_column() const {
  for (const auto& c : columns) {
    const std::size_t k = c.count();
    if (k == 0 || k == n) return true;
  }
  return false;
}

Design design_matrix(const ModelIndex& model, std::span<const BitColumn> tree_columns, std::size_t n) {
  if (model.size() != tree_columns.size()) throw std::invalid_argument("design: model length does not match columns");
  Design d;
  d.n = n;
  for (auto j : model.included()) d.columns.push_back(tree_columns[j]);
  return d;
}

Design design_matrix(const ModelIndex& model, const Population& pop, const Dataset& data) {
  if (model.size() != pop.size()) throw std::invalid_argument("design: model length does not match population");
  Design d;
  d.n = data.n;
  for (auto j : model.included()) d.columns.push_back(pop.tree(j).evaluate(data.x));
  return d;
}

namespace {

// Column accessor treating index 0 as the intercept.
struct Columns {
  const Design& d;
  std::span<const std::uint64_t> col(std::size_t k) const { return d.columns[k - 1].words(); }

  // sum_i v_i x_ia x_ib
  double wsum(std::span<const double> v, std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    if (b == 0) {
      double s = 0.0;
      for (double x : v) s += x;
      return s;
    }
    if (a == 0 || a == b) return kernels::masked_sum(v, col(b));
    return kernels::masked_sum_and(v, col(a), col(b));
  }

  // eta = X_sel * coef
  void linear_predictor(std::span<const std::size_t> sel, std::span<const double> coef, std::vector<double>& eta) const {
    eta.assign(d.n, 0.0);
    for (std::size_t r = 0; r < sel.size(); ++r) {
      if (sel[r] == 0)
        for (auto& e : eta) e += coef[r];
      else if (coef[r] != 0.0)
        kernels::add_masked(eta, col(sel[r]), coef[r]);
    }
  }
};

// In-place Cholesky of a q x q row-major SPD matrix into its lower factor.
bool cholesky(std::vector<double>& a, std::size_t q) {
  for (std::size_t j = 0; j < q; ++j) {
    double s = a[j * q + j];
    for (std::size_t k = 0; k < j; ++k) s -= a[j * q + k] * a[j * q + k];
    if (!(s > 0.0)) return false;
    const double l = std::sqrt(s);
    a[j * q + j] = l;
    for (std::size_t i = j + 1; i < q; ++i) {
      double t = a[i * q + j];
      for (std::size_t k = 0; k < j; ++k) t -= a[i * q + k] * a[j * q + k];
      a[i * q + j] = t / l;
    }
    for (std::size_t i = 0; i < j; ++i) a[i * q + j] = 0.0;
  }
  return true;
}

void chol_solve(const std::vector<double>& l, std::size_t q, std::vector<double>& b) {
  for (std::size_t i = 0; i < q; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i * q + k] * b[k];
    b[i] = s / l[i * q + i];
  }
  for (std::size_t i = q; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < q; ++k) s -= l[k * q + i] * b[k];
    b[i] = s / l[i * q + i];
  }
}

constexpr double kRankTolerance = 1e-9;

// Greedy in-order selection of linearly independent columns from the
// (integer-valued) unweighted Gram matrix.
std::vector<std::size_t> independent_columns(const Columns& cs, std::size_t cols) {
  std::vector<double> g(cols * cols);
  const std::vector<double> ones(cs.d.n, 1.0);
  for (std::size_t a = 0; a < cols; ++a)
    for (std::size_t b = a; b < cols; ++b) {
      double v;
      if (a == 0 && b == 0)
        v = static_cast<double>(cs.d.n);
      else if (a == 0 || a == b)
        v = static_cast<double>(kernels::popcount(cs.col(b)));
      else
        v = static_cast<double>(kernels::popcount_and(cs.col(a), cs.col(b)));
      g[a * cols + b] = g[b * cols + a] = v;
    }
  std::vector<std::size_t> sel;
  std::vector<double> l;  // row-major lower factor, grows one row per accepted column
  for (std::size_t c = 0; c < cols; ++c) {
    const double diag = g[c * cols + c];
    if (!(diag > 0.0)) continue;
    const std::size_t q = sel.size();
    std::vector<double> z(q);
    for (std::size_t i = 0; i < q; ++i) {
      double s = g[sel[i] * cols + c];
      for (std::size_t k = 0; k < i; ++k) s -= l[i * (q + 1) + k] * z[k];
      z[i] = s / l[i * (q + 1) + i];
    }
    double pivot = diag;
    for (double v : z) pivot -= v * v;
    if (pivot <= kRankTolerance * diag) continue;
    // Re-layout l with one more column.
    std::vector<double> nl((q + 1) * (q + 2), 0.0);
    for (std::size_t i = 0; i < q; ++i)
      for (std::size_t k = 0; k <= i; ++k) nl[i * (q + 2) + k] = l[i * (q + 1) + k];
    for (std::size_t k = 0; k < q; ++k) nl[q * (q + 2) + k] = z[k];
    nl[q * (q + 2) + q] = std::sqrt(pivot);
    l = std::move(nl);
    sel.push_back(c);
  }
  return sel;
}

std::vector<double> weighted_gram(const Columns& cs, std::span<const std::size_t> sel, std::span<const double> w) {
  const std::size_t q = sel.size();
  std::vector<double> h(q * q);
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = a; b < q; ++b) h[a * q + b] = h[b * q + a] = cs.wsum(w, sel[a], sel[b]);
  return h;
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double binomial_loglik(std::span<const double> y, std::span<const double> eta) {
  double ll = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) ll += y[i] * eta[i] - softplus(eta[i]);
  return ll;
}

void expand_information(GlmFit& fit, std::span<const std::size_t> sel, const std::vector<double>& h, std::size_t cols) {
  const std::size_t q = sel.size();
  fit.information.assign(cols * cols, 0.0);
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = 0; b < q; ++b) fit.information[sel[a] * cols + sel[b]] = h[a * q + b];
}

GlmFit fit_gaussian(const Columns& cs, std::span<const std::size_t> sel, std::span<const double> y, std::size_t cols) {
  const std::size_t q = sel.size();
  const std::size_t n = cs.d.n;
  const std::vector<double> ones(n, 1.0);
  std::vector<double> g = weighted_gram(cs, sel, ones);
  std::vector<double> l = g;
  GlmFit fit;
  fit.rank = q;
  fit.iterations = 1;
  if (!cholesky(l, q)) {
    fit.loglik = -std::numeric_limits<double>::infinity();
    return fit;
  }
  std::vector<double> beta(q);
  for (std::size_t a = 0; a < q; ++a) beta[a] = cs.wsum(y, sel[a], 0);
  chol_solve(l, q, beta);

  std::vector<double> resid;
  cs.linear_predictor(sel, beta, resid);
  for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - resid[i];
  const double rss = kernels::dot(resid, resid);

  fit.coef.assign(cols, 0.0);
  for (std::size_t a = 0; a < q; ++a) fit.coef[sel[a]] = beta[a];
  fit.dispersion = rss / static_cast<double>(n);
  const double nn = static_cast<double>(n);
  fit.loglik = -0.5 * nn * (std::log(2.0 * std::numbers::pi * rss / nn) + 1.0);
  fit.converged = std::isfinite(fit.loglik);
  for (auto& v : g) v /= fit.dispersion;
  expand_information(fit, sel, g, cols);
  return fit;
}

// Rows of a binary design collapsed to distinct covariate patterns. The
// binomial likelihood, score and information only depend on per-pattern
// counts and response sums.
struct PatternTable {
  std::size_t q = 0;                 // selected columns, intercept first
  std::vector<std::uint32_t> active; // column positions equal to 1, per pattern
  std::vector<std::size_t> offset;   // pattern k owns active[offset[k], offset[k+1])
  std::vector<double> count;         // rows per pattern
  std::vector<double> ysum;          // response sum per pattern

  std::size_t size() const { return count.size(); }
  std::span<const std::uint32_t> ones(std::size_t k) const {
    return {active.data() + offset[k], offset[k + 1] - offset[k]};
  }
};

PatternTable build_patterns(const Columns& cs, std::span<const std::size_t> sel, std::span<const double> y) {
  const std::size_t n = cs.d.n;
  const std::size_t q = sel.size();
  // Refine a row partition one column at a time; each group remembers its
  // pattern.
  std::vector<std::uint32_t> gid(n, 0);
  std::vector<std::vector<std::uint32_t>> pattern(1);
  std::vector<std::int64_t> remap;
  for (std::size_t r = 0; r < q; ++r) {
    if (sel[r] == 0) {
      for (auto& p : pattern) p.push_back(static_cast<std::uint32_t>(r));
      continue;
    }
    const auto words = cs.col(sel[r]);
    remap.assign(2 * pattern.size(), -1);
    std::vector<std::vector<std::uint32_t>> next;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t bit = (words[i / 64] >> (i % 64)) & 1U;
      const std::size_t slot = 2 * gid[i] + bit;
      if (remap[slot] < 0) {
        remap[slot] = static_cast<std::int64_t>(next.size());
        next.push_back(pattern[gid[i]]);
        if (bit) next.back().push_back(static_cast<std::uint32_t>(r));
      }
      gid[i] = static_cast<std::uint32_t>(remap[slot]);
    }
    pattern = std::move(next);
  }
  PatternTable t;
  t.q = q;
  t.count.assign(pattern.size(), 0.0);
  t.ysum.assign(pattern.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    t.count[gid[i]] += 1.0;
    t.ysum[gid[i]] += y[i];
  }
  t.offset.push_back(0);
  for (const auto& p : pattern) {
    t.active.insert(t.active.end(), p.begin(), p.end());
    t.offset.push_back(t.active.size());
  }
  return t;
}

GlmFit fit_binomial(const Columns& cs, std::span<const std::size_t> sel, std::span<const double> y, std::size_t cols,
                    const IrlsOptions& opts) {
  const std::size_t q = sel.size();
  const std::size_t n = cs.d.n;
  const PatternTable pt = build_patterns(cs, sel, y);
  const std::size_t g = pt.size();

  double ybar = 0.0;
  for (double v : pt.ysum) ybar += v;
  ybar /= static_cast<double>(n);
  const double p0 = std::clamp(ybar, 1e-10, 1.0 - 1e-10);

  std::vector<double> coef(q, 0.0);
  coef[0] = std::log(p0 / (1.0 - p0));  // intercept is always selected first

  auto predictor = [&](std::span<const double> c, std::vector<double>& eta) {
    eta.assign(g, 0.0);
    for (std::size_t k = 0; k < g; ++k) {
      double e = 0.0;
      for (auto a : pt.ones(k)) e += c[a];
      eta[k] = std::clamp(e, -opts.eta_clamp, opts.eta_clamp);
    }
  };
  auto loglik = [&](const std::vector<double>& eta) {
    double ll = 0.0;
    for (std::size_t k = 0; k < g; ++k) ll += pt.ysum[k] * eta[k] - pt.count[k] * softplus(eta[k]);
    return ll;
  };

  std::vector<double> eta, trial_eta, w(g), r(g), trial(q);
  predictor(coef, eta);
  double ll = loglik(eta);

  GlmFit fit;
  fit.rank = q;
  std::vector<double> h(q * q);
  for (;;) {
    for (std::size_t k = 0; k < g; ++k) {
      const double mu = 1.0 / (1.0 + std::exp(-eta[k]));
      w[k] = pt.count[k] * mu * (1.0 - mu);
      r[k] = pt.ysum[k] - pt.count[k] * mu;
    }
    std::vector<double> score(q, 0.0);
    std::fill(h.begin(), h.end(), 0.0);
    for (std::size_t k = 0; k < g; ++k) {
      const auto on = pt.ones(k);
      for (std::size_t i = 0; i < on.size(); ++i) {
        score[on[i]] += r[k];
        for (std::size_t j = i; j < on.size(); ++j) h[on[i] * q + on[j]] += w[k];
      }
    }
    for (std::size_t a = 0; a < q; ++a)
      for (std::size_t b = 0; b < a; ++b) h[a * q + b] = h[b * q + a];
    double smax = 0.0;
    for (double s : score) smax = std::max(smax, std::abs(s));
    if (smax < opts.score_tolerance) {
      // A fitted probability this close to 0 or 1 means the data are
      // separated and the MLE lies at infinity.
      fit.converged =
          std::none_of(eta.begin(), eta.end(), [&](double e) { return std::abs(e) >= opts.separation_eta; });
      break;
    }
    if (fit.iterations >= opts.max_iterations) break;
    std::vector<double> l = h;
    if (!cholesky(l, q)) break;
    chol_solve(l, q, score);  // score now holds the Newton direction
    double step = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 30; ++halving, step *= 0.5) {
      for (std::size_t a = 0; a < q; ++a) trial[a] = coef[a] + step * score[a];
      predictor(trial, trial_eta);
      const double tll = loglik(trial_eta);
      if (tll >= ll - 1e-12 * std::abs(ll)) {
        coef = trial;
        eta.swap(trial_eta);
        ll = tll;
        moved = true;
        break;
      }
    }
    ++fit.iterations;
    if (!moved) break;
  }

  fit.coef.assign(cols, 0.0);
  for (std::size_t a = 0; a < q; ++a) fit.coef[sel[a]] = coef[a];
  fit.loglik = ll;
  fit.dispersion = 1.0;
  expand_information(fit, sel, h, cols);
  return fit;
}

}  // namespace

GlmFit fit_glm(const Design& design, std::span<const double> y, Family family, const IrlsOptions& opts) {
  if (y.size() != design.n) throw std::invalid_argument("fit_glm: response length does not match design rows");
  for (const auto& c : design.columns)
    if (c.size() != design.n) throw std::invalid_argument("fit_glm: column length does not match design rows");
  const Columns cs{design};
  const std::size_t cols = design.cols();
  const std::vector<std::size_t> sel = independent_columns(cs, cols);
  return family == Family::Gaussian ? fit_gaussian(cs, sel, y, cols) : fit_binomial(cs, sel, y, cols, opts);
}

double glm_loglik(const Design& design, std::span<const double> y, Family family, std::span<const double> coef,
                  double dispersion) {
  const Columns cs{design};
  std::vector<std::size_t> all(design.cols());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  std::vector<double> eta;
  cs.linear_predictor(all, coef, eta);
  if (family == Family::Binomial) return binomial_loglik(y, eta);
  double rss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) rss += (y[i] - eta[i]) * (y[i] - eta[i]);
  const double nn = static_cast<double>(y.size());
  return -0.5 * nn * std::log(2.0 * std::numbers::pi * dispersion) - rss / (2.0 * dispersion);
}

double log_marglik_jeffreys(const GlmFit& fit, std::size_t n, std::size_t model_size) {
  if (fit.rank < model_size + 1 || !std::isfinite(fit.loglik)) return -std::numeric_limits<double>::infinity();
  return fit.loglik - 0.5 * static_cast<double>(model_size) * std::log(static_cast<double>(n));
}

}  // namespace blr
