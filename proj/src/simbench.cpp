// SPDX-License-Identifier: Apache-2.0
#include "blr/simbench.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "blr/parallel.hpp"

namespace blr {

namespace {

ScenarioTerm term(std::string_view text, double beta, std::vector<std::string_view> parts = {}) {
  ScenarioTerm t{std::string(text), parse_tree(text), beta, {}};
  for (auto p : parts) t.equivalent_parts.push_back(parse_tree(p));
  return t;
}

std::vector<Scenario> build_scenarios() {
  std::vector<Scenario> v;
  const ScenarioTerm l1 = term("!X1 & X4", 1.0), l2 = term("X5 & X9", 1.0), l3 = term("X11 & X8", 1.0);

  Scenario s1{1, Family::Binomial, 0.3, -0.7, 1.0, 50, {l1, l2, l3}, "1"};
  v.push_back(s1);

  Scenario s2 = s1;
  s2.id = 2;
  s2.intercept = -0.45;
  s2.tuning_row = "2";
  for (auto& t : s2.terms) t.beta = 0.6;
  v.push_back(s2);

  v.push_back({3, Family::Binomial, 0.5, 0.4,
               1.0, 50,
               {term("X2 & X9", -5.0), term("X7 & X12 & X20", 9.0), term("X4 & X10 & X17 & X30", -9.0)},
               "3"});

  v.push_back({4, Family::Gaussian, 0.5, 1.0,
               1.0, 50,
               {term("X5 & X9", 1.43), term("X8 & X11", 0.89), term("X1 & X4", 0.7)},
               "4"});

  v.push_back({5, Family::Gaussian, 0.5, 1.0,
               1.0, 50,
               {term("X37", 1.5), term("X2 & X9", 3.5), term("X7 & X12 & X20", 9.0), term("X4 & X10 & X17 & X30", 7.0)},
               "5"});

  v.push_back({6, Family::Gaussian, 0.5, 1.0,
               1.0, 50,
               {term("X7", 1.5), term("X8", 1.5), term("X2 & X9", 6.6), term("X18 & X21", 3.5),
                term("X1 & X3 & X27", 9.0), term("X12 & X20 & X37", 7.0), term("X4 & X10 & X17 & X30", 7.0),
                term("(X11 & X13) | (X19 & X50)", 7.0, {"X11 & X13", "X19 & X50", "X11 & X13 & X19 & X50"})},
               "6"});
  return v;
}

std::uint32_t max_leaf(const Scenario& s) {
  std::uint32_t mx = 0;
  for (const auto& t : s.terms) mx = std::max(mx, t.tree.max_index());
  return mx;
}

}  // namespace

double Scenario::linear_predictor(std::span<const std::uint8_t> row) const {
  double eta = intercept;
  for (const auto& t : terms)
    if (t.tree.evaluate(row)) eta += t.beta;
  return eta;
}

const std::vector<Scenario>& scenarios() {
  static const std::vector<Scenario> all = build_scenarios();
  return all;
}

const Scenario& scenario(int id) {
  for (const auto& s : scenarios())
    if (s.id == id) return s;
  throw std::invalid_argument("unknown scenario " + std::to_string(id) + " (expected 1-6)");
}

Dataset generate(const Scenario& s, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate: n must be at least 1");
  if (s.m <= max_leaf(s)) throw std::invalid_argument("generate: m is too small for the scenario's trees");
  Rng rng(seed);
  Dataset d;
  d.n = n;
  d.m = s.m;
  d.family = s.family;
  d.x.assign(s.m, BitColumn(n));
  d.y.resize(n);
  for (std::uint32_t j = 0; j < s.m; ++j) d.names.push_back("X" + std::to_string(j + 1));
  std::normal_distribution<double> noise(0.0, s.sigma);
  std::vector<std::uint8_t> row(s.m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < s.m; ++j) {
      row[j] = bernoulli(rng, s.rate) ? 1 : 0;
      d.x[j].set(i, row[j] != 0);
    }
    const double eta = s.linear_predictor(row);
    if (s.family == Family::Binomial)
      d.y[i] = bernoulli(rng, 1.0 / (1.0 + std::exp(-eta))) ? 1.0 : 0.0;
    else
      d.y[i] = eta + noise(rng);
  }
  return d;
}

const char* class_name(DetectionClass c) {
  switch (c) {
    case DetectionClass::TruePositive:
      return "TP";
    case DetectionClass::SingleTreeLeaves:
      return "v(L)";
    case DetectionClass::ModelLeaves:
      return "v(M)";
    case DetectionClass::WrongLeaves:
      break;
  }
  return "WL";
}

Classification classify(const LogicTree& detected, const Scenario& s) {
  const CanonicalKey key = feature_key(detected);
  for (std::size_t j = 0; j < s.terms.size(); ++j)
    if (feature_key(s.terms[j].tree) == key) return {DetectionClass::TruePositive, static_cast<int>(j), 0};

  auto subset = [&](const std::vector<std::uint32_t>& of) {
    return std::includes(of.begin(), of.end(), key.leaves.begin(), key.leaves.end());
  };
  std::vector<std::uint32_t> all;
  for (std::size_t j = 0; j < s.terms.size(); ++j) {
    const auto lv = s.terms[j].tree.leaves();
    if (subset(lv)) return {DetectionClass::SingleTreeLeaves, static_cast<int>(j), 0};
    all.insert(all.end(), lv.begin(), lv.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  if (subset(all)) return {DetectionClass::ModelLeaves, -1, 0};
  std::size_t wrong = 0;
  for (auto l : key.leaves)
    if (!std::binary_search(all.begin(), all.end(), l)) ++wrong;
  return {DetectionClass::WrongLeaves, -1, wrong};
}

DetectionReport score_runs(std::span<const std::vector<LogicTree>> runs, const Scenario& s, bool l8_equivalence) {
  if (runs.empty()) throw std::invalid_argument("score_runs: no replicates");
  const std::size_t k = s.terms.size();
  DetectionReport rep;
  rep.replicates = runs.size();
  rep.l8_equivalence = l8_equivalence;
  rep.hits.assign(k, 0);
  rep.single_tree_counts.assign(k, 0);
  double fp_sum = 0.0, fdr_sum = 0.0;

  for (const auto& run : runs) {
    std::vector<Classification> cls;
    std::vector<CanonicalKey> keys;
    for (const auto& t : run) {
      cls.push_back(classify(t, s));
      keys.push_back(feature_key(t));
    }
    std::vector<bool> found(k, false);
    std::vector<bool> excused(run.size(), false);
    for (const auto& c : cls)
      if (c.cls == DetectionClass::TruePositive) found[static_cast<std::size_t>(c.term)] = true;
    if (l8_equivalence) {
      for (std::size_t j = 0; j < k; ++j) {
        const auto& parts = s.terms[j].equivalent_parts;
        if (parts.empty()) continue;
        std::vector<std::size_t> where;
        for (const auto& p : parts) {
          const CanonicalKey pk = feature_key(p);
          auto it = std::find(keys.begin(), keys.end(), pk);
          if (it == keys.end()) break;
          where.push_back(static_cast<std::size_t>(it - keys.begin()));
        }
        if (where.size() != parts.size()) continue;
        found[j] = true;
        for (auto w : where) excused[w] = true;
      }
    }
    for (std::size_t j = 0; j < k; ++j)
      if (found[j]) ++rep.hits[j];

    std::size_t fp = 0, counted = 0;
    std::vector<std::uint32_t> wrong;
    for (std::size_t i = 0; i < run.size(); ++i) {
      if (excused[i]) continue;
      ++counted;
      const auto& c = cls[i];
      if (c.cls == DetectionClass::TruePositive) continue;
      ++fp;
      switch (c.cls) {
        case DetectionClass::SingleTreeLeaves:
          ++rep.single_tree_counts[static_cast<std::size_t>(c.term)];
          break;
        case DetectionClass::ModelLeaves:
          ++rep.model_leaf_count;
          break;
        default:
          for (auto l : feature_key(run[i]).leaves)
            if (classify(LogicTree::leaf(l), s).cls == DetectionClass::WrongLeaves) wrong.push_back(l);
          if (c.wrong_leaves <= 1)
            ++rep.wl1;
          else if (c.wrong_leaves == 2)
            ++rep.wl2;
          else
            ++rep.wl3plus;
      }
    }
    std::sort(wrong.begin(), wrong.end());
    rep.wl_total += static_cast<std::size_t>(std::unique(wrong.begin(), wrong.end()) - wrong.begin());
    fp_sum += static_cast<double>(fp);
    fdr_sum += counted ? static_cast<double>(fp) / static_cast<double>(counted) : 0.0;
  }
  const double r = static_cast<double>(runs.size());
  rep.power.resize(k);
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) total += rep.power[j] = static_cast<double>(rep.hits[j]) / r;
  rep.overall_power = total / static_cast<double>(k);
  rep.fp_mean = fp_sum / r;
  rep.fdr = fdr_sum / r;
  return rep;
}

namespace {

std::vector<ReplicateResult> run_replicates(const Scenario& s, std::size_t n, std::size_t reps,
                                            const GmjmcmcConfig& cfg, double threshold, std::size_t threads) {
  if (reps < 1) throw std::invalid_argument("at least one replicate is required");
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
  cfg.validate(s.m);
  std::vector<ReplicateResult> out(reps);
  std::vector<Dataset> data(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    out[r].data_seed = derive_seed(cfg.seed, 2, r);
    data[r] = generate(s, n, out[r].data_seed);
  }
  const std::size_t b = cfg.chains;
  std::vector<ChainSummary> chains(reps * b);
  parallel_for(reps * b, resolve_threads(threads), [&](std::size_t job) {
    const std::size_t r = job / b, c = job % b;
    chains[job] = run_chain(data[r], cfg, chain_seed(derive_seed(cfg.seed, 3, r), c));
  });
  for (std::size_t r = 0; r < reps; ++r) {
    const Aggregate agg = aggregate(std::span<const ChainSummary>(chains.data() + r * b, b));
    out[r].detections = detect(agg, threshold);
    out[r].weights = agg.weights;
  }
  return out;
}

std::vector<std::vector<LogicTree>> detected_trees(const std::vector<ReplicateResult>& reps) {
  std::vector<std::vector<LogicTree>> out;
  for (const auto& r : reps) {
    std::vector<LogicTree> ts;
    for (const auto& d : r.detections) ts.push_back(parse_tree(d.text));
    out.push_back(std::move(ts));
  }
  return out;
}

Scenario with_m(const Scenario& s, std::uint32_t m) {
  Scenario c = s;
  if (m) c.m = m;
  return c;
}

}  // namespace

BenchResult bench(const BenchOptions& opts) {
  const Scenario s = with_m(scenario(opts.scenario), opts.m);
  BenchResult res;
  res.replicates = run_replicates(s, opts.n, opts.replicates, opts.cfg, opts.threshold, opts.threads);
  const auto trees = detected_trees(res.replicates);
  res.raw = score_runs(trees, s, false);
  res.adjusted = score_runs(trees, s, true);
  return res;
}

const char* axis_name(SweepAxis a) {
  switch (a) {
    case SweepAxis::Beta4:
      return "beta4";
    case SweepAxis::SampleSize:
      return "n";
    case SweepAxis::PopulationSize:
      break;
  }
  return "d";
}

SweepAxis parse_axis(std::string_view s) {
  if (s == "beta4") return SweepAxis::Beta4;
  if (s == "n") return SweepAxis::SampleSize;
  if (s == "d") return SweepAxis::PopulationSize;
  throw std::invalid_argument("unknown sweep axis '" + std::string(s) + "' (expected beta4, n or d)");
}

std::vector<double> parse_grid(std::string_view s) {
  auto num = [](std::string_view t) {
    try {
      std::size_t used = 0;
      const double v = std::stod(std::string(t), &used);
      if (used != t.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw std::invalid_argument("bad grid value '" + std::string(t) + "'");
    }
  };
  std::vector<double> out;
  if (s.find(':') != std::string_view::npos) {
    const auto a = s.find(':'), b = s.find(':', a + 1);
    if (b == std::string_view::npos) throw std::invalid_argument("grid range must look like lo:hi:count");
    const double lo = num(s.substr(0, a)), hi = num(s.substr(a + 1, b - a - 1));
    const double cnt = num(s.substr(b + 1));
    if (cnt < 1 || cnt != std::floor(cnt)) throw std::invalid_argument("grid count must be a positive integer");
    const auto c = static_cast<std::size_t>(cnt);
    for (std::size_t i = 0; i < c; ++i)
      out.push_back(c == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(c - 1));
  } else {
    std::size_t start = 0;
    while (start <= s.size()) {
      const auto comma = s.find(',', start);
      const auto end = comma == std::string_view::npos ? s.size() : comma;
      out.push_back(num(s.substr(start, end - start)));
      start = end + 1;
    }
  }
  return out;
}

GmjmcmcConfig SweepOptions::default_sweep_config() {
  GmjmcmcConfig c = GmjmcmcConfig::preset("5");
  c.k_max = 20;
  c.d = 30;
  return c;
}

std::vector<SweepPoint> sweep(const SweepOptions& opts) {
  if (opts.grid.empty()) throw std::invalid_argument("sweep: empty grid");
  for (std::size_t i = 1; i < opts.grid.size(); ++i)
    if (opts.grid[i] < opts.grid[i - 1]) throw std::invalid_argument("sweep: grid must be nondecreasing");
  const Scenario base = with_m(scenario(5), opts.m);
  constexpr std::size_t kTarget = 3;  // the four-way interaction

  std::vector<SweepPoint> out;
  for (std::size_t p = 0; p < opts.grid.size(); ++p) {
    const double v = opts.grid[p];
    Scenario s = base;
    s.terms[kTarget].beta = opts.beta4;
    GmjmcmcConfig cfg = opts.cfg;
    cfg.seed = derive_seed(opts.cfg.seed, 4, p);
    std::size_t n = opts.n;
    switch (opts.axis) {
      case SweepAxis::Beta4:
        s.terms[kTarget].beta = v;
        break;
      case SweepAxis::SampleSize:
        if (v < 2 || v != std::floor(v)) throw std::invalid_argument("sweep: n grid values must be integers >= 2");
        n = static_cast<std::size_t>(v);
        break;
      case SweepAxis::PopulationSize:
        if (v < 2 || v != std::floor(v)) throw std::invalid_argument("sweep: d grid values must be integers >= 2");
        cfg.d = static_cast<std::size_t>(v);
        cfg.k_max = std::min<std::uint32_t>(cfg.k_max, static_cast<std::uint32_t>(cfg.d - 1));
        break;
    }
    const auto reps = run_replicates(s, n, opts.replicates, cfg, opts.threshold, opts.threads);
    SweepPoint pt{v, reps.size(), 0, 0.0};
    for (const auto& r : reps)
      for (const auto& d : r.detections) {
        const Classification c = classify(parse_tree(d.text), s);
        if (c.cls == DetectionClass::TruePositive && c.term == static_cast<int>(kTarget)) {
          ++pt.hits;
          break;
        }
      }
    pt.power = static_cast<double>(pt.hits) / static_cast<double>(pt.replicates);
    out.push_back(pt);
  }
  return out;
}

}  // namespace blr
