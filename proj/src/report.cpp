// SPDX-License-Identifier: Apache-2.0
#include "blr/report.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>


namespace blr {

using nlohmann::json;

json config_json(const GmjmcmcConfig& cfg) {
  json j;
  j["N_init"] = cfg.n_init;
  j["N_expl"] = cfg.n_expl;
  j["M_fin"] = cfg.m_fin;
  j["T_max"] = cfg.t_max;
  j["rho_min"] = cfg.rho_min;
  j["P_and"] = cfg.p_and;
  j["P_not"] = cfg.p_not;
  j["P_init"] = cfg.p_init;
  j["P_c"] = cfg.p_c;
  j["rho_del"] = cfg.rho_del;
  j["C_max"] = cfg.c_max;
  j["k_max"] = cfg.k_max;
  j["d"] = cfg.d;
  j["chains"] = cfg.chains;
  j["seed"] = cfg.seed;
  j["prior"] = prior_name(cfg.prior);
  j["a"] = cfg.a;
  j["random_init"] = cfg.random_init;
  j["mjmcmc"] = {{"p_jump", cfg.mjmcmc.p_jump},
                 {"ascent_cap", cfg.mjmcmc.ascent_cap},
                 {"flip_prob", cfg.mjmcmc.flip_prob}};
  if (cfg.prior == PriorChoice::RobustG)
    j["robust_g"] = {{"a", cfg.robust.a},         {"b", cfg.robust.b},         {"r", cfg.robust.r},
                     {"s", cfg.robust.s},         {"kappa", cfg.robust.kappa}, {"nodes", cfg.robust.nodes},
                     {"epsilon", cfg.robust.epsilon}};
  return j;
}

json population_json(const PopulationSnapshot& snap) {
  json trees = json::array();
  for (const auto& t : snap.trees) trees.push_back({{"tree", t.text}, {"probability", t.prob}});
  return {{"generation", snap.generation}, {"trees", trees}};
}

json analysis_json(const AnalysisInfo& info, const GmjmcmcConfig& cfg, const std::vector<ChainSummary>& chains,
                   const Aggregate& agg, const std::vector<Detection>& detections) {
  auto leaf_names = [&](const CanonicalKey& k) {
    json names = json::array();
    for (auto l : k.leaves) names.push_back(l < info.names.size() ? info.names[l] : "X" + std::to_string(l + 1));
    return names;
  };
  json j;
  j["input"] = info.input;
  j["response"] = info.response;
  j["family"] = family_name(info.family);
  j["n"] = info.n;
  j["m"] = info.names.size();
  j["threshold"] = info.threshold;
  j["config"] = config_json(cfg);
  j["warnings"] = info.warnings;

  json det = json::array();
  for (const auto& d : detections)
    det.push_back({{"tree", d.text}, {"probability", d.prob}, {"leaves", leaf_names(d.key)}});
  j["detections"] = det;

  json trees = json::array();
  for (const auto& t : agg.trees)
    trees.push_back({{"tree", t.text}, {"probability", t.prob}, {"per_chain", t.per_chain}, {"leaves", leaf_names(t.key)}});
  j["trees"] = trees;

  json cs = json::array();
  for (std::size_t b = 0; b < chains.size(); ++b) {
    const auto& c = chains[b];
    json entry{{"chain", b},
               {"seed", c.seed},
               {"weight", agg.weights[b]},
               {"log_mass", c.log_mass},
               {"generations", c.generations},
               {"models_visited", c.models_visited},
               {"final_unique_models", c.final_unique}};
    if (!c.history.empty()) {
      json hist = json::array();
      for (const auto& s : c.history) hist.push_back(population_json(s));
      entry["populations"] = hist;
    }
    cs.push_back(entry);
  }
  j["chains"] = cs;
  return j;
}

std::string detections_csv(const std::vector<Detection>& detections) {
  std::ostringstream os;
  os.precision(17);
  os << "tree,probability\n";
  for (const auto& d : detections) os << '"' << d.text << "\"," << d.prob << '\n';
  return os.str();
}

json report_json(const DetectionReport& rep, const Scenario& s) {
  json per_tree = json::array();
  for (std::size_t j = 0; j < s.terms.size(); ++j)
    per_tree.push_back({{"tree", "L" + std::to_string(j + 1)},
                        {"expression", s.terms[j].text},
                        {"hits", rep.hits[j]},
                        {"power", rep.power[j]},
                        {"v_L", rep.single_tree_counts[j]}});
  return {{"replicates", rep.replicates},
          {"equivalence_rule", rep.l8_equivalence},
          {"trees", per_tree},
          {"overall_power", rep.overall_power},
          {"FP", rep.fp_mean},
          {"FDR", rep.fdr},
          {"WL", rep.wl_total},
          {"v_M", rep.model_leaf_count},
          {"WL_1", rep.wl1},
          {"WL_2", rep.wl2},
          {"WL_3plus", rep.wl3plus}};
}

json bench_json(const BenchOptions& opts, const BenchResult& res) {
  const Scenario& s = scenario(opts.scenario);
  json reps = json::array();
  for (std::size_t r = 0; r < res.replicates.size(); ++r) {
    json det = json::array();
    for (const auto& d : res.replicates[r].detections) {
      const Classification c = classify(parse_tree(d.text), s);
      json e{{"tree", d.text}, {"probability", d.prob}, {"class", class_name(c.cls)}};
      if (c.term >= 0) e["term"] = "L" + std::to_string(c.term + 1);
      if (c.cls == DetectionClass::WrongLeaves) e["wrong_leaves"] = c.wrong_leaves;
      det.push_back(e);
    }
    reps.push_back({{"replicate", r},
                    {"data_seed", res.replicates[r].data_seed},
                    {"weights", res.replicates[r].weights},
                    {"detections", det}});
  }
  json j;
  j["scenario"] = opts.scenario;
  j["family"] = family_name(s.family);
  j["n"] = opts.n;
  j["m"] = opts.m ? opts.m : s.m;
  j["threshold"] = opts.threshold;
  j["config"] = config_json(opts.cfg);
  j["metrics"] = report_json(res.raw, s);
  bool has_parts = false;
  for (const auto& t : s.terms) has_parts = has_parts || !t.equivalent_parts.empty();
  if (has_parts) j["metrics_equivalence"] = report_json(res.adjusted, s);
  j["replicates"] = reps;
  return j;
}

std::string curve_csv(SweepAxis axis, const std::vector<SweepPoint>& points) {
  std::ostringstream os;
  os.precision(17);
  os << axis_name(axis) << ",replicates,hits,power\n";
  for (const auto& p : points) os << p.value << ',' << p.replicates << ',' << p.hits << ',' << p.power << '\n';
  return os.str();
}

json scenarios_json() {
  json arr = json::array();
  for (const auto& s : scenarios()) {
    json terms = json::array();
    for (std::size_t j = 0; j < s.terms.size(); ++j) {
      json t{{"name", "L" + std::to_string(j + 1)}, {"tree", s.terms[j].text}, {"beta", s.terms[j].beta}};
      if (!s.terms[j].equivalent_parts.empty()) {
        json parts = json::array();
        for (const auto& p : s.terms[j].equivalent_parts) parts.push_back(to_string(p));
        t["equivalent_parts"] = parts;
      }
      terms.push_back(t);
    }
    json e{{"id", s.id},
           {"family", family_name(s.family)},
           {"rate", s.rate},
           {"intercept", s.intercept},
           {"m", s.m},
           {"tuning_row", s.tuning_row},
           {"terms", terms}};
    if (s.family == Family::Gaussian) e["sigma"] = s.sigma;
    arr.push_back(e);
  }
  return arr;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace blr
