#include "chansim/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

#include "chansim/concentration.hpp"
#include "chansim/io.hpp"
#include "chansim/qinfo.hpp"
#include "chansim/rates.hpp"
#include "chansim/redistribution.hpp"
#include "chansim/typicality.hpp"

namespace chansim {

namespace {

struct RunContext {
  Json config;
  std::string base_dir;
  std::string out_dir;
  std::uint64_t seed = 1;
  bool resume = false;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  std::string out_path(const std::string& name) const {
    return (std::filesystem::path(out_dir) / name).string();
  }
  double wall_ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

double cfg_num(const Json& j, const char* key, double def) {
  return j.contains(key) ? j.at(key).get<double>() : def;
}

int cfg_int(const Json& j, const char* key, int def) {
  return j.contains(key) ? j.at(key).get<int>() : def;
}

bool cfg_bool(const Json& j, const char* key, bool def) {
  return j.contains(key) ? j.at(key).get<bool>() : def;
}

std::vector<double> cfg_nums(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw ValidationError(std::string("config: missing list field '") + key +
                          "'");
  return j.at(key).get<std::vector<double>>();
}

std::vector<int> cfg_ints(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array())
    throw ValidationError(std::string("config: missing list field '") + key +
                          "'");
  return j.at(key).get<std::vector<int>>();
}

const Json& cfg_require(const Json& j, const char* key) {
  if (!j.contains(key))
    throw ValidationError(std::string("config: missing field '") + key + "'");
  return j.at(key);
}

std::string fmt_bool(bool v) { return v ? "1" : "0"; }

// Shared frame of every persisted summary.
Json result_record(const RunContext& ctx, const std::string& subcommand,
                   Json parameters, Json metrics) {
  Json j;
  j["id"] = subcommand + "-" + std::to_string(ctx.seed);
  j["subcommand"] = subcommand;
  j["seed"] = ctx.seed;
  j["parameters"] = std::move(parameters);
  j["metrics"] = std::move(metrics);
  j = round_metrics(std::move(j));
  // Wall time is informational only and excluded from byte comparisons.
  j["wall_ms"] = round_metric(ctx.wall_ms());
  return j;
}

// Classical joint of a prior and a channel, without quantum states.
void classical_joint(const Distribution& p, const Channel& w, Distribution* q,
                     RMat* backward) {
  RMat joint(p.size(), w.num_outputs());
  for (int x = 0; x < p.size(); ++x)
    for (int y = 0; y < w.num_outputs(); ++y) joint(x, y) = p[x] * w(x, y);
  RVec qy = joint.colwise().sum();
  RMat back(w.num_outputs(), p.size());
  for (int y = 0; y < w.num_outputs(); ++y) {
    if (qy[y] > kProbTol)
      back.row(y) = joint.col(y).transpose() / qy[y];
    else
      back.row(y).setConstant(1.0 / p.size());
  }
  *q = Distribution(qy / qy.sum());
  *backward = std::move(back);
}

void run_typicality(RunContext& ctx) {
  const Json& cfg = ctx.config;
  Distribution p = parse_distribution(cfg_require(cfg, "p"));
  std::vector<int> n_list = cfg_ints(cfg, "n");
  std::vector<double> deltas = cfg_nums(cfg, "delta");
  bool conditional = cfg.contains("channel");
  Channel w = conditional ? parse_channel(cfg.at("channel"), ctx.base_dir)
                          : Channel(RMat::Constant(p.size(), 1, 1.0));
  double delta_prime = cfg_num(cfg, "delta_prime", 0.1);

  std::vector<std::string> cols = {"n",           "delta",       "mass",
                                   "cardinality", "lower_bound", "upper_bound",
                                   "pass"};
  CsvWriter marginal(ctx.out_path("typicality.csv"), cols, ctx.resume);
  std::unique_ptr<CsvWriter> cond;
  if (conditional)
    cond = std::make_unique<CsvWriter>(ctx.out_path("typicality_conditional.csv"),
                                       cols, ctx.resume);

  std::int64_t cell = 0;
  for (int n : n_list)
    for (double delta : deltas) {
      bool need_marginal = cell >= marginal.existing_rows();
      bool need_cond = conditional && cell >= cond->existing_rows();
      if (need_marginal) {
        SetSummary s = typical_set_summary(p, n, delta);
        marginal.row({std::to_string(n), format_metric(delta),
                      format_metric(s.mass), std::to_string(s.cardinality),
                      format_metric(std::exp2(s.card_log2_lower)),
                      format_metric(std::exp2(s.card_log2_upper)),
                      fmt_bool(s.bounds_hold)});
      }
      if (need_cond) {
        Rng rng = derive_rng(ctx.seed, "typicality-cond", cell);
        Seq xn = p.sample_sequence(n, rng);
        SetSummary s =
            conditional_typical_set_summary(w, p, xn, delta, delta_prime);
        cond->row({std::to_string(n), format_metric(delta),
                   format_metric(s.mass), std::to_string(s.cardinality),
                   format_metric(std::exp2(s.card_log2_lower)),
                   format_metric(std::exp2(s.card_log2_upper)),
                   fmt_bool(s.bounds_hold)});
      }
      ++cell;
    }

  auto all_pass = [](const std::string& path) {
    bool ok = true;
    for (const auto& row : read_csv_rows(path)) ok = ok && row.back() == "1";
    return ok;
  };
  Json metrics;
  metrics["cells"] = cell;
  metrics["marginal_all_pass"] = all_pass(ctx.out_path("typicality.csv"));
  if (conditional)
    metrics["conditional_all_pass"] =
        all_pass(ctx.out_path("typicality_conditional.csv"));
  Json params;
  params["p"] = cfg.at("p");
  params["n"] = cfg.at("n");
  params["delta"] = cfg.at("delta");
  if (conditional) params["delta_prime"] = delta_prime;
  save_json_file(ctx.out_path("typicality.json"),
                 result_record(ctx, "typicality", params, metrics));
}

void run_dilution(RunContext& ctx) {
  const Json& cfg = ctx.config;
  Distribution q = parse_distribution(cfg_require(cfg, "q"));
  int n = cfg_int(cfg, "n", 12);
  double m_exp = cfg_num(cfg, "m_exponent", 14.4);
  double delta = cfg_num(cfg, "delta", 0.2);
  double eps = cfg_num(cfg, "eps", 0.05);
  int trials = cfg_int(cfg, "trials", 100);
  std::int64_t m = static_cast<std::int64_t>(std::llround(std::exp2(m_exp)));

  CsvWriter out(ctx.out_path("dilution.csv"),
                {"trial", "deviation", "bound", "pass"}, ctx.resume);
  const double bound = 2.0 * eps;
  for (int t = 0; t < trials; ++t) {
    if (t < out.existing_rows()) continue;
    Rng rng = derive_rng(ctx.seed, "dilution-trial", t);
    DilutionCode code = dilute(q, n, m, rng);
    double dev = dilution_deviation(code).value;
    out.row({std::to_string(t), format_metric(dev), format_metric(bound),
             fmt_bool(dev <= bound)});
  }

  auto rows = read_csv_rows(ctx.out_path("dilution.csv"));
  double mean = 0.0;
  int passed = 0;
  for (const auto& row : rows) {
    mean += std::strtod(row[1].c_str(), nullptr);
    passed += row[3] == "1";
  }
  Json metrics;
  metrics["trials"] = rows.size();
  metrics["mean_deviation"] = rows.empty() ? 0.0 : mean / rows.size();
  metrics["pass_fraction"] =
      rows.empty() ? 0.0 : static_cast<double>(passed) / rows.size();
  metrics["tail_bound"] = dilution_tail_bound(q, n, m, delta, eps);
  Json params;
  params["q"] = cfg.at("q");
  params["n"] = n;
  params["M"] = m;
  params["delta"] = delta;
  params["eps"] = eps;
  save_json_file(ctx.out_path("dilution.json"),
                 result_record(ctx, "lemma dilution", params, metrics));
}

void run_covering(RunContext& ctx) {
  const Json& cfg = ctx.config;
  Distribution p = parse_distribution(cfg_require(cfg, "p"));
  Channel w = parse_channel(cfg_require(cfg, "channel"), ctx.base_dir);
  int n = cfg_int(cfg, "n", 10);
  double delta = cfg_num(cfg, "delta", 0.2);
  double eps = cfg_num(cfg, "eps", 0.15);
  int trials = cfg_int(cfg, "trials", 100);
  int mc_samples = cfg_int(cfg, "mc_samples", 64);

  Distribution q = Distribution::uniform(1);
  RMat backward;
  classical_joint(p, w, &q, &backward);
  RMat joint(p.size(), w.num_outputs());
  for (int x = 0; x < p.size(); ++x)
    for (int y = 0; y < w.num_outputs(); ++y) joint(x, y) = p[x] * w(x, y);
  double ixy = mutual_information_classical(joint);
  double m_exp = cfg.contains("m_exponent")
                     ? cfg.at("m_exponent").get<double>()
                     : n * (ixy + cfg_num(cfg, "rate_offset", 0.3));
  std::int64_t m =
      std::max<std::int64_t>(1, std::llround(std::exp2(m_exp)));

  CsvWriter out(ctx.out_path("covering.csv"),
                {"trial", "deviation", "bound", "pass"}, ctx.resume);
  const double bound = 5.0 * eps;
  double tail_bound = 0.0;
  double eta = 0.0;
  int iota_count = 0;
  Channel back_channel(backward);
  for (int t = 0; t < trials; ++t) {
    Rng rng = derive_rng(ctx.seed, "covering-trial", t);
    if (t < out.existing_rows()) continue;
    CoveringCode code = covering_encoder(q, back_channel, n, m, delta, eps, rng);
    double dev;
    try {
      dev = covering_deviation(code).value;
    } catch (const GuardExceeded&) {
      dev = covering_deviation_mc(code, mc_samples, rng).value;
    }
    tail_bound = covering_tail_bound(code);
    eta = code.eta;
    iota_count += code.iota_holds;
    out.row({std::to_string(t), format_metric(dev), format_metric(bound),
             fmt_bool(dev <= bound)});
  }

  auto rows = read_csv_rows(ctx.out_path("covering.csv"));
  double mean = 0.0;
  int passed = 0;
  for (const auto& row : rows) {
    mean += std::strtod(row[1].c_str(), nullptr);
    passed += row[3] == "1";
  }
  Json metrics;
  metrics["trials"] = rows.size();
  metrics["mean_deviation"] = rows.empty() ? 0.0 : mean / rows.size();
  metrics["pass_fraction"] =
      rows.empty() ? 0.0 : static_cast<double>(passed) / rows.size();
  metrics["tail_bound"] = tail_bound;
  metrics["eta"] = eta;
  metrics["iota_count"] = iota_count;
  Json params;
  params["p"] = cfg.at("p");
  params["n"] = n;
  params["M"] = m;
  params["m_exponent"] = m_exp;
  params["delta"] = delta;
  params["eps"] = eps;
  params["ixy"] = ixy;
  save_json_file(ctx.out_path("covering.json"),
                 result_record(ctx, "lemma covering", params, metrics));
}

void run_hsw(RunContext& ctx) {
  const Json& cfg = ctx.config;
  Ensemble e = parse_ensemble(cfg_require(cfg, "ensemble"), ctx.base_dir);
  std::vector<int> n_list = cfg_ints(cfg, "n");
  double offset = cfg_num(cfg, "rate_offset", -0.15);
  int seeds = cfg_int(cfg, "seeds", 20);
  int trials = cfg_int(cfg, "trials", 50);
  HswOptions opts;
  opts.typical_projection = cfg_bool(cfg, "typical_projection", false);
  opts.projection_delta = cfg_num(cfg, "projection_delta", 0.25);

  double iyb = holevo_information(e);
  double s_rate = std::max(0.0, iyb + offset);

  CsvWriter out(
      ctx.out_path("hsw.csv"),
      {"seed", "n", "S", "mean_error", "max_error", "mean_disturbance"},
      ctx.resume);
  std::int64_t cell = 0;
  for (int seed_idx = 0; seed_idx < seeds; ++seed_idx)
    for (int n : n_list) {
      if (cell++ < out.existing_rows()) continue;
      Rng rng = derive_rng(ctx.seed, "hsw-cell", cell - 1);
      HswCode code = build_hsw(e, n, s_rate, rng, opts);
      HswErrorSummary err = average_error(code);
      double dist_sum = 0.0;
      for (int t = 0; t < trials; ++t) {
        int s = static_cast<int>(rng.below(code.num_messages()));
        dist_sum += measure(code, code.codeword_state(s), rng).disturbance;
      }
      out.row({std::to_string(seed_idx), std::to_string(n),
               format_metric(s_rate), format_metric(err.mean_error),
               format_metric(err.max_error),
               format_metric(trials > 0 ? dist_sum / trials : 0.0)});
    }

  // Fraction of seeds whose mean_error strictly decreases along the n list.
  auto rows = read_csv_rows(ctx.out_path("hsw.csv"));
  int trend = 0;
  for (int seed_idx = 0; seed_idx < seeds; ++seed_idx) {
    bool dec = true;
    for (std::size_t i = 1; i < n_list.size(); ++i) {
      double prev =
          std::strtod(rows[seed_idx * n_list.size() + i - 1][3].c_str(), nullptr);
      double cur =
          std::strtod(rows[seed_idx * n_list.size() + i][3].c_str(), nullptr);
      dec = dec && cur < prev;
    }
    trend += dec;
  }
  Json metrics;
  metrics["cells"] = cell;
  metrics["holevo"] = iyb;
  metrics["S"] = s_rate;
  metrics["decreasing_seed_fraction"] =
      seeds > 0 ? static_cast<double>(trend) / seeds : 0.0;
  Json params;
  params["n"] = cfg.at("n");
  params["rate_offset"] = offset;
  params["seeds"] = seeds;
  params["trials"] = trials;
  save_json_file(ctx.out_path("hsw.json"),
                 result_record(ctx, "hsw", params, metrics));
}

void run_simulate(RunContext& ctx) {
  const Json& cfg = ctx.config;
  Ensemble e = parse_ensemble(cfg_require(cfg, "ensemble"), ctx.base_dir);
  Channel w = parse_channel(cfg_require(cfg, "channel"), ctx.base_dir);
  std::vector<int> n_list = cfg_ints(cfg, "n");
  int seeds = cfg_int(cfg, "seeds", 20);
  int trials = cfg_int(cfg, "trials", 100);
  int candidates = cfg_int(cfg, "candidates", 1);
  SimulationOptions opts;
  opts.delta = cfg_num(cfg, "delta", 0.2);
  opts.eps = cfg_num(cfg, "eps", 0.15);
  opts.hsw.typical_projection = cfg_bool(cfg, "typical_projection", false);
  double margin = cfg_num(cfg, "margin", 0.1);
  double r_scale = cfg_num(cfg, "r_scale", 1.0);
  double naive_delta = cfg_num(cfg, "naive_delta", opts.delta);

  ExtendedState ext = apply_channel(e, w);
  RateRegion region = simulation_region(ext);
  Rates base = default_rates(ext, opts.delta);
  Rates rates;
  rates.r = base.r + margin;
  rates.c = base.c + margin;
  rates.s = std::max(0.0, base.s - margin);
  if (r_scale != 1.0) rates.r = std::max(0.0, r_scale * region.r_min);

  CsvWriter out(ctx.out_path("simulate.csv"),
                {"seed", "n", "r", "c", "s", "num_l", "num_m", "num_s",
                 "classical_l1", "classical_se", "classical_exact",
                 "mean_disturbance", "disturbance_se", "quantum_l1",
                 "has_quantum", "best_candidate", "naive_l1", "naive_rate"},
                ctx.resume);
  std::int64_t cell = 0;
  for (int seed_idx = 0; seed_idx < seeds; ++seed_idx)
    for (int n : n_list) {
      if (cell++ < out.existing_rows()) continue;
      std::uint64_t cell_seed = derive_seed(ctx.seed, "simulate-cell", cell - 1);
      DerandomizeResult result =
          derandomize(e, w, n, rates, candidates, cell_seed, trials, opts);
      const ErrorReport& rep = result.best_report;
      NaiveReport naive = naive_baseline(e, w, n, naive_delta);
      out.row({std::to_string(seed_idx), std::to_string(n),
               format_metric(rates.r), format_metric(rates.c),
               format_metric(rates.s), std::to_string(result.best.num_l),
               std::to_string(result.best.num_m),
               std::to_string(result.best.num_s),
               format_metric(rep.classical_l1), format_metric(rep.classical_se),
               fmt_bool(rep.classical_exact),
               format_metric(rep.mean_disturbance),
               format_metric(rep.disturbance_se), format_metric(rep.quantum_l1),
               fmt_bool(rep.has_quantum), std::to_string(result.best_index),
               format_metric(naive.classical_l1),
               format_metric(naive.achieved_rate)});
    }

  auto rows = read_csv_rows(ctx.out_path("simulate.csv"));
  Json per_n = Json::object();
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    double sum = 0.0;
    for (int seed_idx = 0; seed_idx < seeds; ++seed_idx)
      sum += std::strtod(rows[seed_idx * n_list.size() + ni][8].c_str(), nullptr);
    per_n[std::to_string(n_list[ni])] = seeds > 0 ? sum / seeds : 0.0;
  }
  int trend = 0;
  for (int seed_idx = 0; seed_idx < seeds; ++seed_idx) {
    bool dec = true;
    for (std::size_t i = 1; i < n_list.size(); ++i) {
      double prev =
          std::strtod(rows[seed_idx * n_list.size() + i - 1][8].c_str(), nullptr);
      double cur =
          std::strtod(rows[seed_idx * n_list.size() + i][8].c_str(), nullptr);
      dec = dec && cur < prev;
    }
    trend += dec;
  }
  Json metrics;
  metrics["cells"] = cell;
  metrics["region_r_min"] = region.r_min;
  metrics["region_sum_min"] = region.sum_min;
  metrics["rates"] = {{"r", rates.r}, {"c", rates.c}, {"s", rates.s}};
  metrics["mean_classical_l1_per_n"] = per_n;
  metrics["decreasing_seed_fraction"] =
      seeds > 0 ? static_cast<double>(trend) / seeds : 0.0;
  Json params;
  params["n"] = cfg.at("n");
  params["delta"] = opts.delta;
  params["eps"] = opts.eps;
  params["margin"] = margin;
  params["r_scale"] = r_scale;
  params["trials"] = trials;
  params["candidates"] = candidates;
  params["seeds"] = seeds;
  save_json_file(ctx.out_path("simulate.json"),
                 result_record(ctx, "simulate", params, metrics));
}

SearchBudget parse_budget(const Json& cfg, std::uint64_t seed) {
  SearchBudget budget;
  budget.starts = cfg_int(cfg, "starts", 16);
  budget.iterations = cfg_int(cfg, "iterations", 400);
  budget.certify = cfg_bool(cfg, "certify", false);
  budget.grid_resolution = cfg_num(cfg, "grid_resolution", 0.02);
  budget.penalty = cfg_num(cfg, "penalty", 1e4);
  budget.seed = seed;
  return budget;
}

void write_curve(RunContext& ctx, const std::string& name,
                 const std::vector<CurvePoint>& curve, Json params,
                 bool non_decreasing) {
  CsvWriter out(ctx.out_path(name + ".csv"),
                {"abscissa", "ordinate", "constraint_slack", "certificate_gap"},
                ctx.resume);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (static_cast<std::int64_t>(i) < out.existing_rows()) continue;
    const CurvePoint& pt = curve[i];
    out.row({format_metric(pt.abscissa), format_metric(pt.ordinate),
             format_metric(pt.constraint_slack),
             pt.certified ? format_metric(pt.certificate_gap) : "nan"});
  }
  auto rows = read_csv_rows(ctx.out_path(name + ".csv"));
  bool monotone = true;
  double worst_slack = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double ord = std::strtod(rows[i][1].c_str(), nullptr);
    if (i > 0) {
      double prev = std::strtod(rows[i - 1][1].c_str(), nullptr);
      monotone = monotone && (non_decreasing ? ord >= prev - 1e-12
                                             : ord <= prev + 1e-12);
    }
    worst_slack =
        std::min(worst_slack, std::strtod(rows[i][2].c_str(), nullptr));
  }
  Json points = Json::array();
  for (const CurvePoint& pt : curve) {
    Json p;
    p["abscissa"] = pt.abscissa;
    p["ordinate"] = pt.ordinate;
    p["constraint_slack"] = pt.constraint_slack;
    p["channel"] = rmat_to_json(pt.channel);
    if (pt.certified) {
      p["certificate"] = pt.certificate;
      p["certificate_gap"] = pt.certificate_gap;
    }
    if (!pt.decoder.empty()) p["decoder"] = pt.decoder;
    points.push_back(std::move(p));
  }
  Json metrics;
  metrics["points"] = std::move(points);
  metrics["monotone"] = monotone;
  metrics["worst_slack"] = worst_slack;
  save_json_file(ctx.out_path(name + ".json"),
                 result_record(ctx, name, std::move(params), metrics));
}

void run_cr_curve(RunContext& ctx) {
  const Json& cfg = ctx.config;
  Ensemble e = parse_ensemble(cfg_require(cfg, "ensemble"), ctx.base_dir);
  std::vector<double> grid = cfg_nums(cfg, "grid");
  SearchBudget budget = parse_budget(cfg, ctx.seed);
  std::vector<CurvePoint> curve = cr_curve(e, grid, budget);
  Json params;
  params["grid"] = cfg.at("grid");
  params["starts"] = budget.starts;
  params["iterations"] = budget.iterations;
  params["certify"] = budget.certify;
  write_curve(ctx, "cr_curve", curve, std::move(params), true);
}

void run_wyner_ziv(RunContext& ctx) {
  const Json& cfg = ctx.config;
  RMat joint = parse_rmat(cfg_require(cfg, "joint"));
  DistortionMeasure dist = parse_distortion(cfg_require(cfg, "distortion"));
  std::vector<double> grid = cfg_nums(cfg, "grid");
  SearchBudget budget = parse_budget(cfg, ctx.seed);
  std::vector<CurvePoint> curve = wyner_ziv_curve(joint, dist, grid, budget);
  Json params;
  params["grid"] = cfg.at("grid");
  params["starts"] = budget.starts;
  params["iterations"] = budget.iterations;
  params["certify"] = budget.certify;
  write_curve(ctx, "wyner_ziv", curve, std::move(params), false);
}

void run_redistribute(RunContext& ctx) {
  const Json& cfg = ctx.config;
  if (cfg.contains("state")) {
    FourPartyPureState psi = parse_state(cfg.at("state"), ctx.base_dir);
    QERegion region = region_report(psi);
    Json metrics;
    metrics["q_min"] = region.bound.q_min;
    metrics["qe_sum_min"] = region.bound.qe_sum_min;
    Json corners = Json::array();
    for (const QEPoint& pt : region.corners) {
      corners.push_back({{"label", pt.label},
                         {"q", pt.q},
                         {"e", pt.e},
                         {"contained", region.contains(pt)}});
    }
    metrics["corners"] = std::move(corners);
    metrics["a_hat_trivial"] = region.a_hat_trivial;
    metrics["b_trivial"] = region.b_trivial;
    metrics["fqsw_tight"] = region.fqsw_tight;
    metrics["fqrs_tight"] = region.fqrs_tight;
    Json params;
    params["dims"] = psi.dims;
    save_json_file(ctx.out_path("redistribute.json"),
                   result_record(ctx, "redistribute", params, metrics));
    return;
  }
  const Json& batch = cfg_require(cfg, "batch");
  std::vector<int> dims = cfg_ints(batch, "dims");
  int count = cfg_int(batch, "count", 1000);
  CsvWriter out(ctx.out_path("redistribute.csv"),
                {"sample", "q_min", "qe_sum_min", "fqsw_q", "fqsw_e", "fqrs_q",
                 "fqrs_e", "fqsw_contained", "fqrs_contained"},
                ctx.resume);
  for (int i = 0; i < count; ++i) {
    if (i < out.existing_rows()) continue;
    Rng rng = derive_rng(ctx.seed, "redistribute-sample", i);
    FourPartyPureState psi = random_four_party(dims, rng);
    QERegion region = region_report(psi);
    out.row({std::to_string(i), format_metric(region.bound.q_min),
             format_metric(region.bound.qe_sum_min),
             format_metric(region.corners[0].q),
             format_metric(region.corners[0].e),
             format_metric(region.corners[1].q),
             format_metric(region.corners[1].e),
             fmt_bool(region.contains(region.corners[0])),
             fmt_bool(region.contains(region.corners[1]))});
  }
  auto rows = read_csv_rows(ctx.out_path("redistribute.csv"));
  int in_both = 0;
  for (const auto& row : rows)
    in_both += row[7] == "1" && row[8] == "1";
  Json metrics;
  metrics["samples"] = rows.size();
  metrics["contained_fraction"] =
      rows.empty() ? 1.0 : static_cast<double>(in_both) / rows.size();
  Json params;
  params["dims"] = dims;
  params["count"] = count;
  save_json_file(ctx.out_path("redistribute.json"),
                 result_record(ctx, "redistribute", params, metrics));
}

}  // namespace

int run_main(int argc, char** argv) {
  CLI::App app{"chansim: classical channel simulation with quantum side "
               "information"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "results";
  std::uint64_t seed_flag = 0;
  int threads = 0;
  bool resume = false;
  app.add_option("--config", config_path, "experiment config (JSON)")
      ->required();
  app.add_option("--seed", seed_flag, "master seed override");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads (0 = default)");
  app.add_flag("--resume", resume, "continue a partial sweep");

  CLI::App* typ = app.add_subcommand("typicality", "set-size/mass bound tables");
  CLI::App* lemma = app.add_subcommand("lemma", "dilution and covering trials");
  std::string lemma_mode;
  lemma->add_option("mode", lemma_mode, "dilution | covering")
      ->required()
      ->check(CLI::IsMember({"dilution", "covering"}));
  CLI::App* hsw_cmd = app.add_subcommand("hsw", "measurement error trends");
  CLI::App* sim = app.add_subcommand("simulate", "end-to-end simulation sweep");
  CLI::App* crc = app.add_subcommand("cr-curve", "distillation rate curve");
  CLI::App* wz = app.add_subcommand("wyner-ziv", "rate-distortion curve");
  CLI::App* redist = app.add_subcommand("redistribute", "state redistribution bounds");
  for (CLI::App* sub : {typ, lemma, hsw_cmd, sim, crc, wz, redist})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (threads > 0)
      setenv("CHANSIM_THREADS", std::to_string(threads).c_str(), 1);

    RunContext ctx;
    ctx.config = load_json_file(config_path);
    ctx.base_dir =
        std::filesystem::path(config_path).parent_path().string();
    ctx.out_dir = out_dir;
    ctx.seed = app.count("--seed")
                   ? seed_flag
                   : static_cast<std::uint64_t>(cfg_num(ctx.config, "seed", 1));
    ctx.resume = resume;
    std::filesystem::create_directories(out_dir);

    if (typ->parsed()) run_typicality(ctx);
    if (lemma->parsed())
      lemma_mode == "dilution" ? run_dilution(ctx) : run_covering(ctx);
    if (hsw_cmd->parsed()) run_hsw(ctx);
    if (sim->parsed()) run_simulate(ctx);
    if (crc->parsed()) run_cr_curve(ctx);
    if (wz->parsed()) run_wyner_ziv(ctx);
    if (redist->parsed()) run_redistribute(ctx);
    return 0;
  } catch (const GuardExceeded& e) {
    std::cerr << "guard exceeded: " << e.what() << "\n";
    return 3;
  } catch (const InfeasibleInstance& e) {
    std::cerr << "infeasible instance: " << e.what() << "\n";
    return 4;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace chansim
