// Copyright 2026 The KCL Workbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kcl/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kcl/bounds.hpp"
#include "kcl/encoders.hpp"
#include "kcl/errors.hpp"
#include "kcl/geometry.hpp"
#include "kcl/objectives.hpp"
#include "kcl/random.hpp"
#include "kcl/trainer.hpp"

namespace kcl {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCheckFailed = 2;

using nlohmann::json;

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw PreconditionError("expected key=value in '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return kv;
}

/// World source: a file path or builtin:<kind>:key=value,...
FiniteWorld resolve_world(const std::string& spec) {
  if (spec.rfind("builtin:", 0) != 0) return load_world(spec);
  std::string rest = spec.substr(8);
  auto colon = rest.find(':');
  std::string kind = rest.substr(0, colon);
  auto kv = colon == std::string::npos
                ? std::map<std::string, std::string>{}
                : parse_kv(rest.substr(colon + 1));
  BallWorldSpec ball;
  if (kv.count("k")) ball.K = std::stoi(kv.at("k"));
  if (kv.count("resolution")) ball.resolution = std::stoi(kv.at("resolution"));
  if (kv.count("radius")) ball.radius = std::stod(kv.at("radius"));
  if (kv.count("dim")) ball.dim = std::stoi(kv.at("dim"));
  if (kind == "disjoint-balls") {
    ball.mode = OverlapMode::Disjoint;
    return build_disjoint_balls(ball);
  }
  if (kind == "overlap-balls") {
    ball.mode = OverlapMode::TwoBallOverlap;
    ball.K = 2;
    return build_overlap_balls(ball);
  }
  throw PreconditionError("unknown builtin world kind '" + kind + "'");
}

std::unique_ptr<Encoder> resolve_encoder(const std::string& spec,
                                         const FiniteWorld& world,
                                         std::uint64_t seed) {
  if (spec.empty() || spec.rfind("random", 0) == 0) {
    std::map<std::string, std::string> kv;
    auto colon = spec.find(':');
    if (colon != std::string::npos) kv = parse_kv(spec.substr(colon + 1));
    int d = kv.count("d") ? std::stoi(kv.at("d")) : 4;
    if (kv.count("seed")) seed = std::stoull(kv.at("seed"));
    if (spec.rfind("random-mlp", 0) == 0) {
      int hidden = kv.count("hidden") ? std::stoi(kv.at("hidden")) : 8;
      int in_dim = static_cast<int>(world.points.front().coords.size());
      return std::make_unique<MlpEncoder>(
          MlpEncoder::random({in_dim, hidden, d}, seed));
    }
    return std::make_unique<TableEncoder>(
        TableEncoder::random(world.size(), d, seed));
  }
  std::ifstream in(spec);
  if (!in) throw Error("cannot open encoder checkpoint: " + spec);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw SchemaError("encoder checkpoint is not valid JSON: " +
                      std::string(e.what()));
  }
  return encoder_from_json(j);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write to " + path);
  out << text;
}

void emit(const json& report, const std::string& path) {
  if (path.empty())
    std::cout << report.dump(2) << "\n";
  else
    write_text(path, report.dump(2) + "\n");
}

void print_report_line(const BoundReport& r) {
  std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": lhs=" << r.lhs
            << " rhs=" << r.rhs << " slack=" << r.slack;
  if (r.estimator_noise > 0.0) std::cout << " noise=" << r.estimator_noise;
  std::cout << "\n";
}

std::vector<std::vector<int>> label_partition(const FiniteWorld& world) {
  if (world.labels.empty())
    throw PreconditionError("world has no labels to derive a partition from");
  std::vector<std::vector<int>> cells(
      static_cast<size_t>(world.cluster_count()));
  for (int x = 0; x < world.size(); ++x)
    cells[static_cast<size_t>(world.labels[static_cast<size_t>(x)])].push_back(
        x);
  std::vector<std::vector<int>> out;
  for (auto& c : cells)
    if (!c.empty()) out.push_back(std::move(c));
  return out;
}

int all_pass_exit(const std::vector<BoundReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass) return kExitCheckFailed;
  return kExitOk;
}

/// Everything the subcommands can set; one instance per invocation so
/// repeated in-process runs start clean.
struct Options {
  std::uint64_t seed = 0;
  std::string world_spec;
  std::string encoder_spec;
  std::string kernel_name = "linear";
  double sigma2 = 1.0;
  double lambda = 1.0;
  std::string delta = "auto";
  std::string out;
  std::string report_path;

  // world build
  std::string build_kind;
  int build_k = 3;
  int build_resolution = 1;
  int build_dim = 2;
  double build_radius = 1.0;
  std::string validate_path;

  // loss / relations
  std::string loss_name = "kcl";
  std::string nce_variant = "standard";
  double tau = 0.1;
  int negatives = 8;

  // bounds
  GenBoundConfig gen_cfg;
  int trials = 50;
  int surrogate_train_steps = 400;

  // train / sweep
  TrainConfig train_cfg;
  int encoder_dim = 4;
  std::string trace_out;
  std::string encoder_out;
  std::string sweep_values = "1,2,4,8";
  int jobs = 0;

  Kernel kernel() const {
    return kernel_by_name(kernel_name, {{"sigma2", sigma2}});
  }

  double resolve_delta(const FiniteWorld& world) const {
    if (delta == "auto") {
      std::vector<int> ids;
      for (int i = 0; i < world.cluster_count(); ++i) ids.push_back(i);
      return max_admissible_delta(world, ids, lambda);
    }
    return std::stod(delta);
  }

  ClusterStructure structure(const FiniteWorld& world) const {
    return structure_from_world(world, lambda, resolve_delta(world));
  }

  json provenance(const std::string& command) const {
    json j;
    j["command"] = command;
    j["world"] = world_spec;
    j["encoder"] = encoder_spec.empty() ? "random" : encoder_spec;
    j["kernel"] = {{"name", kernel_name}, {"sigma2", sigma2}};
    j["lambda"] = lambda;
    j["delta"] = delta;
    j["seed"] = seed;
    return j;
  }
};

int cmd_world_build(const Options& opt) {
  BallWorldSpec spec;
  spec.K = opt.build_k;
  spec.resolution = opt.build_resolution;
  spec.radius = opt.build_radius;
  spec.dim = opt.build_dim;
  FiniteWorld w;
  if (opt.build_kind == "disjoint-balls") {
    spec.mode = OverlapMode::Disjoint;
    w = build_disjoint_balls(spec);
  } else if (opt.build_kind == "overlap-balls") {
    spec.mode = OverlapMode::TwoBallOverlap;
    spec.K = 2;
    w = build_overlap_balls(spec);
  } else {
    throw PreconditionError("unknown world kind '" + opt.build_kind + "'");
  }
  save_world(w, opt.out);
  std::cout << "wrote " << opt.out << " (" << w.size() << " points, "
            << w.cluster_count() << " clusters)\n";
  return kExitOk;
}

int cmd_world_validate(const Options& opt) {
  FiniteWorld w = load_world(opt.validate_path);
  std::cout << "ok: " << w.size() << " points, " << w.cluster_count()
            << " clusters\n";
  return kExitOk;
}

int cmd_sim_check(const Options& opt) {
  FiniteWorld w = resolve_world(opt.world_spec);
  ClusterStructure s = opt.structure(w);
  AssumptionReport rep = verify_assumption(w, s);
  json j = rep.to_json();
  j["config"] = opt.provenance("sim check");
  j["config"]["resolved_delta"] = s.delta;
  emit(j, opt.out);
  return rep.pass ? kExitOk : kExitCheckFailed;
}

int cmd_loss_eval(const Options& opt) {
  FiniteWorld w = resolve_world(opt.world_spec);
  auto enc = resolve_encoder(opt.encoder_spec, w, opt.seed);
  Eigen::MatrixXd f = encode_all(*enc, w);
  json j;
  j["config"] = opt.provenance("loss eval");
  j["config"]["loss"] = opt.loss_name;
  if (opt.loss_name == "kcl") {
    LossValue v = population_kcl(w, f, opt.kernel(), opt.lambda);
    j["value"] = v.value;
    j["positive_term"] = v.positive_term;
    j["negative_term"] = v.negative_term;
    j["estimator"] = "exact";
  } else if (opt.loss_name == "scl") {
    j["value"] = spectral_contrastive(w, f);
    j["estimator"] = "exact";
  } else if (opt.loss_name == "nce") {
    InfoNceConfig cfg;
    cfg.tau = opt.tau;
    cfg.negatives = opt.negatives;
    cfg.lambda = opt.lambda;
    cfg.seed = opt.seed;
    NceVariant v = NceVariant::Standard;
    if (opt.nce_variant == "asymptotic")
      v = NceVariant::Asymptotic;
    else if (opt.nce_variant == "decoupled")
      v = NceVariant::Decoupled;
    else if (opt.nce_variant == "decoupled-asymptotic")
      v = NceVariant::DecoupledAsymptotic;
    else if (opt.nce_variant == "dcl")
      v = NceVariant::DecoupledNegOnly;
    else if (opt.nce_variant != "standard")
      throw PreconditionError("unknown NCE variant '" + opt.nce_variant + "'");
    NceValue nv = info_nce(w, f, cfg, v);
    j["value"] = nv.value;
    j["estimator"] = nv.exact ? "exact" : "monte-carlo";
    if (!nv.exact) {
      j["mc_samples"] = nv.mc_samples;
      j["mc_seed"] = nv.mc_seed;
      j["half_width"] = nv.half_width;
    }
  } else {
    throw PreconditionError("unknown loss '" + opt.loss_name + "'");
  }
  emit(j, opt.out);
  return kExitOk;
}

int cmd_relations_check(const Options& opt) {
  FiniteWorld w = resolve_world(opt.world_spec);
  auto enc = resolve_encoder(opt.encoder_spec, w, opt.seed);
  Eigen::MatrixXd f = encode_all(*enc, w);
  InfoNceConfig cfg;
  cfg.tau = opt.tau;
  cfg.negatives = opt.negatives;
  cfg.lambda = opt.lambda;
  cfg.seed = opt.seed;
  auto reports = check_loss_relations(w, f, cfg);
  std::ostringstream csv;
  csv.precision(17);
  csv << "relation,lhs,rhs,slack,estimator\n";
  for (const auto& r : reports) {
    print_report_line(r);
    csv << r.name << ',' << r.lhs << ',' << r.rhs << ',' << r.slack << ','
        << r.notes.at("estimator") << '\n';
  }
  if (!opt.out.empty()) write_text(opt.out, csv.str());
  return all_pass_exit(reports);
}

int cmd_geometry_report(const Options& opt) {
  FiniteWorld w = resolve_world(opt.world_spec);
  auto enc = resolve_encoder(opt.encoder_spec, w, opt.seed);
  Eigen::MatrixXd f = encode_all(*enc, w);
  Kernel kernel = opt.kernel();
  ClusterStructure s = opt.structure(w);
  ClusterGeometry geo = cluster_geometry(w, f, kernel, s);
  json j;
  j["config"] = opt.provenance("geometry report");
  j["config"]["resolved_delta"] = s.delta;
  j["mu_gram"] = json::array();
  for (int i = 0; i < geo.mu_gram.rows(); ++i) {
    std::vector<double> row(static_cast<size_t>(geo.mu_gram.cols()));
    for (int c = 0; c < geo.mu_gram.cols(); ++c)
      row[static_cast<size_t>(c)] = geo.mu_gram(i, c);
    j["mu_gram"].push_back(row);
  }
  j["a"] = geo.a_value;
  j["c"] = geo.c_value;
  j["delta_min"] = geo.delta_min;
  j["masses"] = geo.masses;
  if (s.cluster_count() >= 2 && !s.labeling.empty())
    j["mean_classifier_error"] = mean_classifier_error(w, f, kernel, s);
  emit(j, opt.out);
  return kExitOk;
}

int cmd_bounds(const Options& opt_in, const std::string& which) {
  Options opt = opt_in;
  if (opt.world_spec.empty()) throw PreconditionError("--world is required");
  FiniteWorld w = resolve_world(opt.world_spec);
  Kernel kernel = opt.kernel();
  ClusterStructure s = opt.structure(w);
  opt.gen_cfg.lambda = opt.lambda;
  opt.gen_cfg.seed = opt.seed;
  auto enc = resolve_encoder(opt.encoder_spec, w, opt.seed);
  Eigen::MatrixXd f = encode_all(*enc, w);

  std::vector<BoundReport> reports;
  json skipped = json::array();
  auto want = [&](const std::string& name) {
    return which == "all" || which == name;
  };

  if (want("decomposition"))
    reports.push_back(check_decomposition(w, f, kernel, s));
  if (want("equality")) {
    try {
      reports.push_back(check_equality_case(w, f, kernel, s));
    } catch (const HypothesisError& e) {
      if (which != "all") throw;
      skipped.push_back({{"check", "equality_case"}, {"reason", e.what()}});
    }
  }
  if (want("classification")) {
    try {
      reports.push_back(check_classification_bound(w, f, kernel, s));
    } catch (const PreconditionError& e) {
      if (which != "all") throw;
      skipped.push_back(
          {{"check", "classification_bound"}, {"reason", e.what()}});
    }
  }
  if (want("ncut")) {
    auto [relax, comb] =
        check_normalized_cut(w, f, kernel, opt.lambda, label_partition(w));
    reports.push_back(relax);
    reports.push_back(comb);
  }
  if (want("generalization"))
    reports.push_back(
        check_generalization(w, kernel, opt.gen_cfg, opt.trials, opt.seed));
  if (want("surrogate")) {
    TrainConfig tc = opt.train_cfg;
    tc.steps = opt.surrogate_train_steps;
    tc.lambda = opt.lambda;
    tc.seed = opt.seed;
    TableEncoder init =
        TableEncoder::random(w.size(), std::max(2, w.cluster_count()),
                             split_seed(opt.seed, 42));
    TrainResult tr = train(w, init, kernel, s, tc);
    Eigen::MatrixXd ft = encode_all(*tr.encoder, w);
    reports.push_back(check_surrogate(w, kernel, s, opt.gen_cfg, ft, ft));
  }

  json j;
  j["config"] = opt.provenance("bounds " + which);
  j["config"]["resolved_delta"] = s.delta;
  j["reports"] = json::array();
  for (const auto& r : reports) {
    print_report_line(r);
    j["reports"].push_back(r.to_json());
  }
  if (!skipped.empty()) j["skipped"] = skipped;
  if (!opt.report_path.empty()) emit(j, opt.report_path);
  return all_pass_exit(reports);
}

int cmd_train(const Options& opt_in) {
  Options opt = opt_in;
  FiniteWorld w = resolve_world(opt.world_spec);
  Kernel kernel = opt.kernel();
  opt.train_cfg.seed = opt.seed;
  ClusterStructure s = structure_from_world(
      w, opt.train_cfg.lambda, std::numeric_limits<double>::quiet_NaN());
  TableEncoder init = TableEncoder::random(w.size(), opt.encoder_dim,
                                           split_seed(opt.seed, 9999));
  TrainResult res = train(w, init, kernel, s, opt.train_cfg);
  if (!opt.trace_out.empty())
    write_text(opt.trace_out, trace_to_csv(res.trace));
  if (!opt.encoder_out.empty())
    write_text(opt.encoder_out, res.encoder->to_json().dump(2) + "\n");
  const TraceRow& last = res.trace.back();
  std::cout << "final population loss " << last.population_loss
            << ", mean-classifier error " << last.mean_error
            << (res.diverged ? " (diverged)" : "") << "\n";
  return res.diverged ? kExitCheckFailed : kExitOk;
}

int cmd_sweep_lambda(const Options& opt_in) {
  Options opt = opt_in;
  FiniteWorld w = resolve_world(opt.world_spec);
  Kernel kernel = opt.kernel();
  opt.train_cfg.seed = opt.seed;
  std::vector<double> lambdas;
  std::istringstream in(opt.sweep_values);
  std::string item;
  while (std::getline(in, item, ',')) lambdas.push_back(std::stod(item));
  auto rows = lambda_sweep(w, kernel, lambdas, opt.train_cfg, opt.jobs);
  std::string csv = sweep_to_csv(rows);
  if (opt.out.empty())
    std::cout << csv;
  else
    write_text(opt.out, csv);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"kcl: kernel contrastive learning workbench"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  if (const char* env = std::getenv("KCL_SEED")) opt.seed = std::stoull(env);
  app.add_option("--seed", opt.seed, "RNG seed (env KCL_SEED overrides)");

  std::function<int()> action;

  auto* world_cmd = app.add_subcommand("world", "build or validate worlds");
  world_cmd->fallthrough();
  {
    auto* build = world_cmd->add_subcommand("build", "construct a builtin world");
    build->fallthrough();
    build->add_option("--kind", opt.build_kind, "disjoint-balls|overlap-balls")
        ->required();
    build->add_option("--k", opt.build_k, "cluster count");
    build->add_option("--resolution", opt.build_resolution, "cells per ball");
    build->add_option("--radius", opt.build_radius, "ball radius");
    build->add_option("--dim", opt.build_dim, "ambient dimension");
    build->add_option("--out", opt.out, "output path")->required();
    build->callback([&]() { action = [&]() { return cmd_world_build(opt); }; });

    auto* validate = world_cmd->add_subcommand("validate", "check a world file");
    validate->fallthrough();
    validate->add_option("path", opt.validate_path, "world JSON file")
        ->required();
    validate->callback(
        [&]() { action = [&]() { return cmd_world_validate(opt); }; });
  }

  auto* sim_cmd = app.add_subcommand("sim", "similarity-structure checks");
  sim_cmd->fallthrough();
  {
    auto* check = sim_cmd->add_subcommand("check", "verify the cluster structure");
    check->fallthrough();
    check->add_option("--world", opt.world_spec)->required();
    check->add_option("--lambda", opt.lambda);
    check->add_option("--delta", opt.delta, "threshold or 'auto'");
    check->add_option("--out", opt.out, "report path (default stdout)");
    check->callback([&]() { action = [&]() { return cmd_sim_check(opt); }; });
  }

  {
    auto* loss_cmd = app.add_subcommand("loss", "loss evaluation");
    loss_cmd->fallthrough();
    auto* eval = loss_cmd->add_subcommand("eval", "evaluate one loss");
    eval->fallthrough();
    eval->add_option("--loss", opt.loss_name, "kcl|nce|scl")->required();
    eval->add_option("--world", opt.world_spec)->required();
    eval->add_option("--encoder", opt.encoder_spec,
                     "ckpt path or random[:k=v,..]");
    eval->add_option("--kernel", opt.kernel_name);
    eval->add_option("--sigma2", opt.sigma2);
    eval->add_option("--lambda", opt.lambda);
    eval->add_option("--tau", opt.tau);
    eval->add_option("--negatives", opt.negatives);
    eval->add_option("--variant", opt.nce_variant,
                     "standard|asymptotic|decoupled|decoupled-asymptotic|dcl");
    eval->add_option("--out", opt.out);
    eval->callback([&]() { action = [&]() { return cmd_loss_eval(opt); }; });
  }

  {
    auto* rel_cmd = app.add_subcommand("relations", "between-loss inequalities");
    rel_cmd->fallthrough();
    auto* check = rel_cmd->add_subcommand("check", "evaluate all relations");
    check->fallthrough();
    check->add_option("--world", opt.world_spec)->required();
    check->add_option("--encoder", opt.encoder_spec);
    check->add_option("--tau", opt.tau);
    check->add_option("--negatives", opt.negatives);
    check->add_option("--lambda", opt.lambda);
    check->add_option("--out", opt.out, "CSV path (default stdout)");
    check->callback(
        [&]() { action = [&]() { return cmd_relations_check(opt); }; });
  }

  {
    auto* geo_cmd = app.add_subcommand("geometry", "RKHS cluster geometry");
    geo_cmd->fallthrough();
    auto* report = geo_cmd->add_subcommand("report", "emit geometry JSON");
    report->fallthrough();
    report->add_option("--world", opt.world_spec)->required();
    report->add_option("--encoder", opt.encoder_spec);
    report->add_option("--kernel", opt.kernel_name);
    report->add_option("--sigma2", opt.sigma2);
    report->add_option("--lambda", opt.lambda);
    report->add_option("--delta", opt.delta);
    report->add_option("--out", opt.out);
    report->callback(
        [&]() { action = [&]() { return cmd_geometry_report(opt); }; });
  }

  {
    auto* bounds_cmd = app.add_subcommand("bounds", "theorem-level checks");
    bounds_cmd->fallthrough();
    bounds_cmd->add_option("--world", opt.world_spec);
    bounds_cmd->add_option("--encoder", opt.encoder_spec);
    bounds_cmd->add_option("--kernel", opt.kernel_name);
    bounds_cmd->add_option("--sigma2", opt.sigma2);
    bounds_cmd->add_option("--lambda", opt.lambda);
    bounds_cmd->add_option("--delta", opt.delta);
    bounds_cmd->add_option("--report", opt.report_path, "JSON report path");
    bounds_cmd->add_option("--n", opt.gen_cfg.n, "generalization sample count");
    bounds_cmd->add_option("--epsilon", opt.gen_cfg.epsilon);
    bounds_cmd->add_option("--trials", opt.trials);
    bounds_cmd->add_option("--proxy-class", opt.gen_cfg.proxy_class_size);
    bounds_cmd->add_option("--rademacher-draws", opt.gen_cfg.rademacher_draws);
    bounds_cmd->add_option("--permutations", opt.gen_cfg.permutation_samples);
    bounds_cmd->add_option("--train-steps", opt.surrogate_train_steps,
                           "surrogate training length");
    for (const char* name : {"decomposition", "equality", "classification",
                             "generalization", "surrogate", "ncut", "all"}) {
      auto* sub = bounds_cmd->add_subcommand(name);
      sub->fallthrough();
      std::string which = name;
      sub->callback([&, which]() {
        action = [&, which]() { return cmd_bounds(opt, which); };
      });
    }
  }

  {
    auto* train_cmd = app.add_subcommand("train", "projected-gradient training");
    train_cmd->fallthrough();
    train_cmd->add_option("--world", opt.world_spec)->required();
    train_cmd->add_option("--kernel", opt.kernel_name);
    train_cmd->add_option("--sigma2", opt.sigma2);
    train_cmd->add_option("--lambda", opt.train_cfg.lambda);
    train_cmd->add_option("--steps", opt.train_cfg.steps);
    train_cmd->add_option("--lr", opt.train_cfg.lr);
    train_cmd->add_option("--batch", opt.train_cfg.batch_n);
    train_cmd->add_option("--track-every", opt.train_cfg.track_every);
    train_cmd->add_option("--dim", opt.encoder_dim, "encoder output dimension");
    train_cmd->add_option("--out", opt.trace_out, "trace CSV path");
    train_cmd->add_option("--encoder-out", opt.encoder_out, "checkpoint path");
    train_cmd->callback([&]() { action = [&]() { return cmd_train(opt); }; });
  }

  {
    auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweeps");
    sweep_cmd->fallthrough();
    auto* lam =
        sweep_cmd->add_subcommand("lambda", "train one encoder per lambda");
    lam->fallthrough();
    lam->add_option("--values", opt.sweep_values, "comma-separated lambdas");
    lam->add_option("--world", opt.world_spec)->required();
    lam->add_option("--kernel", opt.kernel_name);
    lam->add_option("--sigma2", opt.sigma2);
    lam->add_option("--steps", opt.train_cfg.steps);
    lam->add_option("--lr", opt.train_cfg.lr);
    lam->add_option("--batch", opt.train_cfg.batch_n);
    lam->add_option("--jobs", opt.jobs, "parallel workers (0 = all cores)");
    lam->add_option("--out", opt.out, "CSV path");
    lam->callback([&]() { action = [&]() { return cmd_sweep_lambda(opt); }; });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!action) {
      std::cerr << "error: no action selected\n";
      return kExitUsage;
    }
    return action();
  } catch (const HypothesisError& e) {
    std::cerr << "check refused: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace kcl
