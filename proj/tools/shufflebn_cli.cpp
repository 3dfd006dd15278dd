#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "shufflebn/shufflebn.hpp"

using json = nlohmann::ordered_json;
using namespace shufflebn;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitBlowUp = 3;

struct Config {
  std::string subcommand;
  std::string dataset = "synthetic";
  Index n = 0;
  Index d = 10;
  Index B = 10;
  Index epochs = 1000;
  double beta = 0.6;
  double lr = 1e-3;
  double lr_scale = 1.0;
  std::string schedule = "manual";
  std::string loss = "sq";
  std::optional<double> eps;
  std::uint64_t seed = 0;
  Index perms = 1000;
  std::string out = "out";
  double momentum = 0.0;
  Index depth = 1;
  double delta = 0.01;
  double gamma = 0.1;
  double noise = 1.0;
  Index seeds = 10;
};

json config_json(const Config& c, const std::vector<std::string>& argv) {
  json j;
  j["subcommand"] = c.subcommand;
  j["argv"] = argv;
  j["version"] = library_version();
  j["dataset"] = c.dataset;
  j["n"] = c.n;
  j["d"] = c.d;
  j["B"] = c.B;
  j["epochs"] = c.epochs;
  j["beta"] = c.beta;
  j["lr"] = c.lr;
  j["lr_scale"] = c.lr_scale;
  j["schedule"] = c.schedule;
  j["loss"] = c.loss;
  j["eps"] = c.eps ? json(*c.eps) : json(nullptr);
  j["seed"] = c.seed;
  j["perms"] = c.perms;
  j["momentum"] = c.momentum;
  j["depth"] = c.depth;
  j["delta"] = c.delta;
  j["gamma"] = c.gamma;
  j["noise"] = c.noise;
  j["seeds"] = c.seeds;
  j["derived_seeds"] = {{"data", split_seed(c.seed, 0)}, {"plan", split_seed(c.seed, 1)}, {"init", split_seed(c.seed, 2)}};
  return j;
}

std::filesystem::path out_dir(const Config& c) {
  std::filesystem::path dir(c.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(Errc::io_error, "cannot create output directory " + c.out + ": " + ec.message());
  return dir;
}

void write_json(const std::filesystem::path& path, const json& j) { write_text_file(path.string(), j.dump(2) + "\n"); }

json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json mat_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
  return rows;
}

json index_json(const std::vector<Index>& v) { return std::vector<long long>(v.begin(), v.end()); }

// Generator name or CSV path.
Dataset load_dataset(const Config& c) {
  const std::string& s = c.dataset;
  if (s == "synthetic") {
    SyntheticOptions o;
    o.n = c.n > 0 ? c.n : 100;
    o.d = c.d;
    o.B = c.B;
    o.noise_std = c.noise;
    return gen_synthetic_regression(o, split_seed(c.seed, 0));
  }
  if (s == "toy-reg") return gen_toy_regression(c.n > 0 ? c.n : 1);
  if (s == "toy-clf") return gen_toy_classification(c.n > 0 ? c.n : 4).data;
  if (s == "crossing") {
    CrossingClustersOptions o;
    if (c.n > 0) o.per_class = c.n;
    return gen_crossing_clusters(o, split_seed(c.seed, 0));
  }
  return read_dataset_csv(s);
}

double eps_or(const Config& c, double fallback) { return c.eps.value_or(fallback); }

StepsizeSchedule make_schedule(const Config& c) {
  ScheduleMode mode = parse_schedule_mode(c.schedule);
  StepsizeSchedule s;
  switch (mode) {
    case ScheduleMode::manual: s = StepsizeSchedule::manual(c.lr, c.beta); break;
    case ScheduleMode::constant: s = StepsizeSchedule::constant(c.lr); break;
    default: s = StepsizeSchedule::theory(mode, c.beta, c.lr_scale); break;
  }
  s.multiplier = c.lr_scale;
  s.validate();
  return s;
}

void require_positive(Index v, const char* field) {
  if (v < 1) fail(Errc::config_error, std::string(field) + " must be >= 1");
}

// Training -------------------------------------------------------------------

json trace_summary(const TrainTrace& t) {
  json j;
  j["epochs_run"] = t.epochs.size();
  j["verdict"] = verdict_name(t.verdict);
  j["initial_L_dist"] = t.initial.L_dist;
  j["initial_L_gd"] = t.initial.L_gd;
  if (!t.epochs.empty()) {
    j["final_L_dist"] = t.epochs.back().L_dist;
    j["final_L_gd"] = t.epochs.back().L_gd;
    j["final_normD"] = t.epochs.back().normD;
  }
  j["max_normM"] = t.max_normM;
  j["schedule"] = {{"mode", schedule_mode_name(t.schedule.mode)},
                   {"c", t.schedule.c},
                   {"beta", t.schedule.beta},
                   {"multiplier", t.schedule.multiplier}};
  if (t.theory)
    j["theory"] = {{"alpha", t.theory->alpha}, {"frobenius_sq", t.theory->frobenius_sq}, {"C_L", t.theory->C_L},
                   {"C_w", t.theory->C_w},     {"c", t.theory->c},                       {"iterations", t.theory->iterations}};
  return j;
}

int run_train(const Config& c, const std::string& which, const std::vector<std::string>& argv) {
  require_positive(c.B, "--B");
  if (c.depth < 1) fail(Errc::config_error, "--depth must be >= 1");
  Dataset ds = load_dataset(c);
  TrainOptions opt;
  opt.epochs = c.epochs;
  opt.loss = parse_loss(c.loss);
  opt.epsilon = eps_or(c, kDefaultTrainingEpsilon);
  opt.momentum = c.momentum;
  opt.seed = c.seed;
  StepsizeSchedule schedule = make_schedule(c);
  BatchPlan plan = BatchPlan::random(ds.n(), c.B, split_seed(c.seed, 1));

  auto dir = out_dir(c);
  write_json(dir / "config.json", config_json(c, argv));
  json summary;
  summary["trainer"] = which;
  TrainTrace trace;
  if (c.depth == 1) {
    ModelParams init = ModelParams::paper_init(ds.p(), ds.d());
    ShallowResult res = which == "ss"   ? train_ss(ds, plan, init, schedule, opt)
                        : which == "rr" ? train_rr(ds, c.B, init, schedule, opt)
                                        : train_gd(ds, init, schedule, opt);
    write_text_file((dir / "checkpoint.json").string(), checkpoint_json(res.params));
    trace = std::move(res.trace);
  } else {
    std::vector<Index> widths(static_cast<std::size_t>(c.depth), ds.d());
    widths.push_back(ds.p());
    DeepLinearParams init = DeepLinearParams::default_init(widths, split_seed(c.seed, 2));
    DeepResult res = which == "ss"   ? train_ss_deep(ds, plan, init, schedule, opt)
                     : which == "rr" ? train_rr_deep(ds, c.B, init, schedule, opt)
                                     : train_gd_deep(ds, init, schedule, opt);
    write_text_file((dir / "checkpoint.json").string(), checkpoint_json(res.params));
    trace = std::move(res.trace);
  }
  write_trace_csv(trace, (dir / "trace.csv").string());
  summary.update(trace_summary(trace));
  write_json(dir / "summary.json", summary);
  std::printf("%s: %zu epochs, verdict %s\n", which.c_str(), trace.epochs.size(), verdict_name(trace.verdict));
  return trace.verdict == Verdict::blow_up ? kExitBlowUp : 0;
}

// Analysis -------------------------------------------------------------------

int run_gen(const Config& c, const std::vector<std::string>& argv) {
  Dataset ds = load_dataset(c);
  auto dir = out_dir(c);
  write_json(dir / "config.json", config_json(c, argv));
  write_dataset_csv(ds, (dir / "dataset.csv").string());
  std::printf("wrote %lld points in d = %lld\n", static_cast<long long>(ds.n()), static_cast<long long>(ds.d()));
  return 0;
}

int run_optima(const Config& c, const std::vector<std::string>& argv) {
  require_positive(c.perms, "--perms");
  Dataset ds = load_dataset(c);
  double eps = eps_or(c, kDefaultAnalysisEpsilon);
  NormalizedDataset gd = normalize_gd(ds, eps);
  Optimum opt_gd = optimum(gd);
  DistortionSummary s = distortion_summary(ds, c.B, c.perms, c.seed);
  auto dir = out_dir(c);
  write_json(dir / "config.json", config_json(c, argv));
  std::ofstream csv(dir / "distortion.csv");
  csv << "perm,distance\n";
  csv.precision(17);
  for (std::size_t i = 0; i < s.distances.size(); ++i) csv << i << ',' << s.distances[i] << '\n';
  json j;
  j["M_gd"] = mat_json(opt_gd.M);
  j["gd_rank_deficient"] = opt_gd.rank_deficient;
  j["mean_distance"] = s.mean;
  j["median_distance"] = s.median;
  j["rr_distance"] = s.rr_distance;
  j["rr_perms"] = s.rr_perms;
  write_json(dir / "summary.json", j);
  std::printf("mean %.6g median %.6g rr %.6g\n", s.mean, s.median, s.rr_distance);
  return 0;
}

json decomposition_to_json(const SeparabilityDecomposition& dec) { return json::parse(decomposition_json(dec)); }

int run_separability(const Config& c, const std::vector<std::string>& argv) {
  Dataset ds = load_dataset(c);
  if (ds.kind != TargetKind::classification) fail(Errc::config_error, "separability needs a +-1 labelled dataset");
  double eps = eps_or(c, kToyClassificationEpsilon);
  NormalizedDataset gd = normalize_gd(ds, eps);
  NormalizedDataset ss = normalize_ss(ds, BatchPlan::random(ds.n(), c.B, split_seed(c.seed, 1)), eps);
  auto dec_gd = decompose(gd.Xbar, gd.labels());
  auto dec_ss = decompose(ss.Xbar, ss.labels());
  auto dir_ss = optimal_direction(dec_ss, ss.Xbar, ss.labels());
  Prediction pred = divergence_predicate(dir_ss, dec_ss.kind, gd.Xbar, gd.labels());
  RobustnessReport rob = gamma_robustness_report(ds, c.gamma);

  auto dir = out_dir(c);
  write_json(dir / "config.json", config_json(c, argv));
  json j;
  j["gd"] = decomposition_to_json(dec_gd);
  j["ss"] = decomposition_to_json(dec_ss);
  j["ss_perm"] = index_json(ss.perms.front());
  j["optimal_direction"] = {{"exists", dir_ss.exists}, {"v", vec_json(dir_ss.v)}, {"v_sc", vec_json(dir_ss.v_sc)}};
  j["prediction"] = pred == Prediction::diverges ? "diverges" : "safe";
  j["robustness"] = json::parse(robustness_json(rob));
  write_json(dir / "separability.json", j);
  std::printf("GD %s, SS %s, prediction %s\n", sep_kind_name(dec_gd.kind), sep_kind_name(dec_ss.kind),
              pred == Prediction::diverges ? "diverges" : "safe");
  return 0;
}

json rank_json(const RankReport& r) {
  return {{"rank", r.rank}, {"predicted", r.predicted}, {"below_predicted", r.below_predicted}};
}

int run_rank(const Config& c, const std::vector<std::string>& argv) {
  require_positive(c.perms, "--perms");
  Dataset ds = load_dataset(c);
  double eps = eps_or(c, kDefaultAnalysisEpsilon);
  json j;
  j["ss"] = rank_json(rank_report(normalize_ss(ds, BatchPlan::random(ds.n(), c.B, split_seed(c.seed, 1)), eps)));
  j["gd"] = rank_json(rank_report(normalize_gd(ds, eps)));
  j["rr_sampled"] = rank_json(rank_report(normalize_rr_sampled(ds, c.B, c.perms, split_seed(c.seed, 3), eps)));
  try {
    j["rr_full"] = rank_json(rank_report(normalize_rr_full(ds, c.B, eps)));
  } catch (const Error& e) {
    if (e.code() != Errc::combinatorial_blowup) throw;
    j["rr_full"] = nullptr;
  }
  auto dir = out_dir(c);
  write_json(dir / "config.json", config_json(c, argv));
  write_json(dir / "rank.json", j);
  std::printf("SS rank %lld (predicted %lld)\n", static_cast<long long>(j["ss"]["rank"].get<Index>()),
              static_cast<long long>(j["ss"]["predicted"].get<Index>()));
  return 0;
}

int run_mono(const Config& c, const std::vector<std::string>& argv) {
  Index per_class = c.n > 0 ? c.n : 256;
  RowVector labels(2 * per_class);
  labels.head(per_class).setConstant(1.0);
  labels.tail(per_class).setConstant(-1.0);
  MonochromaticStats s = monochromatic_stats(labels, c.B, c.perms, c.seed, c.delta);
  auto dir = out_dir(c);
  write_json(dir / "config.json", config_json(c, argv));
  std::ofstream csv(dir / "mono_counts.csv");
  csv << "perm,T\n";
  for (std::size_t i = 0; i < s.counts.size(); ++i) csv << i << ',' << s.counts[i] << '\n';
  json j;
  j["per_class"] = per_class;
  j["empirical_mean"] = s.empirical_mean;
  j["expectation"] = s.expectation ? json(*s.expectation) : json(nullptr);
  j["azuma_halfwidth"] = s.azuma_halfwidth;
  j["zero_fraction"] = static_cast<double>(std::count(s.counts.begin(), s.counts.end(), 0)) /
                       static_cast<double>(s.counts.size());
  write_json(dir / "mono.json", j);
  std::printf("mean T %.6g, expectation %s\n", s.empirical_mean,
              s.expectation ? std::to_string(*s.expectation).c_str() : "n/a");
  return 0;
}

int run_concentration(const Config& c, const std::vector<std::string>& argv) {
  std::vector<double> values;
  if (c.dataset == "grid" || c.dataset == "synthetic") {
    Index size = c.n > 0 ? c.n : 512;
    for (Index i = 0; i < size; ++i) values.push_back(static_cast<double>(i) / static_cast<double>(std::max<Index>(size - 1, 1)));
  } else {
    Dataset ds = read_dataset_csv(c.dataset);
    for (Index i = 0; i < ds.n(); ++i) values.push_back(ds.X(0, i));
  }
  ConcentrationRates r = concentration_check(values, c.B, c.perms, c.delta, c.seed);
  auto dir = out_dir(c);
  write_json(dir / "config.json", config_json(c, argv));
  json j{{"mean_violation_rate", r.mean}, {"var_lower_violation_rate", r.var_lower},
         {"var_upper_violation_rate", r.var_upper}, {"mu", r.mu}, {"sigma", r.sigma}, {"a", r.a}, {"b", r.b},
         {"delta", c.delta}};
  write_json(dir / "concentration.json", j);
  std::printf("violation rates mean %.4g var_lower %.4g var_upper %.4g (delta %.3g)\n", r.mean, r.var_lower,
              r.var_upper, c.delta);
  return 0;
}

int run_mc_toy_reg(const Config& c, const std::vector<std::string>& argv) {
  Index n = c.n > 0 ? c.n : 50;
  ToyRegressionMC mc = mc_toy_regression(n, c.perms, c.seed);
  auto dir = out_dir(c);
  write_json(dir / "config.json", config_json(c, argv));
  std::ofstream csv(dir / "optima.csv");
  csv << "perm,k,M\n";
  csv.precision(17);
  for (std::size_t i = 0; i < mc.optima.size(); ++i) csv << i << ',' << mc.k_counts[i] << ',' << mc.optima[i] << '\n';
  json j{{"n", n},
         {"perms", c.perms},
         {"frac_nonzero", mc.frac_nonzero},
         {"median_abs", mc.median_abs},
         {"rr_estimate", mc.rr_estimate}};
  write_json(dir / "summary.json", j);
  std::printf("frac nonzero %.4f, median |M| %.4g, RR %.4g\n", mc.frac_nonzero, mc.median_abs, mc.rr_estimate);
  return 0;
}

int run_mc_toy_clf(const Config& c, const std::vector<std::string>& argv) {
  Index n = c.n > 0 ? c.n : 4;
  ToyClassificationMC mc = mc_toy_classification(n, c.perms, c.seed, eps_or(c, kToyClassificationEpsilon));
  const double p = 1.0 / 9.0;
  double bound = p - 3.0 * std::sqrt(p * (1 - p) / static_cast<double>(c.perms));
  auto dir = out_dir(c);
  write_json(dir / "config.json", config_json(c, argv));
  std::ofstream csv(dir / "permutations.csv");
  csv << "perm,good,divergent\n";
  for (std::size_t i = 0; i < mc.good.size(); ++i) csv << i << ',' << int(mc.good[i]) << ',' << int(mc.divergent[i]) << '\n';
  json j{{"n", n},
         {"perms", c.perms},
         {"frac_pls_good", mc.frac_pls_good},
         {"lower_bound", bound},
         {"frac_divergent", mc.frac_divergent},
         {"rr_kind", sep_kind_name(mc.rr_kind)},
         {"rr_rank", mc.rr_rank},
         {"rr_full", mc.rr_full}};
  write_json(dir / "summary.json", j);
  std::printf("frac good %.4f (bound %.4f), RR %s rank %lld\n", mc.frac_pls_good, bound, sep_kind_name(mc.rr_kind),
              static_cast<long long>(mc.rr_rank));
  return 0;
}

// Two-layer feature experiment ----------------------------------------------

struct Fig4Row {
  std::uint64_t seed = 0;
  SepKind ss_start = SepKind::SC, ss_end = SepKind::SC, gd_start = SepKind::SC, gd_end = SepKind::SC;
  double loss_start = 0.0, loss_end = 0.0;
  Matrix features_start, features_end;
  RowVector labels;
};

Fig4Row fig4_seed(const Config& c, std::uint64_t seed) {
  CrossingClustersOptions o;
  if (c.n > 0) o.per_class = c.n;
  Dataset ds = gen_crossing_clusters(o, split_seed(seed, 0));
  BatchPlan plan = canonical_plan(BatchPlan::random(ds.n(), c.B, split_seed(seed, 1)));
  DeepLinearParams init = DeepLinearParams::default_init({2, 2, 1}, split_seed(seed, 2));
  TrainOptions opt;
  opt.epochs = c.epochs;
  opt.loss = Loss::logistic;
  opt.epsilon = eps_or(c, kDefaultTrainingEpsilon);
  Dataset shuffled = ds.select(plan.perm);
  auto batches = uniform_batches(ds.n(), c.B);
  Fig4Row row;
  row.seed = seed;
  row.labels = shuffled.labels();
  auto kinds = [&](const DeepLinearParams& p, SepKind& ss, SepKind& gd, Matrix& feats) {
    feats = deep_features(p, shuffled.X, batches, opt.epsilon);
    ss = decompose(feats, shuffled.labels()).kind;
    gd = decompose(deep_features(p, ds.X, single_batch(ds.n()), opt.epsilon), ds.labels()).kind;
  };
  kinds(init, row.ss_start, row.gd_start, row.features_start);
  row.loss_start = deep_loss(Loss::logistic, init, shuffled.X, shuffled.Y, batches, opt.epsilon);
  DeepResult res = train_ss_deep(ds, plan, init, StepsizeSchedule::constant(c.lr), opt);
  kinds(res.params, row.ss_end, row.gd_end, row.features_end);
  row.loss_end = deep_loss(Loss::logistic, res.params, shuffled.X, shuffled.Y, batches, opt.epsilon);
  return row;
}

int run_fig4(const Config& c, const std::vector<std::string>& argv) {
  require_positive(c.seeds, "--seeds");
  std::vector<Fig4Row> rows(static_cast<std::size_t>(c.seeds));
  parallel_for(rows.size(), [&](std::size_t i) { rows[i] = fig4_seed(c, c.seed + i); });
  auto dir = out_dir(c);
  write_json(dir / "config.json", config_json(c, argv));
  std::ofstream csv(dir / "fig4.csv");
  csv << "seed,ss_start,ss_end,gd_start,gd_end,loss_start,loss_end\n";
  csv.precision(17);
  std::ofstream feats(dir / "fig4_features.csv");
  feats << "seed,stage,batch,label,f1,f2\n";
  feats.precision(17);
  int transitions = 0;
  for (const auto& r : rows) {
    csv << r.seed << ',' << sep_kind_name(r.ss_start) << ',' << sep_kind_name(r.ss_end) << ','
        << sep_kind_name(r.gd_start) << ',' << sep_kind_name(r.gd_end) << ',' << r.loss_start << ',' << r.loss_end
        << '\n';
    for (const auto& [stage, F] : {std::pair{"start", &r.features_start}, std::pair{"end", &r.features_end}})
      for (Index j = 0; j < F->cols(); ++j)
        feats << r.seed << ',' << stage << ',' << j / c.B << ',' << r.labels(j) << ',' << (*F)(0, j) << ','
              << (*F)(1, j) << '\n';
    transitions += r.ss_start == SepKind::SC && r.ss_end != SepKind::SC && r.gd_start == SepKind::SC &&
                   r.gd_end == SepKind::SC;
  }
  json j{{"seeds", c.seeds}, {"first_seed", c.seed}, {"transitions", transitions}};
  write_json(dir / "summary.json", j);
  std::printf("SS SC -> LS/PLS with GD SC throughout in %d/%lld seeds\n", transitions,
              static_cast<long long>(c.seeds));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shuffling and batch normalization experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", library_version());
  Config c;
  std::vector<std::string> args(argv + 1, argv + argc);

  auto data_opts = [&](CLI::App* s) {
    s->add_option("--dataset", c.dataset, "CSV path or generator: synthetic, toy-reg, toy-clf, crossing");
    s->add_option("--n", c.n, "generator size parameter");
    s->add_option("--d", c.d, "synthetic feature dimension");
    s->add_option("--noise", c.noise, "synthetic target noise");
    s->add_option("--seed", c.seed, "root seed");
    s->add_option("--out", c.out, "output directory");
  };
  auto train_opts = [&](CLI::App* s) {
    data_opts(s);
    s->add_option("--B", c.B, "batch size");
    s->add_option("--epochs", c.epochs);
    s->add_option("--beta", c.beta, "stepsize decay exponent");
    s->add_option("--lr", c.lr, "stepsize constant c");
    s->add_option("--lr-scale", c.lr_scale, "multiplier on the stepsize constant");
    s->add_option("--schedule", c.schedule)->check(CLI::IsMember({"manual", "constant", "ss-theory", "rr-theory"}));
    s->add_option("--loss", c.loss)->check(CLI::IsMember({"sq", "squared", "logistic"}));
    s->add_option("--eps", c.eps, "BN epsilon");
    s->add_option("--momentum", c.momentum);
    s->add_option("--depth", c.depth, "1 for the shallow model");
  };

  auto* gen = app.add_subcommand("gen", "write a generated dataset as CSV");
  data_opts(gen);
  gen->add_option("--B", c.B);
  std::vector<std::pair<CLI::App*, std::string>> trainers;
  for (const char* which : {"ss", "rr", "gd"}) {
    auto* s = app.add_subcommand(std::string("train-") + which, std::string("train with ") + which);
    train_opts(s);
    trainers.emplace_back(s, which);
  }
  auto* optima_cmd = app.add_subcommand("optima", "SS optimum distortion against GD");
  data_opts(optima_cmd);
  optima_cmd->add_option("--B", c.B);
  optima_cmd->add_option("--perms", c.perms);
  optima_cmd->add_option("--eps", c.eps);
  auto* sep = app.add_subcommand("separability", "decompositions, optimal direction, robustness");
  data_opts(sep);
  sep->add_option("--B", c.B);
  sep->add_option("--eps", c.eps);
  sep->add_option("--gamma", c.gamma, "robustness radius");
  auto* rank = app.add_subcommand("rank", "rank of normalized datasets");
  data_opts(rank);
  rank->add_option("--B", c.B);
  rank->add_option("--perms", c.perms);
  rank->add_option("--eps", c.eps);
  auto* mono = app.add_subcommand("mono", "monochromatic batch counts for two balanced classes");
  mono->add_option("--n", c.n, "points per class");
  mono->add_option("--B", c.B);
  mono->add_option("--perms", c.perms);
  mono->add_option("--delta", c.delta);
  mono->add_option("--seed", c.seed);
  mono->add_option("--out", c.out);
  auto* conc = app.add_subcommand("concentration", "batch mean and variance concentration");
  conc->add_option("--dataset", c.dataset, "grid or a CSV path (first feature column)");
  conc->add_option("--n", c.n, "grid size");
  conc->add_option("--B", c.B);
  conc->add_option("--perms", c.perms, "number of sampled batches");
  conc->add_option("--delta", c.delta);
  conc->add_option("--seed", c.seed);
  conc->add_option("--out", c.out);
  auto* mc = app.add_subcommand("mc", "Monte Carlo over permutations");
  mc->require_subcommand(1);
  auto* mc_reg = mc->add_subcommand("toy-reg", "toy regression optima");
  auto* mc_clf = mc->add_subcommand("toy-clf", "toy classification separability");
  for (auto* s : {mc_reg, mc_clf}) {
    s->add_option("--n", c.n);
    s->add_option("--perms", c.perms);
    s->add_option("--seed", c.seed);
    s->add_option("--out", c.out);
  }
  mc_clf->add_option("--eps", c.eps);
  auto* fig4 = app.add_subcommand("fig4", "two-layer feature separability under SS");
  fig4->add_option("--n", c.n, "points per class");
  fig4->add_option("--B", c.B);
  fig4->add_option("--epochs", c.epochs);
  fig4->add_option("--lr", c.lr);
  fig4->add_option("--eps", c.eps);
  fig4->add_option("--seed", c.seed, "first seed");
  fig4->add_option("--seeds", c.seeds, "number of seeds");
  fig4->add_option("--out", c.out);
  fig4->preparse_callback([&](std::size_t) {
    c.B = 16;
    c.epochs = 10000;
    c.lr = 1e-2;
    c.seed = 1;
  });
  mono->preparse_callback([&](std::size_t) {
    c.B = 2;
    c.perms = 10000;
  });
  conc->preparse_callback([&](std::size_t) {
    c.dataset = "grid";
    c.B = 8;
    c.perms = 10000;
    c.delta = 0.05;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    for (auto& [s, which] : trainers)
      if (s->parsed()) {
        c.subcommand = s->get_name();
        return run_train(c, which, args);
      }
    struct Route {
      CLI::App* cmd;
      int (*fn)(const Config&, const std::vector<std::string>&);
    };
    for (const Route& r : {Route{gen, run_gen}, Route{optima_cmd, run_optima}, Route{sep, run_separability},
                           Route{rank, run_rank}, Route{mono, run_mono}, Route{conc, run_concentration},
                           Route{mc_reg, run_mc_toy_reg}, Route{mc_clf, run_mc_toy_clf}, Route{fig4, run_fig4}})
      if (r.cmd->parsed()) {
        c.subcommand = r.cmd == mc_reg ? "mc toy-reg" : r.cmd == mc_clf ? "mc toy-clf" : r.cmd->get_name();
        return r.fn(c, args);
      }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::config_error || e.code() == Errc::io_error ? kExitConfig : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitConfig;
}
