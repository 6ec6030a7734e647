// hullfit: train and evaluate convex ensembles of small bounded networks,
// compare the greedy trainer variants, and run the capacity experiments.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hullfit/capacity.hpp"
#include "hullfit/dataset.hpp"
#include "hullfit/greedy.hpp"
#include "hullfit/kernels.hpp"
#include "hullfit/metrics.hpp"
#include "hullfit/model_io.hpp"
#include "hullfit/ngce.hpp"
#include "hullfit/synth.hpp"
#include "json.hpp"

namespace {

using namespace hullfit;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Flat key=value config files
// ---------------------------------------------------------------------------

std::string trim_ws(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Reads "key = value" lines ('#' comments allowed), validates every key
// against the subcommand's options, and returns them as --key=value tokens.
std::vector<std::string> config_tokens(const CLI::App* cmd,
                                       const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::vector<std::string> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim_ws(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ConfigError(path + ":" + std::to_string(line_no) +
                             ": expected key=value");
    const std::string key = trim_ws(line.substr(0, eq));
    const std::string value = trim_ws(line.substr(eq + 1));
    if (key == "config" || cmd->get_option_no_throw("--" + key) == nullptr)
      throw CLI::ConfigError("unknown config key '" + key + "' in " + path);
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

// Splices config-file values right after the subcommand name so explicit
// command-line flags, which come later, take precedence (TakeLast policy).
std::vector<std::string> expand_config(const CLI::App& app,
                                       std::vector<std::string> args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    const CLI::App* cmd = app.get_subcommand_no_throw(args[i]);
    if (cmd == nullptr || cmd->get_option_no_throw("--config") == nullptr)
      continue;
    std::string path;
    for (std::size_t j = i + 1; j < args.size(); ++j) {
      if (args[j] == "--config" && j + 1 < args.size())
        path = args[j + 1];
      else if (args[j].rfind("--config=", 0) == 0)
        path = args[j].substr(9);
    }
    if (!path.empty()) {
      const std::vector<std::string> extra = config_tokens(cmd, path);
      args.insert(args.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                  extra.begin(), extra.end());
    }
    break;
  }
  return args;
}

// ---------------------------------------------------------------------------
// Shared option bundles
// ---------------------------------------------------------------------------

struct DataOpts {
  std::string data;
  std::string target;
  std::string task = "reg";
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  double val_fraction = 0.2;

  void attach(CLI::App* cmd) {
    cmd->add_option("--data", data, "CSV dataset path")->required();
    cmd->add_option("--target", target, "target column (name or index)")
        ->required();
    cmd->add_option("--task", task, "task kind: reg or cls")
        ->check(CLI::IsMember({"reg", "cls"}));
    cmd->add_option("--seed", seed, "seed for the split and the trainers");
    cmd->add_option("--test-fraction", test_fraction,
                    "fraction carved out for the test split");
    cmd->add_option("--val-fraction", val_fraction,
                    "fraction of the remainder carved out for validation");
  }
};

struct OptimOpts {
  double lr = 1e-3;
  std::size_t batch_size = 128;
  std::size_t patience = 10;
  double lr_factor = 0.1;
  double min_lr = 1e-5;
  std::size_t tail_epochs = 10;
  std::size_t epochs = 400;

  void attach(CLI::App* cmd) {
    cmd->add_option("--lr", lr, "Adam learning rate");
    cmd->add_option("--batch-size,--batch_size", batch_size,
                    "mini-batch size (full batch when n is smaller)");
    cmd->add_option("--patience", patience,
                    "epochs without improvement before an lr cut");
    cmd->add_option("--lr-factor,--lr_factor", lr_factor,
                    "lr multiplier on plateau");
    cmd->add_option("--min-lr,--min_lr", min_lr,
                    "lr floor; reaching it starts the tail");
    cmd->add_option("--tail-epochs,--tail_epochs", tail_epochs,
                    "extra epochs after the lr floor is reached");
    cmd->add_option("--epochs", epochs, "epoch cap per subproblem");
  }

  AdamConfig adam() const {
    AdamConfig a;
    a.lr = lr;
    a.batch_size = batch_size;
    return a;
  }
  PlateauSchedule schedule() const {
    PlateauSchedule s;
    s.patience = patience;
    s.factor = lr_factor;
    s.min_lr = min_lr;
    s.tail_epochs = tail_epochs;
    s.max_epochs = epochs;
    return s;
  }
};

struct PreparedData {
  Dataset train, val, test;  // features normalized with train statistics
  NormStats stats;
  double bound;  // resolved B
};

PreparedData prepare(const DataOpts& opts, double bound_flag) {
  const Task task = parse_task(opts.task);
  const Dataset raw = load_csv(opts.data, opts.target, task);
  const Split parts =
      split(raw, SplitSpec{opts.seed, opts.test_fraction, opts.val_fraction});
  auto [train_norm, stats] = normalize(parts.train);
  PreparedData out;
  out.train = std::move(train_norm);
  out.stats = std::move(stats);
  out.val = apply_normalization(parts.val, out.stats);
  out.test = apply_normalization(parts.test, out.stats);
  if (bound_flag > 0.0) {
    out.bound = bound_flag;
  } else if (task == Task::classification) {
    out.bound = 10.0;
  } else {
    double max_abs = 0.0;
    for (double y : out.train.targets) max_abs = std::max(max_abs, std::abs(y));
    out.bound = max_abs > 0.0 ? (4.0 / 3.0) * max_abs : 1.0;
  }
  return out;
}

void write_history_csv(const TrainHistory& history, const std::string& path,
                       bool wall_timing) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write history file: " + path);
  out << "iter,train_loss,val_loss,alpha,step_type,n_atoms,seconds\n";
  for (const auto& r : history.records)
    out << r.iter << "," << fmt(r.train_loss) << "," << fmt(r.val_loss) << ","
        << fmt(r.alpha) << "," << r.step_type << "," << r.n_atoms << ","
        << fmt(wall_timing ? r.seconds : 0.0) << "\n";
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainOpts {
  DataOpts data;
  OptimOpts optim;
  std::string variant = "pfw";
  std::string loss;  // default depends on the task
  std::size_t hidden = 10;
  std::size_t max_modules = 100;
  std::size_t k = 10;
  double l2 = 0.0;
  double bound = 0.0;  // 0: resolve from task
  std::size_t early_stop_window = 5;
  double early_stop_tol = 1e-5;
  std::string line_search = "auto";
  std::string out = "model.json";
  std::string history = "history.csv";
  std::string timing = "none";
};

int cmd_train(const TrainOpts& o) {
  const Task task = parse_task(o.data.task);
  const PreparedData d = prepare(o.data, o.bound);
  const std::string loss_key =
      o.loss.empty() ? (task == Task::regression ? "mse" : "xent") : o.loss;
  const LossSpec loss = parse_loss(loss_key, d.bound);

  ModelFile model;
  model.task = task;
  model.loss = loss_key;
  model.norm_stats = d.stats;

  TrainHistory history;
  const auto t0 = std::chrono::steady_clock::now();
  if (o.variant == "ngce") {
    NgceConfig cfg;
    cfg.k = o.k;
    cfg.shape = ModuleShape{0, o.hidden, 0, d.bound};
    cfg.loss = loss;
    cfg.adam = o.optim.adam();
    cfg.schedule = o.optim.schedule();
    cfg.l2 = o.l2;
    cfg.seed = o.data.seed;
    const NgceResult res = train_ngce(cfg, d.train);
    model.ensemble = res.ensemble;
    for (std::size_t e = 0; e < res.trace.size(); ++e) {
      StepRecord rec;
      rec.iter = e;
      rec.train_loss = res.trace[e].value;
      rec.val_loss = std::numeric_limits<double>::quiet_NaN();
      rec.step_type = "epoch";
      rec.n_atoms = o.k;
      history.records.push_back(rec);
    }
  } else {
    GreedyConfig cfg;
    cfg.variant = parse_variant(o.variant);
    cfg.max_modules = o.max_modules;
    cfg.early_stop_window = o.early_stop_window;
    cfg.early_stop_tol = o.early_stop_tol;
    cfg.shape = ModuleShape{0, o.hidden, 0, d.bound};
    cfg.loss = loss;
    cfg.adam = o.optim.adam();
    cfg.schedule = o.optim.schedule();
    cfg.seed = o.data.seed;
    if (o.line_search == "closed-form")
      cfg.line_search = LineSearchKind::closed_form;
    else if (o.line_search == "brent")
      cfg.line_search = LineSearchKind::brent;
    else if (o.line_search == "fixed")
      cfg.line_search = LineSearchKind::fixed_schedule;
    const TrainResult res = train(cfg, d.train, d.val);
    model.ensemble = res.ensemble;
    history = res.history;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  save_model(model, o.out);
  if (!o.history.empty())
    write_history_csv(history, o.history, o.timing == "wall");

  MetricsReport report;
  report.task = task;
  report.train = evaluate_split(model, d.train);
  report.val = evaluate_split(model, d.val);
  report.test = evaluate_split(model, d.test);
  report.atom_count = model.ensemble.size();
  report.param_count = model.ensemble.param_count();
  std::cout << report.to_table();
  std::cerr << "trained in " << wall << " s; model written to " << o.out
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

int cmd_evaluate(const DataOpts& data_opts, const std::string& model_path,
                 bool as_json) {
  const ModelFile model = load_model(model_path);
  if (parse_task(data_opts.task) != model.task)
    throw std::runtime_error("--task does not match the model file");
  const Dataset raw = load_csv(data_opts.data, data_opts.target, model.task);
  const MetricsReport report = evaluate_model(
      model, raw,
      SplitSpec{data_opts.seed, data_opts.test_fraction,
                data_opts.val_fraction});
  std::cout << (as_json ? report.to_json() : report.to_table());
  return 0;
}

// ---------------------------------------------------------------------------
// compare-variants
// ---------------------------------------------------------------------------

struct CompareOpts {
  DataOpts data;
  OptimOpts optim;
  std::size_t hidden = 1;
  std::size_t max_modules = 50;
  double bound = 0.0;
  std::string out = "compare.csv";
};

int cmd_compare(const CompareOpts& o) {
  if (parse_task(o.data.task) != Task::regression)
    throw std::runtime_error("compare-variants expects a regression task");
  const PreparedData d = prepare(o.data, o.bound);
  const LossSpec loss = LossSpec::quadratic(d.bound);

  std::ofstream out(o.out, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write: " + o.out);
  out << "variant,iter,train_mse,test_mse\n";
  for (const GreedyVariant variant :
       {GreedyVariant::nonlinear, GreedyVariant::fw, GreedyVariant::afw,
        GreedyVariant::pfw}) {
    GreedyConfig cfg;
    cfg.variant = variant;
    cfg.max_modules = o.max_modules;
    cfg.early_stop_window = o.max_modules + 1;  // learning curves: no stop
    cfg.shape = ModuleShape{0, o.hidden, 0, d.bound};
    cfg.loss = loss;
    cfg.adam = o.optim.adam();
    cfg.schedule = o.optim.schedule();
    cfg.seed = o.data.seed;
    const TrainResult res = train(cfg, d.train, d.val, &d.test);
    for (const auto& rec : res.history.records)
      out << variant_name(variant) << "," << rec.iter << ","
          << fmt(rec.train_loss) << "," << fmt(rec.probe_loss) << "\n";
    std::cerr << variant_name(variant) << ": done ("
              << res.history.records.size() << " iterations)\n";
  }
  std::cout << "learning curves written to " << o.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// capacity
// ---------------------------------------------------------------------------

int cmd_capacity_shatter(std::size_t k, bool as_json) {
  using namespace hullfit::capacity;
  if (k > 20)
    throw std::runtime_error("shatter: exhaustive check is capped at k = 20");
  std::size_t linear_ok = 0, convex_ok = 0;
  const std::size_t total = std::size_t{1} << k;
  for (std::size_t mask = 0; mask < total; ++mask) {
    std::vector<int> labels(k);
    for (std::size_t i = 0; i < k; ++i) labels[i] = (mask >> i) & 1u;
    if (verify_shatter(shatter_linear(k, labels), k, labels)) ++linear_ok;
    if (verify_shatter(shatter_convex(k, labels), k, labels)) ++convex_ok;
  }
  if (as_json) {
    nlohmann::json j;
    j["k"] = k;
    j["labelings"] = total;
    j["linear_verified"] = linear_ok;
    j["convex_verified"] = convex_ok;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "k = " << k << ": " << total << " labelings\n"
              << "  linear combination of " << k
              << " threshold units: " << linear_ok << "/" << total
              << " verified\n"
              << "  convex combination of " << (k + 1)
              << " units: " << convex_ok << "/" << total << " verified\n";
  }
  return (linear_ok == total && convex_ok == total) ? 0 : 1;
}

struct RademacherOpts {
  std::string cls = "lin";
  double scale = 1.0;
  std::size_t n = 64;
  std::size_t fns = 64;
  std::size_t units = 8;
  std::size_t dim = 2;
  std::size_t draws = 256;
  std::uint64_t seed = 0;
};

int cmd_capacity_rademacher(const RademacherOpts& o, bool as_json) {
  using namespace hullfit::capacity;
  auto estimate = [&](const std::string& cls, double scale) {
    const Matrix values =
        cls == "lin"
            ? sample_lin_class(o.fns, o.n, o.dim, o.units, scale, o.seed)
            : sample_conv_class(o.fns, o.n, o.dim, o.units, scale, o.seed);
    return empirical_rademacher(values, o.draws, o.seed + 1);
  };
  const double requested = estimate(o.cls, o.scale);

  // Growth demo: scaled lin samples next to conv samples, shared seed.
  const double lin1 = estimate("lin", 1.0);
  const double lin10 = estimate("lin", 10.0);
  const double lin100 = estimate("lin", 100.0);
  const double conv = estimate("conv", 1.0);

  if (as_json) {
    nlohmann::json j;
    j["class"] = o.cls;
    j["scale"] = o.scale;
    j["estimate"] = requested;
    j["lin_scale_1"] = lin1;
    j["lin_scale_10"] = lin10;
    j["lin_scale_100"] = lin100;
    j["conv"] = conv;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "estimate(" << o.cls << ", scale=" << o.scale
              << ") = " << requested << "\n\n"
              << "scaling comparison (same seed, n=" << o.n
              << ", draws=" << o.draws << "):\n"
              << "  lin  x1    " << lin1 << "\n"
              << "  lin  x10   " << lin10 << "\n"
              << "  lin  x100  " << lin100 << "\n"
              << "  conv       " << conv << "\n";
  }
  return 0;
}

int cmd_capacity_bound(double cphi, double B, double delta, double p,
                       std::size_t n, double D, bool as_json) {
  const double value = capacity::bound_constant(cphi, B, delta, p, n, D);
  if (as_json) {
    nlohmann::json j;
    j["c_phi"] = cphi;
    j["B"] = B;
    j["delta"] = delta;
    j["p"] = p;
    j["n"] = n;
    j["D"] = D;
    j["bound"] = value;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "excess-risk bound c/sqrt(n) = " << value << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// synth + bench
// ---------------------------------------------------------------------------

struct SynthOpts {
  std::string kind = "conv-reg";
  std::size_t n = 1000;
  std::size_t dim = 10;
  std::size_t atoms = 5;
  std::size_t hidden = 4;
  std::size_t k = 12;
  double bound = 10.0;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string out = "synth.csv";
};

int cmd_synth(const SynthOpts& o) {
  if (o.kind == "conv-reg") {
    const SynthData sd = synth_conv_regression(
        SynthSpec{o.n, o.dim, o.atoms, o.hidden, o.bound, o.noise, o.seed});
    write_csv(sd.data, o.out);
    std::cout << "wrote " << sd.data.size() << " rows (" << sd.data.dim()
              << " features) to " << o.out << "\n";
  } else {
    const Dataset d = synth_circle_labels(o.k, o.seed);
    write_csv(d, o.out);
    std::cout << "wrote " << d.size() << " circle points to " << o.out << "\n";
  }
  return 0;
}

int cmd_bench(std::size_t n, std::size_t reps) {
  using clock = std::chrono::steady_clock;
  Rng rng(1);
  std::vector<double> a(n), b(n), c(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rng.uniform(-1.0, 1.0);
    b[i] = rng.uniform(-1.0, 1.0);
  }
  auto time_op = [&](auto&& op) {
    const auto t0 = clock::now();
    for (std::size_t r = 0; r < reps; ++r) op();
    return std::chrono::duration<double>(clock::now() - t0).count() /
           static_cast<double>(reps);
  };
  std::cout << "n = " << n << ", reps = " << reps << "\n";
  std::cout << "op       backend   ns/elem\n";
  volatile double sink = 0.0;
  for (const kern::Backend backend :
       {kern::Backend::scalar, kern::Backend::avx2}) {
    if (!kern::backend_available(backend)) continue;
    kern::set_backend(backend);
    const char* name = backend == kern::Backend::scalar ? "scalar" : "avx2";
    const double t_dot =
        time_op([&] { sink = kern::dot(a.data(), b.data(), n); });
    const double t_axpy =
        time_op([&] { kern::axpy(1.0009, a.data(), c.data(), n); });
    const double t_clamp =
        time_op([&] { kern::clamp(a.data(), 0.5, c.data(), n); });
    std::printf("dot      %-8s %8.3f\n", name, 1e9 * t_dot / n);
    std::printf("axpy     %-8s %8.3f\n", name, 1e9 * t_axpy / n);
    std::printf("clamp    %-8s %8.3f\n", name, 1e9 * t_clamp / n);
  }
  (void)sink;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convex ensembles of bounded basis networks"};
  app.require_subcommand(1);

  // train
  TrainOpts train_opts;
  CLI::App* train_cmd =
      app.add_subcommand("train", "fit a model and write model.json");
  train_cmd->option_defaults()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);
  train_opts.data.attach(train_cmd);
  train_opts.optim.attach(train_cmd);
  train_cmd->add_option("--variant", train_opts.variant,
                        "nonlinear | fw | afw | pfw | ngce")
      ->check(CLI::IsMember({"nonlinear", "fw", "afw", "pfw", "ngce"}));
  train_cmd->add_option("--loss", train_opts.loss,
                        "mse | lq:<q> | logistic | xent (default by task)");
  train_cmd->add_option("--hidden", train_opts.hidden,
                        "hidden neurons per basis module");
  train_cmd->add_option("--max-modules", train_opts.max_modules,
                        "module cap T for the greedy variants");
  train_cmd->add_option("--k", train_opts.k, "module count for ngce");
  train_cmd->add_option("--l2", train_opts.l2,
                        "l2 penalty on module parameters (ngce)");
  train_cmd->add_option("--bound", train_opts.bound,
                        "output bound B (default: 10 cls, 4/3 max|y| reg)");
  train_cmd->add_option("--early-stop-window", train_opts.early_stop_window,
                        "iterations without validation improvement");
  train_cmd->add_option("--early-stop-tol", train_opts.early_stop_tol,
                        "relative validation improvement threshold");
  train_cmd->add_option("--line-search", train_opts.line_search,
                        "auto | closed-form | brent | fixed")
      ->check(CLI::IsMember({"auto", "closed-form", "brent", "fixed"}));
  train_cmd->add_option("--out", train_opts.out, "model output path");
  train_cmd->add_option("--history", train_opts.history,
                        "per-iteration history CSV path");
  train_cmd->add_option("--timing", train_opts.timing,
                        "seconds column: none (reproducible) or wall")
      ->check(CLI::IsMember({"none", "wall"}));
  std::string train_config;
  train_cmd->add_option("--config", train_config,
                        "flat key=value file mirroring the flag names");

  // evaluate
  DataOpts eval_data;
  std::string eval_model;
  bool eval_json = false;
  CLI::App* eval_cmd =
      app.add_subcommand("evaluate", "score a saved model on a dataset");
  eval_data.attach(eval_cmd);
  eval_cmd->add_option("--model", eval_model, "model.json path")->required();
  eval_cmd->add_flag("--json", eval_json, "emit machine-readable JSON");

  // compare-variants
  CompareOpts cmp;
  CLI::App* cmp_cmd = app.add_subcommand(
      "compare-variants", "learning curves for all four greedy variants");
  cmp_cmd->option_defaults()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);
  cmp.data.attach(cmp_cmd);
  cmp.optim.attach(cmp_cmd);
  cmp_cmd->add_option("--hidden", cmp.hidden, "hidden neurons per module");
  cmp_cmd->add_option("--max-modules", cmp.max_modules, "iterations per run");
  cmp_cmd->add_option("--bound", cmp.bound, "output bound B");
  cmp_cmd->add_option("--out", cmp.out, "tidy CSV output path");
  std::string cmp_config;
  cmp_cmd->add_option("--config", cmp_config,
                      "flat key=value file mirroring the flag names");

  // capacity
  CLI::App* cap_cmd =
      app.add_subcommand("capacity", "shattering and complexity experiments");
  cap_cmd->require_subcommand(1);
  bool cap_json = false;
  cap_cmd->add_flag("--json", cap_json, "emit machine-readable JSON");

  std::size_t shatter_k = 8;
  CLI::App* shatter_cmd = cap_cmd->add_subcommand(
      "shatter", "verify the circle constructions for all 2^k labelings");
  shatter_cmd->add_option("--k", shatter_k, "number of circle points")
      ->required();

  RademacherOpts rad;
  CLI::App* rad_cmd = cap_cmd->add_subcommand(
      "rademacher", "Monte-Carlo empirical Rademacher estimates");
  rad_cmd->add_option("--class", rad.cls, "lin or conv")
      ->check(CLI::IsMember({"lin", "conv"}));
  rad_cmd->add_option("--scale", rad.scale, "weight scale for the lin class");
  rad_cmd->add_option("--n", rad.n, "sample points");
  rad_cmd->add_option("--fns", rad.fns, "functions sampled from the class");
  rad_cmd->add_option("--units", rad.units, "threshold units per function");
  rad_cmd->add_option("--dim", rad.dim, "input dimension");
  rad_cmd->add_option("--draws", rad.draws, "Rademacher draws");
  rad_cmd->add_option("--seed", rad.seed, "seed");

  double bc_cphi = 1.0, bc_B = 1.0, bc_delta = 0.05, bc_p = 1.0, bc_D = 1.0;
  std::size_t bc_n = 1;
  CLI::App* bound_cmd = cap_cmd->add_subcommand(
      "bound", "evaluate the excess-risk bound constant c/sqrt(n)");
  bound_cmd->add_option("--cphi", bc_cphi, "loss Lipschitz constant");
  bound_cmd->add_option("--B", bc_B, "basis output bound");
  bound_cmd->add_option("--delta", bc_delta, "confidence level in (0,1)");
  bound_cmd->add_option("--p", bc_p, "pseudodimension of the basis class");
  bound_cmd->add_option("--n", bc_n, "sample size");
  bound_cmd->add_option("--D", bc_D, "absolute constant of the entropy bound");

  // synth
  SynthOpts synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "generate bundled synthetic datasets");
  synth_cmd->add_option("--kind", synth.kind, "conv-reg or circle")
      ->check(CLI::IsMember({"conv-reg", "circle"}));
  synth_cmd->add_option("--n", synth.n, "rows (conv-reg)");
  synth_cmd->add_option("--dim", synth.dim, "features (conv-reg)");
  synth_cmd->add_option("--atoms", synth.atoms, "generator combination size");
  synth_cmd->add_option("--hidden", synth.hidden, "generator hidden width");
  synth_cmd->add_option("--k", synth.k, "circle points (circle)");
  synth_cmd->add_option("--bound", synth.bound, "generator output bound");
  synth_cmd->add_option("--noise", synth.noise, "target noise sd (conv-reg)");
  synth_cmd->add_option("--seed", synth.seed, "seed");
  synth_cmd->add_option("--out", synth.out, "CSV output path");

  // bench
  std::size_t bench_n = 1 << 20, bench_reps = 50;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "time the kernels per backend");
  bench_cmd->add_option("--n", bench_n, "vector length");
  bench_cmd->add_option("--reps", bench_reps, "repetitions");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(app, std::move(args));
    std::reverse(args.begin(), args.end());  // the vector overload wants it
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*train_cmd) return cmd_train(train_opts);
    if (*eval_cmd) return cmd_evaluate(eval_data, eval_model, eval_json);
    if (*cmp_cmd) return cmd_compare(cmp);
    if (*cap_cmd) {
      if (*shatter_cmd) return cmd_capacity_shatter(shatter_k, cap_json);
      if (*rad_cmd) return cmd_capacity_rademacher(rad, cap_json);
      if (*bound_cmd)
        return cmd_capacity_bound(bc_cphi, bc_B, bc_delta, bc_p, bc_n, bc_D,
                                  cap_json);
    }
    if (*synth_cmd) return cmd_synth(synth);
    if (*bench_cmd) return cmd_bench(bench_n, bench_reps);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
