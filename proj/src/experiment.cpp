#include "qgrad/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

namespace qgrad {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error("config error at " + path + ": " + what) {}
};

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Direction parse_direction(const std::string& s, const std::string& path) {
  if (s == "maximize") return Direction::Maximize;
  if (s == "minimize") return Direction::Minimize;
  throw ConfigError(path, "expected \"maximize\" or \"minimize\", got \"" + s + "\"");
}

Mode parse_mode(const std::string& s, const std::string& path) {
  if (s == "exact") return Mode::ExactMatrix;
  if (s == "circuit") return Mode::Circuit;
  throw ConfigError(path, "expected \"exact\" or \"circuit\", got \"" + s + "\"");
}

Eigen::VectorXd parse_vector(const json& node, const std::string& path) {
  if (!node.is_array()) throw ConfigError(path, "expected an array of numbers");
  Eigen::VectorXd v(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number())
      throw ConfigError(path + "[" + std::to_string(i) + "]", "expected a number");
    v(static_cast<Eigen::Index>(i)) = node[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd parse_matrix(const json& node, const std::string& path) {
  if (!node.is_array() || node.empty())
    throw ConfigError(path, "expected a non-empty 2-d array");
  const std::size_t rows = node.size();
  const std::size_t cols = node[0].is_array() ? node[0].size() : 0;
  if (cols == 0) throw ConfigError(path, "expected a non-empty 2-d array");
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!node[r].is_array() || node[r].size() != cols)
      throw ConfigError(rp, "ragged row");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!node[r][c].is_number())
        throw ConfigError(rp + "[" + std::to_string(c) + "]", "expected a number");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          node[r][c].get<double>();
    }
  }
  return m;
}

std::string sign_label(const Eigen::VectorXd& x) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", std::abs(x(i)));
    os << (x(i) < 0 ? 'm' : 'p') << buf;
  }
  return os.str();
}

void check_register_budget(const ExperimentSpec& spec, int chi) {
  const int total = 3 + chi + encode(spec.starts.front()).n_v();
  if (total > kMaxTotalQubits)
    throw ConfigError("optimizer.ne", "circuit would need " + std::to_string(total) +
                                          " qubits, budget is " +
                                          std::to_string(kMaxTotalQubits));
}

void write_text_file(const std::string& path, const std::string& text) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

// One run = one CSV trace + one JSON summary next to it.
void execute_run(const ExperimentSpec& spec, const Eigen::VectorXd& x0,
                 const OptimizerConfig& opt, const NoiseConfig* noise,
                 const std::string& label) {
  const IterationTrace trace = run(spec.problem, x0, opt, noise);
  ExperimentSpec echo_spec = spec;
  echo_spec.label = label;
  echo_spec.starts = {x0};
  echo_spec.opt = opt;
  json echo = resolved_config_json(echo_spec);
  const fs::path base = fs::path(spec.out_dir) / label;
  emit_trace(trace, (base.string() + ".csv"));
  write_run_summary(trace, echo, (base.string() + ".json"));
  std::cout << label << ": " << to_string(trace.termination) << " after "
            << trace.iterations() << " steps, final_x = [";
  const Eigen::VectorXd& fx = trace.final_x();
  for (Eigen::Index i = 0; i < fx.size(); ++i)
    std::cout << (i ? ", " : "") << fmt17(fx(i));
  std::cout << "], f = " << fmt17(trace.final_f()) << "\n";
}

}  // namespace

Eigen::MatrixXd f1_raw_matrix() {
  Eigen::Matrix2d g;
  g << 3.5, 0.0, 0.0, -4.5;
  Eigen::MatrixXd a(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a.block(2 * i, 2 * j, 2, 2) = g(i, j) * g;
  return a;
}

Eigen::MatrixXd f2_raw_matrix() {
  Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
  c(0, 2) = c(2, 0) = 1.0;
  Eigen::Matrix3d q = Eigen::Matrix3d::Zero();
  q(1, 2) = q(2, 1) = 1.0;
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(9, 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b.block(3 * i, 3 * j, 3, 3) += c(i, j) * q;
  return b;
}

PolynomialProblem preset_f1() {
  // The reference figures converge to the zero of the gradient at finite x,
  // which is the descent dynamics of this polynomial; ascent diverges.
  return symmetrize_and_scale(f1_raw_matrix(), 2, Direction::Minimize);
}

PolynomialProblem preset_f2() {
  return symmetrize_and_scale(f2_raw_matrix(), 2, Direction::Minimize);
}

ExperimentSpec preset_spec(const std::string& name) {
  ExperimentSpec spec;
  spec.label = name;
  spec.preset = name;
  spec.opt.max_iters = 800;
  spec.opt.stop_tol = 1e-8;
  spec.opt.mode = Mode::Circuit;
  spec.opt.phase = PhaseEstimateConfig::from_width(12);
  spec.noise.trials = 20;
  spec.noise.register_sizes = {5, 7, 9, 11, 12};
  if (name == "f1") {
    spec.problem = preset_f1();
    spec.starts = {Eigen::VectorXd::Constant(1, 4.0),
                   Eigen::VectorXd::Constant(1, 14.0)};
    spec.opt.xi = 0.05;
    spec.noise.init_amplitude = 0.05;
    spec.noise.d_strength = 0.01;
  } else if (name == "f2") {
    spec.problem = preset_f2();
    spec.starts.resize(4);
    const double signs[4][2] = {{5, 5}, {5, -5}, {-5, 5}, {-5, -5}};
    for (int i = 0; i < 4; ++i) {
      Eigen::VectorXd s(2);
      s << signs[i][0], signs[i][1];
      spec.starts[static_cast<std::size_t>(i)] = s;
    }
    spec.opt.xi = 0.1;
    spec.noise.init_amplitude = 0.05;
    spec.noise.d_strength = 0.02;
  } else {
    throw ConfigError("problem.preset", "unknown preset \"" + name + "\"");
  }
  return spec;
}

ExperimentSpec spec_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("$", "config root must be an object");
  if (!doc.contains("problem") || !doc["problem"].is_object())
    throw ConfigError("problem", "missing problem object");
  const json& prob = doc["problem"];

  ExperimentSpec spec;
  if (prob.contains("preset")) {
    if (prob.contains("matrix"))
      throw ConfigError("problem", "give either preset or matrix, not both");
    spec = preset_spec(prob["preset"].get<std::string>());
  } else if (prob.contains("matrix")) {
    if (!prob.contains("p") || !prob["p"].is_number_integer())
      throw ConfigError("problem.p", "half-order p (integer) is required");
    const Eigen::MatrixXd raw = parse_matrix(prob["matrix"], "problem.matrix");
    Direction dir = Direction::Minimize;
    if (prob.contains("direction"))
      dir = parse_direction(prob["direction"].get<std::string>(), "problem.direction");
    try {
      spec.problem = symmetrize_and_scale(raw, prob["p"].get<int>(), dir);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("problem.matrix", e.what());
    }
    spec.starts = {Eigen::VectorXd::Zero(spec.problem.d)};
  } else {
    throw ConfigError("problem", "need problem.preset or problem.matrix");
  }

  if (doc.contains("label")) spec.label = doc["label"].get<std::string>();
  if (doc.contains("out_dir")) spec.out_dir = doc["out_dir"].get<std::string>();
  if (doc.contains("start"))
    spec.starts = {parse_vector(doc["start"], "start")};
  if (doc.contains("starts")) {
    if (!doc["starts"].is_array() || doc["starts"].empty())
      throw ConfigError("starts", "expected a non-empty array of points");
    spec.starts.clear();
    for (std::size_t i = 0; i < doc["starts"].size(); ++i)
      spec.starts.push_back(
          parse_vector(doc["starts"][i], "starts[" + std::to_string(i) + "]"));
  }
  for (const Eigen::VectorXd& s : spec.starts)
    if (s.size() != spec.problem.d)
      throw ConfigError("starts", "start point dimension != problem dimension");

  if (doc.contains("optimizer")) {
    const json& o = doc["optimizer"];
    if (!o.is_object()) throw ConfigError("optimizer", "expected an object");
    if (o.contains("xi")) spec.opt.xi = o["xi"].get<double>();
    if (o.contains("max_iters")) spec.opt.max_iters = o["max_iters"].get<int>();
    if (o.contains("stop_tol")) spec.opt.stop_tol = o["stop_tol"].get<double>();
    if (o.contains("mode"))
      spec.opt.mode = parse_mode(o["mode"].get<std::string>(), "optimizer.mode");
    if (o.contains("ne"))
      spec.opt.phase = PhaseEstimateConfig::from_width(o["ne"].get<int>());
    if (o.contains("n_p") && o.contains("delta"))
      spec.opt.phase =
          PhaseEstimateConfig::from_precision(o["n_p"].get<int>(), o["delta"].get<double>());
    if (o.contains("direction"))
      spec.opt.direction =
          parse_direction(o["direction"].get<std::string>(), "optimizer.direction");
    if (o.contains("seed")) spec.opt.seed = o["seed"].get<std::uint64_t>();
    if (o.contains("sample_post_selection"))
      spec.opt.sample_post_selection = o["sample_post_selection"].get<bool>();
  }
  try {
    spec.opt.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("optimizer", e.what());
  }

  if (doc.contains("noise")) {
    const json& n = doc["noise"];
    if (!n.is_object()) throw ConfigError("noise", "expected an object");
    if (n.contains("init_amplitude"))
      spec.noise.init_amplitude = n["init_amplitude"].get<double>();
    if (n.contains("d_strength")) spec.noise.d_strength = n["d_strength"].get<double>();
    if (n.contains("trials")) spec.noise.trials = n["trials"].get<int>();
    if (n.contains("seed")) spec.noise.seed = n["seed"].get<std::uint64_t>();
    if (n.contains("resample_d_each_iter"))
      spec.noise.resample_d_each_iter = n["resample_d_each_iter"].get<bool>();
    if (n.contains("register_sizes")) {
      spec.noise.register_sizes.clear();
      for (const auto& v : n["register_sizes"])
        spec.noise.register_sizes.push_back(v.get<int>());
    }
  }
  try {
    spec.noise.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("noise", e.what());
  }

  if (spec.opt.mode == Mode::Circuit) check_register_budget(spec, spec.opt.phase.chi);
  return spec;
}

json resolved_config_json(const ExperimentSpec& spec) {
  json problem;
  if (!spec.preset.empty()) problem["preset"] = spec.preset;
  problem["d"] = spec.problem.d;
  problem["p"] = spec.problem.p;
  problem["direction"] = to_string(spec.problem.direction);
  problem["scale_factor"] = spec.problem.scale_factor;

  json starts = json::array();
  for (const Eigen::VectorXd& s : spec.starts) {
    json pt = json::array();
    for (Eigen::Index i = 0; i < s.size(); ++i) pt.push_back(s(i));
    starts.push_back(pt);
  }

  const Direction dir = spec.opt.direction.value_or(spec.problem.direction);
  json optimizer = {{"xi", spec.opt.xi},
                    {"eta", spec.opt.eta()},
                    {"max_iters", spec.opt.max_iters},
                    {"stop_tol", spec.opt.stop_tol},
                    {"mode", to_string(spec.opt.mode)},
                    {"ne", spec.opt.phase.chi},
                    {"n_p", spec.opt.phase.n_p},
                    {"delta", spec.opt.phase.delta},
                    {"direction", to_string(dir)},
                    {"seed", spec.opt.seed},
                    {"sample_post_selection", spec.opt.sample_post_selection},
                    {"xi_exceeds_bound", spec.opt.xi_exceeds_bound()}};

  json noise = {{"init_amplitude", spec.noise.init_amplitude},
                {"d_strength", spec.noise.d_strength},
                {"trials", spec.noise.trials},
                {"register_sizes", spec.noise.register_sizes},
                {"seed", spec.noise.seed},
                {"resample_d_each_iter", spec.noise.resample_d_each_iter}};

  return json{{"label", spec.label},      {"problem", problem}, {"starts", starts},
              {"optimizer", optimizer},   {"noise", noise},     {"out_dir", spec.out_dir}};
}

void emit_trace(const IterationTrace& trace, const std::string& path) {
  const Eigen::Index d = trace.x0.size();
  std::ostringstream os;
  os << "iter";
  for (Eigen::Index i = 0; i < d; ++i) os << ",x_" << i;
  os << ",f,grad_norm,p_succ,cos_gamma\n";
  auto row = [&](int iter, const Eigen::VectorXd& x, double f, double g, double p,
                 double cg) {
    os << iter;
    for (Eigen::Index i = 0; i < d; ++i) os << ',' << fmt17(x(i));
    os << ',' << fmt17(f) << ',' << fmt17(g) << ',' << fmt17(p) << ',' << fmt17(cg)
       << '\n';
  };
  row(0, trace.x0, trace.f0, trace.grad_norm0, 1.0, trace.cos_gamma0);
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const StepResult& s = trace.steps[t];
    row(static_cast<int>(t) + 1, s.x_next, s.f_next, s.grad_norm, s.p_succ_measured,
        s.cos_gamma);
  }
  write_text_file(path, os.str());
}

void write_run_summary(const IterationTrace& trace, const json& config_echo,
                       const std::string& path) {
  json final_x = json::array();
  for (Eigen::Index i = 0; i < trace.final_x().size(); ++i)
    final_x.push_back(trace.final_x()(i));
  const json summary = {{"config", config_echo},
                        {"termination", to_string(trace.termination)},
                        {"final_x", final_x},
                        {"final_f", trace.final_f()},
                        {"min_p_succ", trace.min_p_succ()},
                        {"iterations", trace.iterations()}};
  write_text_file(path, summary.dump(2) + "\n");
}

namespace {

struct CliOverrides {
  std::string config_path;
  std::string out_dir;
  std::string mode;
  std::uint64_t seed = 0;
  bool has_seed = false;
  int ne = 0;
  double xi = 0.0;
  int trials = 0;
};

ExperimentSpec load_spec(const CliOverrides& ov, const std::string& fallback_preset) {
  ExperimentSpec spec;
  if (!ov.config_path.empty()) {
    std::ifstream in(ov.config_path);
    if (!in) throw std::runtime_error("cannot read config file " + ov.config_path);
    json doc;
    try {
      in >> doc;
    } catch (const json::parse_error& e) {
      throw std::runtime_error("config parse error: " + std::string(e.what()));
    }
    spec = spec_from_json(doc);
  } else if (!fallback_preset.empty()) {
    spec = preset_spec(fallback_preset);
  } else {
    throw std::runtime_error("--config is required for this subcommand");
  }
  if (!ov.out_dir.empty()) spec.out_dir = ov.out_dir;
  if (!ov.mode.empty()) spec.opt.mode = parse_mode(ov.mode, "--mode");
  if (ov.has_seed) spec.opt.seed = ov.seed;
  if (ov.ne > 0) spec.opt.phase = PhaseEstimateConfig::from_width(ov.ne);
  if (ov.xi > 0.0) spec.opt.xi = ov.xi;
  if (ov.trials > 0) spec.noise.trials = ov.trials;
  if (spec.opt.mode == Mode::Circuit) check_register_budget(spec, spec.opt.phase.chi);
  return spec;
}

// Fans f(0..count-1) out over worker threads; exceptions are rethrown.
void parallel_for(int count, const std::function<void(int)>& f) {
  const int workers =
      std::max(1, std::min<int>(count, static_cast<int>(std::thread::hardware_concurrency())));
  std::atomic<int> next(0);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) f(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

int cmd_run(const ExperimentSpec& spec) {
  const NoiseConfig* noise =
      (spec.noise.init_amplitude > 0.0 || spec.noise.d_strength > 0.0) ? &spec.noise
                                                                       : nullptr;
  for (const Eigen::VectorXd& x0 : spec.starts) {
    const std::string label =
        spec.starts.size() > 1 ? spec.label + "_" + sign_label(x0) : spec.label;
    execute_run(spec, x0, spec.opt, noise, label);
  }
  return 0;
}

int cmd_sweep_noise(const ExperimentSpec& spec) {
  spec.noise.validate();
  const Eigen::VectorXd x0 = spec.starts.front();
  std::vector<IterationTrace> traces(static_cast<std::size_t>(spec.noise.trials));
  parallel_for(spec.noise.trials, [&](int trial) {
    NoiseConfig trial_noise = spec.noise;
    OptimizerConfig opt = spec.opt;
    opt.seed = split_seed(spec.noise.seed, static_cast<std::uint64_t>(trial));
    traces[static_cast<std::size_t>(trial)] = run(spec.problem, x0, opt, &trial_noise);
  });
  for (int trial = 0; trial < spec.noise.trials; ++trial) {
    const std::string label = spec.label + "_trial" + std::to_string(trial);
    ExperimentSpec echo = spec;
    echo.label = label;
    echo.starts = {x0};
    echo.opt.seed = split_seed(spec.noise.seed, static_cast<std::uint64_t>(trial));
    const fs::path base = fs::path(spec.out_dir) / label;
    emit_trace(traces[static_cast<std::size_t>(trial)], base.string() + ".csv");
    write_run_summary(traces[static_cast<std::size_t>(trial)],
                      resolved_config_json(echo), base.string() + ".json");
  }
  std::cout << spec.label << ": " << spec.noise.trials << " noise trials written to "
            << spec.out_dir << "\n";
  return 0;
}

int cmd_sweep_register(const ExperimentSpec& spec) {
  if (spec.noise.register_sizes.empty())
    throw std::runtime_error("noise.register_sizes is empty");
  for (int n_e : spec.noise.register_sizes) check_register_budget(spec, n_e);
  const Eigen::VectorXd x0 = spec.starts.front();
  const std::vector<IterationTrace> traces =
      sweep_register_sizes(spec.problem, x0, spec.opt, spec.noise.register_sizes);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const int n_e = spec.noise.register_sizes[i];
    ExperimentSpec echo = spec;
    echo.label = spec.label + "_ne" + std::to_string(n_e);
    echo.starts = {x0};
    echo.opt.mode = Mode::Circuit;
    echo.opt.phase = PhaseEstimateConfig::from_width(n_e);
    const fs::path base = fs::path(spec.out_dir) / echo.label;
    emit_trace(traces[i], base.string() + ".csv");
    write_run_summary(traces[i], resolved_config_json(echo), base.string() + ".json");
    std::cout << echo.label << ": " << to_string(traces[i].termination) << " at "
              << fmt17(traces[i].final_x()(0)) << "\n";
  }
  return 0;
}

int cmd_reproduce(const ExperimentSpec& spec, const std::string& which) {
  // Reference traces per start (circuit at the configured width) plus an
  // exact-mode trace of the first start as the oracle.
  for (const Eigen::VectorXd& x0 : spec.starts) {
    OptimizerConfig circuit = spec.opt;
    circuit.mode = Mode::Circuit;
    execute_run(spec, x0, circuit, nullptr, spec.label + "_" + sign_label(x0));
  }
  OptimizerConfig exact = spec.opt;
  exact.mode = Mode::ExactMatrix;
  execute_run(spec, spec.starts.front(), exact, nullptr,
              spec.label + "_exact_" + sign_label(spec.starts.front()));
  if (which == "f1") {
    ExperimentSpec sweep = spec;
    sweep.label = spec.label + "_sweep";
    return cmd_sweep_register(sweep);
  }
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"desk-scale simulator of the dressed-encoding quantum gradient protocol"};
  app.require_subcommand(1);

  CliOverrides ov;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", ov.config_path, "JSON experiment config");
    cmd->add_option("--out", ov.out_dir, "output directory");
    cmd->add_option("--mode", ov.mode, "exact|circuit")
        ->check(CLI::IsMember({"exact", "circuit"}));
    cmd->add_option("--seed", ov.seed, "RNG seed")->each([&](const std::string&) {
      ov.has_seed = true;
    });
    cmd->add_option("--ne", ov.ne, "e-register width");
    cmd->add_option("--xi", ov.xi, "learning rate");
    cmd->add_option("--trials", ov.trials, "noise trial count");
  };

  CLI::App* c_run = app.add_subcommand("run", "run the configured experiment");
  CLI::App* c_noise = app.add_subcommand("sweep-noise", "noise-perturbation trials");
  CLI::App* c_reg = app.add_subcommand("sweep-register", "e-register size sweep");
  CLI::App* c_f1 = app.add_subcommand("reproduce-f1", "1-d benchmark runs and sweep");
  CLI::App* c_f2 = app.add_subcommand("reproduce-f2", "2-d benchmark runs");
  CLI::App* c_val = app.add_subcommand("validate", "validate a config and echo it");
  for (CLI::App* c : {c_run, c_noise, c_reg, c_f1, c_f2, c_val}) add_common(c);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (c_val->parsed()) {
      const ExperimentSpec spec = load_spec(ov, "");
      std::cout << resolved_config_json(spec).dump(2) << "\nOK\n";
      return 0;
    }
    if (c_run->parsed()) return cmd_run(load_spec(ov, ""));
    if (c_noise->parsed()) return cmd_sweep_noise(load_spec(ov, ""));
    if (c_reg->parsed()) return cmd_sweep_register(load_spec(ov, ""));
    if (c_f1->parsed()) return cmd_reproduce(load_spec(ov, "f1"), "f1");
    if (c_f2->parsed()) return cmd_reproduce(load_spec(ov, "f2"), "f2");
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace qgrad
