#include "vpgrad/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

namespace vpgrad::cli {

namespace {

nlohmann::json spec_to_json(const ProblemSpec& spec) {
  nlohmann::json j = {{"model", std::string(to_string(spec.model))},
                      {"rows", spec.rows()},
                      {"cols", spec.factor_cols()},
                      {"data_cols", spec.data_cols()},
                      {"seed", spec.seed},
                      {"noise", spec.noise}};
  if (spec.model == ModelKind::Kronecker) {
    j["base_n"] = spec.base_n;
    j["R"] = spec.pairs;
  } else if (spec.model == ModelKind::Exponential) {
    j["K"] = spec.k_rows;
    j["L"] = spec.l_cols;
  }
  if (spec.a_path) j["a_file"] = *spec.a_path;
  return j;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

}  // namespace

int cmd_gen(const ProblemSpec& spec, const std::string& out_path, std::ostream& log) {
  const Instance inst = generate_instance(spec);
  write_matrix_file(out_path, inst.a, inst.a_kind);
  log << "wrote A (" << inst.a.rows() << "x" << inst.a.cols() << ") to " << out_path << '\n';
  if (!inst.planted_sigma.empty()) {
    DenseMatrix sigma(inst.planted_sigma.size(), 1);
    for (Index k = 0; k < inst.planted_sigma.size(); ++k) sigma(k, 0) = inst.planted_sigma[k];
    write_matrix_file(out_path + ".sigma", sigma, EntryKind::Real);
    log << "wrote planted sigma (" << inst.planted_sigma.size() << ") to " << out_path << ".sigma\n";
  }
  return kExitOk;
}

int cmd_gradcheck(const ProblemSpec& spec, const GradcheckOptions& opts, std::ostream& out) {
  Instance inst = generate_instance(spec);
  const std::vector<double> sigma = draw_sigma(inst);
  const DenseMatrix b = inst.model->build(sigma);
  GradientOptions gopts;
  gopts.fd_step = opts.fd_step;

  std::vector<GradientMethod> all{opts.reference};
  for (GradientMethod m : opts.methods)
    if (m != opts.reference) all.push_back(m);

  std::vector<GradientResult> results;
  for (GradientMethod m : all) {
    GradientResult res = compute_gradient(m, inst.a, b, gopts);
    if (m != opts.reference && opts.corrupt != 0.0) {
      for (auto& v : res.g.values()) v *= 1.0 + opts.corrupt;
    }
    results.push_back(std::move(res));
  }

  out << "gradcheck model=" << to_string(spec.model) << " m=" << b.rows() << " n=" << inst.a.cols()
      << " r=" << b.cols() << " seed=" << spec.seed << " reference=" << to_string(opts.reference)
      << " tol=" << fmt(opts.tol) << '\n';
  out << "f = " << format_double(results.front().f) << '\n';
  out << "max relative discrepancy (row vs column):\n" << std::setw(10) << "";
  for (GradientMethod m : all) out << std::setw(12) << to_string(m);
  out << '\n';
  for (std::size_t i = 0; i < all.size(); ++i) {
    out << std::setw(10) << to_string(all[i]);
    for (std::size_t j = 0; j < all.size(); ++j) out << std::setw(12) << fmt(relative_discrepancy(results[i].g, results[j].g));
    out << '\n';
  }
  bool ok = true;
  for (std::size_t i = 1; i < all.size(); ++i) {
    const double d = relative_discrepancy(results[i].g, results[0].g);
    const bool pass = d <= opts.tol;
    ok = ok && pass;
    out << (pass ? "PASS " : "FAIL ") << to_string(all[i]) << " vs " << to_string(opts.reference) << ": " << fmt(d)
        << '\n';
  }
  return ok ? kExitOk : kExitFailure;
}

int cmd_bench(const BenchOptions& opts, OutputFormat format, const std::optional<std::string>& out_path,
              std::ostream& out) {
  const std::vector<BenchRecord> records = run_bench(opts);
  std::ofstream file;
  std::ostream* os = &out;
  if (out_path) {
    file.open(*out_path);
    if (!file) throw std::runtime_error("cannot open '" + *out_path + "' for writing");
    os = &file;
  }
  if (format == OutputFormat::Csv) {
    write_bench_csv(*os, records);
  } else {
    write_bench_json(*os, records);
  }
  return kExitOk;
}

nlohmann::json report_to_json(const SolveReport& report, const ProblemSpec& spec) {
  const SolveOptions& o = report.options;
  nlohmann::json j = {
      {"problem", spec_to_json(spec)},
      {"method", std::string(to_string(o.method))},
      {"iterations", report.iterations},
      {"termination", std::string(to_string(report.termination))},
      {"final_f", report.final_f},
      {"final_grad_norm", report.final_grad_norm},
      {"restarts", report.restarts},
      {"evaluations", report.evaluations},
      {"f_history", report.f_history},
      {"step_lengths", report.step_lengths},
      {"slopes", report.slopes},
      {"final_sigma", report.final_sigma},
      {"options",
       {{"max_iters", o.max_iters},
        {"grad_tol", o.grad_tol},
        {"step_tol", o.step_tol},
        {"backtrack", o.backtrack},
        {"armijo", o.armijo},
        {"max_backtracks", o.max_backtracks},
        {"update_guard", o.update_guard},
        {"merit", o.squared_merit ? "f^2/2" : "f"},
        {"update", "symmetric rank-one"},
        {"initial_inverse_jacobian", "identity / ||grad(sigma0)||_2"},
        {"start", "uniform [-1,1) from the instance stream"}}}};
  if (!report.error.empty()) j["error"] = report.error;
  return j;
}

int cmd_solve(const ProblemSpec& spec, const SolveOptions& opts, bool strict,
              const std::optional<std::string>& out_path, std::ostream& out) {
  Instance inst = generate_instance(spec);
  const std::vector<double> sigma0 = draw_sigma(inst);
  const SolveReport report = broyden_minimize(*inst.model, inst.a, sigma0, opts);
  nlohmann::json j = report_to_json(report, spec);
  if (!inst.planted_sigma.empty()) j["planted_sigma"] = inst.planted_sigma;
  if (out_path) {
    std::ofstream file(*out_path);
    if (!file) throw std::runtime_error("cannot open '" + *out_path + "' for writing");
    file << j.dump(2) << '\n';
  } else {
    out << j.dump(2) << '\n';
  }
  if (report.termination == Termination::RankDeficient) return kExitInput;
  if (strict && report.termination == Termination::IterCap) return kExitFailure;
  return kExitOk;
}

namespace {

struct CommonFlags {
  std::string model = "free";
  std::uint64_t seed = 42;
  Index m = 20;
  Index n = 0;
  Index r = 4;
  Index base_n = 2;
  Index pairs = 2;
  Index k_rows = 8;
  Index l_cols = 2;
  double noise = 0.0;
  std::string a_file;

  void attach(CLI::App* app) {
    app->add_option("--model", model, "Factor model")->check(CLI::IsMember({"free", "kronecker", "exponential"}));
    app->add_option("--seed", seed, "PRNG seed (xorshift64*)");
    app->add_option("--m", m, "Rows of A and B (free model)");
    app->add_option("--n", n, "Columns of A (0: model default)");
    app->add_option("--r", r, "Columns of B (free model)");
    app->add_option("--base-n", base_n, "Kronecker base dimension");
    app->add_option("--R", pairs, "Kronecker column pairs");
    app->add_option("--K", k_rows, "Exponential rows");
    app->add_option("--L", l_cols, "Exponential columns");
    app->add_option("--noise", noise, "Noise level of planted instances")->check(CLI::NonNegativeNumber);
    app->add_option("--a-file", a_file, "Explicit A matrix file");
  }

  ProblemSpec spec() const {
    ProblemSpec s;
    s.model = parse_model_kind(model);
    s.seed = seed;
    s.m = m;
    s.n = n;
    s.r = r;
    s.base_n = base_n;
    s.pairs = pairs;
    s.k_rows = k_rows;
    s.l_cols = l_cols;
    s.noise = noise;
    if (!a_file.empty()) s.a_path = a_file;
    return s;
  }
};

std::vector<GradientMethod> parse_methods(const std::vector<std::string>& names) {
  std::vector<GradientMethod> out;
  for (const auto& n : names) out.push_back(parse_gradient_method(n));
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variable-projection gradients and Broyden solves for structured low-rank fits", "vpgrad"};
  app.require_subcommand(1);

  CommonFlags gen_flags, check_flags, solve_flags;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a problem instance");
  gen_flags.attach(gen);
  gen->add_option("--out", gen_out, "Output path for A")->required();

  GradcheckOptions check_opts;
  std::vector<std::string> check_methods{"amgs"};
  std::string check_reference = "fd";
  auto* check = app.add_subcommand("gradcheck", "Compare gradient methods against a reference");
  check_flags.m = 20;
  check_flags.n = 10;
  check_flags.attach(check);
  check->add_option("--method", check_methods, "Methods to check")->check(
      CLI::IsMember({"fd", "ags", "amgs", "blocksys"}));
  check->add_option("--reference", check_reference, "Reference method")->check(
      CLI::IsMember({"fd", "ags", "amgs", "blocksys"}));
  check->add_option("--tol", check_opts.tol, "Max relative discrepancy")->check(CLI::PositiveNumber);
  check->add_option("--fd-step", check_opts.fd_step, "FD base step")->check(CLI::PositiveNumber);
  check->add_option("--corrupt", check_opts.corrupt, "Scale checked gradients by 1+x (harness self-test)")
      ->group("");

  BenchOptions bench_opts;
  std::string grid_text = "10,2,2;100,10,10";
  std::vector<std::string> bench_methods{"fd", "ags", "amgs"};
  std::string bench_format = "csv";
  std::string bench_out;
  int bench_iters = bench_opts.solve_options.max_iters;
  auto* bench = app.add_subcommand("bench", "Time and count gradient methods or Broyden solves over a grid");
  bench->add_option("--grid", grid_text, "Cells 'm,n,r;m,n,r'");
  bench->add_option("--method", bench_methods, "Methods")->check(CLI::IsMember({"fd", "ags", "amgs", "blocksys"}));
  bench->add_option("--repeats", bench_opts.repeats, "Repeats per cell (median reported)")->check(
      CLI::PositiveNumber);
  bench->add_option("--seed", bench_opts.seed, "PRNG seed");
  bench->add_option("--format", bench_format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  bench->add_option("--out", bench_out, "Output path (default stdout)");
  bench->add_option("--fd-limit", bench_opts.fd_direct_limit, "Largest m*r for direct FD timing");
  bench->add_flag("--solve", bench_opts.solve, "Benchmark Broyden solves on Kronecker cells (m = n_base^2)");
  bench->add_option("--noise", bench_opts.noise, "Noise for solve cells")->check(CLI::NonNegativeNumber);
  bench->add_option("--max-iters", bench_iters, "Iteration cap for solve cells")->check(CLI::PositiveNumber);

  SolveOptions solve_opts;
  std::string solve_method = "amgs";
  std::string solve_out;
  bool strict = false;
  auto* solve = app.add_subcommand("solve", "Broyden minimization over the structure parameters");
  solve_flags.model = "kronecker";
  solve_flags.attach(solve);
  solve->add_option("--method", solve_method, "Gradient method")->check(CLI::IsMember({"fd", "ags", "amgs"}));
  solve->add_option("--max-iters", solve_opts.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
  solve->add_option("--tol", solve_opts.grad_tol, "Gradient tolerance (inf-norm)")->check(CLI::PositiveNumber);
  solve->add_option("--step-tol", solve_opts.step_tol, "Relative step tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--format", bench_format, "Output format")->check(CLI::IsMember({"json"}));
  solve->add_option("--out", solve_out, "Report path (default stdout)");
  solve->add_flag("--strict", strict, "Exit 1 when the iteration cap is hit");
  std::string merit = "squared";
  solve->add_option("--merit", merit, "Secant target: gradient of f^2/2 (squared) or of f (objective)")
      ->check(CLI::IsMember({"squared", "objective"}));

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_flags.spec(), gen_out, out);
    if (check->parsed()) {
      check_opts.methods = parse_methods(check_methods);
      check_opts.reference = parse_gradient_method(check_reference);
      return cmd_gradcheck(check_flags.spec(), check_opts, out);
    }
    if (bench->parsed()) {
      bench_opts.grid = parse_grid(grid_text);
      bench_opts.methods = parse_methods(bench_methods);
      bench_opts.solve_options.max_iters = bench_iters;
      std::optional<std::string> path;
      if (!bench_out.empty()) path = bench_out;
      return cmd_bench(bench_opts, bench_format == "json" ? OutputFormat::Json : OutputFormat::Csv, path, out);
    }
    if (solve->parsed()) {
      solve_opts.method = parse_gradient_method(solve_method);
      solve_opts.squared_merit = merit == "squared";
      std::optional<std::string> path;
      if (!solve_out.empty()) path = solve_out;
      return cmd_solve(solve_flags.spec(), solve_opts, strict, path, out);
    }
  } catch (const RankDeficient& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace vpgrad::cli
