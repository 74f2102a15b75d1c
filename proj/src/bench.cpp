#include "vpgrad/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "vpgrad/problem.hpp"

namespace vpgrad {

std::vector<BenchCell> parse_grid(const std::string& text) {
  std::vector<BenchCell> cells;
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), 'x', ',');
  std::istringstream cell_stream(normalized);
  std::string cell_text;
  while (std::getline(cell_stream, cell_text, ';')) {
    if (cell_text.find_first_not_of(" ") == std::string::npos) continue;
    std::istringstream parts(cell_text);
    std::string tok;
    std::vector<Index> dims;
    while (std::getline(parts, tok, ',')) {
      try {
        std::size_t used = 0;
        const long long v = std::stoll(tok, &used);
        if (v <= 0 || tok.find_first_not_of(" ", used) != std::string::npos) throw std::invalid_argument(tok);
        dims.push_back(static_cast<Index>(v));
      } catch (const std::exception&) {
        throw InputError("grid: bad size '" + tok + "'");
      }
    }
    if (dims.size() != 3) throw InputError("grid: each cell needs m,n,r (got '" + cell_text + "')");
    cells.push_back({dims[0], dims[1], dims[2]});
  }
  if (cells.empty()) throw InputError("grid: no cells");
  return cells;
}

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
std::int64_t time_ns(F&& f) {
  const auto start = Clock::now();
  f();
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
}

std::int64_t median(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : (v[mid - 1] + v[mid]) / 2;
}

BenchRecord gradient_record(const BenchCell& cell, GradientMethod method, const DenseMatrix& a, const DenseMatrix& b,
                            const BenchOptions& opts) {
  BenchRecord rec;
  rec.kind = "gradient";
  rec.method = std::string(to_string(method));
  rec.m = cell.m;
  rec.n = cell.n;
  rec.r = cell.r;
  rec.repeats = opts.repeats;
  rec.words = account_words(method, cell.m, cell.n, cell.r);
  std::vector<std::int64_t> times;
  try {
    if (method == GradientMethod::Fd && cell.m * cell.r > opts.fd_direct_limit) {
      rec.extrapolated = true;
      const std::uint64_t evals = 4 * cell.m * cell.r;
      FlopCounter fc;
      for (int k = 0; k < opts.repeats; ++k) {
        fc.reset();
        times.push_back(time_ns([&] { evaluate_objective(a, b, kDefaultRankTol, &fc); }));
      }
      rec.flops = fc.total() * evals;
      rec.elapsed_ns = median(times) * static_cast<std::int64_t>(evals);
      return rec;
    }
    GradientResult res;
    for (int k = 0; k < opts.repeats; ++k) {
      times.push_back(time_ns([&] { res = compute_gradient(method, a, b); }));
    }
    rec.flops = res.flops;
    rec.measured_words = method == GradientMethod::BlockSystem ? 0 : res.words;
    rec.elapsed_ns = median(times);
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

void solve_records(const BenchCell& cell, const BenchOptions& opts, std::vector<BenchRecord>& out,
                   const std::function<void(const BenchRecord&)>& sink) {
  const auto base = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(cell.m))));
  for (GradientMethod method : opts.methods) {
    BenchRecord rec;
    rec.kind = "solve";
    rec.method = std::string(to_string(method));
    rec.m = cell.m;
    rec.n = cell.n;
    rec.r = cell.r;
    rec.repeats = 1;
    rec.words = account_words(method, cell.m, cell.n, cell.r);
    try {
      if (base * base != cell.m) throw InputError("solve bench: m must be a perfect square (m = n_base^2)");
      ProblemSpec spec;
      spec.model = ModelKind::Kronecker;
      spec.base_n = base;
      spec.pairs = cell.r;
      spec.n = cell.n;
      spec.seed = opts.seed;
      spec.noise = opts.noise;
      Instance inst = generate_instance(spec);
      const std::vector<double> sigma0 = draw_sigma(inst);
      SolveOptions so = opts.solve_options;
      so.method = method;
      SolveReport rep;
      rec.elapsed_ns = time_ns([&] { rep = broyden_minimize(*inst.model, inst.a, sigma0, so); });
      rec.iterations = rep.iterations;
      rec.termination = std::string(to_string(rep.termination));
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    if (sink) sink(rec);
    out.push_back(std::move(rec));
  }
}

}  // namespace

std::vector<BenchRecord> run_bench(const BenchOptions& opts, const std::function<void(const BenchRecord&)>& sink) {
  if (opts.repeats <= 0) throw InputError("bench: repeats must be positive");
  std::vector<BenchRecord> out;
  for (const BenchCell& cell : opts.grid) {
    if (opts.solve) {
      solve_records(cell, opts, out, sink);
      continue;
    }
    Xorshift64Star rng(opts.seed);
    const DenseMatrix a = random_matrix(rng, cell.m, cell.n);
    const DenseMatrix b = random_matrix(rng, cell.m, cell.r);
    for (GradientMethod method : opts.methods) {
      BenchRecord rec = gradient_record(cell, method, a, b, opts);
      if (sink) sink(rec);
      out.push_back(std::move(rec));
    }
  }
  return out;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
  os << "kind,method,m,n,r,flops,words,measured_words,elapsed_ns,extrapolated,repeats,iterations,termination,error\n";
  for (const auto& rec : records) {
    std::string err = rec.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    os << rec.kind << ',' << rec.method << ',' << rec.m << ',' << rec.n << ',' << rec.r << ',' << rec.flops << ','
       << rec.words << ',' << rec.measured_words << ',' << rec.elapsed_ns << ',' << (rec.extrapolated ? 1 : 0) << ','
       << rec.repeats << ',' << rec.iterations << ',' << rec.termination << ",\"" << err << "\"\n";
  }
}

void write_bench_json(std::ostream& os, const std::vector<BenchRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& rec : records) {
    nlohmann::json j = {{"kind", rec.kind},
                        {"method", rec.method},
                        {"m", rec.m},
                        {"n", rec.n},
                        {"r", rec.r},
                        {"flops", rec.flops},
                        {"words", rec.words},
                        {"measured_words", rec.measured_words},
                        {"elapsed_ns", rec.elapsed_ns},
                        {"extrapolated", rec.extrapolated},
                        {"repeats", rec.repeats}};
    if (rec.iterations >= 0) {
      j["iterations"] = rec.iterations;
      j["termination"] = rec.termination;
    }
    if (!rec.error.empty()) j["error"] = rec.error;
    arr.push_back(std::move(j));
  }
  os << arr.dump(2) << '\n';
}

}  // namespace vpgrad
