// paramcert: certified parameter estimation for rational ODE models.
//
//   paramcert estimate --model m.ode --data d.csv [--tstar 0] [--orders 2] [--interp poly]
//   paramcert solve --system sys.txt
//   paramcert bench --corpus corpus/ [--csv out.csv] [--json out.json]

#include <CLI11.hpp>

#include <iostream>

#include "paramcert/bench.hpp"
#include "paramcert/paramcert.hpp"

using namespace paramcert;
using nlohmann::ordered_json;

namespace {

struct Common {
  std::string tstar;
  std::string orders;
  std::string interp = "poly";
  std::string eps = "1e-9";
  std::vector<std::string> bounds;
  double timeout = 0;
  std::size_t mem_limit = 0;
  std::vector<std::string> dump;
};

int emit(const ordered_json& j) {
  std::cout << j.dump(2) << std::endl;
  return j.at("exit_code").get<int>();
}

void install_limits(const char* command, const Common& c) {
  auto limit_json = [&](const char* status, int code, const char* msg) {
    auto j = report::header(command, status, code, msg);
    return j.dump(2) + "\n";
  };
  apply_memory_limit(c.mem_limit ? std::optional<std::size_t>(c.mem_limit) : std::nullopt,
                     limit_json("out-of-memory", exit_out_of_memory, "exceeded the memory limit"));
  // Backstop alarm behind the in-process deadline.
  if (c.timeout > 0) apply_time_limit(c.timeout * 1.05 + 0.5, limit_json("timeout", exit_timeout, "exceeded the time limit"));
}

bool wants(const Common& c, const char* what) { return std::find(c.dump.begin(), c.dump.end(), what) != c.dump.end(); }

void dump_solution(const Common& c, const PolySystem& sys, const SolveOutcome* s) {
  if (wants(c, "system")) std::cerr << "# --- system\n" << write_system(sys);
  if (!s) return;
  if (wants(c, "gb") && s->gb) {
    std::cerr << "# --- groebner basis (grevlex)\n";
    for (const auto& g : s->gb->generators) std::cerr << g.to_string() << "\n";
  }
  if (wants(c, "rur") && s->rur) std::cerr << "# --- rur\n" << write_rur(*s->rur);
}

std::vector<int> parse_orders(const std::string& text, std::size_t outputs) {
  std::vector<int> v;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stoi(tok));
  if (v.size() == 1 && outputs > 1) v.assign(outputs, v.front());
  return v;
}

int cmd_estimate(const std::string& model_path, const std::string& data_path, const Common& c) {
  try {
    install_limits("estimate", c);
    Model model = parse_model(read_file(model_path));
    Dataset data = parse_dataset(read_file(data_path), model);
    EstimateOptions o;
    if (!c.tstar.empty()) o.tstar = parse_rational(c.tstar);
    if (!c.orders.empty()) o.orders = parse_orders(c.orders, model.outputs.size());
    o.interp = c.interp == "rational" ? InterpKind::rational : InterpKind::polynomial;
    o.eps = parse_rational(c.eps);
    if (o.eps <= 0) throw DataError("--eps must be positive");
    for (const auto& b : c.bounds) {
      auto parsed = parse_bounds(b);
      o.bounds.insert(o.bounds.end(), parsed.begin(), parsed.end());
    }
    for (const auto& b : o.bounds)
      if (b.name != "*" && !model.param_index(b.name)) throw SemanticError("bound on unknown parameter `" + b.name + "`");
    if (c.timeout > 0) o.timeout_seconds = c.timeout;
    EstimationResult res;
    try {
      res = estimate(model, data, o);
    } catch (const OrderSelectionError& e) {
      return emit(report::header("estimate", "no-estimate", exit_no_estimate, e.what()));
    }
    if (res.system) dump_solution(c, *res.system, res.solution ? &*res.solution : nullptr);
    return emit(report::estimation(model, res));
  } catch (const std::exception& e) {
    return emit(report::error("estimate", e.what()));
  }
}

int cmd_solve(const std::string& path, const Common& c) {
  try {
    install_limits("solve", c);
    auto sys = read_system(read_file(path));
    Rat eps = parse_rational(c.eps);
    if (eps <= 0) throw DataError("--eps must be positive");
    std::optional<std::chrono::steady_clock::time_point> deadline;
    if (c.timeout > 0)
      deadline = std::chrono::steady_clock::now() +
                 std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(c.timeout));
    auto t0 = std::chrono::steady_clock::now();
    SolveOutcome s;
    try {
      s = solve_system(sys, eps, deadline);
    } catch (const Timeout& e) {
      return emit(report::header("solve", "timeout", exit_timeout, e.what()));
    }
    dump_solution(c, sys, &s);
    return emit(report::solve(sys, s, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()));
  } catch (const std::exception& e) {
    return emit(report::error("solve", e.what()));
  }
}

int cmd_bench(const std::string& corpus, const std::string& csv_path, const std::string& json_path, std::size_t jobs,
              const Common& c) {
  try {
    BenchOptions bo;
    if (c.timeout > 0) bo.timeout_seconds = c.timeout;
    if (c.mem_limit > 0) bo.mem_limit_mb = c.mem_limit;
    bo.jobs = jobs;
    bo.eps = parse_rational(c.eps);
    auto rows = run_bench(discover_corpus(corpus), bo);
    std::ostringstream csv;
    csv << csv_header() << "\n";
    for (const auto& r : rows) csv << csv_line(r) << "\n";
    auto j = bench_report(rows);
    if (!csv_path.empty()) {
      std::ofstream(csv_path) << csv.str();
    } else {
      std::cerr << csv.str();
    }
    if (!json_path.empty()) std::ofstream(json_path) << j.dump(2) << "\n";
    std::cout << j.dump(2) << std::endl;
    return exit_ok;
  } catch (const std::exception& e) {
    return emit(report::error("bench", e.what()));
  }
}

void add_common(CLI::App* app, Common& c, bool estimation) {
  if (estimation) {
    app->add_option("--tstar", c.tstar, "Expansion time (default: first data time)");
    app->add_option("--orders", c.orders, "Derivative order per output, comma separated (one value applies to all)");
    app->add_option("--interp", c.interp, "Interpolant kind")->check(CLI::IsMember({"poly", "rational"}));
    app->add_option("--bounds", c.bounds, "Parameter constraints, e.g. 'k>0', 'mu in [0,1]', '*>=0'");
  }
  app->add_option("--eps", c.eps, "Root interval width for certified boxes");
  app->add_option("--timeout", c.timeout, "Time limit in seconds");
  app->add_option("--mem-limit", c.mem_limit, "Address-space limit in MiB");
  if (estimation || app->get_name() == "solve")
    app->add_option("--dump", c.dump, "Print intermediate objects to stderr")->check(CLI::IsMember({"system", "gb", "rur"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified parameter estimation for rational ODE models"};
  app.require_subcommand(1);
  Common common;

  std::string model_path, data_path, system_path, corpus = "corpus", csv_path, json_path;
  std::size_t jobs = 1;

  auto* est = app.add_subcommand("estimate", "Estimate parameters from a model and data");
  est->add_option("--model", model_path, "Model file")->required();
  est->add_option("--data", data_path, "CSV data file")->required();
  add_common(est, common, true);

  auto* solve = app.add_subcommand("solve", "Solve a polynomial system");
  solve->add_option("--system", system_path, "System file")->required();
  add_common(solve, common, false);

  auto* bench = app.add_subcommand("bench", "Run the benchmark corpus");
  bench->add_option("--corpus", corpus, "Corpus directory");
  bench->add_option("--csv", csv_path, "Write the CSV table here (default: stderr)");
  bench->add_option("--json", json_path, "Also write the JSON report here");
  bench->add_option("--jobs", jobs, "Concurrent cases")->check(CLI::PositiveNumber);
  add_common(bench, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    const char* cmd = est->parsed() ? "estimate" : solve->parsed() ? "solve" : bench->parsed() ? "bench" : "cli";
    return emit(report::error(cmd, e.what()));
  }
  if (est->parsed()) return cmd_estimate(model_path, data_path, common);
  if (solve->parsed()) return cmd_solve(system_path, common);
  return cmd_bench(corpus, csv_path, json_path, jobs, common);
}
