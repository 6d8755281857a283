#pragma once

#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/time.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <new>
#include <sstream>

#include "paramcert/report.hpp"

namespace paramcert {

//-----------------------------------------------------------------------------
// Process limits
//-----------------------------------------------------------------------------

namespace detail {

inline std::string& limit_message() {
  static std::string m;
  return m;
}
inline int& limit_exit_code() {
  static int c = exit_out_of_memory;
  return c;
}

[[noreturn]] inline void die_out_of_memory() {
  const auto& m = limit_message();
  if (!m.empty()) {
    [[maybe_unused]] auto n = ::write(STDOUT_FILENO, m.data(), m.size());
  }
  ::_exit(limit_exit_code());
}

inline void* gmp_alloc(std::size_t n) {
  void* p = std::malloc(n);
  if (!p) die_out_of_memory();
  return p;
}
inline void* gmp_realloc(void* p, std::size_t, std::size_t n) {
  void* q = std::realloc(p, n);
  if (!q) die_out_of_memory();
  return q;
}
inline void gmp_free(void* p, std::size_t) { std::free(p); }

inline std::string& timeout_message() {
  static std::string m;
  return m;
}

inline void on_alarm(int) {
  const auto& m = timeout_message();
  if (!m.empty()) {
    [[maybe_unused]] auto n = ::write(STDOUT_FILENO, m.data(), m.size());
  }
  ::_exit(exit_timeout);
}

}  // namespace detail

/// Caps the address space; allocation failure prints `message` to stdout and exits with code 5.
inline void apply_memory_limit(std::optional<std::size_t> megabytes, std::string message = {}) {
  detail::limit_message() = std::move(message);
  std::set_new_handler([] { detail::die_out_of_memory(); });
  mp_set_memory_functions(detail::gmp_alloc, detail::gmp_realloc, detail::gmp_free);
  if (megabytes) {
    rlimit rl{};
    rl.rlim_cur = rl.rlim_max = static_cast<rlim_t>(*megabytes) * 1024 * 1024;
    setrlimit(RLIMIT_AS, &rl);
  }
}

/// Hard wall-clock limit: prints `message` to stdout and exits with code 4.
inline void apply_time_limit(double seconds, std::string message = {}) {
  detail::timeout_message() = std::move(message);
  struct sigaction sa {};
  sa.sa_handler = detail::on_alarm;
  sigaction(SIGALRM, &sa, nullptr);
  itimerval it{};
  it.it_value.tv_sec = static_cast<time_t>(seconds);
  it.it_value.tv_usec = static_cast<suseconds_t>((seconds - static_cast<double>(it.it_value.tv_sec)) * 1e6);
  if (it.it_value.tv_sec == 0 && it.it_value.tv_usec == 0) it.it_value.tv_usec = 1;
  setitimer(ITIMER_REAL, &it, nullptr);
}

//-----------------------------------------------------------------------------
// Corpus
//-----------------------------------------------------------------------------

struct BenchCase {
  std::string name;
  std::filesystem::path dir;
};

struct BenchRow {
  std::string model;
  std::size_t states = 0;
  std::size_t params = 0;
  double time_s = 0;
  std::optional<double> max_rel_err_pct;
  std::string status = "no-estimate";
  std::string message;
};

struct BenchOptions {
  std::optional<double> timeout_seconds;
  std::optional<std::size_t> mem_limit_mb;
  std::size_t jobs = 1;
  Rat eps = Rat(1, 1000000000);
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Subdirectories holding model.ode, data.csv and truth.json, sorted by name.
inline std::vector<BenchCase> discover_corpus(const std::filesystem::path& root) {
  std::vector<BenchCase> out;
  if (!std::filesystem::is_directory(root)) throw std::runtime_error("corpus directory not found: " + root.string());
  for (const auto& e : std::filesystem::directory_iterator(root)) {
    if (!e.is_directory()) continue;
    if (std::filesystem::exists(e.path() / "model.ode") && std::filesystem::exists(e.path() / "data.csv"))
      out.push_back({e.path().filename().string(), e.path()});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

/// Truth values keyed by parameter or state name: {"params": {...}, "initial": {...}}.
inline std::map<std::string, double> read_truth(const std::filesystem::path& p) {
  auto j = nlohmann::json::parse(read_file(p));
  std::map<std::string, double> m;
  for (const char* key : {"params", "initial"})
    if (j.contains(key))
      for (auto& [k, v] : j[key].items()) m[k] = v.get<double>();
  return m;
}

/// Per-case overrides from options.json: tstar, orders, interp, bounds.
inline EstimateOptions read_case_options(const std::filesystem::path& dir, const Rat& eps) {
  EstimateOptions o;
  o.eps = eps;
  auto p = dir / "options.json";
  if (!std::filesystem::exists(p)) return o;
  auto j = nlohmann::json::parse(read_file(p));
  if (j.contains("tstar")) o.tstar = parse_rational(j["tstar"].get<std::string>());
  if (j.contains("orders")) o.orders = j["orders"].get<std::vector<int>>();
  if (j.contains("interp")) o.interp = j["interp"].get<std::string>() == "rational" ? InterpKind::rational : InterpKind::polynomial;
  if (j.contains("bounds")) o.bounds = parse_bounds(j["bounds"].get<std::string>());
  return o;
}

/// Runs one case in the current process.
inline BenchRow run_case(const BenchCase& c, const Rat& eps) {
  BenchRow row;
  row.model = c.name;
  auto t0 = std::chrono::steady_clock::now();
  try {
    Model model = parse_model(read_file(c.dir / "model.ode"));
    row.states = model.states.size();
    row.params = model.params.size();
    Dataset data = parse_dataset(read_file(c.dir / "data.csv"), model);
    auto opts = read_case_options(c.dir, eps);
    auto res = estimate(model, data, opts);
    row.status = to_string(res.status);
    row.message = res.message;
    if (res.status == Status::ok && std::filesystem::exists(c.dir / "truth.json")) {
      auto truth = read_truth(c.dir / "truth.json");
      row.max_rel_err_pct = relative_error(res.candidates.front().point_estimate(), truth).max_relative_pct;
    }
  } catch (const Timeout& e) {
    row.status = "timeout";
    row.message = e.what();
  } catch (const std::exception& e) {
    row.status = "no-estimate";
    row.message = e.what();
  }
  row.time_s = detail::seconds_since(t0);
  return row;
}

inline nlohmann::ordered_json to_json(const BenchRow& r) {
  nlohmann::ordered_json j;
  j["model"] = r.model;
  j["states"] = r.states;
  j["params"] = r.params;
  j["time_s"] = r.time_s;
  if (r.max_rel_err_pct)
    j["max_rel_err_pct"] = *r.max_rel_err_pct;
  else
    j["max_rel_err_pct"] = nullptr;
  j["status"] = r.status;
  j["message"] = r.message;
  return j;
}

inline BenchRow row_from_json(const nlohmann::json& j) {
  BenchRow r;
  r.model = j.at("model").get<std::string>();
  r.states = j.at("states").get<std::size_t>();
  r.params = j.at("params").get<std::size_t>();
  r.time_s = j.at("time_s").get<double>();
  if (!j.at("max_rel_err_pct").is_null()) r.max_rel_err_pct = j.at("max_rel_err_pct").get<double>();
  r.status = j.at("status").get<std::string>();
  r.message = j.at("message").get<std::string>();
  return r;
}

inline std::string csv_header() { return "model,states,params,time_s,max_rel_err_pct,status"; }

inline std::string csv_line(const BenchRow& r) {
  std::ostringstream os;
  os << r.model << "," << r.states << "," << r.params << ",";
  os << std::fixed << std::setprecision(3) << r.time_s << ",";
  if (r.max_rel_err_pct)
    os << std::setprecision(4) << *r.max_rel_err_pct;
  else
    os << "n/a";
  os << "," << r.status;
  return os.str();
}

/// Runs every case in its own child process, at most `jobs` at a time, each under the time
/// and memory limits. A failing case only affects its own row.
inline std::vector<BenchRow> run_bench(const std::vector<BenchCase>& cases, const BenchOptions& opt) {
  struct Running {
    std::size_t index;
    pid_t pid;
    int fd;
    std::string out;
    std::chrono::steady_clock::time_point start;
    bool eof = false;
    bool killed = false;
  };
  std::vector<BenchRow> rows(cases.size());
  std::vector<Running> running;
  std::size_t next = 0;
  std::size_t jobs = std::max<std::size_t>(opt.jobs, 1);

  auto launch = [&](std::size_t i) {
    int fds[2];
    if (pipe(fds) != 0) throw std::runtime_error("pipe failed");
    std::cout.flush();
    std::cerr.flush();
    pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
      ::close(fds[0]);
      ::dup2(fds[1], STDOUT_FILENO);
      ::close(fds[1]);
      BenchRow skeleton;
      skeleton.model = cases[i].name;
      skeleton.status = "out-of-memory";
      apply_memory_limit(opt.mem_limit_mb, to_json(skeleton).dump() + "\n");
      auto row = run_case(cases[i], opt.eps);
      auto text = to_json(row).dump() + "\n";
      [[maybe_unused]] auto n = ::write(STDOUT_FILENO, text.data(), text.size());
      ::_exit(0);
    }
    ::close(fds[1]);
    running.push_back({i, pid, fds[0], {}, std::chrono::steady_clock::now()});
  };

  auto finish = [&](Running& r) {
    int wstatus = 0;
    ::waitpid(r.pid, &wstatus, 0);
    ::close(r.fd);
    BenchRow row;
    row.model = cases[r.index].name;
    double elapsed = detail::seconds_since(r.start);
    bool parsed = false;
    if (!r.killed && !r.out.empty()) {
      try {
        row = row_from_json(nlohmann::json::parse(r.out.substr(0, r.out.find('\n'))));
        parsed = true;
      } catch (const std::exception&) {
      }
    }
    if (r.killed) {
      row.status = "timeout";
      row.message = "exceeded the time limit";
    } else if (!parsed) {
      if (WIFEXITED(wstatus) && WEXITSTATUS(wstatus) == exit_out_of_memory) {
        row.status = "out-of-memory";
      } else if (WIFSIGNALED(wstatus) && opt.mem_limit_mb) {
        row.status = "out-of-memory";
        row.message = "terminated by signal " + std::to_string(WTERMSIG(wstatus));
      } else {
        row.status = "no-estimate";
        row.message = "worker failed";
      }
    }
    if (row.status == "out-of-memory" && row.message.empty()) row.message = "exceeded the memory limit";
    row.time_s = elapsed;
    if (row.states == 0) {
      try {
        auto m = parse_model(read_file(cases[r.index].dir / "model.ode"));
        row.states = m.states.size();
        row.params = m.params.size();
      } catch (const std::exception&) {
      }
    }
    rows[r.index] = row;
  };

  while (next < cases.size() || !running.empty()) {
    while (next < cases.size() && running.size() < jobs) launch(next++);
    std::vector<pollfd> pfds;
    for (const auto& r : running) pfds.push_back({r.fd, POLLIN, 0});
    int wait_ms = 200;
    ::poll(pfds.data(), pfds.size(), wait_ms);
    for (std::size_t k = 0; k < running.size(); ++k) {
      auto& r = running[k];
      if (pfds[k].revents & (POLLIN | POLLHUP | POLLERR)) {
        char buf[4096];
        auto n = ::read(r.fd, buf, sizeof buf);
        if (n > 0)
          r.out.append(buf, static_cast<std::size_t>(n));
        else
          r.eof = true;
      }
      if (!r.eof && opt.timeout_seconds && detail::seconds_since(r.start) > *opt.timeout_seconds) {
        ::kill(r.pid, SIGKILL);
        r.killed = true;
        r.eof = true;
      }
    }
    for (std::size_t k = running.size(); k-- > 0;)
      if (running[k].eof) {
        finish(running[k]);
        running.erase(running.begin() + static_cast<std::ptrdiff_t>(k));
      }
  }
  return rows;
}

inline nlohmann::ordered_json bench_report(const std::vector<BenchRow>& rows) {
  auto j = report::header("bench", "ok", exit_ok, "");
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  j["rows"] = arr;
  return j;
}

}  // namespace paramcert
