// ============================================================================
// tools/lars.cpp — command-line front end
// ============================================================================
//
// Design notes
// ------------
// Two modes share one binary:
//
//   - Streaming: parse a program, ingest a signal file (or stdin), and
//     print one model line per time point from 0 to the evaluation horizon.
//     The horizon defaults to the last signal's time and can be pinned
//     with --until. Signals beyond the horizon are ignored.
//     With --dump-encoding the run prints the final encoding state
//     instead of model lines: the full static encoding for the oneshot
//     strategy, the annotated rule store for the incremental one.
//
//   - Benchmark: generate a named scenario instance and replay it through
//     a push-mode engine, reporting init, per-tick, and total seconds as
//     CSV. Without --strategy both strategies are measured, one row each.
//
// Flag parsing is a plain linear scan; every error path prints a one-line
// message to stderr and exits nonzero (2 for usage problems, 1 for module
// errors surfacing as exceptions).
// ============================================================================

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lars/bench.hpp"
#include "lars/engine.hpp"
#include "lars/parser.hpp"
#include "lars/scenario.hpp"

namespace {

int usage(std::ostream& os) {
  os << "usage:\n"
        "  lars --program FILE [--input FILE|-] [--strategy oneshot|incremental]\n"
        "       [--mode push|pull] [--until T] [--gc-cutoff] [--dump-encoding]\n"
        "  lars --bench A|B --setup A1|A2|B1|B2 --window N --timepoints TP\n"
        "       [--seed S] [--runs R] [--warmup W] [--csv FILE]\n"
        "       [--strategy oneshot|incremental] [--gc-cutoff]\n"
        "\n"
        "Streaming mode reads one signal per line (\"<time> <atom>\", times\n"
        "nondecreasing) and prints one line per time point: \"@t model: ...\"\n"
        "with atoms sorted, \"@t no-model\", or \"@t unknown (reason)\".\n"
        "Defaults: --strategy incremental, --mode pull, --until last signal.\n"
        "\n"
        "Benchmark mode prints CSV (setup,strategy,n,tp,t_init,t_tick,t_total)\n"
        "to stdout or --csv FILE. Defaults: --seed 1, --runs 5, --warmup 2,\n"
        "both strategies when --strategy is omitted.\n";
  return 2;
}

struct Options {
  std::string program_file;
  std::string input;
  std::optional<lars::Strategy> strategy;
  lars::Mode mode = lars::Mode::Pull;
  std::optional<lars::TimePoint> until;
  bool gc_cutoff = false;
  bool dump_encoding = false;

  std::string bench_scenario;
  std::string setup;
  long long window = 0;
  lars::TimePoint timepoints = 0;
  unsigned seed = 1;
  int runs = 5;
  int warmup = 2;
  std::string csv_file;
};

// Parses argv; returns nullopt after printing usage on malformed input.
std::optional<Options> parse_args(int argc, char** argv) {
  Options opt;
  auto value = [&](int& i) -> const char* {
    if (i + 1 >= argc) {
      std::cerr << "lars: flag " << argv[i] << " needs a value\n";
      return nullptr;
    }
    return argv[++i];
  };
  for (int i = 1; i < argc; ++i) {
    const std::string flag = argv[i];
    const char* v = nullptr;
    if (flag == "--gc-cutoff") {
      opt.gc_cutoff = true;
    } else if (flag == "--dump-encoding") {
      opt.dump_encoding = true;
    } else if (flag == "--program") {
      if (!(v = value(i))) return std::nullopt;
      opt.program_file = v;
    } else if (flag == "--input") {
      if (!(v = value(i))) return std::nullopt;
      opt.input = v;
    } else if (flag == "--strategy") {
      if (!(v = value(i))) return std::nullopt;
      const std::string s = v;
      if (s == "oneshot") {
        opt.strategy = lars::Strategy::Oneshot;
      } else if (s == "incremental") {
        opt.strategy = lars::Strategy::Incremental;
      } else {
        std::cerr << "lars: unknown strategy " << s << "\n";
        return std::nullopt;
      }
    } else if (flag == "--mode") {
      if (!(v = value(i))) return std::nullopt;
      const std::string s = v;
      if (s == "push") {
        opt.mode = lars::Mode::Push;
      } else if (s == "pull") {
        opt.mode = lars::Mode::Pull;
      } else {
        std::cerr << "lars: unknown mode " << s << "\n";
        return std::nullopt;
      }
    } else if (flag == "--until") {
      if (!(v = value(i))) return std::nullopt;
      opt.until = std::stoll(v);
    } else if (flag == "--bench") {
      if (!(v = value(i))) return std::nullopt;
      opt.bench_scenario = v;
    } else if (flag == "--setup") {
      if (!(v = value(i))) return std::nullopt;
      opt.setup = v;
    } else if (flag == "--window") {
      if (!(v = value(i))) return std::nullopt;
      opt.window = std::stoll(v);
    } else if (flag == "--timepoints") {
      if (!(v = value(i))) return std::nullopt;
      opt.timepoints = std::stoll(v);
    } else if (flag == "--seed") {
      if (!(v = value(i))) return std::nullopt;
      opt.seed = static_cast<unsigned>(std::stoul(v));
    } else if (flag == "--runs") {
      if (!(v = value(i))) return std::nullopt;
      opt.runs = std::stoi(v);
    } else if (flag == "--warmup") {
      if (!(v = value(i))) return std::nullopt;
      opt.warmup = std::stoi(v);
    } else if (flag == "--csv") {
      if (!(v = value(i))) return std::nullopt;
      opt.csv_file = v;
    } else {
      std::cerr << "lars: unknown flag " << flag << "\n";
      return std::nullopt;
    }
  }
  return opt;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_stream(const Options& opt) {
  const lars::LarsProgram program =
      lars::parse_program(read_file(opt.program_file));

  std::vector<lars::SignalEvent> events;
  if (!opt.input.empty()) {
    std::ifstream file;
    if (opt.input != "-") {
      file.open(opt.input);
      if (!file) throw std::runtime_error("cannot open " + opt.input);
    }
    std::istream& in = opt.input == "-" ? std::cin : file;
    std::string line;
    lars::TimePoint last = 0;
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '%') continue;
      lars::SignalEvent ev = lars::parse_signal(line, program);
      if (!events.empty() && ev.time < last)
        throw std::runtime_error("signal times regress at line \"" + line +
                                 "\"");
      last = ev.time;
      events.push_back(std::move(ev));
    }
  }

  lars::TimePoint until = 0;
  if (opt.until) {
    until = *opt.until;
  } else if (!events.empty()) {
    until = events.back().time;
  }

  lars::EngineConfig cfg;
  cfg.program = program;
  cfg.strategy = opt.strategy.value_or(lars::Strategy::Incremental);
  cfg.mode = opt.mode;
  cfg.gc_cutoff = opt.gc_cutoff;
  lars::Engine engine(std::move(cfg));

  std::size_t next = 0;
  for (lars::TimePoint t = 0; t <= until; ++t) {
    std::vector<lars::Atom> batch;
    while (next < events.size() && events[next].time == t)
      batch.push_back(events[next++].atom);
    engine.append(t, batch);
    if (opt.dump_encoding) continue;
    const lars::EngineResult r = engine.evaluate(t);
    if (r.is_model()) {
      std::cout << lars::format_model(
                       t, std::vector<lars::Atom>(r.atoms.begin(),
                                                  r.atoms.end()))
                << "\n";
    } else if (r.kind == lars::EngineResult::Kind::NoModel) {
      std::cout << lars::format_no_model(t) << "\n";
    } else {
      std::cout << lars::format_unknown(t, r.reason) << "\n";
    }
  }
  if (opt.dump_encoding) std::cout << engine.encoding_text();
  return 0;
}

int run_bench(const Options& opt) {
  if (opt.setup.size() != 2 || opt.setup[0] != opt.bench_scenario[0] ||
      (opt.setup != "A1" && opt.setup != "A2" && opt.setup != "B1" &&
       opt.setup != "B2")) {
    std::cerr << "lars: --bench " << opt.bench_scenario
              << " needs a matching --setup A1|A2|B1|B2\n";
    return 2;
  }
  if (opt.window < 1 || opt.timepoints < 1) {
    std::cerr << "lars: benchmark needs --window >= 1 and --timepoints >= 1\n";
    return 2;
  }

  std::vector<lars::Strategy> strategies;
  if (opt.strategy) {
    strategies.push_back(*opt.strategy);
  } else {
    strategies = {lars::Strategy::Oneshot, lars::Strategy::Incremental};
  }

  std::ofstream file;
  if (!opt.csv_file.empty()) {
    file.open(opt.csv_file);
    if (!file) throw std::runtime_error("cannot open " + opt.csv_file);
  }
  std::ostream& out = opt.csv_file.empty() ? std::cout : file;

  const lars::ScenarioInstance inst = lars::generate_scenario(
      opt.setup, opt.window, opt.timepoints, opt.seed);
  out << lars::bench_csv_header() << "\n";
  for (lars::Strategy s : strategies) {
    lars::BenchRequest req;
    req.setup = opt.setup;
    req.strategy = s;
    req.n = opt.window;
    req.tp = opt.timepoints;
    req.seed = opt.seed;
    req.runs = opt.runs;
    req.warmup = opt.warmup;
    req.gc_cutoff = opt.gc_cutoff;
    out << lars::benchmark(inst.program, inst.schedule, req).csv_row() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc <= 1) return usage(std::cout);
  const std::optional<Options> opt = parse_args(argc, argv);
  if (!opt) return 2;
  try {
    if (!opt->bench_scenario.empty()) return run_bench(*opt);
    if (opt->program_file.empty()) {
      std::cerr << "lars: --program is required in streaming mode\n";
      return 2;
    }
    return run_stream(*opt);
  } catch (const std::exception& err) {
    std::cerr << "lars: " << err.what() << "\n";
    return 1;
  }
}
