#include "zovr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "zovr/log.hpp"

namespace zovr {

namespace pt = boost::property_tree;

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::logic_error("to_chars failed");
  return std::string(buf, end);
}

double parse_double(const std::string& text, const std::string& key) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v))
    throw ConfigError("'" + key + "': expected a finite number, got '" + text + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& text, const std::string& key) {
  std::uint64_t v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw ConfigError("'" + key + "': expected a nonnegative integer, got '" + text + "'");
  return v;
}

// Reads typed keys from one section and rejects anything it does not know.
class SectionReader {
 public:
  SectionReader(const pt::ptree& root, std::string name) : name_(std::move(name)) {
    if (auto child = root.get_child_optional(name_)) section_ = &*child;
  }

  ~SectionReader() noexcept(false) {
    if (!section_ || std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : *section_) {
      if (!seen_.count(key)) throw ConfigError("unknown key '" + name_ + "." + key + "'");
    }
  }

  std::optional<std::string> raw(const std::string& key) {
    seen_.insert(key);
    if (!section_) return std::nullopt;
    auto v = section_->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    if (v->empty()) throw ConfigError("'" + name_ + "." + key + "' is empty");
    return *v;
  }

  std::string text(const std::string& key, std::string fallback) {
    return raw(key).value_or(std::move(fallback));
  }
  double number(const std::string& key, double fallback) {
    auto v = raw(key);
    return v ? parse_double(*v, name_ + "." + key) : fallback;
  }
  std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
    auto v = raw(key);
    return v ? parse_uint(*v, name_ + "." + key) : fallback;
  }

 private:
  std::string name_;
  const pt::ptree* section_ = nullptr;
  std::set<std::string> seen_;
};

const std::set<std::string> kSections = {"topology", "objective", "algorithm", "schedule",
                                         "stop",     "run",       "output",    "meta"};

}  // namespace

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  const auto& ra = a.run;
  const auto& rb = b.run;
  const auto& sa = ra.schedule;
  const auto& sb = rb.schedule;
  return a.topology.kind == b.topology.kind && a.topology.n_agents == b.topology.n_agents &&
         a.topology.prob == b.topology.prob && a.topology.seed == b.topology.seed &&
         a.objective.kind == b.objective.kind && a.objective.dim == b.objective.dim &&
         a.objective.seed == b.objective.seed && a.objective.file == b.objective.file &&
         ra.algorithm == rb.algorithm && ra.p == rb.p && ra.counting == rb.counting &&
         ra.tracker_init == rb.tracker_init && sa.step_size().rule == sb.step_size().rule &&
         sa.step_size().alpha0 == sb.step_size().alpha0 &&
         sa.step_size().exponent == sb.step_size().exponent && sa.u0() == sb.u0() &&
         sa.q() == sb.q() && ra.stop.kind == rb.stop.kind && ra.stop.value == rb.stop.value &&
         ra.seed == rb.seed && ra.init == rb.init && ra.init_scale == rb.init_scale &&
         a.output == b.output && a.notes == b.notes;
}

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }
  for (const auto& [name, section] : root) {
    if (!kSections.count(name)) throw ConfigError("unknown section [" + name + "]");
    if (section.empty() && !section.data().empty())
      throw ConfigError("key '" + name + "' outside any section");
  }

  ExperimentConfig c;
  {
    SectionReader s(root, "topology");
    c.topology.kind = parse_topology_kind(s.text("kind", std::string(to_string(c.topology.kind))));
    c.topology.n_agents = s.integer("n_agents", c.topology.n_agents);
    c.topology.prob = s.number("prob", c.topology.prob);
    c.topology.seed = s.integer("seed", c.topology.seed);
  }
  {
    SectionReader s(root, "objective");
    c.objective.kind = parse_objective_kind(s.text("kind", std::string(to_string(c.objective.kind))));
    c.objective.dim = s.integer("dim", c.objective.dim);
    c.objective.seed = s.integer("seed", c.objective.seed);
    c.objective.file = s.text("file", "");
  }
  StepSize step;
  double u0 = c.run.schedule.u0();
  double q = c.run.schedule.q();
  {
    SectionReader s(root, "algorithm");
    c.run.algorithm = parse_algorithm(s.text("name", std::string(to_string(c.run.algorithm))));
    c.run.p = s.number("p", c.run.p);
    c.run.counting = parse_counting_mode(s.text("counting", std::string(to_string(c.run.counting))));
    c.run.tracker_init =
        parse_tracker_init(s.text("tracker_init", std::string(to_string(c.run.tracker_init))));
  }
  {
    SectionReader s(root, "schedule");
    step.rule = parse_step_rule(s.text("step_rule", std::string(to_string(step.rule))));
    step.alpha0 = s.number("alpha", step.alpha0);
    step.exponent = s.number("step_exponent", step.exponent);
    u0 = s.number("u0", u0);
    q = s.number("q", q);
  }
  c.run.schedule = Schedule(step, u0, q);
  {
    SectionReader s(root, "stop");
    c.run.stop.kind = parse_stop_kind(s.text("kind", std::string(to_string(c.run.stop.kind))));
    c.run.stop.value = s.integer("value", c.run.stop.value);
  }
  {
    SectionReader s(root, "run");
    c.run.seed = s.integer("seed", c.run.seed);
    c.run.init = parse_init_mode(s.text("init", std::string(to_string(c.run.init))));
    c.run.init_scale = s.number("init_scale", c.run.init_scale);
  }
  {
    SectionReader s(root, "output");
    c.output = s.text("path", c.output.string());
  }
  if (auto meta = root.get_child_optional("meta")) {
    for (const auto& [key, value] : *meta) c.notes.emplace_back(key, value.data());
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  const auto& r = c.run;
  const auto& st = r.schedule.step_size();
  out << "[topology]\n"
      << "kind = " << to_string(c.topology.kind) << '\n'
      << "n_agents = " << c.topology.n_agents << '\n'
      << "prob = " << format_double(c.topology.prob) << '\n'
      << "seed = " << c.topology.seed << "\n\n";
  out << "[objective]\n"
      << "kind = " << to_string(c.objective.kind) << '\n'
      << "dim = " << c.objective.dim << '\n'
      << "seed = " << c.objective.seed << '\n';
  if (!c.objective.file.empty()) out << "file = " << c.objective.file.string() << '\n';
  out << '\n';
  out << "[algorithm]\n"
      << "name = " << to_string(r.algorithm) << '\n'
      << "p = " << format_double(r.p) << '\n'
      << "counting = " << to_string(r.counting) << '\n'
      << "tracker_init = " << to_string(r.tracker_init) << "\n\n";
  out << "[schedule]\n"
      << "step_rule = " << to_string(st.rule) << '\n'
      << "alpha = " << format_double(st.alpha0) << '\n'
      << "step_exponent = " << format_double(st.exponent) << '\n'
      << "u0 = " << format_double(r.schedule.u0()) << '\n'
      << "q = " << format_double(r.schedule.q()) << "\n\n";
  out << "[stop]\n"
      << "kind = " << to_string(r.stop.kind) << '\n'
      << "value = " << r.stop.value << "\n\n";
  out << "[run]\n"
      << "seed = " << r.seed << '\n'
      << "init = " << to_string(r.init) << '\n'
      << "init_scale = " << format_double(r.init_scale) << "\n\n";
  out << "[output]\n"
      << "path = " << c.output.string() << '\n';
  if (!c.notes.empty()) {
    out << "\n[meta]\n";
    for (const auto& [key, value] : c.notes) out << key << " = " << value << '\n';
  }
}

std::string to_string(const ExperimentConfig& config) {
  std::ostringstream out;
  write_config(out, config);
  return out.str();
}

void validate(const ExperimentConfig& c) {
  if (c.topology.n_agents < 2) throw ConfigError("topology.n_agents must be at least 2");
  if (c.topology.kind == TopologyKind::erdos_renyi && !(c.topology.prob > 0.0 && c.topology.prob <= 1.0))
    throw ConfigError("topology.prob must lie in (0, 1] for erdos_renyi");
  if (c.objective.file.empty() && c.objective.dim < 1) throw ConfigError("objective.dim must be positive");
  if (!(c.run.p >= 0.0 && c.run.p <= 1.0)) throw ConfigError("algorithm.p must lie in [0, 1]");
  if (c.run.stop.value == 0) throw ConfigError("stop.value must be positive");
  if (!(c.run.init_scale >= 0.0)) throw ConfigError("run.init_scale must be nonnegative");
  if (c.output.empty()) throw ConfigError("output.path is empty");
}

std::shared_ptr<const ObjectiveSpec> build_objective(const ExperimentConfig& c) {
  if (c.objective.file.empty()) {
    return std::make_shared<const ObjectiveSpec>(
        make_objective(c.objective.kind, c.topology.n_agents, c.objective.dim, c.objective.seed));
  }
  std::ifstream in(c.objective.file);
  if (!in) throw ConfigError("cannot open objective dump " + c.objective.file.string());
  auto spec = std::make_shared<const ObjectiveSpec>(read_objective(in));
  if (spec->n_agents() != c.topology.n_agents)
    throw ConfigError("objective dump has " + std::to_string(spec->n_agents()) +
                      " agents, topology has " + std::to_string(c.topology.n_agents));
  return spec;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  auto p = csv;
  p.replace_extension(".cfg");
  return p;
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  const auto topology = build_topology(config.topology);
  const auto weights = metropolis_weights(topology);
  const auto spec = build_objective(config);

  ExperimentResult result;
  result.csv = config.output;
  result.sidecar = sidecar_path(config.output);
  if (result.sidecar == result.csv) throw ConfigError("output path must not end in .cfg");

  result.rows = run(config.run, weights, spec);

  auto csv = open_for_write(result.csv);
  write_csv(csv, result.rows);
  if (!csv.flush()) throw Error("write failed for " + result.csv.string());

  auto side = open_for_write(result.sidecar);
  write_config(side, config);
  if (!side.flush()) throw Error("write failed for " + result.sidecar.string());
  return result;
}

std::string_view to_string(Suite suite) {
  switch (suite) {
    case Suite::fig1: return "fig1";
    case Suite::fig2: return "fig2";
    case Suite::fig3: return "fig3";
  }
  return "unknown";
}

Suite parse_suite(std::string_view name) {
  for (auto s : {Suite::fig1, Suite::fig2, Suite::fig3}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown suite '" + std::string(name) + "'");
}

double fig3_probability(std::size_t d) {
  return std::min(0.1, 8.0 / static_cast<double>(d));
}

std::vector<ExperimentConfig> suite_configs(Suite suite, std::uint64_t seed, std::uint64_t budget,
                                            const std::filesystem::path& out_dir) {
  if (budget == 0) throw ConfigError("suite budget must be positive");
  ExperimentConfig base;
  base.topology = {TopologyKind::erdos_renyi, kSuiteAgents, kSuiteEdgeProb, seed};
  base.objective = {ObjectiveKind::benchmark, kSuiteDim, seed, {}};
  base.run.schedule = Schedule(StepSize{StepRule::constant, kSuiteStep, 0.5}, kSuiteU0, kSuiteQ);
  base.run.stop = StopCondition::agent_query_budget(budget);
  base.run.seed = seed;
  base.run.init = InitMode::shared;
  base.notes = {{"suite", std::string(to_string(suite))},
                {"budget_unit", "queries per agent"}};

  auto named = [&](ExperimentConfig c, const std::string& stem) {
    c.output = out_dir / (std::string(to_string(suite)) + "_" + stem + ".csv");
    return c;
  };

  std::vector<ExperimentConfig> configs;
  switch (suite) {
    case Suite::fig1: {
      auto vr = base;
      vr.run.algorithm = AlgorithmKind::vrgt;
      vr.run.p = 0.1;
      configs.push_back(named(vr, "vrgt"));
      auto dgd = base;
      dgd.run.algorithm = AlgorithmKind::dgd2p;
      configs.push_back(named(dgd, "dgd2p"));
      auto gt = base;
      gt.run.algorithm = AlgorithmKind::gt2d;
      configs.push_back(named(gt, "gt2d"));
      break;
    }
    case Suite::fig2:
      for (double p : {0.2, 0.5, 0.8, 1.0}) {
        auto c = base;
        c.run.algorithm = AlgorithmKind::vrgt;
        c.run.p = p;
        configs.push_back(named(c, "p" + format_double(p)));
      }
      break;
    case Suite::fig3:
      for (std::size_t d : {30u, 100u, 200u, 300u}) {
        auto c = base;
        c.objective.dim = d;
        c.run.algorithm = AlgorithmKind::vrgt;
        c.run.p = fig3_probability(d);
        c.notes.emplace_back("p_mapping", "min(0.1, 8/d)");
        configs.push_back(named(c, "d" + std::to_string(d)));
      }
      break;
  }
  return configs;
}

std::vector<std::filesystem::path> run_comparison(Suite suite, std::uint64_t seed,
                                                  std::uint64_t budget,
                                                  const std::filesystem::path& out_dir,
                                                  unsigned jobs) {
  const auto configs = suite_configs(suite, seed, budget, out_dir);
  std::vector<std::filesystem::path> paths(configs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        paths[i] = run_experiment(configs[i]).csv;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const unsigned n_threads = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(configs.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return paths;
}

DecayFit fit_decay_rate(std::span<const MetricsRow> rows) {
  if (rows.size() < kMinDecayRows)
    throw std::invalid_argument("fit_decay_rate needs at least " + std::to_string(kMinDecayRows) +
                                " rows, got " + std::to_string(rows.size()));
  DecayFit fit;
  std::vector<double> log_k;
  std::vector<double> log_avg;
  double running = 0.0;
  const std::size_t start = rows.size() / 2;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    double gap = rows[j].stat_gap;
    if (!(gap > 0.0)) {
      gap = 1e-300;
      ++fit.clamped;
    }
    running += gap;
    if (j >= start) {
      const double avg = running / static_cast<double>(j + 1);
      log_k.push_back(std::log(static_cast<double>(std::max<std::size_t>(rows[j].k, 1))));
      log_avg.push_back(std::log(avg));
    }
  }
  if (fit.clamped > 0)
    warn("fit_decay_rate: clamped " + std::to_string(fit.clamped) + " non-positive gaps to 1e-300");

  const auto n = static_cast<double>(log_k.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < log_k.size(); ++i) {
    mx += log_k[i];
    my += log_avg[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < log_k.size(); ++i) {
    sxy += (log_k[i] - mx) * (log_avg[i] - my);
    sxx += (log_k[i] - mx) * (log_k[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_decay_rate: iteration indices are not distinct");
  fit.slope = sxy / sxx;
  return fit;
}

}  // namespace zovr
