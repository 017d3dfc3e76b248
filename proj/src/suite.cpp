#include "ganav/suite.hpp"

#include <atomic>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "ganav/error.hpp"

namespace ganav::harness {

using nlohmann::json;

SuiteConfig suite_from_json(const json& j) {
  try {
    SuiteConfig s;
    s.name = j.value("name", s.name);
    if (j.contains("base")) s.base = config_from_json(j.at("base"));
    if (j.contains("seeds")) {
      const auto& seeds = j.at("seeds");
      if (seeds.is_array()) {
        s.seeds = seeds.get<std::vector<std::uint64_t>>();
      } else {
        const auto start = seeds.at("start").get<std::uint64_t>();
        const auto count = seeds.at("count").get<std::uint64_t>();
        for (std::uint64_t k = 0; k < count; ++k) s.seeds.push_back(start + k);
      }
    }
    for (const auto& d : j.value("difficulties", json::array())) s.difficulties.push_back(sim::parse_difficulty(d.get<std::string>()));
    for (const auto& v : j.value("variants", json::array())) {
      s.variants.push_back(Variant{v.at("name").get<std::string>(), v.value("overrides", json::object())});
    }
    s.threads = j.value("threads", 0u);
    return s;
  } catch (const json::exception& e) {
    fail(Errc::ParseError, std::string("bad suite matrix: ") + e.what());
  }
}

SuiteConfig load_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot read " + path.string());
  try {
    return suite_from_json(json::parse(in));
  } catch (const json::exception& e) {
    fail(Errc::ParseError, "bad suite matrix " + path.string() + ": " + e.what());
  }
}

const CellSummary& SuiteReport::cell(const std::string& variant, sim::Difficulty difficulty) const {
  for (const auto& c : cells) {
    if (c.variant == variant && c.difficulty == difficulty) return c;
  }
  fail(Errc::InvalidArgument, "report has no cell " + variant + "/" + std::string(sim::to_string(difficulty)));
}

namespace {

struct Job {
  std::size_t cell;
  EpisodeConfig config;
};

struct EpisodeSlot {
  std::optional<EpisodeResult> result;
  std::string error;
};

void summarise(CellSummary& cell) {
  if (cell.episodes.empty()) return;
  cell.sr = success_rate(cell.episodes);
  cell.spl = spl(cell.episodes);
  std::size_t det = 0;
  std::size_t plan = 0;
  std::size_t expl = 0;
  double step = 0.0;
  double scoring = 0.0;
  for (const auto& e : cell.episodes) {
    det += e.error == ErrorClass::Detection;
    plan += e.error == ErrorClass::Planning;
    expl += e.error == ErrorClass::Exploration;
    step += e.mean_step_seconds;
    scoring += e.mean_scoring_seconds;
  }
  const double n = static_cast<double>(cell.episodes.size());
  cell.detection_pct = 100.0 * static_cast<double>(det) / n;
  cell.planning_pct = 100.0 * static_cast<double>(plan) / n;
  cell.exploration_pct = 100.0 * static_cast<double>(expl) / n;
  cell.mean_step_seconds = step / n;
  cell.mean_scoring_seconds = scoring / n;
}

}  // namespace

SuiteReport run_suite(const SuiteConfig& config) {
  if (config.seeds.empty() || config.difficulties.empty() || config.variants.empty()) {
    fail(Errc::EmptySuite, "suite matrix has no episodes");
  }
  SuiteReport report;
  report.name = config.name;
  std::vector<Job> jobs;
  for (const auto& variant : config.variants) {
    for (const auto difficulty : config.difficulties) {
      CellSummary cell;
      cell.variant = variant.name;
      cell.difficulty = difficulty;
      report.cells.push_back(std::move(cell));
      EpisodeConfig base = config_from_json(variant.overrides, config.base);
      base.difficulty = difficulty;
      for (const auto seed : config.seeds) {
        EpisodeConfig c = base;
        c.seed = seed;
        jobs.push_back(Job{report.cells.size() - 1, std::move(c)});
      }
    }
  }

  std::vector<EpisodeSlot> outcomes(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        outcomes[i].result = run_episode(jobs[i].config);
      } catch (const std::exception& e) {
        outcomes[i].error = "seed " + std::to_string(jobs[i].config.seed) + ": " + e.what();
      }
    }
  };
  unsigned threads = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Reduce in job order so the report does not depend on scheduling.
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto& cell = report.cells[jobs[i].cell];
    if (outcomes[i].result) {
      cell.episodes.push_back(std::move(*outcomes[i].result));
    } else {
      cell.errors.push_back(std::move(outcomes[i].error));
    }
  }
  for (auto& cell : report.cells) summarise(cell);
  return report;
}

json to_json(const SuiteReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    json episodes = json::array();
    for (const auto& e : c.episodes) episodes.push_back(to_json(e));
    cells.push_back({{"variant", c.variant},
                     {"difficulty", std::string(sim::to_string(c.difficulty))},
                     {"episodes", c.episodes.size()},
                     {"sr", c.sr},
                     {"spl", c.spl},
                     {"error_pct", {{"detection", c.detection_pct}, {"planning", c.planning_pct}, {"exploration", c.exploration_pct}}},
                     {"errors", c.errors},
                     {"results", episodes},
                     {"timing", {{"mean_step_seconds", c.mean_step_seconds}, {"mean_scoring_seconds", c.mean_scoring_seconds}}}});
  }
  return json{{"name", report.name}, {"cells", cells}};
}

json strip_timing(json j) {
  if (j.is_object()) {
    j.erase("timing");
    for (auto& [key, value] : j.items()) value = strip_timing(value);
  } else if (j.is_array()) {
    for (auto& value : j) value = strip_timing(value);
  }
  return j;
}

std::string summary_text(const SuiteReport& report) {
  std::ostringstream out;
  out << report.name << '\n';
  out << std::left << std::setw(22) << "variant" << std::setw(12) << "difficulty" << std::right << std::setw(6) << "n"
      << std::setw(8) << "SR" << std::setw(8) << "SPL" << std::setw(8) << "det%" << std::setw(8) << "plan%"
      << std::setw(8) << "expl%" << std::setw(12) << "step ms" << '\n';
  out << std::fixed << std::setprecision(1);
  for (const auto& c : report.cells) {
    out << std::left << std::setw(22) << c.variant << std::setw(12) << sim::to_string(c.difficulty) << std::right
        << std::setw(6) << c.episodes.size() << std::setw(8) << c.sr << std::setw(8) << c.spl << std::setw(8)
        << c.detection_pct << std::setw(8) << c.planning_pct << std::setw(8) << c.exploration_pct << std::setw(12)
        << c.mean_step_seconds * 1000.0 << '\n';
    for (const auto& e : c.errors) out << "  error: " << e << '\n';
  }
  return out.str();
}

}  // namespace ganav::harness
