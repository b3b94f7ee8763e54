// isbst: laboratory runs, the steering server and study-set generation.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "isbst/faults/study_set.hpp"
#include "isbst/lab/lab.hpp"
#include "isbst/session/server.hpp"

namespace {

using namespace isbst;

session::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

std::shared_ptr<const faults::StudySet> open_study(const std::string& dir, std::uint64_t seed) {
  if (dir.empty()) return std::make_shared<const faults::StudySet>(faults::study_set(seed));
  return std::make_shared<const faults::StudySet>(faults::load_study_set(dir));
}

int cmd_mutants(std::uint64_t seed, const std::string& out) {
  const auto study = faults::study_set(seed);
  faults::save_study_set(study, out);
  for (const auto& w : study.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& v : study.versions) std::cout << "v" << v.version_id << "\t" << v.label << '\n';
  std::cout << study.versions.size() << " versions written to " << out << '\n';
  return 0;
}

int cmd_lab(const std::string& study_dir, std::uint64_t study_seed, const std::string& versions, std::size_t events,
            std::size_t steps, const std::string& seeds, const std::string& out, const std::string& schedule,
            const std::string& unit, std::size_t pop, std::size_t threads) {
  const auto study = open_study(study_dir, study_seed);
  lab::LabPlan plan;
  plan.versions = lab::parse_versions(versions, *study);
  plan.events = events;
  plan.n_steps = steps;
  plan.seeds = lab::parse_seeds(seeds);
  plan.de.pop_size = pop;
  plan.threads = threads;
  plan.detect.unit = analysis::sample_unit_from_string(unit);
  if (!schedule.empty()) {
    std::ifstream in(schedule);
    if (!in) throw Error(ErrorCode::kIo, "cannot read " + schedule);
    plan.schedule = lab::schedule_from_json(nlohmann::json::parse(in));
  }

  const auto result = lab::run_lab(*study, plan);
  lab::write_lab_outputs(result, out);

  const std::uint64_t iterations = events * steps;
  std::cout << "runs: " << result.runs.size() << "  iterations/run: " << iterations
            << "  evaluations/run: " << plan.de.pop_size * (iterations + 1) << '\n';
  std::cout << "version  detected  objective-flags  metric-flags  label\n";
  for (const auto& v : result.report.versions) {
    std::printf("v%-7d %-9s %-16zu %-13zu %s\n", v.version_id, v.error ? "error" : (v.detected ? "yes" : "no"),
                v.objective_flags(), v.metric_flags(), v.label.c_str());
  }
  std::cout << "detected " << result.report.detected_count() << " of " << result.report.versions.size()
            << " versions; reports in " << out << '\n';
  int rc = 0;
  for (const auto& r : result.runs) {
    if (r.error) {
      std::cerr << "run v" << r.version_id << " seed " << r.seed << " failed: " << *r.error << '\n';
      rc = 1;
    }
  }
  return rc;
}

int serve(const std::shared_ptr<const faults::StudySet>& study, const session::ProtocolOptions& options,
          const std::string& host, int port) {
  session::SessionManager manager(study);
  session::Server server(manager, options);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "serving " << study->versions.size() << " versions on http://" << host << ":" << port << std::endl;
  const bool ok = server.listen(host, port);
  g_server = nullptr;
  if (!ok) {
    std::cerr << "cannot listen on " << host << ":" << port << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive search-based testing of the time ramp function block"};
  app.require_subcommand(1);

  std::string study_dir;
  std::uint64_t study_seed = 1;

  auto* lab = app.add_subcommand("lab", "run the unattended laboratory experiment");
  std::string versions = "all", seeds = "1..10", out = "lab_out", schedule, unit = "run-median";
  std::size_t events = 10, steps = 50, pop = 50, threads = 0;
  lab->add_option("--study", study_dir, "study-set directory (default: generate from --study-seed)");
  lab->add_option("--study-seed", study_seed, "seed for a generated study set");
  lab->add_option("--versions", versions, "all, a list or a range of version ids");
  lab->add_option("--events", events, "interaction events per run")->check(CLI::PositiveNumber);
  lab->add_option("--steps", steps, "DE iterations per event")->check(CLI::PositiveNumber);
  lab->add_option("--seeds", seeds, "seed list or range, e.g. 1..10");
  lab->add_option("--out", out, "output directory");
  lab->add_option("--schedule", schedule, "JSON weight schedule {\"event\": {tag: weight}}");
  lab->add_option("--sample-unit", unit, "run-median, run-mean or candidate")->check(CLI::IsMember({"run-median", "run-mean", "candidate"}));
  lab->add_option("--pop", pop, "population size")->check(CLI::Range(4, 100000));
  lab->add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* srv = app.add_subcommand("serve", "serve the steering protocol over HTTP");
  int port = 8080;
  std::string host = "127.0.0.1", export_dir = ".";
  srv->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  srv->add_option("--host", host, "bind address");
  srv->add_option("--study", study_dir, "study-set directory (default: generate from --study-seed)");
  srv->add_option("--study-seed", study_seed, "seed for a generated study set");
  srv->add_option("--exports", export_dir, "directory for relative export paths");

  auto* ev = app.add_subcommand("eval", "serve the blinded six-version evaluation layout");
  std::string participant, logs = "eval_logs";
  ev->add_option("--participant", participant, "participant id")->required();
  ev->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  ev->add_option("--host", host, "bind address");
  ev->add_option("--study", study_dir, "study-set directory (default: generate from --study-seed)");
  ev->add_option("--study-seed", study_seed, "seed for a generated study set");
  ev->add_option("--out", logs, "log directory");

  auto* mut = app.add_subcommand("mutants", "generate the seeded study set");
  std::uint64_t mutant_seed = 1;
  std::string mutant_out = "study";
  mut->add_option("--seed", mutant_seed, "sampling seed");
  mut->add_option("--out", mutant_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*mut) return cmd_mutants(mutant_seed, mutant_out);
    if (*lab) return cmd_lab(study_dir, study_seed, versions, events, steps, seeds, out, schedule, unit, pop, threads);
    if (*srv) {
      session::ProtocolOptions options;
      options.export_dir = export_dir;
      return serve(open_study(study_dir, study_seed), options, host, port);
    }
    if (*ev) {
      const auto study = open_study(study_dir, study_seed);
      const auto layout = lab::eval_layout(*study);
      for (const auto& s : layout) std::cout << "slot " << s.position << ": " << s.label << '\n';
      return serve(study, lab::eval_protocol_options(layout, participant, logs), host, port);
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
