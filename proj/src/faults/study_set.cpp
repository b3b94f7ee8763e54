#include "isbst/faults/study_set.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "isbst/fbd/ramp.hpp"
#include "isbst/rng.hpp"
#include "isbst/search/genome.hpp"

namespace isbst::faults {
namespace {

constexpr std::uint64_t kSmokeSeed = 0x5EED'0F'5A0CEULL;

std::string version_file(int id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "v%02d.json", id);
  return buf;
}

bool output9_differs(const std::vector<fbd::TraceSet>& a, const std::vector<fbd::TraceSet>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (fbd::find_trace(a[i], fbd::channel::kOutput) != fbd::find_trace(b[i], fbd::channel::kOutput)) return true;
  }
  return false;
}

}  // namespace

const SutVersion& StudySet::version(int id) const {
  for (const auto& v : versions) {
    if (v.version_id == id) return v;
  }
  throw Error(ErrorCode::kUnknownVersion, "no SUT version " + std::to_string(id));
}

const std::vector<fbd::TraceSet>& smoke_traces() {
  static const std::vector<fbd::TraceSet> traces = [] {
    const search::GenomeLayout layout;
    Rng rng(kSmokeSeed);
    std::vector<fbd::TraceSet> out;
    out.reserve(kSmokeTraceCount);
    for (std::size_t i = 0; i < kSmokeTraceCount; ++i) out.push_back(search::decode(search::random_genome(rng, layout), layout));
    return out;
  }();
  return traces;
}

bool differs_on_smoke_set(const fbd::BlockDiagram& reference, const fbd::BlockDiagram& mutant) {
  const auto& smoke = smoke_traces();
  const auto a = fbd::CompiledDiagram(reference).execute_batch(smoke);
  const auto b = fbd::CompiledDiagram(mutant).execute_batch(smoke);
  return a != b;
}

bool output_differs_on_smoke_set(const fbd::BlockDiagram& reference, const fbd::BlockDiagram& mutant) {
  const auto& smoke = smoke_traces();
  return output9_differs(fbd::CompiledDiagram(reference).execute_batch(smoke),
                         fbd::CompiledDiagram(mutant).execute_batch(smoke));
}

StudySet study_set(std::uint64_t seed) {
  StudySet study;
  study.seed = seed;
  const auto reference = fbd::build_ramp_diagram();
  study.versions.push_back({kReferenceVersion, "reference", reference, std::nullopt});

  const auto& smoke = smoke_traces();
  const auto expected = fbd::CompiledDiagram(reference).execute_batch(smoke);

  // Per category: shuffled sites, then those whose Output_9 differs, in that order.
  std::vector<std::vector<std::pair<MutationOp, fbd::BlockDiagram>>> pools;
  for (const auto category : kAllCategories) {
    auto sites = enumerate_sites(reference, category);
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(category)));
    for (std::size_t i = sites.size(); i > 1; --i) std::swap(sites[i - 1], sites[rng.below(i)]);
    std::vector<std::pair<MutationOp, fbd::BlockDiagram>> pool;
    for (auto& op : sites) {
      auto mutant = apply(reference, op);
      if (output9_differs(fbd::CompiledDiagram(mutant).execute_batch(smoke), expected)) {
        pool.emplace_back(std::move(op), std::move(mutant));
      }
    }
    pools.push_back(std::move(pool));
  }

  std::vector<std::size_t> taken(pools.size(), 0);
  int shortfall = 0;
  for (std::size_t c = 0; c < pools.size(); ++c) {
    taken[c] = std::min<std::size_t>(kMutantsPerCategory, pools[c].size());
    if (taken[c] < kMutantsPerCategory) {
      shortfall += kMutantsPerCategory - static_cast<int>(taken[c]);
      study.warnings.push_back(std::string(to_string(kAllCategories[c])) + " has only " + std::to_string(pools[c].size()) +
                               " detectable sites");
    }
  }
  std::vector<std::size_t> extra(pools.size(), 0);
  for (std::size_t c = 0; shortfall > 0 && c < pools.size(); ++c) {
    while (shortfall > 0 && taken[c] + extra[c] < pools[c].size()) {
      ++extra[c];
      --shortfall;
      study.warnings.push_back("filled one slot from " + std::string(to_string(kAllCategories[c])));
    }
  }
  if (shortfall > 0) study.warnings.push_back("study set is short by " + std::to_string(shortfall) + " mutants");

  int next_id = kReferenceVersion + 1;
  for (std::size_t c = 0; c < pools.size(); ++c) {
    for (std::size_t i = 0; i < taken[c] + extra[c]; ++i) {
      auto& [op, mutant] = pools[c][i];
      mutant.name = "time_ramp_v" + std::to_string(next_id);
      study.versions.push_back({next_id, op.describe(), std::move(mutant), op});
      ++next_id;
    }
  }
  return study;
}

void save_study_set(const StudySet& study, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  nlohmann::json manifest{{"seed", study.seed}, {"warnings", study.warnings}, {"versions", nlohmann::json::array()}};
  for (const auto& v : study.versions) {
    const auto file = version_file(v.version_id);
    fbd::save_diagram(v.diagram, dir / file);
    nlohmann::json entry{{"version_id", v.version_id}, {"label", v.label}, {"file", file}};
    if (v.mutation) {
      entry["category"] = to_string(v.mutation->category);
      entry["site"] = v.mutation->site();
      entry["payload"] = v.mutation->payload();
      entry["mutation"] = to_json(*v.mutation);
    } else {
      entry["category"] = nullptr;
    }
    manifest["versions"].push_back(std::move(entry));
  }
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error(ErrorCode::kIo, "cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

StudySet load_study_set(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error(ErrorCode::kIo, "no manifest.json in " + dir.string());
  nlohmann::json manifest;
  try {
    in >> manifest;
    StudySet study;
    study.seed = manifest.value("seed", std::uint64_t{0});
    study.warnings = manifest.value("warnings", std::vector<std::string>{});
    for (const auto& entry : manifest.at("versions")) {
      SutVersion v;
      v.version_id = entry.at("version_id").get<int>();
      v.label = entry.value("label", "");
      v.diagram = fbd::load_diagram(dir / entry.at("file").get<std::string>());
      if (entry.contains("mutation")) v.mutation = mutation_from_json(entry.at("mutation"));
      study.versions.push_back(std::move(v));
    }
    return study;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, "malformed manifest in " + dir.string() + ": " + e.what());
  }
}

}  // namespace isbst::faults
