#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "isbst/faults/mutation.hpp"
#include "isbst/fbd/interpreter.hpp"

namespace isbst::faults {

inline constexpr int kReferenceVersion = 1;
inline constexpr int kMutantsPerCategory = 3;
inline constexpr std::size_t kSmokeTraceCount = 100;

struct SutVersion {
  int version_id = kReferenceVersion;
  std::string label;
  fbd::BlockDiagram diagram;
  std::optional<MutationOp> mutation;

  bool is_reference() const noexcept { return !mutation.has_value(); }
};

struct StudySet {
  std::uint64_t seed = 0;
  std::vector<SutVersion> versions;
  std::vector<std::string> warnings;

  const SutVersion& version(int id) const;  // throws kUnknownVersion
  const SutVersion& reference() const { return version(kReferenceVersion); }
};

// Fixed input set used to reject mutants that behave like the reference:
// decoded uniform genomes at the default layout, from a constant seed.
const std::vector<fbd::TraceSet>& smoke_traces();

// True when `mutant` differs from `reference` on at least one smoke trace.
bool differs_on_smoke_set(const fbd::BlockDiagram& reference, const fbd::BlockDiagram& mutant);
// Same, restricted to Output_9, the channel every search objective reads.
bool output_differs_on_smoke_set(const fbd::BlockDiagram& reference, const fbd::BlockDiagram& mutant);

// Version 1 is the reference ramp; versions 2..16 hold three mutants per
// category (CVR, IID, ABR, CBR, LBR order), sampled by `seed` among the
// sites whose Output_9 differs from the reference on the smoke set.
StudySet study_set(std::uint64_t seed);

// Directory layout: manifest.json plus one diagram file per version.
void save_study_set(const StudySet& study, const std::filesystem::path& dir);
StudySet load_study_set(const std::filesystem::path& dir);

}  // namespace isbst::faults
