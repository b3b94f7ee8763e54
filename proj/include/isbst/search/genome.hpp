#pragma once
// Genome layout and decoding into ramp input traces.
//
//   [0] LoopTm  [1] Range  [2] DecTm  [3] IncTm  [4] ResetVal
//   [5, 5+C)     Reset control points
//   [5+C, 5+2C)  Input control points
//
// Configuration genes are held constant across the trace; control points are
// expanded by zero-order hold over segments of ceil(T/C) ticks.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "isbst/fbd/interpreter.hpp"
#include "isbst/rng.hpp"

namespace isbst::search {

inline constexpr std::size_t kConfigGenes = 5;

struct GenomeLayout {
  std::size_t control_points = 10;
  std::size_t trace_length = 50;

  std::size_t dimension() const noexcept { return kConfigGenes + 2 * control_points; }
};

using Genome = std::vector<double>;

// Affine maps of a unit gene onto a 16-bit range (round to nearest).
std::int32_t gene_to_u16(double gene);
std::int32_t gene_to_s16(double gene);

fbd::TraceSet decode(const Genome& genome, const GenomeLayout& layout);

Genome random_genome(Rng& rng, const GenomeLayout& layout);

}  // namespace isbst::search
