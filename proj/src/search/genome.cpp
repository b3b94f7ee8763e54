#include "isbst/search/genome.hpp"

#include <algorithm>
#include <cmath>

#include "isbst/fbd/ramp.hpp"

namespace isbst::search {
namespace {

double unit(double g) { return std::clamp(g, 0.0, 1.0); }

}  // namespace

std::int32_t gene_to_u16(double gene) { return static_cast<std::int32_t>(std::lround(unit(gene) * 65535.0)); }

std::int32_t gene_to_s16(double gene) { return gene_to_u16(gene) - 32768; }

fbd::TraceSet decode(const Genome& genome, const GenomeLayout& layout) {
  using namespace fbd::channel;
  if (genome.size() != layout.dimension()) {
    throw Error(ErrorCode::kInvalidArgument, "genome has " + std::to_string(genome.size()) + " genes, layout wants " +
                                                 std::to_string(layout.dimension()));
  }
  if (layout.control_points == 0) throw Error(ErrorCode::kInvalidArgument, "layout needs at least one control point");
  const std::size_t T = layout.trace_length;
  const std::size_t C = layout.control_points;
  const std::size_t segment = (T + C - 1) / C;

  fbd::TraceSet traces{
      constant_trace(kLoopTm, SignalKind::U16, std::max(1, gene_to_u16(genome[0])), T),
      {kReset, SignalKind::Bool, std::vector<std::int32_t>(T)},
      constant_trace(kResetVal, SignalKind::S16, gene_to_s16(genome[4]), T),
      constant_trace(kRange, SignalKind::U16, gene_to_u16(genome[1]), T),
      constant_trace(kDecTm, SignalKind::U16, gene_to_u16(genome[2]), T),
      constant_trace(kIncTm, SignalKind::U16, gene_to_u16(genome[3]), T),
      {kInput, SignalKind::S16, std::vector<std::int32_t>(T)},
  };
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t cp = std::min(t / std::max<std::size_t>(segment, 1), C - 1);
    traces[kReset].samples[t] = genome[kConfigGenes + cp] >= 0.5 ? 1 : 0;
    traces[kInput].samples[t] = gene_to_s16(genome[kConfigGenes + C + cp]);
  }
  return traces;
}

Genome random_genome(Rng& rng, const GenomeLayout& layout) {
  Genome g(layout.dimension());
  for (auto& x : g) x = rng.uniform();
  return g;
}

}  // namespace isbst::search
