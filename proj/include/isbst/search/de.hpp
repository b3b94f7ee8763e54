#pragma once
// DE/rand/1/bin inner cycle.
//
//   v_j = x_r1 + F * (x_r2 - x_r3),  r1, r2, r3 distinct and != j
//
// followed by binomial crossover with the target and one-to-one replacement
// when the trial's DFF is at least the target's. Trials of one generation
// are built from the previous generation and executed as one lane batch;
// bounds updates and selection then run in candidate order.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "isbst/fbd/interpreter.hpp"
#include "isbst/objectives/objectives.hpp"
#include "isbst/rng.hpp"
#include "isbst/search/genome.hpp"

namespace isbst::search {

struct DeParams {
  double f = 0.7;
  double cr = 0.5;
  std::size_t pop_size = 50;
  GenomeLayout layout;
  std::uint64_t seed = 1;

  void validate() const;  // throws kInvalidArgument
};

struct Candidate {
  std::uint64_t id = 0;
  Genome genome;
  fbd::TraceSet inputs;
  fbd::TraceSet outputs;
  objectives::ScoreVector raw{};
  double dff = 0.0;
  std::uint64_t generation = 0;
  // SUT execution failed; raw scores are meaningless and DFF is pinned at 0.
  bool failed = false;
};

using Population = std::vector<Candidate>;

struct SearchCounters {
  std::uint64_t iterations = 0;
  std::uint64_t evaluations = 0;

  friend bool operator==(const SearchCounters&, const SearchCounters&) = default;
};

struct Evaluation {
  fbd::TraceSet inputs;
  fbd::TraceSet outputs;
  objectives::ScoreVector raw{};
  bool failed = false;
};

// Decodes genomes, runs them through one SUT version and scores them.
class Evaluator {
 public:
  Evaluator(const fbd::BlockDiagram& sut, GenomeLayout layout,
            const simd::LaneKernels& kernels = simd::active_kernels());

  std::vector<Evaluation> evaluate(std::span<const Genome> genomes) const;
  const GenomeLayout& layout() const noexcept { return layout_; }

 private:
  fbd::CompiledDiagram sut_;
  GenomeLayout layout_;
  const simd::LaneKernels* kernels_;
};

struct SearchState {
  explicit SearchState(std::uint64_t seed) : rng(seed) {}

  Population population;
  objectives::NormalizationBounds bounds;
  Rng rng;
  SearchCounters counters;
  std::uint64_t next_id = 1;
};

struct Donors {
  std::size_t r1, r2, r3;
};

// Three mutually distinct indices in [0, n), none equal to j; n >= 4.
Donors pick_donors(std::size_t n, std::size_t j, Rng& rng);

Genome mutate(std::span<const Genome> population, std::size_t j, double f, Rng& rng,
              const simd::LaneKernels& kernels = simd::active_kernels());
Genome mutate_with(const Genome& base, const Genome& plus, const Genome& minus, double f,
                   const simd::LaneKernels& kernels = simd::active_kernels());

Genome crossover(const Genome& target, const Genome& mutant, double cr, Rng& rng);

// pop_size uniform genomes.
std::vector<Genome> init_population(const DeParams& params, Rng& rng);

// Seeds the search: draws and evaluates the initial population, widening
// the bounds with each member.
SearchState init_search(const DeParams& params, const Evaluator& sut, const objectives::ObjectiveWeights& weights);

// One generation. Returns the number of candidate evaluations performed.
std::size_t step(SearchState& state, const objectives::ObjectiveWeights& weights, const Evaluator& sut,
                 const DeParams& params);

// Recomputes every member's DFF under the current bounds.
void refresh_fitness(SearchState& state, const objectives::ObjectiveWeights& weights);

}  // namespace isbst::search
