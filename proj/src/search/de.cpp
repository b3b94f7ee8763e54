#include "isbst/search/de.hpp"

#include <cmath>

namespace isbst::search {

namespace obj = objectives;

void DeParams::validate() const {
  if (!(f > 0.0 && f <= 2.0)) throw Error(ErrorCode::kInvalidArgument, "F must lie in (0, 2]");
  if (!(cr >= 0.0 && cr <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "cr must lie in [0, 1]");
  if (pop_size < 4) throw Error(ErrorCode::kInvalidArgument, "population needs at least 4 members");
  if (layout.control_points == 0) throw Error(ErrorCode::kInvalidArgument, "need at least one control point");
  if (layout.trace_length == 0) throw Error(ErrorCode::kInvalidArgument, "trace length must be positive");
}

Evaluator::Evaluator(const fbd::BlockDiagram& sut, GenomeLayout layout, const simd::LaneKernels& kernels)
    : sut_(sut), layout_(layout), kernels_(&kernels) {}

std::vector<Evaluation> Evaluator::evaluate(std::span<const Genome> genomes) const {
  std::vector<Evaluation> out(genomes.size());
  std::vector<fbd::TraceSet> batch;
  batch.reserve(genomes.size());
  for (const auto& g : genomes) batch.push_back(decode(g, layout_));

  std::vector<fbd::TraceSet> outputs;
  try {
    outputs = sut_.execute_batch(batch, *kernels_);
  } catch (const Error&) {
    // Isolate the offending candidates.
    outputs.assign(batch.size(), {});
    for (std::size_t i = 0; i < batch.size(); ++i) {
      try {
        outputs[i] = sut_.execute(batch[i]);
      } catch (const Error&) {
        out[i].failed = true;
      }
    }
  }
  for (std::size_t i = 0; i < genomes.size(); ++i) {
    out[i].inputs = std::move(batch[i]);
    out[i].outputs = std::move(outputs[i]);
    if (!out[i].failed) {
      try {
        out[i].raw = obj::score_all(out[i].inputs, out[i].outputs, *kernels_);
      } catch (const Error&) {
        out[i].failed = true;
      }
    }
  }
  return out;
}

Donors pick_donors(std::size_t n, std::size_t j, Rng& rng) {
  if (n < 4) throw Error(ErrorCode::kInvalidArgument, "DE/rand/1 needs at least 4 members");
  std::size_t r1, r2, r3;
  do r1 = rng.below(n); while (r1 == j);
  do r2 = rng.below(n); while (r2 == j || r2 == r1);
  do r3 = rng.below(n); while (r3 == j || r3 == r1 || r3 == r2);
  return {r1, r2, r3};
}

Genome mutate_with(const Genome& base, const Genome& plus, const Genome& minus, double f,
                   const simd::LaneKernels& kernels) {
  Genome v(base.size());
  kernels.de_mutate(base.data(), plus.data(), minus.data(), f, v.data(), v.size());
  return v;
}

Genome mutate(std::span<const Genome> population, std::size_t j, double f, Rng& rng, const simd::LaneKernels& kernels) {
  const auto d = pick_donors(population.size(), j, rng);
  return mutate_with(population[d.r1], population[d.r2], population[d.r3], f, kernels);
}

Genome crossover(const Genome& target, const Genome& mutant, double cr, Rng& rng) {
  if (target.size() != mutant.size()) throw Error(ErrorCode::kInvalidArgument, "crossover of unequal genomes");
  Genome trial(target.size());
  const std::size_t forced = rng.below(target.size());
  for (std::size_t k = 0; k < target.size(); ++k) {
    const double u = rng.uniform();
    trial[k] = (u < cr || k == forced) ? mutant[k] : target[k];
  }
  return trial;
}

std::vector<Genome> init_population(const DeParams& params, Rng& rng) {
  params.validate();
  std::vector<Genome> genomes;
  genomes.reserve(params.pop_size);
  for (std::size_t i = 0; i < params.pop_size; ++i) genomes.push_back(random_genome(rng, params.layout));
  return genomes;
}

void refresh_fitness(SearchState& state, const obj::ObjectiveWeights& weights) {
  for (auto& c : state.population) {
    c.dff = c.failed ? 0.0 : obj::dff(obj::oriented_ratios(c.raw, state.bounds), weights);
  }
}

SearchState init_search(const DeParams& params, const Evaluator& sut, const obj::ObjectiveWeights& weights) {
  SearchState state(params.seed);
  const auto genomes = init_population(params, state.rng);
  auto evals = sut.evaluate(genomes);
  for (std::size_t i = 0; i < genomes.size(); ++i) {
    Candidate c;
    c.id = state.next_id++;
    c.genome = genomes[i];
    c.inputs = std::move(evals[i].inputs);
    c.outputs = std::move(evals[i].outputs);
    c.raw = evals[i].raw;
    c.failed = evals[i].failed;
    if (!c.failed) state.bounds.update(c.raw);
    state.population.push_back(std::move(c));
  }
  state.counters.evaluations += genomes.size();
  refresh_fitness(state, weights);
  return state;
}

std::size_t step(SearchState& state, const obj::ObjectiveWeights& weights, const Evaluator& sut, const DeParams& params) {
  auto& pop = state.population;
  const std::size_t n = pop.size();
  std::vector<Genome> current;
  current.reserve(n);
  for (const auto& c : pop) current.push_back(c.genome);

  std::vector<Genome> trials;
  trials.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto mutant = mutate(current, j, params.f, state.rng);
    trials.push_back(crossover(current[j], mutant, params.cr, state.rng));
  }

  auto evals = sut.evaluate(trials);
  const std::uint64_t generation = state.counters.iterations + 1;
  for (std::size_t j = 0; j < n; ++j) {
    auto& e = evals[j];
    if (!e.failed) state.bounds.update(e.raw);
    const double trial_dff = e.failed ? 0.0 : obj::dff(obj::oriented_ratios(e.raw, state.bounds), weights);
    const double target_dff = pop[j].failed ? 0.0 : obj::dff(obj::oriented_ratios(pop[j].raw, state.bounds), weights);
    const std::uint64_t id = state.next_id++;
    if (trial_dff >= target_dff) {
      Candidate c;
      c.id = id;
      c.genome = std::move(trials[j]);
      c.inputs = std::move(e.inputs);
      c.outputs = std::move(e.outputs);
      c.raw = e.raw;
      c.failed = e.failed;
      c.generation = generation;
      pop[j] = std::move(c);
    }
  }
  state.counters.iterations += 1;
  state.counters.evaluations += n;
  refresh_fitness(state, weights);
  return n;
}

}  // namespace isbst::search
