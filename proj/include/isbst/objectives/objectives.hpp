#pragma once
// Search objectives over Output_9 and the dynamic fitness function
//
//   DFF_j = sum_i Weight_i * Value_ij
//
// where Value_ij is candidate j's raw score on objective i mapped to [0, 1]
// against the session-wide running bounds and oriented so 1 is best.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "isbst/fbd/interpreter.hpp"
#include "isbst/simd/kernels.hpp"

namespace isbst::objectives {

enum class Direction : std::uint8_t { Maximize, Minimize };

inline constexpr std::size_t kObjectiveCount = 7;

enum class Objective : std::uint8_t {
  MinimumMin,
  MaximumMax,
  Amplitude,
  MaxIncrease,
  MaxDerivative,
  MinMean,
  MaxDecrease,
};

struct ObjectiveDef {
  Objective id;
  std::string_view tag;
  Direction direction;
};

// Registry in table order; tags are the wire/config names.
const std::array<ObjectiveDef, kObjectiveCount>& registry();
const ObjectiveDef& definition(Objective id);
// Throws Error(kUnknownObjective).
Objective objective_from_tag(std::string_view tag);

using ScoreVector = std::array<double, kObjectiveCount>;
using RatioVector = std::array<double, kObjectiveCount>;

// Raw scores on the Output_9 samples. The consecutive-difference objectives
// are 0 for traces shorter than two ticks; max.derivative divides by the
// loop time in ms (at least 1).
ScoreVector score_signal(std::span<const std::int32_t> output9, std::int32_t loop_tm,
                         const simd::LaneKernels& kernels = simd::active_kernels());

// Scores a ramp execution: Output_9 from `outputs`, LoopTm from Input_0.
ScoreVector score_all(const fbd::TraceSet& inputs, const fbd::TraceSet& outputs,
                      const simd::LaneKernels& kernels = simd::active_kernels());

class ObjectiveWeights {
 public:
  ObjectiveWeights() { values_.fill(1.0); }
  explicit ObjectiveWeights(const std::array<double, kObjectiveCount>& values);

  static ObjectiveWeights zeros() { return ObjectiveWeights(std::array<double, kObjectiveCount>{}); }
  static ObjectiveWeights only(Objective id, double weight = 1.0);

  double operator[](Objective id) const { return values_[static_cast<std::size_t>(id)]; }
  double at(std::size_t i) const { return values_.at(i); }
  void set(Objective id, double weight);  // throws on negative or non-finite
  const std::array<double, kObjectiveCount>& values() const noexcept { return values_; }

  friend bool operator==(const ObjectiveWeights&, const ObjectiveWeights&) = default;

 private:
  std::array<double, kObjectiveCount> values_{};
};

// Objects keyed by tag. Unknown tags and negative weights are rejected;
// tags not mentioned keep `base`'s value.
ObjectiveWeights weights_from_json(const nlohmann::json& j, const ObjectiveWeights& base = ObjectiveWeights::zeros());
nlohmann::json to_json(const ObjectiveWeights& w);

class NormalizationBounds {
 public:
  struct Range {
    double min = 0.0;
    double max = 0.0;
    bool seen = false;
    friend bool operator==(const Range&, const Range&) = default;
  };

  // Widens every objective's range to include `raw`, unless frozen.
  void update(const ScoreVector& raw);
  void freeze(bool frozen = true) noexcept { frozen_ = frozen; }
  bool frozen() const noexcept { return frozen_; }
  const Range& range(Objective id) const { return ranges_[static_cast<std::size_t>(id)]; }
  const std::array<Range, kObjectiveCount>& ranges() const noexcept { return ranges_; }

  friend bool operator==(const NormalizationBounds&, const NormalizationBounds&) = default;

 private:
  std::array<Range, kObjectiveCount> ranges_{};
  bool frozen_ = false;
};

nlohmann::json to_json(const NormalizationBounds& b);

// (raw - min) / (max - min) clamped to [0, 1], flipped for minimizers;
// 0.5 when the range is empty or collapsed.
double oriented_ratio(double raw, const ObjectiveDef& def, const NormalizationBounds& bounds);
RatioVector oriented_ratios(const ScoreVector& raw, const NormalizationBounds& bounds);

double dff(const RatioVector& ratios, const ObjectiveWeights& weights);

}  // namespace isbst::objectives
