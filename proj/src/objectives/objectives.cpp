#include "isbst/objectives/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "isbst/fbd/ramp.hpp"

namespace isbst::objectives {

const std::array<ObjectiveDef, kObjectiveCount>& registry() {
  static constexpr std::array<ObjectiveDef, kObjectiveCount> defs{{
      {Objective::MinimumMin, "minimum.min", Direction::Minimize},
      {Objective::MaximumMax, "maximum.max", Direction::Maximize},
      {Objective::Amplitude, "amplitude", Direction::Maximize},
      {Objective::MaxIncrease, "max.increase", Direction::Maximize},
      {Objective::MaxDerivative, "max.derivative", Direction::Maximize},
      {Objective::MinMean, "min.mean", Direction::Minimize},
      {Objective::MaxDecrease, "max.decrease", Direction::Maximize},
  }};
  return defs;
}

const ObjectiveDef& definition(Objective id) { return registry()[static_cast<std::size_t>(id)]; }

Objective objective_from_tag(std::string_view tag) {
  for (const auto& d : registry()) {
    if (d.tag == tag) return d.id;
  }
  throw Error(ErrorCode::kUnknownObjective, "unknown objective tag '" + std::string(tag) + "'");
}

ScoreVector score_signal(std::span<const std::int32_t> s, std::int32_t loop_tm, const simd::LaneKernels& k) {
  ScoreVector out{};
  if (s.empty()) return out;
  const auto st = k.trace_stats(s.data(), s.size());
  out[static_cast<std::size_t>(Objective::MinimumMin)] = st.min;
  out[static_cast<std::size_t>(Objective::MaximumMax)] = st.max;
  out[static_cast<std::size_t>(Objective::Amplitude)] = static_cast<double>(st.max) - st.min;
  out[static_cast<std::size_t>(Objective::MaxIncrease)] = st.max_increase;
  out[static_cast<std::size_t>(Objective::MaxDerivative)] =
      static_cast<double>(st.max_increase) / static_cast<double>(std::max(1, loop_tm));
  out[static_cast<std::size_t>(Objective::MinMean)] = static_cast<double>(st.sum) / static_cast<double>(s.size());
  out[static_cast<std::size_t>(Objective::MaxDecrease)] = st.max_decrease;
  return out;
}

ScoreVector score_all(const fbd::TraceSet& inputs, const fbd::TraceSet& outputs, const simd::LaneKernels& k) {
  const auto out9 = std::find_if(outputs.begin(), outputs.end(),
                                 [](const SignalTrace& t) { return t.channel == fbd::channel::kOutput; });
  if (out9 == outputs.end()) throw Error(ErrorCode::kInvalidArgument, "Output_9 missing");
  const auto loop = std::find_if(inputs.begin(), inputs.end(),
                                 [](const SignalTrace& t) { return t.channel == fbd::channel::kLoopTm; });
  const std::int32_t loop_tm = loop == inputs.end() || loop->samples.empty() ? 1 : loop->samples.front();
  return score_signal(out9->samples, loop_tm, k);
}

ObjectiveWeights::ObjectiveWeights(const std::array<double, kObjectiveCount>& values) {
  for (std::size_t i = 0; i < kObjectiveCount; ++i) set(registry()[i].id, values[i]);
}

ObjectiveWeights ObjectiveWeights::only(Objective id, double weight) {
  auto w = zeros();
  w.set(id, weight);
  return w;
}

void ObjectiveWeights::set(Objective id, double weight) {
  if (!std::isfinite(weight) || weight < 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "weight for " + std::string(definition(id).tag) + " must be finite and non-negative");
  }
  values_[static_cast<std::size_t>(id)] = weight;
}

ObjectiveWeights weights_from_json(const nlohmann::json& j, const ObjectiveWeights& base) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "weights must be an object keyed by objective tag");
  auto w = base;
  for (const auto& [tag, value] : j.items()) {
    const auto id = objective_from_tag(tag);
    if (!value.is_number()) throw Error(ErrorCode::kInvalidArgument, "weight for " + tag + " is not a number");
    w.set(id, value.get<double>());
  }
  return w;
}

nlohmann::json to_json(const ObjectiveWeights& w) {
  auto j = nlohmann::json::object();
  for (const auto& d : registry()) j[std::string(d.tag)] = w[d.id];
  return j;
}

void NormalizationBounds::update(const ScoreVector& raw) {
  if (frozen_) return;
  for (std::size_t i = 0; i < kObjectiveCount; ++i) {
    auto& r = ranges_[i];
    if (!r.seen) {
      r = {raw[i], raw[i], true};
    } else {
      r.min = std::min(r.min, raw[i]);
      r.max = std::max(r.max, raw[i]);
    }
  }
}

nlohmann::json to_json(const NormalizationBounds& b) {
  auto j = nlohmann::json::object();
  for (const auto& d : registry()) {
    const auto& r = b.range(d.id);
    j[std::string(d.tag)] = r.seen ? nlohmann::json{{"min", r.min}, {"max", r.max}} : nlohmann::json(nullptr);
  }
  return j;
}

double oriented_ratio(double raw, const ObjectiveDef& def, const NormalizationBounds& bounds) {
  const auto& r = bounds.range(def.id);
  if (!r.seen || !(r.max > r.min)) return 0.5;
  const double ratio = std::clamp((raw - r.min) / (r.max - r.min), 0.0, 1.0);
  return def.direction == Direction::Maximize ? ratio : 1.0 - ratio;
}

RatioVector oriented_ratios(const ScoreVector& raw, const NormalizationBounds& bounds) {
  RatioVector out{};
  for (std::size_t i = 0; i < kObjectiveCount; ++i) out[i] = oriented_ratio(raw[i], registry()[i], bounds);
  return out;
}

double dff(const RatioVector& ratios, const ObjectiveWeights& weights) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kObjectiveCount; ++i) sum += weights.at(i) * ratios[i];
  return sum;
}

}  // namespace isbst::objectives
