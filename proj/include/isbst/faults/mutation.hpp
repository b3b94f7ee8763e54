#pragma once
// First-order mutation operators over function block diagrams, grouped in
// the five FBD fault categories:
//
//   CVR  constant value replacement      CONST payload -> 0, 1, max, min, -v
//   IID  inverter insertion or deletion  NOT on a BOOL edge, or drop a NOT
//   ABR  arithmetic block replacement    ADD<->SUB, MUL<->DIV, MIN<->MAX
//   CBR  comparison block replacement    LT<->LE, GT<->GE, LT<->GT, EQ<->NE
//   LBR  logical block replacement       AND<->OR, AND<->XOR, OR<->XOR

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "isbst/fbd/diagram.hpp"

namespace isbst::faults {

enum class FaultCategory : std::uint8_t { CVR, IID, ABR, CBR, LBR };

inline constexpr FaultCategory kAllCategories[] = {FaultCategory::CVR, FaultCategory::IID, FaultCategory::ABR,
                                                   FaultCategory::CBR, FaultCategory::LBR};

std::string_view to_string(FaultCategory c);
FaultCategory fault_category_from_string(std::string_view name);

enum class InverterAction : std::uint8_t { Insert, Delete };

struct MutationOp {
  FaultCategory category = FaultCategory::CVR;
  // Block site (everything except IID insertion).
  std::string block;
  // Edge site (IID insertion).
  std::optional<fbd::Edge> edge;

  std::int32_t new_value = 0;            // CVR
  fbd::OpKind new_op = fbd::OpKind::Add;  // ABR, CBR, LBR
  InverterAction action = InverterAction::Insert;  // IID

  std::string site() const;
  std::string payload() const;
  std::string describe() const;

  friend bool operator==(const MutationOp&, const MutationOp&) = default;
};

nlohmann::json to_json(const MutationOp& op);
MutationOp mutation_from_json(const nlohmann::json& j);

// All applicable first-order mutants of one category, in declaration order
// of blocks and edges. Identity replacements are never produced.
std::vector<MutationOp> enumerate_sites(const fbd::BlockDiagram& diagram, FaultCategory category);

// Returns the mutated copy. Throws Error(kInvalidMutation) when the site no
// longer exists or the payload does not fit it.
fbd::BlockDiagram apply(const fbd::BlockDiagram& diagram, const MutationOp& op);

// Id given to the NOT block that `op` (an IID insertion) adds to `diagram`.
std::string inserted_inverter_id(const fbd::BlockDiagram& diagram);

}  // namespace isbst::faults
