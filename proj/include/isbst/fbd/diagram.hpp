#pragma once
// Function block diagrams: typed blocks wired by edges, with external input
// and output channels.
//
// Edge endpoints are strings: "in:N" names external input channel N,
// "out:N" names external output channel N, anything else is a block id.
// Every block input port and every declared output has exactly one incoming
// edge. Cycles are only allowed through UNIT_DELAY blocks.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "isbst/signal.hpp"

namespace isbst::fbd {

enum class OpKind : std::uint8_t {
  Const, Add, Sub, Mul, Div, Min, Max, Abs, Neg,
  Lt, Le, Gt, Ge, Eq, Ne,
  And, Or, Xor, Not,
  Mux, UnitDelay, Saturate,
};

std::string_view to_string(OpKind op);
OpKind op_kind_from_string(std::string_view name);

int arity(OpKind op);
bool is_arithmetic(OpKind op);
bool is_comparison(OpKind op);
bool is_logical(OpKind op);

struct Block {
  std::string id;
  OpKind op = OpKind::Const;
  // Operand kind. The output has this kind too, except comparisons which
  // produce BOOL. For SATURATE it is the output kind.
  SignalKind kind = SignalKind::S16;
  // CONST payload, or UNIT_DELAY initial state.
  std::int32_t value = 0;
  // SATURATE clamp bounds, intersected with the output range.
  std::int32_t lo = kind_min(SignalKind::S16);
  std::int32_t hi = kind_max(SignalKind::S16);

  SignalKind output_kind() const noexcept;

  friend bool operator==(const Block&, const Block&) = default;
};

struct Edge {
  std::string from;
  std::string to;
  int port = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct PortDecl {
  int channel = 0;
  std::string name;
  SignalKind kind = SignalKind::S16;

  friend bool operator==(const PortDecl&, const PortDecl&) = default;
};

struct BlockDiagram {
  std::string name;
  std::vector<PortDecl> inputs;
  std::vector<PortDecl> outputs;
  std::vector<Block> blocks;
  std::vector<Edge> edges;

  const Block* find_block(std::string_view id) const;
  Block* find_block(std::string_view id);
  const PortDecl* find_input(int channel) const;
  const PortDecl* find_output(int channel) const;

  // Kind carried by an edge source endpoint; nullopt when it does not exist.
  std::optional<SignalKind> source_kind(std::string_view endpoint) const;

  friend bool operator==(const BlockDiagram&, const BlockDiagram&) = default;
};

std::string input_endpoint(int channel);
std::string output_endpoint(int channel);
// Channel of an "in:N"/"out:N" endpoint, nullopt for block ids.
std::optional<int> parse_input_endpoint(std::string_view endpoint);
std::optional<int> parse_output_endpoint(std::string_view endpoint);

// Throws Error(kInvalidDiagram) describing the first violated rule.
void validate(const BlockDiagram& diagram);

// Block indices in evaluation order. UNIT_DELAY outputs count as sources,
// so every remaining cycle is an error.
std::vector<std::size_t> evaluation_order(const BlockDiagram& diagram);

nlohmann::json to_json(const BlockDiagram& diagram);
BlockDiagram diagram_from_json(const nlohmann::json& j);

void save_diagram(const BlockDiagram& diagram, const std::filesystem::path& path);
BlockDiagram load_diagram(const std::filesystem::path& path);

}  // namespace isbst::fbd
