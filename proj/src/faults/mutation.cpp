#include "isbst/faults/mutation.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace isbst::faults {
namespace {

using fbd::Block;
using fbd::BlockDiagram;
using fbd::Edge;
using fbd::OpKind;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::kInvalidMutation, what); }

std::vector<OpKind> replacements(FaultCategory c, OpKind op) {
  switch (c) {
    case FaultCategory::ABR:
      switch (op) {
        case OpKind::Add: return {OpKind::Sub};
        case OpKind::Sub: return {OpKind::Add};
        case OpKind::Mul: return {OpKind::Div};
        case OpKind::Div: return {OpKind::Mul};
        case OpKind::Min: return {OpKind::Max};
        case OpKind::Max: return {OpKind::Min};
        default: return {};
      }
    case FaultCategory::CBR:
      switch (op) {
        case OpKind::Lt: return {OpKind::Le, OpKind::Gt};
        case OpKind::Le: return {OpKind::Lt};
        case OpKind::Gt: return {OpKind::Ge, OpKind::Lt};
        case OpKind::Ge: return {OpKind::Gt};
        case OpKind::Eq: return {OpKind::Ne};
        case OpKind::Ne: return {OpKind::Eq};
        default: return {};
      }
    case FaultCategory::LBR:
      switch (op) {
        case OpKind::And: return {OpKind::Or, OpKind::Xor};
        case OpKind::Or: return {OpKind::And, OpKind::Xor};
        case OpKind::Xor: return {OpKind::And, OpKind::Or};
        default: return {};
      }
    default: return {};
  }
}

std::vector<std::int32_t> constant_payloads(const Block& b) {
  std::vector<std::int32_t> out;
  const std::int64_t candidates[] = {0, 1, kind_max(b.kind), kind_min(b.kind), -std::int64_t{b.value}};
  for (const auto v : candidates) {
    if (v == b.value || v < kind_min(b.kind) || v > kind_max(b.kind)) continue;
    const auto value = static_cast<std::int32_t>(v);
    if (std::find(out.begin(), out.end(), value) == out.end()) out.push_back(value);
  }
  return out;
}

std::string edge_site(const Edge& e) { return e.from + "->" + e.to + ":" + std::to_string(e.port); }

}  // namespace

std::string_view to_string(FaultCategory c) {
  switch (c) {
    case FaultCategory::CVR: return "CVR";
    case FaultCategory::IID: return "IID";
    case FaultCategory::ABR: return "ABR";
    case FaultCategory::CBR: return "CBR";
    case FaultCategory::LBR: return "LBR";
  }
  return "?";
}

FaultCategory fault_category_from_string(std::string_view name) {
  for (const auto c : kAllCategories) {
    if (to_string(c) == name) return c;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown fault category '" + std::string(name) + "'");
}

std::string MutationOp::site() const { return edge ? edge_site(*edge) : block; }

std::string MutationOp::payload() const {
  switch (category) {
    case FaultCategory::CVR: return std::to_string(new_value);
    case FaultCategory::IID: return action == InverterAction::Insert ? "insert NOT" : "delete NOT";
    default: return std::string(fbd::to_string(new_op));
  }
}

std::string MutationOp::describe() const {
  return std::string(to_string(category)) + " " + site() + " -> " + payload();
}

nlohmann::json to_json(const MutationOp& op) {
  nlohmann::json j{{"category", to_string(op.category)}, {"site", op.site()}, {"payload", op.payload()}};
  if (op.edge) {
    j["edge"] = {{"from", op.edge->from}, {"to", op.edge->to}, {"port", op.edge->port}};
  } else {
    j["block"] = op.block;
  }
  switch (op.category) {
    case FaultCategory::CVR: j["new_value"] = op.new_value; break;
    case FaultCategory::IID: j["action"] = op.action == InverterAction::Insert ? "insert" : "delete"; break;
    default: j["new_op"] = fbd::to_string(op.new_op); break;
  }
  return j;
}

MutationOp mutation_from_json(const nlohmann::json& j) {
  try {
    MutationOp op;
    op.category = fault_category_from_string(j.at("category").get<std::string>());
    if (j.contains("edge")) {
      const auto& e = j.at("edge");
      op.edge = Edge{e.at("from").get<std::string>(), e.at("to").get<std::string>(), e.at("port").get<int>()};
    } else {
      op.block = j.at("block").get<std::string>();
    }
    switch (op.category) {
      case FaultCategory::CVR: op.new_value = j.at("new_value").get<std::int32_t>(); break;
      case FaultCategory::IID:
        op.action = j.at("action").get<std::string>() == "insert" ? InverterAction::Insert : InverterAction::Delete;
        break;
      default: op.new_op = fbd::op_kind_from_string(j.at("new_op").get<std::string>()); break;
    }
    return op;
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("malformed mutation: ") + e.what());
  }
}

std::vector<MutationOp> enumerate_sites(const BlockDiagram& d, FaultCategory category) {
  std::vector<MutationOp> ops;
  switch (category) {
    case FaultCategory::CVR:
      for (const auto& b : d.blocks) {
        if (b.op != OpKind::Const) continue;
        for (const auto v : constant_payloads(b)) {
          MutationOp op;
          op.category = category;
          op.block = b.id;
          op.new_value = v;
          ops.push_back(std::move(op));
        }
      }
      break;
    case FaultCategory::IID:
      for (const auto& e : d.edges) {
        if (d.source_kind(e.from) != SignalKind::Bool) continue;
        MutationOp op;
        op.category = category;
        op.edge = e;
        op.action = InverterAction::Insert;
        ops.push_back(std::move(op));
      }
      for (const auto& b : d.blocks) {
        if (b.op != OpKind::Not) continue;
        MutationOp op;
        op.category = category;
        op.block = b.id;
        op.action = InverterAction::Delete;
        ops.push_back(std::move(op));
      }
      break;
    case FaultCategory::ABR:
    case FaultCategory::CBR:
    case FaultCategory::LBR:
      for (const auto& b : d.blocks) {
        for (const auto r : replacements(category, b.op)) {
          // LT/LE/GT/GE are numeric-only; skip swaps that would mistype.
          if ((r == OpKind::Lt || r == OpKind::Le || r == OpKind::Gt || r == OpKind::Ge) && !is_numeric(b.kind)) continue;
          MutationOp op;
          op.category = category;
          op.block = b.id;
          op.new_op = r;
          ops.push_back(std::move(op));
        }
      }
      break;
  }
  return ops;
}

std::string inserted_inverter_id(const BlockDiagram& d) {
  for (int n = 0;; ++n) {
    auto id = "iid_not_" + std::to_string(n);
    if (d.find_block(id) == nullptr) return id;
  }
}

BlockDiagram apply(const BlockDiagram& d, const MutationOp& op) {
  BlockDiagram out = d;
  if (op.category == FaultCategory::IID && op.action == InverterAction::Insert) {
    if (!op.edge) invalid("inverter insertion needs an edge site");
    const auto it = std::find(out.edges.begin(), out.edges.end(), *op.edge);
    if (it == out.edges.end()) invalid("edge " + edge_site(*op.edge) + " not in diagram");
    if (out.source_kind(op.edge->from) != SignalKind::Bool) invalid("edge " + edge_site(*op.edge) + " is not BOOL");
    const auto id = inserted_inverter_id(out);
    Block inv;
    inv.id = id;
    inv.op = OpKind::Not;
    inv.kind = SignalKind::Bool;
    it->from = id;
    out.blocks.push_back(std::move(inv));
    out.edges.push_back({op.edge->from, id, 0});
  } else {
    Block* b = out.find_block(op.block);
    if (b == nullptr) invalid("block '" + op.block + "' not in diagram");
    switch (op.category) {
      case FaultCategory::CVR:
        if (b->op != OpKind::Const) invalid("block '" + op.block + "' is not CONST");
        if (op.new_value == b->value) invalid("identity constant replacement");
        if (op.new_value < kind_min(b->kind) || op.new_value > kind_max(b->kind)) invalid("constant out of range");
        b->value = op.new_value;
        break;
      case FaultCategory::IID: {
        if (b->op != OpKind::Not) invalid("block '" + op.block + "' is not NOT");
        const auto in = std::find_if(out.edges.begin(), out.edges.end(), [&](const Edge& e) { return e.to == op.block; });
        const std::string source = in->from;
        out.edges.erase(in);
        for (auto& e : out.edges) {
          if (e.from == op.block) e.from = source;
        }
        out.blocks.erase(std::find_if(out.blocks.begin(), out.blocks.end(), [&](const Block& x) { return x.id == op.block; }));
        break;
      }
      default: {
        const auto allowed = replacements(op.category, b->op);
        if (std::find(allowed.begin(), allowed.end(), op.new_op) == allowed.end()) {
          invalid(std::string(fbd::to_string(b->op)) + " cannot become " + std::string(fbd::to_string(op.new_op)) +
                  " under " + std::string(to_string(op.category)));
        }
        b->op = op.new_op;
        break;
      }
    }
  }
  try {
    fbd::validate(out);
  } catch (const Error& e) {
    invalid(std::string("mutant is not a valid diagram: ") + e.what());
  }
  return out;
}

}  // namespace isbst::faults
