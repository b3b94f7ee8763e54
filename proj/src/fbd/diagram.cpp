#include "isbst/fbd/diagram.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

namespace isbst::fbd {
namespace {

constexpr std::array<std::pair<OpKind, std::string_view>, 22> kOpNames{{
    {OpKind::Const, "CONST"}, {OpKind::Add, "ADD"}, {OpKind::Sub, "SUB"},
    {OpKind::Mul, "MUL"}, {OpKind::Div, "DIV"}, {OpKind::Min, "MIN"},
    {OpKind::Max, "MAX"}, {OpKind::Abs, "ABS"}, {OpKind::Neg, "NEG"},
    {OpKind::Lt, "LT"}, {OpKind::Le, "LE"}, {OpKind::Gt, "GT"},
    {OpKind::Ge, "GE"}, {OpKind::Eq, "EQ"}, {OpKind::Ne, "NE"},
    {OpKind::And, "AND"}, {OpKind::Or, "OR"}, {OpKind::Xor, "XOR"},
    {OpKind::Not, "NOT"}, {OpKind::Mux, "MUX"}, {OpKind::UnitDelay, "UNIT_DELAY"},
    {OpKind::Saturate, "SATURATE"},
}};

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidDiagram, what);
}

std::optional<int> parse_prefixed(std::string_view endpoint, std::string_view prefix) {
  if (!endpoint.starts_with(prefix)) return std::nullopt;
  const auto digits = endpoint.substr(prefix.size());
  int value = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) return std::nullopt;
  return value;
}

// Required kind of input `port` of block `b`; nullopt means "any numeric".
std::optional<SignalKind> port_kind(const Block& b, int port) {
  switch (b.op) {
    case OpKind::Mux: return port == 0 ? SignalKind::Bool : b.kind;
    case OpKind::Saturate: return std::nullopt;
    default: return b.kind;
  }
}

}  // namespace

std::string_view to_string(OpKind op) {
  for (const auto& [k, name] : kOpNames) {
    if (k == op) return name;
  }
  return "?";
}

OpKind op_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kOpNames) {
    if (n == name) return k;
  }
  invalid("unknown block op '" + std::string(name) + "'");
}

int arity(OpKind op) {
  switch (op) {
    case OpKind::Const: return 0;
    case OpKind::Abs:
    case OpKind::Neg:
    case OpKind::Not:
    case OpKind::UnitDelay:
    case OpKind::Saturate: return 1;
    case OpKind::Mux: return 3;
    default: return 2;
  }
}

bool is_arithmetic(OpKind op) {
  return op == OpKind::Add || op == OpKind::Sub || op == OpKind::Mul || op == OpKind::Div ||
         op == OpKind::Min || op == OpKind::Max;
}

bool is_comparison(OpKind op) {
  return op == OpKind::Lt || op == OpKind::Le || op == OpKind::Gt || op == OpKind::Ge ||
         op == OpKind::Eq || op == OpKind::Ne;
}

bool is_logical(OpKind op) { return op == OpKind::And || op == OpKind::Or || op == OpKind::Xor; }

SignalKind Block::output_kind() const noexcept {
  return is_comparison(op) ? SignalKind::Bool : kind;
}

const Block* BlockDiagram::find_block(std::string_view id) const {
  const auto it = std::find_if(blocks.begin(), blocks.end(), [&](const Block& b) { return b.id == id; });
  return it == blocks.end() ? nullptr : &*it;
}

Block* BlockDiagram::find_block(std::string_view id) {
  const auto it = std::find_if(blocks.begin(), blocks.end(), [&](const Block& b) { return b.id == id; });
  return it == blocks.end() ? nullptr : &*it;
}

const PortDecl* BlockDiagram::find_input(int channel) const {
  const auto it = std::find_if(inputs.begin(), inputs.end(), [&](const PortDecl& p) { return p.channel == channel; });
  return it == inputs.end() ? nullptr : &*it;
}

const PortDecl* BlockDiagram::find_output(int channel) const {
  const auto it = std::find_if(outputs.begin(), outputs.end(), [&](const PortDecl& p) { return p.channel == channel; });
  return it == outputs.end() ? nullptr : &*it;
}

std::optional<SignalKind> BlockDiagram::source_kind(std::string_view endpoint) const {
  if (const auto ch = parse_input_endpoint(endpoint)) {
    const auto* decl = find_input(*ch);
    return decl ? std::optional(decl->kind) : std::nullopt;
  }
  const auto* b = find_block(endpoint);
  return b ? std::optional(b->output_kind()) : std::nullopt;
}

std::string input_endpoint(int channel) { return "in:" + std::to_string(channel); }
std::string output_endpoint(int channel) { return "out:" + std::to_string(channel); }

std::optional<int> parse_input_endpoint(std::string_view endpoint) { return parse_prefixed(endpoint, "in:"); }
std::optional<int> parse_output_endpoint(std::string_view endpoint) { return parse_prefixed(endpoint, "out:"); }

void validate(const BlockDiagram& d) {
  std::set<int> channels;
  for (const auto& p : d.inputs) {
    if (!channels.insert(p.channel).second) invalid("duplicate channel " + std::to_string(p.channel));
  }
  for (const auto& p : d.outputs) {
    if (!channels.insert(p.channel).second) invalid("duplicate channel " + std::to_string(p.channel));
  }
  if (d.outputs.empty()) invalid("diagram declares no outputs");

  std::set<std::string_view> ids;
  for (const auto& b : d.blocks) {
    if (b.id.empty() || b.id.find(':') != std::string::npos) invalid("bad block id '" + b.id + "'");
    if (!ids.insert(b.id).second) invalid("duplicate block id '" + b.id + "'");
    const bool numeric = is_numeric(b.kind);
    if ((is_arithmetic(b.op) || b.op == OpKind::Abs || b.op == OpKind::Neg || b.op == OpKind::Saturate ||
         b.op == OpKind::Lt || b.op == OpKind::Le || b.op == OpKind::Gt || b.op == OpKind::Ge) &&
        !numeric) {
      invalid("block '" + b.id + "' needs a numeric kind");
    }
    if ((is_logical(b.op) || b.op == OpKind::Not) && numeric) {
      invalid("block '" + b.id + "' needs kind BOOL");
    }
    if ((b.op == OpKind::Const || b.op == OpKind::UnitDelay) &&
        (b.value < kind_min(b.kind) || b.value > kind_max(b.kind))) {
      invalid("block '" + b.id + "' payload outside its kind range");
    }
    if (b.op == OpKind::Saturate && b.lo > b.hi) invalid("block '" + b.id + "' has lo > hi");
  }

  // Exactly one driver per block port and per declared output.
  std::map<std::pair<std::string, int>, const Edge*> drivers;
  for (const auto& e : d.edges) {
    const auto src = d.source_kind(e.from);
    if (!src) invalid("edge source '" + e.from + "' does not exist");
    if (parse_output_endpoint(e.from)) invalid("edge cannot start at an output");

    if (const auto out_ch = parse_output_endpoint(e.to)) {
      const auto* decl = d.find_output(*out_ch);
      if (!decl) invalid("edge target '" + e.to + "' is not a declared output");
      if (decl->kind != *src) invalid("output " + e.to + " kind mismatch");
      if (e.port != 0) invalid("output edges use port 0");
    } else {
      const auto* b = d.find_block(e.to);
      if (!b) invalid("edge target '" + e.to + "' does not exist");
      if (e.port < 0 || e.port >= arity(b->op)) invalid("edge into '" + e.to + "' has bad port");
      const auto want = port_kind(*b, e.port);
      if (want ? *want != *src : !is_numeric(*src)) {
        invalid("edge " + e.from + " -> " + e.to + ":" + std::to_string(e.port) + " kind mismatch");
      }
    }
    if (!drivers.emplace(std::pair{e.to, e.port}, &e).second) {
      invalid("port " + e.to + ":" + std::to_string(e.port) + " has more than one driver");
    }
  }
  for (const auto& b : d.blocks) {
    for (int p = 0; p < arity(b.op); ++p) {
      if (!drivers.contains({b.id, p})) invalid("port " + b.id + ":" + std::to_string(p) + " is unconnected");
    }
  }
  for (const auto& o : d.outputs) {
    if (!drivers.contains({output_endpoint(o.channel), 0})) {
      invalid("output " + std::to_string(o.channel) + " is unconnected");
    }
  }
  (void)evaluation_order(d);
}

std::vector<std::size_t> evaluation_order(const BlockDiagram& d) {
  std::map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < d.blocks.size(); ++i) index.emplace(d.blocks[i].id, i);

  std::vector<std::vector<std::size_t>> consumers(d.blocks.size());
  std::vector<int> pending(d.blocks.size(), 0);
  for (const auto& e : d.edges) {
    const auto to = index.find(e.to);
    if (to == index.end()) continue;
    const auto from = index.find(e.from);
    if (from == index.end()) continue;  // external input
    if (d.blocks[from->second].op == OpKind::UnitDelay) continue;
    consumers[from->second].push_back(to->second);
    ++pending[to->second];
  }

  // Kahn's algorithm; the min-heap keeps the order stable by declaration.
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    if (pending[i] == 0) ready.push(i);
  }
  std::vector<std::size_t> order;
  order.reserve(d.blocks.size());
  while (!ready.empty()) {
    const auto i = ready.top();
    ready.pop();
    order.push_back(i);
    for (const auto c : consumers[i]) {
      if (--pending[c] == 0) ready.push(c);
    }
  }
  if (order.size() != d.blocks.size()) invalid("diagram has a cycle not broken by a UNIT_DELAY");
  return order;
}

nlohmann::json to_json(const BlockDiagram& d) {
  using nlohmann::json;
  json j;
  j["name"] = d.name;
  auto ports = [](const std::vector<PortDecl>& ps) {
    json arr = json::array();
    for (const auto& p : ps) {
      arr.push_back({{"channel", p.channel}, {"name", p.name}, {"type", to_string(p.kind)}});
    }
    return arr;
  };
  j["inputs"] = ports(d.inputs);
  j["outputs"] = ports(d.outputs);
  json blocks = json::array();
  for (const auto& b : d.blocks) {
    json jb{{"id", b.id}, {"op", to_string(b.op)}, {"type", to_string(b.kind)}};
    if (b.op == OpKind::Const || b.op == OpKind::UnitDelay) jb["value"] = b.value;
    if (b.op == OpKind::Saturate) {
      jb["lo"] = b.lo;
      jb["hi"] = b.hi;
    }
    blocks.push_back(std::move(jb));
  }
  j["blocks"] = std::move(blocks);
  json edges = json::array();
  for (const auto& e : d.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"port", e.port}});
  j["edges"] = std::move(edges);
  return j;
}

BlockDiagram diagram_from_json(const nlohmann::json& j) {
  try {
    BlockDiagram d;
    d.name = j.value("name", "");
    auto ports = [](const nlohmann::json& arr) {
      std::vector<PortDecl> out;
      for (const auto& p : arr) {
        out.push_back({p.at("channel").get<int>(), p.value("name", ""),
                       signal_kind_from_string(p.at("type").get<std::string>())});
      }
      return out;
    };
    d.inputs = ports(j.at("inputs"));
    d.outputs = ports(j.at("outputs"));
    for (const auto& jb : j.at("blocks")) {
      Block b;
      b.id = jb.at("id").get<std::string>();
      b.op = op_kind_from_string(jb.at("op").get<std::string>());
      b.kind = signal_kind_from_string(jb.at("type").get<std::string>());
      b.value = jb.value("value", 0);
      b.lo = jb.value("lo", kind_min(b.kind));
      b.hi = jb.value("hi", kind_max(b.kind));
      if (b.op != OpKind::Saturate) {
        b.lo = kind_min(SignalKind::S16);
        b.hi = kind_max(SignalKind::S16);
      }
      d.blocks.push_back(std::move(b));
    }
    for (const auto& je : j.at("edges")) {
      d.edges.push_back({je.at("from").get<std::string>(), je.at("to").get<std::string>(), je.value("port", 0)});
    }
    validate(d);
    return d;
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("malformed diagram JSON: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidDiagram) throw;
    invalid(e.what());
  }
}

void save_diagram(const BlockDiagram& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << to_json(d).dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

BlockDiagram load_diagram(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    invalid(path.string() + ": " + e.what());
  }
  return diagram_from_json(j);
}

}  // namespace isbst::fbd
