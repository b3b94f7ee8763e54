#include <fstream>
#include <sstream>

#include "isbst/fbd/ramp.hpp"
#include "isbst/session/session.hpp"

namespace isbst::session {

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  if (p == csv_path) p += ".meta.json";
  return p;
}

std::string traces_to_csv(const fbd::TraceSet& inputs, const fbd::TraceSet& outputs) {
  std::vector<const SignalTrace*> cols;
  for (int ch = 0; ch < fbd::kRampInputCount; ++ch) cols.push_back(&fbd::find_trace(inputs, ch));
  for (int ch = fbd::kRampInputCount; ch < fbd::kRampInputCount + fbd::kRampOutputCount; ++ch) {
    cols.push_back(&fbd::find_trace(outputs, ch));
  }
  const std::size_t T = cols.front()->length();
  std::ostringstream out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    out << (i ? "," : "") << (cols[i]->channel < fbd::kRampInputCount ? "Input_" : "Output_") << cols[i]->channel;
  }
  out << '\n';
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (cols[i]->length() != T) throw Error(ErrorCode::kInvalidArgument, "traces of unequal length");
      out << (i ? "," : "") << cols[i]->samples[t];
    }
    out << '\n';
  }
  return out.str();
}

void write_test_case(const ExportedTestCase& tc, const std::filesystem::path& csv_path) {
  const auto csv = traces_to_csv(tc.inputs, tc.outputs);
  {
    std::ofstream out(csv_path);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + csv_path.string());
    out << csv;
    if (!out) throw Error(ErrorCode::kIo, "write failed: " + csv_path.string());
  }
  nlohmann::json meta{{"version_id", tc.version_id},
                      {"seed", tc.seed},
                      {"event", tc.event_index},
                      {"candidate", tc.candidate_id},
                      {"raw", tc.raw},
                      {"config", to_json(tc.config)}};
  const auto side = sidecar_path(csv_path);
  std::ofstream out(side);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + side.string());
  out << meta.dump(2) << '\n';
}

ExportedTestCase read_test_case(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + csv_path.string());
  ExportedTestCase tc;
  const auto in_decls = fbd::ramp_input_decls();
  const auto out_decls = fbd::ramp_output_decls();
  for (const auto& d : in_decls) tc.inputs.push_back({d.channel, d.kind, {}});
  for (const auto& d : out_decls) tc.outputs.push_back({d.channel, d.kind, {}});

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kIo, "empty test case " + csv_path.string());
  const std::size_t width = in_decls.size() + out_decls.size();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(row, cell, ',')) {
      if (col >= width) throw Error(ErrorCode::kIo, "too many columns in " + csv_path.string());
      std::int32_t v = 0;
      try {
        v = std::stoi(cell);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kIo, "bad cell '" + cell + "' in " + csv_path.string());
      }
      auto& trace = col < in_decls.size() ? tc.inputs[col] : tc.outputs[col - in_decls.size()];
      trace.samples.push_back(v);
      ++col;
    }
    if (col != width) throw Error(ErrorCode::kIo, "short row in " + csv_path.string());
  }

  const auto side = sidecar_path(csv_path);
  std::ifstream meta_in(side);
  if (meta_in) {
    try {
      const auto meta = nlohmann::json::parse(meta_in);
      tc.version_id = meta.at("version_id").get<int>();
      tc.seed = meta.at("seed").get<std::uint64_t>();
      tc.event_index = meta.at("event").get<std::size_t>();
      tc.candidate_id = meta.at("candidate").get<std::uint64_t>();
      tc.raw = meta.at("raw").get<objectives::ScoreVector>();
      tc.config = config_from_json(meta.at("config"));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kIo, "malformed sidecar " + side.string() + ": " + e.what());
    }
  }
  return tc;
}

}  // namespace isbst::session
