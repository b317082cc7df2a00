// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#include "tokengraph/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "tokengraph/error.hpp"

namespace tokengraph {

using nlohmann::json;

std::vector<Sample> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open dataset " + path.string());
  std::vector<Sample> samples;
  std::unordered_set<SampleId> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Sample s;
    try {
      const json obj = json::parse(line);
      s.id = obj.at("id").get<SampleId>();
      s.text = obj.at("text").get<std::string>();
      const json& label = obj.at("label");
      s.label = label.is_string() ? label.get<std::string>() : label.dump();
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!seen.insert(s.id).second) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": duplicate id " +
                            std::to_string(s.id));
    }
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw ValidationError("dataset " + path.string() + " contains no samples");
  return samples;
}

std::string dataset_to_jsonl(const std::vector<Sample>& samples) {
  std::ostringstream out;
  for (const auto& s : samples) {
    out << json{{"id", s.id}, {"text", s.text}, {"label", s.label}}.dump() << '\n';
  }
  return out.str();
}

void write_dataset(const std::vector<Sample>& samples, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << dataset_to_jsonl(samples);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::string> label_names_of(const std::vector<Sample>& samples) {
  std::set<std::string> names;
  for (const auto& s : samples) names.insert(s.label);
  return {names.begin(), names.end()};
}

}  // namespace tokengraph
