// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tokengraph/tokenizer.hpp"

namespace tokengraph {

/// One line of the canonical dataset format: {"id": int, "text": str, "label": str}.
struct Sample {
  SampleId id = 0;
  std::string text;
  std::string label;
  bool operator==(const Sample&) const = default;
};

std::vector<Sample> read_dataset(const std::filesystem::path& path);
void write_dataset(const std::vector<Sample>& samples, const std::filesystem::path& path);
std::string dataset_to_jsonl(const std::vector<Sample>& samples);

/// Distinct labels, sorted.
std::vector<std::string> label_names_of(const std::vector<Sample>& samples);

}  // namespace tokengraph
