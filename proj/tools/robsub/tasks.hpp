#pragma once

#include <optional>

#include "config.hpp"

namespace robsub::cli {

struct TrialResult {
  json record;  // deterministic fields
  json timing;  // wall clock, seconds
  bool bad_input = false;
  std::optional<Mat> projection;
};

TrialResult run_trial(const Config& c, int trial);

// Per-metric mean/min/max over numeric fields, rates over booleans, counts
// over strings.
json aggregate(const std::vector<TrialResult>& trials);

// trial,metric,value rows for every numeric or boolean field.
std::string long_csv(const std::vector<TrialResult>& trials);

}  // namespace robsub::cli
