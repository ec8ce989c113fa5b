#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace qdmd {

struct PropertyResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;   ///< worst deviation or failure count
  double tolerance = 0.0;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 20240611;
  std::size_t draws = 1000;       ///< random instances for the inequality checks
  std::size_t index_draws = 100;  ///< random embeddings for the index oracle
  bool mutate_jw = false;         ///< negative control: flip the sign of the YY hopping strings
};

struct VerifyReport {
  std::vector<PropertyResult> results;
  bool pass() const;
  nlohmann::json to_json() const;
};

VerifyReport run_verify(const VerifyOptions& options = {});

}  // namespace qdmd
