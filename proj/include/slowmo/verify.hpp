#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace slowmo {

struct VerifyCheck {
  std::string name;
  bool ok = false;
  nlohmann::json values;
};

struct VerifyReport {
  std::uint64_t seed = 1;
  std::vector<VerifyCheck> checks;
  bool ok() const;
  std::vector<std::string> failures() const;
  /// Manifest without timings: equal seeds give identical bytes.
  nlohmann::json manifest() const;
};

/// Headless property battery over every module, randomized parts seeded from seed.
VerifyReport run_verify(std::uint64_t seed);

}  // namespace slowmo
