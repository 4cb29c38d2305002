#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "relgbdt/schema.hpp"

namespace relgbdt {

// One feature column over a fixed example set. Missing is an explicit value:
// NaN for numerical columns, code -1 for categorical ones.
struct FeatureColumn {
  std::string name;
  AttrKind kind = AttrKind::numerical;
  std::vector<double> num;      // numerical values, NaN = missing
  std::vector<int32_t> cat;     // dictionary codes, -1 = missing
  std::shared_ptr<const std::vector<std::string>> dict;

  size_t size() const { return kind == AttrKind::numerical ? num.size() : cat.size(); }
  bool missing(size_t i) const {
    return kind == AttrKind::numerical ? std::isnan(num[i]) : cat[i] < 0;
  }
  const std::string& token(size_t i) const { return (*dict)[static_cast<size_t>(cat[i])]; }
};

inline FeatureColumn numeric_column(std::string name, std::vector<double> values) {
  FeatureColumn c;
  c.name = std::move(name);
  c.kind = AttrKind::numerical;
  c.num = std::move(values);
  return c;
}

// Interns tokens in first-occurrence order; the empty token means missing.
FeatureColumn categorical_column(std::string name, std::span<const std::string> tokens);

// Same tokens mapped against a pre-built dictionary; unseen tokens become
// missing (used to align evaluation data with training-time dictionaries).
FeatureColumn categorical_column_with_dict(
    std::string name, std::span<const std::string> tokens,
    std::shared_ptr<const std::vector<std::string>> dict);

}  // namespace relgbdt
