#pragma once

#include <string>

#include "relgbdt/booster.hpp"

namespace relgbdt {

// Model file: a single JSON document holding the schema fingerprint, the
// schedule, the loss, rho, shrinkage, iteration count, tree config, and every
// forward/backward tree. Doubles use shortest round-trip formatting, so
// load(save(m)) predicts bit-identically to m.
std::string model_to_json(const StrongModel& model);
StrongModel model_from_json(const std::string& text);

void save_model(const StrongModel& model, const std::string& path);
StrongModel load_model(const std::string& path);

}  // namespace relgbdt
