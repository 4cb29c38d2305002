#pragma once

#include <span>
#include <string>
#include <vector>

#include "relgbdt/schema.hpp"

namespace relgbdt {

enum class LossKind { mse, binary_logloss, multiclass_softmax };

struct Loss {
  LossKind kind = LossKind::mse;
  int classes = 1;  // score dimensions: 1 for mse/binary, K for multiclass
};

// Labels decoded from raw tokens against a loss:
//   mse         -> numeric (regression target)
//   binary      -> class_index in {0,1}, tokens must parse to 0 or 1
//   multiclass  -> class_index into class_names (sorted unique training tokens)
struct LabelData {
  std::vector<double> numeric;
  std::vector<int> class_index;
  std::vector<std::string> class_names;

  size_t size() const { return numeric.empty() ? class_index.size() : numeric.size(); }
};

Loss make_loss(LossKind kind, int classes = 1);
std::string_view to_string(LossKind k);

// Decodes raw label tokens; for multiclass, class_names may be supplied (from
// a trained model) so evaluation data maps onto training classes. Throws on
// unparseable labels or, with fixed class_names, unknown tokens.
LabelData decode_labels(const Loss& loss, std::span<const std::string> raw,
                        std::span<const std::string> class_names = {});

// argmin_rho sum L(rho, y). Degenerate binary/multiclass frequencies are
// clamped to [1e-6, 1 - 1e-6] so the log-odds stay finite; multiclass priors
// are centered log-priors.
std::vector<double> initial_prediction(const Loss& loss, const LabelData& labels);

// L(F, y) for one example; F has loss.classes entries.
double loss_value(const Loss& loss, std::span<const double> scores, const LabelData& labels,
                  size_t example);

// dL/dF (the raw gradient, matching finite differences of loss_value).
void pseudo_response(const Loss& loss, std::span<const double> scores, const LabelData& labels,
                     size_t example, std::span<double> out);

// Mean loss over all examples; scores is row-major n x classes.
double mean_loss(const Loss& loss, std::span<const double> scores, const LabelData& labels);

// Accuracy for classification, RMSE for regression.
double eval_metric(const Loss& loss, std::span<const double> scores, const LabelData& labels);
std::string_view metric_name(const Loss& loss);

double sigmoid(double x);

}  // namespace relgbdt
