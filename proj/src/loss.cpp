#include "relgbdt/loss.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "relgbdt/dataset.hpp"

namespace relgbdt {

namespace {
constexpr double kProbClamp = 1e-6;
}

Loss make_loss(LossKind kind, int classes) {
  if (kind == LossKind::multiclass_softmax && classes < 2)
    throw std::runtime_error("multiclass loss needs at least 2 classes");
  return Loss{kind, kind == LossKind::multiclass_softmax ? classes : 1};
}

std::string_view to_string(LossKind k) {
  switch (k) {
    case LossKind::mse: return "mse";
    case LossKind::binary_logloss: return "binary_logloss";
    default: return "multiclass_softmax";
  }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

LabelData decode_labels(const Loss& loss, std::span<const std::string> raw,
                        std::span<const std::string> class_names) {
  LabelData out;
  switch (loss.kind) {
    case LossKind::mse:
      out.numeric.reserve(raw.size());
      for (const std::string& tok : raw) {
        double v;
        if (!parse_double(tok, v))
          throw std::runtime_error("label '" + tok + "' is not numeric");
        out.numeric.push_back(v);
      }
      break;
    case LossKind::binary_logloss:
      out.class_names = {"0", "1"};
      out.class_index.reserve(raw.size());
      for (const std::string& tok : raw) {
        double v;
        if (!parse_double(tok, v) || (v != 0.0 && v != 1.0))
          throw std::runtime_error("binary label '" + tok + "' must be 0 or 1");
        out.class_index.push_back(v == 1.0 ? 1 : 0);
      }
      break;
    case LossKind::multiclass_softmax: {
      if (class_names.empty()) {
        std::set<std::string> uniq(raw.begin(), raw.end());
        out.class_names.assign(uniq.begin(), uniq.end());
      } else {
        out.class_names.assign(class_names.begin(), class_names.end());
      }
      out.class_index.reserve(raw.size());
      for (const std::string& tok : raw) {
        auto it = std::lower_bound(out.class_names.begin(), out.class_names.end(), tok);
        if (it == out.class_names.end() || *it != tok)
          throw std::runtime_error("label '" + tok + "' not among training classes");
        out.class_index.push_back(static_cast<int>(it - out.class_names.begin()));
      }
      break;
    }
  }
  return out;
}

std::vector<double> initial_prediction(const Loss& loss, const LabelData& labels) {
  if (labels.size() == 0) throw std::runtime_error("initial_prediction: no labels");
  switch (loss.kind) {
    case LossKind::mse: {
      double sum = 0.0;
      for (double y : labels.numeric) sum += y;
      return {sum / static_cast<double>(labels.numeric.size())};
    }
    case LossKind::binary_logloss: {
      double positives = 0.0;
      for (int y : labels.class_index) positives += y;
      double p = positives / static_cast<double>(labels.class_index.size());
      p = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
      return {std::log(p / (1.0 - p))};
    }
    case LossKind::multiclass_softmax: {
      std::vector<double> counts(loss.classes, 0.0);
      for (int y : labels.class_index) counts[y] += 1.0;
      double n = static_cast<double>(labels.class_index.size());
      std::vector<double> rho(loss.classes);
      double mean_log = 0.0;
      for (int k = 0; k < loss.classes; ++k) {
        double p = std::clamp(counts[k] / n, kProbClamp, 1.0 - kProbClamp);
        rho[k] = std::log(p);
        mean_log += rho[k];
      }
      mean_log /= loss.classes;
      for (double& r : rho) r -= mean_log;  // centered log-priors
      return rho;
    }
  }
  return {};
}

double loss_value(const Loss& loss, std::span<const double> scores, const LabelData& labels,
                  size_t example) {
  switch (loss.kind) {
    case LossKind::mse: {
      double d = scores[0] - labels.numeric[example];
      return 0.5 * d * d;
    }
    case LossKind::binary_logloss: {
      // log(1 + e^F) - y F, in the overflow-safe form
      double f = scores[0];
      double y = labels.class_index[example];
      return std::max(f, 0.0) + std::log1p(std::exp(-std::abs(f))) - y * f;
    }
    case LossKind::multiclass_softmax: {
      double mx = scores[0];
      for (double s : scores) mx = std::max(mx, s);
      double sum = 0.0;
      for (double s : scores) sum += std::exp(s - mx);
      return std::log(sum) + mx - scores[labels.class_index[example]];
    }
  }
  return 0.0;
}

void pseudo_response(const Loss& loss, std::span<const double> scores, const LabelData& labels,
                     size_t example, std::span<double> out) {
  switch (loss.kind) {
    case LossKind::mse:
      out[0] = scores[0] - labels.numeric[example];
      break;
    case LossKind::binary_logloss:
      out[0] = sigmoid(scores[0]) - static_cast<double>(labels.class_index[example]);
      break;
    case LossKind::multiclass_softmax: {
      double mx = scores[0];
      for (double s : scores) mx = std::max(mx, s);
      double sum = 0.0;
      for (size_t k = 0; k < scores.size(); ++k) sum += std::exp(scores[k] - mx);
      for (size_t k = 0; k < scores.size(); ++k)
        out[k] = std::exp(scores[k] - mx) / sum -
                 (static_cast<int>(k) == labels.class_index[example] ? 1.0 : 0.0);
      break;
    }
  }
}

double mean_loss(const Loss& loss, std::span<const double> scores, const LabelData& labels) {
  size_t n = labels.size();
  double total = 0.0;
  for (size_t i = 0; i < n; ++i)
    total += loss_value(loss, scores.subspan(i * loss.classes, loss.classes), labels, i);
  return total / static_cast<double>(n);
}

double eval_metric(const Loss& loss, std::span<const double> scores, const LabelData& labels) {
  size_t n = labels.size();
  if (loss.kind == LossKind::mse) {
    double sq = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double d = scores[i] - labels.numeric[i];
      sq += d * d;
    }
    return std::sqrt(sq / static_cast<double>(n));
  }
  size_t hits = 0;
  for (size_t i = 0; i < n; ++i) {
    int predicted;
    if (loss.kind == LossKind::binary_logloss) {
      predicted = scores[i] > 0.0 ? 1 : 0;
    } else {
      auto row = scores.subspan(i * loss.classes, loss.classes);
      predicted = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    hits += predicted == labels.class_index[i];
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

std::string_view metric_name(const Loss& loss) {
  return loss.kind == LossKind::mse ? "rmse" : "accuracy";
}

}  // namespace relgbdt
