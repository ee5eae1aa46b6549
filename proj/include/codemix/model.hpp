#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "codemix/mlp.hpp"
#include "codemix/naive_bayes.hpp"

namespace codemix {

using Model = std::variant<NBModel, MLPModel>;

enum class ModelKind : std::uint8_t { NaiveBayes, Mlp };
inline constexpr std::array<ModelKind, 2> kAllModelKinds = {
    ModelKind::NaiveBayes, ModelKind::Mlp};

std::string_view to_string(ModelKind k);
std::optional<ModelKind> parse_model_kind(std::string_view raw);
ModelKind kind_of(const Model& m);
const FeatureSpace& feature_space(const Model& m);

struct Prediction {
  Label label = Label::Positive;
  // NB: log-posteriors; MLP: pre-softmax logits.
  ClassScores scores{};
};

// Argmax with ties resolved to the earliest label in declaration order.
Label argmax_label(const ClassScores& scores);

Prediction predict(const Model& model, const SparseVec& x);
Prediction predict(const Model& model, std::string_view text);
// Throws ContractError when `space` differs from the model's feature space.
Prediction predict(const Model& model, std::string_view text,
                   const FeatureSpace& space);

// Row-parallel batch prediction and its serial reference.
std::vector<Label> predict_batch(const Model& model,
                                 const std::vector<std::string>& texts);
std::vector<Label> predict_batch_serial(const Model& model,
                                        const std::vector<std::string>& texts);

// Versioned text format; floating-point values are written as hexfloats so
// loading reproduces every parameter bit for bit.
void save_model(std::ostream& out, const Model& model);
Model load_model(std::istream& in);
void save_model_file(const std::string& path, const Model& model);
Model load_model_file(const std::string& path);

}  // namespace codemix
