#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "codemix/corpus.hpp"
#include "codemix/model.hpp"

namespace codemix {

// Rows = gold label, columns = predicted label, in Label declaration order.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumLabels>, kNumLabels> counts{};

  std::uint64_t at(Label gold, Label pred) const {
    return counts[index_of(gold)][index_of(pred)];
  }
  std::uint64_t total() const;

  friend bool operator==(const ConfusionMatrix&,
                         const ConfusionMatrix&) = default;
};

struct ClassMetrics {
  Label label = Label::Positive;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

struct WeightedMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

// Throws ContractError when the lists are empty or differ in length.
ConfusionMatrix confusion_matrix(std::span<const Label> gold,
                                 std::span<const Label> pred);
// Thread-local partial matrices summed at the end; identical to the serial
// reference because integer addition is associative.
ConfusionMatrix confusion_matrix_parallel(std::span<const Label> gold,
                                          std::span<const Label> pred);

// Undefined ratios (zero denominators) are 0.
std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& m);

// Support-weighted mean; zero-support classes weigh 0. Throws ContractError
// when total support is 0.
WeightedMetrics weighted_average(const std::vector<ClassMetrics>& metrics);

// ---------------------------------------------------------------------------
// Result grid

struct ReportCell {
  Language language = Language::Kannada;
  ModelKind model = ModelKind::NaiveBayes;
  VariantId variant = VariantId::TRA;
  WeightedMetrics metrics;
};

struct Report {
  std::vector<Language> languages;
  std::vector<ModelKind> models = {kAllModelKinds.begin(), kAllModelKinds.end()};
  std::vector<ReportCell> cells;

  const ReportCell* find(Language l, ModelKind m, VariantId v) const;
};

// One section per language, rows TRA/TRAI/TRAA/MERGED, a P/R/F1 block per
// model, four decimals. Throws ReportError naming every missing cell.
std::string render_report(const Report& report);

// `language,model,variant,precision,recall,f1,support` with a header row.
std::string render_csv(const Report& report);
Report parse_csv(const std::string& text);

std::string format_metric(double v);

}  // namespace codemix
