#include "codemix/eval.hpp"

#include <cstdio>
#include <sstream>

#include "codemix/error.hpp"
#include "codemix/strings.hpp"

namespace codemix {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto& row : counts) {
    for (auto c : row) t += c;
  }
  return t;
}

namespace {

void check_lengths(std::span<const Label> gold, std::span<const Label> pred) {
  if (gold.size() != pred.size()) {
    throw ContractError("confusion_matrix: " + std::to_string(gold.size()) +
                        " gold labels vs " + std::to_string(pred.size()) +
                        " predictions");
  }
  if (gold.empty()) throw ContractError("confusion_matrix: empty input");
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0
                  : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionMatrix confusion_matrix(std::span<const Label> gold,
                                 std::span<const Label> pred) {
  check_lengths(gold, pred);
  ConfusionMatrix m;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++m.counts[index_of(gold[i])][index_of(pred[i])];
  }
  return m;
}

ConfusionMatrix confusion_matrix_parallel(std::span<const Label> gold,
                                          std::span<const Label> pred) {
  check_lengths(gold, pred);
  ConfusionMatrix m;
  const auto n = static_cast<std::ptrdiff_t>(gold.size());
#pragma omp parallel
  {
    ConfusionMatrix local;
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      ++local.counts[index_of(gold[k])][index_of(pred[k])];
    }
#pragma omp critical(codemix_confusion_merge)
    for (std::size_t r = 0; r < kNumLabels; ++r) {
      for (std::size_t c = 0; c < kNumLabels; ++c) {
        m.counts[r][c] += local.counts[r][c];
      }
    }
  }
  return m;
}

std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& m) {
  std::vector<ClassMetrics> out;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    std::uint64_t tp = m.counts[c][c], row = 0, col = 0;
    for (std::size_t k = 0; k < kNumLabels; ++k) {
      row += m.counts[c][k];
      col += m.counts[k][c];
    }
    ClassMetrics cm;
    cm.label = kAllLabels[c];
    cm.precision = ratio(tp, col);
    cm.recall = ratio(tp, row);
    const double pr = cm.precision + cm.recall;
    cm.f1 = pr > 0.0 ? 2.0 * cm.precision * cm.recall / pr : 0.0;
    cm.support = row;
    out.push_back(cm);
  }
  return out;
}

WeightedMetrics weighted_average(const std::vector<ClassMetrics>& metrics) {
  WeightedMetrics w;
  for (const auto& m : metrics) w.support += m.support;
  if (w.support == 0) {
    throw ContractError("weighted_average: total support is zero");
  }
  const double total = static_cast<double>(w.support);
  for (const auto& m : metrics) {
    const double weight = static_cast<double>(m.support) / total;
    w.precision += weight * m.precision;
    w.recall += weight * m.recall;
    w.f1 += weight * m.f1;
  }
  return w;
}

// ---------------------------------------------------------------------------
// Report

const ReportCell* Report::find(Language l, ModelKind m, VariantId v) const {
  for (const auto& c : cells) {
    if (c.language == l && c.model == m && c.variant == v) return &c;
  }
  return nullptr;
}

std::string format_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

namespace {

std::string_view variant_row_name(VariantId v) {
  switch (v) {
    case VariantId::TRA: return "Train (TRA)";
    case VariantId::TRAI: return "Transliterate + TRA (TRAI)";
    case VariantId::TRAA: return "Translate + TRA (TRAA)";
    case VariantId::MERGED: return "Merged (TRA+TRAI+TRAA)";
  }
  return "?";
}

std::string_view model_column_name(ModelKind m) {
  return m == ModelKind::NaiveBayes ? "NB" : "MLP";
}

std::string pad(std::string_view s, std::size_t width) {
  std::string out(s);
  if (out.size() < width) out.append(width - out.size(), ' ');
  return out;
}

void check_complete(const Report& report) {
  std::string missing;
  for (Language l : report.languages) {
    for (ModelKind m : report.models) {
      for (VariantId v : kAllVariants) {
        if (!report.find(l, m, v)) {
          if (!missing.empty()) missing += ", ";
          missing += std::string(to_string(l)) + "/" +
                     std::string(to_string(m)) + "/" +
                     std::string(to_string(v));
        }
      }
    }
  }
  if (!missing.empty()) throw ReportError("missing report cells: " + missing);
}

}  // namespace

std::string render_report(const Report& report) {
  check_complete(report);
  constexpr std::size_t kNameWidth = 28;
  std::ostringstream out;
  for (Language l : report.languages) {
    std::string title(to_string(l));
    title[0] = static_cast<char>(title[0] - 'a' + 'A');
    out << title << '\n';
    out << pad("Dataset", kNameWidth);
    for (ModelKind m : report.models) {
      out << "| " << pad(model_column_name(m), 21);
    }
    out << '\n' << pad("", kNameWidth);
    for (std::size_t i = 0; i < report.models.size(); ++i) {
      out << "| " << pad("P", 7) << pad("R", 7) << pad("F1", 7);
    }
    out << '\n';
    for (VariantId v : kAllVariants) {
      out << pad(variant_row_name(v), kNameWidth);
      for (ModelKind m : report.models) {
        const auto& w = report.find(l, m, v)->metrics;
        out << "| " << format_metric(w.precision) << ' '
            << format_metric(w.recall) << ' ' << format_metric(w.f1) << ' ';
      }
      out << '\n';
    }
    out << '\n';
  }
  return out.str();
}

std::string render_csv(const Report& report) {
  check_complete(report);
  std::ostringstream out;
  out << "language,model,variant,precision,recall,f1,support\n";
  for (Language l : report.languages) {
    for (ModelKind m : report.models) {
      for (VariantId v : kAllVariants) {
        const auto& w = report.find(l, m, v)->metrics;
        out << to_string(l) << ',' << to_string(m) << ',' << to_string(v)
            << ',' << format_metric(w.precision) << ','
            << format_metric(w.recall) << ',' << format_metric(w.f1) << ','
            << w.support << '\n';
      }
    }
  }
  return out.str();
}

Report parse_csv(const std::string& text) {
  Report report;
  report.models.clear();
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (lineno == 1 && line.rfind("language,", 0) == 0)) {
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 7) throw ParseError(lineno, "expected 7 fields");
    const auto lang = parse_language(f[0]);
    const auto model = parse_model_kind(f[1]);
    const auto variant = parse_variant(f[2]);
    if (!lang || !model || !variant) {
      throw ParseError(lineno, "unknown language, model or variant");
    }
    ReportCell cell{*lang, *model, *variant, {}};
    try {
      cell.metrics.precision = std::stod(std::string(f[3]));
      cell.metrics.recall = std::stod(std::string(f[4]));
      cell.metrics.f1 = std::stod(std::string(f[5]));
      cell.metrics.support = std::stoull(std::string(f[6]));
    } catch (const std::exception&) {
      throw ParseError(lineno, "bad numeric field");
    }
    auto add_unique = [](auto& vec, auto value) {
      for (const auto& x : vec) {
        if (x == value) return;
      }
      vec.push_back(value);
    };
    add_unique(report.languages, cell.language);
    add_unique(report.models, cell.model);
    report.cells.push_back(cell);
  }
  return report;
}

}  // namespace codemix
