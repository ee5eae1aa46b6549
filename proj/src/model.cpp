#include "codemix/model.hpp"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "codemix/error.hpp"
#include "codemix/strings.hpp"

namespace codemix {

std::string_view to_string(ModelKind k) {
  return k == ModelKind::NaiveBayes ? "nb" : "mlp";
}

std::optional<ModelKind> parse_model_kind(std::string_view raw) {
  const std::string s = ascii_lower(trim(raw));
  if (s == "nb") return ModelKind::NaiveBayes;
  if (s == "mlp") return ModelKind::Mlp;
  return std::nullopt;
}

ModelKind kind_of(const Model& m) {
  return std::holds_alternative<NBModel>(m) ? ModelKind::NaiveBayes
                                            : ModelKind::Mlp;
}

const FeatureSpace& feature_space(const Model& m) {
  return std::visit([](const auto& x) -> const FeatureSpace& { return x.space; },
                    m);
}

Label argmax_label(const ClassScores& scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumLabels; ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return kAllLabels[best];
}

Prediction predict(const Model& model, const SparseVec& x) {
  Prediction p;
  if (const auto* nb = std::get_if<NBModel>(&model)) {
    p.scores = nb_scores(*nb, x);
  } else {
    p.scores = mlp_logits(std::get<MLPModel>(model), x);
  }
  p.label = argmax_label(p.scores);
  return p;
}

Prediction predict(const Model& model, std::string_view text) {
  return predict(model, featurize(text, feature_space(model)));
}

Prediction predict(const Model& model, std::string_view text,
                   const FeatureSpace& space) {
  if (!(space == feature_space(model))) {
    throw ContractError("predict: feature space differs from the model's");
  }
  return predict(model, text);
}

std::vector<Label> predict_batch_serial(const Model& model,
                                        const std::vector<std::string>& texts) {
  std::vector<Label> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(predict(model, t).label);
  return out;
}

std::vector<Label> predict_batch(const Model& model,
                                 const std::vector<std::string>& texts) {
  std::vector<Label> out(texts.size());
  const auto n = static_cast<std::ptrdiff_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    out[idx] = predict(model, texts[idx]).label;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr std::string_view kMagic = "codemix-model";
constexpr int kVersion = 1;

void write_array(std::ostream& out, std::string_view name,
                 const std::vector<double>& v) {
  out << name << ' ' << v.size() << '\n';
  for (std::size_t i = 0; i < v.size(); ++i) {
    out << v[i] << ((i % 8 == 7 || i + 1 == v.size()) ? '\n' : ' ');
  }
}

void write_space(std::ostream& out, const FeatureSpace& s) {
  out << "space " << s.ngram_lo << ' ' << s.ngram_hi << ' '
      << (s.word_unigrams ? 1 : 0) << ' ' << s.dim << ' ' << s.max_tokens
      << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) fail("unexpected end of model file");
    return w;
  }
  void expect(std::string_view w) {
    const std::string got = word();
    if (got != w) fail("expected '" + std::string(w) + "', got '" + got + "'");
  }
  template <typename T>
  T number() {
    const std::string w = word();
    std::istringstream ss(w);
    T v{};
    if (!(ss >> v)) fail("bad number '" + w + "'");
    return v;
  }
  double real() {
    const std::string w = word();
    char* end = nullptr;
    const double v = std::strtod(w.c_str(), &end);
    if (end == w.c_str() || *end != '\0') fail("bad number '" + w + "'");
    return v;
  }
  std::vector<double> array(std::string_view name) {
    expect(name);
    const auto n = number<std::size_t>();
    std::vector<double> v(n);
    for (double& x : v) x = real();
    return v;
  }
  FeatureSpace space() {
    expect("space");
    FeatureSpace s;
    s.ngram_lo = number<int>();
    s.ngram_hi = number<int>();
    s.word_unigrams = number<int>() != 0;
    s.dim = number<std::uint32_t>();
    s.max_tokens = number<std::size_t>();
    try {
      s.validate();
    } catch (const ContractError& e) {
      fail(e.what());
    }
    return s;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw std::runtime_error("model file: " + what);
  }

 private:
  std::istream& in_;
};

}  // namespace

void save_model(std::ostream& out, const Model& model) {
  const auto flags = out.flags();
  out << kMagic << ' ' << kVersion << '\n';
  out << std::hexfloat;
  if (const auto* nb = std::get_if<NBModel>(&model)) {
    out << "kind nb\n";
    write_space(out, nb->space);
    out << "alpha " << nb->alpha << '\n';
    write_array(out, "log_prior",
                std::vector<double>(nb->log_prior.begin(), nb->log_prior.end()));
    write_array(out, "log_likelihood", nb->log_likelihood);
  } else {
    const auto& m = std::get<MLPModel>(model);
    out << "kind mlp\n";
    write_space(out, m.space);
    out << "shape " << m.embed << ' ' << m.hidden << '\n';
    out << "dropout " << m.dropout << '\n';
    for (std::size_t g = 0; g < kNumGroups; ++g) {
      write_array(out, "g" + std::to_string(g) + ".weights",
                  m.groups[g].weights);
      write_array(out, "g" + std::to_string(g) + ".bias", m.groups[g].bias);
    }
  }
  out << "end\n";
  out.flags(flags);
}

Model load_model(std::istream& in) {
  Reader r(in);
  r.expect(kMagic);
  if (r.number<int>() != kVersion) r.fail("unsupported version");
  r.expect("kind");
  const std::string kind = r.word();
  if (kind == "nb") {
    NBModel nb;
    nb.space = r.space();
    r.expect("alpha");
    nb.alpha = r.real();
    const auto prior = r.array("log_prior");
    if (prior.size() != kNumLabels) r.fail("log_prior must have 5 entries");
    std::copy(prior.begin(), prior.end(), nb.log_prior.begin());
    nb.log_likelihood = r.array("log_likelihood");
    if (nb.log_likelihood.size() != kNumLabels * nb.space.dim) {
      r.fail("log_likelihood size does not match dim");
    }
    r.expect("end");
    return nb;
  }
  if (kind == "mlp") {
    MLPModel m;
    m.space = r.space();
    r.expect("shape");
    m.embed = r.number<std::size_t>();
    m.hidden = r.number<std::size_t>();
    r.expect("dropout");
    m.dropout = r.real();
    const std::array<std::size_t, kNumGroups> w_sizes = {
        std::size_t{m.space.dim} * m.embed, m.hidden * m.embed,
        kNumLabels * m.hidden};
    const std::array<std::size_t, kNumGroups> b_sizes = {m.embed, m.hidden,
                                                         kNumLabels};
    for (std::size_t g = 0; g < kNumGroups; ++g) {
      m.groups[g].weights = r.array("g" + std::to_string(g) + ".weights");
      m.groups[g].bias = r.array("g" + std::to_string(g) + ".bias");
      if (m.groups[g].weights.size() != w_sizes[g] ||
          m.groups[g].bias.size() != b_sizes[g]) {
        r.fail("group " + std::to_string(g) + " has the wrong shape");
      }
    }
    r.expect("end");
    return m;
  }
  r.fail("unknown model kind '" + kind + "'");
}

void save_model_file(const std::string& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  save_model(out, model);
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_model(in);
}

}  // namespace codemix
