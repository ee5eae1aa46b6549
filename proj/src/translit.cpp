#include "codemix/translit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "codemix/error.hpp"
#include "codemix/script.hpp"
#include "codemix/strings.hpp"
#include "codemix/utf8.hpp"

namespace codemix {

// ---------------------------------------------------------------------------
// RuleTable

RuleTable::RuleTable(Language language, std::vector<Rule> entries)
    : language_(language), entries_(std::move(entries)) {
  const ScriptTag target = native_script(language);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const Rule& r = entries_[i];
    if (r.roman.empty()) {
      throw ContractError("rule " + std::to_string(i) + ": empty roman grapheme");
    }
    if (!utf8::is_ascii(r.roman)) {
      throw ContractError("rule " + std::to_string(i) +
                          ": roman grapheme is not ASCII");
    }
    for (char c : r.roman) {
      if (is_space(c)) {
        throw ContractError("rule " + std::to_string(i) +
                            ": roman grapheme contains whitespace");
      }
    }
    for (char32_t cp : utf8::decode(r.native)) {
      if (classify_codepoint(cp) != target) {
        throw ContractError("rule " + std::to_string(i) + " ('" + r.roman +
                            "'): native grapheme outside the " +
                            std::string(to_string(language)) + " block");
      }
    }
    max_len_ = std::max(max_len_, r.roman.size());
    index_[r.roman].push_back(i);
  }
}

RuleTable RuleTable::parse(std::istream& in, Language language) {
  std::vector<Rule> rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError(lineno, "expected roman<TAB>native[<TAB>group]");
    }
    Rule r{std::string(fields[0]), std::string(fields[1]),
           fields.size() == 3 ? std::string(fields[2]) : std::string()};
    if (r.roman.empty()) throw ParseError(lineno, "empty roman grapheme");
    rules.push_back(std::move(r));
  }
  try {
    return RuleTable(language, std::move(rules));
  } catch (const ContractError& e) {
    throw ConfigError(std::string("invalid rule table: ") + e.what());
  }
}

RuleTable RuleTable::load(const std::string& path, Language language) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open rule table " + path);
  return parse(in, language);
}

void RuleTable::write(std::ostream& out) const {
  out << "# " << to_string(language_) << " transliteration rules\n";
  out << "# roman<TAB>native[<TAB>group]; first entry per roman is default\n";
  for (const auto& r : entries_) {
    out << r.roman << '\t' << r.native;
    if (!r.group.empty()) out << '\t' << r.group;
    out << '\n';
  }
}

const std::vector<std::size_t>* RuleTable::find(std::string_view roman) const {
  const auto it = index_.find(std::string(roman));
  return it == index_.end() ? nullptr : &it->second;
}

std::size_t RuleTable::longest_match(std::string_view word,
                                     std::size_t pos) const {
  const std::size_t limit = std::min(max_len_, word.size() - pos);
  for (std::size_t len = limit; len >= 1; --len) {
    if (find(word.substr(pos, len))) return len;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Rule application

std::vector<RuleOption> options_at(std::string_view word, std::size_t pos,
                                   const RuleTable& table) {
  std::vector<RuleOption> out;
  const std::size_t len = table.longest_match(word, pos);
  if (len == 0) {
    const auto d = utf8::decode_at(word, pos);
    out.push_back({d.length, std::string(word.substr(pos, d.length))});
    return out;
  }
  const auto& rules = table.entries();
  const std::size_t first = table.find(word.substr(pos, len))->front();
  out.push_back({len, rules[first].native});

  const std::string& group = rules[first].group;
  if (group.empty()) return out;

  // Every other entry matching here that shares the group, in table order.
  std::vector<std::size_t> alts;
  for (std::size_t l = 1; l <= std::min(table.max_grapheme_len(),
                                        word.size() - pos);
       ++l) {
    if (const auto* ids = table.find(word.substr(pos, l))) {
      for (std::size_t id : *ids) {
        if (id != first && rules[id].group == group) alts.push_back(id);
      }
    }
  }
  std::sort(alts.begin(), alts.end());
  for (std::size_t id : alts) {
    out.push_back({rules[id].roman.size(), rules[id].native});
  }
  return out;
}

std::string apply_rules(std::string_view word, const RuleTable& table) {
  std::string out;
  std::size_t pos = 0;
  while (pos < word.size()) {
    const std::size_t len = table.longest_match(word, pos);
    if (len == 0) {
      const auto d = utf8::decode_at(word, pos);
      out.append(word.substr(pos, d.length));
      pos += d.length;
      continue;
    }
    out += table.entries()[table.find(word.substr(pos, len))->front()].native;
    pos += len;
  }
  return out;
}

namespace {

struct Hypothesis {
  std::size_t pos = 0;
  std::string text;
  std::vector<std::uint32_t> choices;
  std::size_t deviations = 0;  // non-default choices
};

bool hypothesis_before(const Hypothesis& a, const Hypothesis& b) {
  if (a.deviations != b.deviations) return a.deviations < b.deviations;
  return a.choices < b.choices;
}

}  // namespace

std::vector<Candidate> generate_candidates(std::string_view word,
                                           const RuleTable& table,
                                           std::size_t beam, std::size_t k) {
  if (k < 1) throw ContractError("generate_candidates: k must be >= 1");
  if (beam < k) throw ContractError("generate_candidates: beam must be >= k");

  std::vector<Hypothesis> active{Hypothesis{}};
  std::vector<Hypothesis> done;
  while (!active.empty()) {
    std::vector<Hypothesis> next;
    for (auto& h : active) {
      if (h.pos == word.size()) {
        done.push_back(std::move(h));
        continue;
      }
      const auto opts = options_at(word, h.pos, table);
      for (std::size_t j = 0; j < opts.size(); ++j) {
        Hypothesis child = h;
        child.pos += opts[j].length;
        child.text += opts[j].output;
        child.choices.push_back(static_cast<std::uint32_t>(j));
        if (j != 0) ++child.deviations;
        next.push_back(std::move(child));
      }
    }
    std::stable_sort(next.begin(), next.end(), hypothesis_before);
    if (next.size() > beam) next.resize(beam);
    active = std::move(next);
  }

  std::stable_sort(done.begin(), done.end(), hypothesis_before);
  std::vector<Candidate> out;
  for (const auto& h : done) {
    if (out.size() == k) break;
    const bool seen = std::any_of(out.begin(), out.end(), [&](const auto& c) {
      return c.text == h.text;
    });
    if (!seen) out.push_back(Candidate{h.text, 0.0});
  }
  return out;
}

// ---------------------------------------------------------------------------
// CharLM

CharLM CharLM::train(const std::vector<std::string>& lines, int order,
                     double alpha) {
  if (order < 1) throw ContractError("CharLM: order must be >= 1");
  if (!(alpha > 0.0)) throw ContractError("CharLM: alpha must be > 0");
  if (lines.empty()) throw ContractError("CharLM: empty training corpus");

  CharLM lm;
  lm.order_ = order;
  lm.alpha_ = alpha;
  std::vector<char32_t> alphabet{kBoundary};
  const std::size_t ctx_len = static_cast<std::size_t>(order - 1);
  for (const auto& line : lines) {
    std::u32string seq(ctx_len, kBoundary);
    seq += utf8::decode(line);
    seq.push_back(kBoundary);
    for (std::size_t i = ctx_len; i < seq.size(); ++i) {
      const std::u32string ctx = seq.substr(i - ctx_len, ctx_len);
      auto& cc = lm.counts_[ctx];
      ++cc.total;
      ++cc.next[seq[i]];
      alphabet.push_back(seq[i]);
    }
  }
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  lm.alphabet_ = std::move(alphabet);
  return lm;
}

std::u32string_view CharLM::clip(std::u32string_view context) const {
  const std::size_t ctx_len = static_cast<std::size_t>(order_ - 1);
  if (context.size() > ctx_len) context.remove_prefix(context.size() - ctx_len);
  return context;
}

std::uint64_t CharLM::count(std::u32string_view context, char32_t next) const {
  const auto it = counts_.find(std::u32string(clip(context)));
  if (it == counts_.end()) return 0;
  const auto jt = it->second.next.find(next);
  return jt == it->second.next.end() ? 0 : jt->second;
}

std::uint64_t CharLM::context_total(std::u32string_view context) const {
  const auto it = counts_.find(std::u32string(clip(context)));
  return it == counts_.end() ? 0 : it->second.total;
}

double CharLM::prob(std::u32string_view context, char32_t next) const {
  const double v = static_cast<double>(alphabet_.size());
  return (static_cast<double>(count(context, next)) + alpha_) /
         (static_cast<double>(context_total(context)) + alpha_ * v);
}

double CharLM::score(std::string_view text) const {
  const std::size_t ctx_len = static_cast<std::size_t>(order_ - 1);
  std::u32string seq(ctx_len, kBoundary);
  seq += utf8::decode(text);
  seq.push_back(kBoundary);
  double total = 0.0;
  for (std::size_t i = ctx_len; i < seq.size(); ++i) {
    total += std::log(
        prob(std::u32string_view(seq).substr(i - ctx_len, ctx_len), seq[i]));
  }
  return total / static_cast<double>(seq.size() - ctx_len);
}

namespace {

std::string encode_symbols(std::u32string_view s) {
  // Boundary symbols are written as their private-use code point; the
  // format is plain UTF-8 either way.
  return utf8::encode(s);
}

}  // namespace

void CharLM::save(std::ostream& out) const {
  std::ostringstream alpha;
  alpha.precision(17);
  alpha << alpha_;
  out << "charlm\t1\t" << order_ << '\t' << alpha.str() << '\n';
  for (const auto& [ctx, cc] : counts_) {
    for (const auto& [c, n] : cc.next) {
      out << encode_symbols(ctx) << '\t' << utf8::encode(c) << '\t' << n
          << '\n';
    }
  }
}

void CharLM::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  save(out);
}

CharLM CharLM::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty language model");
  const auto head = split(line, '\t');
  if (head.size() != 4 || head[0] != "charlm" || head[1] != "1") {
    throw ParseError(1, "not a charlm v1 file");
  }
  CharLM lm;
  lm.order_ = std::stoi(std::string(head[2]));
  lm.alpha_ = std::stod(std::string(head[3]));
  if (lm.order_ < 1 || !(lm.alpha_ > 0.0)) {
    throw ParseError(1, "invalid order or alpha");
  }
  std::vector<char32_t> alphabet{kBoundary};
  std::size_t lineno = 1;
  const auto ctx_len = static_cast<std::size_t>(lm.order_ - 1);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 3) throw ParseError(lineno, "expected ctx<TAB>char<TAB>n");
    const std::u32string ctx = utf8::decode(f[0]);
    const std::u32string c = utf8::decode(f[1]);
    if (ctx.size() != ctx_len || c.size() != 1) {
      throw ParseError(lineno, "context/symbol length mismatch");
    }
    const std::uint64_t n = std::stoull(std::string(f[2]));
    auto& cc = lm.counts_[ctx];
    cc.total += n;
    cc.next[c[0]] += n;
    alphabet.push_back(c[0]);
  }
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  lm.alphabet_ = std::move(alphabet);
  return lm;
}

CharLM CharLM::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open language model " + path);
  return load(in);
}

std::vector<Candidate> rerank(std::vector<Candidate> candidates,
                              const CharLM& lm, std::size_t k) {
  for (auto& c : candidates) c.score = lm.score(c.text);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.score > b.score;
                   });
  if (candidates.size() > k) candidates.resize(k);
  return candidates;
}

// ---------------------------------------------------------------------------
// Text level

std::string transliterate_text(std::string_view text, const RuleTable& table,
                               const CharLM& lm, DecodeParams params) {
  std::string out;
  out.reserve(text.size() * 2);
  std::size_t cursor = 0;
  for (const auto& tok : tag_tokens(text)) {
    out.append(text.substr(cursor, tok.bytes.begin - cursor));
    cursor = tok.bytes.end;
    if (tok.tag != ScriptTag::Latin) {
      out += tok.token;
      continue;
    }
    auto cands = generate_candidates(ascii_lower(tok.token), table,
                                     params.beam, params.k);
    out += rerank(std::move(cands), lm, params.k).front().text;
  }
  out.append(text.substr(cursor));
  return out;
}

namespace {

Sample transliterate_sample(const Sample& s, const RuleTable& table,
                            const CharLM& lm, DecodeParams params) {
  Sample out = s;
  out.text = transliterate_text(s.text, table, lm, params);
  out.provenance = Provenance::Transliterated;
  return out;
}

}  // namespace

Corpus transliterate_corpus_serial(const Corpus& corpus,
                                   const RuleTable& table, const CharLM& lm,
                                   DecodeParams params) {
  Corpus out{corpus.language, corpus.split, {}};
  out.samples.reserve(corpus.size());
  for (const auto& s : corpus.samples) {
    out.samples.push_back(transliterate_sample(s, table, lm, params));
  }
  return out;
}

Corpus transliterate_corpus(const Corpus& corpus, const RuleTable& table,
                            const CharLM& lm, DecodeParams params) {
  // Validate once up front so no exception escapes the parallel region.
  if (params.k < 1 || params.beam < params.k) {
    throw ContractError("transliterate_corpus: need beam >= k >= 1");
  }
  Corpus out{corpus.language, corpus.split, {}};
  out.samples.resize(corpus.size());
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    out.samples[idx] =
        transliterate_sample(corpus.samples[idx], table, lm, params);
  }
  return out;
}

std::vector<std::string> lm_training_lines(const Corpus& corpus,
                                           const RuleTable& table) {
  const ScriptTag target = native_script(table.language());
  std::vector<std::string> lines;
  for (const auto& s : corpus.samples) {
    for (const auto& tok : tag_tokens(s.text)) {
      if (tok.tag == target) lines.push_back(tok.token);
    }
  }
  for (const auto& r : table.entries()) {
    if (!r.native.empty()) lines.push_back(r.native);
  }
  return lines;
}

}  // namespace codemix
