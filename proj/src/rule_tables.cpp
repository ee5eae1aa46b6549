#include <string>
#include <vector>

#include "codemix/translit.hpp"

namespace codemix {

namespace {

struct Vowel {
  const char* roman;
  std::vector<const char*> independent;
  std::vector<const char*> matra;  // aligned with `independent`
};

struct Consonant {
  const char* roman;
  std::vector<const char*> forms;  // default first
};

struct ScriptInventory {
  const char* virama;
  std::vector<Vowel> vowels;
  std::vector<Consonant> consonants;
};

// clang-format off
const ScriptInventory& kannada() {
  static const ScriptInventory inv{
      "್",
      {
          {"a", {"ಅ"}, {""}},
          {"aa", {"ಆ"}, {"ಾ"}},
          {"i", {"ಇ"}, {"ಿ"}},
          {"ii", {"ಈ"}, {"ೀ"}},
          {"ee", {"ಈ"}, {"ೀ"}},
          {"u", {"ಉ"}, {"ು"}},
          {"uu", {"ಊ"}, {"ೂ"}},
          {"oo", {"ಊ"}, {"ೂ"}},
          {"e", {"ಎ", "ಏ"}, {"ೆ", "ೇ"}},
          {"ai", {"ಐ"}, {"ೈ"}},
          {"o", {"ಒ", "ಓ"}, {"ೊ", "ೋ"}},
          {"au", {"ಔ"}, {"ೌ"}},
      },
      {
          {"k", {"ಕ"}}, {"kh", {"ಖ"}}, {"g", {"ಗ"}}, {"gh", {"ಘ"}},
          {"ng", {"ಙ"}}, {"ch", {"ಚ"}}, {"chh", {"ಛ"}}, {"c", {"ಕ"}},
          {"j", {"ಜ"}}, {"jh", {"ಝ"}}, {"nj", {"ಞ"}},
          {"t", {"ತ", "ಟ"}}, {"th", {"ಥ", "ಠ"}}, {"d", {"ದ", "ಡ"}},
          {"dh", {"ಧ", "ಢ"}}, {"n", {"ನ", "ಣ"}},
          {"p", {"ಪ"}}, {"ph", {"ಫ"}}, {"f", {"ಫ"}}, {"b", {"ಬ"}},
          {"bh", {"ಭ"}}, {"m", {"ಮ"}}, {"y", {"ಯ"}}, {"r", {"ರ"}},
          {"l", {"ಲ", "ಳ"}}, {"v", {"ವ"}}, {"w", {"ವ"}},
          {"sh", {"ಶ", "ಷ"}}, {"s", {"ಸ"}}, {"h", {"ಹ"}}, {"zh", {"ಳ"}},
          {"q", {"ಕ"}}, {"x", {"ಕ್ಸ"}}, {"z", {"ಜ"}},
      }};
  return inv;
}

const ScriptInventory& tamil() {
  static const ScriptInventory inv{
      "்",
      {
          {"a", {"அ"}, {""}},
          {"aa", {"ஆ"}, {"ா"}},
          {"i", {"இ"}, {"ி"}},
          {"ii", {"ஈ"}, {"ீ"}},
          {"ee", {"ஈ"}, {"ீ"}},
          {"u", {"உ"}, {"ு"}},
          {"uu", {"ஊ"}, {"ூ"}},
          {"oo", {"ஊ"}, {"ூ"}},
          {"e", {"எ", "ஏ"}, {"ெ", "ே"}},
          {"ai", {"ஐ"}, {"ை"}},
          {"o", {"ஒ", "ஓ"}, {"ொ", "ோ"}},
          {"au", {"ஔ"}, {"ௌ"}},
      },
      {
          {"k", {"க"}}, {"kh", {"க"}}, {"g", {"க"}}, {"gh", {"க"}},
          {"ng", {"ங"}}, {"ch", {"ச"}}, {"chh", {"ச"}}, {"c", {"க"}},
          {"j", {"ஜ"}}, {"jh", {"ஜ"}}, {"nj", {"ஞ"}},
          {"t", {"ட", "த"}}, {"th", {"த"}}, {"d", {"ட", "த"}},
          {"dh", {"த"}}, {"n", {"ன", "ந", "ண"}},
          {"p", {"ப"}}, {"ph", {"ப"}}, {"f", {"ஃப"}}, {"b", {"ப"}},
          {"bh", {"ப"}}, {"m", {"ம"}}, {"y", {"ய"}}, {"r", {"ர", "ற"}},
          {"l", {"ல", "ள"}}, {"v", {"வ"}}, {"w", {"வ"}},
          {"sh", {"ஷ"}}, {"s", {"ச", "ஸ"}}, {"h", {"ஹ"}}, {"zh", {"ழ"}},
          {"q", {"க"}}, {"x", {"க்ஸ"}}, {"z", {"ஜ"}},
      }};
  return inv;
}

const ScriptInventory& malayalam() {
  static const ScriptInventory inv{
      "്",
      {
          {"a", {"അ"}, {""}},
          {"aa", {"ആ"}, {"ാ"}},
          {"i", {"ഇ"}, {"ി"}},
          {"ii", {"ഈ"}, {"ീ"}},
          {"ee", {"ഈ"}, {"ീ"}},
          {"u", {"ഉ"}, {"ു"}},
          {"uu", {"ഊ"}, {"ൂ"}},
          {"oo", {"ഊ"}, {"ൂ"}},
          {"e", {"എ", "ഏ"}, {"െ", "േ"}},
          {"ai", {"ഐ"}, {"ൈ"}},
          {"o", {"ഒ", "ഓ"}, {"ൊ", "ോ"}},
          {"au", {"ഔ"}, {"ൌ"}},
      },
      {
          {"k", {"ക"}}, {"kh", {"ഖ"}}, {"g", {"ഗ"}}, {"gh", {"ഘ"}},
          {"ng", {"ങ"}}, {"ch", {"ച"}}, {"chh", {"ഛ"}}, {"c", {"ക"}},
          {"j", {"ജ"}}, {"jh", {"ഝ"}}, {"nj", {"ഞ"}},
          {"t", {"ട", "ത"}}, {"th", {"ത", "ഥ"}}, {"d", {"ദ", "ഡ"}},
          {"dh", {"ധ", "ഢ"}}, {"n", {"ന", "ണ"}},
          {"p", {"പ"}}, {"ph", {"ഫ"}}, {"f", {"ഫ"}}, {"b", {"ബ"}},
          {"bh", {"ഭ"}}, {"m", {"മ"}}, {"y", {"യ"}}, {"r", {"ര", "റ"}},
          {"l", {"ല", "ള"}}, {"v", {"വ"}}, {"w", {"വ"}},
          {"sh", {"ശ", "ഷ"}}, {"s", {"സ"}}, {"h", {"ഹ"}}, {"zh", {"ഴ"}},
          {"q", {"ക"}}, {"x", {"ക്സ"}}, {"z", {"സ"}},
      }};
  return inv;
}
// clang-format on

const ScriptInventory& inventory(Language language) {
  switch (language) {
    case Language::Kannada: return kannada();
    case Language::Tamil: return tamil();
    case Language::Malayalam: return malayalam();
  }
  return kannada();
}

}  // namespace

RuleTable RuleTable::default_for(Language language) {
  const ScriptInventory& inv = inventory(language);
  std::vector<Rule> rules;

  // Consonant + vowel syllables; alternatives of a syllable share its roman
  // spelling as group id.
  for (const auto& c : inv.consonants) {
    for (const auto& v : inv.vowels) {
      const std::string roman = std::string(c.roman) + v.roman;
      const bool ambiguous = c.forms.size() * v.matra.size() > 1;
      for (const char* form : c.forms) {
        for (const char* matra : v.matra) {
          rules.push_back(Rule{roman, std::string(form) + matra,
                               ambiguous ? roman : std::string()});
        }
      }
    }
  }
  // Bare consonants carry the virama.
  for (const auto& c : inv.consonants) {
    const bool ambiguous = c.forms.size() > 1;
    for (const char* form : c.forms) {
      rules.push_back(Rule{c.roman, std::string(form) + inv.virama,
                           ambiguous ? std::string(c.roman) : std::string()});
    }
  }
  for (const auto& v : inv.vowels) {
    const bool ambiguous = v.independent.size() > 1;
    for (const char* ind : v.independent) {
      rules.push_back(
          Rule{v.roman, ind, ambiguous ? std::string(v.roman) : std::string()});
    }
  }
  return RuleTable(language, std::move(rules));
}

}  // namespace codemix
