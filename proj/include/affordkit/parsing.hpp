#pragma once

// Parsers that turn free-form LLM replies into typed values: yes/no
// verdicts, candidate object lists, and relevant-property subsets. The
// grammar is deliberately small and documented here rather than clever;
// ambiguous input is reported as such, never guessed.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "affordkit/domain.hpp"
#include "affordkit/errors.hpp"
#include "affordkit/json_util.hpp"

namespace affordkit {

// ---------------------------------------------------------------------------
// Tokenizer

struct Token {
  std::string text;         // lowercase word, apostrophes kept ("can't")
  int sentence = 0;         // 0-based sentence index
  bool clause_leading = false;  // first token of a sentence or after , ; :
};

// Words are runs of letters plus apostrophe; U+2019 normalizes to '.
// Sentences break on . ! ? and newline; clauses additionally on , ; :.
inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::string cur;
  int sentence = 0;
  bool leading = true;
  auto flush = [&] {
    if (cur.empty()) return;
    out.push_back(Token{cur, sentence, leading});
    cur.clear();
    leading = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto u = static_cast<unsigned char>(text[i]);
    if (u == 0xE2 && i + 2 < text.size() &&
        static_cast<unsigned char>(text[i + 1]) == 0x80 &&
        static_cast<unsigned char>(text[i + 2]) == 0x99) {
      cur.push_back('\'');  // right single quote
      i += 2;
      continue;
    }
    if (std::isalpha(u) || text[i] == '\'') {
      cur.push_back(static_cast<char>(std::tolower(u)));
      continue;
    }
    flush();
    if (text[i] == '.' || text[i] == '!' || text[i] == '?' || text[i] == '\n') {
      if (!out.empty() && out.back().sentence == sentence) ++sentence;
      leading = true;
    } else if (text[i] == ',' || text[i] == ';' || text[i] == ':') {
      leading = true;
    }
  }
  flush();
  return out;
}

// ---------------------------------------------------------------------------
// Verdicts

enum class VerdictValue { Affirmative, Negative, Ambiguous };

struct Verdict {
  VerdictValue value = VerdictValue::Ambiguous;
  std::string evidence;  // matched cue; empty exactly when Ambiguous

  bool operator==(const Verdict&) const = default;
};

inline const char* verdict_name(VerdictValue v) {
  switch (v) {
    case VerdictValue::Affirmative: return "affirmative";
    case VerdictValue::Negative: return "negative";
    case VerdictValue::Ambiguous: return "ambiguous";
  }
  return "ambiguous";
}

struct Lexicons {
  std::vector<std::string> affirmative = {"yes", "certainly", "indeed", "can", "is able"};
  std::vector<std::string> negative = {"no", "not", "cannot", "can't", "unable", "unsafe"};

  // Replaces either list wholesale when the key is present.
  static Lexicons from_json_file(const std::filesystem::path& path) {
    Lexicons lx;
    const ojson j = read_json_file(path);
    if (!j.is_object()) throw ConfigError("lexicon file must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      std::vector<std::string> words;
      for (const auto& w : it.value()) words.push_back(w.get<std::string>());
      if (words.empty()) throw ConfigError("lexicon list is empty: " + it.key());
      if (it.key() == "affirmative") lx.affirmative = std::move(words);
      else if (it.key() == "negative") lx.negative = std::move(words);
      else throw ConfigError("unknown lexicon key: " + it.key());
    }
    return lx;
  }
};

namespace detail {

inline std::vector<std::string> split_words(std::string_view phrase) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : phrase) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Token-sequence match for a (possibly multi-word) lexicon phrase.
inline bool phrase_at(const std::vector<Token>& toks, std::size_t pos,
                      const std::vector<std::string>& words) {
  if (words.empty() || pos + words.size() > toks.size()) return false;
  for (std::size_t k = 0; k < words.size(); ++k)
    if (toks[pos + k].text != words[k]) return false;
  return true;
}

}  // namespace detail

// Decision rule, in priority order:
//   1. any negative cue in the first sentence wins (refusals often start
//      with hedged agreement, so negation dominates);
//   2. otherwise the first clause-leading cue of either polarity wins;
//   3. otherwise the verdict is Ambiguous.
inline Verdict parse_verdict(std::string_view reply, const Lexicons& lexicons = {}) {
  const auto toks = tokenize(reply);

  std::vector<std::vector<std::string>> neg, aff;
  for (const auto& p : lexicons.negative) neg.push_back(detail::split_words(p));
  for (const auto& p : lexicons.affirmative) aff.push_back(detail::split_words(p));

  auto join = [](const std::vector<std::string>& words) {
    std::string s;
    for (const auto& w : words) {
      if (!s.empty()) s += ' ';
      s += w;
    }
    return s;
  };

  for (std::size_t i = 0; i < toks.size() && toks[i].sentence == 0; ++i)
    for (const auto& p : neg)
      if (detail::phrase_at(toks, i, p)) return Verdict{VerdictValue::Negative, join(p)};

  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (!toks[i].clause_leading) continue;
    // Longest match at this position; negative wins exact-length ties.
    const std::vector<std::string>* best = nullptr;
    VerdictValue best_value = VerdictValue::Ambiguous;
    for (const auto& p : neg)
      if (detail::phrase_at(toks, i, p) && (!best || p.size() > best->size())) {
        best = &p;
        best_value = VerdictValue::Negative;
      }
    for (const auto& p : aff)
      if (detail::phrase_at(toks, i, p) && (!best || p.size() > best->size())) {
        best = &p;
        best_value = VerdictValue::Affirmative;
      }
    if (best) return Verdict{best_value, join(*best)};
  }
  return Verdict{VerdictValue::Ambiguous, ""};
}

// ---------------------------------------------------------------------------
// Object lists

namespace detail {

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  lines.push_back(cur);
  return lines;
}

// "1. box", "2) bucket", "- stool", "* bench", "• ladder" -> payload after
// the marker; returns false when the line carries no list marker.
inline bool strip_list_marker(std::string_view line, std::string& payload) {
  std::size_t i = 0;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  std::size_t start = i;
  if (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size() || (line[i] != '.' && line[i] != ')')) return false;
    ++i;
  } else if (i < line.size() && (line[i] == '-' || line[i] == '*')) {
    ++i;
  } else if (i + 2 < line.size() && static_cast<unsigned char>(line[i]) == 0xE2 &&
             static_cast<unsigned char>(line[i + 1]) == 0x80 &&
             static_cast<unsigned char>(line[i + 2]) == 0xA2) {
    i += 3;  // bullet U+2022
  } else {
    return false;
  }
  if (i == start) return false;
  if (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) return false;
  payload = std::string(line.substr(i));
  return true;
}

// Cuts a list payload before any elaboration: "box - sturdy", "box (wood)",
// "box: large", "box, upside down" all reduce to "box".
inline std::string cut_elaboration(std::string_view s) {
  std::size_t end = s.size();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == ':' || s[i] == '(' || s[i] == ',') {
      end = i;
      break;
    }
    if (s[i] == '-' && i > 0 && s[i - 1] == ' ' && i + 1 < s.size() && s[i + 1] == ' ') {
      end = i;
      break;
    }
  }
  return std::string(s.substr(0, end));
}

inline std::string strip_leading_articles(std::string s) {
  for (;;) {
    std::size_t i = 0;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::string_view rest(s.data() + i, s.size() - i);
    bool stripped = false;
    for (std::string_view art : {"a ", "an ", "the ", "and "}) {
      if (rest.size() > art.size() &&
          std::equal(art.begin(), art.end(), rest.begin(), [](char a, char b) {
            return a == std::tolower(static_cast<unsigned char>(b));
          })) {
        s = std::string(rest.substr(art.size()));
        stripped = true;
        break;
      }
    }
    if (!stripped) return std::string(rest);
  }
}

inline std::size_t word_count(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : s) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

// "Try a ladder" -> "ladder": prose fragments often carry a lead-in verb,
// and the article is a reliable boundary before the noun phrase.
inline std::string after_last_article(const std::string& s) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  std::size_t start = 0;
  for (std::size_t i = 0; i + 1 < words.size(); ++i)
    if (words[i] == "a" || words[i] == "an" || words[i] == "the") start = i + 1;
  std::string out;
  for (std::size_t i = start; i < words.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += words[i];
  }
  return out;
}

// Words that signal "no object" (or pure filler) rather than naming one.
inline bool is_refusal_word(const std::string& label) {
  for (std::string_view w :
       {"none", "nothing", "n/a", "unknown", "sure", "okay", "yes", "no", "maybe"})
    if (label == w) return true;
  return false;
}

}  // namespace detail

// Extracts candidate object classes from a reply. Numbered or bulleted list
// lines are preferred; failing that, the text after the last ':' (or the
// whole reply) is split on commas and "and". Labels are canonicalized and
// de-duplicated keeping first occurrence, then truncated to `limit`.
inline std::vector<ObjectClass> parse_object_list(std::string_view reply, std::size_t limit) {
  if (limit == 0) throw DataError("object list limit must be positive");
  std::vector<std::string> raw;

  for (const auto& line : detail::split_lines(reply)) {
    std::string payload;
    if (detail::strip_list_marker(line, payload))
      raw.push_back(detail::cut_elaboration(payload));
  }

  const bool from_list_lines = !raw.empty();
  if (raw.empty()) {
    std::string body(reply);
    if (const auto colon = body.rfind(':'); colon != std::string::npos)
      body = body.substr(colon + 1);
    std::vector<std::string> pieces;
    std::string cur;
    for (char c : body) {
      if (c == ',' || c == '\n' || c == '.') {
        pieces.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    pieces.push_back(cur);
    for (auto& p : pieces) {
      // "ladder and stool" carries two labels
      const std::string sep = " and ";
      std::size_t pos = 0, found;
      while ((found = p.find(sep, pos)) != std::string::npos) {
        raw.push_back(p.substr(pos, found - pos));
        pos = found + sep.size();
      }
      raw.push_back(p.substr(pos));
    }
  }

  std::vector<ObjectClass> out;
  for (auto& piece : raw) {
    std::string cleaned = detail::strip_leading_articles(std::move(piece));
    if (!from_list_lines) cleaned = detail::after_last_article(cleaned);
    // Free-text fragments longer than a short noun phrase are prose, not
    // object names; list lines already isolate their payload.
    if (!from_list_lines && detail::word_count(cleaned) > 3) continue;
    ObjectClass obj;
    try {
      obj = ObjectClass::from_text(cleaned);
    } catch (const EmptyLabel&) {
      continue;
    }
    if (detail::is_refusal_word(obj.name)) continue;
    if (std::find(out.begin(), out.end(), obj) == out.end()) out.push_back(std::move(obj));
    if (out.size() == limit) break;
  }
  if (out.empty()) throw NoObjectsFound("no object names recognized in reply");
  return out;
}

// ---------------------------------------------------------------------------
// Property subsets

inline const std::vector<std::string>& negation_tokens() {
  static const std::vector<std::string> toks = {"not", "irrelevant", "unimportant",
                                                "doesn't", "don't"};
  return toks;
}

// Returns the catalog dimensions the reply marks as relevant, in catalog
// order. A mention counts as negated when a negation token sits within four
// tokens on either side inside the same sentence; a dimension is relevant
// when at least one mention is not negated. Throws EmptySelection when no
// dimension survives, so callers can apply their own fallback.
inline std::vector<std::string> parse_property_subset(std::string_view reply,
                                                      const PropertyCatalog& catalog) {
  const auto toks = tokenize(reply);
  std::vector<std::string> selected;
  for (const auto& dim : catalog.dimensions) {
    const auto words = detail::split_words(dim.name);
    bool relevant = false;
    for (std::size_t i = 0; i + words.size() <= toks.size() && !relevant; ++i) {
      if (!detail::phrase_at(toks, i, words)) continue;
      const std::size_t lo = i >= 4 ? i - 4 : 0;
      const std::size_t hi = std::min(toks.size(), i + words.size() + 4);
      bool negated = false;
      for (std::size_t k = lo; k < hi && !negated; ++k) {
        if (toks[k].sentence != toks[i].sentence) continue;
        for (const auto& n : negation_tokens())
          if (toks[k].text == n) {
            negated = true;
            break;
          }
      }
      if (!negated) relevant = true;
    }
    if (relevant) selected.push_back(dim.name);
  }
  if (selected.empty()) throw EmptySelection("reply names no relevant property dimension");
  return selected;
}

}  // namespace affordkit
