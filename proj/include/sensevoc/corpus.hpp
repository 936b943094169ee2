#pragma once

// Sense-annotated corpora: a UFSAC-style XML subset and a TSV form, key
// resolution against the graph, and inventory coverage of a mapping.

#include "mapping.hpp"
#include "wordnet.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace sensevoc {

struct Token {
  std::string surface;
  std::string lemma;       // lowercase; empty when unknown
  std::optional<Pos> pos;  // index POS
  std::vector<std::string> gold_keys;
  std::string instance_id;  // assigned for annotated tokens

  bool annotated() const { return !gold_keys.empty(); }
};

struct Corpus {
  std::string name;
  std::vector<std::vector<Token>> sentences;

  std::size_t token_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
  }
  std::size_t annotated_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences)
      for (const Token& t : s) n += t.annotated() ? 1 : 0;
    return n;
  }
  std::set<std::string> gold_key_set() const {
    std::set<std::string> keys;
    for (const auto& s : sentences)
      for (const Token& t : s) keys.insert(t.gold_keys.begin(), t.gold_keys.end());
    return keys;
  }
};

enum class CorpusFormat : std::uint8_t { ufsac_xml, tsv };

inline std::optional<Pos> normalize_pos_tag(std::string_view tag) {
  std::string t = detail::ascii_lower(std::string(tag));
  if (t == "noun" || t == "n") return Pos::noun;
  if (t == "verb" || t == "v") return Pos::verb;
  if (t == "adj" || t == "j" || t == "a" || t == "s" || t == "adjective")
    return Pos::adjective;
  if (t == "adv" || t == "r" || t == "adverb") return Pos::adverb;
  return std::nullopt;
}

namespace detail {

inline void utf8_append(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

inline std::string xml_unescape(std::string_view s, const std::string& where) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t semi = s.find(';', i + 1);
    if (semi == std::string_view::npos)
      throw ParseError(where + ": unterminated entity");
    std::string_view ent = s.substr(i + 1, semi - i - 1);
    if (ent == "amp") out.push_back('&');
    else if (ent == "lt") out.push_back('<');
    else if (ent == "gt") out.push_back('>');
    else if (ent == "quot") out.push_back('"');
    else if (ent == "apos") out.push_back('\'');
    else if (!ent.empty() && ent[0] == '#') {
      std::string_view digits = ent.substr(1);
      int base = 10;
      if (!digits.empty() && (digits[0] == 'x' || digits[0] == 'X')) {
        base = 16;
        digits = digits.substr(1);
      }
      std::uint32_t cp = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, base);
      if (ec != std::errc() || p != digits.data() + digits.size() || cp > 0x10ffff)
        throw ParseError(where + ": bad character reference '&" + std::string(ent) + ";'");
      utf8_append(out, cp);
    } else {
      throw ParseError(where + ": unknown entity '&" + std::string(ent) + ";'");
    }
    i = semi + 1;
  }
  return out;
}

// Splits "a;b;c" into nonempty parts.
inline std::vector<std::string> split_keys(std::string_view s) {
  std::vector<std::string> keys;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t semi = s.find(';', start);
    std::string_view part = s.substr(start, semi - start);
    if (!part.empty()) keys.emplace_back(part);
    if (semi == std::string_view::npos) break;
    start = semi + 1;
  }
  return keys;
}

// Assigns instance ids to annotated tokens and fills missing lemma/POS from
// the first gold key, which encodes both.
inline void finish_corpus(Corpus& corpus) {
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i)
    for (std::size_t j = 0; j < corpus.sentences[i].size(); ++j) {
      Token& t = corpus.sentences[i][j];
      if (!t.annotated()) continue;
      if (t.instance_id.empty())
        t.instance_id = "s" + std::to_string(i) + ".t" + std::to_string(j);
      std::size_t percent = t.gold_keys.front().find('%');
      if (percent == std::string::npos || percent + 1 >= t.gold_keys.front().size())
        continue;
      if (t.lemma.empty()) t.lemma = ascii_lower(t.gold_keys.front().substr(0, percent));
      if (!t.pos) {
        auto key_pos = pos_from_key_digit(t.gold_keys.front()[percent + 1]);
        if (key_pos) t.pos = index_pos(*key_pos);
      }
    }
}

}  // namespace detail

// Recognizes the corpus/document/paragraph/sentence/word element subset with
// attributes surface_form, lemma, pos, wn30_key and id; everything else in
// the attribute space is ignored, unknown elements are rejected.
inline Corpus parse_ufsac_xml(std::string_view xml, std::string name) {
  Corpus corpus;
  corpus.name = std::move(name);
  std::vector<std::string> stack;
  std::vector<Token> sentence;
  bool saw_root = false;
  std::size_t pos = 0;

  auto where = [&] {
    std::size_t line = 1 + static_cast<std::size_t>(
        std::count(xml.begin(), xml.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
    return corpus.name + " line " + std::to_string(line);
  };
  auto fail = [&](const std::string& msg) -> void { throw ParseError(where() + ": " + msg); };

  while (pos < xml.size()) {
    std::size_t lt = xml.find('<', pos);
    if (lt == std::string_view::npos) break;  // trailing text ignored
    pos = lt;
    if (xml.compare(pos, 4, "<!--") == 0) {
      std::size_t end = xml.find("-->", pos + 4);
      if (end == std::string_view::npos) fail("unterminated comment");
      pos = end + 3;
      continue;
    }
    if (xml.compare(pos, 2, "<?") == 0) {
      std::size_t end = xml.find("?>", pos + 2);
      if (end == std::string_view::npos) fail("unterminated declaration");
      pos = end + 2;
      continue;
    }
    if (xml.compare(pos, 2, "<!") == 0) {
      std::size_t end = xml.find('>', pos + 2);
      if (end == std::string_view::npos) fail("unterminated '<!' section");
      pos = end + 1;
      continue;
    }

    bool closing = xml.compare(pos, 2, "</") == 0;
    pos += closing ? 2 : 1;
    std::size_t name_start = pos;
    while (pos < xml.size() && (std::isalnum(static_cast<unsigned char>(xml[pos])) ||
                                xml[pos] == '_' || xml[pos] == '-'))
      ++pos;
    std::string tag(xml.substr(name_start, pos - name_start));
    if (tag.empty()) fail("missing element name");
    if (tag != "corpus" && tag != "document" && tag != "paragraph" &&
        tag != "sentence" && tag != "word")
      fail("unsupported element <" + tag + ">");

    if (closing) {
      while (pos < xml.size() && std::isspace(static_cast<unsigned char>(xml[pos]))) ++pos;
      if (pos >= xml.size() || xml[pos] != '>') fail("malformed closing tag");
      ++pos;
      if (stack.empty() || stack.back() != tag)
        fail("mismatched </" + tag + ">");
      stack.pop_back();
      if (tag == "sentence" && !sentence.empty())
        corpus.sentences.push_back(std::move(sentence)), sentence.clear();
      continue;
    }

    Token token;
    bool self_closing = false;
    while (true) {
      while (pos < xml.size() && std::isspace(static_cast<unsigned char>(xml[pos]))) ++pos;
      if (pos >= xml.size()) fail("unterminated tag");
      if (xml[pos] == '>') {
        ++pos;
        break;
      }
      if (xml[pos] == '/') {
        if (pos + 1 >= xml.size() || xml[pos + 1] != '>') fail("malformed tag end");
        pos += 2;
        self_closing = true;
        break;
      }
      std::size_t attr_start = pos;
      while (pos < xml.size() && xml[pos] != '=' &&
             !std::isspace(static_cast<unsigned char>(xml[pos])))
        ++pos;
      std::string attr(xml.substr(attr_start, pos - attr_start));
      while (pos < xml.size() && std::isspace(static_cast<unsigned char>(xml[pos]))) ++pos;
      if (pos >= xml.size() || xml[pos] != '=') fail("attribute '" + attr + "' has no value");
      ++pos;
      while (pos < xml.size() && std::isspace(static_cast<unsigned char>(xml[pos]))) ++pos;
      if (pos >= xml.size() || (xml[pos] != '"' && xml[pos] != '\''))
        fail("attribute '" + attr + "' is not quoted");
      char quote = xml[pos++];
      std::size_t value_end = xml.find(quote, pos);
      if (value_end == std::string_view::npos)
        fail("attribute '" + attr + "' is not terminated");
      std::string value = detail::xml_unescape(xml.substr(pos, value_end - pos), where());
      pos = value_end + 1;

      if (tag == "word") {
        if (attr == "surface_form") token.surface = std::move(value);
        else if (attr == "lemma") token.lemma = detail::ascii_lower(value);
        else if (attr == "pos") token.pos = normalize_pos_tag(value);
        else if (attr == "wn30_key") token.gold_keys = detail::split_keys(value);
        else if (attr == "id") token.instance_id = std::move(value);
      }
    }

    if (tag == "corpus") {
      if (saw_root) fail("more than one <corpus> root");
      if (!stack.empty()) fail("<corpus> must be the root element");
      saw_root = true;
    } else {
      if (stack.empty()) fail("<" + tag + "> outside <corpus>");
      if (tag == "word" && stack.back() != "sentence")
        fail("<word> outside <sentence>");
    }
    if (tag == "word") {
      sentence.push_back(std::move(token));
      if (self_closing) continue;
      stack.push_back(tag);  // tolerate <word ...></word>
      continue;
    }
    if (!self_closing) stack.push_back(tag);
    else if (tag == "sentence" && !sentence.empty())
      corpus.sentences.push_back(std::move(sentence)), sentence.clear();
  }

  if (!stack.empty()) throw ParseError(corpus.name + ": unclosed <" + stack.back() + ">");
  if (!saw_root) throw ParseError(corpus.name + ": no <corpus> element");
  detail::finish_corpus(corpus);
  return corpus;
}

// One token per line: surface, lemma, pos, semicolon-separated keys. Any of
// the last three may be empty. A blank line ends the sentence.
inline Corpus parse_corpus_tsv(std::istream& in, std::string name) {
  Corpus corpus;
  corpus.name = std::move(name);
  std::vector<Token> sentence;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (!sentence.empty()) corpus.sentences.push_back(std::move(sentence));
      sentence.clear();
      continue;
    }
    if (line[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    auto context = corpus.name + " line " + std::to_string(line_no);
    if (fields.size() != 4)
      throw ParseError(context + ": expected 4 tab-separated fields, got " +
                       std::to_string(fields.size()));
    Token token;
    token.surface = std::move(fields[0]);
    token.lemma = detail::ascii_lower(fields[1]);
    if (!fields[2].empty()) {
      token.pos = normalize_pos_tag(fields[2]);
      if (!token.pos) throw ParseError(context + ": unknown POS tag '" + fields[2] + "'");
    }
    token.gold_keys = detail::split_keys(fields[3]);
    sentence.push_back(std::move(token));
  }
  if (!sentence.empty()) corpus.sentences.push_back(std::move(sentence));
  detail::finish_corpus(corpus);
  return corpus;
}

inline void write_corpus_tsv(std::ostream& out, const Corpus& corpus) {
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    if (i) out << '\n';
    for (const Token& t : corpus.sentences[i]) {
      out << t.surface << '\t' << t.lemma << '\t'
          << (t.pos ? std::string(1, pos_letter(*t.pos)) : std::string()) << '\t';
      for (std::size_t k = 0; k < t.gold_keys.size(); ++k) {
        if (k) out << ';';
        out << t.gold_keys[k];
      }
      out << '\n';
    }
  }
}

inline Corpus parse_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  if (format == CorpusFormat::tsv) return parse_corpus_tsv(in, path.filename().string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ufsac_xml(buf.str(), path.filename().string());
}

// Checks gold keys against the graph. Strict mode throws on the first bad
// key; lenient mode removes them and returns how many were dropped. A bad
// key is unknown to the graph or contradicts the token's lemma/POS.
inline std::size_t resolve_keys(Corpus& corpus, const WordNetGraph& graph, bool strict) {
  std::size_t dropped = 0;
  for (auto& sentence : corpus.sentences)
    for (Token& token : sentence) {
      if (!token.annotated()) continue;
      std::vector<std::string> kept;
      for (std::string& key : token.gold_keys) {
        std::string problem;
        auto idx = graph.find_sense(key);
        if (!idx) {
          problem = "unknown sense key '" + key + "'";
        } else {
          const WordSense& sense = graph.sense(*idx);
          if (!token.lemma.empty() && token.lemma != sense.lemma)
            problem = "key '" + key + "' does not match lemma '" + token.lemma + "'";
          else if (token.pos && *token.pos != sense.pos)
            problem = "key '" + key + "' does not match POS '" +
                      std::string(pos_name(*token.pos)) + "'";
        }
        if (problem.empty()) {
          kept.push_back(std::move(key));
        } else if (strict) {
          throw ValidationError(corpus.name + " instance " + token.instance_id + ": " +
                                problem);
        } else {
          ++dropped;
        }
      }
      token.gold_keys = std::move(kept);
    }
  return dropped;
}

// Compressed tags seen among the corpus gold annotations.
inline std::set<std::string> observed_tags(const Corpus& corpus,
                                           const SenseMapping& mapping) {
  std::set<std::string> tags;
  for (const auto& sentence : corpus.sentences)
    for (const Token& token : sentence)
      for (const std::string& key : token.gold_keys) {
        const std::string* tag = mapping.tag_of(key);
        if (!tag)
          throw std::invalid_argument("sense key not in mapping: " + key);
        tags.insert(*tag);
      }
  return tags;
}

// Fraction of the mapping's vocabulary observed in the corpus.
inline double inventory_coverage(const Corpus& corpus, const SenseMapping& mapping) {
  std::size_t vocabulary = mapping_stats(mapping).vocabulary_size;
  if (vocabulary == 0) return 0.0;
  return static_cast<double>(observed_tags(corpus, mapping).size()) /
         static_cast<double>(vocabulary);
}

}  // namespace sensevoc
