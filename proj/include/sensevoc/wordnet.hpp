#pragma once

// WordNet 3.0 database files (WNdb data.* / index.*) parsed into an immutable
// in-memory graph: synsets carrying typed relation edges, plus the word-sense
// layer used for lookup by (lemma, part of speech).

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sensevoc {

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Semantic inconsistency in otherwise well-formed input (cross-file mismatch,
// cyclic hypernyms, mapping/corpus constraint violations).
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// -------------------------------------------------------------------- PoS

enum class Pos : std::uint8_t { noun, verb, adjective, adjective_satellite, adverb };

inline constexpr std::array<Pos, 5> kAllPos = {Pos::noun, Pos::verb, Pos::adjective,
                                               Pos::adjective_satellite, Pos::adverb};

constexpr char pos_letter(Pos p) {
  switch (p) {
    case Pos::noun: return 'n';
    case Pos::verb: return 'v';
    case Pos::adjective: return 'a';
    case Pos::adjective_satellite: return 's';
    case Pos::adverb: return 'r';
  }
  return '?';
}

// ss_type digit used in sense keys.
constexpr char pos_key_digit(Pos p) {
  switch (p) {
    case Pos::noun: return '1';
    case Pos::verb: return '2';
    case Pos::adjective: return '3';
    case Pos::adjective_satellite: return '5';
    case Pos::adverb: return '4';
  }
  return '?';
}

constexpr std::string_view pos_name(Pos p) {
  switch (p) {
    case Pos::noun: return "noun";
    case Pos::verb: return "verb";
    case Pos::adjective: return "adjective";
    case Pos::adjective_satellite: return "adjective_satellite";
    case Pos::adverb: return "adverb";
  }
  return "?";
}

inline std::optional<Pos> pos_from_letter(char c) {
  switch (c) {
    case 'n': return Pos::noun;
    case 'v': return Pos::verb;
    case 'a': return Pos::adjective;
    case 's': return Pos::adjective_satellite;
    case 'r': return Pos::adverb;
    default: return std::nullopt;
  }
}

inline std::optional<Pos> pos_from_key_digit(char c) {
  switch (c) {
    case '1': return Pos::noun;
    case '2': return Pos::verb;
    case '3': return Pos::adjective;
    case '5': return Pos::adjective_satellite;
    case '4': return Pos::adverb;
    default: return std::nullopt;
  }
}

// Satellites share the adjective index; everything word-level is keyed by this.
constexpr Pos index_pos(Pos p) {
  return p == Pos::adjective_satellite ? Pos::adjective : p;
}

inline constexpr std::array<Pos, 4> kIndexPos = {Pos::noun, Pos::verb, Pos::adjective,
                                                 Pos::adverb};

constexpr int index_slot(Pos p) {
  switch (index_pos(p)) {
    case Pos::noun: return 0;
    case Pos::verb: return 1;
    case Pos::adjective: return 2;
    default: return 3;
  }
}

// ---------------------------------------------------------------- SynsetId

// Canonical synset identity: POS letter plus the 8-digit database offset,
// rendered "n#02084442". Ordering is (letter, offset), so 'a' < 'n' < 'r' <
// 's' < 'v'.
struct SynsetId {
  Pos pos = Pos::noun;
  std::uint32_t offset = 0;

  std::string text() const {
    char buf[11];
    std::snprintf(buf, sizeof buf, "%c#%08u", pos_letter(pos), offset);
    return std::string(buf, 10);
  }

  friend bool operator==(const SynsetId&, const SynsetId&) = default;
  friend auto operator<=>(const SynsetId& a, const SynsetId& b) {
    if (auto c = pos_letter(a.pos) <=> pos_letter(b.pos); c != 0) return c;
    return a.offset <=> b.offset;
  }
};

inline std::optional<SynsetId> parse_synset_id(std::string_view s) {
  if (s.size() != 10 || s[1] != '#') return std::nullopt;
  auto pos = pos_from_letter(s[0]);
  if (!pos) return std::nullopt;
  std::uint32_t off = 0;
  auto digits = s.substr(2);
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), off, 10);
  if (ec != std::errc() || p != digits.data() + digits.size()) return std::nullopt;
  return SynsetId{*pos, off};
}

// ------------------------------------------------------------- relations

enum class RelationType : std::uint8_t {
  hypernym,
  instance_hypernym,
  hyponym,
  instance_hyponym,
  member_holonym,
  substance_holonym,
  part_holonym,
  member_meronym,
  substance_meronym,
  part_meronym,
  antonym,
  similar_to,
  attribute,
  entailment,
  cause,
  also_see,
  verb_group,
  participle,
  pertainym,
  derivationally_related,
  domain_topic,
  domain_region,
  domain_usage,
  domain_member_topic,
  domain_member_region,
  domain_member_usage,
};

inline constexpr int kRelationCount = 26;

namespace detail {
struct RelationInfo {
  std::string_view symbol;
  std::string_view name;
};
inline constexpr std::array<RelationInfo, kRelationCount> kRelationInfo = {{
    {"@", "hypernym"},
    {"@i", "instance_hypernym"},
    {"~", "hyponym"},
    {"~i", "instance_hyponym"},
    {"#m", "member_holonym"},
    {"#s", "substance_holonym"},
    {"#p", "part_holonym"},
    {"%m", "member_meronym"},
    {"%s", "substance_meronym"},
    {"%p", "part_meronym"},
    {"!", "antonym"},
    {"&", "similar_to"},
    {"=", "attribute"},
    {"*", "entailment"},
    {">", "cause"},
    {"^", "also_see"},
    {"$", "verb_group"},
    {"<", "participle"},
    {"\\", "pertainym"},
    {"+", "derivationally_related"},
    {";c", "domain_topic"},
    {";r", "domain_region"},
    {";u", "domain_usage"},
    {"-c", "domain_member_topic"},
    {"-r", "domain_member_region"},
    {"-u", "domain_member_usage"},
}};
}  // namespace detail

constexpr std::string_view relation_symbol(RelationType t) {
  return detail::kRelationInfo[static_cast<int>(t)].symbol;
}

constexpr std::string_view relation_name(RelationType t) {
  return detail::kRelationInfo[static_cast<int>(t)].name;
}

inline std::optional<RelationType> relation_from_symbol(std::string_view s) {
  for (int i = 0; i < kRelationCount; ++i)
    if (detail::kRelationInfo[i].symbol == s) return static_cast<RelationType>(i);
  return std::nullopt;
}

inline std::optional<RelationType> relation_from_name(std::string_view s) {
  for (int i = 0; i < kRelationCount; ++i)
    if (detail::kRelationInfo[i].name == s) return static_cast<RelationType>(i);
  return std::nullopt;
}

// The hierarchy/part-whole relations exist in the database in both directions;
// the parser materializes the missing direction so callers never chase both.
inline std::optional<RelationType> mirror_relation(RelationType t) {
  switch (t) {
    case RelationType::hypernym: return RelationType::hyponym;
    case RelationType::hyponym: return RelationType::hypernym;
    case RelationType::instance_hypernym: return RelationType::instance_hyponym;
    case RelationType::instance_hyponym: return RelationType::instance_hypernym;
    case RelationType::member_holonym: return RelationType::member_meronym;
    case RelationType::member_meronym: return RelationType::member_holonym;
    case RelationType::substance_holonym: return RelationType::substance_meronym;
    case RelationType::substance_meronym: return RelationType::substance_holonym;
    case RelationType::part_holonym: return RelationType::part_meronym;
    case RelationType::part_meronym: return RelationType::part_holonym;
    default: return std::nullopt;
  }
}

// Set of relation types as a bitmask over the enum.
class RelationFilter {
public:
  static constexpr RelationFilter all() {
    return RelationFilter((std::uint32_t{1} << kRelationCount) - 1);
  }
  static constexpr RelationFilter none() { return RelationFilter(0); }
  static RelationFilter of(std::initializer_list<RelationType> types) {
    RelationFilter f;
    for (auto t : types) f.set(t);
    return f;
  }

  RelationFilter& set(RelationType t) {
    bits_ |= std::uint32_t{1} << static_cast<int>(t);
    return *this;
  }
  constexpr bool contains(RelationType t) const {
    return bits_ & (std::uint32_t{1} << static_cast<int>(t));
  }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint32_t bits() const { return bits_; }

  friend bool operator==(const RelationFilter&, const RelationFilter&) = default;

private:
  constexpr explicit RelationFilter(std::uint32_t bits) : bits_(bits) {}
  RelationFilter() = default;
  std::uint32_t bits_ = 0;
};

// ------------------------------------------------------------------ graph

struct SynsetWord {
  std::string text;  // original case, syntax markers stripped
  std::uint8_t lex_id = 0;
};

struct Edge {
  RelationType type;
  std::uint32_t target;  // synset index
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Synset {
  SynsetId id;
  std::uint8_t lex_filenum = 0;
  std::vector<SynsetWord> words;
  std::string gloss;
  std::vector<std::uint32_t> senses;  // sense indices, ascending
};

struct WordSense {
  std::string lemma;  // lowercase, collocations use '_'
  Pos pos = Pos::noun;  // index POS: never adjective_satellite
  std::uint16_t sense_number = 1;
  std::string key;  // full sense key, e.g. "mouse%1:05:00::"
  std::uint32_t synset = 0;
};

namespace detail {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const {
    return std::hash<std::string_view>{}(s);
  }
};

template <typename T>
using StringMap = std::unordered_map<std::string, T, StringHash, std::equal_to<>>;

constexpr std::uint64_t pack_id(char letter, std::uint32_t offset) {
  return (static_cast<std::uint64_t>(static_cast<unsigned char>(letter)) << 32) | offset;
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

}  // namespace detail

class WordNetGraph {
public:
  // One (lemma, index POS) entry; its senses are a contiguous run in senses(),
  // ordered by sense number.
  struct LemmaEntry {
    std::string lemma;
    Pos pos;
    std::uint32_t first_sense = 0;
    std::uint32_t sense_count = 0;
  };

  const std::vector<Synset>& synsets() const { return synsets_; }
  const std::vector<WordSense>& senses() const { return senses_; }
  std::size_t synset_count() const { return synsets_.size(); }
  std::size_t sense_count() const { return senses_.size(); }

  const Synset& synset(std::uint32_t idx) const { return synsets_[idx]; }
  const WordSense& sense(std::uint32_t idx) const { return senses_[idx]; }

  std::span<const Edge> edges(std::uint32_t synset_idx) const {
    return {edge_data_.data() + edge_offsets_[synset_idx],
            edge_data_.data() + edge_offsets_[synset_idx + 1]};
  }

  std::optional<std::uint32_t> find_synset(SynsetId id) const {
    auto it = synset_index_.find(detail::pack_id(pos_letter(id.pos), id.offset));
    if (it == synset_index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::uint32_t> find_sense(std::string_view key) const {
    auto it = key_index_.find(key);
    if (it == key_index_.end()) return std::nullopt;
    return it->second;
  }

  // Sense indices for (lemma, pos) in sense-number order; empty when unknown.
  // Satellite POS is folded into adjective.
  std::span<const std::uint32_t> senses_of(std::string_view lemma, Pos pos) const {
    auto it = lemma_index_.find(lemma);
    if (it == lemma_index_.end()) return {};
    std::int32_t e = it->second[index_slot(pos)];
    if (e < 0) return {};
    const LemmaEntry& entry = lemma_entries_[e];
    return {sense_order_.data() + entry.first_sense, entry.sense_count};
  }

  // Typed neighbors of a synset, ordered by (relation, target id).
  std::vector<std::pair<RelationType, SynsetId>> related(SynsetId id,
                                                         RelationFilter filter) const {
    auto idx = find_synset(id);
    if (!idx) throw std::invalid_argument("unknown synset id: " + id.text());
    std::vector<std::pair<RelationType, SynsetId>> out;
    for (const Edge& e : edges(*idx))
      if (filter.contains(e.type)) out.emplace_back(e.type, synsets_[e.target].id);
    return out;
  }

  // Entries sorted by (lemma, index POS slot).
  const std::vector<LemmaEntry>& lemma_entries() const { return lemma_entries_; }

  // "3.0" when the database has exactly the WordNet 3.0 sense and synset
  // counts, otherwise "unknown".
  std::string version_guess() const {
    return (senses_.size() == 206941 && synsets_.size() == 117659) ? "3.0" : "unknown";
  }

private:
  friend WordNetGraph parse_wordnet(const std::filesystem::path&);

  std::vector<Synset> synsets_;
  std::vector<WordSense> senses_;
  std::vector<std::uint32_t> sense_order_;  // sense indices grouped by lemma entry
  std::vector<Edge> edge_data_;
  std::vector<std::uint32_t> edge_offsets_;
  std::unordered_map<std::uint64_t, std::uint32_t> synset_index_;
  detail::StringMap<std::uint32_t> key_index_;
  detail::StringMap<std::array<std::int32_t, 4>> lemma_index_;
  std::vector<LemmaEntry> lemma_entries_;
};

// --------------------------------------------------------------- parsing

namespace detail {

struct LineCursor {
  std::string_view rest;
  const std::string* file = nullptr;
  std::size_t line_no = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(*file + ":" + std::to_string(line_no) + ": " + msg);
  }

  void skip_spaces() {
    while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  }

  bool at_end() {
    skip_spaces();
    return rest.empty();
  }

  std::string_view next(const char* field) {
    skip_spaces();
    if (rest.empty()) fail(std::string("missing ") + field);
    std::size_t n = rest.find(' ');
    std::string_view tok = rest.substr(0, n);
    rest.remove_prefix(n == std::string_view::npos ? rest.size() : n);
    return tok;
  }

  std::uint64_t next_uint(const char* field, int base, std::uint64_t max_value) {
    std::string_view tok = next(field);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v, base);
    if (ec != std::errc() || p != tok.data() + tok.size() || v > max_value)
      fail(std::string("bad ") + field + " '" + std::string(tok) + "'");
    return v;
  }
};

// The four database file groups; 'a' and 's' synsets share the adj files.
inline constexpr std::array<std::string_view, 4> kGroupSuffix = {"noun", "verb", "adj",
                                                                 "adv"};
inline constexpr std::array<char, 4> kGroupLetter = {'n', 'v', 'a', 'r'};

constexpr int group_of(Pos p) { return index_slot(p); }

struct RawPointer {
  RelationType type;
  int target_group;
  std::uint32_t target_offset;
  int src_word;  // 1-based, 0 = synset-level
  int tgt_word;
  std::size_t line_no;
};

struct RawSynset {
  Pos pos;
  std::uint32_t offset;
  std::uint8_t lex_filenum;
  std::vector<SynsetWord> words;
  std::vector<RawPointer> pointers;
  std::string gloss;
  int group;
  std::size_t line_no;
};

struct RawIndexEntry {
  std::string lemma;
  Pos pos;  // index POS
  int group;
  std::vector<std::uint32_t> offsets;
  std::size_t line_no;
  const std::string* file;
};

inline std::string strip_adj_marker(LineCursor& cur, std::string_view word, int group) {
  if (group != 2) return std::string(word);
  auto open = word.find('(');
  if (open == std::string_view::npos) return std::string(word);
  if (open == 0 || word.back() != ')') cur.fail("malformed word '" + std::string(word) + "'");
  std::string_view marker = word.substr(open + 1, word.size() - open - 2);
  if (marker != "p" && marker != "a" && marker != "ip")
    cur.fail("unknown syntax marker '(" + std::string(marker) + ")'");
  return std::string(word.substr(0, open));
}

inline void parse_data_file(const std::filesystem::path& path, int group,
                            std::vector<RawSynset>& out) {
  std::ifstream in(path);
  const std::string name = path.string();
  if (!in) throw ParseError(name + ": cannot open");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == ' ') continue;  // license header
    LineCursor cur{line, &name, line_no};

    RawSynset syn;
    syn.group = group;
    syn.line_no = line_no;
    syn.offset = static_cast<std::uint32_t>(cur.next_uint("synset_offset", 10, 99999999));
    syn.lex_filenum = static_cast<std::uint8_t>(cur.next_uint("lex_filenum", 10, 99));
    std::string_view ss = cur.next("ss_type");
    auto pos = ss.size() == 1 ? pos_from_letter(ss[0]) : std::nullopt;
    if (!pos) cur.fail("bad ss_type '" + std::string(ss) + "'");
    if (group_of(*pos) != group)
      cur.fail(std::string("ss_type '") + pos_letter(*pos) + "' in wrong file");
    syn.pos = *pos;

    auto w_cnt = cur.next_uint("w_cnt", 16, 0xff);
    if (w_cnt == 0) cur.fail("w_cnt is zero");
    syn.words.reserve(w_cnt);
    for (std::uint64_t i = 0; i < w_cnt; ++i) {
      std::string_view w = cur.next("word");
      auto lex_id = cur.next_uint("lex_id", 16, 0xf);
      syn.words.push_back({strip_adj_marker(cur, w, group),
                           static_cast<std::uint8_t>(lex_id)});
    }

    auto p_cnt = cur.next_uint("p_cnt", 10, 999);
    syn.pointers.reserve(p_cnt);
    for (std::uint64_t i = 0; i < p_cnt; ++i) {
      std::string_view sym = cur.next("pointer_symbol");
      auto type = relation_from_symbol(sym);
      if (!type) cur.fail("unknown pointer symbol '" + std::string(sym) + "'");
      auto toff = cur.next_uint("pointer offset", 10, 99999999);
      std::string_view pl = cur.next("pointer pos");
      auto tpos = pl.size() == 1 ? pos_from_letter(pl[0]) : std::nullopt;
      if (!tpos || *tpos == Pos::adjective_satellite)
        cur.fail("bad pointer pos '" + std::string(pl) + "'");
      auto st = cur.next("source/target");
      if (st.size() != 4) cur.fail("bad source/target '" + std::string(st) + "'");
      int src = 0, tgt = 0;
      auto conv = [&](std::string_view h, int& v) {
        auto [p, ec] = std::from_chars(h.data(), h.data() + 2, v, 16);
        if (ec != std::errc() || p != h.data() + 2)
          cur.fail("bad source/target '" + std::string(st) + "'");
      };
      conv(st.substr(0, 2), src);
      conv(st.substr(2, 2), tgt);
      if ((src == 0) != (tgt == 0))
        cur.fail("half-lexical source/target '" + std::string(st) + "'");
      syn.pointers.push_back({*type, group_of(*tpos), static_cast<std::uint32_t>(toff),
                              src, tgt, line_no});
    }

    if (group == 1) {  // verb frames
      auto f_cnt = cur.next_uint("f_cnt", 10, 99);
      for (std::uint64_t i = 0; i < f_cnt; ++i) {
        if (cur.next("frame separator") != "+") cur.fail("expected '+' before frame");
        cur.next_uint("f_num", 10, 99);
        cur.next_uint("w_num", 16, 0xff);
      }
    }

    if (cur.next("gloss separator") != "|") cur.fail("expected '|' before gloss");
    cur.skip_spaces();
    std::string_view gloss = cur.rest;
    while (!gloss.empty() && gloss.back() == ' ') gloss.remove_suffix(1);
    syn.gloss = std::string(gloss);

    if (std::uint64_t w = syn.words.size(); w != w_cnt)
      cur.fail("w_cnt mismatch: " + std::to_string(w));
    out.push_back(std::move(syn));
  }
}

inline void parse_index_file(const std::filesystem::path& path, int group,
                             std::vector<RawIndexEntry>& out, std::string& name_storage) {
  std::ifstream in(path);
  name_storage = path.string();
  if (!in) throw ParseError(name_storage + ": cannot open");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == ' ') continue;
    LineCursor cur{line, &name_storage, line_no};

    RawIndexEntry entry;
    entry.group = group;
    entry.line_no = line_no;
    entry.file = &name_storage;
    entry.lemma = std::string(cur.next("lemma"));
    for (char c : entry.lemma)
      if (c >= 'A' && c <= 'Z') cur.fail("index lemma not lowercase: " + entry.lemma);
    std::string_view pl = cur.next("pos");
    if (pl.size() != 1 || pl[0] != kGroupLetter[group])
      cur.fail("pos '" + std::string(pl) + "' in wrong index file");
    entry.pos = *pos_from_letter(kGroupLetter[group]);

    auto synset_cnt = cur.next_uint("synset_cnt", 10, 0xffff);
    if (synset_cnt == 0) cur.fail("synset_cnt is zero");
    auto p_cnt = cur.next_uint("p_cnt", 10, 99);
    for (std::uint64_t i = 0; i < p_cnt; ++i) {
      std::string_view sym = cur.next("ptr_symbol");
      if (!relation_from_symbol(sym))
        cur.fail("unknown pointer symbol '" + std::string(sym) + "'");
    }
    auto sense_cnt = cur.next_uint("sense_cnt", 10, 0xffff);
    if (sense_cnt != synset_cnt) cur.fail("sense_cnt differs from synset_cnt");
    cur.next_uint("tagsense_cnt", 10, 0xffff);
    entry.offsets.reserve(synset_cnt);
    for (std::uint64_t i = 0; i < synset_cnt; ++i)
      entry.offsets.push_back(
          static_cast<std::uint32_t>(cur.next_uint("synset_offset", 10, 99999999)));
    if (!cur.at_end()) cur.fail("trailing tokens");
    out.push_back(std::move(entry));
  }
}

}  // namespace detail

// Parses the four data.* / index.* pairs under dict_dir, validates their
// consistency, and builds the graph. Throws ParseError on malformed input and
// ValidationError on semantic violations (duplicate ids, dangling pointers,
// cyclic hypernyms, index/data mismatches, duplicate sense keys).
inline WordNetGraph parse_wordnet(const std::filesystem::path& dict_dir) {
  using namespace detail;

  std::vector<RawSynset> raw;
  for (int g = 0; g < 4; ++g)
    parse_data_file(dict_dir / ("data." + std::string(kGroupSuffix[g])), g, raw);

  std::sort(raw.begin(), raw.end(), [](const RawSynset& a, const RawSynset& b) {
    return SynsetId{a.pos, a.offset} < SynsetId{b.pos, b.offset};
  });

  WordNetGraph graph;
  graph.synsets_.reserve(raw.size());
  std::unordered_map<std::uint64_t, std::uint32_t> by_group_offset;
  by_group_offset.reserve(raw.size() * 2);
  for (std::uint32_t i = 0; i < raw.size(); ++i) {
    const RawSynset& r = raw[i];
    Synset s;
    s.id = {r.pos, r.offset};
    s.lex_filenum = r.lex_filenum;
    s.words = r.words;
    s.gloss = r.gloss;
    graph.synset_index_.emplace(pack_id(pos_letter(r.pos), r.offset), i);
    if (!by_group_offset.emplace(pack_id(kGroupLetter[r.group], r.offset), i).second)
      throw ValidationError("duplicate synset offset " + s.id.text());
    graph.synsets_.push_back(std::move(s));
  }
  if (graph.synset_index_.size() != raw.size())
    throw ValidationError("duplicate synset id across data files");

  // Lift pointers to synset-level typed edges, mirror the hierarchy/part-whole
  // pairs, and dedupe.
  std::vector<std::vector<Edge>> adj(raw.size());
  for (std::uint32_t i = 0; i < raw.size(); ++i) {
    for (const RawPointer& p : raw[i].pointers) {
      auto it = by_group_offset.find(pack_id(kGroupLetter[p.target_group], p.target_offset));
      if (it == by_group_offset.end())
        throw ValidationError("dangling pointer from " + graph.synsets_[i].id.text() +
                              " to " + std::string(1, kGroupLetter[p.target_group]) +
                              "#" + std::to_string(p.target_offset));
      std::uint32_t t = it->second;
      if (p.src_word != 0) {
        if (static_cast<std::size_t>(p.src_word) > graph.synsets_[i].words.size() ||
            static_cast<std::size_t>(p.tgt_word) > graph.synsets_[t].words.size())
          throw ValidationError("pointer word number out of range in " +
                                graph.synsets_[i].id.text());
      }
      if (t == i) continue;  // self-loops carry no information here
      adj[i].push_back({p.type, t});
      if (auto m = mirror_relation(p.type)) adj[t].push_back({*m, i});
    }
  }

  graph.edge_offsets_.assign(raw.size() + 1, 0);
  for (std::uint32_t i = 0; i < raw.size(); ++i) {
    auto& v = adj[i];
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    graph.edge_offsets_[i + 1] = graph.edge_offsets_[i] + static_cast<std::uint32_t>(v.size());
  }
  graph.edge_data_.reserve(graph.edge_offsets_.back());
  for (auto& v : adj) graph.edge_data_.insert(graph.edge_data_.end(), v.begin(), v.end());
  adj.clear();
  adj.shrink_to_fit();

  // Hypernym edges must be acyclic (checked over @ and @i together).
  {
    std::vector<std::uint8_t> color(raw.size(), 0);
    std::vector<std::pair<std::uint32_t, std::size_t>> stack;
    for (std::uint32_t s = 0; s < raw.size(); ++s) {
      if (color[s]) continue;
      stack.emplace_back(s, 0);
      color[s] = 1;
      while (!stack.empty()) {
        auto& [u, ei] = stack.back();
        auto es = graph.edges(u);
        bool descended = false;
        while (ei < es.size()) {
          const Edge& e = es[ei++];
          if (e.type != RelationType::hypernym && e.type != RelationType::instance_hypernym)
            continue;
          if (color[e.target] == 1)
            throw ValidationError("hypernym cycle through " +
                                  graph.synsets_[e.target].id.text());
          if (color[e.target] == 0) {
            color[e.target] = 1;
            stack.emplace_back(e.target, 0);
            descended = true;
            break;
          }
        }
        if (!descended && (stack.back().second >= graph.edges(stack.back().first).size())) {
          color[stack.back().first] = 2;
          stack.pop_back();
        }
      }
    }
  }

  // Index files: one lemma entry per (lemma, POS); each listed offset must
  // name a word slot matching the lemma.
  std::vector<RawIndexEntry> entries;
  std::array<std::string, 4> index_names;
  for (int g = 0; g < 4; ++g)
    parse_index_file(dict_dir / ("index." + std::string(kGroupSuffix[g])), g, entries,
                     index_names[g]);

  std::sort(entries.begin(), entries.end(),
            [](const RawIndexEntry& a, const RawIndexEntry& b) {
              if (a.lemma != b.lemma) return a.lemma < b.lemma;
              return index_slot(a.pos) < index_slot(b.pos);
            });
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (entries[i].lemma == entries[i - 1].lemma && entries[i].pos == entries[i - 1].pos)
      throw ValidationError("duplicate index entry for '" + entries[i].lemma + "' (" +
                            std::string(pos_name(entries[i].pos)) + ")");

  std::vector<std::vector<bool>> slot_used(raw.size());
  for (std::uint32_t i = 0; i < raw.size(); ++i)
    slot_used[i].assign(graph.synsets_[i].words.size(), false);

  auto satellite_head = [&](std::uint32_t sat) -> const SynsetWord* {
    const Synset* best = nullptr;
    for (const Edge& e : graph.edges(sat)) {
      if (e.type != RelationType::similar_to) continue;
      const Synset& t = graph.synsets_[e.target];
      if (t.id.pos != Pos::adjective) continue;
      if (!best || t.id.offset < best->id.offset) best = &t;
    }
    return best ? &best->words.front() : nullptr;
  };

  graph.senses_.reserve(entries.size() * 2);
  graph.lemma_entries_.reserve(entries.size());
  for (const RawIndexEntry& entry : entries) {
    WordNetGraph::LemmaEntry le;
    le.lemma = entry.lemma;
    le.pos = entry.pos;
    le.first_sense = static_cast<std::uint32_t>(graph.senses_.size());
    le.sense_count = static_cast<std::uint32_t>(entry.offsets.size());

    std::uint16_t number = 0;
    for (std::uint32_t off : entry.offsets) {
      ++number;
      auto it = by_group_offset.find(pack_id(kGroupLetter[entry.group], off));
      if (it == by_group_offset.end())
        throw ValidationError(*entry.file + ":" + std::to_string(entry.line_no) +
                              ": offset " + std::to_string(off) + " not in data file");
      std::uint32_t syn = it->second;
      const Synset& s = graph.synsets_[syn];

      int slot = -1;
      for (std::size_t w = 0; w < s.words.size(); ++w) {
        if (ascii_lower(s.words[w].text) == entry.lemma) {
          if (slot >= 0)
            throw ValidationError("synset " + s.id.text() + " contains lemma '" +
                                  entry.lemma + "' twice");
          slot = static_cast<int>(w);
        }
      }
      if (slot < 0)
        throw ValidationError(*entry.file + ":" + std::to_string(entry.line_no) +
                              ": lemma '" + entry.lemma + "' not in synset " + s.id.text());
      if (slot_used[syn][slot])
        throw ValidationError("word slot for '" + entry.lemma + "' in " + s.id.text() +
                              " claimed twice");
      slot_used[syn][slot] = true;

      WordSense sense;
      sense.lemma = entry.lemma;
      sense.pos = entry.pos;
      sense.sense_number = number;
      sense.synset = syn;

      char head_buf[8] = "";
      std::string head;
      if (s.id.pos == Pos::adjective_satellite) {
        const SynsetWord* hw = satellite_head(syn);
        if (!hw)
          throw ValidationError("satellite " + s.id.text() + " has no similar_to head");
        head = ascii_lower(hw->text);
        std::snprintf(head_buf, sizeof head_buf, "%02u", hw->lex_id);
      }
      char mid[16];
      std::snprintf(mid, sizeof mid, "%%%c:%02u:%02u:", pos_key_digit(s.id.pos),
                    s.lex_filenum, s.words[slot].lex_id);
      sense.key = entry.lemma + mid + head + ":" + head_buf;

      graph.senses_.push_back(std::move(sense));
    }
    graph.lemma_entries_.push_back(std::move(le));
  }

  for (std::uint32_t i = 0; i < graph.senses_.size(); ++i) {
    if (!graph.key_index_.emplace(graph.senses_[i].key, i).second)
      throw ValidationError("duplicate sense key " + graph.senses_[i].key);
    graph.synsets_[graph.senses_[i].synset].senses.push_back(i);
  }

  for (std::uint32_t i = 0; i < raw.size(); ++i)
    for (std::size_t w = 0; w < slot_used[i].size(); ++w)
      if (!slot_used[i][w])
        throw ValidationError("word '" + graph.synsets_[i].words[w].text + "' in " +
                              graph.synsets_[i].id.text() + " has no index entry");

  graph.sense_order_.resize(graph.senses_.size());
  for (std::uint32_t i = 0; i < graph.sense_order_.size(); ++i) graph.sense_order_[i] = i;

  for (std::int32_t e = 0; e < static_cast<std::int32_t>(graph.lemma_entries_.size()); ++e) {
    const auto& le = graph.lemma_entries_[e];
    auto [it, inserted] =
        graph.lemma_index_.try_emplace(le.lemma, std::array<std::int32_t, 4>{-1, -1, -1, -1});
    it->second[index_slot(le.pos)] = e;
    (void)inserted;
  }

  return graph;
}

// ------------------------------------------------------------- statistics

struct HierarchyStats {
  std::uint64_t polysemous_noun_senses = 0;
  std::uint64_t in_hierarchy = 0;  // of those, senses whose synset reaches a top
};

// A synset is in the hypernym hierarchy iff it reaches, via zero or more
// plain hypernym edges, a top synset: one with no outgoing hypernym edges of
// either kind and at least one incoming plain hypernym edge. Instance-only
// synsets cannot climb and fall outside; so do fully isolated synsets.
inline HierarchyStats hierarchy_stats(const WordNetGraph& graph) {
  const std::size_t n = graph.synset_count();
  std::vector<std::uint8_t> has_incoming(n, 0);
  for (std::uint32_t s = 0; s < n; ++s)
    for (const Edge& e : graph.edges(s))
      if (e.type == RelationType::hypernym) has_incoming[e.target] = 1;

  // 0 unknown, 1 reaches a top, 2 does not
  std::vector<std::uint8_t> memo(n, 0);
  std::vector<std::uint32_t> visit;
  auto reaches = [&](std::uint32_t start) {
    if (memo[start]) return memo[start] == 1;
    visit.assign(1, start);
    while (!visit.empty()) {
      std::uint32_t u = visit.back();
      if (memo[u]) {
        visit.pop_back();
        continue;
      }
      bool has_out = false, any_top = false;
      std::size_t before = visit.size();
      for (const Edge& e : graph.edges(u)) {
        if (e.type == RelationType::instance_hypernym) has_out = true;
        if (e.type != RelationType::hypernym) continue;
        has_out = true;
        if (memo[e.target] == 1)
          any_top = true;
        else if (memo[e.target] == 0)
          visit.push_back(e.target);
      }
      if (!has_out) {
        memo[u] = has_incoming[u] ? 1 : 2;
        visit.resize(before - 1);
      } else if (any_top) {
        memo[u] = 1;
        visit.resize(before - 1);
      } else if (visit.size() == before) {
        memo[u] = 2;  // all plain parents resolved, none reaches a top
        visit.pop_back();
      }
      // otherwise u stays below its unresolved parents and is re-examined
    }
    return memo[start] == 1;
  };

  HierarchyStats stats;
  for (const auto& entry : graph.lemma_entries()) {
    if (entry.pos != Pos::noun || entry.sense_count < 2) continue;
    stats.polysemous_noun_senses += entry.sense_count;
    auto span = graph.senses_of(entry.lemma, Pos::noun);
    for (std::uint32_t sidx : span)
      if (reaches(graph.sense(sidx).synset)) ++stats.in_hierarchy;
  }
  return stats;
}

// ---------------------------------------------------------------- dumping

// Canonical text dump: one synset per line (sorted by id), then one sense per
// line (sorted by lemma, POS, sense number). Stable across runs; intended for
// golden files and determinism checks.
inline void dump_graph(const WordNetGraph& graph, std::ostream& out) {
  char buf[32];
  for (std::uint32_t i = 0; i < graph.synset_count(); ++i) {
    const Synset& s = graph.synset(i);
    out << "synset\t" << s.id.text() << '\t';
    std::snprintf(buf, sizeof buf, "%02u", s.lex_filenum);
    out << buf << '\t';
    for (std::size_t w = 0; w < s.words.size(); ++w) {
      if (w) out << ' ';
      std::snprintf(buf, sizeof buf, "%x", s.words[w].lex_id);
      out << s.words[w].text << '%' << buf;
    }
    out << '\t';
    bool first = true;
    for (const Edge& e : graph.edges(i)) {
      if (!first) out << ' ';
      first = false;
      out << relation_name(e.type) << '=' << graph.synset(e.target).id.text();
    }
    out << '\t' << s.gloss << '\n';
  }
  for (const WordSense& sense : graph.senses()) {
    out << "sense\t" << sense.key << '\t' << sense.lemma << '\t'
        << pos_letter(sense.pos) << '\t' << sense.sense_number << '\t'
        << graph.synset(sense.synset).id.text() << '\n';
  }
}

}  // namespace sensevoc
