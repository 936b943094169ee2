#pragma once

// Sense-to-tag mappings: the common result type of every compression method,
// plus the text codec, the synonymy compressor, decompression back to sense
// keys, and the per-word discriminability check.

#include "wordnet.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_set>

namespace sensevoc {

enum class CompressionMethod : std::uint8_t { synonymy, hypernymy, all_relations };

constexpr std::string_view method_name(CompressionMethod m) {
  switch (m) {
    case CompressionMethod::synonymy: return "synonymy";
    case CompressionMethod::hypernymy: return "hypernymy";
    case CompressionMethod::all_relations: return "all_relations";
  }
  return "?";
}

inline std::optional<CompressionMethod> method_from_name(std::string_view s) {
  if (s == "synonymy") return CompressionMethod::synonymy;
  if (s == "hypernymy") return CompressionMethod::hypernymy;
  if (s == "all_relations") return CompressionMethod::all_relations;
  return std::nullopt;
}

// Tags are synset-shaped for every method: "syn:<id>" marks a synset chosen
// by the synonymy/hypernymy methods, "clu:<id>" a cluster named by its
// canonically smallest member.
constexpr std::string_view tag_prefix(CompressionMethod m) {
  return m == CompressionMethod::all_relations ? "clu" : "syn";
}

inline std::string make_tag(CompressionMethod m, SynsetId id) {
  return std::string(tag_prefix(m)) + ":" + id.text();
}

inline std::optional<SynsetId> parse_tag(CompressionMethod m, std::string_view tag) {
  auto prefix = tag_prefix(m);
  if (tag.size() != prefix.size() + 11 || !tag.starts_with(prefix) ||
      tag[prefix.size()] != ':')
    return std::nullopt;
  return parse_synset_id(tag.substr(prefix.size() + 1));
}

struct MappingMetadata {
  std::string wordnet_version = "unknown";
  std::optional<std::uint64_t> steps;    // all_relations: merges performed
  std::optional<std::uint64_t> seed;     // all_relations: orderings seed
  std::optional<std::uint64_t> repairs;  // hypernymy: senses remapped to stay discriminable
};

// Total function from sense keys to tags. Entries are kept sorted by key so
// iteration, serialization, and equality are deterministic.
struct SenseMapping {
  CompressionMethod method = CompressionMethod::synonymy;
  MappingMetadata metadata;
  std::map<std::string, std::string> entries;

  const std::string* tag_of(const std::string& key) const {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  }
};

struct MappingStats {
  std::uint64_t sense_count = 0;
  std::uint64_t vocabulary_size = 0;   // distinct tags
  double compression_rate = 0;         // 1 - vocabulary/senses, in [0,1]
  double mean_senses_per_tag = 0;
};

inline MappingStats mapping_stats(const SenseMapping& mapping) {
  MappingStats stats;
  stats.sense_count = mapping.entries.size();
  std::unordered_set<std::string_view> tags;
  tags.reserve(mapping.entries.size());
  for (const auto& [key, tag] : mapping.entries) tags.insert(tag);
  stats.vocabulary_size = tags.size();
  if (stats.vocabulary_size > 0) {
    stats.compression_rate =
        1.0 - static_cast<double>(stats.vocabulary_size) / stats.sense_count;
    stats.mean_senses_per_tag =
        static_cast<double>(stats.sense_count) / stats.vocabulary_size;
  }
  return stats;
}

// ------------------------------------------------------------- synonymy

// Every sense maps to its own synset: polysemy across synsets is kept,
// synonymy within a synset is collapsed.
inline SenseMapping compress_synonymy(const WordNetGraph& graph) {
  SenseMapping mapping;
  mapping.method = CompressionMethod::synonymy;
  mapping.metadata.wordnet_version = graph.version_guess();
  for (const WordSense& sense : graph.senses())
    mapping.entries.emplace(sense.key,
                            make_tag(mapping.method, graph.synset(sense.synset).id));
  return mapping;
}

// ----------------------------------------------------------------- codec

// Text format: '#' key=value header lines (method first), then one
// "sense_key<TAB>tag" line per sense, sorted by key, LF line endings. The
// rendering is canonical: load followed by save is byte-identical.
inline void save_mapping(const SenseMapping& mapping, std::ostream& out) {
  out << "# method=" << method_name(mapping.method) << '\n';
  out << "# wordnet_version=" << mapping.metadata.wordnet_version << '\n';
  if (mapping.metadata.steps) out << "# steps=" << *mapping.metadata.steps << '\n';
  if (mapping.metadata.seed) out << "# seed=" << *mapping.metadata.seed << '\n';
  if (mapping.metadata.repairs) out << "# repairs=" << *mapping.metadata.repairs << '\n';
  for (const auto& [key, tag] : mapping.entries) out << key << '\t' << tag << '\n';
}

inline void save_mapping(const SenseMapping& mapping, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  save_mapping(mapping, out);
  if (!out.flush()) throw ValidationError("write failed: " + path.string());
}

// Loads and validates a mapping against the graph it will be used with:
// every entry's key must name a sense, every sense must have an entry, keys
// must be unique, and tags must carry the method's prefix and parse.
inline SenseMapping load_mapping(std::istream& in, const WordNetGraph& graph) {
  SenseMapping mapping;
  bool have_method = false;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw ParseError("mapping:" + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string_view rest = std::string_view(line).substr(1);
      while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
      auto eq = rest.find('=');
      if (eq == std::string_view::npos) fail("malformed header");
      std::string_view k = rest.substr(0, eq), v = rest.substr(eq + 1);
      auto uint_value = [&]() -> std::uint64_t {
        std::uint64_t n = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n, 10);
        if (ec != std::errc() || p != v.data() + v.size())
          fail("bad numeric header value");
        return n;
      };
      if (k == "method") {
        auto m = method_from_name(v);
        if (!m) fail("unknown method '" + std::string(v) + "'");
        mapping.method = *m;
        have_method = true;
      } else if (k == "wordnet_version") {
        mapping.metadata.wordnet_version = std::string(v);
      } else if (k == "steps") {
        mapping.metadata.steps = uint_value();
      } else if (k == "seed") {
        mapping.metadata.seed = uint_value();
      } else if (k == "repairs") {
        mapping.metadata.repairs = uint_value();
      }  // unknown headers are ignored
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos) fail("expected sense_key<TAB>tag");
    if (!have_method) fail("entries before method header");
    std::string key = line.substr(0, tab);
    std::string tag = line.substr(tab + 1);
    if (!graph.find_sense(key)) fail("unknown sense key '" + key + "'");
    if (!parse_tag(mapping.method, tag))
      fail("tag '" + tag + "' does not match method " +
           std::string(method_name(mapping.method)));
    if (!mapping.entries.emplace(std::move(key), std::move(tag)).second)
      fail("duplicate sense key '" + line.substr(0, tab) + "'");
  }
  if (!have_method) throw ParseError("mapping: missing method header");
  if (mapping.entries.size() != graph.sense_count()) {
    for (const WordSense& sense : graph.senses())
      if (!mapping.entries.contains(sense.key))
        throw ValidationError("mapping is not total: no entry for " + sense.key);
    throw ValidationError("mapping is not total");
  }
  return mapping;
}

inline SenseMapping load_mapping(const std::filesystem::path& path,
                                 const WordNetGraph& graph) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return load_mapping(in, graph);
}

// ------------------------------------------------------------ decompress

// All sense keys of (lemma, pos) that the mapping sends to `tag`, in sense
// number order. The mapping must cover the word's senses.
inline std::vector<std::string> decompress(const SenseMapping& mapping,
                                           const WordNetGraph& graph,
                                           std::string_view lemma, Pos pos,
                                           std::string_view tag) {
  std::vector<std::string> keys;
  for (std::uint32_t sidx : graph.senses_of(lemma, pos)) {
    const WordSense& sense = graph.sense(sidx);
    const std::string* t = mapping.tag_of(sense.key);
    if (!t)
      throw std::invalid_argument("mapping has no entry for " + sense.key);
    if (*t == tag) keys.push_back(sense.key);
  }
  return keys;
}

// ---------------------------------------------------------------- verify

struct MappingCollision {
  std::string lemma;
  Pos pos;
  std::string key_a, key_b;  // two senses of the word sharing a tag
  std::string tag;
};

struct VerifyReport {
  std::uint64_t missing = 0;  // graph senses without an entry
  std::uint64_t unknown = 0;  // entries whose key is not in the graph
  std::vector<MappingCollision> collisions;
  bool ok() const { return missing == 0 && unknown == 0 && collisions.empty(); }
};

// Checks totality and the discriminability invariant: within one (lemma,
// POS), distinct senses must keep distinct tags.
inline VerifyReport verify_mapping(const SenseMapping& mapping, const WordNetGraph& graph) {
  VerifyReport report;
  for (const auto& [key, tag] : mapping.entries)
    if (!graph.find_sense(key)) ++report.unknown;
  for (const WordSense& sense : graph.senses())
    if (!mapping.entries.contains(sense.key)) ++report.missing;

  for (const auto& entry : graph.lemma_entries()) {
    if (entry.sense_count < 2) continue;
    auto span = graph.senses_of(entry.lemma, entry.pos);
    std::map<std::string_view, std::uint32_t> first_with_tag;
    for (std::uint32_t sidx : span) {
      const WordSense& sense = graph.sense(sidx);
      const std::string* tag = mapping.tag_of(sense.key);
      if (!tag) continue;  // already counted as missing
      auto [it, inserted] = first_with_tag.emplace(*tag, sidx);
      if (!inserted)
        report.collisions.push_back({entry.lemma, entry.pos,
                                     graph.sense(it->second).key, sense.key,
                                     std::string(*tag)});
    }
  }
  return report;
}

}  // namespace sensevoc
