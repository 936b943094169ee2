#pragma once

// Agglomerative synset clustering over every relation type, with the per-word
// discriminability constraint checked before each merge. Smallest cluster
// first, candidates smallest first, first legal candidate wins.

#include "mapping.hpp"
#include "wordnet.hpp"

#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <span>

namespace sensevoc {

struct ClusterConfig {
  RelationFilter relations = RelationFilter::all();
  std::optional<std::uint64_t> max_steps;
  // Forbid clusters holding two senses of one lemma even across POS.
  bool strict_cross_pos = false;
  // Permutes the id order used for tie-breaking; output stays deterministic
  // for a fixed seed. Unset means canonical id order.
  std::optional<std::uint64_t> seed;
};

struct MergeRecord {
  std::uint64_t step = 0;  // 1-based
  SynsetId cluster_a;      // canonical id of the initiating (smallest) cluster
  SynsetId cluster_b;      // canonical id of the absorbed candidate
  RelationType relation = RelationType::hypernym;

  friend bool operator==(const MergeRecord&, const MergeRecord&) = default;
};

struct Cluster {
  SynsetId id;  // smallest member
  std::vector<SynsetId> members;
  std::vector<std::pair<std::string, Pos>> lemma_set;  // index POS, sorted
};

struct ClusterSet {
  std::vector<Cluster> clusters;  // sorted by id, covering every synset
  std::uint64_t step_count = 0;
  std::vector<MergeRecord> merge_log;
};

// True when no word has senses in both clusters.
inline bool merge_allowed(const Cluster& a, const Cluster& b) {
  auto i = a.lemma_set.begin();
  auto j = b.lemma_set.begin();
  while (i != a.lemma_set.end() && j != b.lemma_set.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else return false;
  }
  return true;
}

struct ClusterStats {
  std::size_t cluster_count = 0;
  double mean_senses_per_cluster = 0.0;
  std::map<std::size_t, std::size_t> size_histogram;  // member count → clusters
};

inline ClusterStats cluster_stats(const ClusterSet& set) {
  ClusterStats stats;
  stats.cluster_count = set.clusters.size();
  std::size_t senses = 0;
  for (const Cluster& c : set.clusters) {
    senses += c.lemma_set.size();
    ++stats.size_histogram[c.members.size()];
  }
  if (!set.clusters.empty())
    stats.mean_senses_per_cluster =
        static_cast<double>(senses) / static_cast<double>(stats.cluster_count);
  return stats;
}

namespace detail {

// Uniform draw in [0, bound) by rejection, so permutations do not depend on
// the platform's distribution implementation.
inline std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t bound) {
  std::uint64_t x, r;
  do {
    x = rng();
    r = x % bound;
  } while (x - r > std::uint64_t{0} - bound);
  return r;
}

inline std::vector<std::uint32_t> id_permutation(std::size_t n,
                                                 std::optional<std::uint64_t> seed) {
  std::vector<std::uint32_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
  if (seed && n > 1) {
    std::mt19937_64 rng(*seed);
    for (std::size_t i = n - 1; i > 0; --i)
      std::swap(perm[i], perm[bounded_rand(rng, i + 1)]);
  }
  return perm;
}

// Ids for the (lemma, POS) pairs that could ever collide: only words with
// two or more senses matter for the constraint.
inline std::vector<std::vector<std::uint32_t>> polysemous_lemma_ids(
    const WordNetGraph& graph, bool strict_cross_pos) {
  std::vector<std::vector<std::uint32_t>> per_synset(graph.synset_count());
  const auto& entries = graph.lemma_entries();
  std::uint32_t next_id = 0;
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t j = i + 1;
    if (strict_cross_pos)
      while (j < entries.size() && entries[j].lemma == entries[i].lemma) ++j;
    std::size_t total = 0;
    for (std::size_t k = i; k < j; ++k) total += entries[k].sense_count;
    if (total >= 2) {
      std::uint32_t id = next_id++;
      for (std::size_t k = i; k < j; ++k)
        for (std::uint32_t s : graph.senses_of(entries[k].lemma, entries[k].pos))
          per_synset[graph.sense(s).synset].push_back(id);
    }
    i = j;
  }
  return per_synset;
}

class UnionFind {
public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<std::uint32_t>(i);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void attach(std::uint32_t child_root, std::uint32_t new_root) {
    parent_[child_root] = new_root;
  }

private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace detail

inline std::pair<SenseMapping, ClusterSet> compress_all_relations(
    const WordNetGraph& graph, const ClusterConfig& config = {}) {
  const std::size_t n = graph.synset_count();
  const auto perm = detail::id_permutation(n, config.seed);

  detail::UnionFind uf(n);
  std::vector<std::uint32_t> size(n, 1);          // member synsets per root
  std::vector<std::uint32_t> min_perm = perm;     // ordering key per root
  std::vector<std::uint32_t> min_canon(n);        // smallest member index per root
  for (std::size_t i = 0; i < n; ++i) min_canon[i] = static_cast<std::uint32_t>(i);

  std::vector<std::unordered_set<std::uint32_t>> lemmas(n);
  {
    auto per_synset = detail::polysemous_lemma_ids(graph, config.strict_cross_pos);
    for (std::size_t i = 0; i < n; ++i)
      lemmas[i].insert(per_synset[i].begin(), per_synset[i].end());
  }

  // Symmetric cluster adjacency: neighbor root → bitmask of relation types.
  // Entries may hold stale roots; reads canonicalize through the union-find.
  std::vector<std::unordered_map<std::uint32_t, std::uint32_t>> adj(n);
  for (std::uint32_t i = 0; i < n; ++i)
    for (const Edge& e : graph.edges(i))
      if (config.relations.contains(e.type) && e.target != i) {
        std::uint32_t bit = std::uint32_t{1} << static_cast<int>(e.type);
        adj[i][e.target] |= bit;
        adj[e.target][i] |= bit;
      }

  auto order_key = [&](std::uint32_t root) {
    return (std::uint64_t{size[root]} << 32) | min_perm[root];
  };

  // Clusters still eligible to initiate a merge, smallest first. A cluster
  // whose every candidate fails the constraint can never merge again until
  // someone absorbs it, so it leaves the queue for good.
  std::set<std::pair<std::uint64_t, std::uint32_t>> alive;
  for (std::uint32_t i = 0; i < n; ++i) alive.emplace(order_key(i), i);

  std::vector<MergeRecord> log;
  std::uint64_t steps = 0;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> candidates;

  while (!alive.empty() && (!config.max_steps || steps < *config.max_steps)) {
    const std::uint32_t x = alive.begin()->second;

    std::unordered_map<std::uint32_t, std::uint32_t> fresh;
    fresh.reserve(adj[x].size());
    for (const auto& [key, mask] : adj[x]) {
      std::uint32_t root = uf.find(key);
      if (root != x) fresh[root] |= mask;
    }
    adj[x] = std::move(fresh);

    candidates.clear();
    for (const auto& [root, mask] : adj[x]) candidates.emplace_back(order_key(root), root);
    std::sort(candidates.begin(), candidates.end());

    std::uint32_t chosen = 0;
    bool merged = false;
    for (const auto& [key, y] : candidates) {
      const auto& small = lemmas[x].size() <= lemmas[y].size() ? lemmas[x] : lemmas[y];
      const auto& large = lemmas[x].size() <= lemmas[y].size() ? lemmas[y] : lemmas[x];
      bool disjoint = true;
      for (std::uint32_t id : small)
        if (large.contains(id)) {
          disjoint = false;
          break;
        }
      if (disjoint) {
        chosen = y;
        merged = true;
        break;
      }
    }

    if (!merged) {
      alive.erase(alive.begin());
      continue;
    }

    const std::uint32_t y = chosen;
    ++steps;
    log.push_back({steps, graph.synset(min_canon[x]).id, graph.synset(min_canon[y]).id,
                   static_cast<RelationType>(std::countr_zero(adj[x][y]))});

    alive.erase({order_key(x), x});
    alive.erase({order_key(y), y});

    const std::uint32_t w = size[x] >= size[y] ? x : y;  // union-find winner
    const std::uint32_t l = w == x ? y : x;
    uf.attach(l, w);
    size[w] += size[l];
    min_perm[w] = std::min(min_perm[x], min_perm[y]);
    min_canon[w] = std::min(min_canon[x], min_canon[y]);

    if (lemmas[l].size() > lemmas[w].size()) std::swap(lemmas[w], lemmas[l]);
    lemmas[w].insert(lemmas[l].begin(), lemmas[l].end());
    lemmas[l].clear();

    if (adj[l].size() > adj[w].size()) std::swap(adj[w], adj[l]);
    for (const auto& [key, mask] : adj[l])
      if (key != x && key != y) adj[w][key] |= mask;
    adj[l].clear();

    alive.emplace(order_key(w), w);
  }

  ClusterSet set;
  set.step_count = steps;
  set.merge_log = std::move(log);
  {
    std::vector<std::int32_t> slot(n, -1);
    for (std::uint32_t i = 0; i < n; ++i) {
      std::uint32_t root = uf.find(i);
      if (slot[root] < 0) {
        slot[root] = static_cast<std::int32_t>(set.clusters.size());
        set.clusters.emplace_back();
        set.clusters.back().id = graph.synset(i).id;
      }
      Cluster& c = set.clusters[slot[root]];
      c.members.push_back(graph.synset(i).id);
      for (std::uint32_t s : graph.synset(i).senses) {
        const WordSense& sense = graph.sense(s);
        c.lemma_set.emplace_back(sense.lemma, sense.pos);
      }
    }
    for (Cluster& c : set.clusters) std::sort(c.lemma_set.begin(), c.lemma_set.end());
  }

  SenseMapping mapping;
  mapping.method = CompressionMethod::all_relations;
  mapping.metadata.wordnet_version = graph.version_guess();
  mapping.metadata.steps = steps;
  mapping.metadata.seed = config.seed;
  for (const WordSense& sense : graph.senses())
    mapping.entries.emplace(
        sense.key,
        make_tag(mapping.method, graph.synset(min_canon[uf.find(sense.synset)]).id));
  return {std::move(mapping), std::move(set)};
}

inline void write_merge_log(std::ostream& out, const ClusterSet& set) {
  for (const MergeRecord& r : set.merge_log)
    out << r.step << '\t' << r.cluster_a.text() << '\t' << r.cluster_b.text() << '\t'
        << relation_name(r.relation) << '\n';
}

inline void write_merge_log(const std::filesystem::path& path, const ClusterSet& set) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  write_merge_log(out, set);
}

inline std::vector<MergeRecord> read_merge_log(std::istream& in) {
  std::vector<MergeRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto context = [&] { return "merge log line " + std::to_string(line_no) + ": "; };
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 4) throw ParseError(context() + "expected 4 tab-separated fields");
    MergeRecord r;
    try {
      std::size_t used = 0;
      r.step = std::stoull(fields[0], &used);
      if (used != fields[0].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ParseError(context() + "bad step '" + fields[0] + "'");
    }
    auto a = parse_synset_id(fields[1]);
    auto b = parse_synset_id(fields[2]);
    if (!a) throw ParseError(context() + "bad synset id '" + fields[1] + "'");
    if (!b) throw ParseError(context() + "bad synset id '" + fields[2] + "'");
    r.cluster_a = *a;
    r.cluster_b = *b;
    auto rel = relation_from_name(fields[3]);
    if (!rel) throw ParseError(context() + "unknown relation '" + fields[3] + "'");
    r.relation = *rel;
    records.push_back(std::move(r));
  }
  return records;
}

inline std::vector<MergeRecord> read_merge_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_merge_log(in);
}

// Re-applies a merge log to fresh singleton clusters, validating at each step
// that both ids name live clusters and that the merge keeps every word's
// senses apart. Relation annotations are trusted, not re-derived.
inline ClusterSet replay_merge_log(const WordNetGraph& graph,
                                   std::span<const MergeRecord> records,
                                   bool strict_cross_pos = false) {
  const std::size_t n = graph.synset_count();
  detail::UnionFind uf(n);
  std::vector<std::uint32_t> size(n, 1);
  std::vector<std::uint32_t> min_canon(n);
  for (std::size_t i = 0; i < n; ++i) min_canon[i] = static_cast<std::uint32_t>(i);
  std::vector<std::unordered_set<std::uint32_t>> lemmas(n);
  {
    auto per_synset = detail::polysemous_lemma_ids(graph, strict_cross_pos);
    for (std::size_t i = 0; i < n; ++i)
      lemmas[i].insert(per_synset[i].begin(), per_synset[i].end());
  }

  std::uint64_t expected_step = 0;
  for (const MergeRecord& r : records) {
    ++expected_step;
    auto context = [&] { return "merge log step " + std::to_string(expected_step) + ": "; };
    if (r.step != expected_step)
      throw ValidationError(context() + "out-of-order step " + std::to_string(r.step));
    auto ia = graph.find_synset(r.cluster_a);
    auto ib = graph.find_synset(r.cluster_b);
    if (!ia) throw ValidationError(context() + "unknown synset " + r.cluster_a.text());
    if (!ib) throw ValidationError(context() + "unknown synset " + r.cluster_b.text());
    std::uint32_t ra = uf.find(*ia);
    std::uint32_t rb = uf.find(*ib);
    if (ra == rb)
      throw ValidationError(context() + "both ids are in one cluster already");
    if (min_canon[ra] != *ia)
      throw ValidationError(context() + r.cluster_a.text() + " is not a cluster id");
    if (min_canon[rb] != *ib)
      throw ValidationError(context() + r.cluster_b.text() + " is not a cluster id");
    const auto& small = lemmas[ra].size() <= lemmas[rb].size() ? lemmas[ra] : lemmas[rb];
    const auto& large = lemmas[ra].size() <= lemmas[rb].size() ? lemmas[rb] : lemmas[ra];
    for (std::uint32_t id : small)
      if (large.contains(id))
        throw ValidationError(context() + "merge breaks sense discriminability");

    std::uint32_t w = size[ra] >= size[rb] ? ra : rb;
    std::uint32_t l = w == ra ? rb : ra;
    uf.attach(l, w);
    size[w] += size[l];
    min_canon[w] = std::min(min_canon[ra], min_canon[rb]);
    if (lemmas[l].size() > lemmas[w].size()) std::swap(lemmas[w], lemmas[l]);
    lemmas[w].insert(lemmas[l].begin(), lemmas[l].end());
    lemmas[l].clear();
  }

  ClusterSet set;
  set.step_count = records.size();
  set.merge_log.assign(records.begin(), records.end());
  std::vector<std::int32_t> slot(n, -1);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint32_t root = uf.find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<std::int32_t>(set.clusters.size());
      set.clusters.emplace_back();
      set.clusters.back().id = graph.synset(i).id;
    }
    Cluster& c = set.clusters[slot[root]];
    c.members.push_back(graph.synset(i).id);
    for (std::uint32_t s : graph.synset(i).senses) {
      const WordSense& sense = graph.sense(s);
      c.lemma_set.emplace_back(sense.lemma, sense.pos);
    }
  }
  for (Cluster& c : set.clusters) std::sort(c.lemma_set.begin(), c.lemma_set.end());
  return set;
}

}  // namespace sensevoc
