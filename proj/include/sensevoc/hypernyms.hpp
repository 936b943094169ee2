#pragma once

// Hypernym-based compression. Step 1 marks the synsets that are necessary to
// keep some word's senses apart; step 2 maps every sense to its nearest
// marked ancestor-or-self (falling back to the deepest root above it) and
// then verifies and repairs per-word discriminability.

#include "mapping.hpp"
#include "wordnet.hpp"

#include <map>

namespace sensevoc {

struct HypernymConfig {
  bool include_instance_hypernyms = true;
};

namespace detail {

inline void hypernym_parents(const WordNetGraph& graph, std::uint32_t synset,
                             const HypernymConfig& cfg, std::vector<std::uint32_t>& out) {
  out.clear();
  for (const Edge& e : graph.edges(synset))
    if (e.type == RelationType::hypernym ||
        (cfg.include_instance_hypernyms && e.type == RelationType::instance_hypernym))
      out.push_back(e.target);
}

// BFS distances from `start` through hypernym parents (start included at 0).
inline std::unordered_map<std::uint32_t, std::uint32_t> up_distances(
    const WordNetGraph& graph, std::uint32_t start, const HypernymConfig& cfg) {
  std::unordered_map<std::uint32_t, std::uint32_t> dist;
  std::vector<std::uint32_t> frontier{start}, next, parents;
  dist.emplace(start, 0);
  for (std::uint32_t d = 1; !frontier.empty(); ++d) {
    next.clear();
    for (std::uint32_t u : frontier) {
      hypernym_parents(graph, u, cfg, parents);
      for (std::uint32_t p : parents)
        if (dist.emplace(p, d).second) next.push_back(p);
    }
    frontier.swap(next);
  }
  return dist;
}

inline bool is_parent(const WordNetGraph& graph, std::uint32_t child,
                      std::uint32_t parent, const HypernymConfig& cfg) {
  for (const Edge& e : graph.edges(child))
    if (e.target == parent &&
        (e.type == RelationType::hypernym ||
         (cfg.include_instance_hypernyms && e.type == RelationType::instance_hypernym)))
      return true;
  return false;
}

// Nodes one step below `anc` on a shortest path from the endpoint whose
// distance map is `dist`; the endpoint itself when anc is the endpoint.
inline void children_toward(const WordNetGraph& graph,
                            const std::unordered_map<std::uint32_t, std::uint32_t>& dist,
                            std::uint32_t anc, std::uint32_t endpoint,
                            const HypernymConfig& cfg, std::vector<std::uint32_t>& out) {
  out.clear();
  std::uint32_t da = dist.at(anc);
  if (da == 0) {
    out.push_back(endpoint);
    return;
  }
  for (const auto& [node, d] : dist)
    if (d + 1 == da && is_parent(graph, node, anc, cfg)) out.push_back(node);
}

}  // namespace detail

// ------------------------------------------------- first common ancestor

struct CommonAncestor {
  SynsetId ancestor;
  SynsetId child_a;  // one step below the ancestor toward a (or a itself)
  SynsetId child_b;
  std::uint32_t distance_a = 0;
  std::uint32_t distance_b = 0;
};

// The common ancestor minimizing the summed hypernym distance from both
// synsets; ties go to the canonically smallest ancestor, then the smallest
// child on each side. Returns nothing when no common ancestor exists.
inline std::optional<CommonAncestor> first_common_ancestor(const WordNetGraph& graph,
                                                           SynsetId a, SynsetId b,
                                                           const HypernymConfig& cfg = {}) {
  auto ia = graph.find_synset(a), ib = graph.find_synset(b);
  if (!ia) throw std::invalid_argument("unknown synset id: " + a.text());
  if (!ib) throw std::invalid_argument("unknown synset id: " + b.text());
  if (a == b) throw std::invalid_argument("identical synsets: " + a.text());
  if (index_pos(a.pos) != index_pos(b.pos))
    throw std::invalid_argument("synsets differ in POS: " + a.text() + " vs " + b.text());

  auto da = detail::up_distances(graph, *ia, cfg);
  auto db = detail::up_distances(graph, *ib, cfg);

  constexpr std::uint64_t kNone = ~std::uint64_t{0};
  std::uint64_t best_sum = kNone;
  std::uint32_t best = 0;
  for (const auto& [node, d1] : da) {
    auto it = db.find(node);
    if (it == db.end()) continue;
    std::uint64_t sum = std::uint64_t{d1} + it->second;
    if (sum < best_sum || (sum == best_sum && node < best)) {
      best_sum = sum;
      best = node;
    }
  }
  if (best_sum == kNone) return std::nullopt;

  std::vector<std::uint32_t> kids;
  CommonAncestor result;
  result.ancestor = graph.synset(best).id;
  result.distance_a = da.at(best);
  result.distance_b = db.at(best);
  detail::children_toward(graph, da, best, *ia, cfg, kids);
  result.child_a = graph.synset(*std::min_element(kids.begin(), kids.end())).id;
  detail::children_toward(graph, db, best, *ib, cfg, kids);
  result.child_b = graph.synset(*std::min_element(kids.begin(), kids.end())).id;
  return result;
}

// ---------------------------------------------------------- ancestor path

struct AncestorPath {
  SynsetId start;
  std::vector<SynsetId> steps;  // successive hypernyms ending at the target
  std::uint32_t distance = 0;   // == steps.size()
};

// A shortest hypernym path from one synset up to another, ties broken toward
// canonically smaller intermediate synsets; nothing if `to` is unreachable.
inline std::optional<AncestorPath> ancestor_path(const WordNetGraph& graph, SynsetId from,
                                                 SynsetId to, const HypernymConfig& cfg = {}) {
  auto ifrom = graph.find_synset(from), ito = graph.find_synset(to);
  if (!ifrom) throw std::invalid_argument("unknown synset id: " + from.text());
  if (!ito) throw std::invalid_argument("unknown synset id: " + to.text());

  auto dist = detail::up_distances(graph, *ifrom, cfg);
  auto it = dist.find(*ito);
  if (it == dist.end()) return std::nullopt;

  AncestorPath path;
  path.start = from;
  path.distance = it->second;
  std::vector<std::uint32_t> chain(path.distance + 1);
  chain[path.distance] = *ito;
  for (std::uint32_t d = path.distance; d > 0; --d) {
    // the layer-(d-1) node below chain[d], canonically smallest
    std::uint32_t best = ~std::uint32_t{0};
    for (const auto& [node, nd] : dist)
      if (nd == d - 1 && node < best && detail::is_parent(graph, node, chain[d], cfg))
        best = node;
    chain[d - 1] = best;
  }
  for (std::uint32_t d = 1; d <= path.distance; ++d)
    path.steps.push_back(graph.synset(chain[d]).id);
  return path;
}

// --------------------------------------------------------------- marking

// The synsets no coarser tag may absorb, with the first (lemma, sense pair)
// that made each one necessary.
class NecessarySet {
public:
  struct Cause {
    std::string lemma;
    Pos pos;
    std::string key_a, key_b;
  };

  bool contains(std::uint32_t synset_idx) const { return marked_[synset_idx]; }
  bool contains(const WordNetGraph& graph, SynsetId id) const {
    auto idx = graph.find_synset(id);
    return idx && marked_[*idx];
  }
  std::size_t size() const { return count_; }
  const Cause* cause(std::uint32_t synset_idx) const {
    auto it = causes_.find(synset_idx);
    return it == causes_.end() ? nullptr : &it->second;
  }
  std::vector<std::uint32_t> marked() const {
    std::vector<std::uint32_t> out;
    out.reserve(count_);
    for (std::uint32_t i = 0; i < marked_.size(); ++i)
      if (marked_[i]) out.push_back(i);
    return out;
  }

private:
  friend NecessarySet mark_necessary(const WordNetGraph&, const HypernymConfig&);
  std::vector<bool> marked_;
  std::unordered_map<std::uint32_t, Cause> causes_;
  std::size_t count_ = 0;
};

// For every polysemous (lemma, POS) and every pair of its senses, marks the
// distinguishing synsets: the children one step below each minimal common
// ancestor toward both endpoints (every tied minimal ancestor contributes),
// or the two sense synsets themselves when no common ancestor exists.
inline NecessarySet mark_necessary(const WordNetGraph& graph,
                                   const HypernymConfig& cfg = {}) {
  NecessarySet set;
  set.marked_.assign(graph.synset_count(), false);

  auto mark = [&](std::uint32_t synset, const WordNetGraph::LemmaEntry& entry,
                  const WordSense& sa, const WordSense& sb) {
    if (set.marked_[synset]) return;
    set.marked_[synset] = true;
    ++set.count_;
    set.causes_.emplace(synset,
                        NecessarySet::Cause{entry.lemma, entry.pos, sa.key, sb.key});
  };

  std::vector<std::unordered_map<std::uint32_t, std::uint32_t>> dists;
  std::vector<std::uint32_t> kids;
  for (const auto& entry : graph.lemma_entries()) {
    if (entry.sense_count < 2) continue;
    auto span = graph.senses_of(entry.lemma, entry.pos);
    dists.clear();
    dists.reserve(span.size());
    for (std::uint32_t sidx : span)
      dists.push_back(detail::up_distances(graph, graph.sense(sidx).synset, cfg));

    for (std::size_t i = 0; i < span.size(); ++i) {
      for (std::size_t j = i + 1; j < span.size(); ++j) {
        const WordSense& sa = graph.sense(span[i]);
        const WordSense& sb = graph.sense(span[j]);
        const auto& da = dists[i];
        const auto& db = dists[j];

        std::uint64_t best_sum = ~std::uint64_t{0};
        for (const auto& [node, d1] : da) {
          auto it = db.find(node);
          if (it != db.end())
            best_sum = std::min(best_sum, std::uint64_t{d1} + it->second);
        }
        if (best_sum == ~std::uint64_t{0}) {
          mark(sa.synset, entry, sa, sb);
          mark(sb.synset, entry, sa, sb);
          continue;
        }
        for (const auto& [node, d1] : da) {
          auto it = db.find(node);
          if (it == db.end() || std::uint64_t{d1} + it->second != best_sum) continue;
          detail::children_toward(graph, da, node, sa.synset, cfg, kids);
          for (std::uint32_t k : kids) mark(k, entry, sa, sb);
          detail::children_toward(graph, db, node, sb.synset, cfg, kids);
          for (std::uint32_t k : kids) mark(k, entry, sa, sb);
        }
      }
    }
  }
  return set;
}

// ------------------------------------------------------------ compression

namespace detail {

// Remaps colliding senses to their own synsets until every word's senses are
// discriminable again; returns the number of entries rewritten. With full
// pair marking collisions should not arise, but the guarantee is enforced
// rather than assumed.
inline std::uint64_t enforce_discriminability(const WordNetGraph& graph,
                                              std::map<std::string, std::string>& entries,
                                              CompressionMethod method) {
  std::uint64_t repairs = 0;
  for (const auto& entry : graph.lemma_entries()) {
    if (entry.sense_count < 2) continue;
    auto span = graph.senses_of(entry.lemma, entry.pos);
    for (;;) {
      std::map<std::string_view, std::vector<std::uint32_t>> groups;
      for (std::uint32_t sidx : span)
        groups[entries.at(graph.sense(sidx).key)].push_back(sidx);
      bool changed = false;
      for (const auto& [tag, members] : groups) {
        if (members.size() < 2) continue;
        for (std::uint32_t sidx : members) {
          const WordSense& sense = graph.sense(sidx);
          std::string own = make_tag(method, graph.synset(sense.synset).id);
          auto& slot = entries.at(sense.key);
          if (slot != own) {
            slot = std::move(own);
            ++repairs;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
  }
  return repairs;
}

}  // namespace detail

// Maps every sense to its nearest necessary ancestor-or-self; senses with no
// necessary synset above them take the deepest root over them (their own
// synset when it has no hypernyms), then discriminability is re-verified.
inline SenseMapping compress_hypernymy(const WordNetGraph& graph,
                                       const HypernymConfig& cfg = {}) {
  NecessarySet marked = mark_necessary(graph, cfg);

  SenseMapping mapping;
  mapping.method = CompressionMethod::hypernymy;
  mapping.metadata.wordnet_version = graph.version_guess();

  std::vector<std::uint32_t> frontier, next, parents;
  std::unordered_map<std::uint32_t, std::uint32_t> dist;
  for (const WordSense& sense : graph.senses()) {
    dist.clear();
    frontier.assign(1, sense.synset);
    dist.emplace(sense.synset, 0);
    std::uint32_t target = ~std::uint32_t{0};

    for (std::uint32_t d = 1; !frontier.empty(); ++d) {
      for (std::uint32_t u : frontier)
        if (marked.contains(u) && u < target) target = u;
      if (target != ~std::uint32_t{0}) break;
      next.clear();
      for (std::uint32_t u : frontier) {
        detail::hypernym_parents(graph, u, cfg, parents);
        for (std::uint32_t p : parents)
          if (dist.emplace(p, d).second) next.push_back(p);
      }
      frontier.swap(next);
    }

    if (target == ~std::uint32_t{0}) {
      // deepest root above the sense (max BFS distance, then canonical id)
      std::uint32_t best_d = 0;
      for (const auto& [node, d] : dist) {
        detail::hypernym_parents(graph, node, cfg, parents);
        if (!parents.empty()) continue;
        if (target == ~std::uint32_t{0} || d > best_d ||
            (d == best_d && node < target)) {
          target = node;
          best_d = d;
        }
      }
    }
    mapping.entries.emplace(sense.key,
                            make_tag(mapping.method, graph.synset(target).id));
  }

  mapping.metadata.repairs =
      detail::enforce_discriminability(graph, mapping.entries, mapping.method);
  return mapping;
}

}  // namespace sensevoc
