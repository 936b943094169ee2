#pragma once

// WSD evaluation over compressed inventories: system coverage, first-sense
// and most-frequent-sense baselines, F1 scoring, and the key-file format.

#include "corpus.hpp"

#include <map>

namespace sensevoc {

// ------------------------------------------------------------- coverage

struct CoverageMiss {
  std::string instance_id;
  std::string lemma;
  std::optional<Pos> pos;
};

struct CoverageReport {
  std::uint64_t total_instances = 0;
  std::uint64_t covered = 0;
  std::vector<CoverageMiss> misses;
  double coverage_pct = 0.0;
  bool monosemic_backoff = false;
};

namespace detail {

inline const std::string& tag_of_checked(const SenseMapping& mapping,
                                         const std::string& key) {
  const std::string* tag = mapping.tag_of(key);
  if (!tag) throw std::invalid_argument("sense key not in mapping: " + key);
  return *tag;
}

}  // namespace detail

// An instance is covered when some sense of its (lemma, POS) carries a tag
// seen among the training annotations. With monosemic_backoff, monosemous
// words are covered regardless. Unknown words count as misses.
inline CoverageReport system_coverage(const Corpus& train, const Corpus& eval_corpus,
                                      const SenseMapping& mapping,
                                      const WordNetGraph& graph,
                                      bool monosemic_backoff = false) {
  std::set<std::string> observed = observed_tags(train, mapping);
  CoverageReport report;
  report.monosemic_backoff = monosemic_backoff;
  for (const auto& sentence : eval_corpus.sentences)
    for (const Token& token : sentence) {
      if (!token.annotated()) continue;
      ++report.total_instances;
      bool hit = false;
      if (!token.lemma.empty() && token.pos) {
        auto candidates = graph.senses_of(token.lemma, *token.pos);
        if (monosemic_backoff && candidates.size() == 1) hit = true;
        for (std::uint32_t sidx : candidates) {
          if (hit) break;
          hit = observed.contains(
              detail::tag_of_checked(mapping, graph.sense(sidx).key));
        }
      }
      if (hit)
        ++report.covered;
      else
        report.misses.push_back({token.instance_id, token.lemma, token.pos});
    }
  if (report.total_instances > 0)
    report.coverage_pct = 100.0 * static_cast<double>(report.covered) /
                          static_cast<double>(report.total_instances);
  return report;
}

// ------------------------------------------------------------- baselines

struct PredictionSet {
  std::map<std::string, std::vector<std::string>> predictions;  // id -> keys
  std::uint64_t backoff_used = 0;
};

namespace detail {

inline void add_prediction(PredictionSet& out, const Token& token,
                           std::vector<std::string> keys) {
  if (!out.predictions.emplace(token.instance_id, std::move(keys)).second)
    throw ValidationError("duplicate instance id: " + token.instance_id);
}

}  // namespace detail

// Predicts sense number one for every word the graph knows; unknown words
// are left unpredicted.
inline PredictionSet first_sense_predict(const Corpus& eval_corpus,
                                         const WordNetGraph& graph) {
  PredictionSet out;
  for (const auto& sentence : eval_corpus.sentences)
    for (const Token& token : sentence) {
      if (!token.annotated() || token.lemma.empty() || !token.pos) continue;
      auto candidates = graph.senses_of(token.lemma, *token.pos);
      if (candidates.empty()) continue;
      detail::add_prediction(out, token, {graph.sense(candidates.front()).key});
    }
  return out;
}

// Picks the candidate sense whose compressed tag was most frequent in the
// training annotations (ties fall to the lower sense number) and decompresses
// that tag back to keys. Words with no observed candidate either back off to
// the first sense or stay unpredicted.
inline PredictionSet mfs_predict(const Corpus& train, const Corpus& eval_corpus,
                                 const SenseMapping& mapping,
                                 const WordNetGraph& graph,
                                 bool backoff_first_sense = true) {
  std::unordered_map<std::string, std::uint64_t> tag_freq;
  for (const auto& sentence : train.sentences)
    for (const Token& token : sentence)
      for (const std::string& key : token.gold_keys)
        ++tag_freq[detail::tag_of_checked(mapping, key)];

  PredictionSet out;
  for (const auto& sentence : eval_corpus.sentences)
    for (const Token& token : sentence) {
      if (!token.annotated() || token.lemma.empty() || !token.pos) continue;
      auto candidates = graph.senses_of(token.lemma, *token.pos);
      if (candidates.empty()) continue;
      const WordSense* best = nullptr;
      std::uint64_t best_freq = 0;
      for (std::uint32_t sidx : candidates) {
        const WordSense& sense = graph.sense(sidx);
        auto it = tag_freq.find(detail::tag_of_checked(mapping, sense.key));
        if (it != tag_freq.end() && it->second > best_freq) {
          best = &sense;
          best_freq = it->second;
        }
      }
      if (best) {
        detail::add_prediction(
            out, token,
            decompress(mapping, graph, token.lemma, *token.pos,
                       detail::tag_of_checked(mapping, best->key)));
      } else if (backoff_first_sense) {
        detail::add_prediction(out, token, {graph.sense(candidates.front()).key});
        ++out.backoff_used;
      }
    }
  return out;
}

// ------------------------------------------------------------- scoring

struct GoldInstance {
  std::string id;
  std::string lemma;
  std::optional<Pos> pos;
  std::vector<std::string> keys;
};

struct PosScore {
  std::uint64_t total = 0;
  std::uint64_t attempted = 0;
  std::uint64_t correct = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct ScoreReport {
  std::uint64_t total = 0;
  std::uint64_t attempted = 0;
  std::uint64_t correct = 0;
  double precision = 0.0;  // percent
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t backoff_used = 0;
  bool zero_attempted = false;
  std::map<Pos, PosScore> per_pos;
};

namespace detail {

inline void finish_score(PosScore& s) {
  if (s.attempted > 0)
    s.precision = 100.0 * static_cast<double>(s.correct) / static_cast<double>(s.attempted);
  if (s.total > 0)
    s.recall = 100.0 * static_cast<double>(s.correct) / static_cast<double>(s.total);
  if (s.precision + s.recall > 0)
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
}

}  // namespace detail

// A prediction is correct when it shares at least one key with the gold set.
// Precision is over attempted instances, recall over all gold instances.
inline ScoreReport score_f1(const std::vector<GoldInstance>& gold,
                            const PredictionSet& preds) {
  std::unordered_map<std::string, const GoldInstance*> by_id;
  for (const GoldInstance& g : gold)
    if (!by_id.emplace(g.id, &g).second)
      throw ValidationError("duplicate gold instance id: " + g.id);

  ScoreReport report;
  report.total = gold.size();
  report.backoff_used = preds.backoff_used;
  PosScore overall;
  overall.total = gold.size();
  for (const GoldInstance& g : gold)
    if (g.pos) ++report.per_pos[*g.pos].total;

  for (const auto& [id, keys] : preds.predictions) {
    auto it = by_id.find(id);
    if (it == by_id.end())
      throw std::invalid_argument("prediction for unknown instance id: " + id);
    if (keys.empty()) continue;
    const GoldInstance& g = *it->second;
    ++overall.attempted;
    bool correct = std::any_of(keys.begin(), keys.end(), [&](const std::string& k) {
      return std::find(g.keys.begin(), g.keys.end(), k) != g.keys.end();
    });
    if (correct) ++overall.correct;
    if (g.pos) {
      PosScore& ps = report.per_pos[*g.pos];
      ++ps.attempted;
      if (correct) ++ps.correct;
    }
  }

  detail::finish_score(overall);
  report.attempted = overall.attempted;
  report.correct = overall.correct;
  report.precision = overall.precision;
  report.recall = overall.recall;
  report.f1 = overall.f1;
  report.zero_attempted = overall.attempted == 0;
  for (auto& [pos, ps] : report.per_pos) detail::finish_score(ps);
  return report;
}

// Gold instances of a corpus, in document order.
inline std::vector<GoldInstance> gold_instances(const Corpus& corpus) {
  std::vector<GoldInstance> gold;
  for (const auto& sentence : corpus.sentences)
    for (const Token& token : sentence)
      if (token.annotated())
        gold.push_back({token.instance_id, token.lemma, token.pos, token.gold_keys});
  return gold;
}

inline ScoreReport score_f1(const Corpus& corpus, const PredictionSet& preds) {
  return score_f1(gold_instances(corpus), preds);
}

// ------------------------------------------------------------- key files

// One instance per line: the id, then its keys, space-separated.

inline void write_key_file(std::ostream& out, const PredictionSet& preds) {
  for (const auto& [id, keys] : preds.predictions) {
    if (keys.empty()) continue;
    out << id;
    for (const std::string& k : keys) out << ' ' << k;
    out << '\n';
  }
}

inline PredictionSet read_key_file(std::istream& in, const std::string& name) {
  PredictionSet preds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto context = name + " line " + std::to_string(line_no);
    std::istringstream fields(line);
    std::string id;
    fields >> id;
    std::vector<std::string> keys;
    for (std::string k; fields >> k;) keys.push_back(std::move(k));
    if (keys.empty()) throw ParseError(context + ": no keys after instance id");
    if (!preds.predictions.emplace(std::move(id), std::move(keys)).second)
      throw ParseError(context + ": duplicate instance id");
  }
  return preds;
}

inline PredictionSet read_key_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_key_file(in, path.filename().string());
}

// Reinterprets a key file as gold instances, recovering each instance's
// lemma and POS from its first key.
inline std::vector<GoldInstance> gold_from_key_file(const PredictionSet& preds) {
  std::vector<GoldInstance> gold;
  for (const auto& [id, keys] : preds.predictions) {
    GoldInstance g{id, {}, std::nullopt, keys};
    const std::string& first = keys.front();
    std::size_t percent = first.find('%');
    if (percent == std::string::npos || percent + 1 >= first.size())
      throw ParseError("malformed sense key '" + first + "' for instance " + id);
    auto pos = pos_from_key_digit(first[percent + 1]);
    if (!pos) throw ParseError("malformed sense key '" + first + "' for instance " + id);
    g.lemma = detail::ascii_lower(first.substr(0, percent));
    g.pos = index_pos(*pos);
    gold.push_back(std::move(g));
  }
  return gold;
}

}  // namespace sensevoc
