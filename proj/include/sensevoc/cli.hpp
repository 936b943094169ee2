#pragma once

// Subcommand front end: compress, stats, coverage, score, baseline, verify.
// Data rows go to the output stream as TSV under a '#' header; everything
// diagnostic goes to the error stream. Exit code 0 means no errors.

#include "clusters.hpp"
#include "eval.hpp"
#include "hypernyms.hpp"

#include <CLI11.hpp>

#include <cstdio>

namespace sensevoc::cli {

namespace detail {

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Rows carry the same method names the --method flag accepts.
constexpr std::string_view cli_method_name(CompressionMethod m) {
  switch (m) {
    case CompressionMethod::synonymy: return "synonyms";
    case CompressionMethod::hypernymy: return "hypernyms";
    case CompressionMethod::all_relations: return "all-relations";
  }
  return "?";
}

inline CorpusFormat corpus_format(const std::filesystem::path& path,
                                  const std::string& override_name) {
  if (override_name == "ufsac-xml") return CorpusFormat::ufsac_xml;
  if (override_name == "tsv") return CorpusFormat::tsv;
  return path.extension() == ".xml" ? CorpusFormat::ufsac_xml : CorpusFormat::tsv;
}

// Parses and resolves a corpus; lenient resolution reports dropped keys.
inline Corpus load_corpus(const std::filesystem::path& path, const std::string& format,
                          const WordNetGraph& graph, bool strict, std::ostream& err) {
  Corpus corpus = parse_corpus(path, corpus_format(path, format));
  std::size_t dropped = resolve_keys(corpus, graph, strict);
  if (dropped > 0)
    err << "note: " << corpus.name << ": dropped " << dropped
        << " unresolvable gold keys\n";
  return corpus;
}

inline SenseMapping load_mapping_file(const std::filesystem::path& path,
                                      const WordNetGraph& graph) {
  return load_mapping(path, graph);
}

inline void print_mapping_row(std::ostream& out, const SenseMapping& mapping) {
  MappingStats stats = mapping_stats(mapping);
  out << "# method\tsenses\tvocabulary\tcompression_pct\tmean_senses_per_tag\n"
      << cli_method_name(mapping.method) << '\t' << stats.sense_count << '\t'
      << stats.vocabulary_size << '\t' << fmt2(100.0 * stats.compression_rate)
      << '\t' << fmt2(stats.mean_senses_per_tag) << '\n';
}

struct CompressOpts {
  std::string dict;
  std::string method;
  std::string output;
  std::string merge_log;
  std::vector<std::string> relations;
  std::optional<std::uint64_t> max_steps;
  std::optional<std::uint64_t> seed;
  bool no_instance_hypernyms = false;
  bool strict_cross_pos = false;
};

inline int run_compress(const CompressOpts& o, std::ostream& out, std::ostream& err) {
  auto only_with = [&](bool given, const char* flag, const char* method) {
    if (given && o.method != method)
      throw std::invalid_argument(std::string(flag) + " is only valid with --method " +
                                  method);
  };
  only_with(o.seed.has_value(), "--seed", "all-relations");
  only_with(o.max_steps.has_value(), "--max-steps", "all-relations");
  only_with(!o.relations.empty(), "--relations", "all-relations");
  only_with(!o.merge_log.empty(), "--merge-log", "all-relations");
  only_with(o.strict_cross_pos, "--strict-cross-pos", "all-relations");
  only_with(o.no_instance_hypernyms, "--no-instance-hypernyms", "hypernyms");

  WordNetGraph graph = parse_wordnet(o.dict);
  SenseMapping mapping;
  if (o.method == "synonyms") {
    mapping = compress_synonymy(graph);
  } else if (o.method == "hypernyms") {
    HypernymConfig cfg;
    cfg.include_instance_hypernyms = !o.no_instance_hypernyms;
    mapping = compress_hypernymy(graph, cfg);
    if (mapping.metadata.repairs.value_or(0) > 0)
      err << "note: " << *mapping.metadata.repairs
          << " senses repaired to stay discriminable\n";
  } else {
    ClusterConfig cfg;
    if (!o.relations.empty()) {
      RelationFilter filter = RelationFilter::none();
      for (const std::string& name : o.relations) {
        auto type = relation_from_name(name);
        if (!type) throw std::invalid_argument("unknown relation name: " + name);
        filter.set(*type);
      }
      cfg.relations = filter;
    }
    cfg.max_steps = o.max_steps;
    cfg.seed = o.seed;
    cfg.strict_cross_pos = o.strict_cross_pos;
    auto [m, set] = compress_all_relations(graph, cfg);
    mapping = std::move(m);
    err << "note: " << set.step_count << " merges, "
        << set.clusters.size() << " clusters\n";
    if (!o.merge_log.empty()) write_merge_log(std::filesystem::path(o.merge_log), set);
  }

  if (!o.output.empty()) save_mapping(mapping, o.output);
  print_mapping_row(out, mapping);
  return 0;
}

struct StatsOpts {
  std::string dict;
  std::string mapping;
  std::string corpus;
  std::string format;
  bool strict = false;
};

inline int run_stats(const StatsOpts& o, std::ostream& out, std::ostream& err) {
  if (!o.corpus.empty()) {
    if (o.dict.empty())
      throw std::invalid_argument("--corpus statistics require --dict");
    WordNetGraph graph = parse_wordnet(o.dict);
    Corpus corpus = load_corpus(o.corpus, o.format, graph, o.strict, err);
    std::size_t distinct = corpus.gold_key_set().size();
    if (!o.mapping.empty()) {
      SenseMapping mapping = load_mapping_file(o.mapping, graph);
      std::size_t observed = observed_tags(corpus, mapping).size();
      out << "# corpus\tmethod\tsentences\ttokens\tannotated\tdistinct_keys\t"
             "vocabulary\tobserved_tags\tinventory_coverage_pct\n"
          << corpus.name << '\t' << cli_method_name(mapping.method) << '\t'
          << corpus.sentences.size() << '\t' << corpus.token_count() << '\t'
          << corpus.annotated_count() << '\t' << distinct << '\t'
          << mapping_stats(mapping).vocabulary_size << '\t' << observed << '\t'
          << fmt2(100.0 * inventory_coverage(corpus, mapping)) << '\n';
    } else {
      double coverage = graph.sense_count()
                            ? static_cast<double>(distinct) /
                                  static_cast<double>(graph.sense_count())
                            : 0.0;
      out << "# corpus\tmethod\tsentences\ttokens\tannotated\tdistinct_keys\t"
             "sense_count\tinventory_coverage_pct\n"
          << corpus.name << "\tnone\t" << corpus.sentences.size() << '\t'
          << corpus.token_count() << '\t' << corpus.annotated_count() << '\t'
          << distinct << '\t' << graph.sense_count() << '\t'
          << fmt2(100.0 * coverage) << '\n';
    }
    return 0;
  }
  if (!o.mapping.empty()) {
    if (o.dict.empty())
      throw std::invalid_argument("--mapping statistics require --dict");
    WordNetGraph graph = parse_wordnet(o.dict);
    print_mapping_row(out, load_mapping_file(o.mapping, graph));
    return 0;
  }
  if (o.dict.empty())
    throw std::invalid_argument("stats needs --dict (optionally --mapping or --corpus)");
  WordNetGraph graph = parse_wordnet(o.dict);
  HierarchyStats h = hierarchy_stats(graph);
  out << "# senses\tsynsets\tpoly_noun_senses\tin_hierarchy\n"
      << graph.sense_count() << '\t' << graph.synset_count() << '\t'
      << h.polysemous_noun_senses << '\t' << h.in_hierarchy << '\n';
  return 0;
}

struct CoverageOpts {
  std::string dict, train, eval, mapping;
  std::string train_format, eval_format;
  bool backoff = false;
  bool misses = false;
  bool strict = false;
};

inline int run_coverage(const CoverageOpts& o, std::ostream& out, std::ostream& err) {
  WordNetGraph graph = parse_wordnet(o.dict);
  SenseMapping mapping = load_mapping_file(o.mapping, graph);
  Corpus train = load_corpus(o.train, o.train_format, graph, o.strict, err);
  Corpus eval_corpus = load_corpus(o.eval, o.eval_format, graph, o.strict, err);
  CoverageReport report = system_coverage(train, eval_corpus, mapping, graph, o.backoff);
  out << "# train\teval\tmethod\ttotal\tcovered\tcoverage_pct\tmonosemic_backoff\n"
      << train.name << '\t' << eval_corpus.name << '\t'
      << cli_method_name(mapping.method) << '\t' << report.total_instances << '\t'
      << report.covered << '\t' << fmt2(report.coverage_pct) << '\t'
      << (report.monosemic_backoff ? "yes" : "no") << '\n';
  if (o.misses) {
    out << "# miss\tinstance\tlemma\tpos\n";
    for (const CoverageMiss& m : report.misses)
      out << "miss\t" << m.instance_id << '\t' << m.lemma << '\t'
          << (m.pos ? std::string(1, pos_letter(*m.pos)) : std::string("?")) << '\n';
  }
  return 0;
}

struct ScoreOpts {
  std::string gold, pred;
  bool per_pos = false;
};

inline int run_score(const ScoreOpts& o, std::ostream& out, std::ostream& err) {
  std::vector<GoldInstance> gold = gold_from_key_file(read_key_file(o.gold));
  PredictionSet preds = read_key_file(o.pred);
  ScoreReport r = score_f1(gold, preds);
  if (r.zero_attempted) err << "warning: no predictions were scored\n";
  out << "# total\tattempted\tcorrect\tprecision\trecall\tf1\tbackoff_used\n"
      << r.total << '\t' << r.attempted << '\t' << r.correct << '\t'
      << fmt2(r.precision) << '\t' << fmt2(r.recall) << '\t' << fmt2(r.f1) << '\t'
      << r.backoff_used << '\n';
  if (o.per_pos) {
    out << "# pos\ttotal\tattempted\tcorrect\tprecision\trecall\tf1\n";
    for (const auto& [pos, s] : r.per_pos)
      out << pos_name(pos) << '\t' << s.total << '\t' << s.attempted << '\t'
          << s.correct << '\t' << fmt2(s.precision) << '\t' << fmt2(s.recall)
          << '\t' << fmt2(s.f1) << '\n';
  }
  return 0;
}

struct BaselineOpts {
  std::string method;  // first-sense | mfs
  std::string dict, train, eval, mapping, output;
  std::string train_format, eval_format;
  bool no_backoff = false;
  bool strict = false;
};

inline int run_baseline(const BaselineOpts& o, std::ostream& out, std::ostream& err) {
  if (o.method == "first-sense") {
    if (!o.train.empty() || !o.mapping.empty() || o.no_backoff)
      throw std::invalid_argument(
          "--train/--mapping/--no-backoff are only valid with --method mfs");
  } else {
    if (o.train.empty() || o.mapping.empty())
      throw std::invalid_argument("--method mfs needs --train and --mapping");
  }
  WordNetGraph graph = parse_wordnet(o.dict);
  Corpus eval_corpus = load_corpus(o.eval, o.eval_format, graph, o.strict, err);
  PredictionSet preds;
  if (o.method == "first-sense") {
    preds = first_sense_predict(eval_corpus, graph);
  } else {
    SenseMapping mapping = load_mapping_file(o.mapping, graph);
    Corpus train = load_corpus(o.train, o.train_format, graph, o.strict, err);
    preds = mfs_predict(train, eval_corpus, mapping, graph, !o.no_backoff);
    if (preds.backoff_used > 0)
      err << "note: first-sense backoff used for " << preds.backoff_used
          << " instances\n";
  }
  if (o.output.empty()) {
    write_key_file(out, preds);
  } else {
    std::ofstream file(o.output, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + o.output);
    write_key_file(file, preds);
  }
  return 0;
}

struct VerifyOpts {
  std::string dict, mapping;
};

inline int run_verify(const VerifyOpts& o, std::ostream& out, std::ostream& err) {
  WordNetGraph graph = parse_wordnet(o.dict);
  SenseMapping mapping = load_mapping_file(o.mapping, graph);
  VerifyReport report = verify_mapping(mapping, graph);
  out << "# method\tentries\tmissing\tunknown\tcollisions\tok\n"
      << cli_method_name(mapping.method) << '\t' << mapping.entries.size() << '\t'
      << report.missing << '\t' << report.unknown << '\t'
      << report.collisions.size() << '\t' << (report.ok() ? "yes" : "no") << '\n';
  std::size_t shown = 0;
  for (const MappingCollision& c : report.collisions) {
    if (shown == 10) {
      err << "... and " << report.collisions.size() - shown << " more collisions\n";
      break;
    }
    err << "collision: " << c.lemma << " (" << pos_letter(c.pos) << ") " << c.key_a
        << " / " << c.key_b << " -> " << c.tag << '\n';
    ++shown;
  }
  return report.ok() ? 0 : 1;
}

}  // namespace detail

// Runs one subcommand; args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"sense vocabulary compression toolkit", "sensevoc"};
  app.require_subcommand(1);

  const std::string format_help = "corpus format: ufsac-xml or tsv (default: by extension)";
  auto add_format = [&](CLI::App* cmd, const char* flag, std::string& target) {
    cmd->add_option(flag, target, format_help)
        ->check(CLI::IsMember({"ufsac-xml", "tsv"}));
  };

  detail::CompressOpts compress;
  CLI::App* compress_cmd =
      app.add_subcommand("compress", "build a sense mapping from a WordNet database");
  compress_cmd->add_option("--dict", compress.dict, "WordNet database directory")
      ->required();
  compress_cmd->add_option("--method", compress.method, "compression method")
      ->required()
      ->check(CLI::IsMember({"synonyms", "hypernyms", "all-relations"}));
  compress_cmd->add_option("--output", compress.output, "mapping file to write");
  compress_cmd->add_option("--relations", compress.relations,
                           "relation names to cluster over (all-relations)")
      ->delimiter(',');
  compress_cmd->add_option("--max-steps", compress.max_steps,
                           "stop after this many merges (all-relations)");
  compress_cmd->add_option("--seed", compress.seed,
                           "candidate-ordering seed (all-relations)");
  compress_cmd->add_option("--merge-log", compress.merge_log,
                           "write the merge log here (all-relations)");
  compress_cmd->add_flag("--strict-cross-pos", compress.strict_cross_pos,
                         "forbid clusters sharing a lemma across POS (all-relations)");
  compress_cmd->add_flag("--no-instance-hypernyms", compress.no_instance_hypernyms,
                         "ignore instance hypernyms (hypernyms)");

  detail::StatsOpts stats;
  CLI::App* stats_cmd =
      app.add_subcommand("stats", "inventory, mapping, or corpus statistics");
  stats_cmd->add_option("--dict", stats.dict, "WordNet database directory");
  stats_cmd->add_option("--mapping", stats.mapping, "mapping file");
  stats_cmd->add_option("--corpus", stats.corpus, "annotated corpus file");
  add_format(stats_cmd, "--format", stats.format);
  stats_cmd->add_flag("--strict", stats.strict, "reject unresolvable gold keys");

  detail::CoverageOpts coverage;
  CLI::App* coverage_cmd =
      app.add_subcommand("coverage", "system coverage of an eval corpus");
  coverage_cmd->add_option("--dict", coverage.dict, "WordNet database directory")
      ->required();
  coverage_cmd->add_option("--train", coverage.train, "training corpus")->required();
  coverage_cmd->add_option("--eval", coverage.eval, "evaluation corpus")->required();
  coverage_cmd->add_option("--mapping", coverage.mapping, "mapping file")->required();
  add_format(coverage_cmd, "--train-format", coverage.train_format);
  add_format(coverage_cmd, "--eval-format", coverage.eval_format);
  coverage_cmd->add_flag("--backoff", coverage.backoff,
                         "count monosemous words as covered");
  coverage_cmd->add_flag("--misses", coverage.misses, "list uncovered instances");
  coverage_cmd->add_flag("--strict", coverage.strict, "reject unresolvable gold keys");

  detail::ScoreOpts score;
  CLI::App* score_cmd = app.add_subcommand("score", "F1 of predictions against gold");
  score_cmd->add_option("--gold", score.gold, "gold key file")->required();
  score_cmd->add_option("--pred", score.pred, "prediction key file")->required();
  score_cmd->add_flag("--per-pos", score.per_pos, "append a per-POS breakdown");

  detail::BaselineOpts baseline;
  CLI::App* baseline_cmd =
      app.add_subcommand("baseline", "first-sense or MFS predictions as a key file");
  baseline_cmd->add_option("--method", baseline.method, "baseline method")
      ->required()
      ->check(CLI::IsMember({"first-sense", "mfs"}));
  baseline_cmd->add_option("--dict", baseline.dict, "WordNet database directory")
      ->required();
  baseline_cmd->add_option("--eval", baseline.eval, "evaluation corpus")->required();
  baseline_cmd->add_option("--train", baseline.train, "training corpus (mfs)");
  baseline_cmd->add_option("--mapping", baseline.mapping, "mapping file (mfs)");
  baseline_cmd->add_option("--output", baseline.output,
                           "prediction file (default: standard output)");
  add_format(baseline_cmd, "--train-format", baseline.train_format);
  add_format(baseline_cmd, "--eval-format", baseline.eval_format);
  baseline_cmd->add_flag("--no-backoff", baseline.no_backoff,
                         "leave unobserved words unpredicted (mfs)");
  baseline_cmd->add_flag("--strict", baseline.strict, "reject unresolvable gold keys");

  detail::VerifyOpts verify;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "check a mapping for totality and collisions");
  verify_cmd->add_option("--dict", verify.dict, "WordNet database directory")
      ->required();
  verify_cmd->add_option("--mapping", verify.mapping, "mapping file")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("sensevoc");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (compress_cmd->parsed()) return detail::run_compress(compress, out, err);
    if (stats_cmd->parsed()) return detail::run_stats(stats, out, err);
    if (coverage_cmd->parsed()) return detail::run_coverage(coverage, out, err);
    if (score_cmd->parsed()) return detail::run_score(score, out, err);
    if (baseline_cmd->parsed()) return detail::run_baseline(baseline, out, err);
    if (verify_cmd->parsed()) return detail::run_verify(verify, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sensevoc::cli
