#include <sensevoc/clusters.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_wordnet.hpp"

using namespace sensevoc;
using svtest::WndbFixture;

namespace {

SynsetId nid(std::uint32_t off) { return SynsetId{Pos::noun, off}; }

std::vector<std::vector<std::uint32_t>> as_indices(const WordNetGraph& graph,
                                                   const ClusterSet& set) {
  std::vector<std::vector<std::uint32_t>> out;
  for (const Cluster& c : set.clusters) {
    std::vector<std::uint32_t> members;
    for (SynsetId id : c.members) members.push_back(*graph.find_synset(id));
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// physicist ← Albert_Einstein (instance), physicist → scientist → person
WndbFixture einstein_fixture() {
  WndbFixture fix;
  fix.add('n', 1, {"physicist"});
  fix.add('n', 2, {"Albert_Einstein"});
  fix.add('n', 3, {"scientist"});
  fix.add('n', 4, {"person"});
  fix.point('n', 2, "@i", 'n', 1);
  fix.point('n', 1, "@", 'n', 3);
  fix.point('n', 3, "@", 'n', 4);
  return fix;
}

// two senses of w, both tied to the same monosemous neighbor
WndbFixture blocked_fixture() {
  WndbFixture fix;
  fix.add('n', 10, {"w"});
  fix.add('n', 11, {"w"});
  fix.add('n', 12, {"v"});
  fix.point('n', 12, "@", 'n', 10);
  fix.point('n', 12, "@", 'n', 11);
  return fix;
}

}  // namespace

TEST_CASE("merging runs the chain down to one cluster", "[clusters]") {
  WordNetGraph graph = einstein_fixture().parse();
  auto [mapping, set] = compress_all_relations(graph);

  CHECK(set.step_count == 3);
  REQUIRE(set.clusters.size() == 1);
  CHECK(set.clusters[0].id == nid(1));
  CHECK(set.clusters[0].members ==
        std::vector<SynsetId>{nid(1), nid(2), nid(3), nid(4)});
  CHECK(set.clusters[0].lemma_set.size() == 4);

  REQUIRE(set.merge_log.size() == 3);
  CHECK(set.merge_log[0] ==
        MergeRecord{1, nid(1), nid(2), RelationType::instance_hypernym});
  CHECK(set.merge_log[1] == MergeRecord{2, nid(3), nid(4), RelationType::hypernym});
  CHECK(set.merge_log[2] == MergeRecord{3, nid(1), nid(3), RelationType::hypernym});

  CHECK(mapping.method == CompressionMethod::all_relations);
  CHECK(mapping.metadata.steps == 3);
  CHECK(*mapping.tag_of("albert_einstein%1:03:00::") == "clu:n#00000001");
  CHECK(*mapping.tag_of("person%1:03:00::") == "clu:n#00000001");
  CHECK(verify_mapping(mapping, graph).ok());

  auto stats = cluster_stats(set);
  CHECK(stats.cluster_count == 1);
  CHECK(stats.mean_senses_per_cluster == 4.0);
  CHECK(stats.size_histogram == std::map<std::size_t, std::size_t>{{4, 1}});
}

TEST_CASE("the constraint keeps senses of one word apart", "[clusters]") {
  WordNetGraph graph = blocked_fixture().parse();
  auto [mapping, set] = compress_all_relations(graph);

  CHECK(set.step_count == 1);
  CHECK(as_indices(graph, set) ==
        std::vector<std::vector<std::uint32_t>>{{0, 2}, {1}});
  REQUIRE(set.merge_log.size() == 1);
  CHECK(set.merge_log[0] == MergeRecord{1, nid(10), nid(12), RelationType::hypernym});

  CHECK(*mapping.tag_of("w%1:03:00::") == "clu:n#00000010");
  CHECK(*mapping.tag_of("w%1:03:01::") == "clu:n#00000011");
  CHECK(*mapping.tag_of("v%1:03:00::") == "clu:n#00000010");
  CHECK(verify_mapping(mapping, graph).ok());
}

TEST_CASE("a failing candidate falls through to the next one", "[clusters]") {
  WndbFixture fix;
  fix.add('n', 20, {"u"});
  fix.add('n', 21, {"u", "m"});
  fix.add('n', 22, {"k"});
  fix.point('n', 20, "!", 'n', 21);
  fix.point('n', 22, "@", 'n', 20);
  fix.point('n', 22, "@", 'n', 21);
  WordNetGraph graph = fix.parse();

  auto [mapping, set] = compress_all_relations(graph);
  CHECK(set.step_count == 1);
  REQUIRE(set.merge_log.size() == 1);
  // 21 sorts before 22 but shares the lemma u, so 22 wins the merge
  CHECK(set.merge_log[0] == MergeRecord{1, nid(20), nid(22), RelationType::hypernym});
  CHECK(*mapping.tag_of("u%1:03:00::") == "clu:n#00000020");
  CHECK(*mapping.tag_of("u%1:03:01::") == "clu:n#00000021");
  CHECK(*mapping.tag_of("m%1:03:00::") == "clu:n#00000021");
}

TEST_CASE("step limits and relation filters", "[clusters]") {
  WordNetGraph graph = einstein_fixture().parse();

  SECTION("max_steps caps the run") {
    ClusterConfig config;
    config.max_steps = 2;
    auto [mapping, set] = compress_all_relations(graph, config);
    CHECK(set.step_count == 2);
    CHECK(set.clusters.size() == 2);
    REQUIRE(set.merge_log.size() == 2);
    CHECK(set.merge_log[0].cluster_b == nid(2));
    CHECK(set.merge_log[1].cluster_b == nid(4));
    CHECK(mapping.metadata.steps == 2);
  }

  SECTION("max_steps zero leaves singletons") {
    ClusterConfig config;
    config.max_steps = 0;
    auto [mapping, set] = compress_all_relations(graph, config);
    CHECK(set.step_count == 0);
    CHECK(set.clusters.size() == graph.synset_count());
    CHECK(set.merge_log.empty());
    for (const auto& [key, tag] : mapping.entries) {
      const WordSense& sense = graph.sense(*graph.find_sense(key));
      CHECK(tag == make_tag(CompressionMethod::all_relations,
                            graph.synset(sense.synset).id));
    }
  }

  SECTION("an empty relation filter never merges") {
    ClusterConfig config;
    config.relations = RelationFilter::none();
    auto [mapping, set] = compress_all_relations(graph, config);
    CHECK(set.step_count == 0);
    CHECK(set.clusters.size() == 4);
  }

  SECTION("instance links can be filtered out") {
    ClusterConfig config;
    config.relations =
        RelationFilter::of({RelationType::hypernym, RelationType::hyponym});
    auto [mapping, set] = compress_all_relations(graph, config);
    CHECK(set.step_count == 2);
    CHECK(as_indices(graph, set) ==
          std::vector<std::vector<std::uint32_t>>{{0, 2, 3}, {1}});
    REQUIRE(set.merge_log.size() == 2);
    CHECK(set.merge_log[0] == MergeRecord{1, nid(1), nid(3), RelationType::hypernym});
    CHECK(set.merge_log[1] == MergeRecord{2, nid(4), nid(1), RelationType::hypernym});
  }
}

TEST_CASE("cross-POS senses merge unless the strict flag is set", "[clusters]") {
  WndbFixture fix;
  fix.add('n', 50, {"run"});
  fix.add('v', 60, {"run"});
  fix.point('v', 60, "+", 'n', 50);
  WordNetGraph graph = fix.parse();

  auto [loose_map, loose] = compress_all_relations(graph);
  CHECK(loose.step_count == 1);
  CHECK(*loose_map.tag_of("run%1:03:00::") == *loose_map.tag_of("run%2:30:00::"));
  CHECK(verify_mapping(loose_map, graph).ok());

  ClusterConfig strict_config;
  strict_config.strict_cross_pos = true;
  auto [strict_map, strict] = compress_all_relations(graph, strict_config);
  CHECK(strict.step_count == 0);
  CHECK(*strict_map.tag_of("run%1:03:00::") != *strict_map.tag_of("run%2:30:00::"));
}

TEST_CASE("merge_allowed matches recomputed lemma sets", "[clusters]") {
  WordNetGraph graph = svtest::mouse_prey_fixture().parse();
  ClusterConfig config;
  config.max_steps = 6;
  auto [mapping, set] = compress_all_relations(graph, config);

  for (const Cluster& a : set.clusters)
    for (const Cluster& b : set.clusters) {
      if (a.id == b.id) continue;
      std::set<std::pair<std::string, Pos>> sa, sb;
      for (SynsetId id : a.members)
        for (std::uint32_t s : graph.synset(*graph.find_synset(id)).senses)
          sa.emplace(graph.sense(s).lemma, graph.sense(s).pos);
      for (SynsetId id : b.members)
        for (std::uint32_t s : graph.synset(*graph.find_synset(id)).senses)
          sb.emplace(graph.sense(s).lemma, graph.sense(s).pos);
      std::vector<std::pair<std::string, Pos>> common;
      std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                            std::back_inserter(common));
      CHECK(merge_allowed(a, b) == common.empty());
    }
}

TEST_CASE("merge logs round-trip and replay", "[clusters]") {
  WordNetGraph graph = einstein_fixture().parse();
  auto [mapping, set] = compress_all_relations(graph);

  std::ostringstream out;
  write_merge_log(out, set);
  CHECK(out.str() ==
        "1\tn#00000001\tn#00000002\tinstance_hypernym\n"
        "2\tn#00000003\tn#00000004\thypernym\n"
        "3\tn#00000001\tn#00000003\thypernym\n");

  std::istringstream in(out.str());
  auto records = read_merge_log(in);
  CHECK(records == set.merge_log);

  ClusterSet replayed = replay_merge_log(graph, records);
  CHECK(replayed.step_count == set.step_count);
  CHECK(as_indices(graph, replayed) == as_indices(graph, set));
  REQUIRE(replayed.clusters.size() == 1);
  CHECK(replayed.clusters[0].lemma_set == set.clusters[0].lemma_set);

  SECTION("replay rejects out-of-order steps") {
    auto bad = records;
    std::swap(bad[0], bad[1]);
    CHECK_THROWS_AS(replay_merge_log(graph, bad), ValidationError);
  }

  SECTION("replay rejects a non-cluster id") {
    auto bad = records;
    bad[2].cluster_b = nid(4);  // absorbed at step 2, no longer canonical
    CHECK_THROWS_AS(replay_merge_log(graph, bad), ValidationError);
  }

  SECTION("replay rejects constraint violations") {
    WordNetGraph two = blocked_fixture().parse();
    std::vector<MergeRecord> bad{{1, nid(10), nid(11), RelationType::antonym}};
    CHECK_THROWS_AS(replay_merge_log(two, bad), ValidationError);
  }

  SECTION("reader rejects malformed lines") {
    std::istringstream short_line("1\tn#00000001\tn#00000002\n");
    CHECK_THROWS_AS(read_merge_log(short_line), ParseError);
    std::istringstream bad_step("one\tn#00000001\tn#00000002\thypernym\n");
    CHECK_THROWS_AS(read_merge_log(bad_step), ParseError);
    std::istringstream bad_rel("1\tn#00000001\tn#00000002\tfriend_of\n");
    CHECK_THROWS_AS(read_merge_log(bad_rel), ParseError);
  }
}

TEST_CASE("cluster runs match the naive reference", "[clusters]") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    DYNAMIC_SECTION("seed " << seed) {
      WordNetGraph graph = svtest::random_fixture(seed).parse();
      ClusterConfig config;
      if (seed % 3 == 1) config.seed = seed * 17;
      if (seed % 4 == 2) config.strict_cross_pos = true;
      if (seed % 5 == 3)
        config.relations = RelationFilter::of(
            {RelationType::hypernym, RelationType::hyponym, RelationType::antonym,
             RelationType::derivationally_related});

      auto [mapping, set] = compress_all_relations(graph, config);
      auto naive = svtest::naive_all_relations(graph, config);

      CHECK(set.step_count == naive.steps);
      CHECK(set.merge_log == naive.log);
      CHECK(as_indices(graph, set) == naive.clusters);
      CHECK(set.clusters.size() == graph.synset_count() - set.step_count);
      CHECK(verify_mapping(mapping, graph).ok());
    }
  }
}

TEST_CASE("seeded runs are deterministic, seeds change the order", "[clusters]") {
  WordNetGraph graph = svtest::random_fixture(99).parse();

  ClusterConfig seeded;
  seeded.seed = 7;
  auto [map_a, set_a] = compress_all_relations(graph, seeded);
  auto [map_b, set_b] = compress_all_relations(graph, seeded);
  CHECK(map_a.entries == map_b.entries);
  CHECK(set_a.merge_log == set_b.merge_log);
  CHECK(map_a.metadata.seed == 7);

  auto [map_c, set_c] = compress_all_relations(graph);
  CHECK(set_a.step_count == graph.synset_count() - set_a.clusters.size());
  CHECK(verify_mapping(map_a, graph).ok());
  CHECK(verify_mapping(map_c, graph).ok());
}
