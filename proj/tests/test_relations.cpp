#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "colayout/relations.hpp"
#include "support.hpp"

using namespace colayout;
using namespace testing;

namespace {

// Equilateral triangle of side `side` with labels x, y, z.
Scene triangle(double side) {
  const double h = side * std::sqrt(3.0) / 2.0;
  return make_scene(6.0, 6.0,
                    {make_object("x", "x", {1.0, 1.0, 0.0}, 0.1, 0.1),
                     make_object("y", "y", {1.0 + side, 1.0, 0.0}, 0.1, 0.1),
                     make_object("z", "z", {1.0 + side / 2.0, 1.0 + h, 0.0}, 0.1, 0.1)});
}

SemanticTable xyz_table(double xy, double xz, double yz) {
  SemanticTable t;
  t.set("x", "y", xy);
  t.set("x", "z", xz);
  t.set("y", "z", yz);
  return t;
}

std::vector<double> weights(const SceneGraph& g) {
  std::vector<double> w;
  for (const auto& e : g.edges) w.push_back(e.weight);
  return w;
}

}  // namespace

TEST_CASE("semantic_rel: uniform strengths") {
  const SemanticTable t = xyz_table(0.5, 0.5, 0.5);
  const std::vector<std::string> labels = {"x", "y", "z"};
  CHECK(semantic_rel(t, labels, "x", "y") == doctest::Approx(1.0 / 3.0));
  CHECK(semantic_rel(t, labels, "z", "y") == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("semantic_rel: synonym pair takes the mean of the other pairs") {
  SemanticTable t;
  t.set("chair", "armchair", 0.9, true);
  t.set("chair", "bed", 0.2);
  t.set("armchair", "bed", 0.4);
  const std::vector<std::string> labels = {"chair", "armchair", "bed"};
  CHECK(semantic_rel(t, labels, "chair", "bed") == doctest::Approx(0.2 / 0.9));
  CHECK(semantic_rel(t, labels, "bed", "armchair") == doctest::Approx(0.4 / 0.9));
  CHECK(semantic_rel(t, labels, "armchair", "chair") == doctest::Approx(0.3 / 0.9));
}

TEST_CASE("semantic_rel: degenerate and error cases") {
  const SemanticTable t = xyz_table(0.7, 0.1, 0.1);
  CHECK(semantic_rel(t, {"x", "y"}, "x", "y") == doctest::Approx(1.0));
  CHECK_THROWS_AS(semantic_rel(t, {"x"}, "x", "x"), ValidationError);
  CHECK_THROWS_AS(semantic_rel(t, {"x", "w"}, "x", "w"), LookupError);
  CHECK_THROWS_AS(semantic_rel(t, {"x", "y"}, "x", "z"), LookupError);
}

TEST_CASE("semantic probabilities: synonym override and symmetry properties") {
  std::mt19937_64 rng(31);
  const std::vector<std::string> names = {"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 200; ++trial) {
    SemanticTable t;
    const double c = uniform(rng, 0.05, 1.0);
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (std::size_t j = i + 1; j < names.size(); ++j) {
        const bool syn = rng() % 4 == 0;
        t.set(names[i], names[j], syn ? uniform(rng, 0.0, 1.0) : c, syn);
      }
    }
    std::vector<std::string> labels;
    const int n = std::uniform_int_distribution<int>(2, 6)(rng);
    for (int k = 0; k < n; ++k) labels.push_back(names[rng() % names.size()]);

    const auto probs = semantic_probabilities(t, labels);
    CHECK(std::accumulate(probs.begin(), probs.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    // Every non-synonym h equals c, so overriding synonyms with the mean makes all pairs equal.
    for (double p : probs) CHECK(p == doctest::Approx(1.0 / static_cast<double>(probs.size())));

    const std::string a = labels[0], b = labels[1];
    CHECK(semantic_rel(t, labels, a, b) == semantic_rel(t, labels, b, a));
  }
}

TEST_CASE("cooccur_prob arithmetic") {
  RelationStats s(0.5);
  for (int k = 0; k < 5; ++k) s.add_observation("i", "j", 1.0);
  for (int k = 0; k < 5; ++k) s.add_observation("i", "m", 1.0);
  s.add_observation("m", "q", 0.2);
  CHECK(s.marginal("i") == 10);
  CHECK(s.marginal("j") == 5);
  CHECK(cooccur_prob(s, "i", "j") == 1.0);
  CHECK(cooccur_prob(s, "j", "i") == 1.0);
  CHECK(cooccur_prob(s, "j", "q") == 0.0);
  CHECK(cooccur_prob(s, "i", "m") == doctest::Approx(5.0 / 6.0));
  CHECK_THROWS_AS(cooccur_prob(s, "i", "unknown"), LookupError);

  RelationStats single(0.25);
  for (int k = 0; k < 7; ++k) single.add_observation("u", "v", 0.3 * k);
  CHECK(cooccur_prob(single, "u", "v") == 1.0);
}

TEST_CASE("cooccur_prob on a hand-counted toy corpus") {
  // Scene 1: bed, nightstand, lamp. Scene 2: bed, nightstand.
  const Scene s1 = make_scene(5, 5,
                              {make_object("b", "bed", {1, 1, 0}, 0.2, 0.2),
                               make_object("n", "nightstand", {2, 1, 0}, 0.2, 0.2),
                               make_object("l", "lamp", {1, 3, 0}, 0.2, 0.2)});
  const Scene s2 = make_scene(5, 5,
                              {make_object("b", "bed", {1, 1, 0}, 0.2, 0.2),
                               make_object("n", "nightstand", {1, 2.2, 0}, 0.2, 0.2)});
  const RelationStats stats = stats_build({s1, s2}, 0.25);
  // N(bed,nightstand) = 2, N(bed,lamp) = 1, N(nightstand,lamp) = 1
  // marginals: bed 3, nightstand 3, lamp 2
  CHECK(cooccur_prob(stats, "bed", "nightstand") == doctest::Approx(2.0 / 3.0));
  CHECK(cooccur_prob(stats, "bed", "lamp") == doctest::Approx(1.0 / 2.0));
  CHECK(cooccur_prob(stats, "lamp", "nightstand") == doctest::Approx(1.0 / 2.0));
}

TEST_CASE("spatial_rel uses histogram density times co-occurrence") {
  RelationStats s(1.0);
  for (double d : {0.5, 1.5, 2.5, 3.5}) s.add_observation("a", "b", d);
  for (int k = 0; k < 4; ++k) {
    s.add_observation("a", "c", 9.0);
    s.add_observation("b", "c", 9.0);
  }
  CHECK(cooccur_prob(s, "a", "b") == 0.5);
  CHECK(spatial_rel(s, "a", "b", 1.5) == doctest::Approx(0.125));
  CHECK(spatial_rel(s, "a", "b", 4.5) == 0.0);
  CHECK(spatial_rel(s, "b", "c", 1.0) == 0.0);
  CHECK_THROWS_AS(spatial_rel(s, "a", "b", -1.0), ValidationError);

  RelationStats peaked(0.25);
  for (double d : {0.6, 0.6, 0.6, 0.9, 1.3}) peaked.add_observation("p", "q", d);
  const auto* ps = peaked.pair("p", "q");
  REQUIRE(ps != nullptr);
  CHECK(ps->modal_distance(0.25) == doctest::Approx(0.625));
  CHECK(spatial_rel(peaked, "p", "q", 0.55) == doctest::Approx(ps->max_density(0.25)));
  for (double d = 0.0; d < 2.0; d += 0.05) CHECK(spatial_rel(peaked, "p", "q", d) <= spatial_rel(peaked, "p", "q", 0.55));
}

TEST_CASE("stats_build counting") {
  const Scene two = make_scene(4, 4, {make_object("a", "a", {1, 1, 0}, 0.1, 0.1), make_object("b", "b", {2, 1, 0}, 0.1, 0.1)});
  const RelationStats one = stats_build({two}, 0.5);
  REQUIRE(one.pair("a", "b") != nullptr);
  CHECK(one.cooccur("a", "b") == 1);
  CHECK(one.pair("b", "a")->hist == std::vector<long>{0, 0, 1});

  const RelationStats ten = stats_build(std::vector<Scene>(10, two), 0.5);
  CHECK(ten.cooccur("a", "b") == 10);

  CHECK_THROWS_AS(stats_build({}, 0.5), ValidationError);
}

TEST_CASE("stats_build is invariant to corpus permutation and partition") {
  std::mt19937_64 rng(32);
  std::vector<Scene> corpus;
  for (int k = 0; k < 30; ++k) corpus.push_back(random_scene(rng, 2, 6));
  const auto reference = stats_build(corpus, 0.25).to_json();

  std::shuffle(corpus.begin(), corpus.end(), rng);
  CHECK(stats_build(corpus, 0.25).to_json() == reference);

  RelationStats merged = stats_build({corpus.begin(), corpus.begin() + 11}, 0.25);
  merged.merge(stats_build({corpus.begin() + 11, corpus.end()}, 0.25));
  CHECK(merged.to_json() == reference);

  // marginal = sum of co-occurrence counts touching the label
  const RelationStats stats = RelationStats::from_json(reference);
  for (const auto& label : corpus_labels()) {
    if (!stats.knows_label(label)) continue;
    long sum = 0;
    for (const auto& [key, ps] : stats.pairs()) {
      if (key.first == label || key.second == label) sum += ps.n;
      CHECK(ps.total() == ps.n);
    }
    CHECK(stats.marginal(label) == sum);
  }
}

TEST_CASE("JSON round-trips") {
  SemanticTable t = xyz_table(0.25, 0.5, 1.0);
  t.set("x", "x2", 0.75, true);
  CHECK(SemanticTable::from_json(t.to_json()).to_json() == t.to_json());
  CHECK(SemanticTable::from_json(t.to_json()).is_a("x2", "x"));

  const RelationStats s = stats_build({triangle(1.1)}, 0.5);
  CHECK(RelationStats::from_json(nlohmann::json::parse(s.to_json().dump())).to_json() == s.to_json());

  auto bad = s.to_json();
  bad["pairs"][0]["n"] = 5;
  CHECK_THROWS_AS(RelationStats::from_json(bad), ValidationError);
  CHECK_THROWS_AS(SemanticTable().set("a", "b", 1.5), ValidationError);
}

TEST_CASE("build_graph normalization") {
  const Scene scene = triangle(1.1);
  // Each pair seen once at the same distance bin, every marginal is 2:
  // the spatial factor is identical for all pairs.
  const RelationStats stats = stats_build({scene}, 0.5);

  const SceneGraph equal = build_graph(scene, xyz_table(0.3, 0.3, 0.3), stats);
  CHECK(equal.nodes == std::vector<std::string>{"x", "y", "z"});
  REQUIRE(equal.edges.size() == 3);
  for (double w : weights(equal)) CHECK(w == doctest::Approx(1.0 / 3.0));

  const SceneGraph skewed = build_graph(scene, xyz_table(0.6, 0.2, 0.2), stats);
  CHECK(weights(skewed)[0] == doctest::Approx(0.6));
  CHECK(weights(skewed)[1] == doctest::Approx(0.2));
  CHECK(weights(skewed)[2] == doctest::Approx(0.2));

  // Stats from a larger triangle put no mass at 1.1 m: every product is 0.
  const SceneGraph zero = build_graph(scene, xyz_table(0.6, 0.2, 0.2), stats_build({triangle(3.0)}, 0.5));
  for (double w : weights(zero)) CHECK(w == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("build_graph weights are a distribution on random scenes") {
  const SemanticTable table = SemanticTable::load(kDataDir + "/semantic.json");
  const RelationStats stats = RelationStats::load(kDataDir + "/stats.json");
  std::mt19937_64 rng(33);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Scene s = random_scene(rng, 2, 7);
    const auto labels = s.labels();
    const bool known = std::all_of(labels.begin(), labels.end(), [&](const std::string& l) {
      return table.knows_label(l) && stats.knows_label(l);
    });
    if (!known) {
      CHECK_THROWS_AS(build_graph(s, table, stats), LookupError);
      continue;
    }
    const SceneGraph g = build_graph(s, table, stats);
    CHECK(g.edges.size() == s.objects.size() * (s.objects.size() - 1) / 2);
    double sum = 0.0;
    for (const auto& e : g.edges) {
      CHECK(e.i < e.j);
      CHECK(e.weight >= 0.0);
      sum += e.weight;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    ++checked;
  }
  CHECK(checked > 20);
}
