#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "eventsum/textvec.hpp"
#include "oracles.hpp"

using namespace eventsum;
using text::SparseVector;
using text::TokenList;

namespace {

SparseVector vec(std::initializer_list<std::pair<const char*, double>> entries) {
  SparseVector v;
  for (const auto& [term, w] : entries) v.weights[term] = w;
  return v;
}

const text::LancasterStemmer& stemmer() {
  static const auto instance =
      text::LancasterStemmer::from_file(std::string(EVENTSUM_DATA_DIR) + "/lancaster_rules.txt");
  return instance;
}

}  // namespace

TEST_CASE("tokenize lowercases, strips urls, mentions and hashtag markers") {
  CHECK(text::tokenize("RIP Robin Williams http://t.co/x") ==
        TokenList{"rip", "robin", "williams"});
  CHECK(text::tokenize("#asthma #smog") == TokenList{"asthma", "smog"});
  CHECK(text::tokenize("") == TokenList{});
  CHECK(text::tokenize("@friend check www.example.com please") == TokenList{"check", "please"});
  CHECK(text::tokenize("well-known  fact!!") == TokenList{"well", "known", "fact"});
}

TEST_CASE("build_stopwords unions the standard list with the corpus top words") {
  const std::vector<std::string> standard{"the", "a"};
  std::unordered_map<std::string, std::size_t> counts{{"lol", 50}, {"omg", 10}};
  const auto set = text::build_stopwords(standard, counts, 1);
  CHECK(set.count("the"));
  CHECK(set.count("a"));
  CHECK(set.count("lol"));
  CHECK_FALSE(set.count("omg"));
}

TEST_CASE("build_stopwords with a small corpus keeps every corpus token") {
  std::unordered_map<std::string, std::size_t> counts{{"x", 3}, {"y", 1}};
  const auto set = text::build_stopwords(std::vector<std::string>{}, counts, 200);
  CHECK(set.size() == 2);
}

TEST_CASE("build_stopwords of disjoint inputs has additive size") {
  std::vector<std::string> standard;
  for (int i = 0; i < 50; ++i) standard.push_back("s" + std::to_string(i));
  std::unordered_map<std::string, std::size_t> counts;
  for (int i = 0; i < 300; ++i) counts["c" + std::to_string(i)] = 1000 - static_cast<std::size_t>(i);
  const auto set = text::build_stopwords(standard, counts, 200);
  CHECK(set.size() == 250);
  CHECK(set.count("c199"));
  CHECK_FALSE(set.count("c200"));
}

TEST_CASE("build_stopwords breaks count ties lexicographically at the cut") {
  std::unordered_map<std::string, std::size_t> counts{
      {"zz", 5}, {"aa", 5}, {"mm", 5}, {"top", 9}};
  const auto set = text::build_stopwords(std::vector<std::string>{}, counts, 2);
  CHECK(set.count("top"));
  CHECK(set.count("aa"));
  CHECK_FALSE(set.count("mm"));
  CHECK_FALSE(set.count("zz"));
}

TEST_CASE("stemmer reproduces published behaviour") {
  CHECK(stemmer().stem("maximum") == "maxim");
  CHECK(stemmer().stem("running") == "run");
  CHECK(stemmer().stem("x") == "x");
  CHECK(stemmer().stem("provision") == "provid");
  CHECK(stemmer().stem("ear") == "ear");
  CHECK(stemmer().stem("string") == "string");
}

TEST_CASE("stemmer matches an independently coded rule table") {
  const oracles::LancasterReference reference;
  const std::vector<std::string> words{
      "maximum",   "presumably", "multiply",  "provision", "owed",      "ear",
      "saying",    "crying",     "string",    "meant",     "cement",    "classified",
      "running",   "nationally", "sadness",   "happiness", "breathing", "pollution",
      "asthmatic", "chocolate",  "vomiting",  "headache",  "surprise",  "celebration",
      "analytic",  "distinguish", "provide",  "connection", "argued",   "families",
      "easily",    "hopeful",    "beautiful", "explosion", "dangerous", "emergency",
      "infection", "symptoms",   "epidemic",  "stations",  "reporting", "articles",
      "weather",   "holidays",   "football",  "matches",   "winning",   "delighted",
      "campaign",  "announce",   "illness",   "coughing",  "sneezes",   "feverish",
      "ache",      "aches",      "itching",   "rash",      "sick",      "sicknesses"};
  for (const std::string& word : words) {
    CAPTURE(word);
    CHECK(stemmer().stem(word) == reference.stem(word));
  }
}

TEST_CASE("stemmer agrees with the reference on random letter strings") {
  const oracles::LancasterReference reference;
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> len(1, 12);
  std::uniform_int_distribution<int> letter(0, 25);
  for (int i = 0; i < 5000; ++i) {
    std::string word;
    const int n = len(rng);
    for (int k = 0; k < n; ++k) word.push_back(static_cast<char>('a' + letter(rng)));
    CAPTURE(word);
    CHECK(stemmer().stem(word) == reference.stem(word));
  }
}

TEST_CASE("tfidf on a single document reduces to raw term frequency") {
  const std::vector<TokenList> docs{{"flu", "flu", "jab"}};
  const auto vectors = text::tfidf_vectors(docs);
  CHECK(vectors[0].weights.at("flu") == doctest::Approx(2.0));
  CHECK(vectors[0].weights.at("jab") == doctest::Approx(1.0));
}

TEST_CASE("tfidf idf cancels for a term in every document") {
  const std::vector<TokenList> docs{{"flu", "one"}, {"flu", "two"}, {"flu", "three"}};
  const auto vectors = text::tfidf_vectors(docs);
  for (const auto& v : vectors) CHECK(v.weights.at("flu") == doctest::Approx(1.0));
}

TEST_CASE("tfidf idf boosts a term unique to one of two documents") {
  const std::vector<TokenList> docs{{"flu", "rare"}, {"flu"}};
  const auto vectors = text::tfidf_vectors(docs);
  CHECK(vectors[0].weights.at("rare") == doctest::Approx(std::log(1.5) + 1.0));
}

TEST_CASE("tfidf drops stopwords and stems when asked") {
  text::StopwordSet stops{"the"};
  const std::vector<TokenList> docs{{"the", "running", "rivers"}};
  text::VectorizeOptions opts;
  opts.stopwords = &stops;
  opts.stemmer = &stemmer();
  const auto vectors = text::tfidf_vectors(docs, opts);
  CHECK(vectors[0].weights.count("the") == 0);
  CHECK(vectors[0].weights.count("run") == 1);
  CHECK(vectors[0].weights.count("running") == 0);
}

TEST_CASE("ngrams form bigrams over the non-stopword sequence") {
  text::StopwordSet stops{"the"};
  text::VectorizeOptions opts{.ngram_min = 1, .ngram_max = 2, .stopwords = &stops};
  const auto grams = text::ngrams({"air", "the", "pollution"}, opts);
  CHECK(std::count(grams.begin(), grams.end(), "air pollution") == 1);
  CHECK(std::count(grams.begin(), grams.end(), "air") == 1);
}

TEST_CASE("cosine basics") {
  const auto a = vec({{"x", 1}, {"y", 1}});
  const auto b = vec({{"x", 1}});
  CHECK(text::cosine(a, a) == doctest::Approx(1.0));
  CHECK(text::cosine(a, b) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(text::cosine(b, vec({{"z", 5}})) == 0.0);
  CHECK(text::cosine(a, SparseVector{}) == 0.0);
}

TEST_CASE("cosine is scale invariant and bounded on random non-negative vectors") {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> weight(0.0, 5.0);
  const char* terms[] = {"a", "b", "c", "d", "e", "f"};
  for (int round = 0; round < 300; ++round) {
    SparseVector a, b;
    for (const char* t : terms) {
      if (rng() % 2) a.weights[t] = weight(rng);
      if (rng() % 2) b.weights[t] = weight(rng);
    }
    const double c = text::cosine(a, b);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0 + 1e-12);
    SparseVector scaled = a;
    for (auto& [term, w] : scaled.weights) w *= 3.5;
    CHECK(text::cosine(scaled, b) == doctest::Approx(c));
  }
}

TEST_CASE("pcss hand values") {
  const auto e1 = vec({{"x", 1}});
  const auto e2 = vec({{"y", 1}});
  SUBCASE("identical vectors") {
    const std::vector<SparseVector> vs{e1, e1, e1};
    CHECK(text::pcss(vs) == doctest::Approx(1.0));
  }
  SUBCASE("orthogonal vectors") {
    const auto e3 = vec({{"z", 1}});
    const std::vector<SparseVector> vs{e1, e2, e3};
    CHECK(text::pcss(vs) == doctest::Approx(0.0));
  }
  SUBCASE("mixed set") {
    const std::vector<SparseVector> vs{e1, e1, e2};
    CHECK(text::pcss(vs) == doctest::Approx((1.0 - std::sqrt(2.0)) / 3.0).epsilon(1e-12));
  }
  SUBCASE("fewer than two vectors is an error") {
    const std::vector<SparseVector> vs{e1};
    CHECK_THROWS_AS(text::pcss(vs), std::invalid_argument);
  }
}

TEST_CASE("pcss is bounded and permutation invariant") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> weight(0.0, 3.0);
  const char* terms[] = {"a", "b", "c", "d"};
  for (int round = 0; round < 100; ++round) {
    std::vector<SparseVector> vs(3 + rng() % 5);
    for (auto& v : vs) {
      for (const char* t : terms)
        if (rng() % 2) v.weights[t] = weight(rng);
      if (v.weights.empty()) v.weights["a"] = 1.0;
    }
    const double base = text::pcss(vs);
    CHECK(base >= -0.5 - 1e-12);
    CHECK(base <= 1.0 + 1e-12);
    std::shuffle(vs.begin(), vs.end(), rng);
    CHECK(text::pcss(vs) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("cross_pcss hand values and symmetry") {
  const auto e1 = vec({{"x", 1}});
  const auto e2 = vec({{"y", 1}});
  const std::vector<SparseVector> a{e1};
  const std::vector<SparseVector> b{e1, e2};
  SUBCASE("single shared vector") {
    const std::vector<SparseVector> only{e1};
    CHECK(text::cross_pcss(only, only) == doctest::Approx(1.0));
  }
  SUBCASE("orthogonal sets") {
    const std::vector<SparseVector> left{e1, e1};
    const std::vector<SparseVector> right{e2};
    CHECK(text::cross_pcss(left, right) == doctest::Approx(0.0));
  }
  SUBCASE("half overlap") { CHECK(text::cross_pcss(a, b) == doctest::Approx(0.0)); }
  SUBCASE("symmetry") {
    const std::vector<SparseVector> c{e1, vec({{"x", 1}, {"y", 2}})};
    CHECK(text::cross_pcss(c, b) == doctest::Approx(text::cross_pcss(b, c)));
  }
  SUBCASE("empty set is an error") {
    CHECK_THROWS_AS(text::cross_pcss(a, {}), std::invalid_argument);
  }
}

TEST_CASE("stopword terms never appear in tfidf output") {
  text::StopwordSet stops{"and", "the"};
  std::mt19937 rng(8);
  const char* words[] = {"and", "the", "flu", "cough", "park"};
  for (int round = 0; round < 50; ++round) {
    std::vector<TokenList> docs(2 + rng() % 3);
    for (auto& d : docs)
      for (int i = 0; i < 6; ++i) d.push_back(words[rng() % 5]);
    text::VectorizeOptions opts;
    opts.stopwords = &stops;
    for (const auto& v : text::tfidf_vectors(docs, opts)) {
      CHECK(v.weights.count("and") == 0);
      CHECK(v.weights.count("the") == 0);
    }
  }
}
