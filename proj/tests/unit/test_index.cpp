#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles/oracles.hpp"
#include "rcg/error.hpp"
#include "rcg/index.hpp"

namespace fs = std::filesystem;

namespace {

struct DenseFixture {
  std::vector<std::string> ids;
  std::vector<std::vector<float>> rows;
  rcg::RetrievalDatabase db;
};

rcg::Embedding dense(std::vector<float> v, const std::string& fp = "fp") {
  rcg::Embedding e;
  e.kind = rcg::EmbeddingKind::dense;
  e.dense = std::move(v);
  e.norm = static_cast<float>(rcg::l2_norm(e.dense));
  e.fingerprint = fp;
  return e;
}

DenseFixture random_dense(std::mt19937_64& rng, std::size_t size, std::size_t dim, bool with_ties = false) {
  std::normal_distribution<float> dist;
  std::vector<std::string> ids;
  std::vector<std::vector<float>> rows;
  std::vector<rcg::Embedding> embeddings;
  std::vector<rcg::RetrievalDatabase::Entry> entries;
  for (std::size_t i = 0; i < size; ++i) {
    std::vector<float> v(dim);
    if (with_ties && i % 3 == 2) {
      v = rows[i - 1];
    } else {
      for (float& x : v) x = dist(rng);
      rcg::normalize(v);
    }
    ids.push_back("id" + std::to_string((i * 7919) % (size * 3)));
    rows.push_back(v);
    embeddings.push_back(dense(v));
    entries.push_back({ids.back(), "code " + std::to_string(i), "comment " + std::to_string(i)});
  }
  rcg::RetrievalDatabase db(std::move(entries), embeddings, "fp");
  return {std::move(ids), std::move(rows), std::move(db)};
}

std::vector<std::string> ids_of(const rcg::RetrievalResult& r) {
  std::vector<std::string> out;
  for (const auto& n : r.neighbors) out.push_back(n.id);
  return out;
}

rcg::Corpus code_corpus(const std::vector<std::string>& codes) {
  std::vector<rcg::ReviewExample> examples;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    char id[8];
    std::snprintf(id, sizeof id, "%04zu", i);
    examples.push_back({id, codes[i], "comment of " + codes[i], rcg::Split::train});
  }
  return rcg::Corpus(std::move(examples));
}

}  // namespace

TEST_CASE("orthonormal basis retrieval") {
  std::vector<rcg::RetrievalDatabase::Entry> entries = {{"1", "a", "x"}, {"2", "b", "y"}, {"3", "c", "z"}};
  std::vector<rcg::Embedding> e = {dense({1, 0, 0}), dense({0, 1, 0}), dense({0, 0, 1})};
  rcg::RetrievalDatabase db(std::move(entries), e, "fp");
  const auto r = rcg::retrieve(db, dense({1, 0, 0}), 1);
  REQUIRE(r.neighbors.size() == 1);
  CHECK(r.neighbors[0].id == "1");
  CHECK(r.neighbors[0].score == 1.0f);
  CHECK(rcg::retrieve(db, dense({1, 0, 0}), 10).neighbors.size() == 3);
  CHECK(ids_of(rcg::retrieve(db, dense({1, 0, 0}), 3, {"1"})) == std::vector<std::string>{"2", "3"});
}

TEST_CASE("retrieve matches brute-force oracle on random dense data") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    auto f = random_dense(rng, 10, 8, trial % 2 == 1);
    std::normal_distribution<float> dist;
    std::vector<float> q(8);
    for (float& x : q) x = dist(rng);
    rcg::normalize(q);
    for (std::size_t k : {1u, 5u, 10u, 50u}) {
      CHECK(ids_of(rcg::retrieve(f.db, dense(q), k)) == oracle::topk_dense(f.ids, f.rows, q, k));
    }
  }
}

TEST_CASE("retrieval invariants") {
  std::mt19937_64 rng(3);
  auto f = random_dense(rng, 60, 16, true);
  const rcg::Embedding q = f.db.embedding(5);
  std::vector<std::string> previous;
  for (std::size_t k = 1; k <= 60; ++k) {
    const auto r = rcg::retrieve(f.db, q, k);
    const auto ids = ids_of(r);
    CHECK(std::equal(previous.begin(), previous.end(), ids.begin()));
    for (std::size_t i = 1; i < r.neighbors.size(); ++i) {
      const auto& a = r.neighbors[i - 1];
      const auto& b = r.neighbors[i];
      CHECK((a.score > b.score || (a.score == b.score && a.id < b.id)));
    }
    previous = ids;
  }
  const std::unordered_set<std::string> excluded = {f.ids[0], f.ids[7], f.ids[9]};
  const auto r = rcg::retrieve(f.db, q, 60, excluded, f.db.entry(3).code);
  CHECK(r.neighbors.size() == 56);
  for (const auto& n : r.neighbors) {
    CHECK(excluded.count(n.id) == 0);
    CHECK(f.db.entry(n.position).code != f.db.entry(3).code);
  }
}

TEST_CASE("retrieve errors") {
  std::mt19937_64 rng(1);
  auto f = random_dense(rng, 5, 4);
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const rcg::Error& e) {
      return e.code();
    }
    return rcg::ErrorCode::IoError;
  };
  CHECK(code_of([&] { rcg::retrieve(f.db, dense({1, 0, 0, 0}, "other"), 1); }) == rcg::ErrorCode::EncoderMismatch);
  CHECK(code_of([&] { rcg::retrieve(f.db, dense({0, 0, 0, 0}), 1); }) == rcg::ErrorCode::ZeroQuery);
  CHECK(code_of([&] { rcg::retrieve(f.db, dense({1, 0, 0}), 1); }) == rcg::ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { rcg::retrieve(f.db, dense({1, 0, 0, 0}), 0); }) == rcg::ErrorCode::InvalidArgument);

  const auto fallback = rcg::lowest_id_fallback(f.db, 2, {});
  CHECK(fallback.zero_query);
  REQUIRE(fallback.neighbors.size() == 2);
  CHECK(fallback.neighbors[0].id < fallback.neighbors[1].id);
  CHECK(fallback.neighbors[0].score == 0.0f);
}

TEST_CASE("sparse scoring equals sorted merge dot product") {
  const rcg::Corpus corpus = code_corpus({"a b c a", "b b d", "e f", "a e", "c c c d"});
  const rcg::BowEncoder enc = rcg::build_bow_encoder(corpus);
  const rcg::RetrievalDatabase db = rcg::build_index(corpus, enc);
  CHECK(db.size() == 5);
  CHECK(db.fingerprint() == enc.descriptor().fingerprint);
  const rcg::Embedding q = enc.encode("a c d d");
  const auto scores = db.score_all(q);
  for (std::size_t i = 0; i < db.size(); ++i) {
    CHECK(scores[i] == static_cast<float>(rcg::dot(db.embedding(i), q)));
  }
}

TEST_CASE("BoW self-retrieval and training exclusion") {
  const rcg::Corpus corpus = code_corpus({"int a = 1 ;", "return a ;", "if ( x ) y ( ) ;", "for i in range",
                                          "int a = 1 ;", "while true do"});
  const rcg::BowEncoder enc = rcg::build_bow_encoder(corpus);
  const rcg::RetrievalDatabase db = rcg::build_index(corpus, enc);

  const auto top = rcg::retrieve(db, enc.encode(corpus[1].code), 1);
  CHECK(top.neighbors[0].id == corpus[1].id);
  CHECK(std::abs(top.neighbors[0].score - 1.0f) <= 1e-5f);

  // 0000 and 0004 share code; the duplicate must not leak
  const auto training = rcg::retrieve_for_training(db, corpus[0], enc, corpus.size());
  CHECK(training.neighbors.size() == corpus.size() - 2);
  CHECK(training.query_id == corpus[0].id);
  for (const auto& n : training.neighbors) {
    CHECK(n.id != "0000");
    CHECK(n.id != "0004");
  }
}

TEST_CASE("encoder mismatch for training retrieval") {
  const rcg::Corpus corpus = code_corpus({"a b", "c d"});
  const rcg::RetrievalDatabase db = rcg::build_index(corpus, rcg::build_bow_encoder(corpus));
  const rcg::BowEncoder other = rcg::build_bow_encoder(code_corpus({"z"}));
  CHECK_THROWS_AS(rcg::retrieve_for_training(db, corpus[0], other, 1), rcg::Error);
}

TEST_CASE("zero-norm corpus entries are kept and reported") {
  std::vector<rcg::RetrievalDatabase::Entry> entries = {{"a", "x", "y"}, {"b", "z", "w"}};
  std::vector<rcg::Embedding> e = {dense({1, 0}), dense({0, 0})};
  rcg::RetrievalDatabase db(std::move(entries), e, "fp");
  CHECK(db.size() == 2);
  REQUIRE(db.zero_norm_ids().size() == 1);
  CHECK(db.zero_norm_ids()[0] == "b");
}

TEST_CASE("serialization round-trips exactly") {
  const fs::path dir = fs::temp_directory_path() / "rcg_index_io";
  fs::remove_all(dir);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  std::mt19937_64 rng(77);
  auto f = random_dense(rng, 40, 12);
  rcg::save_index(f.db, dir / "dense", "test");
  const rcg::RetrievalDatabase loaded = rcg::load_index(dir / "dense");
  CHECK(loaded.size() == f.db.size());
  CHECK(loaded.fingerprint() == f.db.fingerprint());
  for (std::size_t i = 0; i < loaded.size(); ++i) CHECK(loaded.embedding(i).dense == f.db.embedding(i).dense);
  rcg::save_index(loaded, dir / "dense2", "test");
  CHECK(slurp(dir / "dense" / "vectors.jsonl") == slurp(dir / "dense2" / "vectors.jsonl"));
  CHECK(slurp(dir / "dense" / "manifest.json") == slurp(dir / "dense2" / "manifest.json"));

  const rcg::Corpus corpus = code_corpus({"a b a", "b c", "d"});
  const rcg::BowEncoder enc = rcg::build_bow_encoder(corpus);
  rcg::save_index(rcg::build_index(corpus, enc), dir / "sparse", "bow");
  rcg::save_index(rcg::build_index(corpus, enc), dir / "sparse2", "bow");
  CHECK(slurp(dir / "sparse" / "vectors.jsonl") == slurp(dir / "sparse2" / "vectors.jsonl"));
  const rcg::RetrievalDatabase sparse = rcg::load_index(dir / "sparse");
  CHECK(sparse.kind() == rcg::EmbeddingKind::sparse);
  CHECK(sparse.entry(0).comment == corpus[0].comment);
  CHECK(ids_of(rcg::retrieve(sparse, enc.encode("b c"), 3)) ==
        ids_of(rcg::retrieve(rcg::build_index(corpus, enc), enc.encode("b c"), 3)));
}
