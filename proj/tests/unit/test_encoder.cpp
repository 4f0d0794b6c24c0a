#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "rcg/encoder.hpp"
#include "rcg/error.hpp"

namespace fs = std::filesystem;

namespace {

rcg::Corpus codes(std::initializer_list<const char*> texts) {
  std::vector<rcg::ReviewExample> examples;
  int i = 0;
  for (const char* t : texts) examples.push_back({std::to_string(i++), t, "comment", rcg::Split::train});
  return rcg::Corpus(std::move(examples));
}

}  // namespace

TEST_CASE("BoW encoding is L2-normalized term frequency") {
  const rcg::BowEncoder enc = rcg::build_bow_encoder(codes({"a b", "c"}));
  const rcg::Embedding e = enc.encode("a b a");
  REQUIRE(e.kind == rcg::EmbeddingKind::sparse);
  REQUIRE(e.sparse.size() == 2);
  CHECK(e.sparse[0].first == *enc.term_index("a"));
  CHECK(e.sparse[0].second == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-7));
  CHECK(e.sparse[1].second == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-7));
  CHECK(std::abs(rcg::dot(e, e) - 1.0) <= 1e-5);
}

TEST_CASE("BoW vocabulary and fingerprint are deterministic") {
  const rcg::Corpus corpus = codes({"x y", "y x x"});
  const rcg::BowEncoder a = rcg::build_bow_encoder(corpus);
  const rcg::BowEncoder b = rcg::build_bow_encoder(corpus);
  CHECK(a.vocabulary().size() == 2);
  CHECK(a.vocabulary()[0] == "x");
  CHECK(a.descriptor().fingerprint == b.descriptor().fingerprint);
  CHECK_FALSE(a.descriptor().dimension.has_value());
  CHECK(rcg::build_bow_encoder(codes({"y x"})).descriptor().fingerprint != a.descriptor().fingerprint);
}

TEST_CASE("BoW self-similarity, orthogonality and OOV") {
  const rcg::Corpus corpus = codes({"int a = b ;", "return c ;", "foo ( bar )"});
  const rcg::BowEncoder enc = rcg::build_bow_encoder(corpus);
  const auto embeddings = enc.encode_examples(corpus.examples());
  for (const auto& e : embeddings) CHECK(std::abs(rcg::dot(e, e) - 1.0) <= 1e-5);
  CHECK(rcg::dot(enc.encode("foo bar"), enc.encode("int return")) == 0.0);
  CHECK(enc.encode("a a a") == enc.encode("a a a"));

  const rcg::Embedding oov = enc.encode("never seen");
  CHECK(oov.sparse.empty());
  CHECK(oov.norm == 0.0f);
  CHECK_THROWS_AS(rcg::build_bow_encoder(rcg::Corpus{}), rcg::Error);
}

TEST_CASE("identical texts encode identically in a batch") {
  const rcg::BowEncoder enc = rcg::build_bow_encoder(codes({"p q r"}));
  const std::vector<std::string> texts = {"p q", "p q", "r"};
  const auto out = rcg::encode_batch(enc, texts);
  REQUIRE(out.size() == 3);
  CHECK(out[0] == out[1]);
}

TEST_CASE("precomputed vectors") {
  const fs::path dir = fs::temp_directory_path() / "rcg_encoder_pre";
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "v.jsonl");
    out << R"({"id": "a", "vector": [3, 0, 0, 4]})" "\n"
        << R"({"id": "b", "vector": [0, 1, 0, 0]})" "\n"
        << R"({"id": "c", "vector": [1, 1, 1, 1]})" "\n";
  }
  const rcg::PrecomputedEncoder enc = rcg::load_precomputed_encoder(dir / "v.jsonl");
  CHECK(enc.descriptor().dimension == 4u);
  const rcg::Embedding a = enc.lookup("a");
  CHECK(a.dense[0] == doctest::Approx(0.6));
  CHECK(a.dense[3] == doctest::Approx(0.8));
  for (const char* id : {"a", "b", "c"}) CHECK(std::abs(rcg::l2_norm(enc.lookup(id).dense) - 1.0) <= 1e-5);

  try {
    enc.lookup("zzz");
    FAIL("expected MissingVector");
  } catch (const rcg::Error& e) {
    CHECK(e.code() == rcg::ErrorCode::MissingVector);
  }
  const std::vector<std::string> text = {"int x;"};
  CHECK_THROWS_AS(enc.encode_batch(text), rcg::Error);
  CHECK(enc.encode_batch({}).empty());
  CHECK(rcg::load_precomputed_encoder(dir / "v.jsonl").descriptor().fingerprint == enc.descriptor().fingerprint);

  {
    std::ofstream out(dir / "ragged.jsonl");
    out << R"({"id": "a", "vector": [1, 2]})" "\n" << R"({"id": "b", "vector": [1, 2, 3]})" "\n";
  }
  try {
    rcg::load_precomputed_encoder(dir / "ragged.jsonl");
    FAIL("expected DimensionMismatch");
  } catch (const rcg::Error& e) {
    CHECK(e.code() == rcg::ErrorCode::DimensionMismatch);
  }
}
