#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "rcg/corpus.hpp"
#include "rcg/error.hpp"

namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rcg_corpus_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

rcg::ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const rcg::Error& e) {
    return e.code();
  }
  FAIL("expected rcg::Error");
  return rcg::ErrorCode::IoError;
}

rcg::Corpus comments(std::initializer_list<const char*> texts) {
  std::vector<rcg::ReviewExample> examples;
  int i = 0;
  for (const char* t : texts) examples.push_back({std::to_string(i++), "code", t, rcg::Split::train});
  return rcg::Corpus(std::move(examples));
}

}  // namespace

TEST_CASE("load_jsonl reads valid records in order") {
  const fs::path dir = temp_dir("valid");
  write(dir / "c.jsonl",
        R"({"id": "a", "code": "int x;", "comment": "rename", "split": "train"})" "\n"
        R"({"id": "b", "code": "y++;", "comment": "why?", "split": "test"})" "\n");
  const rcg::Corpus corpus = rcg::load_jsonl(dir / "c.jsonl");
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].id == "a");
  CHECK(corpus[1].split == rcg::Split::test);
  CHECK(corpus.find("b")->comment == "why?");
  CHECK(corpus.find("zzz") == nullptr);
  CHECK(corpus.filter(rcg::Split::train).size() == 1);
}

TEST_CASE("load_jsonl errors") {
  const fs::path dir = temp_dir("errors");
  write(dir / "dup.jsonl",
        R"({"id": "7", "code": "a", "comment": "b", "split": "train"})" "\n"
        R"({"id": "7", "code": "c", "comment": "d", "split": "train"})" "\n");
  CHECK(error_of([&] { rcg::load_jsonl(dir / "dup.jsonl"); }) == rcg::ErrorCode::DuplicateId);

  write(dir / "empty_field.jsonl", R"({"id": "1", "code": "  ", "comment": "b", "split": "train"})" "\n");
  CHECK(error_of([&] { rcg::load_jsonl(dir / "empty_field.jsonl"); }) == rcg::ErrorCode::MalformedRecord);

  write(dir / "missing.jsonl", "\n" R"({"id": "1", "code": "a", "split": "train"})" "\n");
  try {
    rcg::load_jsonl(dir / "missing.jsonl");
    FAIL("expected MalformedRecord");
  } catch (const rcg::Error& e) {
    CHECK(e.code() == rcg::ErrorCode::MalformedRecord);
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }

  write(dir / "bad_split.jsonl", R"({"id": "1", "code": "a", "comment": "b", "split": "dev"})" "\n");
  CHECK(error_of([&] { rcg::load_jsonl(dir / "bad_split.jsonl"); }) == rcg::ErrorCode::MalformedRecord);
  write(dir / "garbage.jsonl", "{not json\n");
  CHECK(error_of([&] { rcg::load_jsonl(dir / "garbage.jsonl"); }) == rcg::ErrorCode::MalformedRecord);
  CHECK(error_of([&] { rcg::load_jsonl(dir / "absent.jsonl"); }) == rcg::ErrorCode::IoError);
}

TEST_CASE("load_paired_text assigns zero-padded ids") {
  const fs::path dir = temp_dir("paired");
  write(dir / "code.txt", "int a;\nint b;\r\nint c;\n");
  write(dir / "comment.txt", "one\ntwo\nthree\n");
  const rcg::Corpus corpus = rcg::load_paired_text(dir / "code.txt", dir / "comment.txt", rcg::Split::train);
  REQUIRE(corpus.size() == 3);
  CHECK(corpus[0].id == "000000");
  CHECK(corpus[2].id == "000002");
  CHECK(corpus[1].code == "int b;");

  write(dir / "short.txt", "one\ntwo\n");
  CHECK(error_of([&] { rcg::load_paired_text(dir / "code.txt", dir / "short.txt", rcg::Split::train); }) ==
        rcg::ErrorCode::AlignmentError);
}

TEST_CASE("reload is identical") {
  const fs::path dir = temp_dir("reload");
  const rcg::Corpus corpus = comments({"a a b", "x", "\xC3\xA9l\xC3\xA8ve \"quoted\""});
  rcg::write_jsonl(corpus, dir / "c.jsonl");
  CHECK(rcg::load_jsonl(dir / "c.jsonl") == corpus);
  CHECK(rcg::load_jsonl(dir / "c.jsonl") == rcg::load_jsonl(dir / "c.jsonl"));
}

TEST_CASE("frequency table counts occurrences") {
  const rcg::FrequencyTable t = rcg::build_frequency_table(comments({"a a b"}));
  CHECK(t.count("a") == 2);
  CHECK(t.count("b") == 1);
  CHECK(t.total_tokens() == 3);
  CHECK(t.unique_tokens() == 2);

  const rcg::FrequencyTable twice = rcg::build_frequency_table(comments({"x", "x"}));
  CHECK(twice.count("x") == 2);
  CHECK(twice.unique_tokens() == 1);

  CHECK(rcg::build_frequency_table(comments({"Also also"})).unique_tokens() == 2);
  CHECK(error_of([] { rcg::build_frequency_table(rcg::Corpus{}); }) == rcg::ErrorCode::EmptyCorpus);
}

TEST_CASE("bucket stats") {
  const rcg::Corpus corpus = comments({"a a b"});
  const rcg::FrequencyTable t = rcg::build_frequency_table(corpus);
  const std::vector<std::uint64_t> one = {1};
  const auto stats = rcg::frequency_bucket_stats(t, corpus, one);
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].unique_tokens == 1);
  CHECK(stats[0].examples_containing == 1);

  const rcg::Corpus many = comments({"a a b", "c d", "a"});
  const rcg::FrequencyTable mt = rcg::build_frequency_table(many);
  const std::vector<std::uint64_t> big = {1, 1000};
  const auto saturated = rcg::frequency_bucket_stats(mt, many, big);
  CHECK(saturated[0].unique_tokens == 3);      // b, c, d
  CHECK(saturated[0].examples_containing == 2);
  CHECK(saturated[1].unique_tokens == mt.unique_tokens());
  CHECK(saturated[1].examples_containing == 3);

  const std::vector<std::uint64_t> bad = {5, 5};
  CHECK(error_of([&] { rcg::frequency_bucket_stats(mt, many, bad); }) == rcg::ErrorCode::InvalidThresholds);
  CHECK(error_of([&] { rcg::frequency_bucket_stats(mt, many, std::vector<std::uint64_t>{}); }) ==
        rcg::ErrorCode::InvalidThresholds);
}

TEST_CASE("property: buckets monotone, table order independent") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> word(0, 40);
  std::uniform_int_distribution<int> len(1, 12);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<rcg::ReviewExample> examples;
    for (int i = 0; i < 25; ++i) {
      std::string text;
      for (int w = len(rng); w > 0; --w) text += "t" + std::to_string(word(rng) * word(rng) % 37) + " ";
      examples.push_back({std::to_string(i), "c", text, rcg::Split::train});
    }
    const rcg::Corpus corpus(examples);
    const rcg::FrequencyTable table = rcg::build_frequency_table(corpus);
    std::uint64_t sum = 0;
    for (const auto& [token, n] : table.counts()) sum += n;
    CHECK(sum == table.total_tokens());

    const std::vector<std::uint64_t> thresholds = {1, 2, 3, 5, 8, 13, rcg::kUnboundedThreshold};
    const auto stats = rcg::frequency_bucket_stats(table, corpus, thresholds);
    for (std::size_t i = 1; i < stats.size(); ++i) {
      CHECK(stats[i].unique_tokens >= stats[i - 1].unique_tokens);
      CHECK(stats[i].examples_containing >= stats[i - 1].examples_containing);
    }
    CHECK(stats.back().unique_tokens == table.unique_tokens());
    CHECK(stats.back().examples_containing == corpus.size());

    std::shuffle(examples.begin(), examples.end(), rng);
    CHECK(rcg::build_frequency_table(rcg::Corpus(examples)).counts() == table.counts());
  }
}
