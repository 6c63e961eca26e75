#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "embedprobe/embedding_store.hpp"
#include "test_util.hpp"

using namespace embedprobe;
using testutil::TempDir;
using testutil::write_file;

namespace {

std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST(LoadEmbeddings, CollapsesPrototypesByMean) {
  TempDir dir;
  auto p = write_file(dir / "huang.txt", "cat 0.1 0.2\ndog 0.3 0.4\ncat 0.5 0.6\n");
  auto set = load_embeddings(p, true);
  EXPECT_EQ(set.size(), 2u);
  EXPECT_EQ(set.dim(), 2u);
  auto cat = vec(*set.lookup("cat"));
  EXPECT_NEAR(cat[0], 0.3, 1e-15);
  EXPECT_NEAR(cat[1], 0.4, 1e-15);
  EXPECT_EQ(vec(*set.lookup("dog")), (std::vector<double>{0.3, 0.4}));
  EXPECT_EQ(set.name(), "huang");
}

TEST(LoadEmbeddings, DuplicateWithoutCollapseIsAnError) {
  TempDir dir;
  auto p = write_file(dir / "e.txt", "cat 0.1 0.2\ncat 0.5 0.6\n");
  EXPECT_THROW(load_embeddings(p, false), InputError);
}

TEST(LoadEmbeddings, RejectsRaggedEmptyMissingAndNonNumeric) {
  TempDir dir;
  EXPECT_THROW(load_embeddings(write_file(dir / "ragged.txt", "a 1.0\nb 2.0 3.0\n"), false), InputError);
  EXPECT_THROW(load_embeddings(write_file(dir / "empty.txt", ""), false), InputError);
  EXPECT_THROW(load_embeddings(write_file(dir / "comments.txt", "# only\n\n"), false), InputError);
  EXPECT_THROW(load_embeddings(dir / "missing.txt", false), InputError);
  EXPECT_THROW(load_embeddings(write_file(dir / "nan.txt", "a 1.0 x2\n"), false), InputError);
  EXPECT_THROW(load_embeddings(write_file(dir / "inf.txt", "a 1.0 inf\n"), false), InputError);
  EXPECT_THROW(load_embeddings(write_file(dir / "bare.txt", "a\n"), false), InputError);
}

TEST(LoadEmbeddings, AcceptsCrlfTabsCommentsAndScientificNotation) {
  TempDir dir;
  auto p = write_file(dir / "e.txt", "# header comment\r\nb\t1e-3  -2.5E+1\r\n\r\na +0.5\t\t7\r\n");
  auto set = load_embeddings(p, false);
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set.words(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(vec(*set.lookup("b")), (std::vector<double>{1e-3, -25.0}));
  EXPECT_EQ(vec(*set.lookup("a")), (std::vector<double>{0.5, 7.0}));
}

TEST(Lookup, AbsentIsAValueNotAFallback) {
  TempDir dir;
  auto set = load_embeddings(write_file(dir / "e.txt", "cat 0.1 0.2\n"), false);
  EXPECT_EQ(vec(*set.lookup("cat")), (std::vector<double>{0.1, 0.2}));
  EXPECT_FALSE(set.lookup("unicorn").has_value());
  EXPECT_FALSE(set.lookup("").has_value());
}

TEST(EmbeddingSet, RejectsInvalidConstruction) {
  EXPECT_THROW(EmbeddingSet("x", {}, Matrix(0, 2)), ArgumentError);
  EXPECT_THROW(EmbeddingSet("x", {""}, Matrix::Zero(1, 2)), ArgumentError);
  EXPECT_THROW(EmbeddingSet("x", {"a", "a"}, Matrix::Zero(2, 2)), ArgumentError);
  Matrix bad = Matrix::Zero(1, 2);
  bad(0, 1) = std::nan("");
  EXPECT_THROW(EmbeddingSet("x", {"a"}, bad), ArgumentError);
}

TEST(WriteEmbeddings, RoundTripsThroughTheTextFormat) {
  TempDir dir;
  std::mt19937_64 rng(7);
  auto m = testutil::gaussian_matrix(50, 6, rng);
  EmbeddingSet set("rt", testutil::numbered_words("w", 50), m);

  write_embeddings(set, dir / "a.txt");
  auto once = load_embeddings(dir / "a.txt", false, "rt");
  write_embeddings(once, dir / "b.txt");
  auto twice = load_embeddings(dir / "b.txt", false, "rt");
  // 9 significant digits: the first write loses precision, after that the
  // format is a fixed point.
  EXPECT_EQ(once, twice);
  EXPECT_EQ(testutil::read_file(dir / "a.txt"), testutil::read_file(dir / "b.txt"));
  EXPECT_TRUE(once.vectors().isApprox(set.vectors(), 1e-8));
}

TEST(WriteEmbeddings, FileWithShortDecimalsRoundTripsExactly) {
  TempDir dir;
  auto p = write_file(dir / "e.txt", "zeta 0.125 -3.5 1e-07\nalpha 0.1 0.2 0.3\n");
  auto first = load_embeddings(p, false, "e");
  write_embeddings(first, dir / "out.txt");
  EXPECT_EQ(load_embeddings(dir / "out.txt", false, "e"), first);
  EXPECT_EQ(testutil::read_file(dir / "out.txt"), "alpha 0.1 0.2 0.3\nzeta 0.125 -3.5 1e-07\n");
}

TEST(IntersectVocab, RestrictsEverySetToSharedWords) {
  EmbeddingSet a("a", {"a", "b", "c"}, Matrix::Constant(3, 2, 1.0));
  EmbeddingSet b("b", {"b", "c", "d"}, Matrix::Constant(3, 3, 2.0));
  auto out = intersect_vocab({a, b});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].words(), (std::vector<std::string>{"b", "c"}));
  EXPECT_EQ(out[1].words(), (std::vector<std::string>{"b", "c"}));
  EXPECT_EQ(out[0].dim(), 2u);
  EXPECT_EQ(out[1].dim(), 3u);
  EXPECT_EQ(out[1].name(), "b");
}

TEST(IntersectVocab, SingleSetIsUnchangedAndDisjointIsAnError) {
  EmbeddingSet a("a", {"x", "y"}, Matrix::Identity(2, 2));
  EXPECT_EQ(intersect_vocab({a}).front(), a);
  EmbeddingSet b("b", {"z"}, Matrix::Identity(1, 1));
  EXPECT_THROW(intersect_vocab({a, b}), ArgumentError);
  EXPECT_THROW(intersect_vocab({}), ArgumentError);
}

TEST(IntersectVocab, PropertyOutputsShareOneVocabularyContainedInEveryInput) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<EmbeddingSet> sets;
    const int count = 1 + static_cast<int>(rng() % 4);
    for (int s = 0; s < count; ++s) {
      std::vector<std::string> words;
      for (int w = 0; w < 30; ++w)
        if (rng() % 3 != 0) words.push_back("w" + std::to_string(w));
      if (words.empty()) words.push_back("w0");
      words.push_back("common");
      sets.emplace_back("s" + std::to_string(s), words, Matrix::Random(static_cast<int>(words.size()), 2));
    }
    auto out = intersect_vocab(sets);
    for (std::size_t s = 0; s < out.size(); ++s) {
      EXPECT_EQ(out[s].words(), out[0].words());
      for (const auto& w : out[s].words()) {
        EXPECT_TRUE(sets[s].contains(w));
        EXPECT_EQ(vec(*out[s].lookup(w)), vec(*sets[s].lookup(w)));
      }
    }
  }
}

TEST(Standardize, MatchesHandValues) {
  EmbeddingSet one("s", {"a", "b"}, (Matrix(2, 1) << 1.0, 3.0).finished());
  auto s1 = standardize(one);
  EXPECT_DOUBLE_EQ(s1.vectors()(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(s1.vectors()(1, 0), 1.0);

  EmbeddingSet flat("s", {"a", "b"}, (Matrix(2, 1) << 5.0, 5.0).finished());
  EXPECT_TRUE(standardize(flat).vectors().isZero(0.0));

  EmbeddingSet two("s", {"a", "b"}, (Matrix(2, 2) << 0.0, 10.0, 2.0, 10.0).finished());
  auto s2 = standardize(two);
  EXPECT_EQ(s2.vectors(), (Matrix(2, 2) << -1.0, 0.0, 1.0, 0.0).finished());

  EmbeddingSet single("s", {"a"}, Matrix::Ones(1, 2));
  EXPECT_THROW(standardize(single), ArgumentError);
}

TEST(Standardize, ZeroVarianceDetectionSurvivesRoundingInTheMean) {
  EmbeddingSet s("s", testutil::numbered_words("w", 7), Matrix::Constant(7, 1, 0.1));
  EXPECT_TRUE(standardize(s).vectors().isZero(0.0));
}

TEST(Standardize, PropertyIdempotentAndNormalized) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 40);
    const int d = 1 + static_cast<int>(rng() % 8);
    Matrix m = testutil::gaussian_matrix(n, d, rng, 5.0);
    m.col(0).setConstant(2.5);
    EmbeddingSet set("p", testutil::numbered_words("w", static_cast<std::size_t>(n)), m);
    auto once = standardize(set);
    auto twice = standardize(once);
    EXPECT_LE((once.vectors() - twice.vectors()).cwiseAbs().maxCoeff(), 1e-9);
    for (int j = 1; j < d; ++j) {
      EXPECT_NEAR(once.vectors().col(j).mean(), 0.0, 1e-12);
      EXPECT_NEAR(once.vectors().col(j).squaredNorm() / n, 1.0, 1e-12);
    }
  }
}

TEST(LoadEmbeddings, PropertyCollapseEqualsDirectSummation) {
  TempDir dir;
  std::mt19937_64 rng(5);
  std::ostringstream text;
  text << std::setprecision(17);
  std::map<std::string, std::vector<std::vector<double>>> protos;
  for (int r = 0; r < 60; ++r) {
    const std::string w = "w" + std::to_string(rng() % 12);
    std::vector<double> v;
    text << w;
    for (int j = 0; j < 3; ++j) {
      v.push_back(static_cast<double>(static_cast<int>(rng() % 2001) - 1000) / 256.0);
      text << ' ' << v.back();
    }
    text << '\n';
    protos[w].push_back(v);
  }
  auto set = load_embeddings(write_file(dir / "p.txt", text.str()), true);
  ASSERT_EQ(set.size(), protos.size());
  for (const auto& [w, vs] : protos) {
    for (int j = 0; j < 3; ++j) {
      double sum = 0.0;
      for (const auto& v : vs) sum += v[static_cast<std::size_t>(j)];
      EXPECT_NEAR((*set.lookup(w))[static_cast<std::size_t>(j)], sum / static_cast<double>(vs.size()), 1e-12);
    }
  }
}
