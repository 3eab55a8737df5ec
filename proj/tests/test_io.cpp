#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "lcs/io.hpp"

using namespace lcs;

TEST(StateCsv, ZeroLabelIsSingleRow) {
  const auto b = validated({}, AlphaSequence::linear(Regime::NonPositive, 0.0, 1.0));
  const auto s = build_one_dof(b, OneDof{0.0, 0.0, 2, 1}).state;
  std::ostringstream os;
  io::write_state_csv(os, s);
  EXPECT_EQ(os.str(), "n,l,k,re,im\n2,1,0,1,0\n");
}

TEST(StateCsv, RoundTripPrecision) {
  const auto s = build_bicoherent(BiCoherentComplex{{0.3, 0.7}, 0.0, 0}).state;
  std::ostringstream os;
  io::write_state_csv(os, s);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    std::size_t n, l, k;
    double re, im;
    char c;
    std::istringstream ls(line);
    ls >> n >> c >> l >> c >> k >> c >> re >> c >> im;
    EXPECT_EQ(complex(re, im), s(n, l, k));
    ++rows;
  }
  EXPECT_EQ(rows, s.cutoffs().n_max + 1);
}

TEST(Json, StateMetadata) {
  const FamilyLabel label = BiCoherentComplex{{1.0, 0.0}, 0.0, 0};
  const auto b = validated({}, AlphaSequence::linear(Regime::NonPositive, 0.0, 1.0));
  const auto built = build(b, label);
  const auto j = io::state_metadata(built, label);
  EXPECT_EQ(j["family"], "bicoherent_complex");
  EXPECT_NEAR(j["norm"].get<double>(), 1.0, 1e-10);
  EXPECT_LE(j["tail_bound"].get<double>(), 1e-12);
  EXPECT_EQ(j["label"]["z"][0].get<double>(), 1.0);
  EXPECT_TRUE(j["label"]["k"].is_number());
}

TEST(Json, IdentityReport) {
  IdentityQuadrature q;
  q.j_order = 4;
  q.jp_order = 4;
  const auto r = resolve_identity(BiCoherentIdentity{0, 2, 1}, q);
  const auto j = io::to_json(r);
  EXPECT_EQ(j["dimension"], 6);
  EXPECT_EQ(j["frame"]["re"].size(), 6u);
  EXPECT_EQ(j["quadrature"][0]["rule"], "gauss_laguerre(gamma=1, kappa=1)");
  EXPECT_FALSE(io::to_json(r, false).contains("frame"));
}

TEST(MatrixCsv, LongFormat) {
  Eigen::MatrixXcd m(1, 2);
  m(0, 0) = {1.0, 0.0};
  m(0, 1) = {0.1, -2.0};
  std::ostringstream os;
  io::write_matrix_csv(os, m);
  EXPECT_EQ(os.str(), "row,col,re,im\n0,0,1,0\n0,1,0.10000000000000001,-2\n");
}
