#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "test_util.hpp"

using namespace dmgsp;
using dmgsp::test::code_of;

TEST(PairwiseSqDistances, UnitSeparation) {
  Eigen::MatrixXd x(2, 1);
  x << 0, 1;
  Eigen::MatrixXd d = pairwise_sq_distances(x);
  EXPECT_DOUBLE_EQ(d(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(d(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(d(0, 0), 0.0);
}

TEST(PairwiseSqDistances, ThreeFourFive) {
  Eigen::MatrixXd x(2, 2);
  x << 0, 0, 3, 4;
  EXPECT_DOUBLE_EQ(pairwise_sq_distances(x)(0, 1), 25.0);
}

// oracle: naive double loop over coordinates
TEST(PairwiseSqDistances, MatchesDoubleLoopOracle) {
  Rng rng(42);
  Eigen::MatrixXd x(10, 3);
  for (Eigen::Index i = 0; i < 10; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = rng.normal();
  Eigen::MatrixXd d = pairwise_sq_distances(x);
  for (Eigen::Index i = 0; i < 10; ++i)
    for (Eigen::Index j = 0; j < 10; ++j) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < 3; ++k) {
        double diff = x(i, k) - x(j, k);
        acc += diff * diff;
      }
      EXPECT_NEAR(d(i, j), acc, 1e-12);
    }
}

TEST(GaussianAffinity, KernelValues) {
  Eigen::MatrixXd d(3, 3);
  d << 0, 0, 2, 0, 0, 2, 2, 2, 0;  // duplicate points 0 and 1
  const double sigma = 1.0;
  Eigen::MatrixXd w = gaussian_affinity(d, sigma);
  EXPECT_DOUBLE_EQ(w(0, 1), 1.0);                // kernel at zero distance
  EXPECT_NEAR(w(0, 2), std::exp(-1.0), 1e-15);   // D = 2 sigma^2
  EXPECT_DOUBLE_EQ(w(0, 0), 0.0);                // diagonal forced to zero
}

TEST(GaussianAffinity, LargeBandwidthLimit) {
  Rng rng(5);
  Eigen::MatrixXd x(6, 2);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) x(i, j) = rng.uniform();
  Eigen::MatrixXd w = gaussian_affinity(pairwise_sq_distances(x), 1e6);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 6; ++j)
      if (i != j) EXPECT_NEAR(w(i, j), 1.0, 1e-6);
}

TEST(MedianBandwidth, HandEnumeratedPdist) {
  Eigen::MatrixXd x(3, 1);
  x << 0, 1, 2;  // pairwise distances {1,1,2}, median 1
  EXPECT_DOUBLE_EQ(median_bandwidth(x), 0.5);
  EXPECT_DOUBLE_EQ(median_bandwidth(x, 1.0), 1.0);
}

TEST(MedianBandwidth, DegenerateData) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 2);
  EXPECT_EQ(code_of([&] { median_bandwidth(x); }), errc::degenerate_data);
}

TEST(BghBandwidth, LineRecoversDimensionOne) {
  Eigen::MatrixXd x(50, 3);
  x.setZero();
  for (Eigen::Index i = 0; i < 50; ++i) x(i, 0) = static_cast<double>(i) / 50.0;
  Eigen::MatrixXd d = pairwise_sq_distances(x);
  BghResult result = bgh_bandwidth(d);
  EXPECT_GE(result.intrinsic_dim, 1);
  EXPECT_LE(result.intrinsic_dim, 2);
  EXPECT_FALSE(result.no_maximum);

  // oracle: same scan on a 10x finer epsilon grid
  double best_slope = -1.0;
  double prev_log_t = 0.0, prev_log_eps = 0.0;
  bool have_prev = false;
  for (double e = -40.0; e <= 40.0; e += 0.1) {
    const double eps = std::pow(2.0, e);
    const double log_t = std::log((-d.array() / (4.0 * eps)).exp().sum());
    const double log_eps = e * std::log(2.0);
    if (have_prev) {
      double slope = (log_t - prev_log_t) / (log_eps - prev_log_eps);
      best_slope = std::max(best_slope, slope);
    }
    prev_log_t = log_t;
    prev_log_eps = log_eps;
    have_prev = true;
  }
  const int oracle_dim = static_cast<int>(std::lround(2.0 * best_slope));
  EXPECT_GE(oracle_dim, 1);
  EXPECT_LE(oracle_dim, 2);
}

TEST(BghBandwidth, SlopeVanishesAtBothEnds) {
  Rng rng(3);
  Eigen::MatrixXd x(20, 2);
  for (Eigen::Index i = 0; i < 20; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) x(i, j) = rng.uniform();
  Eigen::MatrixXd d = pairwise_sq_distances(x);
  // at the boundaries T saturates (n^2 above, n below), so the local slope
  // must be near zero there
  auto slope_at = [&](double e) {
    const double eps0 = std::pow(2.0, e), eps1 = std::pow(2.0, e + 1);
    const double t0 = std::log((-d.array() / (4.0 * eps0)).exp().sum());
    const double t1 = std::log((-d.array() / (4.0 * eps1)).exp().sum());
    return (t1 - t0) / std::log(2.0);
  };
  EXPECT_NEAR(slope_at(38.0), 0.0, 1e-6);
  EXPECT_NEAR(slope_at(-40.0), 0.0, 1e-6);
}

TEST(BghBandwidth, MonotoneSlopeFlagsBoundary) {
  // two coincident points: T is constant in eps, the slope never peaks
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  BghResult result = bgh_bandwidth(d);
  EXPECT_TRUE(result.no_maximum);
}

TEST(MarkovMatrix, UnitDegreeSwap) {
  TransitionMatrix tm = markov_matrix(test::two_node().weights());
  Eigen::MatrixXd expected(2, 2);
  expected << 0, 1, 1, 0;
  EXPECT_TRUE(tm.p == expected);
}

TEST(MarkovMatrix, ScaleInvariance) {
  TransitionMatrix a = markov_matrix(test::two_node(1.0).weights());
  TransitionMatrix b = markov_matrix(test::two_node(2.0).weights());
  EXPECT_LT((a.p - b.p).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(MarkovMatrix, RowStochastic) {
  Graph g = random_sensor_graph(8, 11);
  TransitionMatrix tm = markov_matrix(g.weights());
  Eigen::VectorXd row_sums = tm.p.rowwise().sum();
  EXPECT_LE((row_sums - Eigen::VectorXd::Ones(8)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GE(tm.p.minCoeff(), 0.0);
  EXPECT_LE(tm.p.maxCoeff(), 1.0);
}

TEST(MarkovMatrix, RejectsIsolatedNode) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
  w(0, 1) = w(1, 0) = 1.0;
  EXPECT_EQ(code_of([&] { markov_matrix(w); }), errc::isolated_node);
}

// oracle: symmetric eigensolve of the explicitly formed P_sym
TEST(Decompose, TriangleSpectrum) {
  TransitionMatrix tm = markov_matrix(test::triangle().weights());
  SpectralDecomposition dec = decompose(tm);
  EXPECT_NEAR(dec.eigenvalues(0), 1.0, 1e-12);
  EXPECT_NEAR(dec.eigenvalues(1), -0.5, 1e-12);
  EXPECT_NEAR(dec.eigenvalues(2), -0.5, 1e-12);

  Eigen::VectorXd d = tm.degrees;
  Eigen::MatrixXd p_sym = d.array().sqrt().matrix().asDiagonal() * tm.p *
                          d.array().rsqrt().matrix().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(p_sym);
  Eigen::VectorXd sorted = oracle.eigenvalues();
  EXPECT_NEAR(sorted(2), 1.0, 1e-12);
  EXPECT_NEAR(sorted(0), -0.5, 1e-12);
}

TEST(Decompose, TrivialVectorConstant) {
  Graph g = random_sensor_graph(15, 4);
  SpectralDecomposition dec = decompose(markov_matrix(g.weights()));
  Eigen::VectorXd psi0 = dec.right_vectors.col(0);
  psi0 /= psi0.norm();
  EXPECT_LE(psi0.maxCoeff() - psi0.minCoeff(), 1e-8);
}

TEST(Decompose, EigenvaluesMatchGeneralSolverOnP) {
  Graph g = random_sensor_graph(12, 9);
  TransitionMatrix tm = markov_matrix(g.weights());
  SpectralDecomposition dec = decompose(tm);

  Eigen::EigenSolver<Eigen::MatrixXd> general(tm.p);
  std::vector<double> general_mags;
  for (Eigen::Index i = 0; i < 12; ++i) {
    EXPECT_NEAR(general.eigenvalues()(i).imag(), 0.0, 1e-10);
    general_mags.push_back(general.eigenvalues()(i).real());
  }
  std::sort(general_mags.begin(), general_mags.end());
  Eigen::VectorXd ours = dec.eigenvalues;
  std::sort(ours.data(), ours.data() + ours.size());
  for (Eigen::Index i = 0; i < 12; ++i)
    EXPECT_NEAR(ours(i), general_mags[static_cast<std::size_t>(i)], 1e-10);
}

TEST(Decompose, InvariantsHold) {
  Graph g = random_sensor_graph(20, 21);
  TransitionMatrix tm = markov_matrix(g.weights());
  SpectralDecomposition dec = decompose(tm);

  EXPECT_NEAR(dec.eigenvalues(0), 1.0, 1e-8);
  for (Eigen::Index i = 0; i < 20; ++i)
    EXPECT_LE(std::abs(dec.eigenvalues(i)), 1.0 + 1e-10);
  // magnitude ordering
  for (Eigen::Index i = 0; i + 1 < 20; ++i)
    EXPECT_GE(std::abs(dec.eigenvalues(i)),
              std::abs(dec.eigenvalues(i + 1)) - 1e-14);

  Eigen::MatrixXd gram = dec.left_vectors.transpose() * dec.right_vectors;
  EXPECT_LE((gram - Eigen::MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff(),
            1e-8);

  for (Eigen::Index i = 0; i < 20; ++i) {
    Eigen::VectorXd residual =
        tm.p * dec.right_vectors.col(i) -
        dec.eigenvalues(i) * dec.right_vectors.col(i);
    EXPECT_LE(residual.norm(), 1e-8);
  }
}

TEST(Decompose, SignConventionIsReproducible) {
  Graph g = random_sensor_graph(10, 2);
  SpectralDecomposition a = decompose(markov_matrix(g.weights()));
  SpectralDecomposition b = decompose(markov_matrix(g.weights()));
  EXPECT_TRUE(a.right_vectors == b.right_vectors);
  for (Eigen::Index j = 0; j < 10; ++j) {
    Eigen::Index arg_max = 0;
    a.right_vectors.col(j).cwiseAbs().maxCoeff(&arg_max);
    EXPECT_GT(a.right_vectors(arg_max, j), 0.0);
  }
}

TEST(Embedding, TimeZeroGivesRawEigenvectors) {
  Graph g = random_sensor_graph(10, 6);
  SpectralDecomposition dec = decompose(markov_matrix(g.weights()));
  DiffusionMapEmbedding emb = embedding(dec, 0.0, 4);
  for (Eigen::Index j = 1; j <= 4; ++j)
    EXPECT_LT(
        (emb.coords.col(j - 1) - dec.right_vectors.col(j)).cwiseAbs().maxCoeff(),
        1e-15);
}

TEST(Embedding, ExponentLaw) {
  Graph g = random_sensor_graph(10, 6);
  SpectralDecomposition dec = decompose(markov_matrix(g.weights()));
  DiffusionMapEmbedding t1 = embedding(dec, 1.0, 5);
  DiffusionMapEmbedding t2 = embedding(dec, 2.0, 5);
  for (Eigen::Index j = 1; j <= 5; ++j) {
    Eigen::VectorXd expected = dec.eigenvalues(j) * t1.coords.col(j - 1);
    EXPECT_LT((t2.coords.col(j - 1) - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

// oracle: direct summation of the eigen-sum distance formula
TEST(Embedding, FullRankDistanceMatchesEigenSum) {
  Graph g = random_sensor_graph(12, 13);
  SpectralDecomposition dec = decompose(markov_matrix(g.weights()));
  const double t = 2.0;
  DiffusionMapEmbedding emb = embedding(dec, t, 11);
  for (Eigen::Index i = 0; i < 12; ++i)
    for (Eigen::Index j = 0; j < 12; ++j) {
      double acc = 0.0;
      for (Eigen::Index m = 1; m < 12; ++m) {
        double diff = dec.right_vectors(i, m) - dec.right_vectors(j, m);
        acc += std::pow(dec.eigenvalues(m), 2.0 * t) * diff * diff;
      }
      EXPECT_NEAR(diffusion_distance(emb, i, j), std::sqrt(acc), 1e-10);
    }
}

TEST(Embedding, ColumnNormScaling) {
  Graph g = random_sensor_graph(10, 8);
  SpectralDecomposition dec = decompose(markov_matrix(g.weights()));
  DiffusionMapEmbedding emb = embedding(dec, 3.0, 5);
  for (Eigen::Index j = 1; j <= 5; ++j) {
    double expected = std::pow(std::abs(dec.eigenvalues(j)), 3.0) *
                      dec.right_vectors.col(j).norm();
    EXPECT_NEAR(emb.coords.col(j - 1).norm(), expected, 1e-12);
  }
}

TEST(Embedding, BadTruncationRejected) {
  Graph g = random_sensor_graph(6, 1);
  SpectralDecomposition dec = decompose(markov_matrix(g.weights()));
  EXPECT_EQ(code_of([&] { embedding(dec, 1.0, 0); }), errc::bad_truncation);
  EXPECT_EQ(code_of([&] { embedding(dec, 1.0, 6); }), errc::bad_truncation);
}

TEST(Embedding, NonIntegerTimeWithNegativeEigenvalueWarns) {
  // path graph has a negative eigenvalue
  SpectralDecomposition dec = decompose(markov_matrix(test::path3().weights()));
  EXPECT_LT(dec.eigenvalues.minCoeff(), 0.0);
  DiffusionMapEmbedding integer_t = embedding(dec, 2.0, 2);
  EXPECT_FALSE(integer_t.noninteger_negative_power);
  DiffusionMapEmbedding frac_t = embedding(dec, 1.5, 2);
  EXPECT_TRUE(frac_t.noninteger_negative_power);
}

TEST(DiffusionDistance, IdentityAndSymmetry) {
  Graph g = random_sensor_graph(9, 3);
  SpectralDecomposition dec = decompose(markov_matrix(g.weights()));
  DiffusionMapEmbedding emb = embedding(dec, 1.0, 4);
  EXPECT_DOUBLE_EQ(diffusion_distance(emb, 3, 3), 0.0);
  EXPECT_DOUBLE_EQ(diffusion_distance(emb, 2, 7), diffusion_distance(emb, 7, 2));
}

TEST(StationaryDistribution, RegularGraphUniform) {
  Graph g = test::circulant(8, 2);
  SpectralDecomposition dec = decompose(markov_matrix(g.weights()));
  Eigen::VectorXd pi = stationary_distribution(dec);
  for (Eigen::Index i = 0; i < 8; ++i) EXPECT_NEAR(pi(i), 1.0 / 8.0, 1e-10);
}

// oracle: power iteration on P^T
TEST(StationaryDistribution, StarMatchesPowerIteration) {
  Graph g = test::star4();
  TransitionMatrix tm = markov_matrix(g.weights());
  SpectralDecomposition dec = decompose(tm);
  // the star is bipartite, so damp the chain for the oracle and the call
  // uses degrees directly: pi = d / sum(d) = [1/2, 1/6, 1/6, 1/6]
  Eigen::VectorXd expected(4);
  expected << 0.5, 1.0 / 6, 1.0 / 6, 1.0 / 6;

  // power iteration on the lazy chain (I+P)/2, which shares the stationary
  // distribution but kills the period-2 oscillation
  Eigen::MatrixXd lazy = 0.5 * (Eigen::MatrixXd::Identity(4, 4) + tm.p);
  Eigen::VectorXd pi = Eigen::VectorXd::Constant(4, 0.25);
  for (int it = 0; it < 500; ++it) {
    pi = lazy.transpose() * pi;
    pi /= pi.sum();
  }
  EXPECT_LE((pi - expected).cwiseAbs().maxCoeff(), 1e-10);

  // the star graph itself is bipartite: |lambda_1| = 1, so the library
  // rejects it as non-ergodic
  EXPECT_EQ(code_of([&] { stationary_distribution(dec); }), errc::not_ergodic);
}

TEST(StationaryDistribution, FixedPointResidual) {
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    Graph g = random_sensor_graph(15, seed);
    TransitionMatrix tm = markov_matrix(g.weights());
    Eigen::VectorXd pi = stationary_distribution(decompose(tm));
    EXPECT_LE((tm.p.transpose() * pi - pi).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(pi.sum(), 1.0, 1e-12);
    // undirected random walk: pi = d / sum(d)
    Eigen::VectorXd expected = tm.degrees / tm.degrees.sum();
    EXPECT_LE((pi - expected).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(StationaryDistribution, DisconnectedRejected) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
  w(0, 1) = w(1, 0) = 1.0;
  w(2, 3) = w(3, 2) = 1.0;
  SpectralDecomposition dec = decompose(markov_matrix(w));
  EXPECT_EQ(code_of([&] { stationary_distribution(dec); }), errc::not_ergodic);
}

TEST(TransitionMatrix, StochasticityUnderPowers) {
  Graph g = random_sensor_graph(12, 17);
  TransitionMatrix tm = markov_matrix(g.weights());
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(12, 12);
  for (int t = 1; t <= 50; ++t) {
    power = power * tm.p;
    EXPECT_LE((power * Eigen::VectorXd::Ones(12) - Eigen::VectorXd::Ones(12))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-8)
        << "t = " << t;
  }
}

TEST(TransitionMatrix, MixingToStationary) {
  // complete graph: |lambda_1| = 1/(n-1) << 0.9
  Graph g = test::circulant(5, 2);  // K5
  TransitionMatrix tm = markov_matrix(g.weights());
  SpectralDecomposition dec = decompose(tm);
  ASSERT_LE(std::abs(dec.eigenvalues(1)), 0.9);
  Eigen::VectorXd pi = stationary_distribution(dec);

  Rng rng(77);
  Eigen::MatrixXd p50 = Eigen::MatrixXd::Identity(5, 5);
  for (int t = 0; t < 50; ++t) p50 = p50 * tm.p;
  for (int probe = 0; probe < 10; ++probe) {
    Eigen::VectorXd x = test::random_vector(5, rng);
    x /= x.norm();
    Eigen::VectorXd limit = Eigen::VectorXd::Constant(5, pi.dot(x));
    EXPECT_LE((p50 * x - limit).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(EmbeddingCsv, HeaderRecordsParameters) {
  Graph g = random_sensor_graph(8, 30);
  SpectralDecomposition dec = decompose(markov_matrix(g.weights()));
  DiffusionMapEmbedding emb = embedding(dec, 1.0, 3);
  const std::string path = testing::TempDir() + "emb.csv";
  write_embedding_csv(path, emb, 0.25);
  std::ifstream in(path);
  std::string first, second;
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(first, "# t=1 l=3 sigma=0.25");
  EXPECT_EQ(second, "node,coord_1,coord_2,coord_3");
}
