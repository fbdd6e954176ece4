#include "emprint/eim.hpp"
#include "emprint/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <map>

namespace emprint {
namespace {

using testing::chirp_basis;
using testing::poly_basis;

constexpr SelectionCriterion kAll[] = {SelectionCriterion::Classic, SelectionCriterion::MinKappa,
                                       SelectionCriterion::MinLambda};

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no emprint::Error thrown";
  return ErrorCode::InvalidArgument;
}

const EmpiricalInterpolant& chirp_interpolant(SelectionCriterion c) {
  static const std::map<SelectionCriterion, EmpiricalInterpolant> cache = [] {
    std::map<SelectionCriterion, EmpiricalInterpolant> m;
    for (auto crit : kAll) m.emplace(crit, build_interpolant(chirp_basis(), crit, chirp_basis().size()));
    return m;
  }();
  return cache.at(c);
}

// Independent assembly of V_j(T_1..T_{j-1}, t) for the oracle checks.
testing::EigenMatrix oracle_v(const ComplexMatrix& basis, std::span<const std::size_t> prev,
                              std::size_t t) {
  const auto j = static_cast<Eigen::Index>(prev.size() + 1);
  testing::EigenMatrix v(j, j);
  for (Eigen::Index i = 0; i < j; ++i) {
    const std::size_t node = i + 1 < j ? prev[static_cast<std::size_t>(i)] : t;
    for (Eigen::Index c = 0; c < j; ++c) v(i, c) = basis(static_cast<std::size_t>(c), node);
  }
  return v;
}

double oracle_kappa(const testing::EigenMatrix& v) {
  const auto s = v.jacobiSvd().singularValues();
  return s(s.size() - 1) == 0.0 ? kInfinity : s(0) / s(s.size() - 1);
}

double oracle_inverse_norm(const testing::EigenMatrix& v) {
  const auto s = v.jacobiSvd().singularValues();
  return s(s.size() - 1) == 0.0 ? kInfinity : 1.0 / s(s.size() - 1);
}

TEST(Criterion, Names) {
  for (auto c : kAll) EXPECT_EQ(parse_criterion(to_string(c)), c);
  EXPECT_EQ(code_of([] { parse_criterion("greedy"); }), ErrorCode::InvalidArgument);
}

TEST(BuildInterpolant, FirstNodeIsMaxModulus) {
  const TimeGrid grid(0.0, 1.0, 20);
  ComplexMatrix e(1, 20);
  for (std::size_t t = 0; t < 20; ++t) e(0, t) = Complex(0.1, 0.05 * static_cast<double>(t % 5));
  e(0, 7) = Complex(0.0, -0.9);
  const ReducedBasis rb(grid, e, {}, {}, 0.0);
  for (auto c : kAll) EXPECT_EQ(build_interpolant(rb, c, 1).node_indices(), std::vector<std::size_t>{7});
}

TEST(BuildInterpolant, ClassicInterpolationConditions) {
  const auto& itp = chirp_interpolant(SelectionCriterion::Classic);
  const auto& nodes = itp.node_indices();
  for (std::size_t j = 2; j <= itp.size(); ++j) {
    const std::span<const std::size_t> prev(nodes.data(), j - 1);
    const auto r = interpolation_residual(itp.basis(), prev);
    for (auto t : prev) EXPECT_LE(std::abs(r[t]), 1e-10) << "j=" << j;
  }
}

TEST(BuildInterpolant, ClassicResidualMatchesDeterminantRatio) {
  const auto rb = chirp_basis().truncated(15);
  const auto itp = build_interpolant(rb, SelectionCriterion::Classic, 15);
  const auto& steps = itp.per_step();
  for (std::size_t j = 2; j <= 15; ++j) {
    const double ratio = std::abs(steps[j - 1].det_v) / std::abs(steps[j - 2].det_v);
    EXPECT_NEAR(steps[j - 1].residual_at_node, ratio, 1e-8 * ratio) << "j=" << j;
  }
  EXPECT_LE(verify_theorem(rb, 15).max_discrepancy(), 1e-8);
}

TEST(BuildInterpolant, ClassicMaximizesDeterminantProperty) {
  for (const auto* rb : {&poly_basis(), &chirp_basis()}) {
    const auto itp = build_interpolant(*rb, SelectionCriterion::Classic, rb->size());
    const auto& nodes = itp.node_indices();
    for (std::size_t j = 2; j <= itp.size(); ++j) {
      const std::span<const std::size_t> prev(nodes.data(), j - 1);
      const double chosen = std::abs(oracle_v(itp.basis(), prev, nodes[j - 1]).determinant());
      for (std::size_t t = 0; t < rb->grid().size(); ++t)
        EXPECT_LE(std::abs(oracle_v(itp.basis(), prev, t).determinant()), chosen * (1 + 1e-9));
    }
  }
}

TEST(BuildInterpolant, MinKappaExhaustiveOptimality) {
  const auto& itp = chirp_interpolant(SelectionCriterion::MinKappa);
  const auto& nodes = itp.node_indices();
  for (std::size_t j = 2; j <= itp.size(); ++j) {
    const std::span<const std::size_t> prev(nodes.data(), j - 1);
    const double chosen = oracle_kappa(oracle_v(itp.basis(), prev, nodes[j - 1]));
    for (std::size_t t = 0; t < itp.grid().size(); ++t) {
      if (std::find(prev.begin(), prev.end(), t) != prev.end()) continue;
      EXPECT_LE(chosen, oracle_kappa(oracle_v(itp.basis(), prev, t)) * (1 + 1e-9)) << j << "," << t;
    }
  }
}

TEST(BuildInterpolant, MinLambdaExhaustiveOptimality) {
  const auto& itp = chirp_interpolant(SelectionCriterion::MinLambda);
  const auto& nodes = itp.node_indices();
  for (std::size_t j = 2; j <= itp.size(); ++j) {
    const std::span<const std::size_t> prev(nodes.data(), j - 1);
    const double chosen = oracle_inverse_norm(oracle_v(itp.basis(), prev, nodes[j - 1]));
    for (std::size_t t = 0; t < itp.grid().size(); ++t) {
      if (std::find(prev.begin(), prev.end(), t) != prev.end()) continue;
      EXPECT_LE(chosen, oracle_inverse_norm(oracle_v(itp.basis(), prev, t)) * (1 + 1e-9));
    }
  }
}

TEST(BuildInterpolant, CardinalityProperty) {
  for (auto c : kAll) {
    const auto& itp = chirp_interpolant(c);
    for (std::size_t i = 0; i < itp.size(); ++i)
      for (std::size_t j = 0; j < itp.size(); ++j)
        EXPECT_LE(std::abs(itp.b_matrix()(i, itp.node_indices()[j]) - (i == j ? 1.0 : 0.0)), 1e-10);
  }
}

TEST(BuildInterpolant, NestednessProperty) {
  const auto& rb = chirp_basis();
  for (auto c : kAll) {
    const auto& full = chirp_interpolant(c).node_indices();
    for (std::size_t n : {1u, 4u, 9u, static_cast<unsigned>(rb.size() - 1)}) {
      const auto nodes = build_interpolant(rb, c, n).node_indices();
      EXPECT_TRUE(std::equal(nodes.begin(), nodes.end(), full.begin())) << to_string(c) << " n=" << n;
    }
  }
}

TEST(BuildInterpolant, ExactOnSpanProperty) {
  for (auto c : kAll) {
    const auto& itp = chirp_interpolant(c);
    for (std::size_t k = 0; k < itp.size(); ++k) {
      const auto e = itp.basis().row(k);
      const auto back = interpolate_function(itp, e);
      double diff = 0.0;
      for (std::size_t t = 0; t < e.size(); ++t) diff += std::norm(back[t] - e[t]);
      EXPECT_LE(std::sqrt(diff), 1e-9 * testing::euclid_norm(e)) << to_string(c) << " k=" << k;
    }
  }
}

TEST(BuildInterpolant, NodesDistinctProperty) {
  for (auto c : kAll) {
    auto nodes = chirp_interpolant(c).node_indices();
    std::sort(nodes.begin(), nodes.end());
    EXPECT_EQ(std::adjacent_find(nodes.begin(), nodes.end()), nodes.end());
  }
}

TEST(BuildInterpolant, PerStepMatchesStoredPrefix) {
  const auto& itp = chirp_interpolant(SelectionCriterion::MinKappa);
  for (std::size_t j = 1; j <= itp.size(); ++j) {
    const auto vj = itp.v_matrix().leading_block(j);
    const double ref = oracle_kappa(testing::to_eigen(vj));
    EXPECT_NEAR(itp.per_step()[j - 1].kappa, ref, 1e-10 * ref);
    EXPECT_GE(itp.per_step()[j - 1].kappa, 1.0 - 1e-12);
  }
}

TEST(BuildInterpolant, ThreadCountDoesNotChangeResult) {
  const auto& rb = chirp_basis();
  for (auto c : {SelectionCriterion::MinKappa, SelectionCriterion::MinLambda}) {
    const auto one = build_interpolant(rb, c, 8, {FirstNodeRule::MaxModulus, 1});
    const auto four = build_interpolant(rb, c, 8, {FirstNodeRule::MaxModulus, 4});
    EXPECT_EQ(one.node_indices(), four.node_indices());
  }
}

TEST(BuildInterpolant, FirstNodeVariant) {
  const auto& rb = chirp_basis();
  const auto classic = build_interpolant(rb, SelectionCriterion::Classic, 1).node_indices();
  // Lambda on a 1x1 matrix is 1/|e_1(t)|, so its own rule agrees with max modulus.
  EXPECT_EQ(build_interpolant(rb, SelectionCriterion::MinLambda, 1, {FirstNodeRule::ApplyCriterion, 0})
                .node_indices(),
            classic);
  // Kappa is 1 at every nonzero sample; the lowest such index wins the tie.
  std::size_t first_nonzero = 0;
  while (rb.basis()(0, first_nonzero) == Complex{}) ++first_nonzero;
  EXPECT_EQ(build_interpolant(rb, SelectionCriterion::MinKappa, 1, {FirstNodeRule::ApplyCriterion, 0})
                .node_indices()
                .front(),
            first_nonzero);
}

TEST(BuildInterpolant, Errors) {
  const auto& rb = poly_basis();
  EXPECT_EQ(code_of([&] { build_interpolant(rb, SelectionCriterion::Classic, 0); }),
            ErrorCode::BadTruncation);
  EXPECT_EQ(code_of([&] { build_interpolant(rb, SelectionCriterion::Classic, 11); }),
            ErrorCode::BadTruncation);

  // Three orthonormal rows on a two-sample grid.
  const TimeGrid tiny(0.0, 1.0, 2);
  ComplexMatrix e(3, 2);
  e(0, 0) = 1.0;
  e(1, 1) = 1.0;
  e(2, 0) = 0.5;
  const ReducedBasis wide(tiny, e, {}, {}, 0.0);
  EXPECT_EQ(code_of([&] { build_interpolant(wide, SelectionCriterion::MinKappa, 3); }),
            ErrorCode::NoAdmissibleNode);
}

TEST(BuildInterpolant, DependentBasisIsSingular) {
  auto data = chirp_basis().basis().top_rows(4);
  for (std::size_t t = 0; t < data.cols(); ++t) data(3, t) = data(1, t);
  const ReducedBasis corrupted(chirp_basis().grid(), data, {}, {}, 0.0);
  for (auto c : kAll)
    EXPECT_EQ(code_of([&] { build_interpolant(corrupted, c, 4); }), ErrorCode::SingularVMatrix)
        << to_string(c);
}

TEST(FromNodes, RejectsRepeatedNodes) {
  EXPECT_EQ(code_of([] { EmpiricalInterpolant::from_nodes(poly_basis(), {3, 5, 3}, SelectionCriterion::Classic); }),
            ErrorCode::SingularVMatrix);
}

TEST(Interpolate, IdentityRowsGiveCardinalFunctions) {
  const auto& itp = chirp_interpolant(SelectionCriterion::Classic);
  for (std::size_t i = 0; i < itp.size(); ++i) {
    std::vector<Complex> v(itp.size());
    v[i] = 1.0;
    const auto out = interpolate(itp, v);
    EXPECT_LE(testing::max_abs_diff(out, itp.b_matrix().row(i)), 1e-15);
  }
}

TEST(Interpolate, ZeroAndLength) {
  const auto& itp = chirp_interpolant(SelectionCriterion::Classic);
  EXPECT_EQ(testing::max_abs(interpolate(itp, std::vector<Complex>(itp.size()))), 0.0);
  EXPECT_EQ(code_of([&] { interpolate(itp, std::vector<Complex>(itp.size() + 1)); }),
            ErrorCode::LengthMismatch);
  EXPECT_EQ(code_of([&] { interpolate_function(itp, std::vector<Complex>(5)); }), ErrorCode::LengthMismatch);
}

TEST(Interpolate, ExactOnNodesForArbitraryInput) {
  std::mt19937_64 rng(31);
  for (auto c : kAll) {
    const auto& itp = chirp_interpolant(c);
    const auto h = testing::random_vector(itp.grid().size(), rng);
    const auto out = interpolate_function(itp, h);
    for (auto t : itp.node_indices()) EXPECT_LE(std::abs(out[t] - h[t]), 1e-10);
  }
}

TEST(Interpolate, InSpanCombination) {
  std::mt19937_64 rng(32);
  const auto& itp = chirp_interpolant(SelectionCriterion::MinLambda);
  const auto c = testing::random_vector(itp.size(), rng);
  std::vector<Complex> h(itp.grid().size());
  for (std::size_t i = 0; i < itp.size(); ++i)
    for (std::size_t t = 0; t < h.size(); ++t) h[t] += c[i] * itp.basis()(i, t);
  const auto out = interpolate_function(itp, h);
  double diff = 0.0;
  for (std::size_t t = 0; t < h.size(); ++t) diff += std::norm(out[t] - h[t]);
  EXPECT_LE(std::sqrt(diff), 1e-9 * testing::euclid_norm(h));
}

TEST(Interpolate, LebesgueBoundProperty) {
  std::mt19937_64 rng(33);
  const auto& rb = chirp_basis();
  for (auto c : kAll) {
    const auto& full = chirp_interpolant(c);
    for (std::size_t n : {1u, 3u, 7u, static_cast<unsigned>(rb.size())}) {
      const auto itp = full.prefix(n);
      const double lambda = itp.per_step().back().lambda;
      for (int trial = 0; trial < 5; ++trial) {
        const auto h = testing::random_vector(rb.grid().size(), rng);
        const auto ih = interpolate_function(itp, h);
        std::vector<Complex> d(h.size());
        for (std::size_t t = 0; t < h.size(); ++t) d[t] = h[t] - ih[t];
        const double interp_err = discrete_norm(d, rb.grid());
        const double proj_err = std::sqrt(projection_error_sq(rb, h, n));
        EXPECT_LE(proj_err, interp_err * (1 + 1e-12));
        EXPECT_LE(interp_err, lambda * proj_err * (1 + 1e-8)) << to_string(c) << " n=" << n;
      }
    }
  }
}

TEST(Theorem, TwoStepClosedForm) {
  std::mt19937_64 rng(41);
  const TimeGrid grid(0.0, 1.0, 30);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rb = testing::random_unitary_basis(2, grid, rng);
    const auto& e = rb.basis();
    std::size_t t1 = 0;
    for (std::size_t t = 1; t < 30; ++t)
      if (std::abs(e(0, t)) > std::abs(e(0, t1))) t1 = t;
    std::vector<Complex> closed(30);
    for (std::size_t t = 0; t < 30; ++t)
      closed[t] = (e(1, t) * e(0, t1) - e(1, t1) * e(0, t)) / e(0, t1);
    std::size_t t2 = 0;
    for (std::size_t t = 1; t < 30; ++t)
      if (std::abs(closed[t]) > std::abs(closed[t2])) t2 = t;

    const auto report = verify_theorem(rb, 2);
    ASSERT_EQ(report.steps.size(), 1u);
    EXPECT_EQ(report.nodes, (std::vector<std::size_t>{t1, t2}));
    EXPECT_LE(report.steps[0].max_rel_discrepancy, 1e-10);
    EXPECT_LE(std::abs(report.steps[0].residual_at_node - closed[t2]), 1e-10);
    EXPECT_LE(std::abs(report.steps[0].det_ratio_at_node - closed[t2]), 1e-10);
    const std::size_t prev[] = {t1};
    const auto r = interpolation_residual(e, prev);
    EXPECT_LE(testing::max_abs_diff(r, closed), 1e-10);
  }
}

TEST(Theorem, VanishesAtEarlierNodes) {
  const auto report = verify_theorem(chirp_basis(), chirp_basis().size());
  for (const auto& s : report.steps) EXPECT_LE(s.max_at_previous_nodes, 1e-10) << "j=" << s.j;
}

TEST(Theorem, DampedChirpTwelve) {
  const auto report = verify_theorem(chirp_basis(), 12);
  EXPECT_EQ(report.steps.size(), 11u);
  for (const auto& s : report.steps) EXPECT_LE(s.max_rel_discrepancy, 1e-7) << "j=" << s.j;
}

TEST(Theorem, LaplaceDeterminantCrossCheck) {
  // Small-step determinants against a cofactor expansion that shares no code
  // with the LU path.
  const auto rb = chirp_basis().truncated(5);
  const auto itp = build_interpolant(rb, SelectionCriterion::Classic, 5);
  for (std::size_t j = 1; j <= 5; ++j) {
    const Complex ref = testing::laplace_determinant(itp.v_matrix().leading_block(j));
    EXPECT_LE(std::abs(itp.per_step()[j - 1].det_v - ref), 1e-10 * std::abs(ref));
  }
}

TEST(Serialization, JsonCarriesNodesAndOptionalMatrices) {
  const auto itp = build_interpolant(poly_basis(), SelectionCriterion::MinLambda, 4);
  const auto plain = interpolant_to_json(itp, false);
  const auto full = interpolant_to_json(itp, true);
  EXPECT_NE(plain.find("\"node_indices\""), std::string::npos);
  EXPECT_NE(plain.find("\"lambda\""), std::string::npos);
  EXPECT_EQ(plain.find("b_matrix_csv"), std::string::npos);
  EXPECT_NE(full.find("b_matrix_csv"), std::string::npos);
  EXPECT_NE(full.find("v_matrix_csv"), std::string::npos);
  EXPECT_EQ(interpolant_to_json(itp, true), full);
}

}  // namespace
}  // namespace emprint
