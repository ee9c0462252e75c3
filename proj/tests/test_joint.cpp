#include <doctest.h>

#include "nnse/errors.hpp"
#include "nnse/joint.hpp"
#include "oracles.hpp"
#include "planted.hpp"

using namespace nnse;

namespace {

Eigen::MatrixXd unit_ball_rows(Eigen::MatrixXd d) {
  for (Eigen::Index j = 0; j < d.rows(); ++j)
    if (d.row(j).norm() > 1.0) d.row(j).normalize();
  return d;
}

}  // namespace

TEST_CASE("jnnse_objective special cases and scalar-loop oracle") {
  const Eigen::MatrixXd x = oracle::random_matrix(5, 3, 1);
  const Eigen::MatrixXd y = oracle::random_matrix(5, 4, 2);
  const Eigen::MatrixXd dx = unit_ball_rows(oracle::random_matrix(2, 3, 3));
  const Eigen::MatrixXd dy = unit_ball_rows(oracle::random_matrix(2, 4, 4));
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(5, 2);
  CHECK(jnnse_objective(x, y, zero, dx, dy, 0.1) ==
        doctest::Approx(x.squaredNorm() + y.squaredNorm()).epsilon(1e-14));

  const Eigen::MatrixXd a = oracle::random_matrix(5, 2, 5).cwiseAbs();
  CHECK(jnnse_objective(a * dx, a * dy, a, dx, dy, 0.025) == doctest::Approx(0.025 * a.sum()).epsilon(1e-12));
  CHECK(std::abs(jnnse_objective(x, y, a, dx, dy, 0.025) - oracle::naive_joint_objective(x, y, a, dx, dy, 0.025)) <=
        1e-12);
}

TEST_CASE("sparse_code_row_joint") {
  const Eigen::VectorXd x = oracle::random_matrix(5, 1, 10).col(0);
  Dictionary dx{unit_ball_rows(oracle::random_matrix(3, 5, 11))};

  SUBCASE("an empty second modality reduces to single-space coding") {
    Dictionary empty{Eigen::MatrixXd(3, 0)};
    const auto joint = sparse_code_row_joint(x, Eigen::VectorXd(0), dx, empty, 0.1);
    CHECK((joint - sparse_code_row(x, dx, 0.1)).cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("duplicated modality matches the doubled-quadratic grid oracle") {
    const auto a = sparse_code_row_joint(x, x, dx, dx, 0.1);
    Eigen::MatrixXd concat(3, 10);
    concat << dx.basis, dx.basis;
    Eigen::VectorXd target(10);
    target << x, x;
    CHECK(oracle::row_objective(target, a, concat, 0.1) <= oracle::grid_minimum(target, concat, 0.1) + 1e-12);
    CHECK((a.array() >= 0).all());
  }
  SUBCASE("targets orthogonal to every atom give zero codes") {
    Dictionary d1{Eigen::MatrixXd{{1, 0, 0}, {0, 1, 0}}};
    Dictionary d2{Eigen::MatrixXd{{0, 1}, {1, 0}}};
    const auto a = sparse_code_row_joint(Eigen::Vector3d(0, 0, 3), Eigen::Vector2d(0, 0), d1, d2, 0.05);
    CHECK(a.isZero(0.0));
  }
}

TEST_CASE("jnnse_fit reconstructs both halves of a rotated planted pair") {
  const auto planted = test_data::planted_factors(50, 20, 8, 0.8, 7);
  const Eigen::MatrixXd rot = test_data::random_rotation(20, 99);
  const EmbeddingSpace y(planted.x.lexicon(), planted.x.values() * rot);
  SolverConfig cfg;
  cfg.p = 8;
  cfg.lambda = 0.01;
  cfg.seed = 3;
  const auto fit = jnnse_fit(planted.x, y, cfg);
  const auto& a = fit.model.codes.codes;
  const double ex = (planted.x.values() - a * fit.model.dict_x.basis).norm() / planted.x.values().norm();
  const double ey = (y.values() - a * fit.model.dict_y.basis).norm() / y.values().norm();
  CHECK(ex < 0.05);
  CHECK(ey < 0.05);
  CHECK(fit.model.dict_x.feasible());
  CHECK(fit.model.dict_y.feasible());
  for (std::size_t i = 1; i < fit.log.size(); ++i) CHECK(fit.log[i].objective <= fit.log[i - 1].objective + 1e-8);
}

TEST_CASE("jnnse_fit with an empty second space equals nnse_fit") {
  const auto x = test_data::normalized_random_space(30, 12, 4);
  const EmbeddingSpace y(x.lexicon(), Eigen::MatrixXd(30, 0));
  SolverConfig cfg;
  cfg.p = 5;
  cfg.max_outer_iters = 40;
  const auto joint = jnnse_fit(x, y, cfg);
  const auto single = nnse_fit(x, cfg);
  CHECK((joint.model.codes.codes - single.embedding.codes).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("swapping the modalities swaps the dictionaries and keeps the codes") {
  const auto x = test_data::normalized_random_space(25, 7, 5);
  const EmbeddingSpace y = test_data::normalized_random_space(25, 11, 6);
  SolverConfig cfg;
  cfg.p = 4;
  cfg.max_outer_iters = 30;
  const auto xy = jnnse_fit(x, y, cfg);
  const auto yx = jnnse_fit(y, x, cfg);
  CHECK(xy.model.codes.codes == yx.model.codes.codes);
  CHECK(xy.model.dict_x.basis == yx.model.dict_y.basis);
  CHECK(xy.model.dict_y.basis == yx.model.dict_x.basis);
}

TEST_CASE("jnnse_fit rejects misaligned lexicons") {
  const auto x = test_data::random_space(6, 3, 1);
  EmbeddingSpace y(test_data::words(6, "v"), oracle::random_matrix(6, 3, 2));
  CHECK_THROWS_AS(jnnse_fit(x, y, SolverConfig{}), DataError);
}

TEST_CASE("joint configuration: p = 200, lambda = 0.025 over two 1000-dim sparse inputs") {
  auto x = test_data::normalized_random_space(210, 1000, 30);
  auto y = test_data::normalized_random_space(210, 1000, 31);
  x = EmbeddingSpace(x.lexicon(), x.values().cwiseMax(0.0), Modality::sparse);
  y = EmbeddingSpace(y.lexicon(), y.values().cwiseMax(0.0), Modality::sparse);
  SolverConfig cfg;
  cfg.p = 200;
  cfg.lambda = 0.025;
  cfg.max_outer_iters = 2;
  const auto fit = jnnse_fit(x, y, cfg);
  CHECK(fit.model.codes.codes.rows() == 210);
  CHECK(fit.model.codes.codes.cols() == 200);
  CHECK(fit.model.dict_x.basis.cols() == 1000);
  CHECK(fit.model.dict_y.basis.cols() == 1000);
  CHECK(fit.model.lambda == 0.025);
}
