#include "support.hpp"

#include "outlook/logistic.hpp"

#include <doctest.h>

using namespace outlook;

namespace
{

// Two Gaussian blobs at +/- shift along the first axis.
void blobs(Eigen::Index n, Eigen::Index d, double shift, std::uint64_t seed, MatrixX<double>& X, Eigen::VectorXi& y)
{
  Rng rng(seed);
  X = test::gaussian(n, d, rng);
  y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = static_cast<int>(i % 2);
    X(i, 0) += y(i) ? shift : -shift;
  }
}

// Oracle for the penalized loss written out term by term.
double direct_loss(const MatrixX<double>& X, const Eigen::VectorXi& y, const VectorX<double>& theta, double lambda)
{
  const Eigen::Index d = X.cols();
  double loss = 0.5 * lambda * theta.head(d).squaredNorm();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double z = X.row(i).dot(theta.head(d)) + theta(d);
    const double p = 1 / (1 + std::exp(-z));
    loss -= y(i) ? std::log(p) : std::log(1 - p);
  }
  return loss;
}

}  // namespace

TEST_CASE("sigmoid and softplus are stable at extremes")
{
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(softplus(800.0) == 800.0);
  CHECK(softplus(-800.0) >= 0.0);
  for (double z : {-3.0, -0.2, 0.0, 1.7, 25.0}) CHECK(sigmoid(z) + sigmoid(-z) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("objective matches a direct evaluation and finite differences")
{
  MatrixX<double> X;
  Eigen::VectorXi y;
  blobs(40, 5, 0.5, 3, X, y);
  Rng rng(4);
  const VectorX<double> theta = test::gaussian(6, 1, rng);
  const double lambda = 0.7;

  VectorX<double> g(6);
  MatrixX<double> H(6, 6);
  const double f = logistic_objective<double>(X, y, theta, lambda, &g, &H);
  CHECK(f == doctest::Approx(direct_loss(X, y, theta, lambda)).epsilon(1e-12));

  const double h = 1e-5;
  for (Eigen::Index k = 0; k < 6; ++k) {
    VectorX<double> up = theta, dn = theta;
    up(k) += h;
    dn(k) -= h;
    const double fd = (direct_loss(X, y, up, lambda) - direct_loss(X, y, dn, lambda)) / (2 * h);
    CHECK(std::abs(fd - g(k)) <= 1e-6 * std::max(1.0, std::abs(g(k))));

    VectorX<double> gu(6), gd(6);
    logistic_objective<double>(X, y, up, lambda, &gu);
    logistic_objective<double>(X, y, dn, lambda, &gd);
    const VectorX<double> hcol = (gu - gd) / (2 * h);
    CHECK((hcol - H.col(k)).norm() <= 1e-6 * std::max(1.0, H.col(k).norm()));
  }
}

TEST_CASE("one-dimensional fit has the forced sign")
{
  MatrixX<double> X(2, 1);
  X << -1, 1;
  Eigen::VectorXi y(2);
  y << 0, 1;
  LogisticOptions o;
  o.lambda = 0.1;
  const auto m = train_logistic(X, y, o);
  CHECK(m.trained);
  CHECK(m.weights(0) > 0);
  CHECK(m.probability(X.row(1)) > 0.5);
  CHECK(m.probability(X.row(0)) < 0.5);
}

TEST_CASE("symmetric data gives zero bias")
{
  Rng rng(12);
  for (int rep = 0; rep < 5; ++rep) {
    const VectorX<double> x = test::gaussian(16, 1, rng).normalized();
    MatrixX<double> X(2, 16);
    X.row(0) = x.transpose();
    X.row(1) = -x.transpose();
    Eigen::VectorXi y(2);
    y << 1, 0;
    const auto m = train_logistic(X, y);
    CHECK(std::abs(m.bias) <= 1e-7);
  }
}

TEST_CASE("gradient vanishes at the optimum for both solvers")
{
  MatrixX<double> X;
  Eigen::VectorXi y;
  blobs(60, 8, 0.8, 21, X, y);
  for (Solver s : {Solver::newton, Solver::lbfgs}) {
    LogisticOptions o;
    o.solver = s;
    const auto m = train_logistic(X, y, o);
    VectorX<double> theta(9), g(9);
    theta << m.weights, m.bias;
    logistic_objective<double>(X, y, theta, 1.0, &g);
    CHECK(g.norm() <= 1e-7);
    CHECK(m.convergence.solver == (s == Solver::newton ? "newton" : "lbfgs"));
  }
  LogisticOptions newton, lbfgs;
  newton.solver = Solver::newton;
  lbfgs.solver = Solver::lbfgs;
  CHECK((train_logistic(X, y, newton).weights - train_logistic(X, y, lbfgs).weights).norm() < 1e-6);
}

TEST_CASE("high-dimensional fit with fewer rows than columns")
{
  MatrixX<double> X;
  Eigen::VectorXi y;
  blobs(64, 256, 0.5, 8, X, y);
  const auto m = train_logistic(X, y);
  CHECK(m.convergence.gradient_norm <= 1e-7);
  LogisticOptions zero;
  zero.lambda = 0;
  CHECK_THROWS_WITH_AS(train_logistic(X, y, zero), doctest::Contains("ill-posed without regularization"), Error);
}

TEST_CASE("weight norm shrinks as lambda grows")
{
  MatrixX<double> X;
  Eigen::VectorXi y;
  blobs(80, 10, 0.4, 17, X, y);
  double previous = std::numeric_limits<double>::infinity();
  for (double lambda : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    LogisticOptions o;
    o.lambda = lambda;
    const double norm = train_logistic(X, y, o).weights.norm();
    CHECK(norm <= previous);
    previous = norm;
  }
}

TEST_CASE("training is bit-for-bit deterministic")
{
  MatrixX<double> X;
  Eigen::VectorXi y;
  blobs(50, 12, 0.3, 5, X, y);
  const auto a = train_logistic(X, y), b = train_logistic(X, y);
  CHECK(a.weights == b.weights);
  CHECK(a.bias == b.bias);
}

TEST_CASE("training errors")
{
  MatrixX<double> X(3, 2);
  X << 1, 2, 3, 4, 5, 6;
  Eigen::VectorXi same = Eigen::VectorXi::Ones(3);
  CHECK_THROWS_AS(train_logistic(X, same), Error);
  Eigen::VectorXi short_y = Eigen::VectorXi::Zero(2);
  CHECK_THROWS_AS(train_logistic(X, short_y), DimensionError);
  MatrixX<double> bad = X;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXi y(3);
  y << 0, 1, 0;
  CHECK_THROWS_AS(train_logistic(bad, y), Error);
  LogisticOptions tight;
  tight.stop.max_iterations = 1;
  tight.solver = Solver::lbfgs;
  CHECK_THROWS_AS(train_logistic(X, y, tight), NonConvergence);
}

TEST_CASE("scoring rules")
{
  LogisticModel<double> zero;
  zero.weights = VectorX<double>::Zero(4);
  VectorX<double> v(4);
  v << 0.1, -2, 3, 0.5;
  CHECK(zero.probability(v) == 0.5);

  LogisticModel<double> m;
  m.weights = VectorX<double>::LinSpaced(4, -1, 2);
  m.bias = 0.3;
  LogisticModel<double> neg = m;
  neg.weights = -m.weights;
  neg.bias = -m.bias;
  CHECK(std::abs(m.probability(v) + neg.probability(v) - 1) <= 1e-12);
  CHECK_THROWS_AS(m.probability(VectorX<double>::Zero(3)), DimensionError);
}

TEST_CASE("l1 penalty yields sparse weights")
{
  MatrixX<double> X;
  Eigen::VectorXi y;
  blobs(200, 20, 1.0, 31, X, y);
  LogisticOptions o;
  o.penalty = Penalty::l1;
  o.lambda = 5;
  const auto m = train_logistic(X, y, o);
  CHECK(m.weights(0) > 0);
  int zeros = 0;
  for (Eigen::Index k = 1; k < 20; ++k) zeros += m.weights(k) == 0.0;
  CHECK(zeros >= 10);
}

TEST_CASE("cross-validated lambda is reproducible and on the grid")
{
  MatrixX<double> X;
  Eigen::VectorXi y;
  blobs(100, 6, 0.6, 2, X, y);
  const auto a = select_lambda_cv(X, y, {1e-2, 1, 1e2}, 5, 9);
  const auto b = select_lambda_cv(X, y, {1e-2, 1, 1e2}, 5, 9);
  CHECK(a.lambda == b.lambda);
  CHECK(a.mean_log_loss == b.mean_log_loss);
  REQUIRE(a.mean_log_loss.size() == 3);
  const auto best = std::min_element(a.mean_log_loss.begin(), a.mean_log_loss.end()) - a.mean_log_loss.begin();
  CHECK(a.lambda == a.grid[static_cast<std::size_t>(best)]);
  CHECK_THROWS_AS(select_lambda_cv(X, y, {}), Error);
}

TEST_CASE("multinomial probabilities sum to one")
{
  Rng rng(40);
  const Eigen::Index n = 160, d = 6, T = 8;
  MatrixX<double> X = test::gaussian(n, d, rng);
  Eigen::VectorXi y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = static_cast<int>(i % T);
    X(i, y(i) % d) += 2.0;
  }
  std::vector<std::string> names;
  for (Eigen::Index k = 0; k < T; ++k) names.push_back("c" + std::to_string(k));
  const auto m = train_multinomial(X, y, names);
  const MatrixX<double> P = m.probabilities_rows(test::gaussian(50, d, rng) * 3);
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    CHECK(std::abs(P.row(i).sum() - 1) <= 1e-9);
    CHECK(P.row(i).minCoeff() >= 0);
  }
  CHECK(m.weights.col(0).isZero());
  CHECK(m.convergence.gradient_norm <= 1e-7);
}

TEST_CASE("multinomial gradient matches finite differences")
{
  Rng rng(41);
  const Eigen::Index n = 30, d = 3, T = 3;
  const MatrixX<double> X = test::gaussian(n, d, rng);
  Eigen::VectorXi y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = static_cast<int>(i % T);
  const VectorX<double> theta = test::gaussian((T - 1) * (d + 1), 1, rng);
  VectorX<double> g(theta.size());
  MatrixX<double> H(theta.size(), theta.size());
  multinomial_objective<double>(X, y, T, theta, 0.3, &g, &H);
  const double h = 1e-5;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    VectorX<double> up = theta, dn = theta;
    up(k) += h;
    dn(k) -= h;
    const double fd = (multinomial_objective<double>(X, y, T, up, 0.3) - multinomial_objective<double>(X, y, T, dn, 0.3)) / (2 * h);
    CHECK(std::abs(fd - g(k)) <= 1e-6 * std::max(1.0, std::abs(g(k))));
    VectorX<double> gu(theta.size()), gd(theta.size());
    multinomial_objective<double>(X, y, T, up, 0.3, &gu);
    multinomial_objective<double>(X, y, T, dn, 0.3, &gd);
    CHECK(((gu - gd) / (2 * h) - H.col(k)).norm() <= 1e-5 * std::max(1.0, H.col(k).norm()));
  }
}

TEST_CASE("two-class multinomial reduces to the binary model")
{
  MatrixX<double> X;
  Eigen::VectorXi y;
  blobs(90, 7, 0.5, 77, X, y);
  LogisticOptions o;
  o.lambda = 0.5;
  const auto binary = train_logistic(X, y, o);
  const auto multi = train_multinomial(X, y, {"neg", "pos"}, o);
  const MatrixX<double> P = multi.probabilities_rows(X);
  const VectorX<double> p = binary.probabilities(X);
  CHECK((P.col(1) - p).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("classes with identical features get uniform probabilities")
{
  const Eigen::Index T = 4;
  MatrixX<double> X = MatrixX<double>::Ones(8, 3);
  Eigen::VectorXi y(8);
  for (Eigen::Index i = 0; i < 8; ++i) y(i) = static_cast<int>(i % T);
  const auto m = train_multinomial(X, y, {"a", "b", "c", "d"});
  const VectorX<double> p = m.probabilities(VectorX<double>::Ones(3));
  for (Eigen::Index k = 0; k < T; ++k) CHECK(p(k) == doctest::Approx(1.0 / T).epsilon(1e-9));
}

TEST_CASE("multinomial errors")
{
  MatrixX<double> X = MatrixX<double>::Ones(4, 2);
  Eigen::VectorXi y(4);
  y << 0, 0, 1, 1;
  CHECK_THROWS_AS(train_multinomial(X, y, {"only"}), Error);
  CHECK_THROWS_AS(train_multinomial(X, y, {"a", "b", "empty"}), Error);
}
