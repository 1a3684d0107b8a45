#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "sembcd/ratio_qp.hpp"
#include "sembcd/rng.hpp"

using namespace sembcd;

namespace {

// Independent oracle: full grid for m = 1, multi-resolution full grid for m = 2.
// Instances are kept away from the pole line so the refinement cannot lose the basin.
Eigen::VectorXd grid_minimize(const RatioProblem& p, double lo, double hi, double step) {
  const int m = static_cast<int>(p.X.cols());
  REQUIRE(m <= 2);
  auto eval = [&p](const Eigen::VectorXd& a) { return ratio_objective(p, a); };

  if (m == 1) {
    Eigen::VectorXd best(1), a(1);
    double best_val = std::numeric_limits<double>::infinity();
    for (double x = lo; x <= hi; x += step) {
      a(0) = x;
      const double v = eval(a);
      if (v < best_val) {
        best_val = v;
        best = a;
      }
    }
    return best;
  }

  double span = hi - lo;
  Eigen::Vector2d center((lo + hi) / 2, (lo + hi) / 2);
  Eigen::VectorXd best = center;
  double cell = span / 400.0;
  while (true) {
    double best_val = std::numeric_limits<double>::infinity();
    Eigen::VectorXd a(2);
    for (int i = 0; i <= 400; ++i) {
      for (int j = 0; j <= 400; ++j) {
        a(0) = center(0) - span / 2 + cell * i;
        a(1) = center(1) - span / 2 + cell * j;
        const double v = eval(a);
        if (v < best_val) {
          best_val = v;
          best = a;
        }
      }
    }
    if (cell <= step) return best;
    center = best;
    span = 4.0 * cell;
    cell = std::max(step, span / 400.0);
  }
}

RatioProblem random_instance(Rng& rng, int n, int m) {
  RatioProblem p;
  p.X.resize(n, m);
  p.y.resize(n);
  p.c.resize(m);
  for (int i = 0; i < n; ++i) {
    p.y(i) = rng.normal();
    for (int j = 0; j < m; ++j) p.X(i, j) = rng.normal();
  }
  for (int j = 0; j < m; ++j) p.c(j) = rng.normal();
  p.c0 = rng.normal();
  return p;
}

}  // namespace

TEST_CASE("worked one-column instances") {
  RatioProblem p;
  p.y = Eigen::Vector2d(1.0, 1.0);
  p.X = Eigen::MatrixXd(2, 1);
  p.X << 1.0, 0.0;
  p.c = Eigen::VectorXd::Constant(1, 1.0);

  SUBCASE("unique minimum") {
    p.c0 = 1.0;
    auto sol = solve_ratio(p);
    auto* u = std::get_if<RatioUnique>(&sol);
    REQUIRE(u != nullptr);
    CHECK(u->alpha_star(0) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(ratio_objective(p, u->alpha_star) == doctest::Approx(0.2).epsilon(1e-12));
    Eigen::VectorXd g = grid_minimize(p, -10.0, 10.0, 1e-4);
    CHECK(std::abs(u->alpha_star(0) - g(0)) <= 2e-4);
  }

  SUBCASE("no minimum at the pole") {
    p.c0 = -1.0;
    auto sol = solve_ratio(p);
    auto* nm = std::get_if<RatioNoMinimum>(&sol);
    REQUIRE(nm != nullptr);
    // f(a) = 1 + 1/(a-1)^2 approaches but never attains 1
    CHECK(nm->infimum == doctest::Approx(1.0).epsilon(1e-12));
    Eigen::VectorXd far = Eigen::VectorXd::Constant(1, 1e6);
    CHECK(ratio_objective(p, far) > nm->infimum);
    CHECK(ratio_objective(p, far) < nm->infimum + 1e-5);
  }

  SUBCASE("y in the span keeps the least-squares solution") {
    p.c0 = 1.0;
    p.y = Eigen::Vector2d(2.0, 0.0);  // y = 2 * X
    auto sol = solve_ratio(p);
    auto* u = std::get_if<RatioUnique>(&sol);
    REQUIRE(u != nullptr);
    CHECK(u->alpha_star(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(u->residual_sq <= 1e-20);
  }
}

TEST_CASE("univariate ratio kernel") {
  CHECK(std::get<UniqueAt>(minimize_univariate_ratio(0, 0, 1, 1)).x ==
        doctest::Approx(0.0));
  CHECK(std::get<ConstantValue>(minimize_univariate_ratio(1, 0, -1, 1)).value ==
        doctest::Approx(1.0));
  auto u = std::get<UniqueAt>(minimize_univariate_ratio(1, 1, 1, 1));
  CHECK(u.x == doctest::Approx(1.5));
  // f(1.5) = (0.25 + 1) / 6.25 = 0.2, confirmed by scanning the whole axis
  auto f = [](double x) { return ((1 - x) * (1 - x) + 1) / ((1 + x) * (1 + x)); };
  CHECK(f(u.x) == doctest::Approx(0.2).epsilon(1e-12));
  double best = 1e300, best_x = 0;
  for (double x = -10; x <= 10; x += 1e-4) {
    if (std::abs(1 + x) < 1e-9) continue;
    if (f(x) < best) {
      best = f(x);
      best_x = x;
    }
  }
  CHECK(std::abs(best_x - u.x) <= 2e-4);

  auto inf = std::get<InfimumUnattained>(minimize_univariate_ratio(1, 2, -3, 3));
  CHECK(inf.value == doctest::Approx(1.0 / 9.0));
  CHECK_THROWS_AS(minimize_univariate_ratio(1, 1, 1, 0), ValidationError);
}

TEST_CASE("pipeline agrees with the rational formula") {
  Rng rng(1234);
  int done = 0;
  while (done < 200) {
    const int m = 1 + static_cast<int>(rng.uniform_index(10));
    const int n = m + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(50 - m)));
    RatioProblem p = random_instance(rng, std::max(n, m), m);
    RatioSolution sol = solve_ratio(p);
    auto* u = std::get_if<RatioUnique>(&sol);
    if (u == nullptr) continue;  // degenerate draw; skip
    Eigen::VectorXd rational = ratio_rational_solution(p);
    CHECK((u->alpha_star - rational).norm() <= 1e-8 * (1.0 + rational.norm()));
    ++done;
  }
}

TEST_CASE("optimality under random perturbations") {
  Rng rng(555);
  RatioProblem p = random_instance(rng, 30, 4);
  auto sol = solve_ratio(p);
  auto* u = std::get_if<RatioUnique>(&sol);
  REQUIRE(u != nullptr);
  const double at_opt = ratio_objective(p, u->alpha_star);
  for (int rep = 0; rep < 100; ++rep) {
    Eigen::VectorXd delta(4);
    for (int j = 0; j < 4; ++j) delta(j) = rng.normal();
    delta *= 1e-3 / delta.norm();
    CHECK(at_opt <= ratio_objective(p, u->alpha_star + delta) + 1e-15);
  }
}

TEST_CASE("grid oracle agreement for m = 2") {
  Rng rng(88);
  int done = 0;
  while (done < 10) {
    RatioProblem p = random_instance(rng, 12, 2);
    auto sol = solve_ratio(p);
    auto* u = std::get_if<RatioUnique>(&sol);
    if (u == nullptr || u->alpha_star.cwiseAbs().maxCoeff() > 8.0) continue;
    // keep instances whose optimum sits safely away from the pole line
    if (std::abs(p.c0 + p.c.dot(u->alpha_star)) < 0.2) continue;
    Eigen::VectorXd g = grid_minimize(p, -10.0, 10.0, 1e-4);
    CHECK((u->alpha_star - g).cwiseAbs().maxCoeff() <= 2e-4);
    ++done;
  }
}

TEST_CASE("degenerate case detection flips under tiny c0 shifts") {
  // engineered case (iii): y orthogonal-ish to X with c0 = -c^T alpha_hat exactly
  RatioProblem p;
  p.X = Eigen::MatrixXd(3, 1);
  p.X << 1.0, 0.0, 0.0;
  p.y = Eigen::Vector3d(2.0, 1.0, 0.5);
  p.c = Eigen::VectorXd::Constant(1, 1.0);
  p.c0 = -2.0;  // alpha_hat = 2, so c0 + c^T alpha_hat = 0
  CHECK(std::holds_alternative<RatioNoMinimum>(solve_ratio(p)));

  for (double shift : {1e-6, -1e-6}) {
    RatioProblem q = p;
    q.c0 += shift;
    auto sol = solve_ratio(q);
    auto* u = std::get_if<RatioUnique>(&sol);
    REQUIRE(u != nullptr);
    CHECK(std::abs(u->alpha_star(0)) > 1e4);  // walking off toward the pole
  }
}

TEST_CASE("non-unique case: the solution set is a punctured line of equal value") {
  // y in span(X) and c0 = -c^T alpha_hat: every alpha_hat + lambda (X^T X)^{-1} c
  // with lambda != 0 attains the same objective
  Rng rng(246);
  Eigen::MatrixXd X(6, 2);
  Eigen::VectorXd w(2);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 2; ++j) X(i, j) = rng.normal();
  }
  w << 0.7, -1.2;
  RatioProblem p;
  p.X = X;
  p.y = X * w;
  p.c = Eigen::Vector2d(1.0, 2.0);
  p.c0 = -p.c.dot(w);

  auto sol = solve_ratio(p);
  auto* nu = std::get_if<RatioNonUnique>(&sol);
  REQUIRE(nu != nullptr);
  CHECK((nu->alpha_hat - w).norm() <= 1e-10);

  const double at_one = ratio_objective(p, nu->alpha_hat + nu->direction);
  for (double lambda : {-3.0, -1.0, 0.5, 2.0}) {
    const double v = ratio_objective(p, nu->alpha_hat + lambda * nu->direction);
    CHECK(v == doctest::Approx(at_one).epsilon(1e-10));
  }
  // the constant value is the reduced-form limit r^2 / ||c||^2 = 1 / c^T (X^T X)^{-1} c
  const double expected = 1.0 / p.c.dot((X.transpose() * X).ldlt().solve(p.c));
  CHECK(at_one == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("rank-deficient X is a distinct error") {
  RatioProblem p;
  p.X = Eigen::MatrixXd(4, 2);
  p.X.col(0) = Eigen::Vector4d(1, 2, 3, 4);
  p.X.col(1) = 2.0 * p.X.col(0);
  p.y = Eigen::Vector4d(1, 0, 0, 1);
  p.c = Eigen::Vector2d(1.0, 2.0);
  p.c0 = 1.0;
  CHECK_THROWS_AS(solve_ratio(p), RankDeficientError);
}

TEST_CASE("projected solve") {
  SUBCASE("coincides with solve_ratio when X has full rank") {
    RatioProblem p;
    p.y = Eigen::Vector2d(1.0, 1.0);
    p.X = Eigen::MatrixXd(2, 1);
    p.X << 1.0, 0.0;
    p.c = Eigen::VectorXd::Constant(1, 1.0);
    p.c0 = 1.0;
    Eigen::VectorXd c_tilde = Eigen::Vector2d(1.0, 0.0);  // X^T c_tilde = c
    auto sol = solve_ratio_projected(p, c_tilde);
    auto* u = std::get_if<RatioUnique>(&sol);
    REQUIRE(u != nullptr);
    CHECK(u->alpha_star(0) == doctest::Approx(1.5).epsilon(1e-10));
  }

  SUBCASE("duplicated columns reduce to the one-column problem") {
    RatioProblem p;
    p.y = Eigen::Vector2d(1.0, 1.0);
    p.X = Eigen::MatrixXd(2, 2);
    p.X << 1.0, 1.0, 0.0, 0.0;
    p.c = Eigen::Vector2d(1.0, 1.0);
    p.c0 = 1.0;
    Eigen::VectorXd c_tilde = Eigen::Vector2d(1.0, 0.0);
    auto sol = solve_ratio_projected(p, c_tilde);
    auto* u = std::get_if<RatioUnique>(&sol);
    REQUIRE(u != nullptr);

    RatioProblem dedup;
    dedup.y = p.y;
    dedup.X = p.X.leftCols(1);
    dedup.c = Eigen::VectorXd::Constant(1, 1.0);
    dedup.c0 = 1.0;
    auto ref = std::get<RatioUnique>(solve_ratio(dedup));
    CHECK(ratio_objective(p, u->alpha_star) ==
          doctest::Approx(ratio_objective(dedup, ref.alpha_star)).epsilon(1e-10));
  }

  SUBCASE("y orthogonal to the span") {
    RatioProblem p;
    p.y = Eigen::Vector2d(0.0, 2.0);
    p.X = Eigen::MatrixXd(2, 1);
    p.X << 1.0, 0.0;
    p.c0 = 2.0;
    Eigen::VectorXd c_tilde = Eigen::Vector2d(3.0, 0.0);
    p.c = p.X.transpose() * c_tilde;
    auto sol = solve_ratio_projected(p, c_tilde);
    auto* u = std::get_if<RatioUnique>(&sol);
    REQUIRE(u != nullptr);
    // alpha_tilde* = (||y||^2 / c0) pi(c_tilde) = 2 * (3, 0); coefficient 6
    CHECK(u->alpha_star(0) == doctest::Approx(6.0).epsilon(1e-10));
  }

  SUBCASE("rejects inconsistent lifts") {
    RatioProblem p;
    p.y = Eigen::Vector2d(1.0, 1.0);
    p.X = Eigen::MatrixXd(2, 1);
    p.X << 1.0, 0.0;
    p.c = Eigen::VectorXd::Constant(1, 5.0);
    p.c0 = 1.0;
    CHECK_THROWS_AS(solve_ratio_projected(p, Eigen::Vector2d(1.0, 0.0)), ValidationError);
  }
}

TEST_CASE("runtime stays within 3x of a plain least-squares solve") {
  Rng rng(9001);
  const int n = 500, m = 50;
  RatioProblem p = random_instance(rng, n, m);

  auto time_median = [](auto&& fn) {
    std::vector<double> times;
    for (int rep = 0; rep < 9; ++rep) {
      auto t0 = std::chrono::steady_clock::now();
      fn();
      auto t1 = std::chrono::steady_clock::now();
      times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
  };

  volatile double sink = 0.0;
  const double t_ls = time_median([&]() {
    Eigen::VectorXd a = Eigen::HouseholderQR<Eigen::MatrixXd>(p.X).solve(p.y);
    sink = sink + a.sum();
  });
  const double t_ratio = time_median([&]() {
    auto sol = solve_ratio(p);
    sink = sink + std::get<RatioUnique>(sol).alpha_star.sum();
  });
  CHECK(t_ratio <= 3.0 * t_ls + 1e-4);
}
