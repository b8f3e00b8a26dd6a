#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "coco/errors.hpp"
#include "coco/stats.hpp"
#include "oracles/oracles.hpp"
#include "support/support.hpp"

using namespace coco;

namespace {

struct Instance {
  std::vector<std::uint8_t> labels;
  std::vector<double> scores;
};

// Both classes present; scores on a coarse grid so ties are common.
Instance random_instance(std::mt19937_64& rng, std::size_t max_n) {
  Instance in;
  const std::size_t n = 2 + rng() % (max_n - 1);
  const int grid = 1 + static_cast<int>(rng() % 12);
  for (std::size_t i = 0; i < n; ++i) {
    in.labels.push_back(static_cast<std::uint8_t>(rng() % 2));
    in.scores.push_back(static_cast<double>(rng() % grid) / grid);
  }
  in.labels[0] = 0;
  in.labels[1] = 1;
  return in;
}

}  // namespace

TEST_CASE("auc of simple cases") {
  const std::vector<std::uint8_t> y = {0, 0, 1, 1};
  CHECK(auc(y, std::vector<double>{0.1, 0.2, 0.3, 0.4}) == 1.0);
  CHECK(auc(y, std::vector<double>{0.4, 0.3, 0.2, 0.1}) == 0.0);
  CHECK(auc(y, std::vector<double>{0.5, 0.5, 0.5, 0.5}) == 0.5);
  CHECK(auc(y, std::vector<double>{0.1, 0.3, 0.2, 0.4}) == 0.75);
}

TEST_CASE("auc matches the pair-count oracle") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 500; ++i) {
    const auto in = random_instance(rng, 50);
    const double ours = auc(in.labels, in.scores);
    CHECK(std::fabs(ours - oracle::pair_count_auc(in.labels, in.scores)) <= 1e-12);
  }
}

TEST_CASE("auc is invariant to monotone transforms") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 100; ++i) {
    const auto in = random_instance(rng, 60);
    std::vector<double> t(in.scores.size());
    std::transform(in.scores.begin(), in.scores.end(), t.begin(),
                   [](double s) { return std::exp(3.0 * s) - 7.0; });
    CHECK(auc(in.labels, t) == auc(in.labels, in.scores));
  }
}

TEST_CASE("flipping labels complements a tie-free auc") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u;
  for (int i = 0; i < 100; ++i) {
    auto in = random_instance(rng, 40);
    for (auto& s : in.scores) s = u(rng);
    std::vector<std::uint8_t> flipped(in.labels.size());
    for (std::size_t k = 0; k < flipped.size(); ++k) flipped[k] = 1 - in.labels[k];
    CHECK(auc(in.labels, in.scores) + auc(flipped, in.scores) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("single-class auc is undefined") {
  const std::vector<std::uint8_t> y = {1, 1, 1};
  const std::vector<double> s = {0.1, 0.2, 0.3};
  CHECK_THROWS_AS(auc(y, s, "high/V-VI"), UndefinedMetric);
  try {
    auc(y, s, "high/V-VI");
  } catch (const UndefinedMetric& e) {
    CHECK(std::string(e.what()).find("high/V-VI") != std::string::npos);
  }
  CHECK_THROWS_AS(auc(std::vector<std::uint8_t>{0, 1}, std::vector<double>{0.5}), InputDomainError);
}

TEST_CASE("prescribed auc construction is exact") {
  std::vector<std::uint8_t> labels;
  for (std::size_t wins : {0u, 1u, 499u, 792u, 1000u}) {
    const auto s = coco::test::scores_with_auc(25, 40, wins, labels);
    CHECK(auc(labels, s) == static_cast<double>(wins) / 1000.0);
  }
}

TEST_CASE("quantile type 7") {
  CHECK(quantile({1, 2, 3, 4}, 0.0) == 1.0);
  CHECK(quantile({1, 2, 3, 4}, 1.0) == 4.0);
  CHECK(quantile({4, 1, 3, 2}, 0.5) == 2.5);
  CHECK(quantile({1, 2, 3, 4, 5}, 0.25) == 2.0);
  CHECK(quantile({10, 20}, 0.1) == doctest::Approx(11.0));
}

TEST_CASE("bootstrap interval is seeded and brackets the estimate") {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> n01;
  std::vector<std::uint8_t> y;
  std::vector<double> s;
  for (int i = 0; i < 200; ++i) {
    const bool pos = i % 2 == 0;
    y.push_back(pos);
    s.push_back(n01(rng) + (pos ? 1.0 : 0.0));
  }
  const auto a = bootstrap_ci(y, s, 500, 0.95, 9);
  const auto b = bootstrap_ci(y, s, 500, 0.95, 9);
  CHECK(a.lo == b.lo);
  CHECK(a.hi == b.hi);
  CHECK(a.resamples_used == 500);
  const double est = auc(y, s);
  CHECK(a.lo < est);
  CHECK(a.hi > est);
  const auto narrow = bootstrap_ci(y, s, 500, 0.5, 9);
  CHECK(narrow.hi - narrow.lo < a.hi - a.lo);
  CHECK_THROWS_AS(bootstrap_ci(y, s, 50), InputDomainError);
  CHECK_THROWS_AS(bootstrap_ci(y, s, 500, 1.5), InputDomainError);
}

TEST_CASE("bootstrap tolerates rare single-class resamples") {
  std::vector<std::uint8_t> y(30, 0);
  y[0] = 1;
  std::vector<double> s(30);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>(i) / 30.0;
  const auto r = bootstrap_ci(y, s, 200, 0.95, 3);
  CHECK(r.resamples_used + r.resamples_skipped == 200);
  CHECK(r.resamples_used > 0);
}

TEST_CASE("incomplete beta matches Boost") {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> ab(0.2, 120.0), ux(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double a = ab(rng), b = ab(rng), x = ux(rng);
    const double ours = regularized_incomplete_beta(a, b, x);
    CHECK(std::fabs(ours - boost::math::ibeta(a, b, x)) < 1e-10);
  }
  CHECK(regularized_incomplete_beta(2, 3, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2, 3, 1.0) == 1.0);
  CHECK_THROWS_AS(regularized_incomplete_beta(-1, 3, 0.5), InputDomainError);
}

TEST_CASE("student t tails") {
  CHECK(student_t_cdf(0.0, 7) == doctest::Approx(0.5));
  CHECK(student_t_two_sided_p(0.0, 7) == doctest::Approx(1.0));
  CHECK(student_t_cdf(1.5, 4) + student_t_cdf(-1.5, 4) == doctest::Approx(1.0));
  CHECK(student_t_two_sided_p(std::numeric_limits<double>::infinity(), 3) == 0.0);
  // Small t keeps full precision in the complement: 1 - p ~ 2 t f(0).
  const double f0 = std::tgamma(5.5) / (std::sqrt(10 * M_PI) * std::tgamma(5.0));
  CHECK(1.0 - student_t_two_sided_p(1e-9, 10) == doctest::Approx(2e-9 * f0).epsilon(1e-6));
}

TEST_CASE("paired t-test matches frozen reference values") {
  struct Case {
    std::vector<double> a, b;
    double t, p;
  };
  const std::vector<Case> cases = {
      {{4.1, 3.9, 5.2, 6.0, 2.2, 3.3, 4.8},
       {4.0, 4.1, 5.0, 6.3, 2.0, 3.6, 4.7},
       -0.3302891295379085,
       0.7524094326407997},
      {{1, 2, 3, 4, 5.5}, {0.5, 1.2, 2.9, 3.1, 4.4}, 3.9000674757995513, 0.017540467488889273},
      {{1, 3}, {0, 1.5}, 5.0, 0.12566591637800234},
  };
  for (const auto& c : cases) {
    const auto r = paired_ttest(c.a, c.b);
    CHECK(r.t == doctest::Approx(c.t).epsilon(1e-12));
    CHECK(std::fabs(r.p - c.p) < 1e-10);
    CHECK(r.n == c.a.size());
  }
}

TEST_CASE("paired t-test matches Boost on random samples") {
  std::mt19937_64 rng(46);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 5 + rng() % 196;
    const double shift = 0.3 * n01(rng);
    std::vector<double> a(n), b(n);
    for (std::size_t k = 0; k < n; ++k) {
      a[k] = 3.0 + n01(rng);
      b[k] = a[k] + shift + 0.5 * n01(rng);
    }
    const auto ours = paired_ttest(a, b);
    const auto ref = oracle::paired_t(a, b);
    CHECK(std::fabs(ours.t - ref.t) < 1e-6);
    CHECK(std::fabs(ours.p - ref.p) < 1e-6);
  }
}

TEST_CASE("paired t-test is antisymmetric") {
  const std::vector<double> a = {1.0, 2.5, 3.1, 4.0}, b = {1.2, 2.0, 3.0, 3.1};
  const auto ab = paired_ttest(a, b), ba = paired_ttest(b, a);
  CHECK(ab.t == -ba.t);
  CHECK(ab.p == ba.p);
}

TEST_CASE("degenerate paired differences") {
  const std::vector<double> a = {1, 2, 3};
  const auto same = paired_ttest(a, a);
  CHECK(same.degenerate);
  CHECK(same.t == 0.0);
  CHECK(same.p == 1.0);
  const std::vector<double> b = {0, 1, 2};
  const auto shifted = paired_ttest(a, b);
  CHECK(shifted.degenerate);
  CHECK(std::isinf(shifted.t));
  CHECK(shifted.t > 0);
  CHECK(shifted.p == 0.0);
  CHECK_THROWS_AS(paired_ttest(std::vector<double>{1}, std::vector<double>{2}), ContractError);
  CHECK_THROWS_AS(paired_ttest(a, std::vector<double>{1, 2}), ContractError);
}

TEST_CASE("keyed t-test lists unmatched images") {
  const std::map<std::string, double> a = {{"x", 1}, {"y", 2}, {"z", 3}};
  const std::map<std::string, double> b = {{"x", 1.5}, {"y", 2.1}, {"w", 4}};
  try {
    paired_ttest(a, b);
    FAIL("expected ContractError");
  } catch (const ContractError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("z") != std::string::npos);
    CHECK(msg.find("w") != std::string::npos);
  }
}

TEST_CASE("consistency uses the shared images") {
  using coco::test::uniform_annotation;
  std::vector<PointAnnotation> log;
  for (int i = 0; i < 6; ++i) {
    const auto id = coco::test::image_id(i);
    const auto v = static_cast<std::uint8_t>(40 + 20 * i);
    log.push_back(uniform_annotation(id, "a", {v, v, v}, {250, 250, 250}));
    if (i < 5) {
      const auto w = static_cast<std::uint8_t>(v + (i % 2 ? 3 : -2));
      log.push_back(uniform_annotation(id, "b", {w, w, w}, {250, 250, 250}));
    }
  }
  const auto rep = consistency_from_log(log, "a", "b");
  CHECK(rep.image_ids.size() == 5);
  CHECK(rep.ttest.n == 5);
  CHECK(rep.summary_a.n == 5);
  const auto direct = paired_ttest(rep.scores_a, rep.scores_b);
  CHECK(rep.ttest.t == direct.t);
  CHECK_THROWS_AS(consistency_from_log(log, "a", "nobody"), ContractError);
}

TEST_CASE("summary statistics") {
  const std::vector<double> v = {1, 2, 3, 4, 5};
  const auto s = summarize(v);
  CHECK(s.n == 5);
  CHECK(s.mean == 3.0);
  CHECK(s.sd == doctest::Approx(std::sqrt(2.5)));
  CHECK(s.median == 3.0);
  CHECK(s.q1 == 2.0);
  CHECK(s.max == 5.0);
}

TEST_CASE("class weights are inverse frequency") {
  const std::vector<std::size_t> bal = {50, 50};
  CHECK(class_weights(bal).weights == std::vector<double>{0.5, 0.5});
  const std::vector<std::size_t> skew = {100, 25};
  const auto w = class_weights(skew).weights;
  CHECK(w[0] == doctest::Approx(0.2));
  CHECK(w[1] == doctest::Approx(0.8));
  const std::vector<std::size_t> three = {1, 1, 1};
  for (double x : class_weights(three).weights) CHECK(x == doctest::Approx(1.0 / 3.0));
  const std::vector<std::size_t> c = {13, 7, 101}, c2 = {26, 14, 202};
  const auto w1 = class_weights(c).weights, w2 = class_weights(c2).weights;
  double sum = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(w1[i] == doctest::Approx(w2[i]).epsilon(1e-15));
    sum += w1[i];
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<std::size_t> zero = {3, 0};
  CHECK_THROWS_AS(class_weights(zero), InputDomainError);
}

TEST_CASE("background trend over skin-tone groups") {
  using coco::test::uniform_annotation;
  const auto cohort = coco::test::synthetic_cohort(9);
  const std::uint8_t greys[3] = {200, 120, 60};
  std::vector<PointAnnotation> log;
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const auto g = greys[static_cast<std::size_t>(cohort[i].fst_group)];
    log.push_back(uniform_annotation(cohort[i].image_id, "a", {255, 255, 255}, {g, g, g}));
  }
  log.push_back(uniform_annotation("stranger", "a", {0, 0, 0}, {1, 1, 1}));
  const auto t = background_trend(log, cohort);
  REQUIRE(t.groups.size() == 3);
  CHECK(t.monotone_darker);
  CHECK(t.unmatched == 1);
  CHECK(t.groups[0].mean_color.r == 200.0);
  CHECK(t.groups[2].n == 3);

  std::vector<PointAnnotation> flat;
  for (const auto& r : cohort) flat.push_back(uniform_annotation(r.image_id, "a", {255, 255, 255}, {90, 90, 90}));
  CHECK_FALSE(background_trend(flat, cohort).monotone_darker);

  // Missing middle group: verdict over the remaining two.
  std::vector<PointAnnotation> partial;
  for (std::size_t i = 0; i < log.size() - 1; ++i) {
    if (cohort[i].fst_group != FstGroup::III_IV) partial.push_back(log[i]);
  }
  const auto p = background_trend(partial, cohort);
  CHECK(p.groups.size() == 2);
  CHECK(p.monotone_darker);

  std::vector<PointAnnotation> one;
  one.push_back(log[0]);
  CHECK_FALSE(background_trend(one, cohort).monotone_darker);
}
