#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "insulate/afem.hpp"
#include "insulate/errors.hpp"
#include "oracles.hpp"

using namespace insulate;
using doctest::Approx;

namespace {

MeshPtr lshape(int level, LShapeSetup setup = LShapeSetup::AllInsulated) {
  return std::make_shared<const Triangulation>(generate_lshape(level, setup));
}

ProblemData constant_load(double m) {
  ProblemData d;
  d.m = m;
  d.f = [](Vec2) { return 1.0; };
  return d;
}

double sum_of(std::span<const double> eta, const std::vector<std::size_t>& idx) {
  double s = 0.0;
  for (std::size_t i : idx) s += eta[i];
  return s;
}

}  // namespace

TEST_CASE("dorfler_mark examples") {
  const std::vector<double> eta{4, 3, 2, 1};
  CHECK(dorfler_mark(eta, 0.5) == std::vector<std::size_t>{0, 1});
  CHECK(dorfler_mark(eta, 0.0).empty());
  CHECK(dorfler_mark(std::vector<double>{1, 2, 3, 4}, 0.5) == std::vector<std::size_t>{3, 2});
  CHECK(dorfler_mark(std::vector<double>{}, 0.5).empty());
  // ties go to the lower index
  CHECK(dorfler_mark(std::vector<double>{1, 5, 5, 1}, 0.3) == std::vector<std::size_t>{1});
  for (std::size_t n : {1u, 2u, 5u, 8u}) {
    const std::vector<double> eq(n, 2.0);
    const auto m = dorfler_mark(eq, 0.5);
    CHECK(m.size() == (n + 1) / 2);
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(m[i] == i);
  }
}

TEST_CASE("dorfler_mark is a minimal threshold set") {
  oracle::Rng rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng() % 40;
    std::vector<double> eta(n);
    for (double& x : eta) x = oracle::uniform(rng, 0.0, 1.0);
    const double theta = oracle::uniform(rng, 0.01, 0.99);
    const auto marked = dorfler_mark(eta, theta);
    const double total = std::accumulate(eta.begin(), eta.end(), 0.0);
    REQUIRE(!marked.empty());
    CHECK(sum_of(eta, marked) >= theta * total);
    // dropping the smallest member breaks the threshold
    auto smallest = std::min_element(marked.begin(), marked.end(),
                                      [&](std::size_t a, std::size_t b) { return eta[a] < eta[b]; });
    CHECK(sum_of(eta, marked) - eta[*smallest] < theta * total);
    // no unmarked indicator is larger than a marked one
    std::vector<char> in(n, 0);
    for (std::size_t i : marked) in[i] = 1;
    for (std::size_t i = 0; i < n; ++i)
      if (!in[i]) CHECK(eta[i] <= eta[*smallest]);
  }
}

TEST_CASE("afem_run") {
  SUBCASE("huge eps_stop gives a single level") {
    AfemConfig cfg;
    cfg.eps_stop = 1e100;
    const auto recs = afem_run(lshape(0), constant_load(3.0), cfg);
    CHECK(recs.size() == 1);
    CHECK(recs[0].level == 0);
  }
  SUBCASE("element counts increase and the records are consistent") {
    AfemConfig cfg;
    cfg.max_levels = 5;
    cfg.theta_T = 0.25;
    cfg.theta_S = 0.125;
    int calls = 0;
    const auto recs = afem_run(lshape(0, LShapeSetup::MixedBoundary), constant_load(3.0), cfg,
                               [&](const LevelResult& r, LevelRecord& rec) {
                                 ++calls;
                                 CHECK(rec.elements == r.mesh->num_elements());
                                 CHECK(r.dual.report.converged);
                               });
    CHECK(calls == static_cast<int>(recs.size()));
    REQUIRE(recs.size() == 5);
    for (std::size_t k = 1; k < recs.size(); ++k) {
      CHECK(recs[k].elements > recs[k - 1].elements);
      CHECK(recs[k].N > recs[k - 1].N);
      CHECK(recs[k].level == static_cast<int>(k));
    }
    for (const LevelRecord& r : recs) {
      CHECK(r.gap == Approx(r.primal_energy - r.dual_energy));
      CHECK(r.kkt_residual <= 1e-9);
      CHECK(r.eta2_A >= 0.0);
      CHECK(r.eta2_B >= 0.0);
    }
    CHECK(std::isnan(recs[0].eoc));
    CHECK(recs.back().marked_elements == 0);
  }
  SUBCASE("theta close to one marks everything") {
    AfemConfig cfg;
    cfg.max_levels = 2;
    cfg.theta_T = 0.999999;
    const MeshPtr m = lshape(1);
    const auto recs = afem_run(m, constant_load(3.0), cfg);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].marked_elements == m->num_elements());
  }
  SUBCASE("max_elements stops the loop") {
    AfemConfig cfg;
    cfg.max_levels = 50;
    cfg.max_elements = 100;
    const auto recs = afem_run(lshape(0), constant_load(3.0), cfg);
    CHECK(recs.back().elements >= 100);
    CHECK(recs[recs.size() - 2].elements < 100);
  }
  SUBCASE("invalid parameters") {
    AfemConfig cfg;
    cfg.theta_T = 1.0;
    CHECK_THROWS_AS(afem_run(lshape(0), constant_load(3.0), cfg), InputError);
    cfg.theta_T = 0.5;
    cfg.eps_stop = 0.0;
    CHECK_THROWS_AS(afem_run(lshape(0), constant_load(3.0), cfg), InputError);
  }
}

TEST_CASE("fill_eoc") {
  std::vector<LevelRecord> r(3);
  r[0].N = 10;
  r[0].error = 1.0;
  r[1].N = 40;
  r[1].error = 0.25;
  r[2].N = 40;
  r[2].error = 0.2;
  fill_eoc(r);
  CHECK(std::isnan(r[0].eoc));
  CHECK(r[1].eoc == Approx(-1.0));
  CHECK(std::isnan(r[2].eoc));
}

TEST_CASE("solve_level pairs") {
  const LevelResult r = solve_level(lshape(1), constant_load(3.0), SolverOptions{});
  CHECK(r.continuous);
  CHECK(std::abs(r.discrete.gap) <= 1e-10);
  CHECK(r.report.gap >= -1e-12);
  const LevelRecord rec = summarize(r, 4);
  CHECK(rec.level == 4);
  CHECK(rec.elements == r.mesh->num_elements());
  CHECK(rec.sides == r.mesh->num_sides());
}
