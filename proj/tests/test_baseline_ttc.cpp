#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "shm/baseline_ttc.hpp"
#include "shm/scenario_gen.hpp"

namespace shm {
namespace {

TEST(Ttc, Examples) {
  EXPECT_EQ(ttc(50.0, 10.0), 5.0);
  EXPECT_FALSE(ttc(50.0, -3.0));
  EXPECT_FALSE(ttc(50.0, 0.0));
  EXPECT_EQ(ttc(0.0, 5.0), 0.0);

  PairGeometry g;
  g.d_sep = 50.0;
  g.closing_speed = 10.0;
  EXPECT_EQ(ttc(g), 5.0);
}

TEST(Ttc, ScaleCovariant) {
  oracle::Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    const double d = rng.uniform(0.1, 200.0);
    const double c = rng.uniform(0.1, 40.0);
    const double k = rng.uniform(0.1, 10.0);
    EXPECT_LE(oracle::rel_err(*ttc(k * d, k * c), *ttc(d, c)), 1e-14);
  }
}

TEST(Witness, RankingInversion) {
  const auto w = non_monotonicity_witness();
  EXPECT_EQ(w.a.d_sep, 70.0);
  EXPECT_EQ(w.a.closing_speed, 35.0);
  EXPECT_EQ(w.a.ttc, 2.0);
  EXPECT_EQ(w.a.m2, 17.5);  // 35^2 / 70
  EXPECT_EQ(w.b.ttc, 1.5);
  EXPECT_NEAR(w.b.m2, 2.0 / 3.0, 1e-9);  // 1^2 / 1.5
  EXPECT_LT(w.b.ttc, w.a.ttc);
  EXPECT_LT(w.b.m2, w.a.m2);
  EXPECT_TRUE(w.inverted());
}

// Car-following at constant speeds: the first frame with contact is within one
// frame of the TTC predicted from frame 0.
TEST(Ttc, MatchesSimulatedContactTime) {
  for (double rate : {20.0, 50.0}) {
    GeneratorSpec spec;
    spec.scenario_template = Template::car_following;
    spec.subject_speed = 15.0;
    spec.object_speed = 5.0;
    spec.gap = 40.0;
    spec.duration = 10.0;
    spec.frame_rate = rate;
    const Scenario s = generate(spec);
    const auto predicted = ttc(pair_geometry(s.frames[0].subject, s.frames[0].objects[0]));
    ASSERT_TRUE(predicted);
    EXPECT_DOUBLE_EQ(*predicted, 4.0);

    std::optional<double> contact;
    for (const auto& f : s.frames) {
      if (pair_geometry(f.subject, f.objects[0]).d_sep < kDistanceFloor ||
          f.objects[0].position.x <= f.subject.position.x) {
        contact = f.t;
        break;
      }
    }
    ASSERT_TRUE(contact);
    EXPECT_LE(std::abs(*contact - *predicted), 1.0 / rate);
  }
}

TEST(CompareScenario, RowPerSampleWithTtcWhenConverging) {
  GeneratorSpec spec;
  spec.scenario_template = Template::pass_by;
  spec.duration = 2.0;
  const Scenario s = generate(spec);
  const auto rows = compare_scenario(s, {});
  ASSERT_EQ(rows.size(), s.frames.size());
  for (const auto& r : rows) {
    EXPECT_EQ(r.ttc.has_value(), r.closing_speed > 0.0);
    if (r.ttc) {
      EXPECT_GT(*r.ttc, 0.0);
    }
  }
  const auto frame_ttc = ttc_frame(s.frames[0]);
  ASSERT_EQ(frame_ttc.size(), 1u);
  EXPECT_EQ(frame_ttc[0].ttc, rows[0].ttc);
}

}  // namespace
}  // namespace shm
