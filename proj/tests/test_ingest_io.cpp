#include <clocale>
#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "shm/ingest_io.hpp"
#include "shm/pipeline.hpp"
#include "shm/scenario_gen.hpp"

namespace shm {
namespace {

constexpr std::string_view kTwoFrames =
    R"({"t":0.0,"subject":{"id":"ego","kind":"car","x":0,"y":0,"vx":10,"vy":0},"objects":[{"id":"p","kind":"pedestrian","x":20,"y":1,"vx":0,"vy":0}]}
{"t":0.1,"subject":{"id":"ego","kind":"car","x":1,"y":0,"vx":10,"vy":0},"objects":[{"id":"p","kind":"pedestrian","x":20,"y":1,"vx":0,"vy":0}]}
)";

TEST(ParseScenario, TwoLines) {
  const Scenario s = parse_scenario(kTwoFrames);
  ASSERT_EQ(s.frames.size(), 2u);
  EXPECT_EQ(s.frames[1].subject.position, (Vec2{1, 0}));
  EXPECT_EQ(s.frames[0].objects[0].kind, ObjectKind::pedestrian);
}

TEST(ParseScenario, MissingVelocityNamesLine) {
  const std::string text = std::string(kTwoFrames) +
                           R"({"t":0.2,"subject":{"id":"ego","x":2,"y":0,"vx":10},"objects":[]})" + "\n";
  try {
    parse_scenario(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("vy"), std::string::npos);
  }
}

TEST(ParseScenario, MalformedJsonNamesLineAndColumn) {
  try {
    parse_scenario(std::string(kTwoFrames) + "{\"t\": 0.2, \"subject\": }\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GT(e.column(), 0u);
  }
}

TEST(ParseScenario, InvariantViolationIsValidationError) {
  const std::string text =
      R"({"t":1,"subject":{"id":"ego","x":0,"y":0,"vx":0,"vy":0},"objects":[{"id":"a","x":1,"y":0,"vx":0,"vy":0},{"id":"a","x":2,"y":0,"vx":0,"vy":0}]})";
  try {
    parse_scenario(text);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.violations().size(), 1u);
    EXPECT_EQ(e.violations()[0], (Violation{ViolationKind::DuplicateId, 0, "a"}));
  }
  EXPECT_NO_THROW(parse_scenario(text, {.validate = false}));
}

TEST(ParseScenario, UnknownKindIsOther) {
  const Scenario s = parse_scenario(
      R"({"t":0,"subject":{"id":"ego","kind":"hovercraft","x":0,"y":0,"vx":0,"vy":0},"objects":[]})");
  EXPECT_EQ(s.frames[0].subject.kind, ObjectKind::other);
}

// Constant-velocity tracks written without velocities; the backfill must
// reproduce the generating velocity.
TEST(ParseScenario, VelocityBackfill) {
  const Vec2 v_subject{12.5, -0.75};
  const Vec2 v_obj{-3.0, 4.25};
  std::string text;
  for (int i = 0; i < 6; ++i) {
    const double t = 0.05 * i;
    const Vec2 ps = Vec2{-10, 2} + v_subject * t;
    const Vec2 po = Vec2{30, -8} + v_obj * t;
    nlohmann::json j{{"t", t},
                     {"subject", {{"id", "ego"}, {"x", ps.x}, {"y", ps.y}}},
                     {"objects", {{{"id", "o"}, {"x", po.x}, {"y", po.y}}}}};
    text += j.dump() + "\n";
  }
  EXPECT_THROW(parse_scenario(text), ParseError);
  const Scenario s = parse_scenario(text, {.backfill_velocity = true});
  EXPECT_EQ(s.metadata.at("velocity_source"), "finite_difference");
  for (const auto& f : s.frames) {
    EXPECT_NEAR(f.subject.velocity.x, v_subject.x, 1e-9);
    EXPECT_NEAR(f.subject.velocity.y, v_subject.y, 1e-9);
    EXPECT_NEAR(f.objects[0].velocity.x, v_obj.x, 1e-9);
    EXPECT_NEAR(f.objects[0].velocity.y, v_obj.y, 1e-9);
  }
}

TEST(ParseScenario, BackfillRefusesPartialVelocity) {
  const std::string text = std::string(kTwoFrames) +
                           R"({"t":0.2,"subject":{"id":"ego","x":2,"y":0},"objects":[]})" + "\n";
  EXPECT_THROW(parse_scenario(text, {.backfill_velocity = true}), ParseError);
}

TEST(ScenarioRoundTrip, GeneratedAndHandBuilt) {
  GeneratorSpec spec;
  spec.scenario_template = Template::intersection_crossing;
  spec.background_objects = 4;
  spec.seed = 8;
  Scenario s = generate(spec);
  s.frames[3].objects[1].half_extent = Vec2{2.25, 0.9};
  s.frames[3].subject.half_extent = Vec2{2.4, 1.0};
  s.metadata["note"] = "quoted \"text\", commas, and unicode \xC3\xA9";
  EXPECT_EQ(parse_scenario(write_scenario(s)), s);

  oracle::Rng rng(61);
  Scenario r;
  r.name = "random";
  for (int i = 0; i < 50; ++i) {
    FrameSnapshot f{i * 0.1 + rng.uniform(0, 0.01), oracle::random_state(rng, "ego", 1e4, 1e2), {}};
    for (int k = 0; k < 5; ++k) f.objects.push_back(oracle::random_state(rng, "o" + std::to_string(k), 1e4, 1e2));
    r.frames.push_back(std::move(f));
  }
  EXPECT_EQ(parse_scenario(write_scenario(r)), r);
}

TEST(ScenarioRoundTrip, LocaleIndependent) {
  const char* prev = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = prev ? prev : "C";
  if (!std::setlocale(LC_NUMERIC, "de_DE.UTF-8")) GTEST_SKIP() << "de_DE locale not installed";
  const Scenario s = generate(GeneratorSpec{});
  const auto csv = write_samples_csv(evaluate_scenario(s, {}).samples());
  const bool same = parse_scenario(write_scenario(s)) == s;
  std::setlocale(LC_NUMERIC, saved.c_str());
  EXPECT_TRUE(same);
  EXPECT_EQ(csv.find(";"), std::string::npos);
}

TEST(FormatFixed, SevenSignificantDigitsNoExponent) {
  EXPECT_EQ(format_fixed(900.0), "900.0000");
  EXPECT_EQ(format_fixed(0.25), "0.2500000");
  EXPECT_EQ(format_fixed(0.0), "0.000000");
  EXPECT_EQ(format_fixed(-5.0), "-5.000000");
  EXPECT_EQ(format_fixed(1234567.0), "1234567");
  EXPECT_EQ(format_fixed(1e-7), "0.0000001000000");
}

TEST(SamplesCsv, HeaderAndRows) {
  EXPECT_EQ(write_samples_csv({}), std::string(kSamplesCsvHeader) + "\n");
  PairSample s;
  s.t = 1.5;
  s.subject_id = "ego";
  s.object_id = "p";
  s.m3 = 900.0;
  s.hazard_class = HazardClass::Unsafe;
  const auto text = write_samples_csv(std::vector{s});
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  EXPECT_NE(text.find("900.0000"), std::string::npos);
  const auto back = read_samples_csv(text);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_NEAR(back[0].m3, 900.0, 1e-6);
  EXPECT_EQ(back[0].hazard_class, HazardClass::Unsafe);
}

TEST(SamplesCsv, RoundTripWithinOneMicroRelative) {
  oracle::Rng rng(62);
  std::vector<PairSample> in;
  for (int i = 0; i < 2000; ++i) {
    PairSample s;
    s.t = rng.uniform(0, 1000);
    s.subject_id = "ego";
    s.object_id = "o" + std::to_string(i % 7);
    s.d_sep = rng.log_uniform(0.01, 1e4);
    s.closing_speed = rng.uniform(-50, 50);
    s.s_rel = std::abs(s.closing_speed);
    s.s_abs = rng.uniform(0, 50);
    s.m2 = rng.log_uniform(1e-6, 1e6);
    s.m3 = rng.log_uniform(1e-6, 1e6);
    s.hazard_class = static_cast<HazardClass>(rng.index(4));
    s.collision = rng.coin();
    in.push_back(s);
  }
  const auto out = read_samples_csv(write_samples_csv(in));
  ASSERT_EQ(out.size(), in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    for (auto field : {&PairSample::t, &PairSample::d_sep, &PairSample::closing_speed, &PairSample::s_rel,
                       &PairSample::s_abs, &PairSample::m2, &PairSample::m3}) {
      EXPECT_LE(oracle::rel_err(in[i].*field, out[i].*field), 1e-6) << "row " << i;
    }
    EXPECT_EQ(in[i].object_id, out[i].object_id);
    EXPECT_EQ(in[i].hazard_class, out[i].hazard_class);
    EXPECT_EQ(in[i].collision, out[i].collision);
  }
}

TEST(SamplesCsv, RejectsBadInput) {
  EXPECT_THROW(read_samples_csv("nope\n"), ParseError);
  const std::string bad = std::string(kSamplesCsvHeader) + "\n1,ego,o,1,1,1,1,1,1,Weird,0\n";
  try {
    read_samples_csv(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(HistogramJson, RoundTrip) {
  std::vector<PairSample> samples;
  for (double v : {0.5, 5.0, 50.0, 500.0, 10.0, 1e-9, 1e12}) {
    PairSample s;
    s.closing_speed = 1.0;
    s.m3 = v;
    samples.push_back(s);
  }
  for (const BinConfig& cfg : {BinConfig{-1, 3, 1}, BinConfig{}, BinConfig{-3, 5, 7, HistogramMeasure::m2}}) {
    const auto h = build_histogram(samples, cfg);
    EXPECT_EQ(parse_histogram_json(write_histogram_json(h)), h);
  }
  const auto empty = build_histogram(std::vector<PairSample>{}, BinConfig{});
  EXPECT_EQ(parse_histogram_json(write_histogram_json(empty)), empty);
  EXPECT_THROW(parse_histogram_json("{\"edges\": [1, 10]}"), ParseError);
}

TEST(SummaryJson, RoundTrip) {
  GeneratorSpec spec;
  spec.scenario_template = Template::pass_by;
  spec.background_objects = 3;
  const auto sum = summarize(evaluate_scenario(generate(spec), {}).samples());
  ASSERT_TRUE(sum.max_at);
  EXPECT_EQ(parse_summary_json(write_summary_json(sum)), sum);
  const ScenarioSummary empty;
  EXPECT_EQ(parse_summary_json(write_summary_json(empty)), empty);
}

TEST(Config, DefaultsRoundTrip) {
  const Config defaults;
  EXPECT_EQ(parse_config(write_config(defaults)), defaults);
  EXPECT_EQ(parse_config(""), defaults);
}

TEST(Config, ParsesSectionsCommentsAndReservedKeys) {
  const auto cfg = parse_config(R"(
# thresholds for the demo
[thresholds]
safe_max = 5        # m/s^2
hazardous_max = 50

[histogram]
bins_per_decade = 10
measure = "m2"

[generator]
template = intersection_crossing
seed = 12345678901234
offset = 0.75

[vehicle]
grip = 7.5
)");
  EXPECT_EQ(cfg.thresholds, (HazardThresholds{5, 50}));
  EXPECT_EQ(cfg.bins.bins_per_decade, 10);
  EXPECT_EQ(cfg.bins.measure, HistogramMeasure::m2);
  EXPECT_EQ(cfg.generator.scenario_template, Template::intersection_crossing);
  EXPECT_EQ(cfg.generator.seed, 12345678901234u);
  EXPECT_EQ(cfg.generator.offset, 0.75);
  EXPECT_EQ(cfg.vehicle.at("grip"), 7.5);
  EXPECT_EQ(parse_config(write_config(cfg)), cfg);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("[thresholds]\nsafe_max = 200\n"), ConfigError);  // above hazardous_max
  EXPECT_THROW(parse_config("[nonsense]\n"), ParseError);
  EXPECT_THROW(parse_config("[thresholds]\nbogus = 1\n"), ParseError);
  EXPECT_THROW(parse_config("safe_max = 1\n"), ParseError);
  EXPECT_THROW(parse_config("[histogram]\nbins_per_decade = 2.5\n"), ParseError);
  EXPECT_THROW(parse_config("[thresholds]\nsafe_max = \"ten\"\n"), ParseError);
  EXPECT_THROW(parse_config("[generator]\ntemplate = \"unterminated\n"), ParseError);
  EXPECT_THROW(parse_config("[histogram]\nbins_per_decade = 0\n"), ConfigError);
}

TEST(WriteFileAtomic, ReplacesContent) {
  const auto dir = std::filesystem::temp_directory_path() / "shm_atomic_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.txt";
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  EXPECT_EQ(read_file(path), "second");
  EXPECT_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace shm
