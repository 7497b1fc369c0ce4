#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shm/shm.hpp"

namespace shm::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kUsage = 2 };

namespace detail {

struct Options {
  std::string config_path;
  bool print_config = false;

  // compute / validate / compare
  std::string in;
  std::string out;
  std::string summary;
  std::string frames;
  unsigned threads = 1;
  bool backfill = false;

  // simulate
  std::optional<std::string> tmpl;
  std::optional<double> speed, object_speed, offset, gap, frame_rate, duration, jitter;
  std::optional<int> objects, background;
  std::optional<std::uint64_t> seed;

  // hist / plot
  std::optional<std::string> measure;
  std::optional<int> decade_min, decade_max, bins_per_decade;
  std::string histogram;
  std::string samples;

  // compare
  bool witness = false;
};

inline void emit(const std::string& path, const std::string& bytes, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << bytes;
  } else {
    write_file_atomic(path, bytes);
  }
}

inline Config load_config(const Options& o) {
  if (o.config_path.empty()) return Config{};
  try {
    return parse_config(read_file(o.config_path));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(o.config_path + ": " + e.what());
  }
}

inline void apply_bin_flags(const Options& o, BinConfig& b) {
  if (o.measure) b.measure = parse_histogram_measure(*o.measure);
  if (o.decade_min) b.decade_min = *o.decade_min;
  if (o.decade_max) b.decade_max = *o.decade_max;
  if (o.bins_per_decade) b.bins_per_decade = *o.bins_per_decade;
  b.validate();
}

inline std::string frames_csv(const ScenarioResult& r) {
  std::string out = "t,max_m3,max_object_id,max_class,running_max_m3\n";
  for (const auto& f : r.frames) {
    out += format_fixed(f.t) + ',' + format_fixed(f.max_m3) + ',' +
           (f.max_index ? f.samples[*f.max_index].object_id : std::string()) + ',' +
           std::string(to_string(f.max_class())) + ',' + format_fixed(f.running_max_m3) + '\n';
  }
  return out;
}

inline std::string witness_table(const WitnessReport& w) {
  std::string out = "encounter,d_sep,closing_speed,ttc,m2,m3\n";
  for (const auto* e : {&w.a, &w.b}) {
    out += e->name + ',' + format_fixed(e->d_sep) + ',' + format_fixed(e->closing_speed) + ',' +
           format_fixed(e->ttc) + ',' + format_fixed(e->m2) + ',' + format_fixed(e->m3) + '\n';
  }
  out += std::string("ttc ranks B more urgent: ") + (w.ttc_ranks_b_more_urgent ? "yes" : "no") + '\n';
  out += std::string("m2 ranks A more hazardous: ") + (w.m2_ranks_a_more_hazardous ? "yes" : "no") + '\n';
  return out;
}

inline std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "t,object_id,d_sep,closing_speed,ttc,m2,m3,class\n";
  for (const auto& r : rows) {
    out += format_fixed(r.t) + ',' + r.object_id + ',' + format_fixed(r.d_sep) + ',' +
           format_fixed(r.closing_speed) + ',' + (r.ttc ? format_fixed(*r.ttc) : std::string()) + ',' +
           format_fixed(r.m2) + ',' + format_fixed(r.m3) + ',' + std::string(to_string(r.hazard_class)) +
           '\n';
  }
  return out;
}

}  // namespace detail

/// Runs one command line. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  detail::Options o;
  CLI::App app{"Pairwise collision hazard scoring for trajectory scenarios", "shm"};
  app.add_option("--config", o.config_path, "Config file (thresholds, histogram, generator)");
  app.add_flag("--print-config", o.print_config, "Print the effective configuration and exit");

  auto* compute = app.add_subcommand("compute", "Score a scenario: samples CSV + summary JSON");
  compute->add_option("--in", o.in, "Scenario JSON-lines file")->required();
  compute->add_option("--thresholds", o.config_path, "Config file supplying [thresholds]");
  compute->add_option("--out", o.out, "Samples CSV output");
  compute->add_option("--summary", o.summary, "Summary JSON output");
  compute->add_option("--frames", o.frames, "Per-frame max / running max CSV output");
  compute->add_option("--threads", o.threads, "Worker threads for frame evaluation")->check(CLI::Range(1u, 256u));
  compute->add_flag("--backfill-velocity", o.backfill, "Derive velocities when the file has none");

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic scenario");
  simulate->add_option("--template", o.tmpl, "intersection_crossing | pass_by | car_following | diverging_control");
  simulate->add_option("--speed", o.speed, "Subject speed [m/s]");
  simulate->add_option("--object-speed", o.object_speed, "Featured object speed [m/s]");
  simulate->add_option("--offset", o.offset, "Lateral / crossing offset [m]");
  simulate->add_option("--gap", o.gap, "Initial following gap [m]");
  simulate->add_option("--frame-rate", o.frame_rate, "Frames per second");
  simulate->add_option("--duration", o.duration, "Scenario length [s]");
  simulate->add_option("--objects", o.objects, "Object count for diverging_control");
  simulate->add_option("--background", o.background, "Background traffic objects");
  simulate->add_option("--jitter", o.jitter, "Spread of background start positions [m]");
  simulate->add_option("--seed", o.seed, "Seed for background traffic");
  simulate->add_option("--out", o.out, "Scenario JSON-lines output")->required();

  auto* hist = app.add_subcommand("hist", "Histogram of hazard values from a samples CSV");
  hist->add_option("--in", o.in, "Samples CSV")->required();
  hist->add_option("--out", o.out, "Histogram JSON output (stdout if omitted)");
  hist->add_option("--measure", o.measure, "m3 (default) or m2");
  hist->add_option("--decade-min", o.decade_min, "Lowest decade exponent");
  hist->add_option("--decade-max", o.decade_max, "Highest decade exponent");
  hist->add_option("--bins-per-decade", o.bins_per_decade, "Bins per decade");

  auto* compare = app.add_subcommand("compare", "Hazard measure next to time-to-collision");
  compare->add_option("--in", o.in, "Scenario JSON-lines file");
  compare->add_option("--out", o.out, "Comparison CSV output (stdout if omitted)");
  compare->add_flag("--witness", o.witness, "Print the TTC ranking-inversion witness");
  compare->add_flag("--backfill-velocity", o.backfill, "Derive velocities when the file has none");

  auto* plot = app.add_subcommand("plot", "Render a histogram or per-object series as SVG");
  plot->add_option("--histogram", o.histogram, "Histogram JSON input");
  plot->add_option("--samples", o.samples, "Samples CSV input (per-object series plot)");
  plot->add_option("--measure", o.measure, "Series measure: m3 (default) or m2");
  plot->add_option("--out", o.out, "SVG output")->required();

  auto* validate = app.add_subcommand("validate", "Check a scenario's invariants");
  validate->add_option("--in", o.in, "Scenario JSON-lines file")->required();
  validate->add_flag("--backfill-velocity", o.backfill, "Derive velocities when the file has none");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    Config cfg = detail::load_config(o);
    if (o.print_config) {
      out << write_config(cfg);
      return kOk;
    }

    if (*compute) {
      cfg.thresholds.validate();
      const Scenario s = parse_scenario(read_file(o.in), {.backfill_velocity = o.backfill});
      const ScenarioResult r = evaluate_scenario(s, cfg.thresholds, o.threads);
      const auto samples = r.samples();
      const std::string summary = write_summary_json(summarize(samples));
      if (!o.out.empty()) detail::emit(o.out, write_samples_csv(samples), out);
      if (!o.frames.empty()) detail::emit(o.frames, detail::frames_csv(r), out);
      detail::emit(o.summary, summary, out);
      return kOk;
    }
    if (*simulate) {
      GeneratorSpec g = cfg.generator;
      if (o.tmpl) g.scenario_template = parse_template(*o.tmpl);
      if (o.speed) g.subject_speed = *o.speed;
      if (o.object_speed) g.object_speed = *o.object_speed;
      if (o.offset) g.offset = *o.offset;
      if (o.gap) g.gap = *o.gap;
      if (o.frame_rate) g.frame_rate = *o.frame_rate;
      if (o.duration) g.duration = *o.duration;
      if (o.objects) g.object_count = *o.objects;
      if (o.background) g.background_objects = *o.background;
      if (o.jitter) g.jitter = *o.jitter;
      if (o.seed) g.seed = *o.seed;
      detail::emit(o.out, write_scenario(generate(g)), out);
      return kOk;
    }
    if (*hist) {
      detail::apply_bin_flags(o, cfg.bins);
      const auto samples = read_samples_csv(read_file(o.in));
      detail::emit(o.out, write_histogram_json(build_histogram(samples, cfg.bins)), out);
      return kOk;
    }
    if (*compare) {
      if (o.in.empty() && !o.witness) {
        err << "error: compare needs --in and/or --witness\n";
        return kUsage;
      }
      if (o.witness) out << detail::witness_table(non_monotonicity_witness());
      if (!o.in.empty()) {
        cfg.thresholds.validate();
        const Scenario s = parse_scenario(read_file(o.in), {.backfill_velocity = o.backfill});
        detail::emit(o.out, detail::comparison_csv(compare_scenario(s, cfg.thresholds)), out);
      }
      return kOk;
    }
    if (*plot) {
      if (o.histogram.empty() == o.samples.empty()) {
        err << "error: plot needs exactly one of --histogram or --samples\n";
        return kUsage;
      }
      if (!o.histogram.empty()) {
        detail::emit(o.out, plot_histogram_svg(parse_histogram_json(read_file(o.histogram))), out);
      } else {
        const auto m = o.measure ? parse_histogram_measure(*o.measure) : HistogramMeasure::m3;
        const auto samples = read_samples_csv(read_file(o.samples));
        detail::emit(o.out, plot_series_svg(series_per_object(samples), m), out);
      }
      return kOk;
    }
    if (*validate) {
      const Scenario s = parse_scenario(read_file(o.in), {.backfill_velocity = o.backfill, .validate = false});
      const auto violations = validate_scenario(s);
      for (const auto& v : violations) out << describe(v) << '\n';
      if (violations.empty()) out << "ok: " << s.frames.size() << " frames\n";
      return violations.empty() ? kOk : kValidation;
    }
    out << app.help();
    return kUsage;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    for (const auto& v : e.violations()) err << "  " << describe(v) << '\n';
    return kValidation;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
}

}  // namespace shm::cli
