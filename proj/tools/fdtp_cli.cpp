#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "fdtp/disparity.hpp"
#include "fdtp/io.hpp"
#include "fdtp/pipeline.hpp"
#include "fdtp/sweep.hpp"
#include "fdtp/synth.hpp"

namespace fs = std::filesystem;
using namespace fdtp;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitBadSpec = 2;
constexpr int kExitBadFormat = 3;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io::FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// ---- synth ----

struct SynthArgs {
  fs::path spec;
  fs::path out;
  std::optional<std::uint64_t> seed;
};

int cmd_synth(const SynthArgs& a) {
  io::SceneFile scene;
  try {
    scene = io::parse_scene(slurp(a.spec));
    if (a.seed) {
      scene.spec.texture.seed = *a.seed;
      scene.spec.noise_seed = *a.seed;
    }
  } catch (const std::exception& e) {
    std::cerr << "fdtp synth: invalid spec: " << e.what() << '\n';
    return kExitBadSpec;
  }
  const synth::Rendered r = synth::render(scene.spec, scene.geometry);
  io::save_frames(a.out, r.frames);
  std::ofstream gt = open_out(a.out / "gt.csv");
  io::write_ground_truth_csv(gt, r.truth);
  return 0;
}

// ---- run ----

struct RunArgs {
  fs::path frames;
  fs::path config;
  fs::path out;
  std::optional<int> workers;
  std::optional<std::string> texture;
  std::optional<std::string> features;
};

std::vector<double> final_targets(const DisparityMap& map) {
  std::vector<double> t;
  t.reserve(map.tiles.size());
  for (const DisparityEstimate& e : map.tiles) t.push_back(e.valid ? std::max(0.0, e.disparity) : 0.0);
  return t;
}

int cmd_run(const RunArgs& a) {
  io::RunConfig cfg;
  QuadFrameSet frames;
  try {
    if (!a.config.empty()) cfg = io::load_run_config(a.config);
    if (a.workers) cfg.workers = *a.workers;
    if (a.texture) cfg.texture = *a.texture;
    if (a.features) cfg.features = *a.features;
    cfg.validate();
    frames = io::load_frames(a.frames, cfg);
  } catch (const io::FormatError& e) {
    std::cerr << "fdtp run: " << e.what() << '\n';
    return kExitBadFormat;
  } catch (const std::invalid_argument& e) {
    std::cerr << "fdtp run: " << e.what() << '\n';
    return kExitBadFormat;
  }

  const DisparityMap map = estimate_frame(frames, cfg.estimate_params());
  fs::create_directories(a.out);
  {
    std::ofstream csv = open_out(a.out / cfg.disparity_csv);
    io::write_disparity_csv(csv, map);
  }
  if (!cfg.texture.empty() || !cfg.features.empty()) {
    const std::vector<double> targets = final_targets(map);
    FrameOptions opt;
    opt.correlation = cfg.estimate_params().refine.correlation;
    opt.workers = cfg.workers;
    opt.texture = !cfg.texture.empty();
    const FrameCorrelation fc = process_frame(frames, targets, opt);
    if (fc.texture) {
      io::write_ppm16(a.out / (cfg.texture + ".ppm"), fc.texture->rgb);
      io::write_pgm16(a.out / (cfg.texture + "_alpha.pgm"), fc.texture->alpha);
    }
    if (!cfg.features.empty()) {
      std::ofstream f = open_out(a.out / cfg.features);
      write_features(f, export_features(fc, targets));
    }
  }
  return 0;
}

// ---- sweep ----

struct SweepArgs {
  std::string mode;
  fs::path out;
  int count = 100;
  std::uint64_t seed = 1;
  double from = 0.0;
  double to = 1.0;
  double step = 0.02;
  int size = 96;
  int workers = 1;
};

int cmd_sweep(const SweepArgs& a) {
  if (a.mode != "pixel-locking" && a.mode != "reconstruction" && a.mode != "shift-theorem") {
    std::cerr << "fdtp sweep: unknown mode '" << a.mode
              << "' (pixel-locking, reconstruction, shift-theorem)\n";
    return kExitBadSpec;
  }
  std::ostringstream csv;
  bool ok = true;
  std::string summary;
  if (a.mode == "reconstruction") {
    const auto pts = reconstruction_sweep(a.count, a.seed);
    csv << "image,max_error\n";
    double worst = 0.0;
    for (const ReconstructionPoint& p : pts) {
      csv << p.image << ',' << io::format_double(p.max_error) << '\n';
      worst = std::max(worst, p.max_error);
    }
    ok = worst <= 1e-9;
    summary = "max interior error " + io::format_double(worst) + " (limit 1e-9)";
  } else if (a.mode == "shift-theorem") {
    const auto pts = shift_theorem_sweep(a.seed, {-0.5, -0.25, 0.0, 0.25, 0.5});
    csv << "dx,dy,peak_x,peak_y,error\n";
    double worst = 0.0;
    for (const ShiftPoint& p : pts) {
      csv << io::format_double(p.dx) << ',' << io::format_double(p.dy) << ','
          << io::format_double(p.peak.x) << ',' << io::format_double(p.peak.y) << ','
          << io::format_double(p.error) << '\n';
      worst = std::max(worst, p.error);
    }
    ok = worst <= 0.02;
    summary = "max peak error " + io::format_double(worst) + " px (limit 0.02)";
  } else {
    SweepParams sp;
    sp.workers = a.workers;
    const auto scene = [&](double d) {
      synth::SceneSpec s;
      s.width = a.size;
      s.height = a.size;
      s.disparity = d;
      s.texture.seed = a.seed;
      return synth::render(s).frames;
    };
    const auto curve = pixel_locking_sweep(scene, a.from, a.to, a.step, sp);
    io::write_bias_csv(csv, curve);
    double refined = 0.0;
    double single = 0.0;
    for (const BiasPoint& b : curve) {
      refined = std::max(refined, std::abs(b.refined_bias));
      single = std::max(single, std::abs(b.single_bias));
    }
    ok = refined <= 0.02 && single >= 2.0 * refined;
    summary = "max |bias| refined " + io::format_double(refined) + " single-pass " +
              io::format_double(single) + " (limits 0.02, ratio >= 2)";
  }
  if (!a.out.empty()) {
    std::ofstream out = open_out(a.out);
    out << csv.str();
  } else {
    std::cout << csv.str();
  }
  std::cerr << "fdtp sweep " << a.mode << ": " << summary << (ok ? "" : " VIOLATED") << '\n';
  return ok ? 0 : kExitFailure;
}

// ---- bench ----

struct BenchArgs {
  fs::path frames;
  fs::path config;
  int repeat = 1;
  fs::path out;
};

int cmd_bench(const BenchArgs& a) {
  io::RunConfig cfg;
  QuadFrameSet frames;
  try {
    if (!a.config.empty()) cfg = io::load_run_config(a.config);
    frames = io::load_frames(a.frames, cfg);
  } catch (const std::exception& e) {
    std::cerr << "fdtp bench: " << e.what() << '\n';
    return kExitBadFormat;
  }
  if (a.repeat < 1) {
    std::cerr << "fdtp bench: repeat must be >= 1\n";
    return kExitFailure;
  }
  using clock = std::chrono::steady_clock;
  auto seconds = [](clock::duration d) { return std::chrono::duration<double>(d).count(); };
  const CorrelationParams cp = cfg.estimate_params().refine.correlation;
  const TileGridShape shape = tile_grid_shape(frames.width(), frames.height());

  std::ostringstream csv;
  csv << "repeat,tiles,wall_s,mclt_s,correlation_s,fit_s,tiles_per_s\n";
  for (int rep = 0; rep < a.repeat; ++rep) {
    clock::duration mclt{};
    clock::duration corr{};
    clock::duration fit{};
    const auto start = clock::now();
    for (int row = 0; row < shape.rows; ++row) {
      for (int col = 0; col < shape.cols; ++col) {
        const auto t0 = clock::now();
        const UnaryTiles unary = process_tile_unary(frames, make_tile_job(frames, row, col, 0.0));
        const auto t1 = clock::now();
        const TileCorrSet set = correlate_tile(unary, cp);
        const auto t2 = clock::now();
        if (set.valid) {
          try {
            (void)combine_directions(set);
          } catch (const std::invalid_argument&) {
          }
        }
        const auto t3 = clock::now();
        mclt += t1 - t0;
        corr += t2 - t1;
        fit += t3 - t2;
      }
    }
    const double wall = seconds(clock::now() - start);
    csv << rep << ',' << shape.count() << ',' << wall << ',' << seconds(mclt) << ','
        << seconds(corr) << ',' << seconds(fit) << ',' << shape.count() / wall << '\n';
  }
  if (!a.out.empty()) {
    std::ofstream out = open_out(a.out);
    out << csv.str();
  } else {
    std::cout << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-domain quad-camera tile processor"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "Render a synthetic quad-camera frame set");
  synth_cmd->add_option("--spec", synth_args.spec, "Scene spec JSON")->required();
  synth_cmd->add_option("--out", synth_args.out, "Output directory")->required();
  synth_cmd->add_option("--seed", synth_args.seed, "Override texture and noise seeds");

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Estimate per-tile disparity for a frame set");
  run_cmd->add_option("--frames", run_args.frames, "Frame directory")->required();
  run_cmd->add_option("--config", run_args.config, "Run config JSON");
  run_cmd->add_option("--out", run_args.out, "Output directory")->required();
  run_cmd->add_option("--workers", run_args.workers, "Worker threads");
  run_cmd->add_option("--texture", run_args.texture, "Texture output base name");
  run_cmd->add_option("--features", run_args.features, "Feature dump file name");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a property sweep and check its tolerance");
  sweep_cmd->add_option("--mode", sweep_args.mode, "pixel-locking, reconstruction or shift-theorem")
      ->required();
  sweep_cmd->add_option("--out", sweep_args.out, "CSV output (stdout if omitted)");
  sweep_cmd->add_option("--count", sweep_args.count, "Images for reconstruction");
  sweep_cmd->add_option("--seed", sweep_args.seed, "Random / texture seed");
  sweep_cmd->add_option("--from", sweep_args.from, "Pixel-locking start disparity");
  sweep_cmd->add_option("--to", sweep_args.to, "Pixel-locking end disparity");
  sweep_cmd->add_option("--step", sweep_args.step, "Pixel-locking step");
  sweep_cmd->add_option("--size", sweep_args.size, "Pixel-locking frame size");
  sweep_cmd->add_option("--workers", sweep_args.workers, "Worker threads");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Time the per-tile stages");
  bench_cmd->add_option("--frames", bench_args.frames, "Frame directory")->required();
  bench_cmd->add_option("--config", bench_args.config, "Run config JSON");
  bench_cmd->add_option("--repeat", bench_args.repeat, "Repetitions");
  bench_cmd->add_option("--out", bench_args.out, "CSV output (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth_args);
    if (run_cmd->parsed()) return cmd_run(run_args);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_args);
    if (bench_cmd->parsed()) return cmd_bench(bench_args);
  } catch (const std::exception& e) {
    std::cerr << "fdtp: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
