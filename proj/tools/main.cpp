// dualwarp command-line tool. Every subcommand is a thin adapter over the
// core library; exit codes: 0 ok, 1 invalid arguments, 2 format error,
// 3 lemma violation.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dualwarp/camera.hpp"
#include "dualwarp/complete.hpp"
#include "dualwarp/datagen.hpp"
#include "dualwarp/errors.hpp"
#include "dualwarp/io.hpp"
#include "dualwarp/metrics.hpp"
#include "dualwarp/scene.hpp"
#include "dualwarp/warp.hpp"

namespace fs = std::filesystem;
using namespace dualwarp;

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitFormat = 2;
constexpr int kExitViolation = 3;

std::vector<double> parse_numbers(const std::string& text, std::size_t count, const char* what) {
  std::istringstream in(text);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof() || out.size() != count) {
    throw InvalidArgument(std::string(what) + " expects " + std::to_string(count) +
                          " numbers, got \"" + text + "\"");
  }
  return out;
}

// "tx ty tz yaw", yaw in degrees about the vertical axis.
Pose parse_pose(const std::string& text) {
  const auto v = parse_numbers(text, 4, "--pose");
  return Pose::from_yaw(v[3], Eigen::Vector3d(v[0], v[1], v[2]));
}

// Without --intrinsics: principal point at the image centre and a focal
// length of 0.8125 image widths (about 63 degrees horizontal field of view).
CameraIntrinsics intrinsics_for(const std::string& text, int width, int height) {
  if (!text.empty()) {
    const auto v = parse_numbers(text, 3, "--intrinsics");
    return {v[0], v[1], v[2]};
  }
  return {0.8125 * width, 0.5 * (width - 1), 0.5 * (height - 1)};
}

WarpConfig warp_config(int supersample) {
  WarpConfig cfg;
  cfg.supersample = supersample;
  return cfg;
}

std::vector<DepthImage> load_inputs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InvalidArgument("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".dpm" || ext == ".png")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<DepthImage> images;
  for (const auto& f : files) images.push_back(read_depth(f));
  return images;
}

struct GenerateArgs {
  std::string strategy = "dual";
  std::string in;
  std::string out;
  int pairs = 25;
  std::uint64_t seed = 0;
  double trans = 1.0;
  double yaw = 15.0;
  int supersample = 2;
  std::string intrinsics;
  double max_fraction = 0.20;
  int block_min = 1;
  int block_max = 50;
  int jobs = 1;
};

int run_generate(const GenerateArgs& a) {
  const std::vector<DepthImage> images = load_inputs(a.in);
  if (images.empty()) throw InvalidArgument("no .dpm or .png depth images in " + a.in);
  for (const auto& img : images) {
    if (img.width() != images[0].width() || img.height() != images[0].height()) {
      throw InvalidArgument("input images must share one size");
    }
  }
  const CameraIntrinsics k = intrinsics_for(a.intrinsics, images[0].width(), images[0].height());
  GenerationResult result;
  if (a.strategy == "dual") {
    PoseSamplerConfig pose_cfg{a.trans, a.yaw, a.seed};
    result = generate_strategy1(images, k, pose_cfg, warp_config(a.supersample), a.pairs, a.out,
                                a.jobs);
  } else {
    BlockRemovalConfig cfg{a.max_fraction, a.block_min, a.block_max, a.seed};
    result = generate_strategy2(images, k, cfg, a.pairs, a.out, a.jobs);
  }
  for (const auto& s : result.skipped) {
    std::cerr << "skipped image " << s.image << " pair " << s.pair << ": " << s.reason << "\n";
  }
  std::cout << "entries: " << result.manifest.entries.size() << "\n";
  return 0;
}

struct WarpArgs {
  std::string depth;
  std::string pose;
  std::string intrinsics;
  int supersample = 2;
  std::string out;
};

int run_warp(const WarpArgs& a) {
  const DepthImage src = read_depth(a.depth);
  const CameraIntrinsics k = intrinsics_for(a.intrinsics, src.width(), src.height());
  write_depth(a.out, warp_depth(src, k, parse_pose(a.pose), warp_config(a.supersample)));
  return 0;
}

struct CompleteArgs {
  std::string occluded;
  std::string mask;
  std::string flow;
  std::string method = "nearest";
  bool fill_unresolved = false;
  int iterations = 5000;
  double tolerance = 1e-6;
  std::string out;
};

int run_complete(const CompleteArgs& a) {
  const DepthImage occluded = read_depth(a.occluded);
  const PixelMask mask = read_mask(a.mask, occluded);
  DepthImage result = occluded;
  if (!a.flow.empty() || a.method == "nearest") {
    const DisplacementField field =
        a.flow.empty() ? nearest_valid_field(occluded, mask) : read_flow(a.flow);
    const DisplacementResult applied = apply_displacement(occluded, mask, field);
    std::cout << "unresolved: " << applied.unresolved.size() << "\n";
    result = a.fill_unresolved ? fill_unresolved(applied, a.iterations, a.tolerance)
                               : applied.depth;
  } else {
    const InpaintResult filled = diffuse_inpaint(occluded, mask, a.iterations, a.tolerance);
    std::cout << "iterations: " << filled.iterations << "\n";
    std::size_t unfilled = 0;
    for (auto n : filled.unfilled_regions) unfilled += n;
    std::cout << "unfilled: " << unfilled << "\n";
    result = filled.depth;
  }
  write_depth(a.out, result);
  return 0;
}

struct FuseArgs {
  std::string depth;
  int poses = 8;
  std::uint64_t seed = 0;
  std::string method = "nearest";
  std::string intrinsics;
  int supersample = 2;
  int jobs = 1;
  std::string out;
};

int run_fuse(const FuseArgs& a) {
  const DepthImage base = read_depth(a.depth);
  const CameraIntrinsics k = intrinsics_for(a.intrinsics, base.width(), base.height());
  const Completer completer = a.method == "nearest" ? nearest_completer() : diffuse_completer();
  write_depth(a.out, fuse_views(base, k, default_fusion_poses(a.seed, a.poses), completer,
                                warp_config(a.supersample), a.jobs));
  return 0;
}

struct EvalArgs {
  std::string pred;
  std::string truth;
  std::string mask;
  std::string occluded;
  std::string content_source = "prediction";
  std::vector<std::string> rgb;
  double lambda = 1e-3;
  double gamma = 1e-5;
  std::string json;
};

int run_eval(const EvalArgs& a) {
  const DepthImage pred = read_depth(a.pred);
  const DepthImage truth = read_depth(a.truth);
  if (pred.width() != truth.width() || pred.height() != truth.height()) {
    throw FormatError(a.pred + ": dimensions differ from " + a.truth);
  }
  const PixelMask mask = read_mask(a.mask, truth);
  LossConfig cfg;
  cfg.lambda = a.lambda;
  cfg.gamma = a.gamma;
  cfg.content_source = a.content_source == "occluded" ? ContentSource::OccludedInput
                                                      : ContentSource::Prediction;
  if (cfg.content_source == ContentSource::OccludedInput && a.occluded.empty()) {
    throw InvalidArgument("--content-source occluded needs --occluded");
  }
  const DepthImage occluded = a.occluded.empty() ? pred : read_depth(a.occluded);

  MetricsReport report;
  report.errors = masked_errors(pred, truth, mask);
  report.loss_tv = loss_tv(pred, truth, mask, cfg);
  const DepthImage& compared =
      cfg.content_source == ContentSource::Prediction ? pred : occluded;
  report.loss_content = loss_content(compared, truth, mask, cfg);
  report.loss_total = report.loss_tv + report.loss_content;
  if (!a.rgb.empty()) {
    report.psnr = psnr(read_rgb(a.rgb[0]), read_rgb(a.rgb[1]), mask);
  }
  std::cout << metrics_report_to_text(report);
  if (!a.json.empty()) write_text_file(a.json, metrics_report_to_json(report));
  return 0;
}

struct LemmaArgs {
  int trials = 100;
  std::uint64_t seed = 0;
  int supersample = 2;
  int jobs = 1;
};

int run_verify_lemma(const LemmaArgs& a) {
  const LemmaSuiteResult r = run_lemma_suite(a.trials, a.seed, warp_config(a.supersample), a.jobs);
  std::size_t pixels = 0;
  std::size_t spurious = 0;
  for (std::size_t t = 0; t < r.reports.size(); ++t) {
    pixels += r.reports[t].violations;
    spurious += r.reports[t].spurious;
    if (r.reports[t].violations > 0) {
      std::cerr << "trial " << t << ": " << r.reports[t].violations << " violating pixels\n";
    }
  }
  std::cout << "violations: " << r.failed_trials << "/" << a.trials << "\n";
  std::cout << "violating pixels: " << pixels << "\n";
  std::cout << "spurious occlusion pixels: " << spurious << "\n";
  return r.failed_trials > 0 ? kExitViolation : 0;
}

struct RenderArgs {
  std::string scene;
  std::uint64_t random_seed = 0;
  std::string save_scene;
  std::string pose = "0 0 0 0";
  std::string intrinsics;
  int width = OracleCamera{}.width;
  int height = OracleCamera{}.height;
  std::string out;
};

int run_render(const RenderArgs& a) {
  const Scene scene = a.scene.empty() ? random_scene(a.random_seed) : read_scene(a.scene);
  if (!a.save_scene.empty()) write_scene(a.save_scene, scene);
  const CameraIntrinsics k = a.intrinsics.empty() && a.width == OracleCamera{}.width &&
                                     a.height == OracleCamera{}.height
                                 ? OracleCamera{}.k
                                 : intrinsics_for(a.intrinsics, a.width, a.height);
  write_depth(a.out, render_depth(scene, k, parse_pose(a.pose), a.width, a.height));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth-image dual warping, completion and evaluation"};
  app.require_subcommand(1);
  int code = 0;

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Build (occluded, complete) training pairs");
  g->add_option("--strategy", gen.strategy, "dual (warp forth and back) or blocks")
      ->check(CLI::IsMember({"dual", "blocks"}));
  g->add_option("--in", gen.in, "Directory of .dpm/.png depth images")->required();
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--pairs", gen.pairs, "Pairs per image")->check(CLI::NonNegativeNumber);
  g->add_option("--seed", gen.seed);
  g->add_option("--trans", gen.trans, "Translation range in meters")->check(CLI::NonNegativeNumber);
  g->add_option("--yaw", gen.yaw, "Yaw range in degrees")->check(CLI::NonNegativeNumber);
  g->add_option("--supersample", gen.supersample)->check(CLI::PositiveNumber);
  g->add_option("--intrinsics", gen.intrinsics, "\"f cx cy\"");
  g->add_option("--max-fraction", gen.max_fraction, "blocks: removal budget");
  g->add_option("--block-min", gen.block_min);
  g->add_option("--block-max", gen.block_max);
  g->add_option("--jobs", gen.jobs)->check(CLI::PositiveNumber);
  g->callback([&] { code = run_generate(gen); });

  WarpArgs warp;
  auto* w = app.add_subcommand("warp", "Forward-warp a depth image to a relative pose");
  w->add_option("--depth", warp.depth)->required();
  w->add_option("--pose", warp.pose, "\"tx ty tz yaw\"")->required();
  w->add_option("--intrinsics", warp.intrinsics, "\"f cx cy\"");
  w->add_option("--supersample", warp.supersample)->check(CLI::PositiveNumber);
  w->add_option("--out", warp.out)->required();
  w->callback([&] { code = run_warp(warp); });

  CompleteArgs comp;
  auto* c = app.add_subcommand("complete", "Fill the masked pixels of a depth image");
  c->add_option("--occluded", comp.occluded)->required();
  c->add_option("--mask", comp.mask)->required();
  auto* flow = c->add_option("--flow", comp.flow, "Displacement field to apply");
  c->add_option("--method", comp.method)
      ->check(CLI::IsMember({"nearest", "diffuse"}))
      ->excludes(flow);
  c->add_flag("--fill-unresolved", comp.fill_unresolved,
              "Diffuse into pixels whose displacement hits unknown depth");
  c->add_option("--iterations", comp.iterations)->check(CLI::PositiveNumber);
  c->add_option("--tolerance", comp.tolerance)->check(CLI::NonNegativeNumber);
  c->add_option("--out", comp.out)->required();
  c->callback([&] { code = run_complete(comp); });

  FuseArgs fuse;
  auto* f = app.add_subcommand("fuse", "Median fusion of completions from nearby poses");
  f->add_option("--depth", fuse.depth)->required();
  f->add_option("--poses", fuse.poses)->check(CLI::PositiveNumber);
  f->add_option("--seed", fuse.seed);
  f->add_option("--method", fuse.method)->check(CLI::IsMember({"nearest", "diffuse"}));
  f->add_option("--intrinsics", fuse.intrinsics, "\"f cx cy\"");
  f->add_option("--supersample", fuse.supersample)->check(CLI::PositiveNumber);
  f->add_option("--jobs", fuse.jobs)->check(CLI::PositiveNumber);
  f->add_option("--out", fuse.out)->required();
  f->callback([&] { code = run_fuse(fuse); });

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Masked errors, losses and PSNR");
  e->add_option("--pred", ev.pred)->required();
  e->add_option("--truth", ev.truth)->required();
  e->add_option("--mask", ev.mask)->required();
  e->add_option("--occluded", ev.occluded, "Occluded input, for the content loss switch");
  e->add_option("--content-source", ev.content_source)
      ->check(CLI::IsMember({"prediction", "occluded"}));
  e->add_option("--rgb", ev.rgb, "Predicted and true colour images (.ppm)")->expected(2);
  e->add_option("--lambda", ev.lambda)->check(CLI::NonNegativeNumber);
  e->add_option("--gamma", ev.gamma)->check(CLI::NonNegativeNumber);
  e->add_option("--json", ev.json, "Also write the report as JSON");
  e->callback([&] { code = run_eval(ev); });

  LemmaArgs lemma;
  auto* l = app.add_subcommand("verify-lemma", "Check occlusion containment on oracle scenes");
  l->add_option("--trials", lemma.trials)->check(CLI::NonNegativeNumber);
  l->add_option("--seed", lemma.seed);
  l->add_option("--supersample", lemma.supersample)->check(CLI::PositiveNumber);
  l->add_option("--jobs", lemma.jobs)->check(CLI::PositiveNumber);
  l->callback([&] { code = run_verify_lemma(lemma); });

  RenderArgs render;
  auto* r = app.add_subcommand("render", "Ray-cast the depth of a scene file");
  auto* scene_opt = r->add_option("--scene", render.scene, "Scene text file");
  r->add_option("--random", render.random_seed, "Render the random oracle scene with this seed")
      ->excludes(scene_opt);
  r->add_option("--save-scene", render.save_scene, "Write the rendered scene as text");
  r->add_option("--pose", render.pose, "Camera placement \"tx ty tz yaw\"");
  r->add_option("--intrinsics", render.intrinsics, "\"f cx cy\"");
  r->add_option("--width", render.width)->check(CLI::PositiveNumber);
  r->add_option("--height", render.height)->check(CLI::PositiveNumber);
  r->add_option("--out", render.out)->required();
  r->callback([&] { code = run_render(render); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : kExitInvalid;
  } catch (const FormatError& err) {
    std::cerr << "format error: " << err.what() << "\n";
    return kExitFormat;
  } catch (const std::invalid_argument& err) {
    std::cerr << "invalid argument: " << err.what() << "\n";
    return kExitInvalid;
  } catch (const IoError& err) {
    std::cerr << "i/o error: " << err.what() << "\n";
    return kExitInvalid;
  } catch (const NoValidSource& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInvalid;
  }
  return code;
}
