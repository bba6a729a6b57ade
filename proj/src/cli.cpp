#include "pinarray/cli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pinarray/config.hpp"

namespace pinarray
{

namespace
{

namespace fs = std::filesystem;

constexpr const char* kUnits =
  "Units: lengths in mm, forces in N, angles in deg. The config file stores E in Pa, I in m^4 and the "
  "spine lever l in m.\nExit status: 0 success, 2 configuration or usage error, 3 simulation contract "
  "violation.";

struct Options
{
  std::string config_path;
  std::uint64_t seed{0};
  std::string out_dir{"."};
  bool force{false};
  std::vector<double> phi;
  int trials{10};
  int presses{10};
  int steps{-1};
  double dx_mm{std::numeric_limits<double>::quiet_NaN()};
  bool no_noise{false};
  bool exclude_clamped{false};
  std::string shape;
};

using OutputFile = std::pair<std::string, std::string>;

std::uint64_t phi_key(double phi)
{
  return std::bit_cast<std::uint64_t>(phi + 0.0);  // folds -0 onto +0
}

SimulationConfig load(const Options& o)
{
  return o.config_path.empty() ? SimulationConfig{} : load_config(o.config_path);
}

// Nothing is written until every output has been rendered, and nothing is
// written at all if a target exists without --force.
void write_outputs(const Options& o, const std::vector<OutputFile>& files)
{
  const fs::path dir(o.out_dir);
  if (!o.force)
  {
    for (const auto& [name, body] : files)
    {
      if (fs::exists(dir / name))
      {
        throw ConfigError(fmt::format("refusing to overwrite {} (pass --force)", (dir / name).string()));
      }
    }
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
  {
    throw ConfigError(fmt::format("cannot create output directory {}: {}", dir.string(), ec.message()));
  }
  for (const auto& [name, body] : files)
  {
    const fs::path target = dir / name;
    const fs::path tmp = dir / (name + ".tmp");
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      f << body;
      if (!f)
      {
        throw ConfigError("cannot write " + tmp.string());
      }
    }
    fs::rename(tmp, target, ec);
    if (ec)
    {
      throw ConfigError(fmt::format("cannot move {} into place: {}", target.string(), ec.message()));
    }
  }
}

template <typename Fn>
std::string render(Fn&& fn)
{
  std::ostringstream os;
  fn(os);
  return os.str();
}

SensorCalibration make_bank(const SimulationConfig& cfg, const Options& o)
{
  Rng rng = make_rng(o.seed, streams::kCalibration);
  SensorCalibration bank =
    calibrate_bank(static_cast<std::size_t>(cfg.gripper.pin_count()), rng, cfg.gripper, cfg.calibration);
  return o.no_noise ? bank.noiseless() : bank;
}

int cmd_pull_test(const Options& o, std::ostream& out)
{
  const SimulationConfig cfg = load(o);
  const std::vector<double> phis = o.phi.empty() ? cfg.phi_list_deg : o.phi;
  std::vector<PullTestResult> proposed;
  std::vector<PullTestResult> baseline;
  for (double phi : phis)
  {
    WedgeSpec spec = cfg.wedge;
    spec.inclination_phi_deg = phi;
    Rng rp = make_rng(o.seed, streams::kPullProposed, phi_key(phi));
    Rng rb = make_rng(o.seed, streams::kPullBaseline, phi_key(phi));
    proposed.push_back(pull_test(cfg.gripper, cfg.asperity, spec, o.trials, rp, cfg.pull));
    baseline.push_back(baseline_pull_test(cfg.gripper, cfg.baseline, cfg.asperity, spec, o.trials, rb, cfg.pull));
  }

  std::string comparison = "phi_deg,proposed_mean_F,proposed_std_F,baseline_mean_F,baseline_std_F\n";
  std::string table = fmt::format("{:>8} {:>16} {:>15} {:>16} {:>15}\n", "phi_deg", "proposed_mean_F",
                                  "proposed_std_F", "baseline_mean_F", "baseline_std_F");
  int gripping_proposed = 0;
  int gripping_baseline = 0;
  for (std::size_t i = 0; i < phis.size(); ++i)
  {
    const auto& p = proposed[i];
    const auto& b = baseline[i];
    comparison += fmt::format("{:g},{:.6f},{:.6f},{:.6f},{:.6f}\n", p.phi_deg, p.mean_F, p.std_F, b.mean_F, b.std_F);
    table += fmt::format("{:>8g} {:>16.3f} {:>15.3f} {:>16.3f} {:>15.3f}\n", p.phi_deg, p.mean_F, p.std_F, b.mean_F,
                         b.std_F);
    gripping_proposed += p.mean_F > 2.0 ? 1 : 0;
    gripping_baseline += b.mean_F > 2.0 ? 1 : 0;
  }
  table += fmt::format("shapes with mean F > 2 N: proposed {}, baseline {}\n", gripping_proposed, gripping_baseline);

  write_outputs(o, {{"pull_trials_proposed.csv", render([&](auto& os) { write_trials_csv(os, proposed); })},
                    {"pull_trials_baseline.csv", render([&](auto& os) { write_trials_csv(os, baseline); })},
                    {"pull_summary_proposed.csv", render([&](auto& os) { write_summary_csv(os, proposed); })},
                    {"pull_summary_baseline.csv", render([&](auto& os) { write_summary_csv(os, baseline); })},
                    {"pull_comparison.csv", comparison}});
  out << table;
  return exit_code::kOk;
}

int cmd_recognize(const Options& o, std::ostream& out)
{
  const SimulationConfig cfg = load(o);
  std::vector<BlockKind> kinds;
  if (o.shape.empty() || o.shape == "both")
  {
    kinds = {BlockKind::convex, BlockKind::concave};
  }
  else if (o.shape == "convex")
  {
    kinds = {BlockKind::convex};
  }
  else if (o.shape == "concave")
  {
    kinds = {BlockKind::concave};
  }
  else
  {
    throw ConfigError("recognize --shape must be convex, concave or both");
  }
  const SensorCalibration bank = make_bank(cfg, o);
  std::vector<OutputFile> files;
  std::string summary = "block,classification,pin_averaged_std_mm,center_minus_edge_mm\n";
  std::string text;
  for (BlockKind kind : kinds)
  {
    const std::string name = kind == BlockKind::convex ? "convex" : "concave";
    const Heightfield terrain = make_recognition_block(kind, cfg.pull.resolution_mm);
    Rng rng = make_rng(o.seed, kind == BlockKind::convex ? streams::kRecognizeConvex : streams::kRecognizeConcave);
    const RecognitionResult r = recognize_shape(cfg.gripper, bank, terrain, o.presses, rng, cfg.recognition);
    files.emplace_back("recognition_" + name + ".csv", render([&](auto& os) { write_recognition_csv(os, r); }));
    summary += fmt::format("{},{},{:.6f},{:.6f}\n", name, to_string(r.shape), r.pin_averaged_std_mm,
                           r.center_minus_edge_mm);
    text += fmt::format("{} block: classification {} (pin-averaged std {:.3f} mm)\n", name, to_string(r.shape),
                        r.pin_averaged_std_mm);
  }
  files.emplace_back("recognition_summary.csv", summary);
  files.emplace_back("sensor_calibration.csv",
                     render([&](auto& os) { write_calibration_csv(os, cfg.gripper, bank); }));
  write_outputs(o, files);
  out << text;
  return exit_code::kOk;
}

int cmd_map(const Options& o, std::ostream& out)
{
  const SimulationConfig cfg = load(o);
  ScanPlan plan = cfg.scan;
  if (o.steps >= 0)
  {
    plan.steps = o.steps;
  }
  if (!std::isnan(o.dx_mm))
  {
    plan.delta_x_mm = o.dx_mm;
  }
  if (o.exclude_clamped)
  {
    plan.include_clamped = false;
  }
  plan.validate();
  const Heightfield terrain = make_mapping_terrain(cfg.pull.resolution_mm);
  const SensorCalibration bank = make_bank(cfg, o);
  Rng rng = make_rng(o.seed, streams::kMapping);
  const PointCloud cloud = run_scan(cfg.gripper, bank, terrain, plan, rng);
  if (cloud.points.empty())
  {
    throw SimulationError("scan produced no points");
  }
  const GridMap map = bin_average(cloud, terrain, cfg.grid);
  const std::string summary = e_bar_line(map) + "\n";
  write_outputs(o, {{"cloud.ply", render([&](auto& os) { write_ply(os, cloud); })},
                    {"cloud.csv", render([&](auto& os) { write_cloud_csv(os, cloud); })},
                    {"grid.csv", render([&](auto& os) { write_grid_csv(os, map); })},
                    {"map_summary.csv", summary},
                    {"sensor_calibration.csv",
                     render([&](auto& os) { write_calibration_csv(os, cfg.gripper, bank); })}});
  out << fmt::format("points: {}\ncolumns: {}\n", cloud.points.size(), map.cells.size()) << summary;
  return exit_code::kOk;
}

int cmd_gen_terrain(const Options& o, std::ostream& out)
{
  const SimulationConfig cfg = load(o);
  const std::string shape = o.shape.empty() ? "wedge" : o.shape;
  Heightfield terrain = [&] {
    if (shape == "wedge")
    {
      if (o.phi.size() > 1)
      {
        throw ConfigError("gen-terrain takes a single --phi");
      }
      WedgeSpec spec = cfg.wedge;
      spec.inclination_phi_deg = o.phi.empty() ? 60.0 : o.phi.front();
      return make_wedge(spec, cfg.pull.resolution_mm);
    }
    if (shape == "convex" || shape == "concave")
    {
      return make_recognition_block(shape == "convex" ? BlockKind::convex : BlockKind::concave,
                                    cfg.pull.resolution_mm);
    }
    if (shape == "mapping")
    {
      return make_mapping_terrain(cfg.pull.resolution_mm);
    }
    throw ConfigError("gen-terrain --shape must be wedge, convex, concave or mapping");
  }();
  write_outputs(o, {{"terrain.txt", render([&](auto& os) { write_heightfield(os, terrain); })}});
  out << fmt::format("terrain {}: {} x {} nodes, cell {} mm\n", shape, terrain.cols(), terrain.rows(),
                     terrain.cell_size());
  return exit_code::kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Pin-array terrain gripper simulator", "pinarray"};
  app.footer(kUnits);
  app.require_subcommand(0, 1);
  app.fallthrough();

  Options o;
  bool dump_default = false;
  app.add_flag("--dump-default-config", dump_default, "Print the built-in configuration and exit");
  app.add_option("--config", o.config_path, "Key = value configuration file");
  app.add_option("--seed", o.seed, "Campaign seed (default 0)");
  app.add_option("--out", o.out_dir, "Output directory, created if absent (default .)");
  app.add_flag("--force", o.force, "Overwrite existing output files");

  auto* pull = app.add_subcommand("pull-test", "Holding-force campaign, proposed gripper and 8-finger baseline");
  pull->add_option("--phi", o.phi, "Inclination(s) in deg; repeat or comma-separate (default: config list)")
    ->delimiter(',')
    ->allow_extra_args(false);
  pull->add_option("--trials", o.trials, "Trials per inclination (default 10)");

  auto* rec = app.add_subcommand("recognize", "Shape recognition on the 20 mm blocks");
  rec->add_option("--presses", o.presses, "Presses per block (default 10)");
  rec->add_option("--shape", o.shape, "convex, concave or both (default both)");
  rec->add_flag("--no-noise", o.no_noise, "Zero the sensor noise");

  auto* map = app.add_subcommand("map", "Translate-press-read scan of the mapping terrain");
  map->add_option("--steps", o.steps, "Scan steps (default 12)");
  map->add_option("--dx-mm", o.dx_mm, "Translation per step in mm (default 10)");
  map->add_flag("--no-noise", o.no_noise, "Zero the sensor noise");
  map->add_flag("--exclude-clamped", o.exclude_clamped, "Drop readings that saturated outside the window");

  auto* gen = app.add_subcommand("gen-terrain", "Write a terrain heightfield (terrain.txt)");
  gen->add_option("--shape", o.shape, "wedge, convex, concave or mapping (default wedge)");
  gen->add_option("--phi", o.phi, "Wedge inclination in deg (default 60)")->allow_extra_args(false);

  auto* dump = app.add_subcommand("dump-config", "Print the effective configuration");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try
  {
    app.parse(reversed);
  }
  catch (const CLI::CallForHelp&)
  {
    out << app.help();
    return exit_code::kOk;
  }
  catch (const CLI::ParseError& e)
  {
    err << "error: " << e.what() << "\n";
    return exit_code::kConfig;
  }

  try
  {
    if (dump_default)
    {
      out << dump_config(SimulationConfig{});
      return exit_code::kOk;
    }
    if (pull->parsed())
    {
      return cmd_pull_test(o, out);
    }
    if (rec->parsed())
    {
      return cmd_recognize(o, out);
    }
    if (map->parsed())
    {
      return cmd_map(o, out);
    }
    if (gen->parsed())
    {
      return cmd_gen_terrain(o, out);
    }
    if (dump->parsed())
    {
      out << dump_config(load(o));
      return exit_code::kOk;
    }
    out << app.help();
    return exit_code::kConfig;
  }
  catch (const ConfigError& e)
  {
    err << "config error: " << e.what() << "\n";
    return exit_code::kConfig;
  }
  catch (const SimulationError& e)
  {
    err << "simulation error: " << e.what() << "\n";
    return exit_code::kSimulation;
  }
  catch (const std::invalid_argument& e)
  {
    err << "invalid parameter: " << e.what() << "\n";
    return exit_code::kConfig;
  }
  catch (const std::exception& e)
  {
    err << "error: " << e.what() << "\n";
    return exit_code::kSimulation;
  }
}

}  // namespace pinarray
