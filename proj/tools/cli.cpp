#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mcv/config.hpp"
#include "mcv/driver.hpp"
#include "mcv/imageio.hpp"
#include "mcv/metrics.hpp"
#include "mcv/partition.hpp"

namespace mcv::cli {

namespace fs = std::filesystem;

namespace {

struct SegmentArgs {
  std::string input;
  std::string output_dir;
  std::string config_path;
  std::string label_format = "pgm";
  // Flag overrides, applied after the config file in this order.
  std::optional<std::string> levels, seed, perm, rho, temp, metric, eval, workers, neighborhood;
};

struct ComponentsArgs {
  std::string input;
  std::string output;
  std::string neighborhood = "8";
};

struct RandArgs {
  std::string first;
  std::string second;
};

LabelFormat format_for(const fs::path& path) {
  return path.extension() == ".csv" ? LabelFormat::csv : LabelFormat::pgm16;
}

std::string stats_report(const ImageBuffer& image, const PartitionSequence& seq) {
  std::ostringstream s;
  s << "width=" << image.lattice.width() << '\n'
    << "height=" << image.lattice.height() << '\n'
    << "bands=" << image.bands << '\n'
    << format_config(seq.config);
  for (const LevelStats& st : seq.stats) {
    const std::string p = "level" + std::to_string(st.level) + "_";
    s << p << "evaluations=" << st.evaluations << '\n'
      << p << "accepted=" << st.accepted << '\n'
      << p << "regions=" << st.regions << '\n';
  }
  s << "final_regions=" << (seq.stats.empty() ? image.lattice.size() : seq.stats.back().regions)
    << '\n';
  return s.str();
}

int segment(const SegmentArgs& a, std::ostream& out) {
  // Everything that can fail on bad input happens before the output directory is touched.
  const ImageBuffer image = load_pnm(read_file(a.input));

  std::string perm_path;
  McvConfig config;
  if (!a.config_path.empty()) config = parse_config(read_file(a.config_path), perm_path);
  const std::pair<const char*, const std::optional<std::string>*> flags[] = {
      {"max_level", &a.levels}, {"seed", &a.seed},       {"permutation", &a.perm},
      {"rho", &a.rho},          {"temperature", &a.temp}, {"metric", &a.metric},
      {"eval_mode", &a.eval},   {"workers", &a.workers},  {"neighborhood", &a.neighborhood}};
  for (const auto& [key, value] : flags)
    if (value->has_value()) apply_config_key(config, perm_path, key, **value);
  if (config.permutation == PermutationKind::file)
    config.permutation_indices = parse_permutation_file(read_file(perm_path));
  if (a.label_format != "pgm" && a.label_format != "csv")
    throw ConfigError("--label-format must be pgm or csv");

  const Segmenter segmenter(config);
  const auto start = std::chrono::steady_clock::now();
  const PartitionSequence seq = segmenter.run(image);
  const double elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  std::map<std::string, std::string> files;
  for (std::size_t i = 1; i < seq.levels.size(); ++i) {
    const std::string stem = "level_" + std::to_string(i);
    if (a.label_format == "pgm") {
      try {
        files[stem + ".pgm"] = save_labels(seq.levels[i], LabelFormat::pgm16);
        continue;
      } catch (const CapacityError&) {
        // more than 65536 regions: fall through to csv
      }
    }
    files[stem + ".csv"] = save_labels(seq.levels[i], LabelFormat::csv);
  }
  files["final.ppm"] = save_pnm(colorize(seq.levels.back(), config.seed));
  const std::string report = stats_report(image, seq);
  files["stats.txt"] = report;

  const fs::path dir(a.output_dir);
  fs::create_directories(dir);
  for (const auto& [name, bytes] : files) write_file(dir / name, bytes);

  // Timing is reported on stdout only so the output tree stays reproducible.
  out << report;
  char buf[64];
  std::snprintf(buf, sizeof buf, "elapsed_ms=%.3f\n", elapsed_ms);
  out << buf;
  return 0;
}

int components(const ComponentsArgs& a) {
  const ImageBuffer image = load_pnm(read_file(a.input));
  if (image.bands != 1) throw DomainError("class map must be a single-band PGM");
  ClassMap classes{image.lattice, {}};
  classes.classes.reserve(image.samples.size());
  for (double s : image.samples) classes.classes.push_back(static_cast<std::uint32_t>(s));

  Window w0 = nine_neighborhood();
  if (a.neighborhood == "4") w0 = five_neighborhood();
  else if (a.neighborhood != "8") throw ConfigError("--neighborhood must be 4 or 8");

  const Partition p = components_by_class(classes, w0);
  const std::string bytes = save_labels(p.labels, format_for(a.output));
  write_file(a.output, bytes);
  return 0;
}

int rand_cmd(const RandArgs& a, std::ostream& out) {
  const LabelImage first = load_labels(read_file(a.first));
  const LabelImage second = load_labels(read_file(a.second));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f\n", rand_index(first, second));
  out << buf;
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiresolution region-merging segmentation"};
  app.name("mcv");
  app.require_subcommand(1);

  SegmentArgs seg;
  auto* seg_cmd = app.add_subcommand("segment", "Segment an image into a sequence of partitions");
  seg_cmd->add_option("input", seg.input, "Input PGM/PPM image")->required();
  seg_cmd->add_option("-o,--output", seg.output_dir, "Output directory")->required();
  seg_cmd->add_option("-c,--config", seg.config_path, "key=value configuration file");
  seg_cmd->add_option("--levels", seg.levels, "Number of levels (max_level)");
  seg_cmd->add_option("--seed", seg.seed, "Seed for the random permutation");
  seg_cmd->add_option("--perm", seg.perm, "raster | random | file:<path>");
  seg_cmd->add_option("--rho", seg.rho, "Per-pixel energy threshold, or 'auto'");
  seg_cmd->add_option("--temp", seg.temp, "Gibbs temperature");
  seg_cmd->add_option("--metric", seg.metric, "l2 | l1");
  seg_cmd->add_option("--eval", seg.eval, "direct | pyramid");
  seg_cmd->add_option("--workers", seg.workers, "Threads used by large merges");
  seg_cmd->add_option("--neighborhood", seg.neighborhood, "4 | 8");
  seg_cmd->add_option("--label-format", seg.label_format, "pgm | csv");

  ComponentsArgs comp;
  auto* comp_cmd = app.add_subcommand("components", "Connected components of a class map");
  comp_cmd->add_option("input", comp.input, "Single-band PGM of class labels")->required();
  comp_cmd->add_option("-o,--output", comp.output, "Output label map (.pgm or .csv)")->required();
  comp_cmd->add_option("--neighborhood", comp.neighborhood, "4 | 8");

  RandArgs ri;
  auto* rand_sub = app.add_subcommand("rand", "Rand index between two label maps");
  rand_sub->add_option("first", ri.first, "Label map (.pgm or .csv)")->required();
  rand_sub->add_option("second", ri.second, "Label map (.pgm or .csv)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (seg_cmd->parsed()) return segment(seg, out);
    if (comp_cmd->parsed()) return components(comp);
    if (rand_sub->parsed()) return rand_cmd(ri, out);
  } catch (const std::exception& e) {
    err << "mcv: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace mcv::cli
