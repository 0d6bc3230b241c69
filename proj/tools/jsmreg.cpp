// jsmreg: command-line front end for joint-saliency registration.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jsmreg/config.hpp"
#include "jsmreg/evaluation.hpp"
#include "jsmreg/io.hpp"
#include "jsmreg/registration.hpp"
#include "jsmreg/synth.hpp"

namespace fs = std::filesystem;
using namespace jsmreg;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;

std::string defaults_help() {
  std::string out = "Parameters for --set key=value (default in brackets):\n";
  for (const auto& k : config_keys()) {
    out += "  " + k.name + " [" + k.default_value + "]  " + k.description + "\n";
  }
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

struct RegisterArgs {
  std::string ref, mov, initial;
  std::vector<std::string> overrides;
  bool emit_maps = false;
  int levels = 0;
};

struct EvaluateArgs {
  std::string field, landmarks;
};

struct SynthArgs {
  std::uint64_t seed = 1;
  int size = 256;
};

int cmd_register(const RegisterArgs& a, const fs::path& out, bool verbose) {
  RegistrationConfig cfg;
  for (const auto& o : a.overrides) apply_override(cfg, o);
  if (a.levels > 0) cfg.pyramid_levels = a.levels;
  cfg.keep_maps = a.emit_maps;
  cfg.validate();

  const GrayImage ref = io::read_image(a.ref);
  const GrayImage mov = io::read_image(a.mov);
  if (ref.width() != mov.width() || ref.height() != mov.height()) {
    throw InvalidInput("reference is " + std::to_string(ref.width()) + "x" + std::to_string(ref.height()) +
                       " but moving is " + std::to_string(mov.width()) + "x" + std::to_string(mov.height()));
  }
  std::optional<DenseDeformationField> initial;
  if (!a.initial.empty()) initial = io::read_jsmf(a.initial);

  const RegistrationResult r = register_images(ref, mov, cfg, initial);

  ensure_dir(out);
  io::write_png(out / "warped.png", r.warped, 16);
  io::write_jsmf(out / "field.jsmf", r.field);
  io::write_field_csv(out / "field.csv", r.field);
  std::string log;
  for (const auto& line : r.log_lines()) log += line + "\n";
  io::write_text(out / "register.log", log);

  if (a.emit_maps) {
    for (const auto& lvl : r.levels) {
      if (!lvl.maps) continue;
      const fs::path dir = out / ("level" + std::to_string(lvl.level));
      ensure_dir(dir);
      const LevelMaps& m = *lvl.maps;
      io::write_colormap_png(dir / "jsm.png", m.jsm, 0.0, 1.0);
      io::write_colormap_png(dir / "sscale.png", m.structure_scale, cfg.scales.sigmas.front(), cfg.scales.largest());
      io::write_colormap_png(dir / "mscale.png", m.mismatch_scale, 0.0, cfg.jsm.max_mismatch_scale);
      io::write_colormap_png(dir / "kscale.png", m.kernel_scale, 1.0, cfg.jsm.max_kernel_scale);
      io::write_colormap_png(dir / "saliency.png", m.saliency_ref, 0.0, 1.0);
      io::write_labels_png(dir / "superpixels.png", m.superpixels);
    }
  }

  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  if (verbose) {
    for (const auto& line : r.log_lines()) std::cerr << line << "\n";
  }
  return 0;
}

int cmd_evaluate(const EvaluateArgs& a, const fs::path& out, bool verbose) {
  const DenseDeformationField field = io::read_jsmf(a.field);
  const LandmarkSet lms = io::read_landmarks_csv(a.landmarks);
  const ErrorReport rep = landmark_error(lms, field);

  ensure_dir(out);
  std::string csv = "index,rx,ry,mx,my,error\n";
  char buf[256];
  for (std::size_t i = 0; i < lms.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9g,%.9g,%.9g,%.9g\n", i, lms[i].reference.x, lms[i].reference.y,
                  lms[i].moving.x, lms[i].moving.y, rep.errors[i]);
    csv += buf;
  }
  std::snprintf(buf, sizeof buf, "mean,,,,,%.9g\nsd,,,,,%.9g\n", rep.mean, rep.sd);
  csv += buf;
  io::write_text(out / "report.csv", csv);

  std::printf("%.2f±%.2f\n", rep.mean, rep.sd);
  if (verbose) std::fprintf(stderr, "%zu landmarks\n", lms.size());
  return 0;
}

int cmd_synth(const SynthArgs& a, const fs::path& out, bool verbose) {
  if (a.size < 64) throw InvalidInput("synth: --size must be >= 64");
  ensure_dir(out);
  const int margin = 16;
  const int step = 16;

  io::write_png(out / "texture.png", synth::textured_image(a.size, a.size, a.seed), 16);

  const auto tf = synth::translation_fixture(a.seed, a.size);
  io::write_png(out / "translation_ref.png", tf.ref, 16);
  io::write_png(out / "translation_mov.png", tf.mov, 16);
  io::write_jsmf(out / "translation_truth.jsmf", tf.truth);
  io::write_landmarks_csv(out / "translation_landmarks.csv", synth::grid_landmarks(tf.truth, step, margin));

  const auto bf = synth::bump_fixture(a.seed, a.size, false);
  io::write_png(out / "bump_ref.png", bf.ref, 16);
  io::write_png(out / "bump_mov.png", bf.mov, 16);
  io::write_jsmf(out / "bump_truth.jsmf", bf.truth);
  io::write_landmarks_csv(out / "bump_landmarks.csv", synth::grid_landmarks(bf.truth, step, margin));

  const auto blob = synth::bump_fixture(a.seed, a.size, true);
  io::write_png(out / "blob_ref.png", blob.ref, 16);
  io::write_png(out / "blob_mov.png", blob.mov, 16);
  io::write_jsmf(out / "blob_truth.jsmf", blob.truth);
  io::write_landmarks_csv(out / "blob_landmarks.csv", synth::grid_landmarks(blob.truth, step, margin));
  const Grid<char> zone = synth::disk_mask(a.size, a.size, blob.blob_in_ref, 2.0 * blob.blob.radius);
  ScalarMap zone_img(a.size, a.size);
  for (std::size_t i = 0; i < zone.size(); ++i) zone_img.values()[i] = zone.values()[i] ? 1.0 : 0.0;
  io::write_png(out / "blob_exclusion.png", GrayImage(std::move(zone_img)));

  if (verbose) std::fprintf(stderr, "fixtures written to %s\n", out.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint-saliency-map nonrigid image registration"};
  app.require_subcommand(1);
  app.footer(defaults_help());
  std::string out_dir = ".";
  bool verbose = false;
  app.add_option("-o,--output-dir", out_dir, "Directory for all outputs")->capture_default_str();
  app.add_flag("--verbose", verbose, "Print per-iteration diagnostics to stderr");

  RegisterArgs ra;
  CLI::App* reg = app.add_subcommand("register", "Register a moving image onto a reference image");
  reg->add_option("reference", ra.ref, "Reference image (PNG/PGM, 8 or 16 bit gray)")->required();
  reg->add_option("moving", ra.mov, "Moving image")->required();
  reg->add_option("--set", ra.overrides, "Parameter override key=value (repeatable)");
  reg->add_flag("--emit-maps", ra.emit_maps, "Write per-level JSM and scale maps as PNG");
  reg->add_option("--levels", ra.levels, "Pyramid levels (default 5)");
  reg->add_option("--initial", ra.initial, "Initial deformation field (JSMF)");
  reg->footer(defaults_help());

  EvaluateArgs ea;
  CLI::App* eval = app.add_subcommand("evaluate", "Landmark error of a deformation field");
  eval->add_option("field", ea.field, "Deformation field (JSMF)")->required();
  eval->add_option("landmarks", ea.landmarks, "Landmark CSV with header rx,ry,mx,my")->required();

  SynthArgs sa;
  CLI::App* syn = app.add_subcommand("synth", "Generate the synthetic fixtures");
  syn->add_option("--seed", sa.seed, "Random seed")->capture_default_str();
  syn->add_option("--size", sa.size, "Image side length in pixels")->capture_default_str();

  // Subcommand-local copies of the global flags so they work on either side.
  for (CLI::App* sub : {reg, eval, syn}) {
    sub->add_option("-o,--output-dir", out_dir, "Directory for all outputs");
    sub->add_flag("--verbose", verbose, "Print diagnostics to stderr");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const fs::path out(out_dir);
    if (reg->parsed()) return cmd_register(ra, out, verbose);
    if (eval->parsed()) return cmd_evaluate(ea, out, verbose);
    if (syn->parsed()) return cmd_synth(sa, out, verbose);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
