#include <CLI11.hpp>

#include <iostream>

#include "alprs/commands.hpp"
#include "alprs/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"License plate recognition: SIFT plate location, Otsu segmentation, transition OCR"};
  app.require_subcommand(1);

  std::string dir, out, db, model, manifest, pattern, grid = "65x60", image;
  int order = 2;
  int jobs = 1;
  bool no_timings = false;
  bool verbose = false;
  alprs::SynthOptions synth_opts;

  auto* build = app.add_subcommand("build-templates", "Extract SIFT features of the digit templates 0.pgm..9.pgm");
  build->add_option("--dir", dir, "Directory with 0.pgm .. 9.pgm")->required();
  build->add_option("--out", out, "Output template database")->required();

  auto* train = app.add_subcommand("train-ocr", "Train the transition classifier from <label>/<sample>.pgm");
  train->add_option("--dir", dir, "Directory with one subdirectory per label")->required();
  train->add_option("--grid", grid, "Sampling grid WxH")->capture_default_str();
  train->add_option("--order", order, "Pixels per transition (2 or 3)")->capture_default_str();
  train->add_option("--out", out, "Output model")->required();

  auto* rec = app.add_subcommand("recognize", "Read the plate in one image");
  rec->add_option("--db", db, "Template database")->required();
  rec->add_option("--model", model, "OCR model")->required();
  rec->add_option("--pattern", pattern, "Positional classes, e.g. LLLNNNN");
  rec->add_flag("--no-timings", no_timings, "Print '-' instead of stage timings");
  rec->add_flag("--verbose", verbose, "Print one line per character");
  rec->add_option("image", image, "Input PGM/PPM image")->required();

  auto* eval = app.add_subcommand("evaluate", "Recognize every manifest row and report rates");
  eval->add_option("--db", db, "Template database")->required();
  eval->add_option("--model", model, "OCR model")->required();
  eval->add_option("--manifest", manifest, "Rows path<TAB>plate")->required();
  eval->add_option("--pattern", pattern, "Positional classes, e.g. LLLNNNN");
  eval->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
  eval->add_flag("--no-timings", no_timings, "Print '-' instead of stage timings");

  auto* syn = app.add_subcommand("synth", "Render templates, training glyphs and a plate corpus");
  syn->add_option("--out", out, "Output directory")->required();
  syn->add_option("--plates", synth_opts.plates, "Plate images")->capture_default_str();
  syn->add_option("--samples", synth_opts.samples_per_class, "Training samples per class")->capture_default_str();
  syn->add_option("--seed", synth_opts.seed, "Random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : alprs::kExitDataError;
  }

  alprs::PipelineConfig cfg;
  try {
    cfg = alprs::config_from_environment();
    if (!pattern.empty()) cfg.plate_pattern = pattern;
    if (train->parsed()) {
      cfg.grid = alprs::parse_grid(grid, order);
    }
    alprs::validate(cfg);
  } catch (const alprs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return alprs::kExitDataError;
  }

  if (build->parsed()) return alprs::cmd_build_templates(dir, out, cfg, std::cout, std::cerr);
  if (train->parsed()) return alprs::cmd_train_ocr(dir, out, cfg, std::cout, std::cerr);
  if (rec->parsed()) {
    return alprs::cmd_recognize(image, db, model, cfg, {!no_timings, verbose}, std::cout, std::cerr);
  }
  if (eval->parsed()) {
    return alprs::cmd_evaluate(manifest, db, model, cfg, {jobs, !no_timings}, std::cout, std::cerr);
  }
  return alprs::cmd_synth(out, synth_opts, std::cout, std::cerr);
}
