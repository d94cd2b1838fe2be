#include "alprs/commands.hpp"

#include <atomic>
#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <thread>

#include "alprs/error.hpp"
#include "alprs/matchdb.hpp"
#include "alprs/pnm.hpp"
#include "alprs/synth.hpp"

namespace alprs {
namespace fs = std::filesystem;
namespace {

bool is_image(const fs::path& p) {
  const std::string ext = p.extension().string();
  return ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

std::string padded(int i, int width) {
  std::string s = std::to_string(i);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

}  // namespace

int cmd_build_templates(const fs::path& dir, const fs::path& out_db, const PipelineConfig& cfg,
                        std::ostream& out, std::ostream& err) {
  try {
    std::map<char, GrayImage> templates;
    for (char d = '0'; d <= '9'; ++d) {
      const fs::path p = dir / (std::string(1, d) + ".pgm");
      if (!fs::exists(p)) {
        err << "error: missing template for digit " << d << " (" << p.string() << ")\n";
        return kExitDataError;
      }
      templates.emplace(d, load_image(p));
    }
    const TemplateFeatureDB db = build_template_db(templates, cfg.sift);
    save_db(db, out_db);
    for (const auto& [label, entry] : db.entries) out << label << '\t' << entry.keypoints.size() << '\n';
    for (char c : templates_without_keypoints(db)) err << "warning: template " << c << " has no keypoints\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
}

int cmd_train_ocr(const fs::path& dir, const fs::path& out_model, const PipelineConfig& cfg,
                  std::ostream& out, std::ostream& err) {
  try {
    validate(cfg.grid);
    std::vector<LabeledSample> samples;
    for (char label : all_plate_labels()) {
      const fs::path class_dir = dir / std::string(1, label);
      std::vector<fs::path> files;
      if (fs::is_directory(class_dir)) {
        for (const auto& e : fs::directory_iterator(class_dir)) {
          if (e.is_regular_file() && is_image(e.path())) files.push_back(e.path());
        }
      }
      if (files.empty()) {
        err << "error: no samples for class " << label << " (" << class_dir.string() << ")\n";
        return kExitDataError;
      }
      std::sort(files.begin(), files.end());
      for (const fs::path& f : files) samples.push_back({label, prepare_glyph(load_image(f), cfg.grid, cfg.polarity)});
    }
    const ClassifierModel model = train(samples, cfg.grid, all_plate_labels(), cfg.noise_fraction);
    save_model(model, out_model);
    for (const ClassRuleSet& c : model.classes) out << c.label << '\t' << c.restriction_count << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
}

int cmd_recognize(const fs::path& image, const fs::path& db, const fs::path& model,
                  const PipelineConfig& cfg, const RecognizeOptions& opts, std::ostream& out,
                  std::ostream& err) {
  RecognitionReport report;
  try {
    validate(cfg);
    const PlateLocator locator(load_db(db), cfg.locator);
    ClassifierModel m = load_model(model);
    m.noise_fraction = cfg.noise_fraction;
    report = recognize(load_image(image), locator, m, cfg);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  report.path = image.string();
  out << format_report_line(report, opts.timings) << '\n';
  if (opts.verbose) {
    for (std::size_t i = 0; i < report.chars.size(); ++i) {
      const CharResult& c = report.chars[i];
      out << "char\t" << i << '\t' << c.label << '\t' << c.bbox.x << ',' << c.bbox.y << ',' << c.bbox.width << ','
          << c.bbox.height << '\n';
    }
  }
  return report.status == Status::kOk || report.status == Status::kPartial ? kExitOk : kExitNotFound;
}

int cmd_evaluate(const fs::path& manifest, const fs::path& db, const fs::path& model,
                 const PipelineConfig& cfg, const EvaluateOptions& opts, std::ostream& out,
                 std::ostream& err) {
  std::vector<ManifestEntry> entries;
  std::optional<PlateLocator> locator;
  ClassifierModel m;
  try {
    validate(cfg);
    entries = load_manifest(manifest);
    locator.emplace(load_db(db), cfg.locator);
    m = load_model(model);
    m.noise_fraction = cfg.noise_fraction;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }

  std::vector<RecognitionReport> reports(entries.size());
  std::vector<std::string> failures(entries.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      try {
        reports[i] = recognize(load_image(entries[i].path), *locator, m, cfg);
      } catch (const Error& e) {
        failures[i] = e.what();
      }
      reports[i].path = entries[i].path.string();
    }
  };
  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(std::max<std::size_t>(1, entries.size()))));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!failures[i].empty()) {
      err << "error: " << entries[i].path.string() << ": " << failures[i] << '\n';
      return kExitDataError;
    }
  }

  // The summary is computed from the printed lines so it can be recomputed from them.
  std::vector<EvalRecord> records;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string line = format_report_line(reports[i], opts.timings);
    out << line << '\t' << entries[i].truth << '\n';
    records.push_back({parse_report_line(line), entries[i].truth});
  }
  for (const std::string& s : format_summary(summarize(records))) out << s << '\n';
  return kExitOk;
}

int cmd_synth(const fs::path& out_dir, const SynthOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    fs::create_directories(out_dir / "templates");
    for (char d = '0'; d <= '9'; ++d) {
      save_pgm(out_dir / "templates" / (std::string(1, d) + ".pgm"), synth::render_template(d));
    }
    std::mt19937_64 rng(opts.seed);
    for (char label : all_plate_labels()) {
      const fs::path class_dir = out_dir / "train" / std::string(1, label);
      fs::create_directories(class_dir);
      for (int i = 0; i < opts.samples_per_class; ++i) {
        save_pgm(class_dir / (padded(i, 3) + ".pgm"), synth::render_sample(label, rng));
      }
    }
    fs::create_directories(out_dir / "plates");
    std::string manifest;
    for (int i = 0; i < opts.plates; ++i) {
      const std::string text = synth::random_plate_text(rng);
      const synth::PlateScene scene = synth::render_plate_scene(text, {}, rng());
      const std::string name = "plates/plate_" + padded(i, 4) + ".pgm";
      save_pgm(out_dir / name, scene.image);
      manifest += name + '\t' + text.substr(0, 3) + '-' + text.substr(3) + '\n';
    }
    std::ofstream mf(out_dir / "manifest.tsv", std::ios::binary);
    mf << manifest;
    if (!mf) throw Error(ErrorCode::kIoError, "cannot write manifest");
    out << "templates\t10\ntraining_samples\t" << 36 * opts.samples_per_class << "\nplates\t" << opts.plates << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
}

}  // namespace alprs
