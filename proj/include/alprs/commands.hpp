#pragma once

// Command implementations behind the `alprs` executable. Each returns the process exit
// status: 0 success (or partial read), 1 plate not found / segmentation failed,
// 2 usage or data error.

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "alprs/pipeline.hpp"

namespace alprs {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNotFound = 1;
inline constexpr int kExitDataError = 2;

int cmd_build_templates(const std::filesystem::path& dir, const std::filesystem::path& out_db,
                        const PipelineConfig& cfg, std::ostream& out, std::ostream& err);

int cmd_train_ocr(const std::filesystem::path& dir, const std::filesystem::path& out_model,
                  const PipelineConfig& cfg, std::ostream& out, std::ostream& err);

struct RecognizeOptions {
  bool timings = true;
  bool verbose = false;  // one extra line per character
};

int cmd_recognize(const std::filesystem::path& image, const std::filesystem::path& db,
                  const std::filesystem::path& model, const PipelineConfig& cfg,
                  const RecognizeOptions& opts, std::ostream& out, std::ostream& err);

struct EvaluateOptions {
  int jobs = 1;
  bool timings = true;
};

/// One line per manifest row, `report line<TAB>truth`, in manifest order, then the
/// summary lines.
int cmd_evaluate(const std::filesystem::path& manifest, const std::filesystem::path& db,
                 const std::filesystem::path& model, const PipelineConfig& cfg,
                 const EvaluateOptions& opts, std::ostream& out, std::ostream& err);

struct SynthOptions {
  int plates = 30;
  int samples_per_class = 12;
  std::uint64_t seed = 1;
};

/// Writes templates/0..9.pgm, train/<label>/*.pgm, plates/*.pgm and manifest.tsv.
int cmd_synth(const std::filesystem::path& out_dir, const SynthOptions& opts, std::ostream& out,
              std::ostream& err);

}  // namespace alprs
