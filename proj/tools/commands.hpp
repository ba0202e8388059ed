#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "segmeld/serialize.hpp"

namespace segmeld::cli {

namespace fs = std::filesystem;

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file section of the same name as the subcommand.
struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  std::string thresholds;  // comma-separated
  std::string expected;    // comma-separated ids
  std::string out;
};

struct GenSynthArgs {
  CommonFlags common;
};

struct TrainArgs {
  CommonFlags common;
  std::string data;
  std::string loss_csv;
};

struct EnrollArgs {
  CommonFlags common;
  std::string net;
  std::string captures;
  std::optional<std::size_t> views;
};

struct SegmentArgs {
  CommonFlags common;
  std::string net;
  std::string gallery;
  std::string image;
  std::string boundary;
  std::string proposals_dir;
};

struct FuseScoresArgs {
  CommonFlags common;
  std::string scores;
};

struct EvaluateArgs {
  CommonFlags common;
  std::string pred;
  std::string gt;
  std::string registry;
  std::vector<std::string> manifests;
  std::string appearances;
};

struct AnnotateArgs {
  CommonFlags common;
  std::string masks;
  std::string manifest;
  std::string registry;
  std::optional<int> min_area;
};

void run_gen_synth(const GenSynthArgs& args);
void run_train(const TrainArgs& args);
void run_enroll(const EnrollArgs& args);
void run_segment(const SegmentArgs& args);
void run_fuse_scores(const FuseScoresArgs& args);
void run_evaluate(const EvaluateArgs& args);
void run_annotate(const AnnotateArgs& args);

ClassSet parse_id_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

/// Sorted stems s with both <s>.ppm and <s>_labels.pgm in dir.
std::vector<std::string> labelled_image_stems(const fs::path& dir);

}  // namespace segmeld::cli
