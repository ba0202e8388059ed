#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "segmeld/annotate.hpp"
#include "segmeld/embed.hpp"
#include "segmeld/evalkit.hpp"
#include "segmeld/gallery.hpp"
#include "segmeld/hierarchy.hpp"
#include "segmeld/registry.hpp"
#include "segmeld/scene.hpp"
#include "segmeld/train.hpp"
#include "segmeld/vote.hpp"

// JSON documents and directory layouts shared by the CLI and tests. The
// schemas are described in docs/formats.md. Malformed documents raise
// ParseError naming the offending field.

namespace segmeld {

using Json = nlohmann::json;

inline constexpr const char* kNetFormat = "segmeld-net/1";
inline constexpr const char* kGalleryFormat = "segmeld-gallery/1";
inline constexpr const char* kProposalsFormat = "segmeld-proposals/1";
inline constexpr const char* kScoresFormat = "segmeld-scores/1";
inline constexpr const char* kReviewFormat = "segmeld-review/1";

Json load_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void save_json(const Json& doc, const std::filesystem::path& path);

Json to_json(const ClassRegistry& registry);
ClassRegistry registry_from_json(const Json& doc);

Json to_json(const SceneSpec& spec);
/// Missing fields keep their defaults.
SceneSpec scene_spec_from_json(const Json& doc);

Json to_json(const LossConfig& cfg);
LossConfig loss_config_from_json(const Json& doc, LossConfig base = {});
Json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const Json& doc, TrainConfig base = {});
Json to_json(const HierarchyConfig& cfg);
HierarchyConfig hierarchy_config_from_json(const Json& doc, HierarchyConfig base = {});

Json to_json(const EmbeddingNet<double>& net);
EmbeddingNet<double> net_from_json(const Json& doc);

Json to_json(const Gallery& gallery);
Gallery gallery_from_json(const Json& doc);

/// Writes mask_NNNN.pgm files plus proposals.json into `dir`.
void export_proposals(const std::vector<RegionProposal>& proposals, int width, int height,
                      const std::filesystem::path& dir);
std::vector<RegionProposal> import_proposals(const std::filesystem::path& dir);

/// One 16-bit PGM per class plus scores.json recording each plane's affine
/// mapping score = min + (max - min) * sample / 65535.
void write_score_map(const ScoreMap& scores, const std::filesystem::path& dir);
ScoreMap read_score_map(const std::filesystem::path& dir);

/// One row per image x class.
std::string report_csv(const EvalReport& rep);
Json report_summary(const EvalReport& rep);
std::string clutter_csv(const std::vector<ClutterPoint>& curve);
std::string frequency_csv(const std::vector<FrequencyPoint>& curve);

Json to_json(const std::vector<ReviewItem>& queue);

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

}  // namespace segmeld
