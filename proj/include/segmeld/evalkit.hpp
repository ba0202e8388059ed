#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segmeld/raster.hpp"
#include "segmeld/registry.hpp"

namespace segmeld {

struct PixelCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;

  PixelCounts& operator+=(const PixelCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  bool operator==(const PixelCounts&) const = default;
};

using ConfusionCounts = std::map<ClassId, PixelCounts>;

inline const ClassSet kDefaultIgnore{0};

/// Pixel TP/FP/FN per class. Pixels whose ground truth is in `ignore` are
/// skipped entirely, and ignored ids get no row.
ConfusionCounts confusion(const LabelMap& pred, const LabelMap& gt, const ClassSet& ignore = kDefaultIgnore);

void merge(ConfusionCounts& into, const ConfusionCounts& from);

/// (1 + b^2) p r / (b^2 p + r), and 0 when the denominator is 0.
double f_beta(double precision, double recall, double beta);

struct Metrics {
  double precision = 0;
  double recall = 0;
  double f05 = 0;
  double f1 = 0;
  double iou = 0;
};

Metrics metrics_of(const PixelCounts& c);

struct ClassRow {
  ClassId id = 0;
  std::string name;
  PixelCounts counts;
  Metrics metrics;
  bool in_ground_truth = false;
};

struct ImageReport {
  std::string image_id;
  int item_count = 0;
  std::vector<ClassRow> classes;
  /// Mean over ground-truth classes; empty when the image has none.
  std::optional<Metrics> mean;
};

struct EvalReport {
  std::vector<ImageReport> images;
  /// Rows from counts summed over all images.
  std::vector<ClassRow> classes;
  /// Mean of the per-image means over images that have one.
  Metrics mean;
  std::size_t scored_images = 0;
};

struct EvalOptions {
  ClassSet ignore = kDefaultIgnore;
};

/// MissingPair when the prediction, ground-truth, id or item-count lists
/// differ in length; DimensionMismatch per pair; UnknownClass for a label
/// that is neither ignored nor registered. Empty `ids` names images by index.
EvalReport report(std::span<const LabelMap> preds, std::span<const LabelMap> gts, const ClassRegistry& registry,
                  std::span<const int> item_counts, std::span<const std::string> ids = {},
                  const EvalOptions& opts = {});

struct ClutterPoint {
  int item_count = 0;
  double mean_f05 = 0;
  std::size_t images = 0;
};

/// Per-image mean F0.5 averaged within each item count, ascending count.
std::vector<ClutterPoint> clutter_curve(const EvalReport& rep);

struct FrequencyPoint {
  ClassId id = 0;
  int appearances = 0;
  double f05 = 0;
};

/// Dataset-level F0.5 of every ground-truth class joined with its training
/// appearance count, ordered by (appearances, id). UnknownClass if a class
/// has no count.
std::vector<FrequencyPoint> frequency_curve(const EvalReport& rep, const std::map<ClassId, int>& appearances);

}  // namespace segmeld
