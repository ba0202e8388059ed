#include "segmeld/evalkit.hpp"

#include <algorithm>

namespace segmeld {

ConfusionCounts confusion(const LabelMap& pred, const LabelMap& gt, const ClassSet& ignore) {
  require_same_shape(pred, gt, "confusion");
  ConfusionCounts out;
  for (Eigen::Index i = 0; i < gt.size(); ++i) {
    const ClassId g = gt.data()[i];
    if (ignore.count(g)) continue;
    const ClassId p = pred.data()[i];
    if (p == g) {
      ++out[g].tp;
    } else {
      ++out[g].fn;
      if (!ignore.count(p)) ++out[p].fp;
    }
  }
  return out;
}

void merge(ConfusionCounts& into, const ConfusionCounts& from) {
  for (const auto& [c, counts] : from) into[c] += counts;
}

double f_beta(double precision, double recall, double beta) {
  const double b2 = beta * beta;
  const double denom = b2 * precision + recall;
  if (denom == 0.0) return 0.0;
  return (1.0 + b2) * precision * recall / denom;
}

Metrics metrics_of(const PixelCounts& c) {
  auto ratio = [](std::int64_t num, std::int64_t den) { return den > 0 ? static_cast<double>(num) / den : 0.0; };
  Metrics m;
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.f05 = f_beta(m.precision, m.recall, 0.5);
  m.f1 = f_beta(m.precision, m.recall, 1.0);
  m.iou = ratio(c.tp, c.tp + c.fp + c.fn);
  return m;
}

namespace {

std::vector<ClassRow> rows_of(const ConfusionCounts& counts, const ClassRegistry& registry) {
  std::vector<ClassRow> rows;
  for (const auto& [c, pc] : counts) {
    rows.push_back({c, registry.name(c), pc, metrics_of(pc), pc.tp + pc.fn > 0});
  }
  return rows;
}

void accumulate_into(Metrics& sum, const Metrics& m) {
  sum.precision += m.precision;
  sum.recall += m.recall;
  sum.f05 += m.f05;
  sum.f1 += m.f1;
  sum.iou += m.iou;
}

Metrics divided(Metrics m, double n) {
  m.precision /= n;
  m.recall /= n;
  m.f05 /= n;
  m.f1 /= n;
  m.iou /= n;
  return m;
}

}  // namespace

EvalReport report(std::span<const LabelMap> preds, std::span<const LabelMap> gts, const ClassRegistry& registry,
                  std::span<const int> item_counts, std::span<const std::string> ids, const EvalOptions& opts) {
  if (preds.size() != gts.size() || item_counts.size() != gts.size() || (!ids.empty() && ids.size() != gts.size())) {
    throw Error(ErrorCode::MissingPair, std::to_string(preds.size()) + " predictions, " + std::to_string(gts.size()) +
                                            " ground truths, " + std::to_string(item_counts.size()) + " item counts");
  }
  EvalReport rep;
  ConfusionCounts total;
  Metrics sum;
  for (std::size_t i = 0; i < gts.size(); ++i) {
    ImageReport img;
    img.image_id = ids.empty() ? std::to_string(i) : ids[i];
    img.item_count = item_counts[i];
    const ConfusionCounts cc = confusion(preds[i], gts[i], opts.ignore);
    img.classes = rows_of(cc, registry);
    Metrics image_sum;
    int n = 0;
    for (const auto& row : img.classes) {
      if (!row.in_ground_truth) continue;
      accumulate_into(image_sum, row.metrics);
      ++n;
    }
    if (n > 0) {
      img.mean = divided(image_sum, n);
      accumulate_into(sum, *img.mean);
      ++rep.scored_images;
    }
    merge(total, cc);
    rep.images.push_back(std::move(img));
  }
  rep.classes = rows_of(total, registry);
  if (rep.scored_images > 0) rep.mean = divided(sum, static_cast<double>(rep.scored_images));
  return rep;
}

std::vector<ClutterPoint> clutter_curve(const EvalReport& rep) {
  std::map<int, std::pair<double, std::size_t>> groups;
  for (const auto& img : rep.images) {
    if (!img.mean) continue;
    auto& g = groups[img.item_count];
    g.first += img.mean->f05;
    ++g.second;
  }
  std::vector<ClutterPoint> out;
  for (const auto& [count, g] : groups) out.push_back({count, g.first / static_cast<double>(g.second), g.second});
  return out;
}

std::vector<FrequencyPoint> frequency_curve(const EvalReport& rep, const std::map<ClassId, int>& appearances) {
  std::vector<FrequencyPoint> out;
  for (const auto& row : rep.classes) {
    if (!row.in_ground_truth) continue;
    auto it = appearances.find(row.id);
    if (it == appearances.end()) {
      throw Error(ErrorCode::UnknownClass, "no appearance count for class " + std::to_string(row.id));
    }
    out.push_back({row.id, it->second, row.metrics.f05});
  }
  std::sort(out.begin(), out.end(), [](const FrequencyPoint& a, const FrequencyPoint& b) {
    return a.appearances < b.appearances || (a.appearances == b.appearances && a.id < b.id);
  });
  return out;
}

}  // namespace segmeld
