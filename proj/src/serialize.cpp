#include "segmeld/serialize.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "segmeld/netpbm.hpp"

namespace segmeld {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const Json& field(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  return doc.at(key);
}

template <typename T>
T get_as(const Json& value, const char* key) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception& e) {
    parse_fail(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
void read_optional(const Json& doc, const char* key, T& out) {
  if (doc.is_object() && doc.contains(key)) out = get_as<T>(doc.at(key), key);
}

void require_format(const Json& doc, const char* expected) {
  const auto fmt = get_as<std::string>(field(doc, "format"), "format");
  if (fmt != expected) parse_fail("format '" + fmt + "', expected '" + expected + "'");
}

Json metrics_json(const Metrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f05", m.f05}, {"f1", m.f1}, {"iou", m.iou}};
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json load_json(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    parse_fail(path.string() + ": " + e.what());
  }
}

void save_json(const Json& doc, const fs::path& path) {
  write_file(path, doc.dump(2) + "\n");
}

Json to_json(const ClassRegistry& registry) {
  Json classes = Json::array();
  for (const auto& e : registry.entries()) classes.push_back({{"id", e.id}, {"name", e.name}});
  return {{"classes", classes}};
}

ClassRegistry registry_from_json(const Json& doc) {
  ClassRegistry reg;
  const Json& classes = field(doc, "classes");
  if (!classes.is_array()) parse_fail("'classes' must be an array");
  for (const auto& c : classes) {
    reg.add(get_as<ClassId>(field(c, "id"), "id"), get_as<std::string>(field(c, "name"), "name"));
  }
  return reg;
}

Json to_json(const SceneSpec& spec) {
  Json shapes = Json::array();
  for (auto s : spec.shapes) shapes.push_back(s == ShapeKind::Rectangle ? "rectangle" : "ellipse");
  Json colors = Json::object();
  for (const auto& [id, rgb] : spec.colors) colors[std::to_string(id)] = rgb;
  return {{"seed", spec.seed},
          {"width", spec.width},
          {"height", spec.height},
          {"min_items", spec.min_items},
          {"max_items", spec.max_items},
          {"shapes", shapes},
          {"colors", colors},
          {"background", spec.background},
          {"noise", spec.noise},
          {"allow_occlusion", spec.allow_occlusion},
          {"min_extent", spec.min_extent},
          {"max_extent", spec.max_extent},
          {"max_attempts", spec.max_attempts}};
}

SceneSpec scene_spec_from_json(const Json& doc) {
  if (!doc.is_object()) parse_fail("scene spec must be an object");
  SceneSpec spec;
  read_optional(doc, "seed", spec.seed);
  read_optional(doc, "width", spec.width);
  read_optional(doc, "height", spec.height);
  read_optional(doc, "min_items", spec.min_items);
  read_optional(doc, "max_items", spec.max_items);
  read_optional(doc, "noise", spec.noise);
  read_optional(doc, "allow_occlusion", spec.allow_occlusion);
  read_optional(doc, "min_extent", spec.min_extent);
  read_optional(doc, "max_extent", spec.max_extent);
  read_optional(doc, "max_attempts", spec.max_attempts);
  read_optional(doc, "background", spec.background);
  if (doc.contains("shapes")) {
    spec.shapes.clear();
    for (const auto& s : doc.at("shapes")) {
      const auto name = get_as<std::string>(s, "shapes");
      if (name == "rectangle") {
        spec.shapes.push_back(ShapeKind::Rectangle);
      } else if (name == "ellipse") {
        spec.shapes.push_back(ShapeKind::Ellipse);
      } else {
        parse_fail("unknown shape '" + name + "'");
      }
    }
  }
  if (doc.contains("colors")) {
    for (const auto& [key, rgb] : doc.at("colors").items()) {
      ClassId id = 0;
      const auto res = std::from_chars(key.data(), key.data() + key.size(), id);
      if (res.ec != std::errc() || res.ptr != key.data() + key.size()) parse_fail("colour key '" + key + "'");
      spec.colors[id] = get_as<Rgb>(rgb, "colors");
    }
  }
  spec.validate();
  return spec;
}

Json to_json(const LossConfig& cfg) {
  return {{"triplet_margin", cfg.triplet_margin},
          {"global_margin", cfg.global_margin},
          {"lambda", cfg.variance_weight},
          {"alpha", cfg.alpha}};
}

LossConfig loss_config_from_json(const Json& doc, LossConfig base) {
  read_optional(doc, "triplet_margin", base.triplet_margin);
  read_optional(doc, "global_margin", base.global_margin);
  read_optional(doc, "lambda", base.variance_weight);
  read_optional(doc, "alpha", base.alpha);
  base.validate();
  return base;
}

Json to_json(const TrainConfig& cfg) {
  return {{"epochs", cfg.epochs},
          {"triplet_budget", cfg.triplet_budget},
          {"batch_size", cfg.batch_size},
          {"learning_rate", cfg.learning_rate},
          {"halving_period", cfg.halving_period},
          {"weight_decay", cfg.weight_decay},
          {"last_layer_lr_multiplier", cfg.last_layer_lr_multiplier},
          {"seed", cfg.seed},
          {"loss", to_json(cfg.loss)}};
}

TrainConfig train_config_from_json(const Json& doc, TrainConfig base) {
  read_optional(doc, "epochs", base.epochs);
  read_optional(doc, "triplet_budget", base.triplet_budget);
  read_optional(doc, "batch_size", base.batch_size);
  read_optional(doc, "learning_rate", base.learning_rate);
  read_optional(doc, "halving_period", base.halving_period);
  read_optional(doc, "weight_decay", base.weight_decay);
  read_optional(doc, "last_layer_lr_multiplier", base.last_layer_lr_multiplier);
  read_optional(doc, "seed", base.seed);
  if (doc.is_object() && doc.contains("loss")) base.loss = loss_config_from_json(doc.at("loss"), base.loss);
  base.validate();
  return base;
}

Json to_json(const HierarchyConfig& cfg) {
  return {{"thresholds", cfg.thresholds},
          {"min_area_fraction", cfg.min_area_fraction},
          {"max_area_fraction", cfg.max_area_fraction}};
}

HierarchyConfig hierarchy_config_from_json(const Json& doc, HierarchyConfig base) {
  read_optional(doc, "thresholds", base.thresholds);
  read_optional(doc, "min_area_fraction", base.min_area_fraction);
  read_optional(doc, "max_area_fraction", base.max_area_fraction);
  base.sorted_thresholds();
  return base;
}

Json to_json(const EmbeddingNet<double>& net) {
  Json layers = Json::array();
  for (const auto& L : net.layers()) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(L.weights.size()));
    for (Eigen::Index r = 0; r < L.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < L.weights.cols(); ++c) w.push_back(L.weights(r, c));
    }
    layers.push_back({{"in", L.weights.cols()},
                      {"out", L.weights.rows()},
                      {"weights", w},
                      {"bias", std::vector<double>(L.bias.data(), L.bias.data() + L.bias.size())}});
  }
  return {{"format", kNetFormat}, {"activation", "tanh"}, {"normalize", "l2"}, {"layers", layers}};
}

EmbeddingNet<double> net_from_json(const Json& doc) {
  require_format(doc, kNetFormat);
  if (get_as<std::string>(field(doc, "activation"), "activation") != "tanh") parse_fail("activation must be tanh");
  std::vector<DenseLayer<double>> layers;
  for (const auto& L : field(doc, "layers")) {
    const auto in = get_as<Eigen::Index>(field(L, "in"), "in");
    const auto out = get_as<Eigen::Index>(field(L, "out"), "out");
    const auto w = get_as<std::vector<double>>(field(L, "weights"), "weights");
    const auto b = get_as<std::vector<double>>(field(L, "bias"), "bias");
    if (in < 1 || out < 1 || static_cast<Eigen::Index>(w.size()) != in * out ||
        static_cast<Eigen::Index>(b.size()) != out) {
      parse_fail("layer array lengths do not match in/out");
    }
    DenseLayer<double> layer{Matrix<double>(out, in), Vector<double>(out)};
    for (Eigen::Index r = 0; r < out; ++r) {
      for (Eigen::Index c = 0; c < in; ++c) layer.weights(r, c) = w[static_cast<std::size_t>(r * in + c)];
      layer.bias(r) = b[static_cast<std::size_t>(r)];
    }
    layers.push_back(std::move(layer));
  }
  EmbeddingNet<double> net(std::move(layers));
  if (!net.all_finite()) parse_fail("non-finite network parameter");
  return net;
}

Json to_json(const Gallery& gallery) {
  Json entries = Json::array();
  for (const auto& e : gallery.entries()) {
    entries.push_back(
        {{"class", e.class_id}, {"vector", std::vector<double>(e.vector.data(), e.vector.data() + e.vector.size())}});
  }
  return {{"format", kGalleryFormat}, {"dim", gallery.dim()}, {"entries", entries}};
}

Gallery gallery_from_json(const Json& doc) {
  require_format(doc, kGalleryFormat);
  Gallery g(get_as<int>(field(doc, "dim"), "dim"));
  for (const auto& e : field(doc, "entries")) {
    const auto v = get_as<std::vector<double>>(field(e, "vector"), "vector");
    g.add(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())),
          get_as<ClassId>(field(e, "class"), "class"));
  }
  return g;
}

void export_proposals(const std::vector<RegionProposal>& proposals, int width, int height, const fs::path& dir) {
  fs::create_directories(dir);
  Json list = Json::array();
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "mask_%04zu.pgm", i);
    write_pgm16(proposals[i].mask, dir / name);
    list.push_back({{"file", name}, {"threshold", proposals[i].threshold}, {"area", proposals[i].area}});
  }
  save_json({{"format", kProposalsFormat}, {"width", width}, {"height", height}, {"proposals", list}},
            dir / "proposals.json");
}

std::vector<RegionProposal> import_proposals(const fs::path& dir) {
  const Json doc = load_json(dir / "proposals.json");
  require_format(doc, kProposalsFormat);
  std::vector<RegionProposal> out;
  for (const auto& p : field(doc, "proposals")) {
    RegionProposal r;
    r.mask = read_mask_pgm(dir / get_as<std::string>(field(p, "file"), "file"));
    r.threshold = get_as<double>(field(p, "threshold"), "threshold");
    r.area = static_cast<int>(r.mask.count());
    out.push_back(std::move(r));
  }
  return out;
}

void write_score_map(const ScoreMap& scores, const fs::path& dir) {
  fs::create_directories(dir);
  Json classes = Json::array();
  for (const auto& [id, plane] : scores.planes) {
    if (!plane.allFinite()) throw Error(ErrorCode::ValueOutOfRange, "non-finite score");
    const double lo = plane.minCoeff();
    const double hi = plane.maxCoeff();
    const double span = hi > lo ? hi - lo : 1.0;
    const std::string file = "class_" + std::to_string(id) + ".pgm";
    write_file(dir / file, encode_pgm16(((plane - lo) / span * 65535.0).round().cast<std::uint16_t>()));
    classes.push_back({{"id", id}, {"file", file}, {"min", lo}, {"max", hi}});
  }
  save_json({{"format", kScoresFormat}, {"width", scores.width}, {"height", scores.height}, {"classes", classes}},
            dir / "scores.json");
}

ScoreMap read_score_map(const fs::path& dir) {
  const Json doc = load_json(dir / "scores.json");
  require_format(doc, kScoresFormat);
  ScoreMap out;
  out.width = get_as<int>(field(doc, "width"), "width");
  out.height = get_as<int>(field(doc, "height"), "height");
  for (const auto& c : field(doc, "classes")) {
    const auto id = get_as<ClassId>(field(c, "id"), "id");
    const double lo = get_as<double>(field(c, "min"), "min");
    const double hi = get_as<double>(field(c, "max"), "max");
    const GrayPlane g = decode_pgm(read_file(dir / get_as<std::string>(field(c, "file"), "file")));
    if (g.values.cols() != out.width || g.values.rows() != out.height) {
      throw Error(ErrorCode::DimensionMismatch, "score plane for class " + std::to_string(id));
    }
    out.planes[id] = lo + (hi - lo) * (g.values.cast<double>() / static_cast<double>(g.maxval));
  }
  return out;
}

std::string report_csv(const EvalReport& rep) {
  std::ostringstream os;
  os << "image,item_count,class_id,class_name,in_ground_truth,tp,fp,fn,precision,recall,f05,f1,iou\n";
  for (const auto& img : rep.images) {
    for (const auto& row : img.classes) {
      const Metrics& m = row.metrics;
      os << img.image_id << ',' << img.item_count << ',' << row.id << ',' << row.name << ','
         << (row.in_ground_truth ? 1 : 0) << ',' << row.counts.tp << ',' << row.counts.fp << ',' << row.counts.fn
         << ',' << format_double(m.precision) << ',' << format_double(m.recall) << ',' << format_double(m.f05) << ','
         << format_double(m.f1) << ',' << format_double(m.iou) << '\n';
    }
  }
  return os.str();
}

Json report_summary(const EvalReport& rep) {
  Json images = Json::array();
  for (const auto& img : rep.images) {
    images.push_back({{"id", img.image_id},
                      {"item_count", img.item_count},
                      {"mean", img.mean ? metrics_json(*img.mean) : Json(nullptr)}});
  }
  Json classes = Json::array();
  for (const auto& row : rep.classes) {
    classes.push_back({{"id", row.id},
                       {"name", row.name},
                       {"in_ground_truth", row.in_ground_truth},
                       {"tp", row.counts.tp},
                       {"fp", row.counts.fp},
                       {"fn", row.counts.fn},
                       {"metrics", metrics_json(row.metrics)}});
  }
  return {{"images", rep.images.size()},
          {"scored_images", rep.scored_images},
          {"mean", metrics_json(rep.mean)},
          {"per_image", images},
          {"classes", classes}};
}

std::string clutter_csv(const std::vector<ClutterPoint>& curve) {
  std::ostringstream os;
  os << "item_count,mean_f05,images\n";
  for (const auto& p : curve) os << p.item_count << ',' << format_double(p.mean_f05) << ',' << p.images << '\n';
  return os.str();
}

std::string frequency_csv(const std::vector<FrequencyPoint>& curve) {
  std::ostringstream os;
  os << "class_id,appearances,f05\n";
  for (const auto& p : curve) os << p.id << ',' << p.appearances << ',' << format_double(p.f05) << '\n';
  return os.str();
}

Json to_json(const std::vector<ReviewItem>& queue) {
  Json items = Json::array();
  for (const auto& q : queue) {
    items.push_back(
        {{"capture", q.capture_id}, {"mask", q.mask_path}, {"reason", to_string(q.review.reason)}, {"found", q.review.found}});
  }
  return {{"format", kReviewFormat}, {"items", items}};
}

}  // namespace segmeld
