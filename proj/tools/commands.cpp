#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include "segmeld/netpbm.hpp"
#include "segmeld/pipeline.hpp"

namespace segmeld::cli {
namespace {

struct Config {
  Json root = Json::object();
  fs::path base_dir = ".";

  /// The subcommand's section, or an empty object.
  Json section(const char* name) const {
    if (root.contains(name)) {
      if (!root.at(name).is_object()) throw Error(ErrorCode::ParseError, std::string("section '") + name + "'");
      return root.at(name);
    }
    return Json::object();
  }

  fs::path resolve(const std::string& p) const {
    const fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  }
};

Config load_config(const CommonFlags& flags) {
  Config cfg;
  if (flags.config.empty()) return cfg;
  cfg.root = load_json(flags.config);
  if (!cfg.root.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
  cfg.base_dir = fs::path(flags.config).parent_path();
  if (cfg.base_dir.empty()) cfg.base_dir = ".";
  return cfg;
}

/// Registry from `section.registry`, falling back to the top-level key.
/// Either an inline document or a path relative to the config file.
ClassRegistry registry_from_config(const Config& cfg, const Json& section) {
  const Json* node = nullptr;
  if (section.contains("registry")) {
    node = &section.at("registry");
  } else if (cfg.root.contains("registry")) {
    node = &cfg.root.at("registry");
  }
  if (!node) throw Error(ErrorCode::ParseError, "config has no 'registry'");
  if (node->is_string()) return registry_from_json(load_json(cfg.resolve(node->get<std::string>())));
  return registry_from_json(*node);
}

void warn(const std::string& msg) { std::cerr << "segmeld: warning: " << msg << '\n'; }

std::string numbered(const char* fmt, int a, int b = 0) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

Json ids_json(const ClassSet& ids) { return Json(std::vector<ClassId>(ids.begin(), ids.end())); }

Json write_scene(const Scene& scene, const fs::path& dir, const std::string& id, std::uint64_t seed) {
  write_ppm(scene.image, dir / (id + ".ppm"));
  write_pgm16(scene.labels, dir / (id + "_labels.pgm"));
  write_pgm16(scene.boundary, dir / (id + "_boundary.pgm"));
  return {{"id", id},
          {"image", id + ".ppm"},
          {"labels", id + "_labels.pgm"},
          {"boundary", id + "_boundary.pgm"},
          {"present", ids_json(scene.present)},
          {"item_count", scene.item_count},
          {"seed", seed}};
}

template <typename T>
T section_value(const Json& section, const char* key, T fallback) {
  if (!section.contains(key)) return fallback;
  try {
    return section.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("field '") + key + "': " + e.what());
  }
}

HierarchyConfig hierarchy_from(const Json& section, const CommonFlags& flags) {
  HierarchyConfig h = hierarchy_config_from_json(section);
  if (!flags.thresholds.empty()) h.thresholds = parse_double_list(flags.thresholds);
  h.sorted_thresholds();
  return h;
}

}  // namespace

ClassSet parse_id_list(const std::string& text) {
  ClassSet out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const long v = std::stol(item, &used);
      if (used != item.size() || v < 0) throw std::invalid_argument(item);
      out.insert(static_cast<ClassId>(v));
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad class id '" + item + "'");
    }
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad number '" + item + "'");
    }
  }
  return out;
}

std::vector<std::string> labelled_image_stems(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoFailure, "not a directory: " + dir.string());
  const std::string suffix = "_labels.pgm";
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() <= suffix.size() || name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
    const std::string stem = name.substr(0, name.size() - suffix.size());
    if (fs::exists(dir / (stem + ".ppm"))) stems.push_back(stem);
  }
  std::sort(stems.begin(), stems.end());
  return stems;
}

// gen-synth -----------------------------------------------------------------

void run_gen_synth(const GenSynthArgs& args) {
  const Config cfg = load_config(args.common);
  const Json sec = cfg.section("gen-synth");
  const ClassRegistry registry = registry_from_config(cfg, sec);
  SceneSpec spec = scene_spec_from_json(sec.contains("scene") ? sec.at("scene") : Json::object());
  if (args.common.seed) spec.seed = *args.common.seed;
  // Pin every colour so single-class captures match the full-registry scenes.
  for (std::size_t i = 0; i < registry.size(); ++i) {
    spec.colors.try_emplace(registry.entries()[i].id, wheel_color(i, registry.size()));
  }

  const fs::path out(args.common.out);
  fs::create_directories(out);
  save_json(to_json(registry), out / "registry.json");

  const int scenes = section_value(sec, "scenes", 10);
  if (scenes < 0) throw Error(ErrorCode::InvalidArgument, "'scenes' must be >= 0");

  if (sec.contains("sweep")) {
    for (int count : section_value(sec, "sweep", std::vector<int>{})) {
      if (count < 0) throw Error(ErrorCode::InvalidArgument, "sweep counts must be >= 0");
      Json list = Json::array();
      for (int i = 0; i < scenes; ++i) {
        SceneSpec s = spec;
        s.min_items = s.max_items = count;
        s.seed = spec.seed + 1000 * static_cast<std::uint64_t>(count) + static_cast<std::uint64_t>(i);
        list.push_back(write_scene(generate_scene(s, registry), out, numbered("scene_n%02d_%04d", count, i), s.seed));
      }
      save_json({{"item_count", count}, {"scenes", list}}, out / numbered("manifest_items_%02d.json", count));
    }
  } else {
    Json list = Json::array();
    for (int i = 0; i < scenes; ++i) {
      SceneSpec s = spec;
      s.seed = spec.seed + static_cast<std::uint64_t>(i);
      list.push_back(write_scene(generate_scene(s, registry), out, numbered("scene_%04d", i), s.seed));
    }
    save_json({{"scenes", list}}, out / "manifest.json");
  }

  // Single-item captures per class for enrollment.
  if (const int views = section_value(sec, "captures_per_class", 0); views > 0) {
    const fs::path dir = out / "captures";
    fs::create_directories(dir);
    Json list = Json::array();
    for (const auto& e : registry.entries()) {
      const ClassRegistry one{{e.id, e.name}};
      for (int v = 0; v < views; ++v) {
        SceneSpec s = spec;
        s.min_items = s.max_items = 1;
        s.allow_occlusion = false;
        s.seed = spec.seed + 100000 + 100 * static_cast<std::uint64_t>(e.id) + static_cast<std::uint64_t>(v);
        list.push_back(write_scene(generate_scene(s, one), dir, numbered("cap_c%03d_v%02d", e.id, v), s.seed));
      }
    }
    save_json({{"scenes", list}}, dir / "manifest.json");
  }

  // Two-item foreground masks with the operator's left-to-right item list.
  if (const int pairs = section_value(sec, "annotation_captures", 0); pairs > 0) {
    const fs::path dir = out / "annotate";
    fs::create_directories(dir);
    Json captures = Json::array();
    for (int i = 0; i < pairs; ++i) {
      SceneSpec s = spec;
      s.min_items = s.max_items = 2;
      s.allow_occlusion = false;
      s.seed = spec.seed + 200000 + static_cast<std::uint64_t>(i);
      const Scene scene = generate_scene(s, registry);
      const std::string id = numbered("pair_%04d", i);
      write_pgm16(BinaryMask(scene.labels != 0), dir / (id + "_mask.pgm"));
      write_pgm16(scene.labels, dir / (id + "_truth.pgm"));
      std::vector<std::pair<double, ClassId>> order;
      for (ClassId c : scene.present) {
        double sx = 0;
        Eigen::Index n = 0;
        for (Eigen::Index y = 0; y < scene.labels.rows(); ++y) {
          for (Eigen::Index x = 0; x < scene.labels.cols(); ++x) {
            if (scene.labels(y, x) == c) {
              sx += static_cast<double>(x);
              ++n;
            }
          }
        }
        order.emplace_back(sx / static_cast<double>(n), c);
      }
      std::sort(order.begin(), order.end());
      Json items = Json::array();
      for (const auto& [cx, c] : order) items.push_back(registry.name(c));
      captures.push_back({{"id", id}, {"mask", id + "_mask.pgm"}, {"items", items}});
    }
    save_json({{"captures", captures}}, dir / "manifest.json");
  }
}

// train ---------------------------------------------------------------------

void run_train(const TrainArgs& args) {
  const Config cfg = load_config(args.common);
  const Json sec = cfg.section("train");
  TrainConfig tc = train_config_from_json(sec);
  if (args.common.seed) tc.seed = *args.common.seed;
  const auto hidden = section_value(sec, "hidden", std::vector<int>{32});
  const int embedding_dim = section_value(sec, "embedding_dim", 8);
  const auto only = section_value(sec, "classes", std::vector<ClassId>{});
  const ClassSet keep(only.begin(), only.end());

  const fs::path data(args.data);
  PatchDataset ds;
  for (const auto& stem : labelled_image_stems(data)) {
    const ColorImage image = read_ppm(data / (stem + ".ppm"));
    LabelMap labels = read_label_pgm(data / (stem + "_labels.pgm"));
    if (!keep.empty()) labels = labels.unaryExpr([&](ClassId c) { return keep.count(c) ? c : 0; });
    ds.add_labelled_image(image, labels);
  }
  if (ds.empty()) throw Error(ErrorCode::IoFailure, "no labelled images in " + data.string());

  std::vector<int> dims{kDescriptorDim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(embedding_dim);
  const TrainResult result = train(EmbeddingNet<double>::glorot(dims, tc.seed), ds, tc);

  const fs::path out(args.common.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_json(to_json(result.net), out);
  fs::path csv = args.loss_csv.empty() ? fs::path(out).replace_extension().string() + "_loss.csv" : args.loss_csv;
  std::ostringstream os;
  os << "epoch,learning_rate,mean_loss\n";
  for (std::size_t e = 0; e < result.loss_trace.size(); ++e) {
    os << e << ',' << format_double(learning_rate_at(tc, static_cast<int>(e))) << ','
       << format_double(result.loss_trace[e]) << '\n';
  }
  write_file(csv, os.str());
}

// enroll --------------------------------------------------------------------

void run_enroll(const EnrollArgs& args) {
  const Config cfg = load_config(args.common);
  const Json sec = cfg.section("enroll");
  const std::size_t views = args.views.value_or(section_value<std::size_t>(sec, "views", 7));
  const EmbeddingNet<double> net = net_from_json(load_json(args.net));
  const fs::path dir(args.captures);
  Gallery gallery(net.output_dim());
  for (const auto& stem : labelled_image_stems(dir)) {
    const fs::path label_path = dir / (stem + "_labels.pgm");
    const LabelMap labels = read_label_pgm(label_path);
    if (present_classes(labels).empty()) {
      throw Error(ErrorCode::EmptyMask, "no labelled pixel in " + label_path.string());
    }
    enroll_labelled_image(gallery, read_ppm(dir / (stem + ".ppm")), labels, net, views);
  }
  if (gallery.empty()) throw Error(ErrorCode::IoFailure, "no captures in " + dir.string());
  const fs::path out(args.common.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_json(to_json(gallery), out);
}

// segment -------------------------------------------------------------------

void run_segment(const SegmentArgs& args) {
  const Config cfg = load_config(args.common);
  const Json sec = cfg.section("segment");
  SegmentOptions opts;
  opts.hierarchy = hierarchy_from(sec, args.common);
  opts.k = args.common.k.value_or(section_value<std::size_t>(sec, "k", 3));
  if (!args.common.expected.empty()) {
    opts.expected = parse_id_list(args.common.expected);
  } else if (sec.contains("expected")) {
    const auto ids = section_value(sec, "expected", std::vector<ClassId>{});
    opts.expected = ClassSet(ids.begin(), ids.end());
  }
  if (opts.expected && opts.expected->empty()) throw Error(ErrorCode::InvalidArgument, "expected class list is empty");

  const EmbeddingNet<double> net = net_from_json(load_json(args.net));
  const Gallery gallery = gallery_from_json(load_json(args.gallery));
  const ColorImage image = read_ppm(args.image);
  const BoundaryMap boundary = read_boundary_pgm(args.boundary);

  const SegmentResult result = segment_image(net, gallery, image, boundary, opts);
  if (result.proposal_count == 0) warn("no region proposals survived the size filter; output is all background");
  const fs::path out(args.common.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_pgm16(result.labels, out);
  if (!args.proposals_dir.empty()) {
    export_proposals(extract_proposals(boundary, opts.hierarchy), image.width, image.height, args.proposals_dir);
  }
}

// fuse-scores ---------------------------------------------------------------

void run_fuse_scores(const FuseScoresArgs& args) {
  const Config cfg = load_config(args.common);
  const Json sec = cfg.section("fuse-scores");
  const ScoreMap scores = read_score_map(args.scores);
  ClassSet expected;
  if (!args.common.expected.empty()) {
    expected = parse_id_list(args.common.expected);
  } else {
    const auto ids = section_value(sec, "expected", std::vector<ClassId>{});
    expected = ClassSet(ids.begin(), ids.end());
  }
  const fs::path out(args.common.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_pgm16(restricted_argmax(scores, expected), out);
}

// evaluate ------------------------------------------------------------------

void run_evaluate(const EvaluateArgs& args) {
  const Config cfg = load_config(args.common);
  const Json sec = cfg.section("evaluate");
  const ClassRegistry registry = registry_from_json(load_json(args.registry));
  EvalOptions opts;
  if (sec.contains("ignore")) {
    const auto ids = section_value(sec, "ignore", std::vector<ClassId>{});
    opts.ignore = ClassSet(ids.begin(), ids.end());
  }

  std::map<std::string, int> manifest_counts;
  for (const auto& m : args.manifests) {
    const Json doc = load_json(m);
    for (const auto& s : doc.at("scenes")) {
      manifest_counts[s.at("labels").get<std::string>()] = s.at("item_count").get<int>();
    }
  }

  auto label_files = [](const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::IoFailure, "not a directory: " + dir.string());
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir)) {
      const std::string n = e.path().filename().string();
      if (n.size() > 11 && n.compare(n.size() - 11, 11, "_labels.pgm") == 0) names.push_back(n);
    }
    std::sort(names.begin(), names.end());
    return names;
  };
  const fs::path pred_dir(args.pred), gt_dir(args.gt);
  const auto gt_names = label_files(gt_dir);
  const auto pred_names = label_files(pred_dir);
  for (const auto& n : gt_names) {
    if (!std::binary_search(pred_names.begin(), pred_names.end(), n)) {
      throw Error(ErrorCode::MissingPair, "no prediction for " + n);
    }
  }
  for (const auto& n : pred_names) {
    if (!std::binary_search(gt_names.begin(), gt_names.end(), n)) {
      throw Error(ErrorCode::MissingPair, "no ground truth for " + n);
    }
  }

  std::vector<LabelMap> preds, gts;
  std::vector<int> counts;
  std::vector<std::string> ids;
  for (const auto& n : gt_names) {
    gts.push_back(read_label_pgm(gt_dir / n));
    preds.push_back(read_label_pgm(pred_dir / n));
    auto it = manifest_counts.find(n);
    counts.push_back(it != manifest_counts.end() ? it->second : static_cast<int>(present_classes(gts.back()).size()));
    ids.push_back(n.substr(0, n.size() - 11));
  }
  const EvalReport rep = report(preds, gts, registry, counts, ids, opts);

  const std::string prefix = args.common.out;
  const fs::path prefix_path(prefix);
  if (prefix_path.has_parent_path()) fs::create_directories(prefix_path.parent_path());
  write_file(prefix + ".csv", report_csv(rep));
  save_json(report_summary(rep), prefix + ".json");
  write_file(prefix + "_clutter.csv", clutter_csv(clutter_curve(rep)));
  if (!args.appearances.empty()) {
    std::map<ClassId, int> appearances;
    const Json doc = load_json(args.appearances);
    for (const auto& [k, v] : doc.items()) {
      appearances[static_cast<ClassId>(std::stol(k))] = v.get<int>();
    }
    write_file(prefix + "_frequency.csv", frequency_csv(frequency_curve(rep, appearances)));
  }
}

// annotate ------------------------------------------------------------------

void run_annotate(const AnnotateArgs& args) {
  const Config cfg = load_config(args.common);
  const Json sec = cfg.section("annotate");
  const Json manifest = load_json(args.manifest);
  std::optional<ClassRegistry> registry;
  if (!args.registry.empty()) registry = registry_from_json(load_json(args.registry));

  auto resolve_item = [&](const Json& item) -> ClassId {
    if (item.is_number_integer()) return item.get<ClassId>();
    if (!item.is_string()) throw Error(ErrorCode::ParseError, "capture items must be ids or names");
    const auto name = item.get<std::string>();
    if (!registry) throw Error(ErrorCode::InvalidArgument, "item name '" + name + "' needs --registry");
    if (auto id = registry->find(name)) return *id;
    throw Error(ErrorCode::UnknownClass, "item '" + name + "'");
  };

  std::optional<int> min_area = args.min_area;
  if (!min_area && manifest.contains("min_area")) min_area = manifest.at("min_area").get<int>();
  if (!min_area && sec.contains("min_area")) min_area = sec.at("min_area").get<int>();

  const fs::path masks(args.masks), out(args.common.out);
  fs::create_directories(out);
  std::vector<CaptureOutcome> outcomes;
  if (!manifest.contains("captures") || !manifest.at("captures").is_array()) {
    throw Error(ErrorCode::ParseError, "manifest needs a 'captures' array");
  }
  for (const auto& cap : manifest.at("captures")) {
    const auto mask_name = cap.at("mask").get<std::string>();
    const std::string id = cap.contains("id") ? cap.at("id").get<std::string>() : fs::path(mask_name).stem().string();
    const auto& items = cap.at("items");
    if (!items.is_array() || items.size() != 2) {
      throw Error(ErrorCode::ParseError, "capture '" + id + "' must list exactly two items");
    }
    const fs::path mask_path = masks / mask_name;
    const BinaryMask fg = read_mask_pgm(mask_path);
    SplitOutcome result =
        split_two(fg, {resolve_item(items[0]), resolve_item(items[1])}, min_area.value_or(default_min_area(fg)));
    if (const auto* labels = std::get_if<LabelMap>(&result)) write_pgm16(*labels, out / (id + "_labels.pgm"));
    outcomes.push_back({id, mask_path.string(), std::move(result)});
  }
  const auto queue = review_queue(outcomes);
  save_json(to_json(queue), out / "review_queue.json");
  if (!queue.empty()) warn(std::to_string(queue.size()) + " capture(s) need manual review");
}

}  // namespace segmeld::cli
