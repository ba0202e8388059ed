#include "segmeld/scene.hpp"

#include <algorithm>
#include <cmath>

#include "segmeld/random.hpp"

namespace segmeld {

void SceneSpec::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, "SceneSpec: " + what); };
  if (width < 1 || height < 1) bad("width and height must be >= 1");
  if (min_items < 0 || max_items < min_items) bad("item count range is empty");
  if (!(noise >= 0.0)) bad("noise must be >= 0");
  if (shapes.empty()) bad("shape palette is empty");
  if (!(min_extent > 0.0) || max_extent < min_extent || max_extent > 1.0) bad("extent range must satisfy 0 < min <= max <= 1");
  if (max_attempts < 1) bad("max_attempts must be >= 1");
}

Rgb wheel_color(std::size_t index, std::size_t count) {
  const double hue = 360.0 * static_cast<double>(index) / static_cast<double>(std::max<std::size_t>(count, 1));
  const double s = 0.85, v = 0.9;
  const double c = v * s;
  const double hp = hue / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = v - c;
  auto to8 = [m](double u) { return static_cast<std::uint8_t>(std::lround((u + m) * 255.0)); };
  return {to8(r), to8(g), to8(b)};
}

Rgb class_color(const SceneSpec& spec, const ClassRegistry& registry, ClassId id) {
  if (auto it = spec.colors.find(id); it != spec.colors.end()) return it->second;
  const auto& entries = registry.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].id == id) return wheel_color(i, entries.size());
  }
  throw Error(ErrorCode::UnknownClass, "class id " + std::to_string(id));
}

namespace {

struct Placement {
  ShapeKind kind;
  int x0, y0, w, h;

  bool covers(int x, int y) const {
    if (x < x0 || y < y0 || x >= x0 + w || y >= y0 + h) return false;
    if (kind == ShapeKind::Rectangle) return true;
    const double rx = w / 2.0, ry = h / 2.0;
    const double dx = (x + 0.5 - x0 - rx) / rx;
    const double dy = (y + 0.5 - y0 - ry) / ry;
    return dx * dx + dy * dy <= 1.0;
  }
};

}  // namespace

Scene generate_scene(const SceneSpec& spec, const ClassRegistry& registry) {
  spec.validate();
  if (registry.empty()) throw Error(ErrorCode::InvalidArgument, "generate_scene: empty registry");

  Rng rng(spec.seed);
  const int n_items = static_cast<int>(uniform_int(rng, spec.min_items, spec.max_items));
  const int side = std::min(spec.width, spec.height);
  const int min_ext = std::max(1, static_cast<int>(std::lround(spec.min_extent * side)));
  const int max_ext = std::max(min_ext, static_cast<int>(std::lround(spec.max_extent * side)));

  // Classes are dealt from a shuffled deck, reshuffled when exhausted, so a
  // scene repeats a class only when it holds more items than classes exist.
  std::vector<ClassId> deck;
  std::size_t deck_pos = 0;
  auto next_class = [&] {
    if (deck_pos == deck.size()) {
      deck.clear();
      for (const auto& e : registry.entries()) deck.push_back(e.id);
      shuffle(deck.begin(), deck.end(), rng);
      deck_pos = 0;
    }
    return deck[deck_pos++];
  };

  Scene scene;
  scene.labels = LabelMap::Zero(spec.height, spec.width);
  scene.item_count = n_items;

  for (int item = 0; item < n_items; ++item) {
    const ClassId cls = next_class();
    bool placed = false;
    for (int attempt = 0; attempt < spec.max_attempts && !placed; ++attempt) {
      Placement p;
      p.kind = spec.shapes[uniform_index(rng, spec.shapes.size())];
      p.w = std::min(spec.width, static_cast<int>(uniform_int(rng, min_ext, max_ext)));
      p.h = std::min(spec.height, static_cast<int>(uniform_int(rng, min_ext, max_ext)));
      p.x0 = static_cast<int>(uniform_int(rng, 0, spec.width - p.w));
      p.y0 = static_cast<int>(uniform_int(rng, 0, spec.height - p.h));

      bool covers_any = false;
      bool overlaps = false;
      for (int y = p.y0; y < p.y0 + p.h; ++y) {
        for (int x = p.x0; x < p.x0 + p.w; ++x) {
          if (!p.covers(x, y)) continue;
          covers_any = true;
          if (scene.labels(y, x) != 0) overlaps = true;
        }
      }
      if (!covers_any || (overlaps && !spec.allow_occlusion)) continue;

      for (int y = p.y0; y < p.y0 + p.h; ++y) {
        for (int x = p.x0; x < p.x0 + p.w; ++x) {
          if (p.covers(x, y)) scene.labels(y, x) = cls;
        }
      }
      placed = true;
    }
    if (!placed) {
      throw Error(ErrorCode::InfeasiblePlacement, "could not place item " + std::to_string(item + 1) + " of " +
                                                      std::to_string(n_items) + " without overlap");
    }
  }

  scene.present = present_classes(scene.labels);

  std::map<ClassId, Rgb> palette;
  for (ClassId id : scene.present) palette[id] = class_color(spec, registry, id);

  const double color_amp = spec.noise * 255.0;
  scene.image = ColorImage(spec.width, spec.height);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const ClassId c = scene.labels(y, x);
      const Rgb base = c == 0 ? spec.background : palette.at(c);
      for (int ch = 0; ch < 3; ++ch) {
        double v = base[ch];
        if (color_amp > 0.0) v += uniform_real(rng, -color_amp, color_amp);
        scene.image.at(x, y, ch) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }

  const BinaryMask edges = label_discontinuities(scene.labels);
  scene.boundary = edges.cast<double>();
  if (spec.noise > 0.0) {
    for (Eigen::Index i = 0; i < scene.boundary.size(); ++i) {
      const double jitter = uniform_real(rng, 0.0, spec.noise);
      double& b = scene.boundary.data()[i];
      b = std::clamp(edges.data()[i] ? b - jitter : b + jitter, 0.0, 1.0);
    }
  }
  return scene;
}

}  // namespace segmeld
