#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "segmeld/raster.hpp"
#include "segmeld/registry.hpp"

namespace segmeld {

using Rgb = std::array<std::uint8_t, 3>;

enum class ShapeKind { Rectangle, Ellipse };

/// Parameters of the synthetic tote-scene generator.
struct SceneSpec {
  std::uint64_t seed = 0;
  int width = 96;
  int height = 96;
  int min_items = 1;
  int max_items = 4;
  std::vector<ShapeKind> shapes{ShapeKind::Rectangle, ShapeKind::Ellipse};
  /// Base colour per class. Classes without an entry get a hue-wheel colour.
  std::map<ClassId, Rgb> colors;
  Rgb background{40, 40, 40};
  /// Perturbation amplitude as a fraction of full scale, applied to colour
  /// samples and to the boundary map.
  double noise = 0.0;
  bool allow_occlusion = false;
  /// Item extent range as a fraction of the shorter image side.
  double min_extent = 0.15;
  double max_extent = 0.4;
  /// Placement attempts per item before InfeasiblePlacement.
  int max_attempts = 200;

  /// InvalidArgument on an empty item range, negative noise, and so on.
  void validate() const;
};

struct Scene {
  ColorImage image;
  LabelMap labels;
  BoundaryMap boundary;
  ClassSet present;
  int item_count = 0;
};

/// Hue-wheel colour for the index-th of `count` classes.
Rgb wheel_color(std::size_t index, std::size_t count);

/// Colour used for class `id` under `spec` and `registry`.
Rgb class_color(const SceneSpec& spec, const ClassRegistry& registry, ClassId id);

/// Draws shapes in registry classes onto a uniform background. Labels are
/// exact; the boundary map is 1 on label discontinuities and 0 elsewhere
/// before noise. Deterministic in spec.seed.
Scene generate_scene(const SceneSpec& spec, const ClassRegistry& registry);

}  // namespace segmeld
