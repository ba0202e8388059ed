#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <string>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "segmeld/embed.hpp"
#include "segmeld/gallery.hpp"
#include "segmeld/losses.hpp"
#include "segmeld/random.hpp"
#include "segmeld/raster.hpp"
#include "segmeld/registry.hpp"
#include "segmeld/scene.hpp"
#include "segmeld/train.hpp"
#include "segmeld/vote.hpp"

#include <sys/wait.h>

// Independent reference implementations shared by the unit tests and the
// acceptance runner. Deliberately naive.
namespace segmeld::testing {

inline std::filesystem::path fixture_dir() { return SEGMELD_FIXTURE_DIR; }

/// Runs the CLI with `args`; stderr goes to `err` when given. Exit status.
inline int run_cli(const std::string& args, const std::filesystem::path& err = {}) {
  std::string cmd = std::string("\"") + SEGMELD_CLI + "\" " + args;
  cmd += err.empty() ? " 2>/dev/null" : " 2>\"" + err.string() + "\"";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Every regular file under `root`, keyed by relative path.
inline std::map<std::string, std::string> tree_bytes(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[std::filesystem::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

/// Boundary values drawn from a few levels so equal strengths are common.
inline BoundaryMap random_boundary(Rng& rng, int w, int h) {
  static const double levels[] = {0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
  BoundaryMap b(h, w);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = levels[uniform_index(rng, 7)];
  return b;
}

/// Region id per pixel by BFS, numbered in order of first pixel.
inline std::vector<int> flood_fill_regions(const BoundaryMap& b, double t) {
  const int h = static_cast<int>(b.rows()), w = static_cast<int>(b.cols());
  std::vector<int> region(static_cast<std::size_t>(w * h), -1);
  int next = 0;
  for (int start = 0; start < w * h; ++start) {
    if (region[start] >= 0) continue;
    std::deque<int> queue{start};
    region[start] = next;
    while (!queue.empty()) {
      const int p = queue.front();
      queue.pop_front();
      const int x = p % w, y = p / w;
      const int nx[] = {x - 1, x + 1, x, x};
      const int ny[] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
        const int q = ny[k] * w + nx[k];
        if (region[q] >= 0) continue;
        if (std::max(b(y, x), b(ny[k], nx[k])) < t) {
          region[q] = next;
          queue.push_back(q);
        }
      }
    }
    ++next;
  }
  return region;
}

/// Pixel-index sets of the flood-fill regions.
inline std::vector<std::vector<int>> flood_fill_sets(const BoundaryMap& b, double t) {
  const auto region = flood_fill_regions(b, t);
  const int n = region.empty() ? 0 : *std::max_element(region.begin(), region.end()) + 1;
  std::vector<std::vector<int>> sets(static_cast<std::size_t>(n));
  for (int p = 0; p < static_cast<int>(region.size()); ++p) sets[region[p]].push_back(p);
  return sets;
}

inline std::vector<int> mask_pixels(const BinaryMask& m) {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (m.data()[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

/// k-NN by sorting every entry on (distance, enrollment index).
inline std::vector<Neighbor> brute_knn(const Gallery& g, const EmbeddingVector& q, std::size_t k) {
  std::vector<Neighbor> all;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& e = g.entries()[i];
    double s = 0;
    for (Eigen::Index j = 0; j < q.size(); ++j) s += (q[j] - e.vector[j]) * (q[j] - e.vector[j]);
    all.push_back({e.class_id, std::sqrt(s), i});
  }
  std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
  });
  all.resize(k);
  return all;
}

/// Same entries in the same order; distances agree to rounding.
inline bool same_neighbors(const std::vector<Neighbor>& a, const std::vector<Neighbor>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].index != b[i].index || a[i].class_id != b[i].class_id) return false;
    if (std::abs(a[i].distance - b[i].distance) > 1e-12) return false;
  }
  return true;
}

/// Per-pixel recount of proposal votes, then filter and argmax.
inline LabelMap recount_fuse(const std::vector<LabelledProposal>& props, int w, int h,
                             const std::optional<ClassSet>& expected) {
  LabelMap out = LabelMap::Zero(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::map<ClassId, int> votes;
      for (const auto& p : props) {
        if (!p.mask(y, x)) continue;
        for (ClassId c : p.labels) {
          if (!expected || expected->count(c)) ++votes[c];
        }
      }
      int best = 0;
      for (const auto& [c, n] : votes) {
        if (n > best) {
          best = n;
          out(y, x) = c;
        }
      }
    }
  }
  return out;
}

inline Eigen::VectorXd random_unit(Rng& rng, int d) {
  Eigen::VectorXd v(d);
  do {
    for (int i = 0; i < d; ++i) v[i] = uniform_real(rng, -1.0, 1.0);
  } while (v.norm() < 1e-3);
  return v / v.norm();
}

inline Eigen::VectorXd random_vector(Rng& rng, int d, double scale = 1.0) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = uniform_real(rng, -scale, scale);
  return v;
}

/// Central finite differences of f over the flattened parameters.
inline Eigen::VectorXd fd_gradient(const EmbeddingNet<double>& net,
                                   const std::function<double(const EmbeddingNet<double>&)>& f,
                                   double step = 1e-5) {
  const Eigen::VectorXd theta = net.flatten();
  Eigen::VectorXd g(theta.size());
  EmbeddingNet<double> probe = net;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Eigen::VectorXd t = theta;
    t[i] += step;
    probe.assign(t);
    const double up = f(probe);
    t[i] -= 2 * step;
    probe.assign(t);
    const double down = f(probe);
    g[i] = (up - down) / (2 * step);
  }
  return g;
}

inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale < 1e-12 ? 0.0 : (a - b).norm() / scale;
}

/// Classes 1..n named c1.., coloured around the hue wheel.
inline ClassRegistry numbered_registry(int n) {
  ClassRegistry r;
  for (int i = 1; i <= n; ++i) r.add(i, "c" + std::to_string(i));
  return r;
}

/// Descriptors of single-item scenes, `per_class` per registry class.
inline PatchDataset separable_dataset(const ClassRegistry& registry, int per_class, std::uint64_t seed,
                                      double noise = 0.05) {
  PatchDataset ds;
  for (const auto& e : registry.entries()) {
    const ClassRegistry one{{e.id, e.name}};
    for (int v = 0; v < per_class; ++v) {
      SceneSpec spec;
      spec.seed = seed + 1000 * static_cast<std::uint64_t>(e.id) + static_cast<std::uint64_t>(v);
      spec.width = spec.height = 48;
      spec.min_items = spec.max_items = 1;
      spec.noise = noise;
      for (std::size_t i = 0; i < registry.size(); ++i) {
        spec.colors[registry.entries()[i].id] = wheel_color(i, registry.size());
      }
      const Scene s = generate_scene(spec, one);
      ds.add_labelled_image(s.image, s.labels);
    }
  }
  return ds;
}

struct GradientDraw {
  double triplet = 0;
  double global = 0;
  double combined = 0;
};

/// One random (net, batch) draw, redrawn until every hinge is at least
/// 1e-3 away from its kink. Relative errors of the three analytic gradients.
inline GradientDraw gradient_draw(Rng& rng) {
  const LossConfig cfg;
  for (;;) {
    const int depth = 1 + static_cast<int>(uniform_index(rng, 3));
    std::vector<int> dims{2 + static_cast<int>(uniform_index(rng, 5))};
    for (int l = 0; l < depth; ++l) dims.push_back(2 + static_cast<int>(uniform_index(rng, 7)));
    const auto net = EmbeddingNet<double>::glorot(dims, rng());
    std::vector<Triplet<double>> batch;
    const std::size_t n = 2 + uniform_index(rng, 5);
    for (std::size_t i = 0; i < n; ++i) {
      batch.push_back({random_vector(rng, dims.front()), random_vector(rng, dims.front()),
                       random_vector(rng, dims.front()), 1, 2});
    }
    std::vector<EmbeddedTriplet<double>> emb;
    bool near_kink = false;
    std::size_t most_active = 0;
    double best_slack = -1e300;
    for (const auto& t : batch) {
      const auto ta = forward_trace(net, t.anchor), tp = forward_trace(net, t.positive),
                 tn = forward_trace(net, t.negative);
      if (ta.pre_norm.norm() < 1e-3 || tp.pre_norm.norm() < 1e-3 || tn.pre_norm.norm() < 1e-3) near_kink = true;
      emb.push_back({ta.output, tp.output, tn.output});
      const auto terms = triplet_loss_terms(ta.output, tp.output, tn.output, cfg.triplet_margin);
      if (std::abs(terms.slack) <= 1e-3) near_kink = true;
      if (terms.slack > best_slack) {
        best_slack = terms.slack;
        most_active = emb.size() - 1;
      }
      if ((ta.output - tp.output).norm() < 1e-3) near_kink = true;
    }
    const auto g = global_loss_terms<double>(emb, cfg);
    if (std::abs(g.hinge_arg) <= 1e-3 || near_kink) continue;

    GradientDraw out;
    const auto& first = batch[most_active];
    const auto tl = triplet_loss(net, first, cfg.triplet_margin);
    out.triplet = relative_error(
        tl.gradient.flatten(),
        fd_gradient(net, [&](const EmbeddingNet<double>& m) { return triplet_loss(m, first, cfg.triplet_margin).value; }));
    const std::span<const Triplet<double>> view(batch);
    out.global = relative_error(global_loss(net, view, cfg).gradient.flatten(),
                                fd_gradient(net, [&](const EmbeddingNet<double>& m) { return global_loss(m, view, cfg).value; }));
    out.combined =
        relative_error(combined_loss(net, view, cfg).gradient.flatten(),
                       fd_gradient(net, [&](const EmbeddingNet<double>& m) { return combined_loss(m, view, cfg).value; }));
    return out;
  }
}

}  // namespace segmeld::testing
