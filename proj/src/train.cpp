#include "segmeld/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace segmeld {

void PatchDataset::add(PatchDescriptor descriptor, ClassId label) {
  if (!samples_.empty() && descriptor.size() != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "descriptor length " + std::to_string(descriptor.size()) +
                                                  " differs from dataset dimension " + std::to_string(dim()));
  }
  if (!descriptor.allFinite()) throw Error(ErrorCode::InvalidArgument, "descriptor has non-finite entries");
  members_[label].push_back(samples_.size());
  samples_.push_back({std::move(descriptor), label});
}

void PatchDataset::add_labelled_image(const ColorImage& image, const LabelMap& labels) {
  for (ClassId c : present_classes(labels)) add(describe_patch(image, class_mask(labels, c)), c);
}

std::vector<Triplet<double>> sample_triplets(const PatchDataset& ds, std::size_t count, std::uint64_t seed) {
  const auto& members = ds.members();
  if (members.size() < 2) {
    throw Error(ErrorCode::InsufficientClasses, "need at least two classes, have " + std::to_string(members.size()));
  }
  std::vector<ClassId> classes;
  std::vector<ClassId> anchor_classes;
  for (const auto& [c, idx] : members) {
    classes.push_back(c);
    if (idx.size() >= 2) anchor_classes.push_back(c);
  }
  if (anchor_classes.empty()) throw Error(ErrorCode::InsufficientMembers, "no class has two members");

  Rng rng(seed);
  std::vector<Triplet<double>> out;
  out.reserve(count);
  const auto& samples = ds.samples();
  for (std::size_t i = 0; i < count; ++i) {
    const ClassId ac = anchor_classes[uniform_index(rng, anchor_classes.size())];
    const auto& am = members.at(ac);
    const std::size_t a = uniform_index(rng, am.size());
    std::size_t p = uniform_index(rng, am.size() - 1);
    if (p >= a) ++p;
    // Uniform over the other classes: draw from classes.size() - 1 slots.
    std::size_t nc_pos = uniform_index(rng, classes.size() - 1);
    const auto ac_pos = static_cast<std::size_t>(std::find(classes.begin(), classes.end(), ac) - classes.begin());
    if (nc_pos >= ac_pos) ++nc_pos;
    const ClassId nc = classes[nc_pos];
    const auto& nm = members.at(nc);
    const std::size_t n = nm[uniform_index(rng, nm.size())];
    out.push_back({samples[am[a]].descriptor, samples[am[p]].descriptor, samples[n].descriptor, ac, nc});
  }
  return out;
}

void TrainConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, "TrainConfig: " + what); };
  if (epochs < 0) bad("epochs must be >= 0");
  if (triplet_budget < 1) bad("triplet budget must be >= 1");
  if (batch_size < 1) bad("batch size must be >= 1");
  if (!(learning_rate > 0)) bad("learning rate must be > 0");
  if (halving_period < 1) bad("halving period must be >= 1");
  if (!(weight_decay >= 0)) bad("weight decay must be >= 0");
  if (!(last_layer_lr_multiplier > 0)) bad("last-layer multiplier must be > 0");
  loss.validate();
}

double learning_rate_at(const TrainConfig& cfg, int epoch) {
  return std::ldexp(cfg.learning_rate, -(epoch / cfg.halving_period));
}

TrainResult train(EmbeddingNet<double> net, const PatchDataset& ds, const TrainConfig& cfg) {
  cfg.validate();
  TrainResult result;
  if (cfg.epochs == 0) {
    result.net = std::move(net);
    return result;
  }
  if (ds.dim() != net.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "dataset dimension " + std::to_string(ds.dim()) +
                                                  " vs net input " + std::to_string(net.input_dim()));
  }

  const std::vector<Triplet<double>> triplets = sample_triplets(ds, cfg.triplet_budget, cfg.seed);
  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Triplet<double>> batch;
  batch.reserve(cfg.batch_size);
  const std::size_t last = net.depth() - 1;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double eta = learning_rate_at(cfg, epoch);
    shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      batch.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + cfg.batch_size); ++i) {
        batch.push_back(triplets[order[i]]);
      }
      CombinedLoss<double> loss = combined_loss<double>(net, batch, cfg.loss);
      if (!std::isfinite(loss.value) || !loss.gradient.all_finite()) {
        std::ostringstream os;
        os << "combined loss " << loss.value << " at epoch " << epoch << ", batch " << batches;
        throw Error(ErrorCode::NonFiniteLoss, os.str());
      }
      if (!cfg.apply_loss_gradient) loss.gradient = NetGradient<double>::zeros_like(net);
      auto& layers = net.layers();
      const auto& grads = loss.gradient.layers();
      for (std::size_t l = 0; l < layers.size(); ++l) {
        const double step = eta * (l == last ? cfg.last_layer_lr_multiplier : 1.0);
        layers[l].weights -= step * (grads[l].weights + cfg.weight_decay * layers[l].weights);
        layers[l].bias -= step * (grads[l].bias + cfg.weight_decay * layers[l].bias);
      }
      loss_sum += loss.value;
      ++batches;
    }
    result.loss_trace.push_back(loss_sum / static_cast<double>(batches));
  }
  result.net = std::move(net);
  return result;
}

Separation embedding_separation(const EmbeddingNet<double>& net, const PatchDataset& ds) {
  std::vector<Eigen::VectorXd> emb;
  emb.reserve(ds.size());
  for (const auto& s : ds.samples()) emb.push_back(forward(net, s.descriptor));
  double intra = 0, inter = 0;
  std::size_t n_intra = 0, n_inter = 0;
  const auto& samples = ds.samples();
  for (std::size_t i = 0; i < emb.size(); ++i) {
    for (std::size_t j = i + 1; j < emb.size(); ++j) {
      const double d = (emb[i] - emb[j]).norm();
      if (samples[i].label == samples[j].label) {
        intra += d;
        ++n_intra;
      } else {
        inter += d;
        ++n_inter;
      }
    }
  }
  return {n_intra ? intra / n_intra : 0.0, n_inter ? inter / n_inter : 0.0};
}

}  // namespace segmeld
