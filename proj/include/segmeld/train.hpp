#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "segmeld/descriptor.hpp"
#include "segmeld/embed.hpp"
#include "segmeld/losses.hpp"

namespace segmeld {

struct PatchSample {
  PatchDescriptor descriptor;
  ClassId label = 0;
};

/// Labelled descriptors with a class -> member-position index.
class PatchDataset {
 public:
  /// DimensionMismatch if the descriptor length differs from earlier samples.
  void add(PatchDescriptor descriptor, ClassId label);

  /// One descriptor per nonzero class of `labels`, in class-id order.
  void add_labelled_image(const ColorImage& image, const LabelMap& labels);

  const std::vector<PatchSample>& samples() const { return samples_; }
  const std::map<ClassId, std::vector<std::size_t>>& members() const { return members_; }
  int dim() const { return samples_.empty() ? 0 : static_cast<int>(samples_.front().descriptor.size()); }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

 private:
  std::vector<PatchSample> samples_;
  std::map<ClassId, std::vector<std::size_t>> members_;
};

/// Uniform sampling: anchor class uniform over classes with >= 2 members,
/// anchor and positive distinct members, negative class uniform over the
/// remaining classes, negative member uniform. Deterministic in seed.
/// InsufficientClasses with < 2 classes; InsufficientMembers when no class
/// has two members.
std::vector<Triplet<double>> sample_triplets(const PatchDataset& ds, std::size_t count, std::uint64_t seed);

struct TrainConfig {
  int epochs = 20;
  std::size_t triplet_budget = 8000;
  std::size_t batch_size = 64;
  double learning_rate = 0.1;
  int halving_period = 3;
  double weight_decay = 0.0005;
  /// Learning-rate multiplier of the last layer.
  double last_layer_lr_multiplier = 10.0;
  std::uint64_t seed = 1;
  LossConfig loss;
  /// When false the loss gradient is dropped and only weight decay acts.
  bool apply_loss_gradient = true;

  void validate() const;
};

/// eta0 * 2^-floor(epoch / period), epoch 0-based.
double learning_rate_at(const TrainConfig& cfg, int epoch);

struct TrainResult {
  EmbeddingNet<double> net;
  /// Mean combined loss over the batches of each epoch.
  std::vector<double> loss_trace;
};

/// Plain SGD on the combined loss: p <- p - eta_l * (grad + decay * p).
/// Triplets are drawn once from the budget and reshuffled every epoch.
/// NonFiniteLoss aborts with the epoch and batch that diverged.
TrainResult train(EmbeddingNet<double> net, const PatchDataset& ds, const TrainConfig& cfg);

struct Separation {
  double intra = 0;  // mean embedding distance over same-class pairs
  double inter = 0;  // mean embedding distance over different-class pairs
};

Separation embedding_separation(const EmbeddingNet<double>& net, const PatchDataset& ds);

}  // namespace segmeld
