#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "segmeld/embed.hpp"
#include "segmeld/raster.hpp"

namespace segmeld {

struct LossConfig {
  double triplet_margin = 0.2;  // m
  double global_margin = 0.01;  // t
  double variance_weight = 1.0; // lambda, weight of the mean-separation hinge
  double alpha = 0.8;           // weight of the summed triplet losses

  void validate() const {
    if (!(triplet_margin > 0.0)) throw Error(ErrorCode::InvalidArgument, "triplet margin must be > 0");
    if (!(global_margin >= 0.0)) throw Error(ErrorCode::InvalidArgument, "global margin must be >= 0");
    if (!(variance_weight >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");
    if (!(alpha >= 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be >= 0");
  }
};

/// Anchor and positive share a class; the negative comes from another one.
template <typename Scalar>
struct Triplet {
  Vector<Scalar> anchor;
  Vector<Scalar> positive;
  Vector<Scalar> negative;
  ClassId anchor_class = 0;
  ClassId negative_class = 0;
};

/// Triplet of points already in embedding space.
template <typename Scalar>
struct EmbeddedTriplet {
  Vector<Scalar> anchor;
  Vector<Scalar> positive;
  Vector<Scalar> negative;
};

template <typename Scalar>
struct TripletGrad {
  Vector<Scalar> anchor;
  Vector<Scalar> positive;
  Vector<Scalar> negative;
};

// ---------------------------------------------------------------------------
// Embedding-space losses with gradients w.r.t. the embeddings.

template <typename Scalar>
struct TripletTerms {
  Scalar value = 0;
  /// Argument of the max: 1 - |a-n| / (|a-p| + m). The loss is active when > 0.
  Scalar slack = 0;
  TripletGrad<Scalar> grad;
};

/// Ratio triplet loss max(0, 1 - |a-n| / (|a-p| + m)). At the kink the zero
/// branch is taken; where a distance is zero its direction contributes zero.
template <typename Scalar>
TripletTerms<Scalar> triplet_loss_terms(const Vector<Scalar>& a, const Vector<Scalar>& p, const Vector<Scalar>& n,
                                        Scalar margin) {
  if (a.size() != p.size() || a.size() != n.size()) {
    throw Error(ErrorCode::DimensionMismatch, "triplet embeddings differ in dimension");
  }
  TripletTerms<Scalar> out;
  out.grad = {Vector<Scalar>::Zero(a.size()), Vector<Scalar>::Zero(a.size()), Vector<Scalar>::Zero(a.size())};
  const Vector<Scalar> ap = a - p;
  const Vector<Scalar> an = a - n;
  const Scalar dp = ap.norm();
  const Scalar dn = an.norm();
  const Scalar denom = dp + margin;
  out.slack = Scalar(1) - dn / denom;
  if (!(out.slack > Scalar(0))) return out;
  out.value = out.slack;

  const Scalar d_dn = -Scalar(1) / denom;
  const Scalar d_dp = dn / (denom * denom);
  if (dn > Scalar(0)) {
    const Vector<Scalar> u = an / dn;
    out.grad.anchor += d_dn * u;
    out.grad.negative -= d_dn * u;
  }
  if (dp > Scalar(0)) {
    const Vector<Scalar> u = ap / dp;
    out.grad.anchor += d_dp * u;
    out.grad.positive -= d_dp * u;
  }
  return out;
}

/// Batch moments of the scaled squared distances d+ = |a-p|^2/4 and
/// d- = |a-n|^2/4. Variances are population (1/N) moments.
template <typename Scalar>
struct BatchStats {
  std::vector<Scalar> d_plus;
  std::vector<Scalar> d_minus;
  Scalar mu_plus = 0;
  Scalar mu_minus = 0;
  Scalar var_plus = 0;
  Scalar var_minus = 0;
  std::size_t n = 0;
};

template <typename Scalar>
BatchStats<Scalar> batch_stats(std::vector<Scalar> d_plus, std::vector<Scalar> d_minus) {
  if (d_plus.empty() || d_plus.size() != d_minus.size()) {
    throw Error(ErrorCode::EmptyBatch, "batch must be non-empty with matching distance lists");
  }
  BatchStats<Scalar> s;
  s.n = d_plus.size();
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(s.n);
  for (std::size_t i = 0; i < s.n; ++i) {
    s.mu_plus += d_plus[i];
    s.mu_minus += d_minus[i];
  }
  s.mu_plus *= inv_n;
  s.mu_minus *= inv_n;
  for (std::size_t i = 0; i < s.n; ++i) {
    s.var_plus += (d_plus[i] - s.mu_plus) * (d_plus[i] - s.mu_plus);
    s.var_minus += (d_minus[i] - s.mu_minus) * (d_minus[i] - s.mu_minus);
  }
  s.var_plus *= inv_n;
  s.var_minus *= inv_n;
  s.d_plus = std::move(d_plus);
  s.d_minus = std::move(d_minus);
  return s;
}

/// (var+ + var-) + lambda * max(0, mu+ - mu- + t)
template <typename Scalar>
Scalar global_loss_value(const BatchStats<Scalar>& s, const LossConfig& cfg) {
  const Scalar hinge = s.mu_plus - s.mu_minus + static_cast<Scalar>(cfg.global_margin);
  return (s.var_plus + s.var_minus) + static_cast<Scalar>(cfg.variance_weight) * std::max(Scalar(0), hinge);
}

template <typename Scalar>
struct GlobalTerms {
  Scalar value = 0;
  /// mu+ - mu- + t. The hinge is active when > 0.
  Scalar hinge_arg = 0;
  BatchStats<Scalar> stats;
  std::vector<TripletGrad<Scalar>> grads;
};

template <typename Scalar>
GlobalTerms<Scalar> global_loss_terms(std::span<const EmbeddedTriplet<Scalar>> batch, const LossConfig& cfg) {
  if (batch.empty()) throw Error(ErrorCode::EmptyBatch, "global loss on empty batch");
  const std::size_t n = batch.size();
  std::vector<Scalar> dp(n), dn(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& b = batch[i];
    if (b.anchor.size() != b.positive.size() || b.anchor.size() != b.negative.size()) {
      throw Error(ErrorCode::DimensionMismatch, "triplet embeddings differ in dimension");
    }
    dp[i] = (b.anchor - b.positive).squaredNorm() / Scalar(4);
    dn[i] = (b.anchor - b.negative).squaredNorm() / Scalar(4);
  }
  GlobalTerms<Scalar> out;
  out.stats = batch_stats(std::move(dp), std::move(dn));
  out.value = global_loss_value(out.stats, cfg);
  out.hinge_arg = out.stats.mu_plus - out.stats.mu_minus + static_cast<Scalar>(cfg.global_margin);

  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(n);
  const Scalar hinge_slope = out.hinge_arg > Scalar(0) ? static_cast<Scalar>(cfg.variance_weight) * inv_n : Scalar(0);
  out.grads.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& b = batch[i];
    // dJ/dd_i for each distance, then dd/de = +-(a - x)/2.
    const Scalar g_plus = Scalar(2) * inv_n * (out.stats.d_plus[i] - out.stats.mu_plus) + hinge_slope;
    const Scalar g_minus = Scalar(2) * inv_n * (out.stats.d_minus[i] - out.stats.mu_minus) - hinge_slope;
    const Vector<Scalar> ap = (b.anchor - b.positive) / Scalar(2);
    const Vector<Scalar> an = (b.anchor - b.negative) / Scalar(2);
    out.grads.push_back({g_plus * ap + g_minus * an, -g_plus * ap, -g_minus * an});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Network-level losses: forward each triplet, combine embedding gradients,
// backpropagate in batch order.

template <typename Scalar>
struct LossAndGradient {
  Scalar value = 0;
  NetGradient<Scalar> gradient;
};

template <typename Scalar>
struct CombinedLoss {
  Scalar value = 0;
  Scalar global = 0;
  Scalar triplet_sum = 0;
  NetGradient<Scalar> gradient;
};

namespace detail {

template <typename Scalar>
struct TracedTriplet {
  ForwardTrace<Scalar> anchor, positive, negative;
  EmbeddedTriplet<Scalar> embedded() const { return {anchor.output, positive.output, negative.output}; }
};

template <typename Scalar>
std::vector<TracedTriplet<Scalar>> trace_batch(const EmbeddingNet<Scalar>& net,
                                               std::span<const Triplet<Scalar>> batch) {
  std::vector<TracedTriplet<Scalar>> out;
  out.reserve(batch.size());
  for (const auto& t : batch) {
    out.push_back({forward_trace(net, t.anchor), forward_trace(net, t.positive), forward_trace(net, t.negative)});
  }
  return out;
}

template <typename Scalar>
void backward_triplet(const EmbeddingNet<Scalar>& net, const TracedTriplet<Scalar>& tr, const TripletGrad<Scalar>& g,
                      NetGradient<Scalar>& acc) {
  backward(net, tr.anchor, g.anchor, acc);
  backward(net, tr.positive, g.positive, acc);
  backward(net, tr.negative, g.negative, acc);
}

}  // namespace detail

template <typename Scalar>
LossAndGradient<Scalar> triplet_loss(const EmbeddingNet<Scalar>& net, const Triplet<Scalar>& trip, Scalar margin) {
  if (!(margin > Scalar(0))) throw Error(ErrorCode::InvalidArgument, "triplet margin must be > 0");
  const detail::TracedTriplet<Scalar> tr{forward_trace(net, trip.anchor), forward_trace(net, trip.positive),
                                         forward_trace(net, trip.negative)};
  const auto terms = triplet_loss_terms(tr.anchor.output, tr.positive.output, tr.negative.output, margin);
  LossAndGradient<Scalar> out{terms.value, NetGradient<Scalar>::zeros_like(net)};
  if (terms.value > Scalar(0)) detail::backward_triplet(net, tr, terms.grad, out.gradient);
  return out;
}

template <typename Scalar>
LossAndGradient<Scalar> global_loss(const EmbeddingNet<Scalar>& net, std::span<const Triplet<Scalar>> batch,
                                    const LossConfig& cfg) {
  if (batch.empty()) throw Error(ErrorCode::EmptyBatch, "global loss on empty batch");
  const auto traced = detail::trace_batch(net, batch);
  std::vector<EmbeddedTriplet<Scalar>> emb;
  emb.reserve(traced.size());
  for (const auto& t : traced) emb.push_back(t.embedded());
  const auto terms = global_loss_terms<Scalar>(emb, cfg);
  LossAndGradient<Scalar> out{terms.value, NetGradient<Scalar>::zeros_like(net)};
  for (std::size_t i = 0; i < traced.size(); ++i) detail::backward_triplet(net, traced[i], terms.grads[i], out.gradient);
  return out;
}

/// Global loss plus alpha times the summed triplet losses of the batch.
template <typename Scalar>
CombinedLoss<Scalar> combined_loss(const EmbeddingNet<Scalar>& net, std::span<const Triplet<Scalar>> batch,
                                   const LossConfig& cfg) {
  if (batch.empty()) throw Error(ErrorCode::EmptyBatch, "combined loss on empty batch");
  cfg.validate();
  const auto traced = detail::trace_batch(net, batch);
  std::vector<EmbeddedTriplet<Scalar>> emb;
  emb.reserve(traced.size());
  for (const auto& t : traced) emb.push_back(t.embedded());
  const auto global = global_loss_terms<Scalar>(emb, cfg);
  const auto alpha = static_cast<Scalar>(cfg.alpha);
  const auto margin = static_cast<Scalar>(cfg.triplet_margin);

  CombinedLoss<Scalar> out;
  out.global = global.value;
  out.gradient = NetGradient<Scalar>::zeros_like(net);
  for (std::size_t i = 0; i < traced.size(); ++i) {
    const auto trip = triplet_loss_terms(emb[i].anchor, emb[i].positive, emb[i].negative, margin);
    out.triplet_sum += trip.value;
    TripletGrad<Scalar> g = global.grads[i];
    if (trip.value > Scalar(0)) {
      g.anchor += alpha * trip.grad.anchor;
      g.positive += alpha * trip.grad.positive;
      g.negative += alpha * trip.grad.negative;
    }
    detail::backward_triplet(net, traced[i], g, out.gradient);
  }
  out.value = out.global + alpha * out.triplet_sum;
  return out;
}

}  // namespace segmeld
