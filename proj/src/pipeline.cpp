#include "segmeld/pipeline.hpp"

#include "segmeld/descriptor.hpp"
#include "segmeld/parallel.hpp"

namespace segmeld {

SegmentResult segment_image(const EmbeddingNet<double>& net, const Gallery& gallery, const ColorImage& image,
                            const BoundaryMap& boundary, const SegmentOptions& opts) {
  if (boundary.rows() != image.height || boundary.cols() != image.width) {
    throw Error(ErrorCode::DimensionMismatch, "boundary map does not match image");
  }
  std::vector<RegionProposal> proposals = extract_proposals(boundary, opts.hierarchy);
  std::vector<LabelledProposal> labelled(proposals.size());
  parallel_for(proposals.size(), [&](std::size_t i) {
    const auto query = forward(net, describe_patch(image, proposals[i].mask));
    labelled[i].mask = std::move(proposals[i].mask);
    for (const auto& nb : gallery.classify(query, opts.k)) labelled[i].labels.push_back(nb.class_id);
  });
  const TallyGrid tally = segmeld::accumulate(image.width, image.height, labelled);
  SegmentResult out;
  out.proposal_count = labelled.size();
  out.labels = opts.expected ? fuse(tally, *opts.expected) : fuse_unfiltered(tally);
  return out;
}

std::size_t enroll_labelled_image(Gallery& gallery, const ColorImage& image, const LabelMap& labels,
                                  const EmbeddingNet<double>& net, std::size_t max_views) {
  std::map<ClassId, std::size_t> held;
  for (const auto& e : gallery.entries()) ++held[e.class_id];
  std::size_t added = 0;
  for (ClassId c : present_classes(labels)) {
    if (held[c] >= max_views) continue;
    gallery = enroll(std::move(gallery), image, class_mask(labels, c), c, net);
    ++held[c];
    ++added;
  }
  return added;
}

}  // namespace segmeld
