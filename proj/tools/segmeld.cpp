#include <iostream>

#include "CLI11.hpp"

#include "commands.hpp"

using namespace segmeld::cli;

namespace {

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_out = true) {
  cmd->add_option("--config", f.config, "JSON config with a section per subcommand");
  cmd->add_option("--seed", f.seed, "RNG seed (overrides config)");
  cmd->add_option("--k", f.k, "neighbours per proposal (default 3)");
  cmd->add_option("--thresholds", f.thresholds, "comma-separated hierarchy levels in (0,1]");
  cmd->add_option("--expected", f.expected, "comma-separated class ids known to be present");
  auto* out = cmd->add_option("--out", f.out, "output path");
  if (needs_out) out->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"segmeld: region proposals, metric-learning embeddings and pixel voting for tote scenes"};
  app.require_subcommand(1);

  GenSynthArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synth", "generate synthetic scenes, ground truth and boundary maps");
  add_common(gen_cmd, gen.common);

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "train the embedding net on labelled images");
  add_common(train_cmd, tr.common);
  train_cmd->add_option("--data", tr.data, "directory of <stem>.ppm + <stem>_labels.pgm")->required();
  train_cmd->add_option("--loss-csv", tr.loss_csv, "per-epoch loss trace (default <out>_loss.csv)");

  EnrollArgs en;
  auto* enroll_cmd = app.add_subcommand("enroll", "build a k-NN gallery from capture images");
  add_common(enroll_cmd, en.common);
  enroll_cmd->add_option("--net", en.net, "network JSON")->required();
  enroll_cmd->add_option("--captures", en.captures, "directory of <stem>.ppm + <stem>_labels.pgm")->required();
  enroll_cmd->add_option("--views", en.views, "views kept per class (default 7)");

  SegmentArgs seg;
  auto* seg_cmd = app.add_subcommand("segment", "segment one image by proposal voting");
  add_common(seg_cmd, seg.common);
  seg_cmd->add_option("--net", seg.net, "network JSON")->required();
  seg_cmd->add_option("--gallery", seg.gallery, "gallery JSON")->required();
  seg_cmd->add_option("--image", seg.image, "P6 colour image")->required();
  seg_cmd->add_option("--boundary", seg.boundary, "16-bit P5 boundary map")->required();
  seg_cmd->add_option("--proposals-dir", seg.proposals_dir, "also export the proposals here");

  FuseScoresArgs fs_args;
  auto* fuse_cmd = app.add_subcommand("fuse-scores", "argmax over expected classes of external score maps");
  add_common(fuse_cmd, fs_args.common);
  fuse_cmd->add_option("--scores", fs_args.scores, "score-map directory with scores.json")->required();

  EvaluateArgs ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "precision/recall/F0.5/F1/IoU reports and curves");
  add_common(eval_cmd, ev.common);
  eval_cmd->add_option("--pred", ev.pred, "prediction directory")->required();
  eval_cmd->add_option("--gt", ev.gt, "ground-truth directory")->required();
  eval_cmd->add_option("--registry", ev.registry, "class registry JSON")->required();
  eval_cmd->add_option("--manifest", ev.manifests, "scene manifest(s) supplying item counts");
  eval_cmd->add_option("--appearances", ev.appearances, "JSON {class id: training appearances}");

  AnnotateArgs an;
  auto* ann_cmd = app.add_subcommand("annotate", "split two-item foreground masks into labelled segments");
  add_common(ann_cmd, an.common);
  ann_cmd->add_option("--masks", an.masks, "directory of foreground PGM masks")->required();
  ann_cmd->add_option("--manifest", an.manifest, "capture manifest JSON")->required();
  ann_cmd->add_option("--registry", an.registry, "registry for item names");
  ann_cmd->add_option("--min-area", an.min_area, "smallest kept component in pixels");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) run_gen_synth(gen);
    if (train_cmd->parsed()) run_train(tr);
    if (enroll_cmd->parsed()) run_enroll(en);
    if (seg_cmd->parsed()) run_segment(seg);
    if (fuse_cmd->parsed()) run_fuse_scores(fs_args);
    if (eval_cmd->parsed()) run_evaluate(ev);
    if (ann_cmd->parsed()) run_annotate(an);
  } catch (const std::exception& e) {
    std::cerr << "segmeld: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
