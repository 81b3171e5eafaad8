#include "hgr/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "hgr/config.hpp"
#include "hgr/dataset.hpp"
#include "hgr/evaluation.hpp"
#include "hgr/model_io.hpp"
#include "hgr/pgm.hpp"
#include "hgr/synth.hpp"
#include "hgr/train.hpp"

namespace hgr::cli {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// option plumbing: every flag funnels through apply_config_value so the file
// and the command line share one validation path, with flags taking precedence

struct OptionSet {
  std::vector<std::pair<std::string, CLI::Option*>> bound;
  std::vector<std::shared_ptr<std::string>> storage;
  std::string config_path;
  bool print_config = false;

  void bind(CLI::App* cmd, const std::string& flag, const std::string& key,
            const std::string& help) {
    auto value = std::make_shared<std::string>();
    storage.push_back(value);
    bound.emplace_back(key, cmd->add_option(flag, *value, help));
  }

  void bind_flag(CLI::App* cmd, const std::string& flag, const std::string& key,
                 const std::string& help) {
    bound.emplace_back(key, cmd->add_flag(flag, help));
  }

  void add_common(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "config file (key = value lines)");
    bind(cmd, "--seed", "seed", "RNG seed (mandatory where randomness is used)");
    bind(cmd, "--threads", "threads", "worker threads; results are thread-count invariant");
    bind(cmd, "--out", "out", "output path");
    cmd->add_flag("--print-config", print_config, "print the effective config and exit");
  }

  RunConfig resolve() const {
    RunConfig config;
    if (!config_path.empty()) load_config_file(config, config_path);
    std::size_t value_i = 0;
    for (const auto& [key, opt] : bound) {
      const bool is_flag = opt->get_expected_min() == 0;
      if (opt->count() > 0)
        apply_config_value(config, key, is_flag ? "true" : *storage[value_i]);
      if (!is_flag) ++value_i;
    }
    return config;
  }
};

void require_seed(const RunConfig& config) {
  require(config.has_seed,
          "a seed is mandatory (set 'seed' in the config file or pass --seed)");
}

int effective_threads(const RunConfig& config) { return std::max(1, config.threads); }

// ---------------------------------------------------------------------------
// shared pipeline steps

LoadedDataset load_dataset_from_config(const RunConfig& config) {
  require(!config.dataset.empty(), "no dataset given (config key 'dataset' or --dataset)");
  const auto samples = load_manifest(config.dataset);
  require(!samples.empty(), "dataset manifest is empty");
  SegmentationParams params{config.depth_alpha};
  return load_dataset(samples, params, effective_threads(config), config.max_samples);
}

std::vector<std::size_t> all_indices(const LoadedDataset& ds) {
  std::vector<std::size_t> idx(ds.samples.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return idx;
}

TrainConfig train_config_of(const RunConfig& config) {
  TrainConfig tc;
  tc.seed = config.seed;
  tc.epochs = config.epochs;
  tc.lr = static_cast<float>(config.lr);
  tc.momentum = static_cast<float>(config.momentum);
  tc.batch_size = config.batch;
  tc.xnor_grad_correction = config.xnor_grad_correction;
  return tc;
}

void write_train_log(const std::filesystem::path& path, const TrainLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("train: cannot write log " + path.string());
  out << "seed " << log.seed << "\n";
  char line[96];
  for (std::size_t e = 0; e < log.epochs.size(); ++e) {
    std::snprintf(line, sizeof line, "epoch %zu loss %.6f acc %.6f\n", e + 1,
                  log.epochs[e].mean_loss, log.epochs[e].accuracy);
    out << line;
  }
}

// model memory accounting used by binarize and bench
struct ModelBytes {
  Index float_weight_bytes;
  Index packed_bits_bytes;
  Index scale_bytes;
  double full_ratio() const {
    return static_cast<double>(float_weight_bytes) /
           static_cast<double>(packed_bits_bytes + scale_bytes);
  }
};

ModelBytes model_bytes(const Network<float>& net, const BinarizedModel& model) {
  return {net.weight_count() * static_cast<Index>(sizeof(float)),
          model.packed_weight_bytes(), model.scale_bytes()};
}

// ---------------------------------------------------------------------------
// report assembly

json matrix_json(const ConfusionMatrix& cm) {
  json counts = json::array();
  json percent = json::array();
  const auto pct = cm.row_percent();
  for (int i = 0; i < kNumGestures; ++i) {
    json crow = json::array(), prow = json::array();
    for (int j = 0; j < kNumGestures; ++j) {
      crow.push_back(cm.counts(i, j));
      prow.push_back(pct(i, j));
    }
    counts.push_back(crow);
    percent.push_back(prow);
  }
  const auto stats = summary_stats(cm);
  return json{{"counts", counts},
              {"percent", percent},
              {"mean_accuracy", stats.mean_accuracy},
              {"min_accuracy", stats.min_accuracy},
              {"variance", stats.variance}};
}

json cv_json(const CrossValidationResult& cv) {
  json folds = json::array();
  for (const auto& f : cv.folds) {
    json fj{{"test_persons", f.test_persons}, {"failed", f.failed}};
    if (f.failed)
      fj["failure"] = f.failure;
    else
      fj.update(matrix_json(f.matrix));
    folds.push_back(fj);
  }
  return json{{"folds", folds}, {"merged", matrix_json(cv.merged)}};
}

void print_matrix(const ConfusionMatrix& cm, const std::string& title) {
  std::printf("%s\n", title.c_str());
  const auto pct = cm.row_percent();
  std::printf("      ");
  for (int j = 0; j < kNumGestures; ++j) std::printf("  G%-2d", j + 1);
  std::printf("\n");
  for (int i = 0; i < kNumGestures; ++i) {
    std::printf("  G%-2d ", i + 1);
    for (int j = 0; j < kNumGestures; ++j) {
      if (pct(i, j) == 0 && cm.counts(i, j) == 0)
        std::printf("    .");
      else
        std::printf("  %3d", pct(i, j));
    }
    std::printf("\n");
  }
  const auto stats = summary_stats(cm);
  std::printf("  mean accuracy %.2f%%  min accuracy %.2f%%  variance %.2f\n",
              stats.mean_accuracy, stats.min_accuracy, stats.variance);
  std::printf("  (variance is the population variance of the 10 per-class accuracies)\n");
}

void print_cv(const CrossValidationResult& cv, const std::string& label) {
  for (std::size_t f = 0; f < cv.folds.size(); ++f) {
    const auto& fold = cv.folds[f];
    std::string persons;
    for (int p : fold.test_persons) persons += (persons.empty() ? "" : ",") + std::to_string(p);
    if (fold.failed) {
      std::printf("%s fold %zu (test persons %s): FAILED: %s\n", label.c_str(), f + 1,
                  persons.c_str(), fold.failure.c_str());
      continue;
    }
    print_matrix(fold.matrix,
                 label + " fold " + std::to_string(f + 1) + " (test persons " + persons + ")");
  }
  print_matrix(cv.merged, label + " merged over folds");
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write report " + path.string());
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// commands

int cmd_train(const RunConfig& config) {
  require_seed(config);
  require(config.mode == "float" || config.mode == "binarized",
          "train: mode must be float or binarized");
  const auto dataset = load_dataset_from_config(config);
  const auto idx = all_indices(dataset);
  const TrainConfig tc = train_config_of(config);

  const std::filesystem::path out =
      config.out.empty() ? std::filesystem::path(config.mode == "float" ? "model.hgm"
                                                                        : "model.hgb")
                         : config.out;
  TrainLog log;
  if (config.mode == "float") {
    const Network<float> net = train_float(dataset, idx, tc, &log);
    write_float_model(out, net);
    std::printf("wrote %s (%lld weights, %lld biases)\n", out.c_str(),
                static_cast<long long>(net.weight_count()),
                static_cast<long long>(net.bias_count()));
  } else {
    Network<float> net;
    const BinarizedModel model = train_binarized(dataset, idx, tc, &log, &net);
    write_binarized_model(out, model);
    const auto mb = model_bytes(net, model);
    std::printf("wrote %s (%lld kernels, weight payload %lld B + scales %lld B, "
                "%.1fx smaller than float)\n",
                out.c_str(), static_cast<long long>(model.kernel_total()),
                static_cast<long long>(mb.packed_bits_bytes),
                static_cast<long long>(mb.scale_bytes), mb.full_ratio());
  }
  const auto log_path = out.string() + ".log";
  write_train_log(log_path, log);
  if (!log.epochs.empty())
    std::printf("final epoch: loss %.6f, training accuracy %.2f%% (log: %s)\n",
                log.epochs.back().mean_loss, 100.0 * log.epochs.back().accuracy,
                log_path.c_str());
  return 0;
}

int cmd_eval(const RunConfig& config) {
  require_seed(config);
  const auto dataset = load_dataset_from_config(config);
  json report{{"command", "eval"},
              {"seed", config.seed},
              {"mode", config.mode},
              {"dataset", config.dataset.generic_string()},
              {"epochs", config.epochs},
              {"lr", config.lr},
              {"momentum", config.momentum},
              {"batch", config.batch},
              {"depth_alpha", config.depth_alpha}};

  if (!config.model.empty()) {
    // held-out evaluation of an existing model over the whole manifest
    std::ifstream probe(config.model, std::ios::binary);
    char magic[4] = {};
    probe.read(magic, 4);
    probe.close();
    ConfusionMatrix cm;
    if (std::string(magic, 4) == "HGRB") {
      const BinarizedModel model = read_binarized_model(config.model);
      cm = evaluate_samples(BinarizedClassifier(model), dataset, all_indices(dataset),
                            effective_threads(config));
    } else {
      const Network<float> net = read_float_model(config.model);
      cm = evaluate_samples(NetworkClassifier(net), dataset, all_indices(dataset),
                            effective_threads(config));
    }
    print_matrix(cm, "held-out evaluation of " + config.model.string());
    report["heldout"] = matrix_json(cm);
    report["model"] = config.model.generic_string();
  } else {
    const FoldPlan plan = make_folds(dataset.person_ids(), config.seed);
    const TrainConfig tc = train_config_of(config);
    const int threads = effective_threads(config);

    if (config.mode == "float" || config.mode == "both") {
      const auto cv = run_cross_validation(dataset, plan, tc, TrainMode::Float, threads);
      print_cv(cv, "float");
      report["float"] = cv_json(cv);
    }
    if (config.mode == "binarized" || config.mode == "both") {
      const auto cv =
          run_cross_validation(dataset, plan, tc, TrainMode::Binarized, threads);
      print_cv(cv, "binarized");
      report["binarized"] = cv_json(cv);
    }
    if (config.mode == "both") {
      const double gap = report["float"]["merged"]["mean_accuracy"].get<double>() -
                         report["binarized"]["merged"]["mean_accuracy"].get<double>();
      report["gap_mean_accuracy"] = gap;
      std::printf("float-to-binarized mean accuracy gap: %.2f points\n", gap);
    }
  }

  const auto out = config.out.empty() ? std::filesystem::path("report.json") : config.out;
  write_json(out, report);
  std::printf("report written to %s\n", out.c_str());
  return 0;
}

int cmd_binarize(const RunConfig& config, const std::string& model_path) {
  const Network<float> net = read_float_model(model_path);
  const BinarizedModel model = binarize_model(net);
  const auto out = config.out.empty()
                       ? std::filesystem::path(model_path).replace_extension(".hgb")
                       : config.out;
  write_binarized_model(out, model);
  const auto mb = model_bytes(net, model);
  std::printf("%s -> %s\n", model_path.c_str(), out.c_str());
  std::printf("float weights %lld B; sign bits %lld B + scales %lld B; ratio %.1fx "
              "(weight bits alone: 32x)\n",
              static_cast<long long>(mb.float_weight_bytes),
              static_cast<long long>(mb.packed_bits_bytes),
              static_cast<long long>(mb.scale_bytes), mb.full_ratio());
  return 0;
}

int cmd_infer(const RunConfig& config, const std::string& depth_path) {
  require(!config.model.empty(), "infer: --model is required");
  const DepthMap depth = read_depth_pgm(depth_path);
  const BinaryMask full = segment_hand_full(depth, SegmentationParams{config.depth_alpha});
  const auto rotations = augment_rotations(full);
  std::array<BinaryMask, 9> masks;
  for (std::size_t r = 0; r < rotations.size(); ++r)
    masks[r] = resize_mask(rotations[r], 50, 50);

  std::ifstream probe(config.model, std::ios::binary);
  char magic[4] = {};
  probe.read(magic, 4);
  probe.close();

  VoteResult vote;
  if (std::string(magic, 4) == "HGRB") {
    const BinarizedModel model = read_binarized_model(config.model);
    vote = vote_classify(BinarizedClassifier(model), masks);
  } else {
    const Network<float> net = read_float_model(config.model);
    vote = vote_classify(NetworkClassifier(net), masks);
  }

  std::printf("class %d\n", vote.cls);
  std::printf("probabilities (mean over 9 rotations):\n");
  for (int c = 0; c < kNumGestures; ++c)
    std::printf("  G%-2d %.6f\n", c + 1, vote.summed_probabilities[c] / 9.f);
  return 0;
}

int cmd_segment(const RunConfig& config, const std::string& depth_path,
                const std::string& format, bool full_resolution) {
  const DepthMap depth = read_depth_pgm(depth_path);
  const SegmentationParams params{config.depth_alpha};
  const BinaryMask mask =
      full_resolution ? segment_hand_full(depth, params) : segment_hand(depth, params);
  const auto out = config.out.empty()
                       ? std::filesystem::path(depth_path).replace_extension(
                             format == "pbm" ? ".mask.pbm" : ".mask.pgm")
                       : config.out;
  if (format == "pbm")
    write_mask_pbm(out, mask);
  else
    write_mask_pgm(out, mask);
  std::printf("wrote %s (%lldx%lld, %lld foreground pixels)\n", out.c_str(),
              static_cast<long long>(mask.width), static_cast<long long>(mask.height),
              static_cast<long long>(mask.foreground_count()));
  return 0;
}

int cmd_synth(const RunConfig& config) {
  require_seed(config);
  require(!config.out.empty(), "synth: --out directory is required");
  SynthConfig sc;
  sc.classes = config.classes;
  sc.persons = config.persons;
  sc.repetitions = config.repetitions;
  sc.image_h = config.image_h;
  sc.image_w = config.image_w;
  sc.out_dir = config.out;
  const auto samples = synth_generate(sc, config.seed, effective_threads(config));
  std::printf("wrote %zu depth maps and %s\n", samples.size(),
              (config.out / "dataset.csv").c_str());
  return 0;
}

int cmd_bench(const RunConfig& config, int repetitions) {
  require_seed(config);
  require(repetitions >= 100, "bench: need at least 100 repetitions");
  Rng rng(derive_seed(config.seed, 0xbe7c));

  // correctness gate before any timing
  for (int trial = 0; trial < 200; ++trial) {
    const Index kh = rng.range(1, 3), kw = rng.range(1, 3), c = rng.range(1, 8);
    const Index h = kh + rng.range(0, 6), w = kw + rng.range(0, 6);
    Tensor<float> in(h, w, c, 1);
    for (Index i = 0; i < in.size(); ++i)
      in.data()[i] = static_cast<float>(rng.uniform(-1, 1));
    VecX<float> kvec(kh * kw * c);
    for (Index i = 0; i < kvec.size(); ++i)
      kvec[i] = static_cast<float>(rng.uniform(-1, 1));
    const auto bk = binarize_kernel(kvec);
    Tensor<float> mat(kh, kw, c, 1);
    materialize_kernel(bk, mat.data());
    VecX<float> bias(1);
    bias[0] = static_cast<float>(rng.uniform(-1, 1));
    const auto got = binarized_conv_forward(in, bk, kh, kw, bias[0]);
    const auto want = conv2d_forward(in, mat, bias);
    if ((got.vec() - want.vec()).cwiseAbs().maxCoeff() >= 1e-5f)
      throw Error("bench: correctness precheck failed");
  }
  std::printf("correctness precheck passed (200 cases, tolerance 1e-5)\n");

  struct Shape {
    const char* name;
    Index in_h, in_w, in_c, kernels, kh, kw;
  };
  const Shape shapes[] = {{"conv1 50x50x1 * 50@5x5", 50, 50, 1, 50, 5, 5},
                          {"conv2 23x23x50 * 20@3x3", 23, 23, 50, 20, 3, 3}};

  json layers = json::array();
  for (const auto& s : shapes) {
    Tensor<float> input(s.in_h, s.in_w, s.in_c, 1);
    for (Index i = 0; i < input.size(); ++i)
      input.data()[i] = static_cast<float>(rng.uniform(0, 1));
    Tensor<float> weights(s.kh, s.kw, s.in_c, s.kernels);
    for (Index i = 0; i < weights.size(); ++i)
      weights.data()[i] = static_cast<float>(rng.uniform(-0.5, 0.5));
    VecX<float> biases(s.kernels);
    for (Index i = 0; i < s.kernels; ++i)
      biases[i] = static_cast<float>(rng.uniform(-0.5, 0.5));

    std::vector<BinarizedKernel> kernels;
    for (Index k = 0; k < s.kernels; ++k)
      kernels.push_back(binarize_kernel(weights.slice(k), weights.slice_size()));

    auto time_median = [&](auto&& fn) {
      std::vector<double> times;
      times.reserve(static_cast<std::size_t>(repetitions));
      for (int r = 0; r < repetitions; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
      }
      std::sort(times.begin(), times.end());
      return times[times.size() / 2];
    };

    volatile float sink = 0;
    const double t_float = time_median([&] {
      const auto out = conv2d_forward(input, weights, biases);
      sink = sink + out.data()[0];
    });
    const double t_bin = time_median([&] {
      const auto out = binarized_conv_layer_forward(input, kernels, s.kh, s.kw, biases);
      sink = sink + out.data()[0];
    });

    const double macs = static_cast<double>((s.in_h - s.kh + 1) * (s.in_w - s.kw + 1)) *
                        static_cast<double>(s.kernels) *
                        static_cast<double>(s.kh * s.kw * s.in_c);
    std::printf("%s: float %.3f ms (%.2f Gmac/s), binarized add/sub %.3f ms "
                "(%.2f Gmac/s), speedup %.2fx\n",
                s.name, 1e3 * t_float, macs / t_float / 1e9, 1e3 * t_bin,
                macs / t_bin / 1e9, t_float / t_bin);
    layers.push_back(json{{"layer", s.name},
                          {"float_ms", 1e3 * t_float},
                          {"binarized_ms", 1e3 * t_bin},
                          {"macs", macs},
                          {"float_mac_per_s", macs / t_float},
                          {"binarized_mac_per_s", macs / t_bin},
                          {"speedup", t_float / t_bin}});
  }

  const auto net = canonical_gesture_network<float>();
  const auto model = binarize_model(net);
  const auto mb = model_bytes(net, model);
  std::printf("canonical model memory: float weights %lld B, binarized %lld B bits + "
              "%lld B scales, ratio %.1fx (weight bits alone: 32x)\n",
              static_cast<long long>(mb.float_weight_bytes),
              static_cast<long long>(mb.packed_bits_bytes),
              static_cast<long long>(mb.scale_bytes), mb.full_ratio());

  if (!config.out.empty()) {
    write_json(config.out, json{{"command", "bench"},
                                {"seed", config.seed},
                                {"repetitions", repetitions},
                                {"layers", layers},
                                {"memory_ratio", mb.full_ratio()},
                                {"weight_bit_ratio", 32.0}});
    std::printf("report written to %s\n", config.out.c_str());
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"depth-based hand gesture recognition with binarized-weight deployment"};
  app.require_subcommand(1);

  int exit_code = 0;

  // train
  auto* train = app.add_subcommand("train", "train a model on a dataset manifest");
  OptionSet train_opts;
  train_opts.add_common(train);
  train_opts.bind(train, "--dataset", "dataset", "dataset manifest csv");
  train_opts.bind(train, "--mode", "mode", "float | binarized");
  train_opts.bind(train, "--epochs", "epochs", "training epochs");
  train_opts.bind(train, "--lr", "lr", "learning rate");
  train_opts.bind(train, "--momentum", "momentum", "SGD momentum");
  train_opts.bind(train, "--batch", "batch", "mini-batch size");
  train_opts.bind(train, "--depth-alpha", "depth_alpha", "segmentation depth tolerance");
  train_opts.bind(train, "--max-samples", "max_samples", "truncate the dataset (0 = all)");
  train_opts.bind_flag(train, "--xnor-grad-correction", "xnor_grad_correction",
                       "enable the alpha chain-rule gradient term");
  train->callback([&] {
    const RunConfig config = train_opts.resolve();
    if (train_opts.print_config) {
      std::fputs(format_config(config).c_str(), stdout);
      return;
    }
    exit_code = cmd_train(config);
  });

  // eval
  auto* eval = app.add_subcommand("eval", "cross-validate or evaluate a trained model");
  OptionSet eval_opts;
  eval_opts.add_common(eval);
  eval_opts.bind(eval, "--dataset", "dataset", "dataset manifest csv");
  eval_opts.bind(eval, "--mode", "mode", "float | binarized | both");
  eval_opts.bind(eval, "--model", "model", "evaluate this model instead of running CV");
  eval_opts.bind(eval, "--epochs", "epochs", "training epochs per fold");
  eval_opts.bind(eval, "--lr", "lr", "learning rate");
  eval_opts.bind(eval, "--momentum", "momentum", "SGD momentum");
  eval_opts.bind(eval, "--batch", "batch", "mini-batch size");
  eval_opts.bind(eval, "--depth-alpha", "depth_alpha", "segmentation depth tolerance");
  eval_opts.bind(eval, "--max-samples", "max_samples", "truncate the dataset (0 = all)");
  eval_opts.bind_flag(eval, "--xnor-grad-correction", "xnor_grad_correction",
                      "enable the alpha chain-rule gradient term");
  eval->callback([&] {
    const RunConfig config = eval_opts.resolve();
    if (eval_opts.print_config) {
      std::fputs(format_config(config).c_str(), stdout);
      return;
    }
    exit_code = cmd_eval(config);
  });

  // binarize
  auto* binarize = app.add_subcommand("binarize", "convert a float model to sign bits + scales");
  OptionSet binarize_opts;
  binarize_opts.add_common(binarize);
  std::string binarize_model_path;
  binarize->add_option("model", binarize_model_path, "input .hgm model")->required();
  binarize->callback([&] {
    const RunConfig config = binarize_opts.resolve();
    if (binarize_opts.print_config) {
      std::fputs(format_config(config).c_str(), stdout);
      return;
    }
    exit_code = cmd_binarize(config, binarize_model_path);
  });

  // infer
  auto* infer = app.add_subcommand("infer", "classify one depth frame");
  OptionSet infer_opts;
  infer_opts.add_common(infer);
  infer_opts.bind(infer, "--model", "model", "trained .hgm or .hgb model");
  infer_opts.bind(infer, "--depth-alpha", "depth_alpha", "segmentation depth tolerance");
  std::string infer_depth;
  infer->add_option("depth", infer_depth, "input depth map (.pgm)")->required();
  infer->callback([&] {
    const RunConfig config = infer_opts.resolve();
    if (infer_opts.print_config) {
      std::fputs(format_config(config).c_str(), stdout);
      return;
    }
    exit_code = cmd_infer(config, infer_depth);
  });

  // segment
  auto* segment = app.add_subcommand("segment", "segment one depth frame into a hand mask");
  OptionSet segment_opts;
  segment_opts.add_common(segment);
  segment_opts.bind(segment, "--depth-alpha", "depth_alpha", "segmentation depth tolerance");
  std::string segment_depth, segment_format = "pgm";
  bool segment_full = false;
  segment->add_option("depth", segment_depth, "input depth map (.pgm)")->required();
  segment->add_option("--format", segment_format, "pgm | pbm")
      ->check(CLI::IsMember({"pgm", "pbm"}));
  segment->add_flag("--full", segment_full, "write the pre-resize full-resolution mask");
  segment->callback([&] {
    const RunConfig config = segment_opts.resolve();
    if (segment_opts.print_config) {
      std::fputs(format_config(config).c_str(), stdout);
      return;
    }
    exit_code = cmd_segment(config, segment_depth, segment_format, segment_full);
  });

  // synth
  auto* synth = app.add_subcommand("synth", "generate the synthetic gesture dataset");
  OptionSet synth_opts;
  synth_opts.add_common(synth);
  synth_opts.bind(synth, "--classes", "classes", "gesture classes (1..10)");
  synth_opts.bind(synth, "--persons", "persons", "person count");
  synth_opts.bind(synth, "--repetitions", "repetitions", "repetitions per person/gesture");
  synth_opts.bind(synth, "--image-h", "image_h", "frame height");
  synth_opts.bind(synth, "--image-w", "image_w", "frame width");
  synth->callback([&] {
    const RunConfig config = synth_opts.resolve();
    if (synth_opts.print_config) {
      std::fputs(format_config(config).c_str(), stdout);
      return;
    }
    exit_code = cmd_synth(config);
  });

  // bench
  auto* bench = app.add_subcommand("bench", "float vs binarized convolution benchmark");
  OptionSet bench_opts;
  bench_opts.add_common(bench);
  int bench_reps = 100;
  bench->add_option("--repetitions", bench_reps, "timing repetitions (>= 100)");
  bench->callback([&] {
    const RunConfig config = bench_opts.resolve();
    if (bench_opts.print_config) {
      std::fputs(format_config(config).c_str(), stdout);
      return;
    }
    exit_code = cmd_bench(config, bench_reps);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("hgr");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace hgr::cli
