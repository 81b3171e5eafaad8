#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "hgr/tensor.hpp"

namespace hgr {

// Run configuration shared by the CLI commands. File format: flat
// "key = value" lines, UTF-8, '#' comments; command-line flags override file
// values. Seeds are mandatory for commands that consume randomness.
struct RunConfig {
  std::filesystem::path dataset;
  std::filesystem::path out;
  std::filesystem::path model;

  bool has_seed = false;
  std::uint64_t seed = 0;

  int epochs = 30;
  double lr = 0.01;
  double momentum = 0.9;
  int batch = 32;
  int depth_alpha = 3;
  std::string mode = "float";  // float | binarized | both (eval only)
  int threads = 1;
  bool xnor_grad_correction = false;

  // synthetic dataset geometry
  int classes = 10;
  int persons = 14;
  int repetitions = 10;
  Index image_h = 128;
  Index image_w = 128;

  std::size_t max_samples = 0;  // 0 = use everything
};

// Applies one key/value pair; unknown keys and unparsable values are errors.
void apply_config_value(RunConfig& config, const std::string& key,
                        const std::string& value);

// Reads a config file on top of the given defaults.
void load_config_file(RunConfig& config, const std::filesystem::path& path);

// Effective configuration in config-file syntax (stable key order).
std::string format_config(const RunConfig& config);

}  // namespace hgr
