#include "hgr/config.hpp"

#include <fstream>
#include <sstream>

#include "hgr/error.hpp"

namespace hgr {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error("config: invalid boolean for " + key + ": '" + v + "'");
}

template <typename T>
T parse_number(const std::string& v, const std::string& key) {
  std::istringstream ss(v);
  T out;
  ss >> out;
  if (ss.fail() || !ss.eof())
    throw Error("config: invalid value for " + key + ": '" + v + "'");
  return out;
}

}  // namespace

void apply_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "dataset") {
    c.dataset = value;
  } else if (key == "out") {
    c.out = value;
  } else if (key == "model") {
    c.model = value;
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(value, key);
    c.has_seed = true;
  } else if (key == "epochs") {
    c.epochs = parse_number<int>(value, key);
    require(c.epochs >= 1, "config: epochs must be >= 1");
  } else if (key == "lr") {
    c.lr = parse_number<double>(value, key);
    require(c.lr > 0, "config: lr must be positive");
  } else if (key == "momentum") {
    c.momentum = parse_number<double>(value, key);
    require(c.momentum >= 0 && c.momentum < 1, "config: momentum must be in [0, 1)");
  } else if (key == "batch") {
    c.batch = parse_number<int>(value, key);
    require(c.batch >= 1, "config: batch must be >= 1");
  } else if (key == "depth_alpha") {
    c.depth_alpha = parse_number<int>(value, key);
    require(c.depth_alpha >= 0, "config: depth_alpha must be >= 0");
  } else if (key == "mode") {
    require(value == "float" || value == "binarized" || value == "both",
            "config: mode must be float, binarized or both");
    c.mode = value;
  } else if (key == "threads") {
    c.threads = parse_number<int>(value, key);
    require(c.threads >= 1, "config: threads must be >= 1");
  } else if (key == "xnor_grad_correction") {
    c.xnor_grad_correction = parse_bool(value, key);
  } else if (key == "classes") {
    c.classes = parse_number<int>(value, key);
    require(c.classes >= 1 && c.classes <= 10, "config: classes must be in [1, 10]");
  } else if (key == "persons") {
    c.persons = parse_number<int>(value, key);
    require(c.persons >= 1, "config: persons must be >= 1");
  } else if (key == "repetitions") {
    c.repetitions = parse_number<int>(value, key);
    require(c.repetitions >= 1, "config: repetitions must be >= 1");
  } else if (key == "image_h") {
    c.image_h = parse_number<Index>(value, key);
    require(c.image_h >= 50, "config: image_h must be >= 50");
  } else if (key == "image_w") {
    c.image_w = parse_number<Index>(value, key);
    require(c.image_w >= 50, "config: image_w must be >= 50");
  } else if (key == "max_samples") {
    c.max_samples = parse_number<std::size_t>(value, key);
  } else {
    throw Error("config: unknown key '" + key + "'");
  }
}

void load_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open " + path.string());
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config: line " + std::to_string(row) + " is not 'key = value'");
    try {
      apply_config_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(path.string() + ":" + std::to_string(row) + ": " + e.what());
    }
  }
}

std::string format_config(const RunConfig& c) {
  std::ostringstream out;
  out << "dataset = " << c.dataset.generic_string() << "\n";
  out << "out = " << c.out.generic_string() << "\n";
  out << "model = " << c.model.generic_string() << "\n";
  if (c.has_seed)
    out << "seed = " << c.seed << "\n";
  else
    out << "# seed =   (mandatory, no default)\n";
  out << "epochs = " << c.epochs << "\n";
  out << "lr = " << c.lr << "\n";
  out << "momentum = " << c.momentum << "\n";
  out << "batch = " << c.batch << "\n";
  out << "depth_alpha = " << c.depth_alpha << "\n";
  out << "mode = " << c.mode << "\n";
  out << "threads = " << c.threads << "\n";
  out << "xnor_grad_correction = " << (c.xnor_grad_correction ? "true" : "false") << "\n";
  out << "classes = " << c.classes << "\n";
  out << "persons = " << c.persons << "\n";
  out << "repetitions = " << c.repetitions << "\n";
  out << "image_h = " << c.image_h << "\n";
  out << "image_w = " << c.image_w << "\n";
  out << "max_samples = " << c.max_samples << "\n";
  return out.str();
}

}  // namespace hgr
