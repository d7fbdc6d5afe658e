#include "d2nn/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace d2nn {
namespace {

using nlohmann::json;

struct ErrorList {
  std::vector<std::string> errors;
  void add(const std::string& e) { errors.push_back(e); }
  void throw_if_any(const std::string& origin) const {
    if (errors.empty()) return;
    std::ostringstream os;
    os << origin << ": " << errors.size() << " config error(s):";
    for (const std::string& e : errors) os << "\n  - " << e;
    throw ValidationError(os.str());
  }
};

void check_keys(const json& j, const std::string& block,
                const std::set<std::string>& allowed, ErrorList& errs) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) errs.add("unknown key \"" + it.key() + "\" in " + block);
}

template <typename T>
void get_to(const json& j, const std::string& block, const std::string& key, T& dst,
            ErrorList& errs) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(dst);
  } catch (const json::exception& e) {
    errs.add(block + "." + key + ": " + e.what());
  }
}

void parse_arch(const json& j, ModelArch& a, ErrorList& errs) {
  check_keys(j, "architecture",
             {"shared_layers", "branch_layers", "tasks", "grid_rows", "grid_cols",
              "wavelength_m", "pixel_pitch_m", "layer_distance_m", "zero_pad",
              "input_plane_modulation", "splitter", "detector", "init_seed"},
             errs);
  get_to(j, "architecture", "shared_layers", a.shared_layers, errs);
  get_to(j, "architecture", "branch_layers", a.branch_layers, errs);
  get_to(j, "architecture", "tasks", a.tasks, errs);
  get_to(j, "architecture", "grid_rows", a.grid_rows, errs);
  get_to(j, "architecture", "grid_cols", a.grid_cols, errs);
  get_to(j, "architecture", "wavelength_m", a.wavelength, errs);
  get_to(j, "architecture", "pixel_pitch_m", a.pixel_pitch, errs);
  get_to(j, "architecture", "layer_distance_m", a.layer_distance, errs);
  get_to(j, "architecture", "zero_pad", a.zero_pad, errs);
  get_to(j, "architecture", "input_plane_modulation", a.input_plane_modulation, errs);
  get_to(j, "architecture", "init_seed", a.init_seed, errs);
  if (j.contains("splitter")) {
    const json& s = j.at("splitter");
    check_keys(s, "architecture.splitter", {"transmitted", "reflected", "mode"}, errs);
    if (s.contains("mode")) {
      std::string mode = s.at("mode").get<std::string>();
      if (mode == "amplitude-half") {
        a.splitter_transmitted = a.splitter_reflected = 0.5;
      } else if (mode == "physical") {
        a.splitter_transmitted = a.splitter_reflected = 1.0 / std::sqrt(2.0);
      } else {
        errs.add("architecture.splitter.mode: expected \"amplitude-half\" or \"physical\"");
      }
    }
    get_to(s, "architecture.splitter", "transmitted", a.splitter_transmitted, errs);
    get_to(s, "architecture.splitter", "reflected", a.splitter_reflected, errs);
  }
  if (j.contains("detector")) {
    const json& d = j.at("detector");
    check_keys(d, "architecture.detector", {"sub_split", "regions"}, errs);
    get_to(d, "architecture.detector", "sub_split", a.detector_sub_split, errs);
    if (d.contains("regions")) {
      try {
        for (const auto& r : d.at("regions"))
          a.custom_regions.push_back({r.at(0).get<int>(), r.at(1).get<int>(),
                                      r.at(2).get<int>(), r.at(3).get<int>()});
      } catch (const json::exception& e) {
        errs.add(std::string("architecture.detector.regions: ") + e.what());
      }
    }
  }
}

void parse_training(const json& j, TrainConfig& t, ErrorList& errs) {
  check_keys(j, "training",
             {"lambda1", "lambda2", "lambda_l2", "eta", "beta1", "beta2", "eps",
              "batch_size", "epochs", "seed", "update_rule", "threads"},
             errs);
  get_to(j, "training", "lambda1", t.lambda1, errs);
  get_to(j, "training", "lambda2", t.lambda2, errs);
  get_to(j, "training", "lambda_l2", t.lambda_l2, errs);
  get_to(j, "training", "eta", t.eta, errs);
  get_to(j, "training", "beta1", t.adam_beta1, errs);
  get_to(j, "training", "beta2", t.adam_beta2, errs);
  get_to(j, "training", "eps", t.adam_eps, errs);
  get_to(j, "training", "batch_size", t.batch_size, errs);
  get_to(j, "training", "epochs", t.epochs, errs);
  get_to(j, "training", "seed", t.seed, errs);
  get_to(j, "training", "threads", t.threads, errs);
  if (j.contains("update_rule")) {
    try {
      t.update_rule = update_rule_from_name(j.at("update_rule").get<std::string>());
    } catch (const std::exception& e) {
      errs.add(std::string("training.update_rule: ") + e.what());
    }
  }
}

void parse_data(const json& j, RunConfig& cfg, ErrorList& errs) {
  check_keys(j, "data", {"tasks", "fill_fraction", "encoding", "input_energy"}, errs);
  get_to(j, "data", "fill_fraction", cfg.encode.fill_fraction, errs);
  get_to(j, "data", "input_energy", cfg.encode.input_energy, errs);
  if (j.contains("encoding")) {
    std::string enc = j.at("encoding").get<std::string>();
    if (enc == "amplitude")
      cfg.encode.encoding = InputEncoding::amplitude;
    else if (enc == "phase")
      cfg.encode.encoding = InputEncoding::phase;
    else
      errs.add("data.encoding: expected \"amplitude\" or \"phase\"");
  }
  if (!j.contains("tasks")) return;
  for (const auto& tj : j.at("tasks")) {
    check_keys(tj, "data.tasks[]",
               {"name", "train_images", "train_labels", "test_images", "test_labels"}, errs);
    DataTaskConfig d;
    get_to(tj, "data.tasks[]", "name", d.name, errs);
    get_to(tj, "data.tasks[]", "train_images", d.train_images, errs);
    get_to(tj, "data.tasks[]", "train_labels", d.train_labels, errs);
    get_to(tj, "data.tasks[]", "test_images", d.test_images, errs);
    get_to(tj, "data.tasks[]", "test_labels", d.test_labels, errs);
    cfg.data.push_back(std::move(d));
  }
}

void parse_noise(const json& j, NoiseGridConfig& n, ErrorList& errs) {
  check_keys(j, "noise",
             {"detector_sigmas", "device_sigmas", "splitter_epsilons", "detector_mu",
              "repetitions", "seed", "per_region"},
             errs);
  get_to(j, "noise", "detector_sigmas", n.detector_sigmas, errs);
  get_to(j, "noise", "device_sigmas", n.device_sigmas, errs);
  get_to(j, "noise", "splitter_epsilons", n.splitter_epsilons, errs);
  get_to(j, "noise", "detector_mu", n.detector_mu, errs);
  get_to(j, "noise", "repetitions", n.repetitions, errs);
  get_to(j, "noise", "seed", n.seed, errs);
  get_to(j, "noise", "per_region", n.per_region, errs);
}

}  // namespace

std::vector<NoiseSpec> NoiseGridConfig::points() const {
  std::vector<NoiseSpec> out;
  for (double ds : detector_sigmas)
    for (double vs : device_sigmas)
      for (double eps : splitter_epsilons)
        out.push_back({ds, detector_mu, vs, eps, seed, per_region});
  return out;
}

void NoiseGridConfig::validate() const {
  if (repetitions < 1) throw ValidationError("noise.repetitions must be >= 1");
  if (detector_sigmas.empty() || device_sigmas.empty() || splitter_epsilons.empty())
    throw ValidationError("noise: every sweep axis needs at least one value");
  for (double s : detector_sigmas)
    if (s < 0.0 || s > 0.2)
      throw ValidationError("noise.detector_sigmas: sweep presets cover [0, 0.2]");
  for (double s : device_sigmas)
    if (s < 0.0 || s > 0.3)
      throw ValidationError("noise.device_sigmas: sweep presets cover [0, 0.3]");
  for (double e : splitter_epsilons)
    if (e < -0.1 || e > 0.1)
      throw ValidationError("noise.splitter_epsilons: range is [-0.1, 0.1]");
}

void RunConfig::validate(bool check_paths) const {
  ErrorList errs;
  try {
    arch.validate();
  } catch (const std::exception& e) {
    errs.add(e.what());
  }
  try {
    train.validate();
  } catch (const std::exception& e) {
    errs.add(e.what());
  }
  try {
    noise.validate();
  } catch (const std::exception& e) {
    errs.add(e.what());
  }
  if (encode.fill_fraction <= 0.0 || encode.fill_fraction > 1.0)
    errs.add("data.fill_fraction must lie in (0, 1]");
  if (encode.input_energy < 0.0) errs.add("data.input_energy must be >= 0");
  if (!data.empty() && static_cast<int>(data.size()) != arch.tasks)
    errs.add("data.tasks: expected " + std::to_string(arch.tasks) + " entries, got " +
             std::to_string(data.size()));
  if (check_paths) {
    for (const DataTaskConfig& d : data)
      for (const std::string& p :
           {d.train_images, d.train_labels, d.test_images, d.test_labels})
        if (!p.empty() && !std::filesystem::exists(p))
          errs.add("data path does not exist: " + p);
  }
  if (output_dir.empty()) errs.add("output_dir must not be empty");
  errs.throw_if_any("run config");
}

RunConfig parse_run_config_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(origin + ": invalid JSON: " + e.what());
  }
  ErrorList errs;
  check_keys(j, "top level", {"architecture", "training", "data", "noise", "output_dir"}, errs);
  RunConfig cfg;
  if (j.contains("architecture")) parse_arch(j.at("architecture"), cfg.arch, errs);
  if (j.contains("training")) parse_training(j.at("training"), cfg.train, errs);
  if (j.contains("data")) parse_data(j.at("data"), cfg, errs);
  if (j.contains("noise")) parse_noise(j.at("noise"), cfg.noise, errs);
  get_to(j, "top level", "output_dir", cfg.output_dir, errs);
  errs.throw_if_any(origin);
  return cfg;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_run_config_text(ss.str(), path);
}

std::string canonical_config_json(const RunConfig& cfg) {
  json j;
  j["architecture"] = {{"shared_layers", cfg.arch.shared_layers},
                       {"branch_layers", cfg.arch.branch_layers},
                       {"tasks", cfg.arch.tasks},
                       {"grid_rows", cfg.arch.grid_rows},
                       {"grid_cols", cfg.arch.grid_cols},
                       {"wavelength_m", cfg.arch.wavelength},
                       {"pixel_pitch_m", cfg.arch.pixel_pitch},
                       {"layer_distance_m", cfg.arch.layer_distance},
                       {"zero_pad", cfg.arch.zero_pad},
                       {"input_plane_modulation", cfg.arch.input_plane_modulation},
                       {"splitter_transmitted", cfg.arch.splitter_transmitted},
                       {"splitter_reflected", cfg.arch.splitter_reflected},
                       {"detector_sub_split", cfg.arch.detector_sub_split},
                       {"init_seed", cfg.arch.init_seed}};
  j["training"] = {{"lambda1", cfg.train.lambda1},
                   {"lambda2", cfg.train.lambda2},
                   {"lambda_l2", cfg.train.lambda_l2},
                   {"eta", cfg.train.eta},
                   {"beta1", cfg.train.adam_beta1},
                   {"beta2", cfg.train.adam_beta2},
                   {"eps", cfg.train.adam_eps},
                   {"batch_size", cfg.train.batch_size},
                   {"epochs", cfg.train.epochs},
                   {"seed", cfg.train.seed},
                   {"update_rule", update_rule_name(cfg.train.update_rule)}};
  json tasks = json::array();
  for (const DataTaskConfig& d : cfg.data) tasks.push_back(d.name);
  j["data"] = {{"tasks", tasks},
               {"fill_fraction", cfg.encode.fill_fraction},
               {"encoding", cfg.encode.encoding == InputEncoding::amplitude ? "amplitude" : "phase"},
               {"input_energy", cfg.encode.input_energy}};
  return j.dump();
}

uint64_t config_hash(const RunConfig& cfg) {
  // FNV-1a over the canonical serialization
  const std::string s = canonical_config_json(cfg);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace d2nn
