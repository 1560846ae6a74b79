#include <fstream>
#include <sstream>

#include "cvzk/harness.hpp"

namespace cvzk::harness {

const char* experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Completeness: return "completeness";
    case ExperimentKind::SoundnessCheats: return "soundness_cheats";
    case ExperimentKind::ZkCompare: return "zk_compare";
    case ExperimentKind::AlgebraValidate: return "algebra_validate";
    case ExperimentKind::CryptoOracles: return "crypto_oracles";
  }
  return "unknown";
}

std::optional<ExperimentKind> experiment_from_name(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::Completeness, ExperimentKind::SoundnessCheats,
        ExperimentKind::ZkCompare, ExperimentKind::AlgebraValidate,
        ExperimentKind::CryptoOracles})
    if (name == experiment_name(k)) return k;
  return std::nullopt;
}

uint64_t digest_text(const std::string& text) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= uint8_t(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

LoadedConfig config_parse(const std::string& text, const std::string& base_dir) {
  LoadedConfig out;
  std::optional<xz::XZHamiltonianInstance> instance;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  std::string inline_instance;
  bool in_instance_block = false;

  while (std::getline(in, line)) {
    ++lineno;
    if (in_instance_block) {
      if (trim(line) == "instance_end") {
        in_instance_block = false;
        try {
          instance = xz::parse_instance_text(inline_instance);
        } catch (const xz::InstanceException& e) {
          throw ConfigError("inline instance (ending line " + std::to_string(lineno) +
                            "): " + e.what());
        }
      } else {
        inline_instance += line + "\n";
      }
      continue;
    }
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line == "instance_begin") {
      in_instance_block = true;
      inline_instance.clear();
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "experiment") {
        auto k = experiment_from_name(value);
        if (!k) throw ConfigError("unknown experiment '" + value + "'");
        out.experiment.kind = *k;
      } else if (key == "trials") {
        out.experiment.trials = std::stoull(value);
      } else if (key == "seed") {
        out.experiment.seed = std::stoull(value);
      } else if (key == "workers") {
        out.experiment.workers = uint32_t(std::stoul(value));
      } else if (key == "instance") {
        std::string path = value;
        if (!base_dir.empty() && path.front() != '/') path = base_dir + "/" + path;
        instance = xz::parse_instance_text(read_file(path));
      } else if (key == "m") {
        out.session.m = std::stoull(value);
      } else if (key == "steane_level") {
        out.session.steane_level = uint32_t(std::stoul(value));
      } else if (key == "lwe") {
        if (value == "micro") out.session.lwe = etcff::LweParams::micro();
        else if (value == "demo") out.session.lwe = etcff::LweParams::demo();
        else throw ConfigError("lwe preset must be micro or demo");
      } else if (key == "commit") {
        if (value == "micro") out.session.commit_params = commitment::Params::micro();
        else if (value == "standard")
          out.session.commit_params = commitment::Params::standard();
        else throw ConfigError("commit preset must be micro or standard");
      } else if (key == "npzk_reps") {
        out.session.npzk_reps = uint32_t(std::stoul(value));
      } else if (key == "npzk_debug") {
        out.session.npzk_debug = parse_bool(value, key);
      } else if (key == "trusted_coins") {
        out.session.trusted_coins = parse_bool(value, key);
      } else if (key == "r_bits") {
        out.session.r_bits = uint32_t(std::stoul(value));
      } else if (key == "witness") {
        if (value == "ground") {
          out.experiment.witness = emu::WitnessSpec::ground_state();
        } else if (value == "rho_r") {
          out.experiment.witness = emu::WitnessSpec::rho_r_oracle();
        } else if (value.rfind("product:", 0) == 0) {
          out.experiment.witness =
              emu::WitnessSpec::product(labels_from_string(value.substr(8)));
        } else {
          throw ConfigError("witness must be ground, rho_r, or product:<labels>");
        }
      } else if (key == "cheat") {
        if (value == "none") out.experiment.cheat.reset();
        else if (value == "guess_r") out.experiment.cheat = emu::CheatStrategy::GuessR;
        else if (value == "random_outcomes")
          out.experiment.cheat = emu::CheatStrategy::RandomOutcomes;
        else if (value == "wrong_preimage")
          out.experiment.cheat = emu::CheatStrategy::WrongPreimage;
        else throw ConfigError("unknown cheat strategy '" + value + "'");
      } else if (key == "verifier") {
        using K = proto::VerifierStrategy::Kind;
        if (value == "honest") out.experiment.verifier_strategy = {K::Honest, 0};
        else if (value == "bad_trapdoor")
          out.experiment.verifier_strategy = {K::BadTrapdoor, 0};
        else if (value == "malformed_key")
          out.experiment.verifier_strategy = {K::MalformedKey, 0};
        else if (value == "bias_coins")
          out.experiment.verifier_strategy = {K::BiasCoins, 0};
        else if (value.rfind("tamper:", 0) == 0)
          out.experiment.verifier_strategy = {K::TamperOutcomes,
                                              uint32_t(std::stoul(value.substr(7)))};
        else throw ConfigError("unknown verifier strategy '" + value + "'");
      } else if (key == "tamper_weights") {
        out.experiment.tamper_weights.clear();
        std::istringstream ws(value);
        std::string w;
        while (std::getline(ws, w, ','))
          out.experiment.tamper_weights.push_back(uint32_t(std::stoul(trim(w))));
      } else if (key == "transcripts") {
        std::string path = value;
        if (!base_dir.empty() && path.front() != '/') path = base_dir + "/" + path;
        out.experiment.transcripts_path = path;
      } else {
        out.warnings.push_back("line " + std::to_string(lineno) + ": unknown key '" +
                               key + "' ignored");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const xz::InstanceException& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::exception& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + key + ": " + e.what());
    }
  }
  if (in_instance_block) throw ConfigError("unterminated instance_begin block");
  if (instance) {
    out.session.instance = *instance;
  } else if (out.experiment.kind == ExperimentKind::Completeness ||
             out.experiment.kind == ExperimentKind::SoundnessCheats ||
             out.experiment.kind == ExperimentKind::ZkCompare) {
    throw ConfigError("missing instance");
  }
  return out;
}

LoadedConfig config_load(const std::string& path) {
  std::string dir;
  auto slash = path.find_last_of('/');
  if (slash != std::string::npos) dir = path.substr(0, slash);
  return config_parse(read_file(path), dir);
}

}  // namespace cvzk::harness
