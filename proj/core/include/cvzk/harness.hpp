#pragma once

#include <map>
#include <optional>
#include <string>

#include "cvzk/emulation.hpp"
#include "cvzk/protocol.hpp"
#include "cvzk/stats.hpp"

namespace cvzk::harness {

enum class ExperimentKind : uint8_t {
  Completeness,
  SoundnessCheats,
  ZkCompare,
  AlgebraValidate,
  CryptoOracles,
};

const char* experiment_name(ExperimentKind kind);
std::optional<ExperimentKind> experiment_from_name(const std::string& name);

struct ExperimentParams {
  ExperimentKind kind = ExperimentKind::Completeness;
  uint64_t trials = 100;
  uint64_t seed = 1;
  uint32_t workers = 2;
  emu::WitnessSpec witness = emu::WitnessSpec::ground_state();
  std::optional<emu::CheatStrategy> cheat;
  proto::VerifierStrategy verifier_strategy;
  std::vector<uint32_t> tamper_weights = {1, 4, 16};
  std::string transcripts_path;  // empty: do not persist
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LoadedConfig {
  proto::SessionConfig session;
  ExperimentParams experiment;
  std::vector<std::string> warnings;
};

/// Plain-text key = value format; '#' comments; unknown keys warn.
LoadedConfig config_parse(const std::string& text, const std::string& base_dir);
LoadedConfig config_load(const std::string& path);

struct TrialRecord {
  uint64_t index = 0;
  bool accepted = false;
  bool aborted = false;
  uint16_t abort_reason = 0;
  bool hadamard = false;
  std::string note;
};

struct ExperimentReport {
  uint32_t schema_version = 1;
  std::string experiment;
  uint64_t config_digest = 0;
  uint64_t seed = 0;
  uint64_t trials = 0;
  std::vector<TrialRecord> records;
  uint64_t accepted = 0;
  stats::Interval accept_ci{0, 1};
  std::map<std::string, double> values;        // named scalar results
  std::map<std::string, bool> checks;          // named pass/fail results
  double wall_ms = 0;

  bool all_checks_pass() const {
    for (const auto& [name, ok] : checks)
      if (!ok) return false;
    return true;
  }
};

ExperimentReport run_experiment(const LoadedConfig& config);

enum class ReportFormat : uint8_t { Json, Csv, Text };

/// include_wall=false gives the canonical byte-reproducible rendering.
std::string report_render(const ExperimentReport& report, ReportFormat format,
                          bool include_wall = true);

uint64_t digest_text(const std::string& text);

}  // namespace cvzk::harness
