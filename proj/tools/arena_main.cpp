#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "cvzk/harness.hpp"
#include "cvzk/steane.hpp"
#include "cvzk/transcript.hpp"

namespace {

using namespace cvzk;

int log_level() {
  const char* env = std::getenv("ARENA_LOG");
  return env ? std::atoi(env) : 0;
}

int cmd_run(const std::string& experiment, const std::string& config_path,
            std::optional<uint64_t> trials, std::optional<uint64_t> seed,
            const std::string& out_path, const std::string& format,
            const std::string& transcripts) {
  harness::LoadedConfig cfg;
  if (!config_path.empty()) {
    cfg = harness::config_load(config_path);
  }
  if (!experiment.empty()) {
    auto kind = harness::experiment_from_name(experiment);
    if (!kind) {
      std::cerr << "unknown experiment '" << experiment << "'\n";
      return 2;
    }
    cfg.experiment.kind = *kind;
  }
  if (trials) cfg.experiment.trials = *trials;
  if (seed) cfg.experiment.seed = *seed;
  if (!transcripts.empty()) cfg.experiment.transcripts_path = transcripts;
  for (const auto& w : cfg.warnings) std::cerr << "config warning: " << w << "\n";

  auto report = harness::run_experiment(cfg);
  harness::ReportFormat fmt = harness::ReportFormat::Text;
  if (format == "json") fmt = harness::ReportFormat::Json;
  else if (format == "csv") fmt = harness::ReportFormat::Csv;
  else if (format != "text") {
    std::cerr << "unknown format '" << format << "'\n";
    return 2;
  }
  std::string rendered = harness::report_render(report, fmt);
  if (out_path.empty()) {
    std::cout << rendered;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << rendered;
    if (log_level() > 0) std::cerr << "report written to " << out_path << "\n";
  }
  bool healthy = report.all_checks_pass();
  return healthy ? 0 : 1;
}

int cmd_validate(const std::string& path) {
  try {
    auto cfg = harness::config_load(path);
    for (const auto& w : cfg.warnings) std::cout << "warning: " << w << "\n";
    std::cout << "ok: experiment=" << harness::experiment_name(cfg.experiment.kind)
              << " trials=" << cfg.experiment.trials
              << " n=" << cfg.session.instance.n() << " m=" << cfg.session.m
              << " N=" << cfg.session.N() << " qubits=" << cfg.session.total_qubits()
              << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cout << "invalid: " << e.what() << "\n";
    return 1;
  }
}

int cmd_diff(const std::string& a, const std::string& b) {
  auto read = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return std::string((std::istreambuf_iterator<char>(in)), {});
  };
  auto report = transcript::diff(read(a), read(b));
  if (report.empty()) {
    std::cout << "transcripts identical\n";
    return 0;
  }
  for (const auto& line : report) std::cout << line << "\n";
  return 1;
}

int cmd_fixtures(const std::string& out_dir) {
  namespace proto = cvzk::proto;
  // Codeword sets for cross-implementation diffing.
  for (uint32_t t : {1u, 2u}) {
    auto sets = steane::gen_codeword_sets(t);
    std::ofstream out(out_dir + "/codewords_level" + std::to_string(t) + ".txt",
                      std::ios::binary);
    out << steane::dump_codewords(sets);
  }
  // Golden wire frame: ProverCoins(0xA5) in session 7, seq 2.
  proto::ProtocolMessage msg;
  msg.session_id = 7;
  msg.seq = 2;
  BitVec r(8);
  for (int i = 0; i < 8; ++i) r.set(i, (0xA5 >> i) & 1);
  msg.body = proto::ProverCoins{r};
  auto frame = proto::frame_encode(msg);
  std::ofstream out(out_dir + "/wire_prover_coins.bin", std::ios::binary);
  out.write(reinterpret_cast<const char*>(frame.data()),
            std::streamsize(frame.size()));
  std::cout << "fixtures written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"arena: experiment harness for the classical-verifier ZK argument"};
  app.require_subcommand(1);

  std::string experiment, config_path, out_path, transcripts;
  std::string format = "text";
  std::optional<uint64_t> trials, seed;
  auto* run = app.add_subcommand("run", "run an experiment suite");
  run->add_option("experiment", experiment,
                  "completeness | soundness_cheats | zk_compare | algebra_validate | "
                  "crypto_oracles");
  run->add_option("--config", config_path, "experiment config file");
  run->add_option("--trials", trials, "trial count override");
  run->add_option("--seed", seed, "seed override");
  run->add_option("--out", out_path, "report output path (default stdout)");
  run->add_option("--format", format, "json | csv | text");
  run->add_option("--transcripts", transcripts, "JSONL transcript output path");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate-config", "parse and cross-check a config");
  validate->add_option("file", validate_path, "config file")->required();

  std::string diff_a, diff_b;
  auto* diff = app.add_subcommand("diff-transcripts", "compare two JSONL transcripts");
  diff->add_option("a", diff_a)->required();
  diff->add_option("b", diff_b)->required();

  std::string fixtures_dir = ".";
  auto* fixtures = app.add_subcommand("fixtures", "emit golden wire/codeword fixtures");
  fixtures->add_option("--out", fixtures_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(experiment, config_path, trials, seed, out_path, format,
                     transcripts);
    if (validate->parsed()) return cmd_validate(validate_path);
    if (diff->parsed()) return cmd_diff(diff_a, diff_b);
    if (fixtures->parsed()) return cmd_fixtures(fixtures_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
