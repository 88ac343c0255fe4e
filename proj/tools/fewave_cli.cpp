// fewave: photon emission of free-electron wavepackets from the command line.

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fewave/commands.hpp"
#include "fewave/config.hpp"
#include "fewave/io.hpp"
#include "fewave/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string config;
  std::string out;
  std::string format;
  double nodes = 1.0;
  int seed_grid = 200;
  double mutate_sinc = 0.0;
};

std::optional<fewave::ScenarioConfig> load(const Options& o, bool required) {
  if (o.config.empty()) {
    if (required) throw fewave::ConfigError("--config is required for this command");
    return std::nullopt;
  }
  return fewave::load_config(o.config);
}

/// Command-line flags override the config's output block.
fewave::OutputSpec output_spec(const Options& o, const fewave::ScenarioConfig* cfg) {
  fewave::OutputSpec spec = cfg ? cfg->output : fewave::OutputSpec{};
  if (!o.out.empty()) spec.path = o.out;
  if (o.format == "json") spec.format = fewave::OutputFormat::json;
  else if (o.format == "csv") spec.format = fewave::OutputFormat::csv;
  return spec;
}

int run_emit(const Options& o) {
  const auto cfg = load(o, true);
  const auto rep = fewave::run_emit(*cfg);
  fewave::print_emit_block(std::cout, rep);
  if (!o.out.empty() || cfg->output.path) fewave::write_output(fewave::emit_table(rep, &*cfg), output_spec(o, &*cfg), std::cout);
  return kExitOk;
}

int run_table(const Options& o, const fewave::Table& t, const fewave::ScenarioConfig* cfg) {
  fewave::write_output(t, output_spec(o, cfg), std::cout);
  return kExitOk;
}

int run_verify(const Options& o) {
  fewave::VerifyOptions vo;
  vo.seed_grid = o.seed_grid;
  vo.density = o.nodes;
  vo.sinc_perturbation = o.mutate_sinc;
  const auto rep = fewave::run_verify(vo);
  for (const auto& r : rep.records) {
    std::cerr << (r.pass ? "PASS " : "FAIL ") << r.name << "  max_rel_err=" << fewave::format_double(r.max_rel_err)
              << "  tolerance=" << fewave::format_double(r.tolerance) << (r.informational ? "  (informational)" : "")
              << '\n';
  }
  const std::string doc = fewave::verify_json(rep, vo).dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << doc;
  } else {
    std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error(o.out + ": cannot open for writing");
    f << doc;
  }
  if (!rep.pass()) {
    for (const auto& r : rep.records)
      if (!r.pass) std::cerr << "verify: check failed: " << r.name << '\n';
    return kExitVerifyFailed;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon emission of free-electron quantum wavepackets in a quantized mode"};
  app.set_version_flag("--version", std::string("fewave ") + fewave::kToolVersion);
  app.require_subcommand(1);

  Options o;
  auto add_io = [&o](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", o.config, "Scenario JSON document")->check(CLI::ExistingFile);
    if (config_required) c->required();
    sub->add_option("--out", o.out, "Output path (default: stdout)");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* emit = app.add_subcommand("emit", "Emission increments for one scenario");
  add_io(emit, true);
  auto* sweep = app.add_subcommand("sweep", "Sweep one axis of a scenario");
  add_io(sweep, true);
  auto* fig3 = app.add_subcommand("fig3", "First-order increment against the extinction parameter");
  add_io(fig3, false);
  auto* fig4 = app.add_subcommand("fig4", "Bunching spectrum of a modulated wavepacket");
  add_io(fig4, false);
  auto* table1 = app.add_subcommand("table1", "Emission for every photon state at one scenario");
  add_io(table1, false);
  auto* verify = app.add_subcommand("verify", "Closed forms against the quadrature oracle");
  verify->add_option("--out", o.out, "Report path (default: stdout)");
  verify->add_option("--nodes", o.nodes, "Oracle panel density multiplier")->check(CLI::Range(1.0, 64.0));
  verify->add_option("--seed-grid", o.seed_grid, "Points in the random oracle grid")->check(CLI::Range(1, 100000));
  verify->add_option("--mutate-sinc", o.mutate_sinc, "Perturb the closed-form lineshape (self-test)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*emit) return run_emit(o);
    if (*sweep) {
      const auto cfg = load(o, true);
      return run_table(o, fewave::run_sweep(*cfg), &*cfg);
    }
    if (*fig3) {
      const auto cfg = load(o, false);
      return run_table(o, fewave::run_fig3(cfg ? &*cfg : nullptr), cfg ? &*cfg : nullptr);
    }
    if (*fig4) {
      const auto cfg = load(o, false);
      return run_table(o, fewave::run_fig4(cfg ? &*cfg : nullptr), cfg ? &*cfg : nullptr);
    }
    if (*table1) {
      const auto cfg = load(o, false);
      return run_table(o, fewave::run_table1(cfg ? &*cfg : nullptr), cfg ? &*cfg : nullptr);
    }
    if (*verify) return run_verify(o);
  } catch (const fewave::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitVerifyFailed;
  }
  return kExitOk;
}
