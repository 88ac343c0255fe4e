#include <cmath>
#include <sstream>
#include <string>

#include <catch_amalgamated.hpp>
#include <json.hpp>

#include "fewave/commands.hpp"
#include "fewave/io.hpp"
#include "fewave/verify.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using namespace fewave;

namespace {

/// Reduced scenario; `tail` is the photon state followed by any further top-level keys.
ScenarioConfig dimensionless(const std::string& tail) {
  return parse_config_text(R"({"dimensionless": {"ups": 0.05, "theta": 0.0, "eps": 0.01, "Gamma0": 1.0}, "photon_state": )" +
                           tail + "}");
}

std::string csv(const Table& t) {
  std::ostringstream out;
  write_table(out, t, OutputFormat::csv);
  return out.str();
}

double value(const Table& t, const std::string& quantity) {
  for (const auto& r : t.rows)
    if (r[0] == quantity) return r[1].get<double>();
  FAIL("no row " << quantity);
  return 0.0;
}

}  // namespace

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
  CHECK(format_double(-0.0) == "-0");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("csv and json tables") {
  Table t;
  t.add_meta("tool", "x");
  t.columns = {"name", "v"};
  t.add_row({"a,b", 0.5});
  CHECK(csv(t) == "# tool: x\nname,v\n\"a,b\",0.5\n");
  std::ostringstream js;
  write_table(js, t, OutputFormat::json);
  const auto doc = nlohmann::json::parse(js.str());
  CHECK(doc["columns"][1] == "v");
  CHECK(doc["rows"][0][1] == 0.5);
  CHECK_THROWS_AS(t.add_row({1.0}), std::logic_error);
}

TEST_CASE("emit: vacuum, Fock and coherent") {
  SECTION("vacuum") {
    const auto rep = run_emit(dimensionless(R"({"kind": "vacuum"})"));
    CHECK(rep.result.dnu1 == 0.0);
    CHECK_THAT(rep.result.dnu2, WithinRel(0.0025 * std::pow(std::sin(0.0025) / 0.0025, 2), 1e-14));
    CHECK_FALSE(rep.einstein);
  }
  SECTION("Fock") {
    const auto rep = run_emit(dimensionless(R"({"kind": "fock", "nu0": 5})"));
    CHECK(rep.result.dnu1 == 0.0);
    CHECK(rep.result.dnu2 > 0.0);
    CHECK_FALSE(rep.signal_to_noise);
  }
  SECTION("coherent") {
    const auto cfg = dimensionless(R"({"kind": "coherent", "nu0": 1})");
    const auto rep = run_emit(cfg);
    CHECK_THAT(rep.result.dnu1, WithinRel(stimulated_coherent_gaussian(0.05, 1.0, 1.0, 0.0, 0.01, 0.0).dnu1, 1e-15));
    REQUIRE(rep.signal_to_noise);
    CHECK_THAT(*rep.signal_to_noise, WithinRel(80.0, 1e-15));
    const Table t = emit_table(rep, &cfg);
    CHECK(value(t, "dnu1") == rep.result.dnu1);
    CHECK(value(t, "total") == rep.result.dnu1 + rep.result.dnu2);
    std::ostringstream block;
    print_emit_block(block, rep);
    CHECK(block.str().find("einstein_ratio") != std::string::npos);
  }
}

TEST_CASE("emit: physical scenario reports drift against z_G") {
  const auto cfg = parse_config_text(R"({
    "physical": {
      "electron_kinetic_energy": {"value": 200e3, "unit": "eV"},
      "sigma_z0": {"value": 50, "unit": "nm"},
      "interaction_length": {"value": 1e-4, "unit": "m"},
      "drift_length": {"value": 10, "unit": "m"},
      "wavelength": {"value": 800, "unit": "nm"},
      "field_amplitude": {"value": 1e6, "unit": "V/m"}
    },
    "photon_state": {"kind": "coherent", "nu0": 1}
  })");
  const auto rep = run_emit(cfg);
  REQUIRE(rep.z_G);
  CHECK(*rep.drift_length > *rep.z_G);
  CHECK(rep.warnings.back().find("z_G") != std::string::npos);
  std::ostringstream block;
  print_emit_block(block, rep);
  CHECK(block.str().find("(beyond)") != std::string::npos);
}

TEST_CASE("sweep over Gamma and the modulation axis") {
  SECTION("Gamma") {
    const auto cfg = dimensionless(R"({"kind": "coherent", "nu0": 1}, "sweep": {"axis": "Gamma", "start": 0, "stop": 2, "steps": 3})");
    const Table t = run_sweep(cfg);
    REQUIRE(t.rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      const double g = t.number(i, "Gamma");
      CHECK(g == static_cast<double>(i));
      CHECK(t.number(i, "dnu1") == stimulated_coherent_gaussian(0.05, 1.0, g, 0.0, 0.01, 0.0).dnu1);
    }
    CHECK(t.number(2, "Gamma") == 2.0);
  }
  SECTION("t_D sets the chirp in reduced units") {
    const auto cfg = dimensionless(R"({"kind": "coherent", "nu0": 1}, "sweep": {"axis": "t_D", "start": 0, "stop": 3, "steps": 4})");
    const Table t = run_sweep(cfg);
    CHECK_THAT(t.number(3, "Gamma"), WithinRel(std::sqrt(10.0), 1e-15));
  }
  SECTION("w in a modulated scenario follows the exact bunching") {
    const auto cfg = parse_config_text(R"({
      "dimensionless": {"ups": 0.05, "chirp": 1.0, "modulation": {"g_mag": 1, "r": 0.5, "w": 1}},
      "photon_state": {"kind": "coherent", "nu0": 1},
      "sweep": {"axis": "w", "start": 0, "stop": 4, "steps": 9}
    })");
    const Table t = run_sweep(cfg);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const double w = t.number(i, "w");
      const auto b = bunching_B_ea(1.0, 0.5, 1.0, w);
      CHECK_THAT(t.number(i, "dnu1"), WithinAbs(4.0 * 0.05 * b.emission.real(), 1e-15));
    }
  }
}

TEST_CASE("fig3 normalized curve is the extinction factor") {
  const Table t = run_fig3();
  REQUIRE(t.rows.size() == 201);
  CHECK(t.number(0, "dnu1_normalized") == 1.0);
  CHECK_THAT(t.number(100, "Gamma"), WithinAbs(2.0, 1e-15));
  CHECK_THAT(t.number(100, "dnu1_normalized"), WithinRel(std::exp(-2.0), 1e-12));
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    CHECK_THAT(t.number(i, "dnu1_normalized"), WithinAbs(t.number(i, "extinction"), 1e-15));
}

TEST_CASE("fig4 spectrum") {
  SECTION("without modulation the spectrum is the Gaussian envelope") {
    const auto d = run_fig4_data(0.0);
    for (std::size_t i = 0; i < d.table.rows.size(); i += 10) {
      CHECK_THAT(d.table.number(i, "B"), WithinAbs(d.table.number(i, "envelope"), 1e-15));
      CHECK(d.table.number(i, "Q") == 0.0);
    }
  }
  SECTION("the optimum drift makes |B_2| a local maximum") {
    const auto d = run_fig4_data(1.0);
    const double b2 = std::abs(d.drift.B2);
    CHECK(b2 > 0.1);
    for (double dc : {-0.01, 0.01}) {
      const double c = d.drift.chirp + dc;
      CHECK(std::abs(bunching_Bl(1.0, kFig4GammaB / drift_factor(c), c, 2)) <= b2);
    }
  }
  SECTION("at even integer w the harmonic sum matches the exact bunching") {
    const auto d = run_fig4_data(1.0);
    const std::size_t i2 = 200;  // w = 2
    REQUIRE(d.table.number(i2, "w") == 2.0);
    const double exact = d.table.number(i2, "B_e_re");
    CHECK_THAT(d.table.number(i2, "B"), WithinRel(exact, 1e-9));
  }
}

TEST_CASE("table1 lists every state") {
  const Table t = run_table1();
  REQUIRE(t.rows.size() == 4);
  CHECK(t.rows[0][0] == "vacuum");
  CHECK(t.number(0, "dnu1") == 0.0);
  CHECK(t.number(1, "dnu1") == 0.0);
  CHECK(t.number(2, "dnu1") > t.number(3, "dnu1"));
  CHECK_THAT(t.number(3, "dnu1") / t.number(2, "dnu1"), WithinRel(std::exp(-0.5), 1e-12));
}

TEST_CASE("parallel_map preserves order and rethrows") {
  const auto v = parallel_map<int>(1000, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == static_cast<int>(i * i));
  CHECK_THROWS_AS(parallel_map<int>(10, [](std::size_t i) -> int {
                    if (i == 7) throw std::runtime_error("boom");
                    return 0;
                  }),
                  std::runtime_error);
}

TEST_CASE("outputs are byte-identical across runs") {
  const auto cfg = dimensionless(R"({"kind": "coherent", "nu0": 2}, "sweep": {"axis": "theta", "start": -6, "stop": 6, "steps": 257})");
  CHECK(csv(run_sweep(cfg)) == csv(run_sweep(cfg)));
  CHECK(csv(run_fig3()) == csv(run_fig3()));
  CHECK(csv(run_fig4()) == csv(run_fig4()));
}

TEST_CASE("verify passes and catches a perturbed lineshape") {
  VerifyOptions o;
  o.seed_grid = 40;
  const auto good = run_verify(o);
  for (const auto& r : good.records) {
    INFO(r.name << " err=" << r.max_rel_err << " tol=" << r.tolerance);
    CHECK(r.pass);
  }
  CHECK(verify_json(good, o).dump() == verify_json(run_verify(o), o).dump());

  o.sinc_perturbation = 1e-3;
  const auto bad = run_verify(o);
  CHECK_FALSE(bad.pass());
  REQUIRE(bad.find("oracle_gaussian"));
  CHECK_FALSE(bad.find("oracle_gaussian")->pass);
  REQUIRE(bad.find("sum_rule"));
  CHECK(bad.find("sum_rule")->pass);
}
