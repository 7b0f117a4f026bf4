#include <doctest.h>

#include "tonelli/report.hpp"

using namespace tonelli;

namespace {
Json flow_config() {
  return Json{{"task", "flow"},
              {"hamiltonian", {{"name", "flat"}, {"dim", 2}}},
              {"integrator", {{"method", "verlet"}, {"h", 1e-3}}},
              {"seed", 7},
              {"params", {{"x", {0.25, 0.5}}, {"p", {1.0, 2.0}}, {"t", 0.5}}}};
}
}  // namespace

TEST_CASE("config validation rejects unknown keys and bad values") {
  CHECK_NOTHROW(RunConfig::from_json(flow_config()));

  Json bad = flow_config();
  bad["extra"] = 1;
  CHECK_THROWS_AS(RunConfig::from_json(bad), ConfigError);

  bad = flow_config();
  bad["hamiltonian"]["typo"] = 1;
  CHECK_THROWS_AS(RunConfig::from_json(bad), ConfigError);

  bad = flow_config();
  bad["integrator"]["h"] = -1.0;
  CHECK_THROWS_AS(RunConfig::from_json(bad), ConfigError);

  bad = flow_config();
  bad.erase("task");
  CHECK_THROWS_AS(RunConfig::from_json(bad), ConfigError);

  Json unknown_task = flow_config();
  unknown_task["task"] = "paint";
  CHECK_THROWS_AS(run_task(RunConfig::from_json(unknown_task)), ConfigError);

  Json bad_params = flow_config();
  bad_params["params"]["weird"] = 0;
  CHECK_THROWS_AS(run_task(RunConfig::from_json(bad_params)), ConfigError);
}

TEST_CASE("flow task emits the exact linear payload") {
  const RunReport rep = run_task(RunConfig::from_json(flow_config()));
  CHECK(rep.pass);
  const Json& payload = rep.payload();
  CHECK(payload.at("x")[0].get<double>() == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(payload.at("x")[1].get<double>() == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(payload.at("winding")[1].get<int>() == 1);
  CHECK(payload.at("energy_drift").get<double>() < 1e-13);
  // report plumbing
  CHECK(rep.document.at("version").get<std::string>() == kCatalogueVersion);
  CHECK(rep.document.at("seed").get<long>() == 7);
  CHECK(!rep.document.at("config_hash").get<std::string>().empty());
}

TEST_CASE("payloads are byte-reproducible") {
  const RunConfig cfg = RunConfig::from_json(flow_config());
  const std::string a = run_task(cfg).payload().dump();
  const std::string b = run_task(cfg).payload().dump();
  CHECK(a == b);

  Json mini = Json{{"task", "minimize"},
                   {"hamiltonian", {{"name", "pendulum"}, {"dim", 1}}},
                   {"params", {{"x", {0.0}}, {"y", {0.5}}, {"t", 1.0}}}};
  const RunConfig mcfg = RunConfig::from_json(mini);
  CHECK(run_task(mcfg).payload().dump() == run_task(mcfg).payload().dump());
}

TEST_CASE("compare reports") {
  const RunReport rep = run_task(RunConfig::from_json(flow_config()));
  const Json diff = compare_reports(rep.document, rep.document, 0.0);
  CHECK(diff.at("identical").get<bool>());
  CHECK(diff.at("differences").empty());

  Json perturbed = rep.document;
  perturbed["payload"]["energy_drift"] = 1.0;
  const Json d2 = compare_reports(rep.document, perturbed, 1e-9);
  CHECK(!d2.at("identical").get<bool>());
  REQUIRE(d2.at("differences").size() == 1);
  CHECK(d2.at("differences")[0].at("field").get<std::string>() == "energy_drift");

  // per-field tolerance overrides the default
  const Json d3 = compare_reports(rep.document, perturbed, 1e-9,
                                  Json{{"energy_drift", 10.0}});
  CHECK(d3.at("identical").get<bool>());

  // degenerate tolerance 0: every perturbed floating field differs
  Json shifted = rep.document;
  for (auto& v : shifted["payload"]["x"]) v = v.get<double>() + 1e-15;
  CHECK(!compare_reports(rep.document, shifted, 0.0).at("identical").get<bool>());

  Json other = rep.document;
  other["config"]["task"] = "minimize";
  CHECK_THROWS_AS(compare_reports(rep.document, other, 1e-9), ConfigError);
}

TEST_CASE("csv export flattens the payload") {
  const RunReport rep = run_task(RunConfig::from_json(flow_config()));
  const std::string csv = report_csv(rep.document);
  CHECK(csv.rfind("field,value\n", 0) == 0);
  CHECK(csv.find("x[0],0.75") != std::string::npos);
  CHECK(csv.find("winding[1],1") != std::string::npos);
}

TEST_CASE("torus task attaches the foliation assertions") {
  Json cfg = Json{{"task", "torus-periodic"},
                  {"hamiltonian", {{"name", "shear"}, {"dim", 1}}},
                  {"params", {{"T", 1.0}, {"r", {1}}, {"grid", {16}}}}};
  const RunReport rep = run_task(RunConfig::from_json(cfg));
  CHECK(rep.pass);
  CHECK(rep.payload().at("residuals").at("closure").get<double>() < 1e-8);
  CHECK(rep.payload().at("sections").at("P").size() == 16);
}
