#include <dgavg/config.hpp>
#include <dgavg/errors.hpp>
#include <dgavg/report.hpp>
#include <dgavg/run.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace dgavg;

TEST_CASE("defaults and flag parsing") {
  const RunConfig c = parse_config("", {"study", "--method", "sipg", "--mesh-sizes=4,8,16", "--k", "2"});
  CHECK(c.command == "study");
  CHECK(c.method == Method::sipg);
  CHECK(c.k == 2);
  CHECK(c.mesh_sizes == std::vector<int>{4, 8, 16});
  CHECK(c.s == 1.6);
  CHECK(c.problem == "sin2");
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("flags override the file") {
  const std::string file = "# run file\ncommand = solve\ns = 2.0\nk = 0\n";
  const RunConfig c = parse_config(file, {"--k", "2"});
  CHECK(c.command == "solve");
  CHECK(c.s == 2.0);
  CHECK(c.k == 2);
}

TEST_CASE("unknown keys suggest the nearest one") {
  try {
    parse_config("sigma_0 = 4\n", {"study"});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "sigma_0");
    CHECK(std::string(e.what()).find("sigma0") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("", {"study", "--k", "one"}), ConfigError);
}

TEST_CASE("validation names the offending key") {
  try {
    validate(parse_config("", {"study", "--s", "1.2"}));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "s");
  }
  try {
    validate(parse_config("", {}));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "command");
  }
}

TEST_CASE("command line exit codes") {
  std::ostringstream out;
  std::ostringstream err;
  CHECK(run_command_line({"study", "--s", "1.2"}, out, err) == kExitConfig);
  CHECK(err.str().find("config error (s)") != std::string::npos);
  CHECK(run_command_line({"frobnicate"}, out, err) == kExitConfig);
  CHECK(run_command_line({"--help"}, out, err) == kExitPass);
}

TEST_CASE("echo lists every key") {
  const RunConfig c = parse_config("", {"probe", "--name", "structural"});
  std::vector<std::string> echoed;
  for (const auto& [key, value] : c.echo()) echoed.push_back(key);
  std::vector<std::string> keys = config_keys();
  std::sort(echoed.begin(), echoed.end());
  std::sort(keys.begin(), keys.end());
  CHECK(echoed == keys);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_number(1e-300) == "1e-300");
}
