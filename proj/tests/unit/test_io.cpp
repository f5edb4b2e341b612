#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <json.hpp>

#include "lse/error.hpp"
#include "lse/io.hpp"
#include "lse/reference.hpp"

using namespace lse;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const LseError& e) {
    return e.kind();
  }
  FAIL("no LseError thrown");
  return ErrorKind::InvalidInput;
}

std::string detail_of(const auto& fn) {
  try {
    fn();
  } catch (const LseError& e) {
    return e.detail();
  }
  return {};
}

std::string reference_text() { return read_file(fs::path(LSE_DATA_DIR) / "reference_config.json"); }

std::string edited(const std::function<void(nlohmann::json&)>& edit) {
  auto j = nlohmann::json::parse(reference_text());
  edit(j);
  return j.dump(2);
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("lse_unit_io_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("reference config file matches the built-in reference") {
    const RunConfig a = parse_config(reference_text());
    CHECK(serialize_config(a) == serialize_config(reference_run_config()));
    CHECK(serialize_config(a) == reference_text());
    CHECK(a.model.laws.gamma_R0 == reference_config().laws.gamma_R0);
  }

  TEST_CASE("property: serialize/parse is a fixpoint") {
    RunConfig c = reference_run_config();
    c.model.dos.variance_sigma2 = 0.1 + 0.2;
    c.model.laws.beta_ee = -1.0 / 3.0;
    c.temperatures = {0.1, 17.3, 299.99999999999994};
    const std::string s1 = serialize_config(c);
    const RunConfig back = parse_config(s1);
    CHECK(back.model.dos.variance_sigma2 == c.model.dos.variance_sigma2);
    CHECK(back.model.laws.beta_ee == c.model.laws.beta_ee);
    CHECK(back.temperatures == c.temperatures);
    CHECK(serialize_config(back) == s1);
  }

  TEST_CASE("config errors name the field") {
    const auto neg = edited([](auto& j) { j["dos"]["variance_sigma2_eV2"] = -0.01; });
    CHECK(kind_of([&] { parse_config(neg); }) == ErrorKind::OutOfRange);
    CHECK(detail_of([&] { parse_config(neg); }) == "dos.variance_sigma2");

    const auto missing = edited([](auto& j) { j["rate_laws"].erase("E_a_eV"); });
    CHECK(kind_of([&] { parse_config(missing); }) == ErrorKind::MissingKey);
    CHECK(detail_of([&] { parse_config(missing); }) == "rate_laws.E_a");

    const auto unknown = edited([](auto& j) { j["dos"]["colour"] = 1; });
    CHECK(kind_of([&] { parse_config(unknown); }) == ErrorKind::UnknownKey);

    const auto unit = edited([](auto& j) {
      j["dos"].erase("center_E0_eV");
      j["dos"]["center_E0_meV"] = 3000.0;
    });
    CHECK(kind_of([&] { parse_config(unit); }) == ErrorKind::UnitMismatch);
    CHECK(detail_of([&] { parse_config(unit); }) == "dos.center_E0");

    CHECK(kind_of([] { parse_config("{ not json"); }) == ErrorKind::ParseError);
  }

  TEST_CASE("observed CSV") {
    const auto c = parse_observed_csv("T_K,peak_eV\n10,3.02\n50,3.00\n", CurveKind::Peak);
    CHECK(c.abscissa == std::vector<double>{10, 50});
    CHECK(c.values == std::vector<double>{3.02, 3.00});

    const auto sorted = parse_observed_csv("T_K,peak_eV\n50,3.00\n10,3.02\n", CurveKind::Peak);
    CHECK(sorted.abscissa == std::vector<double>{10, 50});
    CHECK(sorted.values == std::vector<double>{3.02, 3.00});

    const std::string comma = "T_K,peak_eV\n10,3,02\n";
    CHECK(kind_of([&] { parse_observed_csv(comma, CurveKind::Peak); }) == ErrorKind::ParseError);
    CHECK(detail_of([&] { parse_observed_csv(comma, CurveKind::Peak); }).find("line 2") != std::string::npos);

    CHECK(kind_of([] { parse_observed_csv("T_K,peak_eV\n10,3\n10,3.1\n", CurveKind::Peak); }) ==
          ErrorKind::DuplicateAbscissa);
    CHECK(kind_of([] { parse_observed_csv("", CurveKind::Peak); }) == ErrorKind::EmptyFile);
    CHECK(kind_of([] { parse_observed_csv("T_K,peak_eV\n10,nan\n", CurveKind::Peak); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { parse_observed_csv("T_K,peak_eV\n10,inf\n", CurveKind::Peak); }) == ErrorKind::ParseError);
  }

  TEST_CASE("observables table picks the named column") {
    const std::string text =
        "T_K,peak_eV,fwhm_eV,intensity_au,lifetime_ps\n10,3.0,0.1,1.0,20\n20,2.99,0.11,0.9,22\n";
    const auto c = parse_observed_csv(text, CurveKind::Lifetime);
    CHECK(c.values == std::vector<double>{20, 22});
    CHECK(parse_observed_csv(text, CurveKind::Fwhm).values == std::vector<double>{0.1, 0.11});
  }

  TEST_CASE("property: CSV round trip is a fixpoint") {
    const auto sw = temperature_sweep(reference_config(), linspace(10, 300, 7), SweepOptions{true, true});
    for (const CsvTable& t : {observables_table(sw), spectrum_table(sw.spectra[3])}) {
      const std::string s1 = format_csv(t);
      const CsvTable back = parse_csv(s1);
      CHECK(back.header == t.header);
      CHECK(back.columns == t.columns);
      CHECK(format_csv(back) == s1);
    }
  }

  TEST_CASE("number formatting") {
    CHECK(format_number(10.0) == "10");
    CHECK(format_number(0.1) == "0.1");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
  }

  TEST_CASE("FNV-1a") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
    CHECK(hex64(0xabcULL) == "0000000000000abc");
  }

  TEST_CASE("atomic write replaces content and leaves no temporaries") {
    const fs::path d = scratch_dir("atomic");
    const fs::path f = d / "out.csv";
    write_file_atomic(f, "first\n");
    write_file_atomic(f, "second\n");
    CHECK(read_file(f) == "second\n");
    std::size_t n = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(d)) ++n;
    CHECK(n == 1);
    CHECK(kind_of([&] { read_file(d / "missing.json"); }) == ErrorKind::Io);
    fs::remove_all(d);
  }
}
