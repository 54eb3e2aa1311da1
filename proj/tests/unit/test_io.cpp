#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mfvol/error.hpp"
#include "mfvol/generators.hpp"
#include "mfvol/hash.hpp"
#include "mfvol/io.hpp"
#include "mfvol/report.hpp"

using namespace mfvol;
namespace fs = std::filesystem;

namespace {

LoadedPrices parse(const std::string& text, MarketCsvSchema schema = {}) {
  std::istringstream in(text);
  return parse_csv(in, schema, "test.csv");
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mfvol_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("csv examples") {
  const auto three = parse("date,open\n2012-01-03,10\n2012-01-04,11\n2012-01-05,12.5\n");
  CHECK(three.series.size() == 3);
  CHECK(three.skipped_rows == 0);
  CHECK(three.series.axis() == TimeAxis::calendar_days);

  const auto blank = parse("date,open\n2012-01-03,10\n2012-01-04,\n2012-01-05,12.5\n");
  CHECK(blank.series.size() == 2);
  CHECK(blank.skipped_rows == 1);

  const auto msg = error_of([] { parse("date,open\n2012-01-03,10\n2012-01-03,11\n2012-01-05,12\n"); });
  CHECK(msg.find("2012-01-03") != std::string::npos);
  CHECK_THROWS_AS(parse("date,open\n2012-01-03,10\n2012-01-03,11\n"), DataError);
}

TEST_CASE("csv sorting, skipping and error reporting") {
  const auto sorted = parse("date,close,open\n2012-01-05,0,3\n2012-01-03,0,1\n2012-01-04,0,2\n");
  CHECK(sorted.series.prices()[0] == 1.0);
  CHECK(sorted.series.prices()[2] == 3.0);

  const auto skipped = parse("date,open\n2012-01-01,NA\n2012-01-02,null\n2012-01-03,-4\n2012-01-04,0\n"
                             "2012-01-05,1\n2012-01-06,2\n");
  CHECK(skipped.skipped_rows == 4);

  auto msg = error_of([] { parse("date,open\n2012-01-03,10\n2012-13-04,11\n"); });
  CHECK(msg.find("test.csv:3:") != std::string::npos);
  msg = error_of([] { parse("date,open\n2012-01-03,10\n2012-01-04,abc\n"); });
  CHECK(msg.find("test.csv:3:") != std::string::npos);
  CHECK_THROWS_AS(parse("date,price\n2012-01-03,10\n"), DataError);
  CHECK_THROWS_AS(parse("date,open\n2012-01-03,10\n"), DataError);

  MarketCsvSchema s;
  s.delimiter = ';';
  s.date_format = DateFormat::mdy_slash;
  s.price_column = "Open";
  const auto euro = parse("\xEF\xBB\xBF" "date;Open\r\n06/13/2012;1.5\r\n06/14/2012;1.6\r\n", s);
  CHECK(euro.series.size() == 2);
  CHECK(format_stamp(euro.series.stamps()[0], euro.series.axis()) == "2012-06-13");

  s = {};
  s.date_format = DateFormat::index;
  CHECK(parse("date,open\n0,1\n1,2\n2,3\n", s).series.axis() == TimeAxis::steps);
  for (auto f : {DateFormat::iso, DateFormat::ymd_slash, DateFormat::mdy_slash, DateFormat::dmy_slash,
                 DateFormat::index}) {
    CHECK(parse_date_format(to_string(f)) == f);
  }
}

TEST_CASE("decomposition and returns files round trip bit-exactly") {
  const auto dir = scratch_dir("roundtrip");
  auto s = gen_mrw(MrwParams{500, 0.05, 50, NoiseKind::skew_triangular, 8});
  auto d = Decomposition::from_sigma(s.returns.values, 1.25e-4, s.truth.sigma);
  write_decomposition(dir / "d.csv", d);
  const auto back = read_decomposition(dir / "d.csv");
  CHECK(back.dlns == d.dlns);
  CHECK(back.sigma == d.sigma);
  CHECK(back.dw == d.dw);
  CHECK(back.dln_sigma == d.dln_sigma);
  CHECK(back.mu == d.mu);

  std::ifstream in(dir / "d.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# mu=", 0) == 0);
  std::getline(in, line);
  CHECK(line == "step,dlnS,sigma,dW,dln_sigma");

  write_returns(dir / "r.csv", s.returns.values);
  CHECK(read_returns(dir / "r.csv").values == s.returns.values);

  {
    std::ofstream bad(dir / "bad.csv");
    bad << "# mu=0\nstep,dlnS,sigma,dW,dln_sigma\n0,1,1,1,0\n1,1,1,2,\n";
  }
  CHECK_THROWS_AS(read_decomposition(dir / "bad.csv"), DataError);
  CHECK_THROWS_AS(read_decomposition(dir / "nope.csv"), DataError);
}

TEST_CASE("plot files") {
  const auto dir = scratch_dir("plot");
  const std::vector<double> x{1.0, 2.0}, y{0.5, 0.25};
  const Column cols[] = {{"x", x}, {"y", y}};
  write_plot(dir / "p.txt", cols);
  std::ifstream in(dir / "p.txt");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "# x y\n1 0.5\n2 0.25\n");
}

TEST_CASE("sha256 and report sidecars") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto dir = scratch_dir("report");
  std::vector<double> small(10, 1.5);
  CHECK(array_or_sidecar(small, "h", dir / "r.json").is_array());
  std::vector<double> big(kInlineArrayLimit + 1, 0.25);
  std::vector<fs::path> written;
  const auto ref = array_or_sidecar(big, "h", dir / "r.json", &written);
  REQUIRE(ref.is_object());
  CHECK(ref["length"] == big.size());
  REQUIRE(written.size() == 1);
  CHECK(ref["sha256"] == sha256_file(written[0]));

  auto rep = make_report("unit", {{"b", 1}, {"a", 2}});
  CHECK(rep["schema_version"] == 1);
  CHECK(rep["toolkit_version"] == kToolkitVersion);
  const auto text = dump_report(rep);
  CHECK(text.back() == '\n');
  CHECK(text.find("\"a\"") < text.find("\"b\""));
}

TEST_CASE("manifest hashes every output") {
  const auto dir = scratch_dir("manifest");
  {
    std::ofstream(dir / "out.txt") << "hello\n";
  }
  RunManifest m("unit", {"mfvol", "unit"});
  m.set_ga_config(GaConfig{});
  m.add_seed("x", 3);
  m.add_output(dir / "out.txt");
  m.write(dir / "out.txt.manifest.json");
  const auto doc = read_json(dir / "out.txt.manifest.json");
  CHECK(doc["outputs"][0]["sha256"] == sha256_file(dir / "out.txt"));
  CHECK(doc["ga_config"]["population"] == 500);
  CHECK(doc["toolkit_version"] == kToolkitVersion);
}
