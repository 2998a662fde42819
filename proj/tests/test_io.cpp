#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pitslab/errors.hpp"
#include "pitslab/io.hpp"

using namespace pitslab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pitslab-io-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("sequence specs round-trip through JSON") {
    const std::vector<SequenceSpec> specs = {
        {Constant{}},
        {PureExponential{Real::parse("1/3")}},
        {TrigPolynomial{{{Real::parse("0.25"), {1.0, -0.5}}, {Real::parse("0.6180339887498948482045868343656"), 2.0}}}},
        {SignBesicovitch{Real::parse("sqrt2")}},
        {PolynomialPhase{{Real::parse("sqrt2"), Real::parse("0"), Real::parse("pi")}}, 5000},
        {FractionalPowerPhase{Real::parse("e"), Real::parse("3/2")}},
        {GeometricPhase{3, Real::parse("0.1"), 4}},
        {IidRandom{IidDistribution::Gaussian, 17}},
        {SteinhausMultiplicative{2}},
        {RademacherMultiplicative{3}},
        {Moebius{}},
        {TaylorData{{1.0, {0.0, -2.0}}}}};
    for (const SequenceSpec& s : specs) {
      const Json j = spec_to_json(s);
      CHECK(j.at("kind") == kind_name(s));
      const SequenceSpec back = spec_from_json(j);
      CHECK(spec_to_json(back) == j);
      CHECK(generate(back, 0, 50).values == generate(s, 0, 50).values);
    }
    CHECK(spec_to_json({PolynomialPhase{{Real::parse("sqrt2")}}}).at("coefficients")[0] == "sqrt2");
  }

  TEST_CASE("spec parsing rejects bad input") {
    CHECK_THROWS_AS(spec_from_json({{"kind", "poly-phase"}, {"coefficients", {"sqrt2"}}, {"colour", 1}}),
                    ParameterError);
    CHECK_THROWS_AS(spec_from_json({{"kind", "nope"}}), ParameterError);
    CHECK_THROWS_AS(spec_from_json({{"kind", "frac-power"}, {"beta", "-1"}}), ParameterError);
    CHECK_THROWS_AS(spec_from_json(Json::array()), ParameterError);
  }

  TEST_CASE("no-gap report keys") {
    NoGapReport r;
    r.arc_count = 64;
    const Json j = to_json(r);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"J", "min_normalized_mass", "threshold", "verdict", "witness"});
  }

  TEST_CASE("empty zero set is a header line") {
    ZeroSet zs;
    CHECK(zeros_csv(zs) == "modulus,angle_turns,multiplicity,residual\n");
    const Json m = zero_manifest(zs);
    CHECK(m.contains("truncation_degree"));
    CHECK(m.at("method") == "aberth-ehrlich+newton");
  }

  TEST_CASE("indicator CSV round-trips exactly") {
    const std::vector<double> radii{30.0, 77.7};
    const auto h = indicator_field(TaylorCoefficients({PolynomialPhase{{Real::parse("sqrt2")}}}), radii, 64);
    const auto back = indicator_from_csv(indicator_csv(h));
    CHECK(back.radii == h.radii);
    CHECK(back.angle_count == h.angle_count);
    CHECK(back.h == h.h);
    CHECK_THROWS_AS(parse_csv("a,b\n1,2\n", "r,theta,h"), ParameterError);
    CHECK_THROWS_AS(parse_csv("r,theta,h\n1,x,2\n", "r,theta,h"), ParameterError);
  }

  TEST_CASE("binary fields") {
    const fs::path dir = scratch("bin");
    const std::vector<double> radii{50.0, 60.0, 70.0};
    const TaylorCoefficients c({Moebius{}});
    const auto f = value_field(c, radii, 32);
    write_field_binary(dir / "f.bin", f);
    const std::string raw = slurp(dir / "f.bin");
    CHECK(raw.substr(0, 8) == "PITSFLD1");
    CHECK(static_cast<unsigned char>(raw[8]) == 1);  // version, little-endian u32
    CHECK(raw[9] == 0);
    // header 48 bytes, radii, 3 doubles per cell, one flag byte per cell
    CHECK(raw.size() == 48 + 8 * 3 + 3 * 32 * (24 + 1));
    const auto back = read_value_field_binary(dir / "f.bin");
    CHECK(back.radii == f.radii);
    CHECK(back.values == f.values);
    CHECK(back.log_abs == f.log_abs);
    CHECK(back.flags == f.flags);
    CHECK(back.method == f.method);
    CHECK(back.method_parameter == f.method_parameter);

    const auto h = indicator_field(f);
    write_field_binary(dir / "h.bin", h);
    const auto hb = read_indicator_binary(dir / "h.bin");
    CHECK(hb.h == h.h);
    CHECK(hb.flags == h.flags);
    CHECK_THROWS_AS(read_indicator_binary(dir / "f.bin"), ParameterError);
    std::ofstream(dir / "junk.bin") << "not a field";
    CHECK_THROWS_AS(read_value_field_binary(dir / "junk.bin"), ParameterError);
  }

  TEST_CASE("content hash") {
    CHECK(content_hash("") == "cbf29ce484222325");  // FNV-1a 64 offset basis
    CHECK(content_hash("a") == "af63dc4c8601ec8c");
    CHECK(content_hash("abc") != content_hash("abd"));
  }

  TEST_CASE("JSON files") {
    const fs::path dir = scratch("json");
    const Json j = {{"x", 0.1}, {"y", Json::array({1, 2})}};
    write_json(dir / "a" / "b.json", j);
    CHECK(read_json(dir / "a" / "b.json") == j);
    std::ofstream(dir / "bad.json") << "{";
    CHECK_THROWS_AS(read_json(dir / "bad.json"), ParameterError);
    CHECK_THROWS_AS(read_json(dir / "missing.json"), ParameterError);
    CHECK(format_double(0.1) == "0.1");
  }

  TEST_CASE("report JSON") {
    VerificationReport rep;
    rep.spec = {PolynomialPhase{{Real::parse("sqrt2")}}};
    const Json j = to_json(rep);
    CHECK(j.at("schema") == "pits-report/1");
    for (const char* key : {"spec", "options", "nogap", "zeros", "equidistribution", "l1_discrepancy",
                            "lower_bound_probes", "verdicts"})
      CHECK(j.contains(key));
    CHECK(j.dump().find("time") == std::string::npos);
    CHECK(render_text(rep).find("verdict") != std::string::npos);
  }
}
