// Command-line front end. Every run writes its effective configuration to
// DIR/config.json; rerunning with --config DIR/config.json reproduces it.

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pitslab/errors.hpp"
#include "pitslab/evaluator.hpp"
#include "pitslab/io.hpp"
#include "pitslab/parallel.hpp"
#include "pitslab/pits.hpp"
#include "pitslab/spectrum.hpp"
#include "pitslab/zeros.hpp"

namespace fs = std::filesystem;
using namespace pitslab;

namespace {

enum class Type { Uint, Int, Double, String, Bool, DoubleList, UintList, Range };

struct Param {
  const char* key;
  const char* flag;
  Type type;
  Json fallback;
  const char* help;
};

const std::map<std::string, std::vector<Param>>& command_params() {
  static const std::map<std::string, std::vector<Param>> table = {
      {"seq",
       {{"start", "--start", Type::Uint, 0, "first index"},
        {"len", "--len", Type::Uint, 1000, "number of values"}}},
      {"acf",
       {{"sizes", "--sizes", Type::UintList, Json::array({1000, 10000, 100000}), "increasing sample sizes n"},
        {"max_lag", "--max-lag", Type::Int, 20, "largest lag K"},
        {"herglotz_order", "--herglotz-order", Type::Int, 10, "Toeplitz order of the positivity check"}}},
      {"spectrum",
       {{"estimator", "--estimator", Type::String, "periodogram", "periodogram or abel"},
        {"n", "--n", Type::Uint, 16384, "periodogram length"},
        {"r", "--r", Type::Double, 0.999, "Abel radius"},
        {"J", "--J", Type::Int, 64, "number of arcs"}}},
      {"nogap",
       {{"estimator", "--estimator", Type::String, "periodogram", "periodogram or abel"},
        {"n", "--n", Type::Uint, 16384, "periodogram length"},
        {"r", "--r", Type::Double, 0.999, "Abel radius"},
        {"J", "--J", Type::Int, 64, "number of arcs"},
        {"threshold", "--threshold", Type::Double, kDefaultNoGapThreshold, "minimum normalized arc mass"}}},
      {"eval",
       {{"radii", "--radii", Type::DoubleList, Json::array({100.0}), "increasing radii"},
        {"angles", "--angles", Type::Int, 256, "angles j/A per radius"},
        {"method", "--method", Type::String, "direct", "direct, window or gaussian"},
        {"c_N", "--cN", Type::Double, 1.0, "window width constant"},
        {"tol", "--tol", Type::Double, 1e-12, "truncation tolerance of the direct sum"},
        {"precision", "--precision", Type::String, "auto", "auto, double or multi"},
        {"binary", "--binary", Type::Bool, false, "also write PITSFLD1 binary fields"}}},
      {"zeros",
       {{"annulus", "--annulus", Type::Range, Json::array({1.0, 100.0}), "inner:outer radii"},
        {"tol", "--tol", Type::Double, 1e-16, "truncation tolerance for the polynomial degree"},
        {"degree_scale", "--degree-scale", Type::Double, 1.0, "multiplies the truncation degree"},
        {"sectors", "--sectors", Type::Int, 0, "also write counts in this many sectors"},
        {"sector_r", "--sector-r", Type::Double, 0.0, "radius for sector counts (0: outer radius)"}}},
      {"equi",
       {{"annulus", "--annulus", Type::Range, Json::array({50.0, 300.0}), "inner:outer radii"},
        {"J", "--J", Type::Int, 16, "number of sectors"},
        {"discrepancy", "--discrepancy", Type::Double, 0.1, "star discrepancy threshold"},
        {"chi2_quantile", "--chi2-quantile", Type::Double, 0.99, "chi-square acceptance quantile"},
        {"slope_range", "--slope-range", Type::Range, Json::array({0.8, 1.2}), "accepted radial slopes"}}},
      {"pits",
       {{"radii", "--radii", Type::Range, Json::array({700.0, 800.0}), "inner:outer radii of the annulus"},
        {"radial", "--radial", Type::Int, 40, "radial grid points"},
        {"angles", "--angles", Type::Int, 256, "angular grid points"},
        {"pits_level", "--pits-level", Type::Double, 0.9, "h below this counts as pit area"},
        {"precision", "--precision", Type::String, "auto", "auto, double or multi"}}},
      {"verify",
       {{"n", "--n", Type::Uint, 1 << 14, "periodogram length"},
        {"J", "--J", Type::Int, 64, "number of arcs"},
        {"nogap_threshold", "--threshold", Type::Double, kDefaultNoGapThreshold, "minimum normalized arc mass"},
        {"zeros_annulus", "--annulus", Type::Range, Json::array({50.0, 300.0}), "annulus for zeros"},
        {"sectors", "--sectors", Type::Int, 16, "sectors for the chi-square test"},
        {"discrepancy", "--discrepancy", Type::Double, 0.1, "star discrepancy threshold"},
        {"chi2_quantile", "--chi2-quantile", Type::Double, 0.99, "chi-square acceptance quantile"},
        {"slope_range", "--slope-range", Type::Range, Json::array({0.8, 1.2}), "accepted radial slopes"},
        {"t", "--t", Type::DoubleList, Json::array({200.0, 400.0}), "increasing scales t for the L1 discrepancy"},
        {"l1_annulus", "--l1-annulus", Type::Range, Json::array({0.5, 1.0}), "annulus for the L1 discrepancy"},
        {"radial_cells", "--radial-cells", Type::Int, 64, "radial cells of the L1 grid"},
        {"angular_cells", "--angular-cells", Type::Int, 256, "angular cells of the L1 grid"},
        {"l1_threshold", "--l1-threshold", Type::Double, 0.1, "normalized L1 threshold at the largest t"},
        {"probes", "--probes", Type::Int, 5, "number of window probes"},
        {"probe_seed", "--probe-seed", Type::Uint, 1, "seed of the probe sites"},
        {"probe_r_range", "--probe-r-range", Type::Range, Json::array({400.0, 1600.0}), "radii of probe sites"},
        {"probe_delta", "--probe-delta", Type::Double, 0.05, "probe neighbourhood size"},
        {"c_N", "--cN", Type::Double, 1.0, "window width constant"},
        {"c_probe", "--c-probe", Type::Double, kDefaultProbeConstant, "probe constant"}}},
  };
  return table;
}

double parse_double(const std::string& s, const std::string& what) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || p != s.data() + s.size()) throw ParameterError(what + ": '" + s + "' is not a number");
  return x;
}

std::int64_t parse_int(const std::string& s, const std::string& what) {
  std::int64_t x = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || p != s.data() + s.size()) throw ParameterError(what + ": '" + s + "' is not an integer");
  return x;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = s.find(sep, pos);
    out.push_back(s.substr(pos, end == std::string::npos ? std::string::npos : end - pos));
    if (end == std::string::npos) return out;
    pos = end + 1;
  }
}

Json parse_value(const Param& p, const std::string& raw) {
  const std::string what = std::string("--") + (p.flag + 2);
  switch (p.type) {
    case Type::Uint: {
      const auto v = parse_int(raw, what);
      if (v < 0) throw ParameterError(what + " must be nonnegative");
      return static_cast<std::uint64_t>(v);
    }
    case Type::Int: return parse_int(raw, what);
    case Type::Double: return parse_double(raw, what);
    case Type::String: return raw;
    case Type::Bool:
      if (raw == "true" || raw == "1") return true;
      if (raw == "false" || raw == "0") return false;
      throw ParameterError(what + " expects true or false");
    case Type::DoubleList: {
      Json a = Json::array();
      for (const auto& s : split(raw, ',')) a.push_back(parse_double(s, what));
      return a;
    }
    case Type::UintList: {
      Json a = Json::array();
      for (const auto& s : split(raw, ',')) a.push_back(static_cast<std::uint64_t>(parse_int(s, what)));
      return a;
    }
    case Type::Range: {
      const auto parts = split(raw, ':');
      if (parts.size() != 2) throw ParameterError(what + " expects a:b");
      return Json::array({parse_double(parts[0], what), parse_double(parts[1], what)});
    }
  }
  return raw;
}

// Typed access to a resolved parameter object.
class Params {
 public:
  explicit Params(Json j) : j_(std::move(j)) {}
  const Json& json() const { return j_; }

  double num(const char* key) const { return get(key, [](const Json& v) { return v.is_number(); }).get<double>(); }
  std::int64_t integer(const char* key) const {
    return get(key, [](const Json& v) { return v.is_number_integer(); }).get<std::int64_t>();
  }
  std::uint64_t uinteger(const char* key) const {
    const auto v = integer(key);
    if (v < 0) throw ParameterError(std::string(key) + " must be nonnegative");
    return static_cast<std::uint64_t>(v);
  }
  std::string str(const char* key) const {
    return get(key, [](const Json& v) { return v.is_string(); }).get<std::string>();
  }
  bool flag(const char* key) const { return get(key, [](const Json& v) { return v.is_boolean(); }).get<bool>(); }
  std::vector<double> list(const char* key) const {
    const Json& v = get(key, [](const Json& v) { return v.is_array(); });
    std::vector<double> out;
    for (const Json& x : v) {
      if (!x.is_number()) throw ParameterError(std::string(key) + " must hold numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  std::vector<std::uint64_t> ulist(const char* key) const {
    std::vector<std::uint64_t> out;
    for (double x : list(key)) {
      if (x < 0 || x != std::floor(x)) throw ParameterError(std::string(key) + " must hold nonnegative integers");
      out.push_back(static_cast<std::uint64_t>(x));
    }
    return out;
  }
  std::pair<double, double> range(const char* key) const {
    const auto v = list(key);
    if (v.size() != 2) throw ParameterError(std::string(key) + " must be [a, b]");
    return {v[0], v[1]};
  }

 private:
  template <class Check>
  const Json& get(const char* key, Check ok) const {
    const Json& v = j_.at(key);
    if (!ok(v)) throw ParameterError(std::string("parameter '") + key + "' has the wrong type");
    return v;
  }
  Json j_;
};

Precision precision_from(const std::string& s) {
  if (s == "auto") return Precision::Auto;
  if (s == "double") return Precision::Double;
  if (s == "multi") return Precision::Multi;
  throw ParameterError("precision must be auto, double or multi");
}

SpectralEstimate estimate_from(const SequenceSpec& spec, const Params& p) {
  const std::string e = p.str("estimator");
  const int J = static_cast<int>(p.integer("J"));
  if (e == "periodogram") return periodogram(spec, p.uinteger("n"), J);
  if (e == "abel") return abel_estimate(spec, p.num("r"), J);
  throw ParameterError("estimator must be periodogram or abel");
}

struct SpecFlags {
  std::optional<std::string> kind, lambda, alpha, beta, base, x, seed, distribution, length_hint, coefficients, terms;
  std::map<int, std::string> q;
};

Json complex_token(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() == 1) return Json::array({parse_double(parts[0], "--coefficients"), 0.0});
  if (parts.size() == 2)
    return Json::array({parse_double(parts[0], "--coefficients"), parse_double(parts[1], "--coefficients")});
  throw ParameterError("complex values are written re or re:im");
}

Json build_spec(const Json* from_config, const SpecFlags& f) {
  Json spec;
  if (f.kind)
    spec = Json{{"kind", *f.kind}};
  else if (from_config)
    spec = *from_config;
  else
    throw ParameterError("no sequence given: use --kind or --config");
  const std::string kind = spec.value("kind", std::string());
  auto set_string = [&](const char* key, const std::optional<std::string>& v) {
    if (v) spec[key] = *v;
  };
  auto set_uint = [&](const char* key, const std::optional<std::string>& v) {
    if (!v) return;
    const auto x = parse_int(*v, std::string("--") + key);
    if (x < 0) throw ParameterError(std::string("--") + key + " must be nonnegative");
    spec[key] = static_cast<std::uint64_t>(x);
  };
  set_string("lambda", f.lambda);
  set_string("alpha", f.alpha);
  set_string("beta", f.beta);
  set_uint("base", f.base);
  set_string("x", f.x);
  set_uint("seed", f.seed);
  set_string("distribution", f.distribution);
  set_uint("length_hint", f.length_hint);
  if (!f.q.empty()) {
    Json c = Json::array();
    for (int d = 2; d <= f.q.rbegin()->first; ++d) c.push_back(f.q.count(d) ? f.q.at(d) : std::string("0"));
    spec["coefficients"] = c;
  }
  if (f.coefficients) {
    Json c = Json::array();
    for (const auto& s : split(*f.coefficients, ',')) {
      if (kind == "taylor")
        c.push_back(complex_token(s));
      else
        c.push_back(s);
    }
    spec["coefficients"] = c;
  }
  if (f.terms) {
    Json t = Json::array();
    for (const auto& term : split(*f.terms, ',')) {
      const auto parts = split(term, ':');
      if (parts.size() < 2 || parts.size() > 3) throw ParameterError("--terms expects lambda:re[:im],...");
      const double re = parse_double(parts[1], "--terms");
      const double im = parts.size() == 3 ? parse_double(parts[2], "--terms") : 0.0;
      t.push_back({{"lambda", parts[0]}, {"coefficient", Json::array({re, im})}});
    }
    spec["terms"] = t;
  }
  return spec;
}

struct Outputs {
  fs::path dir;
  std::string format;
  bool csv() const { return format == "csv"; }
};

void run_seq(const SequenceSpec& spec, const Params& p, const Outputs& out) {
  const SequenceWindow w = generate(spec, p.uinteger("start"), p.uinteger("len"));
  if (out.csv()) {
    write_text(out.dir / "sequence.csv", sequence_csv(w));
  } else {
    Json values = Json::array();
    for (Eigen::Index i = 0; i < w.values.size(); ++i) values.push_back({w.values[i].real(), w.values[i].imag()});
    write_json(out.dir / "sequence.json", {{"start", w.start}, {"values", values}});
  }
}

void run_acf(const SequenceSpec& spec, const Params& p, const Outputs& out) {
  const auto profile = autocorrelation(spec, p.ulist("sizes"), static_cast<int>(p.integer("max_lag")));
  const auto order = static_cast<int>(p.integer("herglotz_order"));
  const auto herglotz = herglotz_check(profile, std::min(order, profile.max_lag));
  const auto psi = psi_estimate(profile);
  Json summary{{"herglotz", {{"order", std::min(order, profile.max_lag)},
                             {"positive", herglotz.positive},
                             {"smallest_eigenvalue", herglotz.smallest_eigenvalue},
                             {"tolerance", herglotz.tolerance}}},
               {"psi", {{"sample_sizes", psi.sample_sizes}, {"levels", psi.levels}}}};
  Json conv = Json::array();
  for (Eigen::Index i = 0; i < profile.conv_modulus.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < profile.conv_modulus.cols(); ++k) row.push_back(profile.conv_modulus(i, k));
    conv.push_back(row);
  }
  summary["conv_modulus"] = conv;
  if (out.csv()) {
    write_text(out.dir / "lags.csv", lags_csv(profile));
  } else {
    Json rho = Json::array();
    for (std::size_t i = 0; i < profile.sample_sizes.size(); ++i)
      for (int k = 0; k <= profile.max_lag; ++k) {
        const auto v = profile.rho_hat(static_cast<Eigen::Index>(i), k);
        rho.push_back({{"n", profile.sample_sizes[i]}, {"k", k}, {"re", v.real()}, {"im", v.imag()}});
      }
    summary["rho_hat"] = rho;
  }
  write_json(out.dir / "acf.json", summary);
}

void run_spectrum(const SequenceSpec& spec, const Params& p, const Outputs& out) {
  const SpectralEstimate e = estimate_from(spec, p);
  if (out.csv())
    write_text(out.dir / "arcs.csv", arcs_csv(e));
  else
    write_json(out.dir / "spectrum.json", to_json(e));
}

void run_nogap(const SequenceSpec& spec, const Params& p, const Outputs& out) {
  const SpectralEstimate e = estimate_from(spec, p);
  const NoGapReport r = no_gap_test(e, p.num("threshold"));
  if (out.csv()) write_text(out.dir / "arcs.csv", arcs_csv(e));
  write_json(out.dir / "nogap.json", to_json(r));
}

void run_eval(const SequenceSpec& spec, const Params& p, const Outputs& out) {
  FieldOptions opt;
  const std::string method = p.str("method");
  if (method == "direct")
    opt.method = FieldMethod::DirectScaled;
  else if (method == "window")
    opt.method = FieldMethod::CentralWindow;
  else if (method == "gaussian")
    opt.method = FieldMethod::GaussianWindow;
  else
    throw ParameterError("method must be direct, window or gaussian");
  opt.c_N = p.num("c_N");
  opt.tol = p.num("tol");
  if (!(opt.tol > 0.0 && opt.tol <= 1e-6)) throw ParameterError("tol must lie in (0, 1e-6]");
  opt.precision = precision_from(p.str("precision"));
  const TaylorCoefficients coeffs(spec);
  const auto radii = p.list("radii");
  const ScaledValueField field = value_field(coeffs, radii, static_cast<int>(p.integer("angles")), opt);
  const IndicatorField h = indicator_field(field);
  if (out.csv()) {
    write_text(out.dir / "field.csv", value_field_csv(field));
    write_text(out.dir / "indicator.csv", indicator_csv(h));
  } else {
    Json rows = Json::array();
    for (std::size_t i = 0; i < radii.size(); ++i)
      for (int j = 0; j < field.angle_count; ++j) {
        const auto ii = static_cast<Eigen::Index>(i);
        rows.push_back({{"r", radii[i]},
                        {"theta", field.angle(j)},
                        {"re", field.values(ii, j).real()},
                        {"im", field.values(ii, j).imag()},
                        {"log_abs", field.log_abs(ii, j)},
                        {"h", h.h(ii, j)},
                        {"flags", field.flags(ii, j)}});
      }
    write_json(out.dir / "field.json", {{"method", method}, {"cells", rows}});
  }
  if (p.flag("binary")) {
    write_field_binary(out.dir / "field.bin", field);
    write_field_binary(out.dir / "indicator.bin", h);
  }
}

ZeroSet zeros_for(const SequenceSpec& spec, const Params& p, const char* key) {
  const auto [a, b] = p.range(key);
  ZeroOptions opt;
  if (p.json().contains("tol")) opt.tol = p.num("tol");
  if (p.json().contains("degree_scale")) opt.degree_scale = p.num("degree_scale");
  return find_zeros(TaylorCoefficients(spec), a, b, opt);
}

void write_zero_set(const ZeroSet& zs, const Outputs& out) {
  Json manifest = zero_manifest(zs);
  if (out.csv()) {
    write_text(out.dir / "zeros.csv", zeros_csv(zs));
  } else {
    Json list = Json::array();
    for (const Zero& z : zs.zeros)
      list.push_back({{"modulus", z.modulus},
                      {"angle_turns", z.angle},
                      {"multiplicity", z.multiplicity},
                      {"residual", z.residual}});
    manifest["zeros"] = list;
  }
  write_json(out.dir / "zeros.json", manifest);
}

void run_zeros(const SequenceSpec& spec, const Params& p, const Outputs& out) {
  const ZeroSet zs = zeros_for(spec, p, "annulus");
  write_zero_set(zs, out);
  const auto J = p.integer("sectors");
  if (J > 0) {
    const double r = p.num("sector_r") > 0.0 ? p.num("sector_r") : zs.outer;
    write_text(out.dir / "sectors.csv", sector_csv(sector_counts(zs, static_cast<int>(J), r)));
  }
}

EquidistributionThresholds thresholds_from(const Params& p) {
  EquidistributionThresholds t;
  t.discrepancy = p.num("discrepancy");
  t.chi2_quantile = p.num("chi2_quantile");
  std::tie(t.slope_low, t.slope_high) = p.range("slope_range");
  return t;
}

void run_equi(const SequenceSpec& spec, const Params& p, const Outputs& out) {
  const ZeroSet zs = zeros_for(spec, p, "annulus");
  write_zero_set(zs, out);
  write_json(out.dir / "equidistribution.json",
             to_json(equidistribution(zs, static_cast<int>(p.integer("J")), thresholds_from(p))));
}

void run_pits(const SequenceSpec& spec, const Params& p, const Outputs& out) {
  const auto [a, b] = p.range("radii");
  const auto n = p.integer("radial");
  if (n < 2 || !(a > 0.0 && a < b)) throw ParameterError("pits needs radii a:b with 0 < a < b and radial >= 2");
  std::vector<double> radii;
  for (std::int64_t i = 0; i < n; ++i) radii.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  FieldOptions opt;
  opt.precision = precision_from(p.str("precision"));
  const IndicatorField h = indicator_field(TaylorCoefficients(spec), radii, static_cast<int>(p.integer("angles")), opt);
  write_json(out.dir / "pits.json", to_json(pits_profile(h, p.num("pits_level"))));
  if (out.csv()) write_text(out.dir / "indicator.csv", indicator_csv(h));
}

VerifyOptions verify_options(const Params& p) {
  VerifyOptions o;
  o.periodogram_n = p.uinteger("n");
  o.arc_count = static_cast<int>(p.integer("J"));
  o.nogap_threshold = p.num("nogap_threshold");
  std::tie(o.zeros_inner, o.zeros_outer) = p.range("zeros_annulus");
  o.sectors = static_cast<int>(p.integer("sectors"));
  o.equidistribution = thresholds_from(p);
  o.t_values = p.list("t");
  std::tie(o.annulus_inner, o.annulus_outer) = p.range("l1_annulus");
  o.radial_cells = static_cast<int>(p.integer("radial_cells"));
  o.angular_cells = static_cast<int>(p.integer("angular_cells"));
  o.l1_threshold = p.num("l1_threshold");
  o.probes = static_cast<int>(p.integer("probes"));
  o.probe_seed = p.uinteger("probe_seed");
  std::tie(o.probe_r_low, o.probe_r_high) = p.range("probe_r_range");
  o.probe_delta = p.num("probe_delta");
  o.c_N = p.num("c_N");
  o.c_probe = p.num("c_probe");
  return o;
}

void run_verify(const SequenceSpec& spec, const Params& p, const Outputs& out, const Json& config, bool use_cache) {
  const char* env = std::getenv("PITSLAB_CACHE");
  const fs::path root = env && *env ? fs::path(env) : fs::path(".pitslab-cache");
  const std::string config_text = config.dump();
  const fs::path slot = root / content_hash(config_text);
  static const char* artifacts[] = {"report.json", "report.txt", "zeros.csv"};

  if (use_cache && fs::exists(slot / "config.json") && fs::exists(slot / "report.json") &&
      read_json(slot / "config.json").dump() == config_text) {
    for (const char* a : artifacts)
      if (fs::exists(slot / a)) fs::copy_file(slot / a, out.dir / a, fs::copy_options::overwrite_existing);
    return;
  }
  const VerificationReport rep = verify(spec, verify_options(p));
  write_json(out.dir / "report.json", to_json(rep));
  write_text(out.dir / "report.txt", render_text(rep));
  write_text(out.dir / "zeros.csv", zeros_csv(rep.zeros));
  if (use_cache) {
    std::error_code ec;
    fs::create_directories(slot, ec);
    if (!ec) {
      for (const char* a : artifacts) fs::copy_file(out.dir / a, slot / a, fs::copy_options::overwrite_existing, ec);
      write_json(slot / "config.json", config);
    }
  }
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Parameter:
    case ErrorKind::Capacity:
    case ErrorKind::Contract: return 2;
    case ErrorKind::Certification:
    case ErrorKind::Diagnostic: return 3;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments on random and pseudo-random Taylor series and their zeros"};
  app.require_subcommand(1);

  struct Command {
    CLI::App* app;
    std::string name;
    std::map<std::string, std::optional<std::string>> values;
  };
  std::vector<Command> commands;
  SpecFlags spec_flags;
  std::optional<std::string> config_path, out_dir, format, threads;
  bool no_cache = false;

  const std::vector<std::pair<std::string, std::string>> names = {
      {"seq", "sequence values"},          {"acf", "empirical autocorrelations"},
      {"spectrum", "spectral arc masses"}, {"nogap", "spectral no-gap test"},
      {"eval", "scaled value and indicator fields"}, {"zeros", "zeros in an annulus"},
      {"equi", "angular equidistribution of zeros"}, {"pits", "pits profile of the indicator"},
      {"verify", "end-to-end verification report"}};
  commands.reserve(names.size());
  for (const auto& [name, help] : names) {
    Command c{app.add_subcommand(name, help), name, {}};
    if (name == "spectrum") c.app->alias("spec");
    CLI::App* s = c.app;
    s->add_option("--config", config_path, "JSON run configuration; flags override it");
    s->add_option("--out", out_dir, "output directory (default: out)");
    s->add_option("--format", format, "csv or json (default: csv)");
    s->add_option("--threads", threads, "worker threads (default: hardware)");
    s->add_option("--kind", spec_flags.kind,
                  "constant, pure-exp, trig-poly, sign-besicovitch, poly-phase, frac-power, geometric-phase, iid, "
                  "steinhaus, rademacher, moebius, taylor");
    s->add_option("--lambda", spec_flags.lambda, "frequency of pure-exp");
    s->add_option("--alpha", spec_flags.alpha, "alpha of sign-besicovitch or frac-power");
    s->add_option("--beta", spec_flags.beta, "exponent of frac-power");
    for (int d = 2; d <= 6; ++d) {
      auto* opt = s->add_option_function<std::string>(
          "--q" + std::to_string(d), [&spec_flags, d](const std::string& v) { spec_flags.q[d] = v; },
          "coefficient of n^" + std::to_string(d) + " in poly-phase");
      (void)opt;
    }
    s->add_option("--coefficients", spec_flags.coefficients,
                  "comma list: poly-phase q2,q3,... or taylor re[:im],...");
    s->add_option("--terms", spec_flags.terms, "trig-poly terms lambda:re[:im],...");
    s->add_option("--base", spec_flags.base, "base of geometric-phase");
    s->add_option("--x", spec_flags.x, "x of geometric-phase");
    s->add_option("--seed", spec_flags.seed, "seed of random kinds");
    s->add_option("--distribution", spec_flags.distribution, "iid distribution: steinhaus, rademacher, gaussian");
    s->add_option("--length-hint", spec_flags.length_hint, "largest index that will be requested");
    if (name == "verify") s->add_flag("--no-cache", no_cache, "ignore and do not fill the run cache");
    for (const Param& p : command_params().at(name)) {
      auto& slot = c.values[p.key];
      s->add_option(p.flag, slot, p.help);
    }
    commands.push_back(std::move(c));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  Command* cmd = nullptr;
  for (auto& c : commands)
    if (c.app->parsed()) cmd = &c;

  try {
    Json file = Json::object();
    if (config_path) {
      file = read_json(*config_path);
      if (!file.is_object()) throw ParameterError("config must be a JSON object");
      for (const auto& [key, _] : file.items())
        if (key != "schema" && key != "command" && key != "spec" && key != "params" && key != "format")
          throw ParameterError("unknown config key '" + key + "'");
      if (file.contains("command") && file.at("command") != cmd->name)
        throw ParameterError("config is for command '" + file.at("command").get<std::string>() + "'");
    }

    Json params = Json::object();
    for (const Param& p : command_params().at(cmd->name)) params[p.key] = p.fallback;
    if (file.contains("params")) {
      if (!file.at("params").is_object()) throw ParameterError("config params must be an object");
      for (const auto& [key, value] : file.at("params").items()) {
        if (!params.contains(key)) throw ParameterError("unknown parameter '" + key + "' for " + cmd->name);
        params[key] = value;
      }
    }
    for (const Param& p : command_params().at(cmd->name))
      if (const auto& v = cmd->values.at(p.key)) params[p.key] = parse_value(p, *v);

    const Json spec_json = build_spec(file.contains("spec") ? &file.at("spec") : nullptr, spec_flags);
    const SequenceSpec spec = spec_from_json(spec_json);

    Outputs out;
    out.format = format ? *format : file.value("format", std::string("csv"));
    if (out.format != "csv" && out.format != "json") throw ParameterError("--format must be csv or json");
    out.dir = out_dir ? fs::path(*out_dir) : fs::path("out");
    if (threads) {
      const auto n = parse_int(*threads, "--threads");
      if (n < 0) throw ParameterError("--threads must be nonnegative");
      set_thread_count(static_cast<unsigned>(n));
    }

    Json config;
    config["schema"] = "pits-config/1";
    config["command"] = cmd->name;
    config["spec"] = spec_to_json(spec);
    config["params"] = params;
    config["format"] = out.format;
    fs::create_directories(out.dir);
    write_json(out.dir / "config.json", config);

    const Params p(params);
    const std::string& name = cmd->name;
    if (name == "seq") run_seq(spec, p, out);
    else if (name == "acf") run_acf(spec, p, out);
    else if (name == "spectrum") run_spectrum(spec, p, out);
    else if (name == "nogap") run_nogap(spec, p, out);
    else if (name == "eval") run_eval(spec, p, out);
    else if (name == "zeros") run_zeros(spec, p, out);
    else if (name == "equi") run_equi(spec, p, out);
    else if (name == "pits") run_pits(spec, p, out);
    else run_verify(spec, p, out, config, !no_cache);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
