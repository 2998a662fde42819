#include "pitslab/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "pitslab/errors.hpp"

namespace pitslab {
namespace fs = std::filesystem;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr char kFieldMagic[8] = {'P', 'I', 'T', 'S', 'F', 'L', 'D', '1'};
constexpr std::uint32_t kFieldVersion = 1;
enum : std::uint32_t { kContentValues = 1, kContentIndicator = 2 };

Real real_at(const Json& j, const char* key, const char* fallback = nullptr) {
  if (!j.contains(key)) {
    if (fallback) return Real::parse(fallback);
    throw ParameterError(std::string("missing parameter '") + key + "'");
  }
  const Json& v = j.at(key);
  if (v.is_string()) return Real::parse(v.get<std::string>());
  if (v.is_number()) return Real(v.get<double>());
  throw ParameterError(std::string("parameter '") + key + "' must be a string or number");
}

std::uint64_t uint_at(const Json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec == std::errc() && p == s.data() + s.size()) return out;
  }
  throw ParameterError(std::string("parameter '") + key + "' must be a nonnegative integer");
}

std::complex<double> complex_at(const Json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ParameterError("complex values are written as a number or [re, im]");
}

Json complex_json(std::complex<double> z) { return Json::array({z.real(), z.imag()}); }

void check_keys(const Json& j, std::initializer_list<const char*> allowed) {
  std::set<std::string> ok{"kind", "length_hint"};
  for (const char* a : allowed) ok.insert(a);
  for (const auto& [key, _] : j.items())
    if (!ok.count(key))
      throw ParameterError("parameter '" + key + "' does not apply to kind '" + j.at("kind").get<std::string>() + "'");
}

const char* distribution_name(IidDistribution d) {
  switch (d) {
    case IidDistribution::Steinhaus: return "steinhaus";
    case IidDistribution::Rademacher: return "rademacher";
    case IidDistribution::Gaussian: return "gaussian";
  }
  return "?";
}

// Little-endian primitive writers and readers.
void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }

class Reader {
 public:
  Reader(std::string data, fs::path path) : data_(std::move(data)), path_(std::move(path)) {}
  std::uint64_t u(int bytes) {
    need(bytes);
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += bytes;
    return v;
  }
  double f64() { return std::bit_cast<double>(u(8)); }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void finish() const {
    if (pos_ != data_.size()) throw ParameterError(path_.string() + ": trailing bytes in field file");
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw ParameterError(path_.string() + ": truncated field file");
  }
  std::string data_;
  fs::path path_;
  std::size_t pos_ = 0;
};

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct FieldHeader {
  std::uint32_t content = 0, method = 0;
  double parameter = 0.0;
  std::vector<double> radii;
  std::uint64_t cols = 0;
};

std::string field_header(std::uint32_t content, std::uint32_t method, double parameter,
                         const std::vector<double>& radii, int cols) {
  std::string out(kFieldMagic, 8);
  put_u32(out, kFieldVersion);
  put_u32(out, content);
  put_u32(out, method);
  put_u32(out, 0);
  put_f64(out, parameter);
  put_u64(out, radii.size());
  put_u64(out, static_cast<std::uint64_t>(cols));
  for (double r : radii) put_f64(out, r);
  return out;
}

FieldHeader read_header(Reader& in, std::uint32_t expected, const fs::path& path) {
  if (in.bytes(8) != std::string(kFieldMagic, 8)) throw ParameterError(path.string() + ": not a PITSFLD1 file");
  if (in.u(4) != kFieldVersion) throw ParameterError(path.string() + ": unsupported field version");
  FieldHeader h;
  h.content = static_cast<std::uint32_t>(in.u(4));
  if (h.content != expected) throw ParameterError(path.string() + ": unexpected field content");
  h.method = static_cast<std::uint32_t>(in.u(4));
  in.u(4);
  h.parameter = in.f64();
  const std::uint64_t rows = in.u(8);
  h.cols = in.u(8);
  for (std::uint64_t i = 0; i < rows; ++i) h.radii.push_back(in.f64());
  return h;
}

}  // namespace

std::string format_double(double x) { return shortest_repr(x); }

Json spec_to_json(const SequenceSpec& spec) {
  Json j;
  j["kind"] = kind_name(spec);
  std::visit(overloaded{
                 [](const Constant&) {},
                 [&](const PureExponential& s) { j["lambda"] = s.lambda.text(); },
                 [&](const TrigPolynomial& s) {
                   Json terms = Json::array();
                   for (const TrigTerm& t : s.terms)
                     terms.push_back({{"lambda", t.lambda.text()}, {"coefficient", complex_json(t.coefficient)}});
                   j["terms"] = terms;
                 },
                 [&](const SignBesicovitch& s) { j["alpha"] = s.alpha.text(); },
                 [&](const PolynomialPhase& s) {
                   Json q = Json::array();
                   for (const Real& c : s.coefficients) q.push_back(c.text());
                   j["coefficients"] = q;
                 },
                 [&](const FractionalPowerPhase& s) {
                   j["alpha"] = s.alpha.text();
                   j["beta"] = s.beta.text();
                 },
                 [&](const GeometricPhase& s) {
                   j["base"] = s.base;
                   j["x"] = s.x.text();
                   j["seed"] = s.seed;
                 },
                 [&](const IidRandom& s) {
                   j["distribution"] = distribution_name(s.distribution);
                   j["seed"] = s.seed;
                 },
                 [&](const SteinhausMultiplicative& s) { j["seed"] = s.seed; },
                 [&](const RademacherMultiplicative& s) { j["seed"] = s.seed; },
                 [](const Moebius&) {},
                 [&](const TaylorData& s) {
                   Json c = Json::array();
                   for (auto z : s.coefficients) c.push_back(complex_json(z));
                   j["coefficients"] = c;
                 },
             },
             spec.kind);
  j["length_hint"] = spec.length_hint;
  return j;
}

SequenceSpec spec_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ParameterError("sequence spec must be an object with a string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  SequenceSpec spec;
  spec.length_hint = uint_at(j, "length_hint", kDefaultLengthHint);
  if (kind == "constant") {
    check_keys(j, {});
    spec.kind = Constant{};
  } else if (kind == "pure-exp") {
    check_keys(j, {"lambda"});
    spec.kind = PureExponential{real_at(j, "lambda")};
  } else if (kind == "trig-poly") {
    check_keys(j, {"terms"});
    if (!j.contains("terms") || !j.at("terms").is_array()) throw ParameterError("trig-poly needs a 'terms' array");
    TrigPolynomial tp;
    for (const Json& t : j.at("terms")) {
      if (!t.is_object() || !t.contains("coefficient")) throw ParameterError("each term needs lambda and coefficient");
      tp.terms.push_back({real_at(t, "lambda"), complex_at(t.at("coefficient"))});
    }
    spec.kind = tp;
  } else if (kind == "sign-besicovitch") {
    check_keys(j, {"alpha"});
    spec.kind = SignBesicovitch{real_at(j, "alpha")};
  } else if (kind == "poly-phase") {
    check_keys(j, {"coefficients"});
    if (!j.contains("coefficients") || !j.at("coefficients").is_array())
      throw ParameterError("poly-phase needs a 'coefficients' array q2..qd");
    PolynomialPhase pp;
    for (const Json& c : j.at("coefficients")) {
      if (c.is_string())
        pp.coefficients.push_back(Real::parse(c.get<std::string>()));
      else if (c.is_number())
        pp.coefficients.push_back(Real(c.get<double>()));
      else
        throw ParameterError("poly-phase coefficients must be strings or numbers");
    }
    spec.kind = pp;
  } else if (kind == "frac-power") {
    check_keys(j, {"alpha", "beta"});
    spec.kind = FractionalPowerPhase{real_at(j, "alpha", "1"), real_at(j, "beta")};
  } else if (kind == "geometric-phase") {
    check_keys(j, {"base", "x", "seed"});
    spec.kind = GeometricPhase{uint_at(j, "base", 2), real_at(j, "x"), uint_at(j, "seed", 0)};
  } else if (kind == "iid") {
    check_keys(j, {"distribution", "seed"});
    IidRandom iid;
    const std::string d = j.value("distribution", std::string("steinhaus"));
    if (d == "steinhaus")
      iid.distribution = IidDistribution::Steinhaus;
    else if (d == "rademacher")
      iid.distribution = IidDistribution::Rademacher;
    else if (d == "gaussian")
      iid.distribution = IidDistribution::Gaussian;
    else
      throw ParameterError("unknown iid distribution '" + d + "'");
    iid.seed = uint_at(j, "seed", 0);
    spec.kind = iid;
  } else if (kind == "steinhaus") {
    check_keys(j, {"seed"});
    spec.kind = SteinhausMultiplicative{uint_at(j, "seed", 0)};
  } else if (kind == "rademacher") {
    check_keys(j, {"seed"});
    spec.kind = RademacherMultiplicative{uint_at(j, "seed", 0)};
  } else if (kind == "moebius") {
    check_keys(j, {});
    spec.kind = Moebius{};
  } else if (kind == "taylor") {
    check_keys(j, {"coefficients"});
    if (!j.contains("coefficients") || !j.at("coefficients").is_array())
      throw ParameterError("taylor needs a 'coefficients' array");
    TaylorData td;
    for (const Json& c : j.at("coefficients")) td.coefficients.push_back(complex_at(c));
    spec.kind = td;
  } else {
    throw ParameterError("unknown sequence kind '" + kind + "'");
  }
  validate(spec);
  return spec;
}

Json to_json(const NoGapReport& r) {
  Json j;
  j["J"] = r.arc_count;
  j["min_normalized_mass"] = r.min_normalized_mass;
  j["threshold"] = r.threshold;
  j["verdict"] = to_string(r.verdict);
  j["witness"] = r.witness;
  return j;
}

Json to_json(const SpectralEstimate& e) {
  Json j;
  std::visit(overloaded{[&](const PeriodogramEstimator& p) {
                          j["estimator"] = "periodogram";
                          j["n"] = p.n;
                        },
                        [&](const AbelEstimator& a) {
                          j["estimator"] = "abel";
                          j["r"] = a.r;
                          j["terms"] = a.terms;
                        }},
             e.estimator);
  j["J"] = e.arc_count;
  j["grid_size"] = e.grid_size;
  j["total_mass"] = e.total_mass;
  j["masses"] = std::vector<double>(e.masses.data(), e.masses.data() + e.masses.size());
  return j;
}

Json to_json(const EquidistributionReport& r) {
  Json j;
  j["annulus"] = {r.inner, r.outer};
  j["zero_count"] = r.zero_count;
  j["sectors"] = r.sectors;
  j["star_discrepancy"] = r.star_discrepancy;
  j["sector_chi2"] = r.sector_chi2;
  j["chi2_critical"] = r.chi2_critical;
  j["radial_slope"] = r.radial_slope;
  j["slope_radii"] = r.slope_radii;
  j["slope_counts"] = r.slope_counts;
  j["thresholds"] = {{"discrepancy", r.thresholds.discrepancy},
                     {"chi2_quantile", r.thresholds.chi2_quantile},
                     {"slope", {r.thresholds.slope_low, r.thresholds.slope_high}},
                     {"min_zeros", r.thresholds.min_zeros}};
  j["verdicts"] = {{"discrepancy", to_string(r.discrepancy_verdict)},
                   {"chi2", to_string(r.chi2_verdict)},
                   {"slope", to_string(r.slope_verdict)},
                   {"overall", to_string(r.verdict)}};
  return j;
}

Json to_json(const L1Discrepancy& d) {
  return {{"t", d.t},          {"annulus", {d.inner, d.outer}},       {"value", d.value},
          {"normalized", d.normalized}, {"clipped_cells", d.clipped_cells}};
}

Json to_json(const ProbeResult& p) {
  return {{"r", p.r},         {"theta", p.theta},         {"delta", p.delta}, {"r0", p.r0},
          {"theta0", p.theta0}, {"value", p.value}, {"threshold", p.threshold}, {"pass", p.pass}};
}

Json to_json(const PitsProfile& p) {
  Json q = Json::object();
  for (std::size_t i = 0; i < p.levels.size(); ++i) q[format_double(p.levels[i])] = p.quantiles[i];
  return {{"quantiles", q},
          {"pits_level", p.pits_level},
          {"pits_area", p.pits_area},
          {"cells", p.cells},
          {"clipped_cells", p.clipped_cells}};
}

Json zero_manifest(const ZeroSet& zs) {
  return {{"annulus", {zs.inner, zs.outer}},
          {"count", zs.count()},
          {"distinct", zs.zeros.size()},
          {"truncation_degree", zs.truncation_degree},
          {"method", zs.method},
          {"max_residual", zs.max_residual},
          {"rejected_roots", zs.rejected},
          {"sweeps", zs.sweeps}};
}

Json to_json(const VerifyOptions& o) {
  return {{"n", o.periodogram_n},
          {"J", o.arc_count},
          {"nogap_threshold", o.nogap_threshold},
          {"zeros_annulus", {o.zeros_inner, o.zeros_outer}},
          {"sectors", o.sectors},
          {"discrepancy_threshold", o.equidistribution.discrepancy},
          {"chi2_quantile", o.equidistribution.chi2_quantile},
          {"slope_range", {o.equidistribution.slope_low, o.equidistribution.slope_high}},
          {"t", o.t_values},
          {"annulus", {o.annulus_inner, o.annulus_outer}},
          {"grid", {o.radial_cells, o.angular_cells}},
          {"l1_threshold", o.l1_threshold},
          {"probes", o.probes},
          {"probe_seed", o.probe_seed},
          {"probe_r_range", {o.probe_r_low, o.probe_r_high}},
          {"probe_delta", o.probe_delta},
          {"c_N", o.c_N},
          {"c_probe", o.c_probe}};
}

Json to_json(const VerificationReport& r) {
  Json j;
  j["schema"] = "pits-report/1";
  j["spec"] = spec_to_json(r.spec);
  j["options"] = to_json(r.options);
  j["nogap"] = to_json(r.nogap);
  j["zeros"] = zero_manifest(r.zeros);
  j["equidistribution"] = to_json(r.equidistribution);
  Json l1 = Json::array();
  for (const auto& d : r.l1) l1.push_back(to_json(d));
  j["l1_discrepancy"] = l1;
  Json probes = Json::array();
  for (const auto& p : r.probes) probes.push_back(to_json(p));
  j["lower_bound_probes"] = probes;
  j["verdicts"] = {{"hypothesis", to_string(r.components.hypothesis)},
                   {"probes", to_string(r.components.probes)},
                   {"equidistribution", to_string(r.components.equidistribution)},
                   {"l1", to_string(r.components.l1)},
                   {"conclusion", to_string(r.conclusion)},
                   {"overall", to_string(r.verdict)}};
  j["note"] = "Finite-scale evidence only; thresholds are engineering defaults, not consequences of the theorem.";
  return j;
}

std::string render_text(const VerificationReport& r) {
  std::ostringstream s;
  s << "sequence:          " << spec_to_json(r.spec).dump() << "\n";
  s << "no-gap test:       min normalized mass " << format_double(r.nogap.min_normalized_mass) << " over J="
    << r.nogap.arc_count << " arcs (threshold " << format_double(r.nogap.threshold) << ") -> "
    << to_string(r.nogap.verdict) << "\n";
  s << "zeros:             " << r.zeros.count() << " in annulus (" << format_double(r.zeros.inner) << ", "
    << format_double(r.zeros.outer) << "), degree " << r.zeros.truncation_degree << ", max residual "
    << format_double(r.zeros.max_residual) << ", rejected " << r.zeros.rejected << "\n";
  const auto& e = r.equidistribution;
  s << "equidistribution:  discrepancy " << format_double(e.star_discrepancy) << ", chi2 "
    << format_double(e.sector_chi2) << " (critical " << format_double(e.chi2_critical) << "), radial slope "
    << format_double(e.radial_slope) << " -> " << to_string(e.verdict) << "\n";
  for (const auto& d : r.l1)
    s << "L1 discrepancy:    t=" << format_double(d.t) << " normalized " << format_double(d.normalized) << "\n";
  for (const auto& p : r.probes)
    s << "window probe:      r=" << format_double(p.r) << " theta=" << format_double(p.theta) << " max "
      << format_double(p.value) << " vs " << format_double(p.threshold) << (p.pass ? " pass" : " fail") << "\n";
  s << "hypothesis:        " << to_string(r.components.hypothesis) << "\n";
  s << "conclusion:        " << to_string(r.conclusion) << "\n";
  s << "verdict:           " << to_string(r.verdict) << "\n";
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(path.string() + ": write failed");
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const fs::path& path) {
  const std::string text = read_bytes(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(path.string() + ": " + e.what());
  }
}

std::string sequence_csv(const SequenceWindow& w) {
  std::string s = "index,re,im\n";
  for (Eigen::Index i = 0; i < w.values.size(); ++i)
    s += std::to_string(w.start + static_cast<std::uint64_t>(i)) + "," + format_double(w.values[i].real()) + "," +
         format_double(w.values[i].imag()) + "\n";
  return s;
}

std::string lags_csv(const AutocorrelationProfile& p) {
  std::string s = "n,k,re,im\n";
  for (std::size_t i = 0; i < p.sample_sizes.size(); ++i)
    for (int k = 0; k <= p.max_lag; ++k) {
      const auto v = p.rho_hat(static_cast<Eigen::Index>(i), k);
      s += std::to_string(p.sample_sizes[i]) + "," + std::to_string(k) + "," + format_double(v.real()) + "," +
           format_double(v.imag()) + "\n";
    }
  return s;
}

std::string arcs_csv(const SpectralEstimate& e) {
  std::string s = "j,left,right,mass\n";
  for (int j = 0; j < e.arc_count; ++j)
    s += std::to_string(j) + "," + format_double(e.arc_left(j)) + "," + format_double(e.arc_right(j)) + "," +
         format_double(e.masses[j]) + "\n";
  return s;
}

std::string value_field_csv(const ScaledValueField& f) {
  std::string s = "r,theta,re,im\n";
  for (std::size_t i = 0; i < f.radii.size(); ++i)
    for (int j = 0; j < f.angle_count; ++j) {
      const auto v = f.values(static_cast<Eigen::Index>(i), j);
      s += format_double(f.radii[i]) + "," + format_double(f.angle(j)) + "," + format_double(v.real()) + "," +
           format_double(v.imag()) + "\n";
    }
  return s;
}

std::string indicator_csv(const IndicatorField& f) {
  std::string s = "r,theta,h\n";
  for (std::size_t i = 0; i < f.radii.size(); ++i)
    for (int j = 0; j < f.angle_count; ++j)
      s += format_double(f.radii[i]) + "," + format_double(f.angle(j)) + "," +
           format_double(f.h(static_cast<Eigen::Index>(i), j)) + "\n";
  return s;
}

std::string zeros_csv(const ZeroSet& zs) {
  std::string s = "modulus,angle_turns,multiplicity,residual\n";
  for (const Zero& z : zs.zeros)
    s += format_double(z.modulus) + "," + format_double(z.angle) + "," + std::to_string(z.multiplicity) + "," +
         format_double(z.residual) + "\n";
  return s;
}

std::string sector_csv(const std::vector<SectorCount>& counts) {
  std::string s = "r,theta1,theta2,count,expected\n";
  for (const SectorCount& c : counts)
    s += format_double(c.r) + "," + format_double(c.theta1) + "," + format_double(c.theta2) + "," +
         std::to_string(c.count) + "," + format_double(c.expected) + "\n";
  return s;
}

std::vector<std::vector<double>> parse_csv(const std::string& text, const std::string& header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header) throw ParameterError("CSV header must be '" + header + "'");
  const auto columns = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',') + 1);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t end = std::min(line.find(',', pos), line.size());
      double x = 0.0;
      const auto [p, ec] = std::from_chars(line.data() + pos, line.data() + end, x);
      if (ec != std::errc() || p != line.data() + end) throw ParameterError("malformed CSV number in '" + line + "'");
      row.push_back(x);
      pos = end + 1;
    }
    if (row.size() != columns) throw ParameterError("CSV row has the wrong number of columns: '" + line + "'");
    rows.push_back(std::move(row));
  }
  return rows;
}

IndicatorField indicator_from_csv(const std::string& text) {
  const auto rows = parse_csv(text, "r,theta,h");
  IndicatorField f;
  for (const auto& row : rows)
    if (f.radii.empty() || f.radii.back() != row[0]) f.radii.push_back(row[0]);
  if (f.radii.empty()) return f;
  if (rows.size() % f.radii.size() != 0) throw ParameterError("indicator CSV is not a full grid");
  f.angle_count = static_cast<int>(rows.size() / f.radii.size());
  f.h.resize(static_cast<Eigen::Index>(f.radii.size()), f.angle_count);
  f.flags.setZero(static_cast<Eigen::Index>(f.radii.size()), f.angle_count);
  for (std::size_t k = 0; k < rows.size(); ++k)
    f.h(static_cast<Eigen::Index>(k / f.angle_count), static_cast<Eigen::Index>(k % f.angle_count)) = rows[k][2];
  return f;
}

void write_field_binary(const fs::path& path, const ScaledValueField& f) {
  std::string out = field_header(kContentValues, static_cast<std::uint32_t>(f.method), f.method_parameter, f.radii,
                                 f.angle_count);
  for (Eigen::Index i = 0; i < f.values.rows(); ++i)
    for (Eigen::Index j = 0; j < f.values.cols(); ++j) {
      put_f64(out, f.values(i, j).real());
      put_f64(out, f.values(i, j).imag());
      put_f64(out, f.log_abs(i, j));
    }
  for (Eigen::Index i = 0; i < f.flags.rows(); ++i)
    for (Eigen::Index j = 0; j < f.flags.cols(); ++j) out.push_back(static_cast<char>(f.flags(i, j)));
  write_text(path, out);
}

void write_field_binary(const fs::path& path, const IndicatorField& f) {
  std::string out = field_header(kContentIndicator, 0, 0.0, f.radii, f.angle_count);
  for (Eigen::Index i = 0; i < f.h.rows(); ++i)
    for (Eigen::Index j = 0; j < f.h.cols(); ++j) put_f64(out, f.h(i, j));
  for (Eigen::Index i = 0; i < f.flags.rows(); ++i)
    for (Eigen::Index j = 0; j < f.flags.cols(); ++j) out.push_back(static_cast<char>(f.flags(i, j)));
  write_text(path, out);
}

ScaledValueField read_value_field_binary(const fs::path& path) {
  Reader in(read_bytes(path), path);
  const FieldHeader h = read_header(in, kContentValues, path);
  if (h.method > 2) throw ParameterError(path.string() + ": unknown field method");
  ScaledValueField f;
  f.radii = h.radii;
  f.angle_count = static_cast<int>(h.cols);
  f.method = static_cast<FieldMethod>(h.method);
  f.method_parameter = h.parameter;
  const auto rows = static_cast<Eigen::Index>(h.radii.size());
  const auto cols = static_cast<Eigen::Index>(h.cols);
  f.values.resize(rows, cols);
  f.log_abs.resize(rows, cols);
  f.flags.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = in.f64(), im = in.f64();
      f.values(i, j) = {re, im};
      f.log_abs(i, j) = in.f64();
    }
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) f.flags(i, j) = static_cast<std::uint8_t>(in.u(1));
  in.finish();
  return f;
}

IndicatorField read_indicator_binary(const fs::path& path) {
  Reader in(read_bytes(path), path);
  const FieldHeader h = read_header(in, kContentIndicator, path);
  IndicatorField f;
  f.radii = h.radii;
  f.angle_count = static_cast<int>(h.cols);
  const auto rows = static_cast<Eigen::Index>(h.radii.size());
  const auto cols = static_cast<Eigen::Index>(h.cols);
  f.h.resize(rows, cols);
  f.flags.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) f.h(i, j) = in.f64();
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) f.flags(i, j) = static_cast<std::uint8_t>(in.u(1));
  in.finish();
  return f;
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pitslab
