#pragma once

// Serialisation: JSON for specs, configs and reports; CSV for tables; a
// little-endian binary cache for fields. Floats are written in the shortest
// decimal form that round-trips, so identical inputs give identical bytes.

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "pitslab/evaluator.hpp"
#include "pitslab/pits.hpp"
#include "pitslab/sequences.hpp"
#include "pitslab/spectrum.hpp"
#include "pitslab/zeros.hpp"

namespace pitslab {

using Json = nlohmann::ordered_json;

Json spec_to_json(const SequenceSpec& spec);
/// Throws ParameterError on unknown kinds, unknown or missing keys, or bad values.
SequenceSpec spec_from_json(const Json& j);

/// Keys exactly {J, min_normalized_mass, threshold, verdict, witness}.
Json to_json(const NoGapReport& r);
Json to_json(const SpectralEstimate& e);
Json to_json(const EquidistributionReport& r);
Json to_json(const L1Discrepancy& d);
Json to_json(const ProbeResult& p);
Json to_json(const PitsProfile& p);
Json zero_manifest(const ZeroSet& zs);
Json to_json(const VerifyOptions& o);
/// Verification report, schema "pits-report/1".
Json to_json(const VerificationReport& r);
std::string render_text(const VerificationReport& r);

std::string format_double(double x);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

// CSV tables, header first.
std::string sequence_csv(const SequenceWindow& w);                                 // index,re,im
std::string lags_csv(const AutocorrelationProfile& p);                             // n,k,re,im
std::string arcs_csv(const SpectralEstimate& e);                                   // j,left,right,mass
std::string value_field_csv(const ScaledValueField& f);                            // r,theta,re,im
std::string indicator_csv(const IndicatorField& f);                                // r,theta,h
std::string zeros_csv(const ZeroSet& zs);                                          // modulus,angle_turns,multiplicity,residual
std::string sector_csv(const std::vector<SectorCount>& counts);                    // r,theta1,theta2,count,expected

/// Parses CSV text into rows of numbers; the header is checked against `header`.
std::vector<std::vector<double>> parse_csv(const std::string& text, const std::string& header);
/// Rebuilds an indicator field from indicator_csv output (flags are not carried).
IndicatorField indicator_from_csv(const std::string& text);

// Binary field cache, magic "PITSFLD1"; layout in docs/formats.md.
void write_field_binary(const std::filesystem::path& path, const ScaledValueField& f);
void write_field_binary(const std::filesystem::path& path, const IndicatorField& f);
ScaledValueField read_value_field_binary(const std::filesystem::path& path);
IndicatorField read_indicator_binary(const std::filesystem::path& path);

/// FNV-1a 64 of the text, as 16 hex digits.
std::string content_hash(const std::string& text);

}  // namespace pitslab
