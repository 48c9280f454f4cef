#include "prelog/cli/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "prelog/errors.hpp"

namespace prelog::cli {

using json = nlohmann::json;
using cd = std::complex<double>;

namespace {

std::string with_line(const std::string& message, int line) {
  return line > 0 ? "line " + std::to_string(line) + ": " + message : message;
}

std::string escape_token(const std::string& key) {
  std::string out;
  for (const char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

// Maps the JSON pointer of every value in a syntactically valid document to
// the line on which the value starts.
class LineIndex {
 public:
  explicit LineIndex(std::string_view text) : text_(text) {
    skip_space();
    if (pos_ < text_.size()) value("");
  }

  int find(const std::string& pointer) const {
    std::string p = pointer;
    while (true) {
      if (auto it = lines_.find(p); it != lines_.end()) return it->second;
      if (p.empty()) return 0;
      p.erase(p.rfind('/'));
    }
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string string_token() {
    std::string raw;
    ++pos_;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') raw += text_[pos_++];
      raw += text_[pos_++];
    }
    ++pos_;
    return json::parse("\"" + raw + "\"").get<std::string>();
  }

  void value(const std::string& pointer) {
    lines_.emplace(pointer, line_);
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      skip_space();
      while (text_[pos_] != '}') {
        const std::string key = string_token();
        skip_space();
        ++pos_;  // ':'
        skip_space();
        value(pointer + "/" + escape_token(key));
        skip_space();
        if (text_[pos_] == ',') ++pos_;
        skip_space();
      }
      ++pos_;
    } else if (c == '[') {
      ++pos_;
      skip_space();
      for (std::size_t i = 0; text_[pos_] != ']'; ++i) {
        value(pointer + "/" + std::to_string(i));
        skip_space();
        if (text_[pos_] == ',') ++pos_;
        skip_space();
      }
      ++pos_;
    } else if (c == '"') {
      string_token();
    } else {
      while (pos_ < text_.size() && std::string_view(",]} \t\r\n").find(text_[pos_]) == std::string_view::npos) ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

[[noreturn]] void fail(const std::string& pointer, const std::string& message) { throw ScenarioError(pointer, message); }

void require_keys(const json& object, const std::string& pointer, std::set<std::string> allowed) {
  if (!object.is_object()) fail(pointer, "expected an object");
  for (const auto& [key, unused] : object.items())
    if (!allowed.contains(key)) fail(pointer + "/" + escape_token(key), "unknown field '" + key + "'");
}

const json& member(const json& object, const std::string& pointer, const std::string& key) {
  if (!object.contains(key)) fail(pointer, "missing required field '" + key + "'");
  return object.at(key);
}

double real_number(const json& v, const std::string& pointer) {
  if (!v.is_number()) fail(pointer, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(pointer, "expected a finite number");
  return x;
}

double positive_number(const json& v, const std::string& pointer) {
  const double x = real_number(v, pointer);
  if (!(x > 0.0)) fail(pointer, "expected a positive number");
  return x;
}

std::uint64_t unsigned_integer(const json& v, const std::string& pointer) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  fail(pointer, "expected a nonnegative integer");
}

cd complex_number(const json& v, const std::string& pointer) {
  if (v.is_number()) return real_number(v, pointer);
  if (v.is_array() && v.size() == 2)
    return {real_number(v[0], pointer + "/0"), real_number(v[1], pointer + "/1")};
  fail(pointer, "expected a number or a [re, im] pair");
}

std::vector<cd> complex_list(const json& v, const std::string& pointer) {
  if (!v.is_array() || v.empty()) fail(pointer, "expected a nonempty array");
  std::vector<cd> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(complex_number(v[i], pointer + "/" + std::to_string(i)));
  return out;
}

json complex_to_json(cd z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

SpectrumSpec parse_spectrum(const json& v, const std::string& pointer) {
  if (!v.is_object()) fail(pointer, "expected an object");
  if (v.contains("preset")) {
    require_keys(v, pointer, {"preset", "half_width"});
    const json& preset = v.at("preset");
    if (!preset.is_string()) fail(pointer + "/preset", "expected a string");
    const auto name = preset.get<std::string>();
    if (name == "white") {
      if (v.contains("half_width")) fail(pointer + "/half_width", "white spectrum takes no half_width");
      return PresetSpectrum{name, 0.0};
    }
    if (name == "flat_band") {
      const double w = positive_number(member(v, pointer, "half_width"), pointer + "/half_width");
      if (w > 0.5) fail(pointer + "/half_width", "half_width must lie in (0, 1/2]");
      return PresetSpectrum{name, w};
    }
    fail(pointer + "/preset", "unknown preset '" + name + "' (expected white or flat_band)");
  }
  if (v.contains("trigonometric")) {
    require_keys(v, pointer, {"trigonometric"});
    return TrigonometricSpectrum{complex_list(v.at("trigonometric"), pointer + "/trigonometric")};
  }
  require_keys(v, pointer, {"pieces", "point_masses"});
  PiecewiseSpectrum out;
  if (v.contains("pieces")) {
    const json& pieces = v.at("pieces");
    if (!pieces.is_array()) fail(pointer + "/pieces", "expected an array");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const std::string at = pointer + "/pieces/" + std::to_string(i);
      const json& p = pieces[i];
      require_keys(p, at, {"lo", "hi", "density", "polynomial"});
      PieceSpec piece{real_number(member(p, at, "lo"), at + "/lo"), real_number(member(p, at, "hi"), at + "/hi"), {}};
      if (p.contains("density") == p.contains("polynomial")) fail(at, "give exactly one of 'density' or 'polynomial'");
      if (p.contains("density")) {
        piece.coefficients = {real_number(p.at("density"), at + "/density")};
      } else {
        const json& c = p.at("polynomial");
        if (!c.is_array() || c.empty()) fail(at + "/polynomial", "expected a nonempty array");
        for (std::size_t k = 0; k < c.size(); ++k)
          piece.coefficients.push_back(real_number(c[k], at + "/polynomial/" + std::to_string(k)));
      }
      out.pieces.push_back(std::move(piece));
    }
  }
  if (v.contains("point_masses")) {
    const json& masses = v.at("point_masses");
    if (!masses.is_array()) fail(pointer + "/point_masses", "expected an array");
    for (std::size_t i = 0; i < masses.size(); ++i) {
      const std::string at = pointer + "/point_masses/" + std::to_string(i);
      require_keys(masses[i], at, {"location", "weight"});
      out.point_masses.push_back({real_number(member(masses[i], at, "location"), at + "/location"),
                                  real_number(member(masses[i], at, "weight"), at + "/weight")});
    }
  }
  if (out.pieces.empty() && out.point_masses.empty()) fail(pointer, "spectrum has neither pieces nor point masses");
  return out;
}

json spectrum_to_json(const SpectrumSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PresetSpectrum>) {
          json out{{"preset", s.name}};
          if (s.name == "flat_band") out["half_width"] = s.half_width;
          return out;
        } else if constexpr (std::is_same_v<T, TrigonometricSpectrum>) {
          json coeffs = json::array();
          for (const cd& c : s.coefficients) coeffs.push_back(complex_to_json(c));
          return json{{"trigonometric", coeffs}};
        } else {
          json pieces = json::array(), masses = json::array();
          for (const auto& p : s.pieces) {
            json piece{{"lo", p.lo}, {"hi", p.hi}};
            if (p.coefficients.size() == 1)
              piece["density"] = p.coefficients[0];
            else
              piece["polynomial"] = p.coefficients;
            pieces.push_back(piece);
          }
          for (const auto& m : s.point_masses) masses.push_back({{"location", m.location}, {"weight", m.weight}});
          return json{{"pieces", pieces}, {"point_masses", masses}};
        }
      },
      spec);
}

ModelSpec parse_model(const json& v, const std::string& pointer) {
  if (!v.is_object()) fail(pointer, "expected an object");
  const json& kind = member(v, pointer, "kind");
  if (!kind.is_string()) fail(pointer + "/kind", "expected a string");
  ModelSpec out;
  if (v.contains("mean")) out.mean = complex_number(v.at("mean"), pointer + "/mean");
  const auto name = kind.get<std::string>();
  if (name == "gaussian") {
    require_keys(v, pointer, {"kind", "mean", "spectrum"});
    out.kind = GaussianSpec{parse_spectrum(member(v, pointer, "spectrum"), pointer + "/spectrum")};
  } else if (name == "fir") {
    require_keys(v, pointer, {"kind", "mean", "taps", "innovation"});
    FirSpec fir{complex_list(member(v, pointer, "taps"), pointer + "/taps"), InnovationLaw::ComplexGaussian};
    if (v.contains("innovation")) {
      const json& law = v.at("innovation");
      if (!law.is_string()) fail(pointer + "/innovation", "expected a string");
      try {
        fir.innovation = innovation_law_from_string(law.get<std::string>());
      } catch (const DomainError& e) {
        fail(pointer + "/innovation", e.what());
      }
    }
    out.kind = std::move(fir);
  } else {
    fail(pointer + "/kind", "unknown model kind '" + name + "' (expected gaussian or fir)");
  }
  return out;
}

std::vector<double> parse_grid(const json& v, const std::string& pointer) {
  std::vector<double> grid;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) grid.push_back(positive_number(v[i], pointer + "/" + std::to_string(i)));
  } else if (v.is_object()) {
    require_keys(v, pointer, {"start", "stop", "points", "log_spaced"});
    const double start = positive_number(member(v, pointer, "start"), pointer + "/start");
    const double stop = positive_number(member(v, pointer, "stop"), pointer + "/stop");
    const auto points = unsigned_integer(member(v, pointer, "points"), pointer + "/points");
    bool log_spaced = true;
    if (v.contains("log_spaced")) {
      if (!v.at("log_spaced").is_boolean()) fail(pointer + "/log_spaced", "expected a boolean");
      log_spaced = v.at("log_spaced").get<bool>();
    }
    if (points == 0 || points > 100'000) fail(pointer + "/points", "points must lie in [1, 100000]");
    if (points == 1 && start != stop) fail(pointer + "/points", "a single point needs start == stop");
    for (std::uint64_t i = 0; i < points; ++i) {
      const double t = points == 1 ? 0.0 : double(i) / double(points - 1);
      if (i + 1 == points && points > 1)
        grid.push_back(stop);
      else if (log_spaced)
        grid.push_back(std::pow(10.0, std::log10(start) + t * (std::log10(stop) - std::log10(start))));
      else
        grid.push_back(start + t * (stop - start));
    }
  } else {
    fail(pointer, "expected an array or a {start, stop, points, log_spaced} object");
  }
  if (grid.empty()) fail(pointer, "snr grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) fail(pointer + (v.is_array() ? "/" + std::to_string(i) : ""), "snr grid must be strictly increasing");
  return grid;
}

Scenario parse_document(const json& doc) {
  require_keys(doc, "",
               {"name", "model", "snr_grid", "gamma_mode", "outputs", "seed", "noise_variance", "n_list", "samples",
                "path_length", "segment_length", "tolerances"});
  Scenario s;
  const json& name = member(doc, "", "name");
  if (!name.is_string()) fail("/name", "expected a string");
  s.name = name.get<std::string>();
  s.model = parse_model(member(doc, "", "model"), "/model");
  try {
    build_model(s.model);
  } catch (const std::logic_error& e) {
    const std::string at = std::holds_alternative<GaussianSpec>(s.model.kind) ? "/model/spectrum" : "/model/taps";
    fail(at, e.what());
  }
  s.snr_grid = parse_grid(member(doc, "", "snr_grid"), "/snr_grid");

  if (doc.contains("gamma_mode")) {
    const json& g = doc.at("gamma_mode");
    if (g.is_string()) {
      if (g.get<std::string>() != "optimized") fail("/gamma_mode", "expected \"optimized\" or a positive number");
    } else {
      s.fixed_gamma = positive_number(g, "/gamma_mode");
    }
  }
  if (doc.contains("outputs")) {
    const json& outputs = doc.at("outputs");
    if (!outputs.is_array()) fail("/outputs", "expected an array");
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      const std::string at = "/outputs/" + std::to_string(i);
      if (!outputs[i].is_string()) fail(at, "expected a string");
      const auto item = outputs[i].get<std::string>();
      if (std::find(std::begin(kKnownOutputs), std::end(kKnownOutputs), item) == std::end(kKnownOutputs))
        fail(at, "unknown output '" + item + "'");
      s.outputs.push_back(item);
    }
  }
  if (doc.contains("seed")) s.seed = unsigned_integer(doc.at("seed"), "/seed");
  if (doc.contains("noise_variance")) s.noise_variance = positive_number(doc.at("noise_variance"), "/noise_variance");
  if (doc.contains("n_list")) {
    const json& list = doc.at("n_list");
    if (!list.is_array() || list.empty()) fail("/n_list", "expected a nonempty array");
    s.n_list.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string at = "/n_list/" + std::to_string(i);
      const auto n = unsigned_integer(list[i], at);
      if (n < 1 || n > 8192) fail(at, "matrix order must lie in [1, 8192]");
      s.n_list.push_back(static_cast<std::int64_t>(n));
    }
  }
  if (doc.contains("samples")) s.samples = unsigned_integer(doc.at("samples"), "/samples");
  if (doc.contains("path_length")) s.path_length = unsigned_integer(doc.at("path_length"), "/path_length");
  if (doc.contains("segment_length")) {
    s.segment_length = unsigned_integer(doc.at("segment_length"), "/segment_length");
    if (s.segment_length < 2 || (s.segment_length & (s.segment_length - 1)) != 0)
      fail("/segment_length", "segment_length must be a power of two >= 2");
  }
  if (s.path_length < 8 * s.segment_length) fail("/path_length", "path_length must be at least 8 * segment_length");
  if (doc.contains("tolerances")) {
    const json& t = doc.at("tolerances");
    require_keys(t, "/tolerances", {"prelog", "mi_sigmas"});
    if (t.contains("prelog")) s.tolerances.prelog = positive_number(t.at("prelog"), "/tolerances/prelog");
    if (t.contains("mi_sigmas")) s.tolerances.mi_sigmas = positive_number(t.at("mi_sigmas"), "/tolerances/mi_sigmas");
  }
  return s;
}

}  // namespace

ScenarioError::ScenarioError(std::string pointer, const std::string& message, int line)
    : std::runtime_error(with_line(message + (pointer.empty() ? "" : " (at " + pointer + ")"), line)),
      pointer_(std::move(pointer)),
      line_(line) {}

int locate_line(std::string_view text, const std::string& pointer) {
  try {
    return LineIndex(text).find(pointer);
  } catch (const std::exception&) {
    return 0;
  }
}

ScenarioError with_source_line(const ScenarioError& error, std::string_view text) {
  if (error.line() > 0) return error;
  std::string message = error.what();
  if (const auto at = message.rfind(" (at "); at != std::string::npos) message.erase(at);
  return ScenarioError(error.pointer(), message, locate_line(text, error.pointer()));
}

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()) && i + 1 < e.byte; ++i)
      if (text[i] == '\n') ++line;
    throw ScenarioError("", std::string("malformed JSON: ") + e.what(), line);
  }
  try {
    return parse_document(doc);
  } catch (const ScenarioError& e) {
    throw with_source_line(e, text);
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("", "cannot read scenario file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

nlohmann::ordered_json to_json(const Scenario& s) {
  nlohmann::ordered_json out;
  out["name"] = s.name;
  nlohmann::ordered_json model;
  if (const auto* g = std::get_if<GaussianSpec>(&s.model.kind)) {
    model["kind"] = "gaussian";
    model["spectrum"] = spectrum_to_json(g->spectrum);
  } else {
    const auto& f = std::get<FirSpec>(s.model.kind);
    model["kind"] = "fir";
    json taps = json::array();
    for (const cd& t : f.taps) taps.push_back(complex_to_json(t));
    model["taps"] = taps;
    model["innovation"] = to_string(f.innovation);
  }
  model["mean"] = complex_to_json(s.model.mean);
  out["model"] = model;
  out["snr_grid"] = s.snr_grid;
  if (s.fixed_gamma)
    out["gamma_mode"] = *s.fixed_gamma;
  else
    out["gamma_mode"] = "optimized";
  out["outputs"] = s.outputs;
  out["seed"] = s.seed;
  out["noise_variance"] = s.noise_variance;
  out["n_list"] = s.n_list;
  out["samples"] = s.samples;
  out["path_length"] = s.path_length;
  out["segment_length"] = s.segment_length;
  out["tolerances"] = {{"prelog", s.tolerances.prelog}, {"mi_sigmas", s.tolerances.mi_sigmas}};
  return out;
}

std::string serialize(const Scenario& scenario) { return to_json(scenario).dump(2) + "\n"; }

SpectralDistribution build_spectrum(const SpectrumSpec& spec) {
  return std::visit(
      [](const auto& s) -> SpectralDistribution {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, PresetSpectrum>) {
          return s.name == "white" ? SpectralDistribution::white() : SpectralDistribution::flat_band(s.half_width);
        } else if constexpr (std::is_same_v<T, TrigonometricSpectrum>) {
          return SpectralDistribution::trigonometric(s.coefficients);
        } else {
          std::vector<DensityPiece> pieces;
          for (const auto& p : s.pieces) {
            if (p.coefficients.size() == 1)
              pieces.push_back(DensityPiece::constant({p.lo, p.hi}, p.coefficients[0]));
            else
              pieces.push_back(DensityPiece::polynomial({p.lo, p.hi}, p.coefficients));
          }
          return SpectralDistribution(std::move(pieces), s.point_masses);
        }
      },
      spec);
}

FadingModel build_model(const ModelSpec& spec) {
  if (const auto* g = std::get_if<GaussianSpec>(&spec.kind)) return gaussian_model(build_spectrum(g->spectrum), spec.mean);
  const auto& f = std::get<FirSpec>(spec.kind);
  return fir_model(f.taps, f.innovation, spec.mean);
}

}  // namespace prelog::cli
