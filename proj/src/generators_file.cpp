#include "hypangles/generators_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace hypangles {

namespace {

using nlohmann::json;

double entry_value(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_rational(v.get<std::string>());
  throw std::invalid_argument("matrix entry must be a number or a rational string");
}

GroupElement parse_matrix(const json& m) {
  if (!m.is_array() || m.size() != 2 || !m[0].is_array() || !m[1].is_array() ||
      m[0].size() != 2 || m[1].size() != 2) {
    throw std::invalid_argument("generator must be a 2x2 array of rows");
  }
  return GroupElement::from_entries(entry_value(m[0][0]), entry_value(m[0][1]),
                                    entry_value(m[1][0]), entry_value(m[1][1]));
}

bool approx_equal(const GroupElement& x, const GroupElement& y) {
  for (int i = 0; i < 4; ++i) {
    if (std::abs(x.entries()[i] - y.entries()[i]) > 1e-9) return false;
  }
  return true;
}

}  // namespace

double parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  auto number = [](std::string_view s) {
    double v = 0.0;
    const auto* first = s.data();
    if (!s.empty() && s.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
      throw std::invalid_argument("cannot parse number '" + std::string(s) + "'");
    }
    return v;
  };
  text = trim(text);
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const double den = number(trim(text.substr(slash + 1)));
    if (den == 0.0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return number(trim(text.substr(0, slash))) / den;
  }
  return number(text);
}

LatticeSpec parse_generator_spec(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("generator file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("generator file must be a JSON object");
  if (!doc.contains("generators") || !doc["generators"].is_array()) {
    throw std::invalid_argument("generator file needs a 'generators' array");
  }

  LatticeSpec spec;
  spec.kind = LatticeKind::generators;
  spec.label = doc.value("label", std::string("generators"));
  if (!doc.contains("covolume")) throw std::invalid_argument("generator file needs 'covolume'");
  spec.covolume = entry_value(doc["covolume"]);
  spec.stabilizer_order = doc.value("stabilizer_order", 1);

  if (doc.contains("base_point")) {
    const auto& bp = doc["base_point"];
    if (!bp.is_array() || bp.size() != 2) {
      throw std::invalid_argument("base_point must be [x, y]");
    }
    const double x = entry_value(bp[0]);
    const double y = entry_value(bp[1]);
    if (!(y > 0.0)) throw std::invalid_argument("base_point must lie in the upper half-plane");
    // z -> (z - x) / y sends x + i y to i.
    const double s = std::sqrt(y);
    spec.conjugator = (x == 0.0 && y == 1.0) ? GroupElement{}
                                             : GroupElement::from_entries(1.0 / s, -x / s, 0.0, s);
  }

  const GroupElement conj_inv = spec.conjugator.inverse();
  for (const auto& m : doc["generators"]) {
    spec.generators.push_back(spec.conjugator * parse_matrix(m) * conj_inv);
  }
  if (spec.generators.empty()) throw std::invalid_argument("generator list is empty");

  const std::size_t given = spec.generators.size();
  for (std::size_t i = 0; i < given; ++i) {
    const GroupElement inv = spec.generators[i].inverse();
    bool present = false;
    for (const auto& h : spec.generators) present = present || approx_equal(h, inv);
    if (!present) spec.generators.push_back(inv);
  }
  spec.validate();
  return spec;
}

LatticeSpec load_generator_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open generator file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_generator_spec(buf.str());
}

}  // namespace hypangles
