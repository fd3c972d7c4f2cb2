#include "qsr/serialize.hpp"

#include "qsr/error.hpp"

namespace qsr {

using nlohmann::json;

json layout_to_json(const SystemLayout& layout) {
  json j = json::array();
  for (const auto& f : layout.factors()) j.push_back({f.label.name(), f.dim});
  return j;
}

SystemLayout layout_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("layout must be an array of [label, dim] pairs");
  std::vector<Factor> fs;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() || !entry[1].is_number_integer())
      throw ConfigError("layout entry must be [label, dim]");
    fs.push_back({SystemLabel(entry[0].get<std::string>()), entry[1].get<Index>()});
  }
  return SystemLayout(std::move(fs));
}

json matrix_to_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json rr = json::array(), ir = json::array();
    for (Index k = 0; k < m.cols(); ++k) {
      rr.push_back(m(i, k).real());
      ir.push_back(m(i, k).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  return {{"re", re}, {"im", im}};
}

namespace {

Index rows_of(const json& part) {
  if (!part.is_array()) throw ConfigError("matrix part must be an array of rows");
  return static_cast<Index>(part.size());
}

}  // namespace

Matrix matrix_from_json(const json& j) {
  if (!j.contains("re")) throw ConfigError("matrix needs a 're' field");
  const json& re = j.at("re");
  const Index rows = rows_of(re);
  const Index cols = rows ? static_cast<Index>(re[0].size()) : 0;
  const bool has_im = j.contains("im");
  if (has_im && rows_of(j.at("im")) != rows) throw ConfigError("'re' and 'im' shapes differ");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& rr = re[static_cast<std::size_t>(i)];
    if (static_cast<Index>(rr.size()) != cols) throw ConfigError("ragged matrix rows");
    for (Index k = 0; k < cols; ++k) {
      const double imv = has_im ? j.at("im")[static_cast<std::size_t>(i)].at(static_cast<std::size_t>(k)).get<double>() : 0.0;
      m(i, k) = cplx(rr[static_cast<std::size_t>(k)].get<double>(), imv);
    }
  }
  return m;
}

json state_to_json(const QuantumState& s) {
  json j = matrix_to_json(s.matrix());
  j["layout"] = layout_to_json(s.layout());
  return j;
}

QuantumState state_from_json(const json& j) {
  if (!j.contains("layout")) throw ConfigError("state needs a 'layout' field");
  return QuantumState::from_matrix(layout_from_json(j.at("layout")), matrix_from_json(j));
}

json pure_to_json(const PureState& s) {
  json re = json::array(), im = json::array();
  for (Index i = 0; i < s.vector().size(); ++i) {
    re.push_back(s.vector()(i).real());
    im.push_back(s.vector()(i).imag());
  }
  return {{"layout", layout_to_json(s.layout())}, {"re", re}, {"im", im}};
}

PureState pure_from_json(const json& j) {
  if (!j.contains("layout") || !j.contains("re")) throw ConfigError("pure state needs 'layout' and 're'");
  const json& re = j.at("re");
  Vector v(static_cast<Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i) {
    const double imv = j.contains("im") ? j.at("im").at(i).get<double>() : 0.0;
    v(static_cast<Index>(i)) = cplx(re[i].get<double>(), imv);
  }
  return PureState::from_vector(layout_from_json(j.at("layout")), std::move(v));
}

json map_to_json(const IsometryMap& v) {
  json j = matrix_to_json(v.matrix());
  j["in"] = layout_to_json(v.in());
  j["out"] = layout_to_json(v.out());
  j["kind"] = to_string(v.kind());
  return j;
}

IsometryMap map_from_json(const json& j) {
  for (const char* key : {"in", "out", "kind"})
    if (!j.contains(key)) throw ConfigError(std::string("map needs a '") + key + "' field");
  return IsometryMap::certified(layout_from_json(j.at("in")), layout_from_json(j.at("out")),
                                matrix_from_json(j), map_kind_from_string(j.at("kind").get<std::string>()));
}

}  // namespace qsr
