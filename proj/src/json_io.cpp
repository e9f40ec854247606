#include "sid/json_io.hpp"

#include <fstream>
#include <sstream>

#include "sid/error.hpp"

namespace sid {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::InvalidInput, what); }

Atom parse_atom(const Json& j) {
  if (!j.is_object()) bad("atom entries must be objects");
  Atom a;
  if (!j.contains("label") || !j["label"].is_string()) bad("atom needs a string label");
  a.label = j["label"].get<std::string>();
  if (j.contains("weight")) {
    if (!j["weight"].is_number()) bad("weight of atom " + a.label + " must be a number");
    a.weight = j["weight"].get<double>();
  }
  if (!j.contains("fiber_dim")) bad("atom " + a.label + " needs fiber_dim");
  const Json& d = j["fiber_dim"];
  if (d.is_string()) {
    if (d.get<std::string>() != "inf") bad("fiber_dim must be a positive integer or \"inf\"");
  } else if (d.is_number_integer()) {
    const long long n = d.get<long long>();
    if (n < 1) bad("fiber_dim of atom " + a.label + " must be positive");
    a.fiber_dim = static_cast<int>(n);
  } else {
    bad("fiber_dim must be a positive integer or \"inf\"");
  }
  if (j.contains("class")) {
    if (!j["class"].is_number_integer() || j["class"].get<long long>() < 1)
      bad("class of atom " + a.label + " must be a positive integer");
    a.infinite_class = j["class"].get<int>();
  }
  if (j.contains("phi")) a.spectral_value = complex_from_json(j["phi"]);
  return a;
}

MatrixField parse_field(const std::string& name, const Json& j, const SpacePtr& space) {
  if (!j.is_object()) bad("field " + name + " must map atom labels to matrices");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!space->index_of(it.key())) bad("field " + name + " names unknown atom " + it.key());

  std::vector<std::optional<Matrix>> blocks(space->size());
  int m = 0;
  for (std::size_t i = 0; i < space->size(); ++i) {
    const Atom& a = space->atom(i);
    const bool present = j.contains(a.label) && !j[a.label].is_null();
    if (a.is_infinite()) {
      if (present)
        throw Error(ErrorKind::SymbolicFiber, "field " + name + " carries a matrix on an infinite atom", a.label);
      continue;
    }
    if (!present) bad("field " + name + " is missing atom " + a.label);
    Matrix b = matrix_from_json(j[a.label]);
    const int n = *a.fiber_dim;
    if (b.rows() != b.cols() || b.rows() % n != 0 || b.rows() == 0)
      throw Error(ErrorKind::DimensionMismatch,
                  "block of field " + name + " is not a multiple of the fiber dimension", a.label);
    const int mi = static_cast<int>(b.rows()) / n;
    if (m == 0) m = mi;
    if (m != mi)
      throw Error(ErrorKind::DimensionMismatch,
                  "field " + name + " mixes amplifications across atoms", a.label);
    blocks[i] = std::move(b);
  }
  return MatrixField(space->amplified(m == 0 ? 1 : m), std::move(blocks));
}

}  // namespace

const MatrixField& Document::field(const std::string& name) const {
  auto it = fields.find(name);
  if (it == fields.end()) bad("no field named " + name);
  return it->second;
}

const std::vector<std::string>& Document::family(const std::string& name) const {
  auto it = families.find(name);
  if (it == families.end()) bad("no family named " + name);
  return it->second;
}

Document parse_document(const Json& doc) {
  if (!doc.is_object()) bad("document must be a JSON object");
  if (!doc.contains("space") || !doc["space"].contains("atoms") || !doc["space"]["atoms"].is_array())
    bad("document needs space.atoms");
  std::vector<Atom> atoms;
  for (const Json& a : doc["space"]["atoms"]) atoms.push_back(parse_atom(a));

  Document out;
  out.space = AtomicSpace::build(std::move(atoms));
  if (doc.contains("fields")) {
    if (!doc["fields"].is_object()) bad("fields must be an object");
    for (auto it = doc["fields"].begin(); it != doc["fields"].end(); ++it) {
      out.field_names.push_back(it.key());
      out.fields.emplace(it.key(), parse_field(it.key(), it.value(), out.space));
    }
  }
  if (doc.contains("families")) {
    if (!doc["families"].is_object()) bad("families must be an object");
    for (auto it = doc["families"].begin(); it != doc["families"].end(); ++it) {
      if (!it.value().is_array()) bad("family " + it.key() + " must list field names");
      std::vector<std::string> names;
      for (const Json& n : it.value()) {
        if (!n.is_string() || !out.fields.count(n.get<std::string>()))
          bad("family " + it.key() + " references an unknown field");
        names.push_back(n.get<std::string>());
      }
      out.families.emplace(it.key(), std::move(names));
    }
  }
  out.truth = doc.contains("truth") ? doc["truth"] : Json::object();
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

Document load_document(const std::string& path) { return parse_document(read_json_file(path)); }

void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << doc.dump(2) << '\n';
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  bad("complex entries are numbers or [re, im] pairs");
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) bad("matrices are nonempty arrays of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) bad("matrix rows must be arrays");
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) bad("matrix rows have unequal length");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

Json field_to_json(const MatrixField& f) {
  Json out = Json::object();
  for (std::size_t i : f.finite_atoms()) out[f.space()->atom(i).label] = matrix_to_json(f.block(i));
  return out;
}

Json space_to_json(const AtomicSpace& space) {
  Json atoms = Json::array();
  for (std::size_t i = 0; i < space.size(); ++i) {
    const Atom& a = space.atom(i);
    Json j = {{"label", a.label}, {"weight", a.weight}};
    if (a.is_infinite()) j["fiber_dim"] = "inf";
    else j["fiber_dim"] = space.base_dim(i);
    if (a.infinite_class) j["class"] = *a.infinite_class;
    if (a.spectral_value) j["phi"] = complex_to_json(*a.spectral_value);
    atoms.push_back(std::move(j));
  }
  return {{"atoms", atoms}};
}

}  // namespace sid
