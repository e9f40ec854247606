#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "sid/measure_field.hpp"

namespace sid {

using Json = nlohmann::ordered_json;

/// Parsed input document: one atomic space, named fields over amplifications
/// of it, named families of field names, and an opaque "truth" section that
/// computational paths never read.
struct Document {
  SpacePtr space;
  std::vector<std::string> field_names;  // document order
  std::map<std::string, MatrixField> fields;
  std::map<std::string, std::vector<std::string>> families;
  Json truth;

  const MatrixField& field(const std::string& name) const;
  const std::vector<std::string>& family(const std::string& name) const;
};

Document parse_document(const Json& doc);
Document load_document(const std::string& path);
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& doc);

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
/// {"atom label": matrix, ...}; infinite atoms are omitted.
Json field_to_json(const MatrixField& f);
Json space_to_json(const AtomicSpace& space);

}  // namespace sid
