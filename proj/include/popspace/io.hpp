#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>

#include "popspace/matrix.hpp"

namespace popspace {

using Json = nlohmann::json;

// Matrix wire format: {"rows": int, "cols": int, "re": [[...]], "im":
// [[...]]} with row-major nested arrays; "im" defaults to zeros.
Matrix matrix_from_json(const Json& j);
Json matrix_to_json(const Matrix& a);

Matrix load_matrix(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const Matrix& a);

Json load_json(const std::filesystem::path& path);

// Writes to a temporary sibling and renames, so a crashed run never
// leaves a partial report at the target path.
void save_json_atomic(const std::filesystem::path& path, const Json& j);
void save_text_atomic(const std::filesystem::path& path,
                      const std::string& text);

}  // namespace popspace
