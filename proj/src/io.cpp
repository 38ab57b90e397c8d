#include "popspace/io.hpp"

#include <fstream>

namespace popspace {

namespace {

std::vector<std::vector<double>> parse_grid(const Json& j, const char* field,
                                            Index rows, Index cols) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows) {
    throw InputError(std::string("matrix field '") + field + "' must have " +
                     std::to_string(rows) + " rows");
  }
  std::vector<std::vector<double>> grid;
  grid.reserve(static_cast<std::size_t>(rows));
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw InputError(std::string("matrix field '") + field +
                       "' has a row of the wrong length");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(cols));
    for (const auto& cell : row) {
      if (!cell.is_number()) {
        throw InputError(std::string("matrix field '") + field +
                         "' has a non-numeric entry");
      }
      out.push_back(cell.get<double>());
    }
    grid.push_back(std::move(out));
  }
  return grid;
}

}  // namespace

Matrix matrix_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("matrix JSON must be an object");
  if (!j.contains("rows") || !j["rows"].is_number_integer()) {
    throw InputError("matrix field 'rows' missing or not an integer");
  }
  if (!j.contains("cols") || !j["cols"].is_number_integer()) {
    throw InputError("matrix field 'cols' missing or not an integer");
  }
  const Index rows = j["rows"].get<Index>();
  const Index cols = j["cols"].get<Index>();
  if (rows < 1 || cols < 1) {
    throw InputError("matrix dimensions must be positive");
  }
  if (!j.contains("re")) throw InputError("matrix field 're' is missing");
  const auto re = parse_grid(j["re"], "re", rows, cols);
  std::vector<std::vector<double>> im;
  if (j.contains("im") && !j["im"].is_null()) {
    im = parse_grid(j["im"], "im", rows, cols);
  }
  Matrix a(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index k = 0; k < cols; ++k) {
      const double real = re[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      const double imag =
          im.empty() ? 0.0
                     : im[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      a(i, k) = Scalar(real, imag);
    }
  }
  require_finite(a, "matrix entries");
  return a;
}

Json matrix_to_json(const Matrix& a) {
  Json re = Json::array();
  Json im = Json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    Json re_row = Json::array();
    Json im_row = Json::array();
    for (Index j = 0; j < a.cols(); ++j) {
      re_row.push_back(a(i, j).real());
      im_row.push_back(a(i, j).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return Json{{"rows", a.rows()}, {"cols", a.cols()},
              {"re", std::move(re)}, {"im", std::move(im)}};
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& err) {
    throw InputError("malformed JSON in " + path.string() + ": " + err.what());
  }
  return j;
}

Matrix load_matrix(const std::filesystem::path& path) {
  return matrix_from_json(load_json(path));
}

void save_matrix(const std::filesystem::path& path, const Matrix& a) {
  save_json_atomic(path, matrix_to_json(a));
}

void save_text_atomic(const std::filesystem::path& path,
                      const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write file: " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

void save_json_atomic(const std::filesystem::path& path, const Json& j) {
  save_text_atomic(path, j.dump(2) + "\n");
}

}  // namespace popspace
