#include "etc/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "etc/errors.hpp"

namespace etc::io {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt4(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

namespace {

void dump(const nlohmann::json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string pad_close = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fmt17(v) : "null";
      break;
    }
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + nlohmann::json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump(it.value(), indent, depth + 1, out);
      }
      out += nl + pad_close + "}";
      break;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      // Arrays of scalars stay on one line (matrix rows, index lists).
      const bool flat = std::none_of(j.begin(), j.end(), [](const auto& v) { return v.is_structured(); });
      out += "[";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += flat ? ", " : ",";
        if (!flat) out += nl + pad;
        first = false;
        dump(v, indent, depth + 1, out);
      }
      if (!flat) out += nl + pad_close;
      out += "]";
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& j, int indent) {
  std::string out;
  dump(j, indent, 0, out);
  return out;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : m.to_rows()) rows.push_back(r);
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError("config field '" + field + "': expected a list of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& r = j[i];
    if (!r.is_array()) throw ConfigError("config field '" + field + "[" + std::to_string(i) + "]': expected a row list");
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number()) throw ConfigError("config field '" + field + "[" + std::to_string(i) + "]': non-numeric entry");
      row.push_back(v.get<double>());
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError("config field '" + field + "': rows have different lengths");
    rows.push_back(std::move(row));
  }
  return Matrix::from_rows(rows);
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace etc::io
