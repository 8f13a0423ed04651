#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "etc/matrix.hpp"

namespace etc::io {

/// 17 significant digits ("%.17g"), which round-trips every double.
std::string fmt17(double v);

/// Display rounding used by the console commands ("%.4f").
std::string fmt4(double v);

/// Serializes JSON with every floating-point number printed by fmt17;
/// non-finite numbers become null.
std::string dump_json(const nlohmann::json& j, int indent = 2);

nlohmann::json matrix_to_json(const Matrix& m);
/// Accepts a list of equally long rows; `field` names the offending key in
/// the ConfigError.
Matrix matrix_from_json(const nlohmann::json& j, const std::string& field);

/// Creates the directory (and parents); IoError with the path on failure.
void ensure_directory(const std::filesystem::path& dir);

/// Writes `text` to `path`, replacing any existing file. IoError on failure.
void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

}  // namespace etc::io
