#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "nnrank/tensor.hpp"

namespace nnrank {

enum class Nonnegativity { any, required };

/// {"dims": [N_1, ...], "values": [...]} with values in row-major order
/// (last index fastest).
nlohmann::json tensor_to_json(const DenseTensor& t);
DenseTensor tensor_from_json(const nlohmann::json& j, Nonnegativity check = Nonnegativity::any);

DenseTensor read_tensor_file(const std::filesystem::path& path, Nonnegativity check = Nonnegativity::any);
void write_tensor_file(const std::filesystem::path& path, const DenseTensor& t);

Shape shape_from_json(const nlohmann::json& j);

/// {"dims", "fiber_mode" (1-based), "rank", "terms": [[f_1, ..., f_d], ...]}
nlohmann::json decomposition_to_json(const Decomposition& dec);
Decomposition decomposition_from_json(const nlohmann::json& j);

/// Parses "2,2,3" (whitespace tolerated).
Shape parse_shape(const std::string& text);
std::string format_shape(const Shape& shape);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace nnrank
