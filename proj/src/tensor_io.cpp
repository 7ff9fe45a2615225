#include "nnrank/tensor_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "nnrank/errors.hpp"

namespace nnrank {

using nlohmann::json;

Shape shape_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw FormatError("\"dims\" must be a nonempty array");
    std::vector<std::size_t> dims;
    for (const auto& v : j) {
        if (!v.is_number_integer() || v.get<long long>() < 1) {
            throw FormatError("\"dims\" entries must be positive integers");
        }
        dims.push_back(v.get<std::size_t>());
    }
    return Shape(std::move(dims));
}

json tensor_to_json(const DenseTensor& t) {
    json j;
    j["dims"] = t.shape().dims();
    j["values"] = std::vector<double>(t.values().begin(), t.values().end());
    return j;
}

DenseTensor tensor_from_json(const json& j, Nonnegativity check) {
    if (!j.is_object() || !j.contains("dims") || !j.contains("values")) {
        throw FormatError("tensor JSON needs \"dims\" and \"values\"");
    }
    Shape shape = shape_from_json(j.at("dims"));
    const auto& vals = j.at("values");
    if (!vals.is_array()) throw FormatError("\"values\" must be an array");
    if (vals.size() != shape.total()) {
        throw FormatError("\"values\" has " + std::to_string(vals.size()) + " entries, dims require " +
                          std::to_string(shape.total()));
    }
    std::vector<double> values;
    values.reserve(vals.size());
    for (const auto& v : vals) {
        if (!v.is_number()) throw FormatError("\"values\" entries must be numbers");
        values.push_back(v.get<double>());
    }
    DenseTensor t(std::move(shape), std::move(values));
    if (check == Nonnegativity::required && !t.is_nonnegative()) {
        throw NegativeEntry("tensor has a negative entry");
    }
    return t;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

DenseTensor read_tensor_file(const std::filesystem::path& path, Nonnegativity check) {
    return tensor_from_json(read_json_file(path), check);
}

void write_tensor_file(const std::filesystem::path& path, const DenseTensor& t) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    out << tensor_to_json(t).dump(2) << '\n';
}

json decomposition_to_json(const Decomposition& dec) {
    json terms = json::array();
    for (const auto& term : dec.terms()) terms.push_back(term.factors);
    json j;
    j["dims"] = dec.shape().dims();
    j["fiber_mode"] = dec.shape().fiber_mode() + 1;
    j["rank"] = dec.rank();
    j["terms"] = std::move(terms);
    return j;
}

Decomposition decomposition_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dims") || !j.contains("terms")) {
        throw FormatError("decomposition JSON needs \"dims\" and \"terms\"");
    }
    Decomposition dec(shape_from_json(j.at("dims")));
    try {
        for (const auto& t : j.at("terms")) {
            dec.push_back(Rank1Term{t.get<std::vector<std::vector<double>>>()});
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("bad term: ") + e.what());
    }
    return dec;
}

Shape parse_shape(const std::string& text) {
    std::vector<std::size_t> dims;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t b = 0;
        std::size_t e = item.size();
        while (b < e && std::isspace(static_cast<unsigned char>(item[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(item[e - 1]))) --e;
        const std::string tok = item.substr(b, e - b);
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
            throw InvalidArgument("bad shape \"" + text + "\": expected comma-separated positive integers");
        }
        dims.push_back(std::stoul(tok));
    }
    if (dims.empty()) throw InvalidArgument("empty shape");
    return Shape(std::move(dims));
}

std::string format_shape(const Shape& shape) {
    std::string s;
    for (std::size_t j = 0; j < shape.order(); ++j) {
        if (j) s += 'x';
        s += std::to_string(shape.dim(j));
    }
    return s;
}

}  // namespace nnrank
