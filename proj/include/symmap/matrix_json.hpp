#pragma once

// Matrix JSON format: {"rows":n,"cols":n,"entries":[[re,im],...]} in row-major order.

#include <string>

#include "json.hpp"
#include "symmap/linalg.hpp"

namespace symmap {

using json = nlohmann::json;

inline json matrix_to_json(const ComplexMatrix& m) {
    json entries = json::array();
    for (const auto& c : m.entries()) entries.push_back(json::array({c.real(), c.imag()}));
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

inline ComplexMatrix matrix_from_json(const json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
        throw ContractError("matrix json: expected object with rows, cols, entries");
    if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer())
        throw ContractError("matrix json: rows/cols must be integers");
    const auto rows = j["rows"].get<long long>();
    const auto cols = j["cols"].get<long long>();
    if (rows <= 0 || cols <= 0) throw DimensionError("matrix json: dimensions must be positive");
    const auto& e = j["entries"];
    if (!e.is_array() || e.size() != static_cast<std::size_t>(rows * cols))
        throw DimensionError("matrix json: entry count does not match rows*cols");
    std::vector<Complex> data;
    data.reserve(e.size());
    for (const auto& pair : e) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
            throw ContractError("matrix json: each entry must be [re, im]");
        const Complex c{pair[0].get<double>(), pair[1].get<double>()};
        if (!is_finite(c)) throw ContractError("matrix json: non-finite entry");
        data.push_back(c);
    }
    return ComplexMatrix(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), std::move(data));
}

inline ComplexMatrix parse_matrix_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& err) {
        throw ContractError(std::string("matrix json: ") + err.what());
    }
    return matrix_from_json(j);
}

} // namespace symmap
