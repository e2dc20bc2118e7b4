#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "eqspike/tensor.hpp"

namespace eqspike::io {

// All file outputs go through atomic_write so interrupted runs never leave
// truncated artifacts.
void atomic_write(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

nlohmann::json tensor_to_json(const Tensor& t);
Tensor tensor_from_json(const nlohmann::json& j);

// Comma-separated report with a fixed header; doubles use shortest
// round-trip formatting so repeated runs are byte-identical.
class Csv {
public:
    explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<std::string>& cells);
    std::string str() const;
    void save(const std::string& path) const { atomic_write(path, str()); }

    static std::string cell(double v) { return format_double(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace eqspike::io
