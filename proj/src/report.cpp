#include "manton/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

namespace manton {

std::string fmt17(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

nlohmann::json check_json(const Check& c) {
    return {{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}, {"detail", c.detail}};
}

namespace {
void make_parent(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}
}  // namespace

CsvWriter::CsvWriter(const std::string& path, const nlohmann::json& header, const std::vector<std::string>& columns)
    : path_(path), width_(columns.size()) {
    make_parent(path);
    out_.open(path);
    if (!out_) throw std::runtime_error("cannot write '" + path + "'");
    out_ << "# " << header.dump() << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& v) {
    if (v.size() != width_) throw std::invalid_argument("csv row width mismatch in '" + path_ + "'");
    for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? "," : "") << fmt17(v[i]);
    out_ << "\n";
    out_.flush();
}

void write_text(const std::string& path, const std::string& text) {
    make_parent(path);
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace manton
