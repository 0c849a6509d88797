// Output files: CSV with 17 significant digits behind a "# {json}" header
// line, and JSON summaries.
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace manton {

std::string fmt17(double x);

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};
nlohmann::json check_json(const Check& c);

class CsvWriter {
public:
    /// Opens path (creating parent directories) and writes the header block.
    CsvWriter(const std::string& path, const nlohmann::json& header, const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
    std::size_t width_;
};

/// Writes text to path, creating parent directories.
void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace manton
