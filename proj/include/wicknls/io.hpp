#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace wicknls {

// Fixed shortest-round-trip float formatting so artifacts are byte-identical
// for identical (subcommand, flags, seed) on the same build.
std::string format_double(double v);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<std::string>& cells);
    void add_comment(const std::string& line); // emitted as "# line"
    std::string str() const;
    void write_file(const std::string& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::string> lines_;
};

void write_text_file(const std::string& path, const std::string& content);

} // namespace wicknls
