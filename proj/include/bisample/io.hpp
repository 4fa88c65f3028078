#pragma once

// Text formats for instances and realizations.
//
// Instance file:
//   rows: 3
//   cols: 4
//   row_degrees: 2 1 1
//   col_degrees: 1 1 1 1
//   mask:
//   0***
//   *1**
//   ****
// '0' forced non-edge, '1' forced edge, '*' free. Lines starting with '#'
// and blank lines are ignored.
//
// Realization file: one line of 0/1 characters per row.

#include <bisample/core.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace bisample {

class ParseError : public Error {
public:
    ParseError(const std::string &source, int line, int col, const std::string &message);

    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

Instance parse_instance(std::istream &in, const std::string &source = "<input>");
Instance parse_instance(const std::string &text, const std::string &source = "<input>");
Instance read_instance(const std::filesystem::path &path);
std::string format_instance(const Instance &inst);
void write_instance(const std::filesystem::path &path, const Instance &inst);

/// Reads one realization. With `shape`, the row count and width must match.
Realization parse_realization(std::istream &in, const std::string &source = "<input>",
                              std::optional<std::pair<int, int>> shape = std::nullopt);
Realization parse_realization(const std::string &text, const std::string &source = "<input>",
                              std::optional<std::pair<int, int>> shape = std::nullopt);
std::string format_realization(const Realization &g);

}  // namespace bisample
