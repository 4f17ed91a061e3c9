#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace growthcast::csv {

// RFC-4180 style quoting for commas and quotes; embedded newlines are not
// supported (no field produced by this project contains one).
std::string escape(const std::string& field);

std::string join_row(const std::vector<std::string>& fields);

// Splits one line into fields, honoring quotes. Throws DataError on a
// malformed quote sequence; `where` names the offending location.
std::vector<std::string> split_row(const std::string& line, const std::string& where);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Reads a headered CSV file. Every row must have the header's arity.
Table read_file(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, const Table& table);

}  // namespace growthcast::csv
