#pragma once

// Output helpers shared by the experiment runners: shortest-round-trip number
// formatting, versioned CSV tables and file writing.

#include <transcend/error.hpp>

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace transcend::report {

inline constexpr std::string_view kSchemaLine = "# schema=v1";

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    CsvTable& row(const std::vector<std::string>& cells)
    {
        if (cells.size() != columns_.size())
            throw Error(Errc::DimensionMismatch, "CSV row width differs from header");
        rows_.push_back(cells);
        return *this;
    }

    std::size_t size() const noexcept { return rows_.size(); }

    std::string str() const
    {
        std::string out(kSchemaLine);
        out += '\n';
        append_line(out, columns_);
        for (const auto& r : rows_)
            append_line(out, r);
        return out;
    }

private:
    static void append_line(std::string& out, const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out += ',';
            out += cells[i];
        }
        out += '\n';
    }

    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

/// Rows of a simple comma-separated file; '#' comment lines and blank lines
/// are skipped. No quoting.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text)
{
    std::vector<std::vector<std::string>> rows;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t end = text.find('\n', i);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(i, end - i);
        i = end + 1;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty() || line.front() == '#')
            continue;
        std::vector<std::string> cells;
        std::size_t j = 0;
        while (true) {
            const std::size_t comma = line.find(',', j);
            std::string_view cell = line.substr(j, comma == std::string_view::npos ? std::string_view::npos : comma - j);
            while (!cell.empty() && cell.front() == ' ')
                cell.remove_prefix(1);
            while (!cell.empty() && cell.back() == ' ')
                cell.remove_suffix(1);
            cells.emplace_back(cell);
            if (comma == std::string_view::npos)
                break;
            j = comma + 1;
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::ConfigError, "cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline void write_file(const std::filesystem::path& path, std::string_view content)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(Errc::ConfigError, "cannot open " + path.string() + " for writing");
    out << content;
}

} // namespace transcend::report
