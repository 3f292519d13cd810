#pragma once
#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace ffr {

/// Locale-independent decimal with 9 significant digits.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

/// Minimal CSV emitter: header + rows, LF line endings, no quoting (the tool
/// never emits cells containing commas).
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ostream& out_;
};

} // namespace ffr
