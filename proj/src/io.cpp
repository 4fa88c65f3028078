#include <bisample/io.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace bisample {

ParseError::ParseError(const std::string &source, int line, int col, const std::string &message)
    : Error(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + message), line_(line), col_(col) {}

namespace {

struct Line {
    int number;
    std::string text;
};

std::string rstrip(std::string s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
    return s;
}

// Content lines with their 1-based numbers; comments and blanks dropped.
std::vector<Line> content_lines(std::istream &in) {
    std::vector<Line> out;
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        std::string text = rstrip(raw);
        const auto first = text.find_first_not_of(" \t");
        if (first == std::string::npos || text[first] == '#') continue;
        out.push_back({number, std::move(text)});
    }
    return out;
}

std::vector<int> parse_ints(const std::string &source, const Line &line, std::size_t from) {
    std::vector<int> out;
    std::size_t pos = from;
    const std::string &t = line.text;
    while (pos < t.size()) {
        if (t[pos] == ' ' || t[pos] == '\t') {
            ++pos;
            continue;
        }
        int value = 0;
        const auto [end, ec] = std::from_chars(t.data() + pos, t.data() + t.size(), value);
        const int col = static_cast<int>(pos) + 1;
        if (ec != std::errc() || (end != t.data() + t.size() && *end != ' ' && *end != '\t'))
            throw ParseError(source, line.number, col, "expected a non-negative integer");
        if (value < 0) throw ParseError(source, line.number, col, "negative value");
        out.push_back(value);
        pos = static_cast<std::size_t>(end - t.data());
    }
    return out;
}

}  // namespace

Instance parse_instance(std::istream &in, const std::string &source) {
    const std::vector<Line> lines = content_lines(in);
    std::map<std::string, std::pair<std::vector<int>, Line>> header;
    std::size_t k = 0;
    bool saw_mask = false;
    for (; k < lines.size(); ++k) {
        const Line &line = lines[k];
        const auto colon = line.text.find(':');
        const auto first = line.text.find_first_not_of(" \t");
        if (colon == std::string::npos) throw ParseError(source, line.number, static_cast<int>(first) + 1, "expected 'key: value'");
        const std::string key = line.text.substr(first, colon - first);
        if (key == "mask") {
            if (line.text.find_first_not_of(" \t", colon + 1) != std::string::npos)
                throw ParseError(source, line.number, static_cast<int>(colon) + 2, "mask rows go on the following lines");
            saw_mask = true;
            ++k;
            break;
        }
        if (key != "rows" && key != "cols" && key != "row_degrees" && key != "col_degrees")
            throw ParseError(source, line.number, static_cast<int>(first) + 1, "unknown key '" + key + "'");
        if (header.count(key)) throw ParseError(source, line.number, static_cast<int>(first) + 1, "duplicate key '" + key + "'");
        header.emplace(key, std::make_pair(parse_ints(source, line, colon + 1), line));
    }
    const int end_line = lines.empty() ? 1 : lines.back().number;
    for (const char *key : {"rows", "cols", "row_degrees", "col_degrees"})
        if (!header.count(key)) throw ParseError(source, end_line, 1, std::string("missing '") + key + ":' line");
    if (!saw_mask) throw ParseError(source, end_line, 1, "missing 'mask:' line");

    auto scalar = [&](const char *key) {
        const auto &[values, line] = header.at(key);
        if (values.size() != 1) throw ParseError(source, line.number, 1, std::string("'") + key + "' takes one value");
        return values[0];
    };
    const int n = scalar("rows");
    const int m = scalar("cols");
    const auto &[row_deg, row_line] = header.at("row_degrees");
    const auto &[col_deg, col_line] = header.at("col_degrees");
    if (static_cast<int>(row_deg.size()) != n)
        throw ParseError(source, row_line.number, 1,
                         "expected " + std::to_string(n) + " row degrees, got " + std::to_string(row_deg.size()));
    if (static_cast<int>(col_deg.size()) != m)
        throw ParseError(source, col_line.number, 1,
                         "expected " + std::to_string(m) + " column degrees, got " + std::to_string(col_deg.size()));

    FixedSet mask(n, m);
    int r = 0;
    for (; k < lines.size(); ++k, ++r) {
        const Line &line = lines[k];
        if (r >= n) throw ParseError(source, line.number, 1, "more than " + std::to_string(n) + " mask rows");
        const std::string &t = line.text;
        for (int c = 0; c < static_cast<int>(t.size()); ++c) {
            if (c >= m) throw ParseError(source, line.number, c + 1, "mask row longer than " + std::to_string(m));
            switch (t[static_cast<std::size_t>(c)]) {
            case '0': mask.set(r, c, CellFix::NonEdge); break;
            case '1': mask.set(r, c, CellFix::Edge); break;
            case '*': break;
            default: throw ParseError(source, line.number, c + 1, "mask cell must be '0', '1' or '*'");
            }
        }
        if (static_cast<int>(t.size()) < m)
            throw ParseError(source, line.number, static_cast<int>(t.size()) + 1, "mask row shorter than " + std::to_string(m));
    }
    if (r < n) throw ParseError(source, end_line, 1, "expected " + std::to_string(n) + " mask rows, got " + std::to_string(r));
    return Instance(DegreeSequence{row_deg, col_deg}, std::move(mask));
}

Instance parse_instance(const std::string &text, const std::string &source) {
    std::istringstream in(text);
    return parse_instance(in, source);
}

Instance read_instance(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return parse_instance(in, path.string());
}

std::string format_instance(const Instance &inst) {
    std::ostringstream out;
    out << "rows: " << inst.rows() << "\ncols: " << inst.cols() << "\nrow_degrees:";
    for (int a : inst.degrees.rows) out << ' ' << a;
    out << "\ncol_degrees:";
    for (int b : inst.degrees.cols) out << ' ' << b;
    out << "\nmask:\n";
    for (int r = 0; r < inst.rows(); ++r) {
        for (int c = 0; c < inst.cols(); ++c) {
            switch (inst.fixed.at(r, c)) {
            case CellFix::Free: out << '*'; break;
            case CellFix::Edge: out << '1'; break;
            case CellFix::NonEdge: out << '0'; break;
            }
        }
        out << '\n';
    }
    return out.str();
}

void write_instance(const std::filesystem::path &path, const Instance &inst) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << format_instance(inst);
}

Realization parse_realization(std::istream &in, const std::string &source, std::optional<std::pair<int, int>> shape) {
    const std::vector<Line> lines = content_lines(in);
    if (lines.empty()) throw ParseError(source, 1, 1, "empty realization");
    const int width = static_cast<int>(lines.front().text.size());
    std::vector<std::vector<int>> matrix;
    for (const Line &line : lines) {
        if (static_cast<int>(line.text.size()) != width)
            throw ParseError(source, line.number, 1, "row width differs from the first row");
        std::vector<int> row;
        for (int c = 0; c < width; ++c) {
            const char ch = line.text[static_cast<std::size_t>(c)];
            if (ch != '0' && ch != '1') throw ParseError(source, line.number, c + 1, "expected '0' or '1'");
            row.push_back(ch - '0');
        }
        matrix.push_back(std::move(row));
    }
    if (shape && (static_cast<int>(matrix.size()) != shape->first || width != shape->second))
        throw ParseError(source, lines.back().number, 1,
                         "expected a " + std::to_string(shape->first) + "x" + std::to_string(shape->second) + " matrix");
    return Realization::from_matrix(matrix);
}

Realization parse_realization(const std::string &text, const std::string &source,
                              std::optional<std::pair<int, int>> shape) {
    std::istringstream in(text);
    return parse_realization(in, source, shape);
}

std::string format_realization(const Realization &g) {
    std::string out;
    for (int r = 0; r < g.rows(); ++r) {
        for (int c = 0; c < g.cols(); ++c) out += g.at(r, c) ? '1' : '0';
        out += '\n';
    }
    return out;
}

}  // namespace bisample
