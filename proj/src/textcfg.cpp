#include "safeguard/textcfg.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "safeguard/errors.hpp"

namespace safeguard {

bool CfgDoc::has(const std::string& key) const {
    for (const auto& l : lines)
        if (l.key == key) return true;
    return false;
}

const CfgLine& CfgDoc::require(const std::string& key) const {
    for (const auto& l : lines)
        if (l.key == key) return l;
    throw ValidationError(key, "missing required key in " + path);
}

std::vector<const CfgLine*> CfgDoc::all(const std::string& key) const {
    std::vector<const CfgLine*> out;
    for (const auto& l : lines)
        if (l.key == key) out.push_back(&l);
    return out;
}

CfgDoc parse_cfg_text(const std::string& text, const std::string& path) {
    CfgDoc doc;
    doc.path = path;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        CfgLine line;
        line.line_no = line_no;
        std::string tok;
        while (ls >> tok) {
            if (line.key.empty())
                line.key = tok;
            else
                line.tokens.push_back(tok);
        }
        if (!line.key.empty()) doc.lines.push_back(std::move(line));
    }
    return doc;
}

CfgDoc parse_cfg_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_cfg_text(buf.str(), path);
}

static void check_index(const CfgDoc& doc, const CfgLine& line, size_t idx) {
    if (idx >= line.tokens.size())
        throw ParseError(doc.path, line.line_no,
                         "key '" + line.key + "' needs at least " +
                             std::to_string(idx + 1) + " value(s)");
}

double cfg_double(const CfgDoc& doc, const CfgLine& line, size_t idx) {
    check_index(doc, line, idx);
    const std::string& s = line.tokens[idx];
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ParseError(doc.path, line.line_no, "'" + s + "' is not a number");
    return v;
}

int cfg_int(const CfgDoc& doc, const CfgLine& line, size_t idx) {
    check_index(doc, line, idx);
    const std::string& s = line.tokens[idx];
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw ParseError(doc.path, line.line_no, "'" + s + "' is not an integer");
    return static_cast<int>(v);
}

const std::string& cfg_str(const CfgDoc& doc, const CfgLine& line, size_t idx) {
    check_index(doc, line, idx);
    return line.tokens[idx];
}

}  // namespace safeguard
