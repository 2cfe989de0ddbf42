#pragma once

#include <string>
#include <vector>

namespace safeguard {

// Line-oriented structured-text configuration format shared by all bundled
// config files (robot models, tasks, defaults). Each non-empty line is
//
//     key token token ...
//
// '#' starts a comment; tokens are whitespace-separated. The same key may
// repeat (arrays). See docs/config_format.md for the per-file schemas.
struct CfgLine {
    std::string key;
    std::vector<std::string> tokens;
    int line_no = 0;
};

struct CfgDoc {
    std::string path;  // "<memory>" when parsed from an embedded string
    std::vector<CfgLine> lines;

    bool has(const std::string& key) const;
    // first line with the given key; throws ValidationError when absent
    const CfgLine& require(const std::string& key) const;
    std::vector<const CfgLine*> all(const std::string& key) const;
};

CfgDoc parse_cfg_text(const std::string& text, const std::string& path);
CfgDoc parse_cfg_file(const std::string& path);

// token conversions with error context
double cfg_double(const CfgDoc& doc, const CfgLine& line, size_t idx);
int cfg_int(const CfgDoc& doc, const CfgLine& line, size_t idx);
const std::string& cfg_str(const CfgDoc& doc, const CfgLine& line, size_t idx);

}  // namespace safeguard
