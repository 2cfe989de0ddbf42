#pragma once

#include <stdexcept>
#include <string>

namespace safeguard {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// geometry
struct UnsupportedPair : Error { using Error::Error; };
struct DegenerateConfiguration : Error { using Error::Error; };

// kinematics / dynamics
struct DimensionMismatch : Error { using Error::Error; };
struct NonFiniteState : Error { using Error::Error; };

// safety index / filters
struct DegenerateGradient : Error { using Error::Error; };
struct NonFiniteProblem : Error { using Error::Error; };

// task generation
struct InfeasibleScenario : Error { using Error::Error; };

// metrics
struct EmptyLog : Error { using Error::Error; };
struct MismatchedSeedSets : Error { using Error::Error; };

// config files
struct ParseError : Error {
    ParseError(const std::string& path, int line, const std::string& what)
        : Error(path + ":" + std::to_string(line) + ": " + what),
          path(path), line(line) {}
    std::string path;
    int line;
};

struct ValidationError : Error {
    ValidationError(const std::string& field, const std::string& reason)
        : Error(field + ": " + reason), field(field) {}
    std::string field;
};

}  // namespace safeguard
