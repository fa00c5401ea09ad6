#pragma once

#include <stdexcept>
#include <string>

namespace afs {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// l_f*cos(beta) + l_r fell below the validity threshold of the kinematic model.
struct SingularGeometryError : std::runtime_error {
    explicit SingularGeometryError(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateGoalError : std::runtime_error {
    explicit DegenerateGoalError(const std::string& what) : std::runtime_error(what) {}
};

// Vehicle inside the expanded unsafe region (h1 <= 0); mission-fatal.
struct BarrierDomainError : std::runtime_error {
    BarrierDomainError(const std::string& what, int obstacle_index)
        : std::runtime_error(what), obstacle(obstacle_index) {}
    int obstacle;
};

struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

struct NotPsdError : std::runtime_error {
    explicit NotPsdError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace afs
