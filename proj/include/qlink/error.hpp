#pragma once

#include <stdexcept>
#include <string>

namespace qlink {

// Invalid run configuration or unsupported model combination.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally valid spec that defines an empty or inconsistent model
// (e.g. a particle_number_rule with no gauge-invariant states).
struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

// Violated runtime invariant inside the evolution kernels (e.g. gauge
// leakage above leak_tol after re-projection).
struct KernelError : std::runtime_error {
  explicit KernelError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qlink
