#pragma once

#include <stdexcept>
#include <string>

namespace fracxy {

enum class Errc {
  construction,        // degenerate shape or parameters
  empty_domain,        // lattice spacing too coarse for the shape
  invalid_index,       // out-of-range site / cell / bond
  not_neighbors,       // ordered pair is not a nearest-neighbor pair
  invalid_region,      // region mask not simply connected, empty, ...
  unsupported,         // geometry the algorithm does not handle
  resource,            // problem size over a hard limit
  invalid_prescription,
  insufficient_data,
  overlapping_balls,
  config,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace fracxy
