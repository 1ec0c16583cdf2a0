#pragma once

#include <string>

#include "obdf/integrals.hpp"

namespace fixtures {

inline std::string path(const std::string& name) {
  return std::string(OBDF_DATA_DIR) + "/" + name;
}

inline obdf::IntegralSet load(const std::string& name) {
  return obdf::parse_fcidump_file(path(name));
}

}  // namespace fixtures
