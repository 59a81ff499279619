#include "driftdiff/errors.hpp"

#include <iostream>

namespace driftdiff {

void warn(const std::string& message) { std::cerr << "warning: " << message << "\n"; }

}  // namespace driftdiff
