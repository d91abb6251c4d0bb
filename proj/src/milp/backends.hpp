#pragma once

#include <memory>

#include "repta/milp.hpp"

namespace repta::milp::detail {

std::unique_ptr<Backend> make_bundled_backend();
#ifdef REPTA_HAVE_HIGHS
std::unique_ptr<Backend> make_highs_backend();
#endif

}  // namespace repta::milp::detail
