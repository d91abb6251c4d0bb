#include <chrono>

#include "backends.hpp"
#include "repta/errors.hpp"

namespace repta::milp {

bool highs_available() {
#ifdef REPTA_HAVE_HIGHS
    return true;
#else
    return false;
#endif
}

std::unique_ptr<Backend> make_backend(std::string_view name) {
    if (name == "bundled") {
        return detail::make_bundled_backend();
    }
    if (name == "highs" || name == "auto") {
#ifdef REPTA_HAVE_HIGHS
        return detail::make_highs_backend();
#else
        if (name == "auto") {
            return detail::make_bundled_backend();
        }
        throw ConfigError("HiGHS backend was not compiled into this build");
#endif
    }
    throw ConfigError("unknown solver backend '" + std::string(name) + "'");
}

SolveResult solve(Model& model, const SolveOptions& options) {
    if (model.num_vars() == 0) {
        throw ValidationError("model '" + model.name() + "' has no variables");
    }
    model.freeze();
    auto backend = make_backend(options.backend);
    const auto start = std::chrono::steady_clock::now();
    SolveResult result = backend->solve(model, options);
    result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace repta::milp
