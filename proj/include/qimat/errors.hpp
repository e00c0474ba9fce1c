#pragma once

#include <stdexcept>
#include <string>

namespace qimat {

/// Base for "the request is well-formed but exceeds a configured resource cap".
struct resource_limit_error : std::runtime_error {
    explicit resource_limit_error(const std::string& what) : std::runtime_error(what) {}
};

/// Enumeration asked for more objects than the configured cap allows.
struct enumeration_cap_error : resource_limit_error {
    explicit enumeration_cap_error(const std::string& what) : resource_limit_error(what) {}
};

/// Exhaustive search exceeded its node budget; partial results are discarded.
struct search_budget_error : resource_limit_error {
    explicit search_budget_error(const std::string& what) : resource_limit_error(what) {}
};

} // namespace qimat
