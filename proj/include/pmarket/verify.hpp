#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>

namespace pmarket {

enum class Suite { all, martingale, vacuity, bounds, mixture };

std::optional<Suite> parse_suite(std::string_view name);
std::string_view to_string(Suite suite);

/// Runs the randomized property suite on `count` generated cases per
/// property. Prints one PASS/FAIL line per property and, for a failure,
/// the first failing case in serialized form. Output depends only on
/// (suite, seed, count). Returns 0 iff every property passes, else 1.
int cmd_verify(Suite suite, std::uint64_t seed, std::size_t count, std::ostream& out);

}  // namespace pmarket
