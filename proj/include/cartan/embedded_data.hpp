#pragma once

#include <string_view>
#include <vector>

namespace cartan {

/// Data files compiled into the library (plans, goldens, schemas), keyed by
/// their path relative to data/. Throws InvalidArgument for unknown names.
std::string_view embedded_data(std::string_view name);
std::vector<std::string_view> embedded_data_names();

}  // namespace cartan
