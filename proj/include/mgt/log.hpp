#pragma once

#include <string_view>

namespace mgt {

/// Writes "warning: <message>" to stderr unless warnings are silenced.
void log_warning(std::string_view message);

/// Tests silence expected warnings; the CLI leaves them on.
void set_warnings_enabled(bool enabled) noexcept;

} // namespace mgt
