#pragma once

#include <string>

namespace qsl {

/// Applies the level named in QSL_LOG (trace, debug, info, warn, error, off).
void init_logging();

/// Returns false for an unknown level name.
bool set_log_level(const std::string& level);

}  // namespace qsl
