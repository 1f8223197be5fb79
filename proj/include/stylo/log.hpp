#pragma once

#include <spdlog/spdlog.h>

namespace stylo {

/// Returns the library logger (writes to stderr). The level is read once from
/// STYLO_ATTR_LOG (trace, debug, info, warn, error, off); default is warn.
spdlog::logger& log();

}  // namespace stylo
