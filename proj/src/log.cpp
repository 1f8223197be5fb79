#include "stylo/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>

#include <cstdlib>
#include <memory>

namespace stylo {

spdlog::logger& log() {
    static const std::shared_ptr<spdlog::logger> logger = [] {
        auto l = spdlog::stderr_color_mt("stylo");
        l->set_pattern("[%l] %v");
        auto level = spdlog::level::warn;
        if (const char* env = std::getenv("STYLO_ATTR_LOG"); env != nullptr && *env != '\0') {
            level = spdlog::level::from_str(env);
        }
        l->set_level(level);
        return l;
    }();
    return *logger;
}

}  // namespace stylo
