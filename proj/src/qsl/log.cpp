#include "qsl/log.hpp"

#include <cstdlib>
#include <mutex>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace qsl {

namespace {

void install_stderr_logger() {
  static std::once_flag once;
  std::call_once(once, [] {
    auto logger = spdlog::stderr_color_mt("qsl");
    logger->set_pattern("[%l] %v");
    logger->set_level(spdlog::level::warn);
    spdlog::set_default_logger(logger);
  });
}

}  // namespace

bool set_log_level(const std::string& level) {
  install_stderr_logger();
  const auto parsed = spdlog::level::from_str(level);
  if (parsed == spdlog::level::off && level != "off") return false;
  spdlog::set_level(parsed);
  return true;
}

void init_logging() {
  install_stderr_logger();
  if (const char* env = std::getenv("QSL_LOG")) {
    if (!set_log_level(env)) spdlog::warn("unknown QSL_LOG level '{}'", env);
  }
}

}  // namespace qsl
