#include "textaug/error.hpp"

#include <fmt/format.h>

namespace textaug {

namespace {
constexpr std::size_t kExcerptLength = 200;
}

ParseError::ParseError(const std::string& file, std::size_t line, const std::string& detail)
    : ValidationError(fmt::format("{}:{}: {}", file, line, detail)), line_(line) {}

DivergenceError::DivergenceError(std::size_t epoch, const std::string& detail)
    : Error(fmt::format("training diverged at epoch {}: {}", epoch, detail)), epoch_(epoch) {}

ProtocolError::ProtocolError(const std::string& detail, const std::string& payload)
    : Error(fmt::format("protocol error: {} (payload: {})", detail,
                        payload.substr(0, kExcerptLength))),
      excerpt_(payload.substr(0, kExcerptLength)) {}

}  // namespace textaug
