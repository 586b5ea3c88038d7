#pragma once

#include <cstdarg>

namespace bcsynth {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Level comes from the BARRIER_SYNTH_LOG environment variable
// (error|warn|info|debug), default warn. Output goes to stderr.
LogLevel log_level();
void log_message(LogLevel level, const char* fmt, ...);

}  // namespace bcsynth

#define LOGE(...) ::bcsynth::log_message(::bcsynth::LogLevel::Error, __VA_ARGS__)
#define LOGW(...) ::bcsynth::log_message(::bcsynth::LogLevel::Warn, __VA_ARGS__)
#define LOGI(...) ::bcsynth::log_message(::bcsynth::LogLevel::Info, __VA_ARGS__)
#define LOGD(...) ::bcsynth::log_message(::bcsynth::LogLevel::Debug, __VA_ARGS__)
