#pragma once

#include <functional>
#include <string_view>

namespace zovr {

using WarningSink = std::function<void(std::string_view)>;

// Replaces the process-wide warning sink. An empty sink restores the default
// (one line per warning on stderr).
void set_warning_sink(WarningSink sink);

void warn(std::string_view message);

}  // namespace zovr
