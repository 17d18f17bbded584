#pragma once

namespace corra {

// `git describe` of the source tree at configure time.
const char* git_describe();
const char* library_version();

}  // namespace corra
