#pragma once

namespace ssd {

// Exit codes: 0 success, 2 config error, 3 solver abort, 4 I/O error.
int cli(int argc, char** argv);

}  // namespace ssd
