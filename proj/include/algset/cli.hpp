#pragma once

namespace algset::cli {

// exit codes: 0 ok, 2 usage/validation, 3 empty result, 4 numerical failure
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kEmptyResult = 3;
inline constexpr int kNumericFailure = 4;

int run(int argc, const char* const* argv);

} // namespace algset::cli
