#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "dbrd/llm_client.hpp"

namespace dbrd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

struct CliIo {
    std::ostream* out = nullptr;  // data; defaults to std::cout
    std::ostream* err = nullptr;  // diagnostics and the effective-config header; defaults to std::cerr
    /// Overrides the HTTP transport used by the llm extractor (tests).
    std::shared_ptr<HttpTransport> transport;
};

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, const CliIo& io = {});
int run_cli(int argc, char** argv);

}  // namespace dbrd
