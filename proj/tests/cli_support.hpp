#pragma once

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

namespace testing {

struct CliResult {
    int exit = -1;
    std::string out;
};

// Runs the built dpnsound binary with `args` (already shell-quoted); stderr goes to `err` when given.
inline CliResult run_cli(const std::string& args, const std::string& err = "/dev/null")
{
    std::string cmd = std::string("'") + DPNSOUND_CLI + "' " + args + " 2>" + err;
    CliResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr)
        return r;
    std::array<char, 4096> buf{};
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe))
        r.out.append(buf.data(), n);
    int status = ::pclose(pipe);
    r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

inline std::string quoted(const std::string& s)
{
    return "'" + s + "'";
}

} // namespace testing
