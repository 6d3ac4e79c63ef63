#pragma once

// The `qnd` subcommands. Each one is a pure function of the resolved
// configuration and returns its output as text; `main_entry` does argument
// parsing, file I/O and exit codes.

#include "config.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace qnd::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitRuntime = 1,
    kExitConfig = 2,
    kExitValidation = 3,
};

struct Invocation {
    std::string command;
    RawConfig raw;  // after overrides; echoed in the envelope
    RunConfig cfg;
    OutputFormat format = OutputFormat::json;
    std::string timestamp;
};

struct CommandOutput {
    std::string primary;
    std::optional<std::string> sidecar;  // written to <out>.json when --out is a file
    std::string summary;                 // one human line for stderr
    int exit_code = kExitOk;
};

OutputFormat default_format(const std::string& command);

CommandOutput cmd_estimate(const Invocation& inv);
CommandOutput cmd_error_curve(const Invocation& inv);
CommandOutput cmd_posterior(const Invocation& inv);
CommandOutput cmd_validate(const Invocation& inv);
CommandOutput cmd_sample(const Invocation& inv);

CommandOutput dispatch(const Invocation& inv);

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qnd::cli
