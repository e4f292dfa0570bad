#pragma once

#include <map>
#include <string>

#include "wavesearch/cli/config.hpp"

namespace wavesearch::cli {

/// Output files by name, written once each after the command finishes.
struct Bundle {
    std::map<std::string, std::string> files;
};

struct ExecOptions {
    unsigned jobs = 1;
};

Bundle execute(const RunConfig& config, const ExecOptions& options = {});

/// CSV column layouts of every command, as printed by --schema.
std::string schema_text();

void write_bundle(const Bundle& bundle, const std::string& directory);

/// Full command-line entry point; returns the process exit code.
int main_entry(int argc, char** argv);

} // namespace wavesearch::cli
