#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace morphobpe {

// A long-running child process spoken to line by line: write one line to
// its stdin, read one line from its stdout. Used for external morpheme
// analyzers and external pretokenizers. exchange() is serialized with a
// mutex; the child is reaped on destruction.
class LineProcess {
public:
    // command is run via /bin/sh -c. Throws ConfigError when the shell or
    // the command cannot be started.
    explicit LineProcess(const std::string& command);
    ~LineProcess();

    LineProcess(const LineProcess&) = delete;
    LineProcess& operator=(const LineProcess&) = delete;

    // nullopt when the child closed its stdout or a write failed.
    std::optional<std::string> exchange(const std::string& line);

private:
    std::mutex mu_;
    int child_pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buf_;
    bool broken_ = false;

    bool write_all(const char* data, std::size_t len);
    std::optional<std::string> read_line();
};

}  // namespace morphobpe
