#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <sys/types.h>
#include <vector>

namespace sygra {

/// A child process spoken to over stdin/stdout pipes. Reads return one
/// complete S-expression (or bare atom line) at a time.
class SmtProcess {
public:
    /// Throws SolverError(Launch) if the program cannot be executed.
    explicit SmtProcess(const std::vector<std::string>& argv);
    ~SmtProcess();
    SmtProcess(const SmtProcess&) = delete;
    SmtProcess& operator=(const SmtProcess&) = delete;

    /// Throws SolverError(Protocol) if the child has gone away.
    void send(std::string_view text);
    /// nullopt on timeout; throws SolverError(Protocol) on EOF.
    std::optional<std::string> read_response(int timeout_ms);

    void kill();

private:
    pid_t pid_ = -1;
    int in_fd_ = -1;   // our write end, child's stdin
    int out_fd_ = -1;  // our read end, child's stdout
    std::string buffer_;

    std::optional<std::size_t> complete_prefix() const;
};

/// Whitespace split honoring single and double quotes.
std::vector<std::string> split_command(const std::string& command);

}  // namespace sygra
