#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <thread>

#include "sbopt/problems.hpp"

namespace sbopt {

namespace {

std::string render_command(const std::string& tmpl, const IntegerPoint& point) {
    std::ostringstream oss;
    for (std::size_t i = 0; i < point.size(); ++i) {
        if (i) oss << ' ';
        oss << point[i];
    }
    std::string cmd = tmpl;
    const std::string placeholder = "{x}";
    std::size_t pos = 0;
    while ((pos = cmd.find(placeholder, pos)) != std::string::npos) {
        cmd.replace(pos, placeholder.size(), oss.str());
        pos += oss.str().size();
    }
    return cmd;
}

std::string last_line(const std::string& text) {
    std::size_t end = text.find_last_not_of(" \t\r\n");
    if (end == std::string::npos) return {};
    std::size_t start = text.find_last_of('\n', end);
    start = (start == std::string::npos) ? 0 : start + 1;
    return text.substr(start, end - start + 1);
}

}  // namespace

double external_eval(const std::string& command_template, const IntegerPoint& point,
                     double timeout_seconds) {
    const std::string cmd = render_command(command_template, point);

    int pipefd[2];
    if (pipe(pipefd) != 0) throw EvaluationFailure("external: pipe() failed");

    const pid_t pid = fork();
    if (pid < 0) {
        close(pipefd[0]);
        close(pipefd[1]);
        throw EvaluationFailure("external: fork() failed");
    }
    if (pid == 0) {
        close(pipefd[0]);
        dup2(pipefd[1], STDOUT_FILENO);
        close(pipefd[1]);
        execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(pipefd[1]);
    fcntl(pipefd[0], F_SETFL, O_NONBLOCK);

    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
    std::string output;
    char buf[4096];
    int status = 0;
    bool exited = false;
    bool timed_out = false;

    while (true) {
        ssize_t n;
        while ((n = read(pipefd[0], buf, sizeof(buf))) > 0) output.append(buf, static_cast<std::size_t>(n));
        if (exited && (n == 0 || (n < 0 && errno == EAGAIN))) break;
        if (!exited) {
            const pid_t r = waitpid(pid, &status, WNOHANG);
            if (r == pid) {
                exited = true;
                continue;  // drain remaining output
            }
            if (std::chrono::steady_clock::now() > deadline) {
                kill(pid, SIGKILL);
                waitpid(pid, &status, 0);
                timed_out = true;
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(2));
        }
        if (n == 0 && exited) break;
    }
    close(pipefd[0]);

    if (timed_out)
        throw EvaluationFailure("external: command timed out after " +
                                std::to_string(timeout_seconds) + "s: " + cmd);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
        throw EvaluationFailure("external: command failed (exit " +
                                std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1) +
                                "): " + cmd + "\noutput: " + output);

    const std::string line = last_line(output);
    try {
        std::size_t consumed = 0;
        const double value = std::stod(line, &consumed);
        // allow trailing whitespace only
        for (std::size_t i = consumed; i < line.size(); ++i)
            if (!std::isspace(static_cast<unsigned char>(line[i])))
                throw std::invalid_argument("trailing junk");
        return value;
    } catch (const std::exception&) {
        throw EvaluationFailure("external: could not parse objective from last output line '" +
                                line + "' of: " + cmd);
    }
}

}  // namespace sbopt
