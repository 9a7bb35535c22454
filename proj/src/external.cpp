#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "maxrefactor/solver.hpp"

namespace maxref {

namespace {

using Clock = std::chrono::steady_clock;

struct ParsedOutput {
    std::string status_line;
    std::vector<std::string> v_payloads;
    std::vector<std::pair<double, int64_t>> o_values;
};

void parse_line(const std::string& line, double t, ParsedOutput& out) {
    if (line.size() < 2) return;
    if (line[0] == 's' && std::isspace(static_cast<unsigned char>(line[1]))) {
        out.status_line = line.substr(2);
    } else if (line[0] == 'o' && std::isspace(static_cast<unsigned char>(line[1]))) {
        try {
            out.o_values.emplace_back(t, std::stoll(line.substr(2)));
        } catch (...) {
        }
    } else if (line[0] == 'v' && std::isspace(static_cast<unsigned char>(line[1]))) {
        out.v_payloads.push_back(line.substr(2));
    }
}

// Supports both v-line conventions: a signed literal list and the newer
// compact bit string.
std::vector<int8_t> parse_model(const std::vector<std::string>& payloads, int num_vars) {
    std::string joined;
    for (const auto& p : payloads) {
        joined += p;
        joined += ' ';
    }
    std::vector<std::string> tokens;
    std::istringstream is(joined);
    std::string tok;
    bool bitstring = true;
    size_t bitchars = 0;
    while (is >> tok) {
        tokens.push_back(tok);
        for (char c : tok)
            if (c != '0' && c != '1') bitstring = false;
        bitchars += tok.size();
    }
    if (tokens.empty()) return {};
    std::vector<int8_t> model(num_vars + 1, -1);
    if (bitstring && static_cast<int>(bitchars) >= num_vars) {
        std::string bits;
        for (const auto& t : tokens) bits += t;
        for (int v = 1; v <= num_vars; ++v) model[v] = bits[v - 1] == '1' ? 1 : -1;
        return model;
    }
    for (const auto& t : tokens) {
        long lit;
        try {
            lit = std::stol(t);
        } catch (...) {
            return {};
        }
        if (lit == 0) continue;
        long v = lit > 0 ? lit : -lit;
        if (v <= num_vars) model[v] = lit > 0 ? 1 : -1;
    }
    return model;
}

}  // namespace

SolveResult solve_external(const WcnfFormula& f, const ExternalSolverOptions& opts) {
    SolveResult result;
    if (opts.command.empty()) {
        result.error = "no external solver command configured";
        return result;
    }
    if (opts.budget_seconds <= 0) throw std::invalid_argument("solve budget must be positive");

    char path[] = "/tmp/maxrefactor.XXXXXX.wcnf";
    int fd = mkstemps(path, 5);
    if (fd < 0) {
        result.error = "cannot create temporary wcnf file";
        return result;
    }
    {
        std::string text = to_dimacs(f, opts.fmt2022);
        ssize_t ignored = write(fd, text.data(), text.size());
        (void)ignored;
        close(fd);
    }

    int pipefd[2];
    if (pipe(pipefd) != 0) {
        result.error = "cannot create pipe";
        unlink(path);
        return result;
    }
    pid_t pid = fork();
    if (pid < 0) {
        result.error = "fork failed";
        unlink(path);
        return result;
    }
    if (pid == 0) {
        dup2(pipefd[1], STDOUT_FILENO);
        close(pipefd[0]);
        close(pipefd[1]);
        std::vector<char*> argv;
        for (const auto& a : opts.command) argv.push_back(const_cast<char*>(a.c_str()));
        argv.push_back(path);
        argv.push_back(nullptr);
        execvp(argv[0], argv.data());
        std::perror("exec");
        _exit(127);
    }
    close(pipefd[1]);

    auto start = Clock::now();
    auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                                std::chrono::duration<double>(opts.budget_seconds));
    ParsedOutput parsed;
    std::string buffer;
    bool timed_out = false;
    char chunk[4096];
    for (;;) {
        auto now = Clock::now();
        if (now >= deadline) {
            timed_out = true;
            kill(pid, SIGKILL);
        }
        int wait_ms = timed_out
                          ? 100
                          : static_cast<int>(
                                std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now)
                                    .count()) +
                                1;
        struct pollfd pfd{pipefd[0], POLLIN, 0};
        int pr = poll(&pfd, 1, std::min(wait_ms, 200));
        if (pr > 0) {
            ssize_t n = read(pipefd[0], chunk, sizeof(chunk));
            if (n <= 0) break;
            buffer.append(chunk, static_cast<size_t>(n));
            size_t pos;
            while ((pos = buffer.find('\n')) != std::string::npos) {
                std::string line = buffer.substr(0, pos);
                buffer.erase(0, pos + 1);
                double t = std::chrono::duration<double>(Clock::now() - start).count();
                parse_line(line, t, parsed);
                if (line.size() > 1 && line[0] == 'o' && opts.on_incumbent &&
                    !parsed.o_values.empty())
                    opts.on_incumbent(parsed.o_values.back().first, parsed.o_values.back().second);
            }
        }
    }
    close(pipefd[0]);
    if (!buffer.empty()) parse_line(buffer, opts.budget_seconds, parsed);
    int wstatus = 0;
    waitpid(pid, &wstatus, 0);
    unlink(path);

    for (const auto& [t, cost] : parsed.o_values) result.incumbents.push_back({t, cost});

    if (parsed.status_line.find("UNSATISFIABLE") != std::string::npos) {
        result.status = SolveStatus::Unsat;
        return result;
    }
    bool optimal = parsed.status_line.find("OPTIMUM FOUND") != std::string::npos;
    bool satisfiable = parsed.status_line.find("SATISFIABLE") != std::string::npos;
    if (!optimal && !satisfiable) {
        result.status = SolveStatus::Unknown;
        if (timed_out)
            result.error = "external solver timed out";
        else if (parsed.status_line.empty())
            result.error = "external solver produced no status line";
        else
            result.error = "external solver status: " + parsed.status_line;
        return result;
    }
    std::vector<int8_t> model = parse_model(parsed.v_payloads, f.num_vars);
    if (model.empty()) {
        result.status = SolveStatus::Unknown;
        result.error = "external solver reported a solution but no model";
        return result;
    }
    if (!model_satisfies_hard(f, model)) {
        result.status = SolveStatus::Unknown;
        result.error = "model fails hard clauses";
        return result;
    }
    result.model = std::move(model);
    result.cost = model_cost(f, result.model);
    result.status = optimal ? SolveStatus::Optimal : SolveStatus::Feasible;
    return result;
}

}  // namespace maxref
