#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include "ppm/errors.hpp"
#include "ppm/solver.hpp"

namespace fs = std::filesystem;

namespace ppm {

namespace {

std::string substitute(std::string templ, const std::string& key, const std::string& value) {
    std::string::size_type pos = 0;
    while ((pos = templ.find(key, pos)) != std::string::npos) {
        templ.replace(pos, key.size(), value);
        pos += value.size();
    }
    return templ;
}

std::string tail_of_file(const fs::path& path, std::size_t max_bytes = 400) {
    std::ifstream in(path);
    if (!in) return "";
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (all.size() > max_bytes) all = "..." + all.substr(all.size() - max_bytes);
    return all;
}

struct TempDir {
    fs::path path;
    TempDir() {
        std::string templ = (fs::temp_directory_path() / "ppmatch-XXXXXX").string();
        if (!mkdtemp(templ.data())) throw IoError("mkdtemp failed");
        path = templ;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

// Runs the command through /bin/sh, enforcing a hard wall-clock deadline.
// Returns (exit_code, killed_by_deadline); exit_code is -1 when the child
// died from a signal.
std::pair<int, bool> run_with_deadline(const std::string& cmd, const fs::path& log_path,
                                       double deadline_s) {
    const pid_t pid = fork();
    if (pid < 0) throw SolverLaunchError("fork failed");
    if (pid == 0) {
        if (FILE* log = std::fopen(log_path.c_str(), "w")) {
            dup2(fileno(log), STDOUT_FILENO);
            dup2(fileno(log), STDERR_FILENO);
        }
        execl("/bin/sh", "sh", "-c", cmd.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }

    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration<double>(std::min(deadline_s, 1e9));
    bool killed = false;
    int status = 0;
    for (;;) {
        const pid_t r = waitpid(pid, &status, WNOHANG);
        if (r == pid) break;
        if (r < 0) throw SolverLaunchError("waitpid failed");
        if (!killed && std::chrono::steady_clock::now() > deadline) {
            kill(pid, SIGTERM);
            std::this_thread::sleep_for(std::chrono::milliseconds(500));
            kill(pid, SIGKILL);
            killed = true;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, killed};
}

}  // namespace

std::string default_solver_command() {
    if (const char* env = std::getenv("PPM_SOLVER_CMD"); env && *env) return env;
    for (const char* candidate :
         {"tools/adapters/milp_adapter.py", "../tools/adapters/milp_adapter.py"}) {
        if (fs::exists(candidate))
            return std::string("python3 ") + candidate + " {model} {solution} {timelimit}";
    }
    return "";
}

Solution solve_external(const IlpModel& model, const std::string& solver_cmd,
                        double time_limit_s) {
    if (solver_cmd.empty()) throw SolverLaunchError("no external solver command configured");

    const auto start = std::chrono::steady_clock::now();
    TempDir tmp;
    const fs::path model_path = tmp.path / "model.lp";
    const fs::path solution_path = tmp.path / "solution.sol";
    const fs::path log_path = tmp.path / "solver.log";
    export_lp(model, model_path.string());

    char limit_str[32];
    std::snprintf(limit_str, sizeof(limit_str), "%.6g", time_limit_s);
    std::string cmd = substitute(solver_cmd, "{model}", model_path.string());
    cmd = substitute(cmd, "{solution}", solution_path.string());
    cmd = substitute(cmd, "{timelimit}", limit_str);

    // Grace factor: the solver owns the soft limit, the bridge the hard one.
    const auto [exit_code, killed] = run_with_deadline(cmd, log_path, time_limit_s * 1.5 + 30.0);

    Solution sol;
    sol.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!fs::exists(solution_path)) {
        if (killed) {
            sol.status = SolveStatus::NoSolutionFound;
            return sol;
        }
        if (exit_code == 127)
            throw SolverLaunchError("command not found: " + cmd);
        std::ostringstream os;
        os << "solver wrote no solution file (exit code " << exit_code << "): "
           << tail_of_file(log_path);
        throw SolverLaunchError(os.str());
    }

    ParsedSolution parsed;
    try {
        parsed = read_solution_file(model, solution_path.string());
    } catch (const SolutionParseError&) {
        if (killed) {
            // Truncated write after the hard kill.
            sol.status = SolveStatus::NoSolutionFound;
            return sol;
        }
        throw;
    }

    if (parsed.has_status && parsed.status == SolveStatus::Infeasible) {
        sol.status = SolveStatus::Infeasible;
        return sol;
    }
    if (parsed.has_status && parsed.status == SolveStatus::NoSolutionFound) {
        sol.status = SolveStatus::NoSolutionFound;
        return sol;
    }

    const ValidationReport report = validate_assignment(model, parsed.assignment);
    if (!report.feasible()) {
        std::ostringstream os;
        os << "external solver returned an infeasible assignment (" << report.violated_rows.size()
           << " violated rows, " << report.violated_fixed.size() << " fixed variables)";
        throw ValidationError(os.str());
    }

    sol.assignment = std::move(parsed.assignment);
    sol.objective = report.objective;
    if (killed) {
        sol.status = SolveStatus::FeasibleTimeLimit;
    } else if (parsed.has_status) {
        sol.status = parsed.status;
    } else {
        sol.status = exit_code == 0 ? SolveStatus::Optimal : SolveStatus::FeasibleTimeLimit;
    }
    return sol;
}

}  // namespace ppm
