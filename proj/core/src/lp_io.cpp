#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ppm/errors.hpp"
#include "ppm/solver.hpp"

namespace ppm {

namespace {

std::string var_name(const IlpModel& model, int index) {
    char buf[32];
    if (index < model.num_x) {
        std::snprintf(buf, sizeof(buf), "x_%d", index);
    } else if (index < model.num_x + model.num_sinj) {
        std::snprintf(buf, sizeof(buf), "si_%d", index - model.num_x);
    } else {
        std::snprintf(buf, sizeof(buf), "ss_%d", index - model.num_x - model.num_sinj);
    }
    return buf;
}

std::unordered_map<std::string, int> name_index(const IlpModel& model) {
    std::unordered_map<std::string, int> map;
    map.reserve(model.num_vars());
    for (int i = 0; i < model.num_vars(); ++i) {
        if (i < model.num_x && model.eliminated(i)) continue;
        map.emplace(var_name(model, i), i);
    }
    return map;
}

void append_term(std::string& line, double coef, const std::string& name) {
    char buf[64];
    if (coef == 1.0) {
        line += " + " + name;
    } else if (coef == -1.0) {
        line += " - " + name;
    } else {
        std::snprintf(buf, sizeof(buf), "%.17g", std::abs(coef));
        line += (coef < 0 ? " - " : " + ");
        line += buf;
        line += " ";
        line += name;
    }
}

void flush_wrapped(std::ofstream& out, std::string& line, std::size_t limit) {
    if (line.size() >= limit) {
        out << line << "\n";
        line.clear();
    }
}

}  // namespace

void export_lp(const IlpModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);

    out << "\\ ppmatch PP-ILP model\n";
    out << "Minimize\n";
    std::string line = " obj:";
    for (int i = 0; i < model.num_vars(); ++i) {
        if (i < model.num_x && model.eliminated(i)) continue;
        if (model.objective[i] == 0.0) continue;
        append_term(line, model.objective[i], var_name(model, i));
        flush_wrapped(out, line, 200);
    }
    if (!line.empty()) out << line << "\n";

    out << "Subject To\n";
    for (std::size_t r = 0; r < model.rows.size(); ++r) {
        const auto& row = model.rows[r];
        line = " c" + std::to_string(r) + ":";
        for (const auto& [var, coef] : row.terms) {
            append_term(line, coef, var_name(model, var));
            flush_wrapped(out, line, 200);
        }
        char rhs[48];
        std::snprintf(rhs, sizeof(rhs), "%.17g", row.rhs);
        line += row.relation == Relation::Equal ? " = " : " >= ";
        line += rhs;
        out << line << "\n";
    }

    out << "Bounds\nBinaries\n";
    line.clear();
    for (int i = 0; i < model.num_vars(); ++i) {
        if (i < model.num_x && model.eliminated(i)) continue;
        line += " " + var_name(model, i);
        flush_wrapped(out, line, 200);
    }
    if (!line.empty()) out << line << "\n";
    out << "End\n";
    if (!out) throw IoError("write failed for " + path);
}

ParsedSolution read_solution_file(const IlpModel& model, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open solution file " + path);
    const auto names = name_index(model);

    ParsedSolution parsed;
    parsed.assignment.assign(model.num_vars(), 0);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.rfind("# status", 0) == 0) {
            std::istringstream ls(line);
            std::string hash, key, word;
            ls >> hash >> key >> word;
            parsed.has_status = true;
            if (word == "optimal") {
                parsed.status = SolveStatus::Optimal;
            } else if (word == "timelimit" || word == "feasible_timelimit" || word == "feasible") {
                parsed.status = SolveStatus::FeasibleTimeLimit;
            } else if (word == "infeasible") {
                parsed.status = SolveStatus::Infeasible;
            } else {
                parsed.status = SolveStatus::NoSolutionFound;
            }
            continue;
        }
        const auto cpos = line.find('#');
        if (cpos != std::string::npos) line.erase(cpos);
        std::istringstream ls(line);
        std::string name;
        double value;
        if (!(ls >> name)) continue;
        if (!(ls >> value)) {
            std::ostringstream os;
            os << path << ":" << lineno << ": missing value for '" << name << "'";
            throw SolutionParseError(os.str());
        }
        const auto it = names.find(name);
        if (it == names.end()) {
            std::ostringstream os;
            os << path << ":" << lineno << ": unknown variable '" << name
               << "' (solution does not match the model)";
            throw SolutionParseError(os.str());
        }
        const double rounded = std::round(value);
        if (std::abs(value - rounded) > 1e-4 || (rounded != 0.0 && rounded != 1.0)) {
            std::ostringstream os;
            os << path << ":" << lineno << ": non-binary value " << value;
            throw SolutionParseError(os.str());
        }
        parsed.assignment[it->second] = rounded == 1.0 ? 1 : 0;
    }
    return parsed;
}

void write_solution_file(const IlpModel& model, const Assignment& assignment, SolveStatus status,
                         const std::string& path) {
    if (static_cast<int>(assignment.size()) != model.num_vars())
        throw DimensionMismatch("assignment length != variable count");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "# status " << to_string(status) << "\n";
    for (int i = 0; i < model.num_vars(); ++i) {
        if (i < model.num_x && model.eliminated(i)) continue;
        if (assignment[i]) out << var_name(model, i) << " 1\n";
    }
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace ppm
