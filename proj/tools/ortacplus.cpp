// ortacplus: batch toolchain for .ortac mission files.
//   check      parse and statically validate a mission
//   expand     print the ground constraint list
//   plan       find a makespan-optimal plan
//   validate   check a plan JSON file against a mission
//   emit-pddl  export a PDDL3 domain/problem pair

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ortacplus/analysis.hpp"
#include "ortacplus/model.hpp"
#include "ortacplus/parser.hpp"
#include "ortacplus/pddl.hpp"
#include "ortacplus/plan_io.hpp"
#include "ortacplus/planner.hpp"
#include "ortacplus/validator.hpp"

#ifdef _WIN32
#include <io.h>
#define ORTAC_ISATTY _isatty
#define ORTAC_FILENO _fileno
#else
#include <unistd.h>
#define ORTAC_ISATTY isatty
#define ORTAC_FILENO fileno
#endif

namespace {

using namespace ortac;

enum ExitStatus : int {
    kOk = 0,
    kDiagnosticErrors = 1,
    kInfeasible = 2,
    kTimeout = 3,
    kUsageError = 4,
    kIoError = 5,
};

bool use_color() {
    if (std::getenv("ORTACPLUS_NO_COLOR")) return false;
    return ORTAC_ISATTY(ORTAC_FILENO(stderr)) != 0;
}

std::string severity_text(bool is_error) {
    const char *word = is_error ? "error" : "warning";
    if (!use_color()) return word;
    return std::string(is_error ? "\033[31m" : "\033[33m") + word + "\033[0m";
}

void print_parse_diag(const std::string &file, const parser::ParseDiagnostic &d) {
    std::cerr << severity_text(d.severity == parser::Severity::Error) << " " << file << ":"
              << d.span.line << ":" << d.span.column << " [parse] " << d.message << "\n";
}

void print_static_diag(const std::string &file, const analysis::StaticDiagnostic &d) {
    std::cerr << severity_text(d.severity == analysis::Severity::Error) << " " << file
              << " [" << analysis::to_string(d.code) << "] " << d.message << "\n";
}

bool read_file(const std::string &path, std::string &out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return true;
}

bool write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    return static_cast<bool>(out);
}

// Parse + static check; on failure prints diagnostics and returns an exit
// code, on success fills `ground`.
int load_ground(const std::string &path, std::optional<analysis::GroundMission> &ground) {
    std::string text;
    if (!read_file(path, text)) {
        std::cerr << severity_text(true) << " cannot read '" << path << "'\n";
        return kIoError;
    }
    parser::ParseResult parsed = parser::parse_mission(text);
    for (const auto &d : parsed.diagnostics) print_parse_diag(path, d);
    if (!parsed.ok()) return kDiagnosticErrors;
    analysis::CheckResult checked = analysis::check_static(*parsed.mission);
    for (const auto &d : checked.diagnostics) print_static_diag(path, d);
    if (!checked.ok()) return kDiagnosticErrors;
    ground = std::move(checked.ground);
    return kOk;
}

int cmd_check(const std::string &path) {
    std::optional<analysis::GroundMission> gm;
    int status = load_ground(path, gm);
    if (status != kOk) return status;
    std::cout << "ok: " << gm->agents.size() << " agents, " << gm->graph.nodes().size()
              << " nodes, " << gm->graph.edges().size() << " edges, " << gm->ground.size()
              << " ground constraints\n";
    return kOk;
}

int cmd_expand(const std::string &path) {
    std::optional<analysis::GroundMission> gm;
    int status = load_ground(path, gm);
    if (status != kOk) return status;
    for (const GroundConstraint &gc : gm->ground) std::cout << to_string(gc) << "\n";
    return kOk;
}

int cmd_plan(const std::string &path, int max_horizon, double timeout_s,
             const std::string &out_path, unsigned seed) {
    std::optional<analysis::GroundMission> gm;
    int status = load_ground(path, gm);
    if (status != kOk) return status;

    planner::PlannerConfig cfg;
    cfg.max_horizon = max_horizon;
    cfg.timeout_ms = std::max(1, static_cast<int>(std::llround(timeout_s * 1000.0)));
    cfg.seed = seed;

    planner::PlanOutcome outcome = planner::plan(*gm, cfg);
    if (const auto *solved = std::get_if<planner::Solved>(&outcome)) {
        std::string json = plan_io::plan_to_string(solved->plan);
        if (out_path.empty()) {
            std::cout << json;
            std::cerr << "makespan: " << solved->plan.horizon << "\n";
        } else {
            if (!write_file(out_path, json)) {
                std::cerr << severity_text(true) << " cannot write '" << out_path << "'\n";
                return kIoError;
            }
            std::cout << "makespan: " << solved->plan.horizon << "\n";
        }
        return kOk;
    }
    if (const auto *infeasible = std::get_if<planner::InfeasibleUpTo>(&outcome)) {
        std::cerr << "infeasible up to horizon " << infeasible->horizon << "\n";
        return kInfeasible;
    }
    std::cerr << "timeout after " << timeout_s << " s\n";
    return kTimeout;
}

int cmd_validate(const std::string &mission_path, const std::string &plan_path) {
    std::optional<analysis::GroundMission> gm;
    int status = load_ground(mission_path, gm);
    if (status != kOk) return status;

    std::string plan_text;
    if (!read_file(plan_path, plan_text)) {
        std::cerr << severity_text(true) << " cannot read '" << plan_path << "'\n";
        return kIoError;
    }
    Plan plan;
    try {
        plan = plan_io::plan_from_string(plan_text);
    } catch (const plan_io::PlanFormatError &e) {
        std::cerr << severity_text(true) << " " << plan_path << ": " << e.what() << "\n";
        return kIoError;
    }
    std::vector<validator::Violation> violations = validator::validate(plan, *gm);
    std::cout << plan_io::violations_to_json(violations).dump(2) << "\n";
    return violations.empty() ? kOk : kDiagnosticErrors;
}

int cmd_emit_pddl(const std::string &path, std::string stem) {
    std::optional<analysis::GroundMission> gm;
    int status = load_ground(path, gm);
    if (status != kOk) return status;

    if (stem.empty()) {
        stem = path;
        size_t dot = stem.rfind(".ortac");
        if (dot != std::string::npos && dot == stem.size() - 6) stem.resize(dot);
    }
    pddl::PddlPair pair = pddl::emit(*gm);
    std::string domain_path = stem + "-domain.pddl";
    std::string problem_path = stem + "-problem.pddl";
    if (!write_file(domain_path, pair.domain_text) ||
        !write_file(problem_path, pair.problem_text)) {
        std::cerr << severity_text(true) << " cannot write PDDL files for stem '" << stem
                  << "'\n";
        return kIoError;
    }
    std::cout << domain_path << "\n" << problem_path << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"ORTAC+ mission compiler and planner"};
    app.require_subcommand(1);

    std::string path, plan_path, out_path, stem;
    int max_horizon = 64;
    double timeout_s = 60.0;
    unsigned seed = 0;

    CLI::App *check = app.add_subcommand("check", "Parse and statically validate a mission");
    check->add_option("mission", path, "Mission file (.ortac)")->required();

    CLI::App *expand = app.add_subcommand("expand", "Print the ground constraint list");
    expand->add_option("mission", path, "Mission file (.ortac)")->required();

    CLI::App *plan = app.add_subcommand("plan", "Find a makespan-optimal plan");
    plan->add_option("mission", path, "Mission file (.ortac)")->required();
    plan->add_option("--max-horizon", max_horizon, "Largest horizon to try")
        ->check(CLI::PositiveNumber);
    plan->add_option("--timeout", timeout_s, "Time budget in seconds (decimal)")
        ->check(CLI::NonNegativeNumber);
    plan->add_option("--out", out_path, "Write the plan JSON here instead of stdout");
    plan->add_option("--seed", seed, "Tie-break shuffling seed");

    CLI::App *validate = app.add_subcommand("validate", "Check a plan against a mission");
    validate->add_option("mission", path, "Mission file (.ortac)")->required();
    validate->add_option("plan", plan_path, "Plan JSON file")->required();

    CLI::App *emit = app.add_subcommand("emit-pddl", "Export a PDDL3 domain/problem pair");
    emit->add_option("mission", path, "Mission file (.ortac)")->required();
    emit->add_option("--stem", stem, "Output stem (default: mission path without .ortac)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kUsageError;
    }

    try {
        if (check->parsed()) return cmd_check(path);
        if (expand->parsed()) return cmd_expand(path);
        if (plan->parsed()) return cmd_plan(path, max_horizon, timeout_s, out_path, seed);
        if (validate->parsed()) return cmd_validate(path, plan_path);
        if (emit->parsed()) return cmd_emit_pddl(path, stem);
    } catch (const std::exception &e) {
        std::cerr << severity_text(true) << " " << e.what() << "\n";
        return kDiagnosticErrors;
    }
    return kUsageError;
}
