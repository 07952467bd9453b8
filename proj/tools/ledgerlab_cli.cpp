// Command-line front end: interactive design-guide questionnaires, path
// listings, declarative scenario runs, and a guided demo. Exit codes:
// 0 success, 1 completed run with policy violations, 2 usage or input errors.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ledgerlab/guide.hpp"
#include "ledgerlab/scenario.hpp"

namespace fs = std::filesystem;
namespace sc = ledgerlab::scenario;
using namespace ledgerlab;

namespace {

constexpr const char* kNeedsAnswerPrefix = "NeedsAnswer: ";

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::optional<std::uint64_t> parse_u64(const std::string& text) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size()) return std::nullopt;
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

// --seed beats $LEDGERLAB_SEED beats 0.
std::optional<std::uint64_t> resolve_seed(const std::string& flag_value) {
    if (!flag_value.empty()) return parse_u64(flag_value);
    if (const char* env = std::getenv("LEDGERLAB_SEED")) return parse_u64(env);
    return 0;
}

void print_recommendation(const guide::Node& leaf, const std::vector<std::string>& path) {
    std::cout << "recommendation: " << leaf.text << "\n";
    if (!leaf.note.empty()) std::cout << "note: " << leaf.note << "\n";
    if (leaf.experimental) std::cout << "status: experimental\n";
    std::cout << "path:";
    for (const std::string& id : path) std::cout << " " << id;
    std::cout << "\n";
}

int cmd_guide(const std::string& tree_name, const std::string& answers_csv, bool have_answers) {
    const guide::Tree tree = guide::tree_by_name(tree_name);

    if (have_answers) {
        guide::Answers answers;
        std::stringstream ss(answers_csv);
        std::string pair;
        while (std::getline(ss, pair, ',')) {
            pair = trim(pair);
            if (pair.empty()) continue;
            const auto eq = pair.find('=');
            if (eq == std::string::npos) {
                std::cerr << "error: expected key=value, got \"" << pair << "\"\n";
                return 2;
            }
            const std::string key = trim(pair.substr(0, eq));
            const auto value = guide::parse_answer(trim(pair.substr(eq + 1)));
            if (key.empty() || !value) {
                std::cerr << "error: cannot parse answer \"" << pair << "\" (use yes/no)\n";
                return 2;
            }
            answers[key] = *value;
        }
        try {
            const guide::Evaluation eval = guide::evaluate(tree, answers);
            print_recommendation(eval.leaf, eval.path);
            return 0;
        } catch (const LabError& e) {
            if (e.code() != ErrorCode::NeedsAnswer) throw;
            std::string question = e.what();
            if (question.rfind(kNeedsAnswerPrefix, 0) == 0)
                question = question.substr(std::string(kNeedsAnswerPrefix).size());
            std::cout << "needs answer: " << question << "\n";
            return 2;
        }
    }

    // Interactive walk: ask only the questions on the chosen path.
    std::vector<std::string> path;
    int cur = tree.root;
    while (true) {
        const guide::Node& node = tree.node(cur);
        path.push_back(node.id);
        if (node.is_leaf()) {
            print_recommendation(node, path);
            return 0;
        }
        std::cout << node.text << " [y/n] " << std::flush;
        std::string line;
        if (!std::getline(std::cin, line)) {
            std::cout << "\nneeds answer: " << node.text << "\n";
            return 2;
        }
        const auto answer = guide::parse_answer(trim(line));
        if (!answer) {
            std::cout << "please answer yes or no\n";
            path.pop_back();
            continue;
        }
        cur = *answer ? node.yes : node.no;
    }
}

int cmd_paths(const std::string& tree_name) {
    const guide::Tree tree = guide::tree_by_name(tree_name);
    const auto paths = guide::enumerate_paths(tree);
    std::size_t n = 0;
    for (const auto& entry : paths) {
        std::cout << ++n << ". " << entry.leaf.text;
        if (entry.leaf.experimental) std::cout << " (experimental)";
        if (!entry.leaf.note.empty()) std::cout << " — " << entry.leaf.note;
        std::cout << "\n   answers:";
        for (const auto& [id, value] : entry.answers)
            std::cout << " " << id << "=" << (value ? "yes" : "no");
        std::cout << "\n";
    }
    std::cout << "total: " << paths.size() << " paths\n";
    return 0;
}

void print_violations(const sc::Outcome& out) {
    for (const auto& row : out.report.at("violations")) {
        if (row.contains("double_commit")) {
            std::cout << "  - policy " << row.at("policy").get<std::string>()
                      << ": step \"" << row.at("double_commit").get<std::string>()
                      << "\" committed the same asset twice\n";
        } else {
            std::cout << "  - policy " << row.at("policy").get<std::string>() << ": actor "
                      << row.at("actor").get<std::string>() << " learned "
                      << row.at("fact").at("kind").get<std::string>() << "\n";
        }
    }
}

int cmd_run(const std::string& file, const std::string& seed_text,
            const std::string& topology_text, std::string report_path) {
    const auto seed = resolve_seed(seed_text);
    if (!seed) {
        std::cerr << "error: seed must be a non-negative integer\n";
        return 2;
    }
    sc::RunOptions opts;
    opts.seed = *seed;
    if (!topology_text.empty()) {
        const auto kind = topo::topology_from_name(topology_text);
        if (!kind) {
            std::cerr << "error: unknown topology \"" << topology_text
                      << "\" (channelized, p2p, public-anchor)\n";
            return 2;
        }
        opts.topology_override = kind;
    }

    const sc::Outcome out = sc::run_file(file, opts);

    if (report_path.empty())
        report_path = fs::path(file).stem().string() + ".report.json";
    std::ofstream report(report_path, std::ios::binary | std::ios::trunc);
    if (!report) {
        std::cerr << "error: cannot write report to " << report_path << "\n";
        return 2;
    }
    report << out.report_text;

    std::cout << "scenario:   " << out.report.at("scenario").get<std::string>() << "\n"
              << "topology:   " << out.report.at("topology").get<std::string>() << "\n"
              << "seed:       " << *seed << "\n"
              << "violations: " << out.report.at("violations").size() << "\n";
    print_violations(out);
    std::cout << "report:     " << report_path << "\n";
    return out.exit_code;
}

int cmd_demo(const std::string& name, const std::string& seed_text) {
    if (name != "letter-of-credit") {
        std::cerr << "error: unknown demo \"" << name << "\" (available: letter-of-credit)\n";
        return 2;
    }
    const auto seed = resolve_seed(seed_text);
    if (!seed) {
        std::cerr << "error: seed must be a non-negative integer\n";
        return 2;
    }

    fs::path dir;
    if (const char* env = std::getenv("LEDGERLAB_SOURCE_DIR")) dir = env;
#ifdef LEDGERLAB_SOURCE_DIR
    if (dir.empty()) dir = LEDGERLAB_SOURCE_DIR;
#endif
    if (dir.empty()) dir = ".";
    const fs::path file = dir / "scenarios" / "letter_of_credit.json";

    const sc::json doc = sc::load_file(file.string());
    sc::RunOptions opts;
    opts.seed = *seed;
    const sc::Outcome out = sc::run_scenario(doc, opts);

    std::cout << "demo: " << out.report.at("scenario").get<std::string>() << " ("
              << out.report.at("topology").get<std::string>() << ", seed " << *seed << ")\n\n"
              << "steps:\n";
    for (const auto& step : doc.at("steps")) {
        const std::string op = step.at("op").get<std::string>();
        const std::string label = step.value("label", std::string{});
        std::cout << "  " << label << ": " << op;
        if (op == "mint") std::cout << " by " << step.at("owner").get<std::string>();
        if (op == "transfer")
            std::cout << " " << step.at("from").get<std::string>() << " -> "
                      << step.at("to").get<std::string>();
        if (step.contains("collection")) {
            std::cout << " (off-chain data for";
            for (const auto& m : step.at("collection")) std::cout << " " << m.get<std::string>();
            std::cout << ")";
        }
        if (out.labels.count(label))
            std::cout << "  tx " << out.labels.at(label).hex().substr(0, 16);
        std::cout << "\n";
    }

    std::cout << "\npolicies:\n";
    std::set<std::string> violated;
    for (const auto& row : out.report.at("violations"))
        violated.insert(row.at("policy").get<std::string>());
    for (const auto& policy : doc.at("policies")) {
        const std::string pname = policy.at("name").get<std::string>();
        std::cout << "  " << pname << ": " << (violated.count(pname) ? "VIOLATED" : "ok") << "\n";
    }
    print_violations(out);

    const std::string report_path = "letter_of_credit.report.json";
    std::ofstream report(report_path, std::ios::binary | std::ios::trunc);
    report << out.report_text;
    std::cout << "\nreport: " << report_path << "\n";
    return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ledgerlab — privacy mechanics lab for permissioned ledgers"};
    app.require_subcommand(1);

    std::string guide_tree, guide_answers;
    auto* guide_cmd = app.add_subcommand(
        "guide", "Walk a design questionnaire (data, interaction, logic)");
    guide_cmd->add_option("tree", guide_tree, "questionnaire name")->required();
    auto* answers_opt = guide_cmd->add_option(
        "--answers", guide_answers, "comma-separated id=yes|no pairs; omit for interactive mode");

    std::string paths_tree;
    auto* paths_cmd =
        app.add_subcommand("paths", "List every path of a questionnaire with its answers");
    paths_cmd->add_option("tree", paths_tree, "questionnaire name")->required();

    std::string run_file, run_seed, run_topology, run_report;
    auto* run_cmd = app.add_subcommand("run", "Replay a scenario file and write its report");
    run_cmd->add_option("file", run_file, "scenario JSON file")->required();
    run_cmd->add_option("--seed", run_seed, "delivery interleaving seed (default: $LEDGERLAB_SEED or 0)");
    run_cmd->add_option("--topology", run_topology,
                        "override the scenario's topology (channelized, p2p, public-anchor)");
    run_cmd->add_option("--report", run_report, "report path (default: <stem>.report.json)");

    std::string demo_name, demo_seed;
    auto* demo_cmd = app.add_subcommand("demo", "Run a guided end-to-end example");
    demo_cmd->add_option("name", demo_name, "demo name (letter-of-credit)")->required();
    demo_cmd->add_option("--seed", demo_seed, "delivery interleaving seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // --help exits 0; every parse failure is usage
    }

    try {
        if (app.got_subcommand(guide_cmd))
            return cmd_guide(guide_tree, guide_answers, answers_opt->count() > 0);
        if (app.got_subcommand(paths_cmd)) return cmd_paths(paths_tree);
        if (app.got_subcommand(run_cmd))
            return cmd_run(run_file, run_seed, run_topology, run_report);
        if (app.got_subcommand(demo_cmd)) return cmd_demo(demo_name, demo_seed);
    } catch (const LabError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
