#pragma once

// Decision-tree design guides. Three built-in questionnaires map privacy
// requirements onto ledger mechanisms: one for data confidentiality, one
// for interaction privacy, one for business-logic confidentiality.

#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ledgerlab/errors.hpp"

namespace ledgerlab::guide {

// A node is either a question (both edges wired) or a recommendation leaf
// (no edges). Ids are stable; display text may be reworded without breaking
// recorded answer vectors.
struct Node {
    std::string id;
    std::string text;
    std::string note;           // extra annotation on a recommendation
    bool experimental = false;  // mechanism not mature enough for production use
    int yes = -1;
    int no = -1;

    bool is_leaf() const { return yes < 0 && no < 0; }
};

struct Tree {
    std::string name;
    std::vector<Node> nodes;
    int root = 0;

    const Node& node(int idx) const {
        if (idx < 0 || static_cast<std::size_t>(idx) >= nodes.size())
            throw LabError(ErrorCode::MalformedInput, "node index out of range");
        return nodes[static_cast<std::size_t>(idx)];
    }
};

// Ordered (question id, answer) pairs, as produced by path enumeration.
using AnswerVector = std::vector<std::pair<std::string, bool>>;

// Lookup form used by evaluate(); extraneous entries are ignored.
using Answers = std::map<std::string, bool>;

inline Answers to_answers(const AnswerVector& v) {
    Answers out;
    for (const auto& [id, value] : v) out[id] = value;
    return out;
}

// Accepts the usual yes/no spellings; anything else is nullopt.
inline std::optional<bool> parse_answer(std::string_view text) {
    std::string lower;
    lower.reserve(text.size());
    for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "y" || lower == "yes" || lower == "true" || lower == "1") return true;
    if (lower == "n" || lower == "no" || lower == "false" || lower == "0") return false;
    return std::nullopt;
}

struct Evaluation {
    Node leaf;
    std::vector<std::string> path;  // node ids, root through leaf
};

inline Evaluation evaluate(const Tree& tree, const Answers& answers) {
    Evaluation out;
    int cur = tree.root;
    while (true) {
        // An acyclic tree cannot revisit a node, so the path length bounds
        // the walk; exceeding it means the tree is malformed.
        if (out.path.size() > tree.nodes.size())
            throw LabError(ErrorCode::MalformedInput, "tree contains a cycle");
        const Node& n = tree.node(cur);
        out.path.push_back(n.id);
        if (n.is_leaf()) {
            out.leaf = n;
            return out;
        }
        auto it = answers.find(n.id);
        if (it == answers.end()) throw LabError(ErrorCode::NeedsAnswer, n.text);
        cur = it->second ? n.yes : n.no;
    }
}

struct PathEntry {
    AnswerVector answers;
    Node leaf;
    std::vector<std::string> path;
};

namespace detail {

inline void enumerate_walk(const Tree& tree, int idx, AnswerVector& answers,
                           std::vector<std::string>& path, std::set<int>& expanded,
                           std::vector<PathEntry>& out) {
    const Node& n = tree.node(idx);
    path.push_back(n.id);
    if (n.is_leaf()) {
        out.push_back(PathEntry{answers, n, path});
        path.pop_back();
        return;
    }
    // Each question is expanded once across the whole enumeration. An edge
    // that loops back to an earlier question (the data tree has one) ends
    // the branch without a recommendation instead of duplicating paths.
    if (!expanded.insert(idx).second) {
        path.pop_back();
        return;
    }
    answers.emplace_back(n.id, true);
    enumerate_walk(tree, n.yes, answers, path, expanded, out);
    answers.back().second = false;
    enumerate_walk(tree, n.no, answers, path, expanded, out);
    answers.pop_back();
    path.pop_back();
}

}  // namespace detail

// Exhaustive yes-first walk; each entry's answer vector replays to its leaf.
inline std::vector<PathEntry> enumerate_paths(const Tree& tree) {
    std::vector<PathEntry> out;
    AnswerVector answers;
    std::vector<std::string> path;
    std::set<int> expanded;
    detail::enumerate_walk(tree, tree.root, answers, path, expanded, out);
    return out;
}

inline bool well_formed(const Tree& tree, std::string* reason = nullptr) {
    auto fail = [&](const std::string& why) {
        if (reason) *reason = why;
        return false;
    };
    const int n = static_cast<int>(tree.nodes.size());
    if (n == 0) return fail("empty tree");
    if (tree.root < 0 || tree.root >= n) return fail("root out of range");
    std::set<std::string> ids;
    for (const Node& node : tree.nodes) {
        if (node.id.empty()) return fail("empty node id");
        if (!ids.insert(node.id).second) return fail("duplicate node id: " + node.id);
        const bool has_yes = node.yes >= 0;
        const bool has_no = node.no >= 0;
        if (has_yes != has_no) return fail("half-wired question: " + node.id);
        if (has_yes && (node.yes >= n || node.no >= n))
            return fail("edge out of range: " + node.id);
    }
    // One DFS for both reachability and cycle detection.
    std::vector<int> color(static_cast<std::size_t>(n), 0);  // 0 unseen, 1 on stack, 2 done
    std::function<bool(int)> visit = [&](int idx) {
        if (color[static_cast<std::size_t>(idx)] == 1) return false;
        if (color[static_cast<std::size_t>(idx)] == 2) return true;
        color[static_cast<std::size_t>(idx)] = 1;
        const Node& node = tree.nodes[static_cast<std::size_t>(idx)];
        if (!node.is_leaf() && (!visit(node.yes) || !visit(node.no))) return false;
        color[static_cast<std::size_t>(idx)] = 2;
        return true;
    };
    if (!visit(tree.root)) return fail("cycle reachable from root");
    for (int i = 0; i < n; ++i)
        if (color[static_cast<std::size_t>(i)] != 2)
            return fail("unreachable node: " + tree.nodes[static_cast<std::size_t>(i)].id);
    return true;
}

namespace detail {

struct TreeBuilder {
    Tree tree;

    int leaf(std::string id, std::string text, std::string note = "", bool experimental = false) {
        tree.nodes.push_back(
            Node{std::move(id), std::move(text), std::move(note), experimental, -1, -1});
        return static_cast<int>(tree.nodes.size()) - 1;
    }

    int question(std::string id, std::string text, int yes, int no) {
        tree.nodes.push_back(Node{std::move(id), std::move(text), "", false, yes, no});
        return static_cast<int>(tree.nodes.size()) - 1;
    }
};

}  // namespace detail

// Data-confidentiality questionnaire. One question (collective computation)
// is reachable from two places, which keeps the recommendation set identical
// whether the asker arrives via the deletion branch or the boolean-proof
// branch.
inline Tree data_tree() {
    detail::TreeBuilder b;
    b.tree.name = "data";
    const int single = b.leaf("single-ledger", "Single ledger");
    const int mpc = b.leaf("mpc-off-chain", "MPC with off-chain data");
    const int off_hash = b.leaf("off-chain-hash", "Off-chain data with public hash");
    const int zkp = b.leaf("zkp", "ZKP");
    const int tear_offs = b.leaf("tear-offs", "Merkle tree tear-offs on separate ledger");
    const int sep_validators =
        b.leaf("separation-validators", "Separation of ledgers with optional hash");
    const int sep_parts = b.leaf("separation-parts", "Separation of ledgers with optional hash");
    const int tee = b.leaf("tee-hide", "TEE");
    const int tee_hom = b.leaf("tee-homomorphic", "TEE", "Homomorphic computation", true);

    const int collective = b.question("collective", "Collective computation?", mpc, off_hash);
    const int hide = b.question("hide-logic", "Need to hide business logic?", tee, tee_hom);
    const int validators = b.question(
        "validators-read", "Are validators allowed to read transactions?", sep_validators, hide);
    const int boolean_proofs =
        b.question("boolean-proofs", "Boolean proofs enough?", zkp, collective);
    const int parts = b.question(
        "parts-private", "Parts of data private to one or more parties?", tear_offs, sep_parts);
    const int owner = b.question("owner-only", "Data private to owner only?", boolean_proofs, parts);
    const int enc = b.question("enc-shareable", "Can encrypted data be shared and stored?",
                               validators, owner);
    const int deletion = b.question("deletion", "Is deletion necessary?", collective, enc);
    b.tree.root = b.question("confidential", "Is data confidential?", deletion, single);
    return b.tree;
}

// Interaction-privacy ladder: private group ledger, then unlinkable one-time
// keys within a ledger, then proving identity without revealing it.
inline Tree interaction_tree() {
    detail::TreeBuilder b;
    b.tree.name = "interaction";
    const int separation = b.leaf("separation", "Separation of ledgers");
    const int one_time = b.leaf("one-time-keys", "One-time public keys");
    const int zkp_id = b.leaf("zkp-identity", "ZKP of identity");
    const int subgroup =
        b.question("subgroup-unlinkability",
                   "Does a sub-group want to hide that they are transacting?", one_time, zkp_id);
    b.tree.root = b.question("group-privacy",
                             "Do group members who know each other wish to interact privately?",
                             separation, subgroup);
    return b.tree;
}

// Business-logic confidentiality: TEEs when even node administrators must
// not see data or logic; otherwise restrict installation, or move execution
// off-chain at the cost of contract version control.
inline Tree logic_tree() {
    detail::TreeBuilder b;
    b.tree.name = "logic";
    const int tee = b.leaf("tee", "TEE");
    const int engine = b.leaf("off-chain-engine", "Off-chain execution engine",
                              "Version control managed outside the DLT layer");
    const int install = b.leaf("install-involved", "Install on involved nodes");
    const int language = b.question("language-freedom",
                                    "Is free choice of contract language required?", engine,
                                    install);
    b.tree.root = b.question(
        "admin-hidden", "Must data and logic stay hidden from node administrators?", tee, language);
    return b.tree;
}

inline std::vector<Tree> builtin_trees() {
    return {data_tree(), interaction_tree(), logic_tree()};
}

inline Tree tree_by_name(const std::string& name) {
    if (name == "data") return data_tree();
    if (name == "interaction") return interaction_tree();
    if (name == "logic") return logic_tree();
    throw LabError(ErrorCode::UnknownTree, "unknown tree: " + name);
}

}  // namespace ledgerlab::guide
