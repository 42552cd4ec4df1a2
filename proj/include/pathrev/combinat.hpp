#pragma once

// Bijections between arrival sequences (priority queues), binary tournament
// trees, permutations and ordered trees.
//
// Priorities only matter through their relative order, so every map first
// normalizes a sequence to its ranks 1..n. Outputs that are sequences are
// always rank sequences.

#include "pathrev/tree_core.hpp"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pathrev {

/// Arrival-ordered priorities, assumed distinct.
using PrioritySequence = std::vector<int>;

/// A permutation of 1..n in one-line notation.
class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<int> mapping) : map_(std::move(mapping))
    {
        std::vector<char> seen(map_.size() + 1, 0);
        for (int v : map_) {
            if (v < 1 || static_cast<std::size_t>(v) > map_.size() || seen[v]) {
                throw std::invalid_argument("Permutation: not a bijection on [n]");
            }
            seen[v] = 1;
        }
    }

    static Permutation identity(std::size_t n)
    {
        std::vector<int> m(n);
        std::iota(m.begin(), m.end(), 1);
        return Permutation(std::move(m));
    }

    [[nodiscard]] std::size_t size() const noexcept { return map_.size(); }
    [[nodiscard]] const std::vector<int>& mapping() const noexcept { return map_; }
    [[nodiscard]] int operator()(std::size_t i) const { return map_.at(i - 1); }

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<int> map_;
};

/// Binary tree with min-at-root labels; the empty tree is Lambda.
///
/// Nodes live in a flat vector; `root` and child links index into it.
class TournamentTree {
public:
    struct Node {
        int label;
        std::optional<std::size_t> left;
        std::optional<std::size_t> right;
    };

    TournamentTree() = default;

    [[nodiscard]] bool empty() const noexcept { return !root_; }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] std::optional<std::size_t> root() const noexcept { return root_; }
    [[nodiscard]] const Node& node(std::size_t i) const { return nodes_.at(i); }

    std::size_t add(int label)
    {
        nodes_.push_back(Node{label, std::nullopt, std::nullopt});
        return nodes_.size() - 1;
    }
    void set_root(std::optional<std::size_t> r) { root_ = r; }
    void set_left(std::size_t at, std::optional<std::size_t> child) { nodes_.at(at).left = child; }
    void set_right(std::size_t at, std::optional<std::size_t> child) { nodes_.at(at).right = child; }

    /// Labels are exactly 1..n, every node is reachable once from the root,
    /// and each label is smaller than its children's.
    [[nodiscard]] bool valid() const
    {
        if (!root_) {
            return nodes_.empty();
        }
        std::vector<char> visited(nodes_.size(), 0);
        std::vector<char> labels(nodes_.size() + 1, 0);
        std::vector<std::size_t> stack{*root_};
        std::size_t seen = 0;
        while (!stack.empty()) {
            const auto at = stack.back();
            stack.pop_back();
            if (at >= nodes_.size() || visited[at]) {
                return false;
            }
            visited[at] = 1;
            ++seen;
            const auto& nd = nodes_[at];
            if (nd.label < 1 || static_cast<std::size_t>(nd.label) > nodes_.size() || labels[nd.label]) {
                return false;
            }
            labels[nd.label] = 1;
            for (auto child : {nd.left, nd.right}) {
                if (child) {
                    if (*child >= nodes_.size() || nodes_[*child].label <= nd.label) {
                        return false;
                    }
                    stack.push_back(*child);
                }
            }
        }
        return seen == nodes_.size();
    }

    /// `(<label> <left> <right>)` with `.` for the empty tree.
    [[nodiscard]] std::string to_string() const
    {
        std::string out;
        write(out, root_);
        return out;
    }

    static TournamentTree parse(std::string_view text)
    {
        TournamentTree t;
        std::size_t pos = 0;
        t.root_ = t.read(text, pos);
        skip_ws(text, pos);
        if (pos != text.size()) {
            throw std::invalid_argument("TournamentTree::parse: trailing input");
        }
        return t;
    }

    friend bool operator==(const TournamentTree& a, const TournamentTree& b)
    {
        return a.to_string() == b.to_string();
    }

private:
    void write(std::string& out, std::optional<std::size_t> at) const
    {
        if (!at) {
            out += '.';
            return;
        }
        const auto& nd = nodes_[*at];
        out += '(';
        out += std::to_string(nd.label);
        out += ' ';
        write(out, nd.left);
        out += ' ';
        write(out, nd.right);
        out += ')';
    }

    static void skip_ws(std::string_view text, std::size_t& pos)
    {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
        }
    }

    std::optional<std::size_t> read(std::string_view text, std::size_t& pos)
    {
        skip_ws(text, pos);
        if (pos >= text.size()) {
            throw std::invalid_argument("TournamentTree::parse: unexpected end");
        }
        if (text[pos] == '.') {
            ++pos;
            return std::nullopt;
        }
        if (text[pos] != '(') {
            throw std::invalid_argument("TournamentTree::parse: expected '(' or '.'");
        }
        ++pos;
        skip_ws(text, pos);
        std::size_t used = 0;
        const int label = std::stoi(std::string(text.substr(pos)), &used);
        pos += used;
        const auto me = add(label);
        const auto l = read(text, pos);
        const auto r = read(text, pos);
        nodes_[me].left = l;
        nodes_[me].right = r;
        skip_ws(text, pos);
        if (pos >= text.size() || text[pos] != ')') {
            throw std::invalid_argument("TournamentTree::parse: expected ')'");
        }
        ++pos;
        return me;
    }

    std::vector<Node> nodes_;
    std::optional<std::size_t> root_;
};

/// Replaces each priority by its rank (1 = smallest). Throws on duplicates.
inline std::vector<int> ranks_of(const PrioritySequence& s)
{
    std::vector<std::size_t> idx(s.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s[a] < s[b]; });
    std::vector<int> rank(s.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        if (r > 0 && s[idx[r]] == s[idx[r - 1]]) {
            throw std::invalid_argument("priority sequence has duplicated priorities");
        }
        rank[idx[r]] = static_cast<int>(r) + 1;
    }
    return rank;
}

namespace detail {

inline std::optional<std::size_t> build_tournament(TournamentTree& t, const std::vector<int>& s,
                                                   std::size_t lo, std::size_t hi)
{
    if (lo >= hi) {
        return std::nullopt;
    }
    const auto m = static_cast<std::size_t>(std::min_element(s.begin() + lo, s.begin() + hi) - s.begin());
    const auto me = t.add(s[m]);
    const auto l = build_tournament(t, s, lo, m);
    const auto r = build_tournament(t, s, m + 1, hi);
    t.set_left(me, l);
    t.set_right(me, r);
    return me;
}

inline void inorder(const TournamentTree& t, std::optional<std::size_t> at, std::vector<int>& out)
{
    if (!at) {
        return;
    }
    const auto& nd = t.node(*at);
    inorder(t, nd.left, out);
    out.push_back(nd.label);
    inorder(t, nd.right, out);
}

} // namespace detail

/// gamma: min at the root, left part of the sequence to the left subtree,
/// right part to the right subtree.
inline TournamentTree tournament_from_sequence(const PrioritySequence& s)
{
    const auto r = ranks_of(s);
    TournamentTree t;
    t.set_root(detail::build_tournament(t, r, 0, r.size()));
    return t;
}

/// gamma^{-1}: in-order traversal.
inline PrioritySequence sequence_from_tournament(const TournamentTree& t)
{
    if (!t.valid()) {
        throw std::invalid_argument("sequence_from_tournament: not a tournament tree");
    }
    PrioritySequence out;
    out.reserve(t.size());
    detail::inorder(t, t.root(), out);
    return out;
}

/// tau: the permutation read as an arrival sequence.
inline TournamentTree tournament_from_permutation(const Permutation& sigma)
{
    return tournament_from_sequence(sigma.mapping());
}

namespace detail {

template <bool Right>
PrioritySequence branch(const TournamentTree& t)
{
    PrioritySequence out;
    for (auto at = t.root(); at;) {
        const auto& nd = t.node(*at);
        out.push_back(nd.label);
        at = Right ? nd.right : nd.left;
    }
    return out;
}

} // namespace detail

/// Labels from the root repeatedly to the right child.
inline PrioritySequence right_branch(const TournamentTree& t) { return detail::branch<true>(t); }

/// Labels from the root repeatedly to the left child.
inline PrioritySequence left_branch(const TournamentTree& t) { return detail::branch<false>(t); }

/// Ordered tree: parent links plus the left-to-right order of each child list.
class OrderedTree {
public:
    OrderedTree() = default; // Lambda

    OrderedTree(NodeId root, std::vector<std::vector<NodeId>> children)
        : root_(root), children_(std::move(children))
    {
        if (children_.empty() || root_ >= children_.size()) {
            throw std::invalid_argument("OrderedTree: bad root");
        }
        // validates shape via the RootedTree constructor
        (void)tree();
    }

    [[nodiscard]] bool empty() const noexcept { return children_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return children_.size(); }
    [[nodiscard]] NodeId root() const noexcept { return root_; }
    [[nodiscard]] const std::vector<NodeId>& children(NodeId v) const { return children_.at(v); }

    /// The unordered view. Throws on the empty tree.
    [[nodiscard]] RootedTree tree() const
    {
        if (children_.empty()) {
            throw std::logic_error("OrderedTree::tree: empty tree");
        }
        std::vector<std::optional<NodeId>> parent(children_.size());
        std::vector<char> has_parent(children_.size(), 0);
        for (NodeId v = 0; v < children_.size(); ++v) {
            for (NodeId c : children_[v]) {
                if (c >= children_.size() || has_parent[c] || c == root_) {
                    throw std::invalid_argument("OrderedTree: child listed twice or out of range");
                }
                has_parent[c] = 1;
                parent[c] = v;
            }
        }
        return RootedTree(std::move(parent));
    }

    friend bool operator==(const OrderedTree&, const OrderedTree&) = default;

private:
    NodeId root_ = 0;
    std::vector<std::vector<NodeId>> children_;
};

namespace detail {

/// Heap positions 1, 3, 7, ... present in a size-n complete shape.
inline std::size_t right_spine_length(std::size_t n)
{
    std::size_t len = 0;
    for (std::size_t pos = 1; pos <= n; pos = 2 * pos + 1) {
        ++len;
    }
    return len;
}

} // namespace detail

/// alpha: the arrival sequence fills an essentially complete binary tree in
/// breadth-first, left-to-right order (position x has parent x/2), then the
/// natural correspondence turns it into an ordered tree: left link = first
/// child, right link = next sibling. The top-level siblings of the first
/// root (positions 3, 7, 15, ...) are appended as its trailing children so
/// the result is one n-node tree. Node ids are ranks - 1.
inline OrderedTree ordered_tree_from_sequence(const PrioritySequence& s)
{
    if (s.empty()) {
        return OrderedTree{};
    }
    const auto rank = ranks_of(s);
    const std::size_t n = s.size();
    auto id_at = [&](std::size_t pos) { return static_cast<NodeId>(rank[pos - 1] - 1); };

    std::vector<std::vector<NodeId>> children(n);
    for (std::size_t pos = 1; pos <= n; ++pos) {
        // children of pos: left child, then its right chain
        for (std::size_t c = 2 * pos; c <= n; c = 2 * c + 1) {
            children[id_at(pos)].push_back(id_at(c));
        }
    }
    for (std::size_t pos = 3; pos <= n; pos = 2 * pos + 1) {
        children[id_at(1)].push_back(id_at(pos));
    }
    return OrderedTree(id_at(1), std::move(children));
}

/// beta: inverse of alpha. Rejects trees outside alpha's image, i.e. trees
/// whose binary image is not the essentially complete shape.
inline PrioritySequence sequence_from_ordered_tree(const OrderedTree& t)
{
    if (t.empty()) {
        return {};
    }
    const std::size_t n = t.size();
    const std::size_t extra_roots = detail::right_spine_length(n) - 1;
    const auto& root_kids = t.children(t.root());
    if (root_kids.size() < extra_roots) {
        throw std::invalid_argument("sequence_from_ordered_tree: tree is not in the image of alpha");
    }
    const std::size_t own = root_kids.size() - extra_roots;

    // Binary image: first child -> left, next sibling -> right.
    std::vector<std::optional<NodeId>> left(n), right(n);
    auto link_chain = [&](NodeId parent, auto first, auto last) {
        if (first == last) {
            return;
        }
        left[parent] = *first;
        for (auto it = first; std::next(it) != last; ++it) {
            right[*it] = *std::next(it);
        }
    };
    link_chain(t.root(), root_kids.begin(), root_kids.begin() + static_cast<std::ptrdiff_t>(own));
    NodeId prev = t.root();
    for (std::size_t i = own; i < root_kids.size(); ++i) {
        right[prev] = root_kids[i];
        prev = root_kids[i];
    }
    for (NodeId v = 0; v < n; ++v) {
        if (v != t.root()) {
            link_chain(v, t.children(v).begin(), t.children(v).end());
        }
    }

    // Assign heap positions; every one must land in 1..n.
    PrioritySequence out(n, 0);
    std::vector<std::pair<NodeId, std::size_t>> stack{{t.root(), 1}};
    std::size_t placed = 0;
    while (!stack.empty()) {
        const auto [v, pos] = stack.back();
        stack.pop_back();
        if (pos > n || out[pos - 1] != 0) {
            throw std::invalid_argument("sequence_from_ordered_tree: tree is not in the image of alpha");
        }
        out[pos - 1] = static_cast<int>(v) + 1;
        ++placed;
        if (left[v]) {
            stack.emplace_back(*left[v], 2 * pos);
        }
        if (right[v]) {
            stack.emplace_back(*right[v], 2 * pos + 1);
        }
    }
    if (placed != n) {
        throw std::invalid_argument("sequence_from_ordered_tree: tree is not in the image of alpha");
    }
    return out;
}

/// Calls f(permutation) for every permutation of 1..n in lexicographic order.
template <typename F>
void for_each_permutation(std::size_t n, F&& f)
{
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 1);
    do {
        f(static_cast<const std::vector<int>&>(p));
    } while (std::next_permutation(p.begin(), p.end()));
}

} // namespace pathrev
