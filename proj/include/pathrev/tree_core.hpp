#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pathrev {

/// Dense node identifier in [0, n). Node 0 is the conventional initial root.
using NodeId = std::uint32_t;

/// Rooted tree stored as parent links only.
///
/// Sibling order is not materialized: reversal cost and heights depend only
/// on upward paths. Mutated in place by path_reversal().
class RootedTree {
public:
    RootedTree() = default;

    /// Builds a tree from a parent array; nullopt marks the root.
    /// Throws std::invalid_argument unless the links form one rooted tree.
    explicit RootedTree(std::vector<std::optional<NodeId>> parents)
        : parent_(std::move(parents))
    {
        if (parent_.empty()) {
            throw std::invalid_argument("RootedTree: empty parent array");
        }
        bool found = false;
        for (NodeId v = 0; v < parent_.size(); ++v) {
            if (!parent_[v]) {
                if (found) {
                    throw std::invalid_argument("RootedTree: more than one root");
                }
                found = true;
                root_ = v;
            } else if (*parent_[v] >= parent_.size()) {
                throw std::invalid_argument("RootedTree: parent id out of range");
            }
        }
        if (!found) {
            throw std::invalid_argument("RootedTree: no root");
        }
        if (!valid()) {
            throw std::invalid_argument("RootedTree: parent links contain a cycle");
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return parent_.size(); }
    [[nodiscard]] NodeId root() const noexcept { return root_; }

    [[nodiscard]] std::optional<NodeId> parent(NodeId x) const
    {
        check(x);
        return parent_[x];
    }

    [[nodiscard]] const std::vector<std::optional<NodeId>>& parents() const noexcept
    {
        return parent_;
    }

    /// Number of nodes on the path from x to the root, inclusive (root has height 1).
    [[nodiscard]] std::size_t height_of(NodeId x) const
    {
        check(x);
        std::size_t h = 1;
        for (auto p = parent_[x]; p; p = parent_[*p]) {
            ++h;
        }
        return h;
    }

    /// Reverses the path from x to the root: every node on it other than x
    /// gets parent x and x becomes the root. Returns the number of edges on
    /// the reversed path.
    std::size_t path_reversal(NodeId x)
    {
        check(x);
        std::size_t cost = 0;
        auto p = parent_[x];
        while (p) {
            const auto up = parent_[*p];
            parent_[*p] = x;
            p = up;
            ++cost;
        }
        parent_[x].reset();
        root_ = x;
        return cost;
    }

    /// Checks every tree invariant: one root, ids in range, root reachable
    /// from every node in fewer than n steps.
    [[nodiscard]] bool valid() const noexcept
    {
        const std::size_t n = parent_.size();
        if (n == 0 || root_ >= n || parent_[root_]) {
            return false;
        }
        for (NodeId v = 0; v < n; ++v) {
            std::size_t steps = 0;
            NodeId cur = v;
            while (parent_[cur]) {
                if (*parent_[cur] >= n || ++steps >= n) {
                    return false;
                }
                cur = *parent_[cur];
            }
            if (cur != root_) {
                return false;
            }
        }
        return true;
    }

    /// `n;p(0),p(1),...` with `-` for the root, e.g. star(3) -> `3;-,0,0`.
    [[nodiscard]] std::string to_string() const
    {
        std::ostringstream os;
        os << parent_.size() << ';';
        for (std::size_t v = 0; v < parent_.size(); ++v) {
            if (v) {
                os << ',';
            }
            if (parent_[v]) {
                os << *parent_[v];
            } else {
                os << '-';
            }
        }
        return os.str();
    }

    static RootedTree parse(std::string_view text)
    {
        const auto semi = text.find(';');
        if (semi == std::string_view::npos) {
            throw std::invalid_argument("RootedTree::parse: missing ';'");
        }
        const std::size_t n = std::stoul(std::string(text.substr(0, semi)));
        std::vector<std::optional<NodeId>> parents;
        std::string_view rest = text.substr(semi + 1);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const auto field = rest.substr(0, comma);
            if (field == "-") {
                parents.emplace_back(std::nullopt);
            } else {
                parents.emplace_back(static_cast<NodeId>(std::stoul(std::string(field))));
            }
            if (comma == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(comma + 1);
        }
        if (parents.size() != n) {
            throw std::invalid_argument("RootedTree::parse: node count mismatch");
        }
        return RootedTree(std::move(parents));
    }

    friend bool operator==(const RootedTree&, const RootedTree&) = default;

private:
    void check(NodeId x) const
    {
        if (x >= parent_.size()) {
            throw std::out_of_range("RootedTree: unknown node " + std::to_string(x));
        }
    }

    std::vector<std::optional<NodeId>> parent_;
    NodeId root_ = 0;
};

/// Root 0 with nodes 1..n-1 as its children.
inline RootedTree star(std::size_t n)
{
    if (n == 0) {
        throw std::invalid_argument("star: n must be positive");
    }
    std::vector<std::optional<NodeId>> parents(n, NodeId{0});
    parents[0].reset();
    return RootedTree(std::move(parents));
}

inline std::size_t path_reversal(RootedTree& tree, NodeId x) { return tree.path_reversal(x); }

inline std::size_t height_of(const RootedTree& tree, NodeId x) { return tree.height_of(x); }

} // namespace pathrev
