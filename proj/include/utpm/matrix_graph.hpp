#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "utpm/matrix.hpp"
#include "utpm/op_meter.hpp"
#include "utpm/taylor_matrix.hpp"

namespace utpm {

enum class OpKind { independent, add, mul, transpose, inv, trace, exp, sin, cos };

std::string_view to_string(OpKind op) noexcept;
std::size_t arity(OpKind op) noexcept;

/// Index of a node in recording order.
struct NodeId {
    std::size_t index = 0;
    friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

struct GraphNode {
    NodeId id;
    OpKind op = OpKind::independent;
    std::vector<NodeId> args;
    double add_scale = 1.0;  // add only: result = args[0] + add_scale * args[1]
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::optional<TaylorMatrix> value;  // filled by MatrixGraph::forward
};

/// Per-node Taylor-matrix adjoints, created lazily at the node's shape.
class AdjointStore {
public:
    bool has(NodeId id) const noexcept { return id.index < adjoints_.size() && adjoints_[id.index].has_value(); }
    /// Throws IndexError if no adjoint was ever accumulated for `id`.
    const TaylorMatrix& at(NodeId id) const;
    /// Zero-initialized on first access.
    TaylorMatrix& accumulator(NodeId id, std::size_t rows, std::size_t cols, std::size_t degree);
    void clear() noexcept { adjoints_.clear(); }
    /// Pre-sizes the slot table so accumulator references stay valid while a sweep runs.
    void reserve_nodes(std::size_t count) {
        if (count > adjoints_.size()) adjoints_.resize(count);
    }

private:
    std::vector<std::optional<TaylorMatrix>> adjoints_;
};

/// Computational graph of matrix operations in single-assignment form.
///
/// Nodes are appended in program order and never mutated afterwards, so
/// rebinding a program variable (`X = X*Y`) just records a new node. After
/// `forward` every node holds its Taylor-matrix value; these are kept for
/// the reverse sweep, which only reads the graph.
class MatrixGraph {
public:
    NodeId independent(std::size_t rows, std::size_t cols);
    /// Throws ShapeError for incompatible argument shapes and UsageError for
    /// unknown ids or wrong arity.
    NodeId record(OpKind op, std::span<const NodeId> args, double add_scale = 1.0);

    NodeId add(NodeId a, NodeId b, double scale = 1.0) { return record(OpKind::add, std::array{a, b}, scale); }
    NodeId sub(NodeId a, NodeId b) { return add(a, b, -1.0); }
    NodeId mul(NodeId a, NodeId b) { return record(OpKind::mul, std::array{a, b}); }
    NodeId transpose(NodeId a) { return record(OpKind::transpose, std::array{a}); }
    NodeId inv(NodeId a) { return record(OpKind::inv, std::array{a}); }
    NodeId trace(NodeId a) { return record(OpKind::trace, std::array{a}); }
    /// Elementwise transcendental functions, 1x1 nodes only.
    NodeId exp(NodeId a) { return record(OpKind::exp, std::array{a}); }
    NodeId sin(NodeId a) { return record(OpKind::sin, std::array{a}); }
    NodeId cos(NodeId a) { return record(OpKind::cos, std::array{a}); }

    void mark_dependent(NodeId id);

    const std::vector<GraphNode>& nodes() const noexcept { return nodes_; }
    const GraphNode& node(NodeId id) const { return nodes_.at(id.index); }
    const std::vector<NodeId>& independents() const noexcept { return independents_; }
    const std::vector<NodeId>& dependents() const noexcept { return dependents_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    /// Number of function (non-independent) nodes.
    std::size_t operation_count() const noexcept { return nodes_.size() - independents_.size(); }

    /// Evaluates every node in Taylor arithmetic and returns the dependents'
    /// values. One input per independent, all of one degree.
    std::vector<TaylorMatrix> forward(std::span<const TaylorMatrix> inputs, OpMeter* meter = nullptr);

    /// Degree of the last forward evaluation, if any.
    std::optional<std::size_t> evaluated_degree() const noexcept { return evaluated_degree_; }

    /// Reverse sweep. Seeds (one per dependent, dependent's shape, evaluated
    /// degree) are summed into `store`; nodes are then visited in strictly
    /// decreasing id order. Throws StateError before `forward`.
    void reverse(std::span<const TaylorMatrix> seeds, AdjointStore& store, OpMeter* meter = nullptr) const;
    void reverse(std::span<const TaylorScalar> seeds, AdjointStore& store, OpMeter* meter = nullptr) const;

    /// Reals held by node values after forward evaluation.
    std::size_t value_storage() const noexcept;

private:
    const GraphNode& checked(NodeId id) const;

    std::vector<GraphNode> nodes_;
    std::vector<NodeId> independents_;
    std::vector<NodeId> dependents_;
    std::optional<std::size_t> evaluated_degree_;
};

/// Forward evaluation at the given Taylor inputs followed by a reverse sweep
/// seeded with [1, 0, ..., 0]. Returns one Taylor adjoint per independent
/// (zero where the objective does not depend on it). Requires a single 1x1
/// dependent.
std::vector<TaylorMatrix> taylor_adjoints(MatrixGraph& g, std::span<const TaylorMatrix> inputs,
                                          OpMeter* meter = nullptr);

/// Degree-0 gradient of the single scalar dependent.
std::vector<Matrix> gradient(MatrixGraph& g, std::span<const Matrix> x0);
Matrix gradient(MatrixGraph& g, const Matrix& x0);

/// Hessian-vector product by forward-over-reverse: inputs lifted to
/// [X0, V], swept with seed [1, 0]; returns the degree-1 adjoint coefficients.
std::vector<Matrix> hessian_vector(MatrixGraph& g, std::span<const Matrix> x0, std::span<const Matrix> v);
Matrix hessian_vector(MatrixGraph& g, const Matrix& x0, const Matrix& v);

/// Line-oriented text form of the graph, stable across runs:
///
///     graph <node-count>
///     independent <id> <rows>x<cols>
///     node <id> <op> <arg>... [scale=<c>]
///     dependent <id>
///     end
std::string dump_graph(const MatrixGraph& g);

}  // namespace utpm
