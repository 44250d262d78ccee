#include "utpm/matrix_graph.hpp"

#include <cstdio>
#include <sstream>

#include "utpm/error.hpp"
#include "utpm/pullback.hpp"

namespace utpm {
namespace {

std::string dims(std::size_t r, std::size_t c) { return std::to_string(r) + "x" + std::to_string(c); }

// 1x1 Taylor product accumulation, used by the elementwise pullbacks.
void scalar_mul_accumulate(const TaylorScalar& a, const TaylorScalar& b, double scale, TaylorMatrix& acc) {
    mul_accumulate(TaylorMatrix::from_scalar(a), TaylorMatrix::from_scalar(b), scale, acc);
}

}  // namespace

std::string_view to_string(OpKind op) noexcept {
    switch (op) {
        case OpKind::independent: return "independent";
        case OpKind::add: return "add";
        case OpKind::mul: return "mul";
        case OpKind::transpose: return "transpose";
        case OpKind::inv: return "inv";
        case OpKind::trace: return "trace";
        case OpKind::exp: return "exp";
        case OpKind::sin: return "sin";
        case OpKind::cos: return "cos";
    }
    return "?";
}

std::size_t arity(OpKind op) noexcept {
    switch (op) {
        case OpKind::independent: return 0;
        case OpKind::add:
        case OpKind::mul: return 2;
        default: return 1;
    }
}

const TaylorMatrix& AdjointStore::at(NodeId id) const {
    if (!has(id)) throw IndexError("no adjoint stored for node " + std::to_string(id.index));
    return *adjoints_[id.index];
}

TaylorMatrix& AdjointStore::accumulator(NodeId id, std::size_t rows, std::size_t cols, std::size_t degree) {
    if (id.index >= adjoints_.size()) adjoints_.resize(id.index + 1);
    auto& slot = adjoints_[id.index];
    if (!slot) slot.emplace(rows, cols, degree);
    return *slot;
}

const GraphNode& MatrixGraph::checked(NodeId id) const {
    if (id.index >= nodes_.size()) throw UsageError("unknown node id " + std::to_string(id.index));
    return nodes_[id.index];
}

NodeId MatrixGraph::independent(std::size_t rows, std::size_t cols) {
    const NodeId id{nodes_.size()};
    nodes_.push_back(GraphNode{id, OpKind::independent, {}, 1.0, rows, cols, std::nullopt});
    independents_.push_back(id);
    evaluated_degree_.reset();
    return id;
}

NodeId MatrixGraph::record(OpKind op, std::span<const NodeId> args, double add_scale) {
    if (op == OpKind::independent) throw UsageError("use independent() to register inputs");
    if (args.size() != arity(op)) {
        throw UsageError(std::string(to_string(op)) + " expects " + std::to_string(arity(op)) + " arguments");
    }
    const GraphNode& a = checked(args[0]);
    std::size_t rows = a.rows, cols = a.cols;
    switch (op) {
        case OpKind::add: {
            const GraphNode& b = checked(args[1]);
            if (a.rows != b.rows || a.cols != b.cols)
                throw ShapeError("add: " + dims(a.rows, a.cols) + " vs " + dims(b.rows, b.cols));
            break;
        }
        case OpKind::mul: {
            const GraphNode& b = checked(args[1]);
            if (a.cols != b.rows)
                throw ShapeError("mul: " + dims(a.rows, a.cols) + " * " + dims(b.rows, b.cols));
            cols = b.cols;
            break;
        }
        case OpKind::transpose: std::swap(rows, cols); break;
        case OpKind::inv:
            if (a.rows != a.cols) throw ShapeError("inv of non-square " + dims(a.rows, a.cols));
            break;
        case OpKind::trace:
            if (a.rows != a.cols) throw ShapeError("trace of non-square " + dims(a.rows, a.cols));
            rows = cols = 1;
            break;
        case OpKind::exp:
        case OpKind::sin:
        case OpKind::cos:
            if (a.rows != 1 || a.cols != 1)
                throw ShapeError(std::string(to_string(op)) + " is only defined on 1x1 nodes");
            break;
        case OpKind::independent: break;
    }
    const NodeId id{nodes_.size()};
    nodes_.push_back(GraphNode{id, op, {args.begin(), args.end()}, op == OpKind::add ? add_scale : 1.0,
                               rows, cols, std::nullopt});
    evaluated_degree_.reset();
    return id;
}

void MatrixGraph::mark_dependent(NodeId id) {
    checked(id);
    dependents_.push_back(id);
}

std::vector<TaylorMatrix> MatrixGraph::forward(std::span<const TaylorMatrix> inputs, OpMeter* meter) {
    if (inputs.size() != independents_.size()) {
        throw ShapeError("forward: expected " + std::to_string(independents_.size()) + " inputs, got " +
                         std::to_string(inputs.size()));
    }
    if (inputs.empty()) throw UsageError("forward: graph has no independents");
    const std::size_t degree = inputs.front().degree();
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const GraphNode& n = nodes_[independents_[k].index];
        if (inputs[k].rows() != n.rows || inputs[k].cols() != n.cols || inputs[k].degree() != degree) {
            throw ShapeError("forward: input " + std::to_string(k) + " does not match registered shape " +
                             dims(n.rows, n.cols) + " at degree " + std::to_string(degree));
        }
    }
    evaluated_degree_.reset();

    std::size_t next_input = 0;
    for (GraphNode& node : nodes_) {
        auto arg = [&](std::size_t k) -> const TaylorMatrix& { return *nodes_[node.args[k].index].value; };
        switch (node.op) {
            case OpKind::independent: node.value = inputs[next_input++]; break;
            case OpKind::add: node.value = utpm::add(arg(0), arg(1), node.add_scale, meter); break;
            case OpKind::mul: node.value = utpm::mul(arg(0), arg(1), meter); break;
            case OpKind::transpose: node.value = utpm::transpose(arg(0)); break;
            case OpKind::inv:
                try {
                    node.value = utpm::inv(arg(0), meter);
                } catch (const SingularMatrixError& e) {
                    throw SingularMatrixError("node " + std::to_string(node.id.index) + ": " + e.what(),
                                              e.pivot_ratio(), node.id.index);
                }
                break;
            case OpKind::trace: node.value = TaylorMatrix::from_scalar(utpm::trace(arg(0))); break;
            case OpKind::exp: node.value = TaylorMatrix::from_scalar(utpm::exp(arg(0).to_scalar())); break;
            case OpKind::sin: node.value = TaylorMatrix::from_scalar(utpm::sin_cos(arg(0).to_scalar()).first); break;
            case OpKind::cos: node.value = TaylorMatrix::from_scalar(utpm::sin_cos(arg(0).to_scalar()).second); break;
        }
    }
    evaluated_degree_ = degree;

    std::vector<TaylorMatrix> out;
    out.reserve(dependents_.size());
    for (NodeId id : dependents_) out.push_back(*nodes_[id.index].value);
    return out;
}

void MatrixGraph::reverse(std::span<const TaylorMatrix> seeds, AdjointStore& store, OpMeter* meter) const {
    if (!evaluated_degree_) throw StateError("reverse sweep requested before forward evaluation");
    if (seeds.size() != dependents_.size()) {
        throw UsageError("reverse: expected " + std::to_string(dependents_.size()) + " seeds, got " +
                         std::to_string(seeds.size()));
    }
    const std::size_t degree = *evaluated_degree_;
    store.reserve_nodes(nodes_.size());
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        const GraphNode& dep = nodes_[dependents_[k].index];
        if (seeds[k].rows() != dep.rows || seeds[k].cols() != dep.cols || seeds[k].degree() != degree)
            throw ShapeError("reverse: seed " + std::to_string(k) + " does not match its dependent");
        TaylorMatrix& acc = store.accumulator(dep.id, dep.rows, dep.cols, degree);
        acc = utpm::add(acc, seeds[k]);
    }

    auto adj = [&](NodeId id) -> TaylorMatrix& {
        const GraphNode& n = nodes_[id.index];
        return store.accumulator(id, n.rows, n.cols, degree);
    };

    for (std::size_t l = nodes_.size(); l-- > 0;) {
        const GraphNode& node = nodes_[l];
        if (!store.has(node.id) || node.op == OpKind::independent) continue;
        const TaylorMatrix& ybar = store.at(node.id);
        auto value = [&](std::size_t k) -> const TaylorMatrix& { return *nodes_[node.args[k].index].value; };
        switch (node.op) {
            case OpKind::add: {
                TaylorMatrix& abar = adj(node.args[0]);
                TaylorMatrix& bbar = adj(node.args[1]);
                pullback::add(ybar, node.add_scale, abar, bbar, meter);
                break;
            }
            case OpKind::mul: {
                TaylorMatrix& abar = adj(node.args[0]);
                TaylorMatrix& bbar = adj(node.args[1]);
                pullback::mul(ybar, value(0), value(1), abar, bbar, meter);
                break;
            }
            case OpKind::transpose: pullback::transpose(ybar, adj(node.args[0])); break;
            case OpKind::inv: pullback::inv(ybar, *node.value, adj(node.args[0]), meter); break;
            case OpKind::trace: pullback::trace(ybar.to_scalar(), value(0).rows(), adj(node.args[0])); break;
            case OpKind::exp:
                scalar_mul_accumulate(ybar.to_scalar(), node.value->to_scalar(), 1.0, adj(node.args[0]));
                break;
            case OpKind::sin:
                scalar_mul_accumulate(ybar.to_scalar(), utpm::sin_cos(value(0).to_scalar()).second, 1.0,
                                      adj(node.args[0]));
                break;
            case OpKind::cos:
                scalar_mul_accumulate(ybar.to_scalar(), utpm::sin_cos(value(0).to_scalar()).first, -1.0,
                                      adj(node.args[0]));
                break;
            case OpKind::independent: break;
        }
    }
}

void MatrixGraph::reverse(std::span<const TaylorScalar> seeds, AdjointStore& store, OpMeter* meter) const {
    std::vector<TaylorMatrix> embedded;
    embedded.reserve(seeds.size());
    for (const TaylorScalar& s : seeds) embedded.push_back(TaylorMatrix::from_scalar(s));
    reverse(std::span<const TaylorMatrix>(embedded), store, meter);
}

std::size_t MatrixGraph::value_storage() const noexcept {
    std::size_t total = 0;
    for (const GraphNode& n : nodes_)
        if (n.value) total += n.value->storage();
    return total;
}

std::vector<TaylorMatrix> taylor_adjoints(MatrixGraph& g, std::span<const TaylorMatrix> inputs, OpMeter* meter) {
    if (g.dependents().size() != 1) {
        throw UsageError("expected exactly one dependent, graph has " + std::to_string(g.dependents().size()));
    }
    const GraphNode& dep = g.node(g.dependents().front());
    if (dep.rows != 1 || dep.cols != 1) throw UsageError("dependent is not scalar (1x1)");
    g.forward(inputs, meter);
    const std::size_t degree = *g.evaluated_degree();
    AdjointStore store;
    const std::array seed{TaylorScalar::constant(1.0, degree)};
    g.reverse(std::span<const TaylorScalar>(seed), store, meter);

    std::vector<TaylorMatrix> out;
    out.reserve(g.independents().size());
    for (NodeId id : g.independents()) {
        const GraphNode& n = g.node(id);
        out.push_back(store.has(id) ? store.at(id) : TaylorMatrix(n.rows, n.cols, degree));
    }
    return out;
}

std::vector<Matrix> gradient(MatrixGraph& g, std::span<const Matrix> x0) {
    std::vector<TaylorMatrix> inputs;
    inputs.reserve(x0.size());
    for (const Matrix& x : x0) inputs.push_back(TaylorMatrix::constant(x, 0));
    std::vector<Matrix> out;
    for (TaylorMatrix& a : taylor_adjoints(g, inputs)) out.push_back(a[0]);
    return out;
}

Matrix gradient(MatrixGraph& g, const Matrix& x0) { return gradient(g, std::span<const Matrix>(&x0, 1)).front(); }

std::vector<Matrix> hessian_vector(MatrixGraph& g, std::span<const Matrix> x0, std::span<const Matrix> v) {
    if (x0.size() != v.size()) throw ShapeError("hessian_vector: need one direction per input");
    std::vector<TaylorMatrix> inputs;
    inputs.reserve(x0.size());
    for (std::size_t k = 0; k < x0.size(); ++k) inputs.push_back(TaylorMatrix::lift(x0[k], v[k], 1));
    std::vector<Matrix> out;
    for (TaylorMatrix& a : taylor_adjoints(g, inputs)) out.push_back(a[1]);
    return out;
}

Matrix hessian_vector(MatrixGraph& g, const Matrix& x0, const Matrix& v) {
    return hessian_vector(g, std::span<const Matrix>(&x0, 1), std::span<const Matrix>(&v, 1)).front();
}

std::string dump_graph(const MatrixGraph& g) {
    std::ostringstream os;
    os << "graph " << g.size() << '\n';
    for (const GraphNode& n : g.nodes()) {
        if (n.op == OpKind::independent) {
            os << "independent " << n.id.index << ' ' << n.rows << 'x' << n.cols << '\n';
            continue;
        }
        os << "node " << n.id.index << ' ' << to_string(n.op);
        for (NodeId a : n.args) os << ' ' << a.index;
        if (n.op == OpKind::add && n.add_scale != 1.0) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.add_scale);
            os << " scale=" << buf;
        }
        os << '\n';
    }
    for (NodeId d : g.dependents()) os << "dependent " << d.index << '\n';
    os << "end\n";
    return os.str();
}

}  // namespace utpm
