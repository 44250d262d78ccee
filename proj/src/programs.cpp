#include "utpm/bench.hpp"
#include "utpm/error.hpp"

namespace utpm::bench {

MatrixGraph tr_inv_program(std::size_t n) {
    MatrixGraph g;
    const NodeId x = g.independent(n, n);
    g.mark_dependent(g.trace(g.inv(x)));
    return g;
}

MatrixGraph oed_program(std::size_t m, std::size_t p) {
    MatrixGraph g;
    const NodeId j = g.independent(m, p);
    const NodeId jt = g.transpose(j);
    const NodeId fisher = g.mul(jt, j);
    const NodeId cov = g.inv(fisher);
    g.mark_dependent(g.trace(cov));
    return g;
}

MatrixGraph fig1_program(std::size_t n) {
    MatrixGraph g;
    NodeId x = g.independent(n, n);
    NodeId y = g.independent(n, n);
    x = g.mul(x, y);  // X = X*Y
    // X = X.dot(Y) + X.transpose(); operands recorded left to right
    const NodeId xy = g.mul(x, y);
    x = g.add(xy, g.transpose(x));
    x = g.add(y, g.mul(x, y));     // X = Y + X*Y
    y = g.inv(x);                  // Y = X.inv()
    y = g.transpose(y);            // Y = Y.transpose()
    const NodeId z = g.mul(x, y);  // Z = X*Y
    g.mark_dependent(g.trace(z));  // TR = Z.trace()
    return g;
}

MatrixGraph builtin_program(std::string_view name, std::size_t n) {
    if (name == "fig1") return fig1_program(n);
    if (name == "tr_inv") return tr_inv_program(n);
    if (name == "oed") return oed_program(n, n);
    throw UsageError("unknown program '" + std::string(name) + "' (expected fig1, tr_inv or oed)");
}

}  // namespace utpm::bench
