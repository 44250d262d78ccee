#include <random>
#include <string>

#include "doctest.h"
#include "support/oracles.hpp"
#include "utpm/bench.hpp"
#include "utpm/error.hpp"
#include "utpm/matrix_graph.hpp"

using namespace utpm;
using namespace utpm::testing;

namespace {

// x1 * x2 * x3 on 1x1 nodes.
MatrixGraph triple_product() {
    MatrixGraph g;
    const NodeId x1 = g.independent(1, 1), x2 = g.independent(1, 1), x3 = g.independent(1, 1);
    g.mark_dependent(g.mul(g.mul(x1, x2), x3));
    return g;
}

std::vector<TaylorMatrix> triple_inputs() {
    return {TaylorMatrix::from_scalar({2, 1}), TaylorMatrix::from_scalar({3, 0}), TaylorMatrix::from_scalar({7, 0})};
}

double tr_inv(const Matrix& x) { return naive_inverse(x).trace(); }

double oed(const Matrix& j) {
    return naive_inverse(naive_product(j.transposed(), j)).trace();
}

// Phi(X) = tr((X^T X + X)^{-1} X), exercising every op kind.
MatrixGraph mixed_program(std::size_t n) {
    MatrixGraph g;
    const NodeId x = g.independent(n, n);
    const NodeId a = g.add(g.mul(g.transpose(x), x), x);
    g.mark_dependent(g.trace(g.mul(g.inv(a), x)));
    return g;
}

double mixed(const Matrix& x) {
    Matrix a = naive_product(x.transposed(), x);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) a(i, j) += x(i, j);
    return naive_product(naive_inverse(a), x).trace();
}

}  // namespace

TEST_CASE("recording assigns dense ids in order") {
    MatrixGraph g;
    CHECK(g.independent(2, 3).index == 0);
    CHECK(g.independent(3, 2).index == 1);
    CHECK(g.independents() == std::vector<NodeId>{{0}, {1}});
    const NodeId p = g.mul(NodeId{0}, NodeId{1});
    CHECK(p.index == 2);
    CHECK(g.node(p).rows == 2);
    CHECK(g.node(p).cols == 2);
    CHECK_THROWS_AS(g.trace(NodeId{0}), ShapeError);
    CHECK_THROWS_AS(g.add(NodeId{0}, NodeId{1}), ShapeError);
    CHECK_THROWS_AS(g.inv(NodeId{0}), ShapeError);
    CHECK_THROWS_AS(g.exp(p), ShapeError);
    CHECK_THROWS_AS(g.transpose(NodeId{7}), UsageError);
    CHECK_THROWS_AS(g.record(OpKind::mul, std::array{NodeId{0}}), UsageError);
    CHECK_THROWS_AS(g.record(OpKind::independent, std::span<const NodeId>{}), UsageError);
    CHECK(g.size() == 3);
}

TEST_CASE("rebinding a variable records a new node") {
    MatrixGraph g;
    NodeId x = g.independent(2, 2);
    const NodeId y = g.independent(2, 2);
    const NodeId first = x;
    x = g.mul(x, y);
    x = g.mul(x, y);
    CHECK(x.index == 3);
    CHECK(g.node(first).op == OpKind::independent);
    CHECK(g.node(NodeId{2}).args == std::vector<NodeId>{first, y});
}

TEST_CASE("forward evaluation") {
    MatrixGraph g = bench::tr_inv_program(2);
    const TaylorMatrix x = TaylorMatrix::constant(Matrix{{2, 0}, {0, 2}}, 0);
    CHECK(g.forward(std::span(&x, 1))[0].to_scalar() == TaylorScalar{1.0});
    CHECK(g.evaluated_degree() == 0u);

    MatrixGraph t = triple_product();
    CHECK(t.forward(triple_inputs())[0].to_scalar() == TaylorScalar{42, 21});

    MatrixGraph o = bench::oed_program(3, 3);
    const TaylorMatrix j = TaylorMatrix::identity(3, 0);
    CHECK(o.forward(std::span(&j, 1))[0].to_scalar()[0] == doctest::Approx(3.0));

    const TaylorMatrix wrong = TaylorMatrix::identity(3, 0);
    CHECK_THROWS_AS(g.forward(std::span(&wrong, 1)), ShapeError);
    const std::vector<TaylorMatrix> mixed_degree{TaylorMatrix::from_scalar({2, 1}), TaylorMatrix::from_scalar({3}),
                                                 TaylorMatrix::from_scalar({7, 0})};
    CHECK_THROWS_AS(t.forward(mixed_degree), ShapeError);
    CHECK_THROWS_AS(t.forward(std::span(&x, 1)), ShapeError);
}

TEST_CASE("singular inverse reports the node") {
    MatrixGraph g = bench::tr_inv_program(2);
    const TaylorMatrix x = TaylorMatrix::constant(Matrix{{1, 2}, {2, 4}}, 1);
    try {
        g.forward(std::span(&x, 1));
        FAIL("expected SingularMatrixError");
    } catch (const SingularMatrixError& e) {
        REQUIRE(e.node().has_value());
        CHECK(g.node(NodeId{*e.node()}).op == OpKind::inv);
    }
}

TEST_CASE("reverse sweep") {
    MatrixGraph t = triple_product();
    AdjointStore store;
    const std::array seed{TaylorScalar{1, 0}};
    CHECK_THROWS_AS(t.reverse(seed, store), StateError);

    t.forward(triple_inputs());
    t.reverse(seed, store);
    CHECK(store.at(NodeId{0}).to_scalar() == TaylorScalar{21, 0});
    CHECK(store.at(NodeId{1}).to_scalar() == TaylorScalar{14, 7});
    CHECK(store.at(NodeId{2}).to_scalar() == TaylorScalar{6, 3});

    AdjointStore zero;
    const std::array zero_seed{TaylorScalar{0, 0}};
    t.reverse(zero_seed, zero);
    for (std::size_t i = 0; i < 3; ++i) CHECK(zero.at(NodeId{i}).to_scalar() == TaylorScalar{0, 0});

    AdjointStore bad;
    const std::array two{TaylorScalar{1, 0}, TaylorScalar{1, 0}};
    CHECK_THROWS_AS(t.reverse(two, bad), UsageError);

    MatrixGraph g = bench::tr_inv_program(2);
    const TaylorMatrix x = TaylorMatrix::constant(Matrix{{2, 0}, {0, 2}}, 0);
    g.forward(std::span(&x, 1));
    AdjointStore s;
    g.reverse(std::array{TaylorScalar{1.0}}, s);
    CHECK(s.at(NodeId{0})[0] == Matrix{{-0.25, 0}, {0, -0.25}});
    CHECK_THROWS_AS(AdjointStore{}.at(NodeId{0}), IndexError);
}

TEST_CASE("multiple dependents: seeds are summed") {
    MatrixGraph g;
    const NodeId x = g.independent(2, 2);
    const NodeId t = g.trace(x);
    g.mark_dependent(t);
    g.mark_dependent(t);
    const TaylorMatrix x0 = TaylorMatrix::identity(2, 0);
    g.forward(std::span(&x0, 1));
    AdjointStore store;
    g.reverse(std::array{TaylorScalar{1.0}, TaylorScalar{2.0}}, store);
    CHECK(store.at(x)[0] == Matrix{{3, 0}, {0, 3}});
    CHECK_THROWS_AS(gradient(g, Matrix::identity(2)), UsageError);
}

TEST_CASE("gradient examples") {
    MatrixGraph g = bench::tr_inv_program(2);
    CHECK(gradient(g, Matrix{{2, 0}, {0, 2}}) == Matrix{{-0.25, 0}, {0, -0.25}});

    for (std::size_t n : {1u, 3u, 5u}) {
        MatrixGraph o = bench::oed_program(n, n);
        Matrix want = Matrix::identity(n);
        want *= -2.0;
        CHECK(max_abs_diff(gradient(o, Matrix::identity(n)), want) < 1e-14);
    }

    MatrixGraph tr;
    tr.mark_dependent(tr.trace(tr.independent(3, 3)));
    std::mt19937_64 rng(40);
    CHECK(gradient(tr, random_matrix(3, 3, rng)) == Matrix::identity(3));
}

TEST_CASE("gradient matches finite differences") {
    std::mt19937_64 rng(41);
    for (std::size_t n = 1; n <= 8; ++n) {
        CAPTURE(n);
        const Matrix x = random_matrix(n, n, rng, static_cast<double>(n));
        MatrixGraph g = bench::tr_inv_program(n);
        CHECK(relative_error(gradient(g, x), fd_gradient(tr_inv, x)) < 1e-4);

        MatrixGraph m = mixed_program(n);
        CHECK(relative_error(gradient(m, x), fd_gradient(mixed, x)) < 1e-4);

        const Matrix j = random_matrix(n + 2, n, rng, 2.0);
        MatrixGraph o = bench::oed_program(n + 2, n);
        CHECK(relative_error(gradient(o, j), fd_gradient(oed, j)) < 1e-4);
    }
}

TEST_CASE("fig1 program gradient matches finite differences") {
    std::mt19937_64 rng(42);
    const std::size_t n = 3;
    const Matrix x = random_matrix(n, n, rng, 3.0), y = random_matrix(n, n, rng, 3.0);
    MatrixGraph g = bench::fig1_program(n);
    const std::vector<Matrix> grads = gradient(g, std::vector<Matrix>{x, y});
    const auto f = [&g](const Matrix& a, const Matrix& b) {
        const std::vector<TaylorMatrix> in{TaylorMatrix::constant(a, 0), TaylorMatrix::constant(b, 0)};
        return g.forward(in)[0].to_scalar()[0];
    };
    CHECK(relative_error(grads[0], fd_gradient([&](const Matrix& a) { return f(a, y); }, x)) < 1e-4);
    CHECK(relative_error(grads[1], fd_gradient([&](const Matrix& b) { return f(x, b); }, y)) < 1e-4);
}

TEST_CASE("hessian-vector products") {
    MatrixGraph t = triple_product();
    const std::vector<Matrix> x{Matrix{{2}}, Matrix{{3}}, Matrix{{7}}};
    const std::vector<Matrix> v{Matrix{{1}}, Matrix{{0}}, Matrix{{0}}};
    const std::vector<Matrix> hv = hessian_vector(t, x, v);
    CHECK(hv[0](0, 0) == 0.0);
    CHECK(hv[1](0, 0) == 7.0);
    CHECK(hv[2](0, 0) == 3.0);

    MatrixGraph g = bench::tr_inv_program(2);
    const Matrix two{{2, 0}, {0, 2}};
    CHECK(hessian_vector(g, two, Matrix(2, 2)) == Matrix(2, 2));
    CHECK(max_abs_diff(hessian_vector(g, two, Matrix::identity(2)), Matrix{{0.25, 0}, {0, 0.25}}) < 1e-15);
    CHECK_THROWS_AS(hessian_vector(g, two, Matrix::identity(3)), ShapeError);
}

TEST_CASE("hessian-vector products match differences of gradients") {
    std::mt19937_64 rng(43);
    for (std::size_t n : {2u, 4u, 6u}) {
        const Matrix x = random_matrix(n, n, rng, static_cast<double>(n));
        MatrixGraph g = mixed_program(n);
        for (std::size_t i = 0; i < n; i += 2)
            for (std::size_t j = 1; j < n; j += 2) {
                Matrix v(n, n);
                v(i, j) = 1.0;
                const Matrix hv = hessian_vector(g, x, v);
                const double h = 1e-5 * std::max(1.0, x.max_abs());
                Matrix xp = x, xm = x;
                xp(i, j) += h;
                xm(i, j) -= h;
                Matrix fd = gradient(g, xp);
                const Matrix gm = gradient(g, xm);
                for (std::size_t k = 0; k < fd.data().size(); ++k) fd.data()[k] = (fd.data()[k] - gm.data()[k]) / (2 * h);
                CHECK(relative_error(hv, fd) < 1e-3);
            }
    }
}

TEST_CASE("sweeping at degree D then truncating equals sweeping at D-1") {
    std::mt19937_64 rng(44);
    for (std::size_t degree = 1; degree <= 3; ++degree) {
        const TaylorMatrix x = random_taylor(4, 4, degree, rng, 4.0);
        MatrixGraph g = mixed_program(4);
        const TaylorMatrix full = taylor_adjoints(g, std::span(&x, 1))[0];
        const TaylorMatrix lower = x.truncated(degree - 1);
        const TaylorMatrix reduced = taylor_adjoints(g, std::span(&lower, 1))[0];
        CHECK(max_abs_diff(full.truncated(degree - 1), reduced) < 1e-12);
    }
}

TEST_CASE("reverse sweep is linear in the seed") {
    std::mt19937_64 rng(45);
    const TaylorMatrix x = random_taylor(3, 3, 2, rng, 3.0);
    MatrixGraph g = mixed_program(3);
    g.forward(std::span(&x, 1));
    const TaylorScalar s1 = random_scalar(2, rng), s2 = random_scalar(2, rng);
    const double alpha = 1.7, beta = -0.6;
    TaylorScalar combined = add(TaylorScalar::constant(0, 2), s1, alpha);
    combined = add(combined, s2, beta);
    AdjointStore a1, a2, ac;
    g.reverse(std::array{s1}, a1);
    g.reverse(std::array{s2}, a2);
    g.reverse(std::array{combined}, ac);
    const TaylorMatrix want = add(add(TaylorMatrix(3, 3, 2), a1.at(NodeId{0}), alpha), a2.at(NodeId{0}), beta);
    CHECK(max_abs_diff(ac.at(NodeId{0}), want) < 1e-12);
}

TEST_CASE("node count does not depend on the matrix dimension") {
    for (std::size_t n : {1u, 4u, 64u}) {
        CHECK(bench::tr_inv_program(n).operation_count() == 2);
        CHECK(bench::oed_program(n + 1, n).operation_count() == 4);
        CHECK(bench::fig1_program(n).size() == bench::fig1_program(1).size());
    }
}

TEST_CASE("transcendental nodes: sin(exp(x))") {
    MatrixGraph g;
    const NodeId x = g.independent(1, 1);
    g.mark_dependent(g.sin(g.exp(x)));
    const TaylorMatrix x0 = TaylorMatrix::from_scalar({0.3, 1.0});
    const TaylorScalar y = g.forward(std::span(&x0, 1))[0].to_scalar();
    const double e = std::exp(0.3);
    CHECK(y[0] == doctest::Approx(std::sin(e)));
    CHECK(y[1] == doctest::Approx(std::cos(e) * e));
    // d/dx [cos(e^x) e^x] = -sin(e^x) e^{2x} + cos(e^x) e^x
    const TaylorMatrix adj = taylor_adjoints(g, std::span(&x0, 1))[0];
    CHECK(adj[0](0, 0) == doctest::Approx(std::cos(e) * e));
    CHECK(adj[1](0, 0) == doctest::Approx(-std::sin(e) * e * e + std::cos(e) * e));

    MatrixGraph c;
    c.mark_dependent(c.cos(c.independent(1, 1)));
    CHECK(gradient(c, Matrix{{0.5}})(0, 0) == doctest::Approx(-std::sin(0.5)));
}

TEST_CASE("dump_graph") {
    CHECK(dump_graph(MatrixGraph{}) == "graph 0\nend\n");

    MatrixGraph one;
    one.independent(2, 3);
    CHECK(dump_graph(one) == "graph 1\nindependent 0 2x3\nend\n");

    MatrixGraph s;
    const NodeId a = s.independent(2, 2), b = s.independent(2, 2);
    s.mark_dependent(s.trace(s.sub(a, b)));
    CHECK(dump_graph(s) ==
          "graph 4\nindependent 0 2x2\nindependent 1 2x2\nnode 2 add 0 1 scale=-1\nnode 3 trace 2\ndependent 3\nend\n");

    const MatrixGraph fig = bench::fig1_program(3);
    const std::string text = dump_graph(fig);
    CHECK(text == dump_graph(bench::fig1_program(3)));
    std::size_t independents = 0, nodes = 0, edges = 0;
    for (const GraphNode& node : fig.nodes()) {
        if (node.op == OpKind::independent)
            ++independents;
        else
            ++nodes;
        edges += node.args.size();
    }
    CHECK(independents == 2);
    CHECK(nodes == 10);
    CHECK(edges == 16);
}
