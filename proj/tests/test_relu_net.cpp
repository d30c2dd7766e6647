#include <doctest.h>

#include <cmath>
#include <levynet/relu_net.hpp>
#include <levynet/rng.hpp>
#include <nlohmann/json.hpp>

using namespace levynet;

namespace {

ReluNetwork random_net(RngStream& rng, int d, int L, int outDim) {
    ReluNetwork net;
    net.inputDim = d;
    int prev = d;
    for (int l = 0; l < L; ++l) {
        const int rows = (l + 1 == L) ? outDim : 1 + static_cast<int>(rng.uniform() * 4);
        Eigen::MatrixXd A(rows, prev);
        Eigen::VectorXd b(rows);
        for (int r = 0; r < rows; ++r) {
            b[r] = rng.uniform() < 0.3 ? 0.0 : 2.0 * rng.uniform() - 1.0;
            for (int c = 0; c < prev; ++c)
                A(r, c) = rng.uniform() < 0.3 ? 0.0 : 2.0 * rng.uniform() - 1.0;
        }
        net.layers.push_back({A, b});
        prev = rows;
    }
    return net;
}

long metric_sum(const std::vector<ReluNetwork>& nets) {
    long s = 0;
    for (const auto& n : nets) s += metrics(n).M;
    return s;
}

}  // namespace

TEST_CASE("realize: call net kink and affine single layer") {
    const auto call = payoff_net(PayoffSpec::call(1.0), 1).net;
    CHECK(realize1(call, 2.0) == doctest::Approx(1.0));
    CHECK(realize1(call, 0.5) == 0.0);

    ReluNetwork affine;
    affine.inputDim = 2;
    Eigen::MatrixXd A(1, 2);
    A << 2.0, -3.0;
    affine.layers.push_back({A, Eigen::VectorXd::Constant(1, -5.0)});
    Eigen::VectorXd x(2);
    x << 1.0, 1.0;
    CHECK(realize(affine, x)[0] == doctest::Approx(-6.0));  // no activation on L = 1

    Eigen::VectorXd bad(3);
    CHECK_THROWS_AS(realize(affine, bad), DimensionMismatch);
}

TEST_CASE("metrics: exact nonzero counts") {
    const auto call = payoff_net(PayoffSpec::call(1.0), 1).net;
    const auto m = metrics(call);
    CHECK(m.M == 3);
    CHECK(m.L == 2);
    CHECK(m.perLayerM == std::vector<long>{2, 1});

    ReluNetwork zeros;
    zeros.inputDim = 2;
    zeros.layers.push_back({Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Zero(3)});
    zeros.layers.push_back({Eigen::MatrixXd::Zero(1, 3), Eigen::VectorXd::Zero(1)});
    CHECK(metrics(zeros).M == 0);
}

TEST_CASE("average: identity, shifted calls, zero weight, count laws") {
    RngStream rng(5);
    const auto call = payoff_net(PayoffSpec::call(1.0), 1).net;

    // n = 1, w = 1, D = I, c = 0 reproduces the input.
    {
        const auto avg = average({call}, {1.0}, {Eigen::MatrixXd::Identity(1, 1)},
                                 {Eigen::VectorXd::Zero(1)});
        for (int i = 0; i < 100; ++i) {
            const double s = 3.0 * rng.uniform();
            CHECK(std::abs(realize1(avg, s) - realize1(call, s)) < 1e-12);
        }
    }

    // Two scaled calls: realization equals the average of shifted calls.
    {
        const double x1 = 0.2, x2 = -0.4;
        std::vector<Eigen::VectorXd> scales = {Eigen::VectorXd::Constant(1, std::exp(x1)),
                                               Eigen::VectorXd::Constant(1, std::exp(x2))};
        const auto avg = average_scaled({call, call}, {0.5, 0.5}, scales);
        for (int i = 0; i < 100; ++i) {
            const double s = 3.0 * rng.uniform();
            const double expect = 0.5 * std::max(s * std::exp(x1) - 1.0, 0.0) +
                                  0.5 * std::max(s * std::exp(x2) - 1.0, 0.0);
            CHECK(std::abs(realize1(avg, s) - expect) < 1e-12);
        }
        CHECK(metrics(avg).M <= 2 * metrics(call).M);
    }

    // Zero weight drops the block from the last-layer count.
    {
        const auto avg = average_scaled({call, call}, {0.0, 1.0},
                                        {Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)});
        const auto m = metrics(avg);
        CHECK(m.perLayerM.back() == 1);  // only the w != 0 block contributes
    }

    CHECK_THROWS_AS(average({call, pad_depth(call, 3)}, {0.5, 0.5},
                            {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)},
                            {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)}),
                    LayerMismatch);
}

TEST_CASE("average property suite: randomized realization identity and counts") {
    RngStream rng(101);
    for (int trial = 0; trial < 60; ++trial) {
        const int d = 1 + static_cast<int>(rng.uniform() * 3);
        const int L = 2 + static_cast<int>(rng.uniform() * 3);
        const int outDim = 1 + static_cast<int>(rng.uniform() * 2);
        const int n = 1 + static_cast<int>(rng.uniform() * 4);
        std::vector<ReluNetwork> nets;
        std::vector<double> w;
        std::vector<Eigen::MatrixXd> D;
        std::vector<Eigen::VectorXd> c;
        const bool diagonalCase = trial % 2 == 0;
        for (int i = 0; i < n; ++i) {
            nets.push_back(random_net(rng, d, L, outDim));
            w.push_back(rng.uniform() < 0.15 ? 0.0 : 2.0 * rng.uniform() - 1.0);
            if (diagonalCase) {
                Eigen::VectorXd diag(d);
                for (int j = 0; j < d; ++j) diag[j] = 2.0 * rng.uniform() - 1.0;
                D.push_back(diag.asDiagonal());
                c.push_back(Eigen::VectorXd::Zero(d));
            } else {
                Eigen::MatrixXd M(d, d);
                Eigen::VectorXd shift(d);
                for (int r = 0; r < d; ++r) {
                    shift[r] = 2.0 * rng.uniform() - 1.0;
                    for (int cc = 0; cc < d; ++cc) M(r, cc) = 2.0 * rng.uniform() - 1.0;
                }
                D.push_back(M);
                c.push_back(shift);
            }
        }
        const auto avg = average(nets, w, D, c);

        for (int pt = 0; pt < 20; ++pt) {
            Eigen::VectorXd x(d);
            for (int j = 0; j < d; ++j) x[j] = 4.0 * rng.uniform() - 2.0;
            Eigen::VectorXd expect = Eigen::VectorXd::Zero(outDim);
            for (int i = 0; i < n; ++i)
                expect += w[static_cast<std::size_t>(i)] *
                          realize(nets[static_cast<std::size_t>(i)],
                                  D[static_cast<std::size_t>(i)] * x +
                                      c[static_cast<std::size_t>(i)]);
            const Eigen::VectorXd got = realize(avg, x);
            CHECK((got - expect).norm() <= 1e-10 * (1.0 + expect.norm()));
        }

        const auto mAvg = metrics(avg);
        // Per-layer subadditivity for j >= 2 in every case.
        for (int j = 1; j < L; ++j) {
            long sum = 0;
            for (const auto& net : nets)
                sum += metrics(net).perLayerM[static_cast<std::size_t>(j)];
            CHECK(mAvg.perLayerM[static_cast<std::size_t>(j)] <= sum);
        }
        if (diagonalCase) CHECK(mAvg.M <= metric_sum(nets));
    }
}

TEST_CASE("pad_depth preserves realizations") {
    const auto call = payoff_net(PayoffSpec::call(1.0), 1).net;
    CHECK(metrics(pad_depth(call, 2)).L == 2);

    const auto padded = pad_depth(call, 4);
    CHECK(metrics(padded).L == 4);
    for (int i = 0; i <= 1000; ++i) {
        const double s = 3.0 * i / 1000.0;
        CHECK(std::abs(realize1(padded, s) - realize1(call, s)) < 1e-12);
    }
    // Count bound from the construction: width entering the output layer.
    const long width = call.layers[call.layers.size() - 2].A.rows();
    CHECK(metrics(padded).M <= metrics(call).M + 4 * width * (4 - 2));

    // Affine nets get the relu-pair split.
    ReluNetwork affine;
    affine.inputDim = 2;
    Eigen::MatrixXd A(1, 2);
    A << 1.5, -2.0;
    affine.layers.push_back({A, Eigen::VectorXd::Constant(1, 0.25)});
    const auto paddedAffine = pad_depth(affine, 3);
    CHECK(metrics(paddedAffine).L == 3);
    RngStream rng(31);
    for (int i = 0; i < 200; ++i) {
        Eigen::VectorXd x(2);
        x << 4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0;
        CHECK(std::abs(realize(paddedAffine, x)[0] - realize(affine, x)[0]) < 1e-12);
    }

    // Random deeper nets.
    for (int trial = 0; trial < 20; ++trial) {
        const auto net = random_net(rng, 2, 3, 1);
        const auto deep = pad_depth(net, 6);
        CHECK(metrics(deep).L == 6);
        for (int i = 0; i < 50; ++i) {
            Eigen::VectorXd x(2);
            x << 4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0;
            CHECK(std::abs(realize(deep, x)[0] - realize(net, x)[0]) < 1e-12);
        }
    }
}

TEST_CASE("payoff networks realize their payoff exactly") {
    RngStream rng(77);
    struct Fixture {
        PayoffSpec spec;
        int d;
    };
    const std::vector<Fixture> fixtures = {
        {PayoffSpec::call(1.0), 1},
        {PayoffSpec::put(1.2), 1},
        {PayoffSpec::butterfly(0.75, 1.0, 1.25), 1},
        {PayoffSpec::butterfly(0.8, 1.0, 1.5), 1},  // asymmetric wings
        {PayoffSpec::basket_call({0.5, 0.5}, 1.0), 2},
        {PayoffSpec::sum_of_calls({0.25, 0.75}, 1.0), 2},
        {PayoffSpec::call_on_max(0.9), 4},
        {PayoffSpec::call_on_max(1.0), 5},
        {PayoffSpec::constant_payoff(0.7), 3},
    };
    for (const auto& fx : fixtures) {
        const auto pn = payoff_net(fx.spec, fx.d);
        for (int i = 0; i < 10000; ++i) {
            Eigen::VectorXd s(fx.d);
            for (int j = 0; j < fx.d; ++j) s[j] = 3.0 * rng.uniform();
            const double expect = payoff_value(fx.spec, s);
            CHECK(std::abs(realize(pn.net, s)[0] - expect) <= 1e-12 * (1.0 + expect));
        }
        // Reported constants upper-bound both Lipschitz constant and size.
        const auto m = metrics(pn.net);
        const double dPow = std::pow(static_cast<double>(fx.d), pn.constants.qTilde);
        CHECK(static_cast<double>(m.M) <= pn.constants.c * dPow + 1e-9);
        CHECK(pn.constants.lipschitz <= pn.constants.c * dPow + 1e-9);
    }

    // Spot values from the spec.
    const auto basket = payoff_net(PayoffSpec::basket_call({0.5, 0.5}, 1.0), 2).net;
    Eigen::VectorXd s(2);
    s << 1.0, 1.0;
    CHECK(realize(basket, s)[0] == 0.0);
    s << 2.0, 2.0;
    CHECK(realize(basket, s)[0] == doctest::Approx(1.0));

    const auto com = payoff_net(PayoffSpec::call_on_max(0.0), 4).net;
    Eigen::VectorXd v(4);
    v << 1.0, 3.0, 2.0, 0.0;
    CHECK(realize(com, v)[0] == doctest::Approx(3.0));
}

TEST_CASE("local Lipschitz sanity bound") {
    RngStream rng(303);
    for (int trial = 0; trial < 10; ++trial) {
        const auto net = random_net(rng, 2, 3, 1);
        double prodNorm = 1.0;
        for (const auto& layer : net.layers) prodNorm *= layer.A.norm();  // Frobenius
        for (int i = 0; i < 50; ++i) {
            Eigen::VectorXd x(2), y(2);
            for (int j = 0; j < 2; ++j) {
                x[j] = 2.0 * rng.uniform() - 1.0;
                y[j] = x[j] + 0.01 * (rng.uniform() - 0.5);
            }
            const double num = std::abs(realize(net, x)[0] - realize(net, y)[0]);
            CHECK(num <= prodNorm * (x - y).norm() + 1e-12);
        }
    }
}

TEST_CASE("polynomial emulator") {
    // Constant and linear coefficients produce exact networks.
    const auto constant = polynomial_emulator({0.75}, 0.5);
    CHECK(realize1(constant, 0.3) == doctest::Approx(0.75));
    CHECK(metrics(constant).L == 1);

    const auto identity = polynomial_emulator({0.0, 1.0}, 0.5);
    for (double x : {-1.0, -0.3, 0.0, 0.9})
        CHECK(realize1(identity, x) == doctest::Approx(x).epsilon(1e-15));

    // T4 within 1e-3 on a dense grid.
    const std::vector<double> t4 = {0, 0, 0, 0, 1};
    const auto em = polynomial_emulator(t4, 1e-3);
    double worst = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        const double x = -1.0 + 2.0 * i / 10000.0;
        worst = std::max(worst, std::abs(realize1(em, x) - chebyshev_eval(t4, x)));
    }
    CHECK(worst <= 1e-3);

    CHECK_THROWS_AS(polynomial_emulator({1.0, 2.0}, 0.0), Error);
}

TEST_CASE("monomial emulator") {
    const auto constant = monomial_emulator(2, {0, 0}, 4);
    Eigen::VectorXd x(2);
    x << 0.3, -0.7;
    CHECK(realize(constant, x)[0] == doctest::Approx(1.0));

    const auto linear = monomial_emulator(2, {0, 1}, 4);
    CHECK(realize(linear, x)[0] == doctest::Approx(-0.7).epsilon(1e-15));

    const auto cube = monomial_emulator(2, {2, 1}, 12);
    RngStream rng(9);
    for (int i = 0; i < 200; ++i) {
        Eigen::VectorXd v(2);
        v << 2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0;
        const double expect = v[0] * v[0] * v[1];
        CHECK(std::abs(realize(cube, v)[0] - expect) < 1e-5);
    }
}

TEST_CASE("serialization round trip and parse errors") {
    const auto call = payoff_net(PayoffSpec::butterfly(0.75, 1.0, 1.25), 1).net;
    const auto doc = serialize(call);
    const auto back = deserialize(doc);
    CHECK(metrics(back).M == metrics(call).M);
    CHECK(metrics(back).L == metrics(call).L);
    RngStream rng(55);
    for (int i = 0; i < 100; ++i) {
        const double s = 3.0 * rng.uniform();
        CHECK(realize1(back, s) == realize1(call, s));
    }

    nlohmann::json bad = doc;
    bad["layers"][1]["A"] = {{1.0, 2.0}};  // wrong input width
    CHECK_THROWS_AS(deserialize(bad), ParseError);

    nlohmann::json empty;
    empty["inputDim"] = 1;
    empty["layers"] = nlohmann::json::array();
    CHECK_THROWS_AS(deserialize(empty), ParseError);

    // Committed fixture with known metrics.
    const auto fixture = load_network(std::string(LEVYNET_TEST_DIR) +
                                      "/fixtures/butterfly_net.json");
    CHECK(metrics(fixture).M == 9);
    CHECK(metrics(fixture).L == 2);
}
