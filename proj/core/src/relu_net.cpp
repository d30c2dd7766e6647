#include "levynet/relu_net.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

namespace levynet {

void ReluNetwork::validate() const {
    if (layers.empty()) throw Error("network needs at least one layer");
    long prev = inputDim;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].A.cols() != prev)
            throw DimensionMismatch("layer " + std::to_string(i) + " expects input " +
                                    std::to_string(layers[i].A.cols()) + ", got " +
                                    std::to_string(prev));
        if (layers[i].b.size() != layers[i].A.rows())
            throw DimensionMismatch("layer " + std::to_string(i) + " bias size mismatch");
        prev = layers[i].A.rows();
    }
}

Eigen::VectorXd realize(const ReluNetwork& net, const Eigen::VectorXd& x) {
    if (x.size() != net.inputDim) throw DimensionMismatch("input dimension mismatch");
    Eigen::VectorXd h = x;
    const std::size_t L = net.layers.size();
    for (std::size_t l = 0; l < L; ++l) {
        h = net.layers[l].A * h + net.layers[l].b;
        if (l + 1 < L) h = h.cwiseMax(0.0);
    }
    return h;
}

double realize1(const ReluNetwork& net, double x) {
    Eigen::VectorXd v(1);
    v[0] = x;
    return realize(net, v)[0];
}

NetMetrics metrics(const ReluNetwork& net) {
    NetMetrics m;
    m.L = net.depth();
    m.outputDim = net.outputDim();
    for (const auto& layer : net.layers) {
        long count = 0;
        for (long j = 0; j < layer.A.size(); ++j)
            if (layer.A.data()[j] != 0.0) ++count;
        for (long j = 0; j < layer.b.size(); ++j)
            if (layer.b[j] != 0.0) ++count;
        m.perLayerM.push_back(count);
        m.M += count;
    }
    return m;
}

ReluNetwork average(const std::vector<ReluNetwork>& nets,
                    const std::vector<double>& w,
                    const std::vector<Eigen::MatrixXd>& D,
                    const std::vector<Eigen::VectorXd>& c) {
    const std::size_t n = nets.size();
    if (n == 0) throw Error("average needs at least one network");
    if (w.size() != n || D.size() != n || c.size() != n)
        throw Error("average: w, D, c must have one entry per network");
    const int L = nets[0].depth();
    const int outDim = nets[0].outputDim();
    const int d = nets[0].inputDim;
    for (const auto& net : nets) {
        if (net.depth() != L) throw LayerMismatch("averaged networks must share depth");
        if (net.outputDim() != outDim)
            throw OutputDimMismatch("averaged networks must share output dimension");
        if (net.inputDim != d) throw DimensionMismatch("averaged networks must share input dim");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (D[i].rows() != d || D[i].cols() != d)
            throw DimensionMismatch("D_i must be d x d");
        if (c[i].size() != d) throw DimensionMismatch("c_i must have length d");
    }

    ReluNetwork out;
    out.inputDim = d;

    if (L == 1) {
        // Single affine layer: the weighted sum collapses to one affine map.
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(outDim, d);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(outDim);
        for (std::size_t i = 0; i < n; ++i) {
            A += w[i] * nets[i].layers[0].A * D[i];
            b += w[i] * (nets[i].layers[0].A * c[i] + nets[i].layers[0].b);
        }
        out.layers.push_back({A, b});
        return out;
    }

    // First layer: stack A_1^i D_i with biases A_1^i c_i + b_1^i.
    long rows1 = 0;
    for (const auto& net : nets) rows1 += net.layers[0].A.rows();
    Eigen::MatrixXd A1 = Eigen::MatrixXd::Zero(rows1, d);
    Eigen::VectorXd b1 = Eigen::VectorXd::Zero(rows1);
    long at = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& l0 = nets[i].layers[0];
        A1.middleRows(at, l0.A.rows()) = l0.A * D[i];
        b1.segment(at, l0.A.rows()) = l0.A * c[i] + l0.b;
        at += l0.A.rows();
    }
    out.layers.push_back({A1, b1});

    // Hidden layers: block diagonal.
    for (int j = 1; j + 1 < L; ++j) {
        long rows = 0, cols = 0;
        for (const auto& net : nets) {
            rows += net.layers[static_cast<std::size_t>(j)].A.rows();
            cols += net.layers[static_cast<std::size_t>(j)].A.cols();
        }
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, cols);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
        long r = 0, cc = 0;
        for (const auto& net : nets) {
            const auto& lj = net.layers[static_cast<std::size_t>(j)];
            A.block(r, cc, lj.A.rows(), lj.A.cols()) = lj.A;
            b.segment(r, lj.A.rows()) = lj.b;
            r += lj.A.rows();
            cc += lj.A.cols();
        }
        out.layers.push_back({A, b});
    }

    // Output layer: [w_1 A_L^1 ... w_n A_L^n], bias sum_i w_i b_L^i.
    long colsL = 0;
    for (const auto& net : nets) colsL += net.layers.back().A.cols();
    Eigen::MatrixXd AL = Eigen::MatrixXd::Zero(outDim, colsL);
    Eigen::VectorXd bL = Eigen::VectorXd::Zero(outDim);
    long col = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ll = nets[i].layers.back();
        AL.middleCols(col, ll.A.cols()) = w[i] * ll.A;
        bL += w[i] * ll.b;
        col += ll.A.cols();
    }
    out.layers.push_back({AL, bL});
    return out;
}

ReluNetwork average_scaled(const std::vector<ReluNetwork>& nets,
                           const std::vector<double>& w,
                           const std::vector<Eigen::VectorXd>& scales) {
    std::vector<Eigen::MatrixXd> D;
    std::vector<Eigen::VectorXd> c;
    D.reserve(nets.size());
    c.reserve(nets.size());
    for (const auto& s : scales) {
        D.push_back(s.asDiagonal());
        c.push_back(Eigen::VectorXd::Zero(s.size()));
    }
    return average(nets, w, D, c);
}

ReluNetwork pad_depth(const ReluNetwork& net, int targetL) {
    const int L = net.depth();
    if (targetL < L) throw Error("pad_depth cannot shrink a network");
    if (targetL == L) return net;
    ReluNetwork out;
    out.inputDim = net.inputDim;

    if (L >= 2) {
        // Post-activation values entering the output layer are nonnegative, so
        // plain identity layers pass them through exactly.
        const long W = net.layers[static_cast<std::size_t>(L - 2)].A.rows();
        out.layers.assign(net.layers.begin(), net.layers.end() - 1);
        for (int j = 0; j < targetL - L; ++j)
            out.layers.push_back({Eigen::MatrixXd::Identity(W, W), Eigen::VectorXd::Zero(W)});
        out.layers.push_back(net.layers.back());
        return out;
    }

    // Affine net: split the input as x = relu(x) - relu(-x) and carry both.
    const int d = net.inputDim;
    Eigen::MatrixXd split(2 * d, d);
    split << Eigen::MatrixXd::Identity(d, d), -Eigen::MatrixXd::Identity(d, d);
    out.layers.push_back({split, Eigen::VectorXd::Zero(2 * d)});
    for (int j = 0; j < targetL - 2; ++j)
        out.layers.push_back(
            {Eigen::MatrixXd::Identity(2 * d, 2 * d), Eigen::VectorXd::Zero(2 * d)});
    const auto& l0 = net.layers[0];
    Eigen::MatrixXd Afin(l0.A.rows(), 2 * d);
    Afin << l0.A, -l0.A;
    out.layers.push_back({Afin, l0.b});
    return out;
}

// ---- payoffs -----------------------------------------------------------------

std::vector<double> PayoffSpec::effective_weights(int d) const {
    if (!weights.empty()) {
        if (static_cast<int>(weights.size()) != d)
            throw DimensionMismatch("payoff weights must have length d");
        return weights;
    }
    return std::vector<double>(static_cast<std::size_t>(d), 1.0 / d);
}

namespace {

ReluNetwork call_like_net(double sign, double K) {
    // sign=+1: (s-K)^+, sign=-1: (K-s)^+
    ReluNetwork net;
    net.inputDim = 1;
    net.layers.push_back({Eigen::MatrixXd::Constant(1, 1, sign),
                          Eigen::VectorXd::Constant(1, -sign * K)});
    net.layers.push_back({Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Zero(1)});
    return net;
}

struct ButterflyCoeffs {
    double a, b, c;  // weights on (s-K1)^+, (s-K)^+, (s-K2)^+
};

ButterflyCoeffs butterfly_coeffs(const PayoffSpec& spec) {
    if (!(spec.K1 < spec.K && spec.K < spec.K2))
        throw Error("butterfly requires K1 < K < K2");
    const double a = 1.0;
    const double b = -(spec.K2 - spec.K1) / (spec.K2 - spec.K);
    const double c = (spec.K - spec.K1) / (spec.K2 - spec.K);
    return {a, b, c};
}

ReluNetwork call_on_max_net(double K, int d) {
    ReluNetwork net;
    net.inputDim = d;
    // Affine view of the current candidate values in terms of the previous
    // layer's channels: v = V h + o.
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd o = Eigen::VectorXd::Zero(d);
    while (V.rows() > 1) {
        const long m = V.rows();
        const long pairs = m / 2;
        const bool odd = (m % 2) != 0;
        const long width = 2 * pairs + (odd ? 1 : 0);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(width, V.cols());
        Eigen::VectorXd b = Eigen::VectorXd::Zero(width);
        for (long j = 0; j < pairs; ++j) {
            A.row(2 * j) = V.row(2 * j) - V.row(2 * j + 1);
            b[2 * j] = o[2 * j] - o[2 * j + 1];
            A.row(2 * j + 1) = V.row(2 * j + 1);
            b[2 * j + 1] = o[2 * j + 1];
        }
        if (odd) {
            A.row(width - 1) = V.row(m - 1);
            b[width - 1] = o[m - 1];
        }
        net.layers.push_back({A, b});
        // max(a, b) = relu(a-b) + relu(b) for b >= 0.
        const long newCount = pairs + (odd ? 1 : 0);
        V = Eigen::MatrixXd::Zero(newCount, width);
        o = Eigen::VectorXd::Zero(newCount);
        for (long j = 0; j < pairs; ++j) {
            V(j, 2 * j) = 1.0;
            V(j, 2 * j + 1) = 1.0;
        }
        if (odd) V(newCount - 1, width - 1) = 1.0;
    }
    // (max - K)^+
    net.layers.push_back({V, Eigen::VectorXd::Constant(1, o[0] - K)});
    net.layers.push_back({Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Zero(1)});
    return net;
}

}  // namespace

PayoffNet payoff_net(const PayoffSpec& spec, int d) {
    if (d < 1) throw Error("payoff dimension must be >= 1");
    PayoffNet out;
    out.constants.q = 0.0;
    out.constants.p = 2.0;
    switch (spec.kind) {
        case PayoffKind::Call:
        case PayoffKind::Put: {
            if (d != 1) throw Error("Call/Put payoffs are univariate");
            out.net = call_like_net(spec.kind == PayoffKind::Call ? 1.0 : -1.0, spec.K);
            out.constants.lipschitz = 1.0;
            out.constants.qTilde = 0.0;
            break;
        }
        case PayoffKind::Butterfly: {
            if (d != 1) throw Error("Butterfly payoff is univariate");
            const auto bc = butterfly_coeffs(spec);
            ReluNetwork net;
            net.inputDim = 1;
            Eigen::MatrixXd A1 = Eigen::MatrixXd::Constant(3, 1, 1.0);
            Eigen::VectorXd b1(3);
            b1 << -spec.K1, -spec.K, -spec.K2;
            Eigen::MatrixXd A2(1, 3);
            A2 << bc.a, bc.b, bc.c;
            net.layers.push_back({A1, b1});
            net.layers.push_back({A2, Eigen::VectorXd::Zero(1)});
            out.net = net;
            out.constants.lipschitz = std::max(std::abs(bc.a), std::abs(bc.a + bc.b));
            out.constants.qTilde = 0.0;
            break;
        }
        case PayoffKind::BasketCall: {
            const auto w = spec.effective_weights(d);
            ReluNetwork net;
            net.inputDim = d;
            Eigen::MatrixXd A1(1, d);
            for (int i = 0; i < d; ++i) A1(0, i) = w[static_cast<std::size_t>(i)];
            net.layers.push_back({A1, Eigen::VectorXd::Constant(1, -spec.K)});
            net.layers.push_back(
                {Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Zero(1)});
            out.net = net;
            double norm2 = 0.0;
            for (double x : w) norm2 += x * x;
            out.constants.lipschitz = std::sqrt(norm2);
            out.constants.qTilde = 1.0;
            break;
        }
        case PayoffKind::SumOfCalls: {
            const auto w = spec.effective_weights(d);
            ReluNetwork net;
            net.inputDim = d;
            net.layers.push_back({Eigen::MatrixXd::Identity(d, d),
                                  Eigen::VectorXd::Constant(d, -spec.K)});
            Eigen::MatrixXd A2(1, d);
            for (int i = 0; i < d; ++i) A2(0, i) = w[static_cast<std::size_t>(i)];
            net.layers.push_back({A2, Eigen::VectorXd::Zero(1)});
            out.net = net;
            double norm2 = 0.0;
            for (double x : w) norm2 += x * x;
            out.constants.lipschitz = std::sqrt(norm2);
            out.constants.qTilde = 1.0;
            break;
        }
        case PayoffKind::CallOnMax: {
            out.net = call_on_max_net(spec.K, d);
            out.constants.lipschitz = 1.0;
            out.constants.qTilde = 1.0;
            break;
        }
        case PayoffKind::Constant: {
            ReluNetwork net;
            net.inputDim = d;
            net.layers.push_back(
                {Eigen::MatrixXd::Zero(1, d), Eigen::VectorXd::Constant(1, spec.constant)});
            out.net = net;
            out.constants.lipschitz = 0.0;
            out.constants.qTilde = 0.0;
            break;
        }
    }
    out.net.validate();
    const auto m = metrics(out.net);
    const double dPow = std::pow(static_cast<double>(d), out.constants.qTilde);
    out.constants.c =
        std::max(1.0, std::max(out.constants.lipschitz, static_cast<double>(m.M) / dPow));
    return out;
}

double payoff_value(const PayoffSpec& spec, const Eigen::VectorXd& s) {
    switch (spec.kind) {
        case PayoffKind::Call:
            return std::max(s[0] - spec.K, 0.0);
        case PayoffKind::Put:
            return std::max(spec.K - s[0], 0.0);
        case PayoffKind::Butterfly: {
            const auto bc = butterfly_coeffs(spec);
            return bc.a * std::max(s[0] - spec.K1, 0.0) +
                   bc.b * std::max(s[0] - spec.K, 0.0) +
                   bc.c * std::max(s[0] - spec.K2, 0.0);
        }
        case PayoffKind::BasketCall: {
            const auto w = spec.effective_weights(static_cast<int>(s.size()));
            double acc = 0.0;
            for (int i = 0; i < s.size(); ++i) acc += w[static_cast<std::size_t>(i)] * s[i];
            return std::max(acc - spec.K, 0.0);
        }
        case PayoffKind::SumOfCalls: {
            const auto w = spec.effective_weights(static_cast<int>(s.size()));
            double acc = 0.0;
            for (int i = 0; i < s.size(); ++i)
                acc += w[static_cast<std::size_t>(i)] * std::max(s[i] - spec.K, 0.0);
            return acc;
        }
        case PayoffKind::CallOnMax:
            return std::max(s.maxCoeff() - spec.K, 0.0);
        case PayoffKind::Constant:
            return spec.constant;
    }
    return 0.0;
}

double payoff_value(const PayoffSpec& spec, double s) {
    Eigen::VectorXd v(1);
    v[0] = s;
    return payoff_value(spec, v);
}

PayoffEvaluator::PayoffEvaluator(const PayoffSpec& spec, int d) : spec_(spec) {
    if (spec.kind == PayoffKind::BasketCall || spec.kind == PayoffKind::SumOfCalls)
        weights_ = spec.effective_weights(d);
}

double PayoffEvaluator::operator()(const Eigen::VectorXd& s) const {
    switch (spec_.kind) {
        case PayoffKind::BasketCall: {
            double acc = -spec_.K;
            for (long i = 0; i < s.size(); ++i)
                acc += weights_[static_cast<std::size_t>(i)] * s[i];
            return acc > 0.0 ? acc : 0.0;
        }
        case PayoffKind::SumOfCalls: {
            double acc = 0.0;
            for (long i = 0; i < s.size(); ++i) {
                const double leg = s[i] - spec_.K;
                if (leg > 0.0) acc += weights_[static_cast<std::size_t>(i)] * leg;
            }
            return acc;
        }
        default:
            return payoff_value(spec_, s);
    }
}

// ---- polynomial emulation -------------------------------------------------------

double chebyshev_eval(const std::vector<double>& c, double x) {
    if (c.empty()) return 0.0;
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
        const double b0 = c[k] + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return c[0] + x * b1 - b2;
}

namespace {

// Builds the network evaluating sum c_k T_k(x) through the recurrence
// T_{k+1} = 2 x T_k - T_{k-1}, with each product x * T_k realized by a pair
// of Yarotsky squaring chains of depth `m`. Signed values travel as
// relu-pair channels; the product candidates are scaled into [0,1] before
// entering the chains.
ReluNetwork build_cheb_net(const std::vector<double>& c, int m) {
    const int p = static_cast<int>(c.size()) - 1;
    const double S = 1.25;  // keeps |x +- T_k| / (2S) inside [0,1]

    // Base state channels (post-activation, all nonnegative):
    // 0 zp, 1 zn, 2 tkp, 3 tkn, 4 tk1p, 5 tk1n, 6 accp, 7 accn
    // with x = zp - zn, T_k = tkp - tkn, T_{k-1} = tk1p - tk1n, acc = accp - accn.
    constexpr int kBase = 8;
    ReluNetwork net;
    net.inputDim = 1;

    // Input layer: T_1 = x, T_0 = 1, acc = c_0 + c_1 x.
    {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(kBase, 1);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(kBase);
        A(0, 0) = 1.0;
        A(1, 0) = -1.0;
        A(2, 0) = 1.0;
        A(3, 0) = -1.0;
        b[4] = 1.0;
        A(6, 0) = c[1];
        b[6] = c[0];
        A(7, 0) = -c[1];
        b[7] = -c[0];
        net.layers.push_back({A, b});
    }

    auto passthrough = [](Eigen::MatrixXd& A) {
        for (int i = 0; i < kBase; ++i) A(i, i) = 1.0;
    };

    for (int k = 1; k < p; ++k) {
        // Phase A: relu-split u = (x + T_k)/(2S) and v = (x - T_k)/(2S).
        {
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(kBase + 4, kBase);
            Eigen::VectorXd b = Eigen::VectorXd::Zero(kBase + 4);
            passthrough(A);
            const double h = 1.0 / (2.0 * S);
            int r = kBase;
            A(r, 0) = h; A(r, 1) = -h; A(r, 2) = h; A(r, 3) = -h; ++r;   // up
            A(r, 0) = -h; A(r, 1) = h; A(r, 2) = -h; A(r, 3) = h; ++r;   // un
            A(r, 0) = h; A(r, 1) = -h; A(r, 2) = -h; A(r, 3) = h; ++r;   // vp
            A(r, 0) = -h; A(r, 1) = h; A(r, 2) = h; A(r, 3) = -h;        // vn
            net.layers.push_back({A, b});
        }
        // Phase B: chain init u0 = t, w0 = relu(t - 1/2), a0 = t with t = |.|.
        {
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(kBase + 6, kBase + 4);
            Eigen::VectorXd b = Eigen::VectorXd::Zero(kBase + 6);
            passthrough(A);
            for (int chain = 0; chain < 2; ++chain) {
                const int src = kBase + 2 * chain;
                const int dst = kBase + 3 * chain;
                A(dst, src) = 1.0; A(dst, src + 1) = 1.0;
                A(dst + 1, src) = 1.0; A(dst + 1, src + 1) = 1.0;
                b[dst + 1] = -0.5;
                A(dst + 2, src) = 1.0; A(dst + 2, src + 1) = 1.0;
            }
            net.layers.push_back({A, b});
        }
        // Phase C: m sawtooth refinement layers; a_s = a_{s-1} - g^{(s)}/4^s.
        for (int s = 1; s <= m; ++s) {
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(kBase + 6, kBase + 6);
            Eigen::VectorXd b = Eigen::VectorXd::Zero(kBase + 6);
            passthrough(A);
            const double shrink = std::pow(4.0, -s);
            for (int chain = 0; chain < 2; ++chain) {
                const int i = kBase + 3 * chain;  // (u, w, a)
                A(i, i) = 2.0; A(i, i + 1) = -4.0;
                A(i + 1, i) = 2.0; A(i + 1, i + 1) = -4.0;
                b[i + 1] = -0.5;
                A(i + 2, i + 2) = 1.0;
                A(i + 2, i) = -2.0 * shrink;
                A(i + 2, i + 1) = 4.0 * shrink;
            }
            net.layers.push_back({A, b});
        }
        // Phase D: with a_u ~ (x+T)^2/(2S)^2 and a_v ~ (x-T)^2/(2S)^2,
        // x T_k = S^2 (a_u - a_v); then T_{k+1} = 2 x T_k - T_{k-1} and
        // acc += c_{k+1} T_{k+1}.
        {
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(kBase, kBase + 6);
            Eigen::VectorXd b = Eigen::VectorXd::Zero(kBase);
            A(0, 0) = 1.0;
            A(1, 1) = 1.0;
            const int au = kBase + 2, av = kBase + 5;
            const double q = 2.0 * S * S;  // coefficient of a_u in 2 x T_k
            A(2, au) = q; A(2, av) = -q; A(2, 4) = -1.0; A(2, 5) = 1.0;
            A(3, au) = -q; A(3, av) = q; A(3, 4) = 1.0; A(3, 5) = -1.0;
            A(4, 2) = 1.0;  // new T_{k-1} = old T_k
            A(5, 3) = 1.0;
            const double ck = c[static_cast<std::size_t>(k) + 1];
            A(6, 6) = 1.0; A(6, 7) = -1.0;
            A(6, au) = ck * q; A(6, av) = -ck * q; A(6, 4) = -ck; A(6, 5) = ck;
            A(7, 6) = -1.0; A(7, 7) = 1.0;
            A(7, au) = -ck * q; A(7, av) = ck * q; A(7, 4) = ck; A(7, 5) = -ck;
            net.layers.push_back({A, b});
        }
    }

    // Output layer: acc = accp - accn.
    Eigen::MatrixXd Aout = Eigen::MatrixXd::Zero(1, kBase);
    Aout(0, 6) = 1.0;
    Aout(0, 7) = -1.0;
    net.layers.push_back({Aout, Eigen::VectorXd::Zero(1)});
    return net;
}

}  // namespace

ReluNetwork polynomial_emulator(const std::vector<double>& chebCoeffs, double delta) {
    if (delta <= 0.0 || delta >= 1.0) throw Error("delta must lie in (0,1)");
    std::vector<double> c = chebCoeffs;
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    for (double v : c)
        if (!std::isfinite(v)) throw Error("coefficients must be finite");
    if (c.empty()) c.push_back(0.0);
    const int p = static_cast<int>(c.size()) - 1;

    if (p == 0) {
        ReluNetwork net;
        net.inputDim = 1;
        net.layers.push_back(
            {Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Constant(1, c[0])});
        return net;
    }
    if (p == 1) {
        // c0 + c1 x exactly, via x = relu(x) - relu(-x).
        ReluNetwork net;
        net.inputDim = 1;
        Eigen::MatrixXd A1(2, 1);
        A1 << 1.0, -1.0;
        Eigen::MatrixXd A2(1, 2);
        A2 << c[1], -c[1];
        net.layers.push_back({A1, Eigen::VectorXd::Zero(2)});
        net.layers.push_back({A2, Eigen::VectorXd::Constant(1, c[0])});
        return net;
    }

    // Tolerance split across the p-1 product subnetworks, then verified on a
    // dense grid; the chain depth is bumped until the measured error clears
    // the target.
    const double perUnit = delta / (p + 1);
    int m = std::max(3, static_cast<int>(std::ceil(0.5 * std::log2(8.0 / perUnit))));
    for (int attempt = 0; attempt < 12; ++attempt, ++m) {
        ReluNetwork net = build_cheb_net(c, m);
        double worst = 0.0;
        const int G = 4001;
        for (int i = 0; i < G; ++i) {
            const double x = -1.0 + 2.0 * i / (G - 1);
            worst = std::max(worst, std::abs(realize1(net, x) - chebyshev_eval(c, x)));
        }
        if (worst <= 0.98 * delta) return net;
    }
    throw Error("polynomial emulator failed to reach the requested accuracy");
}

ReluNetwork monomial_emulator(int d, const std::vector<int>& exponents, int chainDepth) {
    if (static_cast<int>(exponents.size()) != d)
        throw DimensionMismatch("exponent vector must have length d");
    std::vector<int> factors;  // coordinate index, repeated
    for (int j = 0; j < d; ++j) {
        if (exponents[static_cast<std::size_t>(j)] < 0) throw Error("exponents must be >= 0");
        for (int r = 0; r < exponents[static_cast<std::size_t>(j)]; ++r) factors.push_back(j);
    }

    ReluNetwork net;
    net.inputDim = d;
    if (factors.empty()) {
        // Constant 1, two layers so padding to a common depth stays cheap.
        net.layers.push_back({Eigen::MatrixXd::Zero(1, d), Eigen::VectorXd::Constant(1, 1.0)});
        net.layers.push_back(
            {Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Zero(1)});
        return net;
    }
    if (factors.size() == 1) {
        Eigen::MatrixXd A1 = Eigen::MatrixXd::Zero(2, d);
        A1(0, factors[0]) = 1.0;
        A1(1, factors[0]) = -1.0;
        Eigen::MatrixXd A2(1, 2);
        A2 << 1.0, -1.0;
        net.layers.push_back({A1, Eigen::VectorXd::Zero(2)});
        net.layers.push_back({A2, Eigen::VectorXd::Zero(1)});
        return net;
    }

    // Base channels: (x_j^+, x_j^-) for j < d, then the running product pair
    // (Pp, Pn). Every factor multiplication appends the same four phases used
    // by the Chebyshev builder.
    const int kBase = 2 * d + 2;
    const int pp = 2 * d, pn = 2 * d + 1;
    const double S = 1.25;
    const int m = chainDepth;

    {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(kBase, d);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(kBase);
        for (int j = 0; j < d; ++j) {
            A(2 * j, j) = 1.0;
            A(2 * j + 1, j) = -1.0;
        }
        A(pp, factors[0]) = 1.0;  // P = x_{f0}
        A(pn, factors[0]) = -1.0;
        net.layers.push_back({A, b});
    }

    auto passthrough = [&](Eigen::MatrixXd& A) {
        for (int i = 0; i < kBase; ++i) A(i, i) = 1.0;
    };

    for (std::size_t t = 1; t < factors.size(); ++t) {
        const int xp = 2 * factors[t], xn = 2 * factors[t] + 1;
        // Phase A: split u = (P + x)/(2S), v = (P - x)/(2S).
        {
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(kBase + 4, kBase);
            Eigen::VectorXd b = Eigen::VectorXd::Zero(kBase + 4);
            passthrough(A);
            const double h = 1.0 / (2.0 * S);
            int r = kBase;
            A(r, pp) = h; A(r, pn) = -h; A(r, xp) = h; A(r, xn) = -h; ++r;
            A(r, pp) = -h; A(r, pn) = h; A(r, xp) = -h; A(r, xn) = h; ++r;
            A(r, pp) = h; A(r, pn) = -h; A(r, xp) = -h; A(r, xn) = h; ++r;
            A(r, pp) = -h; A(r, pn) = h; A(r, xp) = h; A(r, xn) = -h;
            net.layers.push_back({A, b});
        }
        // Phase B: squaring chain init.
        {
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(kBase + 6, kBase + 4);
            Eigen::VectorXd b = Eigen::VectorXd::Zero(kBase + 6);
            passthrough(A);
            for (int chain = 0; chain < 2; ++chain) {
                const int src = kBase + 2 * chain;
                const int dst = kBase + 3 * chain;
                A(dst, src) = 1.0; A(dst, src + 1) = 1.0;
                A(dst + 1, src) = 1.0; A(dst + 1, src + 1) = 1.0;
                b[dst + 1] = -0.5;
                A(dst + 2, src) = 1.0; A(dst + 2, src + 1) = 1.0;
            }
            net.layers.push_back({A, b});
        }
        // Phase C.
        for (int s = 1; s <= m; ++s) {
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(kBase + 6, kBase + 6);
            Eigen::VectorXd b = Eigen::VectorXd::Zero(kBase + 6);
            passthrough(A);
            const double shrink = std::pow(4.0, -s);
            for (int chain = 0; chain < 2; ++chain) {
                const int i = kBase + 3 * chain;
                A(i, i) = 2.0; A(i, i + 1) = -4.0;
                A(i + 1, i) = 2.0; A(i + 1, i + 1) = -4.0;
                b[i + 1] = -0.5;
                A(i + 2, i + 2) = 1.0;
                A(i + 2, i) = -2.0 * shrink;
                A(i + 2, i + 1) = 4.0 * shrink;
            }
            net.layers.push_back({A, b});
        }
        // Phase D: P <- S^2 (a_u - a_v).
        {
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(kBase, kBase + 6);
            Eigen::VectorXd b = Eigen::VectorXd::Zero(kBase);
            for (int i = 0; i < 2 * d; ++i) A(i, i) = 1.0;
            const int au = kBase + 2, av = kBase + 5;
            const double q = S * S;
            A(pp, au) = q; A(pp, av) = -q;
            A(pn, au) = -q; A(pn, av) = q;
            net.layers.push_back({A, b});
        }
    }

    Eigen::MatrixXd Aout = Eigen::MatrixXd::Zero(1, kBase);
    Aout(0, pp) = 1.0;
    Aout(0, pn) = -1.0;
    net.layers.push_back({Aout, Eigen::VectorXd::Zero(1)});
    return net;
}

// ---- serialization ----------------------------------------------------------------

nlohmann::json serialize(const ReluNetwork& net) {
    nlohmann::json doc;
    doc["inputDim"] = net.inputDim;
    doc["layers"] = nlohmann::json::array();
    for (const auto& layer : net.layers) {
        nlohmann::json jl;
        auto& A = jl["A"] = nlohmann::json::array();
        for (long r = 0; r < layer.A.rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (long cc = 0; cc < layer.A.cols(); ++cc) row.push_back(layer.A(r, cc));
            A.push_back(std::move(row));
        }
        auto& b = jl["b"] = nlohmann::json::array();
        for (long r = 0; r < layer.b.size(); ++r) b.push_back(layer.b[r]);
        doc["layers"].push_back(std::move(jl));
    }
    return doc;
}

ReluNetwork deserialize(const nlohmann::json& doc) {
    ReluNetwork net;
    try {
        net.inputDim = doc.at("inputDim").get<int>();
        long prev = net.inputDim;
        int idx = 0;
        for (const auto& jl : doc.at("layers")) {
            const auto& A = jl.at("A");
            const auto& b = jl.at("b");
            const long rows = static_cast<long>(A.size());
            if (rows == 0) throw ParseError("layers[" + std::to_string(idx) + "].A is empty");
            const long cols = static_cast<long>(A.at(0).size());
            if (cols != prev)
                throw ParseError("layers[" + std::to_string(idx) + "].A has " +
                                 std::to_string(cols) + " columns, expected " +
                                 std::to_string(prev));
            Layer layer;
            layer.A.resize(rows, cols);
            for (long r = 0; r < rows; ++r) {
                if (static_cast<long>(A.at(static_cast<std::size_t>(r)).size()) != cols)
                    throw ParseError("layers[" + std::to_string(idx) + "].A is ragged");
                for (long cc = 0; cc < cols; ++cc)
                    layer.A(r, cc) =
                        A.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(cc)).get<double>();
            }
            if (static_cast<long>(b.size()) != rows)
                throw ParseError("layers[" + std::to_string(idx) + "].b length mismatch");
            layer.b.resize(rows);
            for (long r = 0; r < rows; ++r)
                layer.b[r] = b.at(static_cast<std::size_t>(r)).get<double>();
            net.layers.push_back(std::move(layer));
            prev = rows;
            ++idx;
        }
        if (net.layers.empty()) throw ParseError("network document has no layers");
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed network document: ") + e.what());
    }
    return net;
}

void save_network(const ReluNetwork& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << serialize(net).dump(1) << "\n";
}

ReluNetwork load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return deserialize(doc);
}

}  // namespace levynet
