#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tdgf/dual.hpp"
#include "tdgf/payoff.hpp"
#include "tdgf/tape.hpp"

namespace tdgf::net {

// Highway-gated architecture: first dense tanh layer, L gated layers
//   Z = tanh(U_z x + W_z X + b_z)      update gate
//   G = tanh(U_g x + W_g X + b_g)      carry gate
//   R = tanh(U_r x + W_r X + b_r)      reset gate
//   H = tanh(U_h x + W_h (X .* R) + b_h)
//   X <- (1 - G) .* H + Z .* X
// and a scalar head. The option price is psi(x) + softplus(head), so the output
// sits strictly above the payoff for any parameter values.
struct NetArch {
    int input_width = 1;
    int hidden_width = 50;
    int layers = 3;

    size_t param_count() const {
        const size_t in = input_width, h = hidden_width, l = layers;
        return h * in + h + l * 4 * (h * in + h * h + h) + h + 1;
    }
};

// Offsets into the flat parameter vector. Gate order within a layer: z, g, r, h.
struct ParamLayout {
    explicit ParamLayout(const NetArch& a)
        : in(a.input_width), h(a.hidden_width), layers(a.layers) {
        w1 = 0;
        b1 = w1 + static_cast<size_t>(h) * in;
        gates = b1 + h;
        gate_stride = static_cast<size_t>(h) * in + static_cast<size_t>(h) * h + h;
        wout = gates + static_cast<size_t>(layers) * 4 * gate_stride;
        bout = wout + h;
        count = bout + 1;
    }

    size_t u(int layer, int gate) const { return gates + (layer * 4 + gate) * gate_stride; }
    size_t w(int layer, int gate) const { return u(layer, gate) + static_cast<size_t>(h) * in; }
    size_t b(int layer, int gate) const { return w(layer, gate) + static_cast<size_t>(h) * h; }

    int in, h, layers;
    size_t w1, b1, gates, gate_stride, wout, bout, count;
};

struct NetParams {
    NetArch arch;
    std::vector<double> w;

    size_t size() const { return w.size(); }
};

// Variance-scaled uniform init (scale 1/sqrt(fan-in)), zero biases, reproducible by seed.
NetParams init_params(int input_width, int hidden_width, int layers, uint64_t seed);

template <class S>
struct NetWorkspace {
    std::vector<S> xs, zs, gs, rs, hs, xr;

    void resize(int hidden) {
        xs.resize(hidden);
        zs.resize(hidden);
        gs.resize(hidden);
        rs.resize(hidden);
        hs.resize(hidden);
        xr.resize(hidden);
    }
};

// Head pre-activation. All affine sums accumulate in a fixed order (inputs, recurrent
// terms, bias) shared with the taped builder so both paths give bit-identical values.
template <class S>
S eval_head(const NetParams& p, std::span<const S> x, NetWorkspace<S>& ws) {
    const ParamLayout lay(p.arch);
    const int in = lay.in, h = lay.h;
    const double* w = p.w.data();
    ws.resize(h);

    for (int j = 0; j < h; ++j) {
        S acc{};
        for (int k = 0; k < in; ++k) acc += w[lay.w1 + static_cast<size_t>(j) * in + k] * x[k];
        acc += ad::from_value<S>(w[lay.b1 + j]);
        ws.xs[j] = ad::tanh(acc);
    }
    for (int l = 0; l < lay.layers; ++l) {
        for (int gate = 0; gate < 4; ++gate) {
            S* out = gate == 0 ? ws.zs.data()
                     : gate == 1 ? ws.gs.data()
                     : gate == 2 ? ws.rs.data()
                                 : ws.hs.data();
            const S* rec = gate == 3 ? ws.xr.data() : ws.xs.data();
            if (gate == 3)
                for (int j = 0; j < h; ++j) ws.xr[j] = ws.xs[j] * ws.rs[j];
            const size_t uo = lay.u(l, gate), wo = lay.w(l, gate), bo = lay.b(l, gate);
            for (int j = 0; j < h; ++j) {
                S acc{};
                for (int k = 0; k < in; ++k) acc += w[uo + static_cast<size_t>(j) * in + k] * x[k];
                for (int k = 0; k < h; ++k) acc += w[wo + static_cast<size_t>(j) * h + k] * rec[k];
                acc += ad::from_value<S>(w[bo + j]);
                out[j] = ad::tanh(acc);
            }
        }
        for (int j = 0; j < h; ++j) {
            const S t1 = ws.gs[j] * ws.hs[j];
            const S t3 = ws.hs[j] - t1;
            ws.xs[j] = t3 + ws.zs[j] * ws.xs[j];
        }
    }
    S head{};
    for (int j = 0; j < h; ++j) head += w[lay.wout + j] * ws.xs[j];
    head += ad::from_value<S>(w[lay.bout]);
    return head;
}

template <class S>
S eval_with_obstacle(const NetParams& p, std::span<const S> x, const S& psi, NetWorkspace<S>& ws) {
    return psi + ad::softplus(eval_head(p, x, ws));
}

// f(x; theta) = psi(x) + softplus(head); structurally > psi(x).
double forward(const NetParams& p, std::span<const double> x, const Payoff& payoff);

// softplus(head) alone; >= 0 for all parameters.
double continuation_value(const NetParams& p, std::span<const double> x);

// Batched plain-double surface evaluation, point-major inner loops. `points` is
// npts x input_width row-major; prices/continuations are filled per point.
void eval_batch(const NetParams& p, std::span<const double> points, size_t npts,
                std::span<const double> psi, std::span<double> price,
                std::span<double> continuation);

// Taped recording of the same program. Inputs and the obstacle value are rebindable
// leaves, so one recording serves a whole batch via set_value + replay.
template <class S>
struct TapedNet {
    std::vector<ad::Operand> inputs;
    ad::Operand psi;
    ad::Operand head;
    ad::Operand root;
};

template <class S>
TapedNet<S> build_taped(ad::Tape<S>& t, const NetArch& arch) {
    const ParamLayout lay(arch);
    const int in = lay.in, h = lay.h;
    TapedNet<S> net;
    for (int k = 0; k < in; ++k) net.inputs.push_back(t.constant(S{}));
    net.psi = t.constant(S{});
    const ad::Operand one = t.constant(ad::from_value<S>(1.0));

    std::vector<ad::Operand> xs(h), zs(h), gs(h), rs(h), hs(h), xr(h);
    std::vector<ad::Operand> as, bs;
    as.reserve(in + h + 1);
    bs.reserve(in + h + 1);

    auto affine = [&](size_t uoff, const std::vector<ad::Operand>* rec, size_t woff, size_t boff,
                      int j) {
        as.clear();
        bs.clear();
        for (int k = 0; k < in; ++k) {
            as.push_back(ad::Tape<S>::param(static_cast<uint32_t>(uoff + static_cast<size_t>(j) * in + k)));
            bs.push_back(net.inputs[k]);
        }
        if (rec != nullptr) {
            for (int k = 0; k < h; ++k) {
                as.push_back(ad::Tape<S>::param(static_cast<uint32_t>(woff + static_cast<size_t>(j) * h + k)));
                bs.push_back((*rec)[k]);
            }
        }
        as.push_back(ad::Tape<S>::param(static_cast<uint32_t>(boff + j)));
        bs.push_back(one);
        return t.dot(as, bs);
    };

    for (int j = 0; j < h; ++j) xs[j] = t.tanh(affine(lay.w1, nullptr, 0, lay.b1, j));
    for (int l = 0; l < lay.layers; ++l) {
        for (int j = 0; j < h; ++j) zs[j] = t.tanh(affine(lay.u(l, 0), &xs, lay.w(l, 0), lay.b(l, 0), j));
        for (int j = 0; j < h; ++j) gs[j] = t.tanh(affine(lay.u(l, 1), &xs, lay.w(l, 1), lay.b(l, 1), j));
        for (int j = 0; j < h; ++j) rs[j] = t.tanh(affine(lay.u(l, 2), &xs, lay.w(l, 2), lay.b(l, 2), j));
        for (int j = 0; j < h; ++j) xr[j] = t.mul(xs[j], rs[j]);
        for (int j = 0; j < h; ++j) hs[j] = t.tanh(affine(lay.u(l, 3), &xr, lay.w(l, 3), lay.b(l, 3), j));
        for (int j = 0; j < h; ++j) {
            const ad::Operand t1 = t.mul(gs[j], hs[j]);
            const ad::Operand t3 = t.sub(hs[j], t1);
            xs[j] = t.add(t3, t.mul(zs[j], xs[j]));
        }
    }
    as.clear();
    bs.clear();
    for (int j = 0; j < h; ++j) {
        as.push_back(ad::Tape<S>::param(static_cast<uint32_t>(lay.wout + j)));
        bs.push_back(xs[j]);
    }
    as.push_back(ad::Tape<S>::param(static_cast<uint32_t>(lay.bout)));
    bs.push_back(one);
    net.head = t.dot(as, bs);
    net.root = t.add(net.psi, t.softplus(net.head));
    return net;
}

struct CheckpointMeta {
    int time_index = -1;       // k for TDGF checkpoints, -1 for DGM
    int state_dim = 0;         // model state dimension the net prices
    uint64_t seed = 0;
    std::string model_hash;    // config hash of the producing run
};

// Self-describing binary: JSON header (architecture + meta) followed by the flat
// little-endian float64 parameter block. Round-trips are bit-exact.
void save_checkpoint(const NetParams& p, const std::string& path, const CheckpointMeta& meta);
NetParams load_checkpoint(const std::string& path, CheckpointMeta* meta = nullptr);
NetParams load_checkpoint_expecting(const std::string& path, int input_width,
                                    CheckpointMeta* meta = nullptr);

}  // namespace tdgf::net
