#include "tdgf/network.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "tdgf/models.hpp"
#include "tdgf/rng.hpp"

static_assert(__BYTE_ORDER__ == __ORDER_LITTLE_ENDIAN__,
              "checkpoint format assumes a little-endian host");

namespace tdgf::net {

NetParams init_params(int input_width, int hidden_width, int layers, uint64_t seed) {
    if (input_width < 1) throw ValidationError("network.input_width must be >= 1");
    if (hidden_width < 1) throw ValidationError("network.hidden_width must be >= 1");
    if (layers < 1) throw ValidationError("network.layers must be >= 1");

    NetParams p;
    p.arch = NetArch{input_width, hidden_width, layers};
    const ParamLayout lay(p.arch);
    p.w.assign(lay.count, 0.0);

    Rng rng = Rng::derive(seed, 0x696e6974ULL);  // init stream
    const double s_in = 1.0 / std::sqrt(static_cast<double>(input_width));
    const double s_h = 1.0 / std::sqrt(static_cast<double>(hidden_width));

    auto fill = [&](size_t off, size_t n, double scale) {
        for (size_t i = 0; i < n; ++i) p.w[off + i] = rng.uniform(-scale, scale);
    };

    fill(lay.w1, static_cast<size_t>(lay.h) * lay.in, s_in);
    for (int l = 0; l < layers; ++l) {
        for (int gate = 0; gate < 4; ++gate) {
            fill(lay.u(l, gate), static_cast<size_t>(lay.h) * lay.in, s_in);
            fill(lay.w(l, gate), static_cast<size_t>(lay.h) * lay.h, s_h);
        }
    }
    fill(lay.wout, lay.h, s_h);
    return p;
}

double forward(const NetParams& p, std::span<const double> x, const Payoff& payoff) {
    if (static_cast<int>(x.size()) != p.arch.input_width)
        throw ValidationError("forward: point dimension does not match network input width");
    NetWorkspace<double> ws;
    const double psi = payoff(x);
    const double f = eval_with_obstacle(p, x, psi, ws);
    if (!std::isfinite(f)) throw NumericError("forward: non-finite network output");
    return f;
}

double continuation_value(const NetParams& p, std::span<const double> x) {
    if (static_cast<int>(x.size()) != p.arch.input_width)
        throw ValidationError("continuation_value: point dimension mismatch");
    NetWorkspace<double> ws;
    const double c = ad::softplus(eval_head(p, x, ws));
    if (!std::isfinite(c)) throw NumericError("continuation_value: non-finite output");
    return c;
}

void eval_batch(const NetParams& p, std::span<const double> points, size_t npts,
                std::span<const double> psi, std::span<double> price,
                std::span<double> continuation) {
    const ParamLayout lay(p.arch);
    const int in = lay.in, h = lay.h;
    const double* w = p.w.data();

    // point-major scratch rows: unit stride over the batch in every inner loop
    std::vector<double> xt(static_cast<size_t>(in) * npts);
    for (size_t m = 0; m < npts; ++m)
        for (int k = 0; k < in; ++k) xt[static_cast<size_t>(k) * npts + m] = points[m * in + k];

    const size_t hn = static_cast<size_t>(h) * npts;
    std::vector<double> xs(hn), zs(hn), gs(hn), rs(hn), hs(hn), xr(hn), acc(npts);

    auto affine_tanh = [&](size_t uoff, const double* rec, size_t woff, size_t boff, int j,
                           double* out) {
        std::fill(acc.begin(), acc.end(), w[boff + j]);
        for (int k = 0; k < in; ++k) {
            const double c = w[uoff + static_cast<size_t>(j) * in + k];
            const double* row = &xt[static_cast<size_t>(k) * npts];
            for (size_t m = 0; m < npts; ++m) acc[m] += c * row[m];
        }
        if (rec != nullptr) {
            for (int k = 0; k < h; ++k) {
                const double c = w[woff + static_cast<size_t>(j) * h + k];
                const double* row = &rec[static_cast<size_t>(k) * npts];
                for (size_t m = 0; m < npts; ++m) acc[m] += c * row[m];
            }
        }
        double* o = &out[static_cast<size_t>(j) * npts];
        for (size_t m = 0; m < npts; ++m) o[m] = std::tanh(acc[m]);
    };

    for (int j = 0; j < h; ++j) affine_tanh(lay.w1, nullptr, 0, lay.b1, j, xs.data());
    for (int l = 0; l < lay.layers; ++l) {
        for (int j = 0; j < h; ++j) affine_tanh(lay.u(l, 0), xs.data(), lay.w(l, 0), lay.b(l, 0), j, zs.data());
        for (int j = 0; j < h; ++j) affine_tanh(lay.u(l, 1), xs.data(), lay.w(l, 1), lay.b(l, 1), j, gs.data());
        for (int j = 0; j < h; ++j) affine_tanh(lay.u(l, 2), xs.data(), lay.w(l, 2), lay.b(l, 2), j, rs.data());
        for (size_t i = 0; i < hn; ++i) xr[i] = xs[i] * rs[i];
        for (int j = 0; j < h; ++j) affine_tanh(lay.u(l, 3), xr.data(), lay.w(l, 3), lay.b(l, 3), j, hs.data());
        for (size_t i = 0; i < hn; ++i) xs[i] = (hs[i] - gs[i] * hs[i]) + zs[i] * xs[i];
    }
    for (size_t m = 0; m < npts; ++m) acc[m] = w[lay.bout];
    for (int j = 0; j < h; ++j) {
        const double c = w[lay.wout + j];
        const double* row = &xs[static_cast<size_t>(j) * npts];
        for (size_t m = 0; m < npts; ++m) acc[m] += c * row[m];
    }
    for (size_t m = 0; m < npts; ++m) {
        const double cont = ad::stable_softplus(acc[m]);
        continuation[m] = cont;
        price[m] = psi[m] + cont;
    }
}

void save_checkpoint(const NetParams& p, const std::string& path, const CheckpointMeta& meta) {
    nlohmann::json header = {
        {"format", "tdgf-net"},
        {"version", 1},
        {"input_width", p.arch.input_width},
        {"hidden_width", p.arch.hidden_width},
        {"layers", p.arch.layers},
        {"param_count", p.w.size()},
        {"time_index", meta.time_index},
        {"state_dim", meta.state_dim},
        {"seed", meta.seed},
        {"model_hash", meta.model_hash},
    };
    const std::string hs = header.dump();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open checkpoint file for writing: " + path);
    out.write("TDGFNET1", 8);
    const uint32_t len = static_cast<uint32_t>(hs.size());
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    out.write(reinterpret_cast<const char*>(p.w.data()),
              static_cast<std::streamsize>(p.w.size() * sizeof(double)));
    if (!out) throw NumericError("checkpoint write failed: " + path);
}

NetParams load_checkpoint(const std::string& path, CheckpointMeta* meta) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open checkpoint file: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, "TDGFNET1", 8) != 0)
        throw ValidationError("not a checkpoint file: " + path);
    uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    if (!in || len > (1u << 20)) throw ValidationError("corrupt checkpoint header: " + path);
    std::string hs(len, '\0');
    in.read(hs.data(), len);
    nlohmann::json header = nlohmann::json::parse(hs, nullptr, false);
    if (header.is_discarded() || header.value("format", "") != "tdgf-net")
        throw ValidationError("corrupt checkpoint header: " + path);
    if (header.value("version", 0) != 1)
        throw ValidationError("unsupported checkpoint version in " + path);

    NetParams p;
    p.arch.input_width = header.at("input_width").get<int>();
    p.arch.hidden_width = header.at("hidden_width").get<int>();
    p.arch.layers = header.at("layers").get<int>();
    const size_t n = header.at("param_count").get<size_t>();
    if (n != p.arch.param_count())
        throw ValidationError("checkpoint parameter count does not match architecture: " + path);
    p.w.resize(n);
    in.read(reinterpret_cast<char*>(p.w.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw ValidationError("truncated checkpoint payload: " + path);
    if (meta != nullptr) {
        meta->time_index = header.value("time_index", -1);
        meta->state_dim = header.value("state_dim", 0);
        meta->seed = header.value("seed", static_cast<uint64_t>(0));
        meta->model_hash = header.value("model_hash", "");
    }
    return p;
}

NetParams load_checkpoint_expecting(const std::string& path, int input_width,
                                    CheckpointMeta* meta) {
    NetParams p = load_checkpoint(path, meta);
    if (p.arch.input_width != input_width)
        throw ValidationError("checkpoint input width " + std::to_string(p.arch.input_width) +
                              " does not match expected " + std::to_string(input_width) + ": " +
                              path);
    return p;
}

}  // namespace tdgf::net
