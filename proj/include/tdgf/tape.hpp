#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "tdgf/dual.hpp"

namespace tdgf::ad {

// Recording tape for reverse-mode accumulation over network parameters.
//
// Slots hold a scalar bundle S (double, Dual1, Dual2), so input derivatives of the
// recorded function travel forward while the reverse sweep runs over the parameters.
// The sweep propagates linear functionals on the bundle (adj_mul/contract in
// dual.hpp); seeding the root with loss weights on the value/tangent components
// yields d(loss)/d(theta) for losses that mix f, grad_x f and hess_x f.
//
// Programs are position-independent of the parameter values: bind() attaches the
// parameter vector, leaf nodes created by constant() are rebindable via set_value(),
// and replay() recomputes every interior node through the same code path as the
// original recording, so replayed values are bit-identical.

enum class Op : uint8_t { Const, Add, Sub, Mul, Neg, Square, Tanh, Softplus, Max, Dot };

struct Operand {
    uint32_t bits = 0;
};

constexpr uint32_t kParamFlag = 0x80000000u;

inline bool is_param(Operand o) { return (o.bits & kParamFlag) != 0; }
inline uint32_t index_of(Operand o) { return o.bits & ~kParamFlag; }

template <class S>
class Tape {
public:
    Tape() = default;

    void bind(std::span<const double> params) { params_ = params; }

    static Operand param(uint32_t idx) { return Operand{idx | kParamFlag}; }

    Operand constant(const S& v) {
        const uint32_t id = push(Op::Const, 0, 0);
        vals_[id] = v;
        return Operand{id};
    }

    void set_value(Operand leaf, const S& v) {
        assert(!is_param(leaf) && ops_[index_of(leaf)] == Op::Const);
        vals_[index_of(leaf)] = v;
    }

    Operand add(Operand a, Operand b) { return record(Op::Add, a.bits, b.bits); }
    Operand sub(Operand a, Operand b) { return record(Op::Sub, a.bits, b.bits); }
    Operand mul(Operand a, Operand b) { return record(Op::Mul, a.bits, b.bits); }
    Operand neg(Operand a) { return record(Op::Neg, a.bits, 0); }
    Operand square(Operand a) { return record(Op::Square, a.bits, 0); }
    Operand tanh(Operand a) { return record(Op::Tanh, a.bits, 0); }
    Operand softplus(Operand a) { return record(Op::Softplus, a.bits, 0); }
    Operand max(Operand a, Operand b) { return record(Op::Max, a.bits, b.bits); }

    // y = sum_i a_i * b_i  (fused linear form; the workhorse for affine layers)
    Operand dot(std::span<const Operand> a, std::span<const Operand> b) {
        assert(a.size() == b.size());
        const uint32_t off = static_cast<uint32_t>(pool_.size());
        for (size_t i = 0; i < a.size(); ++i) {
            pool_.push_back(a[i].bits);
            pool_.push_back(b[i].bits);
        }
        const uint32_t id = push(Op::Dot, off, static_cast<uint32_t>(a.size()));
        compute(id);
        return Operand{id};
    }

    S value(Operand o) const { return fetch(o.bits); }

    size_t node_count() const { return ops_.size(); }

    // Recomputes every interior node from the current leaf/parameter values.
    void replay() {
        const uint32_t n = static_cast<uint32_t>(ops_.size());
        for (uint32_t i = 0; i < n; ++i)
            if (ops_[i] != Op::Const) compute(i);
    }

    // Reverse sweep from `root` seeded with the functional `seed`; parameter
    // derivatives accumulate into `grad` (indexed as the bound parameter vector).
    void reverse(Operand root, const S& seed, std::span<double> grad) {
        if (is_param(root)) {
            grad[index_of(root)] += value_of(seed);
            return;
        }
        const uint32_t r = index_of(root);
        if (!finite(vals_[r])) throw std::runtime_error("tape: non-finite value at reverse root");
        adj_.assign(ops_.size(), S{});
        touched_.assign(ops_.size(), 0);
        adj_[r] = seed;
        touched_[r] = 1;
        for (uint32_t i = r + 1; i-- > 0;) {
            if (!touched_[i]) continue;
            const S phi = adj_[i];
            switch (ops_[i]) {
                case Op::Const:
                    break;
                case Op::Add:
                    prop_unit(arg0_[i], phi, grad);
                    prop_unit(arg1_[i], phi, grad);
                    break;
                case Op::Sub:
                    prop_unit(arg0_[i], phi, grad);
                    prop_neg(arg1_[i], phi, grad);
                    break;
                case Op::Mul:
                    prop(arg0_[i], phi, fetch(arg1_[i]), grad);
                    prop(arg1_[i], phi, fetch(arg0_[i]), grad);
                    break;
                case Op::Neg:
                    prop_neg(arg0_[i], phi, grad);
                    break;
                case Op::Square:
                    prop(arg0_[i], phi, fetch(arg0_[i]) * 2.0, grad);
                    break;
                case Op::Tanh:
                    prop(arg0_[i], phi, tanh_deriv(fetch(arg0_[i])), grad);
                    break;
                case Op::Softplus:
                    prop(arg0_[i], phi, softplus_deriv(fetch(arg0_[i])), grad);
                    break;
                case Op::Max: {
                    const bool first = value_of(fetch(arg0_[i])) >= value_of(fetch(arg1_[i]));
                    prop_unit(first ? arg0_[i] : arg1_[i], phi, grad);
                    break;
                }
                case Op::Dot: {
                    const uint32_t off = arg0_[i], cnt = arg1_[i];
                    for (uint32_t k = 0; k < cnt; ++k) {
                        const uint32_t a = pool_[off + 2 * k], b = pool_[off + 2 * k + 1];
                        prop(a, phi, fetch(b), grad);
                        prop(b, phi, fetch(a), grad);
                    }
                    break;
                }
            }
        }
    }

    // d(root)/d(theta) for a plain scalar root (unit seed).
    void gradient(Operand root, std::span<double> grad) { reverse(root, from_value<S>(1.0), grad); }

    void clear() {
        ops_.clear();
        arg0_.clear();
        arg1_.clear();
        vals_.clear();
        pool_.clear();
    }

private:
    uint32_t push(Op op, uint32_t a0, uint32_t a1) {
        const uint32_t id = static_cast<uint32_t>(ops_.size());
        ops_.push_back(op);
        arg0_.push_back(a0);
        arg1_.push_back(a1);
        vals_.emplace_back();
        return id;
    }

    Operand record(Op op, uint32_t a0, uint32_t a1) {
        const uint32_t id = push(op, a0, a1);
        compute(id);
        return Operand{id};
    }

    S fetch(uint32_t bits) const {
        if (bits & kParamFlag) return from_value<S>(params_[bits & ~kParamFlag]);
        return vals_[bits];
    }

    void compute(uint32_t i) {
        switch (ops_[i]) {
            case Op::Const: break;
            case Op::Add: vals_[i] = fetch(arg0_[i]) + fetch(arg1_[i]); break;
            case Op::Sub: vals_[i] = fetch(arg0_[i]) - fetch(arg1_[i]); break;
            case Op::Mul: vals_[i] = fetch(arg0_[i]) * fetch(arg1_[i]); break;
            case Op::Neg: vals_[i] = -fetch(arg0_[i]); break;
            case Op::Square: {
                const S u = fetch(arg0_[i]);
                vals_[i] = u * u;
                break;
            }
            case Op::Tanh: vals_[i] = ad::tanh(fetch(arg0_[i])); break;
            case Op::Softplus: vals_[i] = ad::softplus(fetch(arg0_[i])); break;
            case Op::Max: vals_[i] = vmax(fetch(arg0_[i]), fetch(arg1_[i])); break;
            case Op::Dot: {
                const uint32_t off = arg0_[i], cnt = arg1_[i];
                S acc{};
                for (uint32_t k = 0; k < cnt; ++k)
                    acc += fetch(pool_[off + 2 * k]) * fetch(pool_[off + 2 * k + 1]);
                vals_[i] = acc;
                break;
            }
        }
    }

    void prop(uint32_t bits, const S& phi, const S& partial, std::span<double> grad) {
        if (bits & kParamFlag) {
            grad[bits & ~kParamFlag] += contract(phi, partial);
        } else {
            adj_[bits] += adj_mul(phi, partial);
            touched_[bits] = 1;
        }
    }

    void prop_unit(uint32_t bits, const S& phi, std::span<double> grad) {
        if (bits & kParamFlag) {
            grad[bits & ~kParamFlag] += value_of(phi);
        } else {
            adj_[bits] += phi;
            touched_[bits] = 1;
        }
    }

    void prop_neg(uint32_t bits, const S& phi, std::span<double> grad) {
        if (bits & kParamFlag) {
            grad[bits & ~kParamFlag] -= value_of(phi);
        } else {
            adj_[bits] -= phi;
            touched_[bits] = 1;
        }
    }

    std::span<const double> params_;
    std::vector<Op> ops_;
    std::vector<uint32_t> arg0_, arg1_;
    std::vector<S> vals_;
    std::vector<uint32_t> pool_;
    std::vector<S> adj_;
    std::vector<uint8_t> touched_;
};

}  // namespace tdgf::ad
