#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "roselora/matrix.hpp"

namespace roselora {

// Column-wise stable softmax for logits laid out [classes x batch].
inline Matrix softmax_columns(const Matrix& logits) {
    Matrix p(logits.rows(), logits.cols());
    for (std::size_t j = 0; j < logits.cols(); ++j) {
        double mx = logits(0, j);
        for (std::size_t i = 1; i < logits.rows(); ++i) {
            mx = std::max(mx, logits(i, j));
        }
        double denom = 0.0;
        for (std::size_t i = 0; i < logits.rows(); ++i) {
            p(i, j) = std::exp(logits(i, j) - mx);
            denom += p(i, j);
        }
        for (std::size_t i = 0; i < logits.rows(); ++i) {
            p(i, j) /= denom;
        }
    }
    return p;
}

using NodeId = std::size_t;

// Eager tape: values are computed at node creation, backward walks the tape
// in reverse. Op set is fixed: matmul, add, scale, relu, mask multiply and
// softmax cross-entropy; everything the harness models need composes from
// these.
class Graph {
public:
    NodeId leaf(Matrix m) { return push(Op::Leaf, npos, npos, std::move(m)); }

    NodeId constant(Matrix m) { return push(Op::Constant, npos, npos, std::move(m)); }

    NodeId matmul(NodeId a, NodeId b) {
        return push(Op::MatMul, a, b, roselora::matmul(value(a), value(b)));
    }

    NodeId add(NodeId a, NodeId b) {
        return push(Op::Add, a, b, roselora::add(value(a), value(b)));
    }

    NodeId scale(NodeId a, double s) {
        NodeId id = push(Op::Scale, a, npos, roselora::scale(value(a), s));
        nodes_[id].scalar = s;
        return id;
    }

    NodeId relu(NodeId a) { return push(Op::Relu, a, npos, roselora::relu(value(a))); }

    // Entrywise multiply by a constant 0/1 mask.
    NodeId mask_apply(NodeId a, Matrix mask) {
        Matrix v = hadamard(value(a), mask);
        NodeId id = push(Op::MaskApply, a, npos, std::move(v));
        nodes_[id].mask = std::move(mask);
        return id;
    }

    // Mean cross-entropy over batch columns; logits are [classes x batch].
    NodeId softmax_cross_entropy(NodeId logits, std::vector<std::size_t> targets) {
        const Matrix& z = value(logits);
        if (targets.size() != z.cols()) {
            throw ShapeError("softmax_cross_entropy: " + std::to_string(targets.size()) +
                             " targets for " + z.shape_str() + " logits");
        }
        for (std::size_t t : targets) {
            if (t >= z.rows()) {
                throw ContractError("softmax_cross_entropy: target class out of range");
            }
        }
        Matrix p = softmax_columns(z);
        double loss = 0.0;
        for (std::size_t j = 0; j < z.cols(); ++j) {
            loss += -std::log(p(targets[j], j));
        }
        loss /= static_cast<double>(z.cols());
        Matrix out(1, 1);
        out(0, 0) = loss;
        NodeId id = push(Op::SoftmaxCE, logits, npos, std::move(out));
        nodes_[id].probs = std::move(p);
        nodes_[id].targets = std::move(targets);
        return id;
    }

    const Matrix& value(NodeId id) const { return nodes_[id].value; }

    const Matrix& grad(NodeId id) const { return nodes_[id].grad; }

    void backward(NodeId out) {
        const Matrix& v = value(out);
        if (v.rows() != 1 || v.cols() != 1) {
            throw ContractError("backward requires a scalar output, got " + v.shape_str());
        }
        for (auto& n : nodes_) {
            n.grad = Matrix::zeros(n.value.rows(), n.value.cols());
        }
        nodes_[out].grad(0, 0) = 1.0;
        for (std::size_t i = out + 1; i-- > 0;) {
            propagate(i);
        }
    }

private:
    enum class Op { Leaf, Constant, MatMul, Add, Scale, Relu, MaskApply, SoftmaxCE };
    static constexpr NodeId npos = static_cast<NodeId>(-1);

    struct Node {
        Op op;
        NodeId in0, in1;
        Matrix value;
        Matrix grad;
        double scalar = 0.0;
        Matrix mask;                       // MaskApply only
        Matrix probs;                      // SoftmaxCE only
        std::vector<std::size_t> targets;  // SoftmaxCE only
    };

    NodeId push(Op op, NodeId in0, NodeId in1, Matrix value) {
        nodes_.push_back(Node{op, in0, in1, std::move(value), Matrix{}, 0.0, Matrix{}, Matrix{}, {}});
        return nodes_.size() - 1;
    }

    void accumulate(NodeId target, const Matrix& g) {
        Matrix& dst = nodes_[target].grad;
        for (std::size_t i = 0; i < dst.size(); ++i) dst.at(i) += g.at(i);
    }

    void propagate(NodeId id) {
        Node& n = nodes_[id];
        const Matrix& g = n.grad;
        switch (n.op) {
            case Op::Leaf:
            case Op::Constant:
                break;
            case Op::MatMul:
                accumulate(n.in0, roselora::matmul(g, nodes_[n.in1].value.transposed()));
                accumulate(n.in1, roselora::matmul(nodes_[n.in0].value.transposed(), g));
                break;
            case Op::Add:
                accumulate(n.in0, g);
                accumulate(n.in1, g);
                break;
            case Op::Scale:
                accumulate(n.in0, roselora::scale(g, n.scalar));
                break;
            case Op::Relu: {
                Matrix gi = g;
                const Matrix& x = nodes_[n.in0].value;
                for (std::size_t i = 0; i < gi.size(); ++i) {
                    if (x.at(i) <= 0.0) gi.at(i) = 0.0;
                }
                accumulate(n.in0, gi);
                break;
            }
            case Op::MaskApply:
                accumulate(n.in0, hadamard(g, n.mask));
                break;
            case Op::SoftmaxCE: {
                const double gout = g(0, 0);
                const double inv_n = 1.0 / static_cast<double>(n.probs.cols());
                Matrix gi = n.probs;
                for (std::size_t j = 0; j < gi.cols(); ++j) {
                    gi(n.targets[j], j) -= 1.0;
                    for (std::size_t i = 0; i < gi.rows(); ++i) {
                        gi(i, j) *= gout * inv_n;
                    }
                }
                accumulate(n.in0, gi);
                break;
            }
        }
    }

    std::vector<Node> nodes_;
};

// Central-difference gradient estimate, the test oracle for backward().
inline Matrix finite_diff_grad(const std::function<double(const Matrix&)>& f,
                               const Matrix& x, double eps) {
    if (!(eps > 0.0)) {
        throw ContractError("finite_diff_grad requires eps > 0");
    }
    Matrix g(x.rows(), x.cols());
    Matrix probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = probe.at(i);
        probe.at(i) = orig + eps;
        const double fp = f(probe);
        probe.at(i) = orig - eps;
        const double fm = f(probe);
        probe.at(i) = orig;
        g.at(i) = (fp - fm) / (2.0 * eps);
    }
    return g;
}

} // namespace roselora
