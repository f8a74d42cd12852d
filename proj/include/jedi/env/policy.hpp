#pragma once

#include <jedi/common.hpp>

#include <Eigen/Core>

#include <array>
#include <span>
#include <string>
#include <vector>

namespace jedi::env {

/// Fixed-architecture MLP: rectifier hidden layers, tanh output.
/// Genome layout, layer by layer: weights row-major as (out x in), then biases.
struct PolicySpec {
    int input_dim = 5;
    std::vector<int> hidden_layers = {8};
    int output_dim = 2;

    std::vector<int> widths() const
    {
        std::vector<int> w;
        w.push_back(input_dim);
        w.insert(w.end(), hidden_layers.begin(), hidden_layers.end());
        w.push_back(output_dim);
        return w;
    }

    Eigen::Index genome_length() const
    {
        auto w = widths();
        Eigen::Index total = 0;
        for (std::size_t l = 0; l + 1 < w.size(); ++l)
            total += static_cast<Eigen::Index>(w[l]) * w[l + 1] + w[l + 1];
        return total;
    }
};

/// Weights unpacked once per genome; forward() allocates nothing.
class Policy {
public:
    using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    Policy(const Genome& genome, const PolicySpec& spec)
    {
        if (genome.size() != spec.genome_length())
            throw ConfigError("policy genome has length " + std::to_string(genome.size()) + ", expected "
                              + std::to_string(spec.genome_length()));
        auto w = spec.widths();
        Eigen::Index offset = 0;
        for (std::size_t l = 0; l + 1 < w.size(); ++l) {
            const int in = w[l], out = w[l + 1];
            weights_.emplace_back(Eigen::Map<const RowMatrix>(genome.data() + offset, out, in));
            offset += static_cast<Eigen::Index>(in) * out;
            biases_.emplace_back(genome.segment(offset, out));
            offset += out;
            activations_.emplace_back(out);
        }
    }

    const Eigen::VectorXd& forward(const Eigen::Ref<const Eigen::VectorXd>& input)
    {
        const std::size_t layers = weights_.size();
        for (std::size_t l = 0; l < layers; ++l) {
            auto& a = activations_[l];
            if (l == 0)
                a.noalias() = weights_[l] * input;
            else
                a.noalias() = weights_[l] * activations_[l - 1];
            a += biases_[l];
            if (l + 1 < layers)
                a = a.cwiseMax(0.0);
            else
                a = a.array().tanh();
        }
        return activations_.back();
    }

private:
    std::vector<RowMatrix> weights_;
    std::vector<Eigen::VectorXd> biases_;
    std::vector<Eigen::VectorXd> activations_;
};

inline Eigen::VectorXd policy_forward(const Genome& genome, const Eigen::VectorXd& obs, const PolicySpec& spec)
{
    if (obs.size() != spec.input_dim)
        throw ConfigError("observation has " + std::to_string(obs.size()) + " inputs, expected "
                          + std::to_string(spec.input_dim));
    Policy policy(genome, spec);
    return policy.forward(obs);
}

} // namespace jedi::env
