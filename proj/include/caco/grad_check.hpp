#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "caco/autodiff.hpp"

namespace caco {

struct GradCheckReport {
    double max_relative_error = 0.0;
    std::string worst_parameter;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    std::size_t checked = 0;
};

/// Builds the loss on a fresh graph. Must be deterministic across calls.
using LossBuilder = std::function<Var(Graph&)>;

/// Compares reverse-mode gradients of `loss` against central differences
/// (f(t + eps) - f(t - eps)) / (2 eps) for every scalar in `params`.
/// Relative error is |a - n| / max(|a|, |n|, 1e-8).
inline GradCheckReport grad_check(const LossBuilder& loss, std::span<Parameter* const> params, double eps = 1e-4) {
    zero_grads(params);
    {
        Graph g;
        g.backward(loss(g));
    }
    std::vector<Tensor> analytic;
    analytic.reserve(params.size());
    for (Parameter* p : params) analytic.push_back(p->grad);

    auto eval = [&] {
        Graph g;
        return loss(g).value().item();
    };

    GradCheckReport report;
    for (std::size_t k = 0; k < params.size(); ++k) {
        Parameter& p = *params[k];
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double saved = p.value[i];
            p.value[i] = saved + eps;
            const double up = eval();
            p.value[i] = saved - eps;
            const double down = eval();
            p.value[i] = saved;
            const double numeric = (up - down) / (2.0 * eps);
            const double a = analytic[k][i];
            const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
            ++report.checked;
            if (report.checked == 1 || rel > report.max_relative_error) {
                report.max_relative_error = rel;
                report.worst_parameter = p.name;
                report.worst_index = i;
                report.analytic = a;
                report.numeric = numeric;
            }
        }
    }
    zero_grads(params);
    return report;
}

} // namespace caco
