#pragma once

#include <functional>
#include <vector>

namespace sobolev {

struct NelderMeadOptions {
    double f_tol = 1e-10;  // spread of simplex values, relative to max(f_floor, |f_best|)
    double f_floor = 1.0;
    double x_tol = 1e-8;   // simplex diameter (max-norm)
    int max_evals = 10000;
    std::vector<double> step;  // initial simplex edge per coordinate (default 0.1)
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    int evals = 0;
    int iterations = 0;
    double diameter = 0.0;
    bool converged = false;
};

using Objective = std::function<double(const std::vector<double>&)>;

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opt = {});

}  // namespace sobolev
