#include "chartwork/numeric.hpp"

#include <algorithm>
#include <charconv>
#include <string>

namespace chartwork {

Mat central_jacobian(const VecFn& f, const Vec& x, const Vec& steps) {
    Mat jac;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        Vec up = x;
        Vec down = x;
        up[k] += steps[k];
        down[k] -= steps[k];
        const Vec column = (f(up) - f(down)) / (2.0 * steps[k]);
        if (k == 0) {
            jac.resize(column.size(), x.size());
        }
        jac.col(k) = column;
    }
    return jac;
}

Vec central_gradient(const std::function<double(const Vec&)>& f, const Vec& x, const Vec& steps) {
    Vec g(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        Vec up = x;
        Vec down = x;
        up[k] += steps[k];
        down[k] -= steps[k];
        g[k] = (f(up) - f(down)) / (2.0 * steps[k]);
    }
    return g;
}

Vec scaled_steps(const Vec& x, double base) { return base * (Vec::Ones(x.size()) + x.cwiseAbs()); }

double relative_discrepancy(const Mat& a, const Mat& b) {
    return max_abs(Mat(a - b)) / std::max(1.0, max_abs(b));
}

std::string format_vec(const Vec& v) {
    std::string out = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof buf, v[i]);
        out.append(buf, res.ptr);
    }
    return out + ")";
}

}  // namespace chartwork
