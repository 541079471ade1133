/// System parameters for the coupled Schrodinger system
///   i*alpha_k dt u_k + gamma_k Lap u_k - beta_k u_k = -f_k(u),  k = 1..l,
/// in the energy-critical regime on R^d.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cnls {

struct SystemParams {
    int d = 4;  // spatial dimension, 3 <= d <= 6
    int l = 1;  // number of components
    std::vector<double> alpha;  // alpha_k > 0
    std::vector<double> gamma;  // gamma_k > 0
    std::vector<double> beta;   // beta_k >= 0
    std::optional<std::vector<double>> sigma;  // sigma_k > 0 when present

    /// Nonlinearity power p = (d+2)/(d-2).
    double critical_power() const { return (d + 2.0) / (d - 2.0); }
    /// Potential degree q = 2d/(d-2).
    double critical_degree() const { return 2.0 * d / (d - 2.0); }

    void validate() const {
        if (d < 3 || d > 6) throw std::invalid_argument("SystemParams: d must be in [3,6]");
        if (l < 1) throw std::invalid_argument("SystemParams: l must be >= 1");
        auto check_len = [&](const std::vector<double>& v, const char* name) {
            if (static_cast<int>(v.size()) != l)
                throw std::invalid_argument(std::string("SystemParams: ") + name +
                                            " must have l entries");
        };
        check_len(alpha, "alpha");
        check_len(gamma, "gamma");
        check_len(beta, "beta");
        for (double a : alpha)
            if (!(a > 0)) throw std::invalid_argument("SystemParams: alpha_k must be > 0");
        for (double g : gamma)
            if (!(g > 0)) throw std::invalid_argument("SystemParams: gamma_k must be > 0");
        for (double b : beta)
            if (!(b >= 0)) throw std::invalid_argument("SystemParams: beta_k must be >= 0");
        if (sigma) {
            check_len(*sigma, "sigma");
            for (double s : *sigma)
                if (!(s > 0)) throw std::invalid_argument("SystemParams: sigma_k must be > 0");
        }
    }

    /// Effective sigma used for mass and pairing checks: declared values if
    /// present, otherwise the standing-wave default sigma_k = alpha_k/gamma_k.
    std::vector<double> sigma_or_default() const {
        if (sigma) return *sigma;
        std::vector<double> s(l);
        for (int k = 0; k < l; ++k) s[k] = alpha[k] / gamma[k];
        return s;
    }
};

}  // namespace cnls
