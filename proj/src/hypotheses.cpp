#include "cnls/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cnls/rng.hpp"

namespace cnls {

namespace {

std::vector<Complex> to_complex(const std::vector<double>& y) {
    std::vector<Complex> z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) z[i] = Complex{y[i], 0.0};
    return z;
}

std::vector<Complex> abs_point(std::span<const Complex> z) {
    std::vector<Complex> a(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) a[i] = Complex{std::abs(z[i]), 0.0};
    return a;
}

}  // namespace

std::string to_string(CheckKind k) {
    switch (k) {
        case CheckKind::Proven: return "Proven";
        case CheckKind::SampledPass: return "SampledPass";
        case CheckKind::Failed: return "Failed";
        case CheckKind::NotCheckable: return "NotCheckable";
    }
    return "?";
}

bool is_critically_homogeneous(const PotentialF& F, int d) {
    // Monomial degrees are integers: (d-2)*deg == 2d exactly. Modulus degrees
    // are reals parsed from literals: compare within a fixed slack.
    for (const auto& m : F.monomials)
        if ((d - 2) * m.degree() != 2 * d) return false;
    const double q = 2.0 * d / (d - 2.0);
    for (const auto& m : F.modulus_terms)
        if (std::abs(m.degree() - q) > 1e-9) return false;
    return true;
}

double euler_identity_residual(const PotentialF& F, int d, std::span<const Complex> z) {
    const auto fks = derive_all(F);
    Complex pairing{0.0, 0.0};
    for (int k = 0; k < F.ncomp; ++k) pairing += eval_fk(fks[k], z) * std::conj(z[k]);
    const double lhs = pairing.real();
    const double rhs = (2.0 * d / (d - 2.0)) * eval_potential(F, z).real();
    return std::abs(lhs - rhs);
}

double homogeneity_residual(const PotentialF& F, int d, std::span<const Complex> z,
                            double lambda) {
    const auto fks = derive_all(F);
    const double p = (d + 2.0) / (d - 2.0);
    std::vector<Complex> lz(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) lz[i] = lambda * z[i];
    double worst = 0.0;
    for (int k = 0; k < F.ncomp; ++k) {
        const Complex a = eval_fk(fks[k], lz);
        const Complex b = std::pow(lambda, p) * eval_fk(fks[k], z);
        worst = std::max(worst, std::abs(a - b));
    }
    return worst;
}

ResonanceResult check_mass_resonance(const PotentialF& F, const SystemParams& params,
                                     int samples, std::uint64_t seed, double tol) {
    params.validate();
    const auto fks = derive_all(F);
    Rng rng(seed);
    ResonanceResult out;
    for (int s = 0; s < samples; ++s) {
        const auto z = rng.cgauss_vec(F.ncomp);
        Complex pairing{0.0, 0.0};
        for (int k = 0; k < F.ncomp; ++k)
            pairing += (params.alpha[k] / (2.0 * params.gamma[k])) * eval_fk(fks[k], z) *
                       std::conj(z[k]);
        const double res = std::abs(pairing.imag());
        if (res > out.max_residual) {
            out.max_residual = res;
            out.witness = z;
        }
    }
    out.resonant = out.max_residual <= tol;
    return out;
}

GaugeResult check_gauge(const PotentialF& F, const std::vector<double>& sigma,
                        int samples, std::uint64_t seed) {
    if (static_cast<int>(sigma.size()) != F.ncomp)
        throw std::invalid_argument("check_gauge: sigma must have one entry per component");
    const auto fks = derive_all(F);
    Rng rng(seed);
    GaugeResult out;
    for (int s = 0; s < samples; ++s) {
        const auto z = rng.cgauss_vec(F.ncomp);
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        std::vector<Complex> rz(F.ncomp);
        for (int k = 0; k < F.ncomp; ++k)
            rz[k] = std::polar(1.0, 0.5 * sigma[k] * theta) * z[k];
        for (int k = 0; k < F.ncomp; ++k) {
            const Complex lhs = eval_fk(fks[k], rz);
            const Complex rhs = std::polar(1.0, 0.5 * sigma[k] * theta) * eval_fk(fks[k], z);
            const double res = std::abs(lhs - rhs);
            if (res > out.max_residual) {
                out.max_residual = res;
                out.witness = z;
                out.witness_theta = theta;
            }
        }
    }
    return out;
}

namespace {

/// H2 ingredient: max over k,m of |d/dz_m (f_k(z)-f_k(z'))| + |d/dzbar_m (...)|
/// divided by sum_j |z_j - z'_j|^{4/(d-2)}.
double h2_quotient(const std::vector<NonlinearTerm>& fks, int ncomp, int d,
                   std::span<const Complex> z, std::span<const Complex> zp) {
    double denom = 0.0;
    const double expo = 4.0 / (d - 2.0);
    for (int j = 0; j < ncomp; ++j) denom += std::pow(std::abs(z[j] - zp[j]), expo);
    if (denom == 0.0) return 0.0;
    double worst = 0.0;
    for (int k = 0; k < ncomp; ++k) {
        for (int m = 1; m <= ncomp; ++m) {
            const TermList dz = wirtinger_dz(fks[k].terms, m);
            const TermList dzb = wirtinger_dzbar(fks[k].terms, m);
            const double num = std::abs(eval_terms(dz, z) - eval_terms(dz, zp)) +
                               std::abs(eval_terms(dzb, z) - eval_terms(dzb, zp));
            worst = std::max(worst, num / denom);
        }
    }
    return worst;
}

}  // namespace

HypothesisReport check_hypotheses(const PotentialF& F, const SystemParams& params,
                                  int samples, std::uint64_t seed, double tol) {
    params.validate();
    if (samples < 1) throw std::invalid_argument("check_hypotheses: samples must be >= 1");
    if (!(tol > 0)) throw std::invalid_argument("check_hypotheses: tol must be > 0");
    if (params.l != F.ncomp)
        throw std::invalid_argument("check_hypotheses: params.l != F.ncomp");

    const int d = params.d;
    const int l = F.ncomp;
    const auto fks = derive_all(F);

    HypothesisReport rep;
    rep.samples = samples;
    rep.seed = seed;
    rep.tol = tol;

    // H1: exact evaluation of every f_k at 0.
    {
        std::vector<Complex> zero(l, Complex{0.0, 0.0});
        double worst = 0.0;
        for (int k = 0; k < l; ++k) worst = std::max(worst, std::abs(eval_fk(fks[k], zero)));
        auto& s = rep.hyp[0];
        if (worst == 0.0) {
            s.kind = CheckKind::Proven;
            s.note = "f_k(0) = 0 exactly";
        } else {
            s.kind = CheckKind::Failed;
            s.residual = worst;
            s.witness = zero;
        }
    }

    // H5: exact degree arithmetic.
    const bool h5 = is_critically_homogeneous(F, d);
    {
        auto& s = rep.hyp[4];
        if (h5) {
            s.kind = CheckKind::Proven;
            s.note = "all term degrees equal 2d/(d-2)";
        } else {
            s.kind = CheckKind::Failed;
            s.witness.assign(l, Complex{1.0, 0.0});
            std::vector<Complex> two(l, Complex{2.0, 0.0});
            const double q = 2.0 * d / (d - 2.0);
            s.residual = std::abs(eval_potential(F, two) -
                                  std::pow(2.0, q) * eval_potential(F, s.witness));
            s.note = "term degree differs from 2d/(d-2)";
        }
    }

    // H3: nonlinearities are derived from F by construction.
    rep.hyp[2].kind = CheckKind::Proven;
    rep.hyp[2].note = "f_k derived from the declared potential";

    // H2: difference-quotient bound. A finite homogeneous term list satisfies
    // it by scaling; otherwise report the sampled quotient.
    {
        auto& s = rep.hyp[1];
        if (h5) {
            s.kind = CheckKind::Proven;
            s.note = "term-list class with critical homogeneity";
        } else {
            Rng rng(seed + 2);
            double worst = 0.0;
            for (int i = 0; i < samples; ++i) {
                const auto z = rng.cgauss_vec(l);
                const auto zp = rng.cgauss_vec(l);
                worst = std::max(worst, h2_quotient(fks, l, d, z, zp));
            }
            s.kind = CheckKind::SampledPass;
            s.residual = worst;
            s.note = "max sampled quotient; no certified constant";
        }
    }

    // H4: sigma-weighted pairing real. Falls back to sigma_k = alpha_k/gamma_k.
    const bool sigma_declared = params.sigma.has_value();
    {
        auto& s = rep.hyp[3];
        const std::vector<double> sig = params.sigma_or_default();
        Rng rng(seed + 4);
        double worst = 0.0;
        std::vector<Complex> wit;
        for (int i = 0; i < samples; ++i) {
            const auto z = rng.cgauss_vec(l);
            Complex pairing{0.0, 0.0};
            for (int k = 0; k < l; ++k)
                pairing += sig[k] * eval_fk(fks[k], z) * std::conj(z[k]);
            const double res = std::abs(pairing.imag());
            if (res > worst) {
                worst = res;
                wit = z;
            }
        }
        if (worst <= tol) {
            s.kind = CheckKind::SampledPass;
            s.residual = worst;
            if (!sigma_declared) s.note = "sigma defaulted to alpha_k/gamma_k";
        } else if (sigma_declared) {
            s.kind = CheckKind::Failed;
            s.residual = worst;
            s.witness = wit;
        } else {
            s.kind = CheckKind::NotCheckable;
            s.residual = worst;
            s.note = "no sigma declared and the default alpha_k/gamma_k fails";
        }
    }
    const bool h4_ok = rep.passed(rep.hyp[3]);

    // H6: pointwise sufficient condition |Re F(z)| <= Re F(|z|). The paper-level
    // condition is integral; this implies it.
    {
        auto& s = rep.hyp[5];
        Rng rng(seed + 6);
        double worst = 0.0;
        std::vector<Complex> wit;
        for (int i = 0; i < samples; ++i) {
            const auto z = rng.cgauss_vec(l);
            const auto az = abs_point(z);
            const double lhs = std::abs(eval_potential(F, z).real());
            const double rhs = eval_potential(F, az).real();
            const double res = lhs - rhs;
            if (res > worst) {
                worst = res;
                wit = z;
            }
        }
        s.note = "pointwise sufficient condition";
        if (worst <= tol) {
            s.kind = CheckKind::SampledPass;
            s.residual = std::max(worst, 0.0);
        } else {
            s.kind = CheckKind::Failed;
            s.residual = worst;
            s.witness = wit;
        }
    }

    // H7: F real on R^l; f_k >= 0 on the positive cone.
    {
        auto& s = rep.hyp[6];
        Rng rng(seed + 7);
        double worst = 0.0;
        std::vector<Complex> wit;
        bool failed = false;
        for (int i = 0; i < samples; ++i) {
            const auto y = to_complex(rng.normal_vec(l));
            const double im = std::abs(eval_potential(F, y).imag());
            if (im > worst) {
                worst = im;
                wit = y;
                failed = im > tol;
            }
            std::vector<Complex> pos(l);
            for (int k = 0; k < l; ++k) pos[k] = Complex{std::abs(y[k].real()), 0.0};
            for (int k = 0; k < l; ++k) {
                const Complex fv = eval_fk(fks[k], pos);
                const double viol = std::max(std::abs(fv.imag()), -fv.real());
                if (viol > worst) {
                    worst = viol;
                    wit = pos;
                    failed = viol > tol;
                }
            }
        }
        if (!failed) {
            s.kind = CheckKind::SampledPass;
            s.residual = worst;
        } else {
            s.kind = CheckKind::Failed;
            s.residual = worst;
            s.witness = wit;
        }
    }

    // H8: sampled super-modularity of the summed F on the positive cone.
    {
        auto& s = rep.hyp[7];
        if (l == 1) {
            s.kind = CheckKind::Proven;
            s.note = "vacuous for a single component";
        } else {
            Rng rng(seed + 8);
            double worst = 0.0;
            std::vector<Complex> wit;
            for (int i = 0; i < samples; ++i) {
                std::vector<Complex> y(l);
                for (int k = 0; k < l; ++k) y[k] = Complex{std::abs(rng.normal()), 0.0};
                int a = static_cast<int>(rng.uniform() * l) % l;
                int b = static_cast<int>(rng.uniform() * l) % l;
                if (a == b) b = (b + 1) % l;
                const double hh = std::abs(rng.normal());
                const double kk = std::abs(rng.normal());
                auto ya = y, yb = y, yab = y;
                ya[a] += hh;
                yb[b] += kk;
                yab[a] += hh;
                yab[b] += kk;
                const double diff = eval_potential(F, yab).real() +
                                    eval_potential(F, y).real() -
                                    eval_potential(F, ya).real() -
                                    eval_potential(F, yb).real();
                if (-diff > worst) {
                    worst = -diff;
                    wit = yab;
                }
            }
            s.note = "summed inequality sampled; decomposition not reconstructed";
            if (worst <= tol) {
                s.kind = CheckKind::SampledPass;
                s.residual = worst;
            } else {
                s.kind = CheckKind::Failed;
                s.residual = worst;
                s.witness = wit;
            }
        }
    }

    // Gauge condition, with the effective sigma when H4 holds for it.
    {
        auto& s = rep.gauge;
        if (sigma_declared || h4_ok) {
            const GaugeResult g = check_gauge(F, params.sigma_or_default(), samples, seed + 9);
            s.residual = g.max_residual;
            if (g.max_residual <= tol) {
                s.kind = CheckKind::SampledPass;
                if (!sigma_declared) s.note = "sigma defaulted to alpha_k/gamma_k";
            } else {
                s.kind = CheckKind::Failed;
                s.witness = g.witness;
            }
        } else {
            s.kind = CheckKind::NotCheckable;
            s.note = "no usable sigma";
        }
    }

    // Mass-resonance classification.
    {
        const ResonanceResult r = check_mass_resonance(F, params, samples, seed + 10, tol);
        rep.mass_resonant = r.resonant;
        auto& s = rep.mass_resonance;
        s.residual = r.max_residual;
        if (r.resonant) {
            s.kind = CheckKind::SampledPass;
        } else {
            s.kind = CheckKind::Failed;
            s.witness = r.witness;
        }
    }

    return rep;
}

}  // namespace cnls
