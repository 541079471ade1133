/// Machine-checking of the structural hypotheses a declared potential must
/// satisfy: exact checks where decidable (degree arithmetic, evaluation at 0),
/// seeded randomized identity testing elsewhere. Failed checks always carry a
/// witness point reproducible from the recorded seed.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cnls/params.hpp"
#include "cnls/potential.hpp"

namespace cnls {

enum class CheckKind { Proven, SampledPass, Failed, NotCheckable };

std::string to_string(CheckKind k);

struct CheckStatus {
    CheckKind kind = CheckKind::NotCheckable;
    double residual = 0.0;                 // max |residual| seen (SampledPass/Failed)
    std::vector<Complex> witness;          // point realizing a failure
    std::string note;
};

/// Indices into HypothesisReport::hyp. Meaning:
///   H1 f_k(0) = 0                         H5 F homogeneous of degree 2d/(d-2)
///   H2 Holder bound on derivative diffs   H6 |Re F(z)| dominated by F(|z|)
///   H3 f_k derive from a potential F      H7 F real and f_k >= 0 on the real cone
///   H4 sigma-weighted pairing is real     H8 super-modularity on the positive cone
struct HypothesisReport {
    std::array<CheckStatus, 8> hyp;
    CheckStatus gauge;
    CheckStatus mass_resonance;
    bool mass_resonant = false;
    int samples = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;

    const CheckStatus& operator[](int i) const { return hyp.at(i - 1); }  // 1-based
    bool passed(const CheckStatus& s) const {
        return s.kind == CheckKind::Proven || s.kind == CheckKind::SampledPass;
    }
};

struct ResonanceResult {
    bool resonant = false;
    double max_residual = 0.0;
    std::vector<Complex> witness;  // point of largest residual
};

struct GaugeResult {
    double max_residual = 0.0;
    std::vector<Complex> witness;
    double witness_theta = 0.0;
};

inline constexpr int kDefaultSamples = 10000;
inline constexpr double kDefaultTol = 1e-10;

HypothesisReport check_hypotheses(const PotentialF& F, const SystemParams& params,
                                  int samples = kDefaultSamples,
                                  std::uint64_t seed = 20240915ull,
                                  double tol = kDefaultTol);

/// Samples Im sum_k (alpha_k / 2 gamma_k) f_k(z) conj(z_k) at seeded complex
/// Gaussian points; resonant iff the largest residual stays within tol.
ResonanceResult check_mass_resonance(const PotentialF& F, const SystemParams& params,
                                     int samples = kDefaultSamples,
                                     std::uint64_t seed = 20240915ull,
                                     double tol = kDefaultTol);

/// Samples |f_k(e^{i sigma_1 th/2} z_1, ...) - e^{i sigma_k th/2} f_k(z)| over
/// random (z, theta); returns the maximum.
GaugeResult check_gauge(const PotentialF& F, const std::vector<double>& sigma,
                        int samples = kDefaultSamples, std::uint64_t seed = 20240915ull);

/// |Re sum_k f_k(z) conj(z_k) - (2d/(d-2)) Re F(z)|.
double euler_identity_residual(const PotentialF& F, int d, std::span<const Complex> z);

/// |f_k(lambda z) - lambda^{(d+2)/(d-2)} f_k(z)| maximized over components.
double homogeneity_residual(const PotentialF& F, int d, std::span<const Complex> z,
                            double lambda);

/// Exact degree check: every term has degree 2d/(d-2).
bool is_critically_homogeneous(const PotentialF& F, int d);

}  // namespace cnls
