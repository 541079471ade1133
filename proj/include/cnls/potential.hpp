/// Symbolic potentials F(z_1,...,z_l) as finite term lists and the Wirtinger
/// calculus deriving the component nonlinearities f_k = dF/dzbar_k + conj(dF/dz_k).
///
/// Two kinds of terms are representable in a potential:
///   Monomial     c * prod_j z_j^{m_j} * zbar_j^{n_j}          (c complex)
///   ModulusTerm  c * prod_j |z_j|^{a_j}                       (c real, a_j real)
/// Modulus terms admit non-integer critical degrees (e.g. 10/3 at d = 5).
/// Derived nonlinearities live in the larger class of PolyTerms which may mix
/// integer powers of z_j, zbar_j with real powers of |z_j|.
#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cnls {

using Complex = std::complex<double>;

struct Monomial {
    Complex coeff{0.0, 0.0};
    std::vector<int> zpow;     // exponents on z_j
    std::vector<int> conjpow;  // exponents on zbar_j
    int degree() const;
};

struct ModulusTerm {
    double coeff = 0.0;
    std::vector<double> abspow;  // exponents on |z_j|; each 0 or >= 1
    double degree() const;
};

struct PotentialF {
    int ncomp = 0;
    std::vector<Monomial> monomials;
    std::vector<ModulusTerm> modulus_terms;

    bool empty() const { return monomials.empty() && modulus_terms.empty(); }
};

/// General term c * prod_j z_j^{m_j} zbar_j^{n_j} |z_j|^{a_j}.
struct PolyTerm {
    Complex coeff{0.0, 0.0};
    std::vector<int> zpow;
    std::vector<int> conjpow;
    std::vector<double> abspow;
};

using TermList = std::vector<PolyTerm>;

/// Closed form of one component nonlinearity f_k.
struct NonlinearTerm {
    int component = 1;  // 1-based index k
    TermList terms;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
    std::size_t position;
};

/// Parse an expression over z1..zl, zbar1..zbl, abs(zK) into a canonical
/// (sorted, like-terms-merged) potential. Throws ParseError on bad syntax,
/// out-of-range component indices, invalid exponents, terms that mix abs()
/// with z/zbar factors, or a potential with F(0) != 0.
PotentialF parse_potential(const std::string& text, int ncomp);

/// Canonical ASCII rendering; parse_potential(print_potential(F)) reproduces
/// the identical term list.
std::string print_potential(const PotentialF& F);

Complex eval_potential(const PotentialF& F, std::span<const Complex> z);
Complex eval_terms(const TermList& terms, std::span<const Complex> z);
Complex eval_fk(const NonlinearTerm& f, std::span<const Complex> z);

/// Wirtinger derivatives on term lists (k is 1-based). Exact term calculus:
///   d z^n / dz = n z^{n-1},  d zbar^n / dzbar = n zbar^{n-1},
///   d|z|^a/dz = (a/2)|z|^{a-2} zbar,  d|z|^a/dzbar = (a/2)|z|^{a-2} z.
TermList wirtinger_dz(const TermList& terms, int k);
TermList wirtinger_dzbar(const TermList& terms, int k);
TermList conjugate_terms(const TermList& terms);

/// Merge like terms and sort into canonical order; drops zero coefficients.
TermList canonicalize(TermList terms);

TermList terms_of(const PotentialF& F);

/// f_k = dF/dzbar_k + conj(dF/dz_k), 1 <= k <= ncomp.
NonlinearTerm derive_fk(const PotentialF& F, int k);
std::vector<NonlinearTerm> derive_all(const PotentialF& F);

}  // namespace cnls
