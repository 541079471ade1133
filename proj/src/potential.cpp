#include "cnls/potential.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <tuple>

namespace cnls {

namespace {

Complex pow_int(Complex z, int n) {
    Complex r{1.0, 0.0};
    while (n > 0) {
        if (n & 1) r *= z;
        z *= z;
        n >>= 1;
    }
    return r;
}

double powi(double x, int n) {
    double r = 1.0;
    bool inv = n < 0;
    unsigned e = inv ? -n : n;
    while (e > 0) {
        if (e & 1) r *= x;
        x *= x;
        e >>= 1;
    }
    return inv ? 1.0 / r : r;
}

/// One factor z^m zbar^n |z|^a with the continuous extension at z = 0:
/// the net power m + n + a decides the limit. Integer modulus exponents take
/// the multiplicative fast path.
Complex eval_factor(Complex z, int m, int n, double a) {
    if (z == Complex{0.0, 0.0}) {
        const double net = m + n + a;
        if (net > 0.0) return {0.0, 0.0};
        if (net == 0.0) return {1.0, 0.0};
        throw std::domain_error("term has a negative net power at z = 0");
    }
    Complex v = pow_int(z, m) * pow_int(std::conj(z), n);
    if (a != 0.0) {
        const int ai = static_cast<int>(a);
        if (a == static_cast<double>(ai) && ai >= -16 && ai <= 16) {
            if (ai % 2 == 0)
                v *= powi(std::norm(z), ai / 2);
            else
                v *= powi(std::abs(z), ai);
        } else {
            v *= std::pow(std::abs(z), a);
        }
    }
    return v;
}

Complex eval_poly_term(const PolyTerm& t, std::span<const Complex> z) {
    Complex v = t.coeff;
    for (std::size_t j = 0; j < z.size(); ++j) {
        const int m = t.zpow[j], n = t.conjpow[j];
        const double a = t.abspow[j];
        if (m == 0 && n == 0 && a == 0.0) continue;
        v *= eval_factor(z[j], m, n, a);
        if (v == Complex{0.0, 0.0}) return v;
    }
    return v;
}

bool term_key_less(const PolyTerm& x, const PolyTerm& y) {
    if (x.zpow != y.zpow) return x.zpow < y.zpow;
    if (x.conjpow != y.conjpow) return x.conjpow < y.conjpow;
    return x.abspow < y.abspow;
}

bool term_key_equal(const PolyTerm& x, const PolyTerm& y) {
    return x.zpow == y.zpow && x.conjpow == y.conjpow && x.abspow == y.abspow;
}

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string fmt_coeff(Complex c) {
    if (c.imag() == 0.0) {
        if (c.real() < 0.0) return "(" + fmt_double(c.real()) + ")";
        return fmt_double(c.real());
    }
    std::string s = "(" + fmt_double(c.real());
    s += c.imag() < 0.0 ? " - " : " + ";
    s += fmt_double(std::abs(c.imag())) + "*i)";
    return s;
}

}  // namespace

int Monomial::degree() const {
    int s = 0;
    for (int m : zpow) s += m;
    for (int n : conjpow) s += n;
    return s;
}

double ModulusTerm::degree() const {
    double s = 0;
    for (double a : abspow) s += a;
    return s;
}

Complex eval_terms(const TermList& terms, std::span<const Complex> z) {
    Complex s{0.0, 0.0};
    for (const auto& t : terms) s += eval_poly_term(t, z);
    return s;
}

TermList terms_of(const PotentialF& F) {
    TermList out;
    out.reserve(F.monomials.size() + F.modulus_terms.size());
    for (const auto& m : F.monomials) {
        PolyTerm t;
        t.coeff = m.coeff;
        t.zpow = m.zpow;
        t.conjpow = m.conjpow;
        t.abspow.assign(F.ncomp, 0.0);
        out.push_back(std::move(t));
    }
    for (const auto& m : F.modulus_terms) {
        PolyTerm t;
        t.coeff = Complex{m.coeff, 0.0};
        t.zpow.assign(F.ncomp, 0);
        t.conjpow.assign(F.ncomp, 0);
        t.abspow = m.abspow;
        out.push_back(std::move(t));
    }
    return out;
}

Complex eval_potential(const PotentialF& F, std::span<const Complex> z) {
    return eval_terms(terms_of(F), z);
}

Complex eval_fk(const NonlinearTerm& f, std::span<const Complex> z) {
    return eval_terms(f.terms, z);
}

TermList canonicalize(TermList terms) {
    std::sort(terms.begin(), terms.end(), term_key_less);
    TermList out;
    for (auto& t : terms) {
        if (!out.empty() && term_key_equal(out.back(), t)) {
            out.back().coeff += t.coeff;
        } else {
            out.push_back(std::move(t));
        }
    }
    std::erase_if(out, [](const PolyTerm& t) { return t.coeff == Complex{0.0, 0.0}; });
    return out;
}

TermList wirtinger_dz(const TermList& terms, int k) {
    const int j = k - 1;
    TermList out;
    for (const auto& t : terms) {
        if (t.zpow[j] > 0) {
            PolyTerm d = t;
            d.coeff *= static_cast<double>(t.zpow[j]);
            d.zpow[j] -= 1;
            out.push_back(std::move(d));
        }
        if (t.abspow[j] != 0.0) {
            // d|z|^a/dz = (a/2)|z|^{a-2} zbar
            PolyTerm d = t;
            d.coeff *= 0.5 * t.abspow[j];
            d.abspow[j] -= 2.0;
            d.conjpow[j] += 1;
            out.push_back(std::move(d));
        }
    }
    return canonicalize(std::move(out));
}

TermList wirtinger_dzbar(const TermList& terms, int k) {
    const int j = k - 1;
    TermList out;
    for (const auto& t : terms) {
        if (t.conjpow[j] > 0) {
            PolyTerm d = t;
            d.coeff *= static_cast<double>(t.conjpow[j]);
            d.conjpow[j] -= 1;
            out.push_back(std::move(d));
        }
        if (t.abspow[j] != 0.0) {
            // d|z|^a/dzbar = (a/2)|z|^{a-2} z
            PolyTerm d = t;
            d.coeff *= 0.5 * t.abspow[j];
            d.abspow[j] -= 2.0;
            d.zpow[j] += 1;
            out.push_back(std::move(d));
        }
    }
    return canonicalize(std::move(out));
}

TermList conjugate_terms(const TermList& terms) {
    TermList out = terms;
    for (auto& t : out) {
        t.coeff = std::conj(t.coeff);
        std::swap(t.zpow, t.conjpow);
    }
    return canonicalize(std::move(out));
}

NonlinearTerm derive_fk(const PotentialF& F, int k) {
    if (k < 1 || k > F.ncomp)
        throw std::invalid_argument("derive_fk: component index out of range");
    const TermList base = terms_of(F);
    TermList f = wirtinger_dzbar(base, k);
    TermList g = conjugate_terms(wirtinger_dz(base, k));
    f.insert(f.end(), g.begin(), g.end());
    NonlinearTerm out;
    out.component = k;
    out.terms = canonicalize(std::move(f));
    // a factor |z|^{a-2} z with a in [1,2) has a negative modulus exponent but
    // non-negative net power; nothing to clean up, eval_factor handles it.
    return out;
}

std::vector<NonlinearTerm> derive_all(const PotentialF& F) {
    std::vector<NonlinearTerm> out;
    out.reserve(F.ncomp);
    for (int k = 1; k <= F.ncomp; ++k) out.push_back(derive_fk(F, k));
    return out;
}

// ---------------------------------------------------------------------------
// Parser. Grammar (whitespace ignored):
//   expr   := ['-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := atom | number | 'i' | '(' expr ')'
//   atom   := ('z' INT | 'zbar' INT | 'abs(' 'z' INT ')') ['^' exponent]
//   number := NUM ['/' NUM]          (rational literal)
//   exponent: integer >= 1 for z/zbar; integer, decimal or rational >= 1 for abs
// ---------------------------------------------------------------------------

namespace {

struct LinearCombo {
    TermList terms;  // sum of general terms
};

class Parser {
  public:
    Parser(const std::string& text, int ncomp) : src_(text), ncomp_(ncomp) {}

    LinearCombo parse() {
        skip_ws();
        if (eof()) throw ParseError("empty expression", 0);
        LinearCombo e = parse_expr();
        skip_ws();
        if (!eof()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

  private:
    const std::string& src_;
    int ncomp_;
    std::size_t pos_ = 0;

    bool eof() const { return pos_ >= src_.size(); }
    char peek() const { return eof() ? '\0' : src_[pos_]; }
    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c, const char* what) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "' " + what, pos_);
    }

    LinearCombo parse_expr() {
        LinearCombo acc;
        bool negate = accept('-');
        LinearCombo t = parse_term();
        if (negate)
            for (auto& x : t.terms) x.coeff = -x.coeff;
        acc.terms = std::move(t.terms);
        for (;;) {
            skip_ws();
            if (accept('+')) {
                LinearCombo n = parse_term();
                acc.terms.insert(acc.terms.end(), n.terms.begin(), n.terms.end());
            } else if (accept('-')) {
                LinearCombo n = parse_term();
                for (auto& x : n.terms) x.coeff = -x.coeff;
                acc.terms.insert(acc.terms.end(), n.terms.begin(), n.terms.end());
            } else {
                break;
            }
        }
        return acc;
    }

    LinearCombo parse_term() {
        LinearCombo acc = parse_factor();
        for (;;) {
            skip_ws();
            if (accept('*')) {
                LinearCombo f = parse_factor();
                acc = multiply(acc, f);
            } else {
                break;
            }
        }
        return acc;
    }

    LinearCombo multiply(const LinearCombo& a, const LinearCombo& b) {
        LinearCombo out;
        for (const auto& x : a.terms) {
            for (const auto& y : b.terms) {
                PolyTerm t;
                t.coeff = x.coeff * y.coeff;
                t.zpow.resize(ncomp_);
                t.conjpow.resize(ncomp_);
                t.abspow.resize(ncomp_);
                for (int j = 0; j < ncomp_; ++j) {
                    t.zpow[j] = x.zpow[j] + y.zpow[j];
                    t.conjpow[j] = x.conjpow[j] + y.conjpow[j];
                    t.abspow[j] = x.abspow[j] + y.abspow[j];
                }
                out.terms.push_back(std::move(t));
            }
        }
        return out;
    }

    LinearCombo parse_factor() {
        skip_ws();
        if (eof()) throw ParseError("unexpected end of expression", pos_);
        const char c = peek();
        if (c == '(') {
            ++pos_;
            LinearCombo e = parse_expr();
            expect(')', "to close group");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return constant(Complex{parse_number(), 0.0});
        }
        if (c == 'i' && !starts_with_ident_tail(pos_ + 1)) {
            ++pos_;
            return constant(Complex{0.0, 1.0});
        }
        if (src_.compare(pos_, 4, "zbar") == 0) {
            pos_ += 4;
            const int k = parse_component_index();
            const int e = parse_int_exponent();
            PolyTerm t = unit_term();
            t.conjpow[k - 1] = e;
            return single(std::move(t));
        }
        if (src_.compare(pos_, 4, "abs(") == 0) {
            pos_ += 4;
            skip_ws();
            if (peek() != 'z') throw ParseError("expected zK inside abs()", pos_);
            ++pos_;
            const int k = parse_component_index();
            expect(')', "to close abs()");
            const double e = parse_real_exponent();
            PolyTerm t = unit_term();
            t.abspow[k - 1] = e;
            return single(std::move(t));
        }
        if (c == 'z') {
            ++pos_;
            const int k = parse_component_index();
            const int e = parse_int_exponent();
            PolyTerm t = unit_term();
            t.zpow[k - 1] = e;
            return single(std::move(t));
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    bool starts_with_ident_tail(std::size_t p) const {
        return p < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[p])));
    }

    PolyTerm unit_term() const {
        PolyTerm t;
        t.coeff = Complex{1.0, 0.0};
        t.zpow.assign(ncomp_, 0);
        t.conjpow.assign(ncomp_, 0);
        t.abspow.assign(ncomp_, 0.0);
        return t;
    }

    LinearCombo constant(Complex c) {
        PolyTerm t = unit_term();
        t.coeff = c;
        return single(std::move(t));
    }

    LinearCombo single(PolyTerm t) {
        LinearCombo out;
        out.terms.push_back(std::move(t));
        return out;
    }

    int parse_component_index() {
        skip_ws();
        if (!std::isdigit(static_cast<unsigned char>(peek())))
            throw ParseError("expected component index", pos_);
        long k = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            k = k * 10 + (src_[pos_] - '0');
            ++pos_;
            if (k > 1000) throw ParseError("component index too large", pos_);
        }
        if (k < 1 || k > ncomp_)
            throw ParseError("component index out of range 1.." + std::to_string(ncomp_),
                             pos_);
        return static_cast<int>(k);
    }

    /// Integer exponent after '^' for z/zbar atoms; defaults to 1.
    int parse_int_exponent() {
        skip_ws();
        if (!accept('^')) return 1;
        skip_ws();
        if (!std::isdigit(static_cast<unsigned char>(peek())))
            throw ParseError("expected integer exponent", pos_);
        long e = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            e = e * 10 + (src_[pos_] - '0');
            ++pos_;
            if (e > 1000) throw ParseError("exponent too large", pos_);
        }
        if (e < 1) throw ParseError("exponent must be >= 1", pos_);
        return static_cast<int>(e);
    }

    /// Real exponent after '^' for abs() atoms (integer, decimal or rational,
    /// optionally parenthesized); defaults to 1. Must be >= 1.
    double parse_real_exponent() {
        skip_ws();
        if (!accept('^')) return 1.0;
        const bool grouped = accept('(');
        const std::size_t at = pos_;
        const double e = parse_number();
        if (grouped) expect(')', "to close exponent");
        if (!(e >= 1.0)) throw ParseError("modulus exponent must be >= 1", at);
        return e;
    }

    /// Numeric literal: decimal, optionally followed by '/denominator'.
    double parse_number() {
        skip_ws();
        const std::size_t start = pos_;
        while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' ||
                          ((peek() == 'e' || peek() == 'E') && pos_ > start) ||
                          ((peek() == '+' || peek() == '-') && pos_ > start &&
                           (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E')))) {
            ++pos_;
        }
        if (pos_ == start) throw ParseError("expected number", pos_);
        double num = 0;
        try {
            num = std::stod(src_.substr(start, pos_ - start));
        } catch (const std::exception&) {
            throw ParseError("invalid numeric literal", start);
        }
        skip_ws();
        if (peek() == '/') {
            ++pos_;
            skip_ws();
            const std::size_t dstart = pos_;
            while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.'))
                ++pos_;
            if (pos_ == dstart) throw ParseError("expected denominator", pos_);
            double den = 0;
            try {
                den = std::stod(src_.substr(dstart, pos_ - dstart));
            } catch (const std::exception&) {
                throw ParseError("invalid denominator", dstart);
            }
            if (den == 0.0) throw ParseError("division by zero in rational literal", dstart);
            num /= den;
        }
        return num;
    }
};

bool all_zero(const std::vector<int>& v) {
    return std::all_of(v.begin(), v.end(), [](int x) { return x == 0; });
}
bool all_zero(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

}  // namespace

PotentialF parse_potential(const std::string& text, int ncomp) {
    if (ncomp < 1) throw std::invalid_argument("parse_potential: ncomp must be >= 1");
    Parser p(text, ncomp);
    TermList terms = canonicalize(p.parse().terms);

    PotentialF F;
    F.ncomp = ncomp;
    for (const auto& t : terms) {
        const bool has_abs = !all_zero(t.abspow);
        const bool has_z = !all_zero(t.zpow) || !all_zero(t.conjpow);
        if (has_abs && has_z)
            throw ParseError(
                "term mixes abs(z) factors with z/zbar factors; not representable "
                "as a potential term",
                0);
        if (!has_abs && !has_z)
            throw ParseError("constant term not allowed: F(0) must be 0", 0);
        for (double a : t.abspow)
            if (a != 0.0 && a < 1.0)
                throw ParseError("modulus exponent must be 0 or >= 1", 0);
        if (has_abs) {
            if (t.coeff.imag() != 0.0)
                throw ParseError("modulus term requires a real coefficient", 0);
            ModulusTerm m;
            m.coeff = t.coeff.real();
            m.abspow = t.abspow;
            F.modulus_terms.push_back(std::move(m));
        } else {
            Monomial m;
            m.coeff = t.coeff;
            m.zpow = t.zpow;
            m.conjpow = t.conjpow;
            F.monomials.push_back(std::move(m));
        }
    }
    if (F.empty()) throw ParseError("empty expression", 0);
    return F;
}

std::string print_potential(const PotentialF& F) {
    std::string out;
    auto append = [&out](const std::string& s) {
        if (!out.empty()) out += " + ";
        out += s;
    };
    for (const auto& m : F.monomials) {
        std::string s = fmt_coeff(m.coeff);
        for (std::size_t j = 0; j < m.zpow.size(); ++j) {
            if (m.zpow[j] > 0) {
                s += "*z" + std::to_string(j + 1);
                if (m.zpow[j] > 1) s += "^" + std::to_string(m.zpow[j]);
            }
            if (m.conjpow[j] > 0) {
                s += "*zbar" + std::to_string(j + 1);
                if (m.conjpow[j] > 1) s += "^" + std::to_string(m.conjpow[j]);
            }
        }
        append(s);
    }
    for (const auto& m : F.modulus_terms) {
        std::string s = m.coeff < 0.0 ? "(" + fmt_double(m.coeff) + ")" : fmt_double(m.coeff);
        for (std::size_t j = 0; j < m.abspow.size(); ++j) {
            if (m.abspow[j] != 0.0) {
                s += "*abs(z" + std::to_string(j + 1) + ")";
                if (m.abspow[j] != 1.0) s += "^" + fmt_double(m.abspow[j]);
            }
        }
        append(s);
    }
    return out;
}

}  // namespace cnls
