// catalog.hpp - The multiphoton model families: two-mode scattering / frequency
// conversion, the multimode (m+1)-wave mixer and the n-photon Dicke model. Each is
// reduced to sector coordinates (l_0, l_i, J) plus the coefficients (a, g, C).

#pragma once

#include "sl2pd/algebra.hpp"
#include "sl2pd/errors.hpp"
#include "sl2pd/polynomial.hpp"
#include "sl2pd/rational.hpp"

#include <algorithm>
#include <complex>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sl2pd {

enum class Family { TwoMode, Multimode, Dicke, Custom };

inline std::string to_string(Family f) {
    switch (f) {
    case Family::TwoMode: return "two_mode";
    case Family::Multimode: return "multimode";
    case Family::Dicke: return "dicke";
    case Family::Custom: return "custom";
    }
    return "unknown";
}

// Explicit sector data for models outside the catalog.
struct CustomBundle {
    StructurePolynomial psi;
    Rational l0{0};
    Rational J{0};
    bool compact{true};
    int dim{1};
    double a{0.0};
    std::complex<double> g{0.0, 0.0};
    double c_shift{0.0};
};

struct ModelSpec {
    Family family{Family::Dicke};
    int m{1};
    int n{1};
    int n_atoms{1};
    std::vector<Scalar> omegas{};  // TwoMode: w1, w2; Multimode: w1..wm; Dicke: w1
    Scalar omega0{};               // Multimode pump mode
    Scalar epsilon{};              // Dicke level splitting
    std::complex<double> g_prime{0.0, 0.0};
    std::optional<CustomBundle> custom{};
};

struct SectorLabels {
    int kappa{0};               // TwoMode, Dicke
    int s{0};                   // TwoMode, Multimode
    std::vector<int> kappas{};  // Multimode
    Rational j{0};              // Dicke
};

inline void validate_model(const ModelSpec& model) {
    auto bad = [](const std::string& why) { fail(ErrorKind::ValidationError, why); };
    for (const Scalar& w : model.omegas)
        if (!std::isfinite(w.value)) bad("non-finite mode frequency");
    if (!std::isfinite(model.omega0.value) || !std::isfinite(model.epsilon.value)) bad("non-finite frequency");
    switch (model.family) {
    case Family::TwoMode:
        if (model.m < 1 || model.n < 0 || model.n > model.m) bad("two_mode requires 0 <= n <= m, m >= 1");
        if (model.omegas.size() != 2) bad("two_mode requires 2 frequencies");
        break;
    case Family::Multimode:
        if (model.m < 1 || model.n < 0 || model.n > model.m) bad("multimode requires 0 <= n <= m, m >= 1");
        if (model.omegas.size() != static_cast<std::size_t>(model.m)) bad("multimode requires m frequencies");
        break;
    case Family::Dicke:
        if (model.n < 1) bad("dicke requires n >= 1");
        if (model.n_atoms < 1) bad("dicke requires n_atoms >= 1");
        if (model.omegas.size() != 1) bad("dicke requires 1 field frequency");
        break;
    case Family::Custom:
        if (!model.custom) bad("custom family requires an explicit sector bundle");
        break;
    }
}

namespace detail {

inline Rational half(std::int64_t k) { return Rational(k, 2); }

// Multimode integrals l_1..l_m in the R_k labelling (R_k for k<m, R_m last).
inline std::vector<Rational> multimode_integrals(int m, int n, const std::vector<int>& kappas, int s) {
    std::vector<Rational> l(static_cast<std::size_t>(m) + 1, Rational(0));
    const Rational mn(m + n);
    std::int64_t sum = 0;
    for (int k : kappas) sum += k;
    for (int k = 1; k < m; ++k)
        l[static_cast<std::size_t>(k)] =
            Rational(kappas[static_cast<std::size_t>(k - 1)] - kappas[static_cast<std::size_t>(k)]) / mn;
    l[static_cast<std::size_t>(m)] = Rational(n * sum + static_cast<std::int64_t>(m) * s) / mn;
    return l;
}

// Constant part of n_i = V0 + c_i, inverted from the Jordan-Schwinger relations.
inline std::vector<Rational> multimode_offsets(int m, int n, const std::vector<Rational>& l) {
    const Rational mn(m + n);
    Rational weighted(0);
    for (int k = 1; k < m; ++k) weighted += Rational(k) * l[static_cast<std::size_t>(k)];
    const Rational base = (l[static_cast<std::size_t>(m)] - mn * weighted) / Rational(m);
    std::vector<Rational> c(static_cast<std::size_t>(m));
    for (int i = 1; i <= m; ++i) {
        Rational tail(0);
        for (int k = i; k < m; ++k) tail += l[static_cast<std::size_t>(k)];
        c[static_cast<std::size_t>(i - 1)] = base + mn * tail;
    }
    return c;
}

inline long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace detail

inline void validate_labels(const ModelSpec& model, const SectorLabels& lab) {
    auto bad = [](const std::string& why) { fail(ErrorKind::LabelMismatch, why); };
    switch (model.family) {
    case Family::TwoMode:
        if (lab.kappa < 0 || lab.kappa >= model.m) bad("two_mode requires 0 <= kappa < m");
        if (lab.s < 0) bad("two_mode requires s >= 0");
        break;
    case Family::Multimode: {
        if (lab.kappas.size() != static_cast<std::size_t>(model.m)) bad("multimode requires m kappa labels");
        if (lab.s < 0) bad("multimode requires s >= 0");
        bool has_zero = false;
        for (int k : lab.kappas) {
            if (k < 0) bad("multimode kappa labels must be nonnegative");
            has_zero = has_zero || k == 0;
        }
        if (!has_zero) bad("multimode requires prod kappa_i = 0");
        break;
    }
    case Family::Dicke: {
        if (lab.kappa < 0) bad("dicke requires kappa >= 0");
        const Rational twoj = lab.j * Rational(2);
        if (!is_integer(twoj) || lab.j < Rational(0)) bad("dicke requires half-integer j >= 0");
        if (twoj > Rational(model.n_atoms)) bad("dicke requires j <= N/2");
        if ((twoj.numerator() - model.n_atoms) % 2 != 0) bad("dicke requires 2j = N mod 2");
        break;
    }
    case Family::Custom: break;
    }
}

// Lowest weight l_0 of the sector generated by the lowest vector.
inline Rational lowest_weight(const ModelSpec& model, const SectorLabels& lab) {
    switch (model.family) {
    case Family::TwoMode: return Rational(lab.kappa - lab.s, model.m + model.n);
    case Family::Multimode: {
        std::int64_t sum = 0;
        for (int k : lab.kappas) sum += k;
        return Rational(sum - lab.s, model.m + model.n);
    }
    case Family::Dicke: return -lab.j;
    case Family::Custom: return model.custom->l0;
    }
    return Rational(0);
}

// Integrals of motion l_1, l_2, ... keyed by name.
inline std::map<std::string, Rational> integrals(const ModelSpec& model, const SectorLabels& lab) {
    std::map<std::string, Rational> out;
    switch (model.family) {
    case Family::TwoMode:
        out["l1"] = Rational(model.n * lab.kappa + model.m * lab.s, model.m + model.n);
        out["kappa"] = Rational(lab.kappa);
        out["s"] = Rational(lab.s);
        break;
    case Family::Multimode: {
        auto l = detail::multimode_integrals(model.m, model.n, lab.kappas, lab.s);
        for (int k = 1; k <= model.m; ++k) out["l" + std::to_string(k)] = l[static_cast<std::size_t>(k)];
        for (int i = 0; i < model.m; ++i)
            out["kappa" + std::to_string(i + 1)] = Rational(lab.kappas[static_cast<std::size_t>(i)]);
        out["s"] = Rational(lab.s);
        break;
    }
    case Family::Dicke:
        out["l1"] = Rational(lab.kappa) - Rational(model.n) * lab.j;
        out["kappa"] = Rational(lab.kappa);
        out["j"] = lab.j;
        break;
    case Family::Custom: break;
    }
    out["l0"] = lowest_weight(model, lab);
    return out;
}

// Psi(V0) expanded, with R_i replaced by sector eigenvalues.
inline StructurePolynomial build_psi(const ModelSpec& model, const SectorLabels& lab) {
    validate_model(model);
    validate_labels(model, lab);
    const int m = model.m;
    const int n = model.n;
    switch (model.family) {
    case Family::TwoMode: {
        // (m V0 + R1)^(m) (R1 - n V0 + n)^(n)
        const double l1 = to_double(integrals(model, lab).at("l1"));
        return StructurePolynomial(falling_power(m, l1, m) * falling_power(-n, l1 + n, n));
    }
    case Family::Multimode: {
        // [R_m - n V0 + n]^(n) ([R_m - (m+n) sum_i i R_i]/m + V0) N_1 ... N_{m-1}
        auto l = detail::multimode_integrals(m, n, lab.kappas, lab.s);
        auto c = detail::multimode_offsets(m, n, l);
        const double lm = to_double(l[static_cast<std::size_t>(m)]);
        Polynomial p = falling_power(-n, lm + n, n);
        for (int i = 0; i < m; ++i) p = p * Polynomial({to_double(c[static_cast<std::size_t>(i)]), 1.0});
        return StructurePolynomial(p);
    }
    case Family::Dicke: {
        // [j(j+1) - V0(V0-1)] [R1 - n V0 + n]^(n)
        const double j = to_double(lab.j);
        const double l1 = to_double(integrals(model, lab).at("l1"));
        const Polynomial casimir({j * (j + 1.0), 1.0, -1.0});
        return StructurePolynomial(casimir * falling_power(-n, l1 + n, n));
    }
    case Family::Custom: return model.custom->psi;
    }
    return StructurePolynomial();
}

// Exact roots of Psi (with multiplicity), read off the factored catalog form.
inline std::vector<Rational> psi_roots(const ModelSpec& model, const SectorLabels& lab) {
    std::vector<Rational> roots;
    const int m = model.m;
    const int n = model.n;
    auto n_part = [&](const Rational& l) {
        for (int i = 0; i < n; ++i) roots.push_back((l + Rational(n - i)) / Rational(n));
    };
    switch (model.family) {
    case Family::TwoMode: {
        const Rational l1 = integrals(model, lab).at("l1");
        for (int i = 0; i < m; ++i) roots.push_back((Rational(i) - l1) / Rational(m));
        n_part(l1);
        break;
    }
    case Family::Multimode: {
        auto l = detail::multimode_integrals(m, n, lab.kappas, lab.s);
        for (const Rational& c : detail::multimode_offsets(m, n, l)) roots.push_back(-c);
        n_part(l[static_cast<std::size_t>(m)]);
        break;
    }
    case Family::Dicke:
        roots.push_back(-lab.j);
        roots.push_back(lab.j + Rational(1));
        n_part(integrals(model, lab).at("l1"));
        break;
    case Family::Custom:
        fail(ErrorKind::InvalidArgument, "custom structure polynomials carry no exact roots");
    }
    return roots;
}

struct ReducedCoefficients {
    double a{0.0};
    std::optional<Rational> a_exact{};
    double c_shift{0.0};
    std::complex<double> g{0.0, 0.0};
};

// Inverts the number-operator relations: H0 = a V0 + C(R_i).
inline ReducedCoefficients reduce_coefficients(const ModelSpec& model, const SectorLabels& lab) {
    validate_model(model);
    validate_labels(model, lab);
    ReducedCoefficients out;
    out.g = model.g_prime;
    Scalar a;
    Scalar c;
    const int m = model.m;
    const int n = model.n;
    switch (model.family) {
    case Family::TwoMode: {
        // n1 = m V0 + R1, n2 = R1 - n V0
        const Rational l1 = integrals(model, lab).at("l1");
        a = static_cast<std::int64_t>(m) * model.omegas[0] - static_cast<std::int64_t>(n) * model.omegas[1];
        c = l1 * (model.omegas[0] + model.omegas[1]);
        break;
    }
    case Family::Multimode: {
        // n_i = V0 + c_i, n_0 = R_m - n V0
        auto l = detail::multimode_integrals(m, n, lab.kappas, lab.s);
        auto offs = detail::multimode_offsets(m, n, l);
        Scalar wsum(0);
        for (const Scalar& w : model.omegas) wsum = wsum + w;
        a = wsum - static_cast<std::int64_t>(n) * model.omega0;
        c = l[static_cast<std::size_t>(m)] * model.omega0;
        for (int i = 0; i < m; ++i)
            c = c + offs[static_cast<std::size_t>(i)] * model.omegas[static_cast<std::size_t>(i)];
        break;
    }
    case Family::Dicke: {
        // n_ph = R1 - n V0, sum sigma_0 / 2 = V0
        const Rational l1 = integrals(model, lab).at("l1");
        a = model.epsilon - static_cast<std::int64_t>(n) * model.omegas[0];
        c = l1 * model.omegas[0];
        break;
    }
    case Family::Custom:
        out.a = model.custom->a;
        out.c_shift = model.custom->c_shift;
        out.g = model.custom->g;
        return out;
    }
    out.a = a.exact ? to_double(*a.exact) : a.value;
    out.a_exact = a.exact;
    out.c_shift = c.exact ? to_double(*c.exact) : c.value;
    return out;
}

inline bool is_compact_family(const ModelSpec& model) {
    if (model.family == Family::Custom) return model.custom->compact;
    if (model.family == Family::Dicke) return true;
    return model.n >= 1;
}

// Number of ladder steps for compact families; the ladder ends where Psi(l0+v+1) = 0.
inline int compact_dimension(const ModelSpec& model, const SectorLabels& lab) {
    switch (model.family) {
    case Family::TwoMode:
    case Family::Multimode: return lab.s / model.n + 1;
    case Family::Dicke: {
        const std::int64_t twoj = (lab.j * Rational(2)).numerator();
        return static_cast<int>(std::min<std::int64_t>(twoj, lab.kappa / model.n)) + 1;
    }
    case Family::Custom: return model.custom->dim;
    }
    return 1;
}

// Admissible effective spins J > 0 of a noncompact sector: Phi is polynomial iff
// l0 - 2J + 1 is another root of Psi.
inline std::vector<Rational> noncompact_spins(const ModelSpec& model, const SectorLabels& lab) {
    auto roots = psi_roots(model, lab);
    const Rational l0 = lowest_weight(model, lab);
    auto it = std::find(roots.begin(), roots.end(), l0);
    if (it != roots.end()) roots.erase(it);
    std::set<Rational> spins;
    for (const Rational& r : roots) {
        const Rational J = (l0 + Rational(1) - r) / Rational(2);
        if (J > Rational(0)) spins.insert(J);
    }
    std::vector<Rational> admissible;
    const StructurePolynomial psi = build_psi(model, lab);
    for (const Rational& J : spins) {
        if (psi.degree() < 2) break;
        PhiPolynomial phi = phi_from_psi(psi, l0, J, false);
        bool ok = phi.poly().leading() > 0.0;
        for (int f = 0; f < 64 && ok; ++f) ok = phi(to_double(J) + f) >= -1e-10;
        if (ok) admissible.push_back(J);
    }
    return admissible;
}

inline std::string sector_id(const ModelSpec& model, const SectorLabels& lab) {
    std::string id = to_string(model.family) + "(";
    switch (model.family) {
    case Family::TwoMode: id += "kappa=" + std::to_string(lab.kappa) + ",s=" + std::to_string(lab.s); break;
    case Family::Multimode:
        id += "kappa=";
        for (std::size_t i = 0; i < lab.kappas.size(); ++i)
            id += (i ? ":" : "") + std::to_string(lab.kappas[i]);
        id += ",s=" + std::to_string(lab.s);
        break;
    case Family::Dicke: id += "kappa=" + std::to_string(lab.kappa) + ",j=" + to_string(lab.j); break;
    case Family::Custom: id += "explicit"; break;
    }
    return id + ")";
}

// Number of S_N-irreducible copies of atomic spin j among N two-level atoms.
inline long dicke_multiplicity(int n_atoms, const Rational& j) {
    const int k = static_cast<int>((Rational(n_atoms, 2) - j).numerator());
    return detail::binomial(n_atoms, k) - detail::binomial(n_atoms, k - 1);
}

struct CatalogSector {
    SectorLabels labels;
    Sector sector;
    StructurePolynomial psi;
};

// Assembles the sector(s) for one label tuple. Noncompact sectors yield one entry per
// admissible J (tagged Minus/Plus), or a single entry with J = 0 when Psi admits none.
inline std::vector<CatalogSector> make_sectors(const ModelSpec& model, const SectorLabels& lab,
                                               int truncation = 64) {
    validate_model(model);
    validate_labels(model, lab);
    const StructurePolynomial psi = build_psi(model, lab);
    const ReducedCoefficients rc = reduce_coefficients(model, lab);
    const GaugedCoupling gc = gauge_normalize(rc.a, rc.g);

    Sector base;
    base.id = sector_id(model, lab);
    base.labels = integrals(model, lab);
    base.lowest_weight = lowest_weight(model, lab);
    base.compact = is_compact_family(model);
    base.a = gc.a;
    base.g_mod = gc.g_mod;
    base.g_phase = gc.g_phase;
    base.c_shift = rc.c_shift;
    if (model.family == Family::Dicke) base.multiplicity = dicke_multiplicity(model.n_atoms, lab.j);

    std::vector<CatalogSector> out;
    if (base.compact) {
        base.dim = compact_dimension(model, lab);
        base.J = Rational(base.dim - 1, 2);
        out.push_back({lab, base, psi});
        return out;
    }
    base.dim = truncation;
    const auto spins = noncompact_spins(model, lab);
    if (spins.empty()) {
        base.J = Rational(0);
        out.push_back({lab, base, psi});
        return out;
    }
    for (std::size_t i = 0; i < spins.size(); ++i) {
        Sector s = base;
        s.J = spins[i];
        if (spins.size() > 1) {
            s.j_branch = i == 0 ? JBranch::Minus : JBranch::Plus;
            s.id += i == 0 ? "[J_minus]" : "[J_plus]";
        }
        out.push_back({lab, s, psi});
    }
    return out;
}

struct LabelBounds {
    int kappa_min{0}, kappa_max{0};
    int s_min{0}, s_max{0};
    Rational j_min{0}, j_max{0};
    int truncation{64};
};

// One sector per admissible label tuple inside the bounds.
inline std::vector<CatalogSector> enumerate_sectors(const ModelSpec& model, const LabelBounds& b) {
    validate_model(model);
    std::vector<CatalogSector> out;
    auto append = [&](const SectorLabels& lab) {
        for (auto& cs : make_sectors(model, lab, b.truncation)) out.push_back(std::move(cs));
    };
    switch (model.family) {
    case Family::TwoMode:
        for (int k = std::max(b.kappa_min, 0); k <= std::min(b.kappa_max, model.m - 1); ++k)
            for (int s = std::max(b.s_min, 0); s <= b.s_max; ++s) append({k, s, {}, Rational(0)});
        break;
    case Family::Multimode: {
        const int lo = std::max(b.kappa_min, 0);
        const int hi = b.kappa_max;
        if (hi < lo) break;
        std::vector<int> ks(static_cast<std::size_t>(model.m), lo);
        while (true) {
            if (std::find(ks.begin(), ks.end(), 0) != ks.end())
                for (int s = std::max(b.s_min, 0); s <= b.s_max; ++s) append({0, s, ks, Rational(0)});
            std::size_t i = 0;
            while (i < ks.size() && ks[i] == hi) ks[i++] = lo;
            if (i == ks.size()) break;
            ++ks[i];
        }
        break;
    }
    case Family::Dicke:
        for (int k = std::max(b.kappa_min, 0); k <= b.kappa_max; ++k)
            for (Rational j = b.j_min; j <= b.j_max; j += Rational(1)) {
                SectorLabels lab{k, 0, {}, j};
                const Rational twoj = j * Rational(2);
                if (j < Rational(0) || !is_integer(twoj) || twoj > Rational(model.n_atoms) ||
                    (twoj.numerator() - model.n_atoms) % 2 != 0)
                    continue;
                append(lab);
            }
        break;
    case Family::Custom: {
        const CustomBundle& cb = *model.custom;
        Sector s;
        s.id = "custom(explicit)";
        s.lowest_weight = cb.l0;
        s.J = cb.J;
        s.compact = cb.compact;
        s.dim = cb.dim;
        const GaugedCoupling gc = gauge_normalize(cb.a, cb.g);
        s.a = gc.a;
        s.g_mod = gc.g_mod;
        s.g_phase = gc.g_phase;
        s.c_shift = cb.c_shift;
        s.labels["l0"] = cb.l0;
        out.push_back({SectorLabels{}, s, cb.psi});
        break;
    }
    }
    return out;
}

// Closed-form Phi for the catalogued cases (n = 1 compact families, n = 0 with m = 3).
// J is only consulted for the noncompact (n = 0) formulas.
inline PhiPolynomial build_phi_catalog(const ModelSpec& model, const SectorLabels& lab,
                                       std::optional<Rational> J_choice = std::nullopt) {
    validate_model(model);
    validate_labels(model, lab);
    auto unsupported = [&]() -> PhiPolynomial {
        fail(ErrorKind::UnsupportedClosedForm, "no closed-form Phi for " + sector_id(model, lab));
    };
    auto exact_quotient = [](const Polynomial& num, const Polynomial& den) {
        auto [q, r] = divide(num, den);
        if (r.max_abs_coeff() > 1e-10 * std::max(1.0, num.max_abs_coeff()))
            fail(ErrorKind::NonzeroRemainder, "closed-form numerator not divisible");
        return PhiPolynomial(q);
    };
    const int m = model.m;
    if (model.n == 1 && model.family != Family::Custom) {
        const double J = static_cast<double>(compact_dimension(model, lab) - 1) / 2.0;
        switch (model.family) {
        case Family::TwoMode: {
            // (m Y0 + m J + m + kappa)^(m) / (J + 1 + Y0)
            const Polynomial num = falling_power(m, m * J + m + lab.kappa, m);
            return exact_quotient(num, Polynomial({J + 1.0, 1.0}));
        }
        case Family::Multimode: {
            // prod' (Y0 + J + kappa_i + 1), one kappa_i = 0 factor omitted
            Polynomial p({1.0});
            bool skipped = false;
            for (int k : lab.kappas) {
                if (k == 0 && !skipped) {
                    skipped = true;
                    continue;
                }
                p = p * Polynomial({J + k + 1.0, 1.0});
            }
            return PhiPolynomial(p);
        }
        case Family::Dicke: {
            // max(kappa, 2j) - J - Y0
            const double twoj = 2.0 * to_double(lab.j);
            const double mx = std::max(static_cast<double>(lab.kappa), twoj);
            return PhiPolynomial(Polynomial({mx - J, -1.0}));
        }
        default: break;
        }
    }
    if (model.n == 0 && m == 3 && (model.family == Family::TwoMode || model.family == Family::Multimode)) {
        if (!J_choice) fail(ErrorKind::InvalidArgument, "noncompact closed form needs a J choice");
        const double J = to_double(*J_choice);
        const Polynomial den = Polynomial({1.0 - J, 1.0}) * Polynomial({J, 1.0});
        if (model.family == Family::TwoMode) {
            // (3 Y0 - 3J + 3 + kappa)^(3) / [(-J + 1 + Y0)(J + Y0)]
            return exact_quotient(falling_power(3, -3.0 * J + 3.0 + lab.kappa, 3), den);
        }
        // prod_i (Y0 - J + 1 + kappa_i) / [(-J + 1 + Y0)(J + Y0)]
        Polynomial num({1.0});
        for (int k : lab.kappas) num = num * Polynomial({1.0 - J + k, 1.0});
        return exact_quotient(num, den);
    }
    return unsupported();
}

} // namespace sl2pd
