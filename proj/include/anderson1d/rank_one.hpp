#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "anderson1d/tridiag.hpp"
#include "anderson1d/util.hpp"

namespace anderson {

using Complex = std::complex<double>;

namespace detail {

// Adaptive Simpson for complex integrands.
inline Complex adaptive_simpson_rec(const std::function<Complex(double)>& f, double a, double b,
                                    Complex fa, Complex fm, Complex fb, Complex whole, double tol,
                                    int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const Complex flm = f(lm), frm = f(rm);
    const Complex left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const Complex right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const Complex delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline Complex adaptive_simpson(const std::function<Complex(double)>& f, double a, double b,
                                double tol, int depth = 48) {
    const Complex fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const Complex whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

}  // namespace detail

// Borel transform F(z) = <phi, (H - z)^{-1} phi> through the eigensystem.
inline Complex borel_transform(const EigenSystem& es, std::span<const double> phi, Complex z) {
    if (z.imag() == 0.0) throw std::invalid_argument("borel_transform: Im z must be nonzero");
    if (static_cast<int>(phi.size()) != es.n)
        throw std::invalid_argument("borel_transform: phi size mismatch");
    Complex acc{0.0, 0.0};
    for (int k = 0; k < es.n; ++k) {
        const auto v = es.vec(k);
        double overlap = 0.0;
        for (int i = 0; i < es.n; ++i) overlap += v[i] * phi[i];
        acc += overlap * overlap / (es.values[k] - z);
    }
    return acc;
}

inline Complex borel_transform(const FiniteHamiltonian& h, std::span<const double> phi, Complex z) {
    return borel_transform(diagonalize(h), phi, z);
}

// Convenience for phi = delta at lattice site `site` (in -L..L).
inline Complex borel_transform_site(const EigenSystem& es, int site, Complex z) {
    if (z.imag() == 0.0) throw std::invalid_argument("borel_transform: Im z must be nonzero");
    const int L = (es.n - 1) / 2;
    if (std::abs(site) > L) throw std::out_of_range("borel_transform_site: site outside window");
    Complex acc{0.0, 0.0};
    for (int k = 0; k < es.n; ++k) {
        const double overlap = es.vec(k, site + L);
        acc += overlap * overlap / (es.values[k] - z);
    }
    return acc;
}

// H + lambda <delta_site, .> delta_site stays tridiagonal: a diagonal bump.
inline FiniteHamiltonian rank_one_perturb(const FiniteHamiltonian& h, int site, double lambda) {
    const int L = h.L;
    if (std::abs(site) > L) throw std::out_of_range("rank_one_perturb: site outside window");
    FiniteHamiltonian out = h;
    out.diagonal[static_cast<std::size_t>(site + L)] += lambda;
    return out;
}

// |F_lambda(z) - F(z)/(1 + lambda F(z))| with both sides computed from
// independently diagonalized operators.
inline double aronszajn_krein_defect(const FiniteHamiltonian& h, int site, double lambda,
                                     Complex z) {
    if (z.imag() == 0.0) throw std::invalid_argument("aronszajn_krein_defect: Im z nonzero");
    const Complex f = borel_transform_site(diagonalize(h), site, z);
    const Complex f_lambda =
        borel_transform_site(diagonalize(rank_one_perturb(h, site, lambda)), site, z);
    return std::abs(f_lambda - f / (1.0 + lambda * f));
}

struct SpectralAverageResult {
    Complex integral{0.0, 0.0};  // quadrature over [-lambda_max, lambda_max] + analytic tail
    Complex target{0.0, 0.0};    // 2 pi i for Im z > 0, 0 for Im z < 0
    double defect = 0.0;
    double tail_magnitude = 0.0;
    int evaluations = 0;
};

// Integrates h_z(lambda) = F_lambda(z) - F_lambda(-i) over the real line,
// with F_lambda evaluated from the eigensystem of each perturbed operator.
// Beyond lambda_max the integrand is continued in closed form through its
// two-pole partial-fraction structure 1/(lambda + 1/F(z)) - 1/(lambda + 1/F(-i)),
// which is where the conditional convergence is absorbed.
inline SpectralAverageResult spectral_average_check(const FiniteHamiltonian& h, int site,
                                                    Complex z, double lambda_max,
                                                    double quad_tol = 1e-8) {
    if (z.imag() == 0.0) throw std::invalid_argument("spectral_average_check: Im z nonzero");
    if (std::abs(z - Complex{0.0, -1.0}) < 1e-9)
        throw std::invalid_argument("spectral_average_check: z = -i is the reference point");
    const Complex minus_i{0.0, -1.0};
    const EigenSystem base = diagonalize(h);
    const Complex f_z = borel_transform_site(base, site, z);
    const Complex f_mi = borel_transform_site(base, site, minus_i);
    const Complex a = 1.0 / f_z;   // poles of the tail form sit at -a, -b
    const Complex b = 1.0 / f_mi;
    if (std::max(std::abs(a), std::abs(b)) > 0.8 * lambda_max)
        throw std::invalid_argument(
            "spectral_average_check: tail poles too close to the cutoff; increase lambda_max");

    int evals = 0;
    const auto integrand = [&](double lambda) -> Complex {
        ++evals;
        const EigenSystem es = diagonalize(rank_one_perturb(h, site, lambda));
        return borel_transform_site(es, site, z) - borel_transform_site(es, site, minus_i);
    };
    const Complex body =
        detail::adaptive_simpson(integrand, -lambda_max, lambda_max, quad_tol);

    // Antiderivative Log(l+a) - Log(l+b), with the logs kept separate: each
    // argument stays in one half plane along the real line, so the principal
    // branch is continuous per term (the ratio form is not). At -infinity the
    // antiderivative tends to i pi (s_a - s_b), s = sign(Im .).
    const double sa = a.imag() > 0 ? 1.0 : -1.0;
    const double sb = b.imag() > 0 ? 1.0 : -1.0;
    const Complex right_tail = -(std::log(lambda_max + a) - std::log(lambda_max + b));
    const Complex left_tail = std::log(-lambda_max + a) - std::log(-lambda_max + b) -
                              Complex{0.0, kPi * (sa - sb)};
    SpectralAverageResult res;
    res.tail_magnitude = std::abs(right_tail) + std::abs(left_tail);
    res.integral = body + right_tail + left_tail;
    res.target = z.imag() > 0 ? Complex{0.0, 2.0 * kPi} : Complex{0.0, 0.0};
    res.defect = std::abs(res.integral - res.target);
    res.evaluations = evals;
    return res;
}

}  // namespace anderson
