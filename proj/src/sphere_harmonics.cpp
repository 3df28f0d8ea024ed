// SPDX-License-Identifier: Apache-2.0
#include "weylsampl/sphere_harmonics.hpp"

#include <cmath>
#include <numbers>

namespace weylsampl {

void sh_eval_all(int lmax, double x, double y, double z, std::vector<double>& out) {
    const int n = (lmax + 1) * (lmax + 1);
    out.assign(n, 0.0);

    // ct = cos(theta), st = sin(theta); phi measured from the +x axis.
    const double ct = z;
    const double st = std::sqrt(std::max(0.0, 1.0 - z * z));
    // cos(m phi), sin(m phi) via the Chebyshev recurrence on (cphi, sphi).
    // st == 0 leaves phi undefined; the m > 0 harmonics vanish there anyway.
    const double cphi = st > 1e-300 ? x / st : 1.0;
    const double sphi = st > 1e-300 ? y / st : 0.0;

    std::vector<double> cm(lmax + 1), sm(lmax + 1);
    cm[0] = 1.0;
    sm[0] = 0.0;
    if (lmax >= 1) {
        cm[1] = cphi;
        sm[1] = sphi;
        for (int m = 2; m <= lmax; ++m) {
            cm[m] = 2.0 * cphi * cm[m - 1] - cm[m - 2];
            sm[m] = 2.0 * cphi * sm[m - 1] - sm[m - 2];
        }
    }

    auto at = [&](int l, int idx_in_l) -> double& { return out[l * l + idx_in_l]; };

    // Fully normalized Pbar_{l,m}(ct): integral over the sphere of
    // (Pbar_{l,m} * {1 or sqrt2 cos/sin(m phi)})^2 equals 1.
    const double inv_sqrt4pi = 1.0 / std::sqrt(4.0 * std::numbers::pi);
    const double sqrt2 = std::numbers::sqrt2;

    // March in m: pmm = Pbar_{m,m}, then l-recurrence upward.
    double pmm = inv_sqrt4pi; // Pbar_{0,0}
    for (int m = 0; m <= lmax; ++m) {
        if (m > 0) pmm *= st * std::sqrt((2.0 * m + 1.0) / (2.0 * m));
        double p_lm1 = pmm; // Pbar_{m,m}
        double p_l = (m < lmax) ? std::sqrt(2.0 * m + 3.0) * ct * pmm : 0.0; // Pbar_{m+1,m}
        for (int l = m; l <= lmax; ++l) {
            double plm;
            if (l == m)
                plm = p_lm1;
            else if (l == m + 1)
                plm = p_l;
            else {
                double a = std::sqrt((4.0 * l * l - 1.0) /
                                     (static_cast<double>(l) * l - static_cast<double>(m) * m));
                double b = std::sqrt(((l - 1.0) * (l - 1.0) - static_cast<double>(m) * m) /
                                     (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
                plm = a * (ct * p_l - b * p_lm1);
                p_lm1 = p_l;
                p_l = plm;
            }
            if (m == 0) {
                at(l, 0) = plm;
            } else {
                at(l, 2 * m - 1) = sqrt2 * plm * cm[m];
                at(l, 2 * m) = sqrt2 * plm * sm[m];
            }
        }
    }
}

} // namespace weylsampl
