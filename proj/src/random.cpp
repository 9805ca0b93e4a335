#include "ncpdo/random.hpp"

#include <cmath>

namespace ncpdo {

cplx gaussian(Rng& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    double re = n(rng);
    double im = n(rng);
    return {re, im};
}

OpValuedFunction random_function(const GridSpec& g, Rng& rng, double band)
{
    g.validate();
    std::vector<cplx> c(g.values(), cplx(0));
    const std::size_t B = g.block();
    for (std::size_t i = 0; i < g.points(); ++i) {
        bool keep;
        if (band < 0) {
            keep = true;
            for (int a = 0; a < g.d; ++a)
                keep = keep && g.axis_index(i, a) != 0;
        } else {
            keep = g.freq_norm(i) <= band;
        }
        // draw even when discarded so the stream does not depend on band
        for (std::size_t b = 0; b < B; ++b) {
            cplx z = gaussian(rng);
            if (keep)
                c[i * B + b] = z;
        }
    }
    return OpValuedFunction::from_coeffs(g, std::move(c));
}

std::vector<cplx> random_real_samples(const GridSpec& g, Rng& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> s(g.points());
    for (auto& v : s)
        v = u(rng);
    return s;
}

Mat random_matrix(int q, Rng& rng)
{
    Mat a(q, q);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
            a(i, j) = gaussian(rng);
    return a;
}

Mat random_unitary(int q, Rng& rng)
{
    Eigen::HouseholderQR<Mat> qr(random_matrix(q, rng));
    return qr.householderQ() * Mat::Identity(q, q);
}

} // namespace ncpdo
