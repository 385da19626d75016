#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "kform.hpp"

namespace calib {

// Deterministic generator with platform-independent output; seeded reports
// must compare bit-for-bit across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64()
    {
        // xorshift* variant
        s_ ^= s_ >> 12;
        s_ ^= s_ << 25;
        s_ ^= s_ >> 27;
        return s_ * 0x2545f4914f6cdd1dull;
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [-1, 1]
    double sym() { return 2.0 * uniform() - 1.0; }

    std::vector<double> real_vector(int dim)
    {
        std::vector<double> v(dim);
        for (auto& x : v) x = sym();
        return v;
    }

    Vector unit_vector(int dim)
    {
        Vector v(dim);
        double nrm = 0;
        do {
            nrm = 0;
            for (int i = 0; i < dim; ++i) {
                const double x = sym();
                v[i] = cplx(x, 0);
                nrm += x * x;
            }
        } while (nrm < 1e-8);
        const double inv = 1.0 / std::sqrt(nrm);
        for (int i = 0; i < dim; ++i) v[i] *= inv;
        return v;
    }

    MatD real_matrix(int rows, int cols, double scale = 1.0)
    {
        MatD m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = scale * sym();
        return m;
    }

    // Id + scale * (random) -- invertible for small scale, used for pullback sweeps.
    MatD gl_perturbation(int dim, double scale)
    {
        MatD m = MatD::identity(dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) m(i, j) += scale * sym();
        return m;
    }

    KForm random_form(int ambient_dim, int degree, bool complex_coeffs = true)
    {
        KForm f(ambient_dim, degree);
        for (int i = 0; i < f.size(); ++i) f[i] = cplx(sym(), complex_coeffs ? sym() : 0.0);
        return f;
    }

private:
    std::uint64_t s_;
};

} // namespace calib
