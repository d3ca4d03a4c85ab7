// kernels.hpp - complex array kernels, scalar reference + SIMD variants
//
// The scalar table is the reference semantics; SIMD variants must agree
// with it to floating-point reassociation accuracy (see the equivalence
// tests). The active table is picked once at startup from CPU features,
// overridable via select_backend() or the PNMIMO_KERNELS environment
// variable ("scalar", "avx2", "auto").

#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace pnmimo::kern {

using cd = std::complex<double>;

struct Ops {
    // sum_m a[m] * b[m]
    cd (*cdot)(const cd* a, const cd* b, std::size_t n);
    // sum_m conj(a[m]) * b[m]
    cd (*cdot_conj)(const cd* a, const cd* b, std::size_t n);
    // sum_m |a[m]|^2 * conj(u[m]) * v[m]
    cd (*cdot_abs2w)(const cd* a, const cd* u, const cd* v, std::size_t n);
    // y[m] += alpha * x[m]
    void (*caxpy)(cd alpha, const cd* x, cd* y, std::size_t n);
    // out[m] = a[m] * b[m]
    void (*cmul)(const cd* a, const cd* b, cd* out, std::size_t n);
    // out[m] = conj(a[m]) * b[m]
    void (*cmul_conj)(const cd* a, const cd* b, cd* out, std::size_t n);
    // x[m] *= alpha
    void (*cscal)(cd alpha, cd* x, std::size_t n);
    // sum_m |a[m]|^2
    double (*sum_abs2)(const cd* a, std::size_t n);
};

enum class Backend { Scalar, Avx2 };

/// Active kernel table.
const Ops& ops();

/// Scalar reference table, always available.
const Ops& scalar_ops();

Backend active_backend();
std::string_view backend_name(Backend b);
bool avx2_available();

/// Returns false (and leaves the active table alone) if the backend is not
/// available on this machine.
bool select_backend(Backend b);
/// Accepts "scalar", "avx2" or "auto".
bool select_backend(std::string_view name);

}  // namespace pnmimo::kern
