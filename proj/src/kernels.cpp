#include "pnmimo/kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace pnmimo::kern {

// AVX2 table from kernels_avx2.cpp, or nullptr when the build lacks it.
const Ops* avx2_ops();

namespace {

cd cdot_scalar(const cd* a, const cd* b, std::size_t n) {
    cd acc{0.0, 0.0};
    for (std::size_t m = 0; m < n; ++m) acc += a[m] * b[m];
    return acc;
}

cd cdot_conj_scalar(const cd* a, const cd* b, std::size_t n) {
    cd acc{0.0, 0.0};
    for (std::size_t m = 0; m < n; ++m) acc += std::conj(a[m]) * b[m];
    return acc;
}

cd cdot_abs2w_scalar(const cd* a, const cd* u, const cd* v, std::size_t n) {
    cd acc{0.0, 0.0};
    for (std::size_t m = 0; m < n; ++m) acc += std::norm(a[m]) * (std::conj(u[m]) * v[m]);
    return acc;
}

void caxpy_scalar(cd alpha, const cd* x, cd* y, std::size_t n) {
    for (std::size_t m = 0; m < n; ++m) y[m] += alpha * x[m];
}

void cmul_scalar(const cd* a, const cd* b, cd* out, std::size_t n) {
    for (std::size_t m = 0; m < n; ++m) out[m] = a[m] * b[m];
}

void cmul_conj_scalar(const cd* a, const cd* b, cd* out, std::size_t n) {
    for (std::size_t m = 0; m < n; ++m) out[m] = std::conj(a[m]) * b[m];
}

void cscal_scalar(cd alpha, cd* x, std::size_t n) {
    for (std::size_t m = 0; m < n; ++m) x[m] *= alpha;
}

double sum_abs2_scalar(const cd* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t m = 0; m < n; ++m) acc += std::norm(a[m]);
    return acc;
}

constexpr Ops kScalarOps = {
    cdot_scalar,  cdot_conj_scalar, cdot_abs2w_scalar, caxpy_scalar,
    cmul_scalar,  cmul_conj_scalar, cscal_scalar,      sum_abs2_scalar,
};

struct Active {
    const Ops* ops = &kScalarOps;
    Backend backend = Backend::Scalar;
};

Active& active() {
    static Active a = [] {
        Active init;
        const char* env = std::getenv("PNMIMO_KERNELS");
        std::string_view want = env ? std::string_view(env) : std::string_view("auto");
        if (want == "scalar") return init;
        if (avx2_available()) {
            init.ops = avx2_ops();  // nullptr checked by avx2_available()
            init.backend = Backend::Avx2;
        }
        return init;
    }();
    return a;
}

}  // namespace

// Defined in kernels_avx2.cpp when the build includes it; weak fallback here.
#if !defined(PNMIMO_HAVE_AVX2_TU)
const Ops* avx2_ops() { return nullptr; }
#endif

const Ops& ops() { return *active().ops; }
const Ops& scalar_ops() { return kScalarOps; }
Backend active_backend() { return active().backend; }

std::string_view backend_name(Backend b) {
    switch (b) {
        case Backend::Avx2: return "avx2";
        case Backend::Scalar: break;
    }
    return "scalar";
}

bool avx2_available() {
    const Ops* t = avx2_ops();
#if defined(__x86_64__) || defined(_M_X64)
#if defined(__GNUC__) || defined(__clang__)
    return t != nullptr && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
#else
    (void)t;
    return false;
#endif
}

bool select_backend(Backend b) {
    if (b == Backend::Scalar) {
        active().ops = &kScalarOps;
        active().backend = Backend::Scalar;
        return true;
    }
    if (b == Backend::Avx2 && avx2_available()) {
        active().ops = avx2_ops();
        active().backend = Backend::Avx2;
        return true;
    }
    return false;
}

bool select_backend(std::string_view name) {
    if (name == "scalar") return select_backend(Backend::Scalar);
    if (name == "avx2") return select_backend(Backend::Avx2);
    if (name == "auto") {
        if (avx2_available()) return select_backend(Backend::Avx2);
        return select_backend(Backend::Scalar);
    }
    return false;
}

}  // namespace pnmimo::kern
