#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pnmimo/kernels.hpp"
#include "pnmimo/rng.hpp"

using namespace pnmimo;
using kern::cd;

namespace {

std::vector<cd> random_array(RngStream& rng, std::size_t n, double scale = 1.0) {
    std::vector<cd> v(n);
    for (auto& z : v) z = cd{scale * (2.0 * rng.uniform() - 1.0), scale * (2.0 * rng.uniform() - 1.0)};
    return v;
}

bool close(cd a, cd b, double scale, double tol = 1e-12) {
    return std::abs(a - b) <= tol * std::max(scale, 1.0);
}

const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 33, 64, 257};

}  // namespace

TEST_CASE("scalar kernels match naive complex arithmetic") {
    const auto& ops = kern::scalar_ops();
    const std::vector<cd> a = {{1, 2}, {-3, 0.5}, {0, -1}};
    const std::vector<cd> b = {{2, -1}, {0.25, 4}, {1, 1}};

    cd dot{}, dotc{};
    for (int i = 0; i < 3; ++i) {
        dot += a[i] * b[i];
        dotc += std::conj(a[i]) * b[i];
    }
    CHECK(ops.cdot(a.data(), b.data(), 3) == dot);
    CHECK(ops.cdot_conj(a.data(), b.data(), 3) == dotc);
    CHECK(ops.sum_abs2(a.data(), 3) == doctest::Approx(std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2])));
}

TEST_CASE("avx2 variants agree with the scalar reference") {
    if (!kern::avx2_available()) {
        MESSAGE("AVX2 unavailable on this machine; equivalence suite skipped");
        return;
    }
    REQUIRE(kern::select_backend(kern::Backend::Avx2));
    const auto& simd = kern::ops();
    const auto& ref = kern::scalar_ops();
    RngStream rng(8711, 0);

    for (std::size_t n : kSizes) {
        CAPTURE(n);
        const auto a = random_array(rng, n);
        const auto b = random_array(rng, n);
        const auto u = random_array(rng, n);
        const cd alpha{0.7, -1.3};
        const double mag = std::sqrt(static_cast<double>(n) + 1.0);

        CHECK(close(simd.cdot(a.data(), b.data(), n), ref.cdot(a.data(), b.data(), n), mag));
        CHECK(close(simd.cdot_conj(a.data(), b.data(), n), ref.cdot_conj(a.data(), b.data(), n), mag));
        CHECK(close(simd.cdot_abs2w(a.data(), u.data(), b.data(), n),
                    ref.cdot_abs2w(a.data(), u.data(), b.data(), n), 2.0 * mag));
        CHECK(std::abs(simd.sum_abs2(a.data(), n) - ref.sum_abs2(a.data(), n)) <= 1e-12 * (mag * mag + 1.0));

        std::vector<cd> y1 = random_array(rng, n), y2 = y1;
        simd.caxpy(alpha, a.data(), y1.data(), n);
        ref.caxpy(alpha, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i], 4.0));

        std::vector<cd> o1(n), o2(n);
        simd.cmul(a.data(), b.data(), o1.data(), n);
        ref.cmul(a.data(), b.data(), o2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(o1[i], o2[i], 2.0));

        simd.cmul_conj(a.data(), b.data(), o1.data(), n);
        ref.cmul_conj(a.data(), b.data(), o2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(o1[i], o2[i], 2.0));

        std::vector<cd> s1 = a, s2 = a;
        simd.cscal(alpha, s1.data(), n);
        ref.cscal(alpha, s2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(s1[i], s2[i], 2.0));
    }
    kern::select_backend("auto");
}

TEST_CASE("in-place cmul_conj aliasing (second operand)") {
    if (!kern::avx2_available()) return;
    REQUIRE(kern::select_backend(kern::Backend::Avx2));
    RngStream rng(5, 0);
    for (std::size_t n : {1u, 2u, 5u, 32u}) {
        const auto a = random_array(rng, n);
        auto b = random_array(rng, n);
        auto expect = b;
        kern::scalar_ops().cmul_conj(a.data(), expect.data(), expect.data(), n);
        kern::ops().cmul_conj(a.data(), b.data(), b.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(b[i], expect[i], 2.0));
    }
    kern::select_backend("auto");
}

TEST_CASE("backend selection") {
    CHECK(kern::select_backend("scalar"));
    CHECK(kern::active_backend() == kern::Backend::Scalar);
    CHECK(kern::backend_name(kern::active_backend()) == "scalar");
    CHECK_FALSE(kern::select_backend("neon"));
    CHECK(kern::select_backend("auto"));
    if (kern::avx2_available()) CHECK(kern::active_backend() == kern::Backend::Avx2);
}
