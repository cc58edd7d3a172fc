#include "tatrec/fft.hpp"

#include <fftw3.h>

#include <array>
#include <map>
#include <mutex>
#include <vector>

#include "tatrec/threading.hpp"

namespace tatrec {

namespace {

struct PlanKey {
    std::array<std::size_t, 3> dims;
    int rank;
    int sign;
    bool operator<(const PlanKey& o) const {
        if (rank != o.rank) return rank < o.rank;
        if (sign != o.sign) return sign < o.sign;
        return dims < o.dims;
    }
};

std::mutex g_plan_mutex;
std::map<PlanKey, fftw_plan> g_plans;

fftw_plan get_plan(int rank, std::array<std::size_t, 3> dims, int sign) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    PlanKey key{dims, rank, sign};
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second;

    std::size_t total = 1;
    std::vector<int> n(rank);
    for (int i = 0; i < rank; ++i) {
        n[i] = static_cast<int>(dims[i]);
        total *= dims[i];
    }
    std::vector<cdouble> scratch(total);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const int fsign = (sign > 0) ? FFTW_BACKWARD : FFTW_FORWARD;
    fftw_plan plan = fftw_plan_dft(rank, n.data(), buf, buf, fsign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    g_plans.emplace(key, plan);
    return plan;
}

void execute(fftw_plan plan, cdouble* data) {
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, buf, buf);
}

}  // namespace

void fft_inplace(cdouble* data, std::size_t n, int sign) {
    execute(get_plan(1, {n, 0, 0}, sign), data);
}

void fft_rows(cdouble* data, std::size_t count, std::size_t n, int sign) {
    fftw_plan plan = get_plan(1, {n, 0, 0}, sign);
    parallel_for(count, [&](std::size_t r) { execute(plan, data + r * n); });
}

void fft_2d(cdouble* data, std::size_t n0, std::size_t n1, int sign) {
    execute(get_plan(2, {n0, n1, 0}, sign), data);
}

void fft_3d(cdouble* data, std::size_t n0, std::size_t n1, std::size_t n2, int sign) {
    execute(get_plan(3, {n0, n1, n2}, sign), data);
}

}  // namespace tatrec
