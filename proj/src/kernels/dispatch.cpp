#include "ssq/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "ssq/errors.hpp"

namespace ssq::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(SSQ_HAVE_AVX2_TU) && defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

struct Selection {
    Ops ops;
    Isa isa;
};

Selection select() {
    Isa want = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
    if (const char* env = std::getenv("SSQ_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) want = Isa::scalar;
        else if (std::strcmp(env, "avx2") == 0) {
            if (!cpu_has_avx2())
                throw input_error("SSQ_KERNELS=avx2 requested but AVX2 is unavailable");
            want = Isa::avx2;
        }
        // anything else (incl. "auto"): keep the CPU-detected choice
    }
    Selection s;
    s.isa = want;
#if defined(SSQ_HAVE_AVX2_TU)
    s.ops = (want == Isa::avx2) ? detail::avx2_table() : detail::scalar_table();
#else
    s.ops = detail::scalar_table();
#endif
    return s;
}

const Selection& selection() {
    static const Selection s = select();
    return s;
}

} // namespace

const Ops& active() { return selection().ops; }

const char* active_name() {
    return selection().isa == Isa::avx2 ? "avx2" : "scalar";
}

bool avx2_available() { return cpu_has_avx2(); }

const Ops& table(Isa isa) {
    static const Ops scalar = detail::scalar_table();
    if (isa == Isa::scalar) return scalar;
#if defined(SSQ_HAVE_AVX2_TU)
    if (cpu_has_avx2()) {
        static const Ops avx2 = detail::avx2_table();
        return avx2;
    }
#endif
    throw input_error("requested kernel ISA is unavailable on this CPU");
}

} // namespace ssq::kernels
