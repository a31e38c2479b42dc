#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <new>
#include <vector>

namespace parity_qaoa::detail {

template <class T, std::size_t Align = 64>
struct AlignedAllocator {
    using value_type = T;
    AlignedAllocator() = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U, Align> &) {}
    template <class U>
    struct rebind {
        using other = AlignedAllocator<U, Align>;
    };
    T *allocate(std::size_t n) {
        return static_cast<T *>(::operator new(n * sizeof(T), std::align_val_t{Align}));
    }
    void deallocate(T *p, std::size_t) {
        ::operator delete(p, std::align_val_t{Align});
    }
    friend bool operator==(const AlignedAllocator &, const AlignedAllocator &) {
        return true;
    }
};

using AlignedDoubles = std::vector<double, AlignedAllocator<double>>;

/// Offset between the real and imaginary halves of a split state, so equal indices
/// in the two halves never share a cache set or a 4 KiB page offset.
inline constexpr std::size_t split_skew = 24;

/// Bits rotated while a block stays in L1.
inline constexpr std::size_t block_bits = 11;

/// t[x + half] = t[x] * (c + i s) for x < half.
inline void scale_block(double *__restrict re, double *__restrict im, std::size_t half, double c, double s) {
    for (std::size_t x = 0; x < half; x++) {
        re[x + half] = re[x] * c - im[x] * s;
        im[x + half] = re[x] * s + im[x] * c;
    }
}

/// out = t * (c + i s), elementwise.
inline void scale_into(const double *__restrict tr, const double *__restrict ti, double *__restrict out_r,
                       double *__restrict out_i, std::size_t n, double c, double s) {
    for (std::size_t j = 0; j < n; j++) {
        out_r[j] = tr[j] * c - ti[j] * s;
        out_i[j] = tr[j] * s + ti[j] * c;
    }
}

/// t *= p, elementwise.
inline void multiply_into(double *__restrict tr, double *__restrict ti, const double *__restrict pr,
                          const double *__restrict pi, std::size_t n) {
    for (std::size_t j = 0; j < n; j++) {
        double r = tr[j] * pr[j] - ti[j] * pi[j];
        ti[j] = tr[j] * pi[j] + ti[j] * pr[j];
        tr[j] = r;
    }
}

// RX(2 beta) with c = cos(beta), s = sin(beta) on the pair (a, b):
// a' = c a - i s b, b' = c b - i s a.
#define PARITY_QAOA_RX(ar, ai, br, bi)   \
    {                                    \
        auto t0r = c * ar + s * bi;      \
        auto t0i = c * ai - s * br;      \
        auto t1r = c * br + s * ai;      \
        auto t1i = c * bi - s * ar;      \
        ar = t0r;                        \
        ai = t0i;                        \
        br = t1r;                        \
        bi = t1i;                        \
    }

/// Scalar RX on index bit `bit` of 2^bits amplitudes.
inline void rotate_bit_scalar(double *re, double *im, std::size_t bits, std::size_t bit, double c, double s) {
    const std::size_t dim = std::size_t{1} << bits, m = std::size_t{1} << bit;
    for (std::size_t g = 0; g < dim; g += 2 * m) {
        for (std::size_t i = g; i < g + m; i++) {
            double ar = re[i], ai = im[i], br = re[i + m], bi = im[i + m];
            PARITY_QAOA_RX(ar, ai, br, bi)
            re[i] = ar;
            im[i] = ai;
            re[i + m] = br;
            im[i + m] = bi;
        }
    }
}

using v8 = double __attribute__((vector_size(64)));
using v8i = long long __attribute__((vector_size(64)));

inline v8 load8(const double *p) {
    v8 v;
    std::memcpy(&v, p, sizeof v);
    return v;
}

inline void store8(double *p, v8 v) {
    std::memcpy(p, &v, sizeof v);
}

#if defined(__clang__)
#define PARITY_QAOA_SWAP(v, a, b, c, d, e, f, g, h) __builtin_shufflevector(v, v, a, b, c, d, e, f, g, h)
#else
#define PARITY_QAOA_SWAP(v, a, b, c, d, e, f, g, h) __builtin_shuffle(v, v8i{a, b, c, d, e, f, g, h})
#endif

/// RX on index bits 0, 1, 2, which live inside one eight-lane vector.
inline void rotate_lanes(v8 &r, v8 &i, double c, double s) {
    v8 pr = PARITY_QAOA_SWAP(r, 1, 0, 3, 2, 5, 4, 7, 6), pi = PARITY_QAOA_SWAP(i, 1, 0, 3, 2, 5, 4, 7, 6);
    r = c * r + s * pi;
    i = c * i - s * pr;
    pr = PARITY_QAOA_SWAP(r, 2, 3, 0, 1, 6, 7, 4, 5);
    pi = PARITY_QAOA_SWAP(i, 2, 3, 0, 1, 6, 7, 4, 5);
    r = c * r + s * pi;
    i = c * i - s * pr;
    pr = PARITY_QAOA_SWAP(r, 4, 5, 6, 7, 0, 1, 2, 3);
    pi = PARITY_QAOA_SWAP(i, 4, 5, 6, 7, 0, 1, 2, 3);
    r = c * r + s * pi;
    i = c * i - s * pr;
}

#undef PARITY_QAOA_SWAP

/// RX on three index bits spanned by eight vectors `stride` doubles apart.
template <bool Lanes>
inline void rotate_radix8(double *re, double *im, std::size_t stride, double c, double s) {
    v8 r0 = load8(re), r1 = load8(re + stride), r2 = load8(re + 2 * stride), r3 = load8(re + 3 * stride);
    v8 r4 = load8(re + 4 * stride), r5 = load8(re + 5 * stride), r6 = load8(re + 6 * stride);
    v8 r7 = load8(re + 7 * stride);
    v8 i0 = load8(im), i1 = load8(im + stride), i2 = load8(im + 2 * stride), i3 = load8(im + 3 * stride);
    v8 i4 = load8(im + 4 * stride), i5 = load8(im + 5 * stride), i6 = load8(im + 6 * stride);
    v8 i7 = load8(im + 7 * stride);
    if constexpr (Lanes) {
        rotate_lanes(r0, i0, c, s);
        rotate_lanes(r1, i1, c, s);
        rotate_lanes(r2, i2, c, s);
        rotate_lanes(r3, i3, c, s);
        rotate_lanes(r4, i4, c, s);
        rotate_lanes(r5, i5, c, s);
        rotate_lanes(r6, i6, c, s);
        rotate_lanes(r7, i7, c, s);
    }
    PARITY_QAOA_RX(r0, i0, r1, i1)
    PARITY_QAOA_RX(r2, i2, r3, i3)
    PARITY_QAOA_RX(r4, i4, r5, i5)
    PARITY_QAOA_RX(r6, i6, r7, i7)
    PARITY_QAOA_RX(r0, i0, r2, i2)
    PARITY_QAOA_RX(r1, i1, r3, i3)
    PARITY_QAOA_RX(r4, i4, r6, i6)
    PARITY_QAOA_RX(r5, i5, r7, i7)
    PARITY_QAOA_RX(r0, i0, r4, i4)
    PARITY_QAOA_RX(r1, i1, r5, i5)
    PARITY_QAOA_RX(r2, i2, r6, i6)
    PARITY_QAOA_RX(r3, i3, r7, i7)
    store8(re, r0), store8(re + stride, r1), store8(re + 2 * stride, r2), store8(re + 3 * stride, r3);
    store8(re + 4 * stride, r4), store8(re + 5 * stride, r5), store8(re + 6 * stride, r6);
    store8(re + 7 * stride, r7);
    store8(im, i0), store8(im + stride, i1), store8(im + 2 * stride, i2), store8(im + 3 * stride, i3);
    store8(im + 4 * stride, i4), store8(im + 5 * stride, i5), store8(im + 6 * stride, i6);
    store8(im + 7 * stride, i7);
}

/// RX on two index bits spanned by four vectors `stride` doubles apart.
inline void rotate_radix4(double *re, double *im, std::size_t stride, double c, double s) {
    v8 r0 = load8(re), r1 = load8(re + stride), r2 = load8(re + 2 * stride), r3 = load8(re + 3 * stride);
    v8 i0 = load8(im), i1 = load8(im + stride), i2 = load8(im + 2 * stride), i3 = load8(im + 3 * stride);
    PARITY_QAOA_RX(r0, i0, r1, i1)
    PARITY_QAOA_RX(r2, i2, r3, i3)
    PARITY_QAOA_RX(r0, i0, r2, i2)
    PARITY_QAOA_RX(r1, i1, r3, i3)
    store8(re, r0), store8(re + stride, r1), store8(re + 2 * stride, r2), store8(re + 3 * stride, r3);
    store8(im, i0), store8(im + stride, i1), store8(im + 2 * stride, i2), store8(im + 3 * stride, i3);
}

/// RX on one index bit spanned by two vectors `stride` doubles apart.
inline void rotate_radix2(double *re, double *im, std::size_t stride, double c, double s) {
    v8 r0 = load8(re), r1 = load8(re + stride), i0 = load8(im), i1 = load8(im + stride);
    PARITY_QAOA_RX(r0, i0, r1, i1)
    store8(re, r0), store8(re + stride, r1), store8(im, i0), store8(im + stride, i1);
}

#undef PARITY_QAOA_RX

/// RX on index bits [lo, lo + count) of 2^bits amplitudes; lo >= 3 and count <= 3.
inline void rotate_bit_group(double *re, double *im, std::size_t bits, std::size_t lo, std::size_t count, double c,
                             double s) {
    const std::size_t dim = std::size_t{1} << bits, m = std::size_t{1} << lo, span = m << count;
    for (std::size_t g = 0; g < dim; g += span) {
        for (std::size_t j = g; j < g + m; j += 8) {
            if (count == 3) {
                rotate_radix8<false>(re + j, im + j, m, c, s);
            } else if (count == 2) {
                rotate_radix4(re + j, im + j, m, c, s);
            } else {
                rotate_radix2(re + j, im + j, m, c, s);
            }
        }
    }
}

/// Widest group for bits starting at lo: eight streams conflict in cache beyond 512 doubles.
inline std::size_t group_width(std::size_t lo, std::size_t remaining) {
    return std::min<std::size_t>(remaining, lo < 9 ? 3 : 2);
}

/// Penalty tables up to this size are looked up with in-register permutes.
inline constexpr std::size_t small_table = 16;

/// out = in * t * (hr + i hi) * pen[idx], elementwise; idx may be null for no penalty.
/// Wide indices gather from a table of any size.
inline void apply_phase(const double *__restrict in_r, const double *__restrict in_i, const double *__restrict t_r,
                        const double *__restrict t_i, double hr, double hi, const uint32_t *__restrict idx,
                        const double *__restrict pen_r, const double *__restrict pen_i, double *__restrict out_r,
                        double *__restrict out_i, std::size_t n) {
    for (std::size_t j = 0; j < n; j++) {
        double fr = t_r[j] * hr - t_i[j] * hi, fi = t_r[j] * hi + t_i[j] * hr;
        if (idx) {
            double gr = pen_r[idx[j]], gi = pen_i[idx[j]];
            double q = fr * gr - fi * gi;
            fi = fr * gi + fi * gr;
            fr = q;
        }
        out_r[j] = in_r[j] * fr - in_i[j] * fi;
        out_i[j] = in_r[j] * fi + in_i[j] * fr;
    }
}

/// As apply_phase with byte indices into a table of small_table entries; n is a multiple of 8.
inline void apply_phase_small(const double *__restrict in_r, const double *__restrict in_i,
                              const double *__restrict t_r, const double *__restrict t_i, double hr, double hi,
                              const uint8_t *__restrict idx, const double *__restrict pen_r,
                              const double *__restrict pen_i, double *__restrict out_r, double *__restrict out_i,
                              std::size_t n) {
#if defined(__GNUC__) && !defined(__clang__)
    using u8x8 = unsigned char __attribute__((vector_size(8)));
    const v8 p0r = load8(pen_r), p1r = load8(pen_r + 8), p0i = load8(pen_i), p1i = load8(pen_i + 8);
    for (std::size_t j = 0; j < n; j += 8) {
        u8x8 k;
        std::memcpy(&k, idx + j, sizeof k);
        const v8i m = __builtin_convertvector(k, v8i);
        const v8 gr = __builtin_shuffle(p0r, p1r, m), gi = __builtin_shuffle(p0i, p1i, m);
        const v8 a = load8(t_r + j), b = load8(t_i + j);
        const v8 fr = a * hr - b * hi, fi = a * hi + b * hr;
        const v8 qr = fr * gr - fi * gi, qi = fr * gi + fi * gr;
        const v8 x = load8(in_r + j), y = load8(in_i + j);
        store8(out_r + j, x * qr - y * qi);
        store8(out_i + j, x * qi + y * qr);
    }
#else
    for (std::size_t j = 0; j < n; j++) {
        double fr = t_r[j] * hr - t_i[j] * hi, fi = t_r[j] * hi + t_i[j] * hr;
        double gr = pen_r[idx[j]], gi = pen_i[idx[j]];
        double q = fr * gr - fi * gi;
        fi = fr * gi + fi * gr;
        fr = q;
        out_r[j] = in_r[j] * fr - in_i[j] * fi;
        out_i[j] = in_r[j] * fi + in_i[j] * fr;
    }
#endif
}

/// RX(2 beta) on every one of the `bits` index bits of 2^bits amplitudes.
inline void rotate_all(double *re, double *im, std::size_t bits, double c, double s) {
    if (bits < 3) {
        for (std::size_t b = 0; b < bits; b++) {
            rotate_bit_scalar(re, im, bits, b, c, s);
        }
        return;
    }
    const std::size_t dim = std::size_t{1} << bits;
    if (bits == 3) {
        v8 r = load8(re), i = load8(im);
        rotate_lanes(r, i, c, s);
        store8(re, r);
        store8(im, i);
        return;
    }
    if (bits < 6) {
        for (std::size_t g = 0; g < dim; g += 8) {
            v8 r = load8(re + g), i = load8(im + g);
            rotate_lanes(r, i, c, s);
            store8(re + g, r);
            store8(im + g, i);
        }
        rotate_bit_group(re, im, bits, 3, bits - 3, c, s);
        return;
    }
    for (std::size_t g = 0; g < dim; g += 64) {
        rotate_radix8<true>(re + g, im + g, 8, c, s);
    }
    for (std::size_t lo = 6; lo < bits;) {
        std::size_t w = group_width(lo, bits - lo);
        rotate_bit_group(re, im, bits, lo, w, c, s);
        lo += w;
    }
}

/// RX(2 beta) on index bits [from, to) of 2^to amplitudes, from >= 3.
inline void rotate_upper(double *re, double *im, std::size_t from, std::size_t to, double c, double s) {
    for (std::size_t lo = from; lo < to;) {
        std::size_t w = group_width(lo, to - lo);
        rotate_bit_group(re, im, to, lo, w, c, s);
        lo += w;
    }
}

}  // namespace parity_qaoa::detail
