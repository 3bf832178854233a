#include "dtnlab/fft.hpp"

namespace dtnlab {

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_pow2(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw Error("fft_pow2: size not a power of two");
  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * kPi / static_cast<double>(len);
    const cplx wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        cplx u = a[i + k];
        cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

void fftnd(std::vector<cplx>& a, const std::vector<std::size_t>& dims, int sign) {
  std::size_t total = 1;
  for (std::size_t d : dims) total *= d;
  if (a.size() != total) throw Error("fftnd: extent mismatch");

  // Transform along each axis; stride bookkeeping for row-major layout.
  std::size_t stride = 1;
  for (std::size_t axis = dims.size(); axis-- > 0;) {
    const std::size_t len = dims[axis];
    std::vector<cplx> line(len);
    const std::size_t block = stride * len;
    for (std::size_t base = 0; base < total; base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (std::size_t k = 0; k < len; ++k) line[k] = a[base + off + k * stride];
        fft_pow2(line, sign);
        for (std::size_t k = 0; k < len; ++k) a[base + off + k * stride] = line[k];
      }
    }
    stride *= len;
  }
}

}  // namespace dtnlab
